import math

import numpy as np
import pytest

from fieldsync import fp_core


def random_polynomial(
    rng: np.random.Generator, field: fp_core.PrimeField, max_degree: int
) -> fp_core.Polynomial:
    """A nonzero polynomial of degree at most `max_degree`."""
    degree = int(rng.integers(0, max_degree + 1))
    lower = rng.integers(0, field.p, size=degree).tolist()
    return fp_core.Polynomial(field, [*lower, int(rng.integers(1, field.p))])


class TestPrimeField:
    @pytest.mark.parametrize("p", [2, 3, 5, 7, 101, 2**31 - 1])
    def test_accepts_primes(self, p: int) -> None:
        assert fp_core.PrimeField(p).p == p

    @pytest.mark.parametrize("p", [0, 1, 4, 9, 91, 2**31])
    def test_rejects_non_primes_and_out_of_range(self, p: int) -> None:
        with pytest.raises(fp_core.NotPrimeError):
            fp_core.PrimeField(p)

    def test_rejects_non_integers(self) -> None:
        with pytest.raises(TypeError):
            fp_core.PrimeField(True)  # noqa: FBT003

    def test_not_prime_error_is_a_value_error(self) -> None:
        with pytest.raises(ValueError, match="modulus not prime"):
            fp_core.PrimeField(15)

    def test_fields_equal_by_modulus(self) -> None:
        assert fp_core.PrimeField(7) == fp_core.PrimeField(7)
        assert fp_core.PrimeField(7) != fp_core.PrimeField(5)

    def test_reduces_values(self, f5: fp_core.PrimeField) -> None:
        assert f5(12).value == 2
        assert f5(-1).value == 4
        assert [e.value for e in f5.elements()] == [0, 1, 2, 3, 4]


class TestFieldElement:
    @pytest.fixture
    def f7(self) -> fp_core.PrimeField:
        return fp_core.PrimeField(7)

    def test_arithmetic(self, f7: fp_core.PrimeField) -> None:
        assert f7(3) + f7(5) == f7(1)
        assert f7(3) - f7(5) == f7(5)
        assert f7(3) * f7(5) == f7(1)
        assert f7(3) / f7(5) == f7(2)
        assert -f7(3) == f7(4)

    def test_powers(self, f7: fp_core.PrimeField) -> None:
        assert f7(3) ** 6 == f7(1)
        assert f7(3) ** -1 == f7(5)
        assert f7(2) ** 0 == f7(1)

    @pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
    def test_every_nonzero_element_has_an_inverse(self, p: int) -> None:
        field = fp_core.PrimeField(p)
        for element in field.elements():
            if element:
                assert element * element.inverse() == field.one

    @pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
    def test_fermat(self, p: int) -> None:
        field = fp_core.PrimeField(p)
        for element in field.elements():
            assert element**p == element

    def test_zero_has_no_inverse(self, f7: fp_core.PrimeField) -> None:
        with pytest.raises(ZeroDivisionError):
            f7.zero.inverse()
        with pytest.raises(ZeroDivisionError):
            f7(3) / f7(0)

    def test_rejects_mixed_fields(
        self, f7: fp_core.PrimeField, f5: fp_core.PrimeField
    ) -> None:
        with pytest.raises(fp_core.FieldMismatchError):
            f7(1) + f5(1)

    def test_rejects_non_canonical_values(self, f7: fp_core.PrimeField) -> None:
        with pytest.raises(ValueError, match="canonical"):
            fp_core.FieldElement(7, f7)


class TestPolynomial:
    def test_trims_trailing_zeros(self, f5: fp_core.PrimeField) -> None:
        polynomial = fp_core.Polynomial(f5, [1, 0, 5, 10])
        assert polynomial.coeffs == (1,)
        assert polynomial.degree == 0

    def test_zero_polynomial(self, f5: fp_core.PrimeField) -> None:
        zero = fp_core.Polynomial.zero(f5)
        assert zero.coeffs == ()
        assert zero.degree == -math.inf
        assert zero.is_zero
        assert str(zero) == "0"

    def test_reduces_coefficients(self, f5: fp_core.PrimeField) -> None:
        assert fp_core.Polynomial(f5, [-1, 7, 3]).coeffs == (4, 2, 3)

    def test_str(self, f5: fp_core.PrimeField) -> None:
        assert str(fp_core.Polynomial(f5, [1, 0, 3])) == "3λ^2 + 1"
        assert str(fp_core.Polynomial(f5, [0, 1])) == "λ"

    def test_evaluate(self, f5: fp_core.PrimeField) -> None:
        polynomial = fp_core.Polynomial(f5, [1, 1, 1])
        assert polynomial.evaluate(2) == f5(2)
        assert polynomial.evaluate(f5(1)) == f5(3)

    def test_add_and_subtract(self, f5: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial(f5, [1, 2, 3])
        g = fp_core.Polynomial(f5, [4, 3, 2])
        assert (f + g).coeffs == ()
        assert (f - g).coeffs == (2, 4, 1)

    def test_multiply(self, f5: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial(f5, [1, 1])
        g = fp_core.Polynomial(f5, [4, 1])
        # (λ + 1)(λ - 1) = λ^2 - 1
        assert (f * g).coeffs == (4, 0, 1)
        assert (f * f5(2)).coeffs == (2, 2)
        assert (f * fp_core.Polynomial.zero(f5)).is_zero

    def test_power(self, f2: fp_core.PrimeField) -> None:
        # Frobenius: (λ + 1)^2 = λ^2 + 1 over F_2
        assert (fp_core.Polynomial(f2, [1, 1]) ** 2).coeffs == (1, 0, 1)

    def test_divmod(self, f5: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial(f5, [3, 2, 0, 1])
        g = fp_core.Polynomial.from_roots(f5, [1])
        quotient, remainder = divmod(f, g)
        assert quotient.coeffs == (3, 1, 1)
        assert remainder.coeffs == (1,)
        assert quotient * g + remainder == f

    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_divmod_identity(self, p: int, rng: np.random.Generator) -> None:
        field = fp_core.PrimeField(p)
        for _ in range(100):
            f = random_polynomial(rng, field, 8)
            g = random_polynomial(rng, field, 5)
            quotient, remainder = divmod(f, g)
            assert quotient * g + remainder == f
            assert remainder.degree < g.degree

    def test_divmod_by_higher_degree(self, f5: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial(f5, [1, 1])
        g = fp_core.Polynomial(f5, [1, 0, 1])
        assert divmod(f, g) == (fp_core.Polynomial.zero(f5), f)

    def test_divide_by_zero(self, f5: fp_core.PrimeField) -> None:
        with pytest.raises(ZeroDivisionError):
            divmod(fp_core.Polynomial.one(f5), fp_core.Polynomial.zero(f5))

    def test_divides(self, f2: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial(f2, [1, 1])
        assert f.divides(fp_core.Polynomial(f2, [1, 0, 1]))
        assert not f.divides(fp_core.Polynomial(f2, [1, 1, 1]))

    def test_monic(self, f5: fp_core.PrimeField) -> None:
        assert fp_core.Polynomial(f5, [4, 2]).monic().coeffs == (2, 1)
        with pytest.raises(ZeroDivisionError):
            fp_core.Polynomial.zero(f5).monic()

    def test_monomial(self, f3: fp_core.PrimeField) -> None:
        assert fp_core.Polynomial.monomial(f3, 3, 2).coeffs == (0, 0, 0, 2)
        assert fp_core.Polynomial.monomial(f3, 0) == fp_core.Polynomial.one(f3)

    def test_from_roots(self, f5: fp_core.PrimeField) -> None:
        polynomial = fp_core.Polynomial.from_roots(f5, [1, 2])
        assert polynomial.coeffs == (2, 2, 1)
        assert not polynomial.evaluate(1)
        assert not polynomial.evaluate(2)

    def test_equality_needs_same_field(
        self, f3: fp_core.PrimeField, f5: fp_core.PrimeField
    ) -> None:
        assert fp_core.Polynomial.one(f3) != fp_core.Polynomial.one(f5)
        with pytest.raises(fp_core.FieldMismatchError):
            fp_core.Polynomial.one(f3) + fp_core.Polynomial.one(f5)


class TestGcdLcm:
    def test_gcd(self, f5: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial.from_roots(f5, [1, 2])
        g = fp_core.Polynomial.from_roots(f5, [1, 3])
        assert fp_core.poly_gcd(f, g) == fp_core.Polynomial.from_roots(f5, [1])

    def test_gcd_is_monic(self, f5: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial(f5, [2, 2])
        assert fp_core.poly_gcd(f, fp_core.Polynomial.zero(f5)).coeffs == (1, 1)

    def test_gcd_of_two_zeros(self, f5: fp_core.PrimeField) -> None:
        zero = fp_core.Polynomial.zero(f5)
        with pytest.raises(ValueError, match="undefined"):
            fp_core.poly_gcd(zero, zero)

    def test_lcm(self, f5: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial.from_roots(f5, [1, 2])
        g = fp_core.Polynomial.from_roots(f5, [1, 3])
        assert fp_core.poly_lcm(f, g) == fp_core.Polynomial.from_roots(f5, [1, 2, 3])

    def test_lcm_of_powers_of_lambda(self, f5: fp_core.PrimeField) -> None:
        f = fp_core.Polynomial.monomial(f5, 2)
        g = fp_core.Polynomial.monomial(f5, 3)
        assert fp_core.poly_lcm(f, g) == g

    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_random_gcd_and_lcm(self, p: int, rng: np.random.Generator) -> None:
        field = fp_core.PrimeField(p)
        for _ in range(100):
            common = random_polynomial(rng, field, 3)
            f = common * random_polynomial(rng, field, 4)
            g = common * random_polynomial(rng, field, 4)

            gcd = fp_core.poly_gcd(f, g)
            lcm = fp_core.poly_lcm(f, g)

            assert gcd.is_monic()
            assert gcd.divides(f)
            assert gcd.divides(g)
            assert common.divides(gcd)
            assert lcm.divides(f * g)
            assert f.divides(lcm)
            assert g.divides(lcm)
            assert lcm * gcd == (f * g).monic()


class TestSplitNilpotentPart:
    @pytest.mark.parametrize(
        ("coeffs", "expected_k", "expected_cofactor"),
        [
            ([0, 0, 0, 1, 1], 3, (1, 1)),
            ([2, 1], 0, (2, 1)),
            ([0, 0, 1], 2, (1,)),
            ([0, 0, 0, 0, 1, 1, 1], 4, (1, 1, 1)),
        ],
    )
    def test_splits(
        self,
        coeffs: list[int],
        expected_k: int,
        expected_cofactor: tuple[int, ...],
        f5: fp_core.PrimeField,
    ) -> None:
        k, cofactor = fp_core.split_nilpotent_part(fp_core.Polynomial(f5, coeffs))
        assert k == expected_k
        assert cofactor.coeffs == expected_cofactor
        assert cofactor.evaluate(0)

    def test_zero_polynomial(self, f5: fp_core.PrimeField) -> None:
        with pytest.raises(ValueError, match="zero polynomial"):
            fp_core.split_nilpotent_part(fp_core.Polynomial.zero(f5))
