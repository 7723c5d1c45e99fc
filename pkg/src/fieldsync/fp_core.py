from __future__ import annotations

import dataclasses
import functools
import math
from collections import abc as collections_abc
from typing import Any, Final

MAX_MODULUS: Final = 2**31
"""
Exclusive upper bound on supported moduli. Keeps every product of two residues
inside a signed 64-bit integer.
"""

ZERO_POLYNOMIAL_DEGREE: Final = -math.inf
"""Degree of the zero polynomial. Never an integer, so it cannot leak into indexing."""


@functools.cache
def is_prime(value: int) -> bool:
    """Deterministic primality test by trial division up to the square root."""
    if value < 2:  # noqa: PLR2004
        return False
    if value % 2 == 0:
        return value == 2  # noqa: PLR2004
    return all(value % divisor for divisor in range(3, math.isqrt(value) + 1, 2))


@dataclasses.dataclass(frozen=True)
class PrimeField:
    """
    The finite field of residues modulo a prime p. Two fields are the same field
    exactly when their moduli are equal.
    """

    p: int

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise TypeError(f"Modulus must be an integer, got {self.p!r}")
        if not 2 <= self.p < MAX_MODULUS:  # noqa: PLR2004
            raise NotPrimeError(f"Modulus must be between 2 and {MAX_MODULUS - 1}")
        if not is_prime(self.p):
            raise NotPrimeError(f"modulus not prime: {self.p}")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.p, self)

    def __str__(self) -> str:
        return f"F_{self.p}"

    @property
    def zero(self) -> FieldElement:
        return self(0)

    @property
    def one(self) -> FieldElement:
        return self(1)

    def reduce(self, value: int) -> int:
        return int(value) % self.p

    def elements(self) -> collections_abc.Iterator[FieldElement]:
        return (self(value) for value in range(self.p))

    def require_same(self, other: PrimeField) -> None:
        if self != other:
            raise FieldMismatchError(f"Cannot combine {self} and {other}")


@dataclasses.dataclass(frozen=True)
class FieldElement:
    """A residue in canonical form, 0 <= value < p, tagged with its field."""

    value: int
    field: PrimeField

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.field.p:
            raise ValueError(f"{self.value} is not a canonical residue of {self.field}")

    def __repr__(self) -> str:
        return f"{type(self).__qualname__}({self.value}, p={self.field.p})"

    def __str__(self) -> str:
        return str(self.value)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def _coerce(self, other: Any) -> FieldElement:
        if not isinstance(other, FieldElement):
            raise TypeError(f"Expected a field element, got {type(other).__qualname__}")
        self.field.require_same(other.field)
        return other

    def __add__(self, other: FieldElement) -> FieldElement:
        other = self._coerce(other)
        return self.field(self.value + other.value)

    def __sub__(self, other: FieldElement) -> FieldElement:
        other = self._coerce(other)
        return self.field(self.value - other.value)

    def __mul__(self, other: FieldElement) -> FieldElement:
        other = self._coerce(other)
        return self.field(self.value * other.value)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return self * self._coerce(other).inverse()

    def __neg__(self) -> FieldElement:
        return self.field(-self.value)

    def __pow__(self, exponent: int) -> FieldElement:
        if exponent < 0:
            return self.inverse() ** -exponent
        return self.field(pow(self.value, exponent, self.field.p))

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self.field}")
        return self.field(pow(self.value, -1, self.field.p))


class Polynomial:
    """
    Dense univariate polynomial over a prime field. Coefficients are stored as
    canonical residues in ascending degree order with trailing zeros trimmed, so the
    zero polynomial has no coefficients at all.
    """

    __slots__ = ("coeffs", "field")

    def __init__(
        self,
        field: PrimeField,
        coeffs: collections_abc.Iterable[int | FieldElement] = (),
    ) -> None:
        reduced = []
        for coefficient in coeffs:
            if isinstance(coefficient, FieldElement):
                field.require_same(coefficient.field)
                reduced.append(coefficient.value)
            else:
                reduced.append(field.reduce(coefficient))
        while reduced and reduced[-1] == 0:
            reduced.pop()

        self.field = field
        self.coeffs: tuple[int, ...] = tuple(reduced)

    @classmethod
    def zero(cls, field: PrimeField) -> Polynomial:
        return cls(field)

    @classmethod
    def one(cls, field: PrimeField) -> Polynomial:
        return cls(field, [1])

    @classmethod
    def monomial(
        cls, field: PrimeField, degree: int, coefficient: int = 1
    ) -> Polynomial:
        """Returns coefficient * λ^degree."""
        if degree < 0:
            raise ValueError("Monomial degree must be non-negative")
        return cls(field, [0] * degree + [coefficient])

    @classmethod
    def from_roots(
        cls, field: PrimeField, roots: collections_abc.Iterable[int]
    ) -> Polynomial:
        """Returns the monic product of (λ - root) over the given roots."""
        result = cls.one(field)
        for root in roots:
            result = result * cls(field, [-root, 1])
        return result

    def __repr__(self) -> str:
        name = type(self).__qualname__
        return f"{name}(p={self.field.p}, coeffs={list(self.coeffs)})"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for degree in range(len(self.coeffs) - 1, -1, -1):
            coefficient = self.coeffs[degree]
            if coefficient == 0:
                continue
            if degree == 0:
                terms.append(str(coefficient))
                continue
            power = "λ" if degree == 1 else f"λ^{degree}"
            terms.append(power if coefficient == 1 else f"{coefficient}{power}")
        return " + ".join(terms)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Polynomial):
            return self.field == other.field and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int | float:
        """Degree, or ZERO_POLYNOMIAL_DEGREE for the zero polynomial."""
        if self.is_zero:
            return ZERO_POLYNOMIAL_DEGREE
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self) -> FieldElement:
        if self.is_zero:
            return self.field.zero
        return self.field(self.coeffs[-1])

    def coefficient(self, degree: int) -> FieldElement:
        if 0 <= degree < len(self.coeffs):
            return self.field(self.coeffs[degree])
        return self.field.zero

    def is_monic(self) -> bool:
        return not self.is_zero and self.coeffs[-1] == 1

    def monic(self) -> Polynomial:
        """Returns the polynomial scaled so its leading coefficient is 1."""
        if self.is_zero:
            raise ZeroDivisionError("The zero polynomial cannot be made monic")
        return self * self.leading_coefficient.inverse()

    def evaluate(self, x: FieldElement | int) -> FieldElement:
        point = x.value if isinstance(x, FieldElement) else self.field.reduce(x)
        if isinstance(x, FieldElement):
            self.field.require_same(x.field)
        result = 0
        for coefficient in reversed(self.coeffs):
            result = (result * point + coefficient) % self.field.p
        return self.field(result)

    def _coerce(self, other: Any) -> Polynomial:
        if not isinstance(other, Polynomial):
            raise TypeError(f"Expected a polynomial, got {type(other).__qualname__}")
        self.field.require_same(other.field)
        return other

    def __add__(self, other: Polynomial) -> Polynomial:
        other = self._coerce(other)
        length = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(
            self.field,
            (
                self.coefficient(i).value + other.coefficient(i).value
                for i in range(length)
            ),
        )

    def __neg__(self) -> Polynomial:
        return Polynomial(self.field, (-c for c in self.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + -self._coerce(other)

    def __mul__(self, other: Polynomial | FieldElement) -> Polynomial:
        if isinstance(other, FieldElement):
            self.field.require_same(other.field)
            return Polynomial(self.field, (c * other.value for c in self.coeffs))

        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return Polynomial.zero(self.field)
        product = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                product[i + j] = (product[i + j] + a * b) % self.field.p
        return Polynomial(self.field, product)

    def __pow__(self, exponent: int) -> Polynomial:
        if exponent < 0:
            raise ValueError("Polynomial powers must be non-negative")
        result = Polynomial.one(self.field)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __divmod__(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("Polynomial division by the zero polynomial")

        p = self.field.p
        divisor_degree = len(other.coeffs) - 1
        lead_inverse = pow(other.coeffs[-1], -1, p)
        remainder = list(self.coeffs)
        quotient = [0] * max(len(remainder) - divisor_degree, 0)

        for shift in range(len(remainder) - 1 - divisor_degree, -1, -1):
            factor = remainder[shift + divisor_degree] * lead_inverse % p
            if factor == 0:
                continue
            quotient[shift] = factor
            for i, b in enumerate(other.coeffs):
                remainder[shift + i] = (remainder[shift + i] - factor * b) % p

        return Polynomial(self.field, quotient), Polynomial(self.field, remainder)

    def __floordiv__(self, other: Polynomial) -> Polynomial:
        return divmod(self, other)[0]

    def __mod__(self, other: Polynomial) -> Polynomial:
        return divmod(self, other)[1]

    def divides(self, other: Polynomial) -> bool:
        """Returns True if self divides other with zero remainder."""
        return (other % self).is_zero


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic greatest common divisor by the Euclidean algorithm."""
    f.field.require_same(g.field)
    if f.is_zero and g.is_zero:
        raise ValueError("gcd of two zero polynomials is undefined")
    while not g.is_zero:
        f, g = g, f % g
    return f.monic()


def poly_lcm(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic least common multiple of two nonzero polynomials."""
    if f.is_zero or g.is_zero:
        raise ValueError("lcm is only defined for nonzero polynomials")
    return ((f * g) // poly_gcd(f, g)).monic()


def split_nilpotent_part(polynomial: Polynomial) -> tuple[int, Polynomial]:
    """
    Factorises P(λ) = λ^k f(λ) with f(0) != 0.

    Returns:
        The multiplicity k of the root 0 and the cofactor f.
    """
    if polynomial.is_zero:
        raise ValueError("The zero polynomial has no nilpotent part")
    k = next(i for i, c in enumerate(polynomial.coeffs) if c != 0)
    return k, Polynomial(polynomial.field, polynomial.coeffs[k:])


class NotPrimeError(ValueError):
    pass


class FieldMismatchError(Exception):
    pass
