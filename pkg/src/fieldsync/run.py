from fieldsync.cli import app


def main() -> None:
    raise SystemExit(app.main())


if __name__ == "__main__":
    main()
