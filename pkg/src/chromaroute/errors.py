"""Exception types shared across the package."""


class ChromarouteError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ChromarouteError):
    """Malformed textual input (circuit, Pauli program, fermion terms)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HardwareError(ChromarouteError):
    """Invalid hardware description or profile lookup."""


class MappingError(ChromarouteError):
    """Invalid logical-to-physical mapping or mapping operation."""


class EncodingError(ChromarouteError):
    """Fermionic input whose encoding is not a valid observable."""


class StallError(ChromarouteError):
    """The compile loop stopped making progress before finishing."""


class VerificationError(ChromarouteError):
    """A schedule failed replay verification."""


class InvariantError(ChromarouteError):
    """An internal invariant was violated; indicates a bug, not bad input."""
