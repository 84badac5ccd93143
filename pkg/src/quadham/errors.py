"""Exception hierarchy shared by every quadham module."""


class QuadHamError(Exception):
    """Base class for all library errors."""


class DegreeError(QuadHamError, ValueError):
    """An operator word or polynomial exceeds the supported degree."""


class DimensionError(QuadHamError, ValueError):
    """Operands built over different basis sizes K."""


class ParseError(QuadHamError, ValueError):
    """Syntax error in a Hamiltonian expression.

    ``position`` is the 0-based character offset into the source text, or
    ``None`` when the error is not tied to a location.
    """

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
            if text is not None:
                message += "\n  " + text + "\n  " + " " * position + "^"
        super().__init__(message)


class UnknownIdentifierError(ParseError):
    pass


class UnboundParameterError(ParseError):
    pass


class UnsupportedFormError(QuadHamError, ValueError):
    """The polynomial is not a homogeneous quadratic form (plus constant)."""


class NonSymmetricError(QuadHamError, ValueError):
    """The Hamiltonian is not symmetric (gamma not Hermitian)."""


class NotClosedError(QuadHamError, ValueError):
    """[h, O_i] does not expand over the degree-1 basis."""


class NumericalFailure(QuadHamError, ArithmeticError):
    """Eigen-decomposition failed; ``partial`` carries whatever was computed."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PhaseError(QuadHamError, ValueError):
    """Operation requires a phase the spectrum is not in."""


class PairingError(QuadHamError, ArithmeticError):
    """An eigenvalue has no -lambda partner within tolerance."""


class UnknownModelError(QuadHamError, KeyError):
    pass


class MissingParameterError(QuadHamError, KeyError):
    pass


class InstantiationError(QuadHamError, ValueError):
    """Parameters fall on a singular line of the model."""


class InvalidBracketError(QuadHamError, ValueError):
    pass


class InconsistentModelError(QuadHamError, ValueError):
    """Adjoint matrix is not i times a real matrix, so no real dynamics exist."""


class TrajectoryTooShortError(QuadHamError, ValueError):
    pass
