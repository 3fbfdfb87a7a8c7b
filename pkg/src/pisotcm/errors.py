"""Exception hierarchy.

``Rejection`` marks a mathematical refusal (bad input field, element that is
not a unit, corrupted certificate) and maps to CLI exit code 1.
"""


class PisotCMError(Exception):
    """Base class for every error raised by the package."""


class Rejection(PisotCMError, ValueError):
    """The input is well formed but mathematically unacceptable."""

    def __init__(self, reason, detail=""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


class PolynomialSyntaxError(PisotCMError, ValueError):
    def __init__(self, message, text, position):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


class FieldMismatchError(PisotCMError, ValueError):
    pass


class PrecisionExhausted(PisotCMError, ArithmeticError):
    """Certified refinement did not reach the requested radius in the allotted rounds."""
