"""Exception types raised across the package."""


class SpdMeansError(Exception):
    """Base class for all spdmeans errors."""


class NotSymmetricError(SpdMeansError, ValueError):
    """Raw matrix is asymmetric beyond the symmetry tolerance."""


class NotPositiveDefiniteError(SpdMeansError, ValueError):
    """Symmetric matrix has an eigenvalue at or below zero."""


class DimensionMismatchError(SpdMeansError, ValueError):
    """Binary matrix operation applied to matrices of different sizes."""


class InvalidOrderError(SpdMeansError, ValueError):
    """p-th root requested with p < 2."""


class DegreeMismatchError(SpdMeansError, ValueError):
    """Permutations of different degrees combined."""


class UnsupportedDegreeError(SpdMeansError, ValueError):
    """Named permutation group requested at a degree it is not defined for."""


class DegreeTooLargeError(SpdMeansError, ValueError):
    """Whole-group enumeration requested above the supported degree cap."""


class NotAGroupError(SpdMeansError, ValueError):
    """Empirical stabilizer survivors fail the subgroup test.

    Signals a misconfigured equality tolerance rather than genuine asymmetry.
    """


class MalformedCompositionError(SpdMeansError, ValueError):
    """Expression is not in the composed outer-over-permuted-copies shape."""


class UnsupportedPropertyError(SpdMeansError, ValueError):
    """Property check requested that does not apply to the given map."""


class ExprParseError(SpdMeansError, ValueError):
    """Quasi-mean expression text failed to parse.

    Carries the offending position so callers can render a caret diagnostic.
    """

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(message)
        self.text = text
        self.pos = pos

    def caret_diagnostic(self) -> str:
        return f"{self.text}\n{' ' * self.pos}^ {self.args[0]}"


class TupleFileError(SpdMeansError, ValueError):
    """Tuple file failed to parse or validate; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line
