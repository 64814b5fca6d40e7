"""Exception types shared across the package.

Every error carries a stable ``code`` so the CLI can surface it in a
machine-readable error object.
"""


class ClustError(Exception):
    code = "E_INTERNAL"
    exit_code = 2


class ParseError(ClustError):
    code = "E_PARSE"

    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class RaggedRows(ClustError):
    code = "E_RAGGED"


class EmptyFile(ClustError):
    code = "E_EMPTY"


class DimensionMismatch(ClustError):
    code = "E_DIM"


class EmptySubset(ClustError):
    code = "E_EMPTY_SUBSET"


class NonFiniteOracle(ClustError):
    code = "E_NONFINITE"
    exit_code = 3


class NoSplittableCluster(ClustError):
    code = "E_NO_SPLITTABLE"


class InvalidFraction(ClustError):
    code = "E_INVALID_FRACTION"


class NonpositiveBest(ClustError):
    code = "E_NONPOSITIVE_BEST"


class MissingLevel(ClustError):
    code = "E_MISSING_LEVEL"

    def __init__(self, missing):
        super().__init__(f"missing relative errors for k = {sorted(missing)}")
        self.missing = sorted(missing)


class LengthMismatch(ClustError):
    code = "E_LENGTH"


class EmptyCluster(ClustError):
    code = "E_EMPTY_CLUSTER"


class CoincidentCenters(ClustError):
    code = "E_COINCIDENT_CENTERS"


class TooFewClusters(ClustError):
    code = "K_TOO_SMALL"
