# src/molentangle/errors.py

"""Domain exceptions.

Each one subclasses a builtin so command handlers can keep catching the broad
families (ValueError, ArithmeticError) they already expect.
"""


class TruncationError(ArithmeticError):
    """Population would reach or sits on the motional truncation boundary."""


class NormalizationError(ArithmeticError):
    """A state vector is not unit-norm within tolerance."""


class DimensionMismatchError(ValueError):
    """Two state vectors (or an amplitude array) disagree on n_max."""


class SubspaceMismatchError(ValueError):
    """Populations were estimated for a different qubit than requested."""


class DegenerateFitError(ValueError):
    """The fringe design matrix is rank deficient."""


class InsufficientDataError(ValueError):
    """Too few trials to form an estimate."""


class AmbiguousCombToothError(ValueError):
    """The comb tooth number could not be pinned to an integer."""
