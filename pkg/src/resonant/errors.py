"""Exception types raised by the library.

Every failure mode that callers are expected to handle has its own class so
that the Bayesian optimizer can map reservoir blow-ups to penalty scores
while letting genuine bugs propagate.
"""


class ResonantError(Exception):
    """Base class for all library errors."""


class SingularSpectrum(ResonantError):
    """Adjacency matrix has spectral radius 0 and cannot be rescaled.

    Happens when connectivity * n_nodes**2 rounds to zero nonzeros, or the
    few placed entries form a nilpotent matrix. Increase connectivity or
    n_nodes.
    """


class NonFiniteState(ResonantError):
    """A hidden state entry became NaN or infinite (unstable reservoir)."""


class IllConditioned(ResonantError):
    """The regularized ridge system could not be solved reliably."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DimensionMismatch(ResonantError):
    """Input series channel count differs from what the model was fit with."""


class ZeroNormTarget(ResonantError):
    """NMSE is undefined because the target series has zero squared norm."""


class EmptyMix(ResonantError):
    """Activation mix has no positive weight."""


class OutOfRange(ResonantError):
    """Inverse output activation evaluated at or beyond its range boundary."""


class OutOfBounds(ResonantError):
    """Hyper-parameters fall outside the search bounds during encoding."""


class DegenerateData(ResonantError):
    """Surrogate training set carries no spatial information."""


class AllDiverged(ResonantError):
    """Every objective evaluation hit the penalty score; bounds are bad."""
