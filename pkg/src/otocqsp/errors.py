"""Exception types shared across the package."""


class OtocQspError(Exception):
    """Base class for every error raised by this package."""


class NonHermitianInput(OtocQspError):
    """Input matrix deviates from Hermiticity beyond tolerance."""


class NumericalFailure(OtocQspError):
    """A dense linear-algebra routine failed to converge or produced non-finite output."""


class NotUnitary(OtocQspError):
    """Input expected to be unitary is not, within tolerance."""


class SiteOutOfRange(OtocQspError):
    """Site index outside [0, N)."""


class EqualSites(OtocQspError):
    """Two distinct site indices are required."""


class MissingDisorder(OtocQspError):
    """A disorder realization is required for this model family."""


class UnknownFamily(OtocQspError):
    """Model family label is not recognized."""


class WrongFamily(OtocQspError):
    """Operation is defined for a different model family."""


class OddOrder(OtocQspError):
    """Chebyshev moment order must be a positive even integer."""


class InvalidOrder(OtocQspError):
    """Echo power 2k must be a positive integer."""


class BadPhaseCount(OtocQspError):
    """QSP phase sequences must have odd length 2d + 1 with d >= 1."""


class SynthesisFailed(OtocQspError):
    """Phase synthesis did not reach the required residual."""


class ConfigError(OtocQspError):
    """Experiment configuration is malformed or inconsistent."""
