"""Exception types shared across the package."""


class ModelError(RuntimeError):
    """A computation failed for physics reasons (instability, singularity)."""


class UnstableModelError(ModelError):
    """The drift matrix has an eigenvalue with strictly positive real part."""


class SingularMatrixError(ModelError):
    """A shifted drift matrix is numerically singular at the requested frequency."""


class ConfigError(ValueError):
    """User-supplied configuration is invalid; the message names the offending key."""
