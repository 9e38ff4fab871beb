"""Exception types shared across the package.

The split mirrors who is at fault: ConfigurationError for bad setup that
should be fixed before running, UsageError for calling an API against its
contract, TrainingError for numerical failures mid-run, ArtifactError for
files on disk that cannot be trusted.
"""


class SocialGFError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SocialGFError):
    """Invalid configuration: bad shapes, impossible scenario, missing field."""


class UsageError(SocialGFError):
    """API misuse: mismatched tape, wrong observation width, bad arguments."""


class TrainingError(SocialGFError):
    """Numerical failure during optimization (non-finite gradients, divergence)."""


class CollectionError(SocialGFError):
    """Example harvesting could not satisfy its category targets."""


class AdaptationError(ConfigurationError):
    """A representation slot cannot be resolved in the target scenario."""


class ArtifactError(SocialGFError):
    """An artifact file is missing, corrupt, or carries a conflicting config hash."""
