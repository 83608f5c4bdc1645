"""Exception hierarchy shared across the package."""


class KexopsError(Exception):
    """Base class for all domain errors raised by kexops."""


class EmbeddingFormatError(KexopsError):
    """Raised for malformed or inconsistent EMB1 embedding files."""


class RegistryError(KexopsError):
    """Raised for duplicate ids, unknown ids, or invalid records."""


class MetricError(KexopsError):
    """Raised when a similarity metric cannot be computed on its inputs."""


class PipelineError(KexopsError):
    """Raised by the data-adaptation pipeline (callbacks, readers, loaders)."""


class TrainingError(KexopsError):
    """Raised for invalid experiment configurations or trainer misuse."""


class SchedulerError(KexopsError):
    """Raised by the gateway/server/worker scheduler."""


class NoRecommendationError(KexopsError):
    """Raised when no candidate dataset has any completed experiment."""
