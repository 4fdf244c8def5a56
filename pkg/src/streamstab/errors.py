"""Exception types shared across the package."""


class StreamStabError(Exception):
    """Base class for all streamstab errors."""


class GeometryError(StreamStabError, ValueError):
    """Mismatched or invalid grid/frame geometry, or corrupt field values."""


class FormatError(StreamStabError, ValueError):
    """Malformed, truncated, or version-incompatible file content."""


class ConfigError(StreamStabError, ValueError):
    """Invalid configuration value or unknown configuration key."""


class OptimizerError(StreamStabError, RuntimeError):
    """Optimizer step rejected (e.g. non-finite gradient)."""


class TrainingError(StreamStabError, RuntimeError):
    """Training aborted (e.g. divergence guard tripped)."""


class MetricError(StreamStabError, ValueError):
    """Metric computation impossible on the given input."""
