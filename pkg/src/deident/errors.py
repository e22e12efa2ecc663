"""Error taxonomy shared across the package, mapped to CLI exit codes."""


class DeidentError(Exception):
    """Base class for all package-specific failures."""

    exit_code = 1


class ConfigError(DeidentError):
    """Invalid configuration: bad value, missing field, unknown key."""

    exit_code = 2


class StorageError(DeidentError):
    """On-disk data is missing, unreadable, or malformed."""

    exit_code = 3


class BackendError(DeidentError):
    """A perception backend failed or violated its protocol."""

    exit_code = 4


class MissingAnnotationError(BackendError):
    """The oracle backend has no sidecar for a requested frame."""


class StreamError(DeidentError):
    """The frame stream violated a pipeline contract (order, resolution)."""

    exit_code = 5
