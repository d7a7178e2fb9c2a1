"""Exception hierarchy mapped to CLI exit codes."""


class SdnGuardError(Exception):
    exit_code = 1


class UsageError(SdnGuardError):
    """Bad configuration or invalid arguments."""

    exit_code = 1


class DataError(SdnGuardError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class NumericalError(SdnGuardError):
    """Numerical failure (non-finite loss, singular system, ...)."""

    exit_code = 3
