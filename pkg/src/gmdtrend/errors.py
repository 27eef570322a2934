"""Exception types. Each maps onto one CLI exit code."""


class GMDTrendError(ValueError):
    exit_code = 1


class InputError(GMDTrendError):
    """Malformed or too-short input data."""

    exit_code = 2


class DegenerateDataError(GMDTrendError):
    """Data for which a scale estimate vanishes, e.g. a constant series."""

    exit_code = 3


class ConfigError(GMDTrendError):
    """Tuning parameters outside their admissible range."""

    exit_code = 4
