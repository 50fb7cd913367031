"""Exception types. Each carries a short machine-readable ``code`` used by the CLI."""


class HoktError(Exception):
    code = "ERROR"


class InputError(HoktError, ValueError):
    code = "INPUT_ERROR"


class ConfigError(HoktError, ValueError):
    code = "CONFIG_ERROR"


class MetricError(HoktError, ArithmeticError):
    """A metric is undefined for the given input (e.g. modularity of an edgeless graph)."""

    code = "UNDEFINED_METRIC"


class GenerationError(HoktError, RuntimeError):
    code = "GENERATION_ERROR"
