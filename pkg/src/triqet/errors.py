class CircuitError(ValueError):
    """A circuit or gate references invalid qubits, features, or parameters."""


class DataError(ValueError):
    """A dataset is unusable for the requested operation (missing class, empty split)."""


class DataFormatError(DataError):
    """An on-disk dataset file is malformed."""


class ConfigError(ValueError):
    """A run configuration is inconsistent."""
