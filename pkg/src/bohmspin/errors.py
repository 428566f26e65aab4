"""Exception types shared across the package."""


class NodeRegion(ValueError):
    """The density is below the node floor, so the phase gradient is undefined.

    ``mask`` marks the offending entries when a batch was evaluated.
    """

    def __init__(self, message="density below node floor", mask=None):
        super().__init__(message)
        self.mask = mask


class UnsupportedModel(ValueError):
    pass


class InsufficientSamples(ValueError):
    pass


class EmptyRingWarning(UserWarning):
    pass


class ConfigError(ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class ValidationError(ConfigError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
