"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes, so new error conditions should
subclass one of the three roots below rather than raising bare exceptions.
"""


class Ids1dError(Exception):
    """Base class for all package errors."""


class ShapeError(Ids1dError):
    """Tensor/layer shapes do not compose."""


class ArchitectureError(Ids1dError):
    """Layer stack cannot be built for the given input length."""


class ConfigError(Ids1dError):
    """Bad schema/config: unknown columns, invalid values, etc."""


class DataError(Ids1dError):
    """Input data is unreadable, malformed, or degenerate."""


class NumericError(Ids1dError):
    """Non-finite values where finite ones are required (divergence, bad input)."""


class ModelFormatError(DataError):
    """Base class for model-file deserialization failures."""


class BadMagicError(ModelFormatError):
    pass


class UnsupportedVersionError(ModelFormatError):
    pass


class ChecksumError(ModelFormatError):
    pass


class TruncatedFileError(ModelFormatError):
    pass
