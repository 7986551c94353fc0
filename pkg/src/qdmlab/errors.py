"""Exception hierarchy shared across the package."""


class QdmError(Exception):
    """Base class for all qdmlab errors."""


class ShapeError(QdmError):
    """Dimension or qubit-count mismatch."""


class NormError(QdmError):
    """Vector is not unit norm where unit norm is required."""


class EncodingError(QdmError):
    """Vector cannot be amplitude-encoded (e.g. zero vector)."""


class PostselectError(QdmError):
    """Postselected outcome has (numerically) vanishing probability."""


class StateError(QdmError):
    """Operation applied to a state in an invalid configuration."""


class LabelError(QdmError):
    """Label index out of range for the label register."""


class ConfigError(QdmError):
    """Invalid configuration value."""


class ExportError(QdmError):
    """Circuit cannot be exported (e.g. unbound parameters)."""


class FormatError(QdmError):
    """Malformed input file."""


class StatError(QdmError):
    """Statistical computation is ill-posed or failed to converge."""
