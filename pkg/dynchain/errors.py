class DatasetParseError(ValueError):
    """Thrown when a dataset file does not conform to its declared format. The message names the line number."""

    pass


class EmptyDatasetError(ValueError):
    """Thrown when a dataset file contains no instances."""

    pass


class DegenerateNodeError(ArithmeticError):
    """
    Thrown when a leaf weight is requested for a node whose Hessian sum plus regularizer is zero.
    Use ``lambda_reg > 0`` or a positive ``min_child_weight``.
    """

    pass


class WidthMismatchError(ValueError):
    """Thrown when the number of feature columns or labels differs from what a model was trained on."""

    pass


class ModelFormatError(ValueError):
    """Thrown when a model dump cannot be read, e.g., an unknown model kind or format version."""

    pass
