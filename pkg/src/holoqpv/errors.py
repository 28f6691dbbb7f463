"""Exception types shared by the package.

All of them subclass ValueError so callers that only care about bad input
can catch one thing; the CLI reports the class name.
"""


class HoloError(ValueError):
    pass


class SizeLimitError(HoloError):
    """A dense object would exceed the configured qubit limit."""


class UnsupportedTensorError(HoloError):
    pass


class InsufficientLayersError(HoloError):
    pass


class DimensionMismatchError(HoloError):
    pass


class StructuralMismatchError(HoloError):
    """Low-energy subspace does not have the dimension the encoding implies."""


class IllConditionedError(HoloError):
    """An eigenvalue sits on the cutoff, so the split is not defined."""


class PreconditionError(HoloError):
    pass
