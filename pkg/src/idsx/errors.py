"""Exception types shared across the simulator."""


class IdsError(Exception):
    """Base class for all simulator errors."""


class RangeError(IdsError, ValueError):
    """A coordinate fell outside its quantizer range."""


class DataError(IdsError, ValueError):
    """A dataset or config file could not be parsed."""


class NumericalError(IdsError, ArithmeticError):
    """The network solve failed or produced an untrustworthy solution."""


class UntrainedModelError(IdsError):
    """Inference was attempted on planes that hold no ink."""


class StateFormatError(IdsError, ValueError):
    """A snapshot failed magic/version/length/checksum validation."""
