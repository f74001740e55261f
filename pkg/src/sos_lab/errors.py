"""Exception hierarchy shared by every module."""


class SosLabError(Exception):
    """Base class; the CLI maps it to a structured JSON error."""


class ZeroInput(SosLabError, ValueError):
    pass


class DimensionMismatch(SosLabError, ValueError):
    pass


class UnknownForm(SosLabError, KeyError):
    pass


class NotEvenDegree(SosLabError, ValueError):
    pass


class NumericalError(SosLabError, ArithmeticError):
    pass


class NotPsd(SosLabError, ValueError):
    pass


class BasisTooSmall(SosLabError, ValueError):
    pass


class NotChordal(SosLabError, ValueError):
    pass


class NotOnVariety(SosLabError, ValueError):
    pass


class TooLarge(SosLabError, ValueError):
    pass


class DegenerateConfiguration(SosLabError, RuntimeError):
    pass


class NotInSubspace(SosLabError, ValueError):
    pass


class NotRankOne(SosLabError, ValueError):
    pass


class NotVeroneseConsistent(SosLabError, ValueError):
    pass
