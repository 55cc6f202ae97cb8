"""Exception hierarchy shared by all qhj modules."""


class QHJError(Exception):
    """Base class for every computation error raised by this package."""


class NoPolynomialSolution(QHJError):
    pass


class DegenerateSystem(QHJError):
    pass


class NonFiniteSample(QHJError):
    pass


class AmbiguousWinding(QHJError):
    pass


class PoleOfPotential(QHJError):
    pass


class NotHermitian(QHJError):
    pass


class InvalidPotential(QHJError):
    pass


class DegenerateBalance(QHJError):
    pass


class NoBoundState(QHJError):
    pass


class UnknownFormula(QHJError):
    pass


class EvaluationAtPole(QHJError):
    pass


class EvaluationAtNode(QHJError):
    pass


class InsufficientDomain(QHJError):
    pass


class NoConvergence(QHJError):
    pass


class ContourCollision(QHJError):
    pass


class UnphysicalParameters(QHJError):
    pass
