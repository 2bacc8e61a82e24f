"""Exception types raised across the package.

Every error derives from :class:`NonlocalGameError` (itself a ``ValueError``)
so the command line can map the whole family to a single exit code.
"""


class NonlocalGameError(ValueError):
    """Base class for all precondition failures."""


class NotUnitVector(NonlocalGameError):
    pass


class DimensionMismatch(NonlocalGameError):
    pass


class NotPSD(NonlocalGameError):
    pass


class BudgetExceeded(NonlocalGameError):
    pass


class EmptyConstraintSystem(NonlocalGameError):
    pass


class OddN(NonlocalGameError):
    pass


class BadN(NonlocalGameError):
    pass


class ShapeMismatch(NonlocalGameError):
    pass


class InvalidWeight(NonlocalGameError):
    pass


class HypothesisViolated(NonlocalGameError):
    pass


class NotFullSchmidtRank(NonlocalGameError):
    pass


class NotAFunction(NonlocalGameError):
    pass


class NotWeaklyProjective(NonlocalGameError):
    pass


class NotPerfect(NonlocalGameError):
    pass


class UnsupportedGameShape(NonlocalGameError):
    pass


class NondeterministicAnswer(NonlocalGameError):
    pass


class ImproperColoring(NonlocalGameError):
    pass
