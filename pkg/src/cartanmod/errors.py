"""Exception hierarchy shared by all cartanmod modules."""


class CartanModError(Exception):
    """Base class; the CLI maps these to exit code 1."""


class ContextMismatch(CartanModError):
    pass


class OrderUnavailable(CartanModError):
    """No element of the requested order exists in the current field."""


class ShapeMismatch(CartanModError):
    pass


class AxisOutOfRange(CartanModError):
    pass


class NonzeroConstantTerm(CartanModError):
    pass


class NotAUnit(CartanModError):
    pass


class KindConstraintViolation(CartanModError):
    pass


class DimensionCapExceeded(CartanModError):
    pass


class NoFormForW(CartanModError):
    pass


class ParityMismatch(CartanModError):
    pass


class ExcludedConfiguration(CartanModError):
    """Configurations outside the range of the main classification."""


class RelationViolation(CartanModError):
    pass


class TorsionIncompatible(CartanModError):
    pass


class GroupMismatch(CartanModError):
    pass


class NonfiniteGroup(CartanModError):
    pass


class NonCommuting(CartanModError):
    pass


class NotSemisimple(CartanModError):
    pass


class NotInAutGroup(CartanModError):
    pass


class NotMonomial(CartanModError):
    pass


class NotInNormalizer(CartanModError):
    pass


class NotSymplectic(CartanModError):
    pass


class WrongShape(CartanModError):
    pass


class FormMultiplierMismatch(CartanModError):
    pass


class InvalidAutomorphism(CartanModError):
    pass
