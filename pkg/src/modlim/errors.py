"""Exception hierarchy shared by every module of the package."""


class ModlimError(Exception):
    """Base class for all errors raised by modlim."""

    exit_code = 1


class InputError(ModlimError, ValueError):
    """Malformed or inconsistent input: dimension mismatch, bad modulus, ill-formed hom."""

    exit_code = 2


class ParseError(InputError):
    pass


class ValidationError(InputError):
    """A system or functor failed its functoriality / naturality validation."""


class PreconditionError(InputError):
    pass


class CapacityError(ModlimError):
    """A configured size cap was exceeded; ``cap`` names it, ``size`` is the offending size."""

    exit_code = 3

    def __init__(self, message, cap=None, size=None):
        super().__init__(message)
        self.cap = cap
        self.size = size


class ContractError(ModlimError):
    """A user-supplied functor broke a functor law."""

    exit_code = 4


class InternalError(ModlimError):
    """A construction failed its own post-condition. Always a bug."""

    exit_code = 4
