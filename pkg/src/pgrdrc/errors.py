"""Exception types shared across the package.

Everything a user can trigger with bad input derives from :class:`InputError`;
the CLI maps those to exit code 1.
"""


class PgrDrcError(Exception):
    """Base class for all package errors."""


class InputError(PgrDrcError, ValueError):
    """Bad data, bad file, or a call whose preconditions are not met."""


class DatasetError(InputError):
    pass


class LayoutError(InputError):
    pass


class TransformDomainError(InputError):
    """A value lies outside the domain of a fitted feature transform."""


class ModelFormatError(InputError):
    """A model file is corrupt, has the wrong version, or breaks an invariant."""


class ThresholdNotSetError(InputError):
    def __init__(self, msg: str = "model not tuned: log_epsilon is unset") -> None:
        super().__init__(msg)
