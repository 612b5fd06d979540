"""Exception hierarchy shared by all ga3ph modules."""


class Ga3phError(Exception):
    """Base class for every error raised by this package."""


class NoRoots(Ga3phError, ValueError):
    pass


class DivByZero(Ga3phError, ZeroDivisionError):
    pass


class ZeroDivisor(Ga3phError, ZeroDivisionError):
    """A multivector whose Clifford norm vanishes has no inverse."""


class AlgebraicLoop(Ga3phError):
    """The loop operator ``e0 + G C`` (or ``e0 - Q G``) is not invertible."""


class PlantNotStable(Ga3phError):
    pass


class QNotAdmissible(Ga3phError):
    pass


class DegeneratePlant(Ga3phError):
    pass


class NotSymmetric(Ga3phError):
    pass


class NotRealizable(Ga3phError):
    pass


class BadPrewarp(Ga3phError, ValueError):
    pass


class Diverged(Ga3phError):
    def __init__(self, message, time=None, trace=None):
        super().__init__(message)
        self.time = time
        self.trace = trace


class NetlistError(Ga3phError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)
        self.line = line


class Singular(Ga3phError):
    pass


class ConfigError(Ga3phError, ValueError):
    pass
