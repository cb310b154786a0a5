"""Exception hierarchy.

Numerical failures map to CLI exit code 3, I/O and format failures to 2.
"""


class FSTError(Exception):
    pass


class NumericalError(FSTError):
    pass


class FormatError(FSTError):
    pass


class ShapeMismatch(FSTError, ValueError):
    pass


class ChannelMismatch(ShapeMismatch):
    pass


class LayoutMismatch(FSTError, ValueError):
    pass


class CenteredLayout(LayoutMismatch):
    pass


class NonRealResult(NumericalError):
    pass


class NotPSD(NumericalError):
    pass


class ZeroMatrix(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class DegenerateChannel(NumericalError):
    pass


class UnsupportedFormat(FormatError):
    pass


class CorruptFile(FormatError):
    pass


class BadMagic(CorruptFile):
    pass


class BadVersion(CorruptFile):
    pass


class SizeMismatch(CorruptFile):
    pass
