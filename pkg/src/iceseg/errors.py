"""Exception types shared across the toolkit."""


class IceSegError(Exception):
    """Base class for all toolkit errors."""


class UnsupportedFormat(IceSegError):
    """PNG exists but is not an 8-bit grayscale/RGB image we can carry."""


class WrongChannelCount(IceSegError):
    pass


class DimensionMismatch(IceSegError):
    pass


class BadRange(IceSegError):
    pass


class BadKernel(IceSegError):
    pass


class ShapeMismatch(IceSegError):
    pass


class OddDimensions(IceSegError):
    pass


class BadRate(IceSegError):
    pass


class BadConfig(IceSegError):
    pass


class SceneTooSmall(IceSegError):
    pass


class EmptyManifest(IceSegError):
    pass


class MissingFile(IceSegError):
    pass


class InvalidProfile(IceSegError):
    pass


class OffPaletteColor(IceSegError):
    pass


class CorruptModel(IceSegError):
    pass


class BadDimensions(IceSegError):
    pass


class EmptyTrainSet(IceSegError):
    pass


class NonFiniteLoss(IceSegError):
    pass


class EmptySceneDir(IceSegError):
    pass


class UnknownScene(IceSegError):
    pass


class MissingPair(IceSegError):
    pass
