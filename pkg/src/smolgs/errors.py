"""Exception hierarchy for the smolgs codec."""


class SmolgsError(Exception):
    """Base class for all codec errors."""


class EmptyCloud(SmolgsError):
    """Operation requires at least one splat."""


class OutOfBounds(SmolgsError):
    """Coordinate lies outside the expected bounding region."""


class InvalidCode(SmolgsError):
    """Morton code does not fit the given recursion depth."""


class CorruptStream(SmolgsError):
    """Bit/byte stream is truncated, has trailing garbage, or violates format invariants."""

    def __init__(self, message, section=None):
        super().__init__(message)
        self.section = section


class EmptyAlphabet(SmolgsError):
    """Huffman construction needs at least one symbol with nonzero count."""


class UnknownSymbol(SmolgsError):
    """Symbol has no assigned Huffman code."""


class ModelMismatch(SmolgsError):
    """Symbol not representable under the probability model it was coded with."""


class InvalidValue(SmolgsError):
    """Non-finite or otherwise unusable numeric input."""


class ShapeError(SmolgsError):
    """Tensor/vector dimensions do not match the declared layout."""


class DegenerateView(SmolgsError):
    """Camera center coincides with the splat coordinate."""


class NoModel(SmolgsError):
    """Neural decoder weights are missing or structurally invalid."""


class BadMagic(SmolgsError):
    """File does not start with the container magic."""


class UnsupportedVersion(SmolgsError):
    """Container version is newer than this implementation understands."""


class CrcMismatch(SmolgsError):
    """Stored section checksum does not match the payload."""

    def __init__(self, message, section=None):
        super().__init__(message)
        self.section = section


class LimitExceeded(SmolgsError):
    """A structural limit of the container format was exceeded."""


class ConfigError(SmolgsError):
    """Invalid codec configuration."""
