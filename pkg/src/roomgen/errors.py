"""Exception types shared across the package."""


class RoomGenError(Exception):
    """Base class for all roomgen errors."""


class InvalidInput(RoomGenError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateObject(RoomGenError):
    """Object cloud has zero spatial extent and cannot be resized."""


class DoesNotFit(RoomGenError):
    """Object footprint is larger than the room floor plan."""


class DegeneratePair(RoomGenError):
    """Scene pair has no instance usable for contrastive learning."""


class MissingInstance(RoomGenError):
    """A requested instance id has no points in the scene."""


class DegenerateFeature(RoomGenError):
    """Feature vector too close to zero to be projected onto the sphere."""


class FormatError(RoomGenError):
    """Object file failed to parse; message names file and line."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


class TooFewPoints(RoomGenError):
    """Object file has fewer points than the configured minimum."""


class CorruptContainer(RoomGenError):
    """Scene container is truncated or inconsistent; message names the byte offset."""

    def __init__(self, path, offset, message):
        super().__init__(f"{path}: byte offset {offset}: {message}")
        self.path = str(path)
        self.offset = offset


class WrongFormat(RoomGenError):
    """File is not a scene container (bad magic or unsupported version)."""
