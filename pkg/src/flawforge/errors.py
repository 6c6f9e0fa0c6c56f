"""Exception hierarchy for flawforge.

Plain file-system failures use the builtin ``FileNotFoundError`` / ``OSError``;
everything domain-specific derives from :class:`FlawforgeError` so callers can
catch the whole family at once.
"""


class FlawforgeError(Exception):
    """Base class for all flawforge-specific errors."""


class UnsupportedFormatError(FlawforgeError):
    """Raster file is not an 8-bit grayscale or RGB PNG."""


class InvalidBlockSizeError(FlawforgeError):
    """Block-reduce called with a zero block size."""


class DimensionMismatchError(FlawforgeError):
    """Operands do not share width/height/channels."""


class InvalidFrequencyError(FlawforgeError):
    """Noise lattice frequency is zero or exceeds the raster dimension."""


class MaskResampleExhaustedError(FlawforgeError):
    """No mask satisfying the area band was found within the resample budget."""


class EmptyPoolError(FlawforgeError):
    """External anomaly-source pool contains no images."""


class UnreadableSourceError(FlawforgeError):
    """An anomaly-source image exists but cannot be decoded."""


class DegenerateDistortionError(FlawforgeError):
    """Sinusoidal distortion produced an empty mask (invisible change)."""


class EmptyAngleSetError(FlawforgeError):
    """rotate_normal called with an empty angle set."""


class InvalidProfileError(FlawforgeError):
    """Augmentation profile overrides violate the profile invariants."""


class LayoutError(FlawforgeError):
    """Dataset directory tree does not follow the MVTec layout."""


class MissingMaskError(FlawforgeError):
    """Anomalous test image has no ground-truth mask file."""


class EmptyTrainSetError(FlawforgeError):
    """Parity split requested on an empty normal-train list."""


class SingleClassError(FlawforgeError):
    """AUROC/AP undefined: labels are all-positive or all-negative."""


class UnpairedFileError(FlawforgeError):
    """Score map and ground-truth directories do not pair one-to-one."""


class ConfigError(FlawforgeError):
    """Generation config violates the schema.

    ``pointer`` holds a JSON-pointer-style path to the offending key.
    """

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer
