"""Raster types and pure pixel operations.

Three thin wrappers around row-major numpy arrays:

* :class:`ImageBuffer` -- ``(H, W, C)`` float64 in ``[0, 1]``, ``C in {1, 3}``
* :class:`Mask`        -- ``(H, W)`` uint8 in ``{0, 1}``
* :class:`GrayField`   -- ``(H, W)`` float64, unbounded

All operations are pure: identical inputs give bit-identical outputs, and no
function mutates its arguments. On-disk format is 8-bit PNG only (masks are
written with values ``{0, 255}``).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DimensionMismatchError,
    InvalidBlockSizeError,
    UnsupportedFormatError,
)

__all__ = [
    "ImageBuffer",
    "Mask",
    "GrayField",
    "load_png",
    "load_mask_png",
    "save_png",
    "to_grayscale",
    "block_reduce_mean",
    "resize_nearest",
    "threshold",
    "rotate",
    "bilinear_sample",
    "bilinear_resize",
]


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """H x W x C raster with channel values in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ValueError(f"expected (H, W, C) with C in {{1, 3}}, got shape {arr.shape}")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("image values must lie in [0, 1]")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True, eq=False)
class Mask:
    """H x W binary raster."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValueError(f"expected (H, W) mask, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("mask values must be strictly binary")
        object.__setattr__(self, "data", arr.astype(np.uint8))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def complement(self) -> "Mask":
        return Mask(1 - self.data)

    def area_fraction(self) -> float:
        return float(self.data.mean()) if self.data.size else 0.0

    def is_empty(self) -> bool:
        return not bool(self.data.any())


@dataclass(frozen=True, eq=False)
class GrayField:
    """H x W field of unbounded reals (noise, differences, score maps)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"expected (H, W) field, got shape {arr.shape}")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


# ---------------------------------------------------------------------------
# PNG I/O
# ---------------------------------------------------------------------------

def load_png(path: str | Path) -> ImageBuffer:
    """Load an 8-bit grayscale or RGB PNG, scaling bytes to [0, 1].

    Raises ``FileNotFoundError`` for a missing file and
    :class:`UnsupportedFormatError` for anything that is not a plain 8-bit
    gray/RGB PNG (palette, alpha, 16-bit, non-PNG codecs).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    try:
        with Image.open(path) as img:
            if img.format != "PNG":
                raise UnsupportedFormatError(f"{path}: not a PNG (format={img.format})")
            if img.mode not in ("L", "RGB"):
                raise UnsupportedFormatError(f"{path}: unsupported PNG mode {img.mode!r}")
            arr = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormatError(f"{path}: cannot decode image") from exc
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return ImageBuffer(arr.astype(np.float64) / 255.0)


def load_mask_png(path: str | Path) -> Mask:
    """Load a {0, 255} grayscale PNG as a binary mask (cut at byte > 127)."""
    buf = load_png(path)
    if buf.channels != 1:
        raise UnsupportedFormatError(f"{path}: mask PNG must be grayscale")
    return Mask((buf.data[:, :, 0] > 0.5).astype(np.uint8))


def save_png(buffer: ImageBuffer | Mask, path: str | Path) -> None:
    """Write a buffer as 8-bit PNG (``round(v*255)``) or a mask as {0, 255}."""
    path = Path(path)
    if isinstance(buffer, Mask):
        arr = (buffer.data * 255).astype(np.uint8)
        img = Image.fromarray(arr, mode="L")
    elif isinstance(buffer, ImageBuffer):
        arr = np.rint(buffer.data * 255.0).astype(np.uint8)
        if buffer.channels == 1:
            img = Image.fromarray(arr[:, :, 0], mode="L")
        else:
            img = Image.fromarray(arr, mode="RGB")
    else:
        raise TypeError(f"cannot save object of type {type(buffer).__name__}")
    img.save(path, format="PNG")


# ---------------------------------------------------------------------------
# Pixel operations
# ---------------------------------------------------------------------------

_LUMA = np.array([0.299, 0.587, 0.114])  # ITU-R BT.601


def to_grayscale(img: ImageBuffer) -> GrayField:
    """Luminance of an image: identity for 1-channel, BT.601 for RGB."""
    if img.channels == 1:
        return GrayField(img.data[:, :, 0].copy())
    return GrayField(img.data @ _LUMA)


def block_reduce_mean(f: GrayField, b: int) -> GrayField:
    """Reduce a field to ceil(h/b) x ceil(w/b) cells of b x b block means.

    Edge blocks average only the in-bounds pixels, so a constant field stays
    constant under any block size.
    """
    if b < 1:
        raise InvalidBlockSizeError("block size must be >= 1")
    if b == 1:
        return GrayField(f.data.copy())
    h, w = f.data.shape
    row_starts = np.arange(0, h, b)
    col_starts = np.arange(0, w, b)
    sums = np.add.reduceat(np.add.reduceat(f.data, row_starts, axis=0), col_starts, axis=1)
    rows = np.minimum(b, h - row_starts)
    cols = np.minimum(b, w - col_starts)
    return GrayField(sums / np.outer(rows, cols))


def resize_nearest(f: GrayField, w: int, h: int) -> GrayField:
    """Nearest-neighbor resize: src index = floor((dst + 0.5) * src / dst)."""
    if w < 1 or h < 1:
        raise ValueError("target dimensions must be >= 1")
    sh, sw = f.data.shape
    ys = np.minimum(((np.arange(h) + 0.5) * sh / h).astype(np.int64), sh - 1)
    xs = np.minimum(((np.arange(w) + 0.5) * sw / w).astype(np.int64), sw - 1)
    return GrayField(f.data[ys[:, None], xs[None, :]])


def threshold(f: GrayField, tau: float) -> Mask:
    """Binary mask of the strict super-level set ``f > tau``."""
    return Mask((f.data > tau).astype(np.uint8))


def bilinear_sample(data: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample an (H, W[, C]) array at float coords with edge replication.

    ``xs``/``ys`` broadcast together; the result has their broadcast shape
    (plus a trailing channel axis for 3-D input).
    """
    h, w = data.shape[:2]
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    if data.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    # lerp as a + w*(b - a): exact at w == 0 and on constant data
    v00 = data[y0, x0]
    v01 = data[y0, x1]
    v10 = data[y1, x0]
    v11 = data[y1, x1]
    top = v00 + fx * (v01 - v00)
    bot = v10 + fx * (v11 - v10)
    return top + fy * (bot - top)


def bilinear_resize(data: np.ndarray, w: int, h: int) -> np.ndarray:
    """Bilinear resize of an (H, W[, C]) array using half-pixel centers."""
    sh, sw = data.shape[:2]
    xs = (np.arange(w) + 0.5) * sw / w - 0.5
    ys = (np.arange(h) + 0.5) * sh / h - 0.5
    return bilinear_sample(data, xs[None, :], ys[:, None])


def rotate(img: ImageBuffer, angle_deg: float) -> ImageBuffer:
    """Rotate about the image center (bilinear, edge replication).

    Output dimensions equal input dimensions; ``angle_deg == 0`` is an exact
    identity.
    """
    if angle_deg == 0.0:
        return ImageBuffer(img.data.copy())
    h, w = img.height, img.width
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    theta = np.deg2rad(angle_deg)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dx = xs - cx
    dy = ys - cy
    # inverse map: destination pixel pulls from the source rotated by -angle
    src_x = cx + cos_t * dx + sin_t * dy
    src_y = cy - sin_t * dx + cos_t * dy
    out = bilinear_sample(img.data, src_x, src_y)
    return ImageBuffer(np.clip(out, 0.0, 1.0))


def _require_same_dims(a: ImageBuffer, b: ImageBuffer) -> None:
    if a.data.shape != b.data.shape:
        raise DimensionMismatchError(f"image dims differ: {a.data.shape} vs {b.data.shape}")


def _require_mask_dims(img: ImageBuffer, m: Mask) -> None:
    if (img.height, img.width) != (m.height, m.width):
        raise DimensionMismatchError(
            f"mask dims {(m.height, m.width)} do not match image {(img.height, img.width)}"
        )
