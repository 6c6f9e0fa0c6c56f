"""Anomaly-composition operators.

Six ways of turning a normal image into an (image, mask) training or
benchmark sample:

* ``apply_transparent`` -- blended overlay, original content stays visible
* ``apply_opaque``      -- full replacement of the masked region
* ``ndaa``              -- near-distribution sinusoidal distortion
* ``rotate_normal``     -- global rotation labeled NORMAL (all-zero mask)
* ``cutpaste``          -- self-patch copied to another location
* ``poisson_paste``     -- seamless gradient-domain patch blend

Every operator is a pure function of (inputs, params, rng state), and for all
of them except ``rotate_normal`` the pixels where the returned mask is 0 are
bit-identical to the input image.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from PIL import Image

from .errors import (
    DegenerateDistortionError,
    EmptyAngleSetError,
    EmptyPoolError,
    UnreadableSourceError,
)
from .imgcore import (
    GrayField,
    ImageBuffer,
    Mask,
    _require_mask_dims,
    _require_same_dims,
    bilinear_resize,
    bilinear_sample,
    block_reduce_mean,
    resize_nearest,
    rotate,
    threshold,
    to_grayscale,
)
from .poisson import blend_channel

logger = logging.getLogger("flawforge")

__all__ = [
    "TransparentParams",
    "NdaaParams",
    "NdaaStages",
    "AnomalySourcePool",
    "AnomalySample",
    "sample_source",
    "apply_transparent",
    "apply_opaque",
    "ndaa",
    "ndaa_stages",
    "rotate_normal",
    "cutpaste",
    "poisson_paste",
]


@dataclass(frozen=True)
class TransparentParams:
    """Opacity band for blended overlays (strictly inside (0, 1))."""

    beta_range: tuple[float, float] = (0.15, 0.85)

    def __post_init__(self):
        lo, hi = self.beta_range
        if not (0.0 < lo <= hi < 1.0):
            raise ValueError("beta_range must satisfy 0 < lo <= hi < 1")


@dataclass(frozen=True)
class NdaaParams:
    """Knobs for the near-distribution distortion pipeline.

    Rectangle dims are drawn as fractions of the image dims, the sinusoidal
    displacement amplitude in pixels, and both luminance thresholds apply to
    absolute differences of [0, 1] values.
    """

    rect_frac_range: tuple[float, float] = (0.1, 0.5)
    amplitude_range: tuple[float, float] = (2.0, 8.0)
    periods_range: tuple[float, float] = (1.0, 3.0)
    tau_primary: float = 10.0 / 255.0
    block_size: int = 8
    tau_reduced: float = 10.0 / 255.0

    def __post_init__(self):
        lo, hi = self.rect_frac_range
        if not (0.0 < lo <= hi < 1.0):
            raise ValueError("rect_frac_range must lie inside (0, 1)")
        if self.amplitude_range[0] < 1.0:
            raise ValueError("amplitude must be >= 1 px")
        if self.periods_range[0] <= 0.0:
            raise ValueError("periods must be positive")
        if self.block_size < 2:
            raise ValueError("block_size must be >= 2")
        if self.tau_primary <= 0.0 or self.tau_reduced <= 0.0:
            raise ValueError("thresholds must be positive")


@dataclass(frozen=True)
class AnomalySourcePool:
    """Where overlay content comes from: a texture directory or the image itself."""

    mode: str = "self-patch"  # "external" | "self-patch"
    paths: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in ("external", "self-patch"):
            raise ValueError(f"unknown pool mode {self.mode!r}")
        object.__setattr__(self, "paths", tuple(str(p) for p in self.paths))


SAMPLE_CATEGORIES = ("transparent", "opaque", "nda", "nsa", "cutpaste", "rotation")


@dataclass(frozen=True)
class AnomalySample:
    """Augmented image, its ground-truth mask, and generation provenance.

    Only rotation-normal samples may carry an empty mask; every anomaly
    category must mark at least one pixel.
    """

    image: ImageBuffer
    mask: Mask
    category: str
    params_used: dict[str, Any] = field(default_factory=dict)
    source_path: str | None = None

    def __post_init__(self):
        if (self.image.height, self.image.width) != (self.mask.height, self.mask.width):
            raise ValueError("mask dims must equal image dims")
        if self.category not in SAMPLE_CATEGORIES:
            raise ValueError(f"unknown sample category {self.category!r}")
        if self.category != "rotation" and self.mask.is_empty():
            raise ValueError(f"{self.category} sample must have a non-empty mask")


def _load_source_image(path: str, channels: int) -> np.ndarray:
    """Read any PIL-decodable texture image as float64 [0, 1] with the given channels."""
    try:
        with Image.open(path) as img:
            img = img.convert("RGB" if channels == 3 else "L")
            arr = np.asarray(img, dtype=np.float64) / 255.0
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise UnreadableSourceError(f"{path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def sample_source(
    pool: AnomalySourcePool,
    w: int,
    h: int,
    rng: np.random.Generator,
    target: ImageBuffer | None = None,
    channels: int = 3,
) -> ImageBuffer:
    """Draw a w x h anomaly-source image from the pool.

    External mode picks a random pool image and takes a random crop covering
    at least 25% of it (each crop side >= half the source side); self-patch
    mode takes a random crop of ``target`` with sides >= a quarter of the
    target sides. Either crop is bilinearly resized to (w, h).
    """
    if pool.mode == "external":
        if not pool.paths:
            raise EmptyPoolError("external source pool has no images")
        idx = int(rng.integers(len(pool.paths)))
        src = _load_source_image(pool.paths[idx], channels)
        sh, sw = src.shape[:2]
        cw = int(rng.integers((sw + 1) // 2, sw + 1))
        ch = int(rng.integers((sh + 1) // 2, sh + 1))
        x0 = int(rng.integers(0, sw - cw + 1))
        y0 = int(rng.integers(0, sh - ch + 1))
        crop = src[y0 : y0 + ch, x0 : x0 + cw]
    else:
        if target is None:
            raise ValueError("self-patch mode requires the target image")
        data = target.data
        if target.channels != channels:
            data = _match_channels(data, channels)
        th, tw = data.shape[:2]
        cw = int(rng.integers(max(1, tw // 4), tw + 1))
        ch = int(rng.integers(max(1, th // 4), th + 1))
        x0 = int(rng.integers(0, tw - cw + 1))
        y0 = int(rng.integers(0, th - ch + 1))
        crop = data[y0 : y0 + ch, x0 : x0 + cw]
    out = bilinear_resize(crop, w, h)
    return ImageBuffer(np.clip(out, 0.0, 1.0))


def _match_channels(data: np.ndarray, channels: int) -> np.ndarray:
    if data.shape[2] == channels:
        return data
    if channels == 1:
        return (data @ np.array([0.299, 0.587, 0.114]))[:, :, None]
    return np.repeat(data, 3, axis=2)


def apply_transparent(I: ImageBuffer, N: ImageBuffer, M_u: Mask, beta: float) -> ImageBuffer:
    """Blend source N over I inside the mask at opacity beta.

    Per pixel: ``(1-m)*I + (1-beta)*(m*I) + beta*(m*N)``. Pixels with
    ``m == 0`` stay bit-identical to I; ``beta == 1`` reproduces
    :func:`apply_opaque` bit-exactly.
    """
    _require_same_dims(I, N)
    _require_mask_dims(I, M_u)
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must lie in [0, 1]")
    m = M_u.data[:, :, None].astype(np.float64)
    out = (1.0 - m) * I.data + (1.0 - beta) * (m * I.data) + beta * (m * N.data)
    return ImageBuffer(np.clip(out, 0.0, 1.0))


def apply_opaque(I: ImageBuffer, N: ImageBuffer, M_u: Mask) -> ImageBuffer:
    """Replace the masked region of I with N outright."""
    _require_same_dims(I, N)
    _require_mask_dims(I, M_u)
    m = M_u.data[:, :, None].astype(np.float64)
    out = (1.0 - m) * I.data + m * N.data
    return ImageBuffer(np.clip(out, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Near-distribution anomalies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NdaaStages:
    """All intermediates of the distortion pipeline, for inspection."""

    distorted: ImageBuffer       # D: rectangle warped along a sin curve
    mask_primary: Mask           # threshold of |gray(I) - gray(D)|
    mask_reduced: Mask           # block-reduced + resized + thresholded diff
    mask: Mask                   # pixelwise AND of the two
    output: ImageBuffer          # I with masked pixels replaced by D
    rect: tuple[int, int, int, int]  # (x0, y0, w, h)


def ndaa_stages(I: ImageBuffer, params: NdaaParams, rng: np.random.Generator) -> NdaaStages:
    """Run the near-distribution pipeline and keep every intermediate.

    Steps: (1) sample an axis-aligned rectangle; (2) displace its rows or
    columns by ``A*sin(2*pi*p*t/L + phi)`` with bilinear sampling and edge
    replication to get D; (3) threshold the absolute luminance difference
    into a primitive mask; (4) block-reduce the difference, resize it back,
    and threshold again to suppress scattered dots; (5) AND the two masks;
    (6) replace masked pixels of I with D.

    Raises :class:`DegenerateDistortionError` when the final mask is empty
    (e.g. on a constant image), so degenerate samples are never emitted.
    """
    h, w = I.height, I.width
    lo, hi = params.rect_frac_range
    rw = max(2, round(rng.uniform(lo, hi) * w))
    rh = max(2, round(rng.uniform(lo, hi) * h))
    rw = min(rw, w)
    rh = min(rh, h)
    x0 = int(rng.integers(0, w - rw + 1))
    y0 = int(rng.integers(0, h - rh + 1))
    along_rows = bool(rng.integers(2))
    amp = float(rng.uniform(*params.amplitude_range))
    periods = float(rng.uniform(*params.periods_range))
    phase = float(rng.uniform(0.0, 2.0 * np.pi))

    distorted = I.data.copy()
    if along_rows:
        # each row of the rectangle shifts horizontally
        t = np.arange(rh)
        disp = amp * np.sin(2.0 * np.pi * periods * t / rh + phase)
        xs = np.arange(x0, x0 + rw)[None, :] + disp[:, None]
        ys = np.broadcast_to(np.arange(y0, y0 + rh)[:, None].astype(np.float64), (rh, rw))
        distorted[y0 : y0 + rh, x0 : x0 + rw] = bilinear_sample(I.data, xs, ys)
    else:
        # each column shifts vertically
        t = np.arange(rw)
        disp = amp * np.sin(2.0 * np.pi * periods * t / rw + phase)
        ys = np.arange(y0, y0 + rh)[:, None] + disp[None, :]
        xs = np.broadcast_to(np.arange(x0, x0 + rw)[None, :].astype(np.float64), (rh, rw))
        distorted[y0 : y0 + rh, x0 : x0 + rw] = bilinear_sample(I.data, xs, ys)
    D = ImageBuffer(np.clip(distorted, 0.0, 1.0))

    diff = GrayField(np.abs(to_grayscale(I).data - to_grayscale(D).data))
    mask_primary = threshold(diff, params.tau_primary)
    reduced = block_reduce_mean(diff, params.block_size)
    mask_reduced = threshold(resize_nearest(reduced, w, h), params.tau_reduced)
    mask = Mask(mask_primary.data & mask_reduced.data)
    if mask.is_empty():
        raise DegenerateDistortionError("sinusoidal distortion left no visible difference")

    m = mask.data[:, :, None].astype(np.float64)
    out = (1.0 - m) * I.data + m * D.data
    return NdaaStages(
        distorted=D,
        mask_primary=mask_primary,
        mask_reduced=mask_reduced,
        mask=mask,
        output=ImageBuffer(out),
        rect=(x0, y0, rw, rh),
    )


def ndaa(I: ImageBuffer, params: NdaaParams, rng: np.random.Generator) -> tuple[ImageBuffer, Mask]:
    """Near-distribution anomaly: sinusoidally distort a rectangle of I."""
    stages = ndaa_stages(I, params, rng)
    return stages.output, stages.mask


def rotate_normal(
    I: ImageBuffer,
    rng: np.random.Generator,
    angle_set: list[float] | None = None,
) -> AnomalySample:
    """Rotate a normal image and label it NORMAL (all-zero mask).

    Applied only to rotation-tolerant classes, where a global rotation must
    not read as an anomaly. ``angle_set=None`` draws a continuous angle from
    [-180, 180); an explicit list is sampled uniformly.
    """
    if angle_set is None:
        angle = float(rng.uniform(-180.0, 180.0))
    else:
        if len(angle_set) == 0:
            raise EmptyAngleSetError("angle_set must not be empty")
        angle = float(angle_set[int(rng.integers(len(angle_set)))])
    rotated = rotate(I, angle)
    zero = Mask(np.zeros((I.height, I.width), dtype=np.uint8))
    return AnomalySample(
        image=rotated, mask=zero, category="rotation", params_used={"angle_deg": angle}
    )


def _draw_rect(
    rng: np.random.Generator, w: int, h: int, frac_range: tuple[float, float], min_side: int = 1
) -> tuple[int, int]:
    lo, hi = frac_range
    rw = min(w, max(min_side, round(rng.uniform(lo, hi) * w)))
    rh = min(h, max(min_side, round(rng.uniform(lo, hi) * h)))
    return rw, rh


def cutpaste(
    I: ImageBuffer,
    rng: np.random.Generator,
    rect_frac_range: tuple[float, float] = (0.1, 0.5),
) -> tuple[ImageBuffer, Mask]:
    """Copy a random rectangle of I onto a different location.

    The destination is redrawn until it differs from the source (at most 20
    draws, then shifted by one pixel). Mask = destination rectangle.
    """
    h, w = I.height, I.width
    rw, rh = _draw_rect(rng, w, h, rect_frac_range)
    sx = int(rng.integers(0, w - rw + 1))
    sy = int(rng.integers(0, h - rh + 1))
    dx, dy = sx, sy
    for _ in range(20):
        dx = int(rng.integers(0, w - rw + 1))
        dy = int(rng.integers(0, h - rh + 1))
        if (dx, dy) != (sx, sy):
            break
    if (dx, dy) == (sx, sy):
        if w - rw > 0:
            dx = sx + 1 if sx + 1 <= w - rw else sx - 1
        elif h - rh > 0:
            dy = sy + 1 if sy + 1 <= h - rh else sy - 1
        else:
            # rectangle covers the whole image; shrink so a shift exists
            rw = max(1, rw - 1)
            dx = sx + 1
    out = I.data.copy()
    out[dy : dy + rh, dx : dx + rw] = I.data[sy : sy + rh, sx : sx + rw]
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[dy : dy + rh, dx : dx + rw] = 1
    return ImageBuffer(out), Mask(mask)


def poisson_paste(
    I: ImageBuffer,
    src: ImageBuffer,
    rng: np.random.Generator,
    rect_frac_range: tuple[float, float] = (0.1, 0.5),
    tol: float = 1e-4,
    max_iters: int = 10_000,
) -> tuple[ImageBuffer, Mask]:
    """Seamlessly blend a scaled patch of ``src`` into a random rectangle of I.

    A source patch (destination size times a random scale in [0.5, 1.5]) is
    cropped from ``src``, resized to the destination rectangle, and blended
    by solving the discrete Poisson equation per channel with the rectangle
    border held at I's values. Mask = rectangle interior (the border ring is
    boundary data and stays bit-identical to I). Non-convergence is logged
    with the final residual; the output is returned regardless.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    h, w = I.height, I.width
    rw, rh = _draw_rect(rng, w, h, rect_frac_range, min_side=4)
    dx = int(rng.integers(0, w - rw + 1))
    dy = int(rng.integers(0, h - rh + 1))
    scale = float(rng.uniform(0.5, 1.5))

    src_data = src.data
    if src.channels != I.channels:
        src_data = _match_channels(src_data, I.channels)
    sh, sw = src_data.shape[:2]
    pw = min(sw, max(1, round(rw * scale)))
    ph = min(sh, max(1, round(rh * scale)))
    px = int(rng.integers(0, sw - pw + 1))
    py = int(rng.integers(0, sh - ph + 1))
    patch = bilinear_resize(src_data[py : py + ph, px : px + pw], rw, rh)

    dest = I.data[dy : dy + rh, dx : dx + rw]
    out = I.data.copy()
    worst = 0.0
    converged = True
    for c in range(I.channels):
        result = blend_channel(dest[:, :, c], patch[:, :, c], tol, max_iters)
        solved = result.values
        # only the interior is composited; the border ring keeps I's bits
        out[dy + 1 : dy + rh - 1, dx + 1 : dx + rw - 1, c] = np.clip(
            solved[1:-1, 1:-1], 0.0, 1.0
        )
        worst = max(worst, result.residual)
        converged = converged and result.converged
    if not converged:
        logger.warning(
            "poisson blend did not converge: residual %.3g > tol %.3g after %d sweeps",
            worst,
            tol,
            max_iters,
        )
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[dy + 1 : dy + rh - 1, dx + 1 : dx + rw - 1] = 1
    return ImageBuffer(out), Mask(mask)
