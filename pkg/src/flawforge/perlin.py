"""Uncertain-shape mask generation from thresholded lattice-gradient noise.

Masks for the overlay-style anomalies come from classic 2-D Perlin noise:
unit gradients on an ``(fy+1) x (fx+1)`` lattice, quintic fade
``6t^5 - 15t^4 + 10t^3``, min-max normalized to ``[0, 1]`` and cut at 0.5.
Lattice frequencies are drawn as powers of two, and masks are redrawn until
their foreground fraction lands inside a configured area band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidFrequencyError, MaskResampleExhaustedError
from .imgcore import GrayField, Mask

__all__ = ["MaskParams", "perlin_noise", "generate_uncertain_mask"]


@dataclass(frozen=True)
class MaskParams:
    """Area band and lattice-scale range for uncertain-shape masks.

    ``scale_exponent_range`` = (k_lo, k_hi): lattice frequencies are drawn as
    ``2**k`` independently per axis, then clamped to the raster dimensions.
    """

    min_area_frac: float = 0.001
    max_area_frac: float = 0.6
    max_resamples: int = 20
    scale_exponent_range: tuple[int, int] = (0, 6)

    def __post_init__(self):
        if not (0.0 < self.min_area_frac < self.max_area_frac < 1.0):
            raise ValueError("need 0 < min_area_frac < max_area_frac < 1")
        if self.max_resamples < 1:
            raise ValueError("max_resamples must be >= 1")
        k_lo, k_hi = self.scale_exponent_range
        if not (0 <= k_lo <= k_hi):
            raise ValueError("need 0 <= k_lo <= k_hi")


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def perlin_noise(w: int, h: int, fx: int, fy: int, rng: np.random.Generator) -> GrayField:
    """Classic 2-D Perlin noise with ``fx x fy`` lattice cells, in [0, 1].

    Gradients are unit vectors at uniformly random angles drawn from ``rng``
    (one ``(fy+1, fx+1)`` block per call). The raw field is min-max
    normalized over the raster; a constant raw field maps to all-0.5.
    Dimensions need not be multiples of the lattice frequency.
    """
    if fx < 1 or fy < 1 or fx > w or fy > h:
        raise InvalidFrequencyError(f"lattice ({fx}, {fy}) invalid for raster ({w}, {h})")
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(fy + 1, fx + 1))
    gx = np.cos(angles)
    gy = np.sin(angles)

    cell_x = np.arange(w) * (fx / w)          # in [0, fx)
    cell_y = np.arange(h) * (fy / h)
    ix = cell_x.astype(np.int64)
    iy = cell_y.astype(np.int64)
    u = (cell_x - ix)[None, :]
    v = (cell_y - iy)[:, None]
    ix = ix[None, :]
    iy = iy[:, None]

    n00 = gx[iy, ix] * u + gy[iy, ix] * v
    n10 = gx[iy, ix + 1] * (u - 1.0) + gy[iy, ix + 1] * v
    n01 = gx[iy + 1, ix] * u + gy[iy + 1, ix] * (v - 1.0)
    n11 = gx[iy + 1, ix + 1] * (u - 1.0) + gy[iy + 1, ix + 1] * (v - 1.0)

    fu = _fade(u)
    fv = _fade(v)
    top = n00 + fu * (n10 - n00)
    bot = n01 + fu * (n11 - n01)
    raw = top + fv * (bot - top)

    lo = raw.min()
    hi = raw.max()
    if hi == lo:
        return GrayField(np.full((h, w), 0.5))
    return GrayField((raw - lo) / (hi - lo))


def generate_uncertain_mask(
    w: int, h: int, params: MaskParams, rng: np.random.Generator
) -> Mask:
    """Threshold Perlin noise at 0.5, redrawing until the area band holds.

    Each attempt draws fresh per-axis scale exponents and a fresh gradient
    lattice from ``rng``. After ``params.max_resamples`` attempts without a
    foreground fraction inside ``[min_area_frac, max_area_frac]``, raises
    :class:`MaskResampleExhaustedError`.
    """
    k_lo, k_hi = params.scale_exponent_range
    for _ in range(params.max_resamples):
        kx = int(rng.integers(k_lo, k_hi + 1))
        ky = int(rng.integers(k_lo, k_hi + 1))
        fx = min(2 ** kx, w)
        fy = min(2 ** ky, h)
        field = perlin_noise(w, h, fx, fy, rng)
        mask = Mask((field.data > 0.5).astype(np.uint8))
        frac = mask.area_fraction()
        if params.min_area_frac <= frac <= params.max_area_frac:
            return mask
    raise MaskResampleExhaustedError(
        f"no mask in area band [{params.min_area_frac}, {params.max_area_frac}] "
        f"after {params.max_resamples} attempts"
    )
