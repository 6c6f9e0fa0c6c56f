"""Procedural toy datasets in the MVTec directory layout.

Desk-scale stand-in for a real dataset: every image is a jittered periodic
pattern (stripes or checkerboard), written as 8-bit RGB PNGs under
``<root>/<class>/train/good`` and ``<root>/<class>/test/good`` so the forge
CLI can ingest the tree directly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

__all__ = ["make_toy_dataset", "TOY_CLASS"]

TOY_CLASS = "toy"


def _stripes(size: int, rng: np.random.Generator) -> np.ndarray:
    period = float(rng.uniform(7.0, 10.0))
    phase = float(rng.uniform(0.0, 1.0))
    angle_jitter = float(rng.uniform(-0.08, 0.08))
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    coord = ys + angle_jitter * xs
    field = 0.5 + 0.35 * np.sin(2.0 * np.pi * (coord / period + phase))
    field += rng.normal(0.0, 0.015, (size, size))
    return np.clip(field, 0.0, 1.0)


def _checker(size: int, rng: np.random.Generator) -> np.ndarray:
    cell = int(rng.integers(6, 10))
    ox = int(rng.integers(0, cell))
    oy = int(rng.integers(0, cell))
    ys, xs = np.mgrid[0:size, 0:size]
    board = (((ys + oy) // cell + (xs + ox) // cell) % 2).astype(np.float64)
    field = 0.3 + 0.4 * board + rng.normal(0.0, 0.015, (size, size))
    return np.clip(field, 0.0, 1.0)


_PATTERNS = {"stripes": _stripes, "checker": _checker}


def make_toy_dataset(
    pattern: str,
    n: int,
    size: int,
    seed: int,
    root: str | Path,
    class_name: str = TOY_CLASS,
) -> Path:
    """Write ``n`` normal images into train/good and test/good (2n total)."""
    if pattern not in _PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r} (choose from {sorted(_PATTERNS)})")
    if size < 32:
        raise ValueError("size must be >= 32")
    draw = _PATTERNS[pattern]
    root = Path(root)
    base = root / class_name
    rng = np.random.default_rng(seed)
    for split in ("train", "test"):
        out = base / split / "good"
        out.mkdir(parents=True, exist_ok=True)
        for i in range(n):
            field = draw(size, rng)
            arr = np.rint(np.repeat(field[:, :, None], 3, axis=2) * 255.0).astype(np.uint8)
            Image.fromarray(arr, mode="RGB").save(out / f"{i:03d}.png")
    return root
