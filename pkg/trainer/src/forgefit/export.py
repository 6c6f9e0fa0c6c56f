"""Bridges back to the forge CLI: raw-float score maps and eval directories.

The score-map format is the eval CLI's documented raw layout: an 8-byte
header of two little-endian uint32 (height, width) followed by row-major
little-endian float32 values.
"""

from __future__ import annotations

import shutil
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .training import SplitTrainer, load_image

__all__ = ["write_raw_scoremap", "export_scoremaps", "flatten_benchmark"]


def write_raw_scoremap(path: str | Path, values: np.ndarray) -> None:
    arr = np.asarray(values, dtype="<f4")
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", h, w))
        fh.write(arr.tobytes(order="C"))


def export_scoremaps(trainer: SplitTrainer, images: str | Path, out: str | Path) -> int:
    """Score every PNG in ``images`` and write one ``.f32`` per stem into ``out``."""
    images = Path(images)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    for png in sorted(images.glob("*.png")):
        scores = trainer.score_map(load_image(png)).numpy()
        write_raw_scoremap(out / f"{png.stem}.f32", scores)
        count += 1
    return count


def flatten_benchmark(
    bench_dir: str | Path,
    categories: list[str],
    images_out: str | Path,
    gt_out: str | Path,
) -> int:
    """Flatten a forge benchmark into eval-ready directories.

    Anomalous images and their masks are copied with ``<category>_<stem>``
    names; the normal ``good`` images get all-zero masks, so the flattened
    pair of directories feeds ``forge eval`` directly (after scoring the
    images directory). Returns the number of images staged.
    """
    bench_dir = Path(bench_dir)
    images_out = Path(images_out)
    gt_out = Path(gt_out)
    images_out.mkdir(parents=True, exist_ok=True)
    gt_out.mkdir(parents=True, exist_ok=True)
    count = 0
    for cat in categories:
        for img in sorted((bench_dir / cat / "anomalous").glob("*.png")):
            stem = f"{cat}_{img.stem}"
            shutil.copyfile(img, images_out / f"{stem}.png")
            shutil.copyfile(bench_dir / cat / "masks" / img.name, gt_out / f"{stem}.png")
            count += 1
        for img in sorted((bench_dir / cat / "good").glob("*.png")):
            stem = f"{cat}_good_{img.stem}"
            shutil.copyfile(img, images_out / f"{stem}.png")
            with Image.open(img) as ref:
                zero = Image.new("L", ref.size, 0)
            zero.save(gt_out / f"{stem}.png")
            count += 1
    return count
