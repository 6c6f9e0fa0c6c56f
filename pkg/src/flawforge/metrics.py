"""Threshold-free scoring of anomaly maps: AUROC and AP with exact tie handling.

AUROC is computed as the Mann-Whitney statistic via average ranks (ties count
half), AP as the step-interpolated area under the precision-recall curve with
tied scores collapsed into single threshold groups. Both run in O(n log n)
and are validated in the test suite against brute-force pairwise / threshold
sweep oracles.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatchError, SingleClassError
from .imgcore import GrayField, Mask

__all__ = [
    "ScoredSet",
    "MetricsReport",
    "auroc",
    "average_precision",
    "evaluate_scoremaps",
    "read_score_map",
    "write_score_map",
]


class ScoredSet(NamedTuple):
    """Parallel score/label arrays; unpacks directly into the metric functions."""

    scores: np.ndarray
    labels: np.ndarray


@dataclass(frozen=True)
class MetricsReport:
    """Image-level and pixel-level AUROC/AP plus the underlying counts."""

    image_auroc: float
    image_ap: float
    pixel_auroc: float
    pixel_ap: float
    counts: dict[str, int]

    def as_dict(self) -> dict:
        return {
            "image": {"auroc": self.image_auroc, "ap": self.image_ap},
            "pixel": {"auroc": self.pixel_auroc, "ap": self.pixel_ap},
            "counts": dict(self.counts),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.as_dict(), **kwargs)


def _validate(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise DimensionMismatchError(f"{s.shape[0]} scores vs {y.shape[0]} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be binary")
    y = y.astype(np.int64)
    pos = int(y.sum())
    if pos == 0 or pos == y.size:
        raise SingleClassError("need at least one positive and one negative label")
    return s, y


def _average_ranks(s: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    order = np.argsort(s, kind="mergesort")
    sval = s[order]
    n = s.size
    group_start = np.nonzero(np.diff(sval))[0] + 1
    starts = np.concatenate(([0], group_start))
    ends = np.concatenate((group_start, [n]))
    avg = (starts + ends + 1) / 2.0  # mean of 1-based positions [start+1, end]
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(avg, ends - starts)
    return ranks


def auroc(scores, labels) -> float:
    """Probability a random positive outscores a random negative, ties half."""
    s, y = _validate(scores, labels)
    pos = int(y.sum())
    neg = y.size - pos
    ranks = _average_ranks(s)
    u = ranks[y == 1].sum() - pos * (pos + 1) / 2.0
    return float(u / (pos * neg))


def average_precision(scores, labels) -> float:
    """Step-interpolated area under the precision-recall curve.

    Thresholds descend over the unique score values; a tie group enters as a
    single threshold, i.e. all its samples flip to predicted-positive at once.
    """
    s, y = _validate(scores, labels)
    pos = int(y.sum())
    order = np.argsort(-s, kind="mergesort")
    sval = s[order]
    ysort = y[order]
    # last index of each tie group along the descending order
    boundary = np.nonzero(np.diff(sval))[0]
    ends = np.concatenate((boundary, [s.size - 1]))
    tp = np.cumsum(ysort)[ends].astype(np.float64)
    predicted = (ends + 1).astype(np.float64)
    precision = tp / predicted
    recall = tp / pos
    recall_prev = np.concatenate(([0.0], recall[:-1]))
    return float(np.sum((recall - recall_prev) * precision))


def evaluate_scoremaps(
    maps: list[GrayField],
    gts: list[Mask],
    image_pooling: str = "max",
    top_k: int = 100,
) -> MetricsReport:
    """Score a set of anomaly maps against ground-truth masks.

    Pixel-level metrics pool every pixel of every map into one scored set.
    Image-level metrics reduce each map to a scalar (``max`` by default, or
    ``topk_mean`` over the ``top_k`` highest pixels) and label an image
    positive iff its mask is non-empty.
    """
    if len(maps) != len(gts):
        raise DimensionMismatchError(f"{len(maps)} maps vs {len(gts)} masks")
    if image_pooling not in ("max", "topk_mean"):
        raise ValueError(f"unknown image_pooling {image_pooling!r}")
    image_scores = []
    image_labels = []
    pixel_scores = []
    pixel_labels = []
    for fmap, gt in zip(maps, gts):
        if fmap.data.shape != gt.data.shape:
            raise DimensionMismatchError(
                f"map {fmap.data.shape} vs mask {gt.data.shape}"
            )
        flat = fmap.data.ravel()
        if image_pooling == "max":
            image_scores.append(float(flat.max()))
        else:
            k = min(top_k, flat.size)
            image_scores.append(float(np.sort(flat)[-k:].mean()))
        image_labels.append(int(gt.data.any()))
        pixel_scores.append(flat)
        pixel_labels.append(gt.data.ravel())
    pix_s = np.concatenate(pixel_scores)
    pix_y = np.concatenate(pixel_labels)
    img_s = np.asarray(image_scores)
    img_y = np.asarray(image_labels)
    return MetricsReport(
        image_auroc=auroc(img_s, img_y),
        image_ap=average_precision(img_s, img_y),
        pixel_auroc=auroc(pix_s, pix_y),
        pixel_ap=average_precision(pix_s, pix_y),
        counts={
            "images": int(img_y.size),
            "positive_images": int(img_y.sum()),
            "pixels": int(pix_y.size),
            "positive_pixels": int(pix_y.sum()),
        },
    )


# ---------------------------------------------------------------------------
# Raw float score-map files (the eval CLI's second input format)
# ---------------------------------------------------------------------------
#
# Layout: 8-byte header = two little-endian uint32 (height, width), followed
# by height*width little-endian float32 values in row-major order.

def write_score_map(path: str | Path, values: np.ndarray) -> None:
    """Write a 2-D float array in the raw little-endian score-map format."""
    arr = np.asarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D score map, got shape {arr.shape}")
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", h, w))
        fh.write(arr.tobytes(order="C"))


def read_score_map(path: str | Path) -> GrayField:
    """Read a raw float score map written by :func:`write_score_map`."""
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise ValueError(f"{path}: truncated score map (no header)")
    h, w = struct.unpack("<II", raw[:8])
    expected = 8 + 4 * h * w
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for {h}x{w}, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=8).reshape(h, w)
    return GrayField(data.astype(np.float64))
