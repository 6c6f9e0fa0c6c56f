"""Shared helpers for the demo scripts: grid montages without matplotlib."""

from pathlib import Path

import numpy as np


def output_dir() -> Path:
    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)
    return out


def _to_rgb(panel: np.ndarray) -> np.ndarray:
    panel = np.clip(np.asarray(panel, dtype=np.float64), 0.0, 1.0)
    if panel.ndim == 2:
        panel = np.repeat(panel[:, :, None], 3, axis=2)
    elif panel.shape[2] == 1:
        panel = np.repeat(panel, 3, axis=2)
    return panel


def montage(rows, pad: int = 4, pad_value: float = 1.0) -> np.ndarray:
    """Stack a list of rows of (H, W[, C]) panels into one RGB image array."""
    grid_rows = []
    for row in rows:
        panels = [_to_rgb(p) for p in row]
        h = max(p.shape[0] for p in panels)
        padded = []
        for p in panels:
            if p.shape[0] < h:
                fill = np.full((h - p.shape[0], p.shape[1], 3), pad_value)
                p = np.vstack([p, fill])
            padded.append(p)
            padded.append(np.full((h, pad, 3), pad_value))
        grid_rows.append(np.hstack(padded[:-1]))
    w = max(r.shape[1] for r in grid_rows)
    stacked = []
    for r in grid_rows:
        if r.shape[1] < w:
            r = np.hstack([r, np.full((r.shape[0], w - r.shape[1], 3), pad_value)])
        stacked.append(r)
        stacked.append(np.full((pad, w, 3), pad_value))
    return np.vstack(stacked[:-1])
