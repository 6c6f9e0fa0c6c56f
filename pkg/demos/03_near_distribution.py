"""Anatomy of a near-distribution anomaly.

Shows every stage of the sinusoidal-distortion pipeline: the warped
rectangle, the raw thresholded difference (scattered dots included), the
block-reduced mask that connects nearby dots, their intersection, and the
final composite whose changed pixels are hard to spot by eye.
"""

import numpy as np

from flawforge import DegenerateDistortionError, ImageBuffer, NdaaParams, make_rng, perlin_noise, save_png
from flawforge.augment import ndaa_stages

from _montage import montage, output_dir

SIZE = 160

base = perlin_noise(SIZE, SIZE, 16, 16, make_rng(21)).data
detail = perlin_noise(SIZE, SIZE, 32, 32, make_rng(22)).data
field = np.clip(0.55 * base + 0.35 * detail + 0.05, 0.0, 1.0)
image = ImageBuffer(np.stack([field, field * 0.9, field * 0.8], axis=2))

params = NdaaParams(rect_frac_range=(0.3, 0.5), amplitude_range=(3.0, 6.0))
stages = None
for seed in range(100):
    try:
        stages = ndaa_stages(image, params, make_rng(seed))
        break
    except DegenerateDistortionError:
        continue
assert stages is not None

changed = int(stages.mask.data.sum())
x0, y0, rw, rh = stages.rect
print(f"rectangle {rw}x{rh} at ({x0},{y0}); final mask covers {changed} px")
print(f"primitive mask: {int(stages.mask_primary.data.sum())} px, "
      f"block-reduced mask: {int(stages.mask_reduced.data.sum())} px")

rows = [
    [image.data, stages.distorted.data, stages.output.data],
    [stages.mask_primary.data, stages.mask_reduced.data, stages.mask.data],
]
save_png(ImageBuffer(montage(rows)), output_dir() / "03_ndaa_stages.png")
print("wrote", output_dir() / "03_ndaa_stages.png")
