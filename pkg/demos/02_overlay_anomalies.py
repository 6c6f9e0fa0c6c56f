"""Transparent vs. opaque overlay anomalies.

Builds one uncertain-shape mask, fills it with a self-patch source, and
sweeps the opacity from nearly invisible to full replacement. The rightmost
column is the opaque composite (opacity pinned at 1), which the transparent
operator reproduces bit-exactly at beta = 1.
"""

import numpy as np

from flawforge import (
    AnomalySourcePool,
    ImageBuffer,
    MaskParams,
    apply_opaque,
    apply_transparent,
    generate_uncertain_mask,
    make_rng,
    perlin_noise,
    sample_source,
    save_png,
)

from _montage import montage, output_dir

SIZE = 128

base = perlin_noise(SIZE, SIZE, 8, 8, make_rng(3)).data
image = ImageBuffer(np.stack([base, np.roll(base, 5, 0), np.roll(base, 5, 1)], axis=2) * 0.8 + 0.1)

rng = make_rng(12)
params = MaskParams(min_area_frac=0.05, max_area_frac=0.4, max_resamples=100)
mask = generate_uncertain_mask(SIZE, SIZE, params, rng)
source = sample_source(AnomalySourcePool(mode="self-patch"), SIZE, SIZE, rng, target=image)

row = [image.data, mask.data.astype(float)]
for beta in (0.2, 0.5, 0.8):
    row.append(apply_transparent(image, source, mask, beta).data)
opaque = apply_opaque(image, source, mask)
row.append(opaque.data)

assert np.array_equal(apply_transparent(image, source, mask, 1.0).data, opaque.data)
print("beta=1 transparent composite equals the opaque composite bit-exactly")

save_png(ImageBuffer(montage([row])), output_dir() / "02_opacity_sweep.png")
print("wrote", output_dir() / "02_opacity_sweep.png")
