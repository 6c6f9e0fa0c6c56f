"""Uncertain-shape masks from thresholded lattice noise.

Sweeps the lattice scale exponent to show how the mask texture changes from
a few large blobs to fine speckle, and demonstrates the area-band resampling
that keeps generated masks usable as ground truth. Writes a montage PNG to
demos/output/.
"""

import numpy as np

from flawforge import (
    ImageBuffer,
    Mask,
    MaskParams,
    generate_uncertain_mask,
    make_rng,
    perlin_noise,
    save_png,
)

from _montage import montage, output_dir

SIZE = 128

rows = []
for k in (1, 2, 3, 4, 5):
    f = 2**k
    noise = perlin_noise(SIZE, SIZE, f, f, make_rng(40 + k))
    mask = Mask((noise.data > 0.5).astype(np.uint8))
    print(f"lattice 2^{k} = {f:2d} cells/axis -> foreground {mask.area_fraction():.2f}")
    rows.append([noise.data, mask.data.astype(float)])

save_png(ImageBuffer(montage(rows)), output_dir() / "01_noise_and_masks.png")

# the area band rejects degenerate draws (near-empty or near-total masks)
params = MaskParams(min_area_frac=0.05, max_area_frac=0.5, max_resamples=50)
fractions = [
    generate_uncertain_mask(SIZE, SIZE, params, make_rng(seed)).area_fraction()
    for seed in range(12)
]
print("area-banded masks:", " ".join(f"{a:.2f}" for a in fractions))
assert all(0.05 <= a <= 0.5 for a in fractions)
print("wrote", output_dir() / "01_noise_and_masks.png")
