"""Cut-paste vs. Poisson-blended patches.

Cut-paste drops a verbatim rectangle with a hard seam; the Poisson blend
solves for interior values that carry the patch's gradients but meet the
destination at its border, so the seam disappears. The third row visualizes
|output - input| for both, highlighting how differently the two anomaly
types sit in the image.
"""

import numpy as np

from flawforge import ImageBuffer, cutpaste, make_rng, perlin_noise, poisson_paste, save_png

from _montage import montage, output_dir

SIZE = 128


def textured(seed, tint):
    f = perlin_noise(SIZE, SIZE, 8, 8, make_rng(seed)).data
    return ImageBuffer(np.clip(np.stack([f * tint[0], f * tint[1], f * tint[2]], axis=2) + 0.1, 0, 1))


image = textured(31, (0.8, 0.7, 0.55))
donor = textured(77, (0.5, 0.75, 0.9))

cp_out, cp_mask = cutpaste(image, make_rng(5), rect_frac_range=(0.25, 0.4))
pp_out, pp_mask = poisson_paste(image, donor, make_rng(5), rect_frac_range=(0.25, 0.4))

cp_diff = np.abs(cp_out.data - image.data).mean(axis=2)
pp_diff = np.abs(pp_out.data - image.data).mean(axis=2)
print(f"cutpaste: mask {int(cp_mask.data.sum())} px, mean |diff| in mask "
      f"{cp_diff[cp_mask.data == 1].mean():.4f}")
print(f"poisson:  mask {int(pp_mask.data.sum())} px, mean |diff| in mask "
      f"{pp_diff[pp_mask.data == 1].mean():.4f}")

border_identical = np.array_equal(pp_out.data[pp_mask.data == 0], image.data[pp_mask.data == 0])
print("poisson pixels outside the mask are bit-identical to the input:", border_identical)

rows = [
    [image.data, cp_out.data, cp_mask.data.astype(float), cp_diff / max(cp_diff.max(), 1e-9)],
    [donor.data, pp_out.data, pp_mask.data.astype(float), pp_diff / max(pp_diff.max(), 1e-9)],
]
save_png(ImageBuffer(montage(rows)), output_dir() / "04_cutpaste_vs_poisson.png")
print("wrote", output_dir() / "04_cutpaste_vs_poisson.png")
