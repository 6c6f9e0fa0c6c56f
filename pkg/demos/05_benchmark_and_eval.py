"""End to end: dataset tree -> simulated benchmark -> evaluation.

Creates a toy MVTec-layout class on disk, generates a five-category
simulated benchmark from its anomaly-free test images, scores every image
with a deliberately crude detector (absolute deviation from the per-pixel
median of the normal images), and evaluates the score maps. Also shows that
regenerating with the same master seed reproduces the tree byte-for-byte.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from flawforge import (
    AnomalySourcePool,
    GrayField,
    ImageBuffer,
    evaluate_scoremaps,
    generate_simulated_dataset,
    ingest_mvtec,
    load_mask_png,
    load_png,
    make_rng,
    perlin_noise,
    resolve_profile,
    save_png,
    to_grayscale,
)

SIZE = 64
workdir = Path(tempfile.mkdtemp(prefix="flawforge_demo_"))


def textured(seed):
    f = perlin_noise(SIZE, SIZE, 8, 8, make_rng(seed)).data
    g = perlin_noise(SIZE, SIZE, 16, 16, make_rng(seed + 500)).data
    field = np.clip(0.5 * f + 0.3 * g + 0.1, 0, 1)
    return ImageBuffer(np.stack([field, field, field], axis=2))


# 1. toy MVTec-layout class
base = workdir / "data" / "demo"
(base / "train" / "good").mkdir(parents=True)
(base / "test" / "good").mkdir(parents=True)
for i in range(6):
    save_png(textured(100 + i), base / "train" / "good" / f"{i:03d}.png")
for i in range(4):
    save_png(textured(200 + i), base / "test" / "good" / f"{i:03d}.png")

index = ingest_mvtec(workdir / "data", "demo")
print(f"ingested {len(index.normal_train)} train / {len(index.normal_test)} test normals")

# 2. simulated benchmark, twice with the same seed
out_a, out_b = workdir / "bench_a", workdir / "bench_b"
for out in (out_a, out_b):
    manifest = generate_simulated_dataset(
        index=index,
        profile=resolve_profile("demo"),
        categories=["cutpaste", "nda", "nsa", "opaque", "transparent"],
        per_category_count=8,
        source_pool=AnomalySourcePool(mode="self-patch"),
        master_seed=2024,
        out_dir=out,
    )
print(f"generated {len(manifest.written())} samples, {len(manifest.skipped())} skipped")

identical = all(
    (out_a / p.relative_to(out_b)).read_bytes() == p.read_bytes()
    for p in sorted(out_b.rglob("*"))
    if p.is_file()
)
print("regeneration with the same master seed is byte-identical:", identical)

# 3. oracle reconstructor: pretend R() returns each sample's clean source
# (the manifest records it), so score = |input - R(input)|. This is the
# upper bound any reconstruction-based detector could reach on this data.
from flawforge import Mask

per_category = {cat: {"maps": [], "gts": []} for cat in {e["category"] for e in manifest.written()}}
for entry in manifest.written():
    anomalous = to_grayscale(load_png(out_a / entry["image"])).data
    clean = to_grayscale(load_png(entry["source"])).data
    per_category[entry["category"]]["maps"].append(GrayField(np.abs(anomalous - clean)))
    per_category[entry["category"]]["gts"].append(load_mask_png(out_a / entry["mask"]))
for cat, data in per_category.items():
    for good in sorted((out_a / cat / "good").iterdir()):
        img = to_grayscale(load_png(good)).data
        data["maps"].append(GrayField(np.abs(img - img)))  # ideal reconstruction of a normal
        data["gts"].append(Mask(np.zeros((SIZE, SIZE), dtype=np.uint8)))

print("\nideal-reconstruction detector, per category (AUROC / AP, percent):")
for cat, data in sorted(per_category.items()):
    report = evaluate_scoremaps(data["maps"], data["gts"])
    print(
        f"  {cat:12s} pixel {report.pixel_auroc * 100:5.1f} / {report.pixel_ap * 100:5.1f}"
        f"   image {report.image_auroc * 100:5.1f} / {report.image_ap * 100:5.1f}"
    )

print("\nmanifest head:")
manifest_lines = (out_a / "manifest.jsonl").read_text().splitlines()
print(json.dumps(json.loads(manifest_lines[0]), indent=2)[:400])
print(f"\nartifacts under {workdir}")
