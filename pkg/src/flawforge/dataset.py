"""MVTec-style dataset ingestion, parity splitting, and benchmark generation.

``generate_simulated_dataset`` turns the anomaly-free test images of a class
into a simulated benchmark: one directory per category containing anomalous
images, pixel-accurate masks, and a copy of the normal sources, plus a
``manifest.jsonl`` that records enough provenance (per-sample seed and
sampled parameters) to regenerate any single sample in isolation. The whole
tree is a pure function of (inputs, config, master seed); generating with k
workers is byte-identical to generating serially.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .augment import (
    AnomalySample,
    AnomalySourcePool,
    NdaaParams,
    TransparentParams,
    apply_opaque,
    apply_transparent,
    cutpaste,
    ndaa,
    poisson_paste,
    sample_source,
)
from .errors import (
    DegenerateDistortionError,
    EmptyTrainSetError,
    LayoutError,
    MaskResampleExhaustedError,
    MissingMaskError,
)
from .imgcore import ImageBuffer, load_png, save_png
from .perlin import MaskParams, generate_uncertain_mask
from .profiles import AugmentationProfile
from .rng import derive, make_rng

__all__ = [
    "GENERATION_CATEGORIES",
    "DatasetIndex",
    "SplitPlan",
    "OperatorParams",
    "Manifest",
    "ingest_mvtec",
    "split_parity",
    "generate_simulated_dataset",
    "generate_sample",
]

GENERATION_CATEGORIES = ("cutpaste", "nda", "nsa", "opaque", "transparent")

_CATEGORY_ALIASES = {"ndaa": "nda"}


def canonical_category(name: str) -> str:
    """Map user-facing aliases (e.g. ``ndaa``) onto the canonical names."""
    return _CATEGORY_ALIASES.get(name.lower(), name.lower())


@dataclass(frozen=True)
class DatasetIndex:
    """Sorted file lists for one class of an MVTec-layout tree."""

    class_name: str
    normal_train: tuple[str, ...]
    normal_test: tuple[str, ...]
    anomalous_test: tuple[tuple[str, str, str], ...]  # (image, mask, defect)


@dataclass(frozen=True)
class SplitPlan:
    """Parity halves of the normal training list (even/odd positions)."""

    recon_half: tuple[str, ...]
    disc_half: tuple[str, ...]


@dataclass(frozen=True)
class OperatorParams:
    """Operator knobs shared by dataset generation and the inspect command."""

    beta_range: tuple[float, float] = (0.15, 0.85)
    mask_params: MaskParams = field(default_factory=MaskParams)
    ndaa_params: NdaaParams = field(default_factory=NdaaParams)
    rect_frac_range: tuple[float, float] = (0.1, 0.5)
    poisson_tol: float = 1e-4
    poisson_max_iters: int = 10_000

    def __post_init__(self):
        TransparentParams(self.beta_range)  # validates the opacity band
        if self.poisson_tol <= 0.0:
            raise ValueError("poisson_tol must be positive")
        if self.poisson_max_iters < 1:
            raise ValueError("poisson_max_iters must be >= 1")

    def as_dict(self) -> dict[str, Any]:
        return {
            "beta_range": list(self.beta_range),
            "mask_params": {
                "min_area_frac": self.mask_params.min_area_frac,
                "max_area_frac": self.mask_params.max_area_frac,
                "max_resamples": self.mask_params.max_resamples,
                "scale_exponent_range": list(self.mask_params.scale_exponent_range),
            },
            "ndaa_params": {
                "rect_frac_range": list(self.ndaa_params.rect_frac_range),
                "amplitude_range": list(self.ndaa_params.amplitude_range),
                "periods_range": list(self.ndaa_params.periods_range),
                "tau_primary": self.ndaa_params.tau_primary,
                "block_size": self.ndaa_params.block_size,
                "tau_reduced": self.ndaa_params.tau_reduced,
            },
            "rect_frac_range": list(self.rect_frac_range),
            "poisson_tol": self.poisson_tol,
            "poisson_max_iters": self.poisson_max_iters,
        }


@dataclass
class Manifest:
    """Generation record: one entry per attempted sample."""

    entries: list[dict[str, Any]]
    master_seed: int
    config_digest: str

    def written(self) -> list[dict[str, Any]]:
        return [e for e in self.entries if not e.get("skipped")]

    def skipped(self) -> list[dict[str, Any]]:
        return [e for e in self.entries if e.get("skipped")]


def _sorted_pngs(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.suffix.lower() == ".png")


def ingest_mvtec(root: str | Path, class_name: str) -> DatasetIndex:
    """Index one class of an MVTec-layout tree.

    Expects ``root/class/train/good``, ``root/class/test/<kind>`` and, for
    every anomalous test image, ``root/class/ground_truth/<kind>/<stem>_mask.png``.
    """
    base = Path(root) / class_name
    train_good = base / "train" / "good"
    test_dir = base / "test"
    if not train_good.is_dir():
        raise LayoutError(f"missing directory {train_good}")
    if not test_dir.is_dir():
        raise LayoutError(f"missing directory {test_dir}")

    normal_train = [str(p) for p in _sorted_pngs(train_good)]
    normal_test: list[str] = []
    anomalous: list[tuple[str, str, str]] = []
    for defect_dir in sorted(p for p in test_dir.iterdir() if p.is_dir()):
        defect = defect_dir.name
        if defect == "good":
            normal_test = [str(p) for p in _sorted_pngs(defect_dir)]
            continue
        for img in _sorted_pngs(defect_dir):
            mask = base / "ground_truth" / defect / f"{img.stem}_mask.png"
            if not mask.is_file():
                raise MissingMaskError(f"{img}: expected mask at {mask}")
            anomalous.append((str(img), str(mask), defect))
    return DatasetIndex(
        class_name=class_name,
        normal_train=tuple(normal_train),
        normal_test=tuple(normal_test),
        anomalous_test=tuple(sorted(anomalous)),
    )


def split_parity(index: DatasetIndex) -> SplitPlan:
    """Even positions of the sorted train list -> reconstruction half, odd -> discriminative half."""
    if not index.normal_train:
        raise EmptyTrainSetError(f"{index.class_name}: no normal training images")
    return SplitPlan(
        recon_half=index.normal_train[0::2],
        disc_half=index.normal_train[1::2],
    )


# ---------------------------------------------------------------------------
# Sample generation
# ---------------------------------------------------------------------------

def generate_sample(
    category: str,
    image: ImageBuffer,
    seed: int,
    pool: AnomalySourcePool,
    params: OperatorParams,
    nsa_source: ImageBuffer | None = None,
    source_path: str | None = None,
) -> AnomalySample:
    """Apply one category's operator to an image, seeded and self-describing.
    Degenerate draws (empty masks) propagate as exceptions for the caller to
    resample.
    """
    category = canonical_category(category)
    rng = make_rng(seed)
    h, w = image.height, image.width
    if category == "cutpaste":
        out, mask = cutpaste(image, rng, params.rect_frac_range)
        used: dict[str, Any] = {}
    elif category == "nda":
        out, mask = ndaa(image, params.ndaa_params, rng)
        used = {}
    elif category == "nsa":
        src = nsa_source
        if pool.mode == "external":
            src = sample_source(pool, w, h, rng, target=image, channels=image.channels)
        elif src is None:
            src = image
        out, mask = poisson_paste(
            image, src, rng, params.rect_frac_range, params.poisson_tol, params.poisson_max_iters
        )
        used = {}
    elif category == "opaque":
        m_u = generate_uncertain_mask(w, h, params.mask_params, rng)
        source = sample_source(pool, w, h, rng, target=image, channels=image.channels)
        out, mask = apply_opaque(image, source, m_u), m_u
        used = {}
    elif category == "transparent":
        m_u = generate_uncertain_mask(w, h, params.mask_params, rng)
        source = sample_source(pool, w, h, rng, target=image, channels=image.channels)
        beta = float(rng.uniform(*params.beta_range))
        out, mask = apply_transparent(image, source, m_u, beta), m_u
        used = {"beta": beta}
    else:
        raise ValueError(f"unknown category {category!r}")
    used["mask_area"] = mask.area_fraction()
    return AnomalySample(
        image=out, mask=mask, category=category, params_used=used, source_path=source_path
    )


_MAX_DEGENERATE_RESAMPLES = 20


def _build_one(
    category: str,
    j: int,
    source_path: str,
    nsa_source_path: str | None,
    sample_seed: int,
    pool: AnomalySourcePool,
    params: OperatorParams,
    out_dir: Path,
) -> dict[str, Any]:
    image = load_png(source_path)
    nsa_src = load_png(nsa_source_path) if nsa_source_path else None
    entry: dict[str, Any] = {
        "id": f"{category}/{j:05d}",
        "category": category,
        "source": source_path,
        "seed": sample_seed,
    }
    last_error = ""
    for attempt in range(_MAX_DEGENERATE_RESAMPLES + 1):
        attempt_seed = sample_seed if attempt == 0 else derive(sample_seed, attempt)
        try:
            sample = generate_sample(
                category,
                image,
                attempt_seed,
                pool,
                params,
                nsa_source=nsa_src,
                source_path=source_path,
            )
        except (DegenerateDistortionError, MaskResampleExhaustedError) as exc:
            last_error = str(exc)
            continue
        img_rel = f"{category}/anomalous/{j:05d}.png"
        mask_rel = f"{category}/masks/{j:05d}.png"
        save_png(sample.image, out_dir / img_rel)
        save_png(sample.mask, out_dir / mask_rel)
        entry.update(
            image=img_rel,
            mask=mask_rel,
            params={**sample.params_used, "attempt": attempt},
        )
        return entry
    entry.update(skipped=True, note=f"degenerate after {attempt + 1} attempts: {last_error}")
    return entry


def _config_digest(effective: dict[str, Any]) -> tuple[str, str]:
    text = json.dumps(effective, sort_keys=True, indent=2) + "\n"
    return text, hashlib.sha256(text.encode()).hexdigest()


def generate_simulated_dataset(
    index: DatasetIndex,
    profile: AugmentationProfile,
    categories: list[str],
    per_category_count: int,
    source_pool: AnomalySourcePool,
    master_seed: int,
    out_dir: str | Path,
    params: OperatorParams | None = None,
    jobs: int = 1,
) -> Manifest:
    """Write a simulated benchmark tree for the requested categories.

    Sources cycle through the anomaly-free TEST images (never train images).
    Per-sample seeds are derived from (master seed, category hash, index), so
    output is byte-reproducible and independent of worker count. Samples that
    stay degenerate after 20 reseeded attempts are skipped with a manifest
    note instead of aborting the run.
    """
    if not index.normal_test:
        raise LayoutError(f"{index.class_name}: no anomaly-free test images to augment")
    params = params or OperatorParams()
    cats = [canonical_category(c) for c in categories]
    unknown = [c for c in cats if c not in GENERATION_CATEGORIES]
    if unknown:
        raise ValueError(f"unknown categories: {unknown}")
    if per_category_count < 1:
        raise ValueError("per_category_count must be >= 1")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    effective = {
        "class_name": index.class_name,
        "categories": cats,
        "per_category_count": per_category_count,
        "master_seed": master_seed,
        "source_pool": {"mode": source_pool.mode, "paths": sorted(source_pool.paths)},
        "profile": {
            "class_name": profile.class_name,
            "rotation_tolerant": profile.rotation_tolerant,
            "ndaa_enabled": profile.ndaa_enabled,
            "transparent_enabled": profile.transparent_enabled,
            "opaque_enabled": profile.opaque_enabled,
            "category_weights": profile.category_weights,
        },
        "operator_params": params.as_dict(),
    }
    config_text, digest = _config_digest(effective)

    n_sources = len(index.normal_test)
    tasks = []
    for cat in cats:
        cat_hash = zlib.crc32(cat.encode())
        for sub in ("anomalous", "masks", "good"):
            (out_dir / cat / sub).mkdir(parents=True, exist_ok=True)
        for src in index.normal_test:
            shutil.copyfile(src, out_dir / cat / "good" / Path(src).name)
        for j in range(per_category_count):
            source_path = index.normal_test[j % n_sources]
            nsa_source = (
                index.normal_test[(j + 1) % n_sources] if source_pool.mode == "self-patch" else None
            )
            sample_seed = derive(master_seed, (cat_hash << 32) + j)
            tasks.append((cat, j, source_path, nsa_source, sample_seed))

    def run(task):
        cat, j, source_path, nsa_source, sample_seed = task
        return _build_one(cat, j, source_path, nsa_source, sample_seed, source_pool, params, out_dir)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool_exec:
            entries = list(pool_exec.map(run, tasks))
    else:
        entries = [run(t) for t in tasks]

    with open(out_dir / "manifest.jsonl", "w") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    (out_dir / "config.json").write_text(config_text)
    (out_dir / "config.sha256").write_text(digest + "\n")
    return Manifest(entries=entries, master_seed=master_seed, config_digest=digest)
