"""Training pools built from forge-generated benchmarks.

The parity split assigns even positions of the sorted normal-train list to
the reconstruction half and odd positions to the discriminative half. Each
half is staged as its own MVTec-layout tree (the half's files become that
tree's anomaly-free test images) and handed to ``forge generate``, so every
training anomaly is produced by the primary engine through its CLI; the
manifest's source field links each augmented image back to its clean origin.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "parity_split",
    "run_forge",
    "forge_generate",
    "PoolEntry",
    "SamplePool",
    "build_half_pool",
]


def parity_split(train_good: str | Path) -> tuple[list[Path], list[Path]]:
    """Even/odd positions of the sorted train/good listing."""
    files = sorted(p for p in Path(train_good).iterdir() if p.suffix.lower() == ".png")
    if not files:
        raise ValueError(f"no training images under {train_good}")
    return files[0::2], files[1::2]


def _forge_argv() -> list[str]:
    exe = shutil.which("forge")
    if exe:
        return [exe]
    return [sys.executable, "-m", "flawforge.cli"]


def run_forge(args: list[str]) -> subprocess.CompletedProcess:
    """Invoke the forge CLI; raises on non-zero exit with its stderr."""
    proc = subprocess.run(_forge_argv() + args, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"forge {' '.join(args)} failed ({proc.returncode}): {proc.stderr}")
    return proc


def forge_generate(
    dataset_root: Path,
    class_name: str,
    out_dir: Path,
    categories: list[str],
    per_category_count: int,
    master_seed: int,
    work_dir: Path,
) -> list[dict]:
    """Run ``forge generate`` and return the parsed manifest entries."""
    config = {
        "dataset_root": str(dataset_root),
        "class_name": class_name,
        "out_dir": str(out_dir),
        "categories": categories,
        "per_category_count": per_category_count,
        "master_seed": master_seed,
    }
    work_dir.mkdir(parents=True, exist_ok=True)
    cfg_path = work_dir / f"{out_dir.name}_config.json"
    cfg_path.write_text(json.dumps(config, indent=2))
    run_forge(["generate", "--config", str(cfg_path)])
    entries = []
    with open(out_dir / "manifest.jsonl") as fh:
        for line in fh:
            entries.append(json.loads(line))
    return entries


@dataclass(frozen=True)
class PoolEntry:
    """One training sample: network input, clean target, mask, provenance."""

    image: Path          # what the networks see
    target: Path         # clean version (reconstruction target)
    mask: Path | None    # ground-truth mask; None means all-zero (normal)
    origin: Path         # the original train-split file this sample came from


@dataclass(frozen=True)
class SamplePool:
    anomalous: tuple[PoolEntry, ...]
    clean: tuple[PoolEntry, ...]

    def all_entries(self) -> tuple[PoolEntry, ...]:
        return self.anomalous + self.clean

    def origins(self) -> set[Path]:
        return {e.origin for e in self.all_entries()}


def build_half_pool(
    half_files: list[Path],
    stage_root: Path,
    class_name: str,
    categories: list[str],
    per_category_count: int,
    master_seed: int,
) -> SamplePool:
    """Stage one split half as an MVTec tree, augment it, and index the results.

    The half's files are copied into ``<stage_root>/tree/<class>/test/good``
    (the generator augments anomaly-free test images), ``forge generate``
    runs on that tree, and the manifest's source paths map every augmented
    image back to its original half file.
    """
    tree = stage_root / "tree"
    test_good = tree / class_name / "test" / "good"
    (tree / class_name / "train" / "good").mkdir(parents=True, exist_ok=True)
    test_good.mkdir(parents=True, exist_ok=True)
    by_name: dict[str, Path] = {}
    for f in half_files:
        shutil.copyfile(f, test_good / f.name)
        by_name[f.name] = f

    bench = stage_root / "bench"
    entries = forge_generate(
        dataset_root=tree,
        class_name=class_name,
        out_dir=bench,
        categories=categories,
        per_category_count=per_category_count,
        master_seed=master_seed,
        work_dir=stage_root,
    )
    anomalous = []
    for entry in entries:
        if entry.get("skipped"):
            continue
        source = Path(entry["source"])
        anomalous.append(
            PoolEntry(
                image=bench / entry["image"],
                target=source,
                mask=bench / entry["mask"],
                origin=by_name[source.name],
            )
        )
    clean = [
        PoolEntry(image=test_good / name, target=test_good / name, mask=None, origin=orig)
        for name, orig in sorted(by_name.items())
    ]
    return SamplePool(anomalous=tuple(anomalous), clean=tuple(clean))
