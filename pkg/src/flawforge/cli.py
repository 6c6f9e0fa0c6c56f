"""The ``forge`` command line.

Three subcommands, all thin wrappers over library calls:

* ``forge generate --config cfg.json [--jobs N]`` -- build a simulated benchmark
* ``forge eval --scores DIR --gt DIR --out report.json`` -- score anomaly maps
* ``forge inspect --image img.png --category NAME --seed S --out DIR`` -- preview
  one augmentation (NDAA additionally dumps its pipeline intermediates)

Exit codes: 0 success, 1 runtime failure, 2 usage or config error. The
``FORGE_LOG`` environment variable (error|warn|info|debug) sets verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .augment import AnomalySourcePool, ndaa_stages
from .config import load_generation_config
from .dataset import (
    OperatorParams,
    canonical_category,
    generate_sample,
    generate_simulated_dataset,
    ingest_mvtec,
)
from .errors import (
    ConfigError,
    DimensionMismatchError,
    FlawforgeError,
    UnpairedFileError,
    UnsupportedFormatError,
)
from .imgcore import GrayField, load_mask_png, load_png, save_png
from .metrics import MetricsReport, evaluate_scoremaps, read_score_map
from .profiles import resolve_profile
from .rng import make_rng

logger = logging.getLogger("flawforge")

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def cmd_generate(config_path: str | Path, jobs: int = 1) -> int:
    """Run the full generation pipeline described by a config file."""
    cfg = load_generation_config(config_path)
    index = ingest_mvtec(cfg.dataset_root, cfg.class_name)
    profile = resolve_profile(cfg.class_name, cfg.profile_overrides)
    manifest = generate_simulated_dataset(
        index=index,
        profile=profile,
        categories=list(cfg.categories),
        per_category_count=cfg.per_category_count,
        source_pool=cfg.source_pool,
        master_seed=cfg.master_seed,
        out_dir=cfg.out_dir,
        params=cfg.operator_params,
        jobs=jobs,
    )
    for cat in cfg.categories:
        written = sum(1 for e in manifest.written() if e["category"] == cat)
        skipped = sum(1 for e in manifest.skipped() if e["category"] == cat)
        print(f"{cat}: {written} written, {skipped} skipped")
    return 0


def _collect_by_stem(directory: Path, suffixes: tuple[str, ...]) -> dict[str, Path]:
    out: dict[str, Path] = {}
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() in suffixes:
            if path.stem in out:
                raise UnpairedFileError(f"duplicate stem {path.stem!r} in {directory}")
            out[path.stem] = path
    return out


def _load_score(path: Path):
    if path.suffix.lower() == ".png":
        buf = load_png(path)
        if buf.channels != 1:
            raise UnsupportedFormatError(f"{path}: score PNGs must be grayscale")
        return GrayField(buf.data[:, :, 0])
    return read_score_map(path)


def cmd_eval(scores_dir: str | Path, gt_dir: str | Path, out: str | Path) -> int:
    """Evaluate a directory of score maps against ground-truth masks.

    Score maps are grayscale PNGs (score = byte/255) or raw ``.f32`` files;
    masks are {0, 255} PNGs. Files pair by stem and must pair one-to-one.
    """
    scores_dir = Path(scores_dir)
    gt_dir = Path(gt_dir)
    if not scores_dir.is_dir():
        raise FileNotFoundError(str(scores_dir))
    if not gt_dir.is_dir():
        raise FileNotFoundError(str(gt_dir))
    score_files = _collect_by_stem(scores_dir, (".png", ".f32"))
    gt_files = _collect_by_stem(gt_dir, (".png",))
    missing_gt = sorted(set(score_files) - set(gt_files))
    if missing_gt:
        raise UnpairedFileError(f"score map {missing_gt[0]!r} has no ground-truth mask")
    missing_scores = sorted(set(gt_files) - set(score_files))
    if missing_scores:
        raise UnpairedFileError(f"ground-truth mask {missing_scores[0]!r} has no score map")

    maps = []
    gts = []
    for stem in sorted(score_files):
        fmap = _load_score(score_files[stem])
        gt = load_mask_png(gt_files[stem])
        if fmap.data.shape != gt.data.shape:
            raise DimensionMismatchError(
                f"{stem}: score map {fmap.data.shape} vs mask {gt.data.shape}"
            )
        maps.append(fmap)
        gts.append(gt)
    report = evaluate_scoremaps(maps, gts)
    Path(out).write_text(report.to_json(indent=2) + "\n")
    _print_report(report)
    return 0


def _print_report(report: MetricsReport) -> None:
    # mirrors the "AUROC / AP" cell format of benchmark tables, in percent
    print(f"image AUROC / AP: {report.image_auroc * 100:.1f} / {report.image_ap * 100:.1f}")
    print(f"pixel AUROC / AP: {report.pixel_auroc * 100:.1f} / {report.pixel_ap * 100:.1f}")


def cmd_inspect(image: str | Path, category: str, seed: int, out_dir: str | Path) -> int:
    """Apply one augmentation to one image and dump the results as PNGs."""
    cat = canonical_category(category)
    buf = load_png(image)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pool = AnomalySourcePool(mode="self-patch")
    if cat == "nda":
        stages = ndaa_stages(buf, OperatorParams().ndaa_params, make_rng(seed))
        save_png(stages.output, out / "augmented.png")
        save_png(stages.mask, out / "mask.png")
        save_png(stages.distorted, out / "distorted.png")
        save_png(stages.mask_primary, out / "mask_primary.png")
        save_png(stages.mask_reduced, out / "mask_reduced.png")
        print(f"wrote 5 files to {out}")
    else:
        sample = generate_sample(cat, buf, seed, pool, OperatorParams(), source_path=str(image))
        save_png(sample.image, out / "augmented.png")
        save_png(sample.mask, out / "mask.png")
        print(f"wrote 2 files to {out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forge",
        description="Simulated surface-anomaly generation and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a simulated benchmark from a config")
    gen.add_argument("--config", required=True, help="path to the generation config JSON")
    gen.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")

    ev = sub.add_parser("eval", help="score anomaly maps against ground-truth masks")
    ev.add_argument("--scores", required=True, help="directory of score maps (.png or .f32)")
    ev.add_argument("--gt", required=True, help="directory of ground-truth mask PNGs")
    ev.add_argument("--out", required=True, help="where to write the metrics report JSON")

    ins = sub.add_parser("inspect", help="preview a single augmentation")
    ins.add_argument("--image", required=True, help="input PNG")
    ins.add_argument(
        "--category",
        required=True,
        choices=["cutpaste", "nda", "ndaa", "nsa", "opaque", "transparent"],
    )
    ins.add_argument("--seed", type=int, required=True)
    ins.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("FORGE_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            if args.jobs < 1:
                parser.error("--jobs must be >= 1")
            return cmd_generate(args.config, jobs=args.jobs)
        if args.command == "eval":
            return cmd_eval(args.scores, args.gt, args.out)
        return cmd_inspect(args.image, args.category, args.seed, args.out)
    except ConfigError as exc:
        print(f"forge: config error: {exc}", file=sys.stderr)
        return 2
    except (FlawforgeError, OSError, ValueError) as exc:
        print(f"forge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
