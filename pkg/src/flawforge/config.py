"""Strict JSON config for dataset generation.

The schema is validated by hand so that every violation carries a JSON-pointer
to the offending key, and unknown keys are rejected outright: a silently
misspelled ``betta_range`` would invalidate a generated benchmark in a way
nobody would notice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .augment import AnomalySourcePool, NdaaParams
from .dataset import GENERATION_CATEGORIES, OperatorParams, canonical_category
from .errors import ConfigError
from .perlin import MaskParams

__all__ = ["GenerationConfig", "load_generation_config", "parse_generation_config"]

_POOL_EXTENSIONS = (".png", ".jpg", ".jpeg")


@dataclass(frozen=True)
class GenerationConfig:
    """Validated generation request, ready to hand to the dataset module."""

    dataset_root: str
    class_name: str
    out_dir: str
    categories: tuple[str, ...]
    per_category_count: int
    master_seed: int
    source_pool: AnomalySourcePool
    profile_overrides: dict[str, Any]
    operator_params: OperatorParams


def _reject_unknown(obj: dict, allowed: set[str], pointer: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", f"{pointer}/{key}")


def _require(obj: dict, key: str, pointer: str) -> Any:
    if key not in obj:
        raise ConfigError(f"missing required key {key!r}", pointer)
    return obj[key]


def _as_str(value: Any, pointer: str) -> str:
    if not isinstance(value, str) or not value:
        raise ConfigError("expected a non-empty string", pointer)
    return value


def _as_int(value: Any, pointer: str, lo: int | None = None, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("expected an integer", pointer)
    if lo is not None and value < lo:
        raise ConfigError(f"must be >= {lo}", pointer)
    if hi is not None and value > hi:
        raise ConfigError(f"must be <= {hi}", pointer)
    return value


def _as_number(value: Any, pointer: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("expected a number", pointer)
    return float(value)


def _as_pair(value: Any, pointer: str, kind=float) -> tuple:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("expected a [lo, hi] pair", pointer)
    out = []
    for i, v in enumerate(value):
        if kind is float:
            out.append(_as_number(v, f"{pointer}/{i}"))
        else:
            out.append(_as_int(v, f"{pointer}/{i}"))
    return tuple(out)


def _parse_mask_params(obj: Any, pointer: str) -> MaskParams:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", pointer)
    allowed = {"min_area_frac", "max_area_frac", "max_resamples", "scale_exponent_range"}
    _reject_unknown(obj, allowed, pointer)
    kwargs: dict[str, Any] = {}
    if "min_area_frac" in obj:
        kwargs["min_area_frac"] = _as_number(obj["min_area_frac"], f"{pointer}/min_area_frac")
    if "max_area_frac" in obj:
        kwargs["max_area_frac"] = _as_number(obj["max_area_frac"], f"{pointer}/max_area_frac")
    if "max_resamples" in obj:
        kwargs["max_resamples"] = _as_int(obj["max_resamples"], f"{pointer}/max_resamples", lo=1)
    if "scale_exponent_range" in obj:
        kwargs["scale_exponent_range"] = _as_pair(
            obj["scale_exponent_range"], f"{pointer}/scale_exponent_range", kind=int
        )
    try:
        return MaskParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), pointer) from exc


def _parse_ndaa_params(obj: Any, pointer: str) -> NdaaParams:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", pointer)
    allowed = {
        "rect_frac_range",
        "amplitude_range",
        "periods_range",
        "tau_primary",
        "block_size",
        "tau_reduced",
    }
    _reject_unknown(obj, allowed, pointer)
    kwargs: dict[str, Any] = {}
    for key in ("rect_frac_range", "amplitude_range", "periods_range"):
        if key in obj:
            kwargs[key] = _as_pair(obj[key], f"{pointer}/{key}")
    for key in ("tau_primary", "tau_reduced"):
        if key in obj:
            kwargs[key] = _as_number(obj[key], f"{pointer}/{key}")
    if "block_size" in obj:
        kwargs["block_size"] = _as_int(obj["block_size"], f"{pointer}/block_size", lo=2)
    try:
        return NdaaParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), pointer) from exc


def _parse_operator_params(obj: Any, pointer: str) -> OperatorParams:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", pointer)
    allowed = {
        "beta_range",
        "mask_params",
        "ndaa_params",
        "rect_frac_range",
        "poisson_tol",
        "poisson_max_iters",
    }
    _reject_unknown(obj, allowed, pointer)
    kwargs: dict[str, Any] = {}
    if "beta_range" in obj:
        kwargs["beta_range"] = _as_pair(obj["beta_range"], f"{pointer}/beta_range")
    if "mask_params" in obj:
        kwargs["mask_params"] = _parse_mask_params(obj["mask_params"], f"{pointer}/mask_params")
    if "ndaa_params" in obj:
        kwargs["ndaa_params"] = _parse_ndaa_params(obj["ndaa_params"], f"{pointer}/ndaa_params")
    if "rect_frac_range" in obj:
        kwargs["rect_frac_range"] = _as_pair(obj["rect_frac_range"], f"{pointer}/rect_frac_range")
    if "poisson_tol" in obj:
        tol = _as_number(obj["poisson_tol"], f"{pointer}/poisson_tol")
        if tol <= 0:
            raise ConfigError("must be positive", f"{pointer}/poisson_tol")
        kwargs["poisson_tol"] = tol
    if "poisson_max_iters" in obj:
        kwargs["poisson_max_iters"] = _as_int(
            obj["poisson_max_iters"], f"{pointer}/poisson_max_iters", lo=1
        )
    lo, hi = kwargs.get("beta_range", (0.15, 0.85))
    if not (0.0 < lo <= hi < 1.0):
        raise ConfigError("beta_range must satisfy 0 < lo <= hi < 1", f"{pointer}/beta_range")
    return OperatorParams(**kwargs)


def _parse_pool(obj: Any, pointer: str) -> AnomalySourcePool:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", pointer)
    _reject_unknown(obj, {"mode", "path"}, pointer)
    mode = _as_str(_require(obj, "mode", pointer), f"{pointer}/mode")
    if mode == "self-patch":
        if "path" in obj:
            raise ConfigError("self-patch pool takes no path", f"{pointer}/path")
        return AnomalySourcePool(mode="self-patch")
    if mode != "external":
        raise ConfigError("mode must be 'external' or 'self-patch'", f"{pointer}/mode")
    path = Path(_as_str(_require(obj, "path", pointer), f"{pointer}/path"))
    if not path.is_dir():
        raise ConfigError(f"pool directory does not exist: {path}", f"{pointer}/path")
    paths = sorted(
        str(p) for p in path.iterdir() if p.suffix.lower() in _POOL_EXTENSIONS
    )
    if not paths:
        raise ConfigError(f"no images found under {path}", f"{pointer}/path")
    return AnomalySourcePool(mode="external", paths=tuple(paths))


_PROFILE_KEYS = {
    "rotation_tolerant": bool,
    "ndaa_enabled": bool,
    "transparent_enabled": bool,
    "opaque_enabled": bool,
    "category_weights": dict,
}


def _parse_profile_overrides(obj: Any, pointer: str) -> dict[str, Any]:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", pointer)
    _reject_unknown(obj, set(_PROFILE_KEYS), pointer)
    out: dict[str, Any] = {}
    for key, value in obj.items():
        if not isinstance(value, _PROFILE_KEYS[key]):
            raise ConfigError(
                f"expected {_PROFILE_KEYS[key].__name__}", f"{pointer}/{key}"
            )
        if key == "category_weights":
            weights = {}
            for cat, wt in value.items():
                weights[cat] = _as_number(wt, f"{pointer}/category_weights/{cat}")
            out[key] = weights
        else:
            out[key] = value
    return out


def parse_generation_config(obj: Any) -> GenerationConfig:
    """Validate a decoded JSON object against the generation schema."""
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object", "")
    allowed = {
        "dataset_root",
        "class_name",
        "out_dir",
        "categories",
        "per_category_count",
        "master_seed",
        "source_pool",
        "profile_overrides",
        "operator_params",
    }
    _reject_unknown(obj, allowed, "")

    dataset_root = _as_str(_require(obj, "dataset_root", ""), "/dataset_root")
    if not Path(dataset_root).is_dir():
        raise ConfigError(f"dataset root does not exist: {dataset_root}", "/dataset_root")
    class_name = _as_str(_require(obj, "class_name", ""), "/class_name")
    out_dir = _as_str(_require(obj, "out_dir", ""), "/out_dir")

    raw_cats = _require(obj, "categories", "")
    if not isinstance(raw_cats, list) or not raw_cats:
        raise ConfigError("expected a non-empty list", "/categories")
    categories = []
    for i, cat in enumerate(raw_cats):
        name = canonical_category(_as_str(cat, f"/categories/{i}"))
        if name not in GENERATION_CATEGORIES:
            raise ConfigError(
                f"unknown category {cat!r} (choose from {list(GENERATION_CATEGORIES)})",
                f"/categories/{i}",
            )
        categories.append(name)

    per_count = _as_int(obj.get("per_category_count", 100), "/per_category_count", lo=1)
    master_seed = _as_int(obj.get("master_seed", 0), "/master_seed", lo=0, hi=2**64 - 1)
    pool = (
        _parse_pool(obj["source_pool"], "/source_pool")
        if "source_pool" in obj
        else AnomalySourcePool(mode="self-patch")
    )
    overrides = (
        _parse_profile_overrides(obj["profile_overrides"], "/profile_overrides")
        if "profile_overrides" in obj
        else {}
    )
    op_params = (
        _parse_operator_params(obj["operator_params"], "/operator_params")
        if "operator_params" in obj
        else OperatorParams()
    )
    return GenerationConfig(
        dataset_root=dataset_root,
        class_name=class_name,
        out_dir=out_dir,
        categories=tuple(categories),
        per_category_count=per_count,
        master_seed=master_seed,
        source_pool=pool,
        profile_overrides=overrides,
        operator_params=op_params,
    )


def load_generation_config(path: str | Path) -> GenerationConfig:
    """Read and validate a generation config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", "")
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", "") from exc
    return parse_generation_config(obj)
