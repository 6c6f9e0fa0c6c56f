"""Per-class augmentation selection.

Whether a given simulation method actually produces an anomaly depends on the
class: a rotated carpet is still a normal carpet, but a rotated transistor is
defective; a subtle positional distortion is an anomaly on a cable but
meaningless on a texture. Profiles encode those switches, with built-in
defaults for the 15 MVTec classes and a conservative fallback for unknown
class names. The defaults are this package's reading of the selection
strategy, not ground truth, and every field can be overridden.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidProfileError

__all__ = [
    "ANOMALY_CATEGORIES",
    "AugmentationProfile",
    "resolve_profile",
    "choose_category",
]

# categories choose_category can draw from, in fixed order
ANOMALY_CATEGORIES = ("transparent", "opaque", "ndaa")

_TEXTURE_CLASSES = {"carpet", "grid", "leather", "tile", "wood"}
_OBJECT_CLASSES = {
    "bottle",
    "cable",
    "capsule",
    "hazelnut",
    "metal_nut",
    "pill",
    "screw",
    "toothbrush",
    "transistor",
    "zipper",
}
# objects photographed in arbitrary orientations, so rotation stays normal
_FREE_POSE_OBJECTS = {"screw", "hazelnut"}


@dataclass(frozen=True)
class AugmentationProfile:
    """Switches and sampling weights for one class."""

    class_name: str
    rotation_tolerant: bool
    ndaa_enabled: bool
    transparent_enabled: bool = True
    opaque_enabled: bool = True
    category_weights: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        enabled = self.enabled_categories()
        if not enabled:
            raise InvalidProfileError(
                f"{self.class_name}: at least one anomaly category must be enabled"
            )
        weights = dict(self.category_weights)
        for cat in ANOMALY_CATEGORIES:
            weights.setdefault(cat, 1.0 if cat in enabled else 0.0)
        for cat, wt in weights.items():
            if cat not in ANOMALY_CATEGORIES:
                raise InvalidProfileError(f"{self.class_name}: unknown category {cat!r}")
            if wt < 0.0:
                raise InvalidProfileError(f"{self.class_name}: negative weight for {cat}")
            if cat not in enabled and wt != 0.0:
                raise InvalidProfileError(
                    f"{self.class_name}: disabled category {cat} must have weight 0"
                )
        if sum(weights[c] for c in enabled) <= 0.0:
            raise InvalidProfileError(
                f"{self.class_name}: enabled categories need a positive total weight"
            )
        object.__setattr__(self, "category_weights", weights)

    def enabled_categories(self) -> tuple[str, ...]:
        flags = {
            "transparent": self.transparent_enabled,
            "opaque": self.opaque_enabled,
            "ndaa": self.ndaa_enabled,
        }
        return tuple(c for c in ANOMALY_CATEGORIES if flags[c])


_OVERRIDE_FIELDS = {
    "rotation_tolerant",
    "ndaa_enabled",
    "transparent_enabled",
    "opaque_enabled",
    "category_weights",
}


def resolve_profile(class_name: str, overrides: dict | None = None) -> AugmentationProfile:
    """Built-in defaults for a class name, with user overrides applied on top.

    Textures: rotation tolerated, distortion-style anomalies off. Objects:
    distortions on; rotation intolerable unless the object appears in
    arbitrary orientations. Unknown classes get the conservative default
    (rotation not tolerated, every anomaly category enabled). Resolution is
    deterministic and override-idempotent.
    """
    if not class_name:
        raise InvalidProfileError("class_name must be non-empty")
    name = class_name.lower()
    if name in _TEXTURE_CLASSES:
        base = {"rotation_tolerant": True, "ndaa_enabled": False}
    elif name in _OBJECT_CLASSES:
        base = {"rotation_tolerant": name in _FREE_POSE_OBJECTS, "ndaa_enabled": True}
    else:
        base = {"rotation_tolerant": False, "ndaa_enabled": True}
    fields: dict = {
        "class_name": class_name,
        "transparent_enabled": True,
        "opaque_enabled": True,
        **base,
    }
    for key, value in (overrides or {}).items():
        if key not in _OVERRIDE_FIELDS:
            raise InvalidProfileError(f"unknown profile field {key!r}")
        fields[key] = value
    return AugmentationProfile(**fields)


def choose_category(profile: AugmentationProfile, rng: np.random.Generator) -> str:
    """Draw an enabled anomaly category with probability proportional to its weight."""
    enabled = profile.enabled_categories()
    weights = np.array([profile.category_weights[c] for c in enabled], dtype=np.float64)
    probs = weights / weights.sum()
    return enabled[int(rng.choice(len(enabled), p=probs))]
