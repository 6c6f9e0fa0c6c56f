"""flawforge: deterministic surface-anomaly simulation and evaluation.

The package generates simulated surface defects (transparent and opaque
overlays, near-distribution sinusoidal distortions, rotation-as-normal,
cut-paste, Poisson-blended patches) with pixel-accurate ground-truth masks,
builds MVTec-style simulated benchmarks, and evaluates anomaly score maps
with tie-correct AUROC and average precision.
"""

from .augment import (
    AnomalySample,
    AnomalySourcePool,
    NdaaParams,
    NdaaStages,
    TransparentParams,
    apply_opaque,
    apply_transparent,
    cutpaste,
    ndaa,
    ndaa_stages,
    poisson_paste,
    rotate_normal,
    sample_source,
)
from .config import GenerationConfig, load_generation_config, parse_generation_config
from .dataset import (
    GENERATION_CATEGORIES,
    DatasetIndex,
    Manifest,
    OperatorParams,
    SplitPlan,
    generate_sample,
    generate_simulated_dataset,
    ingest_mvtec,
    split_parity,
)
from .errors import (
    ConfigError,
    DegenerateDistortionError,
    DimensionMismatchError,
    EmptyAngleSetError,
    EmptyPoolError,
    EmptyTrainSetError,
    FlawforgeError,
    InvalidBlockSizeError,
    InvalidFrequencyError,
    InvalidProfileError,
    LayoutError,
    MaskResampleExhaustedError,
    MissingMaskError,
    SingleClassError,
    UnpairedFileError,
    UnreadableSourceError,
    UnsupportedFormatError,
)
from .imgcore import (
    GrayField,
    ImageBuffer,
    Mask,
    block_reduce_mean,
    load_mask_png,
    load_png,
    resize_nearest,
    rotate,
    save_png,
    threshold,
    to_grayscale,
)
from .metrics import (
    MetricsReport,
    ScoredSet,
    auroc,
    average_precision,
    evaluate_scoremaps,
    read_score_map,
    write_score_map,
)
from .perlin import MaskParams, generate_uncertain_mask, perlin_noise
from .poisson import PoissonResult, blend_channel
from .profiles import (
    ANOMALY_CATEGORIES,
    AugmentationProfile,
    choose_category,
    resolve_profile,
)
from .rng import derive, make_rng, splitmix64

__version__ = "0.1.0"
