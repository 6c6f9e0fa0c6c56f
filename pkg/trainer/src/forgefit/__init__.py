"""forgefit: toy-scale split-training harness over flawforge benchmarks.

Trains a reconstructive network R and a discriminative network S with the
parity-split discipline (R learns only from one half of the normal data, S
only sees R's realistic-quality reconstructions of the other half) and
exports score maps in the forge eval CLI's raw format. Everything runs at
desk scale on CPU.
"""

from .export import export_scoremaps, flatten_benchmark, write_raw_scoremap
from .losses import focal_loss, gaussian_window, ssim_loss
from .nets import DiscNet, ReconNet, count_parameters
from .pools import PoolEntry, SamplePool, build_half_pool, forge_generate, parity_split, run_forge
from .toydata import TOY_CLASS, make_toy_dataset
from .training import (
    NonFiniteLossError,
    SplitTrainer,
    TrainBatchPair,
    TrainConfig,
    load_image,
)

__version__ = "0.1.0"
