"""Split training: reconstruction on one parity half, localization on the other.

The reconstructive net R is optimized only by SSIM + l2 losses computed on
the X half. The Y half flows through R without any reconstruction loss and,
by default, without letting the focal loss reshape R (the reconstruction of
Y samples enters the discriminative net S as a constant); set
``disc_grads_into_recon=True`` for the integrated variant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image

from .losses import focal_loss, ssim_loss
from .nets import DiscNet, ReconNet
from .pools import PoolEntry, SamplePool

__all__ = ["NonFiniteLossError", "TrainConfig", "TrainBatchPair", "SplitTrainer", "load_image"]


class NonFiniteLossError(RuntimeError):
    """A loss term left the reals (overflow or log of garbage)."""


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 700
    batch_size: int = 8
    lr: float = 1e-3
    focal_gamma: float = 2.0
    anomaly_prob: float = 0.5   # chance a drawn sample is an augmented one
    seed: int = 0
    disc_grads_into_recon: bool = False


@dataclass
class TrainBatchPair:
    """Tensors for one step plus the origin files each half touched."""

    x_inputs: torch.Tensor    # (B, 3, H, W) possibly augmented
    x_targets: torch.Tensor   # (B, 3, H, W) clean versions
    x_origins: list[Path] = field(default_factory=list)
    y_inputs: torch.Tensor = None
    y_masks: torch.Tensor = None  # (B, 1, H, W) binary
    y_origins: list[Path] = field(default_factory=list)


def load_image(path: str | Path) -> torch.Tensor:
    """8-bit RGB PNG -> (3, H, W) float32 in [0, 1]."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    return torch.from_numpy(arr).permute(2, 0, 1)


def _load_mask(path: Path | None, h: int, w: int) -> torch.Tensor:
    if path is None:
        return torch.zeros(1, h, w)
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"), dtype=np.float32)
    return torch.from_numpy((arr > 127).astype(np.float32)).unsqueeze(0)


def _draw_entries(pool: SamplePool, n: int, rng: np.random.Generator, p_anom: float) -> list[PoolEntry]:
    out = []
    for _ in range(n):
        use_anom = pool.anomalous and rng.uniform() < p_anom
        source = pool.anomalous if use_anom else pool.clean
        out.append(source[int(rng.integers(len(source)))])
    return out


class SplitTrainer:
    """Owns R, S, and one Adam optimizer per network."""

    def __init__(self, config: TrainConfig = TrainConfig()):
        self.config = config
        torch.manual_seed(config.seed)
        self.recon = ReconNet()
        self.disc = DiscNet()
        self.opt_recon = torch.optim.Adam(self.recon.parameters(), lr=config.lr)
        self.opt_disc = torch.optim.Adam(self.disc.parameters(), lr=config.lr)

    # ---------------------------------------------------------------- batches
    def make_pair(
        self, pool_x: SamplePool, pool_y: SamplePool, rng: np.random.Generator
    ) -> TrainBatchPair:
        bs = self.config.batch_size
        x_entries = _draw_entries(pool_x, bs, rng, self.config.anomaly_prob)
        y_entries = _draw_entries(pool_y, bs, rng, self.config.anomaly_prob)
        return self.pair_from_entries(x_entries, y_entries)

    def pair_from_entries(
        self, x_entries: list[PoolEntry], y_entries: list[PoolEntry]
    ) -> TrainBatchPair:
        x_in = torch.stack([load_image(e.image) for e in x_entries])
        x_tgt = torch.stack([load_image(e.target) for e in x_entries])
        y_in = torch.stack([load_image(e.image) for e in y_entries])
        h, w = y_in.shape[-2:]
        y_mask = torch.stack([_load_mask(e.mask, h, w) for e in y_entries])
        return TrainBatchPair(
            x_inputs=x_in,
            x_targets=x_tgt,
            x_origins=[e.origin for e in x_entries],
            y_inputs=y_in,
            y_masks=y_mask,
            y_origins=[e.origin for e in y_entries],
        )

    # ------------------------------------------------------------------ steps
    def train_step(self, pair: TrainBatchPair, recon_loss_scale: float = 1.0) -> dict:
        """One optimizer step of the full objective under the split discipline.

        Reconstruction losses are computed only on the X batch; when
        ``recon_loss_scale`` is 0 that branch is skipped entirely, so R
        receives no gradients and its parameters stay bit-identical. The Y
        batch passes through R without a reconstruction loss; gradient flow
        from the focal loss into R is blocked unless the config's
        ``disc_grads_into_recon`` flag is set.
        """
        self.opt_recon.zero_grad(set_to_none=True)
        self.opt_disc.zero_grad(set_to_none=True)

        if recon_loss_scale != 0.0:
            recon_x = self.recon(pair.x_inputs)
            l_ssim = ssim_loss(pair.x_targets, recon_x)
            l_2 = F.mse_loss(recon_x, pair.x_targets)
            (recon_loss_scale * (l_ssim + l_2)).backward()
        else:
            l_ssim = torch.zeros(())
            l_2 = torch.zeros(())

        if self.config.disc_grads_into_recon:
            recon_y = self.recon(pair.y_inputs)
        else:
            with torch.no_grad():
                recon_y = self.recon(pair.y_inputs)
        pred = self.disc(torch.cat([pair.y_inputs, recon_y], dim=1))
        l_focal = focal_loss(pred, pair.y_masks, self.config.focal_gamma)
        l_focal.backward()

        record = {
            "l_ssim": float(l_ssim.detach()),
            "l_2": float(l_2.detach()),
            "l_focal": float(l_focal.detach()),
        }
        if not all(np.isfinite(v) for v in record.values()):
            raise NonFiniteLossError(str(record))
        self.opt_recon.step()
        self.opt_disc.step()
        return record

    def fit(
        self,
        pool_x: SamplePool,
        pool_y: SamplePool,
        log_path: str | Path | None = None,
    ) -> list[dict]:
        """Run ``config.steps`` steps with a seed-determined batch order."""
        rng = np.random.default_rng(self.config.seed)
        history = []
        log_fh = open(log_path, "w") if log_path else None
        try:
            for step in range(self.config.steps):
                pair = self.make_pair(pool_x, pool_y, rng)
                record = {"step": step, **self.train_step(pair)}
                history.append(record)
                if log_fh:
                    log_fh.write(json.dumps(record) + "\n")
        finally:
            if log_fh:
                log_fh.close()
        return history

    # -------------------------------------------------------------- inference
    @torch.no_grad()
    def score_map(self, image: torch.Tensor) -> torch.Tensor:
        """(3, H, W) image -> (H, W) anomaly probabilities."""
        self.recon.eval()
        self.disc.eval()
        batch = image.unsqueeze(0)
        recon = self.recon(batch)
        pred = self.disc(torch.cat([batch, recon], dim=1))
        self.recon.train()
        self.disc.train()
        return pred[0, 0]
