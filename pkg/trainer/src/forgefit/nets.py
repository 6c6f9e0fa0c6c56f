"""Toy-scale networks: a reconstructive encoder-decoder and a discriminative
segmentation net over the 6-channel (input, reconstruction) concatenation.

Both stay well under 1M parameters; meant for 64x64 desk-scale experiments,
not MVTec-scale training.
"""

from __future__ import annotations

import torch
from torch import nn

__all__ = ["ReconNet", "DiscNet", "count_parameters"]


def count_parameters(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())


def _block(cin: int, cout: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(cin, cout, 3, padding=1),
        nn.GroupNorm(min(8, cout), cout),
        nn.ReLU(inplace=True),
    )


class ReconNet(nn.Module):
    """Encoder-decoder that maps an (anomalous) image to its normal version.

    Output matches the input resolution and is squashed to [0, 1].
    """

    def __init__(self, base: int = 24):
        super().__init__()
        self.enc1 = _block(3, base)
        self.enc2 = _block(base, base * 2)
        self.enc3 = _block(base * 2, base * 4)
        self.mid = _block(base * 4, base * 4)
        self.dec3 = _block(base * 4, base * 2)
        self.dec2 = _block(base * 2, base)
        self.out = nn.Conv2d(base, 3, 3, padding=1)
        self.pool = nn.MaxPool2d(2)
        self.up = nn.Upsample(scale_factor=2, mode="nearest")

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = self.enc1(x)
        h = self.enc2(self.pool(h))
        h = self.enc3(self.pool(h))
        h = self.mid(h)
        h = self.dec3(self.up(h))
        h = self.dec2(self.up(h))
        return torch.sigmoid(self.out(h))


class DiscNet(nn.Module):
    """U-Net-style segmenter: (input + reconstruction) -> anomaly probability map."""

    def __init__(self, base: int = 24):
        super().__init__()
        self.enc1 = _block(6, base)
        self.enc2 = _block(base, base * 2)
        self.enc3 = _block(base * 2, base * 4)
        self.dec2 = _block(base * 4 + base * 2, base * 2)
        self.dec1 = _block(base * 2 + base, base)
        self.out = nn.Conv2d(base, 1, 3, padding=1)
        self.pool = nn.MaxPool2d(2)
        self.up = nn.Upsample(scale_factor=2, mode="nearest")

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        e1 = self.enc1(x)
        e2 = self.enc2(self.pool(e1))
        e3 = self.enc3(self.pool(e2))
        d2 = self.dec2(torch.cat([self.up(e3), e2], dim=1))
        d1 = self.dec1(torch.cat([self.up(d2), e1], dim=1))
        return torch.sigmoid(self.out(d1))
