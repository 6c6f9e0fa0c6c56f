"""Training objectives: windowed SSIM loss and focal loss.

The combined objective for the split strategy is
``ssim_loss(x, R(x)) + mse(x, R(x))`` on the reconstruction half plus
``focal_loss(S(y + R(y)), mask)`` on the discriminative half.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

__all__ = ["ssim_loss", "focal_loss", "gaussian_window"]

_EPS = 1e-7


def gaussian_window(size: int = 11, sigma: float = 1.5, dtype=torch.float32) -> torch.Tensor:
    """Normalized 2-D Gaussian window of shape (1, 1, size, size)."""
    half = (size - 1) / 2.0
    coords = torch.arange(size, dtype=dtype) - half
    g = torch.exp(-(coords**2) / (2.0 * sigma * sigma))
    kernel = torch.outer(g, g)
    kernel = kernel / kernel.sum()
    return kernel.reshape(1, 1, size, size)


def ssim_loss(a: torch.Tensor, b: torch.Tensor, window_size: int = 11, sigma: float = 1.5) -> torch.Tensor:
    """1 - mean windowed SSIM over channels and valid positions.

    Inputs are (B, C, H, W) in [0, 1]. Stability constants C1=(0.01)^2 and
    C2=(0.03)^2 assume that value range. SSIM lies in [-1, 1], so the loss
    lies in [0, 2]; identical inputs give exactly 0 and the expression is
    symmetric in (a, b).
    """
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {tuple(a.shape)} vs {tuple(b.shape)}")
    c = a.shape[1]
    window = gaussian_window(window_size, sigma, dtype=a.dtype).to(a.device)
    window = window.expand(c, 1, window_size, window_size)
    c1 = 0.01**2
    c2 = 0.03**2

    mu_a = F.conv2d(a, window, groups=c)
    mu_b = F.conv2d(b, window, groups=c)
    mu_aa = mu_a * mu_a
    mu_bb = mu_b * mu_b
    mu_ab = mu_a * mu_b
    var_a = F.conv2d(a * a, window, groups=c) - mu_aa
    var_b = F.conv2d(b * b, window, groups=c) - mu_bb
    cov = F.conv2d(a * b, window, groups=c) - mu_ab

    ssim = ((2.0 * mu_ab + c1) * (2.0 * cov + c2)) / (
        (mu_aa + mu_bb + c1) * (var_a + var_b + c2)
    )
    return 1.0 - ssim.mean()


def focal_loss(pred: torch.Tensor, gt: torch.Tensor, gamma: float = 2.0) -> torch.Tensor:
    """Mean of -(1 - p_t)^gamma * log(p_t) with p_t the true-class probability.

    ``pred`` holds anomaly probabilities in (0, 1) (clamped at 1e-7) and
    ``gt`` a binary mask of the same shape. ``gamma=0`` reduces to plain
    binary cross-entropy.
    """
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: {tuple(pred.shape)} vs {tuple(gt.shape)}")
    p = pred.clamp(_EPS, 1.0 - _EPS)
    gt = gt.to(p.dtype)
    p_t = p * gt + (1.0 - p) * (1.0 - gt)
    return (-((1.0 - p_t) ** gamma) * torch.log(p_t)).mean()
