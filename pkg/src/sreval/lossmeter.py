"""Hybrid pixel-gradient reconstruction loss and first-order derivative maps.

The loss is  L = lambda_l1 * mean|pred - truth|
           + lambda_grad * (mean|d/dx pred - d/dx truth| + mean|d/dy pred - d/dy truth|)
with forward finite differences on valid grids (no padding). Mean reduction
is the default so the weights are resolution-independent; sum reduction is
available as a switch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imagecore import LUMA, PlanarImage, extract_luma


@dataclass(frozen=True)
class HybridLossConfig:
    lambda_l1: float = 1.0
    lambda_grad: float = 0.05
    reduction: str = "mean"  # or "sum"

    def __post_init__(self):
        if self.lambda_l1 < 0 or self.lambda_grad < 0:
            raise ValueError("loss weights must be >= 0")
        if self.reduction not in ("mean", "sum"):
            raise ValueError(f"unknown reduction {self.reduction!r}")


@dataclass(frozen=True)
class GradientField:
    """Forward differences: gx has width-1 columns, gy has height-1 rows."""

    gx: np.ndarray  # (planes, h, w-1)
    gy: np.ndarray  # (planes, h-1, w)


def _check_pair(truth: PlanarImage, pred: PlanarImage):
    if truth.data.shape != pred.data.shape:
        raise ValueError(
            f"dimension mismatch: truth {truth.data.shape} vs pred {pred.data.shape}"
        )


def _reduce(arr: np.ndarray, reduction: str) -> float:
    return float(arr.sum() if reduction == "sum" else arr.mean())


def l1_loss(truth: PlanarImage, pred: PlanarImage, reduction: str = "mean") -> float:
    _check_pair(truth, pred)
    return _reduce(np.abs(pred.data - truth.data), reduction)


def gradient_field(img: PlanarImage) -> GradientField:
    if img.width < 2 or img.height < 2:
        raise ValueError("gradient_field needs width and height >= 2")
    d = img.data
    return GradientField(gx=d[:, :, 1:] - d[:, :, :-1], gy=d[:, 1:, :] - d[:, :-1, :])


def grad_loss(truth: PlanarImage, pred: PlanarImage, reduction: str = "mean") -> float:
    _check_pair(truth, pred)
    gt, gp = gradient_field(truth), gradient_field(pred)
    return (_reduce(np.abs(gp.gx - gt.gx), reduction)
            + _reduce(np.abs(gp.gy - gt.gy), reduction))


def hybrid_loss(truth: PlanarImage, pred: PlanarImage,
                cfg: HybridLossConfig = HybridLossConfig()) -> float:
    return (cfg.lambda_l1 * l1_loss(truth, pred, cfg.reduction)
            + cfg.lambda_grad * grad_loss(truth, pred, cfg.reduction))


def derivative_map(img: PlanarImage) -> PlanarImage:
    """Per-pixel gradient magnitude on clamp-extended grids, max-normalized.

    Used for qualitative derivative visualizations; an all-zero (constant)
    input stays all-zero.
    """
    if img.width < 2 or img.height < 2:
        raise ValueError("derivative_map needs width and height >= 2")
    y = extract_luma(img).plane(0)
    gx = np.empty_like(y)
    gx[:, :-1] = y[:, 1:] - y[:, :-1]
    gx[:, -1] = 0.0  # clamp extension: the sample beyond the edge repeats
    gy = np.empty_like(y)
    gy[:-1, :] = y[1:, :] - y[:-1, :]
    gy[-1, :] = 0.0
    mag = np.sqrt(gx * gx + gy * gy)
    peak = mag.max()
    if peak > 0:
        mag = mag / peak
    return PlanarImage(mag[np.newaxis], LUMA)
