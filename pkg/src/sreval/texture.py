"""Gray-level co-occurrence statistics and edge/corner density diagnostics.

The GLCM side is parameter-explicit on purpose: the statistics only mean
anything relative to (levels, distance, angle, symmetric, normalize), so
every report row echoes the configuration it was computed with.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imagecore import PlanarImage, extract_luma

# (row, col) steps per angle; 0 deg looks right, 45 up-right, 90 up, 135 up-left
_ANGLE_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}


@dataclass(frozen=True)
class GlcmConfig:
    levels: int = 256
    distance: int = 1
    angle: int = 0
    symmetric: bool = False
    normalize: bool = True

    def __post_init__(self):
        if not (2 <= self.levels <= 256):
            raise ValueError("levels must be in [2, 256]")
        if self.distance < 1:
            raise ValueError("distance must be >= 1")
        if self.angle not in _ANGLE_OFFSETS:
            raise ValueError(f"angle must be one of {sorted(_ANGLE_OFFSETS)}")


@dataclass(frozen=True)
class GlcmStats:
    contrast: float
    dissimilarity: float
    energy: float
    correlation: float
    asm: float


def quantize(img: PlanarImage, levels: int) -> np.ndarray:
    """Map samples to integer levels: floor(v*(levels-1) + 0.5)."""
    y = extract_luma(img).plane(0)
    return np.floor(y * (levels - 1) + 0.5).astype(np.int64)


def glcm(img: PlanarImage, cfg: GlcmConfig = GlcmConfig()) -> np.ndarray:
    """Co-occurrence matrix P[i, j] over the configured (distance, angle) offset."""
    q = quantize(img, cfg.levels)
    dr, dc = _ANGLE_OFFSETS[cfg.angle]
    dr, dc = dr * cfg.distance, dc * cfg.distance
    h, w = q.shape
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r0 >= r1 or c0 >= c1:
        raise ValueError(
            f"image {w}x{h} smaller than offset (distance {cfg.distance}, angle {cfg.angle})"
        )
    src = q[r0:r1, c0:c1].ravel()
    dst = q[r0 + dr:r1 + dr, c0 + dc:c1 + dc].ravel()
    pairs = np.bincount(src * cfg.levels + dst, minlength=cfg.levels * cfg.levels)
    p = pairs.reshape(cfg.levels, cfg.levels).astype(np.float64)
    if cfg.symmetric:
        p = p + p.T
    if cfg.normalize:
        p = p / p.sum()
    return p


def glcm_stats(p: np.ndarray) -> GlcmStats:
    """Contrast, dissimilarity, energy, correlation, and ASM of a normalized GLCM."""
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"GLCM must be normalized (sum 1), got sum {total!r}")
    if p.min() < 0:
        raise ValueError("GLCM entries must be >= 0")
    n = p.shape[0]
    i = np.arange(n, dtype=np.float64)[:, np.newaxis]
    j = np.arange(n, dtype=np.float64)[np.newaxis, :]
    diff = i - j
    contrast = float((p * diff**2).sum())
    dissimilarity = float((p * np.abs(diff)).sum())
    asm = float((p * p).sum())
    mu_i = float((p.sum(axis=1) * i.ravel()).sum())
    mu_j = float((p.sum(axis=0) * j.ravel()).sum())
    var_i = float((p.sum(axis=1) * (i.ravel() - mu_i) ** 2).sum())
    var_j = float((p.sum(axis=0) * (j.ravel() - mu_j) ** 2).sum())
    if var_i <= 0.0 or var_j <= 0.0:
        correlation = 1.0  # a constant texture is perfectly self-correlated
    else:
        correlation = float((p * (i - mu_i) * (j - mu_j)).sum() / np.sqrt(var_i * var_j))
    return GlcmStats(contrast=contrast, dissimilarity=dissimilarity,
                     energy=float(np.sqrt(asm)), correlation=correlation, asm=asm)


def edge_corner_map(img: PlanarImage, edge_low: float = 0.05, edge_high: float = 0.15,
                    corner_k: float = 0.04, corner_thresh: float = 0.01,
                    sigma: float = 1.5):
    """Hysteresis edge mask plus Harris corners with non-maximum suppression.

    Returns (edge_mask, corner_points, edge_pixel_count, corner_count).
    edge_low/edge_high threshold the Gaussian-smoothed gradient magnitude;
    corner_thresh is a fraction of the maximum Harris response.
    """
    if min(img.width, img.height) < 8:
        raise ValueError("edge_corner_map needs side >= 8")
    y = extract_luma(img).plane(0)
    smooth = ndimage.gaussian_filter(y, sigma, mode="nearest")
    gx = np.gradient(smooth, axis=1)
    gy = np.gradient(smooth, axis=0)
    mag = np.hypot(gx, gy)

    weak = mag >= edge_low
    strong = mag >= edge_high
    labels, _ = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    keep = np.unique(labels[strong])
    keep = keep[keep != 0]
    edge_mask = np.isin(labels, keep)

    # Harris response on the same smoothed gradients
    ixx = ndimage.gaussian_filter(gx * gx, sigma, mode="nearest")
    iyy = ndimage.gaussian_filter(gy * gy, sigma, mode="nearest")
    ixy = ndimage.gaussian_filter(gx * gy, sigma, mode="nearest")
    det = ixx * iyy - ixy * ixy
    trace = ixx + iyy
    response = det - corner_k * trace * trace
    peak = response.max()
    corners = []
    if peak > 0:
        local_max = response == ndimage.maximum_filter(response, size=3, mode="nearest")
        hits = local_max & (response >= corner_thresh * peak)
        corners = [(int(r), int(c)) for r, c in zip(*np.nonzero(hits))]
    return edge_mask, corners, int(edge_mask.sum()), len(corners)
