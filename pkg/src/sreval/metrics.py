"""Six full-reference image quality metrics with explicit polarity metadata.

PSNR and SSIM accept RGB input (plane-averaged); GMSD, FSIM, VIF, and SR-SIM
are single-channel by definition and always operate on BT.601 luma. All
0-255-domain constants from the original metric formulations are rescaled
to the [0,1] sample domain and kept as named module constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .imagecore import PlanarImage, crop_border, extract_luma
from .phasecong import phase_congruency

HIGHER_BETTER = "higher_better"
LOWER_BETTER = "lower_better"

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

GMSD_C = 170.0 / 255.0**2

FSIM_T1 = 0.85  # phase congruency is already amplitude-normalized
FSIM_T2 = 160.0 / 255.0**2

VIF_SIGMA_NSQ = 2.0 / 255.0**2
VIF_EPS = 1e-10 / 255.0**2  # canonical guards, rescaled with the domain

SRSIM_C1 = 0.40 / 255.0**2
SRSIM_C2 = 225.0 / 255.0**2
SRSIM_ALPHA = 0.5

_SCHARR_DX = np.array([[3.0, 0.0, -3.0], [10.0, 0.0, -10.0], [3.0, 0.0, -3.0]]) / 16.0
_PREWITT_DX = np.array([[1.0, 0.0, -1.0], [1.0, 0.0, -1.0], [1.0, 0.0, -1.0]]) / 3.0


@dataclass(frozen=True)
class MetricId:
    id: str
    polarity: str


METRICS = {
    "PSNR": MetricId("PSNR", HIGHER_BETTER),
    "SSIM": MetricId("SSIM", HIGHER_BETTER),
    "GMSD": MetricId("GMSD", LOWER_BETTER),
    "FSIM": MetricId("FSIM", HIGHER_BETTER),
    "VIF": MetricId("VIF", HIGHER_BETTER),
    "SRSIM": MetricId("SRSIM", HIGHER_BETTER),
}

METRIC_ORDER = tuple(METRICS)

# smallest image side each metric accepts (VIF's comes from its
# valid-convolution/subsampling chain with windows 17, 9, 5, 3)
MIN_SIDE = {"PSNR": 1, "SSIM": 11, "GMSD": 8, "FSIM": 32, "VIF": 41, "SRSIM": 32}

RGB_CAPABLE = {"PSNR", "SSIM"}

_ALIASES = {"SR-SIM": "SRSIM", "SR_SIM": "SRSIM", "SRSIM": "SRSIM"}


def canonical_metric(name: str) -> str:
    up = name.strip().upper()
    up = _ALIASES.get(up, up)
    if up not in METRICS:
        raise ValueError(f"unknown metric {name!r}; choose from {', '.join(METRICS)}")
    return up


@dataclass(frozen=True)
class MetricResult:
    metric: str
    value: float  # math.inf marks PSNR on identical images
    eval_domain: str  # "RGB" or "Y"


def _check_pair(ref: PlanarImage, dist: PlanarImage, metric: str):
    if ref.data.shape != dist.data.shape:
        raise ValueError(
            f"{metric}: dimension mismatch {dist.data.shape} vs reference {ref.data.shape}"
        )
    side = min(ref.width, ref.height)
    if side < MIN_SIDE[metric]:
        raise ValueError(
            f"{metric}: image side {side} below the metric minimum {MIN_SIDE[metric]}"
        )


# ---------------------------------------------------------------------------
# small convolution/pooling helpers (correlation; the only antisymmetric
# kernels feed gradient magnitudes, where the sign is discarded)

def _conv2_valid(a: np.ndarray, k: np.ndarray) -> np.ndarray:
    windows = sliding_window_view(a, k.shape)
    return np.einsum("ijkl,kl->ij", windows, k)


def _conv2_same_zero(a: np.ndarray, k: np.ndarray) -> np.ndarray:
    ph, pw = k.shape[0] // 2, k.shape[1] // 2
    padded = np.pad(a, ((ph, ph), (pw, pw)), mode="constant")
    return _conv2_valid(padded, k)


def _conv2_same_edge(a: np.ndarray, k: np.ndarray) -> np.ndarray:
    # even-sized kernels take the extra pad sample on the leading side
    ph0, pw0 = (k.shape[0] - 1) // 2, (k.shape[1] - 1) // 2
    ph1, pw1 = k.shape[0] - 1 - ph0, k.shape[1] - 1 - pw0
    padded = np.pad(a, ((ph1, ph0), (pw1, pw0)), mode="edge")
    return _conv2_valid(padded, k)


def _gaussian2(n: int, sigma: float) -> np.ndarray:
    ax = np.arange(n, dtype=np.float64) - (n - 1) / 2.0
    g = np.exp(-(ax**2) / (2.0 * sigma**2))
    k = np.outer(g, g)
    return k / k.sum()


def _block_mean(a: np.ndarray, f: int) -> np.ndarray:
    """Non-overlapping f x f block means, truncating ragged edges."""
    if f <= 1:
        return a
    h, w = (a.shape[0] // f) * f, (a.shape[1] // f) * f
    return a[:h, :w].reshape(h // f, f, w // f, f).mean(axis=(1, 3))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _luma(img: PlanarImage) -> np.ndarray:
    return extract_luma(img).plane(0)


def _scharr_magnitude(y: np.ndarray) -> np.ndarray:
    gx = _conv2_same_zero(y, _SCHARR_DX)
    gy = _conv2_same_zero(y, _SCHARR_DX.T)
    return np.sqrt(gx * gx + gy * gy)


def _working_scale(y: np.ndarray) -> int:
    return max(1, _round_half_up(min(y.shape) / 256.0))


# ---------------------------------------------------------------------------
# the metrics


def psnr(ref: PlanarImage, dist: PlanarImage, peak: float = 1.0) -> MetricResult:
    """10*log10(peak^2 / MSE) over every plane; identical images give +inf."""
    _check_pair(ref, dist, "PSNR")
    mse = float(np.mean((ref.data - dist.data) ** 2))
    value = math.inf if mse == 0.0 else 10.0 * math.log10(peak * peak / mse)
    return MetricResult("PSNR", value, _domain_of(ref))


def ssim(ref: PlanarImage, dist: PlanarImage) -> MetricResult:
    """Mean local SSIM, 11x11 Gaussian window (sigma 1.5), valid region only."""
    _check_pair(ref, dist, "SSIM")
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2
    window = _gaussian2(SSIM_WINDOW, SSIM_SIGMA)
    values = []
    for p in range(ref.nplanes):
        x, y = ref.plane(p), dist.plane(p)
        mu1 = _conv2_valid(x, window)
        mu2 = _conv2_valid(y, window)
        s1 = _conv2_valid(x * x, window) - mu1 * mu1
        s2 = _conv2_valid(y * y, window) - mu2 * mu2
        s12 = _conv2_valid(x * y, window) - mu1 * mu2
        num = (2.0 * mu1 * mu2 + c1) * (2.0 * s12 + c2)
        den = (mu1 * mu1 + mu2 * mu2 + c1) * (s1 + s2 + c2)
        values.append(float(np.mean(num / den)))
    return MetricResult("SSIM", float(np.mean(values)), _domain_of(ref))


def gmsd(ref: PlanarImage, dist: PlanarImage) -> MetricResult:
    """Standard deviation of the gradient-magnitude similarity map.

    Luma is 2x2 average-pooled, gradients are Prewitt, and the score is the
    population standard deviation (0 means identical structure).
    """
    _check_pair(ref, dist, "GMSD")
    y1 = _block_mean(_luma(ref), 2)
    y2 = _block_mean(_luma(dist), 2)
    g1 = np.sqrt(_conv2_same_zero(y1, _PREWITT_DX) ** 2 + _conv2_same_zero(y1, _PREWITT_DX.T) ** 2)
    g2 = np.sqrt(_conv2_same_zero(y2, _PREWITT_DX) ** 2 + _conv2_same_zero(y2, _PREWITT_DX.T) ** 2)
    gms = (2.0 * g1 * g2 + GMSD_C) / (g1 * g1 + g2 * g2 + GMSD_C)
    return MetricResult("GMSD", float(gms.std()), "Y")


def vif(ref: PlanarImage, dist: PlanarImage) -> MetricResult:
    """Pixel-domain visual information fidelity over 4 dyadic scales.

    Information captured about the reference vs about the distorted image
    under a local Gaussian channel model with noise variance VIF_SIGMA_NSQ.
    Directional: vif(ref, dist) != vif(dist, ref) in general.
    """
    _check_pair(ref, dist, "VIF")
    r, d = _luma(ref), _luma(dist)
    num = den = 0.0
    for scale in range(1, 5):
        n = 2 ** (4 - scale + 1) + 1
        win = _gaussian2(n, n / 5.0)
        if scale > 1:
            r = _conv2_valid(r, win)[::2, ::2]
            d = _conv2_valid(d, win)[::2, ::2]
        mu1 = _conv2_valid(r, win)
        mu2 = _conv2_valid(d, win)
        s1 = np.maximum(_conv2_valid(r * r, win) - mu1 * mu1, 0.0)
        s2 = np.maximum(_conv2_valid(d * d, win) - mu2 * mu2, 0.0)
        s12 = _conv2_valid(r * d, win) - mu1 * mu2

        g = s12 / (s1 + VIF_EPS)
        sv = s2 - g * s12
        low1 = s1 < VIF_EPS
        g[low1] = 0.0
        sv[low1] = s2[low1]
        s1 = s1.copy()
        s1[low1] = 0.0
        low2 = s2 < VIF_EPS
        g[low2] = 0.0
        sv[low2] = 0.0
        neg = g < 0.0
        sv[neg] = s2[neg]
        g[neg] = 0.0
        sv[sv <= VIF_EPS] = VIF_EPS

        num += float(np.log10(1.0 + g * g * s1 / (sv + VIF_SIGMA_NSQ)).sum())
        den += float(np.log10(1.0 + s1 / VIF_SIGMA_NSQ).sum())
    if den == 0.0:
        return MetricResult("VIF", 1.0, "Y")  # no reference information to lose
    return MetricResult("VIF", num / den, "Y")


def _spectral_residual_saliency(y: np.ndarray) -> np.ndarray:
    """|IFFT(exp(log-amplitude residual + i*phase))|^2, Gaussian smoothed."""
    f = np.fft.fft2(y)
    amp = np.abs(f)
    phase = np.angle(f)
    log_amp = np.log(np.maximum(amp, 1e-12))  # keep constant images finite
    box = np.full((3, 3), 1.0 / 9.0)
    residual = log_amp - _conv2_same_edge(log_amp, box)
    sal = np.abs(np.fft.ifft2(np.exp(residual + 1j * phase))) ** 2
    return _conv2_same_edge(sal, _gaussian2(11, 2.5))


def srsim(ref: PlanarImage, dist: PlanarImage) -> MetricResult:
    """Spectral-residual similarity: saliency and gradient maps, saliency-weighted."""
    _check_pair(ref, dist, "SRSIM")
    y1, y2 = _luma(ref), _luma(dist)
    f = _working_scale(y1)
    y1, y2 = _block_mean(y1, f), _block_mean(y2, f)
    s1 = _spectral_residual_saliency(y1)
    s2 = _spectral_residual_saliency(y2)
    g1 = _scharr_magnitude(y1)
    g2 = _scharr_magnitude(y2)
    sim_s = (2.0 * s1 * s2 + SRSIM_C1) / (s1 * s1 + s2 * s2 + SRSIM_C1)
    sim_g = (2.0 * g1 * g2 + SRSIM_C2) / (g1 * g1 + g2 * g2 + SRSIM_C2)
    weight = np.maximum(s1, s2)
    total = float(weight.sum())
    if total == 0.0:
        return MetricResult("SRSIM", 1.0, "Y")
    value = float((sim_s * sim_g**SRSIM_ALPHA * weight).sum() / total)
    return MetricResult("SRSIM", value, "Y")


def fsim(ref: PlanarImage, dist: PlanarImage) -> MetricResult:
    """Feature similarity from phase congruency and Scharr gradient maps."""
    _check_pair(ref, dist, "FSIM")
    y1, y2 = _luma(ref), _luma(dist)
    f = _working_scale(y1)
    y1, y2 = _block_mean(y1, f), _block_mean(y2, f)
    pc1 = phase_congruency(y1)
    pc2 = phase_congruency(y2)
    g1 = _scharr_magnitude(y1)
    g2 = _scharr_magnitude(y2)
    sim_pc = (2.0 * pc1 * pc2 + FSIM_T1) / (pc1 * pc1 + pc2 * pc2 + FSIM_T1)
    sim_g = (2.0 * g1 * g2 + FSIM_T2) / (g1 * g1 + g2 * g2 + FSIM_T2)
    pcm = np.maximum(pc1, pc2)
    total = float(pcm.sum())
    if total == 0.0:
        return MetricResult("FSIM", 1.0, "Y")
    value = float((sim_pc * sim_g * pcm).sum() / total)
    return MetricResult("FSIM", value, "Y")


_METRIC_FUNCS = {
    "PSNR": psnr,
    "SSIM": ssim,
    "GMSD": gmsd,
    "FSIM": fsim,
    "VIF": vif,
    "SRSIM": srsim,
}


def _domain_of(img: PlanarImage) -> str:
    return "Y" if img.nplanes == 1 else "RGB"


def evaluate_pair(ref: PlanarImage, dist: PlanarImage, metrics=METRIC_ORDER,
                  domain: str = "y", border: int = 0) -> list[MetricResult]:
    """Crop, convert, and run the requested metrics on one image pair.

    domain "rgb" keeps PSNR/SSIM plane-averaged over RGB; the four
    structural metrics use luma either way.
    """
    domain = domain.lower()
    if domain not in ("rgb", "y"):
        raise ValueError(f"domain must be 'rgb' or 'y', got {domain!r}")
    if ref.data.shape != dist.data.shape:
        raise ValueError(
            f"dimension mismatch: {dist.data.shape} vs reference {ref.data.shape}"
        )
    ref = crop_border(ref, border)
    dist = crop_border(dist, border)
    names = [canonical_metric(m) for m in metrics]
    need_luma = domain == "y" or any(n not in RGB_CAPABLE for n in names)
    if need_luma:
        ref_y, dist_y = extract_luma(ref), extract_luma(dist)
    results = []
    for name in names:
        func = _METRIC_FUNCS[name]
        if name in RGB_CAPABLE and domain == "rgb":
            results.append(func(ref, dist))
        else:
            results.append(func(ref_y, dist_y))
    return results
