"""Phase congruency via a 4-scale, 4-orientation log-Gabor filter bank.

FFT-based implementation of the classic monogenic-free phase congruency
measure: per orientation, local energy is projected onto the mean phase
vector, a noise threshold estimated from the smallest-scale filter response
is subtracted, and the result is normalized by the total filter amplitude.
All filters live in the frequency domain and depend only on the image shape,
so the bank is cached per shape and shared read-only between workers.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

NSCALE = 4
NORIENT = 4
MIN_WAVELENGTH = 6.0
MULT = 2.0
SIGMA_ONF = 0.55
DTHETA_ON_SIGMA = 1.2
NOISE_K = 2.0
EPSILON = 1e-4  # stabilizes the mean-phase projection in near-zero-energy regions


def _frequency_grid(rows: int, cols: int):
    """Normalized frequency radius/angle grids with DC at index (0, 0)."""
    if cols % 2:
        xr = np.arange(-(cols - 1) / 2, (cols - 1) / 2 + 1) / (cols - 1)
    else:
        xr = np.arange(-cols / 2, cols / 2) / cols
    if rows % 2:
        yr = np.arange(-(rows - 1) / 2, (rows - 1) / 2 + 1) / (rows - 1)
    else:
        yr = np.arange(-rows / 2, rows / 2) / rows
    x, y = np.meshgrid(xr, yr)
    radius = np.fft.ifftshift(np.sqrt(x * x + y * y))
    theta = np.fft.ifftshift(np.arctan2(-y, x))
    return radius, theta


def _lowpass(radius: np.ndarray, cutoff: float = 0.45, order: int = 15) -> np.ndarray:
    """Butterworth lowpass that tapers the log-Gabor tails near Nyquist."""
    return 1.0 / (1.0 + (radius / cutoff) ** (2 * order))


@lru_cache(maxsize=8)
def _filter_bank(rows: int, cols: int):
    """Per-orientation tuples (filters, em_n, sum_an2, sum_aiaj).

    filters: the NSCALE frequency-domain filters for that orientation.
    em_n: total squared magnitude of the smallest-scale filter (noise
    power normalizer). sum_an2 / sum_aiaj: spatial-domain filter energy
    sums entering the noise-threshold estimate.
    """
    radius, theta = _frequency_grid(rows, cols)
    lp = _lowpass(radius)
    radius_safe = radius.copy()
    radius_safe[0, 0] = 1.0  # DC handled explicitly below

    log_gabor = []
    for s in range(NSCALE):
        wavelength = MIN_WAVELENGTH * MULT**s
        fo = 1.0 / wavelength
        lg = np.exp(-(np.log(radius_safe / fo) ** 2) / (2.0 * np.log(SIGMA_ONF) ** 2))
        lg = lg * lp
        lg[0, 0] = 0.0
        log_gabor.append(lg)

    sin_t, cos_t = np.sin(theta), np.cos(theta)
    theta_sigma = np.pi / NORIENT / DTHETA_ON_SIGMA
    scale = np.sqrt(rows * cols)

    bank = []
    for o in range(NORIENT):
        angle = o * np.pi / NORIENT
        ds = sin_t * np.cos(angle) - cos_t * np.sin(angle)
        dc = cos_t * np.cos(angle) + sin_t * np.sin(angle)
        dtheta = np.abs(np.arctan2(ds, dc))
        spread = np.exp(-(dtheta**2) / (2.0 * theta_sigma**2))
        filters = []
        spatial = []
        for s in range(NSCALE):
            f = log_gabor[s] * spread
            f.setflags(write=False)
            filters.append(f)
            spatial.append(np.fft.ifft2(f).real * scale)
        em_n = float((filters[0] ** 2).sum())
        sum_an2 = float(sum((sp * sp).sum() for sp in spatial))
        sum_aiaj = 0.0
        for i in range(NSCALE - 1):
            for j in range(i + 1, NSCALE):
                sum_aiaj += float((spatial[i] * spatial[j]).sum())
        bank.append((tuple(filters), em_n, sum_an2, sum_aiaj))
    return tuple(bank)


def phase_congruency(y: np.ndarray) -> np.ndarray:
    """Phase congruency map of a 2-D image, values in [0, 1]."""
    rows, cols = y.shape
    bank = _filter_bank(rows, cols)
    im_fft = np.fft.fft2(y)

    energy_all = np.zeros_like(y, dtype=np.float64)
    an_all = np.zeros_like(y, dtype=np.float64)
    for filters, em_n, sum_an2, sum_aiaj in bank:
        eo = [np.fft.ifft2(im_fft * f) for f in filters]
        an = [np.abs(e) for e in eo]
        sum_an = an[0] + an[1] + an[2] + an[3]
        sum_e = sum(e.real for e in eo)
        sum_o = sum(e.imag for e in eo)
        x_energy = np.sqrt(sum_e * sum_e + sum_o * sum_o) + EPSILON
        mean_e = sum_e / x_energy
        mean_o = sum_o / x_energy
        energy = np.zeros_like(y, dtype=np.float64)
        for e in eo:
            energy += e.real * mean_e + e.imag * mean_o
            energy -= np.abs(e.real * mean_o - e.imag * mean_e)

        # Rayleigh-model noise threshold estimated from the smallest scale:
        # the median of the energy-squared response gives a robust mean.
        mean_e2n = np.median(an[0] ** 2) / np.log(2.0)
        noise_power = mean_e2n / em_n
        est_noise_energy2 = 2.0 * noise_power * sum_an2 + 4.0 * noise_power * sum_aiaj
        tau = np.sqrt(est_noise_energy2 / 2.0)
        est_noise_energy = tau * np.sqrt(np.pi / 2.0)
        est_noise_sigma = np.sqrt((2.0 - np.pi / 2.0) * tau**2)
        threshold = (est_noise_energy + NOISE_K * est_noise_sigma) / 1.7

        energy_all += np.maximum(energy - threshold, 0.0)
        an_all += sum_an
    # the amplitude sum is zero only where every filter response vanishes
    return energy_all / (an_all + 1e-12)
