import numpy as np
import pytest


def uniform_image(rng, h, w, planes=1):
    data = rng.uniform(0.0, 1.0, size=(planes, h, w))
    return np.ascontiguousarray(data)


def smooth_image(rng, h, w, planes=1):
    """Low-frequency content: random coarse grid blown up by repetition."""
    coarse = rng.uniform(0.2, 0.8, size=(planes, max(2, h // 8), max(2, w // 8)))
    up = np.repeat(np.repeat(coarse, 8, axis=1), 8, axis=2)[:, :h, :w]
    if up.shape[1] < h or up.shape[2] < w:
        up = np.pad(up, ((0, 0), (0, h - up.shape[1]), (0, w - up.shape[2])), mode="edge")
    return np.ascontiguousarray(up)


def pink_image(rng, n):
    """1/f-spectrum noise squeezed into [0.2, 0.8]; natural-image-like statistics."""
    fy = np.fft.fftfreq(n)[:, None]
    fx = np.fft.fftfreq(n)[None, :]
    f = np.sqrt(fy * fy + fx * fx)
    f[0, 0] = 1.0
    spectrum = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / f
    img = np.fft.ifft2(spectrum).real
    img -= img.min()
    img /= img.max()
    return 0.2 + 0.6 * img


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
