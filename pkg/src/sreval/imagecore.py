"""Planar image type, 8-bit file I/O, and BT.601 color handling.

Images are kept as double-precision planes normalized to [0,1]. All
operations are pure: they return new images and never mutate inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

RGB = "RGB"
YCBCR = "YCbCr"
LUMA = "Luma"
_DOMAINS = frozenset({RGB, YCBCR, LUMA})

# ITU-R BT.601 studio-swing analysis matrix, expressed for samples in [0,1].
# Rows produce Y', Cb, Cr (also in [0,1]) as  M @ rgb + offset.
_BT601_MATRIX = np.array(
    [
        [65.481, 128.553, 24.966],
        [-37.797, -74.203, 112.0],
        [112.0, -93.786, -18.214],
    ]
) / 255.0
_BT601_OFFSET = np.array([16.0, 128.0, 128.0]) / 255.0
_BT601_INVERSE = np.linalg.inv(_BT601_MATRIX)


class ImageFormatError(ValueError):
    """Raised when a file is not an 8-bit RGB/grayscale raster."""


@dataclass(frozen=True)
class PlanarImage:
    """A plane-major raster: ``data`` has shape (planes, height, width).

    Every sample is finite and lies in [0,1]. Single-plane images are
    always tagged Luma.
    """

    data: np.ndarray
    domain: str = RGB

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[np.newaxis, :, :]
        if arr.ndim != 3:
            raise ValueError(f"expected 2-D or 3-D sample array, got ndim={arr.ndim}")
        if arr.shape[0] not in (1, 3):
            raise ValueError(f"plane count must be 1 or 3, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("samples must lie in [0,1]")
        if self.domain not in _DOMAINS:
            raise ValueError(f"unknown domain tag {self.domain!r}")
        domain = LUMA if arr.shape[0] == 1 else self.domain
        if arr.shape[0] == 3 and domain == LUMA:
            raise ValueError("3-plane image cannot be tagged Luma")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "domain", domain)

    @property
    def nplanes(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def plane(self, i: int) -> np.ndarray:
        return self.data[i]


def from_gray(arr: np.ndarray) -> PlanarImage:
    """Wrap a 2-D array in [0,1] as a Luma image."""
    return PlanarImage(np.asarray(arr, dtype=np.float64), LUMA)


def from_rgb(arr: np.ndarray) -> PlanarImage:
    """Wrap an (3,h,w) or (h,w,3) array in [0,1] as an RGB image."""
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[-1] == 3 and arr.shape[0] != 3:
        arr = np.moveaxis(arr, -1, 0)
    return PlanarImage(arr, RGB)


def load_image(path) -> PlanarImage:
    """Load an 8-bit RGB or grayscale PNG/PPM/PGM as samples raw/255."""
    path = Path(path)
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode == "L":
                raw = np.asarray(im, dtype=np.uint8)
                return PlanarImage(raw[np.newaxis].astype(np.float64) / 255.0, LUMA)
            if mode == "RGB":
                raw = np.asarray(im, dtype=np.uint8)
                planes = np.moveaxis(raw.astype(np.float64) / 255.0, -1, 0)
                return PlanarImage(planes, RGB)
            raise ImageFormatError(
                f"{path.name}: unsupported mode {mode!r} "
                "(need 8-bit RGB or grayscale, no alpha/palette/16-bit)"
            )
    except ImageFormatError:
        raise
    except FileNotFoundError:
        raise
    except Exception as exc:  # Pillow raises a zoo of decode errors
        raise ImageFormatError(f"{path}: cannot decode ({exc})") from exc


def save_image(img: PlanarImage, path) -> None:
    """Write an image as 8 bits per sample: byte = round-half-up(v*255)."""
    path = Path(path)
    raw = np.floor(img.data * 255.0 + 0.5)
    raw = np.clip(raw, 0, 255).astype(np.uint8)
    if img.nplanes == 1:
        pil = Image.fromarray(raw[0], mode="L")
    else:
        pil = Image.fromarray(np.moveaxis(raw, 0, -1), mode="RGB")
    pil.save(path)


def _y_plane(rgb_data: np.ndarray) -> np.ndarray:
    """Shared BT.601 Y' computation so rgb_to_ycbcr and extract_luma agree bit-for-bit."""
    r, g, b = rgb_data
    y = _BT601_MATRIX[0, 0] * r + _BT601_MATRIX[0, 1] * g + _BT601_MATRIX[0, 2] * b
    return y + _BT601_OFFSET[0]


def rgb_to_ycbcr(img: PlanarImage) -> PlanarImage:
    """Convert RGB to BT.601 studio-swing YCbCr, all channels in [0,1]."""
    if img.domain != RGB or img.nplanes != 3:
        raise ValueError(f"rgb_to_ycbcr needs a 3-plane RGB image, got {img.domain}")
    r, g, b = img.data
    y = _y_plane(img.data)
    cb = _BT601_MATRIX[1, 0] * r + _BT601_MATRIX[1, 1] * g + _BT601_MATRIX[1, 2] * b + _BT601_OFFSET[1]
    cr = _BT601_MATRIX[2, 0] * r + _BT601_MATRIX[2, 1] * g + _BT601_MATRIX[2, 2] * b + _BT601_OFFSET[2]
    out = np.clip(np.stack([y, cb, cr]), 0.0, 1.0)
    return PlanarImage(out, YCBCR)


def ycbcr_to_rgb(img: PlanarImage) -> PlanarImage:
    """Inverse BT.601 conversion; in-gamut pixels round-trip within 1e-6."""
    if img.domain != YCBCR or img.nplanes != 3:
        raise ValueError(f"ycbcr_to_rgb needs a 3-plane YCbCr image, got {img.domain}")
    flat = img.data.reshape(3, -1) - _BT601_OFFSET[:, np.newaxis]
    rgb = _BT601_INVERSE @ flat
    rgb = np.clip(rgb.reshape(img.data.shape), 0.0, 1.0)
    return PlanarImage(rgb, RGB)


def extract_luma(img: PlanarImage) -> PlanarImage:
    """Return the 1-plane luminance image (BT.601 Y' for RGB input)."""
    if img.nplanes == 1:
        return img
    if img.domain == YCBCR:
        return PlanarImage(img.data[0:1], LUMA)
    y = np.clip(_y_plane(img.data), 0.0, 1.0)
    return PlanarImage(y[np.newaxis], LUMA)


def crop_border(img: PlanarImage, border: int) -> PlanarImage:
    """Drop ``border`` pixels from every side."""
    if border < 0:
        raise ValueError("border must be >= 0")
    if border == 0:
        return img
    if 2 * border >= min(img.width, img.height):
        raise ValueError(
            f"border {border} too large for {img.width}x{img.height} image"
        )
    return PlanarImage(img.data[:, border:-border, border:-border], img.domain)
