"""Arbitrary-scale bicubic resizing and the seeded LR/HR degradation pipeline.

The resizer is the Keys cubic (a = -0.5) with half-pixel-centered coordinate
mapping, clamp-to-edge boundaries, and kernel stretching for antialiased
downscaling — the convention the SR literature's standard resizer uses.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imagecore import PlanarImage, load_image, save_image

KERNEL_A = -0.5
KERNEL_SUPPORT = 2.0

MANIFEST_HEADER = [
    "source", "rep", "scale", "crop_x", "crop_y",
    "flip_h", "flip_v", "transpose", "lr_path", "hr_path",
]


def cubic_kernel(x):
    """Keys piecewise-cubic interpolation kernel with a = -0.5."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    a = KERNEL_A
    near = (a + 2.0) * x**3 - (a + 3.0) * x**2 + 1.0
    far = a * x**3 - 5.0 * a * x**2 + 8.0 * a * x - 4.0 * a
    out = np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))
    return out


def _axis_weights(n_in: int, n_out: int, antialias: bool) -> np.ndarray:
    """Dense (n_out, n_in) weight matrix for one axis.

    Each output row holds clamped-to-edge, sum-normalized kernel taps around
    the half-pixel-centered source position u = (j + 0.5) * n_in/n_out - 0.5.
    When downscaling with antialias the kernel is stretched by the inverse
    scale so its footprint covers 4/scale source pixels.
    """
    scale = n_out / n_in
    kscale = scale if (antialias and scale < 1.0) else 1.0
    support = KERNEL_SUPPORT / kscale
    j = np.arange(n_out, dtype=np.float64)
    u = (j + 0.5) / scale - 0.5
    left = np.floor(u - support) + 1.0
    ntaps = int(np.ceil(2.0 * support)) + 1
    taps = left[:, np.newaxis] + np.arange(ntaps)[np.newaxis, :]
    weights = cubic_kernel((u[:, np.newaxis] - taps) * kscale)
    weights /= weights.sum(axis=1, keepdims=True)
    # clamp-to-edge: fold out-of-range taps onto the nearest valid pixel
    idx = np.clip(taps.astype(np.int64), 0, n_in - 1)
    matrix = np.zeros((n_out, n_in))
    for row in range(n_out):
        np.add.at(matrix[row], idx[row], weights[row])
    return matrix


def bicubic_resize(img: PlanarImage, out_w: int, out_h: int, antialias: bool = True) -> PlanarImage:
    """Separable Keys-cubic resampling; identity dims return the input bit-exactly."""
    if out_w < 1 or out_h < 1:
        raise ValueError(f"output dimensions must be >= 1, got {out_w}x{out_h}")
    if out_w == img.width and out_h == img.height:
        return img
    wy = _axis_weights(img.height, out_h, antialias)
    wx = _axis_weights(img.width, out_w, antialias)
    planes = [wy @ img.plane(p) @ wx.T for p in range(img.nplanes)]
    out = np.clip(np.stack(planes), 0.0, 1.0)
    return PlanarImage(out, img.domain)


def augment(img: PlanarImage, flip_h: bool, flip_v: bool, transpose: bool) -> PlanarImage:
    """Exact sample permutation: horizontal/vertical flips, then transpose."""
    data = img.data
    if flip_h:
        data = data[:, :, ::-1]
    if flip_v:
        data = data[:, ::-1, :]
    if transpose:
        data = np.swapaxes(data, 1, 2)
    return PlanarImage(data.copy(), img.domain)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class PatchSpec:
    """LR patch size, per-image repetition count, and which flips are allowed."""

    patch_size: int = 48
    repetitions: int = 40
    flips: tuple[bool, bool, bool] = (True, True, True)  # horizontal, vertical, transpose

    def __post_init__(self):
        if self.patch_size < 1:
            raise ValueError("patch_size must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


@dataclass(frozen=True)
class ScaleSampler:
    """Uniform scale draws on [lo, hi] with per-image Philox substreams.

    stream(i) derives an independent generator from (seed, i), so a corpus
    run can process images in any order or in parallel and still produce
    identical draws.
    """

    lo: float = 1.0
    hi: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if not (1.0 <= self.lo <= self.hi):
            raise ValueError(f"need 1 <= lo <= hi, got [{self.lo}, {self.hi}]")

    def stream(self, image_index: int) -> np.random.Generator:
        key = np.array([self.seed, image_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def draw_scale(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.lo, self.hi))


def make_lr_hr_pair(hr: PlanarImage, spec: PatchSpec, scale: float, rng: np.random.Generator):
    """Crop a random HR patch of side round(patch_size*scale) and downscale it.

    Draw order from ``rng``: crop_x, then crop_y. Returns
    (lr, hr_patch, crop_x, crop_y).
    """
    side = _round_half_up(spec.patch_size * scale)
    if hr.width < side or hr.height < side:
        raise ValueError(
            f"image {hr.width}x{hr.height} too small for patch {spec.patch_size} "
            f"at scale {scale:g} (needs {side})"
        )
    crop_x = int(rng.integers(0, hr.width - side, endpoint=True))
    crop_y = int(rng.integers(0, hr.height - side, endpoint=True))
    hr_patch = PlanarImage(hr.data[:, crop_y:crop_y + side, crop_x:crop_x + side], hr.domain)
    lr = bicubic_resize(hr_patch, spec.patch_size, spec.patch_size, antialias=True)
    return lr, hr_patch, crop_x, crop_y


@dataclass(frozen=True)
class ManifestRow:
    source: str
    rep: int
    scale: float
    crop_x: int
    crop_y: int
    flip_h: bool
    flip_v: bool
    transpose: bool
    lr_path: str
    hr_path: str

    def as_csv(self) -> list[str]:
        return [
            self.source, str(self.rep), f"{self.scale:.6f}",
            str(self.crop_x), str(self.crop_y),
            str(int(self.flip_h)), str(int(self.flip_v)), str(int(self.transpose)),
            self.lr_path, self.hr_path,
        ]


def _degrade_one(index: int, path: Path, spec: PatchSpec, sampler: ScaleSampler, out_dir: Path):
    """Generate all repetitions for one source image.

    Per repetition the substream is consumed in a fixed, documented order:
    scale, crop_x, crop_y, flip_h, flip_v, transpose.
    """
    rows, errors = [], []
    try:
        hr = load_image(path)
    except Exception as exc:
        return rows, [(str(path), f"{exc}")]
    rng = sampler.stream(index)
    for rep in range(spec.repetitions):
        scale = sampler.draw_scale(rng)
        try:
            lr, hr_patch, crop_x, crop_y = make_lr_hr_pair(hr, spec, scale, rng)
        except ValueError as exc:
            # a failed rep is a pure function of the drawn scale, so later
            # reps remain deterministic without any filler draws
            errors.append((str(path), f"rep {rep}: {exc}"))
            continue
        allow_h, allow_v, allow_t = spec.flips
        flip_h = bool(rng.integers(0, 2)) and allow_h
        flip_v = bool(rng.integers(0, 2)) and allow_v
        transpose = bool(rng.integers(0, 2)) and allow_t
        lr = augment(lr, flip_h, flip_v, transpose)
        hr_patch = augment(hr_patch, flip_h, flip_v, transpose)
        stem = path.stem
        lr_rel = f"lr/{stem}_r{rep:03d}.png"
        hr_rel = f"hr/{stem}_r{rep:03d}.png"
        save_image(lr, out_dir / lr_rel)
        save_image(hr_patch, out_dir / hr_rel)
        rows.append(ManifestRow(
            source=path.name, rep=rep, scale=scale, crop_x=crop_x, crop_y=crop_y,
            flip_h=flip_h, flip_v=flip_v, transpose=transpose,
            lr_path=lr_rel, hr_path=hr_rel,
        ))
    return rows, errors


def degrade_corpus(hr_dir, spec: PatchSpec, sampler: ScaleSampler, out_dir, workers: int = 1):
    """Produce repetitions x |images| LR/HR pairs plus a manifest.

    Fully reproducible from (seed, spec): per-image Philox substreams make the
    output independent of worker scheduling. Returns (rows, errors); the
    manifest is written to out_dir/manifest.csv.
    """
    hr_dir = Path(hr_dir)
    out_dir = Path(out_dir)
    sources = sorted(p for p in hr_dir.iterdir()
                     if p.suffix.lower() in {".png", ".ppm", ".pgm"})
    if not sources:
        raise FileNotFoundError(f"no loadable images in {hr_dir}")
    (out_dir / "lr").mkdir(parents=True, exist_ok=True)
    (out_dir / "hr").mkdir(parents=True, exist_ok=True)

    results = [None] * len(sources)
    if workers <= 1:
        for i, path in enumerate(sources):
            results[i] = _degrade_one(i, path, spec, sampler, out_dir)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_degrade_one, i, p, spec, sampler, out_dir): i
                       for i, p in enumerate(sources)}
            for fut, i in futures.items():
                results[i] = fut.result()

    rows, errors = [], []
    for r, e in results:
        rows.extend(r)
        errors.extend(e)

    with open(out_dir / "manifest.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for row in rows:
            writer.writerow(row.as_csv())
    return rows, errors
