import math

import numpy as np
import pytest

from sreval.imagecore import from_gray, from_rgb
from sreval.metrics import (
    METRIC_ORDER,
    MIN_SIDE,
    canonical_metric,
    evaluate_pair,
    fsim,
    gmsd,
    psnr,
    srsim,
    ssim,
    vif,
)

import oracles
from conftest import pink_image, uniform_image


def _noisy(rng, y, amount):
    return np.clip(y + rng.normal(0.0, amount, y.shape), 0.0, 1.0)


# --- closed forms and fixed points -----------------------------------------


def test_psnr_constant_offset():
    a = from_gray(np.full((8, 8), 0.5))
    b = from_gray(np.full((8, 8), 0.5) + 1.0 / 255.0)
    assert psnr(a, b).value == pytest.approx(20.0 * math.log10(255.0), abs=1e-9)


def test_psnr_identity_is_inf(rng):
    a = from_gray(uniform_image(rng, 8, 8)[0])
    assert psnr(a, a).value == math.inf


def test_ssim_constant_images():
    a = from_gray(np.full((16, 16), 0.5))
    b = from_gray(np.full((16, 16), 0.6))
    want = (2 * 0.5 * 0.6 + 1e-4) / (0.5**2 + 0.6**2 + 1e-4)
    assert ssim(a, b).value == pytest.approx(want, abs=1e-12)


def test_identity_fixed_points(rng):
    img = from_gray(pink_image(rng, 64))
    assert ssim(img, img).value == pytest.approx(1.0, abs=1e-9)
    assert gmsd(img, img).value == pytest.approx(0.0, abs=1e-12)
    assert fsim(img, img).value == pytest.approx(1.0, abs=1e-9)
    assert vif(img, img).value == pytest.approx(1.0, abs=1e-6)
    assert srsim(img, img).value == pytest.approx(1.0, abs=1e-9)


def test_constant_pair_guards():
    # Degenerate flat inputs must hit the defined fallbacks, not divide by zero.
    img = from_gray(np.full((48, 48), 0.5))
    assert fsim(img, img).value == 1.0
    assert srsim(img, img).value == 1.0
    assert vif(img, img).value == 1.0
    assert gmsd(img, img).value == 0.0


# --- symmetry ----------------------------------------------------------------


def test_symmetric_metrics(rng):
    a = from_gray(pink_image(rng, 48))
    b = from_gray(_noisy(rng, a.plane(0), 0.05))
    assert psnr(a, b).value == psnr(b, a).value
    assert ssim(a, b).value == pytest.approx(ssim(b, a).value, abs=1e-12)
    assert gmsd(a, b).value == pytest.approx(gmsd(b, a).value, abs=1e-12)
    assert fsim(a, b).value == pytest.approx(fsim(b, a).value, abs=1e-12)
    assert srsim(a, b).value == pytest.approx(srsim(b, a).value, abs=1e-12)


def test_vif_directionality_permitted(rng):
    # VIF is an information ratio relative to the reference; swapping the
    # arguments is allowed to change the value.
    a = from_gray(pink_image(rng, 48))
    b = from_gray(_noisy(rng, a.plane(0), 0.08))
    forward = vif(a, b).value
    backward = vif(b, a).value
    assert 0.0 < forward < 1.0
    assert forward != backward


# --- oracle spot checks (bulk equivalence lives in the acceptance suite) ----


def test_psnr_matches_oracle(rng):
    a, b = uniform_image(rng, 8, 8), uniform_image(rng, 8, 8)
    assert psnr(from_gray(a[0]), from_gray(b[0])).value == pytest.approx(
        oracles.psnr_oracle(a, b), abs=1e-9)


def test_psnr_rgb_plane_averaged(rng):
    a, b = uniform_image(rng, 8, 8, 3), uniform_image(rng, 8, 8, 3)
    assert psnr(from_rgb(a), from_rgb(b)).value == pytest.approx(
        oracles.psnr_oracle(a, b), abs=1e-9)


def test_ssim_matches_oracle(rng):
    a, b = pink_image(rng, 16), pink_image(rng, 16)
    assert ssim(from_gray(a), from_gray(b)).value == pytest.approx(
        oracles.ssim_oracle(a, b), abs=1e-6)


def test_gmsd_matches_oracle(rng):
    a = pink_image(rng, 24)
    b = _noisy(rng, a, 0.04)
    assert gmsd(from_gray(a), from_gray(b)).value == pytest.approx(
        oracles.gmsd_oracle(a, b), abs=1e-9)


def test_vif_matches_oracle(rng):
    a = pink_image(rng, 48)
    b = _noisy(rng, a, 0.05)
    assert vif(from_gray(a), from_gray(b)).value == pytest.approx(
        oracles.vif_oracle(a, b), abs=1e-8)


# --- degradation response ----------------------------------------------------


def test_noise_moves_every_metric_the_right_way(rng):
    y = pink_image(rng, 96)
    ref = from_gray(y)
    mild = from_gray(_noisy(rng, y, 0.02))
    harsh = from_gray(_noisy(rng, y, 0.10))
    assert psnr(ref, mild).value > psnr(ref, harsh).value
    assert ssim(ref, mild).value > ssim(ref, harsh).value
    assert fsim(ref, mild).value > fsim(ref, harsh).value
    assert srsim(ref, mild).value > srsim(ref, harsh).value
    assert vif(ref, mild).value > vif(ref, harsh).value
    assert gmsd(ref, mild).value < gmsd(ref, harsh).value


def test_blur_hurts_structural_metrics(rng):
    from scipy.ndimage import gaussian_filter

    y = pink_image(rng, 64)
    ref = from_gray(y)
    blurred = from_gray(gaussian_filter(y, 2.0, mode="nearest"))
    assert ssim(ref, blurred).value < 1.0
    assert gmsd(ref, blurred).value > 0.0
    assert fsim(ref, blurred).value < 1.0


# --- sizes and interface -----------------------------------------------------


@pytest.mark.parametrize("metric,side", sorted(MIN_SIDE.items()))
def test_minimum_side_enforced(rng, metric, side):
    if side <= 1:
        pytest.skip("no lower bound to violate")
    small = from_gray(uniform_image(rng, side - 1, side - 1)[0])
    ok = from_gray(uniform_image(rng, side, side)[0])
    with pytest.raises(ValueError):
        evaluate_pair(small, small, metrics=[metric])
    assert len(evaluate_pair(ok, ok, metrics=[metric])) == 1


def test_canonical_metric_aliases():
    assert canonical_metric("psnr") == "PSNR"
    assert canonical_metric("SR-SIM") == "SRSIM"
    assert canonical_metric("sr_sim") == "SRSIM"
    assert canonical_metric("srsim") == "SRSIM"
    with pytest.raises(ValueError):
        canonical_metric("lpips")  # not computable here, ingest-only


def test_evaluate_pair_identity_all_metrics(rng):
    img = from_rgb(np.stack([pink_image(rng, 48)] * 3))
    results = evaluate_pair(img, img)
    by_name = {r.metric: r.value for r in results}
    assert [r.metric for r in results] == list(METRIC_ORDER)
    assert by_name["PSNR"] == math.inf
    assert by_name["SSIM"] == pytest.approx(1.0, abs=1e-9)
    assert by_name["GMSD"] == pytest.approx(0.0, abs=1e-12)
    assert by_name["FSIM"] == pytest.approx(1.0, abs=1e-9)
    assert by_name["VIF"] == pytest.approx(1.0, abs=1e-6)
    assert by_name["SRSIM"] == pytest.approx(1.0, abs=1e-9)


def test_evaluate_pair_empty_metric_set(rng):
    img = from_gray(pink_image(rng, 48))
    assert evaluate_pair(img, img, metrics=[]) == []


def test_evaluate_pair_domains(rng):
    base = pink_image(rng, 48)
    noisy = _noisy(rng, base, 0.03)
    ref = from_rgb(np.stack([base] * 3))
    dist = from_rgb(np.stack([noisy] * 3))
    p_rgb = evaluate_pair(ref, dist, metrics=["PSNR"], domain="rgb")[0]
    p_y = evaluate_pair(ref, dist, metrics=["PSNR"], domain="y")[0]
    assert p_rgb.eval_domain == "RGB" and p_y.eval_domain == "Y"
    assert p_y.value - p_rgb.value == pytest.approx(
        20.0 * math.log10(255.0 / 219.0), abs=1e-6)
    # GMSD has no RGB mode: requesting domain rgb still computes on luma.
    g = evaluate_pair(ref, dist, metrics=["GMSD"], domain="rgb")[0]
    assert g.eval_domain == "Y"


def test_evaluate_pair_border_crop(rng):
    from sreval.imagecore import crop_border

    ref = from_gray(pink_image(rng, 64))
    dist = from_gray(_noisy(rng, ref.plane(0), 0.02))
    direct = evaluate_pair(crop_border(ref, 6), crop_border(dist, 6),
                           metrics=["SSIM"])[0].value
    via_flag = evaluate_pair(ref, dist, metrics=["SSIM"], border=6)[0].value
    assert via_flag == direct


def test_evaluate_pair_shape_mismatch(rng):
    a = from_gray(uniform_image(rng, 48, 48)[0])
    b = from_gray(uniform_image(rng, 48, 50)[0])
    with pytest.raises(ValueError):
        evaluate_pair(a, b)


def test_unknown_metric_rejected(rng):
    img = from_gray(uniform_image(rng, 48, 48)[0])
    with pytest.raises(ValueError):
        evaluate_pair(img, img, metrics=["BRISQUE"])
