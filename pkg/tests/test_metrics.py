import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from skimage.metrics import structural_similarity

from adadeband.detect import DetectorParams, Label, detect
from adadeband.frames import LumaFrame
from adadeband.metrics import QualityReport, band_edge_density, psnr, score_frames, ssim
from adadeband.synth import SynthSpec, synth_banded


def frame(arr):
    return LumaFrame(np.asarray(arr))


def test_psnr_examples(rng):
    a = frame(rng.integers(1, 255, (16, 16)))
    assert psnr(a, a) == math.inf
    b = frame(a.samples.astype(int) + 1)
    assert psnr(a, b) == pytest.approx(48.1308, abs=1e-3)
    assert psnr(frame(np.zeros((4, 4))), frame(np.full((4, 4), 255))) == pytest.approx(0.0)


def test_psnr_dimension_mismatch():
    with pytest.raises(ValueError):
        psnr(frame(np.zeros((4, 4))), frame(np.zeros((4, 5))))


def test_ssim_identical(rng):
    a = frame(rng.integers(0, 256, (32, 32)))
    assert ssim(a, a) == pytest.approx(1.0)


def test_ssim_inverted_pattern(rng):
    a = rng.integers(0, 256, (64, 64))
    assert ssim(frame(a), frame(255 - a)) < 0.1


def test_ssim_constant_planes():
    c1 = (0.01 * 255) ** 2
    expect = (2 * 100 * 104 + c1) / (100 ** 2 + 104 ** 2 + c1)
    got = ssim(frame(np.full((20, 20), 100)), frame(np.full((20, 20), 104)))
    assert got == pytest.approx(expect, abs=1e-12)
    assert got == pytest.approx(0.99923, abs=1e-5)


def test_ssim_matches_skimage(rng):
    for _ in range(3):
        a = rng.integers(0, 256, (40, 50)).astype(np.uint8)
        b = np.clip(a + rng.normal(0, 20, a.shape), 0, 255).astype(np.uint8)
        ref = structural_similarity(a, b, gaussian_weights=True, sigma=1.5,
                                    use_sample_covariance=False, data_range=255)
        assert ssim(frame(a), frame(b)) == pytest.approx(ref, abs=1e-9)


def test_ssim_too_small():
    with pytest.raises(ValueError):
        ssim(frame(np.zeros((10, 20))), frame(np.zeros((10, 20))))


@settings(max_examples=25, deadline=None)
@given(arrays(np.uint8, (12, 14)), arrays(np.uint8, (12, 14)))
def test_metric_symmetry(a, b):
    fa, fb = frame(a), frame(b)
    assert psnr(fa, fb) == psnr(fb, fa)
    assert ssim(fa, fb) == pytest.approx(ssim(fb, fa), abs=1e-9)
    assert ssim(fa, fa) == pytest.approx(1.0, abs=1e-12)


def test_density_examples(rng):
    assert band_edge_density(frame(np.full((32, 32), 90))) == 0
    assert band_edge_density(frame(rng.integers(0, 256, (64, 64)))) == 0


def test_density_staircase_matches_detector():
    banded = synth_banded(SynthSpec(band_step=16))
    count = detect(banded).labels.count(Label.BAND_EDGE)
    # Fifteen level changes, each a one-pixel line down all 256 rows.
    assert count == 15 * 256
    assert band_edge_density(banded) == pytest.approx(1e6 * count / 256 ** 2)


@pytest.mark.parametrize("offset", [1, 17, 50])
def test_density_offset_invariant(offset):
    banded = synth_banded(SynthSpec(ramp_range=(60, 180), band_step=8)).samples.astype(int)
    assert band_edge_density(frame(banded + offset)) == band_edge_density(frame(banded))


def test_report_json_fields():
    rep = QualityReport()
    rep.add(math.inf, 1.0, 0.0)
    rep.add(40.0, 0.9, 10.0)
    doc = json.loads(rep.to_json())
    assert set(doc) == {"psnr_db", "ssim", "band_edge_density", "frames", "mean", "std"}
    assert doc["frames"][0]["psnr_db"] == "inf"
    assert doc["mean"]["ssim"] == pytest.approx(0.95)
    assert doc["std"]["band_edge_density"] == pytest.approx(5.0)
    again = QualityReport.from_dict(doc)
    assert again.frames == rep.frames


def test_report_needs_frames():
    with pytest.raises(ValueError):
        QualityReport().mean


def test_small_frames_report_null_ssim():
    a = frame(np.full((8, 8), 5))
    doc = score_frames([a, a], [a, a]).to_dict()
    assert doc["ssim"] is None and doc["frames"][1]["ssim"] is None
    assert doc["psnr_db"] == "inf"
    json.dumps(doc, allow_nan=False)


def test_score_frames_mismatch():
    a = frame(np.zeros((16, 16)))
    with pytest.raises(ValueError):
        score_frames([a, a], [a])
    rep = score_frames([a], [a], DetectorParams())
    assert rep.frames[0]["psnr_db"] == math.inf
