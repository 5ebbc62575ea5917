import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adadeband.dither import Quantizer
from adadeband.pipeline import PipelineConfig, deband
from adadeband.synth import (SWEEP_COLUMNS, Pattern, SynthSpec, psnr_vs_ideal, run_sweep,
                             synth_banded, synth_ideal)


@pytest.mark.parametrize("kw", [
    dict(ramp_range=(10, 10)), dict(ramp_range=(-1, 50)), dict(ramp_range=(0, 256)),
    dict(band_step=0), dict(width=0), dict(texture_inset=(250, 0, 64, 64)),
])
def test_spec_invariants(kw):
    with pytest.raises(ValueError):
        SynthSpec(**kw)


def test_ramp_endpoints():
    v = synth_ideal(SynthSpec()).samples
    assert v[0, 0] == 0.0 and v[0, 255] == 255.0
    assert np.allclose(v, v[0])
    vv = synth_ideal(SynthSpec(pattern=Pattern.LINEAR_RAMP_V, ramp_range=(20, 40))).samples
    assert vv[0, 7] == 20.0 and vv[255, 7] == 40.0


def test_vignette_and_corner():
    v = synth_ideal(SynthSpec(width=65, height=33, pattern=Pattern.RADIAL_VIGNETTE,
                              ramp_range=(30, 200))).samples
    assert v[16, 32] == pytest.approx(200.0)
    for corner in (v[0, 0], v[0, -1], v[-1, 0], v[-1, -1]):
        assert corner == pytest.approx(30.0)
    c = synth_ideal(SynthSpec(pattern=Pattern.CORNER_GRADIENT, ramp_range=(5, 250))).samples
    assert c[0, 0] == 5.0 and c[-1, -1] == 250.0


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(list(Pattern)), st.integers(0, 200), st.integers(1, 55),
       st.integers(4, 40), st.integers(4, 40))
def test_step_one_is_rounded_ideal(pattern, low, span, w, h):
    spec = SynthSpec(width=w, height=h, pattern=pattern, ramp_range=(low, low + span), band_step=1)
    assert np.array_equal(synth_banded(spec).samples, Quantizer()(synth_ideal(spec).samples))


def test_step16_has_sixteen_levels():
    out = synth_banded(SynthSpec(band_step=16)).samples
    levels = np.unique(out)
    assert len(levels) == 16
    assert levels.tolist() == [8 + 16 * k for k in range(16)]


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 64), st.integers(0, 100), st.integers(1, 155))
def test_banded_matches_quantizer_oracle(step, low, span):
    spec = SynthSpec(width=64, height=4, ramp_range=(low, low + span), band_step=step)
    ideal = synth_ideal(spec).samples
    expect = np.clip(np.floor(np.floor(ideal / step) * step + step / 2 + 0.5), 0, 255)
    assert np.array_equal(synth_banded(spec).samples, expect)


def test_constant_range_gives_constant_output():
    # The narrowest legal range still bands into a single level.
    out = synth_banded(SynthSpec(ramp_range=(100, 101), band_step=16)).samples
    assert len(np.unique(out)) == 1


def test_inset_is_checker_and_unbanded():
    spec = SynthSpec(texture_inset=(96, 96, 64, 64), seed=3)
    ideal = synth_ideal(spec).samples
    banded = synth_banded(spec).samples
    patch = banded[96:160, 96:160]
    assert np.array_equal(patch, ideal[96:160, 96:160])
    assert len(np.unique(patch)) > 8


def test_inset_survives_debanding():
    spec = SynthSpec(texture_inset=(96, 96, 64, 64))
    banded = synth_banded(spec)
    out = deband(banded)
    assert np.array_equal(out.samples[96:160, 96:160], banded.samples[96:160, 96:160])


def test_psnr_vs_ideal():
    spec = SynthSpec(band_step=1)
    assert psnr_vs_ideal(synth_banded(spec), synth_ideal(spec)) == math.inf


def test_sweep_shape_and_csv():
    res = run_sweep(SynthSpec(width=96, height=64), [4, 8, 16, 32])
    assert [r["band_step"] for r in res.rows] == [4, 8, 16, 32]
    rows = list(csv.DictReader(io.StringIO(res.to_csv())))
    assert tuple(rows[0]) == SWEEP_COLUMNS and len(rows) == 4
    with pytest.raises(ValueError):
        run_sweep(SynthSpec(), [])


def test_sweep_step_one_never_adds_edges():
    row = run_sweep(SynthSpec(ramp_range=(40, 90)), [1]).rows[0]
    assert row["density_after"] <= row["density_before"]


@pytest.mark.parametrize("pattern", [Pattern.LINEAR_RAMP_H, Pattern.LINEAR_RAMP_V,
                                     Pattern.CORNER_GRADIENT])
def test_psnr_improves_for_coarse_steps(pattern):
    res = run_sweep(SynthSpec(pattern=pattern), [8, 16, 32], PipelineConfig())
    for r in res.rows:
        assert r["psnr_vs_ideal_after"] >= r["psnr_vs_ideal_before"]
