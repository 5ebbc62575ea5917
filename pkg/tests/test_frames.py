import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from adadeband.dither import Quantizer, dither_quantize
from adadeband.frames import (BorderPolicy, LumaFrame, PrecisionFrame, promote,
                              sample_with_border)


def test_border_examples():
    assert sample_with_border(LumaFrame(np.full((3, 3), 7)), -1, -1) == 7
    f = LumaFrame(np.array([[1, 2], [3, 4]]))
    assert sample_with_border(f, 0, 5) == 2
    assert sample_with_border(f, 1, 1) == 4
    assert sample_with_border(f, 9, -9, BorderPolicy.REPLICATE) == 3


def test_border_matches_indexing_in_bounds(rng):
    arr = rng.integers(0, 256, size=(5, 7))
    f = LumaFrame(arr)
    for i in range(5):
        for j in range(7):
            assert sample_with_border(f, i, j) == arr[i, j]


def test_promote_examples():
    assert np.array_equal(promote(LumaFrame(np.zeros((4, 4)))).samples, np.zeros((4, 4)))
    p = promote(LumaFrame(np.array([[255, 128]])))
    assert p.samples.dtype == np.float64
    assert p.samples.tolist() == [[255.0, 128.0]]


@pytest.mark.parametrize("bad", [
    np.array([[256]]),
    np.array([[-1]]),
    np.zeros((0, 3)),
    np.zeros(5),
    np.array([[1.5]]),
])
def test_luma_frame_rejects(bad):
    with pytest.raises(ValueError):
        LumaFrame(bad)


def test_luma_frame_16bit():
    f = LumaFrame(np.array([[65535, 0]]), bit_depth=16)
    assert f.samples.dtype == np.uint16
    with pytest.raises(ValueError):
        LumaFrame(np.array([[1]]), bit_depth=10)


def test_precision_frame_rejects_nonfinite():
    with pytest.raises(ValueError):
        PrecisionFrame(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        PrecisionFrame(np.array([[np.inf, 0.0]]))


def test_frames_are_immutable():
    f = LumaFrame(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        f.samples[0, 0] = 1


@settings(max_examples=50, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12))))
def test_promote_quantize_round_trip(arr):
    f = LumaFrame(arr)
    p = promote(f)
    out = dither_quantize(p, PrecisionFrame(np.zeros(p.shape)), Quantizer())
    assert out == f
