"""Noise fields and dithered requantization to 8 bits."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .frames import LumaFrame, PrecisionFrame
from .reconstruct import RadiusMap

_MASK64 = (1 << 64) - 1


class NoiseKind(enum.Enum):
    UNIFORM = "uniform"
    GAUSSIAN_BLURRED_UNIFORM = "gun"
    POWER_HALF = "power-half"
    PINK = "pink"


# Exponent of the power spectral density, PSD ~ f**-exponent.
_SPECTRAL_EXPONENT = {NoiseKind.POWER_HALF: 0.5, NoiseKind.PINK: 1.0}


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind = NoiseKind.GAUSSIAN_BLURRED_UNIFORM
    amplitude: float = 2.0
    blur_sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("amplitude must be > 0")
        if not self.blur_sigma > 0:
            raise ValueError("blur_sigma must be > 0")


@dataclass(frozen=True)
class Quantizer:
    """Round half away from zero, then clamp to the 8-bit range."""

    out_bit_depth: int = 8

    def __post_init__(self):
        if self.out_bit_depth != 8:
            raise ValueError("only 8-bit output is supported")

    @property
    def maxval(self) -> int:
        return (1 << self.out_bit_depth) - 1

    def __call__(self, values: np.ndarray) -> np.ndarray:
        rounded = np.sign(values) * np.floor(np.abs(values) + 0.5)
        return np.clip(rounded, 0, self.maxval).astype(np.uint8)


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; uint64 arithmetic wraps.
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def counter_uniform(seed: int, frame_index: int, width: int, height: int,
                    stream: int = 0) -> np.ndarray:
    """Uniform [0, 1) samples that depend only on (seed, frame, stream, x, y).

    Each value is a hash of its own coordinates, so any tiling or ordering
    of the computation produces the same field.
    """
    key = np.array([seed & _MASK64], dtype=np.uint64)
    key = _mix64(key ^ np.uint64(stream & _MASK64))
    key = _mix64(key ^ np.uint64(frame_index & _MASK64))
    ys = np.arange(height, dtype=np.uint64)[:, None] << np.uint64(32)
    xs = np.arange(width, dtype=np.uint64)[None, :]
    bits = _mix64(key ^ (ys | xs))
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def gaussian_kernel(sigma: float) -> np.ndarray:
    r = math.ceil(3 * sigma)
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _spectral_field(white: np.ndarray, exponent: float) -> np.ndarray:
    h, w = white.shape
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    f = np.hypot(fx, fy)
    f[0, 0] = 1.0
    spec = np.fft.fft2(white) * f ** (-exponent / 2)
    spec[0, 0] = 0.0
    return np.fft.ifft2(spec).real


def generate_noise(spec: NoiseSpec, width: int, height: int, frame_index: int = 0) -> PrecisionFrame:
    """Dither noise field for one frame.

    Uniform is i.i.d. on [-amplitude, amplitude]. The blurred variant is that
    field convolved with a Gaussian and rescaled back to its pre-blur
    standard deviation. The power-law kinds shape white Gaussian noise so its
    power spectrum falls as 1/f**0.5 or 1/f, then match the uniform
    family's standard deviation, amplitude / sqrt(3).
    """
    if width < 1 or height < 1:
        raise ValueError("noise dimensions must be >= 1")
    a = spec.amplitude
    if spec.kind in (NoiseKind.UNIFORM, NoiseKind.GAUSSIAN_BLURRED_UNIFORM):
        u = counter_uniform(spec.seed, frame_index, width, height)
        field = a * (2.0 * u - 1.0)
        if spec.kind is NoiseKind.GAUSSIAN_BLURRED_UNIFORM:
            target = field.std()
            k = gaussian_kernel(spec.blur_sigma)
            blurred = ndimage.convolve1d(field, k, axis=0, mode="nearest")
            blurred = ndimage.convolve1d(blurred, k, axis=1, mode="nearest")
            s = blurred.std()
            field = blurred * (target / s) if s > 0 else blurred
        return PrecisionFrame(field)

    # Box-Muller on two independent counter streams.
    u1 = counter_uniform(spec.seed, frame_index, width, height, stream=1)
    u2 = counter_uniform(spec.seed, frame_index, width, height, stream=2)
    white = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
    field = _spectral_field(white, _SPECTRAL_EXPONENT[spec.kind])
    s = field.std()
    if s > 0:
        field = field * (a / math.sqrt(3.0) / s)
    return PrecisionFrame(field)


def dither_quantize(recon: PrecisionFrame, noise: PrecisionFrame,
                    q: Quantizer = Quantizer()) -> LumaFrame:
    if recon.shape != noise.shape:
        raise ValueError("reconstruction and noise differ in shape")
    return LumaFrame(q(recon.samples + noise.samples), bit_depth=q.out_bit_depth)


def passthrough_compose(original: LumaFrame, debanded: LumaFrame, radii: RadiusMap) -> LumaFrame:
    """Take debanded values where a radius was assigned, the original elsewhere."""
    if not (original.shape == debanded.shape == radii.shape):
        raise ValueError("frames and radius map differ in shape")
    out = np.where(radii.filtered, debanded.samples, original.samples)
    return LumaFrame(out, bit_depth=original.bit_depth)
