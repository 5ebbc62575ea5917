"""Synthetic banding: smooth test fields, coarse requantization, and step sweeps."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dither import Quantizer
from .frames import LumaFrame, PrecisionFrame
from .metrics import band_edge_density
from .pipeline import PipelineConfig, deband


class Pattern(enum.Enum):
    LINEAR_RAMP_H = "ramp-h"
    LINEAR_RAMP_V = "ramp-v"
    RADIAL_VIGNETTE = "vignette"
    CORNER_GRADIENT = "corner"


# Checker levels for the texture inset; block size 2 keeps it visible to a 3x3 Sobel.
CHECKER_LOW = 32
CHECKER_HIGH = 224
CHECKER_BLOCK = 2


@dataclass(frozen=True)
class SynthSpec:
    """A smooth test field plus the quantization step that bands it.

    ``texture_inset`` is ``(top, left, height, width)``.
    """

    width: int = 256
    height: int = 256
    pattern: Pattern = Pattern.LINEAR_RAMP_H
    ramp_range: tuple[float, float] = (0.0, 255.0)
    band_step: int = 16
    texture_inset: tuple[int, int, int, int] | None = None
    seed: int = 0

    def __post_init__(self):
        low, high = self.ramp_range
        if not 0 <= low < high <= 255:
            raise ValueError(f"need 0 <= low < high <= 255, got {self.ramp_range}")
        if self.band_step < 1:
            raise ValueError("band_step must be >= 1")
        if self.width < 1 or self.height < 1:
            raise ValueError("dimensions must be >= 1")
        if self.texture_inset is not None:
            top, left, h, w = self.texture_inset
            if h < 1 or w < 1 or top < 0 or left < 0 or top + h > self.height or left + w > self.width:
                raise ValueError(f"texture inset {self.texture_inset} outside the frame")


def _unit(n: int) -> np.ndarray:
    return np.arange(n) / (n - 1) if n > 1 else np.zeros(n)


def checker(height: int, width: int, seed: int = 0) -> np.ndarray:
    """2x2-block checker whose block levels are jittered by up to 16 levels."""
    rows = np.arange(height)[:, None] // CHECKER_BLOCK
    cols = np.arange(width)[None, :] // CHECKER_BLOCK
    base = np.where((rows + cols) % 2 == 0, CHECKER_LOW, CHECKER_HIGH)
    rng = np.random.default_rng(seed)
    jitter = rng.integers(-16, 17, size=(rows.max() + 1, cols.max() + 1))
    return (base + jitter[rows, cols]).astype(np.float64)


def synth_ideal(spec: SynthSpec) -> PrecisionFrame:
    low, high = spec.ramp_range
    span = high - low
    h, w = spec.height, spec.width
    if spec.pattern is Pattern.LINEAR_RAMP_H:
        v = np.broadcast_to(low + span * _unit(w)[None, :], (h, w))
    elif spec.pattern is Pattern.LINEAR_RAMP_V:
        v = np.broadcast_to(low + span * _unit(h)[:, None], (h, w))
    elif spec.pattern is Pattern.CORNER_GRADIENT:
        v = low + span * (_unit(h)[:, None] + _unit(w)[None, :]) / 2
    else:
        cy, cx = (h - 1) / 2, (w - 1) / 2
        r = np.hypot(np.arange(h)[:, None] - cy, np.arange(w)[None, :] - cx)
        rmax = math.hypot(cy, cx)
        v = high - span * (r / rmax if rmax > 0 else r)
    v = np.array(v, dtype=np.float64)
    if spec.texture_inset is not None:
        top, left, ih, iw = spec.texture_inset
        v[top:top + ih, left:left + iw] = checker(ih, iw, spec.seed)
    return PrecisionFrame(v)


def synth_banded(spec: SynthSpec) -> LumaFrame:
    """Quantize the ideal field with a mid-rise step of ``band_step`` levels.

    Step 1 is plain rounding to the 8-bit grid: the cell midpoint of a unit
    step is a half level, so the mid-rise form would bias every pixel up.
    """
    ideal = synth_ideal(spec).samples
    s = spec.band_step
    if s == 1:
        return LumaFrame(Quantizer()(ideal))
    levels = np.floor(ideal / s) * s + s / 2
    if spec.texture_inset is not None:
        top, left, ih, iw = spec.texture_inset
        levels[top:top + ih, left:left + iw] = ideal[top:top + ih, left:left + iw]
    return LumaFrame(Quantizer()(levels))


def psnr_vs_ideal(frame: LumaFrame, ideal: PrecisionFrame) -> float:
    mse = np.mean((frame.samples.astype(np.float64) - ideal.samples) ** 2)
    return math.inf if mse == 0 else 10.0 * math.log10(255.0 ** 2 / mse)


SWEEP_COLUMNS = ("band_step", "density_before", "density_after",
                 "psnr_vs_ideal_before", "psnr_vs_ideal_after")


@dataclass
class SweepResult:
    rows: list[dict[str, float]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row)
        return buf.getvalue()


def run_sweep(spec: SynthSpec, steps: list[int],
              config: PipelineConfig = PipelineConfig()) -> SweepResult:
    """Band the same ideal field at each step and deband with one fixed config."""
    if not steps:
        raise ValueError("steps must be non-empty")
    result = SweepResult()
    params = config.detector
    for step in steps:
        s = replace(spec, band_step=step)
        ideal = synth_ideal(s)
        banded = synth_banded(s)
        out = deband(banded, config)
        result.rows.append({
            "band_step": step,
            "density_before": band_edge_density(banded, params),
            "density_after": band_edge_density(out, params),
            "psnr_vs_ideal_before": psnr_vs_ideal(banded, ideal),
            "psnr_vs_ideal_after": psnr_vs_ideal(out, ideal),
        })
    return result
