"""PSNR, SSIM and a band-edge density score, plus the JSON quality report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .detect import DetectorParams, Label, detect
from .frames import LumaFrame

INFINITE = math.inf

SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_SIGMA = 1.5
SSIM_WIN = 11


def _check_pair(a: LumaFrame, b: LumaFrame):
    if a.shape != b.shape:
        raise ValueError(f"frame shapes differ: {a.shape} vs {b.shape}")


def psnr(a: LumaFrame, b: LumaFrame) -> float:
    """PSNR in dB on the 8-bit scale; ``math.inf`` for identical frames."""
    _check_pair(a, b)
    mse = np.mean((a.samples.astype(np.float64) - b.samples.astype(np.float64)) ** 2)
    if mse == 0:
        return INFINITE
    return 10.0 * math.log10(255.0 ** 2 / mse)


def _gaussian_window() -> np.ndarray:
    r = SSIM_WIN // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(x ** 2) / (2 * SSIM_SIGMA ** 2))
    return g / g.sum()


def _filter_valid(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    r = len(g) // 2
    y = ndimage.correlate1d(x, g, axis=0, mode="constant")
    y = ndimage.correlate1d(y, g, axis=1, mode="constant")
    return y[r:-r, r:-r]


def ssim_map(a: LumaFrame, b: LumaFrame) -> np.ndarray:
    _check_pair(a, b)
    if min(a.shape) < SSIM_WIN:
        raise ValueError(f"SSIM needs frames of at least {SSIM_WIN}x{SSIM_WIN}")
    x = a.samples.astype(np.float64)
    y = b.samples.astype(np.float64)
    g = _gaussian_window()
    c1 = (SSIM_K1 * 255) ** 2
    c2 = (SSIM_K2 * 255) ** 2
    mx, my = _filter_valid(x, g), _filter_valid(y, g)
    sxx = _filter_valid(x * x, g) - mx * mx
    syy = _filter_valid(y * y, g) - my * my
    sxy = _filter_valid(x * y, g) - mx * my
    num = (2 * mx * my + c1) * (2 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return num / den


def ssim(a: LumaFrame, b: LumaFrame) -> float:
    """Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), mean-pooled over valid positions."""
    return float(ssim_map(a, b).mean())


def band_edge_density(frame: LumaFrame, params: DetectorParams = DetectorParams()) -> float:
    """Detected band-edge pixels per megapixel."""
    labels = detect(frame, params).labels
    return 1e6 * labels.count(Label.BAND_EDGE) / (frame.width * frame.height)


_FIELDS = ("psnr_db", "ssim", "band_edge_density")


@dataclass
class QualityReport:
    frames: list[dict[str, float]] = field(default_factory=list)

    def add(self, psnr_db: float, ssim_value: float, density: float):
        self.frames.append({"psnr_db": psnr_db, "ssim": ssim_value, "band_edge_density": density})

    def _column(self, name: str) -> np.ndarray:
        return np.array([f[name] for f in self.frames], dtype=np.float64)

    @property
    def mean(self) -> dict[str, float]:
        if not self.frames:
            raise ValueError("report has no frames")
        return {k: _mean(self._column(k)) for k in _FIELDS}

    @property
    def std(self) -> dict[str, float]:
        if not self.frames:
            raise ValueError("report has no frames")
        return {k: _std(self._column(k)) for k in _FIELDS}

    def to_dict(self) -> dict:
        mean = self.mean
        doc = {k: _encode(mean[k]) for k in _FIELDS}
        doc["frames"] = [{k: _encode(f[k]) for k in _FIELDS} for f in self.frames]
        doc["mean"] = {k: _encode(v) for k, v in mean.items()}
        doc["std"] = {k: _encode(v) for k, v in self.std.items()}
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> QualityReport:
        rep = cls()
        for f in doc["frames"]:
            rep.add(*(_decode(f[k]) for k in _FIELDS))
        return rep


def _mean(col: np.ndarray) -> float:
    col = col[~np.isnan(col)]
    if not col.size:
        return math.nan
    if np.isinf(col).any():
        return INFINITE if np.isinf(col).all() else float(np.mean(col[np.isfinite(col)]))
    return float(col.mean())


def _std(col: np.ndarray) -> float:
    finite = col[np.isfinite(col)]
    return float(finite.std()) if finite.size else 0.0


# JSON has no infinity; identical frames are reported as the string "inf".
# SSIM is undefined (null) for frames smaller than its window.
def _encode(v: float):
    if math.isnan(v):
        return None
    return "inf" if math.isinf(v) else v


def _decode(v) -> float:
    if v is None:
        return math.nan
    return math.inf if v == "inf" else float(v)


def score_frames(reference: list[LumaFrame], test: list[LumaFrame],
                 params: DetectorParams = DetectorParams()) -> QualityReport:
    if len(reference) != len(test):
        raise ValueError(f"frame counts differ: {len(reference)} vs {len(test)}")
    if not reference:
        raise ValueError("no frames to score")
    rep = QualityReport()
    for a, b in zip(reference, test):
        s = ssim(a, b) if min(a.shape) >= SSIM_WIN else math.nan
        rep.add(psnr(a, b), s, band_edge_density(b, params))
    return rep
