"""Size-varying moving-average reconstruction of banded regions.

Each band gets a window length from its area relative to the edges that
frame it. The length is turned into a radius, halved until the window is
free of textured pixels, median-denoised within the band, and finally
used for a per-pixel box mean of the decoded frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .detect import Label, PixelLabelMap, RegionIndex
from .frames import PrecisionFrame, pad_replicate

NOT_FILTERED = 0


@dataclass(frozen=True)
class LpfParams:
    median_radius: int = 2

    def __post_init__(self):
        if self.median_radius < 0:
            raise ValueError("median_radius must be >= 0")


@dataclass(frozen=True, eq=False)
class RadiusMap:
    """Per-pixel window radius; ``NOT_FILTERED`` (0) marks untouched pixels."""

    radius: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.radius, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("radius map must be 2-D")
        if arr.size and arr.min() < 0:
            raise ValueError("radii must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "radius", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.radius.shape

    @property
    def filtered(self) -> np.ndarray:
        return self.radius != NOT_FILTERED

    def to_gray(self) -> np.ndarray:
        return np.minimum(self.radius, 255).astype(np.uint8)


def band_filter_length(regions: RegionIndex, band_id: int) -> Fraction | None:
    """Window length for a band, or ``None`` when no edge frames it.

    A band framed by a single edge uses four times its area-to-edge ratio;
    otherwise the largest ratio over its edges is used.
    """
    band = regions.band(band_id)
    edges = regions.adjacency.get(band_id, frozenset())
    if not edges:
        return None
    if len(edges) == 1:
        (k,) = edges
        return Fraction(4 * band.size, regions.edge(k).size)
    return max(Fraction(band.size, regions.edge(k).size) for k in edges)


def radius_from_length(length) -> int:
    if length < 0:
        raise ValueError("length must be non-negative")
    return max(1, math.floor((length - 1) / 2))


def _window_has_texture(tp: np.ndarray, r: int, c: int, h: int) -> bool:
    return bool(tp[max(r - h, 0):r + h + 1, max(c - h, 0):c + h + 1].any())


def shrink_to_avoid_texture(labels: PixelLabelMap, center: tuple[int, int], h: int) -> int:
    """Halve ``h`` until the square window around ``center`` holds no TP pixel.

    Returns ``NOT_FILTERED`` if even the 3x3 window touches texture.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    tp = labels.labels == Label.TP
    r, c = center
    while _window_has_texture(tp, r, c, h):
        if h == 1:
            return NOT_FILTERED
        h = max(1, h // 2)
    return h


def texture_distance(labels: PixelLabelMap) -> np.ndarray:
    """Chebyshev distance from each pixel to the nearest TP pixel.

    A radius-``h`` window is texture-free iff ``h < distance``.
    """
    tp = labels.labels == Label.TP
    if not tp.any():
        return np.full(tp.shape, np.iinfo(np.int64).max // 4, dtype=np.int64)
    return ndimage.distance_transform_cdt(~tp, metric="chessboard").astype(np.int64)


def _shrink_all(h0: np.ndarray, dist: np.ndarray) -> np.ndarray:
    h = h0.copy()
    active = (h > 0) & (dist <= h)
    while True:
        step = active & (h > 1)
        if not step.any():
            break
        h[step] = np.maximum(1, h[step] // 2)
        active = (h > 0) & (dist <= h)
    h[active] = NOT_FILTERED  # still touching texture at h == 1
    return h


def grouped_median(values: np.ndarray, groups: np.ndarray, radius: int) -> np.ndarray:
    """Median over a square neighbourhood restricted to pixels of the same group.

    Pixels with group 0 are neither changed nor used. Even counts take the
    lower middle element.
    """
    if radius == 0:
        return values.copy()
    h, w = values.shape
    k = 2 * radius + 1
    big = np.iinfo(np.int64).max
    pv = np.pad(values, radius)
    pg = np.pad(groups, radius)
    stack = np.empty((k * k, h, w), dtype=np.int64)
    i = 0
    for dr in range(k):
        for dc in range(k):
            same = (pg[dr:dr + h, dc:dc + w] == groups) & (groups > 0)
            stack[i] = np.where(same, pv[dr:dr + h, dc:dc + w], big)
            i += 1
    count = (stack != big).sum(axis=0)
    stack.sort(axis=0)
    mid = np.maximum(count - 1, 0) // 2
    med = np.take_along_axis(stack, mid[None], axis=0)[0]
    return np.where(groups > 0, med, values)


def build_radius_map(labels: PixelLabelMap, regions: RegionIndex,
                     params: LpfParams = LpfParams()) -> RadiusMap:
    """Per-pixel radius for band pixels and the band edges between them.

    Edge pixels take the smallest length among the filterable bands they
    touch, so the step itself is smoothed without overreaching either side.
    After the median, radii are clipped to stay clear of texture.
    """
    if labels.shape != regions.band_ids.shape:
        raise ValueError("label map and region index differ in shape")
    n_b = len(regions.bands)
    band_len: dict[int, Fraction] = {}
    band_h = np.zeros(n_b + 1, dtype=np.int64)
    for b in regions.bands:
        length = band_filter_length(regions, b.id)
        if length is not None:
            band_len[b.id] = length
            band_h[b.id] = radius_from_length(length)

    edge_h = np.zeros(len(regions.edges) + 1, dtype=np.int64)
    for e, bands in regions.edge_adjacency().items():
        lengths = [band_len[b] for b in bands if b in band_len]
        if lengths:
            edge_h[e] = radius_from_length(min(lengths))

    h0 = band_h[regions.band_ids] + edge_h[regions.edge_ids]
    dist = texture_distance(labels)
    h = _shrink_all(h0, dist)

    groups = np.where(regions.band_ids > 0, regions.band_ids, regions.edge_ids + n_b)
    groups = np.where((h > 0) & ((regions.band_ids > 0) | (regions.edge_ids > 0)), groups, 0)
    h = grouped_median(h, groups, params.median_radius)
    h = np.where(h > 0, np.minimum(h, dist - 1), h)
    return RadiusMap(h)


def apply_adaptive_lpf(frame: PrecisionFrame, radii: RadiusMap) -> PrecisionFrame:
    """Replace each filtered pixel with the mean of its (2h+1)^2 window.

    Windows read the input frame only, with replicate borders. Sums come
    from a summed-area table of the mean-centred frame.
    """
    if frame.shape != radii.shape:
        raise ValueError("frame and radius map differ in shape")
    src = frame.samples
    rad = radii.radius
    if not rad.any():
        return frame
    pad = int(rad.max())
    offset = float(src.mean())
    p = pad_replicate(src - offset, pad)
    sat = np.zeros((p.shape[0] + 1, p.shape[1] + 1))
    sat[1:, 1:] = p.cumsum(axis=0).cumsum(axis=1)

    rows, cols = np.nonzero(rad)
    hs = rad[rows, cols]
    r0 = rows + pad - hs
    r1 = rows + pad + hs + 1
    c0 = cols + pad - hs
    c1 = cols + pad + hs + 1
    total = sat[r1, c1] - sat[r0, c1] - sat[r1, c0] + sat[r0, c0]
    out = src.copy()
    out[rows, cols] = total / (2 * hs + 1) ** 2 + offset
    return PrecisionFrame(out)
