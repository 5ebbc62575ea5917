"""Banding region detection.

Pipeline: edge-gated box pre-filter -> normalized Sobel magnitude ->
flat / candidate / textured classification -> non-maximum suppression of
candidate pixels into 1-pixel band edges -> connected bands (4-connected)
and edges (8-connected) with their adjacency.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .frames import LumaFrame, PrecisionFrame, pad_replicate


class Label(enum.IntEnum):
    FP = 0
    CBP = 1
    BAND_EDGE = 2
    TP = 3


# Gray levels used when a label map is dumped as PGM.
LABEL_PALETTE = {Label.FP: 0, Label.CBP: 96, Label.BAND_EDGE: 192, Label.TP: 255}

_EIGHT = np.ones((3, 3), dtype=bool)
_FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class DetectorParams:
    """Thresholds and pre-filter settings for the band detector.

    ``t1``/``t2`` are on the 0-255 scale in luma levels per pixel (the
    Sobel response is normalized so a unit ramp has magnitude 1).
    ``prefilter_max_range`` gates the box filter: a pixel is smoothed only
    when its window's max-min range is at most this value. ``None`` smooths
    everywhere. Edge fragments shorter than ``min_edge_length`` revert to
    candidates, and non-textured components smaller than ``min_band_area``
    are not treated as bands (isolated low-gradient specks inside texture).
    """

    t1: float = 2.0
    t2: float = 12.0
    prefilter_radius: int = 1
    prefilter_passes: int = 2
    prefilter_max_range: float | None = 6.0
    min_edge_length: int = 8
    min_band_area: int = 32

    def __post_init__(self):
        if not 0 < self.t1 < self.t2:
            raise ValueError(f"need 0 < t1 < t2, got t1={self.t1}, t2={self.t2}")
        if self.prefilter_radius < 1 or self.prefilter_passes < 1:
            raise ValueError("prefilter radius and passes must be >= 1")
        if self.prefilter_max_range is not None and self.prefilter_max_range < 0:
            raise ValueError("prefilter_max_range must be non-negative")
        if self.min_edge_length < 1 or self.min_band_area < 1:
            raise ValueError("min_edge_length and min_band_area must be >= 1")


@dataclass(frozen=True, eq=False)
class PixelLabelMap:
    labels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("label map must be 2-D")
        if arr.size and arr.max() > max(Label):
            raise ValueError("unknown label value")
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def mask(self, *kinds: Label) -> np.ndarray:
        return np.isin(self.labels, [int(k) for k in kinds])

    def count(self, kind: Label) -> int:
        return int(np.count_nonzero(self.labels == kind))

    def to_gray(self) -> np.ndarray:
        lut = np.zeros(256, dtype=np.uint8)
        for k, v in LABEL_PALETTE.items():
            lut[int(k)] = v
        return lut[self.labels]


@dataclass(frozen=True, eq=False)
class Region:
    id: int
    pixels: np.ndarray  # (N, 2) array of (row, col), raster order

    @property
    def size(self) -> int:
        return len(self.pixels)


@dataclass(frozen=True, eq=False)
class RegionIndex:
    """Bands, band edges and which edges frame which band.

    ``band_ids``/``edge_ids`` are per-pixel component ids (0 = none). Ids
    start at 1 and follow raster-scan discovery order.
    """

    band_ids: np.ndarray
    edge_ids: np.ndarray
    bands: list[Region]
    edges: list[Region]
    adjacency: dict[int, frozenset[int]] = field(default_factory=dict)

    def band(self, band_id: int) -> Region:
        return self.bands[band_id - 1]

    def edge(self, edge_id: int) -> Region:
        return self.edges[edge_id - 1]

    def edge_adjacency(self) -> dict[int, frozenset[int]]:
        """Edge id -> ids of the bands it touches."""
        out: dict[int, set[int]] = {e.id: set() for e in self.edges}
        for b, es in self.adjacency.items():
            for e in es:
                out[e].add(b)
        return {k: frozenset(v) for k, v in out.items()}


def prefilter(frame: LumaFrame, params: DetectorParams = DetectorParams()) -> PrecisionFrame:
    """Smooth near-flat areas with a box filter, leaving steeper structure alone."""
    r = params.prefilter_radius
    cur = frame.samples.astype(np.float64)
    k = 2 * r + 1
    for _ in range(params.prefilter_passes):
        smoothed = _box_mean(cur, r)
        if params.prefilter_max_range is None:
            cur = smoothed
            continue
        lo = ndimage.minimum_filter(cur, size=k, mode="nearest")
        hi = ndimage.maximum_filter(cur, size=k, mode="nearest")
        cur = np.where(hi - lo <= params.prefilter_max_range, smoothed, cur)
    return PrecisionFrame(cur)


def _box_mean(arr: np.ndarray, r: int) -> np.ndarray:
    k = 2 * r + 1
    p = pad_replicate(arr, r)
    # Separable running sums over the padded plane.
    c = np.cumsum(np.pad(p, ((0, 0), (1, 0))), axis=1)
    rows = c[:, k:] - c[:, :-k]
    c = np.cumsum(np.pad(rows, ((1, 0), (0, 0))), axis=0)
    return (c[k:, :] - c[:-k, :]) / (k * k)


def sobel_components(frame: PrecisionFrame) -> tuple[np.ndarray, np.ndarray]:
    """Return (d/dcol, d/drow), each normalized by 1/8."""
    p = pad_replicate(frame.samples, 1)
    h, w = frame.shape
    s = lambda dr, dc: p[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
    gx = (s(-1, 1) + 2 * s(0, 1) + s(1, 1) - s(-1, -1) - 2 * s(0, -1) - s(1, -1)) / 8.0
    gy = (s(1, -1) + 2 * s(1, 0) + s(1, 1) - s(-1, -1) - 2 * s(-1, 0) - s(-1, 1)) / 8.0
    return gx, gy


@dataclass(frozen=True, eq=False)
class Gradient:
    gx: np.ndarray
    gy: np.ndarray

    @property
    def magnitude(self) -> PrecisionFrame:
        return PrecisionFrame(np.hypot(self.gx, self.gy))

    @property
    def direction(self) -> np.ndarray:
        return quantize_direction(self.gx, self.gy)


def sobel_gradient(frame: PrecisionFrame) -> Gradient:
    return Gradient(*sobel_components(frame))


def gradient_magnitude(frame: PrecisionFrame) -> PrecisionFrame:
    return sobel_gradient(frame).magnitude


def classify(grad: PrecisionFrame, params: DetectorParams = DetectorParams()) -> PixelLabelMap:
    g = grad.samples
    labels = np.full(g.shape, Label.CBP, dtype=np.uint8)
    labels[g < params.t1] = Label.FP
    labels[g > params.t2] = Label.TP
    return PixelLabelMap(labels)


def quantize_direction(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Map gradient orientation to a bin 0..3 (0, 45, 90, 135 degrees)."""
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    return (np.floor((angle + 22.5) / 45.0).astype(np.int64)) % 4


# (drow, dcol) of the "forward" neighbour for each direction bin.
_DIR_STEPS = ((0, 1), (1, 1), (1, 0), (1, -1))


def extract_band_edges(labels: PixelLabelMap, grad: Gradient, min_length: int = 1) -> PixelLabelMap:
    """Thin candidate pixels to band edges by non-maximum suppression.

    A CBP pixel survives when its magnitude is strictly above the backward
    neighbour along the quantized gradient direction and at least the
    forward one. The strict side breaks ties so that an ideal step, whose
    two flanking pixels respond equally, yields a single-pixel edge, and a
    plateau of equal magnitudes keeps only its first pixel.

    8-connected edge fragments with fewer than ``min_length`` pixels are
    returned to the CBP set.
    """
    mag = grad.magnitude.samples
    direction = grad.direction
    h, w = mag.shape
    # Out-of-frame neighbours count as zero magnitude.
    p = np.pad(mag, 1, mode="constant", constant_values=0.0)
    keep = np.zeros(mag.shape, dtype=bool)
    for b, (dr, dc) in enumerate(_DIR_STEPS):
        fwd = p[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
        bwd = p[1 - dr:1 - dr + h, 1 - dc:1 - dc + w]
        keep |= (direction == b) & (mag > bwd) & (mag >= fwd)
    out = labels.labels.copy()
    edge = keep & (out == Label.CBP)
    if min_length > 1:
        ids, _ = ndimage.label(edge, structure=_EIGHT)
        sizes = np.bincount(ids.ravel())
        sizes[0] = 0
        edge = sizes[ids] >= min_length
    out[edge] = Label.BAND_EDGE
    return PixelLabelMap(out)


def _components(mask: np.ndarray, structure: np.ndarray,
                min_size: int = 1) -> tuple[np.ndarray, list[Region]]:
    ids, n = ndimage.label(mask, structure=structure)
    if min_size > 1 and n:
        sizes = np.bincount(ids.ravel())
        sizes[0] = 0
        ids, n = ndimage.label(sizes[ids] >= min_size, structure=structure)
    flat = ids.ravel()
    order = np.argsort(flat, kind="stable")
    counts = np.bincount(flat, minlength=n + 1)
    bounds = np.cumsum(counts)
    w = mask.shape[1]
    regions = []
    for k in range(1, n + 1):
        idx = order[bounds[k - 1]:bounds[k]]
        regions.append(Region(k, np.stack([idx // w, idx % w], axis=1)))
    return ids.astype(np.int64), regions


def build_regions(labels: PixelLabelMap, min_band_area: int = 1) -> RegionIndex:
    """Label bands and edges and record which edges touch which band.

    Bands are 4-connected components of FP and CBP pixels with at least
    ``min_band_area`` pixels; edges are 8-connected components of band-edge
    pixels. Adjacency means some edge pixel is an 8-neighbour of a band pixel.
    """
    lab = labels.labels
    # A 1-pixel 8-connected edge only separates 4-connected regions.
    band_ids, bands = _components((lab == Label.FP) | (lab == Label.CBP), _FOUR, min_band_area)
    edge_ids, edges = _components(lab == Label.BAND_EDGE, _EIGHT)

    h, w = lab.shape
    pe = np.pad(edge_ids, 1)
    n_e = len(edges) + 1
    codes = []
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            shifted = pe[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
            hit = (band_ids > 0) & (shifted > 0)
            codes.append(band_ids[hit] * n_e + shifted[hit])
    pairs = np.unique(np.concatenate(codes)) if codes else np.empty(0, dtype=np.int64)
    adj: dict[int, set[int]] = {b.id: set() for b in bands}
    for code in pairs.tolist():
        adj[code // n_e].add(code % n_e)
    adjacency = {k: frozenset(v) for k, v in adj.items()}
    return RegionIndex(band_ids, edge_ids, bands, edges, adjacency)


@dataclass(frozen=True, eq=False)
class Detection:
    """Everything the detector produced for one frame."""

    smoothed: PrecisionFrame
    grad: PrecisionFrame
    labels: PixelLabelMap
    regions: RegionIndex


def detect(frame: LumaFrame, params: DetectorParams = DetectorParams()) -> Detection:
    smoothed = prefilter(frame, params)
    grad = sobel_gradient(smoothed)
    mag = grad.magnitude
    labels = extract_band_edges(classify(mag, params), grad, params.min_edge_length)
    return Detection(smoothed, mag, labels, build_regions(labels, params.min_band_area))
