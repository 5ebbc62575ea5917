"""Pixel-buffer containers and border-aware sampling.

Frames wrap 2-D numpy arrays indexed ``[row, col]``. Everything downstream
uses replicate (clamp-to-edge) borders.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class BorderPolicy(enum.Enum):
    REPLICATE = "replicate"


@dataclass(frozen=True, eq=False)
class LumaFrame:
    """Integer luma plane with a declared bit depth (8 or 16)."""

    samples: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        if self.bit_depth not in (8, 16):
            raise ValueError(f"unsupported bit depth {self.bit_depth}")
        arr = np.asarray(self.samples)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype.kind not in "iu":
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValueError("luma samples must be integers")
        maxval = (1 << self.bit_depth) - 1
        if arr.size and (arr.min() < 0 or arr.max() > maxval):
            raise ValueError(f"samples outside [0, {maxval}]")
        dtype = np.uint8 if self.bit_depth == 8 else np.uint16
        arr = arr.astype(dtype)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape

    def __eq__(self, other):
        if not isinstance(other, LumaFrame):
            return NotImplemented
        return self.bit_depth == other.bit_depth and np.array_equal(self.samples, other.samples)


@dataclass(frozen=True, eq=False)
class PrecisionFrame:
    """Real-valued plane used between reconstruction and requantization."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("precision samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape


def sample_with_border(frame: LumaFrame, i: int, j: int,
                       policy: BorderPolicy = BorderPolicy.REPLICATE) -> int:
    """Return the sample at row ``i``, column ``j``, clamping out-of-frame coordinates."""
    if policy is not BorderPolicy.REPLICATE:
        raise ValueError(f"unsupported border policy {policy}")
    ii = min(max(i, 0), frame.height - 1)
    jj = min(max(j, 0), frame.width - 1)
    return int(frame.samples[ii, jj])


def promote(frame: LumaFrame) -> PrecisionFrame:
    return PrecisionFrame(frame.samples.astype(np.float64))


def pad_replicate(arr: np.ndarray, radius: int) -> np.ndarray:
    return np.pad(arr, radius, mode="edge")
