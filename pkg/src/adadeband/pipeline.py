"""Single-frame debanding: detect, reconstruct, dither, compose."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .detect import Detection, DetectorParams, detect
from .dither import NoiseSpec, Quantizer, dither_quantize, generate_noise, passthrough_compose
from .frames import LumaFrame, PrecisionFrame, promote
from .reconstruct import LpfParams, RadiusMap, apply_adaptive_lpf, build_radius_map


@dataclass(frozen=True)
class PipelineConfig:
    detector: DetectorParams = field(default_factory=DetectorParams)
    lpf: LpfParams = field(default_factory=LpfParams)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    dump_maps: bool = False
    profile_row: int | None = None


@dataclass(frozen=True, eq=False)
class DebandResult:
    detection: Detection
    radii: RadiusMap
    recon: PrecisionFrame
    dithered: LumaFrame
    output: LumaFrame

    def plain_quantized(self) -> LumaFrame:
        """Reconstruction rounded without noise (for profiles)."""
        zero = PrecisionFrame(np.zeros(self.recon.shape))
        return dither_quantize(self.recon, zero)


def deband_frame(frame: LumaFrame, config: PipelineConfig = PipelineConfig(),
                 frame_index: int = 0) -> DebandResult:
    if frame.bit_depth != 8:
        raise ValueError("debanding expects 8-bit luma")
    det = detect(frame, config.detector)
    radii = build_radius_map(det.labels, det.regions, config.lpf)
    # Smoothing reads the decoded frame, not the detector's pre-filtered copy.
    recon = apply_adaptive_lpf(promote(frame), radii)
    noise = generate_noise(config.noise, frame.width, frame.height, frame_index)
    dithered = dither_quantize(recon, noise, Quantizer())
    output = passthrough_compose(frame, dithered, radii)
    return DebandResult(det, radii, recon, dithered, output)


def deband(frame: LumaFrame, config: PipelineConfig = PipelineConfig(),
           frame_index: int = 0) -> LumaFrame:
    return deband_frame(frame, config, frame_index).output
