"""Adaptive debanding: band detection, size-varying smoothing and dithered requantization."""

from .detect import DetectorParams, Label, PixelLabelMap, RegionIndex, detect
from .dither import NoiseKind, NoiseSpec, Quantizer, dither_quantize, generate_noise
from .frames import BorderPolicy, LumaFrame, PrecisionFrame, promote, sample_with_border
from .metrics import QualityReport, band_edge_density, psnr, ssim
from .pipeline import DebandResult, PipelineConfig, deband, deband_frame
from .reconstruct import NOT_FILTERED, LpfParams, RadiusMap, apply_adaptive_lpf, build_radius_map
from .synth import Pattern, SynthSpec, run_sweep, synth_banded, synth_ideal

__version__ = "0.1.0"
