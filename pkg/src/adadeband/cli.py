"""Command-line interface.

Usage:
    adadeband deband INPUT OUTPUT [options]
    adadeband score REFERENCE TEST
    adadeband synth OUTPUT [--ideal PATH] [spec options]
    adadeband profile INPUT --row N [options]
    adadeband sweep [--steps 4,8,16,32] [spec options]
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io as _io
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .detect import DetectorParams
from .dither import NoiseKind, NoiseSpec, Quantizer
from .frames import LumaFrame
from .io import FormatError, FrameStream, StreamFormat, read_stream, write_pgm, write_stream
from .metrics import QualityReport, score_frames
from .pipeline import PipelineConfig, deband_frame
from .synth import Pattern, SynthSpec, run_sweep, synth_banded, synth_ideal

log = logging.getLogger("adadeband")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4

# Flags that tune the pipeline; --preset default forbids them.
_DETECTOR_INTS = ("t1", "t2", "prefilter_radius", "prefilter_passes",
                  "min_edge_length", "min_band_area")
_TUNING = _DETECTOR_INTS + ("prefilter_max_range", "median_radius", "noise_kind", "noise_amplitude", "blur_sigma", "seed")


class UsageError(Exception):
    pass


def _add_input_flags(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=[f.value for f in StreamFormat],
                   help="input format (default: from extension or magic)")
    p.add_argument("--width", type=int, help="frame width (raw YUV only)")
    p.add_argument("--height", type=int, help="frame height (raw YUV only)")
    p.add_argument("--fps", help="frame rate, e.g. 25 or 30000:1001 (raw YUV only)")


def _add_pipeline_flags(p: argparse.ArgumentParser):
    d, n = DetectorParams(), NoiseSpec()
    g = p.add_argument_group("pipeline")
    g.add_argument("--preset", choices=["default"],
                   help="pin every pipeline parameter to its documented default")
    g.add_argument("--t1", type=float, help=f"flat-pixel gradient threshold (default {d.t1})")
    g.add_argument("--t2", type=float, help=f"textured-pixel gradient threshold (default {d.t2})")
    g.add_argument("--prefilter-radius", type=int, help=f"default {d.prefilter_radius}")
    g.add_argument("--prefilter-passes", type=int, help=f"default {d.prefilter_passes}")
    g.add_argument("--prefilter-max-range", type=float,
                   help=f"smooth only windows with range <= this; negative disables the gate "
                        f"(default {d.prefilter_max_range})")
    g.add_argument("--min-edge-length", type=int,
                   help=f"drop shorter edge fragments (default {d.min_edge_length})")
    g.add_argument("--min-band-area", type=int,
                   help=f"ignore smaller flat components (default {d.min_band_area})")
    g.add_argument("--median-radius", type=int, help="radius-map median radius (default 2)")
    g.add_argument("--noise-kind", choices=[k.value for k in NoiseKind],
                   help=f"dither noise (default {n.kind.value})")
    g.add_argument("--noise-amplitude", type=float, help=f"default {n.amplitude}")
    g.add_argument("--blur-sigma", type=float, help=f"default {n.blur_sigma}")
    g.add_argument("--seed", type=int, help=f"noise seed (default {n.seed})")


def _add_synth_flags(p: argparse.ArgumentParser, with_step: bool = True):
    p.add_argument("--size", type=int, nargs=2, metavar=("W", "H"), default=(256, 256))
    p.add_argument("--pattern", choices=[x.value for x in Pattern], default=Pattern.LINEAR_RAMP_H.value)
    p.add_argument("--low", type=float, default=0.0)
    p.add_argument("--high", type=float, default=255.0)
    if with_step:
        p.add_argument("--step", type=int, default=16, help="band step in luma levels")
    p.add_argument("--inset", help="texture inset as TOP,LEFT,HEIGHT,WIDTH")
    p.add_argument("--synth-seed", type=int, default=0)


def config_from_args(args) -> PipelineConfig:
    given = [k for k in _TUNING if getattr(args, k, None) is not None]
    if getattr(args, "preset", None) == "default":
        if given:
            raise UsageError("--preset default cannot be combined with " +
                             ", ".join("--" + k.replace("_", "-") for k in given))
        return PipelineConfig()
    base = PipelineConfig()
    det = {}
    for k in _DETECTOR_INTS:
        if getattr(args, k, None) is not None:
            det[k] = getattr(args, k)
    if getattr(args, "prefilter_max_range", None) is not None:
        det["prefilter_max_range"] = None if args.prefilter_max_range < 0 else args.prefilter_max_range
    noise = {}
    if getattr(args, "noise_kind", None) is not None:
        noise["kind"] = NoiseKind(args.noise_kind)
    for src, dst in (("noise_amplitude", "amplitude"), ("blur_sigma", "blur_sigma"), ("seed", "seed")):
        if getattr(args, src, None) is not None:
            noise[dst] = getattr(args, src)
    lpf = base.lpf
    if getattr(args, "median_radius", None) is not None:
        lpf = dataclasses.replace(lpf, median_radius=args.median_radius)
    try:
        return PipelineConfig(
            detector=dataclasses.replace(base.detector, **det),
            lpf=lpf,
            noise=dataclasses.replace(base.noise, **noise),
            dump_maps=bool(getattr(args, "dump_maps", None)),
            profile_row=getattr(args, "row", None),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def spec_from_args(args, step: int | None = None) -> SynthSpec:
    inset = None
    if args.inset:
        try:
            inset = tuple(int(v) for v in args.inset.split(","))
        except ValueError:
            raise UsageError(f"bad --inset {args.inset!r}") from None
        if len(inset) != 4:
            raise UsageError("--inset needs TOP,LEFT,HEIGHT,WIDTH")
    try:
        return SynthSpec(width=args.size[0], height=args.size[1], pattern=Pattern(args.pattern),
                         ramp_range=(args.low, args.high),
                         band_step=step if step is not None else args.step,
                         texture_inset=inset, seed=args.synth_seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _read(path, args) -> FrameStream:
    fmt = StreamFormat(args.format) if getattr(args, "format", None) else None
    if fmt is None and os.path.splitext(path)[1].lower() in (".yuv", ".raw"):
        fmt = StreamFormat.RAW_YUV420
    if fmt is StreamFormat.RAW_YUV420 and (args.width is None or args.height is None or args.fps is None):
        raise UsageError("raw YUV input needs --width, --height and --fps")
    return read_stream(path, fmt, args.width, args.height)


def _process_plane(plane: np.ndarray, config: PipelineConfig, frame_index: int, plane_index: int):
    cfg = config
    if plane_index:
        # Chroma planes get their own noise field.
        noise = dataclasses.replace(config.noise, seed=config.noise.seed + 1_000_003 * plane_index)
        cfg = dataclasses.replace(config, noise=noise)
    return deband_frame(LumaFrame(plane), cfg, frame_index)


def deband_stream(stream: FrameStream, config: PipelineConfig, all_planes: bool = False,
                  threads: int = 1, dump_dir: str | None = None) -> FrameStream:
    """Deband every frame; results are identical for any thread count."""
    if stream.bit_depth != 8:
        raise FormatError("only 8-bit input can be debanded")

    def work(idx):
        planes = stream.frames[idx]
        out = [p.copy() for p in planes]
        for k in range(len(planes) if all_planes else 1):
            res = _process_plane(planes[k], config, idx, k)
            out[k] = np.array(res.output.samples)
            if dump_dir and k == 0:
                write_pgm(os.path.join(dump_dir, f"frame{idx:05d}_labels.pgm"),
                          res.detection.labels.to_gray())
                write_pgm(os.path.join(dump_dir, f"frame{idx:05d}_radius.pgm"), res.radii.to_gray())
        return out

    indices = range(stream.frame_count)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            frames = list(pool.map(work, indices))
    else:
        frames = [work(i) for i in indices]
    return stream.with_frames(frames)


def cmd_deband(args) -> int:
    config = config_from_args(args)
    stream = _read(args.input, args)
    if args.dump_maps:
        os.makedirs(args.dump_maps, exist_ok=True)
    out = deband_stream(stream, config, args.all_planes, args.threads, args.dump_maps)
    write_stream(args.output, out)
    ref = [stream.luma(i) for i in range(stream.frame_count)]
    test = [out.luma(i) for i in range(out.frame_count)]
    report = score_frames(ref, test, config.detector)
    report_path = args.report or args.output + ".report.json"
    with open(report_path, "w") as f:
        f.write(report.to_json() + "\n")
    log.info("wrote %s (%d frames), report %s", args.output, out.frame_count, report_path)
    return EXIT_OK


def cmd_score(args) -> int:
    ref = _read(args.reference, args)
    test = _read(args.test, args)
    if ref.frame_count != test.frame_count:
        raise FormatError(f"frame counts differ: {ref.frame_count} vs {test.frame_count}")
    if (ref.width, ref.height) != (test.width, test.height):
        raise FormatError("frame dimensions differ")
    if ref.bit_depth != 8 or test.bit_depth != 8:
        raise FormatError("scoring needs 8-bit frames")
    config = config_from_args(args)
    report = score_frames([ref.luma(i) for i in range(ref.frame_count)],
                          [test.luma(i) for i in range(test.frame_count)], config.detector)
    print(report.to_json())
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = spec_from_args(args)
    write_pgm(args.output, synth_banded(spec).samples)
    if args.ideal:
        write_pgm(args.ideal, Quantizer()(synth_ideal(spec).samples))
    return EXIT_OK


PROFILE_COLUMNS = ("column", "input", "reconstructed", "quantized", "dithered")


def profile_rows(frame: LumaFrame, row: int, config: PipelineConfig) -> list[tuple]:
    """One row through each stage: input, reconstruction, plain and dithered requantization.

    Pixels the pipeline leaves alone show their input value in every series.
    """
    if not 0 <= row < frame.height:
        raise UsageError(f"row {row} outside 0..{frame.height - 1}")
    res = deband_frame(frame, config)
    filtered = res.radii.filtered[row]
    plain = np.where(filtered, res.plain_quantized().samples[row], frame.samples[row])
    return [(c, int(frame.samples[row, c]), float(res.recon.samples[row, c]),
             int(plain[c]), int(res.output.samples[row, c])) for c in range(frame.width)]


def cmd_profile(args) -> int:
    config = config_from_args(args)
    stream = _read(args.input, args)
    if not 0 <= args.frame < stream.frame_count:
        raise UsageError(f"frame {args.frame} outside 0..{stream.frame_count - 1}")
    rows = profile_rows(stream.luma(args.frame), args.row, config)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for c, a, b, q, d in rows:
        w.writerow((c, a, f"{b:.4f}", q, d))
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = config_from_args(args)
    try:
        steps = [int(s) for s in args.steps.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad --steps {args.steps!r}") from None
    if not steps:
        raise UsageError("--steps is empty")
    spec = spec_from_args(args, step=steps[0])
    _emit(run_sweep(spec, steps, config).to_csv(), args.output)
    return EXIT_OK


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adadeband", description="Adaptive debanding filter")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deband", help="deband a PGM / Y4M / raw YUV file")
    p.add_argument("input")
    p.add_argument("output")
    _add_input_flags(p)
    _add_pipeline_flags(p)
    p.add_argument("--all-planes", action="store_true", help="also filter chroma planes")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--dump-maps", metavar="DIR", help="write label and radius maps as PGM")
    p.add_argument("--report", help="quality report path (default OUTPUT.report.json)")
    p.set_defaults(func=cmd_deband)

    p = sub.add_parser("score", help="PSNR / SSIM / band-edge density as JSON")
    p.add_argument("reference")
    p.add_argument("test")
    _add_input_flags(p)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("synth", help="write a synthetic banded frame as PGM")
    p.add_argument("output")
    p.add_argument("--ideal", help="also write the rounded ideal field here")
    _add_synth_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("profile", help="per-column values of one row through the pipeline (CSV)")
    p.add_argument("input")
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--output", help="CSV path (default stdout)")
    _add_input_flags(p)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("sweep", help="deband a synthetic field at several band steps (CSV)")
    p.add_argument("--steps", default="4,8,16,32")
    p.add_argument("--output", help="CSV path (default stdout)")
    _add_synth_flags(p, with_step=False)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"adadeband: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"adadeband: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"adadeband: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
