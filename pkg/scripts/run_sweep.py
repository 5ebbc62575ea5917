#!/usr/bin/env python3
"""Deband every synthetic pattern at several band steps and seeds; write one CSV.

    python scripts/run_sweep.py --steps 4,8,16,32 --seeds 3 --out sweep.csv
"""
import argparse
import csv
import sys
from dataclasses import replace

from adadeband.dither import NoiseKind
from adadeband.pipeline import PipelineConfig
from adadeband.synth import SWEEP_COLUMNS, Pattern, SynthSpec, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", default="4,8,16,32")
    ap.add_argument("--seeds", type=int, default=2)
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()
    steps = [int(s) for s in args.steps.split(",")]

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out)
    w.writerow(("pattern", "noise", "seed") + SWEEP_COLUMNS)
    base = PipelineConfig()
    for pattern in Pattern:
        spec = SynthSpec(width=args.size, height=args.size, pattern=pattern)
        for kind in NoiseKind:
            for seed in range(args.seeds):
                cfg = replace(base, noise=replace(base.noise, kind=kind, seed=seed))
                for row in run_sweep(spec, steps, cfg).rows:
                    w.writerow((pattern.value, kind.value, seed) + tuple(row[c] for c in SWEEP_COLUMNS))
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
