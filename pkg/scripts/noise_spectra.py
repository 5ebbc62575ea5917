#!/usr/bin/env python3
"""Radially averaged power spectrum slope of each dither noise kind.

Fits log power against log radial frequency between --fmin and --fmax cycles
per frame, averaged over seeds. White noise should sit near 0, power-half
near -0.5 and pink near -1.
"""
import argparse

import numpy as np

from adadeband.dither import NoiseKind, NoiseSpec, generate_noise


def radial_slope(field, fmin, fmax):
    h, w = field.shape
    power = np.abs(np.fft.fft2(field - field.mean())) ** 2
    fy = np.fft.fftfreq(h) * h
    fx = np.fft.fftfreq(w) * w
    r = np.rint(np.hypot(fy[:, None], fx[None, :])).astype(int)
    sums = np.bincount(r.ravel(), power.ravel())
    counts = np.bincount(r.ravel())
    f = np.arange(fmin, fmax + 1)
    return np.polyfit(np.log(f), np.log(sums[f] / counts[f]), 1)[0]


def main():
    ap = argparse.ArgumentParser(description="dither noise spectral slopes")
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--fmin", type=int, default=4)
    ap.add_argument("--fmax", type=int, default=64)
    args = ap.parse_args()
    print(f"{'kind':<12}{'mean slope':>12}{'min':>9}{'max':>9}")
    for kind in NoiseKind:
        s = [radial_slope(generate_noise(NoiseSpec(kind, seed=k), args.size, args.size).samples,
                          args.fmin, args.fmax) for k in range(args.seeds)]
        print(f"{kind.value:<12}{np.mean(s):>12.3f}{np.min(s):>9.3f}{np.max(s):>9.3f}")


if __name__ == "__main__":
    main()
