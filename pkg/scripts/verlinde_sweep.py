#!/usr/bin/env python3
"""Smeared Verlinde pairings at (3,2) as the Gaussian center moves across x1 + eps/2.

Prints one CSV row per (label, center) with the computed and predicted values.
"""
import argparse
import csv
import sys

import numpy as np

from n2char.fixtures import load_fixture
from n2char.spectra import LevelPair
from n2char.verlinde import DELTA_SHIFTS_3_2, predicted_pairing, verlinde_pairing


def main(argv=None) -> int:
    fx = load_fixture()["verlinde"]
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x1", type=float, default=fx["x1"])
    ap.add_argument("--sigma", type=float, default=fx["sigma"])
    ap.add_argument("--span", type=float, default=1.5)
    ap.add_argument("--steps", type=int, default=31)
    args = ap.parse_args(argv)

    level = LevelPair(3, 2)
    out = csv.writer(sys.stdout)
    out.writerow(["label", "eps", "center", "pairing_re", "pairing_im", "predicted_re", "predicted_im", "abs_diff"])
    for label, eps in DELTA_SHIFTS_3_2.items():
        for center in np.linspace(args.x1 - args.span, args.x1 + args.span, args.steps):
            got = verlinde_pairing(level, label, (1, 1), args.x1, (1, 1), float(center), args.sigma)
            want = predicted_pairing(level, label, args.x1, float(center), args.sigma)
            out.writerow([label, eps, f"{center:.4f}", f"{got.real:.12e}", f"{got.imag:.12e}",
                          f"{want.real:.12e}", f"{want.imag:.12e}", f"{abs(got - want):.2e}"])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
