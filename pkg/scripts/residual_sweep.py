#!/usr/bin/env python3
"""Sweep the S/T residuals over levels, sectors and labels; print a CSV table.

    python3 scripts/residual_sweep.py --levels 3,2 5,2 4,3 > residuals.csv
"""
import argparse
import csv
import sys
import time

from n2char.bpz import kac_table
from n2char.fixtures import atypical_point, load_fixture, standard_points
from n2char.modular import verify_s_atypical, verify_s_typical, verify_t_atypical, verify_t_typical
from n2char.specfun import SectorPair
from n2char.spectra import LevelPair, discrete_spectra


def level_arg(text: str) -> LevelPair:
    p, pp = (int(v) for v in text.split(","))
    return LevelPair(p, pp)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", nargs="+", type=level_arg, default=[LevelPair(3, 2), LevelPair(5, 2)])
    ap.add_argument("--skip-atypical-s", action="store_true", help="the slowest column")
    args = ap.parse_args(argv)

    x = load_fixture()["typical_x"]
    out = csv.writer(sys.stdout)
    out.writerow(["level", "check", "sector", "label", "point", "residual", "seconds"])
    for level in args.levels:
        for sector in SectorPair.all():
            for ip, point in enumerate(standard_points()):
                for kac in kac_table(level):
                    for name, fn in (("s-typical", verify_s_typical), ("t-typical", verify_t_typical)):
                        t0 = time.perf_counter()
                        res = fn(level, sector, kac, x, point)
                        out.writerow([level, name, tuple(sector), f"({kac[0]},{kac[1]})", ip, f"{res:.3e}", f"{time.perf_counter() - t0:.3f}"])
                for lab in discrete_spectra(level):
                    t0 = time.perf_counter()
                    res = verify_t_atypical(level, sector, lab, point)
                    out.writerow([level, "t-atypical", tuple(sector), lab, ip, f"{res:.3e}", f"{time.perf_counter() - t0:.3f}"])
            if not args.skip_atypical_s:
                for lab in discrete_spectra(level):
                    t0 = time.perf_counter()
                    res = verify_s_atypical(level, sector, lab, atypical_point())
                    out.writerow([level, "s-atypical", tuple(sector), lab, "atypical", f"{res:.3e}", f"{time.perf_counter() - t0:.3f}"])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
