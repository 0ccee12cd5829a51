#!/usr/bin/env python3
"""Write the discrete S^{aa} matrix of one sector as CSV (real and imaginary parts)."""
import argparse
import csv
import sys

from n2char.modular import check_aa_symmetry_unitarity, s_aa_matrix
from n2char.specfun import SectorPair
from n2char.spectra import LevelPair, discrete_spectra


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--pprime", type=int, default=2)
    ap.add_argument("--sector", default="0,0", help="eps,eps'")
    ap.add_argument("--out", help="file to write instead of stdout")
    args = ap.parse_args(argv)

    level = LevelPair(args.p, args.pprime)
    sector = SectorPair(*(int(v) for v in args.sector.split(",")))
    labels = discrete_spectra(level)
    mat = s_aa_matrix(level, sector)
    sym, unit = check_aa_symmetry_unitarity(level, sector)

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        out = csv.writer(fh)
        out.writerow(["row", "col", "re", "im"])
        for i, a in enumerate(labels):
            for j, b in enumerate(labels):
                out.writerow([a, b, f"{mat[i, j].real:.16e}", f"{mat[i, j].imag:.16e}"])
    finally:
        if args.out:
            fh.close()
    print(f"# {level} sector {tuple(sector)}: |S - S^T| {sym:.2e}, |S S^dagger - 1| {unit:.2e}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
