"""Scaled differences n^2 |t_n - t_{n-1}| and BV sums for a set of weights.

    python3 scripts/bv_table.py --n-max 2000 > bv.csv
"""
import argparse
import sys

from bergproj._io import to_csv
from bergproj.acceptance import REGISTRY_WEIGHTS
from bergproj.analysis import bv_report
from bergproj.weights import parse_weight


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weight", action="append", help="weight spec (repeatable); default: registry")
    ap.add_argument("--n-max", type=int, default=2000)
    args = ap.parse_args()

    rows = []
    for spec in args.weight or REGISTRY_WEIGHTS:
        rep = bv_report(parse_weight(spec), n_max=args.n_max)
        L12, L34, dinf = rep.predicted
        rows.append([spec, rep.n_max, dinf, rep.sup_scaled, rep.tail_sup(rep.n_max // 4),
                     rep.bv_partial, rep.limit_gap, rep.overlap_discrepancy])
    sys.stdout.write(to_csv(["weight", "n_max", "delta_inf", "sup_scaled", "tail_sup",
                             "bv_partial", "limit_gap", "overlap_discrepancy"], rows))


if __name__ == "__main__":
    main()
