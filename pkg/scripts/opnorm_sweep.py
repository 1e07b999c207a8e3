"""||B_mu f||_p / ||f||_p over the test battery for a range of p, on two grids.

    python3 scripts/opnorm_sweep.py --weight "alpha=1;M=poly-r2:2,-1" --p 1.5,2,3,4
"""
import argparse
import sys

from bergproj._io import to_csv
from bergproj.acceptance import opnorm_battery
from bergproj.analysis import opnorm_experiment
from bergproj.weights import parse_weight


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weight", default="alpha=0;M=poly-r2:2,-1")
    ap.add_argument("--p", default="1.5,2,3,4")
    ap.add_argument("--R", type=int, default=256)
    ap.add_argument("--K", type=int, default=512)
    args = ap.parse_args()

    mu = parse_weight(args.weight)
    rows = []
    for p in (float(x) for x in args.p.split(",")):
        bat = opnorm_battery(p, mu.alpha)
        a = opnorm_experiment(mu, p, bat, R=args.R, K=args.K)
        b = opnorm_experiment(mu, p, bat, R=2 * args.R, K=2 * args.K)
        for ra, rb in zip(a["rows"], b["rows"]):
            rows.append([p, ra["fn"], ra["ratio"], rb["ratio"], abs(rb["ratio"] / ra["ratio"] - 1)])
    sys.stdout.write(to_csv(["p", "fn", "ratio", "ratio_refined", "rel_change"], rows))


if __name__ == "__main__":
    main()
