"""Dyadic approach of t_n, n^2 dt_n, C1C2/A and C3C4/A to their limits.

Each row also carries the one-step Richardson value from (n/2, n).

    python3 scripts/limit_convergence.py --weight "alpha=0.5;M=exp-r2:1"
"""
import argparse
import sys

from bergproj._io import to_csv
from bergproj.analysis import lemma_limits, limit_convergence, richardson
from bergproj.weights import parse_weight


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weight", default="alpha=0.5;M=exp-r2:1")
    ap.add_argument("--n-min", type=int, default=64)
    ap.add_argument("--n-max", type=int, default=8192)
    ap.add_argument("--precision", choices=("double", "extended"), default="double")
    args = ap.parse_args()

    mu = parse_weight(args.weight)
    L12, L34, dinf = lemma_limits(mu)
    ns = []
    n = args.n_min
    while n <= args.n_max:
        ns.append(n)
        n *= 2
    rows = limit_convergence(mu, None, ns, precision=args.precision)
    out = []
    prev = None
    for r in rows:
        r12 = richardson(r["ratio12"], prev["ratio12"]) if prev else float("nan")
        r34 = richardson(r["ratio34"], prev["ratio34"]) if prev else float("nan")
        out.append([r["n"], r["t"], r["scaled_delta"], r["ratio12"], r["ratio34"], r12, r34])
        prev = r
    print(f"# {mu.spec_string()}: L12={L12:.17g} L34={L34:.17g} delta_inf={dinf:.17g}", file=sys.stderr)
    sys.stdout.write(to_csv(["n", "t_n", "scaled_delta", "ratio12", "ratio34",
                             "ratio12_richardson", "ratio34_richardson"], out))


if __name__ == "__main__":
    main()
