"""Reverse-reconciliation rate of TMSV inputs through a pure-loss channel vs the PLOB bound.

Writes a long-form CSV (mu,eta,quantity,value) and prints the convergence table.

    python scripts/lossy_capacity_sweep.py --out sweep.csv
"""

import argparse

import numpy as np

from discordia import keyrates
from discordia.cli import _write_atomic, to_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mu", type=float, nargs="+", default=[1e2, 1e3, 1e4])
    ap.add_argument("--eta", type=float, nargs="+", default=list(np.round(np.arange(0.1, 1.0, 0.1), 1)))
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    rows = keyrates.sweep_long(args.mu, args.eta)
    _write_atomic(args.out, to_csv(["mu", "eta", "quantity", "value"], rows))
    if args.out != "-":
        print(f"{'eta':>5} " + " ".join(f"gap(mu={m:g})".rjust(14) for m in args.mu))
        for eta in args.eta:
            gaps = [keyrates.plob(eta) - keyrates.lossy_rr_rate(eta, m).r_reverse for m in args.mu]
            print(f"{eta:5.2f} " + " ".join(f"{g:14.3e}" for g in gaps))


if __name__ == "__main__":
    main()
