"""Simulated certification runs for each Bob strategy on the Bell state.

    python scripts/certification_demo.py --rounds 20000 --seed 7
"""

import argparse

from discordia import game, qmat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    s = qmat.bell()
    print(f"{'strategy':>14} {'MI':>8} {'margin':>8} {'Ic':>8} certified")
    for strat in game.STRATEGIES:
        r = game.simulate_certification(s, strat, args.rounds, args.seed)
        print(f"{strat:>14} {r.mi_estimate:8.4f} {r.margin:8.4f} {r.ic:8.4f} {r.certified}")


if __name__ == "__main__":
    main()
