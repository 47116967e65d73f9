"""Print MNR and BER penalty curves over CNR for a few hierarchy parameters."""

import argparse

import numpy as np

from hiermod.analytic import PenaltyKind, penalty_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lams", type=float, action="append")
    ap.add_argument("--lo", type=float, default=0.0)
    ap.add_argument("--hi", type=float, default=20.0)
    ap.add_argument("--step", type=float, default=1.0)
    args = ap.parse_args()
    lams = args.lams or [0.05, 0.1, 0.15, 0.2, 0.25]
    cnrs = np.arange(args.lo, args.hi + args.step / 2, args.step)
    curves = {(k, lam): penalty_curve(k, lam, cnrs) for k in PenaltyKind for lam in lams}
    head = ["cnr_db"] + [f"{k.value}@{lam:g}" for k in PenaltyKind for lam in lams]
    print(" ".join(f"{h:>9}" for h in head))
    for i, c in enumerate(cnrs):
        row = [curves[k, lam].samples[i][1] for k in PenaltyKind for lam in lams]
        print(f"{c:9.2f} " + " ".join(f"{v:9.4f}" for v in row))


if __name__ == "__main__":
    main()
