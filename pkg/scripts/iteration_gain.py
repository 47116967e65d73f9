"""Coded BER per receiver iteration for both prior-feedback modes."""

import argparse

from hiermod.coding import CODE_K3, CODE_K7
from hiermod.montecarlo import CodesConfig, RunSpec, run
from hiermod.receiver import IterationSchedule, PriorMode


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--frames", type=int, default=50)
    ap.add_argument("--iterations", type=int, default=4)
    ap.add_argument("--k3", action="store_true", help="use the (7,5) code on both layers")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    code = CODE_K3 if args.k3 else CODE_K7
    points = [(0.25, 2.0), (0.25, 3.0), (0.15, 4.0), (0.15, 7.0)]
    for mode in PriorMode:
        spec = RunSpec(points, frames=args.frames, seed=3, workers=args.workers,
                       schedule=IterationSchedule(args.iterations, mode), codes=CodesConfig(code, code))
        print(f"## prior mode {mode.value}, code {code}")
        for pt, s in run(spec):
            b = " ".join(f"{c.ber:.3e}" for c in s.coded_basic)
            sec = " ".join(f"{c.ber:.3e}" for c in s.coded_secondary)
            print(f"lambda={pt.lam:g} cnr={pt.cnr_db:g} dB legacy={s.legacy_coded_basic.ber:.3e}")
            print(f"   basic     {b}\n   secondary {sec}")


if __name__ == "__main__":
    main()
