"""Monte Carlo raw BER versus the closed forms, with z-scores."""

import argparse
import math
import time

from hiermod import analytic as an
from hiermod.montecarlo import RunSpec, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--frames", type=int, default=256)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    points = [(lam, c) for lam in (0.0, 0.1, 0.15, 0.25) for c in (0.0, 4.0, 7.0, 10.0)]
    t0 = time.perf_counter()
    results = run(RunSpec(points, frames=args.frames, decode=False, seed=args.seed, workers=args.workers))
    print(f"{'lambda':>6} {'cnr':>5} {'layer':>10} {'mc':>10} {'analytic':>10} {'z':>6}")
    for pt, s in results:
        rows = [("basic", s.legacy_raw_basic, an.ber_basic_raw(pt)),
                ("b|s=0", s.basic_given_s0, an.ber_basic_conditional(pt, 0)),
                ("b|s=1", s.basic_given_s1, an.ber_basic_conditional(pt, 1))]
        if pt.lam > 0:
            rows.append(("secondary", s.raw_secondary, an.ber_secondary_raw(pt)))
        for name, cnt, p in rows:
            z = (cnt.ber - p) / math.sqrt(p * (1 - p) / cnt.bits)
            print(f"{pt.lam:6.2f} {pt.cnr_db:5.1f} {name:>10} {cnt.ber:10.3e} {p:10.3e} {z:+6.2f}")
    print(f"# {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
