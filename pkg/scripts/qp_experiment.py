"""Quadratic persistence of Veronese embeddings, seed by seed.

    python scripts/qp_experiment.py --n 2 --d 3 --seeds 10
    python scripts/qp_experiment.py --n 3 --d 3 --seeds 3   # nu_3(P^3), a few seconds per seed

Nothing here is asserted; the table is for inspection.
"""

import argparse
import time
from math import comb

from sos_lab.veronese import pythagoras_lower_bound, quadratic_persistence


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--candidates", type=int, default=3)
    ap.add_argument("--max-steps", type=int, default=None)
    args = ap.parse_args()

    N = comb(args.n + args.d, args.d) - 1
    print(f"nu_{args.d}(P^{args.n}) in P^{N}")
    for seed in range(args.seeds):
        t0 = time.perf_counter()
        tr = quadratic_persistence(args.n, args.d, seed, args.candidates, args.max_steps)
        done = tr.steps and tr.steps[-1]["after"] == 0
        bound = pythagoras_lower_bound(N, tr.qp) if done else None
        print(f"seed {seed}: qp={tr.qp} drops={list(tr.drops)} "
              f"pythagoras>={bound} ({time.perf_counter() - t0:.1f}s){'' if done else ' [partial]'}")


if __name__ == "__main__":
    main()
