"""Spectra of the Cayley-Bacharach moment forms over many seeds."""

import argparse

import numpy as np

from sos_lab.moments import cayley_bacharach


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=50)
    args = ap.parse_args()

    gaps, ranks, extreme = [], [], 0
    for seed in range(args.seeds):
        cb = cayley_bacharach(seed)
        w = np.sort(np.abs(cb.eigenvalues))[::-1]
        gaps.append(w[6] / w[0])
        ranks.append(cb.rank)
        extreme += bool(cb.extreme and cb.extreme.is_extreme)
    print(f"seeds={args.seeds} ranks={sorted(set(ranks))} extreme={extreme}/{args.seeds}")
    print(f"smallest lambda_7/lambda_1 = {min(gaps):.2e}, median {np.median(gaps):.2e}")


if __name__ == "__main__":
    main()
