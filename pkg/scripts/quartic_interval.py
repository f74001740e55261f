"""Sweep the free Gram entry of the quartic demo and report PSD-ness and rank.

The Gram matrices of 1 + x + 3x^2 - x^3 + x^4 in the basis (1, x, x^2) form a
one-parameter family in a = a13; it is PSD exactly on an interval whose ends
are roots of (a + 1)(4a^2 - 10a + 5).
"""

import argparse

import numpy as np

from sos_lab.numerics import numerical_rank
from sos_lab.polycore import builtin_form, monomial_basis
from sos_lab.sdp import solve
from sos_lab.sos import build_gram_sdp


def gram(a):
    return np.array([[1, 0.5, a], [0.5, 3 - 2 * a, -0.5], [a, -0.5, 1]])


def main():
    ap = argparse.ArgumentParser(description="quartic Gram interval")
    ap.add_argument("--points", type=int, default=13)
    args = ap.parse_args()

    prob = build_gram_sdp(builtin_form("quartic-demo"), monomial_basis(1, 2, up_to=True))
    C = np.zeros((3, 3))
    C[0, 2] = C[2, 0] = 0.5
    lo = solve(prob.with_objective(C)).primal_objective
    hi = -solve(prob.with_objective(-C)).primal_objective
    roots = np.sort(np.roots(np.polymul([1, 1], [4, -10, 5])).real)
    print(f"SDP interval   [{lo:.9f}, {hi:.9f}]")
    print(f"cubic roots    {', '.join(f'{r:.9f}' for r in roots)}")
    for a in np.linspace(lo - 0.25, hi + 0.25, args.points):
        G = gram(a)
        lam = np.linalg.eigvalsh(G)[0]
        rank = numerical_rank(G, 1e-6).rank if lam >= -1e-9 else "-"
        print(f"a13={a:+.4f}  min eig={lam:+.3e}  rank={rank}")


if __name__ == "__main__":
    main()
