"""Lowest completion rank found on random instances for a few small graphs.

For chordal graphs this should match the clique number.  Cycles of length
at least four need rank 3 at worst.
"""

import argparse

from sos_lab.graphs import (SpecificationGraph, clique_number, paw_graph, gram_dimension_experiment,
                            is_chordal)


def main():
    ap = argparse.ArgumentParser(description="gram dimension estimates")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    graphs = {
        "path P5": SpecificationGraph.path(5),
        "K4": SpecificationGraph.complete(4),
        "paw": paw_graph(),
        "C4": SpecificationGraph.cycle(4),
        "C5": SpecificationGraph.cycle(5),
        "C6": SpecificationGraph.cycle(6),
    }
    for name, G in graphs.items():
        gd = gram_dimension_experiment(G, args.trials, args.seed)
        print(f"{name:12s} chordal={bool(is_chordal(G))!s:5s} omega={clique_number(G)} observed={gd}")


if __name__ == "__main__":
    main()
