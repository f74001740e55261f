import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sos_lab.errors import NotChordal
from sos_lab.graphs import (CompletionStatus, PartialSymmetricMatrix, SpecificationGraph, check_specified_minors,
                            clique_number, complete_psd, triangle_pendant_matrix, paw_graph, gram_dimension_experiment,
                            is_chordal, is_perfect_elimination_ordering, maximal_cliques, maximal_cliques_chordal,
                            random_completable_instance, random_k_tree, random_tree, shortest_chordless_cycle,
                            smallest_chordless_cycle)
from sos_lab.numerics import is_psd


def brute_force_smallest_hole(G: SpecificationGraph):
    """Smallest vertex set of size >= 4 inducing a cycle, by enumeration."""
    adj = G.adjacency()
    for size in range(4, G.n + 1):
        for S in itertools.combinations(range(G.n), size):
            Sset = set(S)
            if any(len(adj[v] & Sset) != 2 for v in S):
                continue
            # 2-regular and connected means a single cycle
            seen, stack = {S[0]}, [S[0]]
            while stack:
                for u in adj[stack.pop()] & Sset:
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            if len(seen) == size:
                return size
    return None


def atlas_graphs(max_n):
    for g in nx.graph_atlas_g()[1:]:
        if g.number_of_nodes() <= max_n:
            yield SpecificationGraph.from_networkx(g)


def test_chordality_on_small_atlas():
    for G in atlas_graphs(6):
        rep = is_chordal(G)
        hole = brute_force_smallest_hole(G)
        assert bool(rep) == (hole is None)
        assert smallest_chordless_cycle(G) == hole


def test_witness_cycle_is_induced():
    for G in atlas_graphs(6):
        cyc = shortest_chordless_cycle(G)
        if cyc is None:
            continue
        assert len(cyc) >= 4
        k = len(cyc)
        for a, b in itertools.combinations(range(k), 2):
            consecutive = (b - a) in (1, k - 1)
            assert G.has_edge(cyc[a], cyc[b]) == consecutive


def test_peo_returned_for_chordal():
    G = paw_graph()
    rep = is_chordal(G)
    assert rep and is_perfect_elimination_ordering(G, rep.ordering)


@pytest.mark.parametrize("n", range(4, 9))
def test_cycles(n):
    assert smallest_chordless_cycle(SpecificationGraph.cycle(n)) == n
    assert not is_chordal(SpecificationGraph.cycle(n))


def test_petersen():
    G = SpecificationGraph.from_networkx(nx.petersen_graph())
    assert smallest_chordless_cycle(G) == 5 == brute_force_smallest_hole(G)


def test_example_graph_cliques():
    G = paw_graph()
    assert maximal_cliques_chordal(G) == [(0, 1, 2), (2, 3)]
    assert clique_number(G) == 3
    with pytest.raises(NotChordal):
        maximal_cliques_chordal(SpecificationGraph.cycle(4))


@given(st.integers(1, 9), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_cliques_match_networkx(n, k, seed):
    G = random_k_tree(n, k, np.random.default_rng(seed))
    assert is_chordal(G)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(G.edges)
    assert nx.is_chordal(g)
    assert maximal_cliques(G) == sorted(tuple(sorted(c)) for c in nx.find_cliques(g))
    assert clique_number(G) == min(n, k + 1)


def test_json_roundtrips():
    G = paw_graph()
    assert SpecificationGraph.from_json(G.to_json()) == G
    M = triangle_pendant_matrix(2)
    assert PartialSymmetricMatrix.from_json(M.to_json()).specified == M.specified


def test_diagonal_required():
    with pytest.raises(ValueError):
        PartialSymmetricMatrix(2, {(0, 0): 1.0, (0, 1): 0.5})


def test_minor_checks():
    assert check_specified_minors(triangle_pendant_matrix(1))
    bad = check_specified_minors(triangle_pendant_matrix(2))
    assert not bad and bad.clique == (2, 3)


def test_example_completions():
    res = complete_psd(triangle_pendant_matrix(1))
    assert res.status == CompletionStatus.COMPLETED
    assert res.rank <= 3
    assert is_psd(np.ones((4, 4)))
    assert complete_psd(triangle_pendant_matrix(2)).status == CompletionStatus.MINOR_VIOLATION
    with pytest.raises(NotChordal):
        complete_psd(PartialSymmetricMatrix.from_graph(SpecificationGraph.cycle(4), np.eye(4)))


def _check_completion(M, res, tol=1e-9):
    assert res.status == CompletionStatus.COMPLETED
    for (i, j), v in M.specified.items():
        assert res.matrix[i, j] == v == res.matrix[j, i]
    assert is_psd(res.matrix, tol)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["low_rank", "max_det"]))
def test_chordal_and_sdp_strategies_agree(seed, fill):
    rng = np.random.default_rng(seed)
    G = random_k_tree(int(rng.integers(2, 7)), int(rng.integers(1, 3)), rng)
    M = random_completable_instance(G, rng, rank=int(rng.integers(1, G.n + 1)))
    a = complete_psd(M, "chordal", fill=fill)
    b = complete_psd(M, "sdp")
    _check_completion(M, a)
    _check_completion(M, b, 1e-7)
    if fill == "low_rank":
        assert a.rank <= clique_number(G)


def test_max_det_beats_low_rank(rng):
    G = paw_graph()
    M = random_completable_instance(G, rng)
    lo = complete_psd(M, fill="low_rank").matrix
    hi = complete_psd(M, fill="max_det").matrix
    assert np.linalg.det(hi) >= np.linalg.det(lo) - 1e-12
    # the max-det completion is characterised by a zero inverse on the unspecified entries
    inv = np.linalg.inv(hi)
    assert abs(inv[0, 3]) < 1e-8 and abs(inv[1, 3]) < 1e-8


def _c4_oracle(theta):
    """Cycle condition for unit-diagonal C4 data with edge values cos(theta_e)."""
    total = np.sum(theta)
    margins = []
    for r in (1, 3):
        for F in itertools.combinations(range(4), r):
            s = sum(theta[e] for e in F) - (total - sum(theta[e] for e in F))
            margins.append((r - 1) * np.pi - s)
    return min(margins)


def test_c4_completability_matches_cycle_condition(rng):
    G = SpecificationGraph.cycle(4)
    checked = 0
    while checked < 40:
        theta = rng.uniform(0, np.pi, size=4)
        margin = _c4_oracle(theta)
        if abs(margin) < 1e-2:
            continue
        full = np.eye(4)
        for (i, j), t in zip([(0, 1), (1, 2), (2, 3), (0, 3)], theta):
            full[i, j] = full[j, i] = np.cos(t)
        M = PartialSymmetricMatrix.from_graph(G, full)
        res = complete_psd(M, "sdp")
        assert (res.status == CompletionStatus.COMPLETED) == (margin > 0)
        checked += 1


def test_c4_infeasible_certificate():
    from sos_lab.sdp import check_certificate
    from sos_lab.graphs import completion_sdp

    M = PartialSymmetricMatrix(4, {(0, 0): 1, (1, 1): 1, (2, 2): 1, (3, 3): 1,
                                   (0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 3): -1})
    res = complete_psd(M, "sdp")
    assert res.status == CompletionStatus.NO_COMPLETION
    assert check_certificate(completion_sdp(M), res.certificate)


def test_gram_dimension():
    G = paw_graph()
    assert gram_dimension_experiment(G, trials=5, seed=1) <= clique_number(G)
    assert gram_dimension_experiment(SpecificationGraph.complete(3), trials=3) <= 3
    assert gram_dimension_experiment(SpecificationGraph.cycle(4), trials=50, seed=2) >= 2


def test_random_tree_shape(rng):
    T = random_tree(12, rng)
    assert len(T.edges) == 11 and is_chordal(T) and clique_number(T) == 2
