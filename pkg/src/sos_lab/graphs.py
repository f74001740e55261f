"""Specification graphs, chordality, and positive semidefinite matrix completion.

A partially specified symmetric matrix determines a graph on its rows: i ~ j
exactly when entry (i, j) is known.  The diagonal is always known.  When the
graph is chordal, nonnegativity of every fully specified principal block is
enough for a PSD completion, and one of rank at most the clique number can be
built one vertex at a time along a perfect elimination ordering.  Other
patterns go through the SDP solver.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import sdp as sdp_mod
from .errors import DimensionMismatch, NotChordal
from .numerics import is_psd, min_eigenvalue, numerical_rank

NULL_TOL = 1e-9


@dataclass(frozen=True)
class SpecificationGraph:
    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        norm = set()
        for e in self.edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise ValueError(f"loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {(i, j)} out of range for n={self.n}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> SpecificationGraph:
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def from_networkx(cls, g) -> SpecificationGraph:
        nodes = sorted(g.nodes())
        idx = {v: k for k, v in enumerate(nodes)}
        return cls(len(nodes), frozenset((idx[a], idx[b]) for a, b in g.edges()))

    @classmethod
    def cycle(cls, n: int) -> SpecificationGraph:
        return cls(n, frozenset((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def complete(cls, n: int) -> SpecificationGraph:
        return cls(n, frozenset(itertools.combinations(range(n), 2)))

    @classmethod
    def path(cls, n: int) -> SpecificationGraph:
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, doc: Mapping) -> SpecificationGraph:
        return cls.from_edges(int(doc["n"]), doc["edges"])


def paw_graph() -> SpecificationGraph:
    """Triangle {0,1,2} with a pendant edge 2-3."""
    return SpecificationGraph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])


@dataclass(frozen=True, eq=False)
class PartialSymmetricMatrix:
    """Known entries keyed by (i, j) with i <= j; every diagonal entry must be present."""

    n: int
    specified: Mapping[tuple[int, int], float]

    def __post_init__(self):
        clean: dict[tuple[int, int], float] = {}
        for (i, j), v in self.specified.items():
            i, j = int(i), int(j)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise DimensionMismatch(f"entry {(i, j)} out of range")
            key = (min(i, j), max(i, j))
            v = float(v)
            if key in clean and clean[key] != v:
                raise ValueError(f"conflicting values for entry {key}")
            clean[key] = v
        missing = [i for i in range(self.n) if (i, i) not in clean]
        if missing:
            raise ValueError(f"diagonal entries {missing} are unspecified")
        object.__setattr__(self, "specified", clean)

    @property
    def graph(self) -> SpecificationGraph:
        return SpecificationGraph(self.n, frozenset(k for k in self.specified if k[0] != k[1]))

    def value(self, i: int, j: int) -> float:
        return self.specified[(min(i, j), max(i, j))]

    def is_specified(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.specified

    def submatrix(self, idx: Sequence[int]) -> np.ndarray:
        return np.array([[self.value(i, j) for j in idx] for i in idx], dtype=float)

    @classmethod
    def from_dense(cls, M: Sequence[Sequence], mask=None) -> PartialSymmetricMatrix:
        """Build from a dense array; ``None``/NaN entries (or mask False) are unspecified."""
        n = len(M)
        entries = {}
        for i in range(n):
            for j in range(i, n):
                v = M[i][j]
                known = v is not None and not (isinstance(v, float) and np.isnan(v))
                if mask is not None:
                    known = known and bool(mask[i][j])
                if known or i == j:
                    entries[(i, j)] = v
        return cls(n, entries)

    @classmethod
    def from_graph(cls, G: SpecificationGraph, full: np.ndarray) -> PartialSymmetricMatrix:
        """Project a full symmetric matrix onto the pattern of ``G``."""
        entries = {(i, i): full[i, i] for i in range(G.n)}
        entries.update({(i, j): full[i, j] for i, j in G.edges})
        return cls(G.n, entries)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [{"i": i, "j": j, "v": v} for (i, j), v in sorted(self.specified.items())],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> PartialSymmetricMatrix:
        return cls(int(doc["n"]), {(int(e["i"]), int(e["j"])): float(e["v"]) for e in doc["entries"]})


def triangle_pendant_matrix(which: int) -> PartialSymmetricMatrix:
    """Ones on the triangle pattern, with corner entry (2, 3) equal to 1 (completable) or 2 (not)."""
    corner = {1: 1.0, 2: 2.0}[which]
    entries = {(i, i): 1.0 for i in range(4)}
    entries.update({(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0, (2, 3): corner})
    return PartialSymmetricMatrix(4, entries)


def random_tree(n: int, rng: np.random.Generator) -> SpecificationGraph:
    return SpecificationGraph(n, frozenset((int(rng.integers(0, v)), v) for v in range(1, n)))


def random_k_tree(n: int, k: int, rng: np.random.Generator) -> SpecificationGraph:
    """Start from K_{k+1}; each new vertex is joined to a random existing k-clique."""
    if n <= k:
        return SpecificationGraph.complete(n)
    edges = set(itertools.combinations(range(k + 1), 2))
    cliques = [tuple(c) for c in itertools.combinations(range(k + 1), k)]
    for v in range(k + 1, n):
        base = cliques[int(rng.integers(0, len(cliques)))]
        edges.update((u, v) for u in base)
        cliques.extend(tuple(sorted(set(base) - {u} | {v})) for u in base)
    return SpecificationGraph(n, frozenset(edges))


# -- chordality ----------------------------------------------------------------


def maximum_cardinality_search(G: SpecificationGraph) -> list[int]:
    """Visit order of MCS (ties -> lowest index).  Its reverse is a PEO iff G is chordal."""
    adj = G.adjacency()
    weight = [0] * G.n
    visited = [False] * G.n
    order = []
    for _ in range(G.n):
        v = max((u for u in range(G.n) if not visited[u]), key=lambda u: (weight[u], -u))
        visited[v] = True
        order.append(v)
        for u in adj[v]:
            if not visited[u]:
                weight[u] += 1
    return order


def is_perfect_elimination_ordering(G: SpecificationGraph, order: Sequence[int]) -> bool:
    adj = G.adjacency()
    pos = {v: k for k, v in enumerate(order)}
    for v in order:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        for a, b in itertools.combinations(later, 2):
            if b not in adj[a]:
                return False
    return True


def shortest_chordless_cycle(G: SpecificationGraph) -> list[int] | None:
    """A shortest induced cycle of length >= 4, as a vertex list, or None.

    For every vertex v and non-adjacent pair a, b of its neighbours, a shortest
    a-b path avoiding the rest of N[v] closes an induced cycle through v; the
    minimum over all choices is a shortest induced cycle.
    """
    adj = G.adjacency()
    best: list[int] | None = None
    for v in range(G.n):
        nbrs = sorted(adj[v])
        for a, b in itertools.combinations(nbrs, 2):
            if b in adj[a]:
                continue
            blocked = (adj[v] | {v}) - {a, b}
            path = _bfs_path(adj, a, b, blocked)
            if path is not None and (best is None or len(path) + 1 < len(best)):
                best = [v] + path
    return best


def _bfs_path(adj, src, dst, blocked) -> list[int] | None:
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for y in sorted(adj[x]):
            if y not in prev and y not in blocked:
                prev[y] = x
                queue.append(y)
    if dst not in prev:
        return None
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def smallest_chordless_cycle(G: SpecificationGraph) -> int | None:
    cyc = shortest_chordless_cycle(G)
    return None if cyc is None else len(cyc)


@dataclass(frozen=True)
class ChordalityReport:
    chordal: bool
    ordering: tuple[int, ...] | None = None
    cycle: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.chordal

    def to_json(self) -> dict:
        return {
            "chordal": self.chordal,
            "elimination_ordering": None if self.ordering is None else list(self.ordering),
            "chordless_cycle": None if self.cycle is None else list(self.cycle),
        }


def is_chordal(G: SpecificationGraph) -> ChordalityReport:
    order = maximum_cardinality_search(G)[::-1]
    if is_perfect_elimination_ordering(G, order):
        return ChordalityReport(True, ordering=tuple(order))
    cyc = shortest_chordless_cycle(G)
    assert cyc is not None, "MCS rejected a graph with no chordless cycle"
    return ChordalityReport(False, cycle=tuple(cyc))


def maximal_cliques_chordal(G: SpecificationGraph, order: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    if order is None:
        rep = is_chordal(G)
        if not rep:
            raise NotChordal(f"graph has chordless cycle {list(rep.cycle)}")
        order = rep.ordering
    adj = G.adjacency()
    pos = {v: k for k, v in enumerate(order)}
    cands = [frozenset({v} | {u for u in adj[v] if pos[u] > pos[v]}) for v in order]
    maximal = {c for c in cands if not any(c < d for d in cands)}
    return sorted(tuple(sorted(c)) for c in maximal)


def maximal_cliques(G: SpecificationGraph) -> list[tuple[int, ...]]:
    rep = is_chordal(G)
    if rep:
        return maximal_cliques_chordal(G, rep.ordering)
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from(G.edges)
    return sorted(tuple(sorted(c)) for c in nx.find_cliques(g))


def clique_number(G: SpecificationGraph) -> int:
    return max(len(c) for c in maximal_cliques(G)) if G.n else 0


# -- completion ---------------------------------------------------------------


@dataclass(frozen=True)
class MinorCheck:
    passed: bool
    clique: tuple[int, ...] | None = None
    min_eigenvalue: float | None = None

    def __bool__(self) -> bool:
        return self.passed


def check_specified_minors(M: PartialSymmetricMatrix, tol: float = 1e-9) -> MinorCheck:
    """PSD test of the fully specified block on every maximal clique.

    Every fully specified principal submatrix sits inside one of these blocks,
    so this covers all fully specified minors.
    """
    for clique in maximal_cliques(M.graph):
        block = M.submatrix(clique)
        if not is_psd(block, tol):
            return MinorCheck(False, clique, min_eigenvalue(block))
    return MinorCheck(True)


class CompletionStatus(str, Enum):
    COMPLETED = "Completed"
    NO_COMPLETION = "NoCompletion"
    MINOR_VIOLATION = "MinorViolation"
    INDETERMINATE = "Indeterminate"


@dataclass(eq=False)
class CompletionResult:
    status: CompletionStatus
    matrix: np.ndarray | None = None
    rank: int | None = None
    clique: tuple[int, ...] | None = None
    certificate: np.ndarray | None = None
    strategy: str = ""
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "strategy": self.strategy,
            "matrix": None if self.matrix is None else self.matrix.tolist(),
            "rank": self.rank,
            "violating_clique": None if self.clique is None else list(self.clique),
            "certificate": None if self.certificate is None else self.certificate.tolist(),
            "notes": list(self.notes),
        }


def _chordal_factor(M: PartialSymmetricMatrix, order: Sequence[int], width: int, fresh_dims: bool) -> np.ndarray:
    """Gram vectors u_v (rows) with <u_v, u_w> = M_vw on the pattern.

    Vertices are placed in reverse elimination order.  Each new vector splits
    into the part forced by its already placed (clique) neighbours and a free
    orthogonal part of length sqrt(Schur complement).  ``fresh_dims`` gives
    every orthogonal part its own coordinate (maximum-determinant completion);
    otherwise it reuses a direction orthogonal to the neighbours, which keeps
    everything in ``width`` dimensions.
    """
    adj = M.graph.adjacency()
    pos = {v: k for k, v in enumerate(order)}
    r = M.n if fresh_dims else width
    U = np.zeros((M.n, r))
    for step, v in enumerate(reversed(order)):
        N = sorted(u for u in adj[v] if pos[u] > pos[v])
        avv = M.value(v, v)
        if N:
            A_NN = M.submatrix(N)
            a_Nv = np.array([M.value(u, v) for u in N])
            z = np.linalg.pinv(A_NN, rcond=NULL_TOL, hermitian=True) @ a_Nv
            par = U[N].T @ z
        else:
            par = np.zeros(r)
        s = avv - float(par @ par)
        s = max(s, 0.0)
        if fresh_dims:
            direction = np.zeros(r)
            direction[step] = 1.0
        else:
            direction = _orthogonal_direction(U[N] if N else np.zeros((0, r)), r)
        U[v] = par + np.sqrt(s) * direction
    return U


def _orthogonal_direction(rows: np.ndarray, r: int) -> np.ndarray:
    if rows.shape[0] == 0:
        d = np.zeros(r)
        d[0] = 1.0
        return d
    _, sv, Vt = np.linalg.svd(rows, full_matrices=True)
    scale = sv[0] if sv.size and sv[0] > 0 else 1.0
    rank = int(np.sum(sv > NULL_TOL * scale))
    return Vt[rank]


def completion_sdp(M: PartialSymmetricMatrix) -> sdp_mod.SdpProblem:
    """Feasibility SDP: X PSD, X_ii and X_ij (edges) fixed.  Edge rows read 2 X_ij = 2 M_ij."""
    n = M.n
    A, b, labels = [], [], []
    for (i, j), v in sorted(M.specified.items()):
        A.append(sdp_mod.constraint_matrix(n, [(i, j, 1.0)]))
        b.append(v if i == j else 2 * v)
        labels.append((i, j))
    return sdp_mod.SdpProblem.feasibility(A, b, n=n, labels=labels)


def _finish(M: PartialSymmetricMatrix, X: np.ndarray, tol: float, rank_tol: float, strategy: str) -> CompletionResult:
    X = (X + X.T) / 2
    for (i, j), v in M.specified.items():
        X[i, j] = X[j, i] = v
    if not is_psd(X, tol):
        return CompletionResult(CompletionStatus.INDETERMINATE, matrix=X, strategy=strategy,
                                notes=[f"completed matrix has eigenvalue {min_eigenvalue(X):.3e}"])
    return CompletionResult(CompletionStatus.COMPLETED, matrix=X, rank=numerical_rank(X, rank_tol).rank,
                            strategy=strategy)


def complete_psd(M: PartialSymmetricMatrix, strategy: str = "chordal", fill: str = "low_rank",
                 config: sdp_mod.SolverConfig | None = None, tol: float = 1e-9,
                 rank_tol: float = 1e-7) -> CompletionResult:
    """Complete ``M`` to a PSD matrix.

    ``strategy="chordal"`` needs a chordal pattern; ``fill`` picks a completion
    of rank <= clique number (``"low_rank"``) or the maximum-determinant one
    (``"max_det"``).  ``strategy="sdp"`` works on any pattern.
    """
    if strategy not in ("chordal", "sdp"):
        raise ValueError(f"unknown strategy {strategy!r}")
    G = M.graph
    rep = is_chordal(G)
    if strategy == "chordal" and not rep:
        raise NotChordal(f"pattern has chordless cycle {list(rep.cycle)}")
    minors = check_specified_minors(M, tol)
    if not minors:
        return CompletionResult(CompletionStatus.MINOR_VIOLATION, clique=minors.clique, strategy=strategy,
                                notes=[f"block eigenvalue {minors.min_eigenvalue:.3e}"])
    if strategy == "chordal":
        if fill not in ("low_rank", "max_det"):
            raise ValueError(f"unknown fill {fill!r}")
        width = max(len(c) for c in maximal_cliques_chordal(G, rep.ordering))
        U = _chordal_factor(M, rep.ordering, width, fresh_dims=fill == "max_det")
        return _finish(M, U @ U.T, tol, rank_tol, "chordal")
    out = sdp_mod.solve(completion_sdp(M), config)
    if out.status == sdp_mod.Status.FEASIBLE:
        return _finish(M, out.X, max(tol, (config or sdp_mod.SolverConfig()).eps_psd), rank_tol, "sdp")
    if out.status == sdp_mod.Status.INFEASIBLE:
        return CompletionResult(CompletionStatus.NO_COMPLETION, certificate=out.certificate, strategy="sdp")
    return CompletionResult(CompletionStatus.INDETERMINATE, strategy="sdp", notes=list(out.notes))


def random_completable_instance(G: SpecificationGraph, rng: np.random.Generator,
                                rank: int | None = None) -> PartialSymmetricMatrix:
    """Pattern projection of a random PSD matrix (Wishart-type, given rank)."""
    r = G.n if rank is None else rank
    B = rng.standard_normal((G.n, r))
    return PartialSymmetricMatrix.from_graph(G, B @ B.T)


def gram_dimension_experiment(G: SpecificationGraph, trials: int = 20, seed: int = 0,
                              sdp_objectives: int = 3, rank_tol: float = 1e-6) -> int:
    """Largest (over random completable instances) of the lowest completion rank found.

    Per trial the candidates are the chordal low-rank completion (chordal G)
    and SDP minimisers of a few random linear objectives, whose optimal faces
    are low-rank extreme points of the completion spectrahedron.
    """
    seeds = np.random.SeedSequence(seed).spawn(trials)
    chordal = bool(is_chordal(G))
    worst = 0
    for ss in seeds:
        rng = np.random.default_rng(ss)
        M = random_completable_instance(G, rng)
        ranks = []
        if chordal:
            res = complete_psd(M, "chordal", rank_tol=rank_tol)
            if res.status == CompletionStatus.COMPLETED:
                ranks.append(res.rank)
        base = completion_sdp(M)
        for _ in range(sdp_objectives):
            W = rng.standard_normal((G.n, G.n))
            out = sdp_mod.solve(base.with_objective(W + W.T))
            if out.status == sdp_mod.Status.OPTIMAL:
                ranks.append(numerical_rank(out.X, rank_tol).rank)
        if ranks:
            worst = max(worst, min(ranks))
    return worst
