"""``sos-lab`` command line front end.

Every subcommand prints one JSON document.  Exit codes: 0 success, 1 usage or
input problem, 2 a negative answer backed by a certificate, 3 indeterminate.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import SosLabError
from .polycore import Polynomial, builtin_form, builtin_forms

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE, EXIT_INDETERMINATE = 0, 1, 2, 3

SCHEMA_DIR = Path(__file__).parent / "schemas"


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    seed: int = 0
    eps_feas: float = 1e-8
    eps_psd: float = 1e-8
    rank_tol: float = 1e-7
    output: str | None = None
    compact: bool = False

    def __post_init__(self):
        for name in ("eps_feas", "eps_psd", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def solver(self):
        from .sdp import SolverConfig

        return SolverConfig(eps_feas=self.eps_feas, eps_psd=self.eps_psd)


class UsageError(Exception):
    pass


def _read_json(source: str):
    try:
        with open(source) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {source}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source} is not valid JSON: {exc}") from None


def load_polynomial(source: str) -> Polynomial:
    """A polynomial JSON file or ``forms://<name>``."""
    if source.startswith("forms://"):
        return builtin_form(source[len("forms://"):])
    return Polynomial.from_json(_read_json(source))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit(doc: dict, cfg: RunConfig) -> None:
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=None if cfg.compact else 2,
                      separators=(",", ":") if cfg.compact else None)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


# -- subcommands ---------------------------------------------------------------


def _quadratic_on_graph(q: Polynomial, graph_doc: dict):
    from .graphs import PartialSymmetricMatrix, SpecificationGraph

    G = SpecificationGraph.from_json(graph_doc)
    if q.nvars != G.n:
        raise UsageError(f"form has {q.nvars} variables, graph has {G.n} vertices")
    if not q.is_zero() and (q.degree != 2 or not q.is_homogeneous()):
        raise UsageError("--mod-graph expects a quadratic form")
    entries = {(i, i): 0.0 for i in range(G.n)}
    entries.update({e: 0.0 for e in G.edges})
    dropped = []
    for e, c in q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            entries[(i, i)] = float(c)
        elif G.has_edge(i, j):
            entries[(i, j)] = float(c) / 2
        else:
            dropped.append([i, j])  # x_i x_j lies in I(G)
    return PartialSymmetricMatrix(G.n, entries), dropped


def cmd_certify(args, cfg: RunConfig):
    from .graphs import PartialSymmetricMatrix
    from .sos import certify_sos, certify_sos_mod_graph

    if args.input.startswith("forms://"):
        p = load_polynomial(args.input)
    else:
        doc = _read_json(args.input)
        if "entries" in doc:
            M = PartialSymmetricMatrix.from_json(doc)
            return _certify_doc(certify_sos_mod_graph(M, cfg.solver(), cfg.rank_tol), {"mode": "mod_graph"})
        p = Polynomial.from_json(doc)
    if args.mod_graph:
        M, dropped = _quadratic_on_graph(p, _read_json(args.mod_graph))
        res = certify_sos_mod_graph(M, cfg.solver(), cfg.rank_tol)
        return _certify_doc(res, {"mode": "mod_graph", "terms_in_ideal": dropped})
    res = certify_sos(p, prune=not args.no_prune, objective=args.objective, config=cfg.solver(),
                      rank_tol=cfg.rank_tol, seed=cfg.seed)
    return _certify_doc(res, {"mode": "global", "polynomial": p.to_json()})


def _certify_doc(res, extra):
    from .sos import GramCertificate, NotSosCertificate

    doc = {"command": "certify", **extra, "result": res.to_json()}
    if isinstance(res, GramCertificate):
        return doc, EXIT_OK
    if isinstance(res, NotSosCertificate):
        return doc, EXIT_NEGATIVE
    return doc, EXIT_INDETERMINATE


def cmd_complete(args, cfg: RunConfig):
    from .graphs import CompletionStatus, PartialSymmetricMatrix, complete_psd

    M = PartialSymmetricMatrix.from_json(_read_json(args.input))
    res = complete_psd(M, strategy=args.strategy, fill=args.fill, config=cfg.solver(), rank_tol=cfg.rank_tol)
    code = {CompletionStatus.COMPLETED: EXIT_OK, CompletionStatus.NO_COMPLETION: EXIT_NEGATIVE,
            CompletionStatus.MINOR_VIOLATION: EXIT_NEGATIVE}.get(res.status, EXIT_INDETERMINATE)
    return {"command": "complete", "result": res.to_json()}, code


def cmd_chordal(args, cfg: RunConfig):
    from .graphs import SpecificationGraph, is_chordal, maximal_cliques, smallest_chordless_cycle

    G = SpecificationGraph.from_json(_read_json(args.input))
    rep = is_chordal(G)
    cliques = maximal_cliques(G)
    result = rep.to_json()
    result.update({
        "maximal_cliques": [list(c) for c in cliques],
        "clique_number": max((len(c) for c in cliques), default=0),
        "smallest_chordless_cycle": smallest_chordless_cycle(G),
    })
    return {"command": "chordal", "graph": G.to_json(), "result": result}, EXIT_OK


def cmd_newton(args, cfg: RunConfig):
    from .errors import NotEvenDegree
    from .newton import half_lattice_points, newton_polytope, sos_necessary_check

    p = load_polynomial(args.input)
    P = newton_polytope(p)
    check = sos_necessary_check(p, P)
    try:
        half = [list(q) for q in half_lattice_points(P)]
    except NotEvenDegree:
        half = None
    return {"command": "newton", "polytope": P.to_json(), "half_lattice_points": half,
            "necessary_check": {"passed": check.passed, "reason": check.reason}}, EXIT_OK


def cmd_sdp(args, cfg: RunConfig):
    from .sdp import SdpProblem, Status, solve

    prob = SdpProblem.from_json(_read_json(args.input))
    if args.trace_min:
        prob = prob.with_objective(np.eye(prob.n))
    out = solve(prob, cfg.solver())
    code = {Status.INFEASIBLE: EXIT_NEGATIVE, Status.MAX_ITERATIONS: EXIT_INDETERMINATE}.get(out.status, EXIT_OK)
    return {"command": "sdp", "result": out.to_json()}, code


def cmd_hankel(args, cfg: RunConfig):
    from .errors import NotRankOne, NotVeroneseConsistent
    from .moments import hankel_matrix, recover_point_from_rank1
    from .numerics import is_psd, numerical_rank
    from .polycore import monomial_basis

    H = hankel_matrix(args.moments)
    rep = numerical_rank(H, cfg.rank_tol)
    result = {"matrix": H.tolist(), "rank": rep.rank, "eigenvalues": list(rep.eigenvalues),
              "psd": is_psd(H), "point": None, "recovery": None}
    if result["psd"]:
        try:
            result["point"] = list(recover_point_from_rank1(H, monomial_basis(2, H.shape[0] - 1), cfg.rank_tol))
            result["recovery"] = "point"
        except NotRankOne:
            result["recovery"] = "NotRankOne"
        except NotVeroneseConsistent:
            result["recovery"] = "NotVeroneseConsistent"
    return {"command": "hankel", "result": result}, EXIT_OK


def cmd_cayley_bacharach(args, cfg: RunConfig):
    from .moments import cayley_bacharach

    cb = cayley_bacharach(cfg.seed)
    return {"command": "cayley-bacharach", "seed": cfg.seed, "result": cb.to_json()}, EXIT_OK


def cmd_qp(args, cfg: RunConfig):
    from math import comb

    from .veronese import castelnuovo_check, pythagoras_lower_bound, quadratic_persistence, veronese_quadrics

    trace = quadratic_persistence(args.n, args.d, cfg.seed, candidates=args.candidates, max_steps=args.max_steps)
    N = comb(args.n + args.d, args.d) - 1
    result = trace.to_json()
    result["complete"] = not trace.steps or trace.steps[-1]["after"] == 0
    result["castelnuovo"] = castelnuovo_check(veronese_quadrics(args.n, args.d), args.n, N - args.n)
    result["pythagoras_lower_bound"] = pythagoras_lower_bound(N, trace.qp) if result["complete"] else None
    return {"command": "qp", "seed": cfg.seed, "result": result}, EXIT_OK


def cmd_hilbert_case(args, cfg: RunConfig):
    from .sos import hilbert_case

    return {"command": "hilbert-case", "n": args.n, "degree": args.degree,
            "result": hilbert_case(args.n, args.degree)}, EXIT_OK


def cmd_forms(args, cfg: RunConfig):
    forms = {name: {"polynomial": p.to_json(), "text": p.to_str()} for name, p in sorted(builtin_forms().items())}
    return {"command": "forms", "result": forms}, EXIT_OK


COMMANDS = {
    "certify": cmd_certify,
    "complete": cmd_complete,
    "chordal": cmd_chordal,
    "newton": cmd_newton,
    "sdp": cmd_sdp,
    "hankel": cmd_hankel,
    "cayley-bacharach": cmd_cayley_bacharach,
    "qp": cmd_qp,
    "hilbert-case": cmd_hilbert_case,
    "forms": cmd_forms,
}


def schemas() -> dict:
    return {p.stem: json.loads(p.read_text()) for p in sorted(SCHEMA_DIR.glob("*.json"))}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--eps-feas", type=float, default=1e-8)
    common.add_argument("--eps-psd", type=float, default=1e-8)
    common.add_argument("--rank-tol", type=float, default=1e-7)
    common.add_argument("--output", "-o", default=None)
    common.add_argument("--compact", action="store_true", help="single-line JSON output")

    parser = _Parser(prog="sos-lab", description="SOS certificates, PSD completion and moment tools.")
    parser.add_argument("--version", action="store_true", help="print version metadata as JSON")
    parser.add_argument("--schemas", action="store_true", help="print the output JSON schemas")
    parser.add_argument("--compact", action="store_true", dest="top_compact", help="single-line JSON output")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("certify", parents=[common], help="SOS certificate or refutation")
    p.add_argument("input", help="polynomial JSON, partial-matrix JSON, or forms://<name>")
    p.add_argument("--no-prune", action="store_true", help="use the full monomial basis")
    p.add_argument("--mod-graph", default=None, help="graph JSON; certify modulo its edge ideal")
    p.add_argument("--objective", choices=["feasible", "min_trace", "max_trace"], default="feasible")

    p = sub.add_parser("complete", parents=[common], help="PSD completion of a partial matrix")
    p.add_argument("input")
    p.add_argument("--strategy", choices=["chordal", "sdp"], default="chordal")
    p.add_argument("--fill", choices=["low_rank", "max_det"], default="low_rank")

    p = sub.add_parser("chordal", parents=[common], help="chordality report for a graph")
    p.add_argument("input")

    p = sub.add_parser("newton", parents=[common], help="Newton polytope and half-lattice points")
    p.add_argument("input")

    p = sub.add_parser("sdp", parents=[common], help="solve an SDP given as JSON")
    p.add_argument("input")
    p.add_argument("--trace-min", action="store_true", help="replace the objective by trace(X)")

    p = sub.add_parser("hankel", parents=[common], help="Hankel moment matrix and point recovery")
    p.add_argument("moments", type=float, nargs="+")

    sub.add_parser("cayley-bacharach", parents=[common], help="rank-7 extreme functional on ternary sextics")

    p = sub.add_parser("qp", parents=[common], help="quadratic persistence of a Veronese variety")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--candidates", type=int, default=3)
    p.add_argument("--max-steps", type=int, default=None)

    p = sub.add_parser("hilbert-case", parents=[common], help="is every nonnegative form SOS?")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)

    sub.add_parser("forms", parents=[common], help="list builtin forms")
    return parser


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _error("UsageError", str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.version or args.schemas or args.command is None:
        cfg = RunConfig("meta", compact=args.top_compact)
        if args.version:
            _emit({"name": "sos-lab", "version": __version__}, cfg)
        elif args.schemas:
            _emit(schemas(), cfg)
        else:
            _error("UsageError", "no subcommand given")
            return EXIT_USAGE
        return EXIT_OK
    try:
        cfg = RunConfig(args.command, [getattr(args, "input", None)], args.seed, args.eps_feas, args.eps_psd,
                        args.rank_tol, args.output, args.compact or args.top_compact)
        doc, code = COMMANDS[args.command](args, cfg)
    except (UsageError, ValueError, KeyError, SosLabError) as exc:
        _error(type(exc).__name__, str(exc.args[0]) if exc.args else str(exc))
        return EXIT_USAGE
    _emit(doc, cfg)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
