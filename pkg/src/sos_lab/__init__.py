"""Sums of squares, PSD completion and moment duality, with an exact/float split.

Exact rational arithmetic is used wherever the answer is combinatorial
(Newton polytopes, quadric spaces); a dense interior-point SDP solver handles
the numerical side and returns checkable certificates in both directions.
"""

__version__ = "0.1.0"

from .errors import SosLabError
from .polycore import MonomialBasis, Polynomial, builtin_form, builtin_forms, monomial_basis
from .sdp import SdpOutcome, SdpProblem, SolverConfig, Status, solve

__all__ = [
    "__version__",
    "SosLabError",
    "MonomialBasis",
    "Polynomial",
    "builtin_form",
    "builtin_forms",
    "monomial_basis",
    "SdpOutcome",
    "SdpProblem",
    "SolverConfig",
    "Status",
    "solve",
]
