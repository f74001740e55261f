"""Sparse multivariate polynomials with exact rational coefficients.

Variables are positional: a polynomial in ``nvars`` variables maps exponent
tuples of length ``nvars`` to :class:`fractions.Fraction` coefficients.  Zero
coefficients are never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, UnknownForm, ZeroInput

Exponent = tuple[int, ...]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    # numpy scalars and friends
    return Fraction(float(c))


def grevlex_key(exps: Sequence[int]) -> tuple:
    """Sort key: ascending total degree, graded-reverse-lex descending within a degree.

    For a fixed degree, grevlex puts ``a`` before ``b`` when the last nonzero
    entry of ``a - b`` is negative, which is plain lex order on the reversed
    tuple.
    """
    return (sum(exps), tuple(reversed(exps)))


@dataclass(frozen=True, eq=False)
class Polynomial:
    nvars: int
    terms: Mapping[Exponent, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.nvars < 1:
            raise DimensionMismatch("nvars must be positive")
        clean: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            e = tuple(int(k) for k in e)
            if len(e) != self.nvars:
                raise DimensionMismatch(f"exponent {e} has length {len(e)}, expected {self.nvars}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            c = _as_fraction(c)
            if c != 0:
                clean[e] = clean.get(e, Fraction(0)) + c
                if clean[e] == 0:
                    del clean[e]
        object.__setattr__(self, "terms", clean)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> Polynomial:
        return cls(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> Polynomial:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int) -> Polynomial:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> Polynomial:
        return cls(len(exps), {tuple(exps): coeff})

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def support(self) -> list[Exponent]:
        return sorted(self.terms, key=grevlex_key)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def float_terms(self) -> dict[Exponent, float]:
        return {e: float(c) for e, c in self.terms.items()}

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: Polynomial):
        if other.nvars != self.nvars:
            raise DimensionMismatch(f"nvars {self.nvars} vs {other.nvars}")

    def _lift(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(other, self.nvars)

    def __add__(self, other) -> Polynomial:
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Polynomial:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Polynomial:
        return self._lift(other) - self

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            c = _as_fraction(other)
            return Polynomial(self.nvars, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {self.to_str()!r})"

    # -- evaluation and transforms ------------------------------------------

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a rational point (floats are converted exactly)."""
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [_as_fraction(v) for v in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(pt, e):
                if k:
                    term *= v**k
            total += term
        return total

    def evaluate_float(self, points):
        """Vectorised float evaluation; ``points`` has shape (..., nvars)."""
        import numpy as np

        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.nvars:
            raise DimensionMismatch("point dimension mismatch")
        out = np.zeros(pts.shape[:-1])
        for e, c in self.terms.items():
            out = out + float(c) * np.prod(pts ** np.asarray(e), axis=-1)
        return out

    def homogenize(self) -> Polynomial:
        """Prepend a variable x0 so every term has degree ``self.degree``."""
        if self.is_zero():
            raise ZeroInput("cannot homogenize the zero polynomial")
        d = self.degree
        return Polynomial(self.nvars + 1, {(d - sum(e),) + e: c for e, c in self.terms.items()})

    def dehomogenize(self) -> Polynomial:
        """Substitute x0 = 1 (drops the first variable)."""
        if self.nvars < 2:
            raise DimensionMismatch("need at least two variables to dehomogenize")
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            out[e[1:]] = out.get(e[1:], Fraction(0)) + c
        return Polynomial(self.nvars - 1, out)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [
                {"exps": list(e), "num": c.numerator, "den": c.denominator}
                for e, c in ((e, self.terms[e]) for e in self.support())
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> Polynomial:
        nvars = int(doc["nvars"])
        terms: dict[Exponent, Fraction] = {}
        for t in doc["terms"]:
            den = int(t.get("den", 1))
            if den <= 0:
                raise ValueError("den must be positive")
            e = tuple(int(k) for k in t["exps"])
            terms[e] = terms.get(e, Fraction(0)) + Fraction(int(t["num"]), den)
        return cls(nvars, terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        if names is None:
            names = _default_names(self.nvars)
        parts = []
        for e in self.support():
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _default_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i}" for i in range(n)]


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered monomial list; ``homogeneous`` means exact degree ``degree``."""

    nvars: int
    degree: int
    monomials: tuple[Exponent, ...]
    homogeneous: bool = True

    def __len__(self) -> int:
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def __getitem__(self, i) -> Exponent:
        return self.monomials[i]

    def index(self) -> dict[Exponent, int]:
        return {m: i for i, m in enumerate(self.monomials)}

    def evaluate(self, point) -> list:
        """Vector of monomial values at ``point`` (exact if the point is rational)."""
        return [_mono_value(m, point) for m in self.monomials]

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "degree": self.degree,
            "homogeneous": self.homogeneous,
            "monomials": [list(m) for m in self.monomials],
        }


def _mono_value(m: Exponent, point):
    v = 1
    for x, k in zip(point, m):
        if k:
            v = v * x**k
    return v


def exponents_of_degree(nvars: int, d: int) -> list[Exponent]:
    if nvars == 1:
        return [(d,)]
    out = []
    for k in range(d, -1, -1):
        for rest in exponents_of_degree(nvars - 1, d - k):
            out.append((k,) + rest)
    return out


def monomial_basis(nvars: int, d: int, up_to: bool = False) -> MonomialBasis:
    """Monomials of degree exactly ``d`` (or ``<= d`` with ``up_to``), grevlex ordered."""
    if nvars < 1 or d < 0:
        raise ValueError("need nvars >= 1 and d >= 0")
    degrees = range(d + 1) if up_to else [d]
    monos = [e for k in degrees for e in exponents_of_degree(nvars, k)]
    monos.sort(key=grevlex_key)
    expected = comb(nvars + d, d) if up_to else comb(nvars + d - 1, d)
    assert len(monos) == expected
    return MonomialBasis(nvars, d, tuple(monos), homogeneous=not up_to)


def basis_from_monomials(monomials: Iterable[Sequence[int]]) -> MonomialBasis:
    monos = sorted({tuple(m) for m in monomials}, key=grevlex_key)
    if not monos:
        raise ValueError("empty monomial list")
    degs = {sum(m) for m in monos}
    return MonomialBasis(len(monos[0]), max(degs), tuple(monos), homogeneous=len(degs) == 1)


# -- builtin catalogue --------------------------------------------------------

_FORMS: dict[str, Polynomial] = {
    # Motzkin: x^2 y^4 + x^4 y^2 + z^6 - 3 x^2 y^2 z^2
    "motzkin": Polynomial(3, {(2, 4, 0): 1, (4, 2, 0): 1, (0, 0, 6): 1, (2, 2, 2): -3}),
    # Choi-Lam-Reznick: x^4 y^2 + y^4 z^2 + z^4 x^2 - 3 x^2 y^2 z^2
    "clr": Polynomial(3, {(4, 2, 0): 1, (0, 4, 2): 1, (2, 0, 4): 1, (2, 2, 2): -3}),
    # 1 + x + 3x^2 - x^3 + x^4
    "quartic-demo": Polynomial(1, {(0,): 1, (1,): 1, (2,): 3, (3,): -1, (4,): 1}),
}


def builtin_forms() -> dict[str, Polynomial]:
    return dict(_FORMS)


def builtin_form(name: str) -> Polynomial:
    try:
        return _FORMS[name]
    except KeyError:
        raise UnknownForm(f"unknown form {name!r}; known: {sorted(_FORMS)}") from None
