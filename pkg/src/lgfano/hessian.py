"""Ordinary-double-point certification.

Two independent views of each non-central critical point:

* numerically, the Hessian of f_X in torus coordinates must have full rank;
* exactly, the chart polynomial G obtained by moving the singular point of the
  compactified family to the origin must have vanishing constant and linear
  parts and a nondegenerate quadratic part.

The second view lives in Q[t]/(t^{i_X} - d), where t stands for the
y-coordinate alpha of the critical point.  Every branch alpha * exp(2 pi i r / i_X)
satisfies the same relation, so the exact G is the same element for all
branches; only the numeric value substituted for t changes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import _mp
from .critical import CriticalPointRecord
from .laurent import LaurentPoly, hessian_at
from .model import CIModel, build_givental

__all__ = [
    "CONVENTIONS",
    "QuotientElement",
    "ChartPolynomial",
    "ChartError",
    "BlockFactors",
    "HessianReport",
    "laplace_det",
    "easy_lemma_det",
    "build_chart_polynomial",
    "extract_quadratic_matrix",
    "closed_form_matrix",
    "block_nondegeneracy",
    "matching_conventions",
    "certify_odp",
]

# "paper": x-block diagonal 2 D_i as displayed; "expansion": diagonal D_i as G expands
CONVENTIONS = ("paper", "expansion")


class ChartError(RuntimeError):
    """Constant or linear part of G did not vanish."""


def _q(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


class QuotientElement:
    """Element of Q[t]/(t^m - d), stored as coefficients of 1, t, ..., t^(m-1)."""

    __slots__ = ("coeffs", "m", "d")

    def __init__(self, coeffs: Sequence, m: int, d: int):
        c = [Fraction(0)] * m
        for e, v in enumerate(coeffs):
            q, r = divmod(e, m)
            c[r] += Fraction(v) * Fraction(d) ** q
        self.coeffs = tuple(_q(v) for v in c)
        self.m = m
        self.d = d

    @classmethod
    def scalar(cls, c, m: int, d: int) -> "QuotientElement":
        return cls([c], m, d)

    @classmethod
    def t_power(cls, e: int, m: int, d: int) -> "QuotientElement":
        return cls([0] * e + [1], m, d)

    def _like(self, other) -> "QuotientElement":
        if isinstance(other, QuotientElement):
            if (other.m, other.d) != (self.m, self.d):
                raise ValueError("elements of different quotient rings")
            return other
        return QuotientElement.scalar(other, self.m, self.d)

    def __add__(self, other):
        other = self._like(other)
        return QuotientElement([a + b for a, b in zip(self.coeffs, other.coeffs)], self.m, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuotientElement([-a for a in self.coeffs], self.m, self.d)

    def __sub__(self, other):
        return self + (-self._like(other))

    def __rsub__(self, other):
        return self._like(other) - self

    def __mul__(self, other):
        other = self._like(other)
        prod = [0] * (2 * self.m - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return QuotientElement(prod, self.m, self.d)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = self._like(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.m, self.d))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def numeric(self, t_value):
        """Evaluate at a concrete root of t^m = d (an mpmath number)."""
        total = 0
        power = 1
        for c in self.coeffs:
            if c:
                total = total + (Fraction(c).numerator * power) / Fraction(c).denominator
            power = power * t_value
        return total

    def poly_str(self) -> str:
        parts = []
        for e, c in enumerate(self.coeffs):
            if not c:
                continue
            if e == 0:
                parts.append(str(c))
            else:
                mono = "t" if e == 1 else f"t^{e}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return f"{self.poly_str()} mod t^{self.m} - {self.d}"

    __repr__ = __str__


def laplace_det(matrix: Sequence[Sequence]):
    """Exact determinant by cofactor expansion along rows, memoized on column subsets.

    Works for any commutative ring whose elements support + - * (Fractions,
    QuotientElement, ints).
    """
    n = len(matrix)
    if n == 0:
        return 1

    # the cofactor sign counts only still-free columns to the left of j
    @lru_cache(maxsize=None)
    def minor_signed(row: int, cols: int):
        if row == n:
            return 1
        total = 0
        k = 0
        for j in range(n):
            if cols >> j & 1:
                continue
            entry = matrix[row][j]
            if entry != 0:
                term = entry * minor_signed(row + 1, cols | (1 << j))
                total = total + term if k % 2 == 0 else total - term
            k += 1
        return total

    return minor_signed(0, 0)


def easy_lemma_det(a, b, m: int):
    """Determinant of the m x m matrix with diagonal b and off-diagonal a.

    Returns (det, is_zero) with det = (b - a)^(m-1) (b + (m-1) a); the
    matrix is singular exactly when a = b or (m-1) a + b = 0.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    det = (b - a) ** (m - 1) * (b + (m - 1) * a)
    return det, det == 0


@dataclass(frozen=True)
class ChartPolynomial:
    """G in variables a_{i,j}, b_s with coefficients in Q[t]/(t^{i_X} - d)."""

    model: CIModel
    branch: int
    var_names: tuple
    terms: dict  # exponent tuple -> QuotientElement

    def part(self, degree: int) -> dict:
        return {e: c for e, c in self.terms.items() if sum(e) == degree}

    def coefficient(self, exponents) -> QuotientElement:
        m = self.model
        return self.terms.get(tuple(exponents), QuotientElement.scalar(0, m.index, m.dconst))

    def t_value(self, precision_bits: int = 256):
        ctx = _mp.context(precision_bits)
        m = self.model
        return _mp.positive_root(ctx, m.dconst, m.index) * _mp.root_of_unity(ctx, self.branch, m.index)

    def __str__(self):
        items = sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
        parts = []
        for e, c in items:
            mono = " ".join(n if k == 1 else f"{n}^{k}" for n, k in zip(self.var_names, e) if k)
            parts.append(f"({c.poly_str()})" + (f" * {mono}" if mono else ""))
        return " + ".join(parts) if parts else "0"


def _chart_names(model: CIModel) -> tuple:
    names = [f"a{i + 1}_{j + 1}" for i, d in enumerate(model.degrees) for j in range(d - 1)]
    names += [f"b{s + 1}" for s in range(model.index - 1)]
    return tuple(names)


def build_chart_polynomial(model: CIModel, branch: int = 0) -> ChartPolynomial:
    """Expand G = prod_i (sum_j a_{i,j} + d_i)^{d_i} + (sum_s b_s - t) prod (a+1) prod (b+t).

    For i_X = 1 the second summand is -d prod (a+1).  The constant and linear
    parts are checked to vanish exactly.
    """
    if not 0 <= branch < model.index:
        raise ValueError(f"branch must be in [0, {model.index})")
    names = _chart_names(model) + ("t",)
    nv = len(names)
    gens = LaurentPoly.generators(names)
    one = LaurentPoly.constant(1, nv, names)
    t = gens[-1]
    first = one
    for group, d in zip(model.x_groups, model.degrees):
        s = one * d
        for v in group:
            s = s + gens[v]
        first = first * s ** d
    second = one
    for group in model.x_groups:
        for v in group:
            second = second * (gens[v] + 1)
    ys = model.y_indices
    if ys:
        bsum = one * 0
        for v in ys:
            bsum = bsum + gens[v]
            second = second * (gens[v] + t)
        second = (bsum - t) * second
    else:
        # i_X = 1: lambda = d, t = d^(1/1) stands in for d itself
        second = -t * second
    G = first + second
    m, dconst = model.index, model.dconst
    acc: dict = {}
    for e, c in G:
        key, te = e[:-1], e[-1]
        piece = QuotientElement([0] * te + [c], m, dconst)
        acc[key] = acc[key] + piece if key in acc else piece
    terms = {k: v for k, v in acc.items() if not v.is_zero()}
    chart = ChartPolynomial(model, branch, names[:-1], terms)
    low = [e for e in terms if sum(e) <= 1]
    if low:
        raise ChartError(f"G has nonvanishing terms of degree <= 1 at exponents {low}")
    return chart


def extract_quadratic_matrix(G: ChartPolynomial) -> list[list[QuotientElement]]:
    """Hessian of G at the origin read from its quadratic part."""
    n = len(G.var_names)
    H = [[None] * n for _ in range(n)]
    for u in range(n):
        for v in range(u, n):
            e = [0] * n
            e[u] += 1
            e[v] += 1
            c = G.coefficient(e)
            H[u][v] = H[v][u] = 2 * c if u == v else c
    return H


def _block_constants(model: CIModel, convention: str):
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    m, d = model.index, model.dconst
    blocks = []
    for i, (group, di) in enumerate(zip(model.x_groups, model.degrees)):
        D = Fraction((di - 1) * d, di)
        diag = 2 * D if convention == "paper" else D
        blocks.append(("x", i + 1, group, QuotientElement.scalar(diag, m, d), QuotientElement.scalar(D - d, m, d)))
    if model.y_indices:
        ta = QuotientElement.t_power(m - 2, m, d)
        blocks.append(("y", None, model.y_indices, 2 * ta, ta))
    return blocks


def closed_form_matrix(model: CIModel, convention: str = "expansion") -> list[list[QuotientElement]]:
    """Block-diagonal matrix with x-blocks (diag D_i or 2 D_i, off-diagonal M_i = D_i - d)
    and a y-block (diag 2 t^(i_X-2), off-diagonal t^(i_X-2))."""
    n = model.n
    zero = QuotientElement.scalar(0, model.index, model.dconst)
    M = [[zero] * n for _ in range(n)]
    for _, _, idx, diag, off in _block_constants(model, convention):
        for u in idx:
            for v in idx:
                M[u][v] = diag if u == v else off
    return M


@dataclass(frozen=True)
class BlockFactors:
    kind: str  # "x" or "y"
    group: int | None
    size: int
    diagonal: QuotientElement
    off_diagonal: QuotientElement
    factors: tuple  # ((label, element, multiplicity), ...)

    @property
    def determinant(self) -> QuotientElement:
        det = QuotientElement.scalar(1, self.diagonal.m, self.diagonal.d)
        for _, el, mult in self.factors:
            for _ in range(mult):
                det = det * el
        return det


def block_nondegeneracy(model: CIModel, convention: str = "expansion", precision_bits: int = 256):
    """Per-block determinant factors (b - a) and (b + (m-1) a).

    Returns (blocks, nondegenerate).  A factor counts as nonzero only if it is
    nonzero as a ring element and numerically nonzero at t = d^(1/i_X).
    """
    ctx = _mp.context(precision_bits)
    alpha = _mp.positive_root(ctx, model.dconst, model.index)
    blocks, ok = [], True
    for kind, group, idx, diag, off in _block_constants(model, convention):
        size = len(idx)
        factors = []
        if size > 1:
            factors.append(("b-a", diag - off, size - 1))
        factors.append(("b+(m-1)a", diag + (size - 1) * off, 1))
        for _, el, _ in factors:
            if el.is_zero() or el.numeric(alpha) == 0:
                ok = False
        blocks.append(BlockFactors(kind, group, size, diag, off, tuple(factors)))
    return blocks, ok


def matching_conventions(model: CIModel, extracted=None) -> tuple[str, ...]:
    if extracted is None:
        extracted = extract_quadratic_matrix(build_chart_polynomial(model, 0))
    return tuple(c for c in CONVENTIONS if closed_form_matrix(model, c) == extracted)


@dataclass(frozen=True)
class HessianReport:
    descriptor: str
    branch: int | None
    precision_bits: int
    numeric_hessian: list
    singular_values: list
    rank: int
    certified: bool
    closed_form_matrix: dict  # convention -> matrix
    extracted_matrix: list
    convention_match: tuple
    block_determinant_factors: list
    nondegenerate: bool
    rank_threshold: float = field(default=1e-10)

    def to_dict(self, digits: int | None = None) -> dict:
        ctx = _mp.context(self.precision_bits)
        return {
            "model": self.descriptor,
            "branch": self.branch,
            "numeric_hessian": [[_mp.complex_dict(ctx, z, digits) for z in row] for row in self.numeric_hessian],
            "singular_values": [_mp.decimal_str(ctx, s, digits) for s in self.singular_values],
            "rank": self.rank,
            "rank_threshold": self.rank_threshold,
            "odp_certified": self.certified,
            "extracted_matrix": [[str(x) for x in row] for row in self.extracted_matrix],
            "closed_form_matrix": {c: [[str(x) for x in row] for row in M] for c, M in self.closed_form_matrix.items()},
            "convention_match": list(self.convention_match),
            "block_determinant_factors": [
                {
                    "block": b.kind if b.group is None else f"{b.kind}{b.group}",
                    "size": b.size,
                    "factors": [{"factor": label, "value": str(el), "multiplicity": mult} for label, el, mult in b.factors],
                }
                for b in self.block_determinant_factors
            ],
            "nondegenerate": self.nondegenerate,
        }


def certify_odp(model: CIModel, point: CriticalPointRecord, precision_bits: int = 256,
                rank_threshold: float = 1e-10, f: LaurentPoly | None = None) -> HessianReport:
    """Full-rank test of the torus Hessian at ``point`` plus the exact chart analysis for its branch."""
    f = f if f is not None else build_givental(model)
    ctx = _mp.context(precision_bits)
    H = hessian_at(f, point.coordinates, precision_bits)
    svals = _mp.singular_values(ctx, H)
    rank = _mp.numeric_rank(svals, rank_threshold)
    branch = point.branch if point.branch is not None else 0
    G = build_chart_polynomial(model, branch)
    extracted = extract_quadratic_matrix(G)
    closed = {c: closed_form_matrix(model, c) for c in CONVENTIONS}
    match = tuple(c for c in CONVENTIONS if closed[c] == extracted)
    blocks, nondeg = block_nondegeneracy(model, "expansion", precision_bits)
    return HessianReport(
        descriptor=model.descriptor,
        branch=point.branch,
        precision_bits=precision_bits,
        numeric_hessian=H,
        singular_values=svals,
        rank=rank,
        certified=rank == model.n,
        closed_form_matrix=closed,
        extracted_matrix=extracted,
        convention_match=match,
        block_determinant_factors=blocks,
        nondegenerate=nondeg,
        rank_threshold=rank_threshold,
    )
