"""Exact sparse multivariate Laurent polynomials over Q.

A polynomial is a map from integer exponent tuples to exact rational
coefficients.  Integral coefficients are stored as ``int`` and the rest as
:class:`fractions.Fraction`; both are exact, and ``int`` keeps the period
computations fast.

Numeric evaluation goes through mpmath at a caller-supplied precision.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from operator import add
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from . import _mp

__all__ = [
    "LaurentPoly",
    "LaurentError",
    "VariableMismatchError",
    "PoleError",
    "mul",
    "power",
    "partial_derivative",
    "constant_term",
    "evaluate",
    "gradient_at",
    "hessian_at",
    "parse_poly",
    "format_poly",
]


class LaurentError(ValueError):
    pass


class VariableMismatchError(LaurentError):
    pass


class PoleError(LaurentError):
    """A Laurent polynomial was evaluated at a zero coordinate with a negative exponent."""


def _norm(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise TypeError(f"coefficient must be an exact rational, got {type(c).__name__}")


def default_names(nvars: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(nvars))


def _grlex_key(e):
    return (sum(e), e)


class LaurentPoly:
    """Immutable sparse Laurent polynomial with exact rational coefficients."""

    __slots__ = ("_terms", "nvars", "var_names", "_partials", "_hash")

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None, nvars: int | None = None,
                 var_names: Sequence[str] | None = None):
        terms = terms or {}
        if nvars is None:
            if var_names is not None:
                nvars = len(var_names)
            elif terms:
                nvars = len(next(iter(terms)))
            else:
                raise LaurentError("nvars is required for an empty polynomial")
        clean = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise VariableMismatchError(f"exponent {e} has length {len(e)}, expected {nvars}")
            c = _norm(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self._terms = {e: _norm(c) for e, c in clean.items() if c}
        self.nvars = nvars
        self.var_names = tuple(var_names) if var_names is not None else default_names(nvars)
        if len(self.var_names) != nvars:
            raise VariableMismatchError("var_names length does not match nvars")
        self._partials = {}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, nvars: int, var_names: tuple[str, ...]) -> "LaurentPoly":
        # trusted constructor: keys already tuples of the right length, no zero values
        p = object.__new__(cls)
        p._terms = terms
        p.nvars = nvars
        p.var_names = var_names
        p._partials = {}
        p._hash = None
        return p

    # constructors

    @classmethod
    def constant(cls, c, nvars: int, var_names: Sequence[str] | None = None) -> "LaurentPoly":
        return cls({(0,) * nvars: c}, nvars, var_names)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff=1, var_names: Sequence[str] | None = None) -> "LaurentPoly":
        return cls({tuple(exponents): coeff}, len(exponents), var_names)

    @classmethod
    def generators(cls, var_names: Sequence[str]) -> list["LaurentPoly"]:
        n = len(var_names)
        return [cls.monomial(tuple(int(i == j) for j in range(n)), 1, var_names) for i in range(n)]

    # basic accessors

    @property
    def terms(self) -> Mapping[tuple[int, ...], object]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def coefficient(self, exponents: Sequence[int]):
        return self._terms.get(tuple(exponents), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        """Terms in descending graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def total_degree_range(self) -> tuple[int, int]:
        degs = [sum(e) for e in self._terms]
        return (min(degs), max(degs)) if degs else (0, 0)

    def with_names(self, var_names: Sequence[str]) -> "LaurentPoly":
        return LaurentPoly._raw(dict(self._terms), self.nvars, tuple(var_names))

    # ring operations

    def _check(self, other: "LaurentPoly"):
        if other.nvars != self.nvars:
            raise VariableMismatchError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return LaurentPoly.constant(other, self.nvars, self.var_names)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for e, c in other._terms.items():
            v = acc.get(e, 0) + c
            if v:
                acc[e] = _norm(v)
            else:
                acc.pop(e, None)
        return LaurentPoly._raw(acc, self.nvars, self.var_names)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self._terms.items()}, self.nvars, self.var_names)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return mul(self, other)
        try:
            c = _norm(other)
        except TypeError:
            return NotImplemented
        if not c:
            return LaurentPoly._raw({}, self.nvars, self.var_names)
        return LaurentPoly._raw({e: _norm(v * c) for e, v in self._terms.items()}, self.nvars, self.var_names)

    __rmul__ = __mul__

    def __pow__(self, m: int):
        return power(self, m)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        try:
            other = LaurentPoly.constant(other, self.nvars)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({format_poly(self)!r}, nvars={self.nvars})"

    def __str__(self):
        return format_poly(self)

    # calculus and evaluation

    def partial_derivative(self, var_index: int) -> "LaurentPoly":
        return partial_derivative(self, var_index)

    def constant_term(self):
        return constant_term(self)

    def truncated(self, max_total_degree: int) -> "LaurentPoly":
        """Drop terms whose total degree exceeds ``max_total_degree``."""
        return LaurentPoly._raw({e: c for e, c in self._terms.items() if sum(e) <= max_total_degree},
                                self.nvars, self.var_names)

    def evaluate(self, point, precision_bits: int):
        return evaluate(self, point, precision_bits)


def mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Exact product by hash-accumulated sparse convolution."""
    p._check(q)
    if len(p._terms) < len(q._terms):
        p, q = q, p
    acc: dict = {}
    get = acc.get
    small = list(q._terms.items())
    for e1, c1 in p._terms.items():
        for e2, c2 in small:
            e = tuple(map(add, e1, e2))
            acc[e] = get(e, 0) + c1 * c2
    out = {e: _norm(c) for e, c in acc.items() if c}
    return LaurentPoly._raw(out, p.nvars, p.var_names)


def power(p: LaurentPoly, m: int) -> LaurentPoly:
    """Exact m-th power by repeated multiplication by ``p``.

    Negative ``m`` is allowed only for a single nonzero term, the units of the ring.
    """
    if int(m) != m:
        raise LaurentError(f"exponent must be an integer, got {m!r}")
    if m < 0:
        if len(p._terms) != 1:
            raise LaurentError("only a monomial can be raised to a negative power")
        (e, c), = p._terms.items()
        return LaurentPoly._raw({tuple(k * m for k in e): _norm(Fraction(1) / Fraction(c) ** -m)}, p.nvars, p.var_names)
    out = LaurentPoly.constant(1, p.nvars, p.var_names)
    for _ in range(int(m)):
        out = mul(out, p)
    return out


def partial_derivative(p: LaurentPoly, var_index: int) -> LaurentPoly:
    if not 0 <= var_index < p.nvars:
        raise LaurentError(f"variable index {var_index} out of range for {p.nvars} variables")
    cached = p._partials.get(var_index)
    if cached is not None:
        return cached
    out = {}
    for e, c in p._terms.items():
        k = e[var_index]
        if k:
            ne = e[:var_index] + (k - 1,) + e[var_index + 1:]
            out[ne] = _norm(c * k)
    result = LaurentPoly._raw(out, p.nvars, p.var_names)
    p._partials[var_index] = result
    return result


def constant_term(p: LaurentPoly):
    return p._terms.get((0,) * p.nvars, 0)


def _numeric_point(ctx, p: LaurentPoly, point) -> list:
    point = list(point)
    if len(point) != p.nvars:
        raise VariableMismatchError(f"point has {len(point)} coordinates, expected {p.nvars}")
    return [_mp.to_mpc(ctx, z) for z in point]


def _eval_in(ctx, p: LaurentPoly, z: list):
    total = ctx.mpc(0)
    powers: list[dict] = [{} for _ in z]
    for e, c in p._terms.items():
        term = _mp.to_mpc(ctx, c) if isinstance(c, Fraction) else ctx.mpc(c)
        for v, k in enumerate(e):
            if k == 0:
                continue
            cache = powers[v]
            zk = cache.get(k)
            if zk is None:
                if k < 0 and z[v] == 0:
                    raise PoleError(f"variable {p.var_names[v]} is zero but appears with exponent {k}")
                zk = cache[k] = z[v] ** k
            term *= zk
        total += term
    return total


def evaluate(p: LaurentPoly, point, precision_bits: int):
    """Value of ``p`` at ``point`` as an mpmath complex at ``precision_bits``."""
    ctx = _mp.context(precision_bits)
    return _eval_in(ctx, p, _numeric_point(ctx, p, point))


def gradient_at(p: LaurentPoly, point, precision_bits: int) -> list:
    ctx = _mp.context(precision_bits)
    z = _numeric_point(ctx, p, point)
    return [_eval_in(ctx, partial_derivative(p, i), z) for i in range(p.nvars)]


def hessian_at(p: LaurentPoly, point, precision_bits: int) -> list[list]:
    """Matrix of second partials; the upper triangle is evaluated and mirrored."""
    ctx = _mp.context(precision_bits)
    z = _numeric_point(ctx, p, point)
    n = p.nvars
    H = [[None] * n for _ in range(n)]
    for i in range(n):
        di = partial_derivative(p, i)
        for j in range(i, n):
            H[i][j] = H[j][i] = _eval_in(ctx, partial_derivative(di, j), z)
    return H


# text serialization

def _fmt_coeff(c) -> str:
    return str(c)


def format_poly(p: LaurentPoly) -> str:
    """Render as ``coeff * v1^e1 ... vn^en`` terms joined by `` + `` in grlex order."""
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        mono = []
        for name, k in zip(p.var_names, e):
            if k == 1:
                mono.append(name)
            elif k:
                mono.append(f"{name}^{k}")
        parts.append(_fmt_coeff(c) if not mono else f"{_fmt_coeff(c)} * {' '.join(mono)}")
    return " + ".join(parts)


_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_poly(text: str, var_names: Sequence[str]) -> LaurentPoly:
    """Inverse of :func:`format_poly` for the given variable names."""
    index = {name: i for i, name in enumerate(var_names)}
    n = len(var_names)
    text = text.strip()
    if text == "0":
        return LaurentPoly({}, n, var_names)
    terms: dict = {}
    for raw in text.split(" + "):
        raw = raw.strip()
        if not raw:
            raise LaurentError(f"empty term in {text!r}")
        coeff_part, _, mono_part = raw.partition(" * ")
        try:
            coeff = Fraction(coeff_part.strip())
        except ValueError:
            raise LaurentError(f"bad coefficient {coeff_part!r}") from None
        e = [0] * n
        for tok in mono_part.split():
            m = _FACTOR.match(tok)
            if not m or m.group(1) not in index:
                raise LaurentError(f"bad factor {tok!r}")
            e[index[m.group(1)]] += int(m.group(2) or 1)
        e = tuple(e)
        terms[e] = terms.get(e, 0) + coeff
    return LaurentPoly(terms, n, var_names)


def sum_polys(polys: Iterable[LaurentPoly], nvars: int, var_names: Sequence[str] | None = None) -> LaurentPoly:
    acc = LaurentPoly({}, nvars, var_names)
    for q in polys:
        acc = acc + q
    return acc
