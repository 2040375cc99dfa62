"""Complete-intersection descriptors and their Givental-type Laurent polynomials."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, prod

from . import _mp
from .laurent import LaurentPoly

__all__ = [
    "ModelError",
    "DescriptorSyntaxError",
    "CIModel",
    "ModelInvariants",
    "make_model",
    "parse_descriptor",
    "split_descriptor",
    "format_descriptor",
    "build_givental",
    "invariants",
    "hodge_h1nm1",
    "middle_hodge_numbers",
]


class ModelError(ValueError):
    """Invalid complete-intersection data."""


class DescriptorSyntaxError(ModelError):
    def __init__(self, descriptor: str, token: str, reason: str):
        self.descriptor = descriptor
        self.token = token
        super().__init__(f"bad descriptor {descriptor!r}: {reason} (at {token!r})")


@dataclass(frozen=True)
class CIModel:
    """A smooth Fano complete intersection of the given degrees in P^ambient."""

    degrees: tuple[int, ...]
    ambient: int
    n: int
    index: int
    dconst: int
    var_names: tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.degrees)

    @property
    def descriptor(self) -> str:
        return format_descriptor(self)

    @property
    def x_groups(self) -> list[list[int]]:
        """Variable indices of x_{i,1..d_i-1}, grouped by hypersurface."""
        groups, pos = [], 0
        for d in self.degrees:
            groups.append(list(range(pos, pos + d - 1)))
            pos += d - 1
        return groups

    @property
    def y_indices(self) -> list[int]:
        start = sum(d - 1 for d in self.degrees)
        return list(range(start, start + self.index - 1))

    @property
    def baseline_only(self) -> bool:
        # curves are accepted but sit outside the intended range of the statements
        return self.n == 1


def make_model(degrees, ambient: int) -> CIModel:
    degrees = tuple(int(d) for d in degrees)
    ambient = int(ambient)
    if ambient < 1:
        raise ModelError(f"ambient dimension must be >= 1, got {ambient}")
    for d in degrees:
        if d <= 1:
            raise ModelError(f"degree {d} rejected: every degree must be >= 2 (present the minimal embedding)")
    k = len(degrees)
    n = ambient - k
    if n < 1:
        raise ModelError(f"dimension n = {n} < 1 for {k} hypersurfaces in P^{ambient}")
    index = ambient + 1 - sum(degrees)
    if index <= 0:
        raise ModelError(f"not Fano: index i_X = {index} <= 0")
    names = [f"x{i + 1}_{j + 1}" for i, d in enumerate(degrees) for j in range(d - 1)]
    names += [f"y{s + 1}" for s in range(index - 1)]
    assert len(names) == n
    dconst = prod(d ** d for d in degrees)
    return CIModel(degrees, ambient, n, index, dconst, tuple(names))


def split_descriptor(descriptor: str) -> tuple[list[int], int]:
    """Syntax-only parse of ``d1,...,dk@N`` into (degrees, N)."""
    if "@" not in descriptor:
        raise DescriptorSyntaxError(descriptor, descriptor, "missing '@N'")
    left, _, right = descriptor.partition("@")
    right = right.strip()
    if not right.isdigit():
        raise DescriptorSyntaxError(descriptor, right, "ambient dimension must be a positive integer")
    degrees = []
    if left.strip():
        for tok in left.split(","):
            tok = tok.strip()
            if not tok.isdigit():
                raise DescriptorSyntaxError(descriptor, tok, "degree must be a positive integer")
            degrees.append(int(tok))
    return degrees, int(right)


def parse_descriptor(descriptor: str) -> CIModel:
    """Parse ``d1,...,dk@N`` (or ``@N`` for projective space) and validate it."""
    return make_model(*split_descriptor(descriptor))


def format_descriptor(model: CIModel) -> str:
    return ",".join(str(d) for d in model.degrees) + f"@{model.ambient}"


def build_givental(model: CIModel) -> LaurentPoly:
    """f_X = prod_i (x_{i,1}+...+x_{i,d_i-1}+1)^{d_i} / (prod x prod y) + y_1 + ... + y_{i_X-1}."""
    n = model.n
    gens = LaurentPoly.generators(model.var_names)
    one = LaurentPoly.constant(1, n, model.var_names)
    numerator = one
    for group, d in zip(model.x_groups, model.degrees):
        s = one
        for v in group:
            s = s + gens[v]
        numerator = numerator * s ** d
    inverse_monomial = LaurentPoly.monomial((-1,) * n, 1, model.var_names)
    f = numerator * inverse_monomial
    for v in model.y_indices:
        f = f + gens[v]
    return f


@dataclass(frozen=True)
class ModelInvariants:
    n: int
    index: int
    dconst: int
    expected_critical_values: tuple
    expected_exceptional_count: int
    h1nm1: int | None
    precision_bits: int = field(default=256)


def invariants(model: CIModel, precision_bits: int = 256) -> ModelInvariants:
    ctx = _mp.context(precision_bits)
    alpha = _mp.positive_root(ctx, model.dconst, model.index)
    values = tuple(model.index * alpha * _mp.root_of_unity(ctx, r, model.index) for r in range(model.index))
    h = hodge_h1nm1(model) if model.n >= 2 else None
    return ModelInvariants(model.n, model.index, model.dconst, values, model.index, h, precision_bits)


def _h(m: int, a: LaurentPoly, b: LaurentPoly, one: LaurentPoly) -> LaurentPoly:
    # complete homogeneous symmetric polynomial h_m(a, b)
    out = one * 0
    for i in range(m + 1):
        out = out + a ** i * b ** (m - i)
    return out


def _series_inverse(p: LaurentPoly, top: int) -> LaurentPoly:
    """1/p truncated at total degree ``top``; p must have constant term 1."""
    one = LaurentPoly.constant(1, p.nvars, p.var_names)
    if p.constant_term() != 1:
        raise ValueError("series inverse needs constant term 1")
    u = one - p
    out, up = one, one
    for _ in range(top):
        up = (up * u).truncated(top)
        out = out + up
    return out.truncated(top)


def middle_hodge_numbers(degrees, n: int) -> list[int]:
    """h^{p, n-p} for p = 0..n of a smooth complete intersection of dimension n.

    Uses the classical bivariate generating function
    H(a, b) = ((prod_i R_{d_i}) - 1) / ((1+a)(1+b)) + 1/(1-ab) with
    R_d = ((1+a)^d - (1+b)^d) / (a(1+b)^d - b(1+a)^d); the coefficient of
    a^p b^(n-p) is h^{p,n-p}.  The common factor (a-b) is cancelled by hand so
    every division is by a series with constant term 1.
    """
    a, b = LaurentPoly.generators(("a", "b"))
    one = LaurentPoly.constant(1, 2, ("a", "b"))
    prod_r = one
    for d in degrees:
        num = one * 0
        for j in range(1, d + 1):
            num = num + comb(d, j) * _h(j - 1, a, b, one)
        den = one
        for j in range(2, d + 1):
            den = den - comb(d, j) * a * b * _h(j - 2, a, b, one)
        prod_r = (prod_r * (num * _series_inverse(den, n)).truncated(n)).truncated(n)
    H = _series_inverse(one + a, n) * _series_inverse(one + b, n) * (prod_r - 1)
    H = H.truncated(n) + _series_inverse(one - a * b, n)
    out = []
    for p in range(n + 1):
        c = H.coefficient((p, n - p))
        assert c == int(c)
        out.append(int(c))
    return out


def hodge_h1nm1(model: CIModel) -> int:
    if model.n < 2:
        raise ModelError("h^{1,n-1} needs n >= 2")
    return middle_hodge_numbers(model.degrees, model.n)[1]
