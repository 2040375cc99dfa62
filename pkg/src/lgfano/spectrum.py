"""Spectrum of quantum multiplication by c_1 on the hyperplane subring.

Only the subring generated by h is modeled, with q = 1 and relation
h^(n+1) = d h^(n+1-i_X).  Primitive classes only add zero eigenvalues and are
left out.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _mp
from .model import CIModel

__all__ = [
    "SpectrumReport",
    "companion_matrix",
    "characteristic_polynomial",
    "expected_characteristic_polynomial",
    "c1_spectrum",
    "eigensolver_spectrum",
    "match_spectrum",
]

PRIMITIVE_NOTE = "primitive part omitted"


def companion_matrix(model: CIModel) -> list[list[int]]:
    """Matrix of h* on the basis h^0..h^n; column j is the image of h^j."""
    n, i = model.n, model.index
    C = [[0] * (n + 1) for _ in range(n + 1)]
    for j in range(n):
        C[j + 1][j] = 1
    C[n + 1 - i][n] += model.dconst
    return C


def characteristic_polynomial(matrix) -> list:
    """Coefficients [c_0, ..., c_N] of det(lambda I - A), exact (Faddeev-LeVerrier)."""
    N = len(matrix)
    A = [[Fraction(x) for x in row] for row in matrix]
    coeffs = [Fraction(0)] * (N + 1)
    coeffs[N] = Fraction(1)
    M = [[Fraction(0)] * N for _ in range(N)]
    for k in range(1, N + 1):
        # M_k = A M_{k-1} + c_{N-k+1} I
        AM = [[sum(A[r][s] * M[s][c] for s in range(N)) for c in range(N)] for r in range(N)]
        for r in range(N):
            AM[r][r] += coeffs[N - k + 1]
        M = AM
        AMk = [[sum(A[r][s] * M[s][c] for s in range(N)) for c in range(N)] for r in range(N)]
        coeffs[N - k] = -sum(AMk[r][r] for r in range(N)) / k
    return [c.numerator if c.denominator == 1 else c for c in coeffs]


def expected_characteristic_polynomial(model: CIModel) -> list[int]:
    """lambda^(n+1) - d lambda^(n+1-i_X) as a coefficient list."""
    n = model.n
    out = [0] * (n + 2)
    out[n + 1] = 1
    out[n + 1 - model.index] -= model.dconst
    return out


def c1_spectrum(model: CIModel, precision_bits: int = 256) -> list:
    """Eigenvalues of i_X * h*, from the root structure: nonzero part first, then zeros."""
    ctx = _mp.context(precision_bits)
    alpha = _mp.positive_root(ctx, model.dconst, model.index)
    nonzero = [model.index * alpha * _mp.root_of_unity(ctx, r, model.index) for r in range(model.index)]
    return nonzero + [ctx.mpc(0)] * (model.n + 1 - model.index)


def eigensolver_spectrum(model: CIModel, precision_bits: int = 256) -> list:
    """Eigenvalues of i_X * h* from a dense mpmath eigensolver (independent cross-check)."""
    ctx = _mp.context(precision_bits)
    C = companion_matrix(model)
    A = ctx.matrix([[model.index * x for x in row] for row in C])
    return list(ctx.eig(A, left=False, right=False))


def _greedy_pairs(ctx, left, right):
    # left sorted by argument; each takes the nearest unused right entry
    def arg(z):
        z = ctx.mpc(z)
        return (float(ctx.arg(z)) if z != 0 else 0.0, float(abs(z)))

    left = sorted(left, key=arg)
    unused = sorted(right, key=arg)
    pairs = []
    for a in left:
        if not unused:
            break
        j = min(range(len(unused)), key=lambda k: abs(a - unused[k]))
        pairs.append((a, unused.pop(j)))
    return pairs


def _eigensolver_error(ctx, model, closed, numeric) -> tuple:
    """Largest mismatch between the two spectra, and whether it is acceptable.

    Nonzero eigenvalues must agree to 1e-20 (relative).  The zero eigenvalue
    sits in a single Jordan block of size n+1-i_X, so a backward-stable solver
    only resolves it to about eps^(1/size); that bound is used for the zeros.
    """
    pairs = _greedy_pairs(ctx, closed, numeric)
    zero_mult = model.n + 1 - model.index
    scale = model.index * _mp.positive_root(ctx, model.dconst, model.index)
    worst, ok = ctx.mpf(0), len(pairs) == len(closed) == len(numeric)
    zero_tol = 10 * scale * ctx.mpf(2) ** (-ctx.prec / max(zero_mult, 1))
    for a, b in pairs:
        if a == 0:
            err = abs(b)
            ok = ok and err < max(zero_tol, ctx.mpf("1e-20"))
        else:
            err = abs(a - b) / abs(a)
            ok = ok and err < ctx.mpf("1e-20")
        worst = max(worst, err)
    return worst, ok


@dataclass(frozen=True)
class SpectrumReport:
    descriptor: str
    precision_bits: int
    eigenvalues_c1: tuple
    zero_multiplicity: int
    nonzero_values: tuple
    critical_values: tuple
    pairing: tuple
    matched: bool
    max_pairing_error: object
    charpoly: tuple
    charpoly_matches: bool
    eigensolver_max_error: object
    eigensolver_agrees: bool
    note: str = PRIMITIVE_NOTE

    def to_dict(self, digits: int | None = None) -> dict:
        ctx = _mp.context(self.precision_bits)
        c = lambda z: _mp.complex_dict(ctx, z, digits)
        return {
            "model": self.descriptor,
            "eigenvalues_c1": [c(z) for z in self.eigenvalues_c1],
            "zero_multiplicity": self.zero_multiplicity,
            "pairing": [{"eigenvalue": c(a), "critical_value": c(b)} for a, b in self.pairing],
            "max_pairing_error": ctx.nstr(self.max_pairing_error, 5),
            "matched": self.matched,
            "charpoly": [str(x) for x in self.charpoly],
            "charpoly_matches": self.charpoly_matches,
            "eigensolver_max_error": ctx.nstr(self.eigensolver_max_error, 5),
            "eigensolver_agrees": self.eigensolver_agrees,
            "note": self.note,
        }


def match_spectrum(model: CIModel, critical_values, tolerance: float = 1e-20,
                   precision_bits: int = 256) -> SpectrumReport:
    """Pair the nonzero c_1-eigenvalues with located critical values.

    The pairing error is relative to the eigenvalue modulus.  ``matched`` needs
    both lists to have exactly i_X entries and every error below ``tolerance``.
    """
    ctx = _mp.context(precision_bits)
    eig = c1_spectrum(model, precision_bits)
    nonzero = [z for z in eig if z != 0]
    crit = [ctx.mpc(v) for v in critical_values]
    pairs = _greedy_pairs(ctx, nonzero, crit)
    errors = [abs(a - b) / abs(a) for a, b in pairs]
    worst = max(errors, default=ctx.mpf(0))
    matched = (len(nonzero) == len(crit) == model.index and len(pairs) == model.index
               and all(e < tolerance for e in errors))
    C = companion_matrix(model)
    cp = characteristic_polynomial(C)
    solver = eigensolver_spectrum(model, precision_bits)
    solver_err, solver_ok = _eigensolver_error(ctx, model, eig, solver)
    return SpectrumReport(
        descriptor=model.descriptor,
        precision_bits=precision_bits,
        eigenvalues_c1=tuple(eig),
        zero_multiplicity=len(eig) - len(nonzero),
        nonzero_values=tuple(nonzero),
        critical_values=tuple(crit),
        pairing=tuple(pairs),
        matched=matched,
        max_pairing_error=worst,
        charpoly=tuple(cp),
        charpoly_matches=cp == expected_characteristic_polynomial(model),
        eigensolver_max_error=solver_err,
        eigensolver_agrees=solver_ok,
    )
