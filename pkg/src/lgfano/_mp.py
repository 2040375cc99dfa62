"""Arbitrary-precision helpers built on private mpmath contexts.

Every numeric routine in the package takes an explicit ``precision_bits``;
the global ``mpmath.mp`` context is never touched.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath.ctx_mp import MPContext

MIN_PRECISION = 64


@lru_cache(maxsize=None)
def context(precision_bits: int) -> MPContext:
    """Return a dedicated mpmath context fixed at ``precision_bits``.

    Contexts are cached per precision and must not be mutated by callers.
    """
    if int(precision_bits) != precision_bits or precision_bits < MIN_PRECISION:
        raise ValueError(f"precision_bits must be an integer >= {MIN_PRECISION}, got {precision_bits!r}")
    ctx = MPContext()
    ctx.prec = int(precision_bits)
    return ctx


def to_mpc(ctx: MPContext, value) -> mpmath.mpc:
    if isinstance(value, Fraction):
        return ctx.mpc(ctx.mpf(value.numerator) / value.denominator)
    if isinstance(value, (mpmath.mpc, mpmath.mpf)):
        return ctx.mpc(value)
    if isinstance(value, complex):
        return ctx.mpc(value.real, value.imag)
    return ctx.mpc(value)


def to_mpf(ctx: MPContext, value) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    return ctx.mpf(value)


def digits_for(precision_bits: int) -> int:
    return int(precision_bits * 0.30103) + 1


def decimal_str(ctx: MPContext, x, digits: int | None = None) -> str:
    """Deterministic decimal rendering of a real mp number."""
    if digits is None:
        digits = digits_for(ctx.prec)
    return ctx.nstr(ctx.mpf(x), digits, min_fixed=-5, max_fixed=digits)


def complex_dict(ctx: MPContext, z, digits: int | None = None) -> dict:
    z = ctx.mpc(z)
    return {"re": decimal_str(ctx, z.real, digits), "im": decimal_str(ctx, z.imag, digits)}


def root_of_unity(ctx: MPContext, r: int, m: int) -> mpmath.mpc:
    """exp(2*pi*i*r/m), with the real and imaginary parts snapped at quarter turns."""
    r %= m
    if 4 * r % m == 0:
        return ctx.mpc(*{0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}[4 * r // m])
    return ctx.expjpi(ctx.mpf(2 * r) / m)


def positive_root(ctx: MPContext, d: int, m: int) -> mpmath.mpf:
    """Positive real m-th root of the positive integer d."""
    return ctx.root(ctx.mpf(d), m)


def singular_values(ctx: MPContext, rows) -> list:
    """Singular values of a complex matrix, sorted in decreasing order."""
    n = len(rows)
    if n == 0:
        return []
    A = ctx.matrix(n, len(rows[0]))
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            A[i, j] = v
    S = ctx.svd_c(A, compute_uv=False)
    return sorted((S[i] for i in range(S.rows)), reverse=True)


def numeric_rank(svals, relative_threshold) -> int:
    if not svals:
        return 0
    top = svals[0]
    if top == 0:
        return 0
    return sum(1 for s in svals if s > relative_threshold * top)
