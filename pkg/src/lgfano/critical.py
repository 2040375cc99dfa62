"""Torus critical points of f_X.

Three routes: the closed-form symmetric points, Newton refinement of an
arbitrary start, and seeded random probing for points nobody predicted.
Newton first runs in complex128 to get close cheaply and then polishes in
mpmath at the requested precision; only the polished residual counts.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _mp
from .laurent import LaurentPoly, gradient_at
from .model import CIModel, build_givental

__all__ = [
    "SolverConfig",
    "CriticalPointRecord",
    "NewtonFailure",
    "ResidualCheckError",
    "ProbeResult",
    "Classification",
    "CriticalSearch",
    "CriticalSystem",
    "symmetric_critical_points",
    "newton_refine",
    "probe_random",
    "classify",
    "locate_critical_points",
    "default_value_tolerance",
]


class ResidualCheckError(RuntimeError):
    """A closed-form critical point failed its gradient check (a bug, not a math failure)."""


@dataclass(frozen=True)
class SolverConfig:
    precision_bits: int = 256
    residual_tolerance: float = 1e-30
    newton_max_iter: int = 200
    dedup_tolerance: float = 1e-20
    value_tolerance: float | None = None
    value_match_tolerance: float = 1e-20
    rank_threshold: float = 1e-10
    trials: int = 200
    seed: int = 42
    modulus_range: tuple[float, float] = (0.2, 5.0)
    cluster_radius: float = 0.25
    # complex128 pre-phase
    float_max_iter: int = 100
    escape_bound: float = 1e12
    stall_limit: int = 8


def default_value_tolerance(model: CIModel, precision_bits: int = 256) -> float:
    alpha = float(_mp.positive_root(_mp.context(precision_bits), model.dconst, model.index))
    return 1e-10 * (1 + model.index * alpha)


@dataclass(frozen=True)
class CriticalPointRecord:
    coordinates: tuple
    value: object
    residual: object
    hessian_rank: int
    branch: int | None = None
    source: str = "newton"
    iterations: int = 0
    classification: str | None = None

    def to_dict(self, precision_bits: int, digits: int | None = None) -> dict:
        ctx = _mp.context(precision_bits)
        return {
            "coordinates": [_mp.complex_dict(ctx, z, digits) for z in self.coordinates],
            "value": _mp.complex_dict(ctx, self.value, digits),
            "residual": ctx.nstr(self.residual, 5),
            "hessian_rank": self.hessian_rank,
            "branch": self.branch,
            "source": self.source,
            "classification": self.classification,
        }


@dataclass(frozen=True)
class NewtonFailure:
    """Newton did not certify a critical point from this start."""

    reason: str  # "divergence", "degenerate" or "escape"
    iterations: int
    residual: float | None = None

    def __bool__(self):
        return False


class CriticalSystem:
    """Value, gradient and Hessian of a Laurent polynomial from its monomial values.

    With m_t = c_t z^{e_t}, z_u df/dz_u = sum_t e_tu m_t and
    z_u z_v d2f/dz_u dz_v = sum_t e_tu (e_tv - [u == v]) m_t.
    """

    def __init__(self, f: LaurentPoly):
        self.f = f
        self.n = f.nvars
        items = f.sorted_terms()
        self.exponents = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), self.n)
        self.coeffs = [c for _, c in items]
        self._coeffs_np = np.array([float(c) for c in self.coeffs], dtype=np.complex128)
        E = self.exponents
        self._second = [[E[:, u] * (E[:, v] - (u == v)) for v in range(self.n)] for u in range(self.n)]
        self._mp_cache = {}

    # complex128

    def eval_float(self, z: np.ndarray):
        m = self._coeffs_np * np.prod(z[None, :] ** self.exponents, axis=1)
        value = m.sum()
        g = (self.exponents.T @ m) / z
        H = np.empty((self.n, self.n), dtype=np.complex128)
        for u in range(self.n):
            for v in range(u, self.n):
                H[u, v] = H[v, u] = (self._second[u][v] @ m) / (z[u] * z[v])
        return value, g, H

    # mpmath

    def _mp_terms(self, ctx):
        key = ctx.prec
        if key not in self._mp_cache:
            rows = [[int(x) for x in row] for row in self.exponents]
            coeffs = [_mp.to_mpc(ctx, c) for c in self.coeffs]
            second = [[[int(x) for x in self._second[u][v]] for v in range(self.n)] for u in range(self.n)]
            self._mp_cache[key] = (rows, coeffs, second)
        return self._mp_cache[key]

    def eval_mp(self, ctx, z: Sequence):
        rows, coeffs, second = self._mp_terms(ctx)
        n = self.n
        powers = [{} for _ in range(n)]
        m = []
        for row, c in zip(rows, coeffs):
            t = c
            for u, k in enumerate(row):
                if k:
                    zk = powers[u].get(k)
                    if zk is None:
                        zk = powers[u][k] = z[u] ** k
                    t = t * zk
            m.append(t)
        value = ctx.fsum(m)
        g = [ctx.fsum(e[u] * mt for e, mt in zip(rows, m) if e[u]) / z[u] for u in range(n)]
        H = [[None] * n for _ in range(n)]
        for u in range(n):
            for v in range(u, n):
                w = second[u][v]
                H[u][v] = H[v][u] = ctx.fsum(wt * mt for wt, mt in zip(w, m) if wt) / (z[u] * z[v])
        return value, g, H


@lru_cache(maxsize=64)
def _system(f: LaurentPoly) -> CriticalSystem:
    return CriticalSystem(f)


def _max_abs(ctx, vec):
    return max((abs(x) for x in vec), default=ctx.mpf(0))


def _record(ctx, system: CriticalSystem, z, config: SolverConfig, **kw) -> CriticalPointRecord:
    value, g, H = system.eval_mp(ctx, z)
    svals = _mp.singular_values(ctx, H)
    rank = _mp.numeric_rank(svals, config.rank_threshold)
    return CriticalPointRecord(tuple(z), value, _max_abs(ctx, g), rank, **kw)


def symmetric_critical_points(model: CIModel, precision_bits: int = 256, f: LaurentPoly | None = None,
                              config: SolverConfig | None = None) -> list[CriticalPointRecord]:
    """The i_X points with all x = 1 and all y = exp(2 pi i r / i_X) d^(1/i_X)."""
    config = config or SolverConfig(precision_bits=precision_bits)
    f = f if f is not None else build_givental(model)
    ctx = _mp.context(precision_bits)
    alpha = _mp.positive_root(ctx, model.dconst, model.index)
    ys = set(model.y_indices)
    system = _system(f)
    out = []
    for r in range(model.index):
        y = alpha * _mp.root_of_unity(ctx, r, model.index)
        z = [y if v in ys else ctx.mpc(1) for v in range(model.n)]
        residual = _max_abs(ctx, gradient_at(f, z, precision_bits))
        if residual >= config.residual_tolerance:
            raise ResidualCheckError(f"branch {r}: gradient residual {residual} at closed-form point")
        rec = _record(ctx, system, z, config, branch=r, source="symmetric")
        out.append(replace(rec, value=model.index * y, residual=residual))
    return out


def _log_newton(system: CriticalSystem, z: np.ndarray, config: SolverConfig):
    """Damped complex128 Newton in w = log z.

    Returns (z, iterations, converged).  ``converged`` means close enough to
    hand over to the high-precision phase.
    """
    E = system.exponents.astype(np.float64)
    c = system._coeffs_np
    wmax = np.log(config.escape_bound)

    def log_grad(w):
        m = c * np.exp(E @ w)
        return m, E.T @ m

    w = np.log(z)
    m, G = log_grad(w)
    gnorm = np.linalg.norm(G)
    for it in range(1, config.float_max_iter + 1):
        Hw = E.T @ (m[:, None] * E)
        step = np.linalg.lstsq(Hw, -G, rcond=None)[0]
        t = 1.0
        while True:
            w_new = w + t * step
            if np.all(np.isfinite(w_new)) and np.all(np.abs(w_new.real) < wmax):
                m_new, G_new = log_grad(w_new)
                g_new = np.linalg.norm(G_new)
                if np.isfinite(g_new) and (g_new <= (1 - 1e-4 * t) * gnorm or t < 1 / 64):
                    break
            t /= 2
            if t < 1 / 1024:
                # stuck; near a degenerate critical locus cancellation alone causes this
                return np.exp(w), it, bool(gnorm <= 1e-8 * (np.abs(m).sum() + 1e-300))
        w, m, G, gnorm = w_new, m_new, G_new, g_new
        scale = np.abs(m).sum() + 1e-300
        if gnorm <= 1e-14 * scale or np.linalg.norm(t * step) <= 1e-14 * (1 + np.linalg.norm(w)):
            return np.exp(w), it, True
    scale = np.abs(m).sum() + 1e-300
    return np.exp(w), config.float_max_iter, bool(gnorm <= 1e-8 * scale)


def newton_refine(f: LaurentPoly, start: Sequence, config: SolverConfig | None = None):
    """Newton on grad f = 0 from ``start``; a record on success, a :class:`NewtonFailure` otherwise."""
    config = config or SolverConfig()
    system = _system(f)
    z = np.array([complex(s) for s in start], dtype=np.complex128)
    if np.any(z == 0):
        raise ValueError("start point has a zero coordinate")
    lo, hi = 1.0 / config.escape_bound, config.escape_bound
    z, it, ok = _log_newton(system, z, config)
    if not ok:
        return NewtonFailure("divergence", it)

    ctx = _mp.context(config.precision_bits)
    zm = [ctx.mpc(complex(c)) for c in z]
    best, stall = None, 0
    tol = config.residual_tolerance
    for k in range(config.newton_max_iter):
        _, g, H = system.eval_mp(ctx, zm)
        res = _max_abs(ctx, g)
        if res < tol:
            return _record(ctx, system, zm, config, iterations=it + k)
        if best is None or res < best * 0.999:
            best, stall = res, 0
        else:
            stall += 1
            if stall >= config.stall_limit:
                return NewtonFailure("divergence", it + k, float(res))
        # Levenberg-Marquardt with mu = |g|^2: plain Newton at a nondegenerate zero,
        # bounded tangent steps along a positive-dimensional critical locus
        A = ctx.matrix(H)
        AH = A.H
        mu = sum(abs(x) ** 2 for x in g)
        try:
            step = ctx.lu_solve(AH * A + mu * ctx.eye(len(g)), AH * ctx.matrix([-x for x in g]))
        except ZeroDivisionError:
            return NewtonFailure("degenerate", it + k, float(res))
        zm = [zi + step[i] for i, zi in enumerate(zm)]
        if any(not (lo < abs(zi) < hi) for zi in zm):
            return NewtonFailure("escape", it + k, float(res))
    return NewtonFailure("divergence", it + config.newton_max_iter, float(best) if best is not None else None)


def _start_point(seed: int, trial: int, n: int, modulus_range) -> np.ndarray:
    rng = np.random.default_rng([seed, trial])
    lo, hi = np.log(modulus_range[0]), np.log(modulus_range[1])
    moduli = np.exp(rng.uniform(lo, hi, n))
    args = rng.uniform(0.0, 2 * np.pi, n)
    return moduli * np.exp(1j * args)


def _distance(ctx, p: CriticalPointRecord, q: CriticalPointRecord):
    return max(abs(a - b) for a, b in zip(p.coordinates, q.coordinates))


def _dedup(ctx, points, tol) -> list:
    kept = []
    for p in points:
        if all(_distance(ctx, p, q) >= tol for q in kept):
            kept.append(p)
    return kept


@dataclass(frozen=True)
class ProbeResult:
    points: tuple
    trials: int
    converged: int
    failures: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _branch_of(ctx, model: CIModel, value, tol) -> int | None:
    alpha = _mp.positive_root(ctx, model.dconst, model.index)
    scale = model.index * alpha
    for r in range(model.index):
        if abs(value - scale * _mp.root_of_unity(ctx, r, model.index)) < tol * scale:
            return r
    return None


def probe_random(model: CIModel, config: SolverConfig | None = None, f: LaurentPoly | None = None) -> ProbeResult:
    """Newton from ``config.trials`` seeded starts; converged points deduplicated in trial order."""
    config = config or SolverConfig()
    f = f if f is not None else build_givental(model)
    ctx = _mp.context(config.precision_bits)
    found, failures = [], {}
    for trial in range(config.trials):
        start = _start_point(config.seed, trial, model.n, config.modulus_range)
        out = newton_refine(f, start, config)
        if isinstance(out, NewtonFailure):
            failures[out.reason] = failures.get(out.reason, 0) + 1
            continue
        found.append(replace(out, source=f"probe:{trial}",
                             branch=_branch_of(ctx, model, out.value, config.value_match_tolerance)))
    points = _dedup(ctx, found, config.dedup_tolerance)
    return ProbeResult(tuple(points), config.trials, len(found), dict(sorted(failures.items())))


@dataclass(frozen=True)
class Classification:
    nonzero_value: tuple
    near_zero_value: tuple


def classify(points, value_tolerance: float) -> Classification:
    """Split by |value| against ``value_tolerance``; nonzero values sorted by argument."""
    nonzero, near = [], []
    for p in points:
        if abs(p.value) > value_tolerance:
            nonzero.append(replace(p, classification="nonzero_value"))
        else:
            near.append(replace(p, classification="near_zero_value"))

    def arg_key(p):
        v = complex(p.value)
        return (float(np.angle(v)), abs(v))

    nonzero.sort(key=arg_key)
    return Classification(tuple(nonzero), tuple(near))


def count_clusters(points, radius: float) -> int:
    """Single-linkage cluster count by coordinate distance."""
    pts = [np.array([complex(z) for z in p.coordinates]) for p in points]
    parent = list(range(len(pts)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.max(np.abs(pts[i] - pts[j])) < radius:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(len(pts))})


@dataclass(frozen=True)
class CriticalSearch:
    """Combined outcome of the closed-form construction and random probing."""

    symmetric: tuple
    probe: ProbeResult
    nonzero_value: tuple
    near_zero_value: tuple
    near_zero_clusters: int
    rediscovered_branches: tuple
    extra_nonzero: tuple
    value_tolerance: float


def locate_critical_points(model: CIModel, config: SolverConfig | None = None,
                           f: LaurentPoly | None = None) -> CriticalSearch:
    config = config or SolverConfig()
    f = f if f is not None else build_givental(model)
    ctx = _mp.context(config.precision_bits)
    vtol = config.value_tolerance if config.value_tolerance is not None else default_value_tolerance(model, config.precision_bits)
    sym = symmetric_critical_points(model, config.precision_bits, f, config)
    probe = probe_random(model, config, f)
    probed = classify(probe.points, vtol)
    merged = _dedup(ctx, list(sym) + list(probed.nonzero_value), config.dedup_tolerance)
    cls = classify(merged, vtol)
    extra = tuple(p for p in cls.nonzero_value if p.source != "symmetric")
    rediscovered = tuple(sorted({p.branch for p in probed.nonzero_value if p.branch is not None}))
    return CriticalSearch(
        symmetric=tuple(sym),
        probe=probe,
        nonzero_value=cls.nonzero_value,
        near_zero_value=probed.near_zero_value,
        near_zero_clusters=count_clusters(probed.near_zero_value, config.cluster_radius),
        rediscovered_branches=rediscovered,
        extra_nonzero=extra,
        value_tolerance=vtol,
    )
