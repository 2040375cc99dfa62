import mpmath
import pytest

from lgfano import _mp
from lgfano.critical import (CriticalPointRecord, NewtonFailure, SolverConfig, classify, count_clusters,
                             default_value_tolerance, locate_critical_points, newton_refine, probe_random,
                             symmetric_critical_points)
from lgfano.laurent import LaurentPoly, evaluate, gradient_at
from lgfano.model import build_givental, make_model, parse_descriptor

BITS = 256
TOL = mpmath.mpf(10) ** -60
CORPUS = ["@1", "@2", "@3", "2@3", "2@4", "3@3", "3@4", "4@4", "2,2@5", "2,3@5"]


def near(a, b, tol=TOL):
    return abs(a - b) < tol


def test_symmetric_p1():
    pts = symmetric_critical_points(parse_descriptor("@1"), BITS)
    assert [p.branch for p in pts] == [0, 1]
    assert near(pts[0].coordinates[0], 1) and near(pts[1].coordinates[0], -1)
    assert near(pts[0].value, 2) and near(pts[1].value, -2)


def test_symmetric_quadric_surface():
    pts = symmetric_critical_points(parse_descriptor("2@3"), BITS)
    assert [tuple(p.coordinates) for p in pts] == [(1, 2), (1, -2)]
    assert [p.value for p in pts] == [4, -4]


def test_symmetric_cubic_surface():
    pts = symmetric_critical_points(parse_descriptor("3@3"), BITS)
    assert len(pts) == 1
    assert tuple(pts[0].coordinates) == (1, 1) and pts[0].value == 27
    assert pts[0].hessian_rank == 2


@pytest.mark.parametrize("desc", CORPUS + ["2,2,2@6", "5@5", "@6"])
def test_symmetric_points_solve_scalar_system(desc):
    m = parse_descriptor(desc)
    ctx = _mp.context(BITS)
    tol = ctx.mpf(2) ** (-BITS // 2) * (1 + m.dconst) * 10
    f = build_givental(m)
    pts = symmetric_critical_points(m, BITS, f)
    assert len(pts) == m.index
    for p in pts:
        y = p.coordinates[m.y_indices[0]] if m.y_indices else None
        lam = p.value
        assert near(evaluate(f, p.coordinates, BITS), lam, tol)
        assert max(abs(g) for g in gradient_at(f, p.coordinates, BITS)) < 1e-30
        if m.index == 1:
            assert near(lam, m.dconst, tol)
            continue
        i = m.index
        # F = 0 read with the factor y on (i_X - 1), as in the y-derivative equation
        assert near(m.dconst, (lam - (i - 1) * y) * y ** (i - 1), tol)
        assert near((lam - (i - 1) * y) * y ** (i - 2) - y ** (i - 1), 0, tol)
        assert near(lam, i * y, tol)
        assert near(m.dconst * i, lam * y ** (i - 1), tol)


@pytest.mark.parametrize("desc", ["@1", "@3", "2@3", "3@4", "2,2@5"])
def test_scalar_system_without_y_factor_forces_y_one(desc):
    # lambda = i y and d i = lambda y^(i-1) give d = y^i; then d = (lambda - i + 1) y^(i-1)
    # reduces to (i - 1)(y - 1) = 0, so it can hold only on the branch y = 1
    m = parse_descriptor(desc)
    for p in symmetric_critical_points(m, BITS):
        y = p.coordinates[m.y_indices[0]]
        literal = near(m.dconst, (p.value - m.index + 1) * y ** (m.index - 1), 1e-60)
        assert literal == near(y, 1, 1e-60)


def test_newton_scalar():
    x, = LaurentPoly.generators(("x",))
    rec = newton_refine(x + x ** -1, [1.1])
    assert isinstance(rec, CriticalPointRecord)
    assert near(rec.coordinates[0], 1, 1e-30) and near(rec.value, 2, 1e-30)
    assert rec.residual < 1e-30


def test_newton_quadric_surface():
    f = build_givental(parse_descriptor("2@3"))
    rec = newton_refine(f, [1.05, 1.9])
    assert near(rec.coordinates[0], 1, 1e-30) and near(rec.coordinates[1], 2, 1e-30)
    assert near(rec.value, 4, 1e-30)


def test_newton_cubic_surface_central_locus():
    # on x1 + x2 + 1 = 0 both f and grad f vanish (cube of a linear form)
    f = build_givental(parse_descriptor("3@3"))
    rec = newton_refine(f, [0.5 + 0.31j, -1.5 - 0.29j])
    assert isinstance(rec, CriticalPointRecord)
    assert abs(rec.value) < default_value_tolerance(parse_descriptor("3@3"))
    assert abs(rec.coordinates[0] + rec.coordinates[1] + 1) < 1e-8


def test_newton_failure_is_reported():
    x, = LaurentPoly.generators(("x",))
    out = newton_refine(x, [1.0])  # df/dx = 1 never vanishes
    assert isinstance(out, NewtonFailure) and not out
    with pytest.raises(ValueError):
        newton_refine(x + x ** -1, [0.0])


def test_probe_p1_finds_both_points():
    pts = probe_random(parse_descriptor("@1"), SolverConfig(trials=50, seed=42))
    vals = sorted(float(p.value.real) for p in pts)
    assert len(pts) == 2 and vals == pytest.approx([-2, 2])


def test_probe_quadric_surface():
    m = parse_descriptor("2@3")
    pts = probe_random(m, SolverConfig(trials=200))
    cls = classify(pts, default_value_tolerance(m))
    assert sorted(float(p.value.real) for p in cls.nonzero_value) == pytest.approx([-4, 4])
    assert cls.near_zero_value == ()


def test_probe_cubic_surface():
    m = parse_descriptor("3@3")
    search = locate_critical_points(m, SolverConfig(trials=200))
    assert len(search.nonzero_value) == 1 and near(search.nonzero_value[0].value, 27, 1e-40)
    assert search.near_zero_value, "central-fiber points expected"
    assert search.near_zero_clusters >= 1
    for p in search.near_zero_value:
        assert abs(p.coordinates[0] + p.coordinates[1] + 1) < 1e-8
    assert search.extra_nonzero == ()
    assert search.rediscovered_branches == (0,)


def test_classify_p2_order():
    m = parse_descriptor("@2")
    pts = classify(symmetric_critical_points(m, BITS), default_value_tolerance(m)).nonzero_value
    args = [float(mpmath.arg(p.value)) for p in pts]
    assert args == sorted(args)
    assert all(p.classification == "nonzero_value" for p in pts)


def test_count_clusters():
    mk = lambda *z: CriticalPointRecord(tuple(complex(c) for c in z), 0, 0, 0)
    pts = [mk(0, 0), mk(0.1, 0), mk(0.2, 0), mk(5, 5)]
    assert count_clusters(pts, 0.15) == 2
    assert count_clusters([], 1.0) == 0


def test_probe_is_deterministic():
    m = parse_descriptor("2@3")
    cfg = SolverConfig(trials=30, seed=7)
    a, b = probe_random(m, cfg), probe_random(m, cfg)
    assert [p.coordinates for p in a] == [p.coordinates for p in b]
    assert a.failures == b.failures


def test_record_json():
    rec = symmetric_critical_points(parse_descriptor("2@3"), BITS)[1]
    d = rec.to_dict(BITS, 20)
    assert d["value"] == {"re": "-4.0", "im": "0.0"}
    assert d["branch"] == 1 and d["hessian_rank"] == 2
