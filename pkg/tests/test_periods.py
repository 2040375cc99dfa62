import csv
import io
import itertools
import json
from math import comb, factorial

import numpy as np
import pytest

from lgfano.model import build_givental, make_model, parse_descriptor
from lgfano.periods import (PeriodOrderTooHigh, compare_periods, givental_coefficients, period_sequence,
                            periods_csv, periods_json)

CORPUS = ["@1", "@2", "@3", "2@3", "2@4", "3@3", "3@4", "4@4", "2,2@5", "2,3@5"]


def torus_average(f, m, grid):
    """Constant term of f^m as the mean of f^m over a grid of roots of unity (exact once grid > exponent span)."""
    exps = np.array([e for e, _ in f], dtype=float)
    coeffs = np.array([complex(c) for _, c in f])
    roots = np.exp(2j * np.pi * np.arange(grid) / grid)
    total = 0
    for z in itertools.product(roots, repeat=f.nvars):
        w = np.log(np.array(z))
        total += np.sum(coeffs * np.exp(exps @ w)) ** m
    return total / grid ** f.nvars


def test_p1_sequence():
    assert period_sequence(parse_descriptor("@1"), 4) == [1, 0, 2, 0, 6]


def test_p2_sequence():
    seq = period_sequence(parse_descriptor("@2"), 6)
    assert seq == [1, 0, 0, 6, 0, 0, 90]


def test_quadric_surface_sequence():
    assert period_sequence(parse_descriptor("2@3"), 2) == [1, 0, 4]


def test_closed_form_examples():
    assert givental_coefficients(parse_descriptor("@1"), 4)[2::2] == [2, 6]
    assert givental_coefficients(parse_descriptor("3@3"), 2) == [1, 6, 90]
    assert givental_coefficients(parse_descriptor("2@3"), 2) == [1, 0, 4]


@pytest.mark.parametrize("desc, order", [("@2", 6), ("3@4", 4), ("@1", 0), ("4@4", 0)])
def test_compare_examples(desc, order):
    rep = compare_periods(parse_descriptor(desc), order)
    assert rep.match and rep.first_mismatch is None
    assert len(rep.constant_terms) == order + 1


@pytest.mark.parametrize("desc", ["@2", "2@3", "3@3"])
def test_against_torus_average(desc):
    m = parse_descriptor(desc)
    f = build_givental(m)
    seq = period_sequence(m, 6)
    for k in range(7):
        assert abs(torus_average(f, k, 4 * k + 5) - seq[k]) < 1e-6 * (1 + seq[k])


def test_quadric_surface_binomial_oracle():
    # choose j copies of (x+1)^2/(xy): the y-degree forces j = m/2, then ct((x+1)^2/x)^j = C(2j, j)
    seq = period_sequence(parse_descriptor("2@3"), 12)
    expected = [comb(m, m // 2) * comb(m, m // 2) if m % 2 == 0 else 0 for m in range(13)]
    assert seq == expected


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_projective_space_multinomial_oracle(N):
    seq = period_sequence(make_model([], N), 12)
    for m, a in enumerate(seq):
        l, r = divmod(m, N + 1)
        assert a == (factorial(m) // factorial(l) ** (N + 1) if r == 0 else 0)


@pytest.mark.parametrize("desc", CORPUS)
def test_corpus_divisibility_and_integrality(desc):
    m = parse_descriptor(desc)
    seq = period_sequence(m, 12)
    assert seq[0] == 1
    for k, a in enumerate(seq):
        assert isinstance(a, int) and a >= 0
        if k % m.index:
            assert a == 0


def test_term_cap():
    with pytest.raises(PeriodOrderTooHigh) as info:
        period_sequence(parse_descriptor("2,2@5"), 12, term_cap=200)
    exc = info.value
    assert exc.order < 12
    assert exc.partial == period_sequence(parse_descriptor("2,2@5"), len(exc.partial) - 1)


def test_csv_and_json():
    rep = compare_periods(parse_descriptor("2@3"), 4)
    rows = list(csv.reader(io.StringIO(periods_csv(rep))))
    assert rows[0] == ["m", "constant_term", "closed_form", "equal"]
    assert rows[3] == ["2", "4", "4", "true"]
    data = json.loads(periods_json(rep))
    assert data["match"] is True
    assert [r["constant_term"] for r in data["rows"]] == ["1", "0", "4", "0", "36"]
