"""Period sequences of f_X as constant terms of powers, and the closed-form check."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from math import factorial, prod

from .laurent import LaurentPoly, mul
from .model import CIModel, build_givental, format_descriptor

__all__ = [
    "DEFAULT_TERM_CAP",
    "PeriodOrderTooHigh",
    "PeriodReport",
    "period_sequence",
    "givental_coefficients",
    "compare_periods",
    "periods_csv",
    "periods_json",
]

DEFAULT_TERM_CAP = 5_000_000


class PeriodOrderTooHigh(RuntimeError):
    """A power of f_X exceeded the term-count cap."""

    def __init__(self, order: int, terms: int, cap: int, partial: list):
        self.order = order
        self.terms = terms
        self.cap = cap
        self.partial = partial
        super().__init__(f"f^{order} has {terms} terms, above the cap {cap}")


def _paired_constant_term(p: LaurentPoly, q: LaurentPoly):
    # constant term of p*q without forming the product
    small, big = (p, q) if len(p) <= len(q) else (q, p)
    total = 0
    for e, c in small:
        c2 = big.coefficient(tuple(-x for x in e))
        if c2:
            total += c * c2
    return total


def period_sequence(model: CIModel, max_order: int, term_cap: int = DEFAULT_TERM_CAP, f: LaurentPoly | None = None) -> list:
    """[ct(f^0), ..., ct(f^M)] computed exactly.

    Powers are built incrementally; the last power is never expanded, its
    constant term is read off from f^(M-1) and f directly.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    if f is None:
        f = build_givental(model)
    out = [1]
    cur = LaurentPoly.constant(1, f.nvars, f.var_names)
    for m in range(1, max_order + 1):
        out.append(_paired_constant_term(cur, f))
        if m == max_order:
            break
        cur = mul(cur, f)
        if len(cur) > term_cap:
            raise PeriodOrderTooHigh(m, len(cur), term_cap, out)
    return out


def givental_coefficients(model: CIModel, max_order: int) -> list[int]:
    """Coefficients (i_X l)! prod_i (d_i l)! / (l!)^(N+1) at m = i_X l, zero elsewhere."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    out = []
    for m in range(max_order + 1):
        if m % model.index:
            out.append(0)
            continue
        l = m // model.index
        num = factorial(m) * prod(factorial(d * l) for d in model.degrees)
        den = factorial(l) ** (model.ambient + 1)
        q, r = divmod(num, den)
        assert r == 0
        out.append(q)
    return out


@dataclass(frozen=True)
class PeriodReport:
    descriptor: str
    max_order: int
    constant_terms: tuple
    closed_form: tuple
    match: bool
    first_mismatch: int | None

    def rows(self):
        for m, (a, b) in enumerate(zip(self.constant_terms, self.closed_form)):
            yield m, a, b, a == b

    def to_dict(self) -> dict:
        return {
            "model": self.descriptor,
            "max_order": self.max_order,
            "match": self.match,
            "first_mismatch": self.first_mismatch,
            "rows": [{"m": m, "constant_term": str(a), "closed_form": str(b), "equal": eq}
                     for m, a, b, eq in self.rows()],
        }


def compare_periods(model: CIModel, max_order: int, term_cap: int = DEFAULT_TERM_CAP) -> PeriodReport:
    ct = period_sequence(model, max_order, term_cap)
    cf = givental_coefficients(model, max_order)
    first = next((m for m, (a, b) in enumerate(zip(ct, cf)) if a != b), None)
    return PeriodReport(format_descriptor(model), max_order, tuple(ct), tuple(cf), first is None, first)


def periods_csv(report: PeriodReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "constant_term", "closed_form", "equal"])
    for m, a, b, eq in report.rows():
        w.writerow([m, a, b, str(eq).lower()])
    return buf.getvalue()


def periods_json(report: PeriodReport) -> str:
    return json.dumps(report.to_dict(), indent=2)
