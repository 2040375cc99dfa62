"""Pipeline orchestration and report rendering.

``run_report`` chains model -> periods -> critical points -> Hessians ->
spectrum for one descriptor.  JSON is the stable output; CSV and markdown are
views of the same data.  Wall-clock timings are kept out of the JSON unless
requested, since the JSON must be byte-identical across runs.
"""
from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

from . import _mp
from .critical import CriticalSearch, SolverConfig, locate_critical_points
from .hessian import block_nondegeneracy, certify_odp
from .laurent import format_poly
from .model import (CIModel, DescriptorSyntaxError, ModelError, ModelInvariants, build_givental, invariants,
                    parse_descriptor, split_descriptor)
from .periods import DEFAULT_TERM_CAP, PeriodOrderTooHigh, PeriodReport, compare_periods
from .spectrum import SpectrumReport, match_spectrum

__all__ = [
    "SCHEMA_VERSION",
    "EXIT_OK",
    "EXIT_FAIL",
    "EXIT_USAGE",
    "RunConfig",
    "FullReport",
    "CorpusParseError",
    "CorpusResult",
    "default_precision",
    "default_corpus",
    "run_report",
    "run_corpus",
    "read_corpus",
    "render",
    "render_corpus",
]

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
HARD_VERDICTS = ("fiber_count", "critical_values", "odp", "spectrum", "periods")


def default_precision() -> int:
    return int(os.environ.get("LGFANO_PRECISION", "256"))


@dataclass(frozen=True)
class RunConfig:
    descriptor: str = "@1"
    precision_bits: int = field(default_factory=default_precision)
    period_order: int = 12
    trials: int = 200
    seed: int = 42
    output_format: str = "json"
    residual_tolerance: float = 1e-30
    value_tolerance: float | None = None
    value_match_tolerance: float = 1e-20
    dedup_tolerance: float = 1e-20
    rank_threshold: float = 1e-10
    term_cap: int = DEFAULT_TERM_CAP
    digits: int = 40
    include_timings: bool = False

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            precision_bits=self.precision_bits,
            residual_tolerance=self.residual_tolerance,
            dedup_tolerance=self.dedup_tolerance,
            value_tolerance=self.value_tolerance,
            value_match_tolerance=self.value_match_tolerance,
            rank_threshold=self.rank_threshold,
            trials=self.trials,
            seed=self.seed,
        )

    def public_dict(self) -> dict:
        d = asdict(self)
        d.pop("descriptor")
        d.pop("output_format")
        d.pop("include_timings")
        return d


@dataclass
class FullReport:
    model: CIModel
    config: RunConfig
    invariants: ModelInvariants
    polynomial: str
    periods: PeriodReport | None
    period_skip: str | None
    search: CriticalSearch
    hessians: list
    spectrum: SpectrumReport
    verdicts: dict
    timings: dict

    @property
    def exit_status(self) -> int:
        return EXIT_FAIL if any(self.verdicts[k]["status"] == "fail" for k in HARD_VERDICTS) else EXIT_OK

    def to_dict(self) -> dict:
        cfg = self.config
        ctx = _mp.context(cfg.precision_bits)
        digits = cfg.digits
        inv = self.invariants
        s = self.search
        out = {
            "schema_version": SCHEMA_VERSION,
            "model": {
                "descriptor": self.model.descriptor,
                "degrees": list(self.model.degrees),
                "ambient": self.model.ambient,
                "n": inv.n,
                "index": inv.index,
                "d": inv.dconst,
                "h1nm1": inv.h1nm1,
                "baseline_only": self.model.baseline_only,
                "expected_exceptional_count": inv.expected_exceptional_count,
                "expected_critical_values": [_mp.complex_dict(ctx, z, digits) for z in inv.expected_critical_values],
                "variables": list(self.model.var_names),
                "givental_polynomial": self.polynomial,
            },
            "config": cfg.public_dict(),
            "verdicts": self.verdicts,
            "periods": self.periods.to_dict() if self.periods else {"skipped": self.period_skip},
            "critical_points": {
                "value_tolerance": repr(s.value_tolerance),
                "nonzero_value": [p.to_dict(cfg.precision_bits, digits) for p in s.nonzero_value],
                "near_zero_value_points": len(s.near_zero_value),
                "near_zero_clusters": s.near_zero_clusters,
                "probe": {
                    "trials": s.probe.trials,
                    "converged": s.probe.converged,
                    "distinct": len(s.probe.points),
                    "failures": s.probe.failures,
                    "rediscovered_branches": list(s.rediscovered_branches),
                    "extra_nonzero": len(s.extra_nonzero),
                },
            },
            "hessians": [h.to_dict(digits) for h in self.hessians],
            "spectrum": self.spectrum.to_dict(digits),
        }
        if cfg.include_timings:
            out["timings"] = {k: round(v, 4) for k, v in self.timings.items()}
        return out


def _verdict(status: str, **detail) -> dict:
    return {"status": status, **detail}


def run_report(config: RunConfig) -> FullReport:
    """Run every stage for one descriptor and collect the per-claim verdicts."""
    timings = {}
    t0 = time.perf_counter()
    model = parse_descriptor(config.descriptor)
    inv = invariants(model, config.precision_bits)
    f = build_givental(model)
    timings["model"] = time.perf_counter() - t0

    t = time.perf_counter()
    periods, skip = None, None
    try:
        periods = compare_periods(model, config.period_order, config.term_cap)
    except PeriodOrderTooHigh as exc:
        # retry at the last order that fit under the cap
        reached = exc.order
        skip = f"skipped at order {reached}"
        if reached >= 1:
            periods = compare_periods(model, reached, config.term_cap)
    timings["periods"] = time.perf_counter() - t

    t = time.perf_counter()
    search = locate_critical_points(model, config.solver_config(), f)
    timings["critical"] = time.perf_counter() - t

    t = time.perf_counter()
    hessians = [certify_odp(model, p, config.precision_bits, config.rank_threshold, f) for p in search.nonzero_value]
    timings["hessian"] = time.perf_counter() - t

    t = time.perf_counter()
    spectrum = match_spectrum(model, [p.value for p in search.nonzero_value], config.value_match_tolerance,
                              config.precision_bits)
    timings["spectrum"] = time.perf_counter() - t
    timings["total"] = time.perf_counter() - t0

    ctx = _mp.context(config.precision_bits)
    count = len(search.nonzero_value)
    verdicts = {
        "fiber_count": _verdict("pass" if count == model.index else "fail", expected=model.index, found=count),
    }
    expected = list(inv.expected_critical_values)
    errs = []
    for p in search.nonzero_value:
        errs.append(min(abs(p.value - e) / abs(e) for e in expected))
    values_ok = count == model.index and all(e < config.value_match_tolerance for e in errs)
    verdicts["critical_values"] = _verdict(
        "pass" if values_ok else "fail",
        max_relative_error=ctx.nstr(max(errs, default=ctx.mpf(0)), 5),
    )
    ranks = [h.rank for h in hessians]
    _, chart_ok = block_nondegeneracy(model, "expansion", config.precision_bits)
    odp_ok = bool(hessians) and all(h.certified for h in hessians) and chart_ok
    verdicts["odp"] = _verdict("pass" if odp_ok else "fail", ranks=ranks, n=model.n,
                               chart_nondegenerate=chart_ok,
                               convention_match=list(hessians[0].convention_match) if hessians else [])
    spec_ok = spectrum.matched and spectrum.charpoly_matches and spectrum.eigensolver_agrees
    verdicts["spectrum"] = _verdict("pass" if spec_ok else "fail",
                                    max_pairing_error=ctx.nstr(spectrum.max_pairing_error, 5))
    if skip is not None:
        verdicts["periods"] = _verdict("skipped", reason=skip)
    else:
        verdicts["periods"] = _verdict("pass" if periods.match else "fail", order=config.period_order,
                                       first_mismatch=periods.first_mismatch)
    verdicts["probing"] = _verdict("evidence-only", extra_nonzero=len(search.extra_nonzero),
                                   rediscovered_branches=list(search.rediscovered_branches))
    return FullReport(model, config, inv, format_poly(f), periods, skip, search, hessians, spectrum, verdicts, timings)


# corpus

class CorpusParseError(ValueError):
    pass


def default_corpus() -> list[str]:
    text = resources.files("lgfano").joinpath("data/default_corpus.txt").read_text()
    return _corpus_lines(text)


def _corpus_lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def read_corpus(path) -> list[str]:
    return _corpus_lines(Path(path).read_text())


@dataclass
class CorpusResult:
    descriptors: list
    entries: list  # per-model report dicts, or {"descriptor", "error"} rows
    exit_status: int
    timings: list

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {"schema_version": SCHEMA_VERSION, "models": self.entries, "summary": summary_rows(self.entries)}
        if include_timings:
            out["timings"] = [{"descriptor": d, "seconds": round(t, 3)} for d, t in zip(self.descriptors, self.timings)]
        return out


def _corpus_worker(args):
    descriptor, config = args
    t = time.perf_counter()
    try:
        rep = run_report(replace(config, descriptor=descriptor))
    except ModelError as exc:
        return {"descriptor": descriptor, "error": str(exc)}, EXIT_USAGE, time.perf_counter() - t
    d = rep.to_dict()
    d.pop("timings", None)
    return d, rep.exit_status, time.perf_counter() - t


def run_corpus(descriptors, config: RunConfig | None = None, workers: int = 1) -> CorpusResult:
    """Run every descriptor; output order follows the corpus regardless of scheduling.

    Malformed descriptors abort before any computation.  Descriptors that
    parse but fail validation (e.g. non-Fano) become error rows.
    """
    config = config or RunConfig()
    descriptors = list(descriptors)
    for d in descriptors:
        try:
            split_descriptor(d)
        except DescriptorSyntaxError as exc:
            raise CorpusParseError(str(exc)) from exc
    jobs = [(d, config) for d in descriptors]
    if workers <= 1 or len(jobs) <= 1:
        results = [_corpus_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_corpus_worker, jobs))
    entries = [r[0] for r in results]
    statuses = [r[1] for r in results]
    status = max(statuses, default=EXIT_OK)
    return CorpusResult(descriptors, entries, status, [r[2] for r in results])


def summary_rows(entries) -> list[dict]:
    rows = []
    for e in entries:
        if "error" in e:
            rows.append({"model": e["descriptor"], "status": "invalid", "error": e["error"]})
            continue
        v = e["verdicts"]
        rows.append({
            "model": e["model"]["descriptor"],
            "index": e["model"]["index"],
            "d": e["model"]["d"],
            "critical_values": [_short(p["value"]) for p in e["critical_points"]["nonzero_value"]],
            "hessian_ranks": v["odp"]["ranks"],
            "spectrum_error": v["spectrum"]["max_pairing_error"],
            "period_order": v["periods"].get("order", v["periods"].get("reason")),
            "status": "fail" if any(v[k]["status"] == "fail" for k in HARD_VERDICTS) else "pass",
        })
    return rows


def _short(z: dict) -> str:
    re_, im = float(z["re"]), float(z["im"])
    if abs(im) < 1e-30:
        return f"{re_:.10g}"
    return f"{re_:.10g}{im:+.10g}i"


# rendering

def _markdown_table(rows) -> str:
    head = "| model | i_X | d | critical values | Hessian ranks | spectrum error | periods | status |"
    lines = [head, "|" + "---|" * 8]
    for r in rows:
        if r["status"] == "invalid":
            lines.append(f"| `{r['model']}` | | | | | | | invalid: {r['error']} |")
            continue
        lines.append(
            f"| `{r['model']}` | {r['index']} | {r['d']} | {', '.join(r['critical_values'])} | "
            f"{', '.join(map(str, r['hessian_ranks']))} | {r['spectrum_error']} | {r['period_order']} | {r['status']} |"
        )
    return "\n".join(lines) + "\n"


def render(report: FullReport, fmt: str | None = None) -> str:
    fmt = fmt or report.config.output_format
    data = report.to_dict()
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["claim", "status", "detail"])
        for name, v in data["verdicts"].items():
            detail = {k: val for k, val in v.items() if k != "status"}
            w.writerow([name, v["status"], json.dumps(detail, sort_keys=True)])
        return buf.getvalue()
    if fmt == "markdown":
        md = f"## `{report.model.descriptor}`\n\n" + _markdown_table(summary_rows([data]))
        md += "\n| claim | status |\n|---|---|\n"
        md += "".join(f"| {k} | {v['status']} |\n" for k, v in data["verdicts"].items())
        if report.timings:
            md += "\n" + ", ".join(f"{k}: {v:.2f}s" for k, v in report.timings.items()) + "\n"
        return md
    raise ValueError(f"unknown format {fmt!r}")


def render_corpus(result: CorpusResult, fmt: str = "json", include_timings: bool = False) -> str:
    data = result.to_dict(include_timings)
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    rows = data["summary"]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "index", "d", "critical_values", "hessian_ranks", "spectrum_error", "period_order", "status"])
        for r in rows:
            if r["status"] == "invalid":
                w.writerow([r["model"], "", "", "", "", "", "", "invalid"])
            else:
                w.writerow([r["model"], r["index"], r["d"], " ".join(r["critical_values"]),
                            " ".join(map(str, r["hessian_ranks"])), r["spectrum_error"], r["period_order"], r["status"]])
        return buf.getvalue()
    if fmt == "markdown":
        md = _markdown_table(rows)
        if include_timings:
            md += "\n" + ", ".join(f"{t['descriptor']}: {t['seconds']:.2f}s" for t in data["timings"]) + "\n"
        return md
    raise ValueError(f"unknown format {fmt!r}")
