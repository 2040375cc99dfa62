"""lgfano command-line interface.

    lgfano report 3@3 --format markdown
    lgfano corpus corpus.txt --workers 4
    lgfano periods 2@3 --terms 8 --format csv
"""
from __future__ import annotations

import argparse
import json
import sys

from . import _mp
from .critical import locate_critical_points
from .hessian import block_nondegeneracy, build_chart_polynomial, certify_odp
from .laurent import format_poly
from .model import ModelError, build_givental, invariants, parse_descriptor
from .periods import compare_periods, periods_csv
from .report import (EXIT_FAIL, EXIT_OK, EXIT_USAGE, SCHEMA_VERSION, CorpusParseError, RunConfig, default_corpus,
                     default_precision, read_corpus, render, render_corpus, run_corpus, run_report)
from .spectrum import companion_matrix, match_spectrum


def _common(p: argparse.ArgumentParser, fmt: bool = True):
    p.add_argument("--precision", type=int, default=None, help="working precision in bits (default 256, or $LGFANO_PRECISION)")
    p.add_argument("--terms", type=int, default=12, help="highest period order M")
    p.add_argument("--probes", type=int, default=200, help="random Newton trials")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--residual-tol", type=float, default=1e-30)
    p.add_argument("--value-tol", type=float, default=None)
    p.add_argument("--match-tol", type=float, default=1e-20)
    p.add_argument("--rank-threshold", type=float, default=1e-10)
    p.add_argument("--digits", type=int, default=40, help="significant digits in JSON output")
    if fmt:
        p.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identical output)")


def _config(args, descriptor: str) -> RunConfig:
    return RunConfig(
        descriptor=descriptor,
        precision_bits=args.precision if args.precision is not None else default_precision(),
        period_order=args.terms,
        trials=args.probes,
        seed=args.seed,
        output_format=getattr(args, "format", "json"),
        residual_tolerance=args.residual_tol,
        value_tolerance=args.value_tol,
        value_match_tolerance=args.match_tol,
        rank_threshold=args.rank_threshold,
        digits=args.digits,
        include_timings=args.timings,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgfano", description="Verify Landau-Ginzburg claims for Fano complete intersections.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="full pipeline for one model")
    p.add_argument("descriptor", help="d1,...,dk@N, or @N for projective space")
    _common(p)

    p = sub.add_parser("corpus", help="run a list of models (one descriptor per line)")
    p.add_argument("file", nargs="?", default=None, help="corpus file; the built-in corpus if omitted")
    p.add_argument("--workers", type=int, default=1)
    _common(p)

    for name, help_ in [("model", "invariants and f_X"), ("periods", "constant terms vs closed form"),
                        ("critical", "critical points"), ("hessian", "ODP certification"),
                        ("spectrum", "c_1 spectrum match")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("descriptor")
        _common(p)
    return parser


def _dump(obj) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2) + "\n"


def _stage(args) -> tuple[str, int]:
    cfg = _config(args, args.descriptor)
    model = parse_descriptor(args.descriptor)
    ctx = _mp.context(cfg.precision_bits)
    digits = cfg.digits
    if args.command == "model":
        inv = invariants(model, cfg.precision_bits)
        return _dump({
            "model": model.descriptor, "n": inv.n, "index": inv.index, "d": inv.dconst, "h1nm1": inv.h1nm1,
            "baseline_only": model.baseline_only, "variables": list(model.var_names),
            "expected_critical_values": [_mp.complex_dict(ctx, z, digits) for z in inv.expected_critical_values],
            "givental_polynomial": format_poly(build_givental(model)),
        }), EXIT_OK
    if args.command == "periods":
        rep = compare_periods(model, cfg.period_order, cfg.term_cap)
        status = EXIT_OK if rep.match else EXIT_FAIL
        if args.format == "csv":
            return periods_csv(rep), status
        if args.format == "markdown":
            lines = ["| m | constant term | closed form | equal |", "|---|---|---|---|"]
            lines += [f"| {m} | {a} | {b} | {eq} |" for m, a, b, eq in rep.rows()]
            return "\n".join(lines) + "\n", status
        return _dump(rep.to_dict()), status
    search = locate_critical_points(model, cfg.solver_config())
    if args.command == "critical":
        ok = len(search.nonzero_value) == model.index
        return _dump({
            "model": model.descriptor,
            "nonzero_value": [p.to_dict(cfg.precision_bits, digits) for p in search.nonzero_value],
            "near_zero_value_points": len(search.near_zero_value),
            "near_zero_clusters": search.near_zero_clusters,
            "probe": {"trials": search.probe.trials, "converged": search.probe.converged,
                      "failures": search.probe.failures, "extra_nonzero": len(search.extra_nonzero)},
        }), EXIT_OK if ok else EXIT_FAIL
    if args.command == "hessian":
        reports = [certify_odp(model, p, cfg.precision_bits, cfg.rank_threshold) for p in search.nonzero_value]
        _, nondeg = block_nondegeneracy(model)
        ok = nondeg and all(r.certified for r in reports)
        return _dump({"model": model.descriptor, "chart_polynomial": str(build_chart_polynomial(model, 0)),
                      "reports": [r.to_dict(digits) for r in reports]}), EXIT_OK if ok else EXIT_FAIL
    # spectrum
    rep = match_spectrum(model, [p.value for p in search.nonzero_value], cfg.value_match_tolerance, cfg.precision_bits)
    ok = rep.matched and rep.charpoly_matches
    return _dump({"companion_matrix": companion_matrix(model), **rep.to_dict(digits)}), EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            rep = run_report(_config(args, args.descriptor))
            sys.stdout.write(render(rep))
            return rep.exit_status
        if args.command == "corpus":
            descriptors = read_corpus(args.file) if args.file else default_corpus()
            result = run_corpus(descriptors, _config(args, "@1"), workers=args.workers)
            sys.stdout.write(render_corpus(result, args.format, args.timings))
            return result.exit_status
        out, status = _stage(args)
        sys.stdout.write(out)
        return status
    except (ModelError, CorpusParseError, OSError) as exc:
        print(f"lgfano: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
