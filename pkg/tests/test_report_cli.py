import csv
import io
import json
import subprocess
import sys

import pytest

from lgfano.cli import main
from lgfano.report import (EXIT_FAIL, EXIT_OK, EXIT_USAGE, CorpusParseError, RunConfig, default_corpus, read_corpus,
                           render, render_corpus, run_corpus, run_report)

FAST = dict(trials=24, period_order=6)
CLAIMS = ("fiber_count", "critical_values", "odp", "spectrum", "periods")


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_report_p1():
    rep = run_report(RunConfig("@1", **FAST))
    assert rep.exit_status == EXIT_OK
    assert all(rep.verdicts[c]["status"] == "pass" for c in CLAIMS)
    assert rep.verdicts["probing"]["status"] == "evidence-only"
    d = rep.to_dict()
    assert sorted(float(p["value"]["re"]) for p in d["critical_points"]["nonzero_value"]) == [-2.0, 2.0]
    assert d["model"]["baseline_only"] is True


def test_report_cubic_surface():
    rep = run_report(RunConfig("3@3", **FAST))
    v = rep.verdicts
    assert v["fiber_count"] == {"status": "pass", "expected": 1, "found": 1}
    assert v["odp"]["ranks"] == [2]
    assert v["odp"]["convention_match"] == ["expansion"]
    assert rep.search.nonzero_value[0].value == 27


def test_report_22_in_p5():
    rep = run_report(RunConfig("2,2@5", **FAST))
    assert rep.exit_status == EXIT_OK
    assert sorted(float(p.value.real) for p in rep.search.nonzero_value) == [-8.0, 8.0]


def test_term_cap_downgrades_periods():
    rep = run_report(RunConfig("2,2@5", trials=10, period_order=12, term_cap=300))
    assert rep.verdicts["periods"]["status"] == "skipped"
    assert rep.verdicts["periods"]["reason"].startswith("skipped at order")
    assert rep.exit_status == EXIT_OK


def test_timings_opt_in():
    assert "timings" not in run_report(RunConfig("@1", **FAST)).to_dict()
    d = run_report(RunConfig("@1", include_timings=True, **FAST)).to_dict()
    assert set(d["timings"]) == {"model", "periods", "critical", "hessian", "spectrum", "total"}


def test_json_is_reproducible():
    a = render(run_report(RunConfig("2@3", **FAST)), "json")
    b = render(run_report(RunConfig("2@3", **FAST)), "json")
    assert a == b
    assert json.loads(a)["schema_version"] == "1.0"


def test_csv_and_markdown():
    rep = run_report(RunConfig("2@3", **FAST))
    rows = list(csv.reader(io.StringIO(render(rep, "csv"))))
    assert rows[0] == ["claim", "status", "detail"]
    assert [r[0] for r in rows[1:]] == list(CLAIMS) + ["probing"]
    md = render(rep, "markdown")
    assert "| `2@3` | 2 | 4 | 4, -4 | 2, 2 |" in md
    with pytest.raises(ValueError):
        render(rep, "xml")


def test_precision_env(monkeypatch):
    monkeypatch.setenv("LGFANO_PRECISION", "128")
    assert RunConfig("@1").precision_bits == 128


# corpus

def test_default_corpus():
    assert default_corpus() == ["@1", "@2", "@3", "2@3", "2@4", "3@3", "3@4", "4@4", "2,2@5", "2,3@5"]


def test_read_corpus_skips_comments(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("# header\n@1\n\n2@3  # quadric\n")
    assert read_corpus(f) == ["@1", "2@3"]


def test_empty_corpus():
    res = run_corpus([], RunConfig(**FAST))
    assert res.exit_status == EXIT_OK and res.entries == []
    assert json.loads(render_corpus(res))["models"] == []


def test_non_fano_row():
    res = run_corpus(["@1", "5@4"], RunConfig(**FAST))
    assert res.exit_status == EXIT_USAGE
    assert "error" in res.entries[1] and "Fano" in res.entries[1]["error"]
    assert res.to_dict()["summary"][1]["status"] == "invalid"


def test_syntax_error_aborts_before_work():
    with pytest.raises(CorpusParseError):
        run_corpus(["@1", "2;3@5"], RunConfig(**FAST))


def test_corpus_order_with_workers():
    descs = ["2@3", "@1", "@2"]
    res = run_corpus(descs, RunConfig(**FAST), workers=3)
    assert [e["model"]["descriptor"] for e in res.entries] == descs
    assert render_corpus(res) == render_corpus(run_corpus(descs, RunConfig(**FAST), workers=1))


# command line

def test_cli_report_json(capsys):
    status, out, _ = run(capsys, "report", "2@3", "--probes", "20", "--terms", "6")
    assert status == EXIT_OK
    d = json.loads(out)
    assert d["schema_version"] == "1.0" and d["config"]["trials"] == 20


def test_cli_report_markdown(capsys):
    status, out, _ = run(capsys, "report", "@1", "--probes", "10", "--format", "markdown")
    assert status == EXIT_OK and out.startswith("## `@1`")


@pytest.mark.parametrize("desc", ["5@4", "3@", "1@3", "x@2"])
def test_cli_bad_descriptor(capsys, desc):
    status, out, err = run(capsys, "report", desc)
    assert status == EXIT_USAGE and out == "" and err.startswith("lgfano: error:")


def test_cli_precision_flag(capsys):
    status, out, _ = run(capsys, "model", "@2", "--precision", "64")
    assert status == EXIT_OK
    assert json.loads(out)["expected_critical_values"][0] == {"re": "3.0", "im": "0.0"}


def test_cli_stages(capsys):
    status, out, _ = run(capsys, "model", "2@3")
    d = json.loads(out)
    assert (d["n"], d["index"], d["d"], d["h1nm1"]) == (2, 2, 4, 2)
    status, out, _ = run(capsys, "periods", "@1", "--terms", "4", "--format", "csv")
    assert status == EXIT_OK and out.splitlines()[-1] == "4,6,6,true"
    status, out, _ = run(capsys, "periods", "@1", "--terms", "2", "--format", "markdown")
    assert "| 2 | 2 | 2 | True |" in out
    status, out, _ = run(capsys, "critical", "3@3", "--probes", "20")
    assert status == EXIT_OK and len(json.loads(out)["nonzero_value"]) == 1
    status, out, _ = run(capsys, "hessian", "2@3", "--probes", "5")
    assert status == EXIT_OK and json.loads(out)["chart_polynomial"].endswith("(1) * b1^2")
    status, out, _ = run(capsys, "spectrum", "@1", "--probes", "5")
    assert status == EXIT_OK and json.loads(out)["companion_matrix"] == [[0, 1], [1, 0]]


def test_cli_corpus_file(capsys, tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("@1\n5@4\n")
    status, out, _ = run(capsys, "corpus", str(f), "--probes", "5", "--format", "csv")
    assert status == EXIT_USAGE
    assert out.splitlines()[2] == "5@4,,,,,,,invalid"


def test_cli_missing_corpus_file(capsys, tmp_path):
    status, _, err = run(capsys, "corpus", str(tmp_path / "nope.txt"))
    assert status == EXIT_USAGE and "nope.txt" in err


def test_cli_failed_verdict_exit_code(capsys):
    # an absurdly tight match tolerance makes the spectrum and value verdicts fail
    status, out, _ = run(capsys, "report", "2@4", "--probes", "5", "--terms", "3", "--match-tol", "1e-300")
    assert status == EXIT_FAIL
    assert json.loads(out)["verdicts"]["critical_values"]["status"] == "fail"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lgfano", "model", "@1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["index"] == 2
