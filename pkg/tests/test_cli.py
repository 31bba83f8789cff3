import csv
import io
import json

import pytest

from init import init_function
from main import EXIT_OK, EXIT_USAGE, EXIT_VERDICT, dispatch
from src.harness.sweep import RESULT_COLUMNS
from src.plcore.piecewise import functions_close

FIG_U = "pl:-1:1,-0.5:1,-0.3:1.2,0.3:1.2,0.5:1,1:1"


@pytest.fixture(autouse=True)
def small_env(monkeypatch):
    monkeypatch.setenv("RR_THREADS", "2")
    monkeypatch.setenv("RR_CHECK_X_NODES", "65")
    monkeypatch.setenv("RR_CHECK_V_SAMPLES", "9")
    monkeypatch.setenv("RR_SWEEP_RESOLUTION_X", "33")
    monkeypatch.setenv("RR_SWEEP_RESOLUTION_V", "9")


def run(*argv):
    stream = io.StringIO()
    code = dispatch(list(argv), stream)
    return code, stream.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_verify_plateau_instance():
    code, report = run_json("verify", "--u", FIG_U, "--weight", "1-abs(x)", "--F", "p^2", "--mode", "monotone")
    assert code == EXIT_OK
    assert report['schema'] == 1
    assert report['gap'] >= -1e-8
    assert report['holds'] and report['guaranteed']


def test_nonconcavity_counterexample_is_success():
    code, report = run_json("counterexample", "nonconcavity", "--weight", "x^2", "--s", "0.4", "--t", "0.6",
                            "--eps", "0.1", "--delta", "0.1", "--alpha", "1.15")
    assert code == EXIT_OK
    assert report['confirmed']
    assert report['gap'] < 0.0


def test_bad_literal_reports_offset():
    code, report = run_json("verify", "--u", "pl:bad", "--weight", "1", "--F", "p")
    assert code == EXIT_USAGE
    assert report['error'] == "ExprSyntaxError"
    assert report['offset'] == 3


def test_bad_expression_offset():
    code, report = run_json("parse", "1 + * x")
    assert code == EXIT_USAGE
    assert report['offset'] == 4


def test_usage_errors():
    assert run("frobnicate")[0] == EXIT_USAGE
    assert run("verify", "--u", FIG_U)[0] == EXIT_USAGE


def test_precondition_failure_writes_witness():
    code, report = run_json("counterexample", "asymmetry", "--weight", "1 - abs(x)", "--x-bar", "-0.5",
                            "--eps", "0.1")
    assert code == EXIT_USAGE
    assert report['error'] == "PreconditionFailed"
    assert set(report['witness']) == {'x', 'v', 'lhs', 'rhs'}


def test_rearrange_round_trip():
    code, first = run_json("rearrange", "--u", FIG_U)
    assert code == EXIT_OK
    code, second = run_json("rearrange", "--u", first['rearranged'])
    assert code == EXIT_OK
    assert functions_close(init_function(second["rearranged"], {}), init_function(first["rearranged"], {}), 1e-12)
    assert first['metrics_rearranged']['integral'] == pytest.approx(first['metrics_u']['integral'])


def test_check_weight_verdicts():
    code, report = run_json("check-weight", "--weight", "1 - abs(x)")
    assert code == EXIT_OK
    assert report['conditions']['admissible']
    code, report = run_json("check-weight", "--weight", "x^2")
    assert code == EXIT_VERDICT
    assert not report['conditions']['admissible']
    code, report = run_json("check-weight", "--weight", "x^2", "--symmetric")
    assert code == EXIT_OK


def test_check_weight_extras():
    code, report = run_json("check-weight", "--weight", "1 - abs(x)", "--zero-level", "0.5",
                            "--dk", "4", "--u", "pl:-1:0,0:1,1:0")
    assert code == EXIT_OK
    assert report['zero_set']['verdict'] in {"no-zeros", "periodic", "all-zero", "violates"}
    assert report['D_k']['k'] == 4
    code, _ = run_json("check-weight", "--weight", "1", "--dk", "4")
    assert code == EXIT_USAGE


def test_parse_and_evaluate():
    code, report = run_json("parse", "1 + 2*x", "--at", "x=0.5")
    assert code == EXIT_OK
    assert report['value'] == 2.0
    assert report['variables'] == ["x"]


def test_evaluate_with_jensen_level():
    code, report = run_json("evaluate", "--u", "pl:-1:0,0:1,1:0", "--weight", "1", "--F", "power:1",
                            "--level", "0.5")
    assert code == EXIT_OK
    assert report['value'] == pytest.approx(2.0)
    assert report['jensen']['holds']


def test_csv_format():
    code, text = run("--format", "csv", "parse", "x^2", "--at", "x=3")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "key,value"
    assert "schema,1" in lines
    assert "value,9.0" in lines


def test_human_format():
    code, text = run("--format", "human", "parse", "x")
    assert code == EXIT_OK
    assert "canonical" in text


def test_output_file_and_plot(tmp_path):
    out = tmp_path / "report.json"
    plot = tmp_path / "plot.csv"
    code, text = run("--output", str(out), "rearrange", "--u", "pl:-1:0,0:1,1:0", "--emit-plot", str(plot))
    assert code == EXIT_OK
    assert text == ""
    assert json.loads(out.read_text())['mode'] == "monotone"
    assert plot.read_text().splitlines()[0] == "x,u,u_star"


def test_approx_stages():
    code, report = run_json("approx", "--u", "pl:-1:0,-0.05:0,0:1,0.05:0,1:0", "--ladder", "1,40")
    assert code == EXIT_OK
    assert [s['h'] for s in report['stages']] == [1.0, 40.0]
    assert report['stages'][0]['measure'] == pytest.approx(0.1)


def test_approx_threshold_too_small():
    code, report = run_json("approx", "--u", "pl:-1:0,1:1", "--ladder", "0.1", "--side", "right")
    assert code == EXIT_USAGE
    assert report['error'] == "ThresholdTooSmall"


def test_small_sweep():
    code, report = run_json("sweep", "--count", "3", "--breakpoints", "2:6", "--no-progress", "--seed", "1")
    assert code == EXIT_OK
    assert report['instances'] == 3
    assert report['failures'] == 0


def test_constructed_sweep():
    code, report = run_json("sweep", "--count", "3", "--family", "constructed", "--no-progress")
    assert code == EXIT_OK
    assert report['confirmations'] == report['expected_confirmations'] == 3


def test_sweep_instance_table(tmp_path):
    path = tmp_path / "instances.csv"
    code, report = run_json("sweep", "--count", "3", "--breakpoints", "2:6", "--no-progress", "--seed", "1",
                            "--table", str(path))
    assert code == EXIT_OK
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == RESULT_COLUMNS
    assert [row[0] for row in rows[1:]] == ["0", "1", "2"]
    assert {row[1] for row in rows[1:]} == {"ok"}
