import io
import json
import sys

import pytest

import dimerlab as dl
from dimerlab.cli import main, parse_triangulation_spec
from dimerlab.quiver import QuiverWithFaces


def run_cli(argv):
    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        code = main(argv)
    finally:
        sys.stdout = old
    return code, buf.getvalue()


def test_spec_grammar():
    assert parse_triangulation_spec(5, "fan").diagonals == {(1, 3), (1, 4)}
    assert parse_triangulation_spec(5, "fan:2").diagonals == {(2, 4), (2, 5)}
    assert parse_triangulation_spec(5, "1-3,1-4").diagonals == {(1, 3), (1, 4)}
    assert parse_triangulation_spec(3, "").diagonals == frozenset()


def test_build_dot_triangle():
    code, out = run_cli(["build", "--n", "3", "--m", "2", "--fan", "--format", "dot"])
    assert code == 0
    assert out.count("pos=") == 6  # rim vertices
    assert out.count("->") == 9  # edges


def test_build_json_round_trip():
    code, out = run_cli(["build", "--n", "5", "--m", "2", "--fan"])
    assert code == 0
    data = json.loads(out)
    Q = QuiverWithFaces.from_json(data["quiver"])
    T = dl.Triangulation.from_json(data["triangulation"])
    assert Q == dl.dual_quiver(dl.reduce_dimer(dl.build_dimer(T, 2)))


def test_build_fan_equals_explicit_diagonals():
    _, out1 = run_cli(["build", "--n", "5", "--m", "2", "--fan"])
    _, out2 = run_cli(["build", "--n", "5", "--m", "2", "--diagonals", "1-3,1-4"])
    assert out1 == out2


def test_build_deterministic():
    _, out1 = run_cli(["build", "--n", "6", "--m", "3", "--fan", "--what", "both"])
    _, out2 = run_cli(["build", "--n", "6", "--m", "3", "--fan", "--what", "both"])
    assert out1 == out2


def test_verify_fan_pentagon_exit_zero():
    code, out = run_cli(["verify", "--n", "5", "--m", "2", "--fan"])
    assert code == 0
    assert json.loads(out)["outcome"]["passed"] is True


def test_verify_starved_budget_exit_two():
    code, out = run_cli(
        ["verify", "--n", "5", "--m", "2", "--fan", "--budget-visited", "1"]
    )
    assert code == 2
    assert json.loads(out)["outcome"]["inconclusive"]


def test_verify_edge_as_diagonal_exit_one(capsys):
    code, _ = run_cli(["verify", "--n", "5", "--m", "2", "--diagonals", "1-2"])
    assert code == 1


def test_verify_malformed_spec_exit_one():
    code, _ = run_cli(["verify", "--n", "5", "--m", "2", "--diagonals", "nonsense"])
    assert code == 1


def test_sweep_m2_up_to_six():
    code, out = run_cli(["sweep", "--max-n", "6", "--m", "2"])
    assert code == 0
    rep = json.loads(out)
    assert len(rep["rows"]) == 1 + 2 + 5 + 14
    assert rep["all_matched"] is True


def test_sweep_empty_grid():
    code, out = run_cli(["sweep", "--max-n", "2", "--m", "2"])
    assert code == 0
    rep = json.loads(out)
    assert rep["rows"] == [] and rep["all_matched"] is True


def test_sweep_deterministic_and_parallel_agrees():
    _, serial = run_cli(["sweep", "--max-n", "5", "--m", "2"])
    _, serial2 = run_cli(["sweep", "--max-n", "5", "--m", "2"])
    assert serial == serial2
    _, parallel = run_cli(["sweep", "--max-n", "5", "--m", "2", "--workers", "2"])
    assert parallel == serial


def test_sweep_m3():
    code, out = run_cli(["sweep", "--max-n", "5", "--m", "3"])
    assert code == 0
    rep = json.loads(out)
    assert len(rep["rows"]) == 8
    assert rep["all_matched"] is True


def test_gamma_json_and_dot():
    code, out = run_cli(["gamma", "--n", "5", "--m", "2"])
    assert code == 0
    g = json.loads(out)["gamma"]
    assert len(g["arrows"]) == 15 and g["vertices"] == 10
    code, dot = run_cli(["gamma", "--n", "5", "--m", "2", "--format", "dot"])
    assert code == 0
    assert dot.count("->") == 15


def test_flip_check():
    code, out = run_cli(["flip-check", "--n", "5", "--m", "2", "--fan", "--flip", "1-3"])
    assert code == 0
    assert json.loads(out)["certificate"]["ok"] is True


def test_flip_check_bad_diagonal_exit_one():
    code, _ = run_cli(["flip-check", "--n", "5", "--m", "2", "--fan", "--flip", "1-2"])
    assert code == 1


def test_env_budget_override(monkeypatch):
    monkeypatch.setenv("DIMERLAB_BUDGET_VISITED", "1")
    code, _ = run_cli(["verify", "--n", "4", "--m", "2", "--fan", "--budget-length", "64"])
    assert code == 2
    monkeypatch.setenv("DIMERLAB_BUDGET_VISITED", "1000000")
    code, _ = run_cli(["verify", "--n", "4", "--m", "2", "--fan", "--budget-length", "64"])
    assert code == 0
