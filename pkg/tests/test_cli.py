import json
import subprocess
import sys

import pytest

from balcover.cli import COMMANDS, main
from balcover.fileio import Workspace, corpus_dir, dump_document, dumps


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_all_commands_registered():
    assert set(COMMANDS) == {
        "validate", "hom", "check-covering", "check-balanced", "order", "lift", "push-down", "pull-up",
        "push-rho", "schurian", "quotient", "smash", "grade-check", "smash-functor", "induce-grading",
        "grading-from-tower", "retraction-table", "squares", "epsilon", "cleave", "decompose", "iso",
        "summand", "corpus"}


def test_check_balanced_ex_b(capsys):
    code, out, err = run(capsys, "check-balanced", "--functor", "examples/ex_b.functor.json")
    assert code == 0 and out == {"balanced": True}
    assert err.strip() == "balanced"


def test_check_balanced_ex_c(capsys):
    code, out, _ = run(capsys, "check-balanced", "--functor", "examples/ex_c.functor.json")
    assert code == 1
    w = out["witness"]
    assert (w["a"], w["b"], w["f"]) == ("a2", "b2", "beta")


@pytest.mark.parametrize("argv, code", [
    (["validate", "--category", "ex_a.A.json"], 0),
    (["validate", "--group", "ex_a.group.json"], 0),
    (["validate", "--grading", "ex_c.grading_B.json"], 0),
    (["validate", "--functor", "ex_c.functor.json", "--rep", "ex_c.X.json"], 0),
    (["hom", "--category", "ex_c.B.json", "--source", "a", "--target", "b"], 0),
    (["check-covering", "--functor", "ex_c.functor.json"], 0),
    (["check-covering", "--quiver-map", "a2_double.quivermap.json"], 0),
    (["check-covering", "--quiver-map", "a2_collapse.json"], 1),
    (["order", "--functor", "ex_b.functor.json"], 0),
    (["order", "--quiver-map", "a2_double.quivermap.json"], 0),
    (["lift", "--functor", "ex_c.functor.json", "--morphism", "beta", "--anchor", "a2"], 0),
    (["push-down", "--functor", "ex_c.functor.json", "--rep", "ex_c.X.json"], 0),
    (["push-rho", "--functor", "ex_c.functor.json", "--rep", "ex_c.X.json"], 0),
    (["pull-up", "--functor", "ex_c.functor.json", "--rep", "kronecker_plus.json"], 0),
    (["schurian", "--category", "ex_c.B.json"], 1),
    (["schurian", "--functor", "octagon.functor.json"], 0),
    (["quotient", "--group", "ex_a.group.json", "--functor", "ex_a.functor.json"], 0),
    (["smash", "--grading", "ex_c.grading_B.json"], 0),
    (["grade-check", "--grading", "ex_c.grading_B.json"], 0),
    (["smash-functor", "--functor", "ex_b.functor.json", "--grading-source", "ex_b.grading_A.json",
      "--grading-target", "ex_b.grading_B.json"], 0),
    (["induce-grading", "--functor", "octagon.functor.json", "--grading", "square.grading.json"], 0),
    (["grading-from-tower", "--cover", "a2_crossed.quivermap.json", "--group", "a2_crossed.group.json"], 0),
    (["grading-from-tower", "--cover", "ex_c.functor.json", "--group", "ex_a.group.json"], 2),
    (["retraction-table", "--functor", "ex_c.functor.json"], 0),
    (["squares", "--functor", "ex_b.functor.json"], 0),
    (["squares", "--functor", "ex_c.functor.json"], 1),
    (["epsilon", "--functor", "ex_c.functor.json", "--rep", "ex_c.X.json"], 0),
    (["cleave", "--functor", "ex_c.functor.json", "--rep", "ex_c.X.json"], 1),
    (["cleave", "--functor", "ex_b.functor.json", "--samples", "3"], 0),
    (["decompose", "--rep", "ex_c.Y.json"], 0),
    (["iso", "--rep", "kronecker_plus.json", "--other", "kronecker_minus.json"], 1),
    (["iso", "--rep", "kronecker_plus.json", "--other", "kronecker_plus.json"], 0),
    (["summand", "--rep", "ex_c.X.json", "--into", "ex_c.Y.json"], 1),
])
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code, err
    assert out is not None and err.strip()


def test_ex_c_push_down_values(capsys):
    _, out, _ = run(capsys, "push-down", "--functor", "ex_c.functor.json", "--rep", "ex_c.X.json")
    assert out["representation"]["matrices"] == {"alpha": [[1]], "beta": [[32002]]}
    _, out, _ = run(capsys, "--prime", "5", "push-rho", "--functor", "ex_c.functor.json", "--rep", "ex_c.X.json")
    assert out["representation"]["matrices"] == {"alpha": [[1]], "beta": [[0]]}


@pytest.mark.parametrize("name, degree", [("a2_crossed", "g"), ("a2_double", "e")])
def test_tower_degrees(capsys, name, degree):
    code, out, _ = run(capsys, "grading-from-tower", "--cover", f"{name}.quivermap.json", "--group", f"{name}.group.json")
    assert code == 0 and out["degrees_A"] == {"x": degree}


def test_prime_two_and_flag_positions(capsys):
    c1, o1, _ = run(capsys, "--prime", "2", "iso", "--rep", "kronecker_plus.json", "--other", "kronecker_minus.json")
    c2, o2, _ = run(capsys, "iso", "--rep", "kronecker_plus.json", "--other", "kronecker_minus.json", "--prime", "2")
    assert c1 == c2 == 0 and o1 == o2


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "validate", "--category", "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": ["a"],\n "arrows": [}')
    code, out, err = run(capsys, "validate", "--category", str(bad))
    assert code == 2 and "line 2" in out["message"]
    nofield = tmp_path / "nofield.json"
    nofield.write_text('{"vertices": ["a"], "arrows": []}')
    code, out, _ = run(capsys, "validate", "--category", str(nofield))
    assert code == 2 and "nilpotency_bound" in out["message"]
    assert run(capsys, "--prime", "4", "hom", "--category", "a2.json")[0] == 2
    assert run(capsys, "lift", "--functor", "ex_c.functor.json", "--morphism", "gamma")[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2


def test_deterministic_reports(capsys):
    a = run(capsys, "--seed", "3", "cleave", "--functor", "ex_b.functor.json", "--samples", "2")
    b = run(capsys, "--seed", "3", "cleave", "--functor", "ex_b.functor.json", "--samples", "2")
    assert a == b


def test_corpus_json(capsys):
    code, out, err = run(capsys, "corpus", "--json")
    assert code == 0 and out["passed"]
    assert len(out["checks"]) == 11
    assert err.count("PASS") == 11


def test_console_entry_subprocess():
    proc = subprocess.run([sys.executable, "-m", "balcover.cli", "check-balanced", "--functor", "ex_c.functor.json"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["balanced"] is False


@pytest.mark.parametrize("path", sorted(p.name for p in corpus_dir().glob("*.json")))
def test_corpus_round_trip(path, tmp_path):
    first = json.loads(dumps(dump_document(Workspace(), path)))
    copy = tmp_path / path
    copy.write_text(dumps(first))
    second = json.loads(dumps(dump_document(Workspace(), copy)))
    assert first == second
