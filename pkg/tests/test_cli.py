import json
import subprocess
import sys

import pytest

from rainbowstack.cli import main
from rainbowstack.colorings import EdgeColoring, random_coloring
from rainbowstack.experiments import ExperimentConfig, run_sweep, table_to_csv, table_to_json
from rainbowstack.perms import Perm
from rainbowstack.stacking import StackingInstance, is_rainbow_stacking, threshold_formulas, write_instance


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def solvable(tmp_path):
    I = StackingInstance(6, 2, 5, (random_coloring(6, 5, 1), random_coloring(6, 5, 2)))
    path = tmp_path / "a.inst"
    write_instance(I, path)
    return I, path


def test_find_solvable(capsys, solvable):
    I, path = solvable
    code, out, _ = run(capsys, "find", "--instance", str(path), "--max-nodes", "1e7")
    assert code == 0
    wit = [Perm.parse(ln.split(": ")[1]) for ln in out.splitlines() if ln.startswith("sigma_")]
    assert len(wit) == 2 and is_rainbow_stacking(I, wit)


def test_find_negative_and_budget(capsys, tmp_path):
    path = tmp_path / "b.inst"
    write_instance(StackingInstance.of(EdgeColoring(3, 2, (0, 0, 0)), EdgeColoring(3, 2, (0, 1, 1))), path)
    assert run(capsys, "find", "--instance", str(path))[0] == 1
    from rainbowstack.colorings import cayley_sum_pair
    write_instance(StackingInstance.of(*cayley_sum_pair(3, 0, 1, 2, 3)), path)
    code, out, _ = run(capsys, "find", "--instance", str(path), "--max-nodes", "4", "--json")
    assert code == 4 and json.loads(out)["status"] == "BudgetExceeded"


def test_verify_cayley(capsys):
    code, out, _ = run(capsys, "verify-cayley", "--k", "3")
    assert code == 1 and "no rainbow stacking (exhaustive)" in out
    assert run(capsys, "verify-cayley", "--k", "4")[0] == 3


def test_thresholds(capsys):
    code, out, _ = run(capsys, "thresholds", "--n", "12", "--m", "2", "--omega", "0", "--json")
    d = json.loads(out)
    assert code == 0
    assert abs(d["r_star"] - 3.302) < 5e-4
    assert (d["r_star"], d["r_lower"], d["r_upper"]) == threshold_formulas(12, 2, 0.0)


def test_count_and_moments(capsys, tmp_path):
    path = tmp_path / "c.inst"
    write_instance(StackingInstance.of(EdgeColoring(3, 3, (0, 1, 2)), EdgeColoring(3, 3, (0, 1, 2))), path)
    code, out, _ = run(capsys, "count", "--instance", str(path), "--json")
    assert code == 0 and json.loads(out) == {"Z": 12, "reduced": 2}
    code, out, _ = run(capsys, "moments", "--n", "3", "--m", "2", "--r", "3", "--exact", "--json")
    d = json.loads(out)
    assert d["E_nmr_exact"] == "8/27" and d["expected_Z_exact"] == "32/3"


def test_gpi(capsys, tmp_path):
    out_path = tmp_path / "g.adj"
    code, out, _ = run(capsys, "gpi", "--perms", "0,1,2;0,1,2", "--r", "3", "--out", str(out_path), "--json")
    d = json.loads(out)
    assert code == 0 and d["edges"] == 3 and d["N_pi"] == 216 and d["pair_correlation"] == "8/27"
    assert out_path.read_text().startswith("# collision graph")


def test_sweep_matches_library(capsys, tmp_path):
    args = ["sweep", "--n", "5", "--m", "2", "--r-min", "2", "--r-max", "4",
            "--trials", "30", "--seed", "17"]
    code, out, _ = run(capsys, *args)
    table = run_sweep(ExperimentConfig(5, 2, (2, 3, 4), 30, 17))
    assert code == 0 and out == table_to_csv(table)
    code, out, _ = run(capsys, *args, "--json", "--threads", "2")
    assert out == table_to_json(table)
    code, _, _ = run(capsys, *args, "--out", str(tmp_path / "s.csv"))
    assert (tmp_path / "s.csv").read_text() == table_to_csv(table)
    assert (tmp_path / "s.json").exists() and (tmp_path / "s.dat").exists()


def test_sweep_requires_seed(capsys):
    code, _, err = run(capsys, "sweep", "--n", "5", "--m", "2", "--r", "3", "--trials", "5")
    assert code == 2 and "--seed" in err


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "bogus")[0] == 2
    code, _, err = run(capsys, "thresholds", "--n", "5", "--m", "2", "--nope", "1")
    assert code == 2 and "usage" in err
    assert run(capsys, "find", "--instance", str(tmp_path / "missing"))[0] == 2
    assert run(capsys, "find", "--instance", "x", "--max-nodes", "abc")[0] == 2
    assert run(capsys, "exact-prob", "--n", "5", "--m", "2", "--r", "3")[0] == 3


def test_exact_prob_and_odd(capsys):
    code, out, _ = run(capsys, "exact-prob", "--n", "3", "--m", "2", "--r", "2", "--json")
    assert code == 0 and json.loads(out)["probability"] == "5/16"
    code, out, _ = run(capsys, "verify-odd", "--n", "3")
    assert code == 0 and "all pairs admit stackings" in out


def test_lemma_checks_exit_code(capsys):
    code, out, _ = run(capsys, "lemma-checks", "--q", "0", "--f-max", "1000")
    assert code == 0 and "pass" in out
    code, out, _ = run(capsys, "lemma-checks", "--q", "0.1", "--f-max", "1000", "--k-max", "20")
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rainbowstack", "thresholds", "--n", "4", "--m", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("r_star:")
