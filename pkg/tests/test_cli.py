import csv
import io
import math

import pytest

from treebounds.cli import EXIT_DATA, EXIT_USAGE, main


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_vcdim_exact_stump(capsys):
    assert run(capsys, "vcdim", "--shape", "(.,.)", "--real", "3", "--exact-stump") == (0, "4\n", "")


def test_vcdim_leaf(capsys):
    code, out, _ = run(capsys, "vcdim", "--shape", ".")
    assert (code, out) == (0, "1\n")


def test_vcdim_tree(capsys):
    code, out, _ = run(capsys, "vcdim", "--shape", "((.,.),.)", "--real", "2")
    assert code == 0 and int(out) >= 2


def test_vcdim_bad_shape(capsys):
    code, _, err = run(capsys, "vcdim", "--shape", "((.,.)")
    assert code == EXIT_USAGE
    assert "shape" in err


def test_exact_stump_needs_a_stump(capsys):
    assert run(capsys, "vcdim", "--shape", "((.,.),.)", "--real", "2", "--exact-stump")[0] == EXIT_USAGE


def test_bad_category_counts(capsys):
    assert run(capsys, "vcdim", "--shape", "(.,.)", "--ordinal", "3,x")[0] == EXIT_USAGE
    assert run(capsys, "vcdim", "--shape", "(.,.)", "--ordinal", "0")[0] == EXIT_USAGE


def test_bound_csv(capsys):
    code, out, _ = run(capsys, "bound", "--shape", "(.,.)", "-c", "2", "-m", "5", "--real", "1", "--format", "csv")
    assert code == 0
    (row,) = _rows(out)
    assert row["parti_func_ub"] == "4"
    assert float(row["log_parti_func_ub"]) >= math.log(4) - 1e-3


def test_bound_table(capsys):
    code, out, _ = run(capsys, "bound", "--shape", "(.,.)", "-c", "2", "-m", "5", "--real", "1")
    assert code == 0
    assert out.splitlines()[0].split() == ["shape", "c", "m", "parti_func_ub", "log_parti_func_ub"]


def test_growth(capsys):
    code, out, _ = run(capsys, "growth", "--shape", "(.,.)", "--n-classes", "2", "-m", "5", "--real", "1",
                       "--format", "csv")
    assert code == 0
    assert math.exp(float(_rows(out)[0]["log_growth_func_ub"])) == pytest.approx(10, rel=1e-3)


def test_grow(capsys):
    code, out, _ = run(capsys, "grow", "--max-leaves", "3")
    assert code == 0
    assert "leaves=3" in out.splitlines()[-1]


def test_prune_ours_row(capsys):
    code, out, _ = run(capsys, "prune", "--model", "ours", "--seed", "0")
    assert code == 0
    (row,) = _rows(out)
    assert row["bound"] != ""
    assert len(row["time"].split(".")[1]) == 3


def test_prune_og_has_no_bound(capsys):
    (row,) = _rows(run(capsys, "prune", "--model", "og", "--seed", "0")[1])
    assert row["bound"] == ""


def test_prune_oracle_beats_the_rest(capsys):
    acc = {}
    for model in ("og", "cc", "km", "ours", "oracle"):
        (row,) = _rows(run(capsys, "prune", "--model", model, "--seed", "1", "--no-timing")[1])
        acc[model] = float(row["test_acc"])
    assert all(acc["oracle"] >= v for v in acc.values())


def test_prune_show_tree(capsys):
    out = run(capsys, "prune", "--model", "ours", "--show-tree", "--no-timing")[1]
    assert out.splitlines()[-1].startswith("(")


def test_unknown_model(capsys):
    assert run(capsys, "prune", "--model", "magic")[0] == EXIT_USAGE


def test_rerun_is_byte_identical(capsys):
    args = ("prune", "--model", "cc", "--seed", "3", "--no-timing")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_experiment_single_run(capsys):
    code, out, _ = run(capsys, "experiment", "--runs", "1", "--models", "OG,Ours", "--format", "csv", "--no-timing")
    assert code == 0
    rows = _rows(out)
    assert [r["model"] for r in rows] == ["OG", "Ours"]
    assert all(float(r["test_acc_std"]) == 0 for r in rows)
    assert "time_mean" not in rows[0]


def test_experiment_unknown_model(capsys):
    assert run(capsys, "experiment", "--runs", "1", "--models", "OG,XX")[0] == EXIT_USAGE


def test_data_errors_exit_with_two(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("real,ord(2),label\n1,3,a\n")
    code, _, err = run(capsys, "grow", "--data", str(bad))
    assert code == EXIT_DATA
    assert "row 2, column 1" in err
    assert run(capsys, "grow", "--data", str(tmp_path / "missing.csv"))[0] == EXIT_DATA


def test_custom_dataset(capsys, tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text("real,nom(3),label\n" + "".join(f"{i},{1 + i % 3},{'ab'[i % 2]}\n" for i in range(20)))
    code, out, _ = run(capsys, "grow", "--data", str(path))
    assert code == 0 and "train_acc=1.0000" in out


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--instances", "50")
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") == 6 + 3 + 1


def test_verify_failure_exits_with_three(capsys, monkeypatch):
    import treebounds.cli as cli_module

    monkeypatch.setattr(cli_module, "stump_exactness", lambda: [(4, 3, 6, 7)])
    code, out, err = run(capsys, "verify", "--instances", "5")
    assert code == cli_module.EXIT_VERIFY
    assert "FAIL stump m=4" in out
