import json
import shutil

import pytest

from coarse_lab.cli import main

from conftest import CONFIGS


def run_cli(*args):
    return main([str(a) for a in args])


def test_run_and_verify(tmp_path, capsys):
    out = tmp_path / "np"
    assert run_cli("run", CONFIGS / "nonproper_interval.toml", "--out", out) == 0
    assert "00_proper: RefutedAtScale" in capsys.readouterr().out
    for name in ("space.json", "combing.json", "metadata.json", "00_proper.json"):
        assert (out / name).exists()
    assert run_cli("verify", out / "00_proper.json") == 0
    assert "OK" in capsys.readouterr().out


def test_expectation_exit_code(tmp_path, capsys):
    assert run_cli("run", CONFIGS / "nonproper_expect_supported.toml", "--out", tmp_path) == 2
    assert "expected Supported" in capsys.readouterr().out


def test_empty_tasks(tmp_path):
    assert run_cli("run", CONFIGS / "empty_tasks.toml", "--out", tmp_path) == 0
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["reports"] == [] and (tmp_path / "space.json").exists()


def test_tampered_witness_is_reported(tmp_path, capsys):
    run_cli("run", CONFIGS / "nonproper_interval.toml", "--out", tmp_path)
    path = tmp_path / "00_proper.json"
    report = json.loads(path.read_text())
    assert report["result"]["witnesses"]
    report["result"]["witnesses"][0]["distance"] += 1
    path.write_text(json.dumps(report))
    capsys.readouterr()
    assert run_cli("verify", path) != 0
    out = capsys.readouterr().out
    assert "MISMATCH" in out and "witness 0" in out and "recomputed" in out


def test_missing_space_file(tmp_path, capsys):
    run_cli("run", CONFIGS / "cycle6_cohomology.toml", "--out", tmp_path)
    report = json.loads((tmp_path / "metadata.json").read_text())["reports"][0]
    report = tmp_path / report
    (tmp_path / "space.json").unlink()
    assert run_cli("verify", report) == 1
    err = capsys.readouterr().err
    assert "space.json" in err and "missing" in err


def test_toml_error_has_position(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('name = "x"\n[space]\nkind = \n')
    assert run_cli("run", bad, "--out", tmp_path / "o") == 1
    err = capsys.readouterr().err
    assert "line 3" in err and "column" in err


def test_unknown_task_kind(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('[space]\nkind = "uniform"\npoints = 2\n[[tasks]]\nkind = "homotopy"\n')
    assert run_cli("run", bad, "--out", tmp_path / "o") == 1
    assert "homotopy" in capsys.readouterr().err


@pytest.mark.parametrize("budget,needle", [("points", "points"), ("simplices", "simplices")])
def test_budget_errors_name_the_budget(tmp_path, capsys, budget, needle):
    cfg = tmp_path / "big.toml"
    cfg.write_text(
        '[space]\nkind = "cayley"\nradius = 6\ngroup = {type = "free_abelian", rank = 2}\n'
        f'[budgets]\n{budget} = 20\n'
        '[[tasks]]\nkind = "rips"\nR = 2\ndim_cap = 3\n')
    assert run_cli("run", cfg, "--out", tmp_path / "o") == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and needle in err


def test_bad_threads(tmp_path):
    with pytest.raises(SystemExit):
        run_cli("run", CONFIGS / "empty_tasks.toml", "--threads", 0)


def test_every_config_runs_and_verifies(tmp_path, capsys):
    for cfg in sorted(CONFIGS.glob("*.toml")):
        out = tmp_path / cfg.stem
        code = run_cli("run", cfg, "--out", out)
        assert code == (2 if cfg.stem == "nonproper_expect_supported" else 0), cfg.name
        for rep in sorted(out.glob("[0-9][0-9]_*.json")):
            if rep.name.endswith(".complex.json"):
                continue
            assert run_cli("verify", rep) == 0, rep
