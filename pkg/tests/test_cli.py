import json

import numpy as np
import pytest

from dispersolve.cli import main
from dispersolve.experiments import ExperimentResult
from dispersolve.grid import Field, Grid, save_field
from dispersolve.runio import (ConfigError, build_initial, initial_shape_fn,
                               parse_config, run_id, serialize_config,
                               write_result)


BASE = """\
seed = 7

[equation]
dispersion = "purepower:alpha=2"
alpha = 2.0

[grid]
length = 6.283185307179586
n = 64

[time]
dt = 0.01
t_end = 0.1

[experiment]
name = "solve"
initial = "cos:k=1,a=0.1"
"""


# -- parsing ----------------------------------------------------------

def test_parse_serialize_round_trip():
    rc = parse_config(BASE)
    assert rc.seed == 7
    assert rc.equation["eps"] == 0.0          # default filled in
    rc2 = parse_config(serialize_config(rc))
    assert rc2 == rc
    assert run_id(rc2) == run_id(rc)


def test_run_id_depends_on_seed():
    rc = parse_config(BASE)
    assert run_id(rc) != run_id(parse_config(BASE.replace("seed = 7",
                                                          "seed = 8")))


def test_unknown_section_and_key_report_location():
    with pytest.raises(ConfigError) as err:
        parse_config(BASE + "\n[extra]\nfoo = 1\n")
    assert err.value.key_path == "extra"
    with pytest.raises(ConfigError) as err:
        parse_config(BASE.replace("n = 64", "n = 64\nnn = 3"))
    assert err.value.key_path == "grid.nn"
    assert err.value.line is not None


def test_duplicate_key_is_config_error():
    with pytest.raises(ConfigError):
        parse_config(BASE.replace("n = 64", "n = 64\nn = 128"))


def test_missing_required_key():
    with pytest.raises(ConfigError) as err:
        parse_config(BASE.replace('dispersion = "purepower:alpha=2"\n', ""))
    assert err.value.key_path == "equation.dispersion"


def test_type_errors_are_reported():
    with pytest.raises(ConfigError) as err:
        parse_config(BASE.replace("n = 64", 'n = "lots"'))
    assert err.value.key_path == "grid.n"


def test_cross_field_validation():
    bad_beta = BASE.replace("alpha = 2.0", "alpha = 2.0\nbeta = 4.0")
    with pytest.raises(ConfigError, match="beta"):
        parse_config(bad_beta)
    bad_eps = BASE.replace("alpha = 2.0", "alpha = 2.0\neps = 0.5")
    with pytest.raises(ConfigError, match="dissipation"):
        parse_config(bad_eps)
    with pytest.raises(ConfigError, match="alpha"):
        parse_config(BASE.replace("alpha = 2.0", "alpha = 3.0"))


def test_experiment_validation():
    with pytest.raises(ConfigError, match="unknown experiment"):
        parse_config(BASE.replace('name = "solve"', 'name = "frobnicate"'))
    with pytest.raises(ConfigError) as err:
        parse_config(BASE + 'trials = 10\n')
    assert err.value.key_path == "experiment.trials"


# -- initial data -----------------------------------------------------

def test_initial_shape_forms():
    L = 2.0 * np.pi
    x = np.linspace(0.0, L, 17)
    cos = initial_shape_fn("cos:k=2,a=0.5,mean=1.0", L)
    assert np.allclose(cos(x), 1.0 + 0.5 * np.cos(2.0 * x))
    sol = initial_shape_fn("soliton-bo:c=2,x0=0", L)
    assert sol(np.zeros(1))[0] == pytest.approx(8.0)
    with pytest.raises(ConfigError):
        initial_shape_fn("sawtooth:a=1", L)


def test_build_initial_rough_is_seeded():
    grid = Grid(length=2.0 * np.pi, n=64)
    a = build_initial("rough:s=0.5,delta=0.1", grid, seed=4)
    b = build_initial("rough:s=0.5,delta=0.1", grid, seed=4)
    c = build_initial("rough:s=0.5,delta=0.1", grid, seed=5)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


# -- result writing ---------------------------------------------------

def _dummy_result(table, verdict="pass"):
    return ExperimentResult(name="meter:lemma24", config={}, table=table,
                            fitted={}, verdict=verdict, seed=0)


def test_write_result_idempotent(tmp_path):
    rc = parse_config(BASE)
    res = _dummy_result(({"T": 1.0, "ratio": 0.5},))
    m1 = write_result(tmp_path, rc, res)
    assert not m1["existing"]
    assert (tmp_path / m1["run_id"] / "result.json").exists()
    assert (tmp_path / m1["run_id"] / "table.csv").exists()
    m2 = write_result(tmp_path, rc, res)
    assert m2["existing"]
    assert m2["files"] == m1["files"]


def test_write_result_flags_nan(tmp_path):
    rc = parse_config(BASE)
    m = write_result(tmp_path, rc, _dummy_result(({"ratio": float("nan")},)))
    assert m["nan_present"]
    # the json file itself must stay loadable
    body = json.loads((tmp_path / m["run_id"] / "result.json").read_text())
    assert body["table"][0]["ratio"] == "nan"


def test_write_result_empty_table_is_inconclusive(tmp_path):
    rc = parse_config(BASE)
    m = write_result(tmp_path, rc, _dummy_result(()))
    assert m["verdict"] == "inconclusive"


# -- CLI end to end ---------------------------------------------------

def _write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)

METER_CFG = """\
[equation]
dispersion = "purepower:alpha=1,sign=-1"
alpha = 1.0

[grid]
length = 6.283185307179586
n = 64

[time]
dt = 0.01
t_end = 0.1

[experiment]
name = "meter"
meter = "lemma24"
"""


def test_cli_meter_pass_and_idempotent_rerun(tmp_path, capsys):
    cfg = _write(tmp_path, METER_CFG)
    out = str(tmp_path / "runs")
    assert main(["meter", "--config", cfg, "--out", out]) == 0
    first = capsys.readouterr().out
    assert "verdict: pass" in first
    assert main(["meter", "--config", cfg, "--out", out]) == 0
    second = capsys.readouterr().out
    assert "identical config already run" in second


def test_cli_failing_meter_exits_1(tmp_path):
    cfg = _write(tmp_path, METER_CFG + 'stability_factor = 1.0001\n')
    assert main(["meter", "--config", cfg, "--out",
                 str(tmp_path / "runs")]) == 1


def test_cli_config_error_exits_2(tmp_path, capsys):
    bad = BASE.replace("alpha = 2.0", "alpha = 2.0\nbeta = 4.0")
    cfg = _write(tmp_path, bad)
    assert main(["solve", "--config", cfg, "--out",
                 str(tmp_path / "runs")]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_subcommand_mismatch_exits_2(tmp_path):
    cfg = _write(tmp_path, BASE)
    assert main(["meter", "--config", cfg, "--out",
                 str(tmp_path / "runs")]) == 2


def test_cli_missing_config_file_exits_2(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "absent.toml"),
                 "--out", str(tmp_path / "runs")]) == 2


def test_cli_solve_writes_diagnostics(tmp_path, capsys):
    cfg = _write(tmp_path, BASE)
    out = str(tmp_path / "runs")
    assert main(["solve", "--config", cfg, "--out", out]) == 0
    rid = [p for p in (tmp_path / "runs").iterdir() if p.is_dir()][0]
    assert (rid / "diagnostics.csv").exists()
    manifest = json.loads((rid / "manifest.json").read_text())
    assert manifest["verdict"] == "pass"
    assert not manifest["nan_present"]


def test_cli_solver_abort_exits_3(tmp_path):
    cfg_text = BASE.replace('initial = "cos:k=1,a=0.1"',
                            'initial = "cos:k=1,a=50000.0"') \
                   .replace("t_end = 0.1", "t_end = 2.0") \
                   .replace("dt = 0.01", "dt = 0.05")
    cfg = _write(tmp_path, cfg_text)
    assert main(["solve", "--config", cfg, "--out",
                 str(tmp_path / "runs")]) == 3


def test_cli_norms_on_saved_field(tmp_path):
    grid = Grid(length=2.0 * np.pi, n=64)
    field_path = tmp_path / "u.txt"
    save_field(Field.from_values(grid, np.cos(grid.x)), field_path)
    cfg_text = BASE.replace(
        'name = "solve"\ninitial = "cos:k=1,a=0.1"',
        f'name = "norms"\ninput = "{field_path}"\nnorm = "Hs:s=0"')
    cfg = _write(tmp_path, cfg_text)
    assert main(["norms", "--config", cfg, "--out",
                 str(tmp_path / "runs")]) == 0
