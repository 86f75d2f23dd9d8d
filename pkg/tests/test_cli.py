import json

import pytest
from click.testing import CliRunner

from besovlab.cli import main

GRID_ARGS = ["--grid-L", "12pi", "--grid-N", "2048"]


@pytest.fixture()
def runner():
    return CliRunner()


def test_validate_passes(runner):
    res = runner.invoke(main, ["validate", *GRID_ARGS])
    assert res.exit_code == 0, res.output
    assert "partition" in res.output
    assert "FAIL" not in res.output


def test_validate_negative_control(runner):
    res = runner.invoke(main, ["validate", *GRID_ARGS, "--suite", "partition",
                               "--inject-broken-phi"])
    assert res.exit_code == 1
    assert "FAIL" in res.output


def test_validate_suite_group(runner):
    res = runner.invoke(main, ["validate", *GRID_ARGS, "--suite", "grid"])
    assert res.exit_code == 0, res.output
    assert "multiplier" in res.output and "parseval" in res.output
    assert "bernstein" not in res.output


def test_validate_unknown_suite_is_config_error(runner):
    res = runner.invoke(main, ["validate", "--suite", "nope"])
    assert res.exit_code == 2


def test_bad_grid_is_config_error(runner):
    res = runner.invoke(main, ["validate", "--grid-N", "1000"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["validate", "--grid-L", "10.0"])
    assert res.exit_code == 2


def test_besov_field_spec(runner):
    res = runner.invoke(main, ["besov", "phi", "--grid-L", "24pi",
                               "--grid-N", "8192"])
    assert res.exit_code == 0, res.output
    assert "besov_norm(phi" in res.output
    res = runner.invoke(main, ["besov", "unknown:3"])
    assert res.exit_code == 2


def test_evolve_writes_snapshots(runner, tmp_path):
    res = runner.invoke(main, [
        "evolve", "coskx:1", *GRID_ARGS, "--dt", "0.005",
        "--t-list", "0.01,0.02", "--out", str(tmp_path),
    ])
    assert res.exit_code == 0, res.output
    csv_text = (tmp_path / "snapshots.csv").read_text().splitlines()
    assert csv_text[0] == "x,t=0.01,t=0.02"
    assert len(csv_text) == 2049
    sidecar = json.loads((tmp_path / "snapshots.json").read_text())
    assert sidecar["dt"] == 0.005
    assert sidecar["variant"] == "forq_u"


def test_evolve_off_lattice_time_is_config_error(runner, tmp_path):
    res = runner.invoke(main, [
        "evolve", "coskx:1", *GRID_ARGS, "--dt", "0.005",
        "--t-list", "0.0123", "--out", str(tmp_path),
    ])
    assert res.exit_code == 2


def test_evolve_blowup_exit_code(runner, tmp_path):
    # a wildly unstable step size drives the state past the sup ceiling
    res = runner.invoke(main, [
        "evolve", "coskx:1", *GRID_ARGS, "--dt", "0.5",
        "--t-list", "25", "--out", str(tmp_path),
    ])
    assert res.exit_code == 3


def test_config_file_with_flag_override(runner, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[grid]\nl = 12pi\nn = 1024\n\n[index]\ns = 3.0\n")
    res = runner.invoke(main, ["validate", "--config", str(cfg)])
    assert res.exit_code == 0, res.output
    # flag overrides the config file value
    res = runner.invoke(main, ["validate", "--config", str(cfg),
                               "--grid-N", "1000"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["validate", "--config", str(tmp_path / "no.ini")])
    assert res.exit_code == 2


def test_riemann_command(runner):
    res = runner.invoke(main, ["riemann", "--grid-L", "24pi",
                               "--grid-N", "65536", "--n-max", "8"])
    assert res.exit_code == 0, res.output
    assert "target" in res.output


def test_counterexample_dump(runner, tmp_path):
    res = runner.invoke(main, [
        "counterexample", "--grid-L", "24pi", "--grid-N", "65536",
        "--n-list", "5,6", "--out", str(tmp_path),
    ])
    assert res.exit_code == 0, res.output
    blocks = (tmp_path / "blocks.csv").read_text().splitlines()
    assert blocks[0] == "j,tn_5,tn_6"
    assert (tmp_path / "fields.csv").exists()
