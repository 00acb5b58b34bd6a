import json
import subprocess
import sys

import pytest

from doubleris.cli import main
from doubleris.experiments import CSV_COLUMNS


@pytest.fixture
def desk_file(tmp_path):
    p = tmp_path / "desk.json"
    p.write_text(json.dumps({"scale": "desk", "trials": 300}))
    return p


def test_sweep_to_file(tmp_path, desk_file):
    out = tmp_path / "rates.csv"
    code = main(["sweep", "--config", str(desk_file), "--param", "total_power_dbm",
                 "--grid", "0,10,20", "--mode", "both", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 3 * 4


def test_sweep_to_stdout(capsys, desk_file):
    assert main(["sweep", "--config", str(desk_file), "--param", "kappa", "--grid", "1,4"]) == 0
    assert capsys.readouterr().out.startswith("sweep_value,")


def test_sweep_bytes_identical_across_runs_and_workers(tmp_path, desk_file):
    outs = []
    for i, w in enumerate((1, 4, 1)):
        p = tmp_path / f"r{i}.csv"
        main(["sweep", "--config", str(desk_file), "--param", "rho_magnitude", "--grid", "0,0.5",
              "--mode", "mc", "--workers", str(w), "--out", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_rbd_check(capsys, desk_file):
    assert main(["rbd-check", "--config", str(desk_file), "--samples", "50"]) == 0
    assert capsys.readouterr().out.strip().endswith("PASS")


def test_invalid_scenario_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bs_correlation": {"rho_magnitude": 1.2}}))
    assert main(["rbd-check", "--config", str(bad)]) == 2
    assert "rho_magnitude" in capsys.readouterr().err


def test_missing_config_exit_code(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "nope.json")]) == 2


def test_bad_grid_value(desk_file):
    assert main(["sweep", "--config", str(desk_file), "--param", "rho_magnitude", "--grid", "0.5,1.5"]) == 2


def test_argparse_rejects_unknown_parameter():
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--param", "alpha", "--grid", "1"])
    assert info.value.code != 0


@pytest.mark.slow
def test_validate_uniform_noise(tmp_path, capsys):
    p = tmp_path / "k0.json"
    p.write_text(json.dumps({"scale": "desk", "kappa": 0}))
    code = main(["validate", "--config", str(p), "--trials", "2000", "--samples", "100"])
    out = capsys.readouterr().out
    assert "rbd_irrelevant_mc" in out
    # the moment-bound check decides the exit code at this scale
    assert code == (0 if "some checks FAILED" not in out else 1)


def test_console_entry_point(desk_file):
    r = subprocess.run([sys.executable, "-m", "doubleris.cli", "rbd-check", "--config", str(desk_file),
                        "--samples", "5"], capture_output=True, text=True)
    assert r.returncode == 0 and "PASS" in r.stdout
