import csv
import subprocess
import sys

import numpy as np
import pytest

from adhoc_outage.cli import emit_csv, format_number, main, read_csv, resolve_config
from adhoc_outage.config import ExperimentConfig, load_config, parse_config
from adhoc_outage.errors import ConfigError
from adhoc_outage.experiments import PRESETS, ResultTable, preset_config, run_experiment


def test_config_round_trip():
    cfg = preset_config("table-2", realizations=123, gamma_db_grid=(0.0, 7.5))
    again = ExperimentConfig().replace(**parse_config(cfg.to_text()))
    assert again == cfg


def test_config_errors_name_line_and_field():
    with pytest.raises(ConfigError, match="line 2.*'bogus'"):
        parse_config("alpha = 3\nbogus = 1\n")
    with pytest.raises(ConfigError, match="line 2.*duplicate"):
        parse_config("alpha = 3\nalpha = 4\n")
    with pytest.raises(ConfigError, match="'num_interferers'"):
        parse_config("num_interferers = 2.5")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just words")
    with pytest.raises(ConfigError, match="'sweep'"):
        ExperimentConfig(sweep="alpha")


def test_empty_config_lists_required_fields():
    with pytest.raises(ConfigError, match="preset.*sweep"):
        resolve_config("# nothing here\n")
    with pytest.raises(ConfigError, match="preset"):
        load_config("")


def test_override_order():
    cfg = resolve_config("preset = fig-d\ngamma_db = 10\nseed = 4\n", overrides={"seed": 9})
    assert cfg.gamma_db == 10.0 and cfg.seed == 9
    assert preset_config("fig-d").gamma_db == 5.0


def test_db_fields_convert_once():
    cfg = ExperimentConfig(gamma_db=20.0, beta_db=3.0)
    ch = cfg.channel()
    assert ch.snr == pytest.approx(100.0)
    assert ch.sinr_threshold == pytest.approx(10 ** 0.3)


def test_format_number():
    assert format_number(30) == "30"
    assert format_number(0.1234567890123) == "0.123456789"
    assert format_number(np.float64(1.906e-3)) == "0.001906"


def test_csv_round_trip(tmp_path):
    t = ResultTable("x", ["M", "eps"], [[30, 0.125], [60, 1.5e-7]])
    path = emit_csv(t, tmp_path / "x.csv")
    cols, rows = read_csv(path)
    assert cols == ["M", "eps"]
    assert rows == [[30.0, 0.125], [60.0, 1.5e-7]]


def test_table_2_preset_columns(tmp_path):
    rc = main(["--preset", "table-2", "--realizations", "40", "--out", str(tmp_path)])
    assert rc == 0
    with open(tmp_path / "table-2.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["M", "alpha", "G", "sigma_s", "eps_center", "eps_perimeter"]
    assert len(rows) == 17
    assert rows[1][:4] == ["30", "3", "1", "0"]


def test_rerun_from_manifest_is_identical(tmp_path):
    assert main(["--preset", "fig-e", "--realizations", "50", "--seed", "5", "--out", str(tmp_path / "a")]) == 0
    manifest = tmp_path / "a" / "fig-e.manifest"
    assert main(["--config", str(manifest), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "fig-e.csv").read_bytes() == (tmp_path / "b" / "fig-e.csv").read_bytes()


def test_custom_sweeps(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("sweep = M\nm_grid = 5, 10\nrealizations = 30\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path)]) == 0
    cols, rows = read_csv(tmp_path / "custom-M.csv")
    assert cols == ["M", "eps_avg", "tc"] and len(rows) == 2
    for axis in ("gamma", "eps_t"):
        table = run_experiment(ExperimentConfig(sweep=axis, realizations=20))
        assert table.rows


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("preset = fig-a\nwhatever = 1\n")
    assert main(["--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["--out", str(tmp_path)]) == 2
    assert main(["--config", str(tmp_path / "missing.cfg")]) == 2
    crowded = tmp_path / "crowded.cfg"
    crowded.write_text("sweep = gamma\nnum_interferers = 400\nr_ex = 0.3\nmax_rejection_attempts = 50\n"
                       "realizations = 2\n")
    assert main(["--config", str(crowded), "--out", str(tmp_path)]) == 3
    assert "realization 0" in capsys.readouterr().err


def test_console_script_runs(tmp_path):
    out = subprocess.run([sys.executable, "-m", "adhoc_outage.cli", "--preset", "fig-b", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert (tmp_path / "fig-b.csv").exists()


def test_every_preset_is_registered():
    assert set(PRESETS) == {"fig-a", "fig-b", "fig-c", "fig-d", "fig-e", "fig-f", "fig-g", "table-1", "table-2"}
