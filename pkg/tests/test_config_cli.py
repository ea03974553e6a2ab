import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from biphoton.cli import main
from biphoton.config import (
    ConfigError,
    builtin_config_path,
    dump_config,
    parse_config,
)

COLLINEAR_CFG = builtin_config_path("bbo_collinear")
NONCOLLINEAR_CFG = builtin_config_path("bbo_noncollinear")


def test_parse_bundled_collinear():
    rc = parse_config(COLLINEAR_CFG)
    assert math.degrees(rc.crystal.tuning_angle) == pytest.approx(22.9)
    assert rc.crystal.length_lc == pytest.approx(4.0e-3)
    assert rc.crystal.pump_wavelength == pytest.approx(527.5e-9)
    assert rc.pump.waist == pytest.approx(600e-6)
    assert rc.mc.sampler == "pump"


def test_parse_bundled_noncollinear():
    rc = parse_config(NONCOLLINEAR_CFG)
    assert math.degrees(rc.crystal.tuning_angle) == pytest.approx(28.0)
    assert rc.grid.n_q == 2048


def test_missing_pump_waist_gets_default(tmp_path):
    cfg = tmp_path / "min.cfg"
    cfg.write_text("[crystal]\ntuning_angle_deg = 22.9\n\n[pump]\ncoupling_g = 2e-3\n")
    rc = parse_config(cfg)
    assert rc.pump.waist == pytest.approx(600e-6)
    assert rc.pump.coupling_g == pytest.approx(2e-3)
    # the resolved dump echoes the applied default (SI spelling)
    assert "waist_m = 0.0006" in dump_config(rc)


def test_negative_length_names_field(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[crystal]\nlength_mm = -4.0\n")
    with pytest.raises(ConfigError, match="length_lc"):
        parse_config(cfg)


def test_unknown_key_rejected_with_location(tmp_path):
    cfg = tmp_path / "unknown.cfg"
    cfg.write_text("[crystal]\nlenght_mm = 4.0\n")
    with pytest.raises(ConfigError, match=r"\[crystal\] lenght_mm"):
        parse_config(cfg)
    cfg2 = tmp_path / "unknown2.cfg"
    cfg2.write_text("[cristal]\nlength_mm = 4.0\n")
    with pytest.raises(ConfigError, match=r"\[cristal\]"):
        parse_config(cfg2)


def test_syntax_error_carries_line_info(tmp_path):
    cfg = tmp_path / "syntax.cfg"
    cfg.write_text("[crystal\nlength_mm = 4.0\n")
    with pytest.raises(ConfigError, match="line"):
        parse_config(cfg)


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        parse_config("/nonexistent/nowhere.cfg")


def test_config_round_trip(tmp_path):
    rc1 = parse_config(COLLINEAR_CFG)
    dumped = tmp_path / "dumped.cfg"
    dumped.write_text(dump_config(rc1))
    rc2 = parse_config(dumped)
    assert rc1 == rc2
    assert dump_config(rc2) == dump_config(rc1)


def test_cli_tune_prints_angle(tmp_path, capsys):
    code = main(["tune", "--config", str(COLLINEAR_CFG), "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "22.9" in out
    payload = json.loads((tmp_path / "tune.json").read_text())
    assert payload["found"] is True
    assert payload["angle_deg"] == pytest.approx(22.9, abs=0.5)
    manifest = json.loads((tmp_path / "run.json").read_text())
    assert manifest["command"] == "tune"
    assert "resolved_config" in manifest
    assert manifest["outputs"] == ["tune.json"]
    assert "timings" in manifest


def test_cli_dispersion_outputs(tmp_path):
    code = main(["dispersion", "--config", str(COLLINEAR_CFG), "--out", str(tmp_path)])
    assert code == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["gvm_delay_s"] == pytest.approx(350e-15, rel=0.10)
    assert metrics["spatial_walkoff_m"] == pytest.approx(220e-6, rel=0.10)
    header = (tmp_path / "dispersion.csv").read_text().splitlines()[0]
    assert header == "omega_rad_s,k_s_rad_m,v_g_m_s,gvd_s2_m"


def test_cli_pmcurve_outputs_with_gaps(tmp_path):
    code = main(["pmcurve", "--config", str(COLLINEAR_CFG), "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "pmcurve.csv").read_text().splitlines()
    assert lines[0] == "omega_rad_s,q_pm_rad_m,slope_s_m"
    # literal 22.9 deg is a hair under-tuned: a gap straddles degeneracy
    gaps = [l for l in lines[1:] if l.split(",")[1] == ""]
    assert gaps
    meta = json.loads((tmp_path / "pmcurve.json").read_text())
    assert meta["n_gaps"] == len(gaps)


def _small_cfg(tmp_path, name="small.cfg", n=256, extra=""):
    text = (
        "[crystal]\ntuning_angle_deg = 22.9\n\n"
        f"[grid]\nn_q = {n}\nn_omega = {n}\nomega_extent = 3.0e14\n"
        + extra
    )
    cfg = tmp_path / name
    cfg.write_text(text)
    return cfg


def test_cli_correlate_outputs(tmp_path):
    cfg = _small_cfg(tmp_path)
    out = tmp_path / "out"
    code = main(["correlate", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    n = 256
    blob = (out / "map.bin").read_bytes()
    assert len(blob) == 3 * n * n * 8
    planes = np.frombuffer(blob, dtype="<f8").reshape(3, n, n)
    assert np.allclose(planes[0], planes[1] ** 2 + planes[2] ** 2, rtol=1e-10)
    sidecar = json.loads((out / "map.json").read_text())
    assert sidecar["axes"]["delta_x"]["n"] == n
    assert sidecar["mode"] == "slice2d"
    ridge = json.loads((out / "ridge.json").read_text())
    assert "predicted_slope_s_m" in ridge
    assert (out / "plot_map.py").is_file()
    csv_lines = (out / "map.csv").read_text().splitlines()
    assert csv_lines[0] == "delta_x_m,delta_t_s,abs2"


def test_cli_correlate_reproducible_bits(tmp_path):
    cfg = _small_cfg(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["correlate", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["correlate", "--config", str(cfg), "--out", str(out2)]) == 0
    for name in ("map.bin", "map.csv", "map.json", "ridge.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_cli_schmidt_sweep_small(tmp_path):
    cfg = _small_cfg(
        tmp_path,
        extra=(
            "\n[filter]\nomega_max_list = 5e13, 1e14\n\n"
            "[mc]\nn_norm = 20000\nn_purity = 60000\nseed = 4\n"
        ),
    )
    out = tmp_path / "sweep"
    code = main(["schmidt-sweep", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "omega_max_hz,k3d,k3d_err,k2d,k2d_err,k1d,k1d_err,kprod,kprod_err"
    assert len(lines) == 3
    meta = json.loads((out / "sweep_meta.json").read_text())
    assert meta["seed"] == 4
    assert meta["rng"].startswith("numpy PCG64")
    assert (out / "plot_sweep.py").is_file()


def test_cli_seed_and_samples_flags_echoed(tmp_path):
    cfg = _small_cfg(
        tmp_path,
        extra="\n[filter]\nomega_max_list = 5e13\n\n[mc]\nseed = 4\n",
    )
    out = tmp_path / "flags"
    code = main([
        "schmidt-sweep", "--config", str(cfg), "--out", str(out),
        "--seed", "123", "--samples", "50000",
    ])
    assert code == 0
    manifest = json.loads((out / "run.json").read_text())
    assert manifest["flags"]["seed"] == 123
    assert manifest["seed"] == 123
    assert manifest["resolved_config"]["mc"]["n_purity"] == 50000


def test_cli_bad_config_exit_code(tmp_path, capsys):
    code = main(["tune", "--config", str(tmp_path / "missing.cfg")])
    assert code == 2
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert payload["error"] == "ConfigError"


def test_cli_runtime_error_removes_partial_outputs(tmp_path, capsys):
    # an omega extent beyond the dispersion window fails inside the command
    cfg = _small_cfg(tmp_path, extra="").read_text()
    bad = tmp_path / "bad_extent.cfg"
    bad.write_text(cfg.replace("omega_extent = 3.0e14", "omega_extent = 3.0e15"))
    out = tmp_path / "broken"
    code = main(["pmcurve", "--config", str(bad), "--out", str(out)])
    assert code == 1
    payload = json.loads(capsys.readouterr().err)
    assert payload["command"] == "pmcurve"
    assert not (out / "pmcurve.csv").exists()
    assert not (out / "run.json").exists()


def test_cli_env_var_output_dir(tmp_path, monkeypatch, capsys):
    target = tmp_path / "от_env"
    monkeypatch.setenv("BIPHOTON_OUT", str(target))
    code = main(["tune", "--config", str(COLLINEAR_CFG)])
    assert code == 0
    assert (target / "tune.json").is_file()


def test_cli_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "biphoton.cli", "tune", "--config",
         str(COLLINEAR_CFG), "--out", "/tmp/biphoton_entry_test"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "22.9" in proc.stdout
