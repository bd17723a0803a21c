import json

import numpy as np
import pytest

from conftest import CONFIGS, TWO_PI
from omit_sim import cli
from omit_sim.config import load_config, parse_config
from omit_sim.eit import map_omit_to_eit
from omit_sim.harness import derived_scalars
from omit_sim.output import ResultEnvelope, format_cell, read_csv_table

DEVICE = CONFIGS / "reference_device.ini"


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_help_mentions_units(capsys):
    with pytest.raises(SystemExit):
        cli.run(["--help"])
    out = capsys.readouterr().out
    assert "GHz/nm" in out and "exit codes" in out


def test_steady_state_reference_device(tmp_path):
    out = tmp_path / "ss.json"
    assert cli.run(["steady-state", "--config", str(DEVICE), "--out", str(out),
                    "--format", "json"]) == 0
    payload = json.loads(out.read_text())
    assert payload["roots"] == 1 and payload["stable_roots"] == 1
    row = dict(zip(payload["table"]["columns"], payload["table"]["rows"][0]))
    assert row["stable"] is True
    assert row["cooperativity"] == pytest.approx(0.523, rel=2e-3)
    assert payload["derived"]["cooperativity"] == pytest.approx(0.5232, rel=1e-3)


def test_steady_state_zero_power():
    cfg = load_config(DEVICE)
    text = cfg.to_ini().replace("power = 0.00050000000000000001 W", "power = 0 W")
    env = cli.cmd_steady_state(parse_config(text))
    assert len(env.rows) == 1
    assert env.rows[0][0] == 0.0 and env.rows[0][1] == 0.0


def test_malformed_unit_exit_code(tmp_path, capsys):
    bad = write(tmp_path, DEVICE.read_text().replace("gamma_m = 41 kHz", "gamma_m = 41 kHzz"))
    assert cli.run(["steady-state", "--config", str(bad)]) == cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "gamma_m" in err and "line" in err


def test_missing_config_is_io_error(tmp_path):
    assert cli.run(["sweep", "--config", str(tmp_path / "absent.ini")]) == cli.EXIT_IO


def test_unwritable_output_is_io_error(tmp_path):
    target = tmp_path / "no" / "such" / "dir" / "x.csv"
    assert cli.run(["sweep", "--config", str(DEVICE), "--out", str(target)]) == cli.EXIT_IO


def test_sweep_csv_layout_and_round_trip(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.run(["sweep", "--config", str(DEVICE), "--out", str(out)]) == 0
    text = out.read_text()
    meta = [ln for ln in text.splitlines() if ln.startswith("#")]
    assert any(ln.startswith("# config: [device]") for ln in meta)
    assert any(ln.startswith("# derived: cooperativity") for ln in meta)
    columns, units, rows = read_csv_table(text)
    assert columns == ["probe_offset", "abs_tp_sq", "abs_thom_sq", "phase"]
    assert units == ["rad/s", "1", "1", "rad"]

    env = cli.cmd_sweep(load_config(DEVICE))
    parsed = np.array(rows, dtype=float)
    assert np.array_equal(parsed, np.array(env.rows, dtype=float))


def test_config_echo_reparses(tmp_path):
    out = tmp_path / "s.json"
    cli.run(["sweep", "--config", str(DEVICE), "--out", str(out), "--format", "json"])
    payload = json.loads(out.read_text())
    cfg = parse_config(payload["config"])
    assert cfg == load_config(DEVICE)
    # every derived scalar is recomputable from the echo
    again = derived_scalars(cfg.system(), cfg.drive_params())
    assert again == payload["derived"]


def test_csv_echo_reparses(tmp_path):
    out = tmp_path / "s.csv"
    cli.run(["sweep", "--config", str(DEVICE), "--out", str(out)])
    echo = "\n".join(ln[len("# config: "):] for ln in out.read_text().splitlines()
                     if ln.startswith("# config: "))
    assert parse_config(echo) == load_config(DEVICE)


def test_rerun_is_byte_identical(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.run(["sweep", "--config", str(CONFIGS / "fig3a.ini"), "--out", str(a)])
    monkeypatch.setenv("OMIT_SIM_THREADS", "3")
    cli.run(["sweep", "--config", str(CONFIGS / "fig3a.ini"), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_bad_thread_env(monkeypatch):
    monkeypatch.setenv("OMIT_SIM_THREADS", "zero")
    assert cli.run(["sweep", "--config", str(DEVICE)]) == cli.EXIT_CONFIG


def test_model_flag_overrides(tmp_path):
    out = tmp_path / "w.json"
    cli.run(["sweep", "--config", str(DEVICE), "--model", "weak", "--format", "json",
             "--out", str(out)])
    payload = json.loads(out.read_text())
    assert "model = weak_coupling" in payload["config"]
    assert payload["warnings"]


def test_stdout_output(capsys):
    assert cli.run(["sweep", "--config", str(DEVICE)]) == 0
    assert "probe_offset (rad/s)" in capsys.readouterr().out


def test_power_series_table(tmp_path):
    out = tmp_path / "p.csv"
    assert cli.run(["power-series", "--config", str(CONFIGS / "fig4.ini"), "--out", str(out)]) == 0
    columns, _, rows = read_csv_table(out.read_text())
    assert len(rows) == 4
    assert columns[-1] == "status" and all(r[-1] == "ok" for r in rows)
    for r in rows:
        fit_w, theory_w = float(r[2]), float(r[4])
        assert fit_w == pytest.approx(theory_w, rel=1e-6)


def test_power_series_theory_columns_exact():
    cfg = load_config(CONFIGS / "fig4.ini")
    env = cli.cmd_power_series(cfg)
    for row in env.rows:
        coop = row[1]
        assert row[5] == pytest.approx((coop / (1 + coop)) ** 2, rel=1e-15)
        assert row[4] == pytest.approx(TWO_PI * 41e3 * (1 + coop), rel=1e-15)


def test_detuning_series_writes_per_trace_files(tmp_path):
    out = tmp_path / "d.csv"
    assert cli.run(["detuning-series", "--config", str(CONFIGS / "fig3b.ini"),
                    "--out", str(out)]) == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert len(files) == 6 and "d.csv" in files
    _, _, rows = read_csv_table(out.read_text())
    assert len(rows) == 5


def test_eit_compare_passes(tmp_path):
    out = tmp_path / "e.json"
    assert cli.run(["eit-compare", "--config", str(DEVICE), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["max_relative_deviation"] <= 1e-12
    assert set(payload["lambda_system"]) >= {"gamma12", "gamma13", "rabi", "omega21"}


def test_eit_compare_broken_mapping_fails():
    def broken(op, params):
        lam, ratio = map_omit_to_eit(op, params)
        return lam, ratio * 1.5
    env = cli.cmd_eit_compare(load_config(DEVICE), mapper=broken)
    assert env.extra["max_relative_deviation"] > 0.1
    assert env.extra["passed"] is False


def test_eit_compare_without_control():
    cfg = load_config(DEVICE)
    text = cfg.to_ini().replace("power = 0.00050000000000000001 W", "power = 0 W")
    env = cli.cmd_eit_compare(parse_config(text))
    assert env.extra["max_relative_deviation"] <= 1e-12
    assert env.extra["lambda_system"]["rabi"] == 0.0


def test_fit_subcommand(tmp_path):
    sweep = tmp_path / "s.csv"
    cli.run(["sweep", "--config", str(DEVICE), "--model", "weak", "--out", str(sweep)])
    out = tmp_path / "f.json"
    assert cli.run(["fit", "--input", str(sweep), "--column", "abs_thom_sq",
                    "--format", "json", "--out", str(out)]) == 0
    row = json.loads(out.read_text())["table"]["rows"][0]
    cfg = load_config(DEVICE)
    gamma_omit = derived_scalars(cfg.system(), cfg.drive_params())["gamma_omit"]
    # |t_hom|^2 of the weak-coupling model is a Lorentzian dip of width Gamma_OMIT
    assert row[1] == pytest.approx(gamma_omit, rel=1e-6)


def test_fit_errors(tmp_path):
    assert cli.run(["fit", "--input", str(tmp_path / "none.csv"), "--column", "x"]) == cli.EXIT_IO
    csv = write(tmp_path, "a (1),b (1)\n1,2\n", "t.csv")
    assert cli.run(["fit", "--input", str(csv), "--column", "zzz"]) == cli.EXIT_CHECK_FAILED


def test_format_cell_round_trips():
    rng = np.random.default_rng(5)
    values = np.concatenate([rng.normal(size=500) * 10.0 ** rng.integers(-300, 300, 500),
                             [0.1, 1 / 3, 2 ** -1074, 1.7976931348623157e308]])
    for v in values:
        assert float(format_cell(float(v))) == float(v)
    assert format_cell(True) == "1" and format_cell(7) == "7" and format_cell("ok") == "ok"


def test_envelope_render_rejects_unknown_format():
    env = ResultEnvelope("x", "", {}, ("a",), ("1",), [[1.0]])
    with pytest.raises(ValueError):
        env.render("xml")
