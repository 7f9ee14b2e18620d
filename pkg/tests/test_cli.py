import json
import math
import subprocess
import sys

import pytest

from morqw.cli import (
    ConfigError,
    ScenarioConfig,
    csv_to_records,
    main,
    records_to_csv,
)

HEADER_1D = "delta_b,re_s_plus,im_s_plus,re_s_minus,im_s_minus,re_diff,im_diff,t_x,t_y,phi_rot,residual,status"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_point_fig6(capsys):
    code, out, _ = run(capsys, "point", "--figure", "fig6", "--set", "delta_b=7", "--set", "alpha_l=45")
    assert code == 0
    data = json.loads(out)
    assert data["t_y"] == pytest.approx(0.8010, abs=1e-4)
    assert set(data) == {
        "re_s_plus", "im_s_plus", "re_s_minus", "im_s_minus",
        "re_diff", "im_diff", "t_x", "t_y", "phi_rot", "residual",
    }


def test_point_numeric_reports_residual(capsys):
    code, out, _ = run(capsys, "point", "--set", "alpha_l=58", "--workers", "1")
    assert code == 0
    assert json.loads(out)["residual"] < 1e-10


def test_point_no_medium(capsys):
    code, out, _ = run(capsys, "point", "--set", "alpha_l=0")
    data = json.loads(out)
    assert (data["t_x"], data["t_y"]) == (1.0, 0.0)


def test_point_zero_probe_is_solver_error(capsys):
    code, _, err = run(capsys, "point", "--set", "omega_plus=0")
    assert code == 3
    assert "ZeroProbe" in err


def test_point_rejects_axes(capsys):
    code, _, _ = run(capsys, "point", "--set", "axis1=delta:-1:1:3")
    assert code == 2


@pytest.mark.parametrize(
    "setting", ["bogus=1", "delta_b=abc", "delta_b=inf", "method=exact", "axis1=alpha_l:0:0:2", "delta_p=1"]
)
def test_config_errors_exit_2(capsys, setting):
    code, _, err = run(capsys, "point", "--set", setting)
    assert code == 2
    assert err.startswith("error:")


def test_sweep_fig6_csv(tmp_path, capsys):
    out = tmp_path / "fig6.csv"
    code, _, _ = run(capsys, "sweep", "--figure", "fig6", "--out", str(out), "--workers", "1")
    assert code == 0
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == HEADER_1D
    assert len(lines) == 502
    header, rows = csv_to_records(text)
    k_ty = header.index("t_y")
    best = max(rows, key=lambda r: r[k_ty])
    assert best[k_ty] == pytest.approx(0.80, abs=0.02)
    assert abs(best[0] - 7.0) < 0.5


def test_sweep_fig5_transparency(capsys):
    code, out, _ = run(capsys, "sweep", "--figure", "fig5", "--workers", "1")
    assert code == 0
    header, rows = csv_to_records(out)
    assert header[0] == "phi"
    for target in (math.pi / 2, 3 * math.pi / 2):
        row = min(rows, key=lambda r: abs(r[0] - target))
        assert row[header.index("t_x")] == pytest.approx(1.0, abs=1e-6)
        assert row[header.index("t_y")] == pytest.approx(0.0, abs=1e-6)


def test_sweep_degenerate_range_rejected(capsys):
    code, _, err = run(capsys, "sweep", "--set", "axis1=alpha_l:0:0:2")
    assert code == 2


def test_sweep_needs_axes(capsys):
    code, _, _ = run(capsys, "sweep")
    assert code == 2


def test_sweep_json(capsys):
    code, out, _ = run(
        capsys, "sweep", "--set", "axis1=delta_b:0:2:3", "--method", "analytic",
        "--set", "omega_plus=1", "--set", "gamma_d_43=0", "--set", "delta_b=0",
        "--format", "json", "--set", "alpha_l=45",
    )
    assert code == 0
    records = json.loads(out)
    assert [r["delta_b"] for r in records] == [0.0, 1.0, 2.0]
    assert records[0]["residual"] is None
    assert all(r["status"] == "ok" for r in records)


def test_csv_round_trip(capsys):
    code, out, _ = run(capsys, "sweep", "--figure", "fig4", "--workers", "1")
    assert code == 0
    header, rows = csv_to_records(out)
    assert records_to_csv(header, rows) == out


def test_csv_round_trip_with_error_rows(capsys):
    code, out, _ = run(capsys, "sweep", "--set", "axis1=delta:-1:1:3", "--method", "analytic",
                       "--set", "gamma_d_43=0", "--set", "delta_b=1")
    assert code == 0
    assert "RegimeViolation" in out and "nan" in out
    header, rows = csv_to_records(out)
    assert records_to_csv(header, rows) == out


def test_figure_fig3_files(tmp_path, capsys):
    code, _, _ = run(capsys, "figure", "fig3", "--out", str(tmp_path), "--workers", "1")
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert len(names) == 6
    assert "fig3_gamma21-0.05_al-58.csv" in names
    assert "fig3_gamma21-0_al-30.csv" in names


def test_figure_fig7_single_2d_file(tmp_path, capsys):
    code, _, _ = run(capsys, "figure", "--figure", "fig7", "--out", str(tmp_path), "--workers", "2")
    assert code == 0
    files = list(tmp_path.iterdir())
    assert [p.name for p in files] == ["fig7.csv"]
    lines = files[0].read_text().splitlines()
    assert lines[0].startswith("delta_b,alpha_l,")
    assert len(lines) == 501 * 501 + 1


def test_unknown_figure_exit_2(capsys):
    code, _, err = run(capsys, "figure", "fig9")
    assert code == 2
    assert "UnknownFigure" in err


def test_io_error_exit_4(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    code, _, _ = run(capsys, "sweep", "--figure", "fig6", "--out", str(target), "--workers", "1")
    assert code == 4


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text("# fig6 point\nfigure = fig6\ndelta_b = 7\nalpha_l = 10\nmethod = numeric\n")
    _, out, _ = run(capsys, "point", "--config", str(cfg))
    from_file = json.loads(out)
    assert from_file["residual"] is not None  # numeric from config
    _, out, _ = run(capsys, "point", "--config", str(cfg), "--set", "alpha_l=45")
    overridden = json.loads(out)
    assert overridden["t_y"] == pytest.approx(0.8010, abs=1e-4)
    assert overridden["t_y"] != from_file["t_y"]
    _, out, _ = run(capsys, "point", "--config", str(cfg), "--set", "alpha_l=45", "--method", "analytic")
    assert json.loads(out)["residual"] is None  # flag beats config


def test_set_overrides_config_file_for_flags(tmp_path, capsys):
    cfg = tmp_path / "scenario.json"
    cfg.write_text(json.dumps({"figure": "fig6", "format": "json", "out": str(tmp_path / "a.json")}))
    code, _, _ = run(capsys, "sweep", "--config", str(cfg), "--format", "csv", "--workers", "1")
    assert code == 0
    assert (tmp_path / "a.json").read_text().startswith("delta_b,")


def test_json_config_rejects_nesting(tmp_path, capsys):
    cfg = tmp_path / "nested.json"
    cfg.write_text(json.dumps({"params": {"delta_b": 1}}))
    code, _, _ = run(capsys, "point", "--config", str(cfg))
    assert code == 2
    cfg.write_text(json.dumps({"delta_b": [1, 2]}))
    assert run(capsys, "point", "--config", str(cfg))[0] == 2


def test_scenario_config_round_trip():
    cfg = ScenarioConfig.from_mapping({
        "delta_b": 0.1 + 0.2, "omega_1": -1.0, "alpha_l": 58, "axis1": "delta:-20:20",
        "method": "numeric", "figure": "fig3", "format": "csv", "workers": 3, "delta": 0.5,
    })
    again = ScenarioConfig.from_text(cfg.to_text())
    assert again == cfg
    assert ScenarioConfig.from_mapping(again.to_mapping()) == cfg
    assert ScenarioConfig.from_text(json.dumps(cfg.to_mapping())) == cfg
    assert cfg.axis1 == "delta:-20.0:20.0:501"


def test_scenario_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_text("temperature = 4\n")
    with pytest.raises(ConfigError):
        ScenarioConfig.from_text("delta_b 7\n")
    with pytest.raises(ConfigError):
        ScenarioConfig.from_mapping({"delta_b": float("nan")})


def test_env_worker_default(monkeypatch):
    from morqw.sweep import default_workers

    monkeypatch.setenv("MORQW_WORKERS", "3")
    assert default_workers() == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "morqw", "point", "--figure", "fig6", "--set", "delta_b=7"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["t_y"] == pytest.approx(0.8010, abs=1e-4)
