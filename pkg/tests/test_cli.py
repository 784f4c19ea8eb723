import json
from pathlib import Path

import numpy as np
import pytest

from gftlab import io
from gftlab.cli import (ConfigError, ReportError, heatmap_svg, main, parse_complex,
                        parse_complex_kernel, parse_kernel, report_render, run)
from gftlab.multipliers import complex_monomial, delta_derivative, monomial, nonlocal_gft_family

DATA = Path(__file__).parent / "data"


def test_kernel_specs():
    assert parse_kernel("monomial:1") == monomial(1)
    assert parse_kernel("deriv:2") == delta_derivative(2)
    assert parse_kernel("cmono:1,1", "complex") == complex_monomial(1, 1)
    assert parse_kernel("gft:0.5", "real", 3) == nonlocal_gft_family("real", 3, 0.5)
    assert parse_kernel(monomial(2).to_json()) == monomial(2)
    with pytest.raises(ConfigError):
        parse_kernel("bogus")


def test_complex_specs():
    K = parse_complex("moment:3", (-2.0, 2.0))
    assert K.u == ((0, 1), (0, 0, 1)) and K.window == (-2.0, 2.0)
    assert parse_complex("linear:1,0.5", (-np.inf, np.inf)).degree == 1
    L = parse_complex("linear:1,2", (-1, 1))
    assert parse_complex_kernel("example:0.5", L).rho == 0.5
    assert parse_complex_kernel('{"family": "delta"}', L).family == "delta"
    with pytest.raises(ConfigError):
        parse_complex_kernel("gauss", L)


def test_radon_scenario(tmp_path):
    cfg = {"scenario": "radon", "n": 2, "kernel": "delta", "size": 128,
           "thresholds": {"round_trip_rel_l2": 0.05}}
    metrics, status = run(cfg, tmp_path)
    assert status == 0 and metrics["round_trip_rel_l2"] < 0.05
    assert json.loads((tmp_path / "metrics.json").read_text()) == metrics
    for name in ("phantom.gftb", "reconstruction.gftb", "hyperplanes.gftb",
                 "input.svg", "reconstruction.svg", "difference.svg"):
        assert (tmp_path / name).exists()
    assert io.load(tmp_path / "reconstruction.gftb").dims == (128, 128)


def test_empty_phantom_is_exact(tmp_path):
    cfg = {"scenario": "radon", "n": 2, "size": 32, "phantom": [],
           "thresholds": {"round_trip_rel_l2": 0.0}}
    metrics, status = run(cfg, tmp_path)
    assert metrics["round_trip_rel_l2"] == 0.0 and status == 0


def test_sphere_scenario_reports_funk_oracle(tmp_path):
    metrics, status = run({"scenario": "sphere", "lam": -1.0, "L": 12}, tmp_path)
    assert metrics["funk_oracle_ratio_error"] < 1e-6 and status == 0
    assert (tmp_path / "eigenvalues.csv").read_text().startswith("l,re,im")


def test_hypergroup_scenario(tmp_path):
    metrics, _ = run({"scenario": "hypergroup", "from": "fourier", "size": 16}, tmp_path)
    assert metrics["commutativity_defect"] < 1e-12


def test_threshold_failure_names_metric(tmp_path, capsys):
    code = main(["hypergroup", "--from", "sphere", "--L", "8", "--out", str(tmp_path),
                 "--threshold", "isometry_residual=-1"])
    assert code == 1
    assert "isometry_residual" in capsys.readouterr().err


def test_invalid_config_is_a_usage_error(tmp_path):
    bad = tmp_path / "cfg.json"
    bad.write_text('{"scenario": "radon",\n "size": }')
    with pytest.raises(SystemExit) as exc:
        main(["run", str(bad)])
    assert exc.value.code == 2
    bad.write_text(json.dumps({"scenario": "teleport"}))
    with pytest.raises(SystemExit):
        main(["run", str(bad)])
    with pytest.raises(ConfigError):
        run({"scenario": "radon", "size": 5000}, tmp_path)


def test_determinism(tmp_path):
    cfg = {"scenario": "plancherel", "n": 2, "kernel": "gft:0", "slopes": 60, "size": 32,
           "pairs": 2, "seed": 7}
    run(cfg, tmp_path / "a")
    run(cfg, tmp_path / "b")
    assert (tmp_path / "a" / "metrics.json").read_bytes() == (tmp_path / "b" / "metrics.json").read_bytes()


def test_report_matches_golden(tmp_path):
    svg, table = report_render(DATA / "golden_metrics.json", tmp_path)
    assert svg == (DATA / "golden_report.svg").read_text()
    assert (tmp_path / "report.svg").read_bytes() == (DATA / "golden_report.svg").read_bytes()
    assert "calibration_constant,n/a" in table


def test_report_single_scalar(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"x": 0.5}')
    svg, table = report_render(p)
    assert svg.count("<rect") == 1 and table == "metric,value\nx,0.5\n"


def test_report_parse_error_position(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{\n  "a": 1,\n  "b": ]\n}')
    with pytest.raises(ReportError, match="line 3"):
        report_render(p)


def test_heatmap_is_block_averaged_and_fixed_size():
    svg = heatmap_svg(np.arange(200 * 200, dtype=float).reshape(200, 200))
    assert 'width="320" height="320"' in svg
    assert svg.count("<rect") <= 64 * 64


def test_phantom_command(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["phantom", "--n", "2", "--size", "8", "--bump", "0,0,1", "--csv",
                 "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 65
