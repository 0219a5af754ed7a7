import csv

import numpy as np
import pytest

from ess_rcga.cli import REPORT_HEADER, SERIES_HEADER, run_command
from ess_rcga.feasibility import is_feasible
from ess_rcga.scenario_io import builtin_scenario, load_scenario, save_scenario

from conftest import make_scenario, zero_scenario


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def zero_scn(tmp_path):
    path = tmp_path / "zero.scn"
    save_scenario(path, zero_scenario())
    return path


@pytest.fixture
def sunny_scn(tmp_path):
    path = tmp_path / "sunny.json"
    save_scenario(path, builtin_scenario("summer", "sunny", "weekday", "low", seed=1))
    return path


def test_zero_scenario_totals(zero_scn, tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert run_command(["run", "--scenario", str(zero_scn), "--algo", "noess,npb,dp",
                        "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [r["algo"] for r in rows] == ["noess", "npb", "dp"]
    assert all(float(r["total"]) == 0.0 for r in rows)
    assert all(r["saving_pct"] == "" for r in rows)  # undefined against a zero bill
    assert "n/a" in capsys.readouterr().out


def test_rcga_on_zero_capacity(tmp_path):
    path = tmp_path / "zero.scn"
    from ess_rcga.domain import BatterySpec
    save_scenario(path, zero_scenario().replace(battery=BatterySpec(0.0, 0.6, 0.6)))
    out = tmp_path / "r.csv"
    assert run_command(["run", "--scenario", str(path), "--algo", "rcga", "--seed", "1",
                        "--gens", "20", "--out", str(out)]) == 0
    assert float(read_csv(out)[0]["total"]) == 0.0


def test_npb_equals_noess_without_surplus(tmp_path):
    path = tmp_path / "s.json"
    save_scenario(path, make_scenario(np.ones(24), np.zeros(24), np.full(24, 5.0)))
    out = tmp_path / "r.csv"
    assert run_command(["run", "--scenario", str(path), "--algo", "npb,noess",
                        "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0]["total"] == rows[1]["total"]
    assert list(rows[0]) == list(REPORT_HEADER)


def test_repeated_seeds(sunny_scn, tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert run_command(["run", "--scenario", str(sunny_scn), "--algo", "rcga", "--seeds", "4",
                        "--gens", "50", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [r["algo"] for r in rows] == ["rcga", "rcga_std"]
    assert float(rows[1]["total"]) > 0
    mean = float(rows[0]["total"])
    std = float(rows[1]["total"])
    assert f"{mean:.2f} ({std:.2f})" in capsys.readouterr().out


def test_emit_series(sunny_scn, tmp_path):
    base = tmp_path / "series.csv"
    assert run_command(["run", "--scenario", str(sunny_scn), "--algo", "npb,rcga",
                        "--gens", "50", "--emit-series", str(base)]) == 0
    s = load_scenario(sunny_scn)
    for algo in ("npb", "rcga"):
        rows = read_csv(tmp_path / f"series_{algo}.csv")
        assert len(rows) == 24 and list(rows[0]) == list(SERIES_HEADER)
        residual = np.array([float(r["residual"]) for r in rows])
        assert is_feasible(residual, s)
        net = np.array([float(r["net_grid"]) for r in rows])
        prev = np.concatenate(([0.0], residual[:-1]))
        np.testing.assert_allclose(net, residual - prev + s.load - s.generation, atol=1e-12)
    # NPB charges in daylight and drains in the evening
    npb = np.array([float(r["residual"]) for r in read_csv(tmp_path / "series_npb.csv")])
    assert npb[:6].max() == 0.0
    assert npb[14] > 0.5
    assert npb[22] < npb[16]


def test_zero_series(zero_scn, tmp_path):
    path = tmp_path / "z.csv"
    assert run_command(["run", "--scenario", str(zero_scn), "--algo", "npb",
                        "--emit-series", str(path)]) == 0
    for r in read_csv(path):
        assert float(r["load"]) == float(r["gen"]) == float(r["residual"]) == 0.0
        assert float(r["net_grid"]) == 0.0
        assert float(r["price"]) > 0


def test_bad_flags(capsys):
    assert run_command(["run", "--case", "1", "--algo", "magic"]) == 2
    assert run_command(["run", "--case", "1", "--pop", "7"]) == 2
    assert run_command(["run"]) == 2
    assert "usage" in capsys.readouterr().err


def test_invalid_scenario(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format_version": 1, "load": [1], "generation": [0], '
                   '"tariff": {"energy_price": [5], "demand_rate": 1}, '
                   '"battery": "builtin", "initial_charge": 3.0}')
    assert run_command(["run", "--scenario", str(bad)]) == 1
    assert "x0_out_of_range" in capsys.readouterr().err
    assert run_command(["run", "--scenario", str(tmp_path / "missing.json")]) == 1


def test_deterministic_reports(sunny_scn, tmp_path):
    outs = []
    for k, extra in enumerate(([], ["--parallel-fitness"], [])):
        out = tmp_path / f"r{k}.csv"
        series = tmp_path / f"s{k}.csv"
        assert run_command(["run", "--scenario", str(sunny_scn), "--algo", "all", "--seed", "3",
                            "--gens", "200", "--out", str(out), "--emit-series", str(series),
                            *extra]) == 0
        outs.append((out.read_bytes(), (tmp_path / f"s{k}_rcga.csv").read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_synth_and_import(tmp_path):
    scn = tmp_path / "w.json"
    assert run_command(["synth", "--season", "winter", "--weather", "cloudy", "--day-type",
                        "weekend", "--demand-level", "high", "--seed", "2", "--out", str(scn)]) == 0
    assert load_scenario(scn) == builtin_scenario("winter", "cloudy", "weekend", "high", seed=2)

    prof = tmp_path / "p.csv"
    prof.write_text("hour,load_kwh,gen_kwh\n" + "".join(f"{h},0.5,0\n" for h in range(24)))
    out = tmp_path / "imp.json"
    assert run_command(["import-csv", str(prof), "--season", "summer", "--demand-level", "low",
                        "--out", str(out)]) == 0
    s = load_scenario(out)
    assert s.load.sum() == 12.0 and s.tariff.demand_rate == 20.0
    prof.write_text("hour,load_kwh,gen_kwh\n0,1,1\n")
    assert run_command(["import-csv", str(prof), "--season", "summer", "--demand-level", "low",
                        "--out", str(out)]) == 1
