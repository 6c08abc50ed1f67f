import csv
import json
import math
from pathlib import Path

import pytest
import numpy as np

from pyboseglass.dtypes import CurvePoint, FitParams, LocalizationCurve
from pyboseglass import cli
import pyboseglass


def write_config(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))


def synthetic_curve_csv(path, count):
    fit = FitParams.default()
    x = np.linspace(0.01, 0.072, count)
    points = [CurvePoint(n, fit.localization_length(n), 3.0, -0.01, True) for n in x]
    LocalizationCurve(points, 1.0).to_csv(path)


def test_package_url_matches_manifest():
    manifest = (Path(__file__).parents[1] / "pyproject.toml").read_text(encoding="utf-8")

    assert f'Homepage = "{pyboseglass.__url__}"' in manifest


def test_print_config_defaults(capsys):
    assert cli.main(["print-config"]) == cli.EXIT_OK
    text = capsys.readouterr().out

    for section in cli.SCHEMA:
        assert f"[{section}]" in text
    assert "nodes_per_radius = 200" in text
    assert "variant = limit-consistent" in text
    assert "densities_cm2 = 12000000000.0, 8000000000.0, 4000000000.0" in text


def test_print_config_round_trip(tmp_path, capsys):
    path = write_config(tmp_path, "[solver]\nnodes_per_radius = 120\n\n[material:CdTe]\nm_e = 0.1\nm_h = 0.4\neps_r = 10.2\n")
    assert cli.main(["print-config", "--config", path]) == cli.EXIT_OK
    dumped = capsys.readouterr().out

    assert "nodes_per_radius = 120" in dumped
    assert "[material:CdTe]" in dumped
    reloaded = cli.load_config(write_config(tmp_path, dumped, "dumped.ini"))
    assert reloaded.digest() == cli.load_config(path).digest()


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[solver]\nnodes = 10\n", "[solver] nodes: unknown key"),
        ("[solver]\nnodes_per_radius = many\n", "[solver] nodes_per_radius"),
        ("[solver]\nnodes_per_radius = 2\n", "must be at least 4"),
        ("[plots]\nwidth = 3\n", "[plots]: unknown section"),
        ("[run]\nvariant = exact\n", "[run] variant"),
        ("[scan]\nL_min = 10\nL_max = 5\n", "[scan] L_max"),
        ("[thermo]\nbeta = 0.2\n", "must be negative"),
        ("[material]\npreset = Unobtainium\n", "unknown material"),
    ],
)
def test_invalid_config(tmp_path, capsys, text, fragment):
    path = write_config(tmp_path, text)

    assert cli.main(["emission", "--config", path, "--out", str(tmp_path / "out")]) == cli.EXIT_CONFIG
    assert fragment in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_all_errors_reported(tmp_path):
    path = write_config(tmp_path, "[solver]\nnodes_per_radius = 2\nresidual_tol = -1\n\n[emission]\nchi = left\n")
    with pytest.raises(cli.ConfigError) as info:
        cli.load_config(path)

    assert len(info.value.messages) == 3


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["mu-of-l", "--config", str(tmp_path / "absent.ini")]) == cli.EXIT_CONFIG
    assert "no such file" in capsys.readouterr().err


def test_workers_flag_validated(tmp_path):
    assert cli.main(["emission", "--out", str(tmp_path), "--workers", "0"]) == cli.EXIT_CONFIG


def test_fit_needs_five_densities(tmp_path, capsys):
    path = write_config(tmp_path, "[loc-curve]\ndensities = 0.01, 0.02, 0.03\n")

    assert cli.main(["loc-curve", "--config", path, "--out", str(tmp_path / "out")]) == cli.EXIT_CONFIG
    assert "at least 5 densities" in capsys.readouterr().err


def test_fit_command(tmp_path):
    curve = tmp_path / "curve.csv"
    synthetic_curve_csv(curve, 10)
    out = tmp_path / "out"
    path = write_config(tmp_path, f"[fit]\ninput = {curve}\n")

    assert cli.main(["fit", "--config", path, "--out", str(out)]) == cli.EXIT_OK
    fit = json.loads((out / "fit.json").read_text(encoding="utf-8"))
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))

    assert pytest.approx(0.074, rel=1e-6) == fit["n_g"]
    assert pytest.approx(-0.1317, rel=1e-6) == fit["beta"]
    assert manifest["subcommand"] == "fit"
    assert manifest["outputs"] == ["fit.json"]
    assert manifest["version"] == cli.__version__
    assert manifest["config_sha256"] == cli.load_config(path, {"run": {"out": str(out)}}).digest()


def test_fit_command_missing_input(tmp_path):
    path = write_config(tmp_path, f"[fit]\ninput = {tmp_path / 'nothing.csv'}\n")

    assert cli.main(["fit", "--config", path, "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_fit_command_insufficient_points(tmp_path, capsys):
    curve = tmp_path / "curve.csv"
    synthetic_curve_csv(curve, 4)
    path = write_config(tmp_path, f"[fit]\ninput = {curve}\n")

    assert cli.main(["fit", "--config", path, "--out", str(tmp_path / "out")]) == cli.EXIT_NUMERICAL
    assert "numerical error" in capsys.readouterr().err


def test_emission_command(tmp_path):
    out = tmp_path / "out"
    path = write_config(tmp_path, "[emission]\nL_c_um = 0.5\nphi_points = 5\n")

    assert cli.main(["emission", "--config", path, "--out", str(out)]) == cli.EXIT_OK
    pattern = read_rows(out / "emission_pattern.csv")
    report = read_rows(out / "emission_report.csv")

    assert pattern[0] == ["phi_rad", "chi_rad", "intensity"]
    assert len(pattern) == 6
    assert float(pattern[1][2]) == 1.0
    assert float(pattern[-1][0]) == math.pi
    assert report[0] == ["a_c_m", "N_e", "mu_c_as_printed", "mu_c_limit_consistent", "enhancement"]
    assert pytest.approx(0.5e-6 / math.sqrt(math.pi), rel=1e-14) == float(report[1][0])
    assert b"\r" not in (out / "emission_pattern.csv").read_bytes()


def test_emission_deterministic(tmp_path):
    for name in ["a", "b"]:
        assert cli.main(["emission", "--out", str(tmp_path / name), "--variant", "as-printed"]) == cli.EXIT_OK

    for output in ["emission_pattern.csv", "emission_report.csv"]:
        assert (tmp_path / "a" / output).read_bytes() == (tmp_path / "b" / output).read_bytes()


def test_mu_of_L_header_only(tmp_path):
    path = write_config(tmp_path, "[mu-of-l]\nL_points = 0\n")

    assert cli.main(["mu-of-l", "--config", path, "--out", str(tmp_path)]) == cli.EXIT_OK
    assert (tmp_path / "mu_of_L.csv").read_text(encoding="utf-8") == "L,mu0,L_c,localized\n"


def test_mu_of_L_command(tmp_path):
    path = write_config(
        tmp_path,
        "[solver]\nnodes_per_radius = 40\n\n[mu-of-l]\nn_c = 0.03\nL_min = 2\nL_max = 4\nL_points = 2\n",
    )

    assert cli.main(["mu-of-l", "--config", path, "--out", str(tmp_path)]) == cli.EXIT_OK
    rows = read_rows(tmp_path / "mu_of_L.csv")

    assert len(rows) == 3
    assert [row[3] for row in rows[1:]] == ["1", "1"]
    assert all(float(row[1]) < 0 for row in rows[1:])


def test_thermo_command(tmp_path):
    out = tmp_path / "out"
    path = write_config(tmp_path, "[thermo]\ndensities_cm2 = 1.2e10\nT_min = 0.5\nT_max = 4.0\nT_points = 5\n")

    assert cli.main(["thermo", "--config", path, "--out", str(out)]) == cli.EXIT_OK
    rows = read_rows(out / "thermo_1.csv")
    summary = json.loads((out / "thermo_summary.json").read_text(encoding="utf-8"))

    assert rows[0] == cli.THERMO_COLUMNS
    assert len(rows) == 6
    assert rows[1][7] == "1" and rows[-1][7] == "0"
    assert float(rows[1][8]) > 0
    assert rows[-1][8] == "nan"
    assert summary["densities"][0]["regime"] == "above-critical"
    assert pytest.approx(0.012, rel=1e-12) == summary["densities"][0]["n_dimless"]
    assert 0.5 < summary["densities"][0]["T_c_K"] < 4.0


def test_localization_curve_command(tmp_path):
    out = tmp_path / "out"
    path = write_config(
        tmp_path,
        "[solver]\nnodes_per_radius = 40\n\n"
        "[scan]\nL_min = 1\nL_max = 12\nL_points = 6\nrefine_rtol = 1e-3\n\n"
        "[loc-curve]\ndensities = 0.02, 0.03\nfit = false\nrescale = 0.5\n",
    )

    assert cli.main(["loc-curve", "--config", path, "--out", str(out)]) == cli.EXIT_OK
    curve = LocalizationCurve.from_csv(out / "curve.csv")
    rescaled = read_rows(out / "curve_rescaled.csv")
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))

    assert len(curve) == 2
    assert all(p.localized for p in curve)
    assert curve.points[0].L_c < curve.points[1].L_c
    assert [float(row[0]) for row in rescaled[1:]] == [0.01, 0.015]
    assert manifest["outputs"] == ["curve.csv", "curve_rescaled.csv"]
    assert not (out / "fit.json").exists()


def test_thermo_command_cold(tmp_path):
    out = tmp_path / "out"
    path = write_config(tmp_path, "[thermo]\ndensities_cm2 = 1.2e10\nT_min = 0.03\nT_max = 0.5\nT_points = 3\n")

    assert cli.main(["thermo", "--config", path, "--out", str(out)]) == cli.EXIT_OK
    rows = read_rows(out / "thermo_1.csv")

    assert [row[7] for row in rows[1:]] == ["1", "1", "1"]
    assert float(rows[1][6]) > 1e6
    assert all(math.isfinite(float(row[8])) and float(row[8]) > 0 for row in rows[1:])


@pytest.mark.parametrize(
    "content, fragment",
    [
        ('{"alpha": 5.4, "beta": 0.3, "n_g": 0.074}', "beta must be negative"),
        ("alpha = 5.4", "not valid JSON"),
        ('{"alpha": 5.4, "n_g": 0.074}', "missing key 'beta'"),
    ],
)
def test_thermo_fit_file_validated(tmp_path, capsys, content, fragment):
    fit_file = tmp_path / "fit.json"
    fit_file.write_text(content, encoding="utf-8")
    out = tmp_path / "out"
    path = write_config(tmp_path, f"[thermo]\nfit_file = {fit_file}\n")

    assert cli.main(["thermo", "--config", path, "--out", str(out)]) == cli.EXIT_CONFIG
    assert fragment in capsys.readouterr().err
    assert not (out / "thermo_summary.json").exists()
