import csv
import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from emviscosity import cli
from emviscosity.asymptotics import REGIMES
from emviscosity.config import ConfigError, RangeSpec, RunConfig
from emviscosity.green import flipped_spin_kernel

BASE = """
command = "viscosity"

[scenario]
material = { kind = "drude", omega_p_eV = 9.0, gamma_eV = 0.1 }
atom = { alpha0_A3 = 47.28, omega_a_eV = 1.3 }
{extra}
"""


def _write(tmp_path, extra, name="run.toml"):
    p = tmp_path / name
    p.write_text(BASE.replace("{extra}", extra))
    return str(p)


def _run(argv):
    out = io.StringIO()
    code = cli.main(argv, stdout=out)
    return code, out.getvalue()


# --------------------------------------------------------------------------
# config parsing

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


@st.composite
def run_configs(draw):
    cfg = RunConfig.example(draw(st.sampled_from(["viscosity", "sweep", "asymptotic"])))
    s = cfg.scenario
    s.material = {"kind": "drude", "omega_p_eV": draw(st.floats(1.0, 20.0)),
                  "gamma_eV": draw(st.floats(1e-3, 1.0))}
    s.T_K = draw(positive)
    if cfg.command == "sweep":
        s.z_nm = None
        lo = draw(positive)
        s.z_nm_range = RangeSpec(lo, lo * draw(st.floats(1.0, 100.0)),
                                 draw(st.integers(1, 50)), draw(st.booleans()))
    else:
        s.z_nm = draw(positive)
    c = cfg.computation
    c.route = draw(st.sampled_from(["symmetric", "shifted", "normal"]))
    c.order = draw(st.sampled_from(["dressed", "leading"]))
    c.rtol = draw(st.floats(1e-12, 1e-2))
    c.workers = draw(st.integers(1, 16))
    cfg.output.format = draw(st.sampled_from(["csv", "json"]))
    cfg.output.precision = draw(st.integers(1, 17))
    return cfg.validate()


@given(run_configs())
def test_config_round_trip(cfg):
    again = RunConfig.loads(cfg.dumps())
    assert again == cfg
    assert again.dumps() == cfg.dumps()


def test_example_round_trip():
    cfg = RunConfig.example()
    assert RunConfig.loads(cfg.dumps()).to_dict() == cfg.to_dict()


@pytest.mark.parametrize("extra, path", [
    ("z_nm = 5.0\nz_nm_range = { start = 1.0, stop = 10.0, num = 3 }", "scenario.z_nm"),
    ("z_nm_range = { start = 1.0, stop = 10.0, num = 3 }\n"
     "v_m_s_range = { start = 1e3, stop = 1e4, num = 3 }\n"
     "T_K_range = { start = 1.0, stop = 10.0, num = 3 }", "scenario"),
    ("omega_eV_range = { start = 5.0, stop = 1.0, num = 3, log = false }",
     "scenario.omega_eV_range"),
    ("z_nm_range = { start = -1.0, stop = 10.0, num = 3 }", "scenario.z_nm_range"),
    ("bogus = 1", "scenario.bogus"),
])
def test_validation_names_field(extra, path):
    with pytest.raises(ConfigError) as exc:
        RunConfig.loads(BASE.replace("{extra}", extra))
    assert exc.value.path == path


def test_unknown_sections_and_values():
    with pytest.raises(ConfigError, match="computation.route"):
        RunConfig.from_dict({"computation": {"route": "sideways"}})
    with pytest.raises(ConfigError, match="unknown top-level"):
        RunConfig.from_dict({"extras": {}})
    with pytest.raises(ConfigError, match="invalid TOML"):
        RunConfig.loads("command = ")
    with pytest.raises(ConfigError, match="scenario.material.gamma_eV"):
        RunConfig.from_dict({"scenario": {"material": {"kind": "drude", "omega_p_eV": 9.0}}})


def test_flags_override_file(tmp_path):
    path = _write(tmp_path, 'z_nm = 5.0\nv_m_s = 12000.0\nT_K = 3.0\n'
                            '[computation]\nroute = "normal"\nrtol = 1e-4\n'
                            '[output]\nformat = "csv"')
    cfg = RunConfig.load(path)
    cfg.apply_overrides(route="shifted", tol=1e-7, format="json", workers=None)
    assert (cfg.computation.route, cfg.computation.rtol, cfg.output.format) == \
        ("shifted", 1e-7, "json")
    assert cfg.computation.workers == 1


# --------------------------------------------------------------------------
# commands and exit codes

def test_viscosity_json(tmp_path):
    path = _write(tmp_path, "z_nm = 5.0\nv_m_s = 12000.0\nT_K = 3.0")
    code, text = _run(["viscosity", "--config", path, "--format", "json", "--tol", "1e-5"])
    assert code == cli.EXIT_OK
    data = json.loads(text)
    assert data["mu"] < 0 and data["mu_over_mu_qf"] > 0
    assert data["z_nm"] == 5.0 and data["regime"]


def test_viscosity_requires_material(tmp_path):
    p = tmp_path / "m.toml"
    p.write_text("[scenario]\nz_nm = 5.0\nv_m_s = 12000.0\nT_K = 3.0\n")
    code, _ = _run(["viscosity", "--config", str(p)])
    assert code == cli.EXIT_CONFIG


def test_zero_velocity_points_to_asymptotic(tmp_path, capsys):
    path = _write(tmp_path, "z_nm = 5.0\nv_m_s = 0.0\nT_K = 3.0")
    code, _ = _run(["viscosity", "--config", path])
    assert code == cli.EXIT_CONFIG
    assert "asymptotic" in capsys.readouterr().err


def test_asymptotic_command_csv(tmp_path):
    path = _write(tmp_path, "z_nm = 5.0\nv_m_s = 12000.0\nT_K = 3.0")
    code, text = _run(["asymptotic", "--config", path])
    assert code == cli.EXIT_OK
    row = next(csv.DictReader(io.StringIO(text)))
    assert float(row["mu_T"]) < 0 and float(row["mu_qf"]) < 0


def test_missing_config_file():
    code, _ = _run(["viscosity", "--config", "/nonexistent/run.toml"])
    assert code == cli.EXIT_CONFIG


def test_regime_map_single_cell(tmp_path):
    path = _write(tmp_path, "z_nm_range = { start = 5.0, stop = 5.0, num = 1 }\n"
                            "T_K_range = { start = 3.0, stop = 3.0, num = 1 }")
    code, text = _run(["regime-map", "--config", path])
    assert code == cli.EXIT_OK
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["series"] for r in rows] == \
        ["regime", "boundary_qf_thermal", "boundary_thermal_vacuum"]
    assert rows[0]["value"] in REGIMES


def test_spectral_density_empty_range(tmp_path):
    path = _write(tmp_path, "z_nm = 1.0\nT_K = 300.0\n"
                            "omega_eV_range = { start = 2.0, stop = 2.0, num = 10 }")
    code, _ = _run(["spectral-density", "--config", path])
    assert code == cli.EXIT_CONFIG


def test_spectral_density_metadata(tmp_path):
    path = _write(tmp_path, "z_nm = 1.0\nT_K = 300.0\n"
                            "omega_eV_range = { start = 0.01, stop = 10.0, num = 10 }")
    code, text = _run(["spectral-density", "--config", path, "--format", "json"])
    assert code == cli.EXIT_OK
    data = json.loads(text)
    meta = data["metadata"]
    assert meta["eta_normalization"] == "eta_lowfreq"
    assert meta["planck_normalization"] == "half_max"
    assert meta["omega_a"] == pytest.approx(1.3)
    kinds = {r["kind"] for r in data["rows"]}
    assert {"eta_full", "planck_derivative", "marker_omega_a", "marker_omega_sp"} <= kinds


def test_sweep_csv_reproducible(tmp_path):
    path = _write(tmp_path, "z_nm_range = { start = 4.0, stop = 8.0, num = 2 }\n"
                            "v_m_s = 12000.0\nT_K = 3.0")
    outs = []
    for i in range(2):
        out = tmp_path / f"sweep{i}.csv"
        code, _ = _run(["sweep", "--config", path, "--tol", "1e-5", "--out", str(out)])
        assert code == cli.EXIT_OK
        outs.append(list(csv.DictReader(out.open())))
    strip = [[{k: v for k, v in r.items() if k != "seconds"} for r in rows] for rows in outs]
    assert strip[0] == strip[1]
    assert [float(r["z_nm"]) for r in outs[0]] == [4.0, 8.0]
    assert all(r["ok"] == "True" for r in outs[0])


def test_sweep_needs_range(tmp_path):
    path = _write(tmp_path, "z_nm = 5.0\nv_m_s = 12000.0\nT_K = 3.0")
    code, _ = _run(["sweep", "--config", path])
    assert code == cli.EXIT_CONFIG


def test_validate_passes_criterion_1(tmp_path):
    out = tmp_path / "report.json"
    code, _ = _run(["validate", "--criteria", "1", "--out", str(out)])
    assert code == cli.EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["passed"] and rep["criteria"] == {"1": True}


def test_validate_unknown_criterion():
    code, _ = _run(["validate", "--criteria", "42"])
    assert code == cli.EXIT_CONFIG


def test_validate_detects_flipped_spin_channel():
    with flipped_spin_kernel():
        code, text = _run(["validate", "--criteria", "2"])
    assert code == cli.EXIT_ACCEPTANCE
    assert json.loads(text)["criteria"] == {"2": False}
