import math

import pytest

import stofv

BURGERS = {
    "grid": {"dim": 1, "m": 2},
    "flux": {"name": "burgers", "scheme": "godunov"},
    "time": {"T": 0.1, "theta": 0.5},
    "initial": {"name": "riemann", "left": 1.0, "right": 0.0, "x0": 0.5},
}


def test_two_cell_step():
    s = stofv.Scheme(BURGERS)
    assert s.num_cells == 2
    assert s.half_step([1.0, 0.0], 1 / 32) == [31 / 32, 1 / 32]
    assert abs(s.dissipation([1.0, 0.0], 1 / 32, 0, 0.5) - 0.25) < 1e-12


def test_godunov_and_exact():
    assert stofv.godunov("burgers", 1.0, 0.0) == 0.5
    assert stofv.godunov("burgers", -0.5, 0.5) == 0.0
    assert stofv.riemann_solution(1.0, 0.0, 0.5, 0.66, 0.3) == 0.0
    assert stofv.riemann_solution(1.0, 0.0, 0.5, 0.64, 0.3) == 1.0


def test_config_roundtrip_and_errors():
    full = stofv.canonical_config(BURGERS)
    assert full["grid"]["m"] == 2
    assert stofv.config_hash(full) == stofv.config_hash(BURGERS)
    with pytest.raises(stofv.ConfigError):
        stofv.canonical_config({"grid": {"m": 4, "typo": 1}})
    with pytest.raises(stofv.CflError):
        stofv.Scheme(BURGERS).half_step([1.0, 0.0], 1.0)


def test_run_and_diagnose():
    cfg = dict(BURGERS, grid={"dim": 1, "m": 16},
               noise={"modes": [{"sigma": 0.2}], "seed": 3})
    out = stofv.run(cfg)
    assert math.isclose(out["times"][-1], 0.1)
    assert len(out["states"][0]) == 16
    rep = stofv.diagnose(cfg, with_steps=True)
    assert rep["max_energy_residual"] < 1e-10
    assert rep["min_m"] >= -1e-10
    assert len(rep["steps"]) == len(out["times"]) - 1


def test_studies():
    cfg = dict(BURGERS, time={"T": 0.3, "theta": 0.5}, converge={"levels": [16, 32, 64]})
    table = stofv.converge(cfg)
    errors = [r["error"] for r in table["rows"]]
    assert errors == sorted(errors, reverse=True)
    assert stofv.validate_flux(cfg)["passed"]
    sto = {
        "grid": {"dim": 1, "m": 8},
        "noise": {"modes": [{"sigma": 0.2}], "seed": 9},
        "time": {"T": 0.05, "theta": 0.5},
        "initial": {"name": "sine", "amplitude": 0.5},
        "ensemble": {"M": 8},
        "refinement": {"levels": [4, 8, 16], "M": 4},
    }
    a = stofv.mc(sto, threads=1)
    b = stofv.mc(sto, threads=2)
    assert a == b
    c = stofv.couple(sto)
    assert len(c["rows"]) == 2
