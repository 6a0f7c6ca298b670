import math
import os
from pathlib import Path

import numpy as np
import pytest

import surgefdtd as sf

SOURCE = Path(os.environ.get("SURGE_SOURCE_DIR", Path(__file__).resolve().parents[2]))
MODELS = SOURCE / "models"

C0 = 299792458.0


def test_courant_dt():
    assert sf.courant_dt(0.1, 1.0) == pytest.approx(0.1 / (C0 * math.sqrt(3)), rel=1e-12)
    with pytest.raises(ValueError):
        sf.courant_dt(-1.0, 0.99)


def test_heidler_starts_at_zero_and_peaks_near_i0():
    assert sf.heidler(0.0, 1.0, 3.7e-7, 1.4e-5, 10) == 0.0
    t = np.linspace(0, 5e-6, 2001)
    peak = max(sf.heidler(x, 1.0, 3.7e-7, 1.4e-5, 10) for x in t)
    assert 0.9 < peak <= 1.0


def test_model_summary_and_diagnostics():
    m = sf.load_model_file(str(MODELS / "electrode_step.model"))
    assert (m["nx"], m["ny"], m["nz"]) == (80, 40, 56)
    assert m["pml_cells"] == 10
    assert sf.check_model(str(MODELS / "electrode_step.model")) == []
    diags = sf.check_model(str(MODELS / "electrode_measured.model"))
    assert any(":16:" in d for d in diags)
    with pytest.raises(sf.ValidationError, match="volume"):
        sf.load_model("volume (10, 5)\n")


def test_run_model_records():
    path = str(MODELS / "electrode_step.model")
    k = sf.load_model_file(path)["record_every"]
    out = sf.run_model(path, max_steps=2 * k, threads=1)
    assert set(out) == {"time", "current0", "voltage0"}
    assert out["time"].shape == (3,)
    assert out["time"][1] == pytest.approx(1e-8, rel=1e-9)
    assert np.all(np.isfinite(out["voltage0"]))


def test_soil_and_fit():
    sigma, eps_r = sf.soil_properties("alipio_visacro", 1000.0, 1e6)
    assert sigma > 1e-3 and eps_r > 1
    fit = sf.fit_debye_model("messier", 200.0)
    assert fit["sigma0"] == pytest.approx(1 / 200.0, rel=1e-12)
    assert len(fit["poles"]) == 4
    assert fit["residual"] < 0.02


def test_layered_and_doi():
    rho = sf.apparent_resistivity_layered([(100.0, 0.0)], "wenner", 2.0)
    assert rho == pytest.approx(100.0, rel=1e-9)
    assert sf.depth_of_investigation("dipole_dipole", 1, 1, "roy_apparao") == pytest.approx(0.298081, rel=1e-5)
    assert sf.depth_of_investigation("dipole_dipole", 1, 1, "barker") == pytest.approx(0.415943, rel=1e-5)


def test_breakdown():
    dt = 1e-8
    v = [600e3 if n >= 100 else 0.0 for n in range(1201)]
    params = '{"kind": "disruptive_effect", "v0": 300e3, "k": 1, "de_crit": 0.15}'
    t = sf.evaluate_breakdown(v, dt, params)
    assert abs(t - (1e-6 + 0.15 / 300e3)) <= 1.01e-8
    held = '{"kind": "disruptive_effect", "v0": 700e3, "k": 1, "de_crit": 0.15}'
    assert sf.evaluate_breakdown(v, dt, held) is None
