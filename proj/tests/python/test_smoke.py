import json
import math

import numpy as np
import pytest

import phonon_gauge as pg


def test_dressed_factor_matches_bessel_closed_form():
    for eta in (0.1, 0.7, 1.5):
        for dphi in (0.3, math.pi, 2.0):
            ref = abs(pg.bessel_j(1, 2 * eta * math.sin(dphi / 2)))
            assert abs(abs(pg.dressed_factor(1, eta, dphi)) - ref) < 1e-10
    assert abs(pg.dressed_factor(1, 0.6, 2 * math.pi)) < 1e-12


def test_pi_flux_ladder_has_three_flat_bands():
    s = pg.ladder_spectrum(10, 1.0, 1.0, math.pi, "periodic")
    levels = np.sort(s["eigenvalues"])
    for k, target in enumerate((-2.0, 0.0, 2.0)):
        band = levels[10 * k:10 * (k + 1)]
        assert np.max(np.abs(band - target)) < 1e-10


def test_ladder_matrix_flux_and_gauge():
    h = pg.rhombic_ladder_matrix(2, 1.0, 0.5, 0.7)
    assert np.allclose(h, h.conj().T)
    ring = [0, 1, 3, 2]
    theta = np.linspace(0.1, 1.3, h.shape[0])
    g = pg.gauge_transform(h, theta)
    assert abs(pg.plaquette_flux(g, ring) - pg.plaquette_flux(h, ring)) < 1e-12
    e0 = pg.eigensystem(h)["eigenvalues"]
    e1 = pg.eigensystem(g)["eigenvalues"]
    assert np.max(np.abs(e0 - e1)) < 1e-12


def test_square_lattice_zero_flux_cosine_sum():
    lx, ly = 4, 3
    e = np.sort(pg.eigensystem(pg.square_lattice_matrix(lx, ly, 0.0, 1.0, 0.5))["eigenvalues"])
    ref = np.sort([
        2 * math.cos(a * math.pi / (lx + 1)) + math.cos(b * math.pi / (ly + 1))
        for a in range(1, lx + 1)
        for b in range(1, ly + 1)
    ])
    assert np.max(np.abs(e - ref)) < 1e-10


def test_zero_flux_plaquette_effective_reaches_far_corner():
    r = pg.plaquette_experiment(False, exact=False)
    pops = r["effective"]["populations"]
    assert pops.shape[1] == 4
    assert pops[:, 2].max() > 0.9
    assert abs(r["flux"]) < 1e-9


def test_errors_are_typed():
    with pytest.raises(pg.InvalidGeometry):
        pg.rhombic_ladder_matrix(0, 1.0, 1.0, 0.0)
    with pytest.raises(pg.DomainError):
        pg.square_lattice_matrix(4, 4, 0.3, boundary="periodic")
    with pytest.raises(pg.ConfigError):
        pg.run_config("experiment = fig2b_link_scan\nnumerics.n_max = -1\n", "/tmp/unused")


def test_run_config_writes_manifest(tmp_path):
    assert "fig2e_ladder_spectrum" in pg.experiment_names()
    text = pg.preset_document("fig2e_ladder_spectrum")
    report = pg.run_config(text, tmp_path, "json")
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["experiment"] == "fig2e_ladder_spectrum"
    assert manifest["software"]["version"] == pg.__version__
    assert any(str(f).endswith("ladder_spectrum.json") for f in report["files"])
