import json
import math

import numpy as np
import pytest

import psq


def test_squeezed_moments():
    s = 0.5
    n = psq.auto_cutoff(s)
    sv = psq.squeezed_vacuum(s, n)
    ps = psq.photon_subtracted_squeezed(s, n)
    assert abs(np.linalg.norm(sv) - 1) < 1e-12
    assert psq.quadrature_moment(sv, n) == pytest.approx(math.exp(2 * s) / 2, abs=1e-8)
    assert psq.quadrature_moment(ps, n) == pytest.approx(1.5 * math.exp(2 * s), abs=1e-8)


def test_gamma_round_trip():
    s = [0.3, 0.8]
    c = np.array([1.0, 1.0j]) / math.sqrt(2)
    g = psq.gamma_from_c(c, s)
    ratio = abs(g[1] / g[0])
    assert ratio == pytest.approx(math.sinh(0.8) / math.sinh(0.3), rel=1e-6)
    back = psq.c_from_gamma(g, s)
    assert abs(np.vdot(back, c)) == pytest.approx(1.0, abs=1e-9)


def test_measure_J_is_born_rule():
    g = np.array([0.6, 0.8j])
    out = psq.measure_J(g, [0.4, 0.4], cutoff=10, deficit_tol=1e-3)
    assert out[1] == pytest.approx(0.36, abs=1e-12)
    assert out[2] == pytest.approx(0.64, abs=1e-12)
    assert out.get("LEAK", 0.0) == pytest.approx(0.0, abs=1e-12)


def test_lossy_fidelities():
    assert psq.lossy_basis_fidelity(1, [0.5, 0.5], 1.0) == pytest.approx(1.0, abs=1e-12)
    f = psq.lossy_basis_fidelity(1, [0.5, 0.5], 0.8)
    assert 0 < f < 1
    assert psq.lossy_pair_fidelity(1, 2, [0.5, 0.5], 1.0) == pytest.approx(0.0, abs=1e-12)


def test_protocols():
    y = np.array([0.6, 0.8])
    z = np.array([1.0, 0.0])
    terms = psq.scalar_product_terms(y, z)
    assert terms[0] == pytest.approx(0.36, abs=1e-12)
    assert terms[1] == pytest.approx(0.0, abs=1e-12)
    yd = np.array([0.5, 0.1])
    zd = np.array([0.0, 0.3])
    assert psq.distance_exact(yd, zd) == pytest.approx(0.29, abs=1e-8)
    r = psq.distance_sampled(yd, zd, samples=50000, seed=3, threads=1)
    assert abs(r["estimate"] - 0.29) < 5 * r["std_error"]


def test_library_states():
    assert np.allclose(psq.cluster_g2(), [0.5, 0.5, 0.5, -0.5])
    assert psq.hypergraph_hyp3()[7].real < 0
    assert np.allclose(psq.fingerprint_state([0, 1]), [1 / math.sqrt(2), -1 / math.sqrt(2)])


def test_errors():
    with pytest.raises(ValueError):
        psq.fingerprint_state([0, 2])
    with pytest.raises(psq.InfeasibleError):
        psq.invert_norm(0.1, 1.0, 0.5)


def test_run_config():
    code, out, err = psq.run_config(json.dumps({"command": "states"}))
    assert code == 0, err
    assert "g2" in out
    with pytest.raises(psq.InvalidInputError, match="command"):
        psq.run_config(json.dumps({"command": "no-such-command"}))
