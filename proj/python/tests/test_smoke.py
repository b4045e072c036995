import json
import math

import numpy as np
import pytest

import hankelbands as hb


def test_special_functions():
    assert abs(hb.ref_elliptic(0.0, 1.0) - 3.7081493546027438369) < 1e-13
    assert abs(hb.log_gamma(0.5) - 0.57236494292470008707) < 1e-14
    with pytest.raises(hb.DomainError):
        hb.ref_elliptic(0.5j, 1.0)


def test_fiber_is_hermitian_and_matches_carleman():
    sym = hb.PeriodicSymbol.carleman()
    H = hb.fiber_matrix(sym, 0.3, 10)
    assert H.shape == (21, 21)
    assert np.array_equal(H, H.conj().T)
    ev = sorted(hb.eigvalsh(H), reverse=True)
    assert abs(ev[0] - hb.carleman_ranked(1.0, 0, 0.3)) < 1e-12
    assert np.allclose(np.linalg.eigvalsh(H)[::-1][:4], ev[:4], rtol=1e-12)


def test_sweep_and_flat_bands():
    grid = hb.half_cell_grid(1.0, 41)
    branches = hb.sweep(hb.PeriodicSymbol.mathieu(0.0), 60, grid)
    assert branches
    assert all(b["flat"] for b in branches)
    carleman = hb.sweep(hb.PeriodicSymbol.carleman(), 40, grid, m_top=3)
    assert [b["monotonicity"] for b in carleman] == ["decreasing", "increasing", "decreasing"]
    assert abs(carleman[0]["value"][0] - math.pi) < 1e-12


def test_determinant_identities():
    report = hb.check_identities(hb.PeriodicSymbol.mathieu(0.7), 0.4, 0.2 + 0.1j, 40)
    assert report["passed"]
    fit = hb.fit_affine_in_P(hb.PeriodicSymbol.mathieu(0.0), 0.6, 40)
    assert abs(fit["a"]) < 1e-8


def test_flat_point():
    r = hb.find_flat_A()
    assert 0.45 <= r["A_star"] <= 0.51


def test_symbol_json_and_errors():
    sym = hb.PeriodicSymbol.from_json(
        json.dumps({"period": 2 * math.pi, "coefficients": [{"l": 0, "re": 1.0, "im": 0.0}, {"l": 1, "re": 0.2, "im": 0.1}]})
    )
    assert sym.coefficients[-1] == complex(0.2, -0.1)
    with pytest.raises(hb.ConfigError):
        hb.PeriodicSymbol.from_json('{"period": 1}')
    with pytest.raises(hb.TrackingError):
        hb.sweep(hb.PeriodicSymbol.mathieu(0.5), 60, hb.half_cell_grid(1.0, 41), m_top=8)


def test_cli_entry(tmp_path):
    code, out, _ = hb.run_cli(["verify", "--builtin", "mathieu:0", "--out", str(tmp_path)])
    assert code == 0
    assert "all-flat: pass" in out
    assert json.loads((tmp_path / "verify.json").read_text())["passed"]
