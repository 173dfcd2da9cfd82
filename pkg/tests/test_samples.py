import numpy as np
import pytest

from qoctsim import (
    BiphotonSpectrum,
    MaterialLayer,
    SampleResponse,
    from_material,
    response,
    terms_on_grid,
)
from qoctsim.units import C_UM_PER_FS


class TestResponse:
    def test_identity_reflector(self):
        s = SampleResponse(r=1.0, group_delay=0.0)
        for w in (0.5, 2.0, 7.3):
            assert response(s, w) == pytest.approx(1.0 + 0.0j)

    def test_plain_delay(self):
        s = SampleResponse(r=0.8, group_delay=10.0)
        assert response(s, 2.0) == pytest.approx(0.8 * np.exp(20.0j), rel=1e-14)

    def test_unit_quadratic_phase(self):
        s = SampleResponse(r=1.0, group_delay=0.0, kappa_disp=100.0, omega0=2.0)
        assert response(s, 2.1) == pytest.approx(np.exp(1.0j), rel=1e-12)

    def test_magnitude_is_r_everywhere(self, rng):
        s = SampleResponse(r=0.37, group_delay=12.0, kappa_disp=45.0, omega0=2.3)
        w = rng.uniform(0.1, 6.0, 100_000)
        assert np.max(np.abs(np.abs(s(w)) - 0.37)) < 1e-13

    def test_zero_kappa_matches_plain_form(self, rng):
        a = SampleResponse(r=0.6, group_delay=8.0, kappa_disp=0.0, omega0=2.3)
        w = rng.uniform(0.5, 4.0, 1000)
        assert np.allclose(a(w), 0.6 * np.exp(1j * w * 8.0), rtol=1e-15)

    def test_invalid_r_rejected(self):
        with pytest.raises(ValueError):
            SampleResponse(r=1.2, group_delay=0.0)
        with pytest.raises(ValueError):
            SampleResponse(r=-0.1, group_delay=0.0)


class TestFromMaterial:
    def test_dispersionless_glass(self):
        # T = n d / c for a plain slab
        layer = MaterialLayer(thickness=2000.0, n0=1.5, dn_domega=0.0)
        s = from_material(layer, r=1.0, omega0=2.3)
        assert s.group_delay == pytest.approx(2000.0 * 1.5 / C_UM_PER_FS, rel=1e-12)
        assert s.group_delay == pytest.approx(10006.9, abs=0.1)
        assert s.kappa_disp == 0.0

    def test_kappa_is_thickness_eta_over_c(self):
        layer = MaterialLayer(thickness=1500.0, n0=1.6, dn_domega=0.02)
        s = from_material(layer, r=0.9, omega0=2.0)
        assert s.kappa_disp == pytest.approx(1500.0 * 0.02 / C_UM_PER_FS, rel=1e-12)

    def test_standard_strong_dispersion_fixture(self):
        # eta chosen so kappa * Delta^2 = 10 at Delta = 0.2 -> kappa = 250 fs^2
        big_delta = 0.2
        kappa_target = 10.0 / big_delta**2
        assert kappa_target == pytest.approx(250.0)
        thickness = 2000.0
        eta = kappa_target * C_UM_PER_FS / thickness
        s = from_material(MaterialLayer(thickness, 1.5, eta), r=1.0, omega0=2.3)
        assert s.kappa_disp == pytest.approx(250.0, rel=1e-12)

    def test_invalid_layers_rejected(self):
        with pytest.raises(ValueError):
            MaterialLayer(thickness=0.0, n0=1.5)
        with pytest.raises(ValueError):
            MaterialLayer(thickness=10.0, n0=0.9)


def test_continuity_in_kappa(spec_case1):
    # interferograms approach the kappa = 0 limit as kappa -> 0
    tau = np.linspace(2.0, 18.0, 257)
    base = SampleResponse(r=0.8, group_delay=10.0, kappa_disp=0.0, omega0=spec_case1.omega0)
    eps = SampleResponse(r=0.8, group_delay=10.0, kappa_disp=1e-6, omega0=spec_case1.omega0)
    m_base = terms_on_grid(tau, spec_case1, base).total()
    m_eps = terms_on_grid(tau, spec_case1, eps).total()
    assert np.max(np.abs(m_base - m_eps)) < 1e-6
