import numpy as np
import pytest
from scipy import integrate

from qoctsim import BiphotonSpectrum, density, normalization


def make_spec(delta=0.01, big_delta=0.2, detuning=0.0, omega0=2.3):
    return BiphotonSpectrum(omega0=omega0, delta=delta, big_delta=big_delta, detuning=detuning)


class TestDensityValues:
    def test_degenerate_center(self):
        # both exponents vanish at the distribution center
        s = make_spec()
        assert density(s, s.omega0, s.omega0) == pytest.approx(
            1.0 / (np.pi * s.delta * s.big_delta), rel=1e-14
        )

    def test_degenerate_one_sigma_difference(self):
        # w1 - w2 = big_delta*sqrt(2), w1 + w2 = 2*omega0 hits e^-1 of the first Gaussian
        s = make_spec()
        w1 = s.omega0 + s.big_delta / np.sqrt(2.0)
        w2 = s.omega0 - s.big_delta / np.sqrt(2.0)
        assert density(s, w1, w2) == pytest.approx(
            np.exp(-1.0) / (np.pi * s.delta * s.big_delta), rel=1e-13
        )

    def test_nondegenerate_on_lobe(self):
        # independent re-evaluation of the two-lobe formula at (w0 + W, w0 - W)
        s = make_spec(detuning=0.35)
        got = density(s, s.omega0 + s.detuning, s.omega0 - s.detuning)
        expected = (1.0 + np.exp(-8.0 * s.detuning**2 / s.big_delta**2)) / (
            2.0 * np.pi * s.delta * s.big_delta
        )
        assert got == pytest.approx(expected, rel=1e-13)

    def test_degenerate_is_detuning_zero_limit(self):
        s0 = make_spec(detuning=0.0)
        w1 = np.linspace(1.5, 3.1, 301)
        w2 = np.linspace(1.6, 3.0, 301)[::-1]
        deg = density(s0, w1, w2)
        # evaluate the two-lobe branch with detuning -> 0 by direct formula
        lobes = 2.0 * np.exp(-((w1 - w2) ** 2) / (2 * s0.big_delta**2))
        pump = np.exp(-((w1 + w2 - 2 * s0.omega0) ** 2) / (2 * s0.delta**2))
        nondeg_limit = lobes * pump / (2 * np.pi * s0.delta * s0.big_delta)
        assert np.max(np.abs(deg - nondeg_limit)) < 1e-12


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(omega0=0.0, delta=0.01, big_delta=0.2),
            dict(omega0=2.3, delta=0.0, big_delta=0.2),
            dict(omega0=2.3, delta=0.01, big_delta=-0.1),
            dict(omega0=2.3, delta=0.01, big_delta=0.2, detuning=-0.2),
        ],
    )
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(ValueError):
            BiphotonSpectrum(**kwargs)

    def test_delta_plus_sq(self):
        s = make_spec(delta=0.3, big_delta=0.4)
        assert s.delta_plus_sq == pytest.approx(0.25)


class TestSymmetry:
    def test_exchange_symmetry_many_points(self, rng):
        for s in (make_spec(), make_spec(detuning=0.4, delta=0.05)):
            w1 = s.omega0 + rng.uniform(-1.5, 1.5, 1_000_000)
            w2 = s.omega0 + rng.uniform(-1.5, 1.5, 1_000_000)
            a = density(s, w1, w2)
            b = density(s, w2, w1)
            assert np.array_equal(a, b)


class TestNormalization:
    def test_degenerate_unit_norm(self):
        assert normalization(make_spec()) == pytest.approx(1.0, abs=1e-6)

    def test_nondegenerate_unit_norm(self):
        assert normalization(make_spec(detuning=0.5, delta=0.08)) == pytest.approx(1.0, abs=1e-6)

    def test_equal_widths_special_case(self):
        assert normalization(make_spec(delta=0.2, big_delta=0.2)) == pytest.approx(1.0, abs=1e-6)

    def test_random_parameter_sets(self, rng):
        # delta/big_delta in [1e-3, 1], detuning/big_delta in [0, 5]
        for _ in range(20):
            big_delta = rng.uniform(0.05, 0.4)
            delta = big_delta * 10 ** rng.uniform(-3, 0)
            detuning = big_delta * rng.uniform(0.0, 5.0)
            s = make_spec(delta=delta, big_delta=big_delta, detuning=detuning, omega0=rng.uniform(1.5, 3.0))
            assert normalization(s) == pytest.approx(1.0, abs=1e-6)

    def test_against_raw_dblquad_oracle(self):
        # independent check in unrotated coordinates
        s = make_spec(delta=0.05, big_delta=0.15, detuning=0.2)
        val, err = integrate.dblquad(
            lambda w2, w1: density(s, w1, w2),
            s.omega0 - 1.8,
            s.omega0 + 1.8,
            lambda w1: s.omega0 - 1.8,
            lambda w1: s.omega0 + 1.8,
            epsabs=1e-10,
        )
        assert val == pytest.approx(1.0, abs=1e-7)
        assert normalization(s) == pytest.approx(val, abs=1e-7)
