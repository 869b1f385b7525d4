import numpy as np
import pytest

from nfdm.core import DiscreteSpectrum, TimeGrid
from nfdm.darboux import multisoliton, suggested_grid
from nfdm.oracles import (UnsupportedOrder, hirota_log_f, hirota_multisoliton,
                          reflectionless_a, reflectionless_a_prime,
                          rh_multisoliton, single_soliton_closed_form)
from nfdm.zs import discrete_amplitudes, find_eigenvalues
from tests.conftest import random_spectrum


class TestClosedForm:
    def test_unit_soliton(self):
        g = TimeGrid.centered(40.0, 4001)
        sig = single_soliton_closed_form(0.5j, 1.0, g)
        assert abs(np.abs(sig.samples).max() - 1.0) < 1e-12
        assert abs(np.abs(sig.samples[g.n_samples // 2]) - 1.0) < 1e-9
        e = np.trapezoid(np.abs(sig.samples) ** 2, dx=g.dt)
        assert abs(e - 2.0) < 1e-4

    def test_half_soliton(self):
        g = TimeGrid.centered(60.0, 4001)
        sig = single_soliton_closed_form(0.25j, 0.5, g)
        assert abs(np.abs(sig.samples).max() - 0.5) < 1e-12
        e = np.trapezoid(np.abs(sig.samples) ** 2, dx=g.dt)
        assert abs(e - 1.0) < 1e-4

    def test_time_shift_from_amplitude(self):
        g = TimeGrid.centered(40.0, 4001)
        sig = single_soliton_closed_form(0.5j, np.e, g)
        peak_t = g.t[int(np.argmax(np.abs(sig.samples)))]
        assert abs(peak_t - 1.0) < 2 * g.dt

    def test_invalid_inputs(self):
        g = TimeGrid.centered(10.0, 64)
        with pytest.raises(ValueError):
            single_soliton_closed_form(0.5 - 0.1j, 1.0, g)
        with pytest.raises(ValueError):
            single_soliton_closed_form(0.5j, 0.0, g)


class TestReflectionlessCoeffs:
    def test_a_zero_at_eigenvalues(self):
        ds = DiscreteSpectrum([0.3j, 0.1 + 0.6j], [1.0, 1.0])
        vals = reflectionless_a(ds, ds.eigenvalues)
        assert np.abs(vals).max() < 1e-14

    def test_a_prime_single(self):
        ds = DiscreteSpectrum([0.5j], [1.0])
        assert abs(reflectionless_a_prime(ds, 0) - 1 / 1j) < 1e-14


class TestRiemannHilbert:
    def test_single_matches_closed_form(self):
        g = TimeGrid.centered(40.0, 4096)
        ds = DiscreteSpectrum([0.5j], [1.0])
        got = rh_multisoliton(ds, g)
        ref = single_soliton_closed_form(0.5j, 1.0, g)
        assert np.abs(got.samples - ref.samples).max() < 1e-12

    def test_empty(self):
        g = TimeGrid.centered(10.0, 64)
        assert np.all(rh_multisoliton(DiscreteSpectrum.empty(), g).samples == 0)

    def test_three_soliton_matches_darboux(self, rng):
        ds = random_spectrum(rng, 3, sep=0.15, amp_range=(0.3, 3.0))
        g = suggested_grid(ds, dt=1 / 256)
        got = rh_multisoliton(ds, g)
        ref = multisoliton(ds, g)
        assert np.abs(got.samples - ref.samples).max() < 1e-8

    def test_forward_transform_round_trip(self, rng):
        ds = random_spectrum(rng, 2, sep=0.2, amp_range=(0.4, 2.0)).sorted_by_imag()
        g = suggested_grid(ds, dt=1 / 256)
        sig = rh_multisoliton(ds, g)
        eigs = find_eigenvalues(sig)
        rec = discrete_amplitudes(sig, eigs)
        assert len(rec) == 2
        assert np.abs(rec.eigenvalues - ds.eigenvalues).max() < 1e-5
        assert np.abs((rec.amplitudes - ds.amplitudes) / ds.amplitudes).max() < 1e-3


class TestHirota:
    def test_single_soliton_form(self):
        g = TimeGrid.centered(40.0, 4096)
        ds = DiscreteSpectrum([0.5j], [1.0])
        got = hirota_multisoliton(ds, g)
        ref = single_soliton_closed_form(0.5j, 1.0, g)
        assert np.abs(got.samples - ref.samples).max() < 1e-12

    def test_two_soliton_matches_darboux(self):
        ds = DiscreteSpectrum([0.25j, 0.5j], [1.0, 1.0])
        g = TimeGrid.centered(60.0, 4096)
        got = hirota_multisoliton(ds, g)
        ref = multisoliton(ds, g)
        assert np.abs(got.samples - ref.samples).max() < 1e-6

    def test_amplitude_identity_log_f(self):
        # |q|^2 = d_tt log F on the grid interior (second difference)
        ds = DiscreteSpectrum([0.5j], [1.0])
        g = TimeGrid.centered(30.0, 48001)  # second-difference error ~ dt^2
        sig = hirota_multisoliton(ds, g)
        logf = hirota_log_f(ds, g)
        d2 = (logf[2:] - 2 * logf[1:-1] + logf[:-2]) / g.dt**2
        err = np.abs(d2 - np.abs(sig.samples[1:-1]) ** 2)
        assert err.max() < 1e-6

    def test_order_cap(self):
        g = TimeGrid.centered(10.0, 64)
        ds = DiscreteSpectrum([0.2j, 0.4j, 0.6j, 0.8j], np.ones(4))
        with pytest.raises(UnsupportedOrder):
            hirota_multisoliton(ds, g)

    def test_empty(self):
        g = TimeGrid.centered(10.0, 64)
        assert np.all(hirota_multisoliton(DiscreteSpectrum.empty(), g).samples == 0)


class TestOracleTriangle:
    def test_pairwise_agreement(self, rng):
        g = TimeGrid.centered(60.0, 15361)
        for n in (1, 2, 3):
            ds = random_spectrum(rng, n, sep=0.12, amp_range=(0.2, 5.0))
            sd = multisoliton(ds, g).samples
            sr = rh_multisoliton(ds, g).samples
            sh = hirota_multisoliton(ds, g).samples
            assert np.abs(sd - sr).max() < 1e-6
            assert np.abs(sh - sr).max() < 1e-6
            assert np.abs(sd - sh).max() < 1e-6
