import numpy as np
import pytest

from nfdm.core import DiscreteSpectrum, TimeGrid, TimeSignal, energy
from nfdm.darboux import (DarbouxState, WindowTooNarrowWarning,
                          canonical_seed_ratios, darboux_step, multisoliton,
                          propagate_spectrum, seed_eigenvectors,
                          suggested_grid)
from nfdm.nlse import LinkConfig, ssfm_propagate
from nfdm.oracles import rh_multisoliton, single_soliton_closed_form
from nfdm.zs import (EigenSearchConfig, discrete_amplitudes, find_eigenvalues,
                     nft)
from tests.conftest import random_spectrum


class TestSeeds:
    def test_paper_rule_values(self):
        g = TimeGrid.centered(10.0, 65)   # odd count puts t = 0 on the grid
        # A = exp(j angle(amp)), B = |amp| at t = 0 (up to the joint rescale)
        for amp, expect_ratio in ((1.0, 1.0), (0.5, 0.5), (np.exp(0.5j * np.pi), -1j)):
            ds = DiscreteSpectrum([0.5j], [amp])
            v = seed_eigenvectors(ds, g, convention="paper")[0]
            mid = g.n_samples // 2
            # B/A at t=0: v2/v1 with the exponentials equal there
            ratio = v[1, mid] / v[0, mid]
            # paper rule: ratio = |amp| / exp(j angle amp)
            assert abs(ratio - abs(amp) / np.exp(1j * np.angle(amp))) < 1e-9

    def test_calibrated_ratio_is_b_coefficient(self):
        lam = np.array([0.3j, 0.1 + 0.6j])
        amp = np.array([1.0, 2.0 + 1.0j])
        r = canonical_seed_ratios(lam, amp)
        # N=1 branch: amp/(lam-lam*)
        r1 = canonical_seed_ratios(lam[:1], amp[:1])
        assert abs(r1[0] - amp[0] / (lam[0] - np.conj(lam[0]))) < 1e-12
        assert r.shape == (2,)


class TestSingleSoliton:
    def test_matches_closed_form(self, rng):
        g = TimeGrid.centered(40.0, 4096)
        for _ in range(5):
            lam = rng.uniform(-0.5, 0.5) + 1j * rng.uniform(0.2, 1.0)
            amp = rng.uniform(0.3, 3.0) * np.exp(2j * np.pi * rng.random())
            ds = DiscreteSpectrum([lam], [amp])
            got = multisoliton(ds, g)
            ref = single_soliton_closed_form(lam, amp, g)
            assert np.abs(got.samples - ref.samples).max() < 1e-10

    def test_envelope_and_center(self):
        # lam = (alpha + j omega)/2 with alpha = omega = 1
        lam = 0.5 + 0.5j
        amp = 2.0
        g = TimeGrid.centered(40.0, 4096)
        sig = multisoliton(DiscreteSpectrum([lam], [amp]), g)
        t0 = np.log(abs(amp) / 1.0) / 1.0
        env = 1.0 / np.cosh(g.t - t0)
        assert np.abs(np.abs(sig.samples) - env).max() < 1e-9


class TestDarbouxStep:
    def test_two_soliton_matches_rh(self):
        ds = DiscreteSpectrum([0.25j, 0.5j], [1.0, 1.0])
        g = TimeGrid.centered(60.0, 4096)
        got = multisoliton(ds, g)
        ref = rh_multisoliton(ds, g)
        assert np.abs(got.samples - ref.samples).max() < 1e-8

    def test_eigenvalue_accretion(self):
        ds = DiscreteSpectrum([0.3j, 0.65j, 0.15 + 0.45j],
                              [1.0, 0.7, 1.2]).sorted_by_imag()
        g = suggested_grid(ds, dt=1 / 256)
        vecs = seed_eigenvectors(ds, g, convention="calibrated")
        state = DarbouxState(0, g, np.zeros(g.n_samples, complex),
                             ds.eigenvalues, vecs)
        for k in range(1, 4):
            state = darboux_step(state)
            sig = TimeSignal(g, state.q_k)
            eigs = find_eigenvalues(
                sig, EigenSearchConfig(search_box=(-0.6, 0.6, 1e-3, 1.0)))
            assert len(eigs) == k
            expect = sorted(ds.eigenvalues[:k], key=lambda l: (l.imag, l.real))
            assert np.abs(np.array(eigs) - np.array(expect)).max() < 1e-5


class TestMultisoliton:
    def test_empty(self):
        g = TimeGrid.centered(10.0, 128)
        sig = multisoliton(DiscreteSpectrum.empty(), g)
        assert np.all(sig.samples == 0)

    def test_table_two_soliton_row(self):
        from nfdm.core import measure_extents
        ds = DiscreteSpectrum([0.25j, 0.5j], [1.0, 1.0])
        g = TimeGrid.centered(80.0, 8192)
        sig = multisoliton(ds, g)
        ext = measure_extents(sig)
        assert abs(ext.energy - 3.0) < 1e-3
        assert abs(ext.t_fwhm - 4.25 * 1.763) < 0.15

    def test_six_soliton_round_trip(self, rng):
        ds = random_spectrum(rng, 6, im_range=(0.2, 1.2), sep=0.16,
                             amp_range=(0.3, 2.0), re_range=(-0.3, 0.3))
        ds = ds.sorted_by_imag()
        g = suggested_grid(ds, dt=1 / 512)
        sig = multisoliton(ds, g)
        eigs = find_eigenvalues(
            sig, EigenSearchConfig(search_box=(-0.6, 0.6, 1e-3, 1.45)))
        assert len(eigs) == 6
        assert np.abs(np.array(eigs) - ds.eigenvalues).max() < 1e-4

    def test_energy_identity(self, rng):
        ds = random_spectrum(rng, 4, sep=0.15, amp_range=(0.3, 3.0))
        g = suggested_grid(ds, dt=1 / 256)
        sig = multisoliton(ds, g)
        assert abs(energy(sig) - 4 * ds.eigenvalues.imag.sum()) \
            < 1e-3 * energy(sig)

    def test_window_warning(self):
        ds = DiscreteSpectrum([0.1j], [1.0])   # wide soliton
        g = TimeGrid.centered(20.0, 512)
        with pytest.warns(WindowTooNarrowWarning):
            multisoliton(ds, g)

    def test_permutation_invariance(self, rng):
        ds = random_spectrum(rng, 3, sep=0.2, amp_range=(0.5, 2.0))
        g = suggested_grid(ds, dt=1 / 256)
        perms = ([0, 1, 2], [2, 0, 1], [1, 2, 0])
        signals = []
        for p in perms:
            sub = DiscreteSpectrum(ds.eigenvalues[p], ds.amplitudes[p])
            vecs = seed_eigenvectors(sub, g, convention="calibrated")
            st = DarbouxState(0, g, np.zeros(g.n_samples, complex),
                              sub.eigenvalues, vecs)
            for _ in range(3):
                st = darboux_step(st)
            signals.append(st.q_k)
        for s in signals[1:]:
            assert np.abs(s - signals[0]).max() < 1e-8


class TestPropagateSpectrum:
    def test_identity_at_zero(self):
        ds = DiscreteSpectrum([0.5j], [1.0])
        out = propagate_spectrum(ds, 0.0)
        assert np.array_equal(out.amplitudes, ds.amplitudes)

    def test_imaginary_eigenvalue_preserves_modulus(self):
        ds = DiscreteSpectrum([0.5j], [1.0])
        out = propagate_spectrum(ds, 1.0)
        # alpha = 0, omega = 1: phase e^{j z}, unit modulus
        assert abs(out.amplitudes[0] - np.exp(1j)) < 1e-12

    def test_modulus_gain(self):
        lam = (1 + 1j) / 2
        out = propagate_spectrum(DiscreteSpectrum([lam], [1.0]), 0.3)
        assert abs(abs(out.amplitudes[0]) - np.exp(0.6)) < 1e-12

    def test_commutes_with_ssfm(self):
        ds = DiscreteSpectrum([0.3j, 0.6j], [1.0, 0.8])
        g = TimeGrid.centered(50.0, 2048)
        z = 0.7
        sig = multisoliton(ds, g)
        via_time = ssfm_propagate(sig, LinkConfig(z_total=z, n_steps=1400),
                                  check_aliasing=False)
        via_spec = multisoliton(propagate_spectrum(ds, z), g)
        assert np.abs(via_time.samples - via_spec.samples).max() < 1e-4

    def test_stationary_centroid(self):
        ds = DiscreteSpectrum([0.3j, 0.6j], [1.0, 1.0])
        g = TimeGrid.centered(60.0, 2048)
        sig = multisoliton(ds, g)
        out = ssfm_propagate(sig, LinkConfig(z_total=1.0, n_steps=2000),
                             check_aliasing=False)

        def centroid(s):
            p = np.abs(s.samples) ** 2
            return np.trapezoid(g.t * p, dx=g.dt) / np.trapezoid(p, dx=g.dt)

        assert abs(centroid(out) - centroid(sig)) < 1e-3
