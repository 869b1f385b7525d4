import numpy as np
import pytest

from nfdm.core import ContinuousSpectrum, DiscreteSpectrum, TimeGrid
from nfdm.modem import (Constellation, EmptyAfterPruning, NonStochastic,
                        RHO_0, RHO_OOK_GUARDED, TransitionMatrix,
                        amplitude_channel_mi, bits_upper_bound,
                        blahut_arimoto, build_multisoliton_grid,
                        build_signal_set_A, build_signal_set_B,
                        capacity_1soliton_amplitude, detect_continuous,
                        detect_discrete, estimate_transition_matrix,
                        log_euclidean_distance, mutual_information,
                        ring_constellation, spectral_efficiency,
                        spectral_efficiency_table_mode)

T1 = 5.2637
W0 = 0.5714
P0 = 0.38


@pytest.fixture(scope="module")
def set_a():
    return build_signal_set_A(TimeGrid.centered(80.0, 4096))


class TestBlahutArimoto:
    def test_bsc(self):
        c, _ = blahut_arimoto(np.array([[0.9, 0.1], [0.1, 0.9]]))
        assert abs(c - 0.5310) < 1e-4

    def test_identity(self):
        c, r = blahut_arimoto(np.eye(4))
        assert abs(c - 2.0) < 1e-9
        assert np.allclose(r, 0.25)

    def test_monotone_under_degradation(self):
        caps = []
        for p in (0.02, 0.08, 0.2, 0.35):
            c, _ = blahut_arimoto(np.array([[1 - p, p], [p, 1 - p]]))
            caps.append(c)
        assert all(a > b for a, b in zip(caps, caps[1:]))

    def test_bounds(self):
        p = np.array([[0.7, 0.2, 0.1],
                      [0.1, 0.8, 0.1],
                      [0.25, 0.25, 0.5]])
        c, r = blahut_arimoto(p)
        uniform_mi = mutual_information(p, np.full(3, 1 / 3))
        assert c >= uniform_mi - 1e-9
        assert c <= np.log2(3) + 1e-12

    def test_non_stochastic(self):
        with pytest.raises(NonStochastic):
            blahut_arimoto(np.array([[0.5, 0.2], [0.1, 0.9]]))

    def test_smoothing_and_zero_rows(self):
        counts = np.array([[10, 0], [0, 0]])
        tm = TransitionMatrix(counts, counts.sum(axis=1))
        p = tm.smoothed_probabilities()
        assert p.shape == (1, 2)       # zero-trial row dropped
        assert p[0].sum() == pytest.approx(1.0)
        assert p[0, 1] > 0             # smoothed


class TestSignalSets:
    def test_set_a_table_rows(self, set_a):
        by_label = {s.label: s for s in set_a.symbols}
        assert abs(by_label["S2"].extents.energy - 2.0) < 1e-3
        assert abs(by_label["S3"].extents.energy - 1.0) < 1e-3
        assert abs(by_label["S4"].extents.energy - 3.0) < 1e-3
        assert abs(by_label["S3"].extents.t_99 - 2 * T1) < 0.02 * 2 * T1
        # the table's power figure uses its printed 2.58 T1 duration; the
        # honestly measured t_99 of the 2-soliton is ~4% shorter, so compare
        # in the table's own accounting (measured energy over table duration)
        p_table = by_label["S4"].extents.energy / (2.58 * T1)
        assert abs(p_table - 0.58 * P0) < 0.02 * 0.58 * P0
        assert abs(by_label["S4"].extents.p_avg
                   - by_label["S4"].extents.energy / by_label["S4"].extents.t_99) < 1e-12
        assert abs(by_label["S2"].extents.t_fwhm - 1.763) < 0.01

    def test_set_b_cardinality_and_aggregates(self):
        c = build_signal_set_B(TimeGrid.centered(80.0, 4096))
        assert len(c) == 16
        # the printed aggregates (1.06 P0 power, 2.236 T1 duration) are not
        # derivable from the measured symbols (see ledger); they are carried
        # as table constants, and the measured values sit in these ranges
        assert 0.4 * P0 < c.average_power() < 0.7 * P0
        assert 1.8 * T1 < c.average_duration() < 2.3 * T1
        tab = spectral_efficiency_table_mode("set_b")
        assert tab.avg_power == pytest.approx(1.06 * P0)
        assert tab.avg_duration == pytest.approx(2.236 * T1)

    def test_priors_sum(self, set_a):
        assert set_a.priors.sum() == pytest.approx(1.0)
        with pytest.raises(ValueError):
            Constellation(set_a.symbols, np.array([0.5, 0.5, 0.1, 0.1]))


class TestMultisolitonGrid:
    def test_subset_count_no_pruning(self):
        c, log = build_multisoliton_grid(2, 2, grid=TimeGrid.centered(60.0, 2048),
                                         im_max=1.0)
        assert len(c) == 4          # {}, {l1}, {l2}, {l1,l2}
        assert log.n_kept == 4

    def test_bits_formula(self):
        for n, m in ((3, 2), (4, 3), (5, 1)):
            assert abs(bits_upper_bound(n, m) - n * np.log2(m + 1)) < 1e-12

    def test_pruning_monotone(self):
        grid = TimeGrid.centered(60.0, 2048)
        kept = []
        for cap in (25.0, 15.0, 9.0):
            c, _ = build_multisoliton_grid(3, 3, grid=grid, im_max=1.5,
                                           t99_cap=cap)
            kept.append(len(c))
        assert kept[0] >= kept[1] >= kept[2]

    def test_empty_after_pruning(self):
        with pytest.raises(EmptyAfterPruning):
            build_multisoliton_grid(2, 2, grid=TimeGrid.centered(60.0, 2048),
                                    im_max=1.0, t99_cap=1e-6)


class TestDetectors:
    def test_exact_spectrum_detects_self(self, set_a):
        for idx, sym in enumerate(set_a.symbols):
            assert detect_discrete(sym.spectrum, set_a) == idx

    def test_empty_goes_to_zero_symbol(self, set_a):
        assert detect_discrete(DiscreteSpectrum.empty(), set_a) == 0

    def test_relabel_invariance(self, set_a):
        rx = DiscreteSpectrum([0.26j], [0.52])
        idx = detect_discrete(rx, set_a)
        label = set_a.symbols[idx].label
        shuffled = Constellation.uniform(set_a.symbols[::-1])
        idx2 = detect_discrete(rx, shuffled)
        assert shuffled.symbols[idx2].label == label

    def test_perturbed_spectrum(self, set_a):
        rx = DiscreteSpectrum([0.51j], [1.05])
        assert set_a.symbols[detect_discrete(rx, set_a)].label == "S2"
        rx2 = DiscreteSpectrum([0.255j, 0.49j], [0.9, 1.1])
        assert set_a.symbols[detect_discrete(rx2, set_a)].label == "S4"

    def test_continuous_distance(self):
        lam = np.linspace(-2, 2, 101)
        a = ContinuousSpectrum(lam, np.exp(-lam**2) + 0j)
        b = ContinuousSpectrum(lam, np.exp(-lam**2) * np.exp(0.3j))
        assert log_euclidean_distance(a, a) == 0.0
        assert log_euclidean_distance(a, b) == pytest.approx(
            log_euclidean_distance(b, a))

    def test_detect_continuous(self):
        lam = np.linspace(-2, 2, 101)
        syms = []
        from nfdm.modem import ModemSymbol
        for k, s in enumerate((0.5, 1.0, 1.5)):
            cs = ContinuousSpectrum(lam, s * np.exp(-lam**2) + 0j)
            syms.append(ModemSymbol(f"a{k}", DiscreteSpectrum.empty(),
                                    None, None, continuous=cs))
        c = Constellation.uniform(syms)
        rx = ContinuousSpectrum(lam, 1.07 * np.exp(-lam**2) + 0j)
        assert detect_continuous(rx, c) == 1

    def test_ring_preset(self):
        rings = ring_constellation(4, 8)
        assert rings.size == 32
        assert len(np.unique(np.round(np.abs(rings), 9))) == 4


class TestTransitionMatrix:
    def test_row_sums(self, rng):
        c = Constellation.uniform(build_signal_set_A(
            TimeGrid.centered(80.0, 2048)).symbols[:2])

        def runner(tx, r):
            return tx if r.random() < 0.9 else 1 - tx

        tm = estimate_transition_matrix(c, runner, 50, rng)
        assert np.all(tm.row_trials == 50)
        assert np.all(tm.counts.sum(axis=1) == 50)

    def test_validation(self):
        with pytest.raises(ValueError):
            TransitionMatrix(np.array([[1, 2], [3, 4]]), np.array([3, 8]))
        with pytest.raises(ValueError):
            estimate_transition_matrix(None, None, 0)


class TestSpectralEfficiency:
    def test_ook_guarded(self):
        assert abs(RHO_OOK_GUARDED - 0.1504) < 1e-3

    def test_rho0(self):
        assert abs(RHO_0 - 0.3325) < 1e-3

    def test_set_a_ratio(self):
        rho = spectral_efficiency_table_mode("set_a").rho
        assert abs(rho / RHO_0 - 1.2121) < 1e-3

    def test_set_b_ratio(self):
        rho = spectral_efficiency_table_mode("set_b").rho
        assert abs(rho / RHO_0 - 1.79) < 0.01

    def test_measured_mode(self, set_a):
        rep = spectral_efficiency(2.0, set_a)
        assert rep.bits_per_symbol == 2.0
        assert rep.rho == pytest.approx(
            2.0 / (set_a.average_duration() * set_a.max_bandwidth()))
        rep_max = spectral_efficiency(2.0, set_a, mode="max_duration")
        assert rep_max.rho < rep.rho


class TestAmplitudeChannel:
    def test_monotone_and_limits(self):
        snr = 10 ** (np.array([-50.0, -20.0, 0.0, 10.0, 20.0, 30.0]) / 10)
        mi, asym = capacity_1soliton_amplitude(snr)
        # the signal-dependent noise never swamps small amplitudes, so MI
        # saturates at a small floor instead of vanishing (see ledger)
        assert mi[0] < 0.3
        assert all(a < b for a, b in zip(mi, mi[1:]))
        gaps = mi[2:] - asym[2:]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))   # decreasing
        assert abs(gaps[-1]) < 0.1                # within 0.1 bit at 30 dB

    def test_channel_mi_positive(self):
        assert amplitude_channel_mi(1.0, 0.01) > 0


class TestConstellationConfig:
    def test_load_from_dict(self):
        cfg = {
            "grid": {"t_span": 60.0, "n": 1536},
            "symbols": [
                {"label": "off"},
                {"label": "on", "eigenvalues": [[0.0, 0.5]],
                 "amplitudes": [[1.0, 0.0]]},
            ],
        }
        from nfdm.modem import constellation_from_config
        c = constellation_from_config(cfg)
        assert len(c) == 2
        assert c.symbols[1].spectrum.eigenvalues[0] == 0.5j
        assert abs(c.symbols[1].extents.energy - 2.0) < 1e-3

    def test_needs_symbols(self):
        from nfdm.modem import constellation_from_config
        with pytest.raises(ValueError):
            constellation_from_config({"grid": {"t_span": 10.0, "n": 64}})


class TestEndToEndDetection:
    def test_high_snr_symbol_error_rate(self):
        # set A over a noisy link at ~30 dB: symbol error rate < 1e-2
        from nfdm.nlse import LinkConfig, ssfm_propagate
        from nfdm.zs import EigenSearchConfig, discrete_amplitudes, find_eigenvalues
        from nfdm.experiments import trial_rng

        grid = TimeGrid.centered(80.0, 1024)
        c = build_signal_set_A(grid)
        link = LinkConfig(z_total=1.0, n_steps=150, noise_density=1.25e-4,
                          noise_bandwidth=2.0)
        search = EigenSearchConfig(search_box=(-0.3, 0.3, 0.02, 0.8),
                                   grid_init=(11, 11))
        errors = 0
        total = 0
        for tx in range(4):
            for trial in range(30):
                rng = trial_rng(991, tx * 100 + trial)
                rx = ssfm_propagate(c.symbols[tx].signal, link, rng=rng,
                                    check_aliasing=False)
                eigs = find_eigenvalues(rx, search, check_decay=False)
                spec = (discrete_amplitudes(rx, eigs, newton_tol=1e-9,
                                            check_decay=False)
                        if eigs else DiscreteSpectrum.empty())
                errors += int(detect_discrete(spec, c) != tx)
                total += 1
        assert errors / total <= 0.01, f"{errors}/{total} symbol errors"

    def test_high_noise_rows_approach_uniformity(self, rng):
        # with the detector swamped, rows approach the prior-free confusion
        # limit: a chi-square uniformity statistic stays at O(1) per dof
        from nfdm.modem import estimate_transition_matrix

        c = build_signal_set_A(TimeGrid.centered(80.0, 1024))

        def swamped_runner(tx, r):
            return int(r.integers(0, 4))

        tm = estimate_transition_matrix(c, swamped_runner, 400, rng)
        p = tm.counts / tm.row_trials[:, None]
        chi2 = ((p - 0.25) ** 2 / 0.25).sum() * 400
        assert chi2 < 2.5 * 12   # 12 dof, generous O(1)-per-dof bound


class TestContinuousDetectionVsMatchedFilter:
    def test_paired_accuracy(self):
        # log-Euclidean spectral detection tracks the matched-filter baseline
        # on paired trials (same noise realizations)
        from nfdm.experiments import run_preset
        rows, summary, _ = run_preset("contspec-rates", {
            "rings": 2, "phases": 8, "trials_per_symbol": 6,
            "grid_n": 1024, "noise_densities": [1e-4],
            "link": {"n_steps": 60}, "seed": 55,
        })
        acc_nft = rows[0]["accuracy_nft"]
        acc_mf = rows[0]["accuracy_mf"]
        assert acc_nft >= acc_mf - 0.05
