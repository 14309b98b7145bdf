"""PRBS, mapping, RRC, inverse-erfc, and full-chain link tests."""

import math

import numpy as np
import pytest

from disperse import (
    DirectFir,
    FreqDomain,
    LinkConfig,
    SystemParams,
    erfc_inv,
    generate_symbols,
    generate_taps,
    map_symbols,
    max_taps,
    prbs_bits,
    q_from_ber,
    rrc_taps,
    run_link,
)
from disperse.link_sim import demap_symbols


def bisect_erfc_inv(y, lo=-8.0, hi=8.0, iterations=200):
    """Independent bisection oracle: erfc is strictly decreasing."""
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if math.erfc(mid) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestPrbs:
    def test_deterministic(self):
        assert np.array_equal(prbs_bits(5000, 7), prbs_bits(5000, 7))

    def test_seed_changes_stream(self):
        assert not np.array_equal(prbs_bits(5000, 7), prbs_bits(5000, 8))

    def test_balanced(self):
        bits = prbs_bits(200_000, 3)
        assert abs(bits.mean() - 0.5) < 0.005

    def test_maximal_length_no_short_cycle(self):
        bits = prbs_bits(40_000, 1)
        # a maximal-length PRBS-23 cannot repeat with a 2^what << 23 period
        for period in (63, 127, 255, 511, 1023):
            assert not np.array_equal(bits[:period], bits[period : 2 * period])


class TestMapping:
    def test_constellation_levels(self):
        symbols = map_symbols(prbs_bits(4000, 1), "16QAM")
        levels = np.unique(np.round(symbols.real, 12))
        expected = np.array([-3, -1, 1, 3]) / np.sqrt(10)
        assert np.allclose(levels, expected)

    def test_unit_average_energy(self):
        symbols = map_symbols(prbs_bits(400_000, 5), "16QAM")
        assert np.mean(np.abs(symbols) ** 2) == pytest.approx(1.0, abs=0.01)

    def test_gray_round_trip(self):
        bits = prbs_bits(4096, 11)
        for modulation in ("16QAM", "QPSK"):
            symbols = map_symbols(bits, modulation)
            assert np.array_equal(demap_symbols(symbols, modulation), bits)

    def test_gray_neighbors_differ_by_one_bit(self):
        # adjacent levels on each axis differ in exactly one bit
        levels = np.array([-3, -1, 1, 3]) / np.sqrt(10)
        for a, b in zip(levels, levels[1:]):
            bits_a = demap_symbols(np.array([a + 1j * levels[0]]), "16QAM")
            bits_b = demap_symbols(np.array([b + 1j * levels[0]]), "16QAM")
            assert np.sum(bits_a != bits_b) == 1

    def test_qpsk_levels(self):
        symbols = map_symbols(prbs_bits(2000, 1), "QPSK")
        assert np.allclose(np.abs(symbols), 1.0, atol=1e-12)

    def test_generate_symbols_deterministic(self, bench_params):
        config = LinkConfig(system=bench_params, snr_db=20, n_symbols=2000, seed=9)
        s1, b1 = generate_symbols(config)
        s2, b2 = generate_symbols(config)
        assert np.array_equal(s1, s2)
        assert np.array_equal(b1, b2)


class TestRrc:
    def test_center_is_global_maximum(self):
        h = rrc_taps(0.1, 64, 2)
        assert h.argmax() == (len(h) - 1) // 2

    def test_unit_energy(self):
        for rolloff in (0.1, 0.25, 1.0):
            h = rrc_taps(rolloff, 64, 2)
            assert np.sum(h**2) == pytest.approx(1.0, abs=1e-12)

    def test_matched_cascade_isi_below_40db(self):
        h = rrc_taps(0.1, 64, 2)
        cascade = np.convolve(h, h)
        center = len(cascade) // 2
        symbol_samples = np.concatenate(
            [cascade[center - 2 :: -2][1:], cascade[center + 2 :: 2]]
        )
        isi = np.abs(symbol_samples).max() / cascade[center]
        assert 20 * np.log10(isi) < -40

    def test_odd_length(self):
        h = rrc_taps(0.1, 64, 2)
        assert len(h) == 64 * 2 + 1

    def test_singularity_samples_finite(self):
        # rolloff 0.1 at 2 sps puts samples exactly on |t| = Tsym/(4 beta)
        h = rrc_taps(0.1, 16, 2)
        assert np.isfinite(h).all()
        assert np.abs(h).max() < 1.0

    def test_rolloff_validation(self):
        with pytest.raises(ValueError):
            rrc_taps(0.0, 64, 2)
        with pytest.raises(ValueError):
            rrc_taps(1.5, 64, 2)


class TestErfcInv:
    def test_against_bisection_oracle(self):
        for y in (1e-6, 1e-4, 0.002, 0.02, 0.2, 0.5, 1.0, 1.5, 1.9):
            assert erfc_inv(y) == pytest.approx(bisect_erfc_inv(y), abs=1e-10)

    def test_round_trip(self):
        for y in np.logspace(-8, 0, 30):
            assert math.erfc(erfc_inv(y)) == pytest.approx(y, rel=1e-12)

    def test_domain(self):
        for bad in (0.0, 2.0, -0.1, 2.5):
            with pytest.raises(ValueError):
                erfc_inv(bad)


class TestQFromBer:
    def test_fec_threshold(self):
        assert q_from_ber(1e-2) == pytest.approx(7.33, abs=0.01)

    def test_zero_db_point(self):
        ber = math.erfc(1 / math.sqrt(2)) / 2
        assert q_from_ber(ber) == pytest.approx(0.0, abs=0.01)

    def test_1e3(self):
        assert q_from_ber(1e-3) == pytest.approx(9.80, abs=0.02)

    def test_domain(self):
        for bad in (0.0, 0.5, 0.7):
            with pytest.raises(ValueError):
                q_from_ber(bad)


def analytic_16qam_ber(es_n0_db: float) -> float:
    """Closed-form Gray 16-QAM bit error rate over AWGN.

    Per-axis Gray-coded 4-PAM with levels {+-1, +-3} d, d = sqrt(Es/10):
    BER = (1/4) [3 Q(g) + 2 Q(3g) - Q(5g)], g = sqrt((Es/N0)/5).
    """
    gamma = math.sqrt(10 ** (es_n0_db / 10) / 5)

    def qfunc(x):
        return 0.5 * math.erfc(x / math.sqrt(2))

    return 0.25 * (3 * qfunc(gamma) + 2 * qfunc(3 * gamma) - qfunc(5 * gamma))


class TestRunLink:
    def test_noiseless_round_trip_error_free(self, bench_params):
        config = LinkConfig(system=bench_params, snr_db=40, n_symbols=20_000, seed=0)
        spec = DirectFir(taps=generate_taps(bench_params, max_taps(bench_params)))
        result = run_link(config, spec)
        assert result.n_bit_errors == 0
        assert result.q_db == math.inf
        assert result.rmps == 588

    def test_deterministic(self, bench_params):
        config = LinkConfig(system=bench_params, snr_db=15, n_symbols=5_000, seed=4)
        spec = DirectFir(taps=generate_taps(bench_params, 273))
        assert run_link(config, spec) == run_link(config, spec)

    def test_ber_decreases_with_snr(self, bench_params):
        spec = DirectFir(taps=generate_taps(bench_params, 273))
        bers = []
        for snr in (13.0, 15.0, 17.0):
            config = LinkConfig(system=bench_params, snr_db=snr, n_symbols=20_000,
                                seed=1)
            bers.append(run_link(config, spec).ber)
        assert bers[0] > bers[1] > bers[2]

    def test_back_to_back_matches_analytic_awgn(self):
        # vanishing dispersion, full-band single-tap equalizer: measured
        # BER must sit within 2 sigma of the closed-form value
        params = SystemParams.from_engineering(17, 1550, 1e-9, 20e9, 2,
                                               light_speed=3e8)
        config = LinkConfig(system=params, snr_db=16.0, n_symbols=100_000, seed=2)
        spec = DirectFir(taps=generate_taps(params, 1))
        result = run_link(config, spec)
        expected = analytic_16qam_ber(16.0)
        sigma = math.sqrt(expected * (1 - expected) / result.n_bits)
        assert abs(result.ber - expected) < 2 * sigma

    def test_fd_engine_runs_through_chain(self, bench_params):
        config = LinkConfig(system=bench_params, snr_db=15.0, n_symbols=5_000, seed=3)
        result = run_link(config, FreqDomain(fft_size=2048, params=bench_params))
        assert 0 < result.ber < 0.1
        assert result.rmps == pytest.approx(71.93, abs=0.005)

    def test_inconsistent_sampling_rejected(self, bench_params):
        config = LinkConfig(system=bench_params, snr_db=15.0, n_symbols=5_000,
                            baud=10e9)
        spec = DirectFir(taps=generate_taps(bench_params, 273))
        with pytest.raises(ValueError):
            run_link(config, spec)

    def test_engine_params_mismatch_rejected(self, bench_params):
        other = SystemParams.from_engineering(17, 1550, 900, 20e9, 2,
                                              light_speed=3e8)
        config = LinkConfig(system=bench_params, snr_db=15.0, n_symbols=5_000)
        spec = DirectFir(taps=generate_taps(other, 101))
        with pytest.raises(ValueError):
            run_link(config, spec)

    def test_config_validation(self, bench_params):
        with pytest.raises(ValueError):
            LinkConfig(system=bench_params, snr_db=15, n_symbols=10)
        with pytest.raises(ValueError):
            LinkConfig(system=bench_params, snr_db=15, rolloff=0.0)
        with pytest.raises(ValueError):
            LinkConfig(system=bench_params, snr_db=15, samples_per_symbol=1)
        with pytest.raises(ValueError):
            LinkConfig(system=bench_params, snr_db=15, modulation="64QAM")
