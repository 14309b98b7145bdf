"""Engine tests against brute-force oracles.

The key correctness theorem: the clustered engines are exactly direct
convolutions with substituted tap vectors (centroid per tap for the hard
engine, alpha-blended centroid pair for soft taps in the fuzzy engine).
The oracles below build those effective tap vectors explicitly and run
plain ``np.convolve``, independent of the engine implementation.
"""

import numpy as np
import pytest

from disperse import (
    Clustered,
    DirectFir,
    FreqDomain,
    FuzzyClustered,
    HardEntry,
    SystemParams,
    apply_channel,
    cd_frequency_response,
    equalize,
    equalize_clustered,
    equalize_direct,
    equalize_fd,
    equalize_fuzzy,
    fuzzify,
    generate_taps,
    kmeans,
    max_taps,
)
from disperse.clustering import ClusterPlan


def hard_effective_taps(plan, taps):
    return plan.centroids[plan.assignment]


def fuzzy_effective_taps(plan, alpha):
    eff = np.empty(len(plan.entries), dtype=complex)
    for k, entry in enumerate(plan.entries):
        if isinstance(entry, HardEntry):
            eff[k] = plan.centroids[entry.cluster]
        else:
            eff[k] = (
                alpha * plan.centroids[entry.nearest]
                + (1 - alpha) * plan.centroids[entry.second]
            )
    return eff


def oracle_convolve(signal, eff_taps):
    return np.convolve(signal, eff_taps, mode="same")


@pytest.fixture()
def random_signal(rng):
    return rng.standard_normal(1000) + 1j * rng.standard_normal(1000)


class TestDirect:
    def test_identity_kernel(self, bench_params, random_signal):
        unit = generate_taps(bench_params, 1)
        scaled = unit.taps[0]
        out = equalize_direct(random_signal, unit)
        assert np.allclose(out, scaled * random_signal, atol=1e-14)

    def test_impulse_gives_taps(self, bench_taps_273):
        n = bench_taps_273.n_taps
        x = np.zeros(2 * n + 1, dtype=complex)
        x[n] = 1.0
        out = equalize_direct(x, bench_taps_273)
        half = bench_taps_273.half_span
        assert np.allclose(out[n - half : n + half + 1], bench_taps_273.taps, atol=1e-12)

    def test_matches_np_convolve(self, bench_taps_273, random_signal):
        out = equalize_direct(random_signal, bench_taps_273)
        ref = np.convolve(random_signal, bench_taps_273.taps, mode="same")
        assert np.abs(out - ref).max() < 1e-12

    def test_short_signal_rejected(self, bench_taps_273):
        with pytest.raises(ValueError):
            equalize_direct(np.ones(100, complex), bench_taps_273)

    def test_round_trip_recovers_bandlimited_signal(self, bench_params, rng):
        # RRC(0.1)-limited waveform through the channel and back; the
        # truncated-chirp equalizer leaves its intrinsic in-band ripple,
        # so the recovery floor sits near 1.6e-3 (see the full-link run)
        from disperse import rrc_taps
        from scipy.signal import fftconvolve

        n_sym = 4096
        symbols = rng.choice(np.array([-3, -1, 1, 3]) / np.sqrt(10), (n_sym, 2))
        up = np.zeros(2 * n_sym, dtype=complex)
        up[::2] = symbols[:, 0] + 1j * symbols[:, 1]
        shape = rrc_taps(0.1, 64, 2)
        tx = fftconvolve(up, shape, mode="same")
        full = generate_taps(bench_params, max_taps(bench_params))
        eq = equalize_direct(apply_channel(tx, bench_params), full)
        guard = full.n_taps
        nmse = np.mean(np.abs(eq - tx)[guard:-guard] ** 2) / np.mean(
            np.abs(tx)[guard:-guard] ** 2
        )
        assert nmse < 2e-3


class TestClustered:
    def test_one_cluster_per_tap_equals_direct(self, bench_taps_273, random_signal):
        n = bench_taps_273.n_taps
        plan = ClusterPlan(
            centroids=bench_taps_273.taps.copy(),
            assignment=np.arange(n),
            sse=0.0,
            sse_history=(0.0,),
        )
        clustered = equalize_clustered(random_signal, plan, bench_taps_273)
        direct = equalize_direct(random_signal, bench_taps_273)
        scale = np.abs(direct).max()
        assert np.abs(clustered - direct).max() < 1e-12 * scale

    def test_single_cluster_is_windowed_sum(self, bench_taps_273, random_signal):
        plan = kmeans(bench_taps_273.taps, 1, seed=0)
        out = equalize_clustered(random_signal, plan, bench_taps_273)
        ref = plan.centroids[0] * np.convolve(
            random_signal, np.ones(bench_taps_273.n_taps), mode="same"
        )
        assert np.abs(out - ref).max() < 1e-10

    def test_matches_centroid_substitution_oracle(self, bench_taps_273, random_signal):
        plan = kmeans(bench_taps_273.taps, 26, seed=12345)
        out = equalize_clustered(random_signal, plan, bench_taps_273)
        ref = oracle_convolve(random_signal, hard_effective_taps(plan, bench_taps_273))
        assert np.abs(out - ref).max() < 1e-10

    def test_plan_taps_mismatch_rejected(self, bench_params, bench_taps_273):
        other = generate_taps(bench_params, 101)
        plan = kmeans(other.taps, 5, seed=0)
        with pytest.raises(ValueError):
            equalize_clustered(np.ones(500, complex), plan, bench_taps_273)


class TestFuzzy:
    @pytest.fixture()
    def plan(self, bench_taps_273):
        hard = kmeans(bench_taps_273.taps, 12, seed=12345)
        return hard, fuzzify(hard, bench_taps_273.taps, 0.8)

    def test_matches_effective_tap_oracle(self, plan, bench_taps_273, random_signal):
        _, fuzzy = plan
        alpha = 0.7
        out = equalize_fuzzy(random_signal, fuzzy, bench_taps_273, alpha)
        ref = oracle_convolve(random_signal, fuzzy_effective_taps(fuzzy, alpha))
        assert np.abs(out - ref).max() < 1e-10

    def test_alpha_one_equals_hard_on_nearest(self, plan, bench_taps_273, random_signal):
        hard, fuzzy = plan
        out = equalize_fuzzy(random_signal, fuzzy, bench_taps_273, 1.0)
        ref = equalize_clustered(random_signal, hard, bench_taps_273)
        assert np.abs(out - ref).max() < 1e-12

    def test_no_soft_entries_bit_identical_to_hard(self, bench_taps_273, random_signal):
        hard = kmeans(bench_taps_273.taps, 12, seed=12345)
        fuzzy = fuzzify(hard, bench_taps_273.taps, 0.4)  # all hard
        assert fuzzy.n_soft == 0
        out = equalize_fuzzy(random_signal, fuzzy, bench_taps_273, 0.7)
        ref = equalize_clustered(random_signal, hard, bench_taps_273)
        assert np.array_equal(out, ref)

    def test_alpha_validation(self, plan, bench_taps_273, random_signal):
        _, fuzzy = plan
        for alpha in (0.3, 1.2):
            with pytest.raises(ValueError):
                equalize_fuzzy(random_signal, fuzzy, bench_taps_273, alpha)


class TestFreqDomain:
    def test_identity_with_vanishing_dispersion(self, rng):
        params = SystemParams.from_engineering(
            17, 1550, 1800e-12, 20e9, 2, light_speed=3e8
        )
        spec = FreqDomain(fft_size=256, params=params)
        x = rng.standard_normal(3000) + 1j * rng.standard_normal(3000)
        out = equalize_fd(x, spec)
        assert np.sqrt(np.mean(np.abs(out - x) ** 2)) < 1e-9

    def test_taps_mode_equals_direct(self, bench_params, bench_taps_273, rng):
        spec = FreqDomain(
            fft_size=1024, params=bench_params, mode="taps", taps=bench_taps_273
        )
        x = rng.standard_normal(5000) + 1j * rng.standard_normal(5000)
        fd = equalize_fd(x, spec)
        td = equalize_direct(x, bench_taps_273)
        guard = bench_taps_273.half_span
        err = fd[guard:-guard] - td[guard:-guard]
        assert np.sqrt(np.mean(np.abs(err) ** 2)) < 1e-9

    def test_fft_size_too_small_rejected(self, bench_params, bench_taps_273):
        with pytest.raises(ValueError):
            FreqDomain(fft_size=512, params=bench_params, mode="taps",
                       taps=bench_taps_273)

    def test_non_power_of_two_rejected(self, bench_params):
        with pytest.raises(ValueError):
            FreqDomain(fft_size=500, params=bench_params)

    def test_analytic_small_fft_allowed(self, bench_params, rng):
        # undersized blocks degrade quality but must not error: the FD
        # engine is swept down to short FFTs on purpose
        spec = FreqDomain(fft_size=64, params=bench_params)
        x = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
        out = equalize_fd(x, spec)
        assert len(out) == len(x)

    def test_analytic_equalizes_channel(self, bench_params, rng):
        x = rng.standard_normal(8192) + 1j * rng.standard_normal(8192)
        spectrum = np.fft.fft(x)
        freqs = np.fft.fftfreq(len(x))
        spectrum[np.abs(freqs) > 0.26] = 0  # keep within an RRC-like band
        x = np.fft.ifft(spectrum)
        dispersed = apply_channel(x, bench_params)
        out = equalize_fd(dispersed, FreqDomain(fft_size=2048, params=bench_params))
        guard = max_taps(bench_params)
        err = out[guard:-guard] - x[guard:-guard]
        assert np.sqrt(np.mean(np.abs(err) ** 2) / np.mean(np.abs(x) ** 2)) < 1e-3


class TestEngineProperties:
    def test_linearity(self, bench_taps_273, rng):
        plan = kmeans(bench_taps_273.taps, 9, seed=2)
        fuzzy = fuzzify(plan, bench_taps_273.taps, 0.8)
        x = rng.standard_normal(800) + 1j * rng.standard_normal(800)
        y = rng.standard_normal(800) + 1j * rng.standard_normal(800)
        a, b = 1.3 - 0.2j, -0.7 + 0.9j
        engines = [
            lambda s: equalize_direct(s, bench_taps_273),
            lambda s: equalize_clustered(s, plan, bench_taps_273),
            lambda s: equalize_fuzzy(s, fuzzy, bench_taps_273, 0.7),
            lambda s: equalize_fd(
                s,
                FreqDomain(
                    fft_size=1024,
                    params=bench_taps_273.params,
                    mode="taps",
                    taps=bench_taps_273,
                ),
            ),
        ]
        for run in engines:
            combined = run(a * x + b * y)
            separate = a * run(x) + b * run(y)
            assert np.abs(combined - separate).max() < 1e-10

    def test_time_invariance_interior(self, bench_taps_273, rng):
        shift = 17
        x = rng.standard_normal(2600) + 1j * rng.standard_normal(2600)
        shifted = np.roll(x, shift)
        plan = kmeans(bench_taps_273.taps, 9, seed=2)
        fuzzy = fuzzify(plan, bench_taps_273.taps, 0.8)
        engines = [
            lambda s: equalize_direct(s, bench_taps_273),
            lambda s: equalize_clustered(s, plan, bench_taps_273),
            lambda s: equalize_fuzzy(s, fuzzy, bench_taps_273, 0.7),
            lambda s: equalize_fd(
                s,
                FreqDomain(
                    fft_size=1024,
                    params=bench_taps_273.params,
                    mode="taps",
                    taps=bench_taps_273,
                ),
            ),
        ]
        # overlap-save block boundaries make the FD transient a full block
        interior = slice(1024 + shift, 2600 - 1024)
        for run in engines:
            out = run(x)
            out_shifted = run(shifted)
            assert np.allclose(
                out_shifted[interior], np.roll(out, shift)[interior], atol=1e-10
            )

    def test_dispatch(self, bench_taps_273, random_signal):
        plan = kmeans(bench_taps_273.taps, 7, seed=0)
        fuzzy = fuzzify(plan, bench_taps_273.taps, 0.8)
        specs = [
            DirectFir(taps=bench_taps_273),
            Clustered(plan=plan, taps=bench_taps_273),
            FuzzyClustered(plan=fuzzy, taps=bench_taps_273, alpha=0.7),
            FreqDomain(fft_size=1024, params=bench_taps_273.params,
                       mode="taps", taps=bench_taps_273),
        ]
        references = [
            equalize_direct(random_signal, bench_taps_273),
            equalize_clustered(random_signal, plan, bench_taps_273),
            equalize_fuzzy(random_signal, fuzzy, bench_taps_273, 0.7),
            equalize_fd(random_signal, specs[3]),
        ]
        for spec, ref in zip(specs, references):
            assert np.array_equal(equalize(random_signal, spec), ref)
