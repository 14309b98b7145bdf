"""Simulated coherent link: PRBS -> QAM -> RRC -> CD channel + AWGN -> CDC.

The chain mirrors an offline single-polarization receiver stack reduced
to its dispersion-compensation core: matched root-raised-cosine filtering
at 2 samples/symbol, one CDC engine under test, data-aided timing
alignment, a single complex least-squares gain/phase correction, hard
decisions, and BER / Q-factor / EVM metrics.  Laser phase noise,
frequency offset, polarization effects, and fiber nonlinearity are out of
scope; the channel is linear CD plus additive white Gaussian noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.signal import fftconvolve

from . import complexity
from .cd_model import SystemParams, apply_channel, max_taps
from .equalizers import EqualizerSpec, FreqDomain, equalize, transient_length

#: Gray code order for the 2-bit labels of one 4-PAM axis: bit pairs
#: (00, 01, 11, 10) map onto amplitude levels (-3, -1, +1, +3).
GRAY4 = np.array([0, 1, 3, 2], dtype=np.int64)
#: Unit-average-energy 16-QAM axis levels.
LEVELS_16QAM = np.array([-3.0, -1.0, 1.0, 3.0]) / math.sqrt(10.0)
#: Unit-average-energy QPSK axis levels (Gray is trivial for one bit).
LEVELS_QPSK = np.array([-1.0, 1.0]) / math.sqrt(2.0)

_PRBS_ORDER = 23
_PRBS_MASK = (1 << _PRBS_ORDER) - 1


@dataclass(frozen=True)
class LinkConfig:
    """One simulated link scenario."""

    system: SystemParams
    snr_db: float
    baud: float = 20e9
    samples_per_symbol: int = 2
    modulation: str = "16QAM"
    rolloff: float = 0.1
    rrc_span_symbols: int = 64
    n_symbols: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.n_symbols < 1000:
            raise ValueError("n_symbols must be >= 1000 for BER estimates")
        if not 0.0 < self.rolloff <= 1.0:
            raise ValueError(f"rolloff must be in (0, 1], got {self.rolloff}")
        if self.samples_per_symbol < 2:
            raise ValueError("samples_per_symbol must be >= 2 (Nyquist premise)")
        if self.modulation not in ("QPSK", "16QAM"):
            raise ValueError(f"unsupported modulation {self.modulation!r}")
        if self.baud <= 0:
            raise ValueError("baud must be positive")

    @property
    def bits_per_symbol(self) -> int:
        return 4 if self.modulation == "16QAM" else 2


@dataclass(frozen=True)
class SimResult:
    """Metrics of one link run; rmps comes from the complexity model."""

    ber: float
    q_db: float
    evm_percent: float
    rmps: float
    n_bit_errors: int
    n_bits: int


@njit(cache=True)
def _lfsr_bits(state: np.int64, n: np.int64) -> np.ndarray:
    """Maximal-length degree-23 LFSR, feedback taps [23, 18]."""
    out = np.empty(n, dtype=np.uint8)
    s = state
    for i in range(64):  # warm-up: spreads low-entropy seeds over the register
        fb = ((s >> 22) ^ (s >> 17)) & 1
        s = ((s << 1) | fb) & _PRBS_MASK
    for i in range(n):
        fb = ((s >> 22) ^ (s >> 17)) & 1
        s = ((s << 1) | fb) & _PRBS_MASK
        out[i] = fb
    return out


def prbs_bits(n_bits: int, seed: int) -> np.ndarray:
    """Seeded PRBS-23 bit stream (period 2**23 - 1)."""
    if n_bits < 0:
        raise ValueError("n_bits must be non-negative")
    state = np.int64(seed % _PRBS_MASK + 1)  # any nonzero register works
    return _lfsr_bits(state, np.int64(n_bits))


def _axis_levels(modulation: str) -> np.ndarray:
    return LEVELS_16QAM if modulation == "16QAM" else LEVELS_QPSK


def map_symbols(bits: np.ndarray, modulation: str = "16QAM") -> np.ndarray:
    """Gray-map a bit stream onto unit-energy QAM symbols.

    16-QAM consumes 4 bits per symbol, the first two selecting the I
    level and the last two the Q level through the GRAY4 table; QPSK
    consumes 2 bits (one per axis).
    """
    bits = np.asarray(bits, dtype=np.int64)
    if modulation == "16QAM":
        if len(bits) % 4:
            raise ValueError("16QAM needs a multiple of 4 bits")
        b = bits.reshape(-1, 4)
        gray_i = (b[:, 0] << 1) | b[:, 1]
        gray_q = (b[:, 2] << 1) | b[:, 3]
        # invert the Gray table: label -> level index
        inv = np.argsort(GRAY4)
        return LEVELS_16QAM[inv[gray_i]] + 1j * LEVELS_16QAM[inv[gray_q]]
    if modulation == "QPSK":
        if len(bits) % 2:
            raise ValueError("QPSK needs a multiple of 2 bits")
        b = bits.reshape(-1, 2)
        return LEVELS_QPSK[b[:, 0]] + 1j * LEVELS_QPSK[b[:, 1]]
    raise ValueError(f"unsupported modulation {modulation!r}")


def demap_symbols(symbols: np.ndarray, modulation: str = "16QAM") -> np.ndarray:
    """Hard-decide symbols back to the Gray-mapped bit stream."""
    s = np.asarray(symbols)
    levels = _axis_levels(modulation)
    idx_i = np.argmin(np.abs(s.real[:, None] - levels[None, :]), axis=1)
    idx_q = np.argmin(np.abs(s.imag[:, None] - levels[None, :]), axis=1)
    if modulation == "16QAM":
        gray_i = GRAY4[idx_i]
        gray_q = GRAY4[idx_q]
        bits = np.empty((len(s), 4), dtype=np.uint8)
        bits[:, 0] = gray_i >> 1
        bits[:, 1] = gray_i & 1
        bits[:, 2] = gray_q >> 1
        bits[:, 3] = gray_q & 1
    else:
        bits = np.empty((len(s), 2), dtype=np.uint8)
        bits[:, 0] = idx_i
        bits[:, 1] = idx_q
    return bits.reshape(-1)


def generate_symbols(config: LinkConfig):
    """Seeded PRBS bits mapped to unit-average-energy symbols.

    Returns ``(symbols, bits)``.
    """
    bits = prbs_bits(config.n_symbols * config.bits_per_symbol, config.seed)
    return map_symbols(bits, config.modulation), bits


def rrc_taps(
    rolloff: float, span_symbols: int, samples_per_symbol: int
) -> np.ndarray:
    """Unit-energy root-raised-cosine impulse response.

    Length is ``span_symbols * samples_per_symbol + 1`` (odd, centered).
    The removable singularities at t = 0 and |t| = Tsym/(4 rolloff) are
    evaluated by their analytic limits.
    """
    if not 0.0 < rolloff <= 1.0:
        raise ValueError(f"rolloff must be in (0, 1], got {rolloff}")
    if span_symbols < 1 or samples_per_symbol < 1:
        raise ValueError("span_symbols and samples_per_symbol must be positive")
    n = span_symbols * samples_per_symbol + 1
    t = (np.arange(n) - (n - 1) // 2) / samples_per_symbol  # in symbol periods
    h = np.empty(n)
    singular = 1.0 / (4.0 * rolloff)
    for i, ti in enumerate(t):
        if abs(ti) < 1e-12:
            h[i] = 1.0 + rolloff * (4.0 / math.pi - 1.0)
        elif abs(abs(ti) - singular) < 1e-9:
            h[i] = (rolloff / math.sqrt(2.0)) * (
                (1.0 + 2.0 / math.pi) * math.sin(math.pi / (4.0 * rolloff))
                + (1.0 - 2.0 / math.pi) * math.cos(math.pi / (4.0 * rolloff))
            )
        else:
            h[i] = (
                math.sin(math.pi * ti * (1.0 - rolloff))
                + 4.0 * rolloff * ti * math.cos(math.pi * ti * (1.0 + rolloff))
            ) / (math.pi * ti * (1.0 - (4.0 * rolloff * ti) ** 2))
    return h / math.sqrt(np.sum(h**2))


# --- inverse complementary error function -------------------------------

# Acklam's rational approximation of the standard normal quantile,
# used only as the initial guess before Newton refinement on erfc.
_ACKLAM_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)


def _norm_quantile(p: float) -> float:
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1
        )
    if p > 1 - p_low:
        q = math.sqrt(-2 * math.log(1 - p))
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1
        )
    q = p - 0.5
    r = q * q
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
        ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1
    )


def erfc_inv(y: float) -> float:
    """Inverse complementary error function on (0, 2).

    Rational initial guess (normal quantile) refined by two Newton steps
    on erfc; accurate to well below 1e-10 over the BER-relevant range.
    """
    if not 0.0 < y < 2.0:
        raise ValueError(f"erfc_inv domain is (0, 2), got {y}")
    # erfc(x) = y  <=>  x = -quantile(y/2)/sqrt(2)
    x = -_norm_quantile(y / 2.0) / math.sqrt(2.0)
    for _ in range(2):
        err = math.erfc(x) - y
        x += err * math.sqrt(math.pi) / 2.0 * math.exp(x * x)
    return x


def q_from_ber(ber: float) -> float:
    """Q-factor in dB: 20 log10(sqrt(2) erfc_inv(2 BER))."""
    if not 0.0 < ber < 0.5:
        raise ValueError(f"ber must be in (0, 0.5), got {ber}")
    return 20.0 * math.log10(math.sqrt(2.0) * erfc_inv(2.0 * ber))


# --- the chain -----------------------------------------------------------


def _align_lag(equalized, symbols, sps, probe_start, probe_len, max_lag):
    """Data-aided integer-sample timing search around the nominal zero lag."""
    probe = symbols[probe_start : probe_start + probe_len]
    base = probe_start * sps
    best_metric, best_lag = -1.0, 0
    for lag in range(-max_lag, max_lag + 1):
        idx = base + lag + sps * np.arange(probe_len)
        cand = equalized[idx]
        metric = abs(np.vdot(cand, probe))
        if metric > best_metric + 1e-12 * best_metric:
            best_metric, best_lag = metric, lag
    return best_lag


def _guard_symbols(config: LinkConfig, spec: EqualizerSpec) -> int:
    """Edge symbols excluded from metrics (channel + filters + engine)."""
    sps = config.samples_per_symbol
    channel_memory = max_taps(config.system)
    guard_samples = (
        channel_memory // 2
        + transient_length(spec)
        + config.rrc_span_symbols * sps
    )
    return math.ceil(guard_samples / sps) + 8


def run_link(config: LinkConfig, equalizer: EqualizerSpec) -> SimResult:
    """Run the full chain once and measure BER, Q-factor, EVM, and RMPS."""
    _check_consistency(config, equalizer)
    sps = config.samples_per_symbol
    symbols, bits = generate_symbols(config)

    shaping = rrc_taps(config.rolloff, config.rrc_span_symbols, sps)
    upsampled = np.zeros(config.n_symbols * sps, dtype=np.complex128)
    upsampled[::sps] = symbols
    tx = fftconvolve(upsampled, shaping, mode="same")

    dispersed = apply_channel(tx, config.system)

    # complex AWGN calibrated so the matched-filter decision SNR is Es/N0
    rng = np.random.default_rng(config.seed)
    noise_var = 10.0 ** (-config.snr_db / 10.0)
    noise = math.sqrt(noise_var / 2.0) * (
        rng.standard_normal(len(dispersed)) + 1j * rng.standard_normal(len(dispersed))
    )
    received = fftconvolve(dispersed + noise, shaping, mode="same")

    equalized = equalize(received, equalizer)

    guard = min(_guard_symbols(config, equalizer), (config.n_symbols - 100) // 2)
    probe_len = min(4096, config.n_symbols - 2 * guard)
    max_lag = 4 * sps
    lag = _align_lag(equalized, symbols, sps, guard, probe_len, max_lag)

    keep = np.arange(guard, config.n_symbols - guard)
    estimates = equalized[keep * sps + lag]
    reference = symbols[keep]

    # single complex least-squares gain/phase correction on known data:
    # estimate the residual channel gain g (argmin ||est - g ref||^2) and
    # divide it out, which keeps the constellation scale unbiased in noise
    gain = np.vdot(reference, estimates) / np.vdot(reference, reference)
    estimates = estimates / gain

    decided_bits = demap_symbols(estimates, config.modulation)
    bps = config.bits_per_symbol
    sent_bits = bits.reshape(-1, bps)[keep].reshape(-1)
    n_errors = int(np.sum(decided_bits != sent_bits))
    n_bits = len(sent_bits)
    ber = n_errors / n_bits

    evm = 100.0 * math.sqrt(
        float(np.mean(np.abs(estimates - reference) ** 2))
        / float(np.mean(np.abs(reference) ** 2))
    )

    if n_errors == 0:
        q_db = math.inf
    elif ber >= 0.5:
        q_db = -math.inf
    else:
        q_db = q_from_ber(ber)

    return SimResult(
        ber=ber,
        q_db=q_db,
        evm_percent=evm,
        rmps=complexity.report_for(equalizer).rmps,
        n_bit_errors=n_errors,
        n_bits=n_bits,
    )


def _check_consistency(config: LinkConfig, spec: EqualizerSpec) -> None:
    expected_t = 1.0 / (config.baud * config.samples_per_symbol)
    if abs(config.system.sampling_period - expected_t) > 1e-6 * expected_t:
        raise ValueError(
            "system.sampling_period does not match 1/(baud*samples_per_symbol)"
        )
    engine_params = spec.params if isinstance(spec, FreqDomain) else spec.taps.params
    if engine_params != config.system:
        raise ValueError("equalizer was built for different system parameters")
