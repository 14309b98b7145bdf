"""Chromatic-dispersion FIR tap generation and the linear CD channel model.

The dispersive fiber channel is an all-pass filter with quadratic spectral
phase.  Its time-domain inverse is a finite chirp whose taps all lie on a
circle in the complex plane; the tap count is capped by the Nyquist bound
of the sampling grid.  This module generates those taps, evaluates the
analytic transfer function, and forward-propagates sample streams through
the simulated channel.

All quantities are SI internally (s/m^2, m, s).  Engineering units
(ps/nm/km, nm, km, baud) are converted once at construction time.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

#: Exact vacuum speed of light [m/s].
LIGHT_SPEED = 299_792_458.0


@dataclass(frozen=True)
class SystemParams:
    """Physical link constants from which taps and responses are derived.

    Parameters
    ----------
    dispersion : float
        Fiber CD coefficient in s/m^2 (1 ps/(nm km) = 1e-6 s/m^2).
    wavelength : float
        Central wavelength in meters.
    fiber_length : float
        Link length in meters.
    sampling_period : float
        Sample spacing of the digital signal in seconds.
    light_speed : float, optional
        Speed of light in m/s.  Defaults to the exact constant; set to
        3e8 to reproduce textbook tap counts computed with the rounded
        value.
    """

    dispersion: float
    wavelength: float
    fiber_length: float
    sampling_period: float
    light_speed: float = LIGHT_SPEED

    def __post_init__(self):
        if self.dispersion == 0:
            raise ValueError("dispersion must be nonzero")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if self.fiber_length <= 0:
            raise ValueError("fiber_length must be positive")
        if self.sampling_period <= 0:
            raise ValueError("sampling_period must be positive")
        if self.light_speed <= 0:
            raise ValueError("light_speed must be positive")

    @classmethod
    def from_engineering(
        cls,
        dispersion_ps_nm_km: float,
        wavelength_nm: float,
        fiber_length_km: float,
        baud: float,
        samples_per_symbol: int = 2,
        light_speed: float = LIGHT_SPEED,
    ) -> "SystemParams":
        """Build from engineering units; T is derived as 1/(baud*sps)."""
        if baud <= 0 or samples_per_symbol <= 0:
            raise ValueError("baud and samples_per_symbol must be positive")
        return cls(
            dispersion=dispersion_ps_nm_km * 1e-6,
            wavelength=wavelength_nm * 1e-9,
            fiber_length=fiber_length_km * 1e3,
            sampling_period=1.0 / (baud * samples_per_symbol),
            light_speed=light_speed,
        )

    @property
    def quadratic_phase_rate(self) -> float:
        """Coefficient b in the channel phase b*w^2 [s^2/rad]."""
        return (
            self.dispersion
            * self.wavelength**2
            * self.fiber_length
            / (4 * math.pi * self.light_speed)
        )


@dataclass(frozen=True)
class TapProfile:
    """A symmetric complex FIR tap sequence indexed k = -(N-1)/2 ... +(N-1)/2."""

    taps: np.ndarray
    n_taps: int
    params: SystemParams

    def __post_init__(self):
        if self.n_taps % 2 == 0 or self.n_taps < 1:
            raise ValueError("n_taps must be odd and positive")
        if len(self.taps) != self.n_taps:
            raise ValueError("taps length must equal n_taps")
        self.taps.flags.writeable = False

    @property
    def half_span(self) -> int:
        return (self.n_taps - 1) // 2

    @property
    def k_indices(self) -> np.ndarray:
        return np.arange(self.n_taps) - self.half_span


def max_taps(params: SystemParams) -> int:
    """Largest odd tap count supported by the sampling grid (Nyquist bound).

    Returns 2*floor(|D| lam^2 z / (2 c T^2)) + 1, always odd and >= 1.
    """
    ratio = (
        abs(params.dispersion)
        * params.wavelength**2
        * params.fiber_length
        / (2 * params.light_speed * params.sampling_period**2)
    )
    return 2 * math.floor(ratio) + 1


def generate_taps(params: SystemParams, n_taps: int) -> TapProfile:
    """Generate the dispersion-compensating FIR taps.

    taps[k] = sqrt(j c T^2 / (D lam^2 z)) * exp(-j pi c T^2 / (D lam^2 z) k^2)
    for centered k, principal branch of the complex square root.

    Parameters
    ----------
    params : SystemParams
    n_taps : int
        Odd tap count, at most ``max_taps(params)``; larger filters would
        exceed the Nyquist group-delay range and alias.
    """
    if n_taps % 2 == 0:
        raise ValueError(f"n_taps must be odd, got {n_taps}")
    if n_taps < 1:
        raise ValueError(f"n_taps must be positive, got {n_taps}")
    bound = max_taps(params)
    if n_taps > bound:
        raise ValueError(f"n_taps={n_taps} exceeds Nyquist bound max_taps={bound}")
    rate = (
        params.light_speed
        * params.sampling_period**2
        / (params.dispersion * params.wavelength**2 * params.fiber_length)
    )
    half = (n_taps - 1) // 2
    # k**2 is exact for +/-k, so index symmetry about the center is bit-exact
    k = np.arange(-half, half + 1, dtype=np.float64)
    taps = np.sqrt(1j * rate) * np.exp(-1j * math.pi * rate * k**2)
    return TapProfile(taps=taps, n_taps=n_taps, params=params)


def cd_frequency_response(
    params: SystemParams, angular_freqs: np.ndarray, inverse: bool = False
) -> np.ndarray:
    """All-pass quadratic-phase response exp(+j b w^2) on the given rad/s grid.

    With ``inverse=False`` this is the compensating response whose sampled
    IDFT reproduces ``generate_taps``; ``inverse=True`` conjugates the
    phase and yields the response the physical channel applies.
    """
    w = np.asarray(angular_freqs, dtype=np.float64)
    phase = params.quadratic_phase_rate * w**2
    if inverse:
        phase = -phase
    return np.exp(1j * phase)


def apply_channel(
    signal: np.ndarray, params: SystemParams, mode: str = "circular"
) -> np.ndarray:
    """Propagate a sampled waveform through the linear CD channel.

    The applied spectral phase is the conjugate of the compensation
    response, so ``generate_taps`` output is the channel's time-domain
    inverse (round-trip identity on the non-transient region).

    Parameters
    ----------
    signal : complex ndarray
        Baseband samples at ``params.sampling_period`` spacing.
    mode : {"circular", "padded"}
        "circular" applies the response on the signal's own DFT grid and
        preserves total energy exactly (wrap-around lands in the edge
        transient region).  "padded" zero-pads to the next power of two
        >= 2*len(signal) before transforming, trading exact energy
        conservation for a wrap-free linear convolution.
    """
    x = np.asarray(signal)
    if x.size == 0:
        raise ValueError("signal must be non-empty")
    n = len(x)
    if mode == "circular":
        nfft = n
    elif mode == "padded":
        nfft = 1 << max(1, (2 * n - 1).bit_length())
    else:
        raise ValueError(f"unknown mode {mode!r}")
    w = 2 * math.pi * np.fft.fftfreq(nfft, d=params.sampling_period)
    resp = cd_frequency_response(params, w, inverse=True)
    out = np.fft.ifft(np.fft.fft(x, nfft) * resp)
    return out[:n]


def write_taps_csv(profile: TapProfile, path) -> None:
    """Export taps as CSV rows ``k,re,im`` with k centered on zero."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "re", "im"])
        for k, tap in zip(profile.k_indices, profile.taps):
            writer.writerow([k, f"{tap.real:.17g}", f"{tap.imag:.17g}"])
