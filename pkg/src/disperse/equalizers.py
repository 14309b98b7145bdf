"""The four CDC engines: direct FIR, hard-clustered, fuzzy-clustered, FD.

All engines consume a complex sample stream (2 samples/symbol in the link
chain) and produce an equalized stream of the same length, aligned to the
center tap ("same" convolution).  The first and last ``(N-1)//2`` output
samples of the time-domain engines are edge transients computed against
zero padding and should be excluded from metrics.

The clustered engines implement the accumulate-then-multiply structure:
for every output sample the input samples are first summed per tap
cluster (soft taps contribute to their two nearest clusters with weights
alpha and 1-alpha), and each cluster sum is then multiplied by its single
centroid tap.  The per-cluster accumulators are evaluated as convolutions
with sparse indicator kernels, which keeps the arithmetic structure of
the engine while staying fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import fft as sfft

from .cd_model import SystemParams, TapProfile, cd_frequency_response
from .clustering import ClusterPlan, FuzzyPlan, HardEntry


@dataclass(frozen=True)
class DirectFir:
    """Plain linear convolution with the full tap profile."""

    taps: TapProfile


@dataclass(frozen=True)
class Clustered:
    """Hard-clustered engine: one multiplication per cluster and sample."""

    plan: ClusterPlan
    taps: TapProfile

    def __post_init__(self):
        if len(self.plan.assignment) != self.taps.n_taps:
            raise ValueError("plan/taps mismatch: different tap count")


@dataclass(frozen=True)
class FuzzyClustered:
    """Fuzzy-clustered engine with fixed soft weights alpha and 1-alpha."""

    plan: FuzzyPlan
    taps: TapProfile
    alpha: float

    def __post_init__(self):
        if len(self.plan.entries) != self.taps.n_taps:
            raise ValueError("plan/taps mismatch: different tap count")
        if not 0.5 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0.5, 1], got {self.alpha}")


@dataclass(frozen=True)
class FreqDomain:
    """Overlap-save FFT engine with 50% overlap.

    mode "analytic" samples the compensating response directly on the DFT
    grid; mode "taps" transforms a zero-padded TapProfile, which makes the
    engine exactly equivalent to the direct FIR (used for cross-checks).
    """

    fft_size: int
    params: SystemParams
    mode: str = "analytic"
    taps: Optional[TapProfile] = None

    def __post_init__(self):
        n = self.fft_size
        if n < 2 or n & (n - 1):
            raise ValueError(f"fft_size must be a power of two, got {n}")
        if self.mode not in ("analytic", "taps"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "taps":
            if self.taps is None:
                raise ValueError("taps mode requires a TapProfile")
            if self.fft_size // 2 < self.taps.n_taps:
                raise ValueError(
                    f"fft_size={self.fft_size} too small for {self.taps.n_taps} taps "
                    "(need fft_size/2 >= n_taps)"
                )


EqualizerSpec = Union[DirectFir, Clustered, FuzzyClustered, FreqDomain]


def transient_length(spec: EqualizerSpec) -> int:
    """Edge-transient half-width of an engine's output, in samples."""
    if isinstance(spec, (DirectFir, Clustered, FuzzyClustered)):
        return spec.taps.half_span
    return spec.fft_size // 4


def _check_signal(signal) -> np.ndarray:
    x = np.asarray(signal, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("signal must be a non-empty 1-D complex sequence")
    return x


def equalize_direct(signal, taps: TapProfile) -> np.ndarray:
    """Linear 'same' convolution of the signal with the full tap profile."""
    x = _check_signal(signal)
    if len(x) < taps.n_taps:
        raise ValueError(
            f"signal length {len(x)} shorter than tap count {taps.n_taps}"
        )
    n = taps.n_taps
    nfft = sfft.next_fast_len(len(x) + n - 1)
    spec = sfft.fft(x, nfft) * sfft.fft(taps.taps, nfft)
    full = sfft.ifft(spec)
    half = taps.half_span
    return full[half : half + len(x)]


def _cluster_kernels(spec) -> np.ndarray:
    """Per-cluster accumulation weights over the tap index, shape (N_c, N)."""
    if isinstance(spec, Clustered):
        n_c = spec.plan.n_clusters
        kernels = np.zeros((n_c, spec.taps.n_taps))
        kernels[spec.plan.assignment, np.arange(spec.taps.n_taps)] = 1.0
    else:
        n_c = spec.plan.n_clusters
        kernels = np.zeros((n_c, spec.taps.n_taps))
        for k, entry in enumerate(spec.plan.entries):
            if isinstance(entry, HardEntry):
                kernels[entry.cluster, k] = 1.0
            else:
                kernels[entry.nearest, k] += spec.alpha
                kernels[entry.second, k] += 1.0 - spec.alpha
    return kernels


def _accumulate_and_combine(x, kernels, centroids) -> np.ndarray:
    """Per-cluster accumulator streams, each multiplied by its centroid.

    Accumulation order is fixed for reproducible floating point: taps in
    ascending index within each cluster, clusters combined in ascending
    index.  Unit weights are added without scaling so an all-hard fuzzy
    plan is bit-identical to the hard-clustered path.
    """
    n_clusters, n = kernels.shape
    half = (n - 1) // 2
    length = len(x)
    padded = np.zeros(length + n - 1, dtype=np.complex128)
    padded[half : half + length] = x
    out = np.zeros(length, dtype=np.complex128)
    acc = np.empty(length, dtype=np.complex128)
    for c in range(n_clusters):
        weights = kernels[c]
        acc[:] = 0
        for k in np.nonzero(weights)[0]:
            segment = padded[n - 1 - k : n - 1 - k + length]
            if weights[k] == 1.0:
                acc += segment
            else:
                acc += weights[k] * segment
        out += centroids[c] * acc
    return out


def equalize_clustered(signal, plan: ClusterPlan, taps: TapProfile) -> np.ndarray:
    """Hard-clustered equalization: cluster sums times centroid taps."""
    spec = Clustered(plan=plan, taps=taps)
    x = _check_signal(signal)
    if len(x) < taps.n_taps:
        raise ValueError(
            f"signal length {len(x)} shorter than tap count {taps.n_taps}"
        )
    return _accumulate_and_combine(x, _cluster_kernels(spec), plan.centroids)


def equalize_fuzzy(
    signal, plan: FuzzyPlan, taps: TapProfile, alpha: float
) -> np.ndarray:
    """Fuzzy-clustered equalization.

    Hard taps accumulate into their own cluster; soft taps accumulate into
    their nearest cluster with weight ``alpha`` and their second-nearest
    with ``1 - alpha``.  Each cluster accumulator is then multiplied by
    its centroid tap, exactly one complex product per cluster and sample.
    """
    spec = FuzzyClustered(plan=plan, taps=taps, alpha=alpha)
    x = _check_signal(signal)
    if len(x) < taps.n_taps:
        raise ValueError(
            f"signal length {len(x)} shorter than tap count {taps.n_taps}"
        )
    return _accumulate_and_combine(x, _cluster_kernels(spec), plan.centroids)


def equalize_fd(signal, spec: FreqDomain) -> np.ndarray:
    """Overlap-save block equalization with 50% overlap.

    Each fft_size block is transformed, multiplied by the equalizer
    response, inverse-transformed, and only the central (valid) half is
    kept, so blocks advance by fft_size/2 samples.
    """
    x = _check_signal(signal)
    n = spec.fft_size
    step = n // 2
    quarter = n // 4

    if spec.mode == "analytic":
        w = 2 * math.pi * np.fft.fftfreq(n, d=spec.params.sampling_period)
        response = cd_frequency_response(spec.params, w, inverse=False)
    else:
        taps = spec.taps
        kernel = np.zeros(n, dtype=np.complex128)
        half = taps.half_span
        kernel[: half + 1] = taps.taps[half:]
        if half:
            kernel[-half:] = taps.taps[:half]
        response = np.fft.fft(kernel)

    n_blocks = -(-len(x) // step)  # ceil
    padded = np.zeros(quarter + n_blocks * step + n, dtype=np.complex128)
    padded[quarter : quarter + len(x)] = x
    out = np.empty(n_blocks * step, dtype=np.complex128)
    for b in range(n_blocks):
        block = padded[b * step : b * step + n]
        y = np.fft.ifft(np.fft.fft(block) * response)
        out[b * step : (b + 1) * step] = y[quarter : quarter + step]
    return out[: len(x)]


def equalize(signal, spec: EqualizerSpec) -> np.ndarray:
    """Run whichever engine the spec describes."""
    if isinstance(spec, DirectFir):
        return equalize_direct(signal, spec.taps)
    if isinstance(spec, Clustered):
        return equalize_clustered(signal, spec.plan, spec.taps)
    if isinstance(spec, FuzzyClustered):
        return equalize_fuzzy(signal, spec.plan, spec.taps, spec.alpha)
    if isinstance(spec, FreqDomain):
        return equalize_fd(signal, spec)
    raise TypeError(f"unknown equalizer spec {type(spec).__name__}")
