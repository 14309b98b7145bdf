import numpy as np
import pytest

from disperse import SystemParams, generate_taps

#: Link constants used throughout: D = 17 ps/nm/km, 1550 nm, 1800 km,
#: 20 GBd at 2 samples/symbol (T = 25 ps), rounded speed of light.
BENCH = dict(
    dispersion_ps_nm_km=17.0,
    wavelength_nm=1550.0,
    fiber_length_km=1800.0,
    baud=20e9,
    samples_per_symbol=2,
    light_speed=3e8,
)


@pytest.fixture(scope="session")
def bench_params() -> SystemParams:
    return SystemParams.from_engineering(**BENCH)


@pytest.fixture(scope="session")
def bench_taps_273(bench_params):
    return generate_taps(bench_params, 273)


@pytest.fixture(scope="session")
def bench_taps_full(bench_params):
    return generate_taps(bench_params, 393)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240917)
