"""Grid search over the soft-decision weights and performance sweeps.

The (alpha, eta) pair of the fuzzy-clustered engine is tuned by exhaustive
deterministic grid evaluation, each point averaged over a small seed set;
ties break toward smaller eta, then larger alpha (less fuzziness at equal
quality).  ``sweep`` produces the Q-vs-parameter curves for any engine
family, attaching the closed-form RMPS to every point.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import complexity
from .cd_model import generate_taps, max_taps
from .clustering import kmeans, fuzzify
from .equalizers import Clustered, DirectFir, FreqDomain, FuzzyClustered
from .link_sim import LinkConfig, run_link

DEFAULT_SEEDS = (0, 1, 2)
DEFAULT_WEIGHT_GRID = tuple(np.round(np.linspace(0.5, 1.0, 11), 3))
DEFAULT_CLUSTER_SEED = 12345


@dataclass(frozen=True)
class OptResult:
    alpha: float
    eta: float
    q_db: float
    per_seed_q: tuple


@dataclass(frozen=True)
class SweepPoint:
    param: int
    q_mean: float
    q_std: float
    rmps: float
    alpha: Optional[float] = None
    eta: Optional[float] = None
    per_seed_q: tuple = ()
    per_seed_ber: tuple = ()
    per_seed_evm: tuple = ()


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: an engine family evaluated over a sorted parameter grid."""

    family: str  # direct | clustered | fuzzy | fd
    grid: tuple
    link: LinkConfig
    seeds: tuple = DEFAULT_SEEDS
    n_taps: Optional[int] = None  # tap profile for the clustered families
    alpha_grid: tuple = DEFAULT_WEIGHT_GRID
    eta_grid: tuple = DEFAULT_WEIGHT_GRID
    alpha: float = 0.7  # fixed weights when no per-point optimization runs
    eta: float = 0.8
    optimize: bool = True  # grid-optimize (alpha, eta) per fuzzy point
    cluster_seed: int = DEFAULT_CLUSTER_SEED
    fd_mode: str = "analytic"
    n_jobs: int = 1

    def __post_init__(self):
        if self.family not in ("direct", "clustered", "fuzzy", "fd"):
            raise ValueError(f"unknown engine family {self.family!r}")
        if len(self.grid) == 0:
            raise ValueError("parameter grid must be non-empty")
        if list(self.grid) != sorted(self.grid):
            raise ValueError("parameter grid must be sorted ascending")
        if len(self.seeds) == 0:
            raise ValueError("seed set must be non-empty")
        for name, grid, lo in (
            ("alpha_grid", self.alpha_grid, 0.5),
            # an eta below 0.5 is meaningful: it turns every entry hard
            ("eta_grid", self.eta_grid, 0.0),
        ):
            if len(grid) == 0:
                raise ValueError(f"{name} must be non-empty")
            if list(grid) != sorted(grid):
                raise ValueError(f"{name} must be sorted ascending")
            if min(grid) < lo or max(grid) > 1.0:
                raise ValueError(f"{name} must lie within [{lo}, 1]")


def build_equalizer(
    family: str,
    param: int,
    link: LinkConfig,
    n_taps: Optional[int] = None,
    alpha: float = 0.7,
    eta: float = 0.8,
    cluster_seed: int = DEFAULT_CLUSTER_SEED,
    fd_mode: str = "analytic",
):
    """Construct the engine a sweep point describes.

    ``param`` is the swept quantity: tap count (direct), cluster count
    (clustered/fuzzy), or FFT size (fd).
    """
    system = link.system
    if family == "direct":
        return DirectFir(taps=generate_taps(system, param))
    if family == "fd":
        taps = None
        if fd_mode == "taps":
            taps = generate_taps(system, n_taps or max_taps(system))
        return FreqDomain(fft_size=param, params=system, mode=fd_mode, taps=taps)
    taps = generate_taps(system, n_taps or max_taps(system))
    plan = kmeans(taps.taps, param, seed=cluster_seed)
    if family == "clustered":
        return Clustered(plan=plan, taps=taps)
    fuzzy = fuzzify(plan, taps.taps, eta)
    return FuzzyClustered(plan=fuzzy, taps=taps, alpha=alpha)


def _run_seeds(config: LinkConfig, spec, seeds: Sequence[int]) -> list:
    return [run_link(replace(config, seed=s), spec) for s in seeds]


def optimize_alpha_eta(
    config: LinkConfig,
    n_clusters: int,
    alpha_grid: Sequence[float] = DEFAULT_WEIGHT_GRID,
    eta_grid: Sequence[float] = DEFAULT_WEIGHT_GRID,
    seeds: Sequence[int] = DEFAULT_SEEDS,
    n_taps: Optional[int] = None,
    cluster_seed: int = DEFAULT_CLUSTER_SEED,
) -> OptResult:
    """Exhaustive (alpha, eta) grid search maximizing the seed-averaged Q.

    Deterministic: every grid point is evaluated, and ties prefer the
    smaller eta, then the larger alpha.
    """
    if len(alpha_grid) == 0 or len(eta_grid) == 0:
        raise ValueError("alpha/eta grids must be non-empty")
    system = config.system
    taps = generate_taps(system, n_taps or max_taps(system))
    plan = kmeans(taps.taps, n_clusters, seed=cluster_seed)
    results = []
    for eta in eta_grid:
        fuzzy = fuzzify(plan, taps.taps, eta)
        for alpha in alpha_grid:
            spec = FuzzyClustered(plan=fuzzy, taps=taps, alpha=alpha)
            runs = _run_seeds(config, spec, seeds)
            qs = tuple(r.q_db for r in runs)
            results.append(
                OptResult(alpha=alpha, eta=eta, q_db=float(np.mean(qs)), per_seed_q=qs)
            )
    return max(results, key=lambda r: (r.q_db, -r.eta, r.alpha))


def _eval_point(args) -> SweepPoint:
    spec, param = args
    engine_kwargs = dict(
        n_taps=spec.n_taps,
        alpha=spec.alpha,
        eta=spec.eta,
        cluster_seed=spec.cluster_seed,
        fd_mode=spec.fd_mode,
    )
    if spec.family == "fuzzy" and spec.optimize:
        best = optimize_alpha_eta(
            spec.link,
            param,
            alpha_grid=spec.alpha_grid,
            eta_grid=spec.eta_grid,
            seeds=spec.seeds,
            n_taps=spec.n_taps,
            cluster_seed=spec.cluster_seed,
        )
        alpha, eta = best.alpha, best.eta
        engine_kwargs.update(alpha=alpha, eta=eta)
    else:
        alpha = spec.alpha if spec.family == "fuzzy" else None
        eta = spec.eta if spec.family == "fuzzy" else None
    engine = build_equalizer(spec.family, param, spec.link, **engine_kwargs)
    runs = _run_seeds(spec.link, engine, spec.seeds)
    qs = tuple(r.q_db for r in runs)
    return SweepPoint(
        param=param,
        q_mean=float(np.mean(qs)),
        q_std=float(np.std(qs)),
        rmps=_rmps_for(spec, param),
        alpha=alpha,
        eta=eta,
        per_seed_q=qs,
        per_seed_ber=tuple(r.ber for r in runs),
        per_seed_evm=tuple(r.evm_percent for r in runs),
    )


def _rmps_for(spec: SweepSpec, param: int) -> float:
    if spec.family == "direct":
        return complexity.rmps_td(param)
    if spec.family == "fd":
        return complexity.rmps_fd(param)
    return complexity.rmps_clustered(param)


def sweep(spec: SweepSpec) -> list:
    """Evaluate every grid point; returns SweepPoints in grid order."""
    tasks = [(spec, param) for param in spec.grid]
    if spec.n_jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=spec.n_jobs) as pool:
            points = list(pool.map(_eval_point, tasks))
    else:
        points = [_eval_point(t) for t in tasks]
    return points


def threshold_crossing(points, q_target: float) -> Optional[int]:
    """Smallest swept parameter whose mean Q reaches the target."""
    for p in points:
        if p.q_mean >= q_target:
            return p.param
    return None
