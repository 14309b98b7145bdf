"""Command-line interface: design, cluster, complexity, simulate, sweep, optimize.

Batch, non-interactive.  Every invocation writes its outputs under --out
together with a ``manifest.json`` (resolved config snapshot, seeds, tool
version, timestamps); each output file gets a ``<name>.meta.json``
sidecar referencing that manifest.  CSV numbers are serialized with 17
significant digits so re-running a manifest reproduces byte-identical
files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import numpy as np

from . import __version__, complexity, config as cfgmod, hyperopt, svgplot
from .cd_model import generate_taps, max_taps, write_taps_csv
from .clustering import SoftEntry, fuzzify, kmeans
from .link_sim import run_link


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


class _Run:
    """Collects outputs and writes the manifest + sidecars at the end."""

    def __init__(self, args, resolved_cfg: dict):
        self.out_dir = args.out
        os.makedirs(self.out_dir, exist_ok=True)
        self.manifest = {
            "subcommand": args.command,
            "config": dict(sorted(resolved_cfg.items())),
            "tool_version": __version__,
            "seed_set": [],
            "outputs": [],
            "started": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "finished": None,
        }

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def register(self, name: str) -> str:
        self.manifest["outputs"].append(name)
        return self.path(name)

    def finish(self) -> None:
        self.manifest["finished"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        manifest_path = self.path("manifest.json")
        with open(manifest_path, "w") as fh:
            json.dump(self.manifest, fh, indent=2)
        for name in self.manifest["outputs"]:
            with open(self.path(name) + ".meta.json", "w") as fh:
                json.dump({"manifest": "manifest.json", "output": name}, fh, indent=2)


def _resolved_config(args) -> dict:
    cfg = cfgmod.load_config(args.config)
    for item in args.set or []:
        if "=" not in item:
            raise cfgmod.ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        cfg[key.strip()] = value.strip()
    if args.seed is not None:
        cfg["seed"] = str(args.seed)
    return cfg


def _seed_list(args, cfg) -> list:
    n = cfgmod._get_int(cfg, "n_seeds", 3)
    base = cfgmod._get_int(cfg, "seed", 0)
    return [base + i for i in range(n)]


def cmd_design(args) -> int:
    cfg = _resolved_config(args)
    system = cfgmod.system_from_config(cfg)
    n_max = max_taps(system)
    n_taps = args.n_taps or cfgmod._get_int(cfg, "n_taps", n_max)
    profile = generate_taps(system, n_taps)
    run = _Run(args, cfg)
    write_taps_csv(profile, run.register("taps.csv"))
    magnitude = float(np.abs(profile.taps[0]))
    energy = float(np.sum(np.abs(profile.taps) ** 2))
    print(f"N_max = {n_max}")
    print(f"n_taps = {n_taps}  |g| = {magnitude:.6g}  sum|g|^2 = {energy:.6g}")
    run.finish()
    return 0


def cmd_cluster(args) -> int:
    cfg = _resolved_config(args)
    system = cfgmod.system_from_config(cfg)
    eng = cfgmod.engine_settings(cfg, system)
    profile = generate_taps(system, args.n_taps or eng["n_taps"])
    plan = kmeans(profile.taps, eng["n_clusters"], seed=eng["cluster_seed"])
    fuzzy = fuzzify(plan, profile.taps, eng["eta"])
    run = _Run(args, cfg)
    with open(run.register("fuzzy_plan.json"), "w") as fh:
        fh.write(fuzzy.to_json())
    if args.svg:
        soft = [isinstance(e, SoftEntry) for e in fuzzy.entries]
        svg = svgplot.scatter_svg(
            profile.taps, fuzzy.centroids, soft, title="tap clusters"
        )
        with open(run.register("clusters.svg"), "w") as fh:
            fh.write(svg)
    print(
        f"n_clusters = {plan.n_clusters}  sse = {plan.sse:.6g}  "
        f"soft fraction = {fuzzy.soft_fraction:.4f}"
    )
    run.finish()
    return 0


def cmd_complexity(args) -> int:
    cfg = _resolved_config(args)
    rows = []
    td = cfgmod._get_int(cfg, "td_taps", 273)
    hard = cfgmod._get_int(cfg, "hard_clusters", 26)
    fuzzy = cfgmod._get_int(cfg, "fuzzy_clusters", 12)
    fft = cfgmod._get_int(cfg, "fft_size", 512)
    rows.append(("direct", td, complexity.rmps_td(td), "Karatsuba;symmetric folding"))
    rows.append(("clustered", hard, complexity.rmps_clustered(hard), "Karatsuba"))
    rows.append(
        ("fuzzy", fuzzy, complexity.rmps_clustered(fuzzy), "Karatsuba;soft weights in LUT")
    )
    rows.append(("fd", fft, complexity.rmps_fd(fft), "Karatsuba;radix-2;50% overlap"))
    run = _Run(args, cfg)
    _write_csv(run.register("complexity.csv"), ["engine", "parameter", "rmps", "assumptions"], rows)
    for engine, param, rmps, _ in rows:
        print(f"{engine:10s} {param:6d}  rmps = {rmps:.6g}")
    run.finish()
    return 0


def _sim_row(engine_name, param, eng, link, result):
    n_clusters = param if engine_name in ("clustered", "fuzzy") else ""
    eta = eng["eta"] if engine_name == "fuzzy" else ""
    alpha = eng["alpha"] if engine_name == "fuzzy" else ""
    return (
        engine_name,
        param,
        n_clusters,
        eta,
        alpha,
        link.snr_db,
        result.ber,
        result.q_db,
        result.evm_percent,
        result.rmps,
        link.seed,
    )


_SIM_HEADER = [
    "engine", "param", "n_clusters", "eta", "alpha", "snr_db",
    "ber", "q_db", "evm_percent", "rmps", "seed",
]


def _engine_param(eng: dict) -> int:
    name = eng["engine"]
    if name == "direct":
        return eng["n_taps"]
    if name == "fd":
        return eng["fft_size"]
    return eng["n_clusters"]


def cmd_simulate(args) -> int:
    cfg = _resolved_config(args)
    link = cfgmod.link_from_config(cfg)
    eng = cfgmod.engine_settings(cfg, link.system)
    spec = hyperopt.build_equalizer(
        eng["engine"],
        _engine_param(eng),
        link,
        n_taps=eng["n_taps"],
        alpha=eng["alpha"],
        eta=eng["eta"],
        cluster_seed=eng["cluster_seed"],
        fd_mode=eng["fd_mode"],
    )
    result = run_link(link, spec)
    run = _Run(args, cfg)
    run.manifest["seed_set"] = [link.seed]
    rows = [_sim_row(eng["engine"], _engine_param(eng), eng, link, result)]
    _write_csv(run.register("simulate.csv"), _SIM_HEADER, rows)
    print(
        f"engine={eng['engine']} ber={result.ber:.3e} q={result.q_db:.3f} dB "
        f"evm={result.evm_percent:.2f}% rmps={result.rmps:.6g}"
    )
    run.finish()
    return 0


def _parse_grid(text: str) -> tuple:
    try:
        values = tuple(int(v) for v in text.replace(",", " ").split())
    except ValueError as exc:
        raise cfgmod.ConfigError(f"bad grid {text!r}: {exc}") from exc
    if not values:
        raise cfgmod.ConfigError("grid must be non-empty")
    return values


def _parse_float_grid(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(",", " ").split())


def cmd_sweep(args) -> int:
    cfg = _resolved_config(args)
    link = cfgmod.link_from_config(cfg)
    eng = cfgmod.engine_settings(cfg, link.system)
    family = args.family or eng["engine"]
    grid = _parse_grid(args.grid or cfgmod._require(cfg, "grid"))
    seeds = tuple(_seed_list(args, cfg))
    spec = hyperopt.SweepSpec(
        family=family,
        grid=grid,
        link=link,
        seeds=seeds,
        n_taps=eng["n_taps"],
        alpha=eng["alpha"],
        eta=eng["eta"],
        alpha_grid=_parse_float_grid(cfg.get("alpha_grid", "")) or hyperopt.DEFAULT_WEIGHT_GRID,
        eta_grid=_parse_float_grid(cfg.get("eta_grid", "")) or hyperopt.DEFAULT_WEIGHT_GRID,
        optimize=cfg.get("optimize", "yes").lower() not in ("no", "false", "0"),
        cluster_seed=eng["cluster_seed"],
        fd_mode=eng["fd_mode"],
        n_jobs=args.jobs,
    )
    points = hyperopt.sweep(spec)
    run = _Run(args, cfg)
    run.manifest["seed_set"] = list(seeds)
    rows = []
    for p in points:
        for seed, q, ber, evm in zip(seeds, p.per_seed_q, p.per_seed_ber,
                                     p.per_seed_evm):
            rows.append(
                (
                    family, p.param,
                    p.param if family in ("clustered", "fuzzy") else "",
                    p.eta if p.eta is not None else "",
                    p.alpha if p.alpha is not None else "",
                    link.snr_db, ber, q, evm, p.rmps, seed,
                )
            )
    _write_csv(run.register("sweep.csv"), _SIM_HEADER, rows)
    summary_rows = [
        (p.param, p.q_mean, p.q_std, p.rmps,
         p.alpha if p.alpha is not None else "",
         p.eta if p.eta is not None else "")
        for p in points
    ]
    _write_csv(
        run.register("sweep_summary.csv"),
        ["param", "q_mean_db", "q_std_db", "rmps", "alpha", "eta"],
        summary_rows,
    )
    if args.svg:
        svg = svgplot.line_plot_svg(
            [p.param for p in points],
            [p.q_mean for p in points],
            "Q (dB)",
            y_right=[p.rmps for p in points],
            right_label="RMPS",
            title=f"{family} sweep",
        )
        with open(run.register("sweep.svg"), "w") as fh:
            fh.write(svg)
    for p in points:
        print(f"param={p.param:6d} q={p.q_mean:7.3f} ± {p.q_std:.3f} dB rmps={p.rmps:.6g}")
    run.finish()
    return 0


def cmd_optimize(args) -> int:
    cfg = _resolved_config(args)
    link = cfgmod.link_from_config(cfg)
    eng = cfgmod.engine_settings(cfg, link.system)
    seeds = tuple(_seed_list(args, cfg))
    alpha_grid = _parse_float_grid(cfg.get("alpha_grid", "")) or hyperopt.DEFAULT_WEIGHT_GRID
    eta_grid = _parse_float_grid(cfg.get("eta_grid", "")) or hyperopt.DEFAULT_WEIGHT_GRID
    best = hyperopt.optimize_alpha_eta(
        link,
        eng["n_clusters"],
        alpha_grid=alpha_grid,
        eta_grid=eta_grid,
        seeds=seeds,
        n_taps=eng["n_taps"],
        cluster_seed=eng["cluster_seed"],
    )
    run = _Run(args, cfg)
    run.manifest["seed_set"] = list(seeds)
    rows = [
        (
            "fuzzy", eng["n_clusters"], eng["n_clusters"], best.eta, best.alpha,
            link.snr_db, "", best.q_db, "",
            complexity.rmps_clustered(eng["n_clusters"]), ";".join(map(str, seeds)),
        )
    ]
    header = _SIM_HEADER[:-1] + ["seeds"]
    _write_csv(run.register("optimize.csv"), header + ["is_optimum"],
               [r + (1,) for r in rows])
    print(f"alpha* = {best.alpha}  eta* = {best.eta}  q* = {best.q_db:.3f} dB")
    run.finish()
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disperse",
        description="Chromatic-dispersion compensation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file "
                       f"(default: ${cfgmod.ENV_DEFAULT_CONFIG})")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers for sweeps")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--svg", action="store_true", help="also write SVG plots")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key")

    p = sub.add_parser("design", help="generate CD compensation taps")
    common(p)
    p.add_argument("--n-taps", type=int, help="tap count (default: N_max)")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("cluster", help="fit K-means + fuzzy plan on the taps")
    common(p)
    p.add_argument("--n-taps", type=int)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("complexity", help="RMPS table for the four engines")
    common(p)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("simulate", help="run one simulated link")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Q vs parameter sweep for one engine family")
    common(p)
    p.add_argument("--family", choices=("direct", "clustered", "fuzzy", "fd"))
    p.add_argument("--grid", help="swept parameter values, comma separated")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="grid-search (alpha, eta) for one N_c")
    common(p)
    p.set_defaults(func=cmd_optimize)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except cfgmod.ConfigError as exc:
        print(f"disperse {args.command}: config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"disperse {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
