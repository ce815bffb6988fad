"""Command-line harness: simulate, solve, analytics, compare, graph-gen.

Configuration is a flat ``section.key = value`` text file; every value can be
overridden on the command line with ``--set section.key=value`` (repeatable),
and the dedicated flags ``--seed``/``--out`` take final precedence.  Unknown
keys are rejected.  All outputs are CSV files whose ``# meta:`` line echoes
the exact configuration (seeds included), so any result file can be
reproduced byte-for-byte from its own header.

Exit codes: 0 success, 2 configuration/validation error, 3 acceptance
threshold failure in compare mode.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .analysis import final_size_meanfield, final_size_pairwise, reproduction_numbers
from .network import generate_regular, save_edge_list
from .recovery import parse_distribution
from .simulate import run_ensemble, run_single
from .solvers import SolverError, solve_meanfield, solve_pairwise
from .reference import (
    solve_fixed_delay_pairwise,
    solve_gamma_chain,
    solve_markovian_pairwise,
    solve_uniform_delay_pairwise,
)
from .trajectory import EpidemicParams, SolverConfig, Trajectory

__all__ = ["ConfigError", "ExperimentConfig", "build_config", "main"]

# Thresholds enforced by `compare` (exit code 3 when violated).
PEAK_REL_TOL = 0.10
FINAL_SIZE_REL_TOL = 0.05


class ConfigError(ValueError):
    """Invalid configuration key, value, or combination."""


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat experiment description; defaults reproduce the headline figure."""

    network_num_nodes: int = 1000
    network_degree: int = 15
    network_graph_seed: int = 1
    network_fresh_graph_per_run: bool = True
    epidemic_tau: float = 0.35
    epidemic_dist: str = "exp:rate=0.6667"
    epidemic_initial_infected: int = 5
    epidemic_t_end: float = 25.0
    simulation_runs: int = 100
    simulation_base_seed: int = 42
    simulation_dt_out: float = 0.1
    simulation_save_runs: bool = False
    solver_h: float = 0.01
    solver_corrector_iters: int = 3
    outputs_dir: str = "."
    outputs_prefix: str = ""
    compare_distributions: str = ""
    compare_enforce: bool = True
    compare_gnuplot: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.network_num_nodes < 2:
            raise ConfigError("network.N must be at least 2")
        if not 0 < self.network_degree < self.network_num_nodes:
            raise ConfigError("network.n must satisfy 0 < n < N")
        if self.epidemic_tau < 0:
            # tau = 0 is meaningful for analytics (L = 1, r0p = 0); the
            # simulator and solvers reject it when actually run.
            raise ConfigError("epidemic.tau must be nonnegative")
        if not 0 <= self.epidemic_initial_infected <= self.network_num_nodes:
            raise ConfigError("epidemic.I0 must lie in [0, N]")
        if self.epidemic_t_end <= 0:
            raise ConfigError("epidemic.t_end must be positive")
        if self.simulation_runs < 1:
            raise ConfigError("simulation.runs must be >= 1")
        if self.simulation_dt_out <= 0:
            raise ConfigError("simulation.dt_out must be positive")
        if self.solver_h <= 0:
            raise ConfigError("solver.h must be positive")
        if self.solver_corrector_iters < 1:
            raise ConfigError("solver.corrector_iters must be >= 1")
        parse_distribution(self.epidemic_dist)
        for spec in self.distribution_list():
            parse_distribution(spec)
        return self

    # -- key mapping ------------------------------------------------------

    @classmethod
    def key_map(cls) -> dict[str, tuple[str, type]]:
        table = {}
        for f in fields(cls):
            section, _, rest = f.name.partition("_")
            key = f"{section}.{rest}"
            table[key] = (f.name, f.type)
        # Friendlier aliases used throughout the docs.
        table["network.N"] = table.pop("network.num_nodes")
        table["network.n"] = table.pop("network.degree")
        table["epidemic.I0"] = table.pop("epidemic.initial_infected")
        return table

    def distribution_list(self) -> list[str]:
        items = [s.strip() for s in self.compare_distributions.split(";") if s.strip()]
        return items

    def flatten(self) -> dict[str, str]:
        values = {}
        for key, (attr, _) in sorted(self.key_map().items()):
            val = getattr(self, attr)
            if isinstance(val, bool):
                values[key] = "true" if val else "false"
            elif isinstance(val, float):
                values[key] = repr(val)
            else:
                values[key] = str(val)
        return values


_TYPE_PARSERS = {"int": int, "float": float, "str": str, "bool": _parse_bool}


def build_config(pairs: dict[str, str]) -> ExperimentConfig:
    """Construct and validate a config from dotted key/value strings."""
    table = ExperimentConfig.key_map()
    updates = {}
    for key, raw in pairs.items():
        if key not in table:
            raise ConfigError(f"unknown configuration key {key!r}")
        attr, ftype = table[key]
        type_name = ftype if isinstance(ftype, str) else ftype.__name__
        parser = _TYPE_PARSERS.get(type_name, str)
        try:
            updates[attr] = parser(raw)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return ExperimentConfig(**updates).validate()


def read_config_file(path) -> dict[str, str]:
    pairs: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            pairs[key.strip()] = value.strip()
    return pairs


def config_from_meta(meta: dict[str, str]) -> ExperimentConfig:
    """Rebuild the configuration echoed in a CSV ``# meta:`` line."""
    table = ExperimentConfig.key_map()
    return build_config({k: v for k, v in meta.items() if k in table})


# -- command implementations ----------------------------------------------


def _epidemic_params(cfg: ExperimentConfig, dist_spec: str | None = None) -> EpidemicParams:
    return EpidemicParams(
        tau=cfg.epidemic_tau,
        dist=parse_distribution(dist_spec or cfg.epidemic_dist),
        initial_infected=cfg.epidemic_initial_infected,
        t_end=cfg.epidemic_t_end,
    )


def _out_path(cfg: ExperimentConfig, name: str) -> Path:
    out = Path(cfg.outputs_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / f"{cfg.outputs_prefix}{name}"


def _meta_with_config(cfg: ExperimentConfig, **extra) -> dict:
    meta = {"command": extra.pop("command")}
    # Output location is environmental, not part of the run: leaving it out
    # keeps equal-seed runs byte-identical regardless of where they land.
    meta.update(
        (k, v) for k, v in cfg.flatten().items() if not k.startswith("outputs.")
    )
    meta.update(extra)
    return meta


def cmd_simulate(cfg: ExperimentConfig) -> int:
    params = _epidemic_params(cfg)
    mean, std = run_ensemble(
        params,
        num_nodes=cfg.network_num_nodes,
        degree=cfg.network_degree,
        runs=cfg.simulation_runs,
        base_seed=cfg.simulation_base_seed,
        graph_seed=cfg.network_graph_seed,
        fresh_graph_per_run=cfg.network_fresh_graph_per_run,
        dt_out=cfg.simulation_dt_out,
    )
    mean.meta = _meta_with_config(cfg, command="simulate")
    std.meta = _meta_with_config(cfg, command="simulate", statistic="std")
    mean_path = _out_path(cfg, "sim_mean.csv")
    mean.to_csv(mean_path)
    std.to_csv(_out_path(cfg, "sim_std.csv"), column_suffix="_std")
    if cfg.simulation_save_runs:
        streams = np.random.SeedSequence(cfg.simulation_base_seed).spawn(
            cfg.simulation_runs
        )
        for k, stream in enumerate(streams):
            graph = generate_regular(
                cfg.network_num_nodes,
                cfg.network_degree,
                cfg.network_graph_seed
                + (7919 * k if cfg.network_fresh_graph_per_run else 0),
            )
            traj = run_single(
                graph, params, np.random.default_rng(stream), cfg.simulation_dt_out
            )
            traj.meta = _meta_with_config(cfg, command="simulate", run=k)
            traj.to_csv(_out_path(cfg, f"sim_run_{k:03d}.csv"))
    print(f"wrote {mean_path} and companion std file ({cfg.simulation_runs} runs)")
    return 0


_SPECIAL_SOLVERS = {
    "special:markovian": (solve_markovian_pairwise, "exp"),
    "special:fixed": (solve_fixed_delay_pairwise, "fixed"),
    "special:gamma": (solve_gamma_chain, "gamma"),
    "special:uniform": (solve_uniform_delay_pairwise, "uniform"),
}


def solve_model(cfg: ExperimentConfig, model: str, dist_spec: str | None = None) -> Trajectory:
    params = _epidemic_params(cfg, dist_spec)
    common = dict(num_nodes=cfg.network_num_nodes, degree=cfg.network_degree)
    if model == "pairwise":
        return solve_pairwise(
            params,
            config=SolverConfig(
                h=cfg.solver_h, corrector_iters=cfg.solver_corrector_iters
            ),
            **common,
        )
    if model == "meanfield":
        return solve_meanfield(
            params,
            config=SolverConfig(
                h=cfg.solver_h, corrector_iters=cfg.solver_corrector_iters
            ),
            **common,
        )
    if model in _SPECIAL_SOLVERS:
        solver, wanted_kind = _SPECIAL_SOLVERS[model]
        if params.dist.kind != wanted_kind:
            raise ConfigError(
                f"model {model} requires a {wanted_kind!r} distribution, "
                f"got {params.dist.kind!r}"
            )
        return solver(params, h=cfg.solver_h, **common)
    raise ConfigError(f"unknown model {model!r}")


def cmd_solve(cfg: ExperimentConfig, model: str) -> int:
    traj = solve_model(cfg, model)
    snap_note = traj.meta.get("grid_snap")
    traj.meta = _meta_with_config(cfg, command="solve", model=model)
    if snap_note:
        traj.meta["grid_snap"] = snap_note
    path = _out_path(cfg, f"solve_{model.replace(':', '_')}.csv")
    traj.to_csv(path)
    print(f"wrote {path}")
    return 0


def cmd_analytics(cfg: ExperimentConfig) -> int:
    specs = cfg.distribution_list() or [cfg.epidemic_dist]
    if not specs:
        raise ConfigError("no distributions configured for analytics")
    n, N = cfg.network_degree, cfg.network_num_nodes
    s0 = N - cfg.epidemic_initial_infected
    tau = cfg.epidemic_tau
    header = [
        "kind", "mean", "variance", "laplace_at_tau", "R0", "R0p",
        "s_inf_meanfield", "s_inf_pairwise", "attack_meanfield", "attack_pairwise",
    ]
    rows = []
    for spec in specs:
        dist = parse_distribution(spec)
        rep = reproduction_numbers(tau, n, N, s0, dist)
        mf = final_size_meanfield(rep.r0)
        pw = final_size_pairwise(rep.r0p, n)
        rows.append([
            spec, dist.mean(), dist.variance(), rep.laplace_at_tau, rep.r0,
            rep.r0p, mf.s_inf, pw.s_inf, mf.attack_rate, pw.attack_rate,
        ])

    widths = [max(len(header[j]), 12) for j in range(len(header))]
    widths[0] = max(len(r[0]) for r in rows + [header]) + 1
    print("  ".join(h.ljust(widths[j]) for j, h in enumerate(header)))
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [
            f"{val:.6g}".ljust(widths[j + 1]) for j, val in enumerate(row[1:])
        ]
        print("  ".join(cells))

    path = _out_path(cfg, "analytics.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        meta = _meta_with_config(cfg, command="analytics")
        tokens = " ".join(f"{k}={v}" for k, v in meta.items())
        fh.write(f"# meta: {tokens}\n")
        writer = csv.writer(fh)  # the kind column may itself contain commas
        writer.writerow(header)
        for row in rows:
            writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
    print(f"wrote {path}")
    return 0


def _compare_one(cfg: ExperimentConfig, spec: str):
    params = _epidemic_params(cfg, spec)
    mean, std = run_ensemble(
        params,
        num_nodes=cfg.network_num_nodes,
        degree=cfg.network_degree,
        runs=cfg.simulation_runs,
        base_seed=cfg.simulation_base_seed,
        graph_seed=cfg.network_graph_seed,
        fresh_graph_per_run=cfg.network_fresh_graph_per_run,
        dt_out=cfg.simulation_dt_out,
    )
    pw = solve_model(cfg, "pairwise", spec)
    mf = solve_model(cfg, "meanfield", spec)
    N = cfg.network_num_nodes

    def metrics(t, I, S):
        k = int(np.argmax(I))
        return {"peak": float(I[k]), "peak_time": float(t[k]), "final_size": float(N - S[-1])}

    rows = {
        "simulation": metrics(mean.t, mean.I, mean.S),
        "pairwise": metrics(pw.t, pw.I, pw.S),
        "meanfield": metrics(mf.t, mf.I, mf.S),
    }
    sim = rows["simulation"]
    for model in ("pairwise", "meanfield"):
        m = rows[model]
        m["peak_rel_err"] = abs(m["peak"] - sim["peak"]) / max(sim["peak"], 1e-12)
        m["final_size_rel_err"] = abs(m["final_size"] - sim["final_size"]) / max(
            sim["final_size"], 1e-12
        )
    curves = {
        "t": mean.t,
        "I_sim": mean.I,
        "I_sim_std": std.I,
        "I_pairwise": np.interp(mean.t, pw.t, pw.I),
        "I_meanfield": np.interp(mean.t, mf.t, mf.I),
        "S_sim": mean.S,
        "S_pairwise": np.interp(mean.t, pw.t, pw.S),
        "S_meanfield": np.interp(mean.t, mf.t, mf.S),
    }
    return rows, curves


def cmd_compare(cfg: ExperimentConfig) -> int:
    specs = cfg.distribution_list() or [cfg.epidemic_dist]
    all_ok = True
    summary_lines = []
    attack_by_spec = []
    summary_path = _out_path(cfg, "compare_summary.csv")
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        meta = _meta_with_config(cfg, command="compare")
        fh.write("# meta: " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["dist", "method", "peak", "peak_time", "final_size",
             "peak_rel_err", "final_size_rel_err"]
        )
        for idx, spec in enumerate(specs):
            rows, curves = _compare_one(cfg, spec)
            tag = parse_distribution(spec).kind
            curve_path = _out_path(cfg, f"compare_{idx}_{tag}.csv")
            with open(curve_path, "w", encoding="utf-8") as cfh:
                cfh.write("# meta: " + " ".join(f"{k}={v}" for k, v in meta.items()))
                cfh.write(f" dist={spec}\n")
                names = list(curves)
                cfh.write(",".join(names) + "\n")
                for vals in zip(*(curves[k] for k in names)):
                    cfh.write(",".join(repr(float(v)) for v in vals) + "\n")
            sim = rows["simulation"]
            attack_by_spec.append((spec, sim["final_size"]))
            for method in ("simulation", "pairwise", "meanfield"):
                m = rows[method]
                writer.writerow(
                    [spec, method, repr(m["peak"]), repr(m["peak_time"]),
                     repr(m["final_size"]), repr(m.get("peak_rel_err", 0.0)),
                     repr(m.get("final_size_rel_err", 0.0))]
                )
            pw, mf = rows["pairwise"], rows["meanfield"]
            checks = {
                "peak_within_10pct": pw["peak_rel_err"] < PEAK_REL_TOL,
                "final_size_within_5pct": pw["final_size_rel_err"] < FINAL_SIZE_REL_TOL,
                "meanfield_overshoots": mf["final_size"] > sim["final_size"],
            }
            ok = all(checks.values())
            all_ok = all_ok and ok
            summary_lines.append(
                f"[{spec}] sim peak {sim['peak']:.1f} @ t={sim['peak_time']:.2f}, "
                f"final size {sim['final_size']:.1f}; "
                f"pairwise peak err {pw['peak_rel_err']:.2%}, "
                f"final err {pw['final_size_rel_err']:.2%}; "
                f"meanfield peak err {mf['peak_rel_err']:.2%}, "
                f"final err {mf['final_size_rel_err']:.2%} "
                f"-> {'OK' if ok else 'FAIL'} "
                + ",".join(k for k, v in checks.items() if not v)
            )
    for line in summary_lines:
        print(line)
    if len(attack_by_spec) > 1:
        order = sorted(attack_by_spec, key=lambda kv: -kv[1])
        print(
            "attack-rate ordering (largest first): "
            + " > ".join(spec for spec, _ in order)
        )
    print(f"wrote {summary_path}")
    if cfg.compare_gnuplot:
        gp = _out_path(cfg, "compare.gp")
        with open(gp, "w", encoding="utf-8") as fh:
            fh.write("set datafile separator ','\nset key autotitle columnhead\n")
            fh.write("set xlabel 't'\nset ylabel 'prevalence [I]'\n")
            plots = []
            for idx, spec in enumerate(specs):
                tag = parse_distribution(spec).kind
                name = f"{cfg.outputs_prefix}compare_{idx}_{tag}.csv"
                plots += [
                    f"'{name}' using 1:2 with points title '{tag} sim'",
                    f"'{name}' using 1:4 with lines title '{tag} pairwise'",
                    f"'{name}' using 1:5 with lines dt 2 title '{tag} meanfield'",
                ]
            fh.write("plot " + ", \\\n     ".join(plots) + "\n")
        print(f"wrote {gp}")
    if cfg.compare_enforce and not all_ok:
        print("comparison thresholds violated", file=sys.stderr)
        return 3
    return 0


def cmd_graph_gen(cfg: ExperimentConfig, path: str | None) -> int:
    graph = generate_regular(
        cfg.network_num_nodes, cfg.network_degree, cfg.network_graph_seed
    )
    out = Path(path) if path else _out_path(cfg, "graph_edges.txt")
    save_edge_list(graph, out)
    print(
        f"wrote {out} ({graph.num_nodes} nodes, degree {graph.degree}, "
        f"{graph.edges.shape[0]} edges)"
    )
    return 0


# -- argument parsing ------------------------------------------------------


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="config file path")
    parser.add_argument("--seed", type=int, default=None, help="override simulation.base_seed")
    parser.add_argument("--out", type=str, default=None, help="override outputs.dir")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config entry (repeatable)",
    )


def _assemble_config(args) -> ExperimentConfig:
    pairs: dict[str, str] = {}
    if args.config:
        pairs.update(read_config_file(args.config))
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        pairs[key.strip()] = value.strip()
    if args.seed is not None:
        pairs["simulation.base_seed"] = str(args.seed)
    if args.out is not None:
        pairs["outputs.dir"] = args.out
    return build_config(pairs)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nmsir",
        description="SIR epidemics with arbitrary recovery laws on regular networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a stochastic ensemble, write CSVs")
    _common_flags(p_sim)
    p_solve = sub.add_parser("solve", help="solve a deterministic model")
    _common_flags(p_solve)
    p_solve.add_argument(
        "--model",
        default="pairwise",
        choices=["pairwise", "meanfield"] + sorted(_SPECIAL_SOLVERS),
    )
    p_an = sub.add_parser("analytics", help="reproduction numbers and final sizes")
    _common_flags(p_an)
    p_cmp = sub.add_parser("compare", help="simulation vs solvers with thresholds")
    _common_flags(p_cmp)
    p_gg = sub.add_parser("graph-gen", help="generate a regular graph edge list")
    _common_flags(p_gg)
    p_gg.add_argument("--edges-out", type=str, default=None)

    args = parser.parse_args(argv)
    try:
        cfg = _assemble_config(args)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "solve":
            return cmd_solve(cfg, args.model)
        if args.command == "analytics":
            return cmd_analytics(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        if args.command == "graph-gen":
            return cmd_graph_gen(cfg, args.edges_out)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
