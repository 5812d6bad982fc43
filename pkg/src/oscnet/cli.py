"""Command-line front end: ``oscnet {eigen,simulate,msf,floquet,experiment}``.

Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from . import floquet as fq
from .config import (PRESETS, ScenarioConfig, load_config, parse_edges, parse_grid, parse_schedule,
                     validate)
from .errors import ConfigError, OscnetError
from .graph import CLUSTER_NODE_NAMES, laplacian, spectrum
from .integrate import IntegratorConfig, find_limit_cycle, integrate
from .models import NetworkField, VdpParams
from .output import (MSF_HEADER, SPECTRUM_HEADER, SYNC_HEADER, trajectory_header, write_csv,
                     write_svg)
from .sync import initial_states, run_remote_sync_experiment, sync_error

__all__ = ["main", "build_parser", "RunSummary"]


@dataclass
class RunSummary:
    command: str
    wall_time: float = 0.0
    outputs: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def render(self) -> str:
        rows = [("command", self.command), ("wall_time_s", f"{self.wall_time:.3f}")]
        rows += [(k, str(v)) for k, v in self.values.items()]
        rows += [("wrote", p) for p in self.outputs]
        return _aligned(rows)


def _aligned(rows) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="scenario file (INI); flags override it")
    p.add_argument("--out", metavar="PATH", help="primary output file")
    p.add_argument("--svg", metavar="PATH", help="also write a single-curve SVG plot")
    p.add_argument("--seed", type=int, help="seed for initial conditions")
    return p


def _graph_flags(p):
    p.add_argument("--preset", choices=sorted(PRESETS), help="named graph")
    p.add_argument("--nodes", type=int, help="node count for an explicit edge list")
    p.add_argument("--edges", help="edge list, e.g. '0-1,1-2,2-0'")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oscnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()

    p = sub.add_parser("eigen", parents=[common], help="Laplacian spectrum (writes spectrum.csv)")
    _graph_flags(p)

    p = sub.add_parser("simulate", parents=[common], help="integrate the network (writes trajectory.csv)")
    _graph_flags(p)
    p.add_argument("--mu", type=float, help="Van der Pol damping")
    p.add_argument("--kappa", help="gain schedule value@time, e.g. '0@0,0.5@15'")
    p.add_argument("--dt", type=float, help="RK4 step")
    p.add_argument("--t-end", type=float, help="final time")
    p.add_argument("--record-stride", type=int, help="record every N-th step")

    p = sub.add_parser("msf", parents=[common], help="master stability curve (writes msf.csv)")
    _graph_flags(p)
    p.add_argument("--mu", type=float, help="Van der Pol damping")
    p.add_argument("--lambda", dest="lam", help="Laplacian eigenvalue, or 'max' for the graph's largest")
    p.add_argument("--kappa", help="gain grid start:stop:step (inclusive)")
    p.add_argument("--dt", type=float, help="RK4 step for orbit and monodromy")
    p.add_argument("--samples", type=int, help="phase samples per period")
    p.add_argument("--burn-in", type=float, help="transient time before period detection")

    p = sub.add_parser("floquet", parents=[common], help="Floquet/Lyapunov-Floquet report for one shift")
    p.add_argument("--mu", type=float, help="Van der Pol damping")
    p.add_argument("--gamma", type=float, help="identity shift of the variational matrix")
    p.add_argument("--kappa", type=float, help="gain; with --lambda sets gamma = -kappa*lambda")
    p.add_argument("--lambda", dest="lam", type=float, help="Laplacian eigenvalue paired with --kappa")
    p.add_argument("--dt", type=float, help="RK4 step for orbit and monodromy")
    p.add_argument("--samples", type=int, help="phase samples per period")
    p.add_argument("--burn-in", type=float, help="transient time before period detection")

    p = sub.add_parser("experiment", parents=[common], help="remote-sync protocol (writes sync.csv)")
    _graph_flags(p)
    p.add_argument("--mu", type=float, help="Van der Pol damping")
    p.add_argument("--kappa-on", type=float, help="gain after the switch")
    p.add_argument("--t-switch", type=float, help="coupling activation time")
    p.add_argument("--t-end", type=float, help="final time")
    p.add_argument("--threshold", type=float, help="sync error threshold")
    p.add_argument("--dt", type=float, help="RK4 step")
    p.add_argument("--record-stride", type=int, help="record every N-th step")
    return parser


def _resolve(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    g = cfg.graph
    if getattr(args, "preset", None):
        g = replace(g, preset=args.preset, nodes=None, edges=())
    if getattr(args, "nodes", None) is not None or getattr(args, "edges", None):
        if getattr(args, "nodes", None) is None:
            raise ConfigError("--edges needs --nodes")
        g = replace(g, preset=None, nodes=args.nodes,
                    edges=parse_edges(args.edges or ""))
    cfg = replace(cfg, graph=g)

    def over(section, **pairs):
        updates = {k: v for k, v in pairs.items() if v is not None}
        return replace(section, **updates) if updates else section

    a = vars(args)
    cfg = replace(
        cfg,
        model=over(cfg.model, mu=a.get("mu")),
        integrator=over(cfg.integrator, dt=a.get("dt"), t_end=a.get("t_end"),
                        record_stride=a.get("record_stride")),
        experiment=over(cfg.experiment, t_switch=a.get("t_switch"), kappa_on=a.get("kappa_on"),
                        threshold=a.get("threshold"), seed=a.get("seed")),
        outputs=over(cfg.outputs, out=a.get("out"), svg=a.get("svg")),
    )
    if args.command == "simulate" and args.kappa:
        cfg = replace(cfg, coupling=replace(cfg.coupling, kappa=parse_schedule(args.kappa)))
    if args.command in ("msf", "floquet"):
        msf = over(cfg.msf, samples=a.get("samples"), burn_in=a.get("burn_in"),
                   gamma=a.get("gamma"))
        if args.command == "msf":
            msf = over(msf, lambda_=a.get("lam"),
                       kappa=parse_grid(args.kappa) if args.kappa else None)
        cfg = replace(cfg, msf=msf)
    return validate(cfg)


def cmd_eigen(cfg: ScenarioConfig, summary: RunSummary) -> None:
    g = cfg.graph.build()
    spec = spectrum(laplacian(g))
    out = cfg.outputs.out or "spectrum.csv"
    write_csv(out, SPECTRUM_HEADER, [(i + 1, v) for i, v in enumerate(spec.eigenvalues)])
    summary.outputs.append(out)
    if cfg.outputs.svg:
        write_svg(cfg.outputs.svg, np.arange(1, g.n + 1), spec.eigenvalues,
                  title="Laplacian spectrum", xlabel="index", ylabel="eigenvalue")
        summary.outputs.append(cfg.outputs.svg)
    # clamp round-off so the trivial eigenvalue prints as 0.000000, not -0.000000
    print(_aligned([(f"lambda_{i + 1}", f"{v if abs(v) > 5e-7 else 0.0:.6f}")
                    for i, v in enumerate(spec.eigenvalues)]))
    summary.values.update(nodes=g.n, edges=len(g.edges), connected=g.is_connected(),
                          algebraic_connectivity=f"{spec.algebraic_connectivity:.6f}")


def cmd_simulate(cfg: ScenarioConfig, summary: RunSummary) -> None:
    g = cfg.graph.build()
    coupling = cfg.coupling.build()
    f = NetworkField(g, coupling, VdpParams(cfg.model.mu))
    it = cfg.integrator
    traj = integrate(f, initial_states(g.n, cfg.experiment.seed),
                     IntegratorConfig(it.dt, it.t_end, it.record_stride),
                     breakpoints=coupling.switch_times)
    out = cfg.outputs.out or "trajectory.csv"
    write_csv(out, trajectory_header(g.n),
              (np.concatenate([[t], s]) for t, s in zip(traj.times, traj.states)))
    summary.outputs.append(out)
    if cfg.outputs.svg:
        write_svg(cfg.outputs.svg, traj.times, traj.states[:, 0],
                  title="node 1, first component", xlabel="t", ylabel="x1_1")
        summary.outputs.append(cfg.outputs.svg)
    err = sync_error(traj)
    summary.values.update(records=len(traj), final_sync_error=f"{err.values[-1]:.3e}")


def _orbit(cfg: ScenarioConfig, dt: float):
    p = VdpParams(cfg.model.mu)
    return p, find_limit_cycle(p, burn_in=cfg.msf.burn_in, m=cfg.msf.samples, dt=dt)


def cmd_msf(cfg: ScenarioConfig, summary: RunSummary) -> None:
    if cfg.msf.lambda_ == "max":
        lam = spectrum(laplacian(cfg.graph.build())).max_eigenvalue
    else:
        lam = float(cfg.msf.lambda_)
    p, orbit = _orbit(cfg, cfg.integrator.dt)
    curve = fq.msf_scan(orbit, p, lam, cfg.msf.grid())
    out = cfg.outputs.out or "msf.csv"
    write_csv(out, MSF_HEADER, zip(curve.kappa, curve.alpha, curve.max_multiplier, curve.max_exponent))
    summary.outputs.append(out)
    if cfg.outputs.svg:
        write_svg(cfg.outputs.svg, curve.kappa, curve.max_multiplier,
                  title=f"MSF, lambda = {lam:.4g}", xlabel="kappa", ylabel="max |multiplier|")
        summary.outputs.append(cfg.outputs.svg)
    summary.values.update(mu=cfg.model.mu, **{"lambda": f"{lam:.6f}"}, period=f"{orbit.period_T:.9f}",
                          points=len(curve), strictly_decreasing=curve.strictly_decreasing)


def cmd_floquet(cfg: ScenarioConfig, summary: RunSummary, kappa=None, lam=None) -> None:
    gamma = cfg.msf.gamma
    if kappa is not None or lam is not None:
        if kappa is None or lam is None:
            raise ConfigError("--kappa and --lambda must be given together")
        if kappa < 0 or lam < 0:
            raise ConfigError("kappa and lambda must be >= 0")
        gamma = -kappa * lam
    p, orbit = _orbit(cfg, cfg.integrator.dt)
    mono = fq.state_transition(orbit, p, gamma)
    spec = fq.multipliers(mono)
    tr = fq.build_transform(mono, spec)
    liou = fq.liouville_determinant(mono)
    rows = [
        ("mu", f"{p.mu:g}"),
        ("gamma", f"{gamma:g}"),
        ("period_T", f"{orbit.period_T:.9f}"),
        ("closure_error", f"{orbit.closure_error:.3e}"),
        ("multipliers", ", ".join(_cfmt(v) for v in spec.multipliers)),
        ("exponents", ", ".join(_cfmt(v) for v in spec.exponents)),
        ("max_multiplier", f"{spec.max_multiplier:.9g}"),
        ("max_exponent", f"{spec.max_exponent:.9g}"),
        ("J", _mfmt(tr.j_matrix)),
        ("det_phi_T", f"{np.linalg.det(mono.phi_T):.9g}"),
        ("liouville_det", f"{liou:.9g}"),
        ("periodicity_error", f"{tr.periodicity_error:.3e}"),
        ("expm_JT_error", f"{np.max(np.abs(expm(tr.j_matrix * mono.period_T) - mono.phi_T)):.3e}"),
        ("stable", str(spec.max_exponent < 0)),
    ]
    text = _aligned(rows)
    print(text)
    if cfg.outputs.out:
        with open(cfg.outputs.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        summary.outputs.append(cfg.outputs.out)
    if cfg.outputs.svg:
        write_svg(cfg.outputs.svg, mono.times, mono.orbit_samples[:, 0],
                  title="limit cycle over one period", xlabel="t", ylabel="x1")
        summary.outputs.append(cfg.outputs.svg)


def _cfmt(v) -> str:
    v = complex(v)
    return f"{v.real:.9g}" if v.imag == 0 else f"{v.real:.9g}{v.imag:+.9g}j"


def _mfmt(a) -> str:
    return "[" + "; ".join(", ".join(_cfmt(v) for v in row) for row in np.asarray(a)) + "]"


def cmd_experiment(cfg: ScenarioConfig, summary: RunSummary) -> None:
    ex = cfg.experiment
    it = cfg.integrator
    g = cfg.graph.build()
    names = CLUSTER_NODE_NAMES if cfg.graph.preset == "paper-network" else tuple(
        f"n{i + 1}" for i in range(g.n))
    traj, rep = run_remote_sync_experiment(ex.kappa_on, ex.t_switch, it.t_end, ex.seed,
                                           mu=cfg.model.mu, dt=it.dt, record_stride=it.record_stride,
                                           threshold=ex.threshold, graph=g, node_names=names)
    out = cfg.outputs.out or "sync.csv"
    write_csv(out, SYNC_HEADER, zip(rep.error_series.times, rep.error_series.values))
    summary.outputs.append(out)
    if cfg.outputs.svg:
        write_svg(cfg.outputs.svg, rep.error_series.times, rep.error_series.values, logy=True,
                  title="synchronization error", xlabel="t", ylabel="max |x_i - mean|")
        summary.outputs.append(cfg.outputs.svg)
    rows = [("pair", "final_error")] + [(f"{a}-{b}", f"{e:.3e}") for (a, b), e in rep.pair_errors.items()]
    if len(rows) > 1:
        print(_aligned(rows))
    summary.values.update(
        kappa_on=ex.kappa_on, t_switch=ex.t_switch, t_end=it.t_end, seed=ex.seed,
        threshold=ex.threshold,
        sync_time="none" if rep.sync_time is None else f"{rep.sync_time:.3f}",
        final_sync_error=f"{rep.error_series.values[-1]:.3e}",
    )


COMMANDS = {
    "eigen": cmd_eigen,
    "simulate": cmd_simulate,
    "msf": cmd_msf,
    "floquet": cmd_floquet,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    summary = RunSummary(args.command)
    start = time.perf_counter()
    try:
        cfg = _resolve(args)
        if args.command == "floquet":
            cmd_floquet(cfg, summary, kappa=args.kappa, lam=args.lam)
        else:
            COMMANDS[args.command](cfg, summary)
    except OscnetError as exc:
        print(f"oscnet {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"oscnet {args.command}: error: {exc}", file=sys.stderr)
        return 1
    summary.wall_time = time.perf_counter() - start
    print(summary.render())
    return 0


if __name__ == "__main__":
    sys.exit(main())
