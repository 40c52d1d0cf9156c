"""Command line entry point."""

from __future__ import annotations

import argparse
import sys

from . import io
from .experiments import ConfigError, basin_probe, compare_models, run_scenario, sweep_mu
from .model import ParameterError
from .verify import SUITES, run_suite


def _load(path: str):
    try:
        return io.load_config(path)
    except FileNotFoundError:
        return io.load_scenario(path)


def _simulate(args) -> int:
    cfg = _load(args.config)
    traj, report, summary = run_scenario(cfg)
    out = args.out or cfg.outputs.get("csv")
    if out:
        from .experiments import reduced_view

        io.write_csv(traj, report, out, reduced=reduced_view(cfg, traj))
    settle = "not settled" if summary.settling_time is None else f"{summary.settling_time:.2f}"
    print(f"{cfg.name}: {len(traj.t)} records, settling time {settle}, "
          f"late amplitude {summary.max_steady_amplitude:.4g}, "
          f"sliding intervals {len(summary.sliding_intervals)}, "
          f"violations {0 if report is None else len(report.violations)}")
    return 0


def _verify(args) -> int:
    checks = run_suite(args.suite)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    return 0 if all(c.passed for c in checks) else 2


def _sweep(args) -> int:
    cfg = _load(args.config)
    mus = [float(v) for v in args.mu.split(",")]
    print("mu,deviation")
    for row in sweep_mu(cfg, mus):
        print(f"{row.mu!r},{row.deviation!r}")
    return 0


def _basin(args) -> int:
    cfg = _load(args.config)
    res = basin_probe(cfg, args.grid, converge_eps=args.eps, t_end=args.t_end, mu=args.mu)
    print(f"mu = {res.mu}: {res.n_converged}/{len(res.converged)} converged, "
          f"basin level W_rho <= {res.radius:.6g}")
    return 0


def _compare(args) -> int:
    cfg = _load(args.config)
    rep = compare_models(cfg)
    print(f"sup deviation {rep.deviation:.3e}, max |gamma_dot + a*gamma| {rep.gamma_residual:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pendsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one scenario and write its CSV")
    s.add_argument("--config", required=True, help="TOML file or bundled scenario name")
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=_simulate)

    s = sub.add_parser("verify", help="run built-in check suites")
    s.add_argument("--suite", default="all", choices=[*SUITES, "all"])
    s.set_defaults(func=_verify)

    s = sub.add_parser("sweep-mu", help="observer robustness sweep")
    s.add_argument("--config", required=True)
    s.add_argument("--mu", required=True, help="comma separated list, e.g. 0.1,0.03,0.01")
    s.set_defaults(func=_sweep)

    s = sub.add_parser("basin", help="grid probe of the attraction domain")
    s.add_argument("--config", required=True)
    s.add_argument("--grid", required=True, help='e.g. "omega=-3:3:9,omega_dot=-3:3:9"')
    s.add_argument("--mu", type=float)
    s.add_argument("--eps", type=float, default=1e-3)
    s.add_argument("--t-end", type=float, default=None)
    s.set_defaults(func=_basin)

    s = sub.add_parser("compare", help="full plant versus reduced loop")
    s.add_argument("--config", required=True)
    s.set_defaults(func=_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
