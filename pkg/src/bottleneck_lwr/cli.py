"""Command-line entry points: ``run``, ``spue``, ``stability`` and ``demo-config``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, SimConfig, demo_config, dump_config, load_config, validate
from .driver import run
from .equilibrium import PerturbationTooLarge, analytic_spue, perturbation_experiment
from .grids import build_grids
from .profiles import ProfileError, demo_breakpoints, piecewise_rates
from .tables import FMT, OUTPUT_FILES, CsvSink, read_f0, write_manifest

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CONVERGENCE = 2
EXIT_UNSTABLE = 3


def _num(v: float) -> str:
    return FMT % v


def _load(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else demo_config()
    if getattr(args, "max_days", None) is not None:
        cfg = cfg.replace(max_days=float(args.max_days))
    return cfg


def cmd_run(args) -> int:
    try:
        cfg = _load(args)
        vc = validate(cfg)
        time, payoff = build_grids(vc)
        if args.f0:
            starts, rates = read_f0(args.f0)
            f0_source = str(args.f0)
        else:
            starts, rates = demo_breakpoints(vc)
            f0_source = "builtin-demo"
        f0 = piecewise_rates(starts, rates, time)
    except (ConfigError, ProfileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    if out.exists() and any((out / name).exists() for name in OUTPUT_FILES) and not args.overwrite:
        print(f"error: {out} already holds a run; pass --overwrite to replace it", file=sys.stderr)
        return EXIT_CONFIG

    sink = CsvSink(out, time, payoff, flow_every=args.flow_every)
    summary = run(vc, f0, [sink])
    write_manifest(out, cfg, summary, f0_source)
    day = "none" if summary.convergence_day is None else _num(summary.convergence_day)
    print(f"convergence_day={day} final_day={_num(summary.final_day)} "
          f"final_gap={_num(summary.final_gap)} final_x_star={_num(summary.final_x_star)} "
          f"stop={summary.stop_reason}")
    return EXIT_OK if summary.converged else EXIT_NO_CONVERGENCE


def cmd_spue(args) -> int:
    try:
        vc = validate(_load(args))
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    time, payoff = build_grids(vc)
    sol = analytic_spue(vc, time, payoff)
    cols = ["kappa", "L_star", "t_first", "t_last", "cost", "switch_time", "rate_early", "rate_late"]
    vals = [vc.kappa, sol.L_star, *sol.window, sol.cost, sol.switch_time, sol.rate_early, sol.rate_late]
    print(",".join(cols))
    print(",".join(_num(v) for v in vals))
    return EXIT_OK


def cmd_stability(args) -> int:
    try:
        vc = validate(_load(args))
        eps0 = 0.01 * vc.kappa if args.epsilon0 is None else args.epsilon0
        res = perturbation_experiment(vc, eps0)
    except (ConfigError, OSError, PerturbationTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print("epsilon0,L_star,rate_theory,rate_fit,r_squared,fine_initial_rate")
    print(",".join(_num(v) for v in (res.epsilon0, res.L_star, res.decay_rate_theory,
                                     res.decay_rate_fit, res.r_squared, res.fine_initial_rate)))
    return EXIT_OK if res.within(0.1) else EXIT_UNSTABLE


def cmd_demo_config(args) -> int:
    print(dump_config(demo_config()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bottleneck-lwr", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate day-to-day dynamics and write CSV tables")
    r.add_argument("--config", help="JSON config (default: built-in demo)")
    r.add_argument("--f0", help="CSV of t_start,rate rows (default: built-in demo profile)")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--overwrite", action="store_true", help="replace an existing run in --out")
    r.add_argument("--max-days", type=float, dest="max_days")
    r.add_argument("--flow-every", type=int, default=1, dest="flow_every",
                   help="write the flow/cost table every n-th day step")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("spue", help="print the analytic equilibrium")
    s.add_argument("--config")
    s.set_defaults(func=cmd_spue)

    st = sub.add_parser("stability", help="two-cell perturbation experiment")
    st.add_argument("--config")
    st.add_argument("--epsilon0", type=float, help="initial perturbation in veh/$ (default 0.01*kappa)")
    st.set_defaults(func=cmd_stability)

    d = sub.add_parser("demo-config", help="print the built-in example config as JSON")
    d.set_defaults(func=cmd_demo_config)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
