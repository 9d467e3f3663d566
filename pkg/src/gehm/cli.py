"""Command-line entry point: ``gehm <command> [options]``.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 spectral
non-convergence (``spectrum`` only), 4 output I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import __version__
from .config import config_from_dict, load_config
from .errors import ConfigError, GehmError, GraphParseError, GraphValidationError, NonConvergenceError
from .graph import GraphModelSpec, generate_graph, read_graph, write_graph

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_IO = 0, 2, 3, 4

def _load(args):
    if args.config:
        return load_config(args.config)
    return config_from_dict({})


def _parse_grid(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--cf-grid must be comma-separated numbers: {exc}") from None


def cmd_simulate(args):
    from .experiment import run_experiment

    cfg = _load(args)
    if args.force:
        cfg = replace(cfg, sim=replace(cfg.sim, force=True))
    summary = run_experiment(cfg, out_dir=args.out, workers=args.workers)
    r = summary.regime
    print(f"regime={r.regime} R={r.R:.6g} blowup_fraction={summary.blowup_fraction:.3g}")
    return EXIT_OK


def cmd_spectrum(args):
    from .experiment import run_spectrum

    cfg = _load(args)
    est = run_spectrum(cfg, out_dir=args.out)
    print(json.dumps(est.to_dict(), indent=2))
    if not est.converged:
        raise NonConvergenceError(
            f"spectral estimate did not converge (residual {est.residual:.3g} after {est.iterations} iterations)"
        )
    return EXIT_OK


def cmd_regimes(args):
    from .experiment import monte_carlo_regimes

    cfg = _load(args)
    table = monte_carlo_regimes(cfg, _parse_grid(args.cf_grid), out_dir=args.out, workers=args.workers)
    for row in table.rows:
        print(f"C_F={row['C_F']:g} R={row['R']:.6g} regime={row['regime']} blowup_fraction={row['blowup_fraction']:.3g}")
    return EXIT_OK


def cmd_sweep(args):
    from .experiment import parameter_sweep

    cfg = _load(args)
    rows = parameter_sweep(cfg, out_dir=args.out, workers=args.workers)
    print(f"{len(rows)} rows written")
    return EXIT_OK


def cmd_topologies(args):
    from .experiment import run_topologies

    cfg = _load(args)
    rows, ordering = run_topologies(cfg, out_dir=args.out, workers=args.workers)
    for r in rows:
        print(
            f"{r['topology']}: lambda_p={r['lambda_p_mean']!r} "
            f"gamma_raw={r['gamma_raw_adjacency_mean']!r} gamma_W={r['gamma_normalized_W_mean']!r}"
        )
    if ordering is not None:
        print(f"fraction of seeds with raw gamma ordered BA > WS > ER: {ordering:.3g}")
    return EXIT_OK


def cmd_graph_gen(args):
    spec = GraphModelSpec(args.model, n=args.n, seed=args.seed, m=args.m, prob=args.prob, k=args.k, beta=args.beta)
    spec.validate()
    write_graph(generate_graph(spec), args.output)
    return EXIT_OK


def cmd_graph_validate(args):
    g = read_graph(args.path)
    print(f"ok: n={g.n} edges={g.num_edges} connected={g.is_connected()}")
    return EXIT_OK


def _add_common(p, out=True, workers=True):
    p.add_argument("-c", "--config", help="YAML configuration file (defaults when omitted)")
    if out:
        p.add_argument("--out", help="output directory (overrides GEHM_OUTPUT_DIR and the config)")
    if workers:
        p.add_argument("--workers", type=int, default=None, help="worker processes (default from config)")


def build_parser():
    parser = argparse.ArgumentParser(prog="gehm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the replicate ensemble and write trajectories")
    _add_common(p)
    p.add_argument("--force", action="store_true", help="run even when the step-size check fails")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="estimate lambda_p and Gamma for the configured graph")
    _add_common(p, workers=False)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("regimes", help="regime table over a grid of C_F values")
    _add_common(p)
    p.add_argument("--cf-grid", required=True, help="comma-separated C_F values, e.g. -1,0,1")
    p.set_defaults(func=cmd_regimes)

    p = sub.add_parser("sweep", help="parameter sweep defined in the config's sweep section")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("topologies", help="compare lambda_p and Gamma across BA, ER and WS graphs")
    _add_common(p)
    p.set_defaults(func=cmd_topologies)

    g = sub.add_parser("graph", help="graph file utilities")
    gsub = g.add_subparsers(dest="graph_command", required=True)
    p = gsub.add_parser("gen", help="generate a graph and write it to a file")
    p.add_argument("model", choices=("barabasi_albert", "erdos_renyi", "watts_strogatz"))
    p.add_argument("output")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=123456)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--prob", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=cmd_graph_gen)
    p = gsub.add_parser("validate", help="parse and validate a graph file")
    p.add_argument("path")
    p.set_defaults(func=cmd_graph_validate)
    return parser


def _join_grid_value(argv):
    # a grid such as "-1,0,1" would otherwise be mistaken for an option
    out = []
    it = iter(argv)
    for a in it:
        if a == "--cf-grid":
            out.append("--cf-grid=" + next(it, ""))
        else:
            out.append(a)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_grid_value(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (GraphParseError, GraphValidationError) as exc:
        print(f"graph error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GehmError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
