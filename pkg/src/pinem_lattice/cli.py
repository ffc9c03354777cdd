"""Command-line entry point: ``params``, ``simulate``, ``sweep`` and ``compare``.

Exit codes: 0 success, 2 configuration error, 3 numerical guard violation,
4 comparison above ``--assert-tol``.
"""

import argparse
import json
import sys

import numpy as np

from . import io, protocols
from .errors import ConfigError, DomainError, NumericalGuardError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_TOLERANCE = 4

COMPARABLE = ("breathing", "bloch_oscillation")


def build_parser():
    parser = argparse.ArgumentParser(prog="pinem-lattice",
                                     description="Synthetic energy-lattice simulator for PINEM sidebands.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print derived beam and lattice quantities")
    p.add_argument("config", help="JSON config path, or - for stdin")

    p = sub.add_parser("simulate", help="run one scenario and write traces")
    p.add_argument("config")
    p.add_argument("--output-dir", default=None, help="override output.directory")

    p = sub.add_parser("sweep", help="detuning sweep at fixed interaction time")
    p.add_argument("config")
    p.add_argument("--output-dir", default=None)
    p.add_argument("--min", type=float, default=None, help="smallest detuning (rad/fs)")
    p.add_argument("--max", type=float, default=None, help="largest detuning (rad/fs)")
    p.add_argument("--points", type=int, default=6)

    p = sub.add_parser("compare", help="run two solvers on one scenario")
    p.add_argument("config")
    p.add_argument("--solvers", nargs=2, default=["tba", "analytic"],
                   choices=["tba", "analytic", "tdse"])
    p.add_argument("--assert-tol", type=float, default=None,
                   help="exit with code 4 if the chosen error exceeds this value")
    p.add_argument("--metric", choices=["l2", "linf"], default="linf")
    return parser


def _read(path):
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", (path,)) from exc


def _load(args):
    config = io.parse_config(_read(args.config))
    out = getattr(args, "output_dir", None)
    if out:
        doc = dict(config.document)
        doc["output"] = dict(doc["output"], directory=out)
        config = io.build_config(doc)
    return config


def _print(payload):
    print(json.dumps(payload, indent=2, sort_keys=True, default=io._json_default))


def cmd_params(args):
    _print(io.derived_quantities(_load(args)))
    return EXIT_OK


def cmd_simulate(args):
    config = _load(args)
    result = protocols.run_scenario(config.scenario)
    files = []
    for label, trace in result.traces.items():
        files += io.write_trace(trace, config, label, result.summary)
    if not result.traces:
        files.append(io.write_summary(f"{config.scenario.kind}_summary.json",
                                      {"run": config.document, "summary": result.summary}, config))
    _print({"files": files, "summary": result.summary})
    return EXIT_OK


def cmd_sweep(args):
    config = _load(args)
    spec = config.scenario
    detunings = spec.params.get("detunings")
    if args.min is not None or args.max is not None or detunings is None:
        lo = args.min if args.min is not None else 1.0
        hi = args.max if args.max is not None else 10.0 * lo
        if not 0 < lo < hi:
            raise ConfigError("need 0 < --min < --max", ("sweep",))
        detunings = np.geomspace(lo, hi, args.points).tolist()
    t_int = config.document["drive"]["interaction_length"] / spec.beam.velocity
    rows = protocols.run_detuning_sweep(spec.model.kappa_mag, detunings, t_int,
                                        spec.model.lattice_constant, spec.model.phase_delay,
                                        spec.samples, spec.step)
    positive = [r for r in rows if r.detuning != 0]
    exponent = None
    if len(positive) >= 2:
        exponent = protocols.fit_power_law([abs(r.detuning) for r in positive],
                                           [r.peak_spread for r in positive])[0]
    path = io.write_summary("detuning_sweep.json", {
        "run": config.document, "interaction_time": t_int,
        "rows": [r.__dict__ for r in rows], "peak_spread_exponent": exponent}, config)
    _print({"files": [path], "peak_spread_exponent": exponent})
    return EXIT_OK


def cmd_compare(args):
    config = _load(args)
    spec = config.scenario
    if spec.kind not in COMPARABLE:
        raise ConfigError(f"compare supports {COMPARABLE}, not {spec.kind!r}", ("scenario", "kind"))
    traces = {}
    for solver in args.solvers:
        run = protocols.ScenarioSpec(spec.kind, spec.model, solver, spec.params, spec.samples,
                                     spec.beam, spec.step)
        traces[solver] = protocols.run_scenario(run).traces[solver]
    a, b = (traces[s] for s in args.solvers)
    report = io.compare_traces(a, b, tuple(args.solvers))
    payload = report.as_dict()
    payload.pop("per_time_errors")
    _print(payload)
    error = report.l2_error if args.metric == "l2" else report.linf_error
    if args.assert_tol is not None and error > args.assert_tol:
        print(f"{args.metric} error {error:.3g} exceeds tolerance {args.assert_tol:.3g}",
              file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


COMMANDS = {"params": cmd_params, "simulate": cmd_simulate, "sweep": cmd_sweep,
            "compare": cmd_compare}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
