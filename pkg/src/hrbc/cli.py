"""Command-line driver: ``hrbc translate`` and ``hrbc simulate``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .backend import emit_cfg, emit_json, emit_spaceex, load_json
from .diagnostics import DiagnosticError, report, warning
from .frontend import load_model
from .ha import stats
from .predicate import check_predicate, parse_predicate
from .reducer import aggregate
from .simulator import POLICIES, check_forbidden, simulate
from .translator import ExplorationLimits, explore

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_USAGE = 2
EXIT_WITNESS = 3

DEFAULT_FORBIDDEN = "loc() == Fault"


class UsageError(Exception):
    pass


class _HelpFormatter(argparse.HelpFormatter):
    """Appends the default to option help unless it is empty or already stated."""

    def _get_help_string(self, action):
        text = action.help or ""
        default = action.default
        if "default" in text or default is None or default is False or default == [] \
                or default == argparse.SUPPRESS:
            return text
        if action.option_strings or action.nargs in ("?", "*"):
            text += " (default: %(default)s)"
        return text


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text}")
    return value


def _queue_item(text: str) -> tuple:
    name, sep, size = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected <rebec>=<n> or default=<n>, got {text!r}")
    return name.strip(), _positive_int(size)


def _option_item(text: str) -> tuple:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected <key>=<value>, got {text!r}")
    return key.strip(), value.strip()


def _add_limits(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("exploration limits")
    g.add_argument("--queue", action="append", type=_queue_item, default=[], metavar="REBEC=N",
                   help="queue size for one rebec, or default=N for all others (default: default=1)")
    g.add_argument("--timer-pool", type=_positive_int, default=1, metavar="N",
                   help="number of shared timer variables")
    g.add_argument("--arg-pool", type=_positive_int, default=4, metavar="N",
                   help="number of shared message-argument variables")
    g.add_argument("--max-configs", type=_positive_int, default=200_000, metavar="N",
                   help="abort exploration beyond this many configurations")


def build_parser() -> argparse.ArgumentParser:
    fmt = _HelpFormatter
    parser = argparse.ArgumentParser(prog="hrbc", formatter_class=fmt,
                                     description="Hybrid Rebeca to hybrid automaton compiler.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    tr = sub.add_parser("translate", formatter_class=fmt,
                        help="derive a hybrid automaton and write it out",
                        description="Translate a model to SpaceEx (XML + cfg) or JSON.")
    tr.add_argument("input", help="model file (.hrebeca)")
    tr.add_argument("--format", choices=("spaceex", "json"), default="spaceex",
                    help="output format")
    tr.add_argument("--aggregate", action="store_true", help="remove urgent locations")
    _add_limits(tr)
    tr.add_argument("--forbidden", metavar="EXPR", default=None,
                    help="forbidden states for the SpaceEx configuration")
    tr.add_argument("--cfg-option", action="append", type=_option_item, default=[],
                    metavar="KEY=VALUE", help="extra SpaceEx configuration line, copied verbatim")
    tr.add_argument("--system", default="sys", help="SpaceEx component name")
    tr.add_argument("-o", "--output", metavar="BASENAME", default=None,
                    help="output path without extension (default: input file stem)")

    sim = sub.add_parser("simulate", formatter_class=fmt,
                         help="simulate a model or automaton and check a forbidden predicate",
                         description="Simulate a .hrebeca model (translated and aggregated "
                                     "first) or a .ha.json automaton.")
    sim.add_argument("input", help="model (.hrebeca) or automaton (.ha.json)")
    sim.add_argument("--horizon", type=float, required=True, metavar="SEC",
                     help="simulated time")
    sim.add_argument("--dt", type=float, default=1e-3, metavar="SEC", help="integration step")
    sim.add_argument("--policy", choices=POLICIES, default="first",
                     help="choice among simultaneously enabled edges")
    sim.add_argument("--seed", type=int, default=0, help="seed for the random policies")
    sim.add_argument("--guard-tol", type=float, default=None, metavar="TOL",
                     help="equality-guard tolerance (default: dt * max(1, flow bound))")
    sim.add_argument("--forbidden", metavar="EXPR", default=DEFAULT_FORBIDDEN,
                     help="predicate checked on every sample")
    sim.add_argument("--full", action="store_true",
                     help="simulate the automaton with its urgent locations")
    _add_limits(sim)
    sim.add_argument("--trace", metavar="CSV", default=None, help="write the sampled trace")
    sim.add_argument("--plot", metavar="PNG", default=None, help="plot the sampled trace")
    sim.add_argument("--plot-vars", metavar="V1,V2", default=None,
                     help="comma-separated variables to plot")
    return parser


def _limits(args, model) -> ExplorationLimits:
    queue, default = {}, 1
    names = {r.name for r in model.rebecs}
    for name, size in args.queue:
        if name == "default":
            default = size
        elif name not in names:
            raise UsageError(f"--queue: unknown rebec {name!r}")
        else:
            queue[name] = size
    return ExplorationLimits(default, queue, args.timer_pool, args.arg_pool, args.max_configs)


def _stats_line(ha) -> str:
    n, m, k = stats(ha)
    return f"locations={n} transitions={m} urgent={k}"


def _derive(args, out):
    """Frontend, translator and (optionally) reducer for a .hrebeca input."""
    model = load_model(args.input)
    for d in model.warnings:
        report([d])
    ha = explore(model, _limits(args, model))
    print(_stats_line(ha), file=out)
    return ha


def cmd_translate(args, out=None) -> int:
    out = out or sys.stdout
    start = time.perf_counter()
    ha = _derive(args, out)
    if args.aggregate:
        ha = aggregate(ha)
        print(_stats_line(ha), file=out)
    base = args.output or Path(args.input).name.split(".")[0]
    forbidden = None
    if args.forbidden is not None:
        forbidden = parse_predicate(args.forbidden)
        check_predicate(forbidden, ha)
    written = []
    if args.format == "spaceex":
        xml, warnings = emit_spaceex(ha, args.system)
        report([warning(w) for w in warnings])
        cfg = emit_cfg(ha, forbidden, dict(args.cfg_option), args.system)
        written += [_write(f"{base}.xml", xml), _write(f"{base}.cfg", cfg)]
    else:
        written.append(_write(f"{base}.ha.json", emit_json(ha)))
    print(f"wrote {' '.join(written)} in {time.perf_counter() - start:.2f}s", file=out)
    return EXIT_OK


def _write(path: str, text: str) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path


def cmd_simulate(args, out=None) -> int:
    out = out or sys.stdout
    if not args.dt > 0:
        raise UsageError("--dt must be positive")
    if not args.horizon >= 0:
        raise UsageError("--horizon must not be negative")
    if args.guard_tol is not None and args.guard_tol < 0:
        raise UsageError("--guard-tol must not be negative")
    if args.input.endswith(".json"):
        with open(args.input, encoding="utf-8") as f:
            ha = load_json(f.read())
    else:
        ha = _derive(args, out)
        if not args.full:
            ha = aggregate(ha)
            print(_stats_line(ha), file=out)
    pred = parse_predicate(args.forbidden)
    check_predicate(pred, ha)
    trace = simulate(ha, args.horizon, args.dt, args.policy, args.seed, args.guard_tol)
    if trace.status != "ok":
        print(f"note: trace ended early ({trace.status}): {trace.message}", file=sys.stderr)
    if args.trace:
        trace.write_csv(args.trace)
    if args.plot:
        from .plotting import plot_trace
        names = [v.strip() for v in args.plot_vars.split(",")] if args.plot_vars else None
        try:
            plot_trace(trace, args.plot, names, title=Path(args.input).name)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    verdict = check_forbidden(trace, pred)
    print(verdict, file=out)
    return EXIT_OK if verdict.safe else EXIT_WITNESS


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not Path(args.input).is_file():
        parser.print_usage(sys.stderr)
        print(f"hrbc: error: no such file: {args.input}", file=sys.stderr)
        return EXIT_USAGE
    command = cmd_translate if args.command == "translate" else cmd_simulate
    try:
        return command(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hrbc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DiagnosticError as exc:
        report(exc.diagnostics)
        return EXIT_MODEL
    except (ValueError, KeyError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
