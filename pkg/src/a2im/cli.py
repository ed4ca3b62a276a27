from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .commands import UNIVERSES, run_alpha, run_gen, run_immerse, run_reduce_critical, run_sweep
from .config import HarnessConfig
from .immersion import BudgetExceeded
from .version import __version__

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

SWEEPS = ("verify-theorem4", "verify-c4free", "verify-chi-kst", "probe-kll", "audit", "constructions")


def _help_formatter(prog: str):
    # Keep option/help columns stable and avoid cramped wrapping.
    return argparse.HelpFormatter(prog, max_help_position=30, width=100)


class _A2imHelpFormatter(argparse.RawDescriptionHelpFormatter):
    def __init__(self, prog):
        super().__init__(prog, max_help_position=30, width=100)


def _build_a2im_help_parser():
    parser = argparse.ArgumentParser(
        prog="a2im",
        description=f"a2im {__version__} - immersions in graphs with independence number two\n\n"
        "Certificate-checked immersion search and exhaustive verification sweeps.",
        usage="a2im <COMMAND> [OPTIONS]",
        epilog=(
            "COMMANDS:\n"
            "  gen               Enumerate a graph universe as graph6 lines\n"
            "  alpha             Invariant report for a graph6 file\n"
            "  immerse           Search one immersion and print its certificate\n"
            "  reduce-critical   Reduce graphs to alpha-critical spanning subgraphs\n"
            "  verify-theorem4   K_{l,ceil(n/2)-l} sweep over alpha = 2 graphs\n"
            "  verify-c4free     K_{ceil(n/2)} sweep over induced-C4-free graphs\n"
            "  verify-chi-kst    K_{l,chi-l} sweep over alpha = 2 graphs for every l < chi\n"
            "  probe-kll         Clique-topped bipartite probe with target chi\n"
            "  audit             Claim-by-claim audit of the counterexample argument\n"
            "  constructions     Verify the explicit constructions on every instance\n\n"
            "EXIT CODES:\n"
            "  0 verified, 1 violation or not found, 2 usage error, 3 undecided (budget)\n\n"
            "Use 'a2im <command> --help' for more information."
        ),
        formatter_class=_A2imHelpFormatter,
    )
    parser.add_argument("command", nargs="?", metavar="COMMAND", help="Command name such as gen or audit")
    return parser


def _handle_common_errors(fn):
    try:
        return fn()
    except BudgetExceeded as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - explicit user-facing fallback path.
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _global_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("global options")
    group.add_argument("--jobs", type=int, help="Worker processes (env A2IM_JOBS, default 1)")
    group.add_argument("--seed", type=int, help="Seed for random generation (env A2IM_SEED)")
    group.add_argument("--budget-nodes", type=int, help="Search-node budget per solver call")
    group.add_argument("--budget-ms", type=int, help="Wall-clock budget per solver call in ms")
    group.add_argument("--max-n", type=int, dest="max_n", help="Largest n the enumerators accept")
    group.add_argument("--format", choices=("json", "text"), default="json", help="Output format")
    group.add_argument("-o", "--output", type=Path, help="Output file (default stdout)")
    group.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    return parent


def _sweep_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-min", type=int, required=True, help="Smallest vertex count")
    parser.add_argument("--n-max", type=int, help="Largest vertex count (default --n-min)")
    parser.add_argument("--input", type=Path, help="Read the universe from a graph6 file")
    parser.add_argument("--timings", action="store_true", help="Record wall times in the report")


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _config_from_args(args, **extra) -> HarnessConfig:
    return HarnessConfig.from_env().override(
        jobs=args.jobs,
        seed=args.seed,
        budget_nodes=args.budget_nodes,
        budget_ms=args.budget_ms,
        max_enumeration_n=args.max_n,
        **extra,
    )


def _build_gen_parser(prog_name: str):
    parser = argparse.ArgumentParser(
        prog=prog_name,
        description="gen - Enumerate graphs up to isomorphism as graph6 lines",
        formatter_class=_help_formatter,
        parents=[_global_options()],
    )
    parser.add_argument("n", type=int, nargs="?", help="Vertex count (smallest when --n-max is given)")
    parser.add_argument("--n", type=int, dest="n_option", metavar="N", help="Vertex count, same as the positional")
    parser.add_argument("--n-max", type=int, help="Largest vertex count")
    family = parser.add_mutually_exclusive_group()
    family.add_argument("--exact-alpha2", action="store_true", help="Only graphs with alpha exactly 2")
    family.add_argument("--triangle-free", action="store_true", help="Triangle-free graphs instead of alpha <= 2")
    family.add_argument("--universe", choices=UNIVERSES, help="Graph family by name (default alpha2-all)")
    parser.add_argument("--random", type=int, dest="random_count", help="Emit COUNT random alpha <= 2 graphs per n")
    parser.add_argument("--density", type=float, help="Edge density of the random complement")
    return parser


def _build_file_parser(prog_name: str, description: str):
    parser = argparse.ArgumentParser(
        prog=prog_name,
        description=description,
        formatter_class=_help_formatter,
        parents=[_global_options()],
    )
    parser.add_argument("input", type=Path, nargs="?", help="graph6 file (default stdin)")
    return parser


def _build_immerse_parser(prog_name: str):
    parser = argparse.ArgumentParser(
        prog=prog_name,
        description="immerse - Search an immersion of a target in one graph",
        formatter_class=_help_formatter,
        parents=[_global_options()],
    )
    parser.add_argument("graph6", help="Host graph as a graph6 string")
    parser.add_argument("--target", required=True, help="kst:S,T | clique:K | kll:L,T | g6:<graph6>")
    parser.add_argument(
        "--method",
        choices=("solver", "rewriting"),
        default="solver",
        help="Path-packing solver with certificate, or lift-sequence search",
    )
    return parser


def _build_sweep_parser(prog_name: str, kind: str):
    parser = argparse.ArgumentParser(
        prog=prog_name,
        description=f"{kind} - verification sweep; exit 0 verified, 1 violated, 3 undecided",
        formatter_class=_help_formatter,
        parents=[_global_options()],
    )
    _sweep_options(parser)
    if kind in {"probe-kll", "audit"}:
        parser.add_argument(
            "--ell",
            type=int,
            default=1 if kind == "probe-kll" else None,
            help="Size of the small side" + (" (default 1)" if kind == "probe-kll" else " (default every valid one)"),
        )
    if kind == "audit":
        parser.add_argument("--full", action="store_true", help="Evaluate every claim instead of stopping early")
    return parser


def _gen_universe(args) -> str:
    if args.universe is not None:
        return args.universe
    if args.triangle_free:
        return "triangle-free"
    if args.exact_alpha2:
        return "alpha2"
    return "alpha2-all"


def main_gen(argv=None, prog_name=None):
    parser = _build_gen_parser(prog_name or "a2im gen")
    args = parser.parse_args(argv)
    if args.n is None and args.n_option is None:
        parser.error("a vertex count is required (N or --n N)")
    if args.n is not None and args.n_option is not None and args.n != args.n_option:
        parser.error(f"conflicting vertex counts {args.n} and --n {args.n_option}")
    n = args.n if args.n is not None else args.n_option
    _configure_logging(args.verbose)
    return _handle_common_errors(
        lambda: run_gen(
            n,
            args.n_max,
            _gen_universe(args),
            _config_from_args(args),
            output_path=args.output,
            random_count=args.random_count,
            density=args.density,
        )
    )


def main_alpha(argv=None, prog_name=None):
    parser = _build_file_parser(prog_name or "a2im alpha", "alpha - Invariant report for graph6 input")
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    return _handle_common_errors(lambda: run_alpha(args.input, args.format, args.output))


def main_reduce_critical(argv=None, prog_name=None):
    parser = _build_file_parser(
        prog_name or "a2im reduce-critical",
        "reduce-critical - Delete edges while the independence number is unchanged",
    )
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    return _handle_common_errors(lambda: run_reduce_critical(args.input, args.output))


def main_immerse(argv=None, prog_name=None):
    args = _build_immerse_parser(prog_name or "a2im immerse").parse_args(argv)
    _configure_logging(args.verbose)
    return _handle_common_errors(
        lambda: run_immerse(
            args.graph6,
            args.target,
            _config_from_args(args),
            fmt=args.format,
            output_path=args.output,
            method=args.method,
        )
    )


def main_sweep(kind: str, argv=None, prog_name=None):
    args = _build_sweep_parser(prog_name or f"a2im {kind}", kind).parse_args(argv)
    _configure_logging(args.verbose)

    def run():
        config = _config_from_args(
            args,
            timings=args.timings or None,
            full_audit=getattr(args, "full", False) or None,
        )
        return run_sweep(
            kind,
            args.n_min,
            args.n_max if args.n_max is not None else args.n_min,
            config,
            fmt=args.format,
            output_path=args.output,
            input_path=args.input,
            ell=getattr(args, "ell", None),
        )

    return _handle_common_errors(run)


_COMMANDS = {
    "gen": main_gen,
    "alpha": main_alpha,
    "immerse": main_immerse,
    "reduce-critical": main_reduce_critical,
}


def main(argv=None):
    args_list = list(sys.argv[1:] if argv is None else argv)
    if not args_list or args_list[0] in {"-h", "--help"}:
        _build_a2im_help_parser().print_help()
        return 0

    if args_list[0] in {"-V", "--version"}:
        print(f"a2im {__version__}")
        return 0

    subcmd = args_list[0]
    rest = args_list[1:]
    if subcmd in _COMMANDS:
        return _COMMANDS[subcmd](rest, prog_name=f"a2im {subcmd}")
    if subcmd in SWEEPS:
        return main_sweep(subcmd, rest, prog_name=f"a2im {subcmd}")

    print(f"error: unknown command '{subcmd}'. Use 'a2im --help' for the command list.", file=sys.stderr)
    return 2
