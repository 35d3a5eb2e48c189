"""
Command-line harness: compare, sweep and plot.

    python -m app compare --problem stereo-synth --architectures ae,sf-mf --budget-ms 10000 --seeds 1,2,3
    python -m app sweep --parameter beta --values 0,1,2,3 --problem flow-synth
    python -m app plot output/*.csv --out energy.svg --per-worker

Exit codes: 0 on success, 2 on usage errors.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from app.errors import TraceFormatError, UsageError
from app.swarm.architectures import ARCHITECTURES
from config.settings import settings

from .config_file import build_config, load_config_file
from .plotting import plot_traces
from .runner import SWEEP_PARAMETERS, compare, sweep
from .traces import read_trace

logger = logging.getLogger("bench.cli")

EXIT_OK = 0
EXIT_USAGE = 2


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _name_list(text: str) -> List[str]:
    return [item.strip().lower() for item in text.split(",") if item.strip()]


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key = value config file")
    parser.add_argument("--problem", default=None, help="stereo-synth, flow-synth or random")
    parser.add_argument("--budget-ms", type=float, default=None, help="wall-clock budget per run")
    parser.add_argument("--seeds", type=_int_list, default=None, help="comma-separated run seeds")
    parser.add_argument("--threads", type=int, default=None, help="worker count N")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--max-iterations", type=int, default=None, help="fusion steps per worker")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarm-fusion",
        description="Parallel MRF energy minimization benchmarks",
    )
    parser.add_argument("--log-level", default=None, help="logging level (default from SWARM_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    compare_parser = commands.add_parser("compare", help="compare architectures under one budget")
    _add_run_arguments(compare_parser)
    compare_parser.add_argument(
        "--architectures", type=_name_list, default=None,
        help=f"comma-separated subset of {','.join(ARCHITECTURES)}",
    )

    sweep_parser = commands.add_parser("sweep", help="sweep one architecture parameter")
    _add_run_arguments(sweep_parser)
    sweep_parser.add_argument("--parameter", default=None, help=f"one of {','.join(SWEEP_PARAMETERS)}")
    sweep_parser.add_argument("--values", type=_int_list, default=None, help="comma-separated values")

    plot_parser = commands.add_parser("plot", help="plot trace CSVs as SVG")
    plot_parser.add_argument("traces", nargs="+", type=Path, help="trace CSV files")
    plot_parser.add_argument("--out", type=Path, required=True, help="output SVG path")
    plot_parser.add_argument("--per-worker", action="store_true", help="one line per worker id")
    plot_parser.add_argument("--title", default="Energy vs. time")
    return parser


def _bench_config(args: argparse.Namespace, **extra):
    overrides = {
        "problem": args.problem,
        "budget_ms": args.budget_ms,
        "seeds": args.seeds,
        "threads": args.threads,
        "out": args.out,
        "max_iterations": args.max_iterations,
        **extra,
    }
    return build_config(load_config_file(args.config), overrides)


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = _bench_config(args, architectures=args.architectures)
    _, summary = compare(cfg)
    print(summary.to_string(index=False))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _bench_config(args, parameter=args.parameter, values=args.values)
    if cfg.parameter is None:
        raise UsageError(f"sweep needs --parameter ({', '.join(SWEEP_PARAMETERS)})")
    _, summary = sweep(cfg, cfg.parameter, cfg.values)
    print(summary.to_string(index=False))
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    traces = {path.stem: read_trace(path) for path in args.traces}
    plot_traces(traces, args.out, per_worker=args.per_worker, title=args.title)
    print(f"Saved {args.out}")
    return EXIT_OK


COMMANDS = {
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TraceFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
