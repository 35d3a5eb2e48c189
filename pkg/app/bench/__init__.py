"""
Bench - benchmark problems, runs, trace files, plots and the CLI.
"""

from .problems import (
    BenchProblem,
    ProblemSpec,
    PROBLEM_SPECS,
    build_problem,
)
from .traces import (
    write_trace,
    read_trace,
    time_to_target,
    final_energy,
    best_energy,
    comparable_payload,
)
from .config_file import (
    BenchConfig,
    parse_config_text,
    build_config,
    load_config_file,
)
from .runner import (
    RunOutcome,
    SWEEP_PARAMETERS,
    SUMMARY_COLUMNS,
    make_config,
    run_architecture,
    summarize,
    compare,
    sweep,
)
from .plotting import plot_traces

__all__ = [
    # Problems
    "BenchProblem",
    "ProblemSpec",
    "PROBLEM_SPECS",
    "build_problem",
    # Traces
    "write_trace",
    "read_trace",
    "time_to_target",
    "final_energy",
    "best_energy",
    "comparable_payload",
    # Config
    "BenchConfig",
    "parse_config_text",
    "build_config",
    "load_config_file",
    # Runner
    "RunOutcome",
    "SWEEP_PARAMETERS",
    "SUMMARY_COLUMNS",
    "make_config",
    "run_architecture",
    "summarize",
    "compare",
    "sweep",
    # Plotting
    "plot_traces",
]
