"""
Benchmark runner: architecture comparisons and parameter sweeps.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from app.errors import ContractViolation, UsageError
from app.proposals.generators import ConstantLabelGenerator
from app.swarm.architectures import (
    ARCHITECTURES,
    cfg_ae,
    cfg_fm,
    cfg_hfm,
    cfg_pae,
    cfg_pfm,
    cfg_sf,
    cfg_sf_mf,
    cfg_sf_ss,
)
from app.swarm.models import SwarmConfig
from app.swarm.scheduler import run_swarm

from .config_file import BenchConfig
from .problems import BenchProblem, build_problem
from .traces import FLOAT_FORMAT, best_energy, final_energy, time_to_target, write_trace

logger = logging.getLogger("bench.runner")

# sweep parameter -> architecture it is swept on
SWEEP_PARAMETERS: Dict[str, str] = {
    "beta": "sf-mf",
    "share_frequency": "sf-mf",
    "alpha": "sf-ss",
    "threads": "sf",
}

SUMMARY_COLUMNS = [
    "architecture", "parameter", "value", "seed", "final_energy",
    "best_energy", "target", "time_to_target_ms", "fusions",
]


@dataclass
class RunOutcome:
    architecture: str
    parameter: str
    value: str
    seed: int
    trace: pd.DataFrame
    fusions: int
    path: Optional[Path] = None

    @property
    def final_energy(self) -> float:
        return final_energy(self.trace)

    @property
    def best_energy(self) -> float:
        return best_energy(self.trace)


def validate_architectures(names: Sequence[str]) -> List[str]:
    unknown = [name for name in names if name not in ARCHITECTURES]
    if unknown:
        raise UsageError(
            f"Unknown architecture(s): {', '.join(unknown)}; valid names: {', '.join(ARCHITECTURES)}"
        )
    if not names:
        raise UsageError(f"No architectures given; valid names: {', '.join(ARCHITECTURES)}")
    return list(names)


def _run_options(cfg: BenchConfig, seed: int) -> Dict:
    return {
        "budget_ms": cfg.budget_ms,
        "seed": seed,
        "stall_limit": cfg.stall_limit,
        "max_iterations": cfg.max_iterations,
        "deterministic": cfg.deterministic,
    }


def make_config(problem: BenchProblem, architecture: str, cfg: BenchConfig, seed: int,
                threads: Optional[int] = None, **params) -> SwarmConfig:
    """
    SwarmConfig for one architecture on one problem.

    Raises:
        UsageError: when the parameters break a config constraint (beta <= N-1)
    """
    n = threads or cfg.threads
    spec = problem.spec
    alpha = params.get("alpha", cfg.alpha)
    beta = params.get("beta", cfg.beta)
    share_every = params.get("share_every", cfg.share_every)
    options = _run_options(cfg, seed)
    deadline = cfg.final_fusion_deadline_ms
    try:
        if architecture == "ae":
            return cfg_ae(**options)
        if architecture == "fm":
            return cfg_fm(**options)
        if architecture == "pae":
            return cfg_pae(n, problem.label_order, deadline, **options)
        if architecture == "pfm":
            return cfg_pfm(n, deadline, **options)
        if architecture == "hfm":
            return cfg_hfm(n, cfg.pregen_count, **options)
        if architecture == "sf-mf":
            if beta is not None:
                config = cfg_sf(n, 1, beta, 4 if share_every is None else share_every, **options)
                return config.with_options(name="sf-mf")
            return cfg_sf_mf(n, 4 if share_every is None else share_every, **options)
        if architecture == "sf-ss":
            return cfg_sf_ss(n, spec.sf_ss_alpha if alpha is None else alpha, **options)
        if architecture == "sf":
            return cfg_sf(
                n,
                spec.sf_alpha if alpha is None else alpha,
                min(spec.sf_beta, n - 1) if beta is None else beta,
                spec.sf_share_every if share_every is None else share_every,
                **options,
            )
    except ContractViolation as e:
        raise UsageError(str(e))
    raise UsageError(f"Unknown architecture '{architecture}'; valid names: {', '.join(ARCHITECTURES)}")


def run_architecture(problem: BenchProblem, config: SwarmConfig) -> Tuple[pd.DataFrame, int]:
    """Run one swarm; returns (trace frame, fusion count)."""
    if config.name == "ae":
        order = problem.label_order
        generators = lambda worker: ConstantLabelGenerator(order)  # noqa: E731
    else:
        generators = problem.generators(config.thread_count)
    _, trace = run_swarm(config, problem.model, generators)
    return trace.to_frame(), trace.fusion_count()


def _trace_name(outcome_arch: str, seed: int, parameter: str = "", value: str = "") -> str:
    if parameter:
        return f"{outcome_arch}_{parameter}-{value}_seed{seed}.csv"
    return f"{outcome_arch}_seed{seed}.csv"


def summarize(outcomes: Sequence[RunOutcome]) -> pd.DataFrame:
    """
    One summary row per run. target is the weakest competitor's final
    energy among runs sharing the same seed.
    """
    targets: Dict[int, float] = {}
    for outcome in outcomes:
        targets[outcome.seed] = max(targets.get(outcome.seed, float("-inf")), outcome.final_energy)
    rows = []
    for outcome in outcomes:
        target = targets[outcome.seed]
        rows.append({
            "architecture": outcome.architecture,
            "parameter": outcome.parameter,
            "value": outcome.value,
            "seed": outcome.seed,
            "final_energy": outcome.final_energy,
            "best_energy": outcome.best_energy,
            "target": target,
            "time_to_target_ms": time_to_target(outcome.trace, target),
            "fusions": outcome.fusions,
        })
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def write_summary(summary: pd.DataFrame, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "summary.csv"
    summary.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {path} ({len(summary)} runs)")
    return path


def _execute(problem: BenchProblem, config: SwarmConfig, out_dir: Path,
             parameter: str = "", value: str = "") -> RunOutcome:
    frame, fusions = run_architecture(problem, config)
    path = write_trace(frame, out_dir / _trace_name(config.name, config.seed, parameter, value))
    outcome = RunOutcome(config.name, parameter, value, config.seed, frame, fusions, path)
    logger.info(
        f"{config.name} {parameter}{'=' + value if parameter else ''} seed={config.seed}: "
        f"final {outcome.final_energy:.6f} after {fusions} fusions"
    )
    return outcome


def compare(cfg: BenchConfig) -> Tuple[List[RunOutcome], pd.DataFrame]:
    """Every architecture for every seed under one budget."""
    architectures = validate_architectures(cfg.architectures)
    problem = build_problem(cfg.problem, cfg.problem_seed, cfg.width, cfg.height, cfg.labels)
    configs = [
        make_config(problem, architecture, cfg, seed)
        for seed in cfg.seeds
        for architecture in architectures
    ]
    outcomes = [_execute(problem, config, cfg.out) for config in configs]
    summary = summarize(outcomes)
    write_summary(summary, cfg.out)
    return outcomes, summary


def sweep(cfg: BenchConfig, parameter: str, values: Sequence[int]) -> Tuple[List[RunOutcome], pd.DataFrame]:
    """
    One run family per parameter value.

    Raises:
        UsageError: for unknown parameters or values breaking beta <= N-1
    """
    if parameter not in SWEEP_PARAMETERS:
        raise UsageError(
            f"Unknown sweep parameter '{parameter}'; valid: {', '.join(SWEEP_PARAMETERS)}"
        )
    if not values:
        raise UsageError("Sweep needs at least one value")
    architecture = SWEEP_PARAMETERS[parameter]
    problem = build_problem(cfg.problem, cfg.problem_seed, cfg.width, cfg.height, cfg.labels)

    configs = []
    for value in values:
        for seed in cfg.seeds:
            if parameter == "beta":
                if value > cfg.threads - 1:
                    raise UsageError(f"beta={value} violates beta <= N-1 with N={cfg.threads}")
                config = make_config(problem, architecture, cfg, seed, beta=value)
            elif parameter == "share_frequency":
                config = make_config(problem, architecture, cfg, seed, share_every=value)
            elif parameter == "alpha":
                config = make_config(problem, architecture, cfg, seed, alpha=value)
            else:
                if value < 1:
                    raise UsageError(f"threads must be >= 1, got {value}")
                config = make_config(problem, architecture, cfg, seed, threads=value, beta=value - 1)
            configs.append((str(value), config))

    outcomes = [_execute(problem, config, cfg.out, parameter, value) for value, config in configs]
    summary = summarize(outcomes)
    write_summary(summary, cfg.out)
    return outcomes, summary
