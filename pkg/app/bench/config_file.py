"""
Bench configuration: `key = value` text files validated into BenchConfig.

    # comment
    problem = flow-synth
    architectures = pfm, sf-mf
    seeds = 1, 2, 3
    budget_ms = 10000

List values are comma-separated. Command-line flags override file values.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ValidationError, field_validator

from app.errors import UsageError
from config.settings import settings

logger = logging.getLogger("bench.config_file")


# ===== BENCH CONFIG SCHEMA =====

class BenchConfig(BaseModel):
    """Options shared by compare and sweep."""
    problem: str = "stereo-synth"
    architectures: List[str] = ["ae", "sf-mf"]
    budget_ms: float = 10_000.0
    seeds: List[int] = [1, 2, 3, 4, 5]
    threads: int = 4
    out: Path = settings.output_directory

    # problem construction
    problem_seed: int = 1
    width: Optional[int] = None
    height: Optional[int] = None
    labels: Optional[int] = None

    # architecture parameters (None: per-problem defaults)
    alpha: Optional[int] = None
    beta: Optional[int] = None
    share_every: Optional[int] = None
    pregen_count: int = 250
    final_fusion_deadline_ms: Optional[float] = None

    # termination
    max_iterations: Optional[int] = None
    # budgeted comparisons run the whole budget unless a stall limit is given
    stall_limit: Optional[int] = None
    deterministic: Optional[bool] = None

    # sweeps
    parameter: Optional[str] = None
    values: List[int] = []

    class Config:
        extra = "forbid"

    @field_validator("architectures", "seeds", "values", mode="before")
    @classmethod
    def split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("architectures")
    @classmethod
    def lower_names(cls, value: List[str]) -> List[str]:
        return [name.lower() for name in value]

    @field_validator("budget_ms")
    @classmethod
    def non_negative_budget(cls, value: float) -> float:
        if value < 0:
            raise ValueError("budget_ms must be >= 0")
        return value

    @field_validator("threads")
    @classmethod
    def positive_threads(cls, value: int) -> int:
        if value < 1:
            raise ValueError("threads must be >= 1")
        return value


def parse_config_text(text: str) -> Dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment."""
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"Config line {number}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise UsageError(f"Config line {number}: missing key")
        values[key.replace("-", "_")] = value
    return values


def build_config(file_values: Dict[str, Any], overrides: Dict[str, Any]) -> BenchConfig:
    """
    Merge file values with command-line overrides (None means not given).

    Raises:
        UsageError: on unknown keys or invalid values
    """
    merged = dict(file_values)
    merged.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return BenchConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in error['loc'])}: {error['msg']}" for error in e.errors()
        )
        raise UsageError(f"Invalid configuration: {problems}")


def load_config_file(path: Union[str, Path, None]) -> Dict[str, str]:
    if path is None:
        return {}
    path = Path(path)
    if not path.exists():
        raise UsageError(f"Config file not found: {path}")
    logger.info(f"Loading bench config from {path}")
    return parse_config_text(path.read_text(encoding="utf-8"))
