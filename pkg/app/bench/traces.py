"""
Trace CSV I/O and trace-derived metrics.

Schema: elapsed_ms,worker,iteration,energy,best_energy with floats printed
to 17 significant digits so values read back exactly.
"""
import logging
import re
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from pandas.errors import EmptyDataError, ParserError

from app.errors import TraceFormatError
from app.swarm.trace import TRACE_COLUMNS, EnergyTrace

logger = logging.getLogger("bench.traces")

FLOAT_FORMAT = "%.17g"


def write_trace(trace: Union[EnergyTrace, pd.DataFrame], path: Union[str, Path]) -> Path:
    """Write a trace CSV; returns the path."""
    frame = trace.to_frame() if isinstance(trace, EnergyTrace) else trace
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame[TRACE_COLUMNS].to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_trace(path: Union[str, Path]) -> pd.DataFrame:
    """
    Read and validate a trace CSV.

    Raises:
        TraceFormatError: on a wrong header or a malformed row (1-based line number)
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except EmptyDataError:
        raise TraceFormatError("missing header", line=1)
    except ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise TraceFormatError(f"wrong number of fields ({e})",
                               line=int(match.group(1)) if match else None)

    if list(frame.columns) != TRACE_COLUMNS:
        raise TraceFormatError(
            f"header must be {','.join(TRACE_COLUMNS)}, got {','.join(map(str, frame.columns))}",
            line=1,
        )

    parsed = pd.DataFrame(index=frame.index)
    for column in TRACE_COLUMNS:
        parsed[column] = _parse_floats(frame[column], column)
    for column in ("worker", "iteration"):
        fractional = parsed[column] != parsed[column].round()
        if fractional.any():
            raise TraceFormatError(f"column {column} must be an integer",
                                   line=int(fractional.idxmax()) + 2)
        parsed[column] = parsed[column].astype("int64")
    return parsed


def _parse_floats(values: pd.Series, column: str) -> pd.Series:
    # float() reads shortest-repr and 17-digit strings back to the same double;
    # pandas' fast parser does not
    parsed = []
    for row, text in enumerate(values):
        try:
            value = float(text)
        except ValueError:
            raise TraceFormatError(f"column {column} has non-numeric value {text!r}", line=row + 2)
        if value != value:
            raise TraceFormatError(f"column {column} has non-numeric value {text!r}", line=row + 2)
        parsed.append(value)
    return pd.Series(parsed, index=values.index, dtype="float64")


def time_to_target(frame: pd.DataFrame, target: float) -> Optional[float]:
    """First elapsed_ms at which best_energy <= target, or None."""
    reached = frame[frame["best_energy"] <= target]
    if reached.empty:
        return None
    return float(reached["elapsed_ms"].iloc[0])


def final_energy(frame: pd.DataFrame) -> float:
    """Best energy at the end of the run."""
    if frame.empty:
        return float("inf")
    return float(frame["best_energy"].iloc[-1])


def best_energy(frame: pd.DataFrame) -> float:
    if frame.empty:
        return float("inf")
    return float(frame["best_energy"].min())


def comparable_payload(frame: pd.DataFrame) -> pd.DataFrame:
    """Trace without timestamps, for run-to-run comparisons."""
    return frame[[c for c in TRACE_COLUMNS if c != "elapsed_ms"]].reset_index(drop=True)
