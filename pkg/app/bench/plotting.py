"""
Energy-versus-time SVG plots of trace files.
"""
import logging
from pathlib import Path
from typing import Mapping, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger("bench.plotting")

# stable element ids so identical inputs give identical SVG files
matplotlib.rcParams["svg.hashsalt"] = "swarm-fusion"


def _draw(ax, x, y, label: str, gid: str) -> None:
    marker = "o" if len(x) == 1 else None
    (line,) = ax.plot(x, y, label=label, marker=marker, linewidth=1.5, drawstyle="steps-post")
    line.set_gid(gid)


def plot_traces(
    traces: Mapping[str, pd.DataFrame],
    out_path: Union[str, Path],
    per_worker: bool = False,
    title: str = "Energy vs. time",
) -> Path:
    """
    Render traces as one self-contained SVG.

    Global view: one best-energy line per trace. Per-worker view: one line
    per worker id with that worker's post-fusion energies.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(8, 5))
    lines = 0
    for name, frame in traces.items():
        if frame.empty:
            continue
        if per_worker:
            for worker, rows in frame.groupby("worker", sort=True):
                _draw(ax, rows["elapsed_ms"].to_numpy(), rows["energy"].to_numpy(),
                      f"{name} worker {worker}", f"trace-worker-{worker}")
                lines += 1
        else:
            _draw(ax, frame["elapsed_ms"].to_numpy(), frame["best_energy"].to_numpy(),
                  name, f"trace-{name}")
            lines += 1

    ax.set_xlabel("elapsed (ms)")
    ax.set_ylabel("energy")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if lines:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Saved {out_path} ({lines} lines)")
    return out_path
