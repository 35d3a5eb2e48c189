"""
Swarm - asynchronous workers sharing a solution pool, architecture
configuration builders, and energy traces.
"""

from .models import (
    IterationStep,
    FinalFusion,
    SwarmConfig,
    PoolEntry,
    make_schedule,
)
from .pool import (
    ReadWriteLock,
    SolutionPool,
)
from .trace import (
    EnergyTrace,
    TraceRecord,
    TRACE_COLUMNS,
)
from .architectures import (
    ARCHITECTURES,
    partition_label_order,
    cfg_ae,
    cfg_fm,
    cfg_pae,
    cfg_pfm,
    cfg_hfm,
    cfg_sf_mf,
    cfg_sf_ss,
    cfg_sf,
)
from .scheduler import (
    SwarmRun,
    run_swarm,
)

__all__ = [
    # Models
    "IterationStep",
    "FinalFusion",
    "SwarmConfig",
    "PoolEntry",
    "make_schedule",
    # Pool and trace
    "ReadWriteLock",
    "SolutionPool",
    "EnergyTrace",
    "TraceRecord",
    "TRACE_COLUMNS",
    # Architectures
    "ARCHITECTURES",
    "partition_label_order",
    "cfg_ae",
    "cfg_fm",
    "cfg_pae",
    "cfg_pfm",
    "cfg_hfm",
    "cfg_sf_mf",
    "cfg_sf_ss",
    "cfg_sf",
    # Scheduler
    "SwarmRun",
    "run_swarm",
]
