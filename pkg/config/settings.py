"""Configuration management using pydantic-settings."""
from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Engine and benchmark settings loaded from SWARM_* environment variables."""

    # Fixed-point scaling for integer graph capacities (cost * scale, rounded)
    fixed_point_scale: int = 1_000_000

    # TRW-S budget per multi-way fusion
    trws_max_passes: int = 30
    trws_rel_tol: float = 1e-6

    # Swarm termination: fusions without pool-best improvement, across all workers
    stall_limit: int = 20

    # Round-robin lock-step workers (seed-reproducible traces)
    deterministic: bool = False

    # Re-evaluate energies on every pool publish
    debug_checks: bool = False

    # Exhaustive search refuses larger state spaces
    oracle_state_limit: int = 1_000_000

    # Gaussian sigmas (pixels) for stagger/perturb flow proposals
    stagger_sigma: float = 1.0
    perturb_sigma: float = 1.0

    # PFM/PAE final fusion starts at this fraction of the budget unless set explicitly
    pfm_deadline_fraction: float = 0.8

    # Output settings
    output_directory: Path = Path("./output")
    log_level: str = "INFO"

    class Config:
        env_prefix = "SWARM_"
        env_file = ".env"
        env_file_encoding = "utf-8"


settings = Settings()
