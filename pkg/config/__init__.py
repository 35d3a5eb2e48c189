"""Engine settings (SWARM_* environment variables)."""
from .settings import Settings, settings

__all__ = ["Settings", "settings"]
