"""
Exception hierarchy shared by the solvers, the swarm scheduler and the bench CLI.
"""
from typing import Optional


class SwarmFusionError(Exception):
    """Base class for all engine errors."""
    pass


class ContractViolation(SwarmFusionError, ValueError):
    """Raised when a caller breaks an operation's precondition."""
    pass


class NonSubmodularFusionError(SwarmFusionError):
    """Raised when graph-cut fusion is asked to solve a non-submodular instance."""
    pass


class OracleRefusal(SwarmFusionError):
    """Raised when exhaustive search would exceed its state budget."""

    def __init__(self, states: int, limit: int):
        self.states = states
        self.limit = limit
        super().__init__(
            f"Exhaustive search over {states} states refused (limit is {limit})"
        )


class TraceFormatError(SwarmFusionError):
    """Raised when a trace CSV does not follow the trace schema."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UsageError(SwarmFusionError):
    """Raised for invalid command-line usage (exit code 2)."""
    pass
