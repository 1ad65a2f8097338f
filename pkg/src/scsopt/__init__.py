"""Spectral conjugate subgradient optimization for nonsmooth problems."""

from scsopt.core import CountingOracle, DomainError, Evaluation, UsageError
from scsopt.solver import BetaRule, LineSearchKind, ScsConfig, SolveResult, solve

__all__ = [
    "BetaRule",
    "CountingOracle",
    "DomainError",
    "Evaluation",
    "LineSearchKind",
    "ScsConfig",
    "SolveResult",
    "UsageError",
    "solve",
]

__version__ = "0.1.0"
