"""crawlgait Core Layer - signals, friction, reduced dynamics, solver and analysis"""

from crawlgait.core.dynamics import DynamicsFlag, ReducedDynamics
from crawlgait.core.models import ContinuousCrawler, DiscreteCrawler, reduce_model
from crawlgait.core.solver import SolverConfig, Trajectory

__all__ = [
    "DynamicsFlag",
    "ReducedDynamics",
    "ContinuousCrawler",
    "DiscreteCrawler",
    "reduce_model",
    "SolverConfig",
    "Trajectory",
]
