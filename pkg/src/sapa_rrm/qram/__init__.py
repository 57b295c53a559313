"""Q-RAM allocation: traversals, concave majorants and budgeted allocation."""

from .allocation import MODES, Allocation, TaskChoice, allocate
from .estimator import QRAMAllocator
from .majorant import concave_majorant
from .problems import CoupledProblem, Evaluated, TableProblem, TaskProblem
from .traversal import AftParams, MajorantPoint, aft, fast_traversal, fos, marginal_utility, phi

fast_traversal_single = fast_traversal

__all__ = [
    "MODES",
    "AftParams",
    "Allocation",
    "CoupledProblem",
    "Evaluated",
    "MajorantPoint",
    "QRAMAllocator",
    "TableProblem",
    "TaskChoice",
    "TaskProblem",
    "aft",
    "allocate",
    "concave_majorant",
    "fast_traversal",
    "fast_traversal_single",
    "fos",
    "marginal_utility",
    "phi",
]
