from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence

from .traversal import MajorantPoint

MODES = ("full", "split-unconstrained", "split-constrained")
DECOUPLED_MODES = ("full", "split-unconstrained")


@dataclass
class TaskChoice:
    index: tuple
    control: Any = None
    quality: float = math.nan
    utility: float = 0.0
    resource: float = 0.0
    local_utility: float = math.nan


@dataclass
class Allocation:
    """Result of a budgeted allocation; ``tasks[k] is None`` means dropped."""

    mode: str
    budget: float
    tasks: List[Optional[TaskChoice]]
    total_utility: float = 0.0
    total_resource: float = 0.0
    packing: Any = None
    unallocatable: List[int] = field(default_factory=list)

    @property
    def active_tracks(self) -> int:
        return sum(1 for t in self.tasks if t is not None and t.resource > 0)

    @property
    def mean_angular_error(self) -> float:
        qs = [t.quality for t in self.tasks if t is not None and t.resource > 0]
        return math.fsum(qs) / len(qs) if qs else math.nan


def _allocate_decoupled(hulls: Sequence[Sequence[MajorantPoint]], r_tot: float, mode: str) -> Allocation:
    segments = []
    for k, hull in enumerate(hulls):
        prev_u, prev_g = 0.0, 0.0
        for j, p in enumerate(hull):
            slope = (p.utility - prev_u) / (p.resource - prev_g)
            segments.append((-slope, k, j))
            prev_u, prev_g = p.utility, p.resource
    segments.sort()

    level = [-1] * len(hulls)
    spent = [0.0] * len(hulls)
    for _, k, j in segments:
        if j <= level[k]:
            continue
        trial = list(spent)
        trial[k] = hulls[k][j].resource
        if math.fsum(trial) > r_tot:
            break
        spent = trial
        level[k] = j

    tasks: List[Optional[TaskChoice]] = []
    for k, j in enumerate(level):
        if j < 0:
            tasks.append(None)
        else:
            p = hulls[k][j]
            tasks.append(TaskChoice(index=p.indices, utility=p.utility, resource=p.resource))
    total_u = math.fsum(t.utility for t in tasks if t is not None)
    return Allocation(mode, r_tot, tasks, total_u, math.fsum(spent))


def _allocate_coupled(path: Sequence[MajorantPoint], r_tot: float, mode: str) -> Allocation:
    chosen = None
    for p in path:
        if p.resource <= r_tot:
            chosen = p
    if chosen is None or chosen.resource == 0.0:
        n = len(path[0].indices) if path else 0
        return Allocation(mode, r_tot, [None] * n)
    tasks = [None if idx is None else TaskChoice(index=idx) for idx in chosen.indices]
    return Allocation(mode, r_tot, tasks, chosen.utility, chosen.resource)


def allocate(majorants, r_tot: float, mode: str) -> Allocation:
    """Spend the budget ``r_tot`` along precomputed majorants.

    Decoupled modes take one concave majorant per task and activate or
    upgrade tasks in order of decreasing marginal utility until the next
    segment no longer fits. The constrained mode takes the joint traversal
    path and keeps its last point within budget.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if r_tot < 0 or math.isnan(r_tot):
        raise ValueError(f"budget must be non-negative, got {r_tot}")
    if mode in DECOUPLED_MODES:
        alloc = _allocate_decoupled(majorants, r_tot, mode)
    else:
        alloc = _allocate_coupled(majorants, r_tot, mode)
    assert alloc.total_resource <= r_tot, "allocation exceeds the budget"
    return alloc
