"""Evaluators that turn index vectors into (utility, resource) pairs.

Every evaluator memoises by index vector unless ``memoize=False``; with
memoisation on, ``eval_count`` is the number of distinct vectors evaluated.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..kbs import (
    ControlGrid,
    ControlPoint,
    Environment,
    RadarConstants,
    TaskEvaluation,
    TaskSpec,
    evaluate_task,
    resource_unconstrained,
    snr0,
)
from ..packing import Container, PackingSolution, sapa_height, sapa_resource, Box
from .traversal import fos

Index = Tuple[int, ...]


class Evaluated(NamedTuple):
    feasible: bool
    utility: float
    resource: float
    progress: Optional[float] = None


INFEASIBLE = Evaluated(False, 0.0, math.nan)


def _progress(quality: float, spec: TaskSpec) -> float:
    # linear utility without the lower clamp
    return min((quality - spec.q_min) / (spec.q_max - spec.q_min), 1.0)


class _Memo:
    def __init__(self, memoize: bool):
        self.memoize = memoize
        self.cache: Dict = {}
        self.eval_count = 0

    def _cached(self, key, compute):
        if self.memoize:
            hit = self.cache.get(key)
            if hit is not None:
                return hit
        self.eval_count += 1
        value = compute(key)
        if self.memoize:
            self.cache[key] = value
        return value


class TableProblem(_Memo):
    """Synthetic problem backed by a function of the index vector.

    ``fn(index) -> (utility, resource)``; a ``None`` result or NaN resource
    marks the point infeasible. ``frozen(index)`` lists dimensions that may
    no longer be incremented.
    """

    def __init__(self, shape: Sequence[int], fn: Callable, frozen: Optional[Callable] = None, memoize: bool = True):
        super().__init__(memoize)
        self.shape = tuple(shape)
        self.fn = fn
        self.frozen = frozen

    def _compute(self, index):
        res = self.fn(index)
        if res is None or not math.isfinite(res[1]):
            return INFEASIBLE
        return Evaluated(True, float(res[0]), float(res[1]))

    def evaluate(self, index) -> Evaluated:
        return self._cached(tuple(index), self._compute)

    def successors(self, index) -> List[Index]:
        frozen = self.frozen(index) if self.frozen else ()
        return fos(index, self.shape, frozen)


RESOURCE_MODES = ("g", "g_u")


class TaskProblem(_Memo):
    """One tracking task over its 4-dimensional (t_d, f_t, n_h, n_v) grid.

    ``resource="g"`` uses the time fraction; ``"g_u"`` scales it by the
    fraction of the array in use. Utilities are weighted by the task weight.
    Once a task reaches full utility none of its dimensions is incremented.
    """

    def __init__(
        self,
        env: Environment,
        spec: TaskSpec,
        consts: RadarConstants,
        grid: Optional[ControlGrid] = None,
        resource: str = "g",
        memoize: bool = True,
    ):
        super().__init__(memoize)
        if resource not in RESOURCE_MODES:
            raise ValueError(f"resource must be one of {RESOURCE_MODES}, got {resource!r}")
        self.env = env
        self.spec = spec
        self.consts = consts
        self.grid = grid or spec.control_grid
        if self.grid is None:
            raise ValueError("task has no control grid")
        self.resource_mode = resource
        self.shape = self.grid.shape
        self._details: Dict[Index, TaskEvaluation] = {}

    def details(self, index: Index) -> Tuple[ControlPoint, TaskEvaluation]:
        index = tuple(index)
        ctrl = self.grid.point(index)
        ev = self._details.get(index) if self.memoize else None
        if ev is None:
            ev = evaluate_task(ctrl, self.env, self.spec, self.consts)
            if self.memoize:
                self._details[index] = ev
        return ctrl, ev

    def _compute(self, index) -> Evaluated:
        ctrl, ev = self.details(index)
        if not ev.feasible:
            return INFEASIBLE
        g = ev.resource if self.resource_mode == "g" else resource_unconstrained(ev, ctrl, self.consts)
        w = self.spec.weight
        return Evaluated(True, w * ev.utility, g, w * _progress(ev.quality, self.spec))

    def evaluate(self, index) -> Evaluated:
        return self._cached(tuple(index), self._compute)

    def local_utility(self, index) -> float:
        return self.details(index)[1].utility

    def successors(self, index) -> List[Index]:
        if self.local_utility(index) >= 1.0:
            return []
        return fos(index, self.shape)

    def initial_point(self) -> Optional[Index]:
        """First feasible index in lexicographic order, or None.

        Feasibility (detection floor) does not depend on the update rate, so
        only the lowest rate is scanned; shortest dwell is tried first.
        """
        n_td, _, n_nh, n_nv = self.shape
        for i in range(n_td):
            for k in range(n_nh):
                for l in range(n_nv):
                    idx = (i, 0, k, l)
                    if snr0(self.grid.point(idx), self.env, self.consts)[2] and self.evaluate(idx).feasible:
                        return idx
        return None


JointState = Tuple[Optional[Index], ...]


class CoupledProblem(_Memo):
    """All tasks at once, with the packed array-time height as resource.

    A joint state holds, per task, either ``None`` (task not scheduled) or
    its grid index. An unscheduled task has one successor, its initial
    point; a scheduled task below full utility has its first-order grid
    successors. Task evaluations are shared through the per-task problems.
    """

    def __init__(
        self,
        tasks: Sequence[TaskProblem],
        inits: Sequence[Optional[Index]],
        container: Container = Container(),
        memoize: bool = True,
    ):
        super().__init__(memoize)
        self.tasks = list(tasks)
        self.inits = list(inits)
        self.container = container
        self.weights = [t.spec.weight for t in self.tasks]

    @property
    def empty_state(self) -> JointState:
        return (None,) * len(self.tasks)

    def _compute(self, state: JointState) -> Evaluated:
        # an unscheduled task counts its initial point's progress, so that
        # scheduling it is progress-neutral
        u = 0.0
        prog = 0.0
        n_h, n_v, depth = [], [], []
        for k, idx in enumerate(state):
            task = self.tasks[k]
            if idx is None:
                init = self.inits[k]
                if init is not None:
                    prog += task.evaluate(init).progress
                continue
            ev = task.evaluate(idx)
            if not ev.feasible:
                return INFEASIBLE
            u += ev.utility
            prog += ev.progress
            ctrl, tev = task.details(idx)
            n_h.append(ctrl.n_h)
            n_v.append(ctrl.n_v)
            depth.append(tev.resource)
        if not depth:
            return Evaluated(True, u, 0.0, prog)
        g = sapa_height(
            np.array(n_h, dtype=np.int64), np.array(n_v, dtype=np.int64), np.array(depth), self.container
        )
        return Evaluated(True, u, float(g), prog)

    def evaluate(self, state: JointState) -> Evaluated:
        return self._cached(state, self._compute)

    def successors(self, state: JointState) -> List[JointState]:
        out = []
        for k, idx in enumerate(state):
            if idx is None:
                if self.inits[k] is not None:
                    out.append(state[:k] + (self.inits[k],) + state[k + 1 :])
                continue
            task = self.tasks[k]
            if task.local_utility(idx) >= 1.0:
                continue
            for nxt in fos(idx, task.shape):
                out.append(state[:k] + (nxt,) + state[k + 1 :])
        return out

    def packing(self, state: JointState) -> Tuple[float, PackingSolution]:
        boxes = []
        for k, idx in enumerate(state):
            if idx is None:
                continue
            ctrl, ev = self.tasks[k].details(idx)
            boxes.append(Box(k, ctrl.n_h, ctrl.n_v, ev.resource))
        return sapa_resource(boxes, self.container)
