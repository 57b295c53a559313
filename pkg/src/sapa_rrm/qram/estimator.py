from __future__ import annotations

import csv
import io
import time
from typing import List

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ..kbs import RadarConstants
from ..packing import Container
from ..scenario import default_control_grid
from ..validation import check_budgets, check_tasks
from .allocation import DECOUPLED_MODES, MODES, Allocation, allocate
from .majorant import concave_majorant
from .problems import CoupledProblem, TaskProblem
from .traversal import AftParams, MajorantPoint, aft, fast_traversal


class QRAMAllocator(BaseEstimator):
    """Q-RAM radar time allocation over a set of tracking tasks.

    ``fit`` builds the budget-independent majorants for one scene; after
    that ``predict`` allocates any number of budgets cheaply.

    Parameters
    ----------
    mode : {"full", "split-unconstrained", "split-constrained"}
        ``full`` schedules every task on the whole array (update rate and
        dwell only). ``split-unconstrained`` lets tasks use sub-apertures and
        charges each the array fraction it occupies. ``split-constrained``
        packs all tasks onto the array and charges the packed height.
    consts : RadarConstants, optional
    aft_params : AftParams, optional
        Traversal parameters of the constrained mode.
    memoize : bool, default True
        Cache evaluations by index vector.

    Attributes
    ----------
    majorants_ : list
        Per-task concave majorants (decoupled modes) or the joint traversal
        path (constrained mode).
    eval_count_ : int
        Distinct index vectors evaluated while fitting.
    fit_time_ : float
        Wall-clock seconds spent in ``fit``.
    unallocatable_ : list of int
        Tasks without any feasible set-point.
    """

    def __init__(self, mode="split-constrained", consts=None, aft_params=None, memoize=True):
        self.mode = mode
        self.consts = consts
        self.aft_params = aft_params
        self.memoize = memoize

    def _consts(self) -> RadarConstants:
        return self.consts if self.consts is not None else RadarConstants()

    def fit(self, X, y=None):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        t0 = time.perf_counter()
        consts = self._consts()
        envs, specs = check_tasks(X)
        resource = "g" if self.mode == "full" else "g_u"
        problems = []
        for env, spec in zip(envs, specs):
            grid = spec.control_grid or default_control_grid(consts)
            if self.mode == "full":
                grid = grid.full_aperture(consts)
            problems.append(TaskProblem(env, spec, consts, grid, resource, memoize=self.memoize))
        inits = [p.initial_point() for p in problems]
        self.unallocatable_ = [k for k, i in enumerate(inits) if i is None]
        self.task_problems_ = problems

        if self.mode in DECOUPLED_MODES:
            self.paths_ = []
            self.majorants_ = []
            for p, init in zip(problems, inits):
                if init is None:
                    self.paths_.append([])
                    self.majorants_.append([])
                    continue
                path = fast_traversal(init, p)
                origin = MajorantPoint(None, 0.0, 0.0, 0)
                self.paths_.append(path)
                self.majorants_.append(concave_majorant([origin] + path)[1:])
            self.eval_count_ = sum(p.eval_count for p in problems)
            self.problem_ = None
        else:
            coupled = CoupledProblem(
                problems, inits, Container(consts.n_h_total, consts.n_v_total), memoize=self.memoize
            )
            path = aft(coupled.empty_state, coupled, self.aft_params or AftParams())
            self.paths_ = path
            self.majorants_ = path
            self.hull_ = concave_majorant(path)
            self.problem_ = coupled
            self.eval_count_ = coupled.eval_count + sum(p.eval_count for p in problems)
        self.n_tasks_ = len(problems)
        self.fit_time_ = time.perf_counter() - t0
        return self

    def _check_fitted(self):
        if not hasattr(self, "majorants_"):
            raise NotFittedError("QRAMAllocator is not fitted yet; call fit first")

    def allocate(self, r_tot: float) -> Allocation:
        self._check_fitted()
        alloc = allocate(self.majorants_, r_tot, self.mode)
        alloc.unallocatable = list(self.unallocatable_)
        if self.mode in DECOUPLED_MODES:
            for k, choice in enumerate(alloc.tasks):
                if choice is None:
                    continue
                ctrl, ev = self.task_problems_[k].details(choice.index)
                choice.control, choice.quality, choice.local_utility = ctrl, ev.quality, ev.utility
            return alloc

        # tasks carried along at zero utility are dropped; their boxes are
        # removed from the packing in place, which never raises its height
        state = tuple(None if t is None else t.index for t in alloc.tasks)
        dropped = []
        for k, choice in enumerate(alloc.tasks):
            if choice is None:
                continue
            ctrl, ev = self.task_problems_[k].details(choice.index)
            if ev.utility <= 0.0:
                dropped.append(k)
                continue
            choice.control, choice.quality, choice.local_utility = ctrl, ev.quality, ev.utility
            choice.utility = self.task_problems_[k].spec.weight * ev.utility
            choice.resource = ev.resource
        for k in dropped:
            alloc.tasks[k] = None
        if any(t is not None for t in alloc.tasks):
            _, packing = self.problem_.packing(state)
            alloc.packing = packing.without(dropped)
            alloc.total_resource = alloc.packing.height
        else:
            alloc.total_resource = 0.0
        return alloc

    def predict(self, budgets) -> List[Allocation]:
        """One allocation per budget (fraction of radar time)."""
        budgets = check_budgets(budgets)
        return [self.allocate(b) for b in budgets]

    def trace_csv(self) -> str:
        """Traversal trace as CSV rows (step, resource, utility, evals)."""
        self._check_fitted()
        paths = [self.paths_] if self.mode not in DECOUPLED_MODES else self.paths_
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["task", "step", "resource", "utility", "evals"])
        for k, path in enumerate(paths):
            tag = "joint" if self.mode not in DECOUPLED_MODES else k
            for step, p in enumerate(path):
                writer.writerow([tag, step, repr(p.resource), repr(p.utility), p.eval_count_at_creation])
        return buf.getvalue()
