"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import math
from typing import List, Tuple

import numpy as np

from .kbs import Environment, TaskSpec


def check_tasks(X) -> Tuple[List[Environment], List[TaskSpec]]:
    """Accept a scene, a list of targets or a list of ``(env, spec)`` pairs."""
    items = getattr(X, "targets", X)
    envs, specs = [], []
    for i, item in enumerate(items):
        if hasattr(item, "env") and hasattr(item, "spec"):
            env, spec = item.env, item.spec
        else:
            try:
                env, spec = item
            except (TypeError, ValueError):
                raise TypeError(f"task {i}: expected (Environment, TaskSpec), got {type(item).__name__}") from None
        if not isinstance(env, Environment) or not isinstance(spec, TaskSpec):
            raise TypeError(f"task {i}: expected (Environment, TaskSpec)")
        envs.append(env)
        specs.append(spec)
    if not envs:
        raise ValueError("at least one task is required")
    total = math.fsum(s.weight for s in specs)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"task weights must sum to 1, got {total!r}")
    return envs, specs


def check_budgets(budgets) -> List[float]:
    arr = np.atleast_1d(np.asarray(budgets, dtype=float))
    if arr.ndim != 1:
        raise ValueError("budgets must be a scalar or a 1-D sequence")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError(f"budgets must be finite and non-negative, got {arr.tolist()}")
    return [float(b) for b in arr]


def parse_budgets(text: str) -> List[float]:
    """Parse ``"0.1,0.2"`` or ``"start:step:end"`` (end inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"budget range must be start:step:end, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad budget range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + i * step, 12) for i in range(n)]
    else:
        values = [float(v) for v in text.split(",") if v.strip()]
    if not values or any(not 0.0 < v <= 1.0 for v in values):
        raise ValueError(f"budgets must lie in (0, 1], got {text!r}")
    return values
