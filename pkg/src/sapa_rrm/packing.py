"""Three-dimensional strip packing of task boxes onto the array-time volume.

A task occupies ``w`` horizontal by ``h`` vertical elements for a fraction
``d`` of the radar time. Boxes are never rotated. The container has a fixed
``width x height`` cross-section and unbounded depth; the packing height is
the joint radar-time resource of the tasks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator

from . import _packing_kernels as _k

# sort criteria on placed boxes, descending:
#   C1: z+d; y+h; x+w    C2: z+d; x+w; y+h
C1 = 1
C2 = 2
DEFAULT_CRITERIA = (C1, C2)


@dataclass(frozen=True)
class Container:
    width: int = 48
    height: int = 48


@dataclass(frozen=True)
class Box:
    id: Hashable
    w: int
    h: int
    d: float

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box {self.id!r} needs w, h >= 1, got {self.w}x{self.h}")
        if not self.d > 0:
            raise ValueError(f"box {self.id!r} needs positive depth, got {self.d}")


@dataclass(frozen=True)
class Placement:
    box: Box
    x: int
    y: int
    z: float

    @property
    def top(self) -> float:
        return self.z + self.box.d


@dataclass
class PackingSolution:
    placements: List[Placement] = field(default_factory=list)

    @property
    def height(self) -> float:
        return max((p.top for p in self.placements), default=0.0)

    def __len__(self):
        return len(self.placements)

    def by_id(self):
        return {p.box.id: p for p in self.placements}

    def without(self, ids: Iterable[Hashable]) -> "PackingSolution":
        """Drop boxes in place; the remaining placements stay valid."""
        drop = set(ids)
        return PackingSolution([p for p in self.placements if p.box.id not in drop])

    def to_records(self):
        return [
            {"id": p.box.id, "x": p.x, "y": p.y, "z": p.z, "w": p.box.w, "h": p.box.h, "d": p.box.d}
            for p in self.placements
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_records(), indent=1, default=str)

    @classmethod
    def from_records(cls, records) -> "PackingSolution":
        return cls([Placement(Box(r["id"], r["w"], r["h"], r["d"]), r["x"], r["y"], r["z"]) for r in records])

    def _arrays(self):
        ps = self.placements
        return (
            np.array([p.x for p in ps], dtype=np.int64),
            np.array([p.y for p in ps], dtype=np.int64),
            np.array([p.z for p in ps], dtype=np.float64),
            np.array([p.box.w for p in ps], dtype=np.int64),
            np.array([p.box.h for p in ps], dtype=np.int64),
            np.array([p.box.d for p in ps], dtype=np.float64),
        )


def check_boxes(boxes: Sequence[Box], container: Container) -> None:
    for b in boxes:
        if b.w > container.width or b.h > container.height:
            raise ValueError(
                f"box {b.id!r} ({b.w}x{b.h}) exceeds the {container.width}x{container.height} cross-section"
            )


def _box_arrays(boxes: Sequence[Box]):
    return (
        np.array([b.w for b in boxes], dtype=np.int64),
        np.array([b.h for b in boxes], dtype=np.int64),
        np.array([b.d for b in boxes], dtype=np.float64),
    )


def get_all_gaps(solution: PackingSolution, container: Container = Container()) -> List[Tuple[int, int, float]]:
    """Extreme points of ``solution`` in deepest-bottom-left order.

    The points are regenerated from the placement sequence, so the result
    matches the candidate list DBLF saw before its next placement.
    """
    if not solution.placements:
        return [(0, 0, 0.0)]
    ex, ey, ez = _k.gaps_kernel(container.width, container.height, *solution._arrays())
    return [(int(a), int(b), float(c)) for a, b, c in zip(ex, ey, ez)]


def fits(box: Box, position, solution: PackingSolution, container: Container = Container()) -> bool:
    x, y, z = position
    if x < 0 or y < 0 or z < 0:
        return False
    if x + box.w > container.width or y + box.h > container.height:
        return False
    for p in solution.placements:
        if (
            x < p.x + p.box.w
            and p.x < x + box.w
            and y < p.y + p.box.h
            and p.y < y + box.h
            and z < p.top - _k.Z_EPS
            and p.z < z + box.d - _k.Z_EPS
        ):
            return False
    return True


def _solution(boxes, order, x, y, z) -> PackingSolution:
    return PackingSolution(
        [Placement(boxes[int(o)], int(a), int(b), float(c)) for o, a, b, c in zip(order, x, y, z)]
    )


def dblf(ordered_boxes: Sequence[Box], container: Container = Container()) -> PackingSolution:
    """Place each box at the first extreme point (deepest-bottom-left) where it fits."""
    boxes = list(ordered_boxes)
    check_boxes(boxes, container)
    if not boxes:
        return PackingSolution()
    x, y, z = _k.dblf_kernel(container.width, container.height, *_box_arrays(boxes))
    return _solution(boxes, range(len(boxes)), x, y, z)


def sort_solution(solution: PackingSolution, criterion: int) -> List[Box]:
    """Boxes of ``solution`` re-ordered descending under ``criterion``."""
    if not solution.placements:
        return []
    order = _k.sort_kernel(*solution._arrays(), criterion)
    return [solution.placements[int(i)].box for i in order]


def shake(
    boxes: Sequence[Box],
    criteria: Sequence[int] = DEFAULT_CRITERIA,
    k: int = 1,
    container: Container = Container(),
) -> PackingSolution:
    """DBLF on ``boxes`` followed by ``k`` rounds of forward/backward shaking.

    A re-packed solution replaces the incumbent only on strictly smaller
    height, so the result is never higher than plain DBLF on the input order.
    """
    boxes = list(boxes)
    check_boxes(boxes, container)
    if not boxes:
        return PackingSolution()
    crit = np.array(criteria, dtype=np.int64)
    order, x, y, z, _ = _k.shake_kernel(container.width, container.height, *_box_arrays(boxes), crit, k)
    return _solution(boxes, order, x, y, z)


def initial_order(boxes: Sequence[Box]) -> List[Box]:
    """Descending array area, ties by descending depth, then input position."""
    boxes = list(boxes)
    if not boxes:
        return []
    order = _k.initial_order_kernel(*_box_arrays(boxes))
    return [boxes[int(i)] for i in order]


def sapa_height(w, h, d, container: Container = Container(), criteria=DEFAULT_CRITERIA, k: int = 1) -> float:
    """Packed height for raw arrays; the hot path of the coupled evaluator."""
    if len(w) == 0:
        return 0.0
    crit = np.asarray(criteria, dtype=np.int64)
    return _k.sapa_height_kernel(
        container.width,
        container.height,
        np.asarray(w, dtype=np.int64),
        np.asarray(h, dtype=np.int64),
        np.asarray(d, dtype=np.float64),
        crit,
        k,
    )[4]


def sapa_resource(
    boxes: Sequence[Box],
    container: Container = Container(),
    criteria: Sequence[int] = DEFAULT_CRITERIA,
    k: int = 1,
) -> Tuple[float, PackingSolution]:
    """Joint resource of concurrently scheduled tasks: the shaken packing height.

    Any box with a non-finite depth (an infeasible task) makes the total NaN.
    """
    boxes = list(boxes)
    if any(not math.isfinite(b.d) for b in boxes):
        return math.nan, PackingSolution()
    check_boxes(boxes, container)
    if not boxes:
        return 0.0, PackingSolution()
    w, h, d = _box_arrays(boxes)
    crit = np.array(criteria, dtype=np.int64)
    order, x, y, z, height = _k.sapa_height_kernel(container.width, container.height, w, h, d, crit, k)
    return float(height), _solution(boxes, order, x, y, z)


class StripPacker(BaseEstimator):
    """Estimator wrapper: ``fit`` packs a list of boxes.

    Parameters
    ----------
    width, height : int
        Container cross-section in elements.
    criteria : tuple of int
        Shaking sort criteria (``C1``, ``C2``).
    k : int
        Number of shaking rounds; 0 gives plain DBLF on the initial order.

    Attributes
    ----------
    solution_ : PackingSolution
    height_ : float
    """

    def __init__(self, width=48, height=48, criteria=DEFAULT_CRITERIA, k=1):
        self.width = width
        self.height = height
        self.criteria = criteria
        self.k = k

    def fit(self, boxes, y=None):
        container = Container(self.width, self.height)
        boxes = [b if isinstance(b, Box) else Box(i, int(b[0]), int(b[1]), float(b[2])) for i, b in enumerate(boxes)]
        self.height_, self.solution_ = sapa_resource(boxes, container, tuple(self.criteria), self.k)
        return self

    def transform(self, boxes=None):
        """Placement table with columns x, y, z, w, h, d (placement order)."""
        if not hasattr(self, "solution_"):
            raise AttributeError("StripPacker is not fitted yet; call fit first")
        return np.array(
            [[p.x, p.y, p.z, p.box.w, p.box.h, p.box.d] for p in self.solution_.placements], dtype=float
        ).reshape(-1, 6)

    def fit_transform(self, boxes, y=None):
        return self.fit(boxes).transform()
