from __future__ import annotations

from typing import List, Sequence

from .traversal import MajorantPoint


def _cross(o: MajorantPoint, a: MajorantPoint, b: MajorantPoint) -> float:
    return (a.resource - o.resource) * (b.utility - o.utility) - (a.utility - o.utility) * (b.resource - o.resource)


def concave_majorant(points: Sequence[MajorantPoint]) -> List[MajorantPoint]:
    """Upper-left hull of ``points`` in the (resource, utility) plane.

    The result starts at the cheapest point and has strictly increasing
    resource and utility with strictly decreasing segment slopes; collinear
    interior points are dropped.
    """
    if not points:
        raise ValueError("concave_majorant needs at least one point")
    order = sorted(range(len(points)), key=lambda i: (points[i].resource, -points[i].utility, i))
    front: List[MajorantPoint] = []
    for i in order:
        p = points[i]
        if front and p.utility <= front[-1].utility:
            continue
        front.append(p)

    hull: List[MajorantPoint] = []
    for p in front:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0.0:
            hull.pop()
        hull.append(p)
    return hull
