"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math
from typing import Dict, List, Sequence, Tuple

import mpmath
import numpy as np
from scipy.optimize import brentq


# --- track sharpness ---------------------------------------------------------

def sharpness_residual(v, alpha, beta):
    return 1.0 + (beta / 2.0 + 2.0) * v * v - alpha * beta * v ** 2.4


def sharpness_residual_exact(v: float, alpha: float, beta: float) -> float:
    """Residual at the given floats, evaluated with 50 significant digits."""
    with mpmath.workdps(50):
        v, a, b = mpmath.mpf(v), mpmath.mpf(alpha), mpmath.mpf(beta)
        return float(1 + (b / 2 + 2) * v**2 - a * b * v ** (mpmath.mpf(12) / 5))


def sharpness_scan(alpha: float, beta: float, v_max: float = 1e3, n: int = 20001) -> float:
    """Smallest positive root by a dense log-grid scan refined with brentq."""
    v = np.logspace(-6, math.log10(v_max), n)
    f = 1.0 + (beta / 2.0 + 2.0) * v * v - alpha * beta * v ** 2.4
    neg = np.nonzero(f < 0.0)[0]
    if neg.size == 0:
        raise ValueError("no sign change on the scan grid")
    j = neg[0]
    lo = v[j - 1] if j > 0 else 0.0
    return brentq(sharpness_residual, lo, v[j], args=(alpha, beta), xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


# --- packing -----------------------------------------------------------------

def overlap_violations(records, tol=1e-12) -> int:
    bad = 0
    for a, b in itertools.combinations(records, 2):
        ox = min(a["x"] + a["w"], b["x"] + b["w"]) - max(a["x"], b["x"])
        oy = min(a["y"] + a["h"], b["y"] + b["h"]) - max(a["y"], b["y"])
        oz = min(a["z"] + a["d"], b["z"] + b["d"]) - max(a["z"], b["z"])
        if ox > 0 and oy > 0 and oz > tol:
            bad += 1
    return bad


def container_violations(records, width, height) -> int:
    return sum(
        1
        for r in records
        if r["x"] < 0 or r["y"] < 0 or r["z"] < 0 or r["x"] + r["w"] > width or r["y"] + r["h"] > height
    )


def exact_height(boxes: Sequence[Tuple[int, int, float]], width: int = 48, height: int = 48, cell: int = 12) -> float:
    """Optimal strip height for boxes whose sides are multiples of ``cell``.

    Some optimal packing is a normal pattern: every x and y is a multiple of
    ``cell`` and every box rests on the floor or on a box top. Placing boxes
    in order of non-decreasing z, each z is the highest top under its
    footprint. The search enumerates that order and every grid position,
    with branch and bound on the incumbent height.
    """
    nx, ny = width // cell, height // cell
    sizes = [(w // cell, h // cell, float(d)) for w, h, d in boxes]
    n = len(sizes)
    best = [math.fsum(d for *_, d in sizes)]  # stacking is always feasible
    tops = [0.0] * (nx * ny)
    cells = {}
    for w, h, _ in sizes:
        if (w, h) not in cells:
            cells[w, h] = [
                [(x + i) * ny + y + j for i in range(w) for j in range(h)]
                for x in range(nx - w + 1)
                for y in range(ny - h + 1)
            ]

    def rec(placed: int, z_prev: float, cur_h: float):
        if placed == (1 << n) - 1:
            best[0] = min(best[0], cur_h)
            return
        rest = [i for i in range(n) if not placed >> i & 1]
        d_max = max(sizes[i][2] for i in rest)
        if max(cur_h, z_prev + d_max) >= best[0]:
            return
        seen = set()
        for i in rest:
            w, h, d = sizes[i]
            if (w, h, d) in seen:
                continue
            seen.add((w, h, d))
            for fp in cells[w, h]:
                z = max(tops[c] for c in fp)
                if z < z_prev or z + d >= best[0]:
                    continue
                saved = [tops[c] for c in fp]
                for c in fp:
                    tops[c] = z + d
                rec(placed | 1 << i, z, max(cur_h, z + d))
                for c, v in zip(fp, saved):
                    tops[c] = v

    rec(0, 0.0, 0.0)
    return best[0]


def gap_candidates_bruteforce(w: int, h: int, d: float, width: int = 48, height: int = 48) -> List[Tuple[int, int, float]]:
    """Corner points of a single box at the origin that touch it and lie inside."""
    pts = []
    for x, y, z in itertools.product((0, w), (0, h), (0.0, d)):
        n_out = (x == w) + (y == h) + (z == d)
        if n_out == 1 and x < width and y < height:
            pts.append((x, y, z))
    return pts


# --- allocation --------------------------------------------------------------

def reference_hull(points: Sequence[Tuple[float, float]]) -> List[int]:
    """Quadratic-time upper-left hull: indices of points that are hull vertices.

    A point is kept when no other point weakly dominates it and it is not on
    or below a chord between two other kept-candidate points bracketing it.
    """
    idx = list(range(len(points)))
    cand = []
    for i in idx:
        gi, ui = points[i]
        dominated = any(
            (points[j][0] <= gi and points[j][1] >= ui) and (points[j] != points[i] or j < i) for j in idx if j != i
        )
        if not dominated:
            cand.append(i)
    keep = []
    for i in cand:
        gi, ui = points[i]
        below = False
        for a in cand:
            for b in cand:
                ga, ua = points[a]
                gb, ub = points[b]
                if not ga < gi < gb:
                    continue
                chord = ua + (ub - ua) * (gi - ga) / (gb - ga)
                if ui <= chord:
                    below = True
                    break
            if below:
                break
        if not below:
            keep.append(i)
    return sorted(keep, key=lambda i: points[i][0])


def best_within(points: Dict, budget: float) -> float:
    """Largest utility among ``{state: (u, g)}`` with g within budget."""
    return max((u for u, g in points.values() if g <= budget), default=0.0)
