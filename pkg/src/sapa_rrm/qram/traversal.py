"""Greedy traversals of discrete control spaces towards higher utility.

A *problem* object supplies three things:

``evaluate(state)``
    returns an object with ``feasible``, ``utility`` and ``resource``;
``successors(state)``
    the first-order successor states, already excluding frozen dimensions,
    in dimension order;
``eval_count``
    the number of evaluations performed so far.

The evaluation result may also carry ``progress``, see ``_rank``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, List, Sequence, Tuple

RESOURCE_RTOL = 1e-9
INF = math.inf


@dataclass(frozen=True)
class AftParams:
    alpha1: float = 0.7
    n1: int = 2
    n2: int = 3
    n3: int = 3

    def __post_init__(self):
        if not 0.0 < self.alpha1 <= 1.0:
            raise ValueError(f"alpha1 must lie in (0, 1], got {self.alpha1}")
        if min(self.n1, self.n2, self.n3) < 1:
            raise ValueError("n1, n2 and n3 must be at least 1")


@dataclass(frozen=True)
class MajorantPoint:
    indices: Hashable
    utility: float
    resource: float
    eval_count_at_creation: int = 0


def fos(current: Sequence[int], shape: Sequence[int], frozen: Iterable[int] = ()) -> List[Tuple[int, ...]]:
    """First-order successors: ``current + e_i`` for every open dimension ``i``."""
    frozen = set(frozen)
    out = []
    for i, (idx, size) in enumerate(zip(current, shape)):
        if i in frozen or idx + 1 >= size:
            continue
        nxt = list(current)
        nxt[i] = idx + 1
        out.append(tuple(nxt))
    return out


def phi(n: int, params: AftParams) -> float:
    """Stop fraction for the second-order search; grows from alpha1 to 1."""
    return min((1.0 - params.alpha1) * n / params.n1 + params.alpha1, 1.0)


def same_resource(a: float, b: float) -> bool:
    return abs(a - b) <= RESOURCE_RTOL * max(abs(a), abs(b))


def _progress(ev) -> float:
    p = getattr(ev, "progress", None)
    return ev.utility if p is None else p


def _rank(cand, cur) -> Tuple[float, float, float, float]:
    """Sort key of ``cand`` relative to ``cur``.

    The key is (marginal utility, utility gain, marginal progress, -cost).
    Equal or lower resource with a utility gain is strictly dominating and
    ranks +inf; utility losses, no-gain equal-resource moves and infeasible
    points rank -inf. ``progress`` is an optional unsaturated utility that
    separates moves on a flat stretch of the utility surface; it defaults to
    the utility itself.
    """
    if not cand.feasible:
        return -INF, 0.0, -INF, -INF
    du = cand.utility - cur.utility
    dg = cand.resource - cur.resource
    dp = _progress(cand) - _progress(cur)
    if du < 0.0:
        return -INF, du, dp, -dg
    if same_resource(cand.resource, cur.resource):
        return (INF, du, dp, -dg) if du > 0.0 else (-INF, du, dp, -dg)
    if dg < 0.0:
        return INF, du, dp, -dg
    return du / dg, du, dp / dg, -dg


def marginal_utility(candidates: Sequence[Hashable], current: Hashable, problem) -> List[float]:
    cur = problem.evaluate(current)
    return [_rank(problem.evaluate(c), cur)[0] for c in candidates]


def _argmax(ranks: Sequence[Tuple[float, ...]]) -> int:
    best = 0
    for i in range(1, len(ranks)):
        if ranks[i] > ranks[best]:
            best = i
    return best


def _sorted_desc(states, ranks):
    order = sorted(range(len(states)), key=lambda i: (ranks[i], -i), reverse=True)
    return [(states[i], ranks[i]) for i in order]


def _point(state, ev, problem) -> MajorantPoint:
    return MajorantPoint(state, ev.utility, ev.resource, problem.eval_count)


def fast_traversal(init: Hashable, problem) -> List[MajorantPoint]:
    """First-order traversal: always step to the best first-order successor."""
    cur_ev = problem.evaluate(init)
    if not cur_ev.feasible:
        raise ValueError(f"initial point {init!r} is infeasible")
    cur = init
    path = [_point(cur, cur_ev, problem)]
    while cur_ev.utility < 1.0:
        cands = problem.successors(cur)
        if not cands:
            break
        ranks = [_rank(problem.evaluate(c), cur_ev) for c in cands]
        i = _argmax(ranks)
        if ranks[i][0] == -INF:
            break
        cur = cands[i]
        cur_ev = problem.evaluate(cur)
        path.append(_point(cur, cur_ev, problem))
    return path


def aft(init: Hashable, problem, params: AftParams = AftParams()) -> List[MajorantPoint]:
    """Adaptive fast traversal; returns the visited points in order.

    Besides the first-order step, a bounded second-order search looks for
    successors that add utility at unchanged resource. The search width
    shrinks adaptively (``phi``) whenever a round finds nothing that beats
    the incumbent first-order choice.
    """
    cur_ev = problem.evaluate(init)
    if not cur_ev.feasible:
        raise ValueError(f"initial point {init!r} is infeasible")
    cur = init
    path = [_point(cur, cur_ev, problem)]
    first = problem.successors(cur)
    search = list(first)

    while cur_ev.utility < 1.0 and first:
        n = 0
        seen = set(first)
        ranks = [_rank(problem.evaluate(c), cur_ev) for c in first]
        while True:
            i = _argmax(ranks)
            best = ranks[i][0]
            if best == -INF:
                break
            added = []
            search_ranks = [_rank(problem.evaluate(c), cur_ev) for c in search]
            for k, (cand, (mu, *_)) in enumerate(_sorted_desc(search, search_ranks), start=1):
                if k > params.n2 or mu < phi(n, params) * best:
                    break
                g_cand = problem.evaluate(cand).resource
                level = [s for s in problem.successors(cand) if problem.evaluate(s).feasible]
                level = [s for s in level if same_resource(problem.evaluate(s).resource, g_cand)]
                level_ranks = [_rank(problem.evaluate(s), cur_ev) for s in level]
                for m, (s, _) in enumerate(_sorted_desc(level, level_ranks), start=1):
                    if m > params.n3:
                        break
                    if s not in seen:
                        seen.add(s)
                        added.append(s)
            if not added:
                break
            added_ranks = [_rank(problem.evaluate(s), cur_ev) for s in added]
            first = first + added
            ranks = ranks + added_ranks
            search = added
            if all(r[0] < best for r in added_ranks):
                n += 1
        if ranks[i][0] == -INF:
            break
        cur = first[i]
        cur_ev = problem.evaluate(cur)
        path.append(_point(cur, cur_ev, problem))
        first = problem.successors(cur)
        search = list(first)
    return path
