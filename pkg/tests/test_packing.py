import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sapa_rrm.packing import (
    C1,
    C2,
    Box,
    Container,
    PackingSolution,
    Placement,
    StripPacker,
    dblf,
    fits,
    get_all_gaps,
    initial_order,
    sapa_height,
    sapa_resource,
    shake,
    sort_solution,
)

from oracles import container_violations, exact_height, gap_candidates_bruteforce, overlap_violations

FULL = Container(48, 48)


def random_boxes(rng, n, sizes=None, d_max=0.2):
    out = []
    for i in range(n):
        if sizes is None:
            w, h = int(rng.integers(1, 49)), int(rng.integers(1, 49))
        else:
            w, h = int(rng.choice(sizes)), int(rng.choice(sizes))
        out.append(Box(i, w, h, float(rng.uniform(1e-4, d_max))))
    return out


def test_gaps_empty():
    assert get_all_gaps(PackingSolution()) == [(0, 0, 0.0)]


@pytest.mark.parametrize("w,h,d", [(12, 24, 0.05), (48, 6, 0.01), (30, 48, 0.1), (48, 48, 0.2)])
def test_gaps_single_box_match_bruteforce(w, h, d):
    sol = dblf([Box(0, w, h, d)])
    gaps = set(get_all_gaps(sol))
    for p in gap_candidates_bruteforce(w, h, d):
        assert p in gaps
    if w < 48 and h < 48:
        assert {(w, 0, 0.0), (0, h, 0.0), (0, 0, d)} <= gaps


def test_gaps_sorted_deepest_first():
    sol = dblf([Box(0, 48, 48, 0.01), Box(1, 48, 48, 0.02), Box(2, 12, 12, 0.01)])
    gaps = get_all_gaps(sol)
    keys = [(z, y, x) for x, y, z in gaps]
    assert keys == sorted(keys)


def test_fits_examples():
    assert fits(Box(0, 48, 48, 0.1), (0, 0, 0.0), PackingSolution(), FULL)
    assert not fits(Box(0, 25, 25, 0.1), (24, 0, 0.0), PackingSolution(), FULL)
    placed = PackingSolution([Placement(Box(0, 12, 12, 0.1), 0, 0, 0.0)])
    assert not fits(Box(1, 12, 12, 0.1), (0, 0, 0.0), placed, FULL)
    assert fits(Box(1, 12, 12, 0.1), (0, 0, 0.1), placed, FULL)


def test_dblf_examples():
    sol = dblf([Box(0, 20, 10, 0.03)])
    assert (sol.placements[0].x, sol.placements[0].y, sol.placements[0].z) == (0, 0, 0.0)
    sol = dblf([Box(0, 48, 48, 0.03), Box(1, 48, 48, 0.05)])
    assert sol.placements[1].z == 0.03 and sol.height == 0.03 + 0.05
    sol = dblf([Box(i, 24, 24, 0.07) for i in range(4)])
    assert all(p.z == 0.0 for p in sol.placements) and sol.height == 0.07


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_forced_instances(n):
    side = 48 // n
    assert sapa_height([side] * n * n, [side] * n * n, [0.05] * n * n) == 0.05
    ds = [0.01 * (i + 1) for i in range(n)]
    assert sapa_height([48] * n, [48] * n, ds) == pytest.approx(math.fsum(ds), abs=1e-12)


def test_dblf_consistent_with_gaps_and_fits():
    # every placement is the first listed extreme point where the box fits
    rng = np.random.default_rng(11)
    for _ in range(60):
        boxes = random_boxes(rng, int(rng.integers(2, 15)))
        sol = dblf(boxes)
        for i, p in enumerate(sol.placements):
            prefix = PackingSolution(sol.placements[:i])
            gaps = get_all_gaps(prefix, FULL)
            pos = (p.x, p.y, p.z)
            first = next(g for g in gaps if fits(p.box, g, prefix, FULL))
            assert first[:2] == pos[:2] and first[2] == pytest.approx(pos[2], abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 48), st.integers(1, 48), st.floats(1e-4, 0.2)), min_size=1, max_size=25))
def test_packing_valid_and_bounded(raw):
    boxes = [Box(i, w, h, d) for i, (w, h, d) in enumerate(raw)]
    height, sol = sapa_resource(boxes, FULL)
    recs = sol.to_records()
    assert sorted(r["id"] for r in recs) == list(range(len(boxes)))
    assert overlap_violations(recs) == 0
    assert container_violations(recs, 48, 48) == 0
    volume = math.fsum(w * h * d for w, h, d in raw)
    assert height >= volume / (48 * 48) - 1e-12
    assert height <= math.fsum(d for *_, d in raw) + 1e-12
    assert height == sapa_height([b.w for b in boxes], [b.h for b in boxes], [b.d for b in boxes])


def test_shake_never_worse_than_dblf():
    rng = np.random.default_rng(5)
    for _ in range(200):
        boxes = initial_order(random_boxes(rng, 10))
        assert shake(boxes, (C1, C2), 1).height <= dblf(boxes).height


def test_shake_single_box_is_dblf():
    b = [Box(0, 13, 7, 0.02)]
    assert shake(b).to_records() == dblf(b).to_records()


def test_shake_keeps_optimal_order():
    boxes = [Box(i, 24, 24, 0.05) for i in range(4)]
    assert shake(boxes).height == dblf(boxes).height == 0.05


def test_sort_criteria():
    sol = PackingSolution(
        [
            Placement(Box("a", 10, 30, 0.1), 0, 0, 0.0),
            Placement(Box("b", 30, 10, 0.1), 10, 0, 0.0),
            Placement(Box("c", 5, 5, 0.05), 0, 0, 0.1),
        ]
    )
    # c tops out highest; a has the larger y+h, b the larger x+w
    assert [b.id for b in sort_solution(sol, C1)] == ["c", "a", "b"]
    assert [b.id for b in sort_solution(sol, C2)] == ["c", "b", "a"]


def test_initial_order():
    boxes = [Box(0, 12, 12, 0.1), Box(1, 24, 24, 0.01), Box(2, 12, 12, 0.2), Box(3, 12, 12, 0.1)]
    assert [b.id for b in initial_order(boxes)] == [1, 2, 0, 3]


def test_small_instances_against_exact():
    rng = np.random.default_rng(3)
    ratios = []
    for _ in range(40):
        boxes = random_boxes(rng, int(rng.integers(1, 5)), sizes=[12, 24, 48])
        exact = exact_height([(b.w, b.h, b.d) for b in boxes])
        got = sapa_resource(boxes)[0]
        assert got >= exact - 1e-12
        ratios.append(got / exact)
    assert np.mean(np.array(ratios) <= 1.25) >= 0.9


def test_quarter_tasks_resource():
    assert sapa_resource([Box(i, 24, 24, 0.013) for i in range(4)])[0] == 0.013
    assert sapa_resource([Box(0, 48, 48, 0.128)])[0] == 0.128


def test_determinism_and_nan():
    rng = np.random.default_rng(9)
    boxes = random_boxes(rng, 20)
    assert sapa_resource(boxes)[1].to_records() == sapa_resource(boxes)[1].to_records()
    h, sol = sapa_resource([Box(0, 4, 4, 0.1), Box(1, 4, 4, math.inf)])
    assert math.isnan(h) and len(sol) == 0


def test_oversized_box_rejected():
    with pytest.raises(ValueError):
        sapa_resource([Box(0, 49, 10, 0.1)])
    with pytest.raises(ValueError):
        Box(0, 10, 10, 0.0)


def test_without_keeps_valid_placements():
    rng = np.random.default_rng(2)
    _, sol = sapa_resource(random_boxes(rng, 12))
    kept = sol.without([0, 3, 5])
    assert {p.box.id for p in kept.placements} == set(range(12)) - {0, 3, 5}
    assert kept.height <= sol.height
    assert PackingSolution.from_records(kept.to_records()).to_records() == kept.to_records()


def test_strip_packer_estimator():
    est = StripPacker(k=1)
    table = est.fit_transform([(24, 24, 0.05)] * 4 + [(48, 48, 0.01)])
    assert table.shape == (5, 6)
    assert est.height_ == pytest.approx(0.06)
    assert est.get_params() == {"criteria": (C1, C2), "height": 48, "k": 1, "width": 48}
    assert StripPacker(k=0).fit([(48, 48, 0.1)]).height_ == 0.1
