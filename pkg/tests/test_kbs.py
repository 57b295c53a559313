import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sapa_rrm.kbs import (
    ControlPoint,
    Environment,
    NoRootError,
    RadarConstants,
    TaskSpec,
    beamwidth,
    crosstalk_loss,
    evaluate_task,
    resource_unconstrained,
    snr0,
    track_sharpness,
    utility_linear,
)

from oracles import sharpness_residual_exact, sharpness_scan

C = RadarConstants()
SPEC = TaskSpec(weight=1.0)


def env(**kw):
    base = dict(range=70e3, theta_h=0.0, theta_v=0.0, rcs=1.0, maneuver_std=20.0, corr_time=15.0)
    base.update(kw)
    return Environment(**base)


@pytest.mark.parametrize("n_h,n_v,expected", [(48, 48, 1.0), (24, 24, 0.85), (6, 6, 0.803125)])
def test_crosstalk_loss(n_h, n_v, expected):
    assert crosstalk_loss(n_h, n_v, C) == pytest.approx(expected, abs=1e-15)


def test_snr0_reference_value():
    raw, used, ok = snr0(ControlPoint(0.064, 1.0, 48, 48), env(), C)
    expected = 2.4e16 * 48**6 * 0.064 / 70e3**4
    assert raw == pytest.approx(expected, rel=1e-12)
    assert raw == pytest.approx(7.82e5, rel=1e-3)
    assert 10 * math.log10(raw) == pytest.approx(58.9, abs=0.05)
    assert used == 1e4 and ok


def test_snr0_endfire_is_infeasible():
    raw, _, ok = snr0(ControlPoint(0.064, 1.0, 48, 48), env(theta_h=math.pi / 2), C)
    assert raw == 0.0 and not ok


def test_snr0_range_law():
    ctrl = ControlPoint(0.004, 1.0, 12, 12)
    a = snr0(ctrl, env(range=20e3), C)[0]
    b = snr0(ctrl, env(range=200e3), C)[0]
    assert b / a == pytest.approx(1e-4, rel=1e-12)


def test_snr0_floor():
    # 6x6 aperture, short dwell, far target: well below 10 dB
    _, _, ok = snr0(ControlPoint(0.004, 1.0, 6, 6), env(range=250e3), C)
    assert not ok
    ev = evaluate_task(ControlPoint(0.004, 1.0, 6, 6), env(range=250e3), SPEC, C)
    assert not ev.feasible and math.isnan(ev.quality) and ev.utility == 0.0


def test_track_sharpness_example():
    v0 = track_sharpness(2.0, 50.0)
    assert 0.0 < v0 < 1.0
    assert abs(1 + 27 * v0**2 - 100 * v0**2.4) < 1e-9


@pytest.mark.parametrize("alpha,beta", [(0.0, 50.0), (2.0, 0.0), (-1.0, 5.0)])
def test_track_sharpness_no_root(alpha, beta):
    with pytest.raises(NoRootError):
        track_sharpness(alpha, beta)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(5.0, 1e4))
def test_track_sharpness_matches_scan(alpha, beta):
    v0 = track_sharpness(alpha, beta)
    assert abs(sharpness_residual_exact(v0, alpha, beta)) < 1e-9
    assert v0 == pytest.approx(sharpness_scan(alpha, beta), rel=1e-6)


def test_beamwidth():
    assert beamwidth(ControlPoint(0.01, 1, 48, 48), env(), C) == pytest.approx(0.886 / 48)
    assert beamwidth(ControlPoint(0.01, 1, 24, 48), env(), C) == pytest.approx(0.886 / 24)
    assert beamwidth(ControlPoint(0.01, 1, 48, 48), env(theta_h=math.radians(60)), C) == pytest.approx(2 * 0.886 / 48)


def test_detection_and_looks():
    # capped SNR with full aperture: P_D = P_fa^(1/(1+1e4))
    ev = evaluate_task(ControlPoint(0.064, 2.0, 48, 48), env(range=20e3), SPEC, C)
    assert ev.sn0_linear == 1e4 and ev.xi == 1.0
    assert ev.p_d == pytest.approx(1e-4 ** (1 / 10001), rel=1e-12)
    assert ev.p_d == pytest.approx(0.99908, abs=1e-5)
    assert ev.n_looks >= 1 / ev.p_d
    assert ev.resource == pytest.approx(ev.n_looks * 0.064 * 2.0, rel=1e-15)


def test_resource_product():
    # g = n_l * t_d * f_t; with n_l = 1 this is 0.128
    ev = evaluate_task(ControlPoint(0.064, 2.0, 48, 48), env(range=20e3), SPEC, C)
    assert ev.resource / ev.n_looks == pytest.approx(0.128, rel=1e-15)


@pytest.mark.parametrize("q,u", [(3e-3, 0.0), (1e-3, 1.0), (2e-3, 0.5), (5e-3, 0.0), (0.5e-3, 1.0), (math.nan, 0.0)])
def test_utility_linear(q, u):
    assert utility_linear(q, SPEC) == pytest.approx(u, abs=1e-12)


def test_resource_unconstrained():
    e = env(range=15e3)
    full = evaluate_task(ControlPoint(0.064, 2.0, 48, 48), e, SPEC, C)
    assert resource_unconstrained(full, ControlPoint(0.064, 2.0, 48, 48), C) == full.resource
    quarter_ctrl = ControlPoint(0.064, 2.0, 24, 24)
    quarter = evaluate_task(quarter_ctrl, e, SPEC, C)
    assert resource_unconstrained(quarter, quarter_ctrl, C) == pytest.approx(quarter.resource / 4, rel=1e-15)
    fake = type(full)(**{**full.__dict__, "resource": 0.128})
    assert resource_unconstrained(fake, ControlPoint(0.064, 2.0, 12, 6), C) == pytest.approx(0.004, rel=1e-12)


def test_cap_makes_quality_identical():
    # both dwell times saturate the 40 dB cap at 15 km
    ctrl_a = ControlPoint(0.032, 1.0, 48, 48)
    ctrl_b = ControlPoint(0.064, 1.0, 48, 48)
    e = env(range=15e3)
    assert snr0(ctrl_a, e, C)[0] > 1e4
    a, b = evaluate_task(ctrl_a, e, SPEC, C), evaluate_task(ctrl_b, e, SPEC, C)
    assert (a.quality, a.v0, a.p_d, a.n_looks) == (b.quality, b.v0, b.p_d, b.n_looks)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(10e3, 250e3),
    st.floats(-1.0, 1.0),
    st.floats(-0.1, 1.1),
    st.floats(-10, 10),
    st.floats(0.5, 35.0),
    st.floats(1.0, 50.0),
    st.sampled_from([6, 12, 24, 36, 48]),
    st.sampled_from([6, 12, 24, 36, 48]),
    st.floats(0.2, 6.0),
)
def test_evaluation_invariants(r, th, tv, rcs_db, man, corr, n_h, n_v, f_t):
    e = Environment(r, th, tv, 10 ** (rcs_db / 10), man, corr)
    prev_q = math.inf
    for t_d in np.arange(0.004, 0.0641, 0.012):
        ctrl = ControlPoint(float(t_d), f_t, n_h, n_v)
        ev = evaluate_task(ctrl, e, SPEC, C)
        assert 0.8 < ev.xi <= 1.0
        assert (ev.xi == 1.0) == (n_h == n_v == 48)
        assert 0.0 <= ev.utility <= 1.0
        if not ev.feasible:
            continue
        assert C.p_fa < ev.p_d < 1.0
        assert ev.n_looks >= 1.0 / ev.p_d
        g_u = resource_unconstrained(ev, ctrl, C)
        assert g_u <= ev.resource and (g_u == ev.resource) == (n_h == n_v == 48)
        assert ev.quality <= prev_q * (1 + 1e-12)
        prev_q = ev.quality


def test_constants_validation():
    with pytest.raises(ValueError):
        RadarConstants(p_fa=1.5)
    with pytest.raises(ValueError):
        ControlPoint(0.0, 1.0, 48, 48)
    with pytest.raises(ValueError):
        TaskSpec(weight=0.5, q_min=1e-3, q_max=3e-3)
