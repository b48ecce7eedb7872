import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cptalloc.allocation import (GAIN, INACTIVE, LOSS, PINNED, AgentSpec, dual_intervals,
                                 equal_split, objective, per_agent_power, solve, total_power,
                                 verify_kkt, water_filling)
from cptalloc.core import GeneralizedUtility, KTUtility, PrelecPWF

from conftest import CASE, make_agents

X0 = CASE.x0


def test_single_agent_hand_values():
    (a,) = make_agents([1.0])
    di = dual_intervals([a])
    assert di.mu_hat_1 == pytest.approx(0.4, rel=1e-15)
    assert di.mu_hat_2 == pytest.approx(0.8, rel=1e-15)
    assert di.gaps[0] == pytest.approx((0.4, 0.8), rel=1e-15)
    assert di.zero_cuts[0] == pytest.approx(0.8 * math.exp(2 * X0 / 5), rel=1e-14)
    p, lab = per_agent_power(a, 0.6)
    assert lab == PINNED and p == pytest.approx(X0, rel=1e-15)
    p, lab = per_agent_power(a, 0.4)
    assert p == pytest.approx(X0, rel=1e-15) and lab == GAIN
    assert per_agent_power(a, 1e-12)[0] > 40
    assert per_agent_power(a, 1e-300)[0] > per_agent_power(a, 1e-12)[0]


def test_gap_scales_with_q():
    a, b = make_agents([1.0, 2.0])
    di = dual_intervals([a, b])
    assert di.gaps[1] == pytest.approx(tuple(2 * v for v in di.gaps[0]), rel=1e-15)
    assert di.zero_cuts[1] == pytest.approx(2 * di.zero_cuts[0], rel=1e-15)


def test_identical_agents_share_gap():
    agents = make_agents([0.7] * 4)
    di = dual_intervals(agents)
    assert len(set(di.gaps)) == 1
    assert len(di.union_of_gaps()) == 1
    assert total_power(agents, di.mu_hat_1) == pytest.approx(4 * X0 / 0.7, rel=1e-14)


def test_continuity_at_landmarks(six_agents):
    for a in six_agents:
        g, l = dual_intervals([a]).gaps[0]
        z = dual_intervals([a]).zero_cuts[0]
        for m in (g, l, z):
            below = per_agent_power(a, m * (1 - 1e-13))[0]
            above = per_agent_power(a, m * (1 + 1e-13))[0]
            assert abs(below - above) <= 1e-12 * max(1.0, X0 / a.unit_snr)


def test_total_power_monotone(six_agents):
    di = dual_intervals(six_agents)
    mus = np.geomspace(di.mu_hat_1 / 100, max(di.zero_cuts) * 2, 1000)
    tp = np.array([total_power(six_agents, m) for m in mus])
    assert np.all(np.diff(tp) <= 0)
    assert tp[-1] == 0.0
    assert total_power(six_agents, di.mu_hat_1) > total_power(six_agents, di.mu_hat_2)


def test_regime_labels(six_agents):
    di = dual_intervals(six_agents)
    res = solve(six_agents, 1.01 * total_power(six_agents, di.mu_hat_1))
    assert set(res.labels) == {GAIN}
    res = solve(six_agents, 0.5 * total_power(six_agents, di.mu_hat_2))
    assert all(lab in (LOSS, INACTIVE) for lab in res.labels)


def test_two_identical_agents_split_evenly():
    agents = make_agents([1.3, 1.3])
    for p in (0.5, 7.0, 100.0):
        res = solve(agents, p)
        # symmetry is exact; the split itself carries the 1e-9 budget tolerance
        assert res.powers[0] == pytest.approx(p / 2, rel=1e-9)
        assert res.powers[1] == res.powers[0]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.05, 5.0), min_size=1, max_size=8),
       st.floats(0.02, 20.0), st.floats(0.05, 1.0))
def test_solve_contract(gains, rel, theta):
    agents = make_agents(gains, activations=np.linspace(0.1, 1.0, len(gains)),
                         pwf=PrelecPWF(1, theta))
    pinned = sum(X0 / a.unit_snr for a in agents)
    p_total = rel * pinned
    res = solve(agents, p_total)
    assert np.all(res.powers >= 0)
    assert abs(res.powers.sum() - p_total) <= 1e-9 * p_total
    assert res.kkt.stationarity <= 1e-8
    assert res.kkt.pinned <= 1e-12 and res.kkt.inactive <= 1e-12
    for p, s, lab in zip(res.powers, res.snr, res.labels):
        if lab == GAIN:
            assert s > X0
        elif lab == LOSS:
            assert 0 < s < X0
        elif lab == PINNED:
            assert s == pytest.approx(X0, rel=1e-9)
        else:
            assert p == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.05, 5.0), min_size=2, max_size=6), st.floats(0.05, 5.0),
       st.floats(1e-3, 1e3))
def test_scale_covariance(gains, rel, c):
    agents = make_agents(gains)
    scaled = make_agents(np.asarray(gains) * c)
    p_total = rel * sum(X0 / a.unit_snr for a in agents)
    r1 = solve(agents, p_total)
    r2 = solve(scaled, p_total / c)
    np.testing.assert_allclose(r2.snr, r1.snr, rtol=1e-7, atol=1e-9)
    assert r1.labels == r2.labels or np.allclose(r1.snr, X0, rtol=1e-8)
    assert r2.objective == pytest.approx(r1.objective, rel=1e-7, abs=1e-9)


def test_physical_units():
    noise = 10 ** -20.4
    agents = make_agents([0.3, 1.1, 2.0], noise=noise)
    pinned = sum(X0 / a.unit_snr for a in agents)
    res = solve(agents, 0.7 * pinned)
    assert abs(res.powers.sum() - 0.7 * pinned) <= 1e-9 * 0.7 * pinned
    assert res.kkt.stationarity_rel <= 1e-12


def test_verify_kkt_flags_equal_split():
    agents = make_agents([0.2, 1.0, 3.0])
    p_total = 10.0
    res = solve(agents, p_total)
    eq = equal_split(agents, p_total)
    bad = verify_kkt(agents, eq, res.mu, p_total)
    assert bad.stationarity > 1e-3
    assert objective(agents, eq) < res.objective


def test_verify_kkt_all_pinned():
    agents = make_agents([1.0, 1.5])
    powers = np.array([X0 / a.unit_snr for a in agents])
    # 0.4 * 1.5 = 0.6 and 0.8 * 1.0 = 0.8 bracket mu = 0.7 for both agents
    rep = verify_kkt(agents, powers, 0.7, powers.sum())
    assert rep.max_dual == 0.0 and rep.primal == 0.0
    res = solve(agents, powers.sum())
    assert res.labels == (PINNED, PINNED)
    assert not res.slack


def test_water_filling_baseline():
    agents = make_agents([0.1, 1.0, 4.0])
    wf = water_filling(agents, 3.0)
    assert wf.sum() == pytest.approx(3.0, rel=1e-14)
    inv = np.array([1 / a.unit_snr for a in agents])
    active = wf > 0
    assert np.ptp((wf + inv)[active]) < 1e-12
    assert np.all(inv[~active] >= (wf + inv)[active][0] - 1e-12)


def test_errors():
    agents = make_agents([1.0])
    with pytest.raises(ValueError):
        solve(agents, 0.0)
    with pytest.raises(ValueError):
        solve([], 1.0)
    with pytest.raises(ValueError):
        per_agent_power(agents[0], 0.0)
    with pytest.raises(ValueError):
        AgentSpec(gain=-1, noise=1, utility=CASE)
    with pytest.raises(ValueError):
        AgentSpec(gain=1, noise=1, utility=CASE, activation=0.0)


def test_non_concave_regime_goes_numeric():
    kt = KTUtility(alpha=0.88, beta=0.88, lam=2.25, x0=X0)
    agents = make_agents([0.5, 1.0], utility=kt)
    with pytest.warns(RuntimeWarning):
        res = solve(agents, 5.0)
    assert res.method == "numeric"
    with pytest.raises(ValueError):
        dual_intervals(agents)
