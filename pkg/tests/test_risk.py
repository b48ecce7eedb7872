import math

import numpy as np
import pytest

from cptalloc.core import IdentityPWF, KTUtility, PrelecPWF, cpt_value
from cptalloc.risk import MAX_SOURCES, risk_split_search, simplex_grid, split_prospect

SYM = [(1.0, 0.5), (1.0, 0.5)]


def test_simplex_grid():
    g = simplex_grid(3, 10)
    assert len(g) == math.comb(12, 2)
    np.testing.assert_allclose(g.sum(axis=1), 1.0, atol=1e-15)
    assert np.all(g >= 0)
    assert len({tuple(r) for r in g}) == len(g)


def test_split_prospect_enumerates_outcomes():
    pr = split_prospect([0.25, 0.75], [(2.0, 0.3), (1.0, 0.6)], budget=4.0)
    assert len(pr) == 4
    lookup = dict(zip(np.round(pr.outcomes, 12), pr.probs))
    assert lookup[0.0] == pytest.approx(0.7 * 0.4)
    assert lookup[2.0] == pytest.approx(0.3 * 0.4)
    assert lookup[3.0] == pytest.approx(0.7 * 0.6)
    assert lookup[5.0] == pytest.approx(0.3 * 0.6)


def test_loss_domain_concentrates():
    u = KTUtility(alpha=0.88, beta=0.88, lam=2.25, x0=3.0)
    res = risk_split_search(1.0, SYM, u, IdentityPWF(), grid=100)
    assert res.verdict == "corner"
    assert sorted(res.alpha) == [0.0, 1.0]


def test_gain_domain_diversifies():
    u = KTUtility(alpha=0.88, beta=0.88, lam=2.25, x0=-1.0)
    res = risk_split_search(1.0, SYM, u, IdentityPWF(), grid=100)
    assert res.verdict == "uniform"
    np.testing.assert_allclose(res.alpha, [0.5, 0.5])


def test_single_source():
    u = KTUtility(alpha=0.88, beta=0.88, lam=2.25, x0=0.0)
    res = risk_split_search(2.0, [(1.0, 0.3)], u, grid=10)
    np.testing.assert_array_equal(res.alpha, [1.0])
    assert res.verdict == "corner"


def test_values_match_cpt_value():
    u = KTUtility(alpha=0.7, beta=0.9, lam=2.0, x0=0.5)
    w = PrelecPWF(1, 0.65)
    res = risk_split_search(1.0, SYM, u, w, grid=20)
    k = 7
    assert res.values[k] == cpt_value(split_prospect(res.grid[k], SYM, 1.0), u, w)


def test_errors():
    u = KTUtility(alpha=0.88, beta=0.88, lam=2.25)
    with pytest.raises(ValueError):
        risk_split_search(1.0, [(1.0, 0.5)] * (MAX_SOURCES + 1), u)
    with pytest.raises(ValueError):
        risk_split_search(1.0, SYM, u, grid=5)
    with pytest.raises(ValueError):
        risk_split_search(1.0, [(1.0, 1.5)], u)
    with pytest.raises(ValueError):
        risk_split_search(1.0, [], u)
