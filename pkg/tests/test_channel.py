import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from cptalloc.channel import (counter_stream, db_to_linear, dbm_to_watts, draw_rayleigh_gains,
                              linear_to_db, uniform_draws)


def test_conversions():
    assert db_to_linear(7) == pytest.approx(5.011872336272722, rel=1e-15)
    assert db_to_linear(0) == 1.0
    assert dbm_to_watts(-174, 1.0) == pytest.approx(10 ** -20.4, rel=1e-13)
    assert dbm_to_watts(-174, 1e6) == pytest.approx(10 ** -14.4, rel=1e-13)
    with pytest.raises(ValueError):
        dbm_to_watts(0, 0.0)


@given(st.floats(-200, 200))
def test_db_round_trip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-12)


def test_determinism():
    a = draw_rayleigh_gains(16, mean=2.0, seed=123)
    b = draw_rayleigh_gains(16, mean=2.0, seed=123)
    assert a.gains.tobytes() == b.gains.tobytes()
    c = draw_rayleigh_gains(16, mean=2.0, seed=124)
    assert not np.array_equal(a.gains, c.gains)
    assert np.all(a.gains > 0)


@pytest.mark.parametrize("offset", [0, 1, 3, 4, 5, 17])
def test_offset_batches_match_serial(offset):
    serial = uniform_draws(40, seed=9, stream=0)
    batch = uniform_draws(10, seed=9, stream=0, offset=offset)
    np.testing.assert_array_equal(batch, serial[offset:offset + 10])


def test_streams_independent():
    a = counter_stream(5, stream=0).random(8)
    b = counter_stream(5, stream=1).random(8)
    assert not np.array_equal(a, b)


def test_mean_and_ks():
    g = draw_rayleigh_gains(10 ** 6, mean=2.0, seed=1).gains
    assert abs(g.mean() - 2.0) < 3 * 2.0 / 1e3
    g = draw_rayleigh_gains(10 ** 5, mean=2.0, seed=2).gains
    d = stats.kstest(g, lambda x: 1 - np.exp(-x / 2.0)).statistic
    assert d < 1.63 / math.sqrt(1e5)


@pytest.mark.parametrize("n,mean", [(0, 1.0), (-1, 1.0), (2.5, 1.0), (3, 0.0), (3, -1.0),
                                    (3, math.inf)])
def test_invalid_arguments(n, mean):
    with pytest.raises(ValueError):
        draw_rayleigh_gains(n, mean)
