import math

import numpy as np
import pytest
from scipy import integrate

from cptalloc.core import GeneralizedUtility, IdentityPWF, KTUtility, PrelecPWF, TK92PWF
from cptalloc.perception import (MonteCarlo, PerceptualTransform, exponential, perceived_cdf,
                                 perceived_pdf, perceptual_utility, soi_density)

EXP1 = exponential(1.0)
INV_S = PerceptualTransform(EXP1, PrelecPWF(1, 0.5))
LINEAR = KTUtility(alpha=1, beta=1, lam=1, x0=0)


def test_identity_collapses_to_base():
    t = PerceptualTransform(exponential(2.0), IdentityPWF())
    xs = np.linspace(0.01, 10, 50)
    np.testing.assert_array_equal(perceived_cdf(t, xs), t.base.cdf(xs))
    np.testing.assert_array_equal(perceived_pdf(t, xs), t.base.pdf(xs))


def test_fixed_point_and_high_quantile():
    x = -math.log(1 - 1 / math.e)
    for theta in (0.3, 0.5, 0.8, 2.0):
        t = PerceptualTransform(EXP1, PrelecPWF(1, theta))
        assert perceived_cdf(t, x) == pytest.approx(1 / math.e, abs=1e-12)
    x90 = -math.log(0.1)
    expected = math.exp(-math.sqrt(-math.log(0.9)))
    assert perceived_cdf(INV_S, x90) == pytest.approx(expected, abs=1e-12)
    assert perceived_cdf(INV_S, x90) < 0.9


def test_clamping_outside_support():
    assert perceived_cdf(INV_S, -1.0) == 0.0
    assert perceived_cdf(INV_S, math.inf) == 1.0


@pytest.mark.parametrize("w", [IdentityPWF(), PrelecPWF(1, 0.5), PrelecPWF(0.7, 1.3),
                               TK92PWF(0.61)], ids=repr)
def test_perceived_cdf_is_a_cdf(w):
    t = PerceptualTransform(exponential(1.5), w)
    xs = np.concatenate(([0.0], np.geomspace(1e-8, 300, 3000)))
    F = perceived_cdf(t, xs)
    assert F[0] == 0.0
    assert np.all(np.diff(F) >= 0)
    assert F[-1] == pytest.approx(1.0, abs=1e-12)


def test_inverse_s_crossing():
    xs = np.geomspace(1e-6, 30, 4000)
    F = EXP1.cdf(xs)
    Fp = perceived_cdf(INV_S, xs)
    assert np.all(Fp[F < 1 / math.e - 1e-9] > F[F < 1 / math.e - 1e-9])
    assert np.all(Fp[F > 1 / math.e + 1e-9] < F[F > 1 / math.e + 1e-9])


def test_perceived_pdf_chain_rule_and_fd():
    F1 = 1 - math.exp(-1)
    expected = float(PrelecPWF(1, 0.5).derivative(F1)) * math.exp(-1)
    assert perceived_pdf(INV_S, 1.0) == pytest.approx(expected, rel=1e-14)
    h = 1e-6
    fd = (perceived_cdf(INV_S, 1 + h) - perceived_cdf(INV_S, 1 - h)) / (2 * h)
    assert perceived_pdf(INV_S, 1.0) == pytest.approx(fd, rel=1e-5)
    with pytest.raises(ValueError):
        perceived_pdf(INV_S, 0.0)


def test_perceived_pdf_integrates_to_one():
    one = perceptual_utility(lambda y: 1.0, INV_S, LINEAR)
    assert one.value == pytest.approx(1.0, abs=1e-6)


def test_identity_perceptual_utility_is_mean():
    t = PerceptualTransform(exponential(2.0), IdentityPWF())
    est = perceptual_utility(lambda y: y, t, LINEAR)
    assert est.value == pytest.approx(2.0, abs=1e-9)


def test_loss_domain_is_negative():
    u = GeneralizedUtility.case_study()
    est = perceptual_utility(lambda y: 1e-3 * y, INV_S, u)
    assert est.value < 0


def test_soi_density_consistency():
    u = GeneralizedUtility.case_study(x0=1.0)
    metric = lambda y: 2.0 * y
    ref = perceptual_utility(metric, INV_S, u, breakpoints=[0.5]).value
    # w'(F) behaves like 1/y near 0, so split every decade down to 1e-300
    pieces = [0.0] + [10.0 ** -k for k in range(300, 0, -1)] + [0.5, 1.0, 5.0, 20.0, 60.0]
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        total += integrate.quad(lambda x: soi_density(metric, INV_S, u, x), a, b,
                                limit=200, epsabs=1e-14, epsrel=1e-12)[0]
    assert total == pytest.approx(ref, abs=1e-8)
    # where M(x) hits the reference point the integrand vanishes
    assert soi_density(metric, INV_S, u, 0.5) == 0.0
    t = PerceptualTransform(EXP1, IdentityPWF())
    assert soi_density(lambda y: y, t, LINEAR, 1.5) == pytest.approx(1.5 * math.exp(-1.5),
                                                                     rel=1e-15)


def test_stochastic_dominance_shift():
    u = GeneralizedUtility.case_study(x0=1.0)
    vals = [perceptual_utility(lambda y: y, PerceptualTransform(exponential(m), INV_S.pwf), u).value
            for m in (0.5, 1.0, 2.0)]
    assert vals[0] < vals[1] < vals[2]


def test_quadrature_vs_monte_carlo():
    q = perceptual_utility(lambda y: y, INV_S, LINEAR)
    mc = perceptual_utility(lambda y: y, INV_S, LINEAR, method=MonteCarlo(n=10 ** 6, seed=4))
    assert abs(q.value - mc.value) <= 3 * mc.error


def test_unknown_method():
    with pytest.raises(ValueError):
        perceptual_utility(lambda y: y, INV_S, LINEAR, method="simpson")
