import numpy as np
import pytest

from cptalloc.allocation import AgentSpec
from cptalloc.channel import draw_rayleigh_gains
from cptalloc.core import GeneralizedUtility, IdentityPWF

CASE = GeneralizedUtility.case_study()


def make_agents(gains, activations=None, pwf=None, noise=1.0, utility=CASE):
    gains = np.asarray(gains, dtype=float)
    acts = np.ones_like(gains) if activations is None else np.asarray(activations, dtype=float)
    pwf = IdentityPWF() if pwf is None else pwf
    return [AgentSpec(gain=float(g), noise=noise, utility=utility, activation=float(p), pwf=pwf,
                      id=i) for i, (g, p) in enumerate(zip(gains, acts))]


@pytest.fixture
def six_agents():
    return make_agents(draw_rayleigh_gains(6, seed=11).gains)
