"""Cumulative prospect theory valuations and CPT-aware power allocation."""

from .allocation import (AgentSpec, AllocationResult, DualIntervals, KKTReport, dual_intervals,
                         equal_split, per_agent_power, solve, total_power, verify_kkt,
                         water_filling)
from .channel import db_to_linear, dbm_to_watts, draw_rayleigh_gains, linear_to_db
from .core import (DecisionWeights, GeneralizedUtility, IdentityPWF, KTUtility, KWUtility,
                   LossAversionReport, PrelecPWF, Prospect, TK92PWF, UnboundedDerivativeError,
                   arrow_pratt, cpt_value, cpt_value_two_sided, decision_weights,
                   loss_aversion_report, pwf_derivative, pwf_value, utility_derivative,
                   utility_value)
from .numeric import solve_numeric
from .perception import (MonteCarlo, PerceptualTransform, QuadratureError, exponential,
                         monte_carlo_perceptual_utility, perceived_cdf, perceived_pdf,
                         perceptual_utility)
from .risk import risk_split_search

__version__ = "0.1.0"
