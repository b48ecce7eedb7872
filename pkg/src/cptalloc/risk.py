"""Budget split across independent risk sources, scored by CPT value.

Source ``i`` pays ``alpha_i * c_i * budget`` with probability ``q_i`` and
nothing otherwise, independently of the others.  Every allocation on a
regular simplex grid is scored with :func:`cptalloc.core.cpt_value` on the
``2**m``-outcome prospect it induces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import IdentityPWF, Prospect, cpt_value

__all__ = ["MAX_SOURCES", "RiskSplitResult", "simplex_grid", "split_prospect", "risk_split_search"]

MAX_SOURCES = 10

CORNER, UNIFORM, INTERIOR = "corner", "uniform", "interior"


def simplex_grid(m: int, resolution: int) -> np.ndarray:
    """All ``alpha`` with ``sum(alpha) = 1`` on multiples of ``1/resolution``."""
    rows = []
    for bars in itertools.combinations(range(resolution + m - 1), m - 1):
        edges = (-1,) + bars + (resolution + m - 1,)
        rows.append([edges[k + 1] - edges[k] - 1 for k in range(m)])
    return np.asarray(rows, dtype=float) / resolution


def split_prospect(alpha: Sequence[float], payoffs: Sequence[tuple[float, float]],
                   budget: float) -> Prospect:
    """Outcome lottery of one allocation (one entry per success pattern)."""
    alpha = np.asarray(alpha, dtype=float)
    c = np.array([pc for pc, _ in payoffs], dtype=float)
    q = np.array([pq for _, pq in payoffs], dtype=float)
    m = len(c)
    patterns = np.array(list(itertools.product((0, 1), repeat=m)), dtype=float)
    probs = np.prod(np.where(patterns == 1, q, 1.0 - q), axis=1)
    outcomes = patterns @ (alpha * c * budget)
    keep = probs > 0
    return Prospect(probs[keep], outcomes[keep])


@dataclass(frozen=True)
class RiskSplitResult:
    alpha: np.ndarray
    value: float
    verdict: str
    grid: np.ndarray
    values: np.ndarray


def risk_split_search(budget: float, payoffs: Sequence[tuple[float, float]], u,
                      w=None, grid: int = 100) -> RiskSplitResult:
    """Exhaustive grid search for the CPT-optimal split of ``budget``.

    ``payoffs`` holds ``(c_i, q_i)`` pairs.  The verdict is ``"corner"`` if
    the best allocation puts everything on one source, ``"uniform"`` if it is
    within one grid step of ``1/m`` everywhere, else ``"interior"``.
    """
    w = IdentityPWF() if w is None else w
    m = len(payoffs)
    if m < 1:
        raise ValueError("need at least one risk source")
    if m > MAX_SOURCES:
        raise ValueError(f"at most {MAX_SOURCES} sources supported (2**m outcomes), got {m}")
    if grid < 10:
        raise ValueError("grid resolution must be at least 10 divisions")
    for c, q in payoffs:
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"success probability {q} outside [0, 1]")

    alphas = simplex_grid(m, grid)
    values = np.array([cpt_value(split_prospect(a, payoffs, budget), u, w) for a in alphas])
    best = int(np.argmax(values))
    a = alphas[best]
    if np.isclose(a.max(), 1.0):
        verdict = CORNER
    elif np.all(np.abs(a - 1.0 / m) <= 1.0 / grid + 1e-12):
        verdict = UNIFORM
    else:
        verdict = INTERIOR
    return RiskSplitResult(alpha=a, value=float(values[best]), verdict=verdict,
                           grid=alphas, values=values)
