"""Rayleigh-fading channel draws and dB/linear unit conversions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelDraw",
    "counter_stream",
    "draw_rayleigh_gains",
    "uniform_draws",
    "db_to_linear",
    "linear_to_db",
    "dbm_to_watts",
]

# Philox yields four 64-bit words per counter step.
_WORDS_PER_BLOCK = 4


def counter_stream(seed: int, stream: int = 0, offset: int = 0) -> np.random.Generator:
    """Generator positioned at draw ``offset`` of the Philox stream ``(seed, stream)``.

    Uniform doubles consume one word each, so a batch starting at ``offset``
    reproduces the corresponding slice of a serial draw.
    """
    if seed < 0 or stream < 0 or offset < 0:
        raise ValueError("seed, stream and offset must be nonnegative")
    bitgen = np.random.Philox(key=[seed & (2**64 - 1), stream])
    blocks, rem = divmod(offset, _WORDS_PER_BLOCK)
    if blocks:
        bitgen.advance(blocks)
    gen = np.random.Generator(bitgen)
    if rem:
        gen.random(rem)
    return gen


def uniform_draws(n: int, seed: int, stream: int = 0, offset: int = 0) -> np.ndarray:
    """``n`` uniforms on the open interval (0, 1) from the counter stream."""
    u = counter_stream(seed, stream, offset).random(n)
    # random() can return exactly 0.0
    return np.where(u == 0.0, 2.0**-54, u)


@dataclass(frozen=True)
class ChannelDraw:
    gains: np.ndarray
    seed: int
    mean: float

    def __len__(self):
        return len(self.gains)


def draw_rayleigh_gains(n: int, mean: float = 1.0, seed: int = 0, offset: int = 0) -> ChannelDraw:
    """Exponential power gains ``|h|^2`` with the given mean.

    Identical ``(n, mean, seed, offset)`` give bit-identical gains.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not (np.isfinite(mean) and mean > 0):
        raise ValueError(f"mean must be positive, got {mean!r}")
    u = uniform_draws(int(n), seed, stream=0, offset=offset)
    gains = -mean * np.log(u)
    return ChannelDraw(gains=gains, seed=int(seed), mean=float(mean))


def db_to_linear(x_db):
    out = np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


def linear_to_db(x):
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def dbm_to_watts(x_dbm, bandwidth_hz: float = 1.0):
    """Convert a dBm (or dBm/Hz density) figure to watts over ``bandwidth_hz``."""
    if not bandwidth_hz > 0:
        raise ValueError("bandwidth must be positive")
    return db_to_linear(x_dbm - 30.0) * bandwidth_hz
