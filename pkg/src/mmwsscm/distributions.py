"""Seeded random sampling for the channel generator.

Every draw made while building a channel goes through an :class:`RngStream`.
Streams wrap a PCG64 generator seeded through :class:`numpy.random.SeedSequence`,
so the stream for realization ``k`` of an ensemble depends only on
``(seed, k)`` and never on the order in which realizations are produced.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["RngStream", "round_half_up", "lognormal_params"]


def round_half_up(x):
    """Closest integer to ``x``, halves rounded towards +inf."""
    r = np.floor(np.asarray(x, dtype=float) + 0.5).astype(np.int64)
    return int(r) if r.ndim == 0 else r


def lognormal_params(mean: float, std: float) -> tuple[float, float]:
    """Underlying normal (mu, sigma) of a lognormal with the given mean and std."""
    m2 = mean * mean
    s2 = std * std
    mu = math.log(m2 / math.sqrt(m2 + s2))
    sigma = math.sqrt(math.log1p(s2 / m2))
    return mu, sigma


class RngStream:
    """Reproducible random stream.

    Parameters
    ----------
    seed : int
        64-bit unsigned seed.
    key : tuple of int, optional
        Spawn key identifying a sub-stream of ``seed``. Sub-streams with
        different keys are statistically independent.
    """

    def __init__(self, seed: int = 0, key: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.key = tuple(int(k) for k in key)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=self.key))
        )

    def substream(self, index: int) -> "RngStream":
        """Independent child stream keyed by ``index`` (e.g. realization number)."""
        return RngStream(self.seed, self.key + (int(index),))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key})"

    # -- continuous -----------------------------------------------------------------

    def uniform(self, lo: float, hi: float, size=None):
        if lo > hi:
            raise ValueError(f"invalid range: lo={lo} > hi={hi}")
        if lo == hi:
            return lo if size is None else np.full(size, float(lo))
        return self._gen.uniform(lo, hi, size)

    def exponential(self, mean: float, size=None):
        if not mean > 0:
            raise ValueError(f"exponential mean must be positive, got {mean}")
        return self._gen.exponential(mean, size)

    def normal(self, mu: float, sigma: float, size=None):
        if sigma < 0:
            raise ValueError(f"normal sigma must be non-negative, got {sigma}")
        if sigma == 0:
            return mu if size is None else np.full(size, float(mu))
        return self._gen.normal(mu, sigma, size)

    # -- discrete -------------------------------------------------------------------

    def discrete_uniform(self, lo: int, hi: int, size=None):
        """Integer uniformly distributed on ``{lo, ..., hi}``."""
        if int(lo) != lo or int(hi) != hi:
            raise ValueError(f"discrete uniform bounds must be integers, got ({lo}, {hi})")
        if lo > hi:
            raise ValueError(f"invalid range: lo={lo} > hi={hi}")
        out = self._gen.integers(int(lo), int(hi), size=size, endpoint=True)
        return int(out) if size is None else out

    def poisson(self, mean: float, size=None):
        if not mean > 0:
            raise ValueError(f"poisson mean must be positive, got {mean}")
        out = self._gen.poisson(mean, size)
        return int(out) if size is None else out

    def discrete_lognormal(self, mean: float, std: float, size=None):
        """Rounded lognormal draw, floored at 1.

        ``mean`` and ``std`` are the moments of the continuous lognormal
        itself, not of its logarithm.
        """
        if not mean > 0:
            raise ValueError(f"lognormal mean must be positive, got {mean}")
        if std < 0:
            raise ValueError(f"lognormal std must be non-negative, got {std}")
        if std == 0:
            x = np.full(() if size is None else size, float(mean))
        else:
            mu, sigma = lognormal_params(mean, std)
            x = self._gen.lognormal(mu, sigma, size)
        return np.maximum(round_half_up(x), 1) if size is not None else max(round_half_up(x), 1)
