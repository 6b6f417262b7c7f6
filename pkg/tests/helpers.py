"""Synthetic process generators shared across test modules."""

import numpy as np


def ar1(n: int, phi: float, c: float = 0.0, sigma: float = 1.0, seed: int = 0, burn: int = 50):
    rng = np.random.default_rng(seed)
    total = n + burn
    y = np.empty(total)
    y[0] = c / (1 - phi) if abs(phi) < 1 else 0.0
    eps = rng.normal(0.0, sigma, size=total)
    for t in range(1, total):
        y[t] = c + phi * y[t - 1] + eps[t]
    return y[burn:]


def white_noise(n: int, seed: int = 0, sigma: float = 1.0):
    return np.random.default_rng(seed).normal(0.0, sigma, size=n)


def random_walk(n: int, seed: int = 0, sigma: float = 1.0):
    return np.cumsum(white_noise(n, seed, sigma))


def double_integrated(n: int, seed: int = 0, sigma: float = 1.0):
    return np.cumsum(random_walk(n, seed, sigma))


def count_series(n: int, seed: int = 0, level: float = 12.0):
    """Non-negative integer counts with mild level drift, for pipeline tests."""
    rng = np.random.default_rng(seed)
    drift = np.cumsum(rng.normal(0.0, 1.0, size=n))
    vals = np.rint(level + drift + rng.normal(0.0, 1.5, size=n)).astype(np.int64)
    return np.maximum(vals, 0)
