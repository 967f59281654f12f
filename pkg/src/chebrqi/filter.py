"""Scaled Chebyshev polynomial filter for the shifted operator ``A - theta B``.

The filter of degree ``m`` damps the interval ``[a, b]`` and takes the value 1
at ``sigma1 < a``::

    p(t) = C_m(1 + 2 (t - b) / (b - a)) / C_m(1 + 2 (sigma1 - b) / (b - a))
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class FilterIntervalError(ValueError):
    """The damping interval is degenerate or contains the anchor point."""


@dataclass(frozen=True)
class FilterParams:
    m: int
    a: float
    b: float
    sigma1: float

    def validate(self):
        if self.m < 1:
            raise ValueError(f"filter degree must be >= 1, got {self.m}")
        if not self.b - self.a >= 1e-14 * max(abs(self.a), abs(self.b), 1.0):
            raise FilterIntervalError(
                f"degenerate interval [{self.a!r}, {self.b!r}]; widen it before filtering")
        if not self.sigma1 < self.a:
            raise FilterIntervalError(f"sigma1={self.sigma1!r} must lie below a={self.a!r}")
        if self.sigma1 == 0.5 * (self.a + self.b):
            raise FilterIntervalError("sigma1 equals the interval centre; widen the interval")


def cheb_poly_value(m: int, t: float) -> float:
    """First-kind Chebyshev polynomial ``C_m(t)`` from its cos/cosh form."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    if m == 0:
        return 1.0
    if -1.0 <= t <= 1.0:
        return math.cos(m * math.acos(t))
    value = math.cosh(m * math.acosh(abs(t)))
    return -value if (t < 0 and m % 2) else value


def cheb_poly_recurrence(m: int, t: float) -> float:
    """``C_m(t)`` by the three-term recurrence."""
    if m == 0:
        return 1.0
    prev, cur = 1.0, t
    for _ in range(m - 1):
        prev, cur = cur, 2.0 * t * cur - prev
    return cur


def filter_gain_profile(p: FilterParams, ts) -> list[float]:
    """Evaluate the scalar filter ``p(t)`` at the sample points ``ts``."""
    scale = 2.0 / (p.b - p.a)
    denom = cheb_poly_value(p.m, 1.0 + (p.sigma1 - p.b) * scale)
    return [cheb_poly_value(p.m, 1.0 + (t - p.b) * scale) / denom for t in ts]


def chebyshev_filter(C, x, p: FilterParams) -> np.ndarray:
    """Return ``p(C) x`` via the scaled three-term recurrence.

    ``C`` is anything with an ``apply`` method (or a callable); it is applied
    exactly ``p.m`` times. The result is not normalized.
    """
    p.validate()
    apply = C.apply if hasattr(C, "apply") else C
    x = np.asarray(x, dtype=np.float64)
    e = 0.5 * (p.b - p.a)
    c = 0.5 * (p.b + p.a)
    sigma = e / (p.sigma1 - c)
    tau = 2.0 / sigma
    z_prev = x
    z = (apply(x) - c * x) * (sigma / e)
    for _ in range(1, p.m):
        sigma_new = 1.0 / (tau - sigma)
        z_next = (apply(z) - c * z) * (2.0 * sigma_new / e) - (sigma * sigma_new) * z_prev
        z_prev, z = z, z_next
        sigma = sigma_new
    return z
