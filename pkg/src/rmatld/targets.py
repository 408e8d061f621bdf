"""Target functions psi for the expectation-form expansions.

Estimators evaluate psi pointwise.  Theory evaluators need the tilted
window integral of exp(-s u) psi(u) against the Gaussian fluctuation law
N(0, sigma_s^2 n) of the recentered coefficient; as n grows this reduces
to the flat-density integral times 1/(sigma_s sqrt(2 pi n)).  Indicator
targets carry the window integral in closed form so that specializing
the general expansion reproduces the plain tail formulas exactly;
tabulated targets use trapezoid quadrature on their declared support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx, ndtr


def gaussian_tail_window(z: float) -> float:
    """E[exp(-z W) 1{W >= 0}] for standard normal W, i.e. e^{z^2/2} Phi-bar(z).

    Evaluated through the scaled complementary error function for
    stability; asymptotically 1/(z sqrt(2 pi)) as z grows.
    """
    return 0.5 * float(erfcx(z / math.sqrt(2.0)))


def gaussian_window(s: float, variance: float, a1: float, a2: float) -> float:
    """E[exp(-s U) 1{a1 <= U <= a2}] for U ~ N(0, variance)."""
    sd = math.sqrt(variance)
    hi = 1.0 if np.isinf(a2) else float(ndtr(a2 / sd + s * sd))
    lo = 0.0 if np.isneginf(a1) else float(ndtr(a1 / sd + s * sd))
    return math.exp(0.5 * s * s * variance) * (hi - lo)


@dataclass(frozen=True)
class TailIndicator:
    """psi(u) = 1{u >= 0} (upper) or 1{u <= 0} (lower)."""

    upper: bool = True
    certified: bool = True

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return (u >= 0.0).astype(float) if self.upper else (u <= 0.0).astype(float)

    def tilted_integral(self, s: float, variance: float) -> float:
        if self.upper:
            if s <= 0.0:
                raise ValueError("upper tail indicator needs s > 0 for integrability")
            return gaussian_tail_window(s * math.sqrt(variance))
        if s >= 0.0:
            raise ValueError("lower tail indicator needs s < 0 for integrability")
        return gaussian_tail_window(-s * math.sqrt(variance))


@dataclass(frozen=True)
class IntervalIndicator:
    """psi(u) = 1{a1 <= u <= a2}."""

    a1: float
    a2: float
    certified: bool = True

    def __post_init__(self):
        if not self.a1 < self.a2:
            raise ValueError("need a1 < a2")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return ((u >= self.a1) & (u <= self.a2)).astype(float)

    def tilted_integral(self, s: float, variance: float) -> float:
        return gaussian_window(s, variance, self.a1, self.a2)


class PsiTable:
    """psi tabulated on a uniform u-grid with declared compact support.

    Values are zero outside [u_lo, u_hi].  The caller asserts direct
    Riemann integrability of exp(-s'u) psi via the ``certified`` flag.
    """

    def __init__(self, u_lo: float, u_hi: float, values: np.ndarray,
                 certified: bool = True):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or len(values) < 2:
            raise ValueError("values must be a 1-D table with >= 2 entries")
        if not u_lo < u_hi:
            raise ValueError("need u_lo < u_hi")
        self.u_lo = float(u_lo)
        self.u_hi = float(u_hi)
        self.u_grid = np.linspace(u_lo, u_hi, len(values))
        self.values = values
        self.certified = bool(certified)

    @classmethod
    def from_function(cls, fn, u_lo: float, u_hi: float, step: float = 1e-3,
                      certified: bool = True) -> "PsiTable":
        n = max(2, int(round((u_hi - u_lo) / step)) + 1)
        u = np.linspace(u_lo, u_hi, n)
        return cls(u_lo, u_hi, fn(u), certified=certified)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(invalid="ignore"):
            vals = np.interp(u, self.u_grid, self.values, left=0.0, right=0.0)
        # -inf arguments (vanishing coefficient) contribute zero
        return np.where(np.isneginf(u), 0.0, vals)

    def tilted_integral(self, s: float, variance: float) -> float:
        u = self.u_grid
        density = np.exp(-0.5 * u * u / variance) / math.sqrt(2.0 * math.pi * variance)
        integrand = np.exp(-s * u) * self.values * density
        return float(np.trapezoid(integrand, u))
