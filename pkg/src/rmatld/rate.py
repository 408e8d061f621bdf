"""Cumulant-generating table Lambda = log kappa and its convex dual.

Lambda is tabulated on a dense s-grid from the spectral solver; it is
analytic, so centered finite differences on the table recover derivatives
up to fifth order to near solver precision.  The Legendre transform is
evaluated by monotone root-finding on the tabulated first derivative, and
the correction h_s(l) = Lambda*(q+l) - Lambda*(q) - s*l is defined through
that exact identity, with the three-term expansion series available as a
cross-check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .model import MatrixModel
from .spectral import ConvergenceError, solve_spectral

# stencil half-width: fifth derivative needs 3 neighbors each side
_EDGE = 3


class OutOfDomainError(ValueError):
    pass


@dataclass(frozen=True)
class RateFunction:
    s_grid: np.ndarray
    lambda_vals: np.ndarray
    derivs: np.ndarray  # shape (5, len(s_grid)); NaN at table edges / gaps
    provenance: tuple

    def __post_init__(self):
        valid = ~np.isnan(self.derivs[1])
        if not valid.any():
            raise ValueError("rate table has no valid interior nodes")
        object.__setattr__(self, "_valid", valid)
        sv = self.s_grid[valid]
        lam_ok = ~np.isnan(self.lambda_vals)
        object.__setattr__(
            self, "_lambda_spline",
            CubicSpline(self.s_grid[lam_ok], self.lambda_vals[lam_ok]))
        object.__setattr__(self, "_d1_spline", CubicSpline(sv, self.derivs[0][valid]))
        object.__setattr__(self, "_s_lo", float(sv[0]))
        object.__setattr__(self, "_s_hi", float(sv[-1]))

    @property
    def valid_s_range(self) -> tuple[float, float]:
        return self._s_lo, self._s_hi

    @property
    def q_range(self) -> tuple[float, float]:
        """Range of Lambda' over the valid table (Lambda' is increasing)."""
        return float(self._d1_spline(self._s_lo)), float(self._d1_spline(self._s_hi))

    def lambda_at(self, s: float) -> float:
        return float(self._lambda_spline(s))

    def deriv_at(self, k: int, s: float) -> float:
        """k-th derivative of Lambda at s, k in 1..5, from the tables."""
        if k == 1:
            return float(self._d1_spline(s))
        valid = self._valid
        sv = self.s_grid[valid]
        return float(np.interp(s, sv, self.derivs[k - 1][valid]))

    def q_of(self, s: float) -> float:
        return self.deriv_at(1, s)

    def sigma_at(self, s: float) -> float:
        """Standard-deviation scale sqrt(Lambda''(s))."""
        d2 = self.deriv_at(2, s)
        if d2 <= 0:
            raise ValueError(f"Lambda''({s}) = {d2} is not positive")
        return math.sqrt(d2)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "lambda", "d1", "d2", "d3", "d4", "d5", "solver_residual"])
            for i, s in enumerate(self.s_grid):
                resid = self.provenance[i].get("residual", "")
                writer.writerow([s, self.lambda_vals[i], *self.derivs[:, i], resid])


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_D3 = np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0
_D4 = np.array([1.0, -4.0, 6.0, -4.0, 1.0])
_D5 = np.array([-1.0, 4.0, -5.0, 0.0, 5.0, -4.0, 1.0]) / 2.0


def _stencil(vals: np.ndarray, coeffs: np.ndarray, h: float, power: int) -> np.ndarray:
    half = (len(coeffs) - 1) // 2
    n = len(vals)
    out = np.full_like(vals, np.nan)
    acc = np.zeros(n - 2 * half)
    for off, c in enumerate(coeffs):
        acc += c * vals[off:n - 2 * half + off]
    out[half:n - half] = acc / h**power
    return out


def build_rate(model: MatrixModel, s_lo: float, s_hi: float, step: float = 0.01,
               N: int = 1024, tol: float = 1e-12) -> RateFunction:
    """Tabulate Lambda(s) = log kappa(s) and its first five derivatives."""
    if step > 0.05:
        raise ValueError("step must be <= 0.05 for reliable finite differences")
    n_pts = int(round((s_hi - s_lo) / step)) + 1
    s_grid = s_lo + step * np.arange(n_pts)
    lam = np.empty(n_pts)
    prov = []
    for i, s in enumerate(s_grid):
        try:
            data = solve_spectral(model, float(s), N=N, tol=tol)
            lam[i] = math.log(data.kappa)
            prov.append({"residual": data.residual})
        except ConvergenceError as exc:
            lam[i] = np.nan
            prov.append({"gap": str(exc)})
    derivs = np.stack([
        _stencil(lam, _D1, step, 1),
        _stencil(lam, _D2, step, 2),
        _stencil(lam, _D3, step, 3),
        _stencil(lam, _D4, step, 4),
        _stencil(lam, _D5, step, 5),
    ])
    # widen the edge mask to the widest stencil so all tables share a window
    derivs[:, :_EDGE] = np.nan
    derivs[:, n_pts - _EDGE:] = np.nan
    d2 = derivs[1]
    if np.any(d2[~np.isnan(d2)] <= 0.0):
        raise ValueError("Lambda'' is not strictly positive on the table: not convex")
    return RateFunction(s_grid=s_grid, lambda_vals=lam, derivs=derivs, provenance=tuple(prov))


def legendre(rate: RateFunction, q: float) -> tuple[float, float]:
    """(Lambda*(q), s(q)) where s(q) solves Lambda'(s) = q.

    Lambda' is strictly increasing by convexity, so the root is unique;
    it is found by bracketed root-finding on the cubic-interpolated table.
    """
    q_lo, q_hi = rate.q_range
    if not (q_lo <= q <= q_hi):
        raise OutOfDomainError(
            f"q={q} outside the achievable interval [{q_lo:.6g}, {q_hi:.6g}]")
    s_lo, s_hi = rate.valid_s_range
    f = lambda s: float(rate._d1_spline(s)) - q
    if f(s_lo) == 0.0:
        s_root = s_lo
    elif f(s_hi) == 0.0:
        s_root = s_hi
    else:
        s_root = brentq(f, s_lo, s_hi, xtol=1e-12, rtol=8.9e-16)
    lam_star = s_root * q - rate.lambda_at(s_root)
    return float(lam_star), float(s_root)


def lambda_star_at(rate: RateFunction, s: float) -> float:
    """Lambda*(Lambda'(s)) = s Lambda'(s) - Lambda(s), without root-finding."""
    return s * rate.q_of(s) - rate.lambda_at(s)


def cramer_h(rate: RateFunction, s: float, l: float) -> float:
    """Exact Legendre-identity correction Lambda*(q+l) - Lambda*(q) - s*l."""
    if l == 0.0:
        return 0.0
    q = rate.q_of(s)
    star_ql, _ = legendre(rate, q + l)
    return star_ql - lambda_star_at(rate, s) - s * l


def cramer_series(rate: RateFunction, s: float, t: float, order: int = 2) -> float:
    """Truncated expansion series zeta_s(t) with its three printed coefficients."""
    if order > 2 or order < 0:
        raise ValueError("only the first three series coefficients are available")
    g2 = rate.deriv_at(2, s)
    g3 = rate.deriv_at(3, s)
    val = g3 / (6.0 * g2**1.5)
    if order >= 1:
        g4 = rate.deriv_at(4, s)
        val += (g4 * g2 - 3.0 * g3**2) / (24.0 * g2**3) * t
    if order >= 2:
        g4 = rate.deriv_at(4, s)
        g5 = rate.deriv_at(5, s)
        val += (g5 * g2**2 - 10.0 * g4 * g3 * g2 + 15.0 * g3**3) / (120.0 * g2**4.5) * t**2
    return float(val)
