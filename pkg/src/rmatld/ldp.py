"""Sharp large-deviation evaluators for coefficient tails.

Every evaluator returns the leading-order prediction for a finite n,
assembled from the spectral data at the tilt point and the rate table.
The factor-breakdown variants expose each term (eigenfunction prefactor,
exponential rate, Gaussian prefactor, target integral) for reporting.

All evaluators share the same float paths for the common factors, so the
structural identities between them (tail as a specialization of the
target form, interval additivity, the ratio law in the level offset, and
the reduction of the measure-change formula at s = 0) hold to near
machine precision rather than just to leading order.

The Gaussian window factor is kept in its finite-n form
e^{z^2/2} Phi-bar(z) with z = s sigma_s sqrt(n) (and its interval and
weighted analogues), whose n -> infinity asymptote is the familiar
1/(s sigma_s sqrt(2 pi n)).  On models with a small variance sigma_s^2
the asymptote is far off at practical n while the finite-n window tracks
the sampled probabilities, so the finite-n form is the evaluator of
record here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DualPoint, ProjPoint
from .rate import RateFunction, lambda_star_at, legendre
from .spectral import SpectralData
from .targets import gaussian_tail_window, gaussian_window


class WrongTailError(ValueError):
    """Tilt sign does not match the requested tail."""


@dataclass(frozen=True)
class TheoremInput:
    """Bundle of evaluation-point arguments shared by the evaluators."""

    x: ProjPoint
    y: DualPoint
    n: int
    s: float
    l: float = 0.0
    a1: float | None = None
    a2: float | None = None


def _lam_star_offset(rate: RateFunction, s: float, l: float) -> float:
    """Lambda*(Lambda'(s) + l); closed form at l = 0, root-finding otherwise."""
    if l == 0.0:
        return lambda_star_at(rate, s)
    lam_star, _ = legendre(rate, rate.q_of(s) + l)
    return lam_star


def bahadur_rao_factors(data: SpectralData, rate: RateFunction, x0: ProjPoint,
                        f: DualPoint, n: int, l: float = 0.0,
                        tail: str = "upper") -> dict:
    """P(log |<f, G_n v>| >= n (q + l)) at q = Lambda'(s) (<= for lower).

    The level offset l shifts the exponent to Lambda*(q + l); the
    prefactor keeps the tilt point s, which is the regime where the
    offset is o(1).
    """
    s = data.s
    if tail == "upper":
        if s <= 0.0:
            raise WrongTailError("upper tail needs a tilt s > 0")
        denom_s = s
    elif tail == "lower":
        if s >= 0.0:
            raise WrongTailError("lower tail needs a tilt s < 0")
        denom_s = -s
    else:
        raise ValueError("tail must be 'upper' or 'lower'")
    q = rate.q_of(s)
    lam_star = _lam_star_offset(rate, s, l)
    sigma = rate.sigma_at(s)
    prefactor = float(data.r_at(x0.angle) * data.r_star_exact(f.angle) / data.rho_s)
    gaussian = gaussian_tail_window(denom_s * sigma * math.sqrt(n))
    value = prefactor * math.exp(-n * lam_star) * gaussian
    return {"value": value, "prefactor": prefactor, "rate": lam_star,
            "gaussian": gaussian, "s": s, "q": q, "level": q + l, "n": n}


def bahadur_rao_upper(data: SpectralData, rate: RateFunction, x0: ProjPoint,
                      f: DualPoint, n: int, l: float = 0.0) -> float:
    return bahadur_rao_factors(data, rate, x0, f, n, l, tail="upper")["value"]


def bahadur_rao_lower(data: SpectralData, rate: RateFunction, x0: ProjPoint,
                      f: DualPoint, n: int, l: float = 0.0) -> float:
    return bahadur_rao_factors(data, rate, x0, f, n, l, tail="lower")["value"]


def llt_factors(data: SpectralData, rate: RateFunction, x0: ProjPoint,
                f: DualPoint, n: int, a1: float, a2: float,
                l: float = 0.0) -> dict:
    """P(log |<f, G_n v>| - n (q + l) in [a1, a2]), local limit form.

    Valid for either tilt sign; the tilted interval window is positive in
    both cases and additive over adjacent intervals by construction.
    """
    s = data.s
    if s == 0.0:
        raise WrongTailError("local limit form needs a nonzero tilt")
    if not a1 < a2:
        raise ValueError("need a1 < a2")
    lam_star = _lam_star_offset(rate, s, l)
    sigma = rate.sigma_at(s)
    prefactor = float(data.r_at(x0.angle) * data.r_star_exact(f.angle) / data.rho_s)
    interval = gaussian_window(s, sigma * sigma * n, a1, a2)
    value = prefactor * math.exp(-n * lam_star) * interval
    return {"value": value, "prefactor": prefactor, "rate": lam_star,
            "interval": interval, "s": s, "n": n, "a1": a1, "a2": a2}


def llt_theory(data: SpectralData, rate: RateFunction, x0: ProjPoint,
               f: DualPoint, n: int, a1: float, a2: float,
               l: float = 0.0) -> float:
    return llt_factors(data, rate, x0, f, n, a1, a2, l)["value"]


def target_factors(data: SpectralData, rate: RateFunction, x0: ProjPoint,
                   f: DualPoint, n: int, phi: np.ndarray, psi,
                   l: float = 0.0) -> dict:
    """E[phi(G_n x) psi(log |<f, G_n v>| - n (q + l))] at q = Lambda'(s).

    phi is tabulated on the solver grid; psi must carry a certificate
    that exp(-s u) psi(u) is directly Riemann integrable.
    """
    s = data.s
    if not getattr(psi, "certified", False):
        raise ValueError("psi carries no integrability certificate")
    sigma = rate.sigma_at(s)
    integral = psi.tilted_integral(s, sigma * sigma * n)
    phi_vals = np.asarray(phi, dtype=float)
    if phi_vals.shape != data.grid.angles.shape:
        raise ValueError("phi must be tabulated on the solver grid")
    gap = np.abs(np.cos(data.grid.angles - f.angle))
    with np.errstate(divide="ignore"):
        weighted = float((phi_vals * gap**s) @ data.nu_s)
    lam_star = _lam_star_offset(rate, s, l)
    prefactor = float(data.r_at(x0.angle)) * (weighted / data.rho_s)
    value = prefactor * integral * math.exp(-n * lam_star)
    return {"value": value, "prefactor": prefactor, "rate": lam_star,
            "psi_integral": integral, "s": s, "n": n}


def target_theory(data: SpectralData, rate: RateFunction, x0: ProjPoint,
                  f: DualPoint, n: int, phi: np.ndarray, psi,
                  l: float = 0.0) -> float:
    return target_factors(data, rate, x0, f, n, phi, psi, l)["value"]


def changed_measure_factors(data_s: SpectralData, data_t: SpectralData,
                            rate: RateFunction, x0: ProjPoint, f: DualPoint,
                            n: int, tail: str = "upper") -> dict:
    """Q_s^x(log |<f, G_n v>| >= n q_t) with q_t = Lambda'(t) (<= for lower).

    The tail under the s-tilted path measure at the level selected by a
    second tilt t; at s = 0 this reduces to the plain tail formula.
    """
    s, t = data_s.s, data_t.s
    if tail == "upper":
        if not t > s:
            raise WrongTailError("upper tail under the s-measure needs t > s")
        denom = t - s
    elif tail == "lower":
        if not t < s:
            raise WrongTailError("lower tail under the s-measure needs t < s")
        denom = s - t
    else:
        raise ValueError("tail must be 'upper' or 'lower'")
    q_s, q_t = rate.q_of(s), rate.q_of(t)
    exponent = (lambda_star_at(rate, t) - lambda_star_at(rate, s)
                - s * (q_t - q_s))
    sigma = rate.sigma_at(t)
    angles = data_t.grid.angles
    gap = np.abs(np.cos(angles - f.angle))
    with np.errstate(divide="ignore"):
        weighted = float((gap**t * (data_s.r_at(angles) / data_t.r_s)) @ data_t.pi_s)
    prefactor = float(data_t.r_at(x0.angle) / data_s.r_at(x0.angle)) * weighted
    gaussian = gaussian_tail_window(denom * sigma * math.sqrt(n))
    value = prefactor * math.exp(-n * exponent) * gaussian
    return {"value": value, "prefactor": prefactor, "rate": exponent,
            "gaussian": gaussian, "s": s, "t": t, "level": q_t, "n": n}


def changed_measure_theory(data_s: SpectralData, data_t: SpectralData,
                           rate: RateFunction, x0: ProjPoint, f: DualPoint,
                           n: int, tail: str = "upper") -> float:
    return changed_measure_factors(data_s, data_t, rate, x0, f, n, tail)["value"]
