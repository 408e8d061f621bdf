"""Acceptance checks: every structural claim of the toolkit, one verdict each.

Each ``criterion_XX`` function performs a self-contained check against an
independent oracle (closed form, exact enumeration, or Monte Carlo with
error bars) and returns a :class:`Verdict`.  ``run_all`` executes any
subset and reports one pass/fail line per criterion.

The checks share a single :class:`AcceptanceContext` so the spectral
solves and the rate table are computed once.  All randomized checks use
fixed seeds and the chunked counter-based generator, so their outputs are
reproducible byte for byte (which the determinism criterion exercises).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import stats

from .diagnostics import (cartan_convergence, clt_diagnostic, iwasawa_convergence,
                          lyapunov_spectrum, regularity_decay, regularity_profile)
from .geometry import DualPoint, ProjPoint
from .ldp import (bahadur_rao_lower, bahadur_rao_upper, changed_measure_theory,
                  llt_theory)
from .model import MatrixModel
from .rate import (OutOfDomainError, RateFunction, build_rate, cramer_h,
                   lambda_star_at)
from .sampler import (changed_measure_estimator, enumerate_exact,
                      importance_estimator)
from .spectral import (SpectralData, duality_residual, empirical_kappa,
                       perturbed_gap, solve_spectral)

# Benchmark model: two positive unimodular generators, equal weights.
FIB2 = {
    "dimension": 2,
    "generators": [[[2.0, 1.0], [1.0, 1.0]], [[1.0, 1.0], [1.0, 2.0]]],
    "weights": [0.5, 0.5],
}

# Evaluation points for the tail checks.  Generic: neither is aligned with
# the stationary support, so the eigenfunction prefactors are nontrivial.
X0_ANGLE = 0.7
F_ANGLE = 0.3

GRID_N = 1024
RATE_RANGE = (-0.45, 1.8, 0.025)


@dataclass
class Verdict:
    criterion: int
    name: str
    passed: bool
    detail: str
    outputs: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] criterion {self.criterion:02d} ({self.name}): "
                f"{self.detail} [{self.seconds:.1f}s]")


def _round_floats(obj, digits: int = 15):
    if isinstance(obj, float):
        return float(f"{obj:.{digits}e}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def canonical_json(outputs: dict) -> str:
    """Deterministic serialization used by the determinism criterion."""
    return json.dumps(_round_floats(outputs), sort_keys=True, separators=(",", ":"))


class AcceptanceContext:
    """Shared model, spectral solves, and rate table for the criteria."""

    def __init__(self):
        self._solves: dict[float, SpectralData] = {}

    @cached_property
    def model(self) -> MatrixModel:
        return MatrixModel.from_dict(FIB2)

    @cached_property
    def rate(self) -> RateFunction:
        lo, hi, step = RATE_RANGE
        return build_rate(self.model, lo, hi, step, N=GRID_N)

    def solve(self, s: float) -> SpectralData:
        if s not in self._solves:
            self._solves[s] = solve_spectral(self.model, s, N=GRID_N)
        return self._solves[s]

    @cached_property
    def x0(self) -> ProjPoint:
        return ProjPoint.from_angle(X0_ANGLE)

    @cached_property
    def f(self) -> DualPoint:
        return DualPoint.from_angle(F_ANGLE)

    @cached_property
    def support_center(self) -> float:
        """Angle maximizing the stationary mean of log |cos(theta - phi)|.

        The stationary mass of this model concentrates on a subinterval of
        the half-circle; measure-geometry diagnostics need their reference
        directions placed relative to that support, not at arbitrary
        angles.  At this angle the log-overlap term of the coefficient has
        near-zero stationary mean, so it does not distort drift checks.
        """
        data = self.solve(1.0)
        ang = data.grid.angles
        with np.errstate(divide="ignore"):
            overlap = np.log(np.abs(np.cos(ang[:, None] - ang[None, :])))
        overlap[~np.isfinite(overlap)] = -1e6
        return float(ang[np.argmax(data.pi_s @ overlap)])

    @cached_property
    def support_mode(self) -> float:
        """Angle of maximal stationary mass at s = 1.

        The support is totally disconnected with a gap at its geometric
        center, so ball-mass scaling must be probed at a point that
        actually carries mass at every scale.
        """
        data = self.solve(1.0)
        return float(data.grid.angles[np.argmax(data.pi_s)])


def _trend_gate(ratios: list[float], lo: float = 0.7, hi: float = 1.4) -> bool:
    errs = [abs(r - 1.0) for r in ratios]
    monotone = all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    return monotone and lo <= ratios[-1] <= hi


def criterion_01(ctx: AcceptanceContext) -> Verdict:
    """At s = 0 the operator is Markov: kappa = 1 and r identically 1."""
    t0 = time.time()
    data = ctx.solve(0.0)
    kappa_err = abs(data.kappa - 1.0)
    r_err = float(np.max(np.abs(data.r_s - 1.0)))
    passed = kappa_err <= 1e-10 and r_err <= 1e-10
    return Verdict(1, "markov-at-zero", passed,
                   f"|kappa-1|={kappa_err:.2e}, max|r-1|={r_err:.2e}",
                   {"kappa_err": kappa_err, "r_err": r_err}, time.time() - t0)


def criterion_02(ctx: AcceptanceContext) -> Verdict:
    """Similarity model: kappa(s) = (2^s + 2^-s)/2 and constant r_s."""
    t0 = time.time()

    def rot(a):
        return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])

    sim = MatrixModel(dimension=2,
                      generators=np.array([2.0 * rot(0.9), 0.5 * rot(2.31)]),
                      weights=np.array([0.5, 0.5]))
    worst_k, worst_r = 0.0, 0.0
    for s in (-0.3, 0.5, 1.0, 1.5):
        data = solve_spectral(sim, s, N=128)
        closed = 0.5 * (2.0**s + 2.0**(-s))
        worst_k = max(worst_k, abs(data.kappa - closed))
        worst_r = max(worst_r, float(data.r_s.max() - data.r_s.min()))
    passed = worst_k <= 1e-8 and worst_r <= 1e-8
    return Verdict(2, "similarity-closed-form", passed,
                   f"max|kappa-closed|={worst_k:.2e}, max r spread={worst_r:.2e}",
                   {"kappa_err": worst_k, "r_spread": worst_r}, time.time() - t0)


def _c03_outputs(ctx: AcceptanceContext) -> dict:
    kappa_hat, stderr = empirical_kappa(ctx.model, 1.0, 40, 1_000_000, 7)
    return {"kappa_hat": kappa_hat, "stderr": stderr,
            "kappa_spectral": ctx.solve(1.0).kappa}


def criterion_03(ctx: AcceptanceContext) -> Verdict:
    """Spectral kappa(1) against the direct Monte Carlo moment estimate."""
    t0 = time.time()
    out = _c03_outputs(ctx)
    z = abs(out["kappa_hat"] - out["kappa_spectral"]) / out["stderr"]
    return Verdict(3, "cross-oracle-kappa", z <= 2.0,
                   f"kappa_hat={out['kappa_hat']:.6f}±{out['stderr']:.1e} "
                   f"vs {out['kappa_spectral']:.6f} (z={z:.2f}, need <=2)",
                   out, time.time() - t0)


def criterion_04(ctx: AcceptanceContext) -> Verdict:
    """Integral representation of r_s from the conjugate eigenmeasure.

    The node-sum residual must be <= 1e-3 at N=1024 and halve when the
    grid doubles.  On this benchmark the conjugate eigenmeasure is
    singular (near-atomic at the negative tilt), so the node sums do not
    converge in sup norm; the check is performed faithfully and reported
    as it comes out.
    """
    t0 = time.time()
    residuals, ratios = {}, {}
    for s in (-0.2, 0.5, 1.0):
        res_n = duality_residual(ctx.solve(s))
        data2 = solve_spectral(ctx.model, s, N=2 * GRID_N)
        res_2n = duality_residual(data2)
        residuals[s] = res_n
        ratios[s] = res_n / res_2n if res_2n > 0 else math.inf
    passed = all(r <= 1e-3 for r in residuals.values()) and \
        all(1.4 <= rt <= 2.6 for rt in ratios.values())
    detail = ", ".join(f"s={s}: res={residuals[s]:.2e} halving={ratios[s]:.2f}"
                       for s in residuals)
    return Verdict(4, "eigenfunction-duality", passed, detail,
                   {"residuals": {str(k): v for k, v in residuals.items()},
                    "ratios": {str(k): v for k, v in ratios.items()}},
                   time.time() - t0)


def _c05_outputs(ctx: AcceptanceContext) -> dict:
    n, samples = 6, 100_000
    out = {}
    # upper tail at s = 1
    d1 = ctx.solve(1.0)
    q1 = ctx.rate.q_of(1.0)
    est = importance_estimator(ctx.model, d1, ctx.rate, ctx.x0, ctx.f, n, q1,
                               samples, 101, tail="upper")
    exact = enumerate_exact(ctx.model, ctx.x0, ctx.f, n, n * q1, tail="upper")
    out["upper"] = {"estimate": est.value, "stderr": est.stderr, "exact": exact}
    # lower tail at s = -0.2
    dm = ctx.solve(-0.2)
    qm = ctx.rate.q_of(-0.2)
    est = importance_estimator(ctx.model, dm, ctx.rate, ctx.x0, ctx.f, n, qm,
                               samples, 102, tail="lower")
    exact = enumerate_exact(ctx.model, ctx.x0, ctx.f, n, n * qm, tail="lower")
    out["lower"] = {"estimate": est.value, "stderr": est.stderr, "exact": exact}
    # tail under the tilted path measure, estimated through a second tilt
    dh = ctx.solve(0.5)
    qt = ctx.rate.q_of(1.0)
    est = changed_measure_estimator(ctx.model, dh, d1, ctx.rate, ctx.x0, ctx.f,
                                    n, samples, 103, tail="upper")
    exact = enumerate_exact(ctx.model, ctx.x0, ctx.f, n, n * qt, tail="upper",
                            tilt=dh)
    out["changed"] = {"estimate": est.value, "stderr": est.stderr, "exact": exact}
    return out


def criterion_05(ctx: AcceptanceContext) -> Verdict:
    """Estimators against exact enumeration over all 2^6 words."""
    t0 = time.time()
    out = _c05_outputs(ctx)
    zs = {k: abs(v["estimate"] - v["exact"]) / v["stderr"] for k, v in out.items()}
    passed = all(z <= 3.0 for z in zs.values())
    detail = ", ".join(f"{k}: z={z:.2f}" for k, z in zs.items()) + " (need <=3)"
    return Verdict(5, "enumeration-oracle", passed, detail, out, time.time() - t0)


def _c06_outputs(ctx: AcceptanceContext) -> dict:
    samples = 1_000_000
    out = {"upper": [], "lower": []}
    d1, dm = ctx.solve(1.0), ctx.solve(-0.2)
    q1, qm = ctx.rate.q_of(1.0), ctx.rate.q_of(-0.2)
    for n in (20, 40, 80):
        est = importance_estimator(ctx.model, d1, ctx.rate, ctx.x0, ctx.f, n,
                                   q1, samples, 600 + n, tail="upper")
        theory = bahadur_rao_upper(d1, ctx.rate, ctx.x0, ctx.f, n)
        out["upper"].append({"n": n, "estimate": est.value, "stderr": est.stderr,
                             "theory": theory, "ratio": est.value / theory})
        est = importance_estimator(ctx.model, dm, ctx.rate, ctx.x0, ctx.f, n,
                                   qm, samples, 660 + n, tail="lower")
        theory = bahadur_rao_lower(dm, ctx.rate, ctx.x0, ctx.f, n)
        out["lower"].append({"n": n, "estimate": est.value, "stderr": est.stderr,
                             "theory": theory, "ratio": est.value / theory})
    return out


def criterion_06(ctx: AcceptanceContext) -> Verdict:
    """Sharp tail evaluator against Monte Carlo across n, both tails."""
    t0 = time.time()
    out = _c06_outputs(ctx)
    up = [row["ratio"] for row in out["upper"]]
    lo = [row["ratio"] for row in out["lower"]]
    passed = _trend_gate(up) and _trend_gate(lo)
    detail = (f"upper ratios {[f'{r:.3f}' for r in up]}, "
              f"lower ratios {[f'{r:.3f}' for r in lo]} "
              "(toward 1, final in [0.7, 1.4])")
    return Verdict(6, "tail-trend", passed, detail, out, time.time() - t0)


def criterion_07(ctx: AcceptanceContext) -> Verdict:
    """Level-perturbed tail at l = 0.5/sqrt(n).

    On this benchmark the perturbed level q(1) + 0.5/sqrt(80) = 0.973
    exceeds the maximal growth rate 2 log((1+sqrt 5)/2) = 0.9624 of any
    generator product, so the target probability is exactly zero and the
    rate function is infinite there.  The evaluator refuses the level
    (out of domain), which is the faithful outcome; the perturbation
    identity itself is checked at a level inside the domain.
    """
    t0 = time.time()
    n = 80
    l = 0.5 / math.sqrt(n)
    d1 = ctx.solve(1.0)
    out = {"l": l, "level": ctx.rate.q_of(1.0) + l}
    gate_ok = False
    try:
        theory = bahadur_rao_upper(d1, ctx.rate, ctx.x0, ctx.f, n, l=l)
        est = importance_estimator(ctx.model, d1, ctx.rate, ctx.x0, ctx.f, n,
                                   ctx.rate.q_of(1.0) + l, 1_000_000, 700,
                                   tail="upper")
        ratio = est.value / theory
        out["ratio"] = ratio
        gate_ok = 0.7 <= ratio <= 1.4
        detail_head = f"ratio={ratio:.3f}"
    except OutOfDomainError as exc:
        out["error"] = str(exc)
        detail_head = (f"level {out['level']:.4f} exceeds the maximal growth "
                       "rate 0.9624: probability is exactly 0 and the rate is "
                       "infinite; evaluator refuses the level")
    # the ratio identity of the evaluator, at a level inside the domain
    l_in = 1e-3
    th0 = bahadur_rao_upper(d1, ctx.rate, ctx.x0, ctx.f, n, l=0.0)
    th1 = bahadur_rao_upper(d1, ctx.rate, ctx.x0, ctx.f, n, l=l_in)
    expected = math.exp(-n * (1.0 * l_in + cramer_h(ctx.rate, 1.0, l_in)))
    ident_err = abs(th1 / th0 / expected - 1.0)
    out["identity_err_at_l=1e-3"] = ident_err
    passed = gate_ok and ident_err <= 1e-10
    return Verdict(7, "perturbed-level", passed,
                   detail_head + f"; in-domain ratio identity err={ident_err:.1e}",
                   out, time.time() - t0)


def criterion_08(ctx: AcceptanceContext) -> Verdict:
    """Interval-probability evaluator: Monte Carlo gate and additivity."""
    t0 = time.time()
    n, a1, a2 = 80, 0.0, 1.0
    d1 = ctx.solve(1.0)
    q1 = ctx.rate.q_of(1.0)
    theory = llt_theory(d1, ctx.rate, ctx.x0, ctx.f, n, a1, a2)
    # Monte Carlo of the interval event under the tilt
    from .sampler import target_estimator
    from .targets import IntervalIndicator
    phi = np.ones_like(d1.grid.angles)
    est = target_estimator(ctx.model, d1, ctx.rate, ctx.x0, ctx.f, n, q1,
                           phi, IntervalIndicator(a1, a2), 1_000_000, 800)
    ratio = est.value / theory
    mid = 0.4
    add_err = abs(llt_theory(d1, ctx.rate, ctx.x0, ctx.f, n, a1, mid)
                  + llt_theory(d1, ctx.rate, ctx.x0, ctx.f, n, mid, a2)
                  - theory) / theory
    passed = 0.7 <= ratio <= 1.4 and add_err <= 1e-10
    return Verdict(8, "interval-form", passed,
                   f"ratio={ratio:.3f} (gate [0.7, 1.4]), additivity err={add_err:.1e}",
                   {"ratio": ratio, "estimate": est.value, "stderr": est.stderr,
                    "theory": theory, "additivity_err": add_err}, time.time() - t0)


def criterion_09(ctx: AcceptanceContext) -> Verdict:
    """Tail under the tilted measure: trend gate and s = 0 reduction."""
    t0 = time.time()
    dh, d1, d0 = ctx.solve(0.5), ctx.solve(1.0), ctx.solve(0.0)
    ratios = []
    rows = []
    for n in (20, 40, 80):
        est = changed_measure_estimator(ctx.model, dh, d1, ctx.rate, ctx.x0,
                                        ctx.f, n, 1_000_000, 900 + n)
        theory = changed_measure_theory(dh, d1, ctx.rate, ctx.x0, ctx.f, n)
        ratios.append(est.value / theory)
        rows.append({"n": n, "estimate": est.value, "stderr": est.stderr,
                     "theory": theory, "ratio": ratios[-1]})
    reduction = changed_measure_theory(d0, d1, ctx.rate, ctx.x0, ctx.f, 40)
    plain = bahadur_rao_upper(d1, ctx.rate, ctx.x0, ctx.f, 40)
    red_err = abs(reduction / plain - 1.0)
    passed = _trend_gate(ratios) and red_err <= 1e-10
    return Verdict(9, "changed-measure", passed,
                   f"ratios {[f'{r:.3f}' for r in ratios]}, s=0 reduction "
                   f"err={red_err:.1e}", {"rows": rows, "reduction_err": red_err},
                   time.time() - t0)


def criterion_10(ctx: AcceptanceContext) -> Verdict:
    """Exponential-scale consistency: -(1/n) log theory converges to the rate."""
    t0 = time.time()
    d1 = ctx.solve(1.0)
    lam_star = lambda_star_at(ctx.rate, 1.0)
    diffs = []
    for n in (20, 80, 320):
        val = -math.log(bahadur_rao_upper(d1, ctx.rate, ctx.x0, ctx.f, n)) / n
        diffs.append(abs(val - lam_star))
    shrink = [diffs[i] / diffs[i + 1] for i in range(2)]
    passed = all(r >= 3.0 for r in shrink)
    return Verdict(10, "exponent-convergence", passed,
                   f"diff shrink factors {[f'{r:.2f}' for r in shrink]} (need >=3)",
                   {"diffs": diffs, "shrink": shrink}, time.time() - t0)


def criterion_11(ctx: AcceptanceContext) -> Verdict:
    """Holder regularity of the stationary measure and tilted-orbit decay."""
    t0 = time.time()
    y = DualPoint.from_angle(ctx.support_mode + math.pi / 2.0)
    r_grid = 0.3 * 0.7**np.arange(10)
    out = {}
    ok = True
    for s, seed in ((-0.2, 1101), (1.0, 1102)):
        prof = regularity_profile(ctx.model, ctx.solve(s), y, r_grid, 50_000, seed)
        out[f"alpha_s={s}"] = {"alpha": prof.fitted_rate, "ci": prof.rate_ci,
                               "censored": prof.censored}
        ok = ok and prof.fitted_rate is not None and prof.rate_ci[0] > 0.0
    dec = regularity_decay(ctx.model, ctx.solve(1.0), ctx.x0, y, 0.3, 40, 30,
                           50_000, 1103)
    out["decay"] = {"c": dec.fitted_rate, "ci": dec.rate_ci,
                    "censored": dec.censored}
    ok = ok and dec.fitted_rate is not None and dec.rate_ci[0] > 0.0
    def _fmt(v):
        rate_val = v.get("alpha", v.get("c"))
        if rate_val is None:
            return f"censored ({v['censored']} points)"
        return f"{rate_val:.3f} ci=({v['ci'][0]:.3f},{v['ci'][1]:.3f})"

    detail = ", ".join(f"{k}: {_fmt(v)}" for k, v in out.items())
    return Verdict(11, "measure-regularity", ok, detail, out, time.time() - t0)


def criterion_12(ctx: AcceptanceContext) -> Verdict:
    """Law of large numbers and CLT of the coefficient under the tilt."""
    t0 = time.time()
    d1 = ctx.solve(1.0)
    center = ctx.support_center
    x0 = ProjPoint.from_angle(center)
    f = DualPoint.from_angle(center)
    mean_chk = clt_diagnostic(ctx.model, d1, ctx.rate, x0, f, 200, 100_000, 1201)
    ks100 = clt_diagnostic(ctx.model, d1, ctx.rate, x0, f, 100, 100_000, 1202)["ks"]
    ks400 = clt_diagnostic(ctx.model, d1, ctx.rate, x0, f, 400, 100_000, 1203)["ks"]
    z = mean_chk["mean_err"] / mean_chk["mean_stderr"]
    passed = z <= 3.0 and ks400 < ks100 < 0.05 and ks400 < 0.05
    return Verdict(12, "tilted-slln-clt", passed,
                   f"mean z={z:.2f} (need <=3), KS(100)={ks100:.4f}, "
                   f"KS(400)={ks400:.4f} (both < 0.05, decreasing)",
                   {"mean": mean_chk, "ks100": ks100, "ks400": ks400},
                   time.time() - t0)


def criterion_13(ctx: AcceptanceContext) -> Verdict:
    """Lyapunov spectrum: top exponent, gap, and determinant identity."""
    t0 = time.time()
    qp = ctx.rate.q_of(1.0)
    est1 = lyapunov_spectrum(ctx.model, ctx.solve(1.0), 4000, 500, 1301)
    z1 = abs(est1.lambda1 - qp) / est1.lambda1_stderr
    est0 = lyapunov_spectrum(ctx.model, None, 400, 2000, 1302)
    det_target = float(np.average(np.linalg.slogdet(ctx.model.generators)[1],
                                  weights=ctx.model.weights))
    det_err = abs(est0.lambda1 + est0.lambda2 - det_target)
    det_stderr = math.hypot(est0.lambda1_stderr, est0.lambda2_stderr)
    gap_ci = est0.gap_ci
    passed = (z1 <= 3.0 and gap_ci[0] > 0.0
              and det_err <= 3.0 * det_stderr + 1e-12)
    return Verdict(13, "lyapunov-gap", passed,
                   f"lambda1(1) z={z1:.2f} (need <=3), gap CI "
                   f"({gap_ci[0]:.4f},{gap_ci[1]:.4f}) excludes 0, det identity "
                   f"err={det_err:.1e}",
                   {"lambda1_tilted": est1.lambda1, "z1": z1,
                    "gap_ci": list(gap_ci), "det_err": det_err},
                   time.time() - t0)


def criterion_14(ctx: AcceptanceContext) -> Verdict:
    """Frame convergence: diagonal ratio, pathwise majorant, moment decay."""
    t0 = time.time()
    rows = cartan_convergence(ctx.model, None, ctx.x0, (100, 200, 400), 2000, 1401)
    est = lyapunov_spectrum(ctx.model, None, 400, 2000, 1402)
    last = rows[-1]
    ratio_per_n = last["mean_log_a_ratio"] / last["n"]
    se = math.hypot(last["stderr_log_a_ratio"] / last["n"],
                    math.hypot(est.lambda1_stderr, est.lambda2_stderr))
    z = abs(ratio_per_n + est.gap) / se
    iw = iwasawa_convergence(ctx.model, None, list(range(1, 21)), 0.5, 2000, 1403)
    holds = min(r["majorant_holds_fraction"] for r in iw)
    mom = np.array([r["alpha_moment"] for r in iw[:-1]])
    ns = np.array([r["n"] for r in iw[:-1]], dtype=float)
    res = stats.linregress(ns, np.log(mom))
    slope_hi = res.slope + 1.96 * res.stderr
    passed = z <= 3.0 and holds == 1.0 and slope_hi < 0.0
    return Verdict(14, "frame-convergence", passed,
                   f"diag ratio z={z:.2f} (need <=3), majorant holds on "
                   f"{100 * holds:.1f}% of paths, moment log-slope "
                   f"{res.slope:.3f}+-{1.96 * res.stderr:.3f}",
                   {"ratio_per_n": ratio_per_n, "gap": est.gap, "z": z,
                    "majorant_holds": holds, "moment_slope": res.slope},
                   time.time() - t0)


def criterion_15(ctx: AcceptanceContext) -> Verdict:
    """Fourier-perturbed kernel: unit modulus only at frequency zero."""
    t0 = time.time()
    out = {}
    ok = True
    for s in (0.5, 1.0):
        data = ctx.solve(s)
        g0 = perturbed_gap(ctx.model, data, 0.0)
        vals = {t: perturbed_gap(ctx.model, data, t) for t in (0.5, 1.0, 2.0, 4.0)}
        out[f"s={s}"] = {"at_zero": g0, **{f"t={t}": v for t, v in vals.items()}}
        ok = ok and abs(g0 - 1.0) <= 1e-10 and all(v < 1.0 - 1e-4
                                                   for v in vals.values())
    detail = "; ".join(f"{k}: zero_err={abs(v['at_zero'] - 1):.1e}, max="
                       f"{max(x for kk, x in v.items() if kk != 'at_zero'):.4f}"
                       for k, v in out.items())
    return Verdict(15, "modulus-gap", ok, detail + " (need < 0.9999)", out,
                   time.time() - t0)


def criterion_16(ctx: AcceptanceContext) -> Verdict:
    """Byte-identical re-runs of the randomized oracle checks."""
    t0 = time.time()
    pairs = {}
    for name, fn in (("kappa", _c03_outputs), ("enumeration", _c05_outputs),
                     ("tails", _c06_outputs)):
        first = canonical_json(fn(ctx))
        second = canonical_json(fn(ctx))
        pairs[name] = first == second
    passed = all(pairs.values())
    detail = ", ".join(f"{k}: {'identical' if v else 'MISMATCH'}"
                       for k, v in pairs.items())
    return Verdict(16, "determinism", passed, detail, {"identical": pairs},
                   time.time() - t0)


CRITERIA = [criterion_01, criterion_02, criterion_03, criterion_04,
            criterion_05, criterion_06, criterion_07, criterion_08,
            criterion_09, criterion_10, criterion_11, criterion_12,
            criterion_13, criterion_14, criterion_15, criterion_16]


def run_all(ctx: AcceptanceContext | None = None,
            which: list[int] | None = None) -> list[Verdict]:
    ctx = ctx or AcceptanceContext()
    verdicts = []
    for fn in CRITERIA:
        num = int(fn.__name__.split("_")[1])
        if which is not None and num not in which:
            continue
        verdicts.append(fn(ctx))
    return verdicts
