"""Plain and tilted projective walks, exact enumeration, and the
importance-sampling estimators.

The tilted sampler draws each step from the exactly-renormalized one-step
kernel built from the discretized eigenfunction; the per-step
normalization logs are tracked so every estimator is unbiased for the
discretized dynamics (interpolation error shows up as a bias that shrinks
under grid refinement, measurable against the small-n enumeration
oracle).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels, rng
from .geometry import DualPoint, ProjPoint, act, cocycle_sigma
from .model import MatrixModel
from .rate import RateFunction, legendre
from .spectral import SpectralData, tilt_kernel

ENUM_BUDGET = 20_000_000
_ENUM_BLOCK = 1 << 18


@dataclass(frozen=True)
class Trajectory:
    n: int
    x_path: tuple  # ProjPoints x0, G_1 x0, ..., G_n x0
    log_norm: float  # sigma(G_n, x0)
    word: tuple  # generator indices, time order
    weight_log: float  # accumulated per-step normalization log (0 for plain walks)


@dataclass(frozen=True)
class LDEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    theory: float | None = None

    @property
    def ratio(self) -> float | None:
        return None if self.theory is None else self.value / self.theory

    def with_theory(self, theory: float) -> "LDEstimate":
        return LDEstimate(self.value, self.stderr, self.samples, self.seed, theory)


def walk(model: MatrixModel, x0: ProjPoint, n: int, seed: int) -> Trajectory:
    """One plain walk: i.i.d. generator draws by the model weights."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.chunk_generator(seed, 0)
    cumw = np.cumsum(model.weights)
    x = x0
    path = [x0]
    word = []
    log_norm = 0.0
    for _ in range(n):
        j = int(np.searchsorted(cumw, gen.random(), side="right"))
        j = min(j, model.m - 1)
        log_norm += cocycle_sigma(model.generators[j], x)
        x = act(model.generators[j], x)
        path.append(x)
        word.append(j)
    return Trajectory(n=n, x_path=tuple(path), log_norm=log_norm,
                      word=tuple(word), weight_log=0.0)


def tilted_walk(model: MatrixModel, data: SpectralData, x0: ProjPoint,
                n: int, seed: int) -> Trajectory:
    """One walk under the tilted kernel, with the normalization log tracked."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.chunk_generator(seed, 0)
    x = x0
    path = [x0]
    word = []
    log_norm = 0.0
    weight_log = 0.0
    for _ in range(n):
        probs, log_total = _tilt_step(model, data, x)
        j = int(np.searchsorted(np.cumsum(probs), gen.random(), side="right"))
        j = min(j, model.m - 1)
        weight_log += log_total
        log_norm += cocycle_sigma(model.generators[j], x)
        x = act(model.generators[j], x)
        path.append(x)
        word.append(j)
    return Trajectory(n=n, x_path=tuple(path), log_norm=log_norm,
                      word=tuple(word), weight_log=weight_log)


def _tilt_step(model: MatrixModel, data: SpectralData, x: ProjPoint):
    probs = tilt_kernel(model, data, x)
    theta = x.angle
    c, sn = np.cos(theta), np.sin(theta)
    gens = model.generators
    a = gens[:, 0, 0] * c + gens[:, 0, 1] * sn
    b = gens[:, 1, 0] * c + gens[:, 1, 1] * sn
    sigma = 0.5 * np.log(a * a + b * b)
    theta_new = np.mod(np.arctan2(b, a), np.pi)
    terms = model.weights * np.exp(data.s * sigma) * data.r_at(theta_new)
    log_total = float(np.log(terms.sum()) - data.log_kappa - np.log(data.r_at(theta)))
    return probs, log_total


def _batch(model: MatrixModel, data: SpectralData | None, theta0: float,
           n: int, samples: int, seed: int, second: SpectralData | None = None):
    """Chunked kernel runs.  Returns (final_theta, log_norm, wlog, wlog2)."""
    if data is None:
        s, log_kappa, r_tab = 0.0, 0.0, np.ones(64)
    else:
        s, log_kappa, r_tab = data.s, data.log_kappa, data.r_s
    if second is None:
        s2, lk2, r2 = 0.0, 0.0, r_tab
        track = False
    else:
        s2, lk2, r2 = second.s, second.log_kappa, second.r_s
        track = True
    outs = [np.empty(samples) for _ in range(4)]
    for start, count in rng.iter_chunks(samples):
        uni = rng.chunk_uniforms(seed, start, count, n)
        res = kernels.walk_batch(model.generators, model.weights, s, log_kappa,
                                 r_tab, theta0, uni, s2, lk2, r2, track)
        for arr, chunk in zip(outs, res):
            arr[start:start + count] = chunk
    return outs


def _coeff_log(log_norm, final_theta, phi_y):
    """log |<f, G_n v>| = sigma(G_n, x) + log delta(y, G_n x)."""
    with np.errstate(divide="ignore"):
        return log_norm + np.log(np.abs(np.cos(final_theta - phi_y)))


def _check_tail(rate: RateFunction, q: float, tail: str):
    if tail not in ("upper", "lower"):
        raise ValueError("tail must be 'upper' or 'lower'")
    _, s_of_q = legendre(rate, q)
    if tail == "upper" and s_of_q <= 0:
        warnings.warn("upper-tail level with s(q) <= 0: estimator is valid "
                      "but not variance-reduced")
    if tail == "lower" and s_of_q >= 0:
        warnings.warn("lower-tail level with s(q) >= 0: estimator is valid "
                      "but not variance-reduced")


def _mean_estimate(values: np.ndarray, samples: int, seed: int) -> LDEstimate:
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return LDEstimate(value=mean, stderr=stderr, samples=samples, seed=seed)


def importance_estimator(model: MatrixModel, data: SpectralData, rate: RateFunction,
                         x0: ProjPoint, f: DualPoint, n: int, q: float,
                         samples: int, seed: int, tail: str = "upper") -> LDEstimate:
    """Tilted-walk estimator of P(log |<f, G_n v>| >= n q) (or <= for lower)."""
    _check_tail(rate, q, tail)
    theta0, phi_y = x0.angle, f.angle
    final_theta, log_norm, wlog, _ = _batch(model, data, theta0, n, samples, seed)
    coeff = _coeff_log(log_norm, final_theta, phi_y)
    ind = coeff >= n * q if tail == "upper" else coeff <= n * q
    logw = (wlog + n * data.log_kappa - data.s * log_norm
            + np.log(data.r_at(theta0)) - np.log(data.r_at(final_theta)))
    return _mean_estimate(np.exp(logw) * ind, samples, seed)


def target_estimator(model: MatrixModel, data: SpectralData, rate: RateFunction,
                     x0: ProjPoint, f: DualPoint, n: int, q: float,
                     phi: np.ndarray, psi, samples: int, seed: int) -> LDEstimate:
    """Tilted estimator of E[phi(G_n x) psi(log |<f, G_n v>| - n q)].

    phi is a grid function on the solver grid; psi carries its own
    integrability certificate (checked by the theory evaluator, not here).
    """
    theta0, phi_y = x0.angle, f.angle
    final_theta, log_norm, wlog, _ = _batch(model, data, theta0, n, samples, seed)
    coeff = _coeff_log(log_norm, final_theta, phi_y)
    logw = (wlog + n * data.log_kappa - data.s * log_norm
            + np.log(data.r_at(theta0)) - np.log(data.r_at(final_theta)))
    phi_vals = data.grid.interp(np.asarray(phi, dtype=float), final_theta)
    vals = np.exp(logw) * phi_vals * psi(coeff - n * q)
    return _mean_estimate(vals, samples, seed)


def changed_measure_estimator(model: MatrixModel, data_s: SpectralData,
                              data_t: SpectralData, rate: RateFunction,
                              x0: ProjPoint, f: DualPoint, n: int,
                              samples: int, seed: int, tail: str = "upper") -> LDEstimate:
    """Estimate of Q_s^x(log |<f, G_n v>| >= n q_t) by sampling under Q_t.

    Reweights each Q_t path by the ratio of the two tilted path laws
    (kappa and eigenfunction factors plus the (s-t)-cocycle), with both
    per-step normalization logs tracked so the estimate is exact in law
    for the discretized kernels.
    """
    s, t = data_s.s, data_t.s
    if s == t:
        raise ValueError("s and t must differ")
    q_t = rate.q_of(t)
    if tail == "upper" and not t > s:
        raise ValueError("upper tail requires t > s")
    if tail == "lower" and not t < s:
        raise ValueError("lower tail requires t < s")
    theta0, phi_y = x0.angle, f.angle
    final_theta, log_norm, wlog_t, wlog_s = _batch(
        model, data_t, theta0, n, samples, seed, second=data_s)
    coeff = _coeff_log(log_norm, final_theta, phi_y)
    ind = coeff >= n * q_t if tail == "upper" else coeff <= n * q_t
    logw = ((s - t) * log_norm
            + np.log(data_s.r_at(final_theta)) - np.log(data_t.r_at(final_theta))
            - np.log(data_s.r_at(theta0)) + np.log(data_t.r_at(theta0))
            + n * (data_t.log_kappa - data_s.log_kappa)
            + wlog_t - wlog_s)
    return _mean_estimate(np.exp(logw) * ind, samples, seed)


def enumerate_exact(model: MatrixModel, x0: ProjPoint, f: DualPoint, n: int,
                    threshold: float, tail: str = "upper",
                    tilt: SpectralData | None = None) -> float:
    """Exact tail probability by summing over all m^n generator words.

    With ``tilt`` given, path probabilities are the products of the
    renormalized tilted one-step kernel instead of the model weights,
    i.e. the law of the discretized tilted sampler.
    """
    if tail not in ("upper", "lower"):
        raise ValueError("tail must be 'upper' or 'lower'")
    n_words = model.m**n
    if n_words > ENUM_BUDGET:
        raise ValueError(f"enumeration over {n_words} words exceeds the budget "
                         f"of {ENUM_BUDGET}")
    if tilt is not None and model.dimension != 2:
        raise ValueError("tilted enumeration supports d=2 only")
    total = 0.0
    for coeff_log, logp, _, _ in _enum_blocks(model, x0.rep, f.rep, n, tilt):
        ind = coeff_log >= threshold if tail == "upper" else coeff_log <= threshold
        if ind.any():
            total += float(np.exp(logp[ind]).sum())
    return total


def enumerate_expectation(model: MatrixModel, x0: ProjPoint, f: DualPoint, n: int,
                          fn, tilt: SpectralData | None = None) -> float:
    """Exact expectation of fn(coeff_log, log_norm, final_theta) over all words.

    final_theta is the angle of G_n x for d=2 models (NaN otherwise).
    """
    n_words = model.m**n
    if n_words > ENUM_BUDGET:
        raise ValueError(f"enumeration over {n_words} words exceeds the budget "
                         f"of {ENUM_BUDGET}")
    total = 0.0
    for coeff_log, logp, log_norm, theta in _enum_blocks(model, x0.rep, f.rep, n, tilt):
        total += float((np.exp(logp) * fn(coeff_log, log_norm, theta)).sum())
    return total


def _enum_blocks(model: MatrixModel, v0: np.ndarray, f_rep: np.ndarray, n: int,
                 tilt: SpectralData | None):
    """Yield (coeff_log, logp, log_norm, final_theta) over blocks of words.

    Long prefixes are walked one at a time and their suffixes expanded
    breadth-first, keeping each block under _ENUM_BLOCK paths.
    """
    if tilt is not None and model.dimension != 2:
        raise ValueError("tilted enumeration supports d=2 only")
    m, d = model.m, model.dimension
    gens = model.generators
    logw0 = np.log(model.weights)
    n2 = n
    while m**n2 > _ENUM_BLOCK:
        n2 -= 1
    n1 = n - n2
    for prefix in range(m**n1):
        v = v0[None, :].copy()
        log_norm = np.zeros(1)
        logp = np.zeros(1)
        rem = prefix
        for _ in range(n1):
            j = rem % m
            rem //= m
            v, log_norm, logp = _enum_step(
                gens[j:j + 1], logw0[j:j + 1], v, log_norm, logp, tilt,
                single=j, all_gens=gens, all_logw=logw0)
        for _ in range(n2):
            v, log_norm, logp = _enum_step(
                gens, logw0, v, log_norm, logp, tilt)
        with np.errstate(divide="ignore"):
            coeff_log = log_norm + np.log(np.abs(v @ f_rep))
        if d == 2:
            theta = np.mod(np.arctan2(v[:, 1], v[:, 0]), np.pi)
        else:
            theta = np.full(len(v), np.nan)
        yield coeff_log, logp, log_norm, theta


def _enum_step(gens, logw, v, log_norm, logp, tilt, single=None,
               all_gens=None, all_logw=None):
    """Advance every path by one step, expanding over the given generators."""
    if all_gens is None:
        all_gens, all_logw = gens, logw
    k = len(v)
    # (k, n_g, d) images before renormalization
    imgs = np.einsum("gij,kj->kgi", gens, v)
    norms = np.linalg.norm(imgs, axis=2)
    if tilt is None:
        logp_new = logp[:, None] + logw[None, :]
    else:
        theta = np.mod(np.arctan2(v[:, 1], v[:, 0]), np.pi)
        # normalized tilted step probabilities for all generators at theta
        a = np.cos(theta)[:, None] * all_gens[None, :, 0, 0] \
            + np.sin(theta)[:, None] * all_gens[None, :, 0, 1]
        b = np.cos(theta)[:, None] * all_gens[None, :, 1, 0] \
            + np.sin(theta)[:, None] * all_gens[None, :, 1, 1]
        sigma = 0.5 * np.log(a * a + b * b)
        theta_new = np.mod(np.arctan2(b, a), np.pi)
        log_terms = all_logw[None, :] + tilt.s * sigma \
            + np.log(tilt.r_at(theta_new))
        log_w_tot = np.log(np.exp(log_terms).sum(axis=1))
        if single is None:
            logp_new = logp[:, None] + log_terms - log_w_tot[:, None]
        else:
            logp_new = logp[:, None] + log_terms[:, single:single + 1] \
                - log_w_tot[:, None]
    n_g = len(gens)
    v_new = (imgs / norms[:, :, None]).reshape(k * n_g, -1)
    log_norm_new = (log_norm[:, None] + np.log(norms)).reshape(k * n_g)
    return v_new, log_norm_new, logp_new.reshape(k * n_g)
