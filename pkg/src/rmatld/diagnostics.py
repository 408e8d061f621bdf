"""Statistical checks of the structural theory behind the expansions.

Holder regularity of the stationary tilted measure, SLLN/CLT of the
coefficient under the tilted path law, the Lyapunov spectrum and its gap,
and the convergence of Cartan and Iwasawa frames along tilted products.
Every check is a Monte Carlo test reporting confidence bands, not exact
equalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import kernels, rng
from .geometry import DualPoint, ProjPoint
from .model import MatrixModel, matrix_functionals
from .rate import RateFunction
from .spectral import SpectralData

BURN_IN = 200
MIN_POSITIVE = 50  # minimum positive counts for a point to enter a fit
RENORM_EVERY = 16


@dataclass(frozen=True)
class DecayProfile:
    k_values: np.ndarray
    empirical_probs: np.ndarray
    stderrs: np.ndarray
    fitted_rate: float | None
    rate_ci: tuple | None
    censored: int = 0

    def summary(self) -> dict:
        return {
            "fitted_rate": self.fitted_rate,
            "rate_ci": self.rate_ci,
            "censored_points": self.censored,
            "n_points": int(len(self.k_values)),
        }


def _ols_slope(x: np.ndarray, y: np.ndarray):
    """Least-squares slope with a 95% CI."""
    res = stats.linregress(x, y)
    half = 1.96 * res.stderr
    return float(res.slope), (float(res.slope - half), float(res.slope + half))


def draw_words(model: MatrixModel, data: SpectralData | None, theta0: float,
               n: int, samples: int, seed: int) -> np.ndarray:
    """Generator-index paths (samples, n) under the plain or tilted law."""
    gen = rng.chunk_generator(seed, 0)
    words = np.empty((samples, n), dtype=np.int64)
    if data is None:
        cumw = np.cumsum(model.weights)
        u = gen.random((samples, n))
        words[:] = np.minimum(np.searchsorted(cumw, u.ravel(), side="right")
                              .reshape(samples, n), model.m - 1)
        return words
    gens = model.generators
    theta = np.full(samples, theta0)
    for step in range(n):
        c, sn = np.cos(theta), np.sin(theta)
        a = c[:, None] * gens[None, :, 0, 0] + sn[:, None] * gens[None, :, 0, 1]
        b = c[:, None] * gens[None, :, 1, 0] + sn[:, None] * gens[None, :, 1, 1]
        sigma = 0.5 * np.log(a * a + b * b)
        theta_new = np.mod(np.arctan2(b, a), np.pi)
        terms = model.weights[None, :] * np.exp(data.s * sigma) \
            * data.r_at(theta_new.ravel()).reshape(samples, model.m)
        cum = np.cumsum(terms, axis=1)
        u = gen.random(samples) * cum[:, -1]
        pick = np.minimum((cum < u[:, None]).sum(axis=1), model.m - 1)
        words[:, step] = pick
        theta = theta_new[np.arange(samples), pick]
    return words


def _stationary_angles(model: MatrixModel, data: SpectralData, samples: int,
                       seed: int, theta0: float = 0.7) -> np.ndarray:
    """Approximate stationary draws: tilted-walk endpoints after burn-in."""
    out = np.empty(samples)
    for start, count in rng.iter_chunks(samples):
        uni = rng.chunk_uniforms(seed, start, count, BURN_IN)
        ft, _, _, _ = kernels.walk_batch(model.generators, model.weights, data.s,
                                         data.log_kappa, data.r_s, theta0, uni,
                                         0.0, 0.0, data.r_s, False)
        out[start:start + count] = ft
    return out


def regularity_profile(model: MatrixModel, data: SpectralData, y: DualPoint,
                       r_grid: np.ndarray, samples: int, seed: int) -> DecayProfile:
    """Empirical pi_s-mass of the ball B(y, r) across r, with a power-law fit."""
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r_grid) >= 0) or r_grid[0] >= 1.0 or r_grid[-1] <= 0.0:
        raise ValueError("r_grid must be decreasing within (0, 1)")
    theta = _stationary_angles(model, data, samples, seed)
    gap = np.abs(np.cos(theta - y.angle))
    counts = np.array([(gap <= r).sum() for r in r_grid], dtype=float)
    probs = counts / samples
    stderrs = np.sqrt(np.maximum(probs * (1 - probs), 0.0) / samples)
    keep = counts >= MIN_POSITIVE
    censored = int((~keep).sum())
    if keep.sum() < 3:
        return DecayProfile(r_grid, probs, stderrs, None, None, censored)
    slope, ci = _ols_slope(np.log(r_grid[keep]), np.log(probs[keep]))
    return DecayProfile(r_grid, probs, stderrs, slope, ci, censored)


def regularity_decay(model: MatrixModel, data: SpectralData, x0: ProjPoint,
                     y: DualPoint, epsilon: float, n: int, k_max: int,
                     samples: int, seed: int) -> DecayProfile:
    """Decay of Q_s^x(delta(y, G_k x) <= exp(-eps k)) in k, with a log-linear fit."""
    if k_max > n:
        raise ValueError("k_max must be <= n")
    words = draw_words(model, data, x0.angle, k_max, samples, seed)
    gens = model.generators
    theta = np.full(samples, x0.angle)
    k_values = np.arange(1, k_max + 1)
    counts = np.zeros(k_max)
    for step in range(k_max):
        g = gens[words[:, step]]
        a = g[:, 0, 0] * np.cos(theta) + g[:, 0, 1] * np.sin(theta)
        b = g[:, 1, 0] * np.cos(theta) + g[:, 1, 1] * np.sin(theta)
        theta = np.mod(np.arctan2(b, a), np.pi)
        gap = np.abs(np.cos(theta - y.angle))
        counts[step] = (gap <= math.exp(-epsilon * (step + 1))).sum()
    probs = counts / samples
    stderrs = np.sqrt(np.maximum(probs * (1 - probs), 0.0) / samples)
    keep = counts >= MIN_POSITIVE
    censored = int((~keep).sum())
    if keep.sum() < 3:
        return DecayProfile(k_values, probs, stderrs, None, None, censored)
    slope, ci = _ols_slope(k_values[keep].astype(float), np.log(probs[keep]))
    # fitted rate c from prob ~ exp(-c k)
    return DecayProfile(k_values, probs, stderrs, -slope, (-ci[1], -ci[0]), censored)


def clt_diagnostic(model: MatrixModel, data: SpectralData, rate: RateFunction,
                   x0: ProjPoint, f: DualPoint, n: int, samples: int,
                   seed: int) -> dict:
    """KS distance to the standard normal and mean drift error under the tilt."""
    if n < 50:
        raise ValueError("n must be >= 50")
    q = rate.q_of(data.s)
    sigma = rate.sigma_at(data.s)
    final = np.empty(samples)
    lognorm = np.empty(samples)
    for start, count in rng.iter_chunks(samples):
        uni = rng.chunk_uniforms(seed, start, count, n)
        ft, ln, _, _ = kernels.walk_batch(model.generators, model.weights, data.s,
                                          data.log_kappa, data.r_s, x0.angle, uni,
                                          0.0, 0.0, data.r_s, False)
        final[start:start + count] = ft
        lognorm[start:start + count] = ln
    gap = np.abs(np.cos(final - f.angle))
    good = gap > 0.0
    coeff = lognorm[good] + np.log(gap[good])
    z = (coeff - n * q) / (sigma * math.sqrt(n))
    ks = float(stats.kstest(z, "norm").statistic)
    per_n = coeff / n
    mean_err = float(abs(per_n.mean() - q))
    mean_stderr = float(per_n.std(ddof=1) / math.sqrt(len(per_n)))
    return {"ks": ks, "mean_err": mean_err, "mean_stderr": mean_stderr,
            "n": n, "samples": samples, "dropped": int((~good).sum())}


def _product_paths(model: MatrixModel, words: np.ndarray, transpose: bool = False):
    """Iterate renormalized products G_k (or G_k^* = g_1^T ... g_k^T).

    Yields (k, products (samples, d, d), log_scale, log_det) after each
    step.  log_det accumulates sum_j log |det g_{w_j}| exactly; the small
    singular value of G_k is below float resolution relative to ||G_k||
    once k exceeds a few dozen steps, so every consumer recovers it from
    the determinant rather than from an SVD of the product.
    """
    samples, n = words.shape
    d = model.dimension
    prod = np.broadcast_to(np.eye(d), (samples, d, d)).copy()
    log_scale = np.zeros(samples)
    gen_logdet = np.linalg.slogdet(model.generators)[1]
    log_det = np.zeros(samples)
    gens = model.generators
    for k in range(n):
        g = gens[words[:, k]]
        if transpose:
            # G_k^* = G_{k-1}^* g_k^T
            prod = prod @ np.transpose(g, (0, 2, 1))
        else:
            prod = g @ prod
        log_det = log_det + gen_logdet[words[:, k]]
        if (k + 1) % RENORM_EVERY == 0:
            norms = np.sqrt((prod**2).sum(axis=(1, 2)))
            prod /= norms[:, None, None]
            log_scale = log_scale + np.log(norms)
        yield k + 1, prod, log_scale, log_det


@dataclass(frozen=True)
class LyapunovEstimate:
    lambda1: float
    lambda1_stderr: float
    lambda2: float
    lambda2_stderr: float

    @property
    def gap(self) -> float:
        return self.lambda1 - self.lambda2

    @property
    def gap_ci(self) -> tuple:
        half = 1.96 * math.hypot(self.lambda1_stderr, self.lambda2_stderr)
        return (self.gap - half, self.gap + half)


def lyapunov_spectrum(model: MatrixModel, data: SpectralData | None, n: int,
                      samples: int, seed: int) -> LyapunovEstimate:
    """First two Lyapunov exponents from log ||G_n|| and log |det G_n|."""
    if n < 100:
        raise ValueError("n must be >= 100")
    if model.dimension != 2:
        raise ValueError("Lyapunov spectrum diagnostics support d=2 only")
    theta0 = 0.7
    words = draw_words(model, data, theta0, n, samples, seed)
    for k, prod, log_scale, log_det in _product_paths(model, words):
        pass
    sv = np.linalg.svd(prod, compute_uv=False)
    log_top = np.log(sv[:, 0]) + log_scale
    l1 = log_top / n
    l2 = (log_det - log_top) / n
    return LyapunovEstimate(
        lambda1=float(l1.mean()),
        lambda1_stderr=float(l1.std(ddof=1) / math.sqrt(samples)),
        lambda2=float(l2.mean()),
        lambda2_stderr=float(l2.std(ddof=1) / math.sqrt(samples)),
    )


def cartan_convergence(model: MatrixModel, data: SpectralData | None,
                       x0: ProjPoint, n_list, samples: int, seed: int) -> list:
    """Per-n Cartan statistics along shared tilted paths.

    For each n in n_list: mean log(a22/a11); mean angular increment of the
    density point since the previous n; mean defect of
    | |G_n v| / (||G_n|| |v|) - delta(dual density point, x) |.
    """
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    if model.dimension != 2:
        raise ValueError("Cartan diagnostics support d=2 only")
    words = draw_words(model, data, x0.angle, n_list[-1], samples, seed)
    v = x0.rep
    rows = []
    prev_density = None
    want = set(n_list)
    for k, prod, log_scale, log_det in _product_paths(model, words):
        if k not in want:
            continue
        u_mat, sv, vt = np.linalg.svd(prod)
        # log(a22/a11) = log det - 2 log s1; the direct log sv[:, 1] is
        # below float resolution past a few dozen steps
        log_ratio = log_det - 2.0 * (np.log(sv[:, 0]) + log_scale)
        # the right frame depends on the early letters and converges along
        # each path; the left frame keeps mixing and does not
        density = vt[:, 0, :]
        dual_dir = vt[:, 0, :]
        gv = np.abs(prod @ v)
        defect = np.abs(np.sqrt((gv**2).sum(axis=1)) / sv[:, 0]
                        - np.abs(dual_dir @ v))
        row = {
            "n": k,
            "mean_log_a_ratio": float(log_ratio.mean()),
            "stderr_log_a_ratio": float(log_ratio.std(ddof=1) / math.sqrt(samples)),
            "mean_defect": float(defect.mean()),
        }
        if prev_density is not None:
            inner = np.minimum(1.0, np.abs((density * prev_density).sum(axis=1)))
            row["mean_density_increment"] = float(np.sqrt(1.0 - inner).mean())
        else:
            row["mean_density_increment"] = float("nan")
        prev_density = density
        rows.append(row)
    return rows


def iwasawa_convergence(model: MatrixModel, data: SpectralData | None,
                        n_list, alpha: float, samples: int, seed: int) -> list:
    """Per-n Iwasawa frame statistics along shared tilted paths.

    Tracks the first column of the unitriangular factor of
    G_n^* = g_1^T ... g_n^T against its long-horizon proxy, the alpha-moment
    of the increment, and the pathwise increment majorant
    sum_j (||wedge^2 G_j^*|| / |G_j^* e1|^2) N(g_{j+1})^2.
    """
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    if model.dimension != 2:
        raise ValueError("Iwasawa diagnostics support d=2 only")
    n_max = n_list[-1]
    words = draw_words(model, data, 0.7, n_max, samples, seed)
    n_val = np.array([matrix_functionals(g)[2] for g in model.generators])

    l21 = {}
    majorant_step = np.zeros((samples, n_max))
    dropped = 0
    for k, prod, log_scale, log_det in _product_paths(model, words, transpose=True):
        # unitriangular factor of G_k^* from its Gram matrix; scale-invariant
        with np.errstate(invalid="ignore", divide="ignore"):
            m11 = (prod[:, 0, :]**2).sum(axis=1)
            m21 = (prod[:, 1, :] * prod[:, 0, :]).sum(axis=1)
            l21_k = m21 / m11
        l21[k] = l21_k
        col0 = prod[:, :, 0]
        e1_norm2 = (col0**2).sum(axis=1)
        if k < n_max:
            # ||wedge^2 G_k^*|| / |G_k^* e1|^2 in log form; the wedge norm
            # equals |det G_k| and underflows relative to the product scale
            log_wedge = log_det - 2.0 * log_scale
            majorant_step[:, k - 1] = (np.exp(log_wedge - np.log(e1_norm2))
                                       * n_val[words[:, k]]**2)
    rows = []
    ref = l21[n_max]
    for n in n_list:
        diff = np.abs(l21[n] - ref)
        good = np.isfinite(diff)
        dropped = int((~good).sum())
        moment = float((diff[good]**alpha).mean()) if n < n_max else 0.0
        majorant = majorant_step[:, n - 1:n_max - 1].sum(axis=1)
        holds = diff[good] <= majorant[good] * (1.0 + 1e-9) + 1e-12
        rows.append({
            "n": n,
            "alpha_moment": moment,
            "mean_majorant": float(majorant[good].mean()),
            "majorant_holds_fraction": float(holds.mean()) if n < n_max else 1.0,
            "dropped": dropped,
        })
    return rows
