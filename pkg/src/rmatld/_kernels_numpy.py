"""Pure-numpy reference implementations of the hot Monte Carlo kernels.

Vectorized across chains, one python-level loop over time steps.  The
numba backend in ``_kernels_numba`` implements the same recurrences
chain-by-chain; either backend can be forced via RMATLD_DISABLE_NUMBA.
"""

import numpy as np

PI = np.pi


def _interp_periodic(table: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Periodic linear interpolation of a grid function on [0, pi)."""
    n = table.shape[0]
    p = theta * (n / PI)
    k0 = np.floor(p).astype(np.int64)
    frac = p - k0
    k0 = np.mod(k0, n)
    k1 = np.mod(k0 + 1, n)
    return (1.0 - frac) * table[k0] + frac * table[k1]


def walk_batch(gens, weights, s, log_kappa, r_table, theta0, uniforms,
               s2=0.0, log_kappa2=0.0, r2_table=None, track_second=False):
    """Simulate a batch of tilted projective walks.

    One chain per row of ``uniforms``; column k drives step k.  Step
    weights are w_j(x) ∝ p_j e^{s σ(g_j, x)} r(g_j x); their sum over j,
    divided by kappa * r(x), is the per-step normalization whose log is
    accumulated into ``wlog`` (zero tilt reduces to the plain walk with
    wlog identically 0 up to rounding).

    Returns (final_theta, log_norm, wlog, wlog2) where log_norm is the
    cocycle sum sigma(G_n, x0) and wlog2 optionally tracks the same
    normalization for a second tilt (s2, kappa2, r2) along the path.
    """
    n_chains, n_steps = uniforms.shape
    m = gens.shape[0]
    theta = np.full(n_chains, theta0, dtype=float)
    log_norm = np.zeros(n_chains)
    wlog = np.zeros(n_chains)
    wlog2 = np.zeros(n_chains)
    if r2_table is None:
        r2_table = r_table

    for step in range(n_steps):
        c, sn = np.cos(theta), np.sin(theta)
        a = gens[:, 0, 0, None] * c + gens[:, 0, 1, None] * sn  # (m, C)
        b = gens[:, 1, 0, None] * c + gens[:, 1, 1, None] * sn
        sigma = 0.5 * np.log(a * a + b * b)
        theta_new = np.mod(np.arctan2(b, a), PI)
        r_new = _interp_periodic(r_table, theta_new.ravel()).reshape(m, n_chains)
        terms = weights[:, None] * np.exp(s * sigma) * r_new
        total = terms.sum(axis=0)
        wlog += np.log(total) - log_kappa - np.log(_interp_periodic(r_table, theta))
        if track_second:
            r2_new = _interp_periodic(r2_table, theta_new.ravel()).reshape(m, n_chains)
            terms2 = weights[:, None] * np.exp(s2 * sigma) * r2_new
            wlog2 += (np.log(terms2.sum(axis=0)) - log_kappa2
                      - np.log(_interp_periodic(r2_table, theta)))
        cum = np.cumsum(terms, axis=0)
        target = uniforms[:, step] * total
        pick = np.minimum((cum < target[None, :]).sum(axis=0), m - 1)
        cols = np.arange(n_chains)
        log_norm += sigma[pick, cols]
        theta = theta_new[pick, cols]

    return theta, log_norm, wlog, wlog2


def kappa_batch(gens, cum_weights, v_renorm_every, uniforms):
    """log of the operator norm of G_n = g_{w_n} ... g_{w_1} per chain.

    Running products are renormalized by their Frobenius norm every
    ``v_renorm_every`` steps; the log scale is accumulated separately.
    """
    n_chains, n_steps = uniforms.shape
    d = gens.shape[1]
    prod = np.broadcast_to(np.eye(d), (n_chains, d, d)).copy()
    log_scale = np.zeros(n_chains)
    for step in range(n_steps):
        pick = np.searchsorted(cum_weights, uniforms[:, step], side="right")
        pick = np.minimum(pick, gens.shape[0] - 1)
        prod = np.einsum("cij,cjk->cik", gens[pick], prod)
        if (step + 1) % v_renorm_every == 0:
            fro = np.sqrt(np.einsum("cij,cij->c", prod, prod))
            prod /= fro[:, None, None]
            log_scale += np.log(fro)
    opnorm = np.linalg.svd(prod, compute_uv=False)[:, 0]
    return log_scale + np.log(opnorm)
