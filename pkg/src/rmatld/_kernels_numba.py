"""Numba-compiled Monte Carlo kernels (see _kernels_numpy for the reference)."""

import numpy as np
from numba import njit

PI = np.pi


@njit(cache=True, inline="always")
def _interp1(table, theta):
    n = table.shape[0]
    p = theta * (n / PI)
    k0 = int(np.floor(p))
    frac = p - k0
    k0 = k0 % n
    k1 = k0 + 1
    if k1 == n:
        k1 = 0
    return (1.0 - frac) * table[k0] + frac * table[k1]


@njit(cache=True)
def walk_batch(gens, weights, s, log_kappa, r_table, theta0, uniforms,
               s2=0.0, log_kappa2=0.0, r2_table=None, track_second=False):
    n_chains, n_steps = uniforms.shape
    m = gens.shape[0]
    final_theta = np.empty(n_chains)
    log_norm = np.zeros(n_chains)
    wlog = np.zeros(n_chains)
    wlog2 = np.zeros(n_chains)
    if r2_table is None:
        r2_table = r_table

    sig = np.empty(m)
    th_new = np.empty(m)
    terms = np.empty(m)
    terms2 = np.empty(m)
    for c in range(n_chains):
        theta = theta0
        ln = 0.0
        wl = 0.0
        wl2 = 0.0
        for step in range(n_steps):
            ct = np.cos(theta)
            st = np.sin(theta)
            total = 0.0
            total2 = 0.0
            for j in range(m):
                a = gens[j, 0, 0] * ct + gens[j, 0, 1] * st
                b = gens[j, 1, 0] * ct + gens[j, 1, 1] * st
                sg = 0.5 * np.log(a * a + b * b)
                tn = np.arctan2(b, a) % PI
                sig[j] = sg
                th_new[j] = tn
                w = weights[j] * np.exp(s * sg) * _interp1(r_table, tn)
                terms[j] = w
                total += w
                if track_second:
                    w2 = weights[j] * np.exp(s2 * sg) * _interp1(r2_table, tn)
                    terms2[j] = w2
                    total2 += w2
            wl += np.log(total) - log_kappa - np.log(_interp1(r_table, theta))
            if track_second:
                wl2 += np.log(total2) - log_kappa2 - np.log(_interp1(r2_table, theta))
            target = uniforms[c, step] * total
            cum = 0.0
            pick = m - 1
            for j in range(m):
                cum += terms[j]
                if cum >= target:
                    pick = j
                    break
            ln += sig[pick]
            theta = th_new[pick]
        final_theta[c] = theta
        log_norm[c] = ln
        wlog[c] = wl
        wlog2[c] = wl2
    return final_theta, log_norm, wlog, wlog2


@njit(cache=True)
def kappa_batch(gens, cum_weights, v_renorm_every, uniforms):
    n_chains, n_steps = uniforms.shape
    m = gens.shape[0]
    d = gens.shape[1]
    out = np.empty(n_chains)
    for c in range(n_chains):
        prod = np.eye(d)
        log_scale = 0.0
        for step in range(n_steps):
            u = uniforms[c, step]
            pick = m - 1
            for j in range(m):
                if u < cum_weights[j]:
                    pick = j
                    break
            prod = np.dot(gens[pick], prod)
            if (step + 1) % v_renorm_every == 0:
                fro = np.sqrt(np.sum(prod * prod))
                prod = prod / fro
                log_scale += np.log(fro)
        sv = np.linalg.svd(prod)[1]
        out[c] = log_scale + np.log(sv[0])
    return out
