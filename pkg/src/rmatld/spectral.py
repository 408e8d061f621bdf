"""Transfer-operator eigenproblem on the projective circle (d=2).

P^1 is parametrized by the angle theta in [0, pi); grid functions live on
the uniform grid theta_i = i*pi/N with periodic linear interpolation.
The weighted transfer operator and its conjugate (transposed generators
acting on dual directions) are discretized by collocation; the dominant
eigen-pair is found by power iteration, its left eigenvector by power
iteration on the transpose of the same matrix so that discrete duality
holds to machine precision.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels, rng
from .geometry import ProjPoint
from .model import MatrixModel

S_MIN_SUPPORTED = -0.5


@dataclass(frozen=True)
class ProjGrid:
    """Uniform angular grid on P^1."""

    n_nodes: int

    def __post_init__(self):
        if self.n_nodes < 64:
            raise ValueError("grid needs at least 64 nodes")

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.n_nodes) * (np.pi / self.n_nodes)

    @property
    def points(self) -> np.ndarray:
        """Unit representatives, shape (N, 2)."""
        th = self.angles
        return np.stack([np.cos(th), np.sin(th)], axis=1)

    def interp(self, table: np.ndarray, theta) -> np.ndarray:
        """Periodic linear interpolation of a grid function at angles theta."""
        n = self.n_nodes
        p = np.asarray(theta) * (n / np.pi)
        k0 = np.floor(p).astype(np.int64)
        frac = p - k0
        k0 = np.mod(k0, n)
        k1 = np.mod(k0 + 1, n)
        return (1.0 - frac) * table[k0] + frac * table[k1]


def _require_d2(model: MatrixModel):
    if model.dimension != 2:
        raise ValueError("grid-based transfer operators support d=2 only")


def _step_data(model: MatrixModel, grid: ProjGrid, conjugate: bool):
    """Per-node, per-generator cocycle values and image angles.

    Returns (sigma, theta_new) of shape (m, N).  The conjugate operator
    replaces each generator by its transpose acting on dual directions.
    """
    th = grid.angles
    c, s = np.cos(th), np.sin(th)
    gens = model.generators
    if conjugate:
        gens = np.ascontiguousarray(np.transpose(gens, (0, 2, 1)))
    a = gens[:, 0, 0, None] * c + gens[:, 0, 1, None] * s
    b = gens[:, 1, 0, None] * c + gens[:, 1, 1, None] * s
    sigma = 0.5 * np.log(a * a + b * b)
    theta_new = np.mod(np.arctan2(b, a), np.pi)
    return sigma, theta_new


def transfer_matrix(model: MatrixModel, s: float, grid: ProjGrid,
                    conjugate: bool = False) -> np.ndarray:
    """Dense collocation matrix M with (P_s phi)(theta_i) = (M phi)_i."""
    _require_d2(model)
    n = grid.n_nodes
    sigma, theta_new = _step_data(model, grid, conjugate)
    mat = np.zeros((n, n))
    rows = np.arange(n)
    p = theta_new * (n / np.pi)
    k0 = np.mod(np.floor(p).astype(np.int64), n)
    frac = p - np.floor(p)
    k1 = np.mod(k0 + 1, n)
    for j in range(model.m):
        amp = model.weights[j] * np.exp(s * sigma[j])
        np.add.at(mat, (rows, k0[j]), amp * (1.0 - frac[j]))
        np.add.at(mat, (rows, k1[j]), amp * frac[j])
    return mat


def apply_transfer(model: MatrixModel, s: float, grid_fn: np.ndarray,
                   conjugate: bool = False) -> np.ndarray:
    """One application of the (conjugate) transfer operator to a grid function."""
    _require_d2(model)
    grid = ProjGrid(len(grid_fn))
    sigma, theta_new = _step_data(model, grid, conjugate)
    vals = grid.interp(np.asarray(grid_fn, dtype=float), theta_new.ravel())
    vals = vals.reshape(model.m, grid.n_nodes)
    return np.einsum("j,jn->n", model.weights, np.exp(s * sigma) * vals)


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


def _power_pair(mat: np.ndarray, tol: float, max_iter: int):
    """Dominant (eigenvalue, right eigenvector, left weights) of a positive matrix.

    Right iteration starts from the constant function, left iteration from
    uniform weights on the transpose of the same matrix; both stop when
    successive Rayleigh quotients differ by less than tol and the sup-norm
    eigen-residual is within 10*tol.
    """
    n = mat.shape[0]
    phi = np.ones(n)
    kappa = None
    for _ in range(max_iter):
        nxt = mat @ phi
        rq = float(nxt @ phi) / float(phi @ phi)
        phi = nxt / nxt.max()
        if kappa is not None and abs(rq - kappa) < tol:
            kappa = rq
            resid = float(np.max(np.abs(mat @ phi - kappa * phi))) / kappa
            if resid <= 10.0 * tol:
                break
        kappa = rq
    else:
        resid = float(np.max(np.abs(mat @ phi - kappa * phi))) / kappa
        raise ConvergenceError("power iteration did not converge", resid)
    assert kappa > 0.0

    matT = mat.T
    nu = np.full(n, 1.0 / n)
    k_left = None
    for _ in range(max_iter):
        nxt = matT @ nu
        total = float(nxt.sum())
        nu = nxt / total
        if k_left is not None and abs(total - k_left) < tol:
            k_left = total
            resid_l = float(np.max(np.abs(matT @ nu - k_left * nu))) / k_left
            if resid_l <= 10.0 * tol:
                break
        k_left = total
    else:
        resid_l = float(np.max(np.abs(matT @ nu - k_left * nu))) / k_left
        raise ConvergenceError("adjoint power iteration did not converge", resid_l)

    return kappa, phi / phi.max(), nu, max(resid, resid_l)


@dataclass(frozen=True)
class SpectralData:
    """Dominant spectral bundle of P_s and its conjugate at one tilt s.

    Eigenfunctions are normalized to max 1; nu_s, nu_s_star, pi_s are
    probability weights on the grid nodes.  rho_s = nu_s(r_s).
    """

    s: float
    kappa: float
    grid: ProjGrid
    r_s: np.ndarray
    nu_s: np.ndarray
    r_s_star: np.ndarray
    nu_s_star: np.ndarray
    rho_s: float
    pi_s: np.ndarray
    residual: float

    @property
    def log_kappa(self) -> float:
        return float(np.log(self.kappa))

    def r_at(self, theta) -> np.ndarray:
        return self.grid.interp(self.r_s, theta)

    def r_star_at(self, phi) -> np.ndarray:
        return self.grid.interp(self.r_s_star, phi)

    def r_star_exact(self, phi: float) -> float:
        """Dual eigenfunction at angle phi via the representation sum
        over the eigenmeasure nu_s (exact on the discrete level)."""
        dlt = np.abs(np.cos(self.grid.angles - phi))
        return float(np.sum(dlt**self.s * self.nu_s))

    def to_json(self) -> str:
        return json.dumps({
            "s": self.s,
            "kappa": self.kappa,
            "n_nodes": self.grid.n_nodes,
            "r_s": self.r_s.tolist(),
            "nu_s": self.nu_s.tolist(),
            "r_s_star": self.r_s_star.tolist(),
            "nu_s_star": self.nu_s_star.tolist(),
            "rho_s": self.rho_s,
            "pi_s": self.pi_s.tolist(),
            "residual": self.residual,
        })

    @classmethod
    def from_json(cls, doc: str) -> "SpectralData":
        d = json.loads(doc)
        return cls(
            s=d["s"], kappa=d["kappa"], grid=ProjGrid(d["n_nodes"]),
            r_s=np.array(d["r_s"]), nu_s=np.array(d["nu_s"]),
            r_s_star=np.array(d["r_s_star"]), nu_s_star=np.array(d["nu_s_star"]),
            rho_s=d["rho_s"], pi_s=np.array(d["pi_s"]), residual=d["residual"],
        )


def solve_spectral(model: MatrixModel, s: float, N: int = 1024,
                   tol: float = 1e-12, max_iter: int = 100_000) -> SpectralData:
    """Dominant eigenproblem of P_s and P_s^* on an N-node grid."""
    _require_d2(model)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if s < S_MIN_SUPPORTED:
        warnings.warn(f"s={s} below supported range [{S_MIN_SUPPORTED}, ...); "
                      "convergence is reported via residuals, not guaranteed")
    grid = ProjGrid(N)
    mat = transfer_matrix(model, s, grid, conjugate=False)
    kappa, r, nu, resid = _power_pair(mat, tol, max_iter)
    mat_star = transfer_matrix(model, s, grid, conjugate=True)
    kappa2, r_star, nu_star, resid2 = _power_pair(mat_star, tol, max_iter)
    rho = float(nu @ r)
    pi = nu * r / rho
    return SpectralData(
        s=float(s), kappa=kappa, grid=grid,
        r_s=r, nu_s=nu, r_s_star=r_star, nu_s_star=nu_star,
        rho_s=rho, pi_s=pi, residual=max(resid, resid2, abs(kappa - kappa2)),
    )


def duality_residual(data: SpectralData, grid: ProjGrid | None = None) -> float:
    """Sup-norm defect of the integral representation of r_s.

    Compares c * r_s(theta_i) to sum_j delta(y_j, x_i)^s nu_s^*(j) with the
    best single scaling constant c (eigenfunctions are unique up to scale).
    """
    if grid is None:
        grid = data.grid
    th = grid.angles
    rep = np.abs(np.cos(th[:, None] - data.grid.angles[None, :]))
    rep = (rep**data.s) @ data.nu_s_star
    r_vals = data.grid.interp(data.r_s, th)
    c = float(rep @ r_vals) / float(r_vals @ r_vals)
    return float(np.max(np.abs(c * r_vals - rep)))


def tilt_kernel(model: MatrixModel, data: SpectralData, x: ProjPoint) -> np.ndarray:
    """One-step generator probabilities of the tilted chain at direction x."""
    _require_d2(model)
    theta = x.angle
    c, sn = np.cos(theta), np.sin(theta)
    gens = model.generators
    a = gens[:, 0, 0] * c + gens[:, 0, 1] * sn
    b = gens[:, 1, 0] * c + gens[:, 1, 1] * sn
    sigma = 0.5 * np.log(a * a + b * b)
    theta_new = np.mod(np.arctan2(b, a), np.pi)
    terms = model.weights * np.exp(data.s * sigma) * data.r_at(theta_new)
    terms /= data.kappa * data.r_at(theta)
    return terms / terms.sum()


def tilt_kernel_defect(model: MatrixModel, data: SpectralData, x: ProjPoint) -> float:
    """|sum of unnormalized tilted weights - 1|, bounded by the eigen-residual."""
    theta = x.angle
    c, sn = np.cos(theta), np.sin(theta)
    gens = model.generators
    a = gens[:, 0, 0] * c + gens[:, 0, 1] * sn
    b = gens[:, 1, 0] * c + gens[:, 1, 1] * sn
    sigma = 0.5 * np.log(a * a + b * b)
    theta_new = np.mod(np.arctan2(b, a), np.pi)
    terms = model.weights * np.exp(data.s * sigma) * data.r_at(theta_new)
    return float(abs(terms.sum() / (data.kappa * data.r_at(theta)) - 1.0))


def perturbed_gap(model: MatrixModel, data: SpectralData, t: float, N: int = 512) -> float:
    """Spectral radius of the collocation matrix of the Fourier-perturbed
    tilted operator.

    The centering phase exp(-i t q) has modulus one and does not affect
    the radius, so it is omitted.  At t=0 the matrix is stochastic and the
    radius is exactly 1.
    """
    _require_d2(model)
    grid = ProjGrid(N)
    r_tab = data.grid.interp(data.r_s, grid.angles)
    sigma, theta_new = _step_data(model, grid, conjugate=False)
    r_new = data.grid.interp(data.r_s, theta_new.ravel()).reshape(model.m, N)
    weights = model.weights[:, None] * np.exp(data.s * sigma) * r_new
    weights /= weights.sum(axis=0, keepdims=True)  # exact row stochasticity

    mat = np.zeros((N, N), dtype=complex)
    rows = np.arange(N)
    p = theta_new * (N / np.pi)
    k0 = np.mod(np.floor(p).astype(np.int64), N)
    frac = p - np.floor(p)
    k1 = np.mod(k0 + 1, N)
    for j in range(model.m):
        amp = weights[j] * np.exp(1j * t * sigma[j])
        np.add.at(mat, (rows, k0[j]), amp * (1.0 - frac[j]))
        np.add.at(mat, (rows, k1[j]), amp * frac[j])
    try:
        eig = np.linalg.eigvals(mat)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("eigenvalue computation failed for perturbed operator") from exc
    return float(np.max(np.abs(eig)))


def empirical_kappa(model: MatrixModel, s: float, n: int, samples: int,
                    seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of kappa(s) with delta-method stderr.

    Uses the two-horizon ratio (E |G_n x|^s / E |G_m x|^s)^{1/(n-m)} with
    m = n // 2 on shared path prefixes.  E |G_n x|^s = c kappa^n (1 + o(1)),
    so the ratio cancels the eigenfunction constant c whose 1/n residue
    would otherwise dominate the Monte Carlo error at large sample sizes.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    m = n // 2
    cumw = np.cumsum(model.weights)
    log_long = np.empty(samples)
    log_short = np.empty(samples)
    for start, count in rng.iter_chunks(samples):
        uni = rng.chunk_uniforms(seed, start, count, n)
        log_long[start:start + count] = s * kernels.kappa_batch(
            model.generators, cumw, 1, uni)
        log_short[start:start + count] = s * kernels.kappa_batch(
            model.generators, cumw, 1, np.ascontiguousarray(uni[:, :m]))
    shift_a, shift_b = log_long.max(), log_short.max()
    a = np.exp(log_long - shift_a)
    b = np.exp(log_short - shift_b)
    mean_a, mean_b = float(a.mean()), float(b.mean())
    log_ratio = (shift_a + np.log(mean_a)) - (shift_b + np.log(mean_b))
    kappa_hat = float(np.exp(log_ratio / (n - m)))
    cov = np.cov(a, b, ddof=1)
    var_log = (cov[0, 0] / mean_a**2 + cov[1, 1] / mean_b**2
               - 2.0 * cov[0, 1] / (mean_a * mean_b)) / samples
    stderr = kappa_hat * math.sqrt(max(var_log, 0.0)) / (n - m)
    return kappa_hat, float(stderr)
