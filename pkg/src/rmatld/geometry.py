"""Projective-space primitives.

Points of P^{d-1} (and of the dual projective space) are stored as unit
vectors modulo sign, canonicalized so the first nonzero coordinate is
positive.  Also provides the norm cocycle, the alignment factor delta,
the angular distance, and the Cartan (SVD) and Iwasawa (LAK)
decompositions together with exterior-square norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_UNIT_TOL = 1e-12


def _canonicalize(vec: np.ndarray) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("zero vector does not define a projective point")
    v = v / nrm
    for c in v:
        if c != 0.0:
            if c < 0.0:
                v = -v
            break
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class ProjPoint:
    """Direction in P^{d-1}: a unit vector identified with its negative."""

    rep: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rep", _canonicalize(self.rep))

    @property
    def dim(self) -> int:
        return self.rep.shape[0]

    @property
    def angle(self) -> float:
        """Angle in [0, pi) parametrizing P^1.  Only defined for d=2."""
        if self.dim != 2:
            raise ValueError("angle parametrization requires d=2")
        return float(np.arctan2(self.rep[1], self.rep[0]) % np.pi)

    @classmethod
    def from_angle(cls, theta: float) -> "ProjPoint":
        return cls(np.array([np.cos(theta), np.sin(theta)]))

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return bool(np.allclose(self.rep, other.rep, atol=1e-12))

    def __hash__(self):
        return hash(tuple(np.round(self.rep, 10)))


@dataclass(frozen=True)
class DualPoint:
    """Direction in the dual projective space, stored like ProjPoint."""

    rep: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rep", _canonicalize(self.rep))

    @property
    def dim(self) -> int:
        return self.rep.shape[0]

    @property
    def angle(self) -> float:
        if self.dim != 2:
            raise ValueError("angle parametrization requires d=2")
        return float(np.arctan2(self.rep[1], self.rep[0]) % np.pi)

    @classmethod
    def from_angle(cls, phi: float) -> "DualPoint":
        return cls(np.array([np.cos(phi), np.sin(phi)]))


def act(g: np.ndarray, x: ProjPoint) -> ProjPoint:
    """Projective action x -> R(g v)."""
    return ProjPoint(np.asarray(g, dtype=float) @ x.rep)


def cocycle_sigma(g: np.ndarray, x: ProjPoint) -> float:
    """Norm cocycle log(|g v| / |v|) along the direction x."""
    return float(np.log(np.linalg.norm(np.asarray(g, dtype=float) @ x.rep)))


def delta(y: DualPoint, x: ProjPoint) -> float:
    """Alignment factor |<f, v>| / (|f| |v|), in [0, 1]."""
    return float(abs(np.dot(y.rep, x.rep)))


def angular_distance(x: ProjPoint, x2: ProjPoint) -> float:
    """Angular distance (1 - |<v, v'>|)^(1/2) for unit representatives.

    This is the metric used for Hoelder-norm diagnostics.  It differs
    from the more common sine distance (1 - <v,v'>^2)^(1/2); both are
    bi-Lipschitz equivalent on P^{d-1}.
    """
    inner = min(1.0, abs(float(np.dot(x.rep, x2.rep))))
    return float(np.sqrt(1.0 - inner))


@dataclass(frozen=True)
class CartanFrames:
    """g = k a k' with k, k' orthogonal and a positive decreasing diagonal."""

    k: np.ndarray
    a: np.ndarray
    k_prime: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.k @ np.diag(self.a) @ self.k_prime

    @property
    def density_point(self) -> DualPoint:
        """Top left-singular direction (first column of k)."""
        return DualPoint(self.k[:, 0])


@dataclass(frozen=True)
class IwasawaFrames:
    """g = L A K with L lower unitriangular, A positive diagonal, K orthogonal."""

    L: np.ndarray
    A: np.ndarray
    K: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.L @ np.diag(self.A) @ self.K


def cartan(g: np.ndarray) -> CartanFrames:
    """Singular value decomposition with decreasing diagonal."""
    g = np.asarray(g, dtype=float)
    try:
        u, sv, vt = np.linalg.svd(g)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(g)
        raise ValueError(f"SVD failed to converge (condition number ~{cond:.3e})") from exc
    if sv[-1] <= 0.0:
        raise ValueError("singular matrix has no Cartan decomposition in GL(d)")
    return CartanFrames(k=u, a=sv, k_prime=vt)


def wedge2_norm(g: np.ndarray) -> float:
    """Operator norm of the exterior square: product of the top two singular values."""
    sv = np.linalg.svd(np.asarray(g, dtype=float), compute_uv=False)
    if sv.shape[0] < 2:
        raise ValueError("wedge2_norm requires d >= 2")
    return float(sv[0] * sv[1])


def iwasawa(g: np.ndarray) -> IwasawaFrames:
    """Unique decomposition g = L A K.

    Obtained from the Cholesky factor of g g^T: g g^T = (L A)(L A)^T with
    L A lower triangular and positive diagonal, then K = (L A)^{-1} g.
    """
    g = np.asarray(g, dtype=float)
    m = g @ g.T
    try:
        la = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise ValueError("near-singular leading minors: Iwasawa decomposition failed") from exc
    a = np.diag(la).copy()
    if np.any(a <= 0.0):
        raise ValueError("near-singular leading minors: Iwasawa decomposition failed")
    lower = la / a[np.newaxis, :]
    k = np.linalg.solve(la, g)
    return IwasawaFrames(L=lower, A=a, K=k)
