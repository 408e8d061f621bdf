"""Finite-support law on invertible matrices and its admissibility checks.

A model is a list of m generators with strictly positive probability
weights.  Finite support makes the moment conditions automatic; the
interesting check is proximality (a product with a simple dominant
eigenvalue) and a heuristic for strong irreducibility.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import ProjPoint, angular_distance

DET_REL_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12
PROXIMAL_GAP = 1e-9
DIRECTION_SEP = 1e-6


def _generator_label(j: int, m: int) -> str:
    if m <= 26:
        return chr(ord("A") + j)
    return f"g{j}"


@dataclass(frozen=True)
class MatrixModel:
    """Finite-support probability law on GL(d, R).

    Immutable after construction; singular value decompositions of the
    generators are cached because they are reused by every sampler and
    solver call.
    """

    dimension: int
    generators: np.ndarray  # shape (m, d, d)
    weights: np.ndarray  # shape (m,)
    allow_single_generator: bool = False

    def __post_init__(self):
        gens = np.ascontiguousarray(np.asarray(self.generators, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        d = int(self.dimension)
        if d < 2:
            raise ValueError("dimension must be >= 2")
        if gens.ndim != 3 or gens.shape[1:] != (d, d):
            raise ValueError(f"generators must have shape (m, {d}, {d})")
        m = gens.shape[0]
        if w.shape != (m,):
            raise ValueError("weights must match the number of generators")
        if m < 2 and not self.allow_single_generator:
            raise ValueError("need at least 2 generators (override with allow_single_generator)")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 (got {w.sum()!r})")
        svals = np.linalg.svd(gens, compute_uv=False)
        for j in range(m):
            det = abs(np.linalg.det(gens[j]))
            if det <= DET_REL_TOL * np.linalg.norm(gens[j], 2) ** d:
                raise ValueError(f"generator {j} is singular or nearly so")
        gens.flags.writeable = False
        w.flags.writeable = False
        svals.flags.writeable = False
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_singular_values", svals)

    @property
    def m(self) -> int:
        return self.generators.shape[0]

    @property
    def singular_values(self) -> np.ndarray:
        """Cached singular values of the generators, shape (m, d), decreasing."""
        return self._singular_values

    def label(self, j: int) -> str:
        return _generator_label(j, self.m)

    @classmethod
    def from_dict(cls, doc: dict) -> "MatrixModel":
        known = {"dimension", "generators", "weights", "allow_single_generator"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown model keys: {sorted(unknown)}")
        return cls(
            dimension=int(doc["dimension"]),
            generators=np.array(doc["generators"], dtype=float),
            weights=np.array(doc["weights"], dtype=float),
            allow_single_generator=bool(doc.get("allow_single_generator", False)),
        )

    @classmethod
    def from_file(cls, path) -> "MatrixModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "generators": self.generators.tolist(),
            "weights": self.weights.tolist(),
        }


@dataclass(frozen=True)
class ValidationReport:
    proximal_witness: str | None
    irreducibility_pass: bool
    moment_values: dict
    n_g_moment: float


def matrix_functionals(g: np.ndarray) -> tuple[float, float, float]:
    """(operator norm, iota, N) for an invertible matrix.

    iota(g) = 1/||g^{-1}|| is the smallest singular value; N(g) is the
    larger of ||g|| and ||g^{-1}||.  Both come from one SVD.
    """
    g = np.asarray(g, dtype=float)
    sv = np.linalg.svd(g, compute_uv=False)
    norm = float(sv[0])
    iota = float(sv[-1])
    if iota <= 0.0 or abs(np.linalg.det(g)) <= DET_REL_TOL * norm ** g.shape[0]:
        raise ValueError("matrix is singular")
    return norm, iota, max(norm, 1.0 / iota)


def _proximal_direction(g: np.ndarray) -> np.ndarray | None:
    """Dominant eigendirection if g is proximal (simple dominant eigenvalue)."""
    vals, vecs = np.linalg.eig(g)
    order = np.argsort(-np.abs(vals))
    lead, second = vals[order[0]], vals[order[1]]
    if abs(lead) == 0.0:
        return None
    if (abs(lead) - abs(second)) / abs(lead) < PROXIMAL_GAP:
        return None
    v = vecs[:, order[0]]
    # simple dominant eigenvalue of a real matrix is real
    return np.real(v / np.linalg.norm(v))


def validate_model(
    model: MatrixModel,
    s: float = 1.0,
    beta: float = 0.5,
    eta: float = 1.0,
    max_word_len: int = 4,
) -> ValidationReport:
    """Moment values plus a proximality/irreducibility scan.

    Moments are exact finite sums over the support.  Proximality is
    certified by scanning all products of word length <= max_word_len.
    The irreducibility verdict is a heuristic: pass when the scanned
    proximal products exhibit at least 2d+1 well-separated dominant
    eigendirections, which no finite union of <= 2d proper subspaces can
    contain in general position.
    """
    if max_word_len < 1:
        raise ValueError("max_word_len must be >= 1")
    norms = model.singular_values[:, 0]
    iotas = model.singular_values[:, -1]
    moment = float(np.sum(model.weights * norms ** (s + beta) * iotas ** (-beta)))
    n_g = np.maximum(norms, 1.0 / iotas)
    n_g_moment = float(np.sum(model.weights * n_g**eta))
    if not np.isfinite(moment) or not np.isfinite(n_g_moment):
        raise FloatingPointError("moment computation overflowed")

    witness = None
    directions: list[ProjPoint] = []
    for length in range(1, max_word_len + 1):
        for word in itertools.product(range(model.m), repeat=length):
            prod = np.eye(model.dimension)
            for j in word:
                prod = model.generators[j] @ prod
            direction = _proximal_direction(prod)
            if direction is None:
                continue
            if witness is None:
                # product g_w = g_{w_k} ... g_{w_1}; report left-to-right
                witness = "".join(model.label(j) for j in reversed(word))
            pt = ProjPoint(direction)
            if all(angular_distance(pt, q) > DIRECTION_SEP for q in directions):
                directions.append(pt)

    irreducible = len(directions) >= 2 * model.dimension + 1
    return ValidationReport(
        proximal_witness=witness,
        irreducibility_pass=irreducible,
        moment_values={(s, beta): moment},
        n_g_moment=n_g_moment,
    )
