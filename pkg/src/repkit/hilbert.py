"""Finite-dimensional inner-product spaces, subspaces and projections.

Every vector is a coordinate array of length ``space.dim``; the inner product
is ``u @ gram @ v``. Subspaces are stored as gram-orthonormal bases so that
projection, containment and complements reduce to projector arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import scipy.linalg as la

__all__ = [
    "SpaceSpec",
    "SubspaceBasis",
    "cholesky_jitter",
    "orthonormalize",
    "orth_complement",
    "project",
    "subspace_sum",
    "subspace_contains",
    "random_subspace",
    "standard_basis",
    "DEFLATION_TOL",
    "JITTER_SCALE",
]

DEFLATION_TOL = 1e-9
JITTER_SCALE = 1e-10


def cholesky_jitter(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower Cholesky factor of ``A`` with at most one jitter retry.

    Returns ``(L, A_used)`` where ``A_used`` is ``A`` or its jittered copy.
    Raises ``np.linalg.LinAlgError`` if the jittered matrix still fails.
    """
    A = np.asarray(A, dtype=float)
    try:
        return la.cholesky(A, lower=True), A
    except la.LinAlgError:
        pass
    dim = A.shape[0]
    bump = JITTER_SCALE * max(np.trace(A), 0.0) / dim
    if bump <= 0.0:
        raise np.linalg.LinAlgError("matrix is not positive definite and has non-positive trace")
    Aj = A + bump * np.eye(dim)
    try:
        return la.cholesky(Aj, lower=True), Aj
    except la.LinAlgError as exc:
        raise np.linalg.LinAlgError("matrix is not positive definite after jitter") from exc


@dataclass(frozen=True, eq=False)
class SpaceSpec:
    """A finite-dimensional real Hilbert space given by its Gram matrix.

    ``shape_tag`` is one of ``("vector", n)``, ``("matrix", n, k)`` (row-major
    flattening of an n-by-k matrix, Frobenius inner product) or
    ``("rkhs", points, kernel, output_dim)`` for spans of kernel sections.
    """

    gram: np.ndarray
    shape_tag: tuple = ("vector", 0)
    chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        G = np.array(self.gram, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] == 0:
            raise ValueError(f"gram must be a non-empty square matrix, got shape {G.shape}")
        if not np.array_equal(G, G.T):
            if np.max(np.abs(G - G.T)) > 1e-12 * max(1.0, np.max(np.abs(G))):
                raise ValueError("gram matrix is not symmetric")
            G = 0.5 * (G + G.T)
        L, Gj = cholesky_jitter(G)
        if Gj is G and np.min(la.eigvalsh(G)) <= 1e-12:
            # factorization succeeded on a numerically singular matrix
            Gj = G + JITTER_SCALE * np.trace(G) / G.shape[0] * np.eye(G.shape[0])
            L = la.cholesky(Gj, lower=True)
        G = Gj
        if np.min(la.eigvalsh(G)) <= 1e-12:
            raise ValueError("gram matrix is not positive definite")
        G.setflags(write=False)
        L.setflags(write=False)
        object.__setattr__(self, "gram", G)
        object.__setattr__(self, "chol", L)

    # constructors ------------------------------------------------------
    @classmethod
    def euclidean(cls, n: int) -> "SpaceSpec":
        return cls(np.eye(n), ("vector", n))

    @classmethod
    def frobenius(cls, n: int, k: int) -> "SpaceSpec":
        """n-by-k matrices, flattened row-major, with trace(A^T B)."""
        return cls(np.eye(n * k), ("matrix", n, k))

    @classmethod
    def from_gram(cls, gram: np.ndarray) -> "SpaceSpec":
        gram = np.asarray(gram, dtype=float)
        return cls(gram, ("vector", gram.shape[0]))

    @classmethod
    def rkhs_dictionary(cls, points, kernel) -> "SpaceSpec":
        """Span of ``K(., x_j) c_j`` over dictionary points, in coefficient coordinates."""
        from .kernels import gram as kernel_gram

        points = np.atleast_2d(np.asarray(points, dtype=float))
        G = kernel_gram(kernel, points, check=False)
        return cls(G, ("rkhs", points, kernel, kernel.output_dim))

    # basic geometry ----------------------------------------------------
    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def kind(self) -> str:
        return self.shape_tag[0]

    @property
    def is_euclidean(self) -> bool:
        return np.array_equal(self.gram, np.eye(self.dim))

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.gram @ np.asarray(v))

    def norm(self, u) -> float:
        return float(np.sqrt(max(self.inner(u, u), 0.0)))

    def check_vector(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}, got shape {v.shape}")
        return v

    def solve_gram(self, B: np.ndarray) -> np.ndarray:
        """``gram^{-1} @ B`` via the cached Cholesky factor."""
        return la.cho_solve((self.chol, True), B)

    def same_as(self, other: "SpaceSpec") -> bool:
        return self is other or (self.dim == other.dim and np.array_equal(self.gram, other.gram))


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Gram-orthonormal basis (columns) of a subspace; zero columns means {0}."""

    space: SpaceSpec
    basis: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float).reshape(self.space.dim, -1)
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def r(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.r

    def projector(self) -> np.ndarray:
        """Matrix P with P v the gram-orthogonal projection of v."""
        return self.basis @ self.basis.T @ self.space.gram

    def columns(self) -> list[np.ndarray]:
        return [self.basis[:, j].copy() for j in range(self.r)]

    def __repr__(self) -> str:
        return f"SubspaceBasis(dim={self.space.dim}, r={self.r})"


def standard_basis(space: SpaceSpec) -> list[np.ndarray]:
    return list(np.eye(space.dim))


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(v)))
    return -v if v[j] < 0 else v


def orthonormalize(vectors: Sequence[Any], space: SpaceSpec, tol: float = DEFLATION_TOL) -> SubspaceBasis:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    A vector is dropped when its residual norm after deflation falls below
    ``tol`` times the largest input norm. Kept vectors are sign-normalized so
    their largest-magnitude coordinate is positive.
    """
    vecs = [space.check_vector(v) for v in vectors]
    if not vecs:
        return SubspaceBasis(space, np.zeros((space.dim, 0)))
    G = space.gram
    scale = max(space.norm(v) for v in vecs)
    if scale == 0.0:
        return SubspaceBasis(space, np.zeros((space.dim, 0)))
    kept: list[np.ndarray] = []
    for v in vecs:
        w = v.copy()
        for _ in range(2):
            for q in kept:
                w = w - (q @ G @ w) * q
        nw = space.norm(w)
        if nw < tol * scale:
            continue
        kept.append(_canonical_sign(w / nw))
    if not kept:
        return SubspaceBasis(space, np.zeros((space.dim, 0)))
    return SubspaceBasis(space, np.column_stack(kept))


def orth_complement(A: SubspaceBasis) -> SubspaceBasis:
    """Gram-orthogonal complement of ``A``."""
    space = A.space
    if A.r == 0:
        return orthonormalize(standard_basis(space), space)
    if A.r == space.dim:
        return SubspaceBasis(space, np.zeros((space.dim, 0)))
    # c is orthogonal to A iff (B^T G) c = 0
    N = la.null_space(A.basis.T @ space.gram, rcond=1e-10)
    comp = orthonormalize(list(N.T), space)
    # clean out residual A components before returning
    P = A.projector()
    cols = [c - P @ c for c in comp.columns()]
    return orthonormalize(cols, space)


def project(v, A: SubspaceBasis) -> np.ndarray:
    v = A.space.check_vector(v)
    return A.basis @ (A.basis.T @ (A.space.gram @ v))


def _require_same_space(A: SubspaceBasis, B: SubspaceBasis) -> None:
    if not A.space.same_as(B.space):
        raise ValueError("subspaces live in different spaces")


def subspace_sum(A: SubspaceBasis, B: SubspaceBasis) -> SubspaceBasis:
    _require_same_space(A, B)
    return orthonormalize(A.columns() + B.columns(), A.space)


def subspace_contains(A: SubspaceBasis, B: SubspaceBasis, tol: float = 1e-9) -> bool:
    """True iff every column of ``B`` lies in ``A`` up to residual ``tol``."""
    _require_same_space(A, B)
    for b in B.columns():
        if A.space.norm(b - project(b, A)) >= tol:
            return False
    return True


def random_subspace(space: SpaceSpec, rng: np.random.Generator, r: int | None = None) -> SubspaceBasis:
    """Random subspace; dimension uniform on {0, ..., dim} unless ``r`` given."""
    if r is None:
        r = int(rng.integers(0, space.dim + 1))
    if r == 0:
        return SubspaceBasis(space, np.zeros((space.dim, 0)))
    M = rng.standard_normal((space.dim, r))
    return orthonormalize(list(M.T), space)
