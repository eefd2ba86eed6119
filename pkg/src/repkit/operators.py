"""Linear operators between finite-dimensional Hilbert spaces and their adjoints.

Operators are dense coordinate matrices. The adjoint is always derived from
the two Gram matrices, ``L* = G_dom^{-1} M^T G_cod``, so the closed-form
adjoints of evaluation, explicit-basis and derivative operators serve as
independent test oracles rather than being registered by hand.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre as npleg

from .hilbert import SpaceSpec, SubspaceBasis, orthonormalize
from .kernels import KernelSpec

__all__ = [
    "OperatorRep",
    "adjoint",
    "identity_operator",
    "evaluation_operator",
    "kernel_section",
    "FeatureMap",
    "explicit_basis_operator",
    "LegendreBasis",
    "derivative_operator",
    "adjoint_by_parts",
    "joint_null_complement",
    "necessity_probe",
]


@dataclass(frozen=True, eq=False)
class OperatorRep:
    domain: SpaceSpec
    codomain: SpaceSpec
    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float).reshape(self.codomain.dim, self.domain.dim)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    def __call__(self, f) -> np.ndarray:
        return self.matrix @ self.domain.check_vector(f)

    apply = __call__

    def adjoint(self) -> "OperatorRep":
        return adjoint(self)

    def image(self, A: SubspaceBasis) -> SubspaceBasis:
        """Subspace ``L(A)`` in the codomain."""
        return orthonormalize(list((self.matrix @ A.basis).T), self.codomain)

    def compose(self, other: "OperatorRep") -> "OperatorRep":
        """``self o other``."""
        if not other.codomain.same_as(self.domain):
            raise ValueError("operator spaces do not chain")
        return OperatorRep(other.domain, self.codomain, self.matrix @ other.matrix)


def adjoint(L: OperatorRep) -> OperatorRep:
    """Adjoint with respect to both Gram inner products."""
    M = L.domain.solve_gram(L.matrix.T @ L.codomain.gram)
    return OperatorRep(L.codomain, L.domain, M)


def identity_operator(space: SpaceSpec) -> OperatorRep:
    return OperatorRep(space, space, np.eye(space.dim))


# -- evaluation operators on kernel dictionaries ----------------------------

def _rkhs_parts(space: SpaceSpec):
    if space.kind != "rkhs":
        raise ValueError("space must be built with SpaceSpec.rkhs_dictionary")
    _, points, kernel, n = space.shape_tag
    return points, kernel, n


def evaluation_operator(space: SpaceSpec, x) -> OperatorRep:
    """``f -> f(x)`` for ``f = sum_j K(., x_j) c_j`` in coefficient coordinates."""
    points, kernel, n = _rkhs_parts(space)
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != points.shape[1]:
        raise ValueError(f"input dimension {x.shape[0]} does not match dictionary dimension {points.shape[1]}")
    hits = np.flatnonzero(np.all(points == x[None, :], axis=1))
    if hits.size:
        # the (possibly jittered) Gram is the reproducing kernel of the dictionary space
        i = hits[0]
        M = space.gram[i * n:(i + 1) * n, :]
    else:
        row = kernel.matrix(x[None, :], points)[0]
        M = np.kron(row[None, :], np.eye(n))
    return OperatorRep(space, SpaceSpec.euclidean(n), M)


def kernel_section(space: SpaceSpec, x, z) -> np.ndarray:
    """Coefficients of ``K(., x) z`` in the dictionary; requires ``x`` to be a dictionary point."""
    points, kernel, n = _rkhs_parts(space)
    x = np.asarray(x, dtype=float).ravel()
    hits = np.flatnonzero(np.all(points == x[None, :], axis=1))
    if hits.size == 0:
        raise ValueError("x is not a dictionary point; K(., x) has no exact coefficient vector")
    c = np.zeros(space.dim)
    c[hits[0] * n:(hits[0] + 1) * n] = np.asarray(z, dtype=float).ravel()
    return c


# -- explicit feature maps --------------------------------------------------

@dataclass(frozen=True, eq=False)
class FeatureMap:
    """Fixed map ``x -> phi(x)``, an ``n_features x k_outputs`` matrix."""

    n_features: int
    k_outputs: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"

    def __call__(self, x) -> np.ndarray:
        out = np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)
        out = out.reshape(out.shape[0], -1) if out.ndim == 1 else out
        if out.shape != (self.n_features, self.k_outputs):
            raise ValueError(f"feature map returned shape {out.shape}, expected {(self.n_features, self.k_outputs)}")
        return out

    def design(self, X) -> np.ndarray:
        """Stack ``phi(x_i)^T`` for all rows of X: shape (m * k, n)."""
        return np.vstack([self(x).T for x in np.atleast_2d(X)])

    @classmethod
    def identity(cls, n: int) -> "FeatureMap":
        """Raw input coordinates as features (k = 1)."""
        return cls(n, 1, lambda x: np.asarray(x).reshape(n, 1), name="identity")

    @classmethod
    def indicator(cls, lo: int, hi: int) -> "FeatureMap":
        """Indicators ``delta_j`` for integers j in [lo, hi]."""
        width = hi - lo + 1

        def phi(x):
            j = int(round(float(np.ravel(x)[0])))
            if not lo <= j <= hi:
                raise ValueError(f"index {j} outside window [{lo}, {hi}]")
            out = np.zeros((width, 1))
            out[j - lo, 0] = 1.0
            return out

        return cls(width, 1, phi, name=f"indicator[{lo},{hi}]")


def explicit_basis_operator(phi: FeatureMap, x, out_dim: int | None = None) -> OperatorRep:
    """Operator built from the feature vector ``phi(x)``.

    With ``out_dim = k`` the domain is the Frobenius space of n-by-k matrices
    W and the action is ``W -> W^T phi(x)`` (phi must have one column). Without
    it the domain is R^n and the action is ``W -> phi(x)^T W`` in R^{k_outputs}.
    """
    P = phi(x)
    n = phi.n_features
    if out_dim is None:
        return OperatorRep(SpaceSpec.euclidean(n), SpaceSpec.euclidean(phi.k_outputs), P.T)
    if phi.k_outputs != 1:
        raise ValueError("matrix-domain operator needs a single-column feature map")
    k = int(out_dim)
    # W flattened row-major: W[a, j] -> index a * k + j
    M = np.kron(P[:, 0][None, :], np.eye(k))
    return OperatorRep(SpaceSpec.frobenius(n, k), SpaceSpec.euclidean(k), M)


# -- Legendre polynomial spaces and the derivative --------------------------

def _legendre_derivative_1d(d: int) -> np.ndarray:
    """D1[j, k]: coefficient of p_j in p_k' for orthonormal Legendre p on [-1, 1]."""
    D = np.zeros((d + 1, d + 1))
    for k in range(d + 1):
        for j in range(k - 1, -1, -2):
            D[j, k] = math.sqrt((2 * k + 1) * (2 * j + 1))
    return D


def legendre_values(d: int, t) -> np.ndarray:
    """Orthonormal Legendre values p_0..p_d at points t, shape (len(t), d + 1)."""
    t = np.asarray(t, dtype=float).ravel()
    V = npleg.legvander(t, d)
    return V * np.sqrt((2 * np.arange(d + 1) + 1) / 2.0)


@dataclass(frozen=True)
class LegendreBasis:
    """Tensor Legendre polynomials on [-1, 1]^n with R^m values.

    Each input axis carries degrees 0..max_degree. With ``mean_free`` the
    constant multi-index is dropped, which removes the kernel of the
    derivative (the finite stand-in for compactly supported functions).
    """

    max_degree: int
    n_inputs: int = 1
    m_outputs: int = 1
    mean_free: bool = False

    @property
    def full_indices(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.max_degree + 1), repeat=self.n_inputs))

    @property
    def indices(self) -> list[tuple[int, ...]]:
        idx = self.full_indices
        return idx[1:] if self.mean_free else idx

    @property
    def dim(self) -> int:
        return self.m_outputs * len(self.indices)

    @property
    def codomain_dim(self) -> int:
        return self.m_outputs * self.n_inputs * len(self.full_indices)

    def space(self) -> SpaceSpec:
        return SpaceSpec(np.eye(self.dim), ("legendre", self))

    def derivative_space(self) -> SpaceSpec:
        return SpaceSpec(np.eye(self.codomain_dim), ("legendre_jacobian", self))

    def quadrature(self):
        """Tensor Gauss-Legendre nodes (max_degree + 2 per axis) and weights."""
        t, w = npleg.leggauss(self.max_degree + 2)
        nodes = np.array(list(itertools.product(t, repeat=self.n_inputs)))
        weights = np.array([np.prod(c) for c in itertools.product(w, repeat=self.n_inputs)])
        return nodes, weights

    def _products(self, points, indices) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        vals = [legendre_values(self.max_degree, points[:, a]) for a in range(self.n_inputs)]
        out = np.ones((points.shape[0], len(indices)))
        for col, alpha in enumerate(indices):
            for a, deg in enumerate(alpha):
                out[:, col] *= vals[a][:, deg]
        return out

    def evaluate(self, coeffs, points) -> np.ndarray:
        """Values of a domain element at points: shape (npts, m)."""
        c = np.asarray(coeffs, dtype=float).reshape(self.m_outputs, len(self.indices))
        return self._products(points, self.indices) @ c.T

    def evaluate_jacobian(self, coeffs, points) -> np.ndarray:
        """Values of a codomain element at points: shape (npts, m, n)."""
        nb = len(self.full_indices)
        c = np.asarray(coeffs, dtype=float).reshape(self.m_outputs, self.n_inputs, nb)
        P = self._products(points, self.full_indices)
        return np.einsum("pb,jib->pji", P, c)

    def fit_domain(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Coefficients of ``fn`` (values shape (npts, m)) by exact quadrature projection."""
        nodes, w = self.quadrature()
        vals = np.asarray(fn(nodes), dtype=float).reshape(len(nodes), self.m_outputs)
        P = self._products(nodes, self.indices)
        return ((P * w[:, None]).T @ vals).T.ravel()

    def boundary_vanishing(self) -> np.ndarray:
        """Columns spanning ``prod_i (1 - x_i^2) q(x)`` with q of degree <= d - 2 per axis."""
        if self.max_degree < 2:
            return np.zeros((self.dim, 0))
        inner = list(itertools.product(range(self.max_degree - 1), repeat=self.n_inputs))
        cols = []
        for j in range(self.m_outputs):
            for gamma in inner:
                def fn(x, gamma=gamma, j=j):
                    bump = np.prod(1.0 - x**2, axis=1)
                    q = self._products(x, [gamma])[:, 0]
                    out = np.zeros((x.shape[0], self.m_outputs))
                    out[:, j] = bump * q
                    return out
                cols.append(self.fit_domain(fn))
        return np.column_stack(cols)


def _partial_matrix(basis: LegendreBasis, axis: int, src, dst) -> np.ndarray:
    """Coordinates of d/dx_axis mapping scalar polys over ``src`` indices to ``dst`` indices."""
    D1 = _legendre_derivative_1d(basis.max_degree)
    pos = {beta: r for r, beta in enumerate(dst)}
    M = np.zeros((len(dst), len(src)))
    for c, alpha in enumerate(src):
        for j in range(alpha[axis]):
            coef = D1[j, alpha[axis]]
            if coef == 0.0:
                continue
            beta = alpha[:axis] + (j,) + alpha[axis + 1:]
            M[pos[beta], c] += coef
    return M


def derivative_operator(basis: LegendreBasis) -> OperatorRep:
    """``f -> (d f / d x_1, ..., d f / d x_n)`` as a matrix-valued polynomial.

    Codomain coordinates are ordered (output j, input axis i, multi-index).
    """
    src, dst = basis.indices, basis.full_indices
    m, n = basis.m_outputs, basis.n_inputs
    blocks = [_partial_matrix(basis, i, src, dst) for i in range(n)]
    M = np.zeros((basis.codomain_dim, basis.dim))
    for j in range(m):
        for i in range(n):
            r0 = (j * n + i) * len(dst)
            c0 = j * len(src)
            M[r0:r0 + len(dst), c0:c0 + len(src)] = blocks[i]
    return OperatorRep(basis.space(), basis.derivative_space(), M)


def adjoint_by_parts(basis: LegendreBasis) -> OperatorRep:
    """``[D* g]_j = -sum_i d/dx_i [g]_{ji}``, valid when boundary terms vanish."""
    if basis.mean_free:
        raise ValueError("integration-by-parts adjoint is defined on the full Legendre span")
    full = basis.full_indices
    m, n = basis.m_outputs, basis.n_inputs
    nb = len(full)
    M = np.zeros((basis.dim, basis.codomain_dim))
    for i in range(n):
        Di = _partial_matrix(basis, i, full, full)
        for j in range(m):
            c0 = (j * n + i) * nb
            M[j * nb:(j + 1) * nb, c0:c0 + nb] -= Di
    return OperatorRep(basis.derivative_space(), basis.space(), M)


# -- null spaces and necessity probes ---------------------------------------

def joint_null_complement(ops: Sequence[OperatorRep]) -> SubspaceBasis:
    """Orthogonal complement of the joint null space: ``span{sum_i L_i* z_i}``."""
    if not ops:
        raise ValueError("need at least one operator")
    dom = ops[0].domain
    cols = []
    for L in ops:
        if not L.domain.same_as(dom):
            raise ValueError("operators do not share a domain")
        cols.extend(adjoint(L).matrix.T)
    return orthonormalize(cols, dom)


def necessity_probe(z_star, f, domain: SpaceSpec, codomain: SpaceSpec | None = None) -> OperatorRep:
    """Rank-one operator ``h -> z_star <f, h> / |f|^2``."""
    f = domain.check_vector(f)
    z_star = np.atleast_1d(np.asarray(z_star, dtype=float))
    if codomain is None:
        codomain = SpaceSpec.euclidean(z_star.shape[0])
    nf2 = domain.inner(f, f)
    if nf2 == 0.0:
        raise ValueError("probe direction f must be nonzero")
    M = np.outer(z_star, domain.gram @ f) / nf2
    return OperatorRep(domain, codomain, M)
