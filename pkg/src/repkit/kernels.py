"""Scalar kernels (times an identity block) and Gram assembly."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import cholesky_jitter

__all__ = ["KernelSpec", "kernel_eval", "gram", "cross_gram", "block"]

FAMILIES = ("squared_exponential", "linear", "polynomial")
_ALIASES = {"sqexp": "squared_exponential", "se": "squared_exponential", "rbf": "squared_exponential",
            "poly": "polynomial"}


@dataclass(frozen=True)
class KernelSpec:
    """Operator-valued kernel ``k(x, x') * I_n`` for a scalar kernel family.

    Parameters
    ----------
    family : {"squared_exponential", "linear", "polynomial"}
    lengthscale : float
        Squared-exponential length scale, ``exp(-|x - x'|^2 / (2 l^2))``.
    degree, offset : int, float
        Polynomial kernel ``(x . x' + offset) ** degree``.
    output_dim : int
        Size n of the identity block.
    """

    family: str = "squared_exponential"
    lengthscale: float = 1.0
    degree: int = 2
    offset: float = 1.0
    output_dim: int = 1

    def __post_init__(self):
        family = _ALIASES.get(self.family, self.family)
        object.__setattr__(self, "family", family)
        if family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if not self.lengthscale > 0:
            raise ValueError("lengthscale must be positive")
        if family == "polynomial" and (int(self.degree) != self.degree or self.degree < 1 or self.offset < 0):
            raise ValueError("polynomial kernel needs integer degree >= 1 and offset >= 0")
        if self.output_dim < 1:
            raise ValueError("output_dim must be >= 1")

    def with_output_dim(self, n: int) -> "KernelSpec":
        return KernelSpec(self.family, self.lengthscale, self.degree, self.offset, n)

    def matrix(self, X, Y) -> np.ndarray:
        """Scalar kernel matrix ``k(X[i], Y[j])``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if X.shape[1] != Y.shape[1]:
            raise ValueError(f"point dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
        if self.family == "squared_exponential":
            d2 = np.sum((X[:, None, :] - Y[None, :, :]) ** 2, axis=-1)
            return np.exp(-d2 / (2.0 * self.lengthscale**2))
        dot = X @ Y.T
        if self.family == "linear":
            return dot
        return (dot + self.offset) ** int(self.degree)

    def to_dict(self) -> dict:
        return {"family": self.family, "lengthscale": self.lengthscale, "degree": int(self.degree),
                "offset": self.offset, "output_dim": self.output_dim}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(d["family"], float(d["lengthscale"]), int(d["degree"]), float(d["offset"]), int(d["output_dim"]))


def kernel_eval(k: KernelSpec, x, x2) -> float:
    x = np.asarray(x, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    if x.shape != x2.shape:
        raise ValueError(f"point dimension mismatch: {x.shape[0]} vs {x2.shape[0]}")
    return float(k.matrix(x[None, :], x2[None, :])[0, 0])


def block(K: np.ndarray, n: int) -> np.ndarray:
    """Expand a scalar kernel matrix to blocks ``K[i, j] * I_n``."""
    return K if n == 1 else np.kron(K, np.eye(n))


def cross_gram(k: KernelSpec, X, Y) -> np.ndarray:
    return block(k.matrix(X, Y), k.output_dim)


def gram(k: KernelSpec, X, check: bool = True) -> np.ndarray:
    """Block Gram matrix over the points ``X``; exactly symmetric.

    With ``check`` the matrix must admit a Cholesky factorization under the
    jitter policy, otherwise ``np.linalg.LinAlgError`` is raised.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("gram needs at least one point")
    K = k.matrix(X, X)
    iu = np.triu_indices(K.shape[0], 1)
    K[(iu[1], iu[0])] = K[iu]
    G = block(K, k.output_dim)
    if check:
        cholesky_jitter(G)
    return G
