"""Representer-reduced learners: ridge, Gaussian-process regression, l1, SVM.

Every fitter returns coefficients of a finite expansion over the training
inputs (or weights over explicit features). :func:`verify_representer`
checks post hoc that such a solution lies in the image of the relevant
subspace-valued map and cannot be improved by orthogonal perturbations.
The kernel deep network lives in :mod:`repkit.deepnet` and is re-exported here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as la
import scipy.optimize

from .hilbert import SpaceSpec
from .kernels import KernelSpec, block
from .maps import DEFAULT_SEED, SubspaceMapSpec, apply_map, set_orth_complement
from .operators import FeatureMap, OperatorRep, joint_null_complement
from .solvers import DescentConfig, gradient_descent, prox_l1, proximal_gradient, solve_spd
from .verdict import COUNTEREXAMPLE, PASS, Verdict

__all__ = [
    "Dataset",
    "LearnerConfig",
    "RepresenterModel",
    "GaussianRepresenterModel",
    "FeatureWeights",
    "fit_ridge",
    "ridge_objective",
    "ridge_gradient",
    "predict",
    "fit_gp",
    "gp_predict",
    "gp_cov_objective",
    "gp_cov_gradient",
    "gp_cov_descent",
    "fit_l1",
    "l1_smooth",
    "l1_smooth_gradient",
    "l1_objective",
    "fit_l1_dictionary",
    "DEFAULT_WINDOW",
    "fit_svm",
    "svm_penalty",
    "svm_penalty_gradient",
    "verify_representer",
    "RepresenterProblem",
    "kernel_problem",
    "l1_problem",
    "deep_last_layer_problem",
    "check_problem",
]

log = logging.getLogger(__name__)

DEFAULT_WINDOW = 32


# -- data and configuration -------------------------------------------------

@dataclass(frozen=True, eq=False)
class Dataset:
    """Training inputs ``X`` (m, d) and outputs ``Y`` (m, n).

    ``cov`` optionally holds per-sample output covariances (m, n, n) for
    Gaussian-process regression. Classification data stores one-hot rows
    or a single column of +-1 labels in ``Y``.
    """

    X: np.ndarray
    Y: np.ndarray
    cov: np.ndarray | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        X = X[:, None] if X.ndim == 1 else X
        Y = np.asarray(self.Y, dtype=float)
        Y = Y[:, None] if Y.ndim == 1 else Y
        if X.ndim != 2 or Y.ndim != 2 or X.shape[0] < 1:
            raise ValueError("need m >= 1 samples with 2-D X and Y")
        if X.shape[0] != Y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("data must be finite")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if self.cov is not None:
            C = np.asarray(self.cov, dtype=float)
            n = Y.shape[1]
            if C.shape != (X.shape[0], n, n):
                raise ValueError(f"cov must have shape {(X.shape[0], n, n)}")
            for Ci in C:
                _require_psd(Ci, "output covariance")
            object.__setattr__(self, "cov", C)

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def n(self) -> int:
        return self.Y.shape[1]

    @property
    def is_onehot(self) -> bool:
        return self.n > 1 and bool(np.all((self.Y == 0) | (self.Y == 1)) and np.all(self.Y.sum(axis=1) == 1))

    @classmethod
    def from_labels(cls, X, labels, n_classes: int | None = None) -> "Dataset":
        labels = np.asarray(labels, dtype=int)
        k = int(labels.max()) + 1 if n_classes is None else n_classes
        return cls(X, np.eye(k)[labels])

    def labels(self) -> np.ndarray:
        """Class index per sample (one-hot) or the +-1 labels."""
        return np.argmax(self.Y, axis=1) if self.is_onehot else self.Y[:, 0]

    def permuted(self, perm) -> "Dataset":
        perm = np.asarray(perm)
        return Dataset(self.X[perm], self.Y[perm], None if self.cov is None else self.cov[perm])


def _require_psd(C: np.ndarray, what: str, tol: float = 1e-10) -> None:
    if not np.allclose(C, C.T, atol=1e-12 * max(1.0, np.abs(C).max(initial=0.0))):
        raise ValueError(f"{what} is not symmetric")
    if C.size and np.min(la.eigvalsh(C)) < -tol * max(1.0, np.abs(C).max()):
        raise ValueError(f"{what} is not positive semidefinite")


@dataclass(frozen=True, eq=False)
class LearnerConfig:
    """Regularization weight, kernel, GP noise covariance, SVM margin and descent settings."""

    lam: float = 1.0
    kernel: KernelSpec = field(default_factory=KernelSpec)
    noise_cov: np.ndarray | None = None
    margin: float = 1.0
    descent: DescentConfig = field(default_factory=DescentConfig)

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError("lambda must be >= 0")
        if self.noise_cov is not None:
            S = np.atleast_2d(np.asarray(self.noise_cov, dtype=float))
            _require_psd(S, "noise covariance")
            object.__setattr__(self, "noise_cov", S)
        if not self.margin > 0:
            raise ValueError("margin must be positive")


# -- models -------------------------------------------------------------------

def _own_arrays(obj, names) -> None:
    # C-ordered float copies: identical memory layout after a JSON round trip keeps results bit-exact
    for name in names:
        object.__setattr__(obj, name, np.ascontiguousarray(getattr(obj, name), dtype=float))


@dataclass(frozen=True, eq=False)
class RepresenterModel:
    """``f(x) = sum_i K(x_i, x) z_i`` with coefficients ``Z`` of shape (m, n)."""

    kernel: KernelSpec
    X: np.ndarray
    Z: np.ndarray
    lam: float = 0.0
    learner: str = "ridge"

    def __post_init__(self):
        _own_arrays(self, ("X", "Z"))

    @property
    def output_dim(self) -> int:
        return self.Z.shape[1]

    def predict(self, x) -> np.ndarray:
        return predict(self, x)

    def space(self, extra_points=None) -> SpaceSpec:
        """Dictionary space over the training inputs, optionally enlarged by ``extra_points``."""
        pts = self.X if extra_points is None else np.vstack([self.X, extra_points])
        return SpaceSpec.rkhs_dictionary(pts, self.kernel.with_output_dim(self.output_dim))

    def coordinates(self, n_extra: int = 0) -> np.ndarray:
        return np.concatenate([self.Z.ravel(), np.zeros(n_extra * self.output_dim)])


def _as_points(x, d: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1
    P = x.reshape(1, -1) if single else x
    if P.shape[1] != d:
        raise ValueError(f"input dimension {P.shape[1]} does not match training dimension {d}")
    return P, single


def predict(model: RepresenterModel, x) -> np.ndarray:
    """Kernel expansion at one point (returns (n,)) or at rows of ``x`` (returns (p, n))."""
    P, single = _as_points(x, model.X.shape[1])
    out = model.kernel.matrix(P, model.X) @ model.Z
    return out[0] if single else out


def _sym_kernel(kernel: KernelSpec, X: np.ndarray) -> np.ndarray:
    K = kernel.matrix(X, X)
    return 0.5 * (K + K.T)


# -- ridge ----------------------------------------------------------------------

def fit_ridge(data: Dataset, cfg: LearnerConfig) -> RepresenterModel:
    """Solve ``(lam I + K) Z = Y`` for the kernel ridge coefficients."""
    K = _sym_kernel(cfg.kernel, data.X)
    if cfg.lam == 0:
        ev = la.eigvalsh(K)
        if ev[0] <= 1e-12 * max(1.0, ev[-1]):
            raise np.linalg.LinAlgError("kernel matrix is singular and lambda = 0")
    Z = solve_spd(K + cfg.lam * np.eye(data.m), data.Y)
    return RepresenterModel(cfg.kernel, data.X, Z, cfg.lam, "ridge")


def ridge_objective(Z, K, Y, lam) -> float:
    """``sum_i |y_i - (K Z)_i|^2 + lam tr(Z^T K Z)``."""
    Z = np.asarray(Z).reshape(Y.shape)
    R = Y - K @ Z
    return float(np.sum(R * R) + lam * np.sum(Z * (K @ Z)))


def ridge_gradient(Z, K, Y, lam) -> np.ndarray:
    Z = np.asarray(Z).reshape(Y.shape)
    return (-2.0 * K @ (Y - K @ Z) + 2.0 * lam * K @ Z).reshape(np.shape(Z))


# -- Gaussian-process regression ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class GaussianRepresenterModel:
    """Mean coefficients ``Zbar`` (m, n) and block covariance ``C`` (mn, mn) of the z_i.

    ``C[i*n:(i+1)*n, j*n:(j+1)*n]`` is the covariance between z_i and z_j.
    Observation noise is treated as independent across samples.
    """

    kernel: KernelSpec
    X: np.ndarray
    Zbar: np.ndarray
    C: np.ndarray
    lam: float
    noise_cov: np.ndarray
    independent_noise: bool = True

    def __post_init__(self):
        _own_arrays(self, ("X", "Zbar", "C", "noise_cov"))

    @property
    def output_dim(self) -> int:
        return self.Zbar.shape[1]

    def mean_model(self) -> RepresenterModel:
        return RepresenterModel(self.kernel, self.X, self.Zbar, self.lam, "gp")


def _psd_clip(C: np.ndarray) -> np.ndarray:
    C = 0.5 * (C + C.T)
    w, V = la.eigh(C)
    C = (V * np.clip(w, 0.0, None)) @ V.T
    return 0.5 * (C + C.T)


def _gp_input_cov(data: Dataset, noise: np.ndarray) -> np.ndarray:
    """Covariance of the stacked ``u_i = y_i - eta_i``; block diagonal under independence."""
    n = data.n
    out_cov = np.zeros((data.m, n, n)) if data.cov is None else data.cov
    return la.block_diag(*[Ci + noise for Ci in out_cov])


def fit_gp(data: Dataset, cfg: LearnerConfig) -> GaussianRepresenterModel:
    """Mean and covariance of the representer coefficients for GP regression.

    With ``u_i = y_i - eta_i`` random and the coefficients an affine function
    ``z = zbar + B (u - ubar)``, the expected loss splits into the ridge problem
    for ``zbar`` and the trace objective :func:`gp_cov_objective` in ``B``. Its
    minimizer is ``B = (Kb + lam I)^{-1}`` with ``Kb`` the block kernel matrix,
    so ``C = B Sigma_u B^T``.
    """
    if not cfg.lam > 0:
        raise ValueError("fit_gp requires lambda > 0")
    n = data.n
    noise = np.zeros((n, n)) if cfg.noise_cov is None else cfg.noise_cov
    if noise.shape != (n, n):
        raise ValueError(f"noise covariance must be {n}x{n}")
    K = _sym_kernel(cfg.kernel, data.X)
    Zbar = solve_spd(K + cfg.lam * np.eye(data.m), data.Y)
    Kb = block(K, n)
    Su = _gp_input_cov(data, noise)
    A = solve_spd(Kb + cfg.lam * np.eye(Kb.shape[0]), np.eye(Kb.shape[0]))
    C = _psd_clip(A @ Su @ A)
    return GaussianRepresenterModel(cfg.kernel, data.X, Zbar, C, cfg.lam, noise)


def gp_cov_objective(B, Kb, Su, lam) -> float:
    """Expected loss in ``B`` (mean part removed): ``tr((I - Kb B) Su (I - Kb B)^T) + lam tr(Kb B Su B^T)``."""
    N = Kb.shape[0]
    B = np.asarray(B).reshape(N, N)
    R = np.eye(N) - Kb @ B
    C = B @ Su @ B.T
    return float(np.sum(R * (R @ Su)) + lam * np.sum(Kb * C))


def gp_cov_gradient(B, Kb, Su, lam) -> np.ndarray:
    N = Kb.shape[0]
    B = np.asarray(B).reshape(N, N)
    R = np.eye(N) - Kb @ B
    G = -2.0 * Kb @ R @ Su + 2.0 * lam * Kb @ B @ Su
    return G.reshape(np.shape(B))


def gp_cov_descent(data: Dataset, cfg: LearnerConfig, descent: DescentConfig | None = None) -> np.ndarray:
    """Brute-force oracle: minimize :func:`gp_cov_objective` over B by gradient descent; returns C."""
    n = data.n
    noise = np.zeros((n, n)) if cfg.noise_cov is None else cfg.noise_cov
    Kb = block(_sym_kernel(cfg.kernel, data.X), n)
    Su = _gp_input_cov(data, noise)
    N = Kb.shape[0]
    descent = descent or DescentConfig(max_iters=200000, grad_tol=1e-12)
    B, _ = gradient_descent(lambda b: gp_cov_objective(b, Kb, Su, cfg.lam),
                            lambda b: gp_cov_gradient(b, Kb, Su, cfg.lam).ravel(),
                            np.zeros(N * N), descent)
    B = B.reshape(N, N)
    return _psd_clip(B @ Su @ B.T)


def gp_predict(model: GaussianRepresenterModel, x) -> tuple[np.ndarray, np.ndarray]:
    """Predictive mean ``sum_i K(x_i, x) zbar_i`` and covariance ``sum_ij K(x_i, x) C_ij K(x, x_j)``."""
    P, _ = _as_points(np.ravel(x), model.X.shape[1])
    k = model.kernel.matrix(model.X, P)[:, 0]
    n = model.output_dim
    mean = k @ model.Zbar
    Kx = np.kron(k[:, None], np.eye(n))
    cov = Kx.T @ model.C @ Kx
    return mean, 0.5 * (cov + cov.T)


# -- l1 feature selection -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FeatureWeights:
    """Weights ``W`` over explicit features; prediction is ``phi(x)^T W``.

    ``tau`` is the scaled-l1 weight whose solution was selected; at an exact
    optimum of the squared-l1 problem ``tau = 2 lam |W|_1``.
    """

    W: np.ndarray
    phi: FeatureMap
    lam: float
    tau: float = 0.0
    window: tuple[int, int] | None = None

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.W != 0.0)

    def predict(self, x) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, dtype=float))
        out = self.phi.design(X) @ self.W
        return out.reshape(X.shape[0], self.phi.k_outputs)


def l1_smooth(W, A, y) -> float:
    r = y - A @ W
    return float(r @ r)


def l1_smooth_gradient(W, A, y) -> np.ndarray:
    return -2.0 * A.T @ (y - A @ W)


def l1_objective(W, A, y, lam) -> float:
    """``sum_i |y_i - phi(x_i)^T W|^2 + lam |W|_1^2``."""
    return l1_smooth(W, A, y) + lam * float(np.sum(np.abs(W))) ** 2


def _ista(A, y, tau, W0, cfg):
    W, _ = proximal_gradient(lambda w: l1_smooth(w, A, y), lambda w: l1_smooth_gradient(w, A, y),
                             lambda v, t: prox_l1(v, t * tau), lambda w: tau * float(np.sum(np.abs(w))),
                             W0, cfg)
    return W


def fit_l1(data: Dataset, phi: FeatureMap, lam: float, descent: DescentConfig | None = None,
           grid_size: int = 33) -> FeatureWeights:
    """Minimize ``sum_i |y_i - phi(x_i)^T W|^2 + lam |W|_1^2``.

    The squared penalty is handled through the scaled-l1 path: for each tau on
    a log grid ISTA solves ``smooth + tau |W|_1`` (warm-started), the tau with
    the smallest original objective is kept and then refined by a bounded
    scalar search between its grid neighbours. ISTA started at zero never
    moves a coordinate whose feature vanishes on every training input.
    """
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if phi.k_outputs != data.n:
        raise ValueError(f"feature map has {phi.k_outputs} outputs but data has {data.n}")
    A = phi.design(data.X)
    y = data.Y.ravel()
    n = phi.n_features
    smax = la.norm(A, 2) if A.size else 0.0
    if smax == 0.0:
        return FeatureWeights(np.zeros(n), phi, lam, 0.0)
    tol = 1e-11 * max(1.0, float(np.linalg.norm(A.T @ y)))
    cfg = descent or DescentConfig(max_iters=50000, grad_tol=tol, initial_step=1.0 / (2.0 * smax**2))
    J = lambda W: l1_objective(W, A, y, lam)
    if lam == 0:
        return FeatureWeights(_ista(A, y, 0.0, np.zeros(n), cfg), phi, lam, 0.0)

    tau_max = 2.0 * float(np.max(np.abs(A.T @ y)))
    if tau_max == 0.0:
        return FeatureWeights(np.zeros(n), phi, lam, 0.0)
    taus = list(tau_max * np.logspace(0, -8, grid_size)) + [0.0]
    sols, W = [], np.zeros(n)
    for tau in taus:
        W = _ista(A, y, tau, W, cfg)
        sols.append(W)
    vals = [J(W) for W in sols]
    b = int(np.argmin(vals))
    best = (vals[b], taus[b], sols[b])
    lo, hi = taus[min(b + 1, len(taus) - 1)], taus[max(b - 1, 0)]
    if hi > lo:
        cache = {}

        def score(tau):
            W = _ista(A, y, tau, sols[b], cfg)
            cache[tau] = W
            return J(W)

        res = scipy.optimize.minimize_scalar(score, bounds=(lo, hi), method="bounded",
                                             options={"xatol": 1e-10 * tau_max, "maxiter": 60})
        if res.fun < best[0]:
            best = (float(res.fun), float(res.x), cache[res.x])
    return FeatureWeights(best[2], phi, lam, best[1])


def fit_l1_dictionary(data: Dataset, lam: float, window: int = DEFAULT_WINDOW,
                      descent: DescentConfig | None = None) -> FeatureWeights:
    """l1 fit on integer inputs with one indicator feature per index in a finite window.

    The window is ``[c - window, c + window]`` with ``c`` the midpoint of the
    training indices; every training index must fall inside it.
    """
    idx = np.rint(data.X[:, 0]).astype(int)
    if data.d != 1 or not np.array_equal(idx, data.X[:, 0]):
        raise ValueError("dictionary inputs must be integers in one column")
    if data.n != 1:
        raise ValueError("dictionary outputs must be scalar")
    c = (int(idx.min()) + int(idx.max())) // 2
    lo, hi = c - window, c + window
    if idx.min() < lo or idx.max() > hi:
        raise ValueError(f"training indices {idx.min()}..{idx.max()} exceed window [{lo}, {hi}]")
    fw = fit_l1(data, FeatureMap.indicator(lo, hi), lam, descent)
    return FeatureWeights(fw.W, fw.phi, lam, fw.tau, (lo, hi))


# -- support vector machine ---------------------------------------------------------

def _sqrt_factor(K: np.ndarray):
    """``K ~= R R^T`` on the range of K, with ``z = T w`` mapping back to coefficients."""
    s, V = la.eigh(K)
    keep = s > 1e-12 * max(s[-1], 1e-300)
    R = V[:, keep] * np.sqrt(s[keep])
    T = V[:, keep] / np.sqrt(s[keep])
    return R, T


def svm_penalty(w, R, y, nu, mu, margin=1.0) -> float:
    """Augmented Lagrangian of ``min |w|^2`` s.t. ``y_i (R w)_i >= margin``."""
    g = margin - y * (R @ w)
    return float(w @ w + np.sum(np.maximum(0.0, nu + mu * g) ** 2 - nu**2) / (2.0 * mu))


def svm_penalty_gradient(w, R, y, nu, mu, margin=1.0) -> np.ndarray:
    g = margin - y * (R @ w)
    return 2.0 * w - R.T @ (y * np.maximum(0.0, nu + mu * g))


def fit_svm(data: Dataset, cfg: LearnerConfig, mu: float = 10.0, max_rounds: int = 500,
            feas_tol: float = 1e-3) -> RepresenterModel:
    """Hard-margin kernel SVM: minimize ``|f|^2`` subject to ``y_i f(x_i) >= margin``.

    Solved by an augmented Lagrangian on the squared hinge in whitened
    coordinates ``w`` with ``f(x_i) = (R w)_i`` and ``|f| = |w|``.
    """
    y = data.Y[:, 0]
    if data.n != 1 or not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("SVM labels must be a single column of +-1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("both classes must be present")
    K = _sym_kernel(cfg.kernel, data.X)
    R, T = _sqrt_factor(K)
    w = np.zeros(R.shape[1])
    nu = np.zeros(data.m)
    inner = DescentConfig(max_iters=20000, grad_tol=1e-11, initial_step=1.0, seed=cfg.descent.seed)
    for _ in range(max_rounds):
        w, _ = gradient_descent(lambda v: svm_penalty(v, R, y, nu, mu, cfg.margin),
                                lambda v: svm_penalty_gradient(v, R, y, nu, mu, cfg.margin), w, inner)
        g = cfg.margin - y * (R @ w)
        nu_new = np.maximum(0.0, nu + mu * g)
        done = np.max(g) <= 1e-10 and np.max(np.abs(nu_new - nu)) <= 1e-9 * max(1.0, np.max(nu_new))
        nu = nu_new
        if done:
            break
    violation = float(np.max(cfg.margin - y * (R @ w)))
    if violation > feas_tol:
        raise RuntimeError(f"SVM margin constraints violated by {violation:.3g}; data may not be separable")
    return RepresenterModel(cfg.kernel, data.X, (T @ w)[:, None], 0.0, "svm")


# -- post hoc representer verification ----------------------------------------------

def verify_representer(J: Callable[[np.ndarray], float], f_star, S: SubspaceMapSpec,
                       ops: Sequence[OperatorRep], trials: int = 100, seed: int = DEFAULT_SEED,
                       tol: float = 1e-8, slack: float = 1e-9) -> Verdict:
    """Check (a) ``f* in S(N^perp)`` and (b) ``J(f* + g) >= J(f*)`` for g in its complement.

    ``N`` is the joint null space of ``ops``; the regularizer is assumed to act
    on the domain directly, so the pulled-back map is ``S`` itself.
    """
    A = joint_null_complement(ops)
    space = A.space
    f = space.check_vector(f_star)
    img = apply_map(S, A)
    span = img.span()
    resid = space.norm(f - span.basis @ (span.basis.T @ (space.gram @ f))) / max(1.0, space.norm(f))
    witness = {"containment_residual": resid}
    if not (img.contains(f, tol) and resid <= tol):
        return Verdict("representer", COUNTEREXAMPLE, seed, 0, {**witness, "f": f},
                       "minimizer outside S(N^perp)")
    comp = set_orth_complement(img)
    if comp.r == 0:
        return Verdict("representer", PASS, seed, 0, witness, "complement of S(N^perp) is trivial")
    rng = np.random.default_rng(seed)
    J0 = J(f)
    scale = max(1.0, space.norm(f))
    for t in range(trials):
        g = comp.basis @ rng.standard_normal(comp.r) * scale * np.exp(rng.normal())
        Jg = J(f + g)
        if Jg < J0 - slack:
            return Verdict("representer", COUNTEREXAMPLE, seed, t + 1,
                           {**witness, "g": g, "J(f*)": J0, "J(f*+g)": Jg}, "perturbation improves J")
    return Verdict("representer", PASS, seed, trials, {**witness, "J(f*)": J0})


# -- representer problems on enlarged dictionaries -------------------------------------

@dataclass(frozen=True, eq=False)
class RepresenterProblem:
    """Objective ``J`` on a domain space, a fitted ``f_star`` and the data operators."""

    J: Callable[[np.ndarray], float]
    f_star: np.ndarray
    ops: tuple
    space: SpaceSpec
    S: SubspaceMapSpec


def _extra_points(X: np.ndarray, n_extra: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lo, hi = X.min(axis=0) - 1.0, X.max(axis=0) + 1.0
    return rng.uniform(lo, hi, (n_extra, X.shape[1]))


def kernel_problem(kind: str, model, data: Dataset, n_extra: int = 5, seed: int = DEFAULT_SEED,
                   margin: float = 1.0, noise_cov=None) -> RepresenterProblem:
    """Representer problem for a kernel learner on the training dictionary plus ``n_extra`` points.

    ``kind`` is ``"ridge"``, ``"gp"`` or ``"svm"``; the extra points make the
    orthogonal complement of the data span nontrivial.
    """
    from .maps import span_r
    from .operators import evaluation_operator

    if kind == "gp":
        Zc, lam = model.Zbar, model.lam
    else:
        Zc, lam = model.Z, model.lam
    n = Zc.shape[1]
    space = SpaceSpec.rkhs_dictionary(np.vstack([data.X, _extra_points(data.X, n_extra, seed)]),
                                      model.kernel.with_output_dim(n))
    ops = tuple(evaluation_operator(space, x) for x in data.X)
    f = np.concatenate([Zc.ravel(), np.zeros(n_extra * n)])
    G = space.gram
    Y = data.Y

    def fit_term(v):
        return sum(float(np.sum((Y[i] - L.matrix @ v) ** 2)) for i, L in enumerate(ops))

    if kind == "ridge":
        J = lambda v: fit_term(v) + lam * float(v @ G @ v)
    elif kind == "gp":
        noise = np.zeros((n, n)) if noise_cov is None else np.asarray(noise_cov, dtype=float)
        Kb = block(_sym_kernel(model.kernel, data.X), n)
        Su = _gp_input_cov(data, noise)
        B = solve_spd(Kb + lam * np.eye(Kb.shape[0]), np.eye(Kb.shape[0]))
        const = gp_cov_objective(B, Kb, Su, lam)
        J = lambda v: fit_term(v) + lam * float(v @ G @ v) + const
    elif kind == "svm":
        y = Y[:, 0]

        def J(v):
            vals = np.array([L.matrix @ v for L in ops])[:, 0]
            return float(v @ G @ v) if np.min(y * vals) >= margin - 1e-3 else np.inf
    else:
        raise ValueError(f"unknown kernel learner {kind!r}")
    return RepresenterProblem(J, f, ops, space, span_r())


def l1_problem(fw: FeatureWeights, data: Dataset) -> RepresenterProblem:
    """Representer problem for the l1 learner: S_proj over the feature coordinates."""
    from .maps import proj
    from .operators import explicit_basis_operator

    ops = tuple(explicit_basis_operator(fw.phi, x) for x in data.X)
    A = fw.phi.design(data.X)
    y = data.Y.ravel()
    return RepresenterProblem(lambda v: l1_objective(v, A, y, fw.lam), fw.W, ops, ops[0].domain, proj())


def deep_last_layer_problem(state, data: Dataset, n_extra: int = 5, seed: int = DEFAULT_SEED) -> RepresenterProblem:
    """Output layer of a trained deep net with the hidden targets held fixed."""
    from .deepnet import ACTIVATIONS
    from .maps import span_r
    from .operators import evaluation_operator

    l = state.n_layers - 1
    C = state.centers(l)
    Zl = state.Z[l]
    n = Zl.shape[1]
    space = SpaceSpec.rkhs_dictionary(np.vstack([C, _extra_points(C, n_extra, seed)]),
                                      state.kernels[l].with_output_dim(n))
    ops = tuple(evaluation_operator(space, c) for c in C)
    sig = ACTIVATIONS[state.activations[l]][0]
    G = space.gram
    Y = data.Y
    lam = state.lams[l]

    def J(v):
        fit = sum(float(np.sum((Y[i] - sig(L.matrix @ v)) ** 2)) for i, L in enumerate(ops))
        return fit + lam * float(v @ G @ v)

    return RepresenterProblem(J, np.concatenate([Zl.ravel(), np.zeros(n_extra * n)]), ops, space, span_r())


def check_problem(prob: RepresenterProblem, trials: int = 100, seed: int = DEFAULT_SEED,
                  S: SubspaceMapSpec | None = None, f_star=None) -> Verdict:
    """:func:`verify_representer` on a prepared problem, optionally overriding S or f*."""
    return verify_representer(prob.J, prob.f_star if f_star is None else f_star, S or prob.S, prob.ops,
                              trials, seed)


from .deepnet import DeepNetState, deep_classify, deep_predict, fit_deep_net  # noqa: E402

__all__ += ["DeepNetState", "fit_deep_net", "deep_predict", "deep_classify"]
