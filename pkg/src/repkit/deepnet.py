"""Multiple-shooting kernel deep network.

Each layer is a kernel expansion over the current hidden targets,
``h -> sigma_l(sum_i K_l(y_i^(l), h) z_i^(l))``. Training alternates between
per-layer coefficient solves and hidden-target updates while the weight on
the hidden consensus terms is tightened geometrically.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as la

from .kernels import KernelSpec
from .solvers import DescentConfig, gradient_descent

__all__ = [
    "ACTIVATIONS",
    "DeepNetState",
    "parse_layers",
    "fit_deep_net",
    "deep_predict",
    "deep_classify",
    "deep_objective",
    "layer_objective",
    "layer_coef_gradient",
    "hidden_objective",
    "hidden_gradient",
    "consensus_residual",
    "softmax",
]

log = logging.getLogger(__name__)


def _logistic(t):
    return 0.5 * (1.0 + np.tanh(0.5 * t))


ACTIVATIONS = {
    "tanh": (np.tanh, lambda t: 1.0 - np.tanh(t) ** 2),
    "identity": (lambda t: t, lambda t: np.ones_like(t)),
    "logistic": (_logistic, lambda t: _logistic(t) * (1.0 - _logistic(t))),
}


def parse_layers(spec: str) -> list[tuple[int, str]]:
    """Parse ``"3:tanh,3:tanh,3:identity"`` into (width, activation) pairs."""
    out = []
    for item in spec.split(","):
        width, _, act = item.strip().partition(":")
        act = act or "identity"
        if act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {act!r}")
        if int(width) < 1:
            raise ValueError("layer width must be >= 1")
        out.append((int(width), act))
    if not out:
        raise ValueError("need at least one layer")
    return out


@dataclass(frozen=True, eq=False)
class DeepNetState:
    """Layers, hidden targets and coefficients of a kernel network.

    ``hidden[l]`` holds the targets y^(l+1) for l = 0..N-2 and ``Z[l]`` the
    coefficients of layer l, expanded over y^(l) (y^(0) = X).
    """

    X: np.ndarray
    kernels: tuple[KernelSpec, ...]
    activations: tuple[str, ...]
    widths: tuple[int, ...]
    hidden: tuple[np.ndarray, ...]
    Z: tuple[np.ndarray, ...]
    lams: tuple[float, ...]
    rho: float = 1.0
    rho_factor: float = 4.0
    rounds: int = 8
    sweeps: int = 4
    inner_iters: int = 200
    history: tuple[dict, ...] = field(default_factory=tuple)

    def __post_init__(self):
        N = len(self.activations)
        if N < 1 or len(self.kernels) != N or len(self.lams) != N or len(self.Z) != N:
            raise ValueError("per-layer fields must all have length N >= 1")
        if len(self.widths) != N + 1 or len(self.hidden) != N - 1:
            raise ValueError("widths must have N + 1 entries and hidden N - 1")
        if self.X.shape[1] != self.widths[0]:
            raise ValueError("input width does not match X")
        m = self.X.shape[0]
        for l in range(N):
            if self.Z[l].shape != (m, self.widths[l + 1]):
                raise ValueError(f"layer {l} coefficients must have shape {(m, self.widths[l + 1])}")
        for l, Yl in enumerate(self.hidden):
            if Yl.shape != (m, self.widths[l + 1]):
                raise ValueError(f"hidden targets {l + 1} must have shape {(m, self.widths[l + 1])}")
        if not self.rho_factor > 1:
            raise ValueError("tightening factor must exceed 1")
        if any(lam < 0 for lam in self.lams):
            raise ValueError("lambda must be >= 0")

    @property
    def n_layers(self) -> int:
        return len(self.activations)

    def centers(self, l: int) -> np.ndarray:
        return self.X if l == 0 else self.hidden[l - 1]

    @classmethod
    def initial(cls, X, layers, kernel: KernelSpec | None = None, lam: float = 1e-2, rho: float = 1.0,
                rho_factor: float = 4.0, rounds: int = 8, seed: int = 42, init_scale: float = 0.5,
                **kw) -> "DeepNetState":
        """Seeded start: hidden targets from random linear layers, coefficients zero."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        layers = parse_layers(layers) if isinstance(layers, str) else list(layers)
        kernel = kernel or KernelSpec()
        widths = (X.shape[1],) + tuple(w for w, _ in layers)
        acts = tuple(a for _, a in layers)
        rng = np.random.default_rng(seed)
        hidden, h = [], X
        for l in range(len(layers) - 1):
            W = rng.standard_normal((widths[l], widths[l + 1])) * init_scale
            h = ACTIVATIONS[acts[l]][0](h @ W)
            hidden.append(h)
        Z = tuple(np.zeros((X.shape[0], w)) for w in widths[1:])
        N = len(layers)
        return cls(X, (kernel,) * N, acts, widths, tuple(hidden), Z, (float(lam),) * N,
                   rho, rho_factor, rounds, **kw)


# -- objective pieces --------------------------------------------------------------

def _gram(k: KernelSpec, Y: np.ndarray) -> np.ndarray:
    K = k.matrix(Y, Y)
    return 0.5 * (K + K.T)


def layer_objective(Zl, K, T, act: str, lam: float, weight: float) -> float:
    """``weight |T - sigma(K Z)|^2 + lam tr(Z^T K Z)``."""
    Zl = np.asarray(Zl).reshape(T.shape)
    R = ACTIVATIONS[act][0](K @ Zl) - T
    return float(weight * np.sum(R * R) + lam * np.sum(Zl * (K @ Zl)))


def layer_coef_gradient(Zl, K, T, act: str, lam: float, weight: float) -> np.ndarray:
    Zl = np.asarray(Zl).reshape(T.shape)
    F = K @ Zl
    sig, dsig = ACTIVATIONS[act]
    P = 2.0 * weight * (sig(F) - T) * dsig(F)
    return (K @ P + 2.0 * lam * K @ Zl).reshape(np.shape(Zl))


def _weights(state: DeepNetState, rho: float) -> list[float]:
    # data term keeps weight 1, hidden consensus terms carry the penalty
    return [rho] * (state.n_layers - 1) + [1.0]


def _targets(state: DeepNetState, Y: np.ndarray, l: int) -> np.ndarray:
    return state.hidden[l] if l < state.n_layers - 1 else Y


def deep_objective(state: DeepNetState, Y: np.ndarray, rho: float | None = None) -> float:
    """Penalized multiple-shooting objective at consensus weight ``rho``."""
    rho = state.rho if rho is None else rho
    w = _weights(state, rho)
    total = 0.0
    for l in range(state.n_layers):
        K = _gram(state.kernels[l], state.centers(l))
        total += layer_objective(state.Z[l], K, _targets(state, Y, l), state.activations[l], state.lams[l], w[l])
    return total


def hidden_objective(Yl, state: DeepNetState, Y: np.ndarray, l: int, rho: float) -> float:
    """Terms of the objective that depend on the hidden targets y^(l), l >= 1."""
    Yl = np.asarray(Yl).reshape(state.hidden[l - 1].shape)
    w = _weights(state, rho)
    Kp = _gram(state.kernels[l - 1], state.centers(l - 1))
    Fp = ACTIVATIONS[state.activations[l - 1]][0](Kp @ state.Z[l - 1])
    K = _gram(state.kernels[l], Yl)
    return float(rho * np.sum((Yl - Fp) ** 2)
                 + layer_objective(state.Z[l], K, _targets(state, Y, l), state.activations[l], state.lams[l], w[l]))


def hidden_gradient(Yl, state: DeepNetState, Y: np.ndarray, l: int, rho: float) -> np.ndarray:
    """Gradient of :func:`hidden_objective`, differentiating through the squared-exponential Gram."""
    k = state.kernels[l]
    if k.family != "squared_exponential":
        raise ValueError("hidden-target gradient is implemented for the squared-exponential kernel")
    shape = state.hidden[l - 1].shape
    Yl = np.asarray(Yl).reshape(shape)
    w = _weights(state, rho)
    Kp = _gram(state.kernels[l - 1], state.centers(l - 1))
    Fp = ACTIVATIONS[state.activations[l - 1]][0](Kp @ state.Z[l - 1])
    grad = 2.0 * rho * (Yl - Fp)

    Zl = state.Z[l]
    K = _gram(k, Yl)
    F = K @ Zl
    sig, dsig = ACTIVATIONS[state.activations[l]]
    P = 2.0 * w[l] * (sig(F) - _targets(state, Y, l)) * dsig(F)
    G = P @ Zl.T + state.lams[l] * Zl @ Zl.T
    S = (G + G.T) * K
    # d K_ab / d y_a = -K_ab (y_a - y_b) / l^2
    grad -= (S.sum(axis=1)[:, None] * Yl - S @ Yl) / k.lengthscale**2
    return grad.reshape(shape)


def consensus_residual(state: DeepNetState) -> float:
    """``max_{i,l} |y_i^(l+1) - sigma_l(f^(l)(y_i^(l)))|`` over the hidden layers."""
    worst = 0.0
    for l in range(state.n_layers - 1):
        K = _gram(state.kernels[l], state.centers(l))
        F = ACTIVATIONS[state.activations[l]][0](K @ state.Z[l])
        worst = max(worst, float(np.max(np.linalg.norm(state.hidden[l] - F, axis=1))))
    return worst


# -- training ----------------------------------------------------------------------------

def _solve_layer(state, Y, l, rho, cfg) -> DeepNetState:
    K = _gram(state.kernels[l], state.centers(l))
    T = _targets(state, Y, l)
    act, lam, wt = state.activations[l], state.lams[l], _weights(state, rho)[l]
    s, V = la.eigh(K)
    keep = s > 1e-12 * max(s[-1], 1e-300)
    R = V[:, keep] * np.sqrt(s[keep])
    Tm = V[:, keep] / np.sqrt(s[keep])
    # whitened coordinates: K Z = R W and tr(Z^T K Z) = |W|^2
    shape = (R.shape[1], T.shape[1])

    def obj(w):
        W = w.reshape(shape)
        Res = ACTIVATIONS[act][0](R @ W) - T
        return float(wt * np.sum(Res * Res) + lam * np.sum(W * W))

    def grad(w):
        W = w.reshape(shape)
        F = R @ W
        sig, dsig = ACTIVATIONS[act]
        return (R.T @ (2.0 * wt * (sig(F) - T) * dsig(F)) + 2.0 * lam * W).ravel()

    W, _ = gradient_descent(obj, grad, (R.T @ state.Z[l]).ravel(), cfg)
    Znew = Tm @ W.reshape(shape)
    before = layer_objective(state.Z[l], K, T, act, lam, wt)
    if layer_objective(Znew, K, T, act, lam, wt) > before:
        return state
    Z = list(state.Z)
    Z[l] = Znew
    return replace(state, Z=tuple(Z))


def _solve_hidden(state, Y, l, rho, cfg) -> DeepNetState:
    Yl0 = state.hidden[l - 1]
    Yl, _ = gradient_descent(lambda v: hidden_objective(v, state, Y, l, rho),
                             lambda v: hidden_gradient(v, state, Y, l, rho).ravel(), Yl0.ravel(), cfg)
    hidden = list(state.hidden)
    hidden[l - 1] = Yl.reshape(Yl0.shape)
    return replace(state, hidden=tuple(hidden))


def fit_deep_net(X, Y, state0: DeepNetState) -> DeepNetState:
    """Alternating block minimization with a tightening consensus penalty.

    Each outer round runs ``sweeps`` passes of (coefficient solves for every
    layer, hidden-target updates), then multiplies the consensus weight by
    ``rho_factor``. Blocks only accept improving steps, so the objective at
    the round's weight never increases within a round. The run aborts if it
    does so in two consecutive rounds.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if not np.array_equal(X, state0.X):
        raise ValueError("state was initialized for different inputs")
    if Y.shape != (X.shape[0], state0.widths[-1]):
        raise ValueError(f"targets must have shape {(X.shape[0], state0.widths[-1])}")
    cfg = DescentConfig(max_iters=state0.inner_iters, grad_tol=1e-9)
    state, rho = state0, state0.rho
    history, increases = [], 0
    rounds = state0.rounds if state0.n_layers > 1 else 1
    for r in range(rounds):
        start = deep_objective(state, Y, rho)
        for _ in range(state.sweeps):
            for l in range(state.n_layers):
                state = _solve_layer(state, Y, l, rho, cfg)
            for l in range(1, state.n_layers):
                state = _solve_hidden(state, Y, l, rho, cfg)
        end = deep_objective(state, Y, rho)
        history.append({"round": r, "rho": rho, "start": start, "end": end,
                        "consensus": consensus_residual(state)})
        increases = increases + 1 if end > start + 1e-9 else 0
        if increases >= 2:
            raise RuntimeError(f"objective increased in two consecutive rounds (round {r})")
        rho *= state.rho_factor
    return replace(state, rho=rho, history=tuple(history))


# -- prediction ----------------------------------------------------------------------------

def softmax(H: np.ndarray) -> np.ndarray:
    E = np.exp(H - H.max(axis=-1, keepdims=True))
    return E / E.sum(axis=-1, keepdims=True)


def _forward(state: DeepNetState, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1
    h = x.reshape(1, -1) if single else x
    if h.shape[1] != state.widths[0]:
        raise ValueError(f"input dimension {h.shape[1]} does not match {state.widths[0]}")
    for l in range(state.n_layers):
        h = ACTIVATIONS[state.activations[l]][0](state.kernels[l].matrix(h, state.centers(l)) @ state.Z[l])
    return h, single


def deep_predict(state: DeepNetState, x) -> np.ndarray:
    """Class probabilities from the soft-max of the network output."""
    h, single = _forward(state, x)
    P = softmax(h)
    return P[0] if single else P


def deep_classify(state: DeepNetState, x) -> np.ndarray:
    """Most probable class; exact ties go to the lowest index."""
    return np.argmax(deep_predict(state, x), axis=-1)
