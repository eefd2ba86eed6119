"""Linear solves, the l1 proximal map, first-order descent and gradient checking."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .hilbert import cholesky_jitter

__all__ = [
    "DescentConfig",
    "solve_spd",
    "prox_l1",
    "gradient_descent",
    "proximal_gradient",
    "fd_gradient_check",
    "MAX_HALVINGS",
]

log = logging.getLogger(__name__)

MAX_HALVINGS = 60
FLAT_RTOL = 1e-13
FLAT_PATIENCE = 100


@dataclass(frozen=True)
class DescentConfig:
    """Settings for :func:`gradient_descent` and :func:`proximal_gradient`.

    Parameters
    ----------
    max_iters : int
    grad_tol : float
        Stop once the (projected or proximal) gradient-mapping norm drops below this.
    initial_step : float
        Upper bound on the trial step; each iteration starts from twice the last accepted step.
    beta : float
        Backtracking factor.
    c : float
        Armijo sufficient-decrease constant.
    seed : int
    """

    max_iters: int = 5000
    grad_tol: float = 1e-8
    initial_step: float = 1.0
    beta: float = 0.5
    c: float = 1e-4
    seed: int = 42

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if not 0 < self.c < 1:
            raise ValueError("c must lie in (0, 1)")
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")


def solve_spd(A, B) -> np.ndarray:
    """Solve ``A X = B`` for symmetric positive definite ``A`` via Cholesky (with jitter)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    if not np.allclose(A, A.T, rtol=1e-10, atol=1e-12 * max(1.0, np.abs(A).max(initial=0.0))):
        raise ValueError("A must be symmetric")
    L, _ = cholesky_jitter(0.5 * (A + A.T))
    return scipy.linalg.cho_solve((L, True), B)


def prox_l1(v, tau: float) -> np.ndarray:
    """Soft threshold ``sign(v) * max(|v| - tau, 0)``, the prox of ``tau * ||.||_1``."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    v = np.asarray(v, dtype=float)
    out = np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)
    out[np.abs(v) <= tau] = 0.0
    return out


def gradient_descent(objective: Callable, gradient: Callable, x0, cfg: DescentConfig = DescentConfig(),
                     project: Callable | None = None) -> tuple[np.ndarray, list[float]]:
    """Armijo backtracking gradient descent, optionally projected.

    Returns the final iterate and the trace of objective values at accepted
    iterates (nonincreasing). If the line search fails after
    ``MAX_HALVINGS`` halvings a warning is logged and the last iterate is returned.

    Once ``f`` no longer changes above rounding level, a step is accepted when
    the slope along it has not overshot, ``g(x_new) . g >= (2c - 1) |g|^2``
    (the approximate Armijo test of Hager and Zhang). Such flat steps stop after
    ``FLAT_PATIENCE`` of them fail to halve the gradient norm.
    """
    x = np.array(x0, dtype=float)
    if project is not None:
        x = project(x)
    fx = float(objective(x))
    if not np.isfinite(fx):
        raise ValueError("objective is not finite at x0")
    trace = [fx]
    step = cfg.initial_step
    best_g, stale = np.inf, 0
    for _ in range(cfg.max_iters):
        g = np.asarray(gradient(x), dtype=float)
        if project is None:
            if np.linalg.norm(g) <= cfg.grad_tol:
                break
        elif np.linalg.norm(x - project(x - g)) <= cfg.grad_tol:
            break
        t = min(cfg.initial_step, 2.0 * step)
        gg = float(g @ g)
        for _ in range(MAX_HALVINGS):
            x_new = x - t * g if project is None else project(x - t * g)
            f_new = float(objective(x_new))
            if not np.isfinite(f_new) or f_new > fx:
                t *= cfg.beta
                continue
            decrease = cfg.c * t * gg if project is None else cfg.c / t * np.sum((x_new - x) ** 2)
            if f_new < fx and f_new <= fx - decrease:
                break
            # at the rounding floor of f fall back to the slope form of the Armijo test
            if (project is None and fx - f_new <= FLAT_RTOL * abs(fx)
                    and float(np.asarray(gradient(x_new)) @ g) >= (2.0 * cfg.c - 1.0) * gg):
                break
            t *= cfg.beta
        else:
            log.warning("line search failed after %d halvings; returning last iterate", MAX_HALVINGS)
            break
        if np.array_equal(x_new, x):
            break
        if f_new < fx:
            best_g, stale = np.inf, 0
        else:
            # flat steps must keep halving the gradient, else rounding has won
            gn = float(np.linalg.norm(g))
            if gn < 0.5 * best_g:
                best_g, stale = gn, 0
            else:
                stale += 1
            if stale >= FLAT_PATIENCE:
                break
        step = t
        x, fx = x_new, f_new
        trace.append(fx)
    return x, trace


def proximal_gradient(smooth: Callable, gradient: Callable, prox: Callable, nonsmooth: Callable, x0,
                      cfg: DescentConfig = DescentConfig()) -> tuple[np.ndarray, list[float]]:
    """Proximal gradient (ISTA) with backtracking on the smooth part.

    ``prox(v, t)`` must return the prox of ``t * nonsmooth`` at ``v``. The trace
    records ``smooth + nonsmooth`` and is nonincreasing.
    """
    x = np.array(x0, dtype=float)
    fx = float(smooth(x))
    trace = [fx + float(nonsmooth(x))]
    step = cfg.initial_step
    for _ in range(cfg.max_iters):
        g = np.asarray(gradient(x), dtype=float)
        t = min(cfg.initial_step, 2.0 * step)
        for _ in range(MAX_HALVINGS):
            x_new = prox(x - t * g, t)
            d = x_new - x
            f_new = float(smooth(x_new))
            if f_new <= fx + g @ d + (d @ d) / (2.0 * t) + 1e-15 * abs(fx):
                break
            t *= cfg.beta
        else:
            log.warning("line search failed after %d halvings; returning last iterate", MAX_HALVINGS)
            break
        step = t
        total = f_new + float(nonsmooth(x_new))
        if total > trace[-1]:
            # rounding can break monotonicity by an ulp; keep the better point
            break
        x, fx = x_new, f_new
        trace.append(total)
        if np.linalg.norm(d) / t <= cfg.grad_tol:
            break
    return x, trace


def fd_gradient_check(objective: Callable, gradient: Callable, x, h: float = 1e-5) -> float:
    """Max over coordinates of ``|fd - analytic| / max(1, |analytic|)`` with central differences."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = np.array(x, dtype=float)
    g = np.asarray(gradient(x), dtype=float).ravel()
    flat = x.ravel()
    err = 0.0
    for i in range(flat.size):
        e = np.zeros_like(flat)
        e[i] = h
        fd = (objective((flat + e).reshape(x.shape)) - objective((flat - e).reshape(x.shape))) / (2.0 * h)
        err = max(err, abs(fd - g[i]) / max(1.0, abs(g[i])))
    return float(err)
