"""Regularizer catalog and the orthomonotonicity checker."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hilbert import SpaceSpec, SubspaceBasis
from .maps import (
    DEFAULT_SEED,
    SubspaceMapSpec,
    apply_map,
    check_orthogonality_preservation,
    pullback,
    sample_subspaces,
    set_orth_complement,
)
from .operators import OperatorRep
from .verdict import COUNTEREXAMPLE, NOT_APPLICABLE, PASS, Verdict

__all__ = [
    "RegularizerSpec",
    "norm_power",
    "l1",
    "l1_squared",
    "seminorm_via_operator",
    "wrap",
    "evaluate",
    "check_orthomonotone",
    "orthomonotone_witness",
    "compose_check",
    "MONOTONE_WRAPPERS",
]

# increasing functions on [0, inf) used to test the monotone-wrapping closure
MONOTONE_WRAPPERS: dict[str, Callable] = {
    "square": lambda t: t * t,
    "sqrt1p": lambda t: (t + 1) ** 0.5,
    "double": lambda t: 2 * t,
}


@dataclass(frozen=True, eq=False)
class RegularizerSpec:
    kind: str
    p: float = 2.0
    space: SpaceSpec | None = None
    L: OperatorRep | None = None
    inner: "RegularizerSpec | None" = None
    outer: str | None = None

    def __call__(self, v) -> float:
        return evaluate(self, v)

    @property
    def label(self) -> str:
        base = {"norm_power": f"norm^{self.p:g}", "l1": "l1", "l1_squared": "l1^2"}.get(self.kind)
        if base is None:
            base = f"{self.inner.label} o L"
        return f"{self.outer}({base})" if self.outer else base


def norm_power(p: float, space: SpaceSpec | None = None) -> RegularizerSpec:
    if not p > 0:
        raise ValueError("p must be positive")
    return RegularizerSpec("norm_power", p=float(p), space=space)


def l1() -> RegularizerSpec:
    """Sum of absolute coordinates in the standard basis, whatever the Gram matrix."""
    return RegularizerSpec("l1")


def l1_squared() -> RegularizerSpec:
    return RegularizerSpec("l1_squared")


def seminorm_via_operator(L: OperatorRep, inner: RegularizerSpec) -> RegularizerSpec:
    """``v -> inner(L v)``."""
    return RegularizerSpec("seminorm_via_operator", L=L, inner=inner)


def wrap(reg: RegularizerSpec, h: str) -> RegularizerSpec:
    if h not in MONOTONE_WRAPPERS:
        raise ValueError(f"unknown wrapper {h!r}")
    if reg.outer is not None:
        raise ValueError("regularizer is already wrapped")
    return RegularizerSpec(reg.kind, reg.p, reg.space, reg.L, reg.inner, h)


def _evaluate_raw(reg: RegularizerSpec, v: np.ndarray, dtype) -> float:
    k = reg.kind
    if k == "norm_power":
        if reg.space is not None:
            reg.space.check_vector(v)
            G = reg.space.gram.astype(dtype)
        else:
            G = None
        x = v.astype(dtype)
        sq = x @ (G @ x if G is not None else x)
        return max(sq, dtype(0)) ** (dtype(reg.p) / 2)
    if k == "l1":
        return dtype(math.fsum(abs(float(t)) for t in v)) if dtype is float else np.sum(np.abs(v.astype(dtype)))
    if k == "l1_squared":
        s = _evaluate_raw(RegularizerSpec("l1"), v, dtype)
        return s * s
    if k == "seminorm_via_operator":
        Lv = reg.L.matrix.astype(dtype) @ reg.L.domain.check_vector(v).astype(dtype)
        return _evaluate_raw(reg.inner, np.asarray(Lv), dtype) if reg.inner.outer is None else \
            evaluate(reg.inner, np.asarray(Lv, dtype=float))
    raise ValueError(f"unknown regularizer kind {k!r}")


def evaluate(reg: RegularizerSpec, v, dtype=float) -> float:
    v = np.asarray(v, dtype=float).ravel()
    val = _evaluate_raw(reg, v, dtype)
    if reg.outer is not None:
        val = MONOTONE_WRAPPERS[reg.outer](val)
    return float(val) if dtype is float else val


def _violation(reg, f, g, dtype=float):
    both = evaluate(reg, f + g, dtype)
    return both, max(evaluate(reg, f, dtype), evaluate(reg, g, dtype))


def _confirmed(reg, f, g, tol) -> bool:
    both, worst = _violation(reg, np.asarray(f), np.asarray(g), np.longdouble)
    return bool(both < worst - tol)


def check_orthomonotone(reg: RegularizerSpec, S: SubspaceMapSpec, space: SpaceSpec, trials: int = 100,
                        tol: float = 1e-10, seed: int = DEFAULT_SEED) -> Verdict:
    """Sample A, f in S(A), g in S(A)^perp and test ``reg(f+g) >= max(reg(f), reg(g))``.

    Candidate counterexamples are recomputed in extended precision before
    being reported.
    """
    rng = np.random.default_rng(seed)
    subs = sample_subspaces(space, trials, rng)
    for t, A in enumerate(subs):
        img = apply_map(S, A)
        comp = set_orth_complement(img)
        fs = img.members(rng)
        gs = comp.columns() + ([comp.basis @ rng.standard_normal(comp.r)] if comp.r else [np.zeros(space.dim)])
        for f in fs:
            scale_f = math.exp(rng.normal())
            for g in gs:
                fv, gv = scale_f * f, math.exp(rng.normal()) * g
                both, worst = _violation(reg, fv, gv)
                if both < worst - tol and _confirmed(reg, fv, gv, tol):
                    return Verdict("orthomonotone", COUNTEREXAMPLE, seed, t + 1,
                                   {"A": A.basis, "f": fv, "g": gv, "Omega(f+g)": both,
                                    "max(Omega(f),Omega(g))": worst},
                                   f"{reg.label} vs {S.label or S.kind}")
    return Verdict("orthomonotone", PASS, seed, len(subs), {}, f"{reg.label} vs {S.label or S.kind}")


def orthomonotone_witness(reg: RegularizerSpec, S: SubspaceMapSpec, A: SubspaceBasis, f, g,
                          tol: float = 1e-10) -> Verdict:
    """Evaluate one explicit triple (A, f, g) after checking f in S(A), g in S(A)^perp."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    img = apply_map(S, A)
    if not img.contains(f):
        raise ValueError("f is not in S(A)")
    comp = set_orth_complement(img)
    if comp.r == 0 and np.any(g != 0) or comp.r and A.space.norm(g - comp.basis @ (comp.basis.T @ A.space.gram @ g)) > 1e-9:
        raise ValueError("g is not orthogonal to S(A)")
    both, worst = _violation(reg, f, g)
    status = COUNTEREXAMPLE if both < worst - tol and _confirmed(reg, f, g, tol) else PASS
    return Verdict("orthomonotone", status, None, 1,
                   {"A": A.basis, "f": f, "g": g, "Omega(f+g)": both, "max(Omega(f),Omega(g))": worst},
                   f"{reg.label} vs {S.label or S.kind}")


def compose_check(reg: RegularizerSpec, S: SubspaceMapSpec, L: OperatorRep, trials: int = 100,
                  tol: float = 1e-10, seed: int = DEFAULT_SEED) -> Verdict:
    """Orthomonotonicity of ``v -> reg(L v)`` with respect to the pullback of S.

    Applicable only when L preserves orthogonality with respect to the
    pullback; otherwise the failing containment is returned as witness.
    """
    SL = pullback(S, L)
    pres = check_orthogonality_preservation(L, SL, trials=min(trials, 50), seed=seed)
    if not pres.passed:
        return Verdict("orthomonotone_composed", NOT_APPLICABLE, seed, pres.trials, pres.witness,
                       "operator does not preserve orthogonality w.r.t. the pulled-back map")
    v = check_orthomonotone(seminorm_via_operator(L, reg), SL, L.domain, trials, tol, seed)
    return Verdict("orthomonotone_composed", v.status, seed, v.trials, v.witness, v.note)
