"""Subspace-valued maps, their set-valued images and property checkers.

Images are kept symbolic: a subspace, a finite union of subspaces, or the
linear image of a planar double cone ``{lambda R_psi a : |psi| < theta}``.
Membership and orthogonal complements are then exact up to a tolerance, so
any counterexample a checker reports can be re-verified by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hilbert import (
    SpaceSpec,
    SubspaceBasis,
    orth_complement,
    orthonormalize,
    project,
    random_subspace,
    subspace_sum,
)
from .operators import OperatorRep, adjoint, joint_null_complement
from .verdict import COUNTEREXAMPLE, PASS, Verdict

__all__ = [
    "SetRep",
    "SubspaceMapSpec",
    "rotation",
    "span_r",
    "rotate",
    "rotate_cone",
    "rotate_union_half_pi",
    "operator_family",
    "null_proj",
    "proj",
    "pullback",
    "example_catalog",
    "apply_map",
    "set_membership",
    "set_orth_complement",
    "check_inclusive",
    "check_closed",
    "check_super_additive",
    "check_null_space_preserving",
    "check_vector_space_image",
    "check_orthogonality_preservation",
    "check_r_regular",
    "check_orthogonal_image",
    "sample_subspaces",
    "DEFAULT_SEED",
    "MEMBERSHIP_TOL",
]

DEFAULT_SEED = 42
MEMBERSHIP_TOL = 1e-9
_COORD_TOL = 1e-10


def rotation(theta: float) -> np.ndarray:
    """Clockwise rotation of R^2 by ``theta`` radians."""
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, s], [-s, c]])
    R[np.abs(R) < 1e-15] = 0.0
    return R


def _zero(space: SpaceSpec) -> SubspaceBasis:
    return SubspaceBasis(space, np.zeros((space.dim, 0)))


def _projector_distance(A: SubspaceBasis, B: SubspaceBasis) -> float:
    return float(np.max(np.abs(A.projector() - B.projector()))) if A.r == B.r else np.inf


@dataclass(frozen=True, eq=False)
class SetRep:
    """Symbolic image of a subspace-valued map.

    ``variant`` is "subspace" (one part), "union" (several parts) or "cone".
    A cone is ``plane @ {w in R^2 : angle(w, +-center) (<|<=) half_angle}``.
    """

    space: SpaceSpec
    variant: str
    parts: tuple = ()
    plane: np.ndarray | None = None
    center: np.ndarray | None = None
    half_angle: float = 0.0
    closed: bool = True

    # constructors ------------------------------------------------------
    @classmethod
    def subspace(cls, B: SubspaceBasis) -> "SetRep":
        return cls(B.space, "subspace", (B,))

    @classmethod
    def union(cls, space: SpaceSpec, parts: Sequence[SubspaceBasis]) -> "SetRep":
        kept: list[SubspaceBasis] = []
        for P in parts:
            if P.r == 0:
                continue
            if any(_projector_distance(P, Q) < 1e-9 for Q in kept):
                continue
            kept.append(P)
        if not kept:
            return cls.subspace(_zero(space))
        if len(kept) == 1:
            return cls.subspace(kept[0])
        return cls(space, "union", tuple(kept))

    @classmethod
    def cone(cls, space: SpaceSpec, plane, center, half_angle: float, closed: bool) -> "SetRep":
        plane = np.asarray(plane, dtype=float).reshape(space.dim, 2)
        span = orthonormalize(list(plane.T), space)
        # a double cone with positive angle spans its plane; degenerate cases collapse
        if span.r < 2 or half_angle > math.pi / 2 or (closed and half_angle >= math.pi / 2):
            return cls.subspace(span)
        if half_angle <= 0.0:
            if not closed:
                return cls.subspace(_zero(space))
            return cls.subspace(orthonormalize([plane @ np.asarray(center, float)], space))
        c = np.asarray(center, dtype=float)
        return cls(space, "cone", (span,), plane, c / np.linalg.norm(c), float(half_angle), bool(closed))

    # queries -----------------------------------------------------------
    def span(self) -> SubspaceBasis:
        if self.variant == "union":
            out = self.parts[0]
            for P in self.parts[1:]:
                out = subspace_sum(out, P)
            return out
        return self.parts[0]

    def contains(self, v, tol: float = MEMBERSHIP_TOL) -> bool:
        v = self.space.check_vector(v)
        scale = max(1.0, self.space.norm(v))
        if self.variant in ("subspace", "union"):
            return any(self.space.norm(v - project(v, P)) <= tol * scale for P in self.parts)
        if self.space.norm(v) <= tol:
            return True
        G = self.space.gram
        P = self.plane
        w = np.linalg.solve(P.T @ G @ P, P.T @ G @ v)
        if self.space.norm(v - P @ w) > tol * scale:
            return False
        cosang = min(1.0, abs(float(w @ self.center)) / float(np.linalg.norm(w)))
        angle = math.acos(cosang)
        if self.closed:
            return angle <= self.half_angle + tol
        return angle < self.half_angle - tol

    def members(self, rng: np.random.Generator) -> list[np.ndarray]:
        """Representative elements: basis vectors, random combinations and cone edges."""
        if self.variant == "cone":
            edge = self.half_angle if self.closed else self.half_angle * (1.0 - 1e-6)
            out = []
            for psi in (-edge, 0.0, edge):
                w = rotation(psi) @ self.center
                out.append(self.plane @ w)
            out += [-v for v in out]
            c = rng.uniform(-1.0, 1.0)
            out.append(self.plane @ (rotation(c * edge) @ self.center) * rng.standard_normal())
            return out
        out = []
        for P in self.parts:
            if P.r == 0:
                out.append(np.zeros(self.space.dim))
                continue
            out.extend(P.columns())
            out.append(P.basis @ rng.standard_normal(P.r))
        return out

    def describe(self) -> dict:
        if self.variant == "cone":
            return {"variant": "cone", "plane": self.plane, "center": self.center,
                    "half_angle": self.half_angle, "closed": self.closed}
        return {"variant": self.variant, "bases": [P.basis for P in self.parts]}

    def linear_image(self, M: np.ndarray, target: SpaceSpec) -> "SetRep":
        """Image of this set under the coordinate matrix ``M``."""
        if self.variant == "cone":
            return SetRep.cone(target, M @ self.plane, self.center, self.half_angle, self.closed)
        imgs = [orthonormalize(list((M @ P.basis).T), target) for P in self.parts]
        if self.variant == "subspace":
            return SetRep.subspace(imgs[0])
        return SetRep.union(target, imgs)


def set_membership(rep: SetRep, v, tol: float = MEMBERSHIP_TOL) -> bool:
    return rep.contains(v, tol)


def set_orth_complement(rep: SetRep) -> SubspaceBasis:
    """Vectors orthogonal to every member, i.e. the complement of the set's span."""
    return orth_complement(rep.span())


# -- the catalog -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SubspaceMapSpec:
    kind: str
    theta: float | None = None
    operators: tuple = ()
    basis: np.ndarray | None = None
    groups: tuple | None = None
    L: OperatorRep | None = None
    inner: "SubspaceMapSpec | None" = None
    declared: dict = field(default_factory=dict)
    label: str = ""

    def __repr__(self) -> str:
        return f"SubspaceMapSpec({self.label or self.kind})"


def _attrs(inclusive, closed, super_additive) -> dict:
    return {"inclusive": inclusive, "closed": closed, "super_additive": super_additive}


def span_r() -> SubspaceMapSpec:
    return SubspaceMapSpec("span_r", declared=_attrs(True, True, True), label="S_R")


def rotate(theta: float) -> SubspaceMapSpec:
    return SubspaceMapSpec("rotate", theta=theta, declared=_attrs(False, True, True), label="S_theta")


def rotate_cone(theta: float, closed: bool) -> SubspaceMapSpec:
    kind = "rotate_cone_closed" if closed else "rotate_cone_open"
    label = "S_psi" if closed else "S_phi"
    return SubspaceMapSpec(kind, theta=theta, declared=_attrs(True, closed, True), label=label)


def rotate_union_half_pi() -> SubspaceMapSpec:
    return SubspaceMapSpec("rotate_union_half_pi", declared=_attrs(True, True, False), label="S_pi/2")


def operator_family(ops: Sequence[OperatorRep]) -> SubspaceMapSpec:
    """Image ``span{L a : L in ops, a in A}``; include the identity for inclusiveness."""
    return SubspaceMapSpec("operator_family", operators=tuple(ops), declared=_attrs(True, True, True),
                           label="S_Lfamily")


def null_proj(E: np.ndarray | None = None) -> SubspaceMapSpec:
    return SubspaceMapSpec("null_proj", basis=E, declared=_attrs(False, True, False), label="S_null")


def proj(E: np.ndarray | None = None, groups: Sequence[Sequence[int]] | None = None) -> SubspaceMapSpec:
    """Projection onto the basis vectors (or groups of them) an input touches."""
    g = None if groups is None else tuple(tuple(int(i) for i in grp) for grp in groups)
    return SubspaceMapSpec("proj", basis=E, groups=g, declared=_attrs(True, True, True), label="S_proj")


def pullback(S: SubspaceMapSpec, L: OperatorRep) -> SubspaceMapSpec:
    """``S_L(A) = L* S(L A)``; closed and super additive whenever S is."""
    declared = {"closed": S.declared.get("closed"), "super_additive": S.declared.get("super_additive")}
    return SubspaceMapSpec("pullback", L=L, inner=S, declared=declared, label=f"pullback({S.label or S.kind})")


def example_catalog(n: int = 3, theta: float = math.pi / 6, seed: int = DEFAULT_SEED) -> list[tuple[str, SubspaceMapSpec, SpaceSpec]]:
    """The worked example maps with the spaces they are defined on.

    Rotation maps live in Euclidean R^2; the others in R^n. The operator
    family is the identity plus two seeded random matrices.
    """
    plane = SpaceSpec.euclidean(2)
    space = SpaceSpec.euclidean(n)
    rng = np.random.default_rng(seed)
    fam = [OperatorRep(space, space, np.eye(n))] + [
        OperatorRep(space, space, rng.standard_normal((n, n))) for _ in range(2)
    ]
    return [
        ("1:S_R", span_r(), space),
        ("2:S_theta", rotate(theta), plane),
        ("3:S_phi", rotate_cone(theta, closed=False), plane),
        ("3:S_psi", rotate_cone(theta, closed=True), plane),
        ("4:S_pi/2", rotate_union_half_pi(), plane),
        ("5:S_L", operator_family(fam), space),
        ("6:S_null", null_proj(), space),
        ("7:S_proj", proj(), space),
    ]


# -- application ---------------------------------------------------------------

def _require_plane(S: SubspaceMapSpec, space: SpaceSpec) -> None:
    if space.dim != 2 or not space.is_euclidean:
        raise ValueError(f"{S.kind} acts on Euclidean R^2 only")


def _coordinate_basis(S: SubspaceMapSpec, space: SpaceSpec) -> np.ndarray:
    E = np.eye(space.dim) if S.basis is None else np.asarray(S.basis, dtype=float)
    if E.shape[0] != space.dim:
        raise ValueError("projection basis does not match the space")
    return E


def _touched(S: SubspaceMapSpec, A: SubspaceBasis) -> np.ndarray:
    E = _coordinate_basis(S, A.space)
    if A.r == 0:
        return np.zeros(E.shape[1], dtype=bool)
    coords = E.T @ A.space.gram @ A.basis
    return np.max(np.abs(coords), axis=1) > _COORD_TOL


def apply_map(S: SubspaceMapSpec, A: SubspaceBasis) -> SetRep:
    space = A.space
    k = S.kind
    if k == "span_r":
        return SetRep.subspace(A)
    if k == "rotate":
        _require_plane(S, space)
        return SetRep.subspace(orthonormalize(list((rotation(S.theta) @ A.basis).T), space))
    if k in ("rotate_cone_open", "rotate_cone_closed"):
        _require_plane(S, space)
        if A.r != 1:
            return SetRep.subspace(A)
        return SetRep.cone(space, np.eye(2), A.basis[:, 0], S.theta, closed=(k == "rotate_cone_closed"))
    if k == "rotate_union_half_pi":
        _require_plane(S, space)
        turned = orthonormalize(list((rotation(math.pi / 2) @ A.basis).T), space)
        return SetRep.union(space, [A, turned])
    if k == "operator_family":
        cols = []
        for L in S.operators:
            if not L.domain.same_as(space) or not L.codomain.same_as(space):
                raise ValueError("operator family must act on the map's space")
            cols.extend((L.matrix @ A.basis).T)
        return SetRep.subspace(orthonormalize(cols, space))
    if k == "null_proj":
        E = _coordinate_basis(S, space)
        hit = _touched(S, A)
        lines = [SubspaceBasis(space, E[:, [i]] / space.norm(E[:, i])) for i in np.flatnonzero(hit)]
        return SetRep.union(space, lines)
    if k == "proj":
        E = _coordinate_basis(S, space)
        hit = _touched(S, A)
        groups = S.groups or tuple((i,) for i in range(E.shape[1]))
        cols = [E[:, i] for grp in groups if any(hit[list(grp)]) for i in grp]
        return SetRep.subspace(orthonormalize(cols, space))
    if k == "pullback":
        L = S.L
        if not L.domain.same_as(space):
            raise ValueError("pullback map acts on the operator's domain")
        inner = apply_map(S.inner, L.image(A))
        return inner.linear_image(adjoint(L).matrix, L.domain)
    raise ValueError(f"unknown map kind {k!r}")


# -- sampling ----------------------------------------------------------------

def sample_subspaces(space: SpaceSpec, trials: int, rng: np.random.Generator) -> list[SubspaceBasis]:
    """Zero, full space and the first coordinate line, then random subspaces."""
    fixed = [_zero(space), orthonormalize(list(np.eye(space.dim)), space),
             orthonormalize([np.eye(space.dim)[0]], space)]
    return fixed + [random_subspace(space, rng) for _ in range(trials)]


def _sample_pairs(space: SpaceSpec, trials: int, rng: np.random.Generator):
    e = np.eye(space.dim)
    line = lambda i: orthonormalize([e[i]], space)  # noqa: E731
    full = orthonormalize(list(e), space)
    pairs = [(_zero(space), _zero(space)), (full, full), (line(0), line(0))]
    if space.dim > 1:
        pairs.append((line(0), line(1)))
    pairs += [(random_subspace(space, rng), random_subspace(space, rng)) for _ in range(trials)]
    return pairs


# -- checkers ------------------------------------------------------------------

def check_inclusive(S: SubspaceMapSpec, space: SpaceSpec, trials: int = 50, seed: int = DEFAULT_SEED) -> Verdict:
    """A is contained in S(A) for sampled subspaces A."""
    rng = np.random.default_rng(seed)
    subs = sample_subspaces(space, trials, rng)
    for t, A in enumerate(subs):
        img = apply_map(S, A)
        for a in A.columns():
            if not img.contains(a):
                return Verdict("inclusive", COUNTEREXAMPLE, seed, t + 1,
                               {"A": A.basis, "a": a, "image": img.describe()})
    return Verdict("inclusive", PASS, seed, len(subs))


def check_closed(S: SubspaceMapSpec, space: SpaceSpec | None = None) -> Verdict:
    """Closedness of images; only cone images can fail in finite dimension.

    For the open cone the witness is a sequence of members at angles
    ``theta - 10^-k`` whose limit on the boundary ray is not a member.
    """
    kind = S.kind
    if kind == "pullback":
        inner = check_closed(S.inner)
        return Verdict("closed", inner.status, None, 0, inner.witness,
                       "pullback by a linear map inherits closedness")
    if kind == "rotate_cone_open":
        plane = SpaceSpec.euclidean(2)
        A = orthonormalize([np.array([1.0, 0.0])], plane)
        img = apply_map(S, A)
        seq = [rotation(S.theta - 10.0 ** -k) @ A.basis[:, 0] for k in range(1, 7)]
        limit = rotation(S.theta) @ A.basis[:, 0]
        if all(img.contains(v) for v in seq) and not img.contains(limit):
            return Verdict("closed", COUNTEREXAMPLE, None, len(seq),
                           {"A": A.basis, "sequence": seq, "limit": limit},
                           "open angular interval: boundary ray is a limit of members but not a member")
        return Verdict("closed", PASS, None, len(seq))
    note = {"rotate_cone_closed": "closed angular interval"}.get(kind, "images are finite unions of subspaces")
    return Verdict("closed", PASS, None, 0, {}, note)


def check_super_additive(S: SubspaceMapSpec, space: SpaceSpec, trials: int = 50,
                         seed: int = DEFAULT_SEED) -> Verdict:
    """S(A) + S(B) is contained in S(A + B) for sampled pairs and members."""
    rng = np.random.default_rng(seed)
    pairs = _sample_pairs(space, trials, rng)
    for t, (A, B) in enumerate(pairs):
        SA, SB, SAB = apply_map(S, A), apply_map(S, B), apply_map(S, subspace_sum(A, B))
        for a in SA.members(rng):
            for b in SB.members(rng):
                if not SAB.contains(a + b):
                    return Verdict("super_additive", COUNTEREXAMPLE, seed, t + 1,
                                   {"A": A.basis, "B": B.basis, "a": a, "b": b, "a+b": a + b,
                                    "S(A+B)": SAB.describe()})
    return Verdict("super_additive", PASS, seed, len(pairs))


def check_null_space_preserving(S: SubspaceMapSpec, ops: Sequence[OperatorRep], tol: float = 1e-8) -> Verdict:
    """Every g orthogonal to S(N^perp) is annihilated by every operator."""
    A = apply_map(S, joint_null_complement(ops))
    comp = set_orth_complement(A)
    for g in comp.columns():
        for i, L in enumerate(ops):
            r = float(np.linalg.norm(L.matrix @ g))
            if r > tol:
                return Verdict("null_space_preserving", COUNTEREXAMPLE, None, 1,
                               {"g": g, "operator": i, "|L g|": r, "image": A.describe()})
    return Verdict("null_space_preserving", PASS, None, 1)


def check_vector_space_image(S: SubspaceMapSpec, space: SpaceSpec, trials: int = 50,
                             seed: int = DEFAULT_SEED) -> Verdict:
    """Images of subspaces are closed under random linear combinations."""
    rng = np.random.default_rng(seed)
    subs = sample_subspaces(space, trials, rng)
    for t, A in enumerate(subs):
        img = apply_map(S, A)
        mem = img.members(rng)
        for i, a in enumerate(mem):
            for b in mem[i + 1:]:
                for lam in ((1.0, 1.0), tuple(rng.standard_normal(2))):
                    v = lam[0] * a + lam[1] * b
                    if not img.contains(v):
                        return Verdict("vector_space_image", COUNTEREXAMPLE, seed, t + 1,
                                       {"A": A.basis, "a": a, "b": b, "coefficients": lam, "combination": v})
    return Verdict("vector_space_image", PASS, seed, len(subs))


def check_orthogonality_preservation(L: OperatorRep, S_L: SubspaceMapSpec, trials: int = 50,
                                     seed: int = DEFAULT_SEED, tol: float = MEMBERSHIP_TOL) -> Verdict:
    """Both containments ``L S_L(A) in S(LA)`` and ``L (S_L(A)^perp) in S(LA)^perp``."""
    if S_L.kind != "pullback":
        raise ValueError("S_L must be a pullback map")
    rng = np.random.default_rng(seed)
    subs = sample_subspaces(L.domain, trials, rng)
    for t, A in enumerate(subs):
        outer = apply_map(S_L.inner, L.image(A))
        pulled = apply_map(S_L, A)
        for f in pulled.members(rng):
            if not outer.contains(L.matrix @ f, tol):
                return Verdict("orthogonality_preservation", COUNTEREXAMPLE, seed, t + 1,
                               {"containment": 1, "A": A.basis, "f": f, "Lf": L.matrix @ f})
        target = SetRep.subspace(set_orth_complement(outer))
        for g in set_orth_complement(pulled).columns():
            if not target.contains(L.matrix @ g, tol):
                return Verdict("orthogonality_preservation", COUNTEREXAMPLE, seed, t + 1,
                               {"containment": 2, "A": A.basis, "g": g, "Lg": L.matrix @ g})
    return Verdict("orthogonality_preservation", PASS, seed, len(subs))


def check_orthogonal_image(L: OperatorRep, S_L: SubspaceMapSpec, trials: int = 50,
                           seed: int = DEFAULT_SEED, tol: float = MEMBERSHIP_TOL) -> Verdict:
    """Only the second containment, which holds for every L and S."""
    rng = np.random.default_rng(seed)
    subs = sample_subspaces(L.domain, trials, rng)
    for t, A in enumerate(subs):
        outer = apply_map(S_L.inner, L.image(A))
        target = SetRep.subspace(set_orth_complement(outer))
        for g in set_orth_complement(apply_map(S_L, A)).columns():
            if not target.contains(L.matrix @ g, tol):
                return Verdict("orthogonal_complement_image", COUNTEREXAMPLE, seed, t + 1,
                               {"A": A.basis, "g": g, "Lg": L.matrix @ g})
    return Verdict("orthogonal_complement_image", PASS, seed, len(subs))


def check_r_regular(S: SubspaceMapSpec, space: SpaceSpec, r: int, samples: int = 50,
                    seed: int = DEFAULT_SEED) -> Verdict:
    """dim span S({a}) <= r for sampled single vectors a."""
    if r < 1:
        raise ValueError("r must be >= 1")
    rng = np.random.default_rng(seed)
    for t in range(samples):
        a = rng.standard_normal(space.dim)
        img = apply_map(S, orthonormalize([a], space))
        d = img.span().r
        if d > r:
            return Verdict(f"{r}-regular", COUNTEREXAMPLE, seed, t + 1, {"a": a, "dim S(a)": d})
    return Verdict(f"{r}-regular", PASS, seed, samples)
