"""Property suites behind ``repkit check``.

Each entry pairs a :class:`Verdict` with the status it is expected to have.
The report is a plain dict with ``format_version`` 1; :func:`report_json`
serializes it deterministically.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import maps as M
from .datasets import blobs3, sinusoid_gp, sparse_features
from .deepnet import DeepNetState, fit_deep_net
from .hilbert import SpaceSpec, orthonormalize
from .kernels import KernelSpec
from .learners import (
    Dataset,
    LearnerConfig,
    check_problem,
    deep_last_layer_problem,
    fit_gp,
    fit_l1,
    fit_ridge,
    fit_svm,
    kernel_problem,
    l1_problem,
)
from .operators import (
    FeatureMap,
    LegendreBasis,
    OperatorRep,
    adjoint,
    adjoint_by_parts,
    derivative_operator,
    evaluation_operator,
    explicit_basis_operator,
    necessity_probe,
)
from .orthomonotone import (
    MONOTONE_WRAPPERS,
    check_orthomonotone,
    compose_check,
    l1,
    l1_squared,
    norm_power,
    orthomonotone_witness,
    wrap,
)
from .verdict import COUNTEREXAMPLE, NOT_APPLICABLE, PASS, Verdict, jsonable

__all__ = ["SUITES", "run_suites", "report_json", "report_ok", "adjoint_gap", "legendre_setup",
           "ADJOINT_TOL", "map_table"]

FORMAT_VERSION = 1
ADJOINT_TOL = 1e-8
PROPERTIES = ("inclusive", "closed", "super_additive")


def _entry(ident: str, verdict: Verdict, expected: str | None) -> dict:
    """``expected`` None marks an informational entry that never fails the run."""
    return {"id": ident, "expected": expected, "ok": expected is None or verdict.status == expected,
            "verdict": verdict.to_dict()}


def _status(flag: bool) -> str:
    return PASS if flag else COUNTEREXAMPLE


def _random_ops(rng, dom: SpaceSpec, count: int, out_dim: int) -> list[OperatorRep]:
    cod = SpaceSpec.euclidean(out_dim)
    return [OperatorRep(dom, cod, rng.standard_normal((out_dim, dom.dim))) for _ in range(count)]


def legendre_setup(max_degree: int = 8, n_inputs: int = 1, m_outputs: int = 2):
    """Mean-free Legendre domain, derivative D and the per-output grouped projection on its codomain."""
    basis = LegendreBasis(max_degree, n_inputs, m_outputs, mean_free=True)
    D = derivative_operator(basis)
    per = D.codomain.dim // m_outputs
    S_y = M.proj(groups=[range(j * per, (j + 1) * per) for j in range(m_outputs)])
    return basis, D, S_y


# -- maps ---------------------------------------------------------------------------------

def map_table(seed: int) -> list[dict]:
    """Catalog maps x {inclusive, closed, super additive} against the stated attributes."""
    out = []
    for row, S, space in M.example_catalog(seed=seed):
        verdicts = {
            "inclusive": M.check_inclusive(S, space, seed=seed),
            "closed": M.check_closed(S, space),
            "super_additive": M.check_super_additive(S, space, seed=seed),
        }
        for prop in PROPERTIES:
            out.append(_entry(f"example{row}:{prop}", verdicts[prop], _status(S.declared[prop])))
    return out


def suite_maps(seed: int) -> list[dict]:
    out = map_table(seed)
    rng = np.random.default_rng(seed)

    # closed + super additive <=> images are vector spaces
    for row, S, space in M.example_catalog(seed=seed):
        closed = M.check_closed(S, space).passed
        sa = M.check_super_additive(S, space, seed=seed).passed
        vs = M.check_vector_space_image(S, space, trials=50, seed=seed)
        agree = vs.passed == (closed and sa)
        v = Verdict("vector_space_iff_closed_super_additive", _status(agree), seed, vs.trials,
                    {"closed": closed, "super_additive": sa, "vector_space_image": vs.to_dict()})
        out.append(_entry(f"lemma:vector_space_image:{row}", v, PASS))
        if row in ("4:S_pi/2", "6:S_null"):
            out.append(_entry(f"lemma:vector_space_counterexample:{row}", vs, COUNTEREXAMPLE))

    # inclusive <=> null-space preserving, for closed super additive maps
    plane, space3 = SpaceSpec.euclidean(2), SpaceSpec.euclidean(3)
    cases = [("1:S_R", M.span_r(), space3), ("2:S_theta", M.rotate(math.pi / 6), plane),
             ("5:S_L", M.example_catalog(seed=seed)[5][1], space3), ("7:S_proj", M.proj(), space3)]
    for row, S, space in cases:
        inc = M.check_inclusive(S, space, seed=seed).passed
        nsp = [M.check_null_space_preserving(S, _random_ops(rng, space, int(rng.integers(1, 3)), 1))
               for _ in range(10)]
        all_nsp = all(v.passed for v in nsp)
        first_bad = next((v.to_dict() for v in nsp if not v.passed), None)
        v = Verdict("inclusive_iff_null_space_preserving", _status(inc == all_nsp), seed, 10,
                    {"inclusive": inc, "null_space_preserving_all": all_nsp, "failing_set": first_bad})
        out.append(_entry(f"lemma:inclusive_iff_nsp:{row}", v, PASS))

    # pullback maps are closed and super additive; the complement containment always holds
    for label, S in (("S_R", M.span_r()), ("S_proj", M.proj())):
        L = _random_ops(rng, space3, 1, 4)[0]
        SL = M.pullback(S, L)
        out.append(_entry(f"proposition:pullback_closed:{label}", M.check_closed(SL), PASS))
        out.append(_entry(f"proposition:pullback_super_additive:{label}",
                          M.check_super_additive(SL, space3, seed=seed), PASS))
        out.append(_entry(f"lemma:complement_image:{label}",
                          M.check_orthogonal_image(L, SL, seed=seed, tol=1e-9), PASS))

    # derivative operator on truncated Legendre spaces
    for deg, n_in in ((8, 1), (4, 2)):
        _, D, S_y = legendre_setup(deg, n_in, 2)
        tag = f"degree{deg}_inputs{n_in}"
        out.append(_entry(f"lemma:derivative_preserves_orthogonality:{tag}",
                          M.check_orthogonality_preservation(D, M.pullback(S_y, D), trials=20, seed=seed,
                                                             tol=1e-9), PASS))
        out.append(_entry(f"lemma:derivative_pullback_inclusive:{tag}",
                          M.check_inclusive(M.pullback(S_y, D), D.domain, trials=20, seed=seed), PASS))
    _, D, _ = legendre_setup(8, 1, 2)
    out.append(_entry("lemma:derivative_vs_span_r", M.check_orthogonality_preservation(
        D, M.pullback(M.span_r(), D), trials=20, seed=seed), COUNTEREXAMPLE))
    return out


# -- orthomonotone --------------------------------------------------------------------------

def suite_orthomonotone(seed: int) -> list[dict]:
    E3 = SpaceSpec.euclidean(3)
    out = [
        _entry("orthomonotone:l1:S_proj", check_orthomonotone(l1(), M.proj(), E3, trials=1000, seed=seed), PASS),
        _entry("orthomonotone:l1:S_R", check_orthomonotone(l1(), M.span_r(), E3, seed=seed), COUNTEREXAMPLE),
        _entry("orthomonotone:l1:S_R:fixed_witness",
               orthomonotone_witness(l1(), M.span_r(), orthonormalize([[1.0, 1.0, 1.0]], E3),
                                     [1.0, 1.0, 1.0], [-1.0, -1.0, 2.0]), COUNTEREXAMPLE),
        _entry("orthomonotone:l1_squared:S_proj",
               check_orthomonotone(l1_squared(), M.proj(), E3, seed=seed), PASS),
    ]
    for p in (1.0, 2.0, 3.0):
        out.append(_entry(f"orthomonotone:norm_power{p:g}:S_R",
                          check_orthomonotone(norm_power(p), M.span_r(), E3, seed=seed), PASS))
    for h in MONOTONE_WRAPPERS:
        out.append(_entry(f"orthomonotone:{h}(l1):S_proj",
                          check_orthomonotone(wrap(l1(), h), M.proj(), E3, seed=seed), PASS))
        out.append(_entry(f"orthomonotone:{h}(norm_power2):S_R",
                          check_orthomonotone(wrap(norm_power(2), h), M.span_r(), E3, seed=seed), PASS))
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((3, 3)))
    U = OperatorRep(E3, E3, Q)
    out.append(_entry("composed:norm_power2:unitary:S_R", compose_check(norm_power(2), M.span_r(), U,
                                                                       seed=seed), PASS))
    _, D, S_y = legendre_setup(8, 1, 2)
    out.append(_entry("composed:norm_power2:derivative:S_proj_grouped",
                      compose_check(norm_power(2), S_y, D, seed=seed), PASS))
    out.append(_entry("composed:l1:derivative:S_R", compose_check(l1(), M.span_r(), D, seed=seed),
                      NOT_APPLICABLE))
    return out


# -- adjoints ----------------------------------------------------------------------------------

def adjoint_gap(L: OperatorRep, L_star_matrix: np.ndarray, rng, pairs: int = 100, f_basis=None) -> float:
    """Max ``|<z, L f> - <f, L* z>|`` over random pairs; ``f`` drawn from ``f_basis`` columns if given."""
    worst = 0.0
    for _ in range(pairs):
        f = rng.standard_normal(L.domain.dim) if f_basis is None else f_basis @ rng.standard_normal(f_basis.shape[1])
        z = rng.standard_normal(L.codomain.dim)
        lhs = L.codomain.inner(z, L.matrix @ f)
        rhs = L.domain.inner(f, L_star_matrix @ z)
        worst = max(worst, abs(lhs - rhs))
    return worst


def _gap_verdict(name: str, gap: float, seed: int, pairs: int = 100) -> Verdict:
    return Verdict(f"adjoint:{name}", _status(gap <= ADJOINT_TOL), seed, pairs, {"max_gap": gap})


def suite_adjoints(seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    pts = rng.uniform(-2, 2, (6, 2))
    H = SpaceSpec.rkhs_dictionary(pts, KernelSpec(lengthscale=1.0, output_dim=2))
    x = rng.uniform(-2, 2, 2)
    L = evaluation_operator(H, x)
    # closed form: L* z is the kernel section K(., x) z, with dictionary coordinates G^{-1} k_x z
    kx = np.kron(KernelSpec(lengthscale=1.0).matrix(pts, x[None, :]), np.eye(2))
    out.append(_entry("adjoint:evaluation", _gap_verdict("evaluation", adjoint_gap(L, H.solve_gram(kx), rng),
                                                         seed), PASS))

    phi = FeatureMap(5, 3, lambda v: np.outer(np.cos(np.arange(1, 6) * v[0]), np.sin(np.arange(1, 4) + v[1])),
                     "trig")
    xe = rng.standard_normal(2)
    Le = explicit_basis_operator(phi, xe)
    out.append(_entry("adjoint:explicit_basis", _gap_verdict("explicit_basis", adjoint_gap(Le, phi(xe), rng),
                                                             seed), PASS))
    phi1 = FeatureMap(5, 1, lambda v: np.cos(np.arange(1, 6) * v[0])[:, None], "cos")
    Lm = explicit_basis_operator(phi1, xe, out_dim=3)
    # closed form: L* z = phi(x) z^T, flattened row-major
    star = np.column_stack([np.outer(phi1(xe)[:, 0], e).ravel() for e in np.eye(3)])
    out.append(_entry("adjoint:explicit_basis_matrix",
                      _gap_verdict("explicit_basis_matrix", adjoint_gap(Lm, star, rng), seed), PASS))

    basis = LegendreBasis(6, 2, 2)
    D = derivative_operator(basis)
    by_parts = adjoint_by_parts(basis).matrix
    gap = adjoint_gap(D, by_parts, rng, f_basis=basis.boundary_vanishing())
    out.append(_entry("adjoint:derivative_boundary_vanishing",
                      _gap_verdict("derivative_boundary_vanishing", gap, seed), PASS))

    G = rng.standard_normal((4, 4))
    dom = SpaceSpec.from_gram(G @ G.T + 4 * np.eye(4))
    f0 = rng.standard_normal(4)
    z0 = rng.standard_normal(3)
    P = necessity_probe(z0, f0, dom)
    # closed form: P* z = <z*, z> f / |f|^2
    pstar = np.outer(f0, z0) / dom.inner(f0, f0)
    out.append(_entry("adjoint:probe", _gap_verdict("probe", adjoint_gap(P, pstar, rng), seed), PASS))

    worst = 0.0
    for _ in range(10):
        A = rng.standard_normal((5, 5))
        B = rng.standard_normal((3, 3))
        d1 = SpaceSpec.from_gram(A @ A.T + np.eye(5))
        d2 = SpaceSpec.from_gram(B @ B.T + np.eye(3))
        R = OperatorRep(d1, d2, rng.standard_normal((3, 5)))
        worst = max(worst, adjoint_gap(R, adjoint(R).matrix, rng, pairs=10))
    out.append(_entry("adjoint:random", _gap_verdict("random", worst, seed), PASS))
    return out


# -- representer ---------------------------------------------------------------------------------

def suite_representer(seed: int) -> list[dict]:
    out = []
    gp_data = sinusoid_gp(8, seed)
    noise = 0.01 * np.eye(2)
    cfg = LearnerConfig(lam=0.1, kernel=KernelSpec(lengthscale=1.0), noise_cov=noise)
    ridge = fit_ridge(gp_data, cfg)
    prob = kernel_problem("ridge", ridge, gp_data, seed=seed)
    out.append(_entry("representer:ridge", check_problem(prob, seed=seed), PASS))
    g = np.zeros_like(prob.f_star)
    g[-1] = 1.0
    out.append(_entry("representer:ridge:corrupted", check_problem(prob, seed=seed, f_star=prob.f_star + g),
                      COUNTEREXAMPLE))
    gp = fit_gp(gp_data, cfg)
    out.append(_entry("representer:gp", check_problem(kernel_problem("gp", gp, gp_data, seed=seed,
                                                                     noise_cov=noise), seed=seed), PASS))

    blobs = blobs3(10, seed)
    pm = Dataset(blobs.X, np.where(blobs.labels() == 0, 1.0, -1.0))
    svm = fit_svm(pm, cfg)
    out.append(_entry("representer:svm", check_problem(kernel_problem("svm", svm, pm, seed=seed), seed=seed),
                      PASS))

    sp = sparse_features(seed=seed)
    fw = fit_l1(sp, FeatureMap.identity(sp.d), 0.1)
    lp = l1_problem(fw, sp)
    out.append(_entry("representer:l1:S_proj", check_problem(lp, seed=seed), PASS))
    out.append(_entry("representer:l1:S_R", check_problem(lp, seed=seed, S=M.span_r()), None))

    small = blobs3(6, seed)
    state = fit_deep_net(small.X, small.Y, DeepNetState.initial(small.X, "3:tanh,3:identity", rounds=3,
                                                                seed=seed))
    out.append(_entry("representer:deep_net_output_layer",
                      check_problem(deep_last_layer_problem(state, small, seed=seed), seed=seed), PASS))
    return out


SUITES = {
    "maps": suite_maps,
    "orthomonotone": suite_orthomonotone,
    "adjoints": suite_adjoints,
    "representer": suite_representer,
}


def run_suites(suite: str, seed: int) -> dict:
    names = list(SUITES) if suite == "all" else [suite]
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}")
    results = {n: SUITES[n](seed) for n in names}
    failed = [e["id"] for n in names for e in results[n] if not e["ok"]]
    return {"format_version": FORMAT_VERSION, "seed": seed, "suites": results,
            "summary": {"entries": sum(len(v) for v in results.values()), "failed": failed,
                        "ok": not failed}}


def report_ok(report: dict) -> bool:
    return bool(report["summary"]["ok"])


def report_json(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n"
