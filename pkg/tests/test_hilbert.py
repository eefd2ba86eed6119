import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from repkit.hilbert import (
    SpaceSpec,
    cholesky_jitter,
    orth_complement,
    orthonormalize,
    project,
    random_subspace,
    subspace_contains,
    subspace_sum,
)


def _gram_space(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    return SpaceSpec.from_gram(A @ A.T + n * np.eye(n))


def test_orthonormalize_collinear():
    B = orthonormalize([[1, 0], [2, 0]], SpaceSpec.euclidean(2))
    assert B.r == 1
    np.testing.assert_allclose(B.basis[:, 0], [1, 0])


def test_orthonormalize_empty_is_zero_subspace():
    B = orthonormalize([], SpaceSpec.euclidean(3))
    assert B.r == 0 and B.basis.shape == (3, 0)


def test_orthonormalize_full_plane():
    B = orthonormalize([[1, 1], [1, -1]], SpaceSpec.euclidean(2))
    assert B.r == 2
    np.testing.assert_allclose(B.projector(), np.eye(2), atol=1e-12)


def test_orthonormalize_dimension_mismatch():
    with pytest.raises(ValueError):
        orthonormalize([[1, 2, 3]], SpaceSpec.euclidean(2))


def test_orth_complement_axes():
    C = orth_complement(orthonormalize([[1, 0]], SpaceSpec.euclidean(2)))
    np.testing.assert_allclose(np.abs(C.basis[:, 0]), [0, 1], atol=1e-12)


def test_orth_complement_of_zero_is_full():
    E = SpaceSpec.euclidean(3)
    assert orth_complement(orthonormalize([], E)).r == 3


def test_orth_complement_weighted_gram():
    space = SpaceSpec.from_gram(np.diag([2.0, 1.0]))
    C = orth_complement(orthonormalize([np.array([1.0, 1.0]) / np.sqrt(2)], space))
    c = C.basis[:, 0]
    assert abs(space.inner([1, 1], c)) < 1e-12
    # 2 c1 + c2 = 0
    assert abs(2 * c[0] + c[1]) < 1e-12


def test_project_examples():
    E2, E3 = SpaceSpec.euclidean(2), SpaceSpec.euclidean(3)
    np.testing.assert_allclose(project([3, 4], orthonormalize([[1, 0]], E2)), [3, 0])
    v = np.array([0.3, -1.2])
    np.testing.assert_allclose(project(v, orthonormalize(np.eye(2), E2)), v, atol=1e-14)
    np.testing.assert_allclose(project([1, 2, 3], orthonormalize([[1, 1, 1]], E3)), [2, 2, 2], atol=1e-12)


def test_project_dimension_mismatch():
    with pytest.raises(ValueError):
        project([1, 2, 3], orthonormalize([[1, 0]], SpaceSpec.euclidean(2)))


def test_subspace_sum_and_contains():
    E3 = SpaceSpec.euclidean(3)
    e1, e2 = orthonormalize([[1, 0, 0]], E3), orthonormalize([[0, 1, 0]], E3)
    S = subspace_sum(e1, e2)
    assert S.r == 2
    assert subspace_contains(S, orthonormalize([[1, 1, 0]], E3))
    np.testing.assert_allclose(subspace_sum(S, S).projector(), S.projector(), atol=1e-12)
    E2 = SpaceSpec.euclidean(2)
    assert subspace_contains(orthonormalize(np.eye(2), E2), orthonormalize([np.array([1, 1]) / np.sqrt(2)], E2))


def test_subspace_sum_space_mismatch():
    with pytest.raises(ValueError):
        subspace_sum(orthonormalize([[1, 0]], SpaceSpec.euclidean(2)),
                     orthonormalize([[1, 0]], SpaceSpec.from_gram(np.diag([2.0, 1.0]))))


def test_frobenius_space_realizes_trace_inner_product():
    rng = np.random.default_rng(0)
    W1, W2 = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
    F = SpaceSpec.frobenius(3, 2)
    assert F.dim == 6
    np.testing.assert_allclose(F.inner(W1.ravel(), W2.ravel()), np.trace(W1.T @ W2))


def test_gram_must_be_positive_definite():
    with pytest.raises(ValueError):
        SpaceSpec.from_gram(np.array([[1.0, 0.0], [0.0, -1.0]]))
    with pytest.raises(ValueError):
        SpaceSpec.from_gram(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_jitter_rescues_duplicate_rows():
    A = np.ones((2, 2))
    L, Aj = cholesky_jitter(A)
    np.testing.assert_allclose(L @ L.T, Aj)
    assert Aj[0, 0] > 1.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 6))
def test_subspace_invariants(seed, n):
    space = _gram_space(seed, n)
    rng = np.random.default_rng(seed)
    A = random_subspace(space, rng)
    np.testing.assert_allclose(A.basis.T @ space.gram @ A.basis, np.eye(A.r), atol=1e-10)
    P = A.projector()
    np.testing.assert_allclose(P @ P, P, atol=1e-9)
    C = orth_complement(A)
    assert A.r + C.r == n
    assert np.max(np.abs(A.basis.T @ space.gram @ C.basis), initial=0.0) <= 1e-10
    v = rng.standard_normal(n)
    p = project(v, A)
    np.testing.assert_allclose(project(p, A), p, atol=1e-10)
    assert np.max(np.abs(A.basis.T @ space.gram @ (v - p)), initial=0.0) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_contains_is_partial_order(seed):
    space = _gram_space(seed, 4)
    rng = np.random.default_rng(seed)
    A = random_subspace(space, rng, 1)
    B = subspace_sum(A, random_subspace(space, rng, 1))
    C = subspace_sum(B, random_subspace(space, rng, 1))
    assert subspace_contains(A, A)
    assert subspace_contains(B, A) and subspace_contains(C, B) and subspace_contains(C, A)
    B2 = orthonormalize(list(B.basis.T[::-1]), space)
    assert subspace_contains(B, B2) and subspace_contains(B2, B)
    np.testing.assert_allclose(B.projector(), B2.projector(), atol=1e-9)
