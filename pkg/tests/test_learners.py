import math

import numpy as np
import pytest

from repkit import maps as M
from repkit.datasets import blobs3, sinusoid_gp, sparse_features
from repkit.hilbert import SpaceSpec
from repkit.kernels import KernelSpec
from repkit.learners import (
    Dataset,
    LearnerConfig,
    check_problem,
    fit_gp,
    fit_l1,
    fit_l1_dictionary,
    fit_ridge,
    fit_svm,
    gp_cov_descent,
    gp_predict,
    kernel_problem,
    l1_objective,
    l1_problem,
    predict,
    ridge_objective,
    verify_representer,
)
from repkit.operators import FeatureMap, evaluation_operator
from repkit.solvers import DescentConfig, gradient_descent
from repkit.verdict import COUNTEREXAMPLE, PASS


def _regression(m=6, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2, 2, (m, 2))
    return Dataset(X, np.column_stack([np.sin(X[:, 0]), X[:, 1] ** 2]))


def ridge_by_descent(data, cfg):
    """Gradient descent on the reduced ridge objective in whitened coordinates ``Z = V s^{-1/2} W``."""
    K = cfg.kernel.matrix(data.X, data.X)
    K = 0.5 * (K + K.T)
    s, V = np.linalg.eigh(K)
    R = V * np.sqrt(s)
    T = V / np.sqrt(s)
    shape = (s.size, data.n)
    f = lambda w: float(np.sum((data.Y - R @ w.reshape(shape)) ** 2) + cfg.lam * np.sum(w * w))
    g = lambda w: (-2 * R.T @ (data.Y - R @ w.reshape(shape)) + 2 * cfg.lam * w.reshape(shape)).ravel()
    w, _ = gradient_descent(f, g, np.zeros(s.size * data.n), DescentConfig(max_iters=100000, grad_tol=1e-12))
    return T @ w.reshape(shape)


# -- datasets ------------------------------------------------------------------------

def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((0, 2)), np.zeros((0, 1)))
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 2)), np.zeros((2, 1)))
    d = Dataset.from_labels(np.zeros((3, 1)), [0, 2, 1], 3)
    assert d.is_onehot
    np.testing.assert_array_equal(d.labels(), [0, 2, 1])


# -- ridge ---------------------------------------------------------------------------

def test_ridge_single_point():
    model = fit_ridge(Dataset([[0.3]], [[2.0]]), LearnerConfig(lam=1.0))
    np.testing.assert_allclose(model.Z, [[1.0]])
    x = np.array([1.1])
    np.testing.assert_allclose(predict(model, x), math.exp(-0.5 * 0.8**2) * 1.0)


def test_ridge_large_lambda_shrinks():
    data = _regression()
    model = fit_ridge(data, LearnerConfig(lam=1e8))
    assert np.linalg.norm(model.Z) <= 1e-6 * np.linalg.norm(data.Y)


def test_ridge_matches_descent():
    data = _regression(3)
    cfg = LearnerConfig(lam=0.5)
    Z = fit_ridge(data, cfg).Z
    np.testing.assert_allclose(ridge_by_descent(data, cfg), Z, rtol=1e-6, atol=1e-9)
    K = cfg.kernel.matrix(data.X, data.X)
    assert ridge_objective(Z, K, data.Y, cfg.lam) <= ridge_objective(Z + 1e-3, K, data.Y, cfg.lam)


def test_ridge_interpolates_and_decays():
    data = _regression()
    model = fit_ridge(data, LearnerConfig(lam=1e-10))
    np.testing.assert_allclose(predict(model, data.X), data.Y, atol=1e-6)
    np.testing.assert_allclose(predict(model, [50.0, 50.0]), 0.0, atol=1e-12)


def test_ridge_singular_without_lambda():
    data = Dataset([[1.0], [1.0]], [[0.0], [1.0]])
    with pytest.raises(np.linalg.LinAlgError):
        fit_ridge(data, LearnerConfig(lam=0.0))


def test_predict_dimension_mismatch():
    model = fit_ridge(_regression(), LearnerConfig())
    with pytest.raises(ValueError):
        predict(model, [1.0, 2.0, 3.0])


def test_negative_lambda_rejected():
    with pytest.raises(ValueError):
        LearnerConfig(lam=-1.0)
    with pytest.raises(ValueError):
        LearnerConfig(noise_cov=-np.eye(2))


# -- Gaussian process ------------------------------------------------------------------

def test_gp_deterministic_degeneration():
    data = _regression()
    cfg = LearnerConfig(lam=0.3)
    gp = fit_gp(data, cfg)
    np.testing.assert_allclose(gp.Zbar, fit_ridge(data, cfg).Z, rtol=0, atol=1e-9)
    np.testing.assert_array_equal(gp.C, 0.0)
    _, cov = gp_predict(gp, [0.1, 0.2])
    np.testing.assert_array_equal(cov, 0.0)


def test_gp_single_point():
    data = Dataset([[0.0]], [[3.0]], cov=[[[0.5]]])
    gp = fit_gp(data, LearnerConfig(lam=2.0))
    np.testing.assert_allclose(gp.Zbar, [[1.0]])
    x = np.array([0.7])
    _, cov = gp_predict(gp, x)
    np.testing.assert_allclose(cov, math.exp(-0.245) ** 2 * gp.C[0, 0] * np.eye(1), rtol=1e-12)


def test_gp_mean_system_residual():
    data = sinusoid_gp(10)
    cfg = LearnerConfig(lam=0.1, noise_cov=0.01 * np.eye(2))
    gp = fit_gp(data, cfg)
    K = cfg.kernel.matrix(data.X, data.X)
    assert np.max(np.abs((K + cfg.lam * np.eye(data.m)) @ gp.Zbar - data.Y)) <= 1e-8


def test_gp_covariance_matches_descent_oracle():
    data = sinusoid_gp(2, seed=3)
    cfg = LearnerConfig(lam=0.2, noise_cov=0.05 * np.eye(2))
    gp = fit_gp(data, cfg)
    np.testing.assert_allclose(gp_cov_descent(data, cfg), gp.C, atol=1e-5)


def test_gp_covariances_symmetric_psd():
    data = sinusoid_gp(8)
    gp = fit_gp(data, LearnerConfig(lam=0.1, noise_cov=0.01 * np.eye(2)))
    np.testing.assert_array_equal(gp.C, gp.C.T)
    assert np.linalg.eigvalsh(gp.C)[0] >= -1e-9
    for x in np.random.default_rng(0).uniform(-3, 3, 20):
        _, cov = gp_predict(gp, [x])
        np.testing.assert_array_equal(cov, cov.T)
        assert np.linalg.eigvalsh(cov)[0] >= -1e-9


def test_gp_needs_positive_lambda():
    with pytest.raises(ValueError):
        fit_gp(_regression(), LearnerConfig(lam=0.0))


# -- l1 --------------------------------------------------------------------------------

def test_l1_dead_features_exactly_zero():
    data = sparse_features(dead=(2, 5))
    fw = fit_l1(data, FeatureMap.identity(data.d), 0.1)
    assert fw.W[2] == 0.0 and fw.W[5] == 0.0
    assert set(fw.support) <= set(range(data.d)) - {2, 5}


def test_l1_zero_lambda_is_least_squares():
    data = sparse_features(m=30, dead=())
    fw = fit_l1(data, FeatureMap.identity(data.d), 0.0)
    ls, *_ = np.linalg.lstsq(data.X, data.Y[:, 0], rcond=None)
    np.testing.assert_allclose(fw.W, ls, atol=1e-6)


def test_l1_squared_optimality():
    data = sparse_features()
    A, y = data.X, data.Y[:, 0]
    rng = np.random.default_rng(0)
    for lam in (0.01, 1.0, 100.0):
        fw = fit_l1(data, FeatureMap.identity(data.d), lam)
        J = l1_objective(fw.W, A, y, lam)
        assert J <= l1_objective(np.zeros(data.d), A, y, lam) + 1e-12
        for _ in range(50):
            assert J <= l1_objective(fw.W + 0.05 * rng.standard_normal(data.d), A, y, lam)
        np.testing.assert_allclose(fw.tau, 2 * lam * np.sum(np.abs(fw.W)), rtol=1e-3)


def test_l1_norm_shrinks_with_lambda():
    data = sparse_features()
    norms = [np.sum(np.abs(fit_l1(data, FeatureMap.identity(data.d), lam).W)) for lam in (0.01, 1.0, 1e4)]
    assert norms[0] > norms[1] > norms[2]


def test_l1_dictionary_support():
    data = Dataset([[0.0], [3.0]], [[1.0], [-2.0]])
    fw = fit_l1_dictionary(data, 0.1)
    lo, _ = fw.window
    assert set(fw.support + lo) <= {0, 3}


def test_l1_dictionary_interpolates():
    data = Dataset([[-2.0], [0.0], [5.0]], [[1.0], [0.5], [-2.0]])
    fw = fit_l1_dictionary(data, 0.0)
    np.testing.assert_allclose(fw.predict(data.X), data.Y, atol=1e-12)


def test_l1_dictionary_window_invariance():
    data = Dataset([[-1.0], [2.0], [4.0]], [[1.0], [0.5], [-2.0]])
    a = fit_l1_dictionary(data, 0.05, window=8)
    b = fit_l1_dictionary(data, 0.05, window=16)
    off = a.window[0] - b.window[0]
    np.testing.assert_allclose(b.W[off:off + a.W.size], a.W, atol=1e-10)
    assert np.all(np.delete(b.W, np.arange(off, off + a.W.size)) == 0.0)


def test_l1_dictionary_errors():
    with pytest.raises(ValueError):
        fit_l1_dictionary(Dataset([[0.0], [100.0]], [[1.0], [1.0]]), 0.1, window=10)
    with pytest.raises(ValueError):
        fit_l1_dictionary(Dataset([[0.5]], [[1.0]]), 0.1)


# -- SVM -------------------------------------------------------------------------------

def test_svm_two_points():
    model = fit_svm(Dataset([[1.0], [-1.0]], [[1.0], [-1.0]]), LearnerConfig(kernel=KernelSpec("linear")))
    np.testing.assert_allclose(model.Z[:, 0], [0.5, -0.5], atol=1e-6)
    np.testing.assert_allclose(predict(model, [[0.3]]), [[0.3]], atol=1e-6)


def _blob_pm(per_class=10):
    b = blobs3(per_class)
    return Dataset(b.X, np.where(b.labels() == 0, 1.0, -1.0))


def test_svm_margin_and_symmetry():
    data = _blob_pm()
    cfg = LearnerConfig()
    model = fit_svm(data, cfg)
    margins = data.Y[:, 0] * predict(model, data.X)[:, 0]
    assert np.min(margins) >= 1 - 1e-3
    flipped = fit_svm(Dataset(data.X, -data.Y), cfg)
    np.testing.assert_allclose(flipped.Z, -model.Z, atol=1e-8)


def test_svm_errors():
    with pytest.raises(ValueError):
        fit_svm(Dataset([[1.0], [2.0]], [[1.0], [1.0]]), LearnerConfig())
    with pytest.raises(ValueError):
        fit_svm(Dataset([[1.0], [2.0]], [[1.0], [0.5]]), LearnerConfig())
    with pytest.raises(RuntimeError):
        fit_svm(Dataset([[0.0], [0.0]], [[1.0], [-1.0]]), LearnerConfig(kernel=KernelSpec("linear")))


# -- representer verification ------------------------------------------------------------

def test_representer_ridge_and_corrupted():
    data = sinusoid_gp(8)
    model = fit_ridge(data, LearnerConfig(lam=0.1))
    prob = kernel_problem("ridge", model, data)
    v = check_problem(prob)
    assert v.status == PASS and v.witness["containment_residual"] <= 1e-8
    g = np.zeros_like(prob.f_star)
    g[-1] = 1.0
    bad = check_problem(prob, f_star=prob.f_star + g)
    assert bad.status == COUNTEREXAMPLE and "f" in bad.witness


def test_representer_l1_proj_and_span_r():
    data = sparse_features()
    fw = fit_l1(data, FeatureMap.identity(data.d), 0.1)
    prob = l1_problem(fw, data)
    assert check_problem(prob).status == PASS
    # with S_R the containment generally fails; the verdict is only recorded
    assert check_problem(prob, S=M.span_r()).status in (PASS, COUNTEREXAMPLE)


def test_verify_representer_trivial_complement():
    H = SpaceSpec.rkhs_dictionary(np.array([[0.0], [1.0]]), KernelSpec())
    ops = [evaluation_operator(H, x) for x in ([0.0], [1.0])]
    v = verify_representer(lambda f: float(f @ f), np.array([0.2, -0.1]), M.span_r(), ops)
    assert v.status == PASS and v.trials == 0
