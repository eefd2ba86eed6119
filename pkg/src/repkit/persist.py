"""JSON model files (``format_version`` 1) and uniform prediction tables.

Floats are stored through ``json``'s shortest round-trip repr, so loading a
saved model reproduces its predictions bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .deepnet import DeepNetState, deep_predict
from .kernels import KernelSpec
from .learners import FeatureWeights, GaussianRepresenterModel, RepresenterModel, gp_predict, predict
from .operators import FeatureMap

__all__ = ["FORMAT_VERSION", "model_to_dict", "model_from_dict", "save_model", "load_model", "prediction_table",
           "ModelFormatError"]

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def _arr(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def _features_to_dict(phi: FeatureMap, window) -> dict:
    if window is not None:
        return {"type": "indicator", "lo": int(window[0]), "hi": int(window[1])}
    if phi.name == "identity":
        return {"type": "identity", "n": phi.n_features}
    raise ModelFormatError(f"feature map {phi.name!r} cannot be serialized")


def model_to_dict(model, seed: int | None = None) -> dict:
    base = {"format_version": FORMAT_VERSION, "seed": seed}
    if isinstance(model, RepresenterModel):
        return {**base, "learner": model.learner, "kernel": model.kernel.to_dict(), "lambda": model.lam,
                "X": _arr(model.X), "Z": _arr(model.Z),
                "assumptions": ["rescaled margin y_i f(x_i) >= 1"] if model.learner == "svm" else []}
    if isinstance(model, GaussianRepresenterModel):
        return {**base, "learner": "gp", "kernel": model.kernel.to_dict(), "lambda": model.lam,
                "X": _arr(model.X), "Zbar": _arr(model.Zbar), "C": _arr(model.C),
                "noise_cov": _arr(model.noise_cov), "independent_noise": model.independent_noise,
                "assumptions": ["observation noise independent across samples",
                                "coefficients affine in the observations"]}
    if isinstance(model, FeatureWeights):
        learner = "l1_dictionary" if model.window is not None else "l1"
        return {**base, "learner": learner, "lambda": model.lam, "tau": model.tau, "W": _arr(model.W),
                "k_outputs": model.phi.k_outputs, "features": _features_to_dict(model.phi, model.window),
                "assumptions": ["squared l1 penalty solved along the scaled-l1 path"]}
    if isinstance(model, DeepNetState):
        return {**base, "learner": "deep", "X": _arr(model.X),
                "kernels": [k.to_dict() for k in model.kernels], "activations": list(model.activations),
                "widths": list(model.widths), "hidden": [_arr(h) for h in model.hidden],
                "Z": [_arr(z) for z in model.Z], "lambdas": list(model.lams), "rho": model.rho,
                "rho_factor": model.rho_factor, "rounds": model.rounds, "sweeps": model.sweeps,
                "inner_iters": model.inner_iters, "history": list(model.history),
                "assumptions": ["logistic soft-max on the last layer output",
                                "ties in class labels go to the lowest index"]}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(d: dict):
    if d.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {d.get('format_version')!r}")
    kind = d.get("learner")
    try:
        if kind in ("ridge", "svm"):
            return RepresenterModel(KernelSpec.from_dict(d["kernel"]), np.array(d["X"]), np.array(d["Z"]),
                                    float(d["lambda"]), kind)
        if kind == "gp":
            return GaussianRepresenterModel(KernelSpec.from_dict(d["kernel"]), np.array(d["X"]),
                                            np.array(d["Zbar"]), np.array(d["C"]), float(d["lambda"]),
                                            np.array(d["noise_cov"]), bool(d["independent_noise"]))
        if kind in ("l1", "l1_dictionary"):
            f = d["features"]
            if f["type"] == "indicator":
                phi, window = FeatureMap.indicator(f["lo"], f["hi"]), (f["lo"], f["hi"])
            else:
                phi, window = FeatureMap.identity(f["n"]), None
            return FeatureWeights(np.array(d["W"]), phi, float(d["lambda"]), float(d["tau"]), window)
        if kind == "deep":
            return DeepNetState(np.array(d["X"]), tuple(KernelSpec.from_dict(k) for k in d["kernels"]),
                                tuple(d["activations"]), tuple(d["widths"]),
                                tuple(np.array(h) for h in d["hidden"]), tuple(np.array(z) for z in d["Z"]),
                                tuple(d["lambdas"]), d["rho"], d["rho_factor"], d["rounds"], d["sweeps"],
                                d["inner_iters"], tuple(d["history"]))
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed {kind} model: {exc}") from None
    raise ModelFormatError(f"unknown learner {kind!r}")


def save_model(model, path, seed: int | None = None) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model, seed), indent=1) + "\n")


def load_model(path):
    try:
        return model_from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"line {exc.lineno}: {exc.msg}") from None


def prediction_table(model, X: np.ndarray) -> tuple[list[str], np.ndarray]:
    """Header and rows (inputs followed by predictions) for any model type."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    xh = [f"x_{j}" for j in range(X.shape[1])]
    if isinstance(model, GaussianRepresenterModel):
        n = model.output_dim
        rows = []
        for x in X:
            mean, cov = gp_predict(model, x)
            rows.append(np.concatenate([x, mean, cov.ravel()]))
        header = xh + [f"y_{j}" for j in range(n)] + [f"cov_{a}_{b}" for a in range(n) for b in range(n)]
        return header, np.array(rows)
    if isinstance(model, RepresenterModel):
        P = predict(model, X)
    elif isinstance(model, FeatureWeights):
        P = model.predict(X)
    elif isinstance(model, DeepNetState):
        P = deep_predict(model, X)
    else:
        raise TypeError(f"cannot predict with {type(model).__name__}")
    return xh + [f"y_{j}" for j in range(P.shape[1])], np.hstack([X, P])
