"""Gaussian-process Bayesian optimization with expected improvement.

A deliberately small GP: squared-exponential kernel with per-dimension
lengthscales, constant prior mean set to the sample mean, fixed
hyperparameters (no marginal-likelihood fitting), Cholesky solves with
jitter escalation. The acquisition is maximized over a random candidate
pool, which is plenty for the low-dimensional noisy objectives this
project tunes. Minimization convention throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _norm_pdf(z):
    return np.exp(-0.5 * z * z) / _SQRT2PI


def _norm_cdf(z):
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


@dataclass
class GpHyperparams:
    lengthscales: np.ndarray  # per dimension
    signal_var: float = 1.0
    noise_var: float = 1e-4

    @staticmethod
    def for_bounds(bounds, lengthscale_frac: float = 0.2, signal_var: float = 1.0,
                   noise_var: float = 1e-4) -> "GpHyperparams":
        widths = np.array([hi - lo for lo, hi in bounds], dtype=np.float64)
        return GpHyperparams(
            lengthscales=np.maximum(widths * lengthscale_frac, 1e-12),
            signal_var=signal_var,
            noise_var=noise_var,
        )


@dataclass
class GpModel:
    x_train: np.ndarray  # (n, d)
    y_train: np.ndarray  # (n,)
    hyper: GpHyperparams
    prior_mean: float
    chol: np.ndarray  # lower Cholesky factor of K + noise*I (+ jitter)
    alpha: np.ndarray  # solve(K + noise*I, y - prior_mean)
    jitter: float


def _kernel_matrix(xa, xb, hyper: GpHyperparams):
    scaled_a = xa / hyper.lengthscales
    scaled_b = xb / hyper.lengthscales
    sq = (
        np.sum(scaled_a**2, axis=1)[:, None]
        + np.sum(scaled_b**2, axis=1)[None, :]
        - 2.0 * scaled_a @ scaled_b.T
    )
    np.maximum(sq, 0.0, out=sq)
    return hyper.signal_var * np.exp(-0.5 * sq)


def gp_fit(x_train, y_train, hyper: GpHyperparams) -> GpModel:
    """Fit the GP posterior factorization; escalates jitter if the gram
    matrix is numerically indefinite (e.g. duplicate rows with tiny noise)."""
    x_train = np.atleast_2d(np.asarray(x_train, dtype=np.float64))
    y_train = np.asarray(y_train, dtype=np.float64).ravel()
    if x_train.shape[0] != y_train.size or y_train.size < 1:
        raise ValueError("need matching, nonempty training inputs and values")
    if not (np.all(np.isfinite(x_train)) and np.all(np.isfinite(y_train))):
        raise ValueError("training data must be finite")
    prior_mean = float(np.mean(y_train))
    gram = _kernel_matrix(x_train, x_train, hyper)
    n = gram.shape[0]
    jitter = 0.0
    for attempt in range(8):
        try:
            chol = np.linalg.cholesky(
                gram + (hyper.noise_var + jitter) * np.eye(n)
            )
            break
        except np.linalg.LinAlgError:
            jitter = 1e-12 * (10.0**attempt) * max(1.0, hyper.signal_var)
    else:
        raise ValueError("gram matrix not positive-definite even with max jitter")
    residual = y_train - prior_mean
    alpha = np.linalg.solve(chol.T, np.linalg.solve(chol, residual))
    return GpModel(
        x_train=x_train,
        y_train=y_train,
        hyper=hyper,
        prior_mean=prior_mean,
        chol=chol,
        alpha=alpha,
        jitter=jitter,
    )


def gp_posterior(model: GpModel, x):
    """Posterior (mean, variance) at one point or a batch of points."""
    single = np.ndim(x) == 1
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    k_star = _kernel_matrix(model.x_train, x, model.hyper)  # (n, m)
    mean = model.prior_mean + k_star.T @ model.alpha
    v = np.linalg.solve(model.chol, k_star)
    var = model.hyper.signal_var - np.sum(v * v, axis=0)
    np.maximum(var, 0.0, out=var)
    if single:
        return float(mean[0]), float(var[0])
    return mean, var


def expected_improvement(model: GpModel, x, best_y: float, xi: float = 0.0):
    """EI for minimization: E[max(best_y - xi - f(x), 0)] under the posterior.

    With zero posterior variance this degenerates to max(best_y - xi - mean, 0).
    """
    single = np.ndim(x) == 1
    mean, var = gp_posterior(model, np.atleast_2d(np.asarray(x, dtype=np.float64)))
    sd = np.sqrt(var)
    improve = best_y - xi - mean
    ei = np.where(improve > 0.0, improve, 0.0)
    positive = sd > 0.0
    if np.any(positive):
        z = improve[positive] / sd[positive]
        ei = ei.astype(np.float64)
        ei[positive] = improve[positive] * np.vectorize(_norm_cdf)(z) + sd[positive] * _norm_pdf(z)
    if single:
        return float(ei[0])
    return ei


def latin_hypercube(bounds, n: int, rng: np.random.Generator) -> np.ndarray:
    """n stratified samples in the box: one point per row-stratum per dim."""
    d = len(bounds)
    samples = np.empty((n, d))
    for j, (lo, hi) in enumerate(bounds):
        edges = np.arange(n) + rng.uniform(0.0, 1.0, size=n)
        samples[:, j] = lo + (hi - lo) * rng.permutation(edges) / n
    return samples


def bayesopt_run(
    objective,
    bounds,
    init_points: int = 5,
    iterations: int = 30,
    candidate_pool: int = 2048,
    seed: int = 0,
    hyper: GpHyperparams | None = None,
    xi: float = 0.0,
):
    """Latin-hypercube init, then fit -> argmax-EI -> evaluate loops.

    Returns (best_x, best_y, history) where history holds one record per
    evaluation including the running best. Deterministic per seed.
    """
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    if any(not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo for lo, hi in bounds):
        raise ValueError("bounds must be finite nonempty intervals")
    if init_points < 1:
        raise ValueError("need at least one init point")
    if hyper is None:
        hyper = GpHyperparams.for_bounds(bounds)
    rng = np.random.default_rng(seed)

    xs = [x for x in latin_hypercube(bounds, init_points, rng)]
    ys = [_evaluate(objective, x, i) for i, x in enumerate(xs)]
    history = []
    for i, (x, y) in enumerate(zip(xs, ys)):
        best = min(ys[: i + 1])
        history.append({"iter": i, "x": [float(v) for v in x], "y": float(y), "best_y": float(best)})

    lows = np.array([lo for lo, _ in bounds])
    highs = np.array([hi for _, hi in bounds])
    for it in range(iterations):
        model = gp_fit(np.array(xs), np.array(ys), hyper)
        best_y = float(np.min(ys))
        pool = rng.uniform(lows, highs, size=(candidate_pool, len(bounds)))
        ei = expected_improvement(model, pool, best_y, xi)
        x_next = pool[int(np.argmax(ei))]
        y_next = _evaluate(objective, x_next, init_points + it)
        xs.append(x_next)
        ys.append(y_next)
        history.append(
            {
                "iter": init_points + it,
                "x": [float(v) for v in x_next],
                "y": float(y_next),
                "best_y": float(min(ys)),
            }
        )
    best_idx = int(np.argmin(ys))
    return np.array(xs[best_idx]), float(ys[best_idx]), history


def _evaluate(objective, x, index):
    try:
        return float(objective(np.asarray(x, dtype=np.float64)))
    except Exception as exc:
        raise RuntimeError(f"objective failed at evaluation {index}: {exc}") from exc
