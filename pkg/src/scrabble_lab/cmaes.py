"""Covariance Matrix Adaptation Evolution Strategy (minimization).

Plain CMA-ES with cumulative step-size adaptation and rank-one plus
rank-mu covariance updates, using the standard log-decreasing
recombination weights and strategy constants. The defaults follow the
community-standard parameterization; population sizes are configurable
(this project runs 25/13 for weight evolution).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CmaesState:
    dim: int
    mean: np.ndarray
    sigma: float
    cov: np.ndarray
    path_sigma: np.ndarray
    path_cov: np.ndarray
    generation: int
    lam: int
    mu: int
    weights: np.ndarray
    mu_eff: float
    c_sigma: float
    d_sigma: float
    c_cov: float
    c_one: float
    c_mu: float
    chi_n: float

    def eigen(self):
        """Eigendecomposition of the covariance, with positive-definite
        repair: if the smallest eigenvalue dips to zero or below, shift the
        spectrum up by a hair so sampling stays well-defined."""
        cov = 0.5 * (self.cov + self.cov.T)
        try:
            eigvals, eigvecs = np.linalg.eigh(cov)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(
                f"covariance eigendecomposition failed at generation {self.generation}"
            ) from exc
        if eigvals[0] <= 0.0:
            shift = abs(eigvals[0]) + 1e-12
            eigvals = eigvals + shift
            self.cov = cov + shift * np.eye(self.dim)
        return eigvals, eigvecs


def cmaes_init(x0, sigma0: float, lam: int = 25, mu: int = 13) -> CmaesState:
    """Fresh optimizer state centered at x0 with identity covariance."""
    x0 = np.asarray(x0, dtype=np.float64)
    dim = x0.size
    if sigma0 <= 0:
        raise ValueError("sigma0 must be positive")
    if not 1 <= mu <= lam:
        raise ValueError("need 1 <= mu <= lambda")
    raw = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_eff = 1.0 / np.sum(weights**2)
    c_sigma = (mu_eff + 2.0) / (dim + mu_eff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, np.sqrt((mu_eff - 1.0) / (dim + 1.0)) - 1.0) + c_sigma
    c_cov = (4.0 + mu_eff / dim) / (dim + 4.0 + 2.0 * mu_eff / dim)
    c_one = 2.0 / ((dim + 1.3) ** 2 + mu_eff)
    c_mu = min(
        1.0 - c_one,
        2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((dim + 2.0) ** 2 + mu_eff),
    )
    chi_n = np.sqrt(dim) * (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim**2))
    return CmaesState(
        dim=dim,
        mean=x0.copy(),
        sigma=float(sigma0),
        cov=np.eye(dim),
        path_sigma=np.zeros(dim),
        path_cov=np.zeros(dim),
        generation=0,
        lam=lam,
        mu=mu,
        weights=weights,
        mu_eff=float(mu_eff),
        c_sigma=float(c_sigma),
        d_sigma=float(d_sigma),
        c_cov=float(c_cov),
        c_one=float(c_one),
        c_mu=float(c_mu),
        chi_n=float(chi_n),
    )


def cmaes_sample(state: CmaesState, rng: np.random.Generator) -> np.ndarray:
    """Draw lambda candidates: m + sigma * B D z with z standard normal."""
    eigvals, eigvecs = state.eigen()
    scale = eigvecs * np.sqrt(eigvals)  # B @ diag(D)
    z = rng.standard_normal((state.lam, state.dim))
    return state.mean + state.sigma * (z @ scale.T)


def cmaes_update(state: CmaesState, candidates, fitnesses) -> CmaesState:
    """One generation step from evaluated candidates (minimization)."""
    candidates = np.asarray(candidates, dtype=np.float64)
    fitnesses = np.asarray(fitnesses, dtype=np.float64)
    if candidates.shape != (state.lam, state.dim):
        raise ValueError(f"expected {(state.lam, state.dim)} candidates")
    if not np.all(np.isfinite(fitnesses)):
        raise ValueError("non-finite fitness values")

    order = np.argsort(fitnesses, kind="stable")
    elite = candidates[order[: state.mu]]
    old_mean = state.mean
    new_mean = state.weights @ elite
    y_w = (new_mean - old_mean) / state.sigma

    eigvals, eigvecs = state.eigen()
    inv_sqrt = eigvecs @ np.diag(1.0 / np.sqrt(eigvals)) @ eigvecs.T

    c_s = state.c_sigma
    path_sigma = (1.0 - c_s) * state.path_sigma + np.sqrt(
        c_s * (2.0 - c_s) * state.mu_eff
    ) * (inv_sqrt @ y_w)

    gen = state.generation + 1
    expected_norm = np.sqrt(1.0 - (1.0 - c_s) ** (2.0 * gen))
    h_sigma = float(
        np.linalg.norm(path_sigma) / expected_norm
        < (1.4 + 2.0 / (state.dim + 1.0)) * state.chi_n
    )

    c_c = state.c_cov
    path_cov = (1.0 - c_c) * state.path_cov + h_sigma * np.sqrt(
        c_c * (2.0 - c_c) * state.mu_eff
    ) * y_w

    ys = (elite - old_mean) / state.sigma
    rank_mu = (state.weights[:, None] * ys).T @ ys
    cov = (
        (1.0 - state.c_one - state.c_mu) * state.cov
        + state.c_one
        * (np.outer(path_cov, path_cov) + (1.0 - h_sigma) * c_c * (2.0 - c_c) * state.cov)
        + state.c_mu * rank_mu
    )
    cov = 0.5 * (cov + cov.T)

    sigma = state.sigma * np.exp(
        (c_s / state.d_sigma) * (np.linalg.norm(path_sigma) / state.chi_n - 1.0)
    )

    return CmaesState(
        dim=state.dim,
        mean=new_mean,
        sigma=float(sigma),
        cov=cov,
        path_sigma=path_sigma,
        path_cov=path_cov,
        generation=gen,
        lam=state.lam,
        mu=state.mu,
        weights=state.weights,
        mu_eff=state.mu_eff,
        c_sigma=state.c_sigma,
        d_sigma=state.d_sigma,
        c_cov=state.c_cov,
        c_one=state.c_one,
        c_mu=state.c_mu,
        chi_n=state.chi_n,
    )


def cmaes_run(
    objective,
    x0,
    sigma0: float,
    generations: int,
    lam: int = 25,
    mu: int = 13,
    seed: int = 0,
    frozen_mask=None,
):
    """Run sample -> evaluate -> update loops, tracking the best candidate.

    `frozen_mask` pins coordinates to their x0 values (candidates are
    projected before evaluation and the update), for experiments that fix
    a reference weight. History records per-generation best/median
    fitness, sigma, covariance eigenvalues and diagonal.

    Returns (best_x, best_f, history); with generations=0 the start point
    is evaluated once.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    rng = np.random.default_rng(seed)
    if frozen_mask is not None:
        frozen_mask = np.asarray(frozen_mask, dtype=bool)
        if frozen_mask.shape != x0.shape:
            raise ValueError("frozen_mask must match x0 shape")

    def pin(x):
        if frozen_mask is None:
            return x
        out = x.copy()
        out[frozen_mask] = x0[frozen_mask]
        return out

    state = cmaes_init(x0, sigma0, lam=lam, mu=mu)
    best_x = x0.copy()
    best_f = _evaluate(objective, pin(x0), 0)
    history = []
    if generations == 0:
        return best_x, best_f, history

    for gen in range(1, generations + 1):
        candidates = cmaes_sample(state, rng)
        candidates = np.array([pin(c) for c in candidates])
        fits = np.array([_evaluate(objective, c, gen) for c in candidates])
        gen_best = int(np.argmin(fits))
        if fits[gen_best] < best_f:
            best_f = float(fits[gen_best])
            best_x = candidates[gen_best].copy()
        state = cmaes_update(state, candidates, fits)
        if frozen_mask is not None:
            state.mean = pin(state.mean)
        eigvals, _ = state.eigen()
        history.append(
            {
                "gen": gen,
                "best_f": float(fits[gen_best]),
                "best_f_so_far": float(best_f),
                "median_f": float(np.median(fits)),
                "sigma": float(state.sigma),
                "eig": [float(v) for v in eigvals],
                "diag_c": [float(v) for v in np.diag(state.cov)],
            }
        )
    return best_x, float(best_f), history


def _evaluate(objective, x, generation):
    try:
        value = float(objective(x))
    except Exception as exc:
        raise RuntimeError(f"objective failed at generation {generation}: {exc}") from exc
    return value
