"""Online Gaussian mean/variance tracking as regularized maximum likelihood.

Each incoming gradient sample ``g`` updates a belief ``N(mean, variance)``
by minimizing

    -log p(g | m, s2)  +  lam * KL( N(mean_k, var_k) || N(m, s2) )

over ``(m, s2)``. The closed-form minimizer is exactly the pair of
recursions used by the equal-beta optimizer,

    mean'     = beta * mean + (1 - beta) * g
    variance' = beta * variance + beta * (1 - beta) * (mean - g)^2

where ``beta = lam / (1 + lam)`` is the share of the new belief kept from
the prior: heavier regularization (larger ``lam``) means a stickier belief,
i.e. a larger momentum parameter. ``lam = beta / (1 - beta)`` inverts the
map when a target momentum is given.

A derivative-free nested bracketing minimizer is provided as an independent
oracle for the closed form; it never touches it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar


class OracleError(RuntimeError):
    """The numeric minimizer could not bracket the optimum."""


@dataclass(frozen=True)
class GaussianBelief:
    """Current estimate of the gradient distribution.

    ``variance == 0`` is tolerated only as a starting state (mirroring a
    zero-initialized variance buffer); the objective itself requires strictly
    positive variances.
    """

    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise ValueError("belief parameters must be finite")
        if self.variance < 0:
            raise ValueError(f"variance must be nonnegative, got {self.variance}")


def _nll(g, mean, variance):
    return 0.5 * np.log(variance) + (g - mean) ** 2 / (2.0 * variance)


def _kl(prior: GaussianBelief, mean, variance):
    ratio = prior.variance / variance
    return 0.5 * (ratio + (prior.mean - mean) ** 2 / variance - 1.0 - np.log(ratio))


def vi_objective(
    prior: GaussianBelief, candidate: GaussianBelief, g: float, lam: float
) -> float:
    """Penalized negative log-likelihood of ``candidate`` for the sample ``g``."""
    if candidate.variance <= 0:
        raise ValueError("candidate variance must be strictly positive")
    if prior.variance <= 0:
        raise ValueError("prior variance must be strictly positive")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    nll = _nll(g, candidate.mean, candidate.variance)
    return float(nll + lam * _kl(prior, candidate.mean, candidate.variance))


def objective_batch(prior: GaussianBelief, means, variances, g: float, lam: float):
    """Vectorized :func:`vi_objective` over candidate arrays (same formula)."""
    means = np.asarray(means, dtype=float)
    variances = np.asarray(variances, dtype=float)
    if np.any(variances <= 0):
        raise ValueError("candidate variances must be strictly positive")
    if prior.variance <= 0:
        raise ValueError("prior variance must be strictly positive")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return _nll(g, means, variances) + lam * _kl(prior, means, variances)


def lambda_beta(lam: float) -> float:
    """Momentum induced by the regularization weight: ``lam / (1 + lam)``.

    The minimizer of the penalized likelihood keeps this fraction of the
    prior, so ``lam -> inf`` pins the previous belief (``beta -> 1``) while
    ``lam = 0`` discards it. Inverse map: ``lam = beta / (1 - beta)``.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return lam / (1.0 + lam)


def beta_lambda(beta: float) -> float:
    """Regularization weight that yields momentum ``beta``: ``beta / (1 - beta)``."""
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    return beta / (1.0 - beta)


def vi_update(prior: GaussianBelief, g: float, lam: float) -> GaussianBelief:
    """Closed-form minimizer of the penalized likelihood.

    Accepts ``variance == 0`` priors (the update immediately produces a
    nonnegative variance). ``lam == 0`` is the unregularized limit: the mean
    snaps to the sample and the variance collapses to 0 (the objective's
    infimum is approached, not attained, there).
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    beta = lambda_beta(lam)
    g = float(g)
    mean = beta * prior.mean + (1.0 - beta) * g
    diff = prior.mean - g
    variance = beta * prior.variance + beta * (1.0 - beta) * diff * diff
    return GaussianBelief(mean=mean, variance=variance)


def vi_numeric_oracle(
    prior: GaussianBelief,
    g: float,
    lam: float,
    tol: float = 1e-7,
    max_widenings: int = 6,
) -> GaussianBelief:
    """Minimize the objective by nested bracketed 1-D searches.

    Outer bounded search over ``log(variance)`` (widened on bracket hits),
    inner bounded search over the mean. No closed-form shortcuts; raises
    :class:`OracleError` if a finite bracket cannot be found.
    """
    if prior.variance <= 0:
        raise ValueError("oracle needs a strictly positive prior variance")
    if lam <= 0:
        raise ValueError("oracle needs lam > 0 (the problem is degenerate at 0)")
    g = float(g)

    spread = abs(prior.mean - g)
    m_lo = min(prior.mean, g) - 0.5 * spread - 1.0
    m_hi = max(prior.mean, g) + 0.5 * spread + 1.0
    m_atol = tol * max(1.0, abs(m_lo), abs(m_hi)) * 1e-2

    def best_mean(variance: float) -> float:
        res = minimize_scalar(
            lambda m: vi_objective(prior, GaussianBelief(m, variance), g, lam),
            bounds=(m_lo, m_hi),
            method="bounded",
            options={"xatol": m_atol},
        )
        return float(res.x)

    def profile(log_var: float) -> float:
        variance = math.exp(log_var)
        return vi_objective(prior, GaussianBelief(best_mean(variance), variance), g, lam)

    scale = prior.variance + spread * spread + 1e-30
    lo = math.log(scale) - 30.0
    hi = math.log(scale) + 5.0
    for _ in range(max_widenings):
        res = minimize_scalar(
            profile, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
        )
        log_var = float(res.x)
        edge = 1e-6 * (hi - lo)
        if log_var - lo < edge:
            lo -= 20.0
        elif hi - log_var < edge:
            hi += 20.0
        else:
            variance = math.exp(log_var)
            return GaussianBelief(mean=best_mean(variance), variance=variance)
    raise OracleError(
        f"bracket exhausted after {max_widenings} widenings "
        f"(prior={prior}, g={g}, lam={lam})"
    )
