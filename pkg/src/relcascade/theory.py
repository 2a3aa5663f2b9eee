"""Numeric verifiers for the two analytical claims behind the model design.

1. The cross-entropy / KL identity that turns the divergence objective into a
   negative log-likelihood (the entropy of the data distribution is constant
   in the parameters).
2. The conditional-Gaussian argument that conditioning a head-entity estimate
   on an observed relation variable reduces mean-square error whenever the
   two covary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class ParameterError(Exception):
    pass


class BandError(Exception):
    pass


@dataclass
class GaussianSimParams:
    m_h: float = 0.0
    m_r: float = 0.0
    p11: float = 1.0
    p12: float = 0.0
    p22: float = 1.0
    sigma2: Optional[float] = None  # observation-noise variance, informational only

    def validate(self) -> None:
        if self.p22 <= 0:
            raise ParameterError(f"p22 must be positive, got {self.p22}")
        if self.p11 < 0:
            raise ParameterError(f"p11 must be non-negative, got {self.p11}")
        # PSD of [[p11, p12], [p12, p22]]
        if self.p11 * self.p22 - self.p12 ** 2 < -1e-12:
            raise ParameterError("covariance matrix is not positive semidefinite")

    @property
    def cov(self) -> np.ndarray:
        return np.array([[self.p11, self.p12], [self.p12, self.p22]])

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.m_h, self.m_r])


@dataclass
class SimResult:
    closed_form_mean: float
    closed_form_var: float
    mc_mean: float
    mc_var: float
    mc_stderr: float
    n_in_band: int
    mse_conditional: Optional[float] = None
    mse_unconditional: Optional[float] = None


def conditional_gaussian_closed_form(
    params: GaussianSimParams, r_obs: float
) -> tuple[float, float]:
    """Posterior mean and variance of h given an observed r.

    mean = m_h + p12/p22 * (r - m_r); variance = p11 - p12^2/p22.
    """
    params.validate()
    gain = params.p12 / params.p22
    mean = params.m_h + gain * (r_obs - params.m_r)
    var = params.p11 - gain * params.p12
    return mean, var


def _sample_joint(params: GaussianSimParams, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    samples = rng.multivariate_normal(params.mean, params.cov, size=n, method="cholesky")
    return samples[:, 0], samples[:, 1]


def monte_carlo_conditional(
    params: GaussianSimParams,
    r_obs: float,
    band: float,
    n: int,
    seed: int,
) -> SimResult:
    """Estimate E[h | r in r_obs +/- band] from joint samples and compare with
    the closed form."""
    params.validate()
    if n < 1000:
        raise ParameterError(f"need at least 1000 samples, got {n}")
    if band <= 0:
        raise ParameterError(f"band half-width must be positive, got {band}")
    h, r = _sample_joint(params, n, seed)
    in_band = np.abs(r - r_obs) <= band
    k = int(in_band.sum())
    if k == 0:
        raise BandError(
            f"no samples fell in r_obs +/- {band}; widen the band or increase n"
        )
    h_sel = h[in_band]
    mc_mean = float(h_sel.mean())
    mc_var = float(h_sel.var(ddof=1)) if k >= 2 else 0.0
    mc_stderr = math.sqrt(mc_var / k) if k >= 2 else float("inf")
    cf_mean, cf_var = conditional_gaussian_closed_form(params, r_obs)
    return SimResult(
        closed_form_mean=cf_mean,
        closed_form_var=cf_var,
        mc_mean=mc_mean,
        mc_var=mc_var,
        mc_stderr=mc_stderr,
        n_in_band=k,
    )


def mse_comparison(params: GaussianSimParams, n: int, seed: int) -> dict[str, float]:
    """Mean-square error of the prior-mean estimate vs the relation-informed
    estimate, each sample plugging in its exactly observed r."""
    params.validate()
    if n < 1000:
        raise ParameterError(f"need at least 1000 samples, got {n}")
    h, r = _sample_joint(params, n, seed)
    gain = params.p12 / params.p22
    h_hat = params.m_h + gain * (r - params.m_r)
    return {
        "mse_unconditional": float(np.mean((h - params.m_h) ** 2)),
        "mse_conditional": float(np.mean((h - h_hat) ** 2)),
    }


def crossentropy_kl_identity(p: Sequence[float], q: Sequence[float]) -> float:
    """Residual CE(p, q) - KL(p || q) - H(p); zero up to rounding.

    Requires q > 0 wherever p > 0.
    """
    p_arr = np.asarray(p, dtype=float)
    q_arr = np.asarray(q, dtype=float)
    if p_arr.shape != q_arr.shape:
        raise ValueError("p and q must share a support")
    if np.any((p_arr > 0) & (q_arr <= 0)):
        raise ValueError("q must be strictly positive wherever p is positive")
    support = p_arr > 0
    ps = p_arr[support]
    qs = q_arr[support]
    ce = float(-(ps * np.log(qs)).sum())
    kl = float((ps * np.log(ps / qs)).sum())
    entropy = float(-(ps * np.log(ps)).sum())
    return ce - kl - entropy
