"""Gaussian trust belief propagated along a path of terrain cells.

The trust at step k is a linear function of the previous trust and the
current cell's traversability and line-of-sight scores,

    tau_k = b0 * tau_{k-1} + b1 * g + b2 * los + residual,

with Gaussian weights b ~ N(beta_mean, beta_cov) independent of the
Gaussian regressors z = [tau_{k-1}, g, los].  ``propagate_trust`` carries
the closed-form first two moments of b . z + residual; ``mc_trust`` is
the sampling oracle for the same quantity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PSD_TOL = 1e-12


@dataclass(frozen=True)
class TrustBelief:
    mean: float
    var: float

    def __post_init__(self):
        if not (np.isfinite(self.mean) and np.isfinite(self.var)):
            raise ValueError("trust belief must be finite")
        if self.var < 0:
            raise ValueError("trust variance must be >= 0")


def _as_cov(m):
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError("weight covariance must be 3x3")
    if not np.allclose(m, m.T, atol=1e-12):
        raise ValueError("weight covariance must be symmetric")
    if np.linalg.eigvalsh(m).min() < -PSD_TOL:
        raise ValueError("weight covariance must be positive semidefinite")
    return m


@dataclass(frozen=True)
class TrustParams:
    """Weights [self, traversability, line-of-sight], their covariance,
    the residual variance, and the initial belief."""

    beta_mean: tuple
    beta_cov: tuple
    residual_var: float
    tau0: TrustBelief = field(default_factory=lambda: TrustBelief(0.5, 0.01))

    def __post_init__(self):
        mu = np.asarray(self.beta_mean, dtype=float)
        if mu.shape != (3,) or not np.all(np.isfinite(mu)):
            raise ValueError("beta_mean must be a finite 3-vector")
        _as_cov(self.beta_cov)
        if self.residual_var < 0:
            raise ValueError("residual_var must be >= 0")

    @property
    def mu(self):
        return np.asarray(self.beta_mean, dtype=float)

    @property
    def sigma(self):
        return np.asarray(self.beta_cov, dtype=float)


def propagate_trust(prev: TrustBelief, cell, params: TrustParams) -> TrustBelief:
    """One-step belief update from a cell's Gaussian terrain statistics.

    For independent b ~ (mu, S_b) and z ~ (zbar, S_z) the product b . z
    has mean mu . zbar and variance
    mu' S_z mu + zbar' S_b zbar + tr(S_b S_z); the residual adds its own
    variance.  The mean is not clamped.
    """
    mu = params.mu
    sigma_b = _as_cov(params.beta_cov)
    zbar = np.array([prev.mean, cell.g_mean, cell.los_mean], dtype=float)
    sigma_z = np.diag([prev.var, cell.g_var, cell.los_var]).astype(float)
    mean = float(mu @ zbar)
    var = float(
        mu @ sigma_z @ mu + zbar @ sigma_b @ zbar + np.trace(sigma_b @ sigma_z)
    ) + params.residual_var
    return TrustBelief(mean, max(var, 0.0))


def mc_trust(prev: TrustBelief, cell, params: TrustParams, n: int, seed: int) -> TrustBelief:
    """Monte-Carlo estimate of the propagated belief (oracle for
    ``propagate_trust``); deterministic given the seed."""
    if n < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    betas = rng.multivariate_normal(params.mu, params.sigma, size=n, method="eigh")
    z = np.column_stack(
        [
            prev.mean + np.sqrt(prev.var) * rng.standard_normal(n),
            cell.g_mean + np.sqrt(cell.g_var) * rng.standard_normal(n),
            cell.los_mean + np.sqrt(cell.los_var) * rng.standard_normal(n),
        ]
    )
    tau = np.einsum("ij,ij->i", betas, z)
    if params.residual_var > 0:
        tau = tau + np.sqrt(params.residual_var) * rng.standard_normal(n)
    return TrustBelief(float(tau.mean()), float(tau.var(ddof=1)))


def path_trust(cells, grid, params: TrustParams):
    """Fold ``propagate_trust`` over a path of (row, col) cells starting
    from the initial belief; returns one belief per path cell."""
    beliefs = []
    belief = params.tau0
    for rc in cells:
        stats = grid.stats_at(rc)
        if stats.nogo:
            raise ValueError(f"path enters no-go cell {rc}")
        belief = propagate_trust(belief, stats, params)
        beliefs.append(belief)
    return beliefs
