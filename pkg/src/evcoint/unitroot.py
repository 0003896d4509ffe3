"""Unit-root evidence engine for the augmented Dickey-Fuller regression form.

The model is the differenced autoregression

    dy_t = mu + delta*t + g0*y_{t-1} + g1*dy_{t-1} + ... + g_{p-1}*dy_{t-p+1} + e_t

with the sharp hypothesis g0 = 0.  The posterior under the 1/sigma prior is
normal-inverse-gamma around the OLS point; the hypothesis-constrained
maximum comes from the restricted regression, and the e-value from a Gibbs
chain over (psi, sigma).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateRss, NonFiniteInput, SeriesTooShort
from .fbst import DEFAULT_BURN_IN, DEFAULT_N_DRAWS, EvidenceResult, estimate_evidence

#: Smallest usable sample: below p + MIN_EXTRA observations the inverse-gamma
#: conditional is nearly improper and the test is meaningless.
MIN_EXTRA = 10

#: Restricted residual sum of squares below this (relative) scale means the
#: restricted model fits perfectly and no meaningful test exists.
DEGENERATE_RSS_TOL = 1e-12


@dataclass(frozen=True)
class UnitRootSpec:
    p: int
    include_trend: bool = False
    include_intercept: bool = True

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("lag order p must be >= 1")
        if self.include_trend and not self.include_intercept:
            raise ValueError("a deterministic trend requires the intercept")


@dataclass(frozen=True)
class UnitRootDesign:
    delta_y: np.ndarray       # T x 1
    x_full: np.ndarray        # T x k
    x_restricted: np.ndarray  # T x (k-1), lagged-level column removed
    effective_t: int
    gamma0_index: int         # column of y_{t-1} in x_full
    spec: UnitRootSpec
    column_names: tuple


@dataclass(frozen=True)
class UnitRootDraw:
    psi: np.ndarray
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def build_design(series, spec):
    """Stack the differenced-regression matrices for ``series``.

    Row t (t = 0..T-1) corresponds to observation date p + t + 1 in the
    1-based dating of the series; the trend column carries those dates.
    Differencing consumes one observation and lagging p - 1 more.
    """
    y = np.asarray(series, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise NonFiniteInput("series contains NaN or Inf")
    p = spec.p
    if y.size < p + MIN_EXTRA:
        raise SeriesTooShort(f"need at least {p + MIN_EXTRA} observations, got {y.size}")
    t_eff = y.size - p
    dy = np.diff(y)
    delta_y = dy[p - 1:].reshape(-1, 1)
    cols = []
    names = []
    if spec.include_intercept:
        cols.append(np.ones(t_eff))
        names.append("intercept")
    if spec.include_trend:
        cols.append(np.arange(p + 1, y.size + 1, dtype=float))
        names.append("trend")
    gamma0_index = len(cols)
    cols.append(y[p - 1:-1])
    names.append("level_lag1")
    for j in range(1, p):
        cols.append(dy[p - 1 - j:-j])
        names.append(f"diff_lag{j}")
    x_full = np.column_stack(cols)
    x_restricted = np.delete(x_full, gamma0_index, axis=1)
    return UnitRootDesign(
        delta_y=delta_y,
        x_full=x_full,
        x_restricted=x_restricted,
        effective_t=t_eff,
        gamma0_index=gamma0_index,
        spec=spec,
        column_names=tuple(names),
    )


def log_posterior(draw, design):
    """Log posterior kernel -(T+1) ln sigma - RSS(psi)/(2 sigma^2), constant zero."""
    t = design.effective_t
    resid = design.delta_y.ravel() - design.x_full @ draw.psi
    rss = float(resid @ resid)
    return -(t + 1) * math.log(draw.sigma) - rss / (2.0 * draw.sigma ** 2)


def restricted_map(design):
    """Constrained posterior maximum under g0 = 0.

    Returns ``(psi_r, sigma_r, log_s_star)`` with ``psi_r`` already embedded
    in the full coordinate system (zero in the lagged-level slot) and
    ``log_s_star`` evaluated with the same constant convention as
    ``log_posterior``.
    """
    coef, _, rss_mat = linalg.ols_solve(design.x_restricted, design.delta_y)
    rss_r = float(rss_mat[0, 0])
    scale = float(design.delta_y.ravel() @ design.delta_y.ravel())
    if rss_r < DEGENERATE_RSS_TOL * max(scale, 1.0):
        raise DegenerateRss("restricted regression fits the series perfectly")
    t = design.effective_t
    sigma_r = math.sqrt(rss_r / (t + 1))
    psi_full = np.insert(coef.ravel(), design.gamma0_index, 0.0)
    log_s_star = log_posterior(UnitRootDraw(psi=psi_full, sigma=sigma_r), design)
    return psi_full, sigma_r, log_s_star


@dataclass(frozen=True)
class UnitRootChain:
    psi: np.ndarray    # n_draws x k, burn-in included
    sigma: np.ndarray  # n_draws
    burn_in: int


#: Shape of the sigma^2 | psi inverse-gamma conditional.  "exact" uses T/2,
#: the value implied by reading the kernel sigma^-(T+1) exp(-RSS/2 sigma^2)
#: as a density in (psi, sigma); it agrees with small-sample grid quadrature
#: of that kernel and is the default.  "t-plus-one" uses (T+1)/2, which
#: effectively shifts the sample size by one and biases small-sample
#: e-values downward; it is kept selectable for comparison runs.
SHAPE_CONVENTIONS = ("exact", "t-plus-one")


def _ig_shape(t, convention):
    if convention == "exact":
        return 0.5 * t
    if convention == "t-plus-one":
        return 0.5 * (t + 1)
    raise ValueError(f"unknown shape convention {convention!r}")


def gibbs_chain(design, rng, n_draws=DEFAULT_N_DRAWS, burn_in=DEFAULT_BURN_IN,
                shape_convention="exact"):
    """Alternate psi | sigma ~ N(psi_hat, sigma^2 (X'X)^-1) and
    sigma^2 | psi ~ IG(shape, H) starting from the full OLS point.

    Every draw is emitted; the burn-in count is carried on the result so
    downstream estimation can discard it.
    """
    coef, _, rss_mat = linalg.ols_solve(design.x_full, design.delta_y)
    psi_hat = coef.ravel()
    rss_hat = float(rss_mat[0, 0])
    t = design.effective_t
    k = psi_hat.size
    r = linalg.qr_r_factor(design.x_full)
    r_inv = np.linalg.inv(r)          # (X'X)^-1 = R^-1 R^-T
    shape = _ig_shape(t, shape_convention)
    sigma = math.sqrt(max(rss_hat, 1e-300) / (t + 1))
    psi_out = np.empty((n_draws, k))
    sigma_out = np.empty(n_draws)
    for i in range(n_draws):
        z = np.atleast_1d(rng.standard_normal(k))
        psi = psi_hat + sigma * (r_inv @ z)
        # (psi - psi_hat)' X'X (psi - psi_hat) = sigma^2 |z|^2 by construction.
        h = 0.5 * (rss_hat + sigma * sigma * float(z @ z))
        sigma = math.sqrt(h / rng.gamma(shape))
        psi_out[i] = psi
        sigma_out[i] = sigma
    return UnitRootChain(psi=psi_out, sigma=sigma_out, burn_in=burn_in)


def chain_log_posterior(chain, design):
    """Log posterior at every chain draw, vectorized over draws."""
    t = design.effective_t
    resid = design.delta_y - design.x_full @ chain.psi.T
    rss = np.sum(resid * resid, axis=0)
    return -(t + 1) * np.log(chain.sigma) - rss / (2.0 * chain.sigma ** 2)


@dataclass(frozen=True)
class UnitRootResult:
    evidence: EvidenceResult
    p_nonstationary: float
    adf_stat: float
    psi_hat: np.ndarray
    sigma_map: float
    design: UnitRootDesign


def adf_statistic(design):
    """Classical t-ratio of the lagged-level coefficient, s^2 = RSS/(T - k)."""
    coef, _, rss_mat = linalg.ols_solve(design.x_full, design.delta_y)
    t, k = design.x_full.shape
    s2 = float(rss_mat[0, 0]) / (t - k)
    r = linalg.qr_r_factor(design.x_full)
    r_inv = np.linalg.inv(r)
    cov = s2 * (r_inv @ r_inv.T)
    g = design.gamma0_index
    return float(coef.ravel()[g] / math.sqrt(cov[g, g]))


def test_unit_root(series, spec, rng, n_draws=DEFAULT_N_DRAWS, burn_in=DEFAULT_BURN_IN,
                   shape_convention="exact"):
    """Full unit-root run: e-value, posterior P(g0 >= 0) and the ADF t-ratio."""
    design = build_design(series, spec)
    _, _, log_s_star = restricted_map(design)
    chain = gibbs_chain(design, rng, n_draws=n_draws, burn_in=burn_in,
                        shape_convention=shape_convention)
    lp = chain_log_posterior(chain, design)
    evidence = estimate_evidence(log_s_star, lp, burn_in=burn_in)
    g0 = chain.psi[burn_in:, design.gamma0_index]
    p_nonstationary = float(np.mean(g0 >= 0.0))
    coef, _, rss_mat = linalg.ols_solve(design.x_full, design.delta_y)
    sigma_map = math.sqrt(float(rss_mat[0, 0]) / (design.effective_t + 1))
    return UnitRootResult(
        evidence=evidence,
        p_nonstationary=p_nonstationary,
        adf_stat=adf_statistic(design),
        psi_hat=coef.ravel(),
        sigma_map=sigma_map,
        design=design,
    )
