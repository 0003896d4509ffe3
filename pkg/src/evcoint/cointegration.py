"""Cointegration-rank evidence engine for the vector error-correction model.

Pipeline: stack the VECM regression, concentrate out the short-run
dynamics (two auxiliary regressions and a canonical-correlation
eigenproblem) to get the rank-constrained posterior maxima, run one shared
matrix-normal / inverse-Wishart Gibbs chain over (eta, Omega), and count
tangent-set membership per rank.  The maximum-eigenvalue statistics come
from the same eigenvalue spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import EigenFailure, NonFiniteInput, SeriesTooShort
from .fbst import (
    DEFAULT_BURN_IN,
    DEFAULT_N_DRAWS,
    EvidenceResult,
    estimate_evidence,
    ev_from_pvalue,
    vecm_bridge_spec,
)
from .rng import InverseWishartParams, sample_inverse_wishart

MIN_EXTRA = 10

#: Tolerance used when clipping log-posterior comparisons against the
#: rank-n maximum, which no draw may exceed beyond numerical noise.
CLIP_TOL = 1e-8


@dataclass(frozen=True)
class VecmSpec:
    n: int
    p: int
    include_constant: bool = True
    n_seasonal_dummies: int = 0
    dummy_period: int = 4
    centered_dummies: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two series")
        if self.p < 1:
            raise ValueError("lag order p must be >= 1")
        if self.n_seasonal_dummies < 0 or (
            self.n_seasonal_dummies and self.n_seasonal_dummies >= self.dummy_period
        ):
            raise ValueError("need 0 <= n_seasonal_dummies < dummy_period")


@dataclass(frozen=True)
class VecmDesign:
    delta_y: np.ndarray   # T x n
    z: np.ndarray         # T x k, levels block last
    z1: np.ndarray        # z without its last n columns
    y_minus1: np.ndarray  # T x n
    effective_t: int
    spec: VecmSpec
    column_names: tuple


@dataclass(frozen=True)
class CointDraw:
    eta: np.ndarray    # k x n
    omega: np.ndarray  # n x n positive definite


def build_vecm_design(data, spec, start_period_index=0):
    """Stack the VECM matrices for an (observations x series) data array.

    Deterministic columns come first (constant, then seasonal dummies), the
    lagged differences next and the lagged levels last, so that dropping the
    final n columns yields the short-run-only regressor block.  Seasonal
    dummy j is the indicator of period j, where the raw observation at index
    i belongs to period ``(start_period_index + i) mod dummy_period``;
    centered dummies subtract 1/dummy_period when enabled.
    """
    y = np.asarray(data, dtype=float)
    if y.ndim != 2 or y.shape[1] != spec.n:
        raise NonFiniteInput(f"data must be (observations x {spec.n}), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise NonFiniteInput("data contains NaN or Inf")
    n, p = spec.n, spec.p
    if y.shape[0] < p * n + n + 1 + MIN_EXTRA:
        raise SeriesTooShort(
            f"need at least {p * n + n + 1 + MIN_EXTRA} observations, got {y.shape[0]}"
        )
    t_eff = y.shape[0] - p
    dy = np.diff(y, axis=0)
    delta_y = dy[p - 1:]
    blocks = []
    names = []
    if spec.include_constant:
        blocks.append(np.ones((t_eff, 1)))
        names.append("const")
    if spec.n_seasonal_dummies:
        rows = np.arange(p, y.shape[0])
        period = (start_period_index + rows) % spec.dummy_period
        for j in range(spec.n_seasonal_dummies):
            d = (period == j).astype(float)
            if spec.centered_dummies:
                d = d - 1.0 / spec.dummy_period
            blocks.append(d.reshape(-1, 1))
            names.append(f"season{j + 1}")
    for j in range(1, p):
        blocks.append(dy[p - 1 - j:-j])
        names.extend(f"dlag{j}_y{i + 1}" for i in range(n))
    y_minus1 = y[p - 1:-1]
    blocks.append(y_minus1)
    names.extend(f"level_y{i + 1}" for i in range(n))
    z = np.hstack(blocks)
    return VecmDesign(
        delta_y=delta_y,
        z=z,
        z1=z[:, :-n],
        y_minus1=y_minus1,
        effective_t=t_eff,
        spec=spec,
        column_names=tuple(names),
    )


#: Relative tolerance of the Frisch-Waugh identity check performed during
#: concentration (partialled estimate vs full-regression long-run block).
FWL_TOL = 1e-8


@dataclass(frozen=True)
class Concentration:
    eigenvalues: np.ndarray
    suu: np.ndarray
    u_hat: np.ndarray
    v_hat: np.ndarray


def johansen_concentrate(design):
    """Two-stage concentration: partial the short-run block out of both the
    differences and the lagged levels, then take the squared canonical
    correlations of the residual pair.

    Covariance blocks use the 1/T normalization.  The Frisch-Waugh identity
    (the long-run coefficient block of the full regression equals the OLS of
    the partialled residuals) is verified to ``FWL_TOL``.
    """
    n = design.spec.n
    t = design.effective_t
    if design.z1.shape[1] == 0:
        # p = 1 without deterministic terms: nothing to partial out.
        u_hat = design.delta_y.copy()
        v_hat = design.y_minus1.copy()
    else:
        _, u_hat, _ = linalg.ols_solve(design.z1, design.delta_y)
        _, v_hat, _ = linalg.ols_solve(design.z1, design.y_minus1)
    suu = (u_hat.T @ u_hat) / t
    svv = (v_hat.T @ v_hat) / t
    suv = (u_hat.T @ v_hat) / t
    pi_partial, _, _ = linalg.ols_solve(v_hat, u_hat)          # rows: levels, cols: eqs
    eta_full, _, _ = linalg.ols_solve(design.z, design.delta_y)
    pi_full = eta_full[-n:, :]
    scale = max(np.abs(pi_full).max(), 1.0)
    if np.abs(pi_partial - pi_full).max() > FWL_TOL * scale:
        raise EigenFailure("Frisch-Waugh identity violated; design is ill-conditioned")
    eigenvalues = linalg.canonical_eigenvalues(svv, suv, suu)
    return Concentration(eigenvalues=eigenvalues, suu=suu, u_hat=u_hat, v_hat=v_hat)


def _kernel_constant(t, n):
    # Additive constant aligning the concentrated maximum with the
    # constant-zero log-posterior kernel used below.
    return -0.5 * (t + n + 1) * n * (math.log(t / (t + n + 1)) + 1.0)


def log_s_star(rank, eigenvalues, suu, t, n):
    """Rank-constrained maximum of the log posterior, in the same constant
    convention as ``log_posterior``."""
    if not 0 <= rank <= n:
        raise ValueError("rank must lie in [0, n]")
    lam = np.asarray(eigenvalues, dtype=float)
    tail = float(np.sum(np.log1p(-lam[:rank])))
    return _kernel_constant(t, n) - 0.5 * (t + n + 1) * (linalg.log_det_spd(suu) + tail)


def log_posterior(draw, design):
    """Log posterior kernel at one draw:
    -((T+n+1)/2) ln|Omega| - (1/2) tr[Omega^-1 (dY - Z eta)'(dY - Z eta)]."""
    t, n = design.effective_t, design.spec.n
    resid = design.delta_y - design.z @ draw.eta
    m = resid.T @ resid
    omega, chol = linalg.as_spd(draw.omega, "omega")
    a = np.linalg.solve(chol, m)
    a = np.linalg.solve(chol, a.T)
    trace = float(np.trace(a))
    return -0.5 * (t + n + 1) * linalg.log_det_spd(omega) - 0.5 * trace


@dataclass(frozen=True)
class CointChain:
    eta: np.ndarray    # n_draws x k x n
    omega: np.ndarray  # n_draws x n x n
    burn_in: int


def gibbs_chain(design, rng, n_draws=DEFAULT_N_DRAWS, burn_in=DEFAULT_BURN_IN):
    """Alternate eta | Omega ~ MN(eta_hat, (Z'Z)^-1, Omega) and
    Omega | eta ~ IW(S + (eta - eta_hat)' Z'Z (eta - eta_hat), T),
    starting from (eta_hat, S/T)."""
    t, n = design.effective_t, design.spec.n
    eta_hat, _, s = linalg.ols_solve(design.z, design.delta_y)
    k = eta_hat.shape[0]
    r = linalg.qr_r_factor(design.z)
    r_inv = np.linalg.inv(r)          # (Z'Z)^-1 = R^-1 R^-T
    omega = s / t
    eta_out = np.empty((n_draws, k, n))
    omega_out = np.empty((n_draws, n, n))
    for i in range(n_draws):
        l_om = np.linalg.cholesky(omega)
        g = np.atleast_2d(rng.standard_normal((k, n)))
        eta = eta_hat + r_inv @ g @ l_om.T
        # (eta - eta_hat)' Z'Z (eta - eta_hat) = L_om G'G L_om'.
        quad = l_om @ (g.T @ g) @ l_om.T
        omega = sample_inverse_wishart(rng, InverseWishartParams(scale=s + quad, dof=t))
        eta_out[i] = eta
        omega_out[i] = omega
    return CointChain(eta=eta_out, omega=omega_out, burn_in=burn_in)


def chain_log_posterior(chain, design):
    """Log posterior at every chain draw.

    Uses the residual decomposition RSS(eta) = S + (eta - eta_hat)' Z'Z
    (eta - eta_hat), which is algebraically identical to the direct residual
    form of ``log_posterior`` but avoids T-sized products per draw.
    """
    t, n = design.effective_t, design.spec.n
    eta_hat, _, s = linalg.ols_solve(design.z, design.delta_y)
    r = linalg.qr_r_factor(design.z)
    n_draws = chain.eta.shape[0]
    out = np.empty(n_draws)
    half = 0.5 * (t + n + 1)
    for i in range(n_draws):
        d = r @ (chain.eta[i] - eta_hat)
        m = s + d.T @ d
        chol = np.linalg.cholesky(chain.omega[i])
        a = np.linalg.solve(chol, m)
        a = np.linalg.solve(chol, a.T)
        out[i] = -2.0 * half * float(np.sum(np.log(np.diag(chol)))) - 0.5 * float(np.trace(a))
    return out


def max_eig_statistic(eigenvalues, t, rank):
    """Johansen maximum-eigenvalue statistic -T ln(1 - lambda_{r+1})."""
    lam = np.asarray(eigenvalues, dtype=float)
    if not 0 <= rank < lam.size:
        raise ValueError("rank must lie in [0, n)")
    return -t * float(np.log1p(-lam[rank]))


@dataclass(frozen=True)
class RankHypothesis:
    rank: int
    log_s_star: float
    evidence: EvidenceResult
    max_eig_stat: float | None
    threshold: float | None
    rejected: bool


@dataclass(frozen=True)
class RankTestReport:
    hypotheses: tuple
    eigenvalues: np.ndarray
    selected_rank: int
    threshold_policy: str
    dimension_convention: str
    dummy_coding: str


def _threshold_for(policy, convention, n, k, rank):
    kind, _, value = policy.partition(":")
    if kind == "fixed":
        return float(value)
    if kind == "bridge":
        if not value.startswith("p="):
            raise ValueError(f"bridge policy must look like 'bridge:p=0.01', got {policy!r}")
        p = float(value[2:])
        return ev_from_pvalue(p, vecm_bridge_spec(n, k, rank, convention))
    raise ValueError(f"unknown threshold policy {policy!r}")


def test_rank(
    data,
    spec,
    rng,
    n_draws=DEFAULT_N_DRAWS,
    burn_in=DEFAULT_BURN_IN,
    threshold_policy="bridge:p=0.01",
    dimension_convention="paper-literal",
    start_period_index=0,
):
    """Sequential rank test over one shared Gibbs chain.

    The full posterior is the same for every rank hypothesis (only the
    constrained maximum changes), so a single chain yields exactly nested
    tangent-set counts and non-decreasing e-values.  Starting from r = 0,
    hypotheses are rejected while the e-value stays below the policy
    threshold; the selected rank is the first survivor.
    """
    design = build_vecm_design(data, spec, start_period_index=start_period_index)
    conc = johansen_concentrate(design)
    t, n = design.effective_t, spec.n
    k = design.z.shape[1]
    stars = [log_s_star(r, conc.eigenvalues, conc.suu, t, n) for r in range(n + 1)]

    # Runtime self-check: the log posterior at the analytic full-rank MAP
    # must equal the rank-n constrained maximum.
    eta_hat, _, s = linalg.ols_solve(design.z, design.delta_y)
    map_value = log_posterior(CointDraw(eta=eta_hat, omega=s / (t + n + 1)), design)
    if not math.isclose(map_value, stars[n], rel_tol=0.0, abs_tol=1e-6 * max(1.0, abs(stars[n]))):
        raise EigenFailure(
            f"full-rank maximum inconsistency: MAP {map_value:.9g} vs l*_n {stars[n]:.9g}"
        )

    chain = gibbs_chain(design, rng, n_draws=n_draws, burn_in=burn_in)
    lp = chain_log_posterior(chain, design)
    clip = CLIP_TOL * max(1.0, abs(stars[n]))
    hypotheses = []
    selected = n
    rejecting = True
    for r in range(n + 1):
        ev = estimate_evidence(stars[r] + clip, lp, burn_in=burn_in)
        threshold = _threshold_for(threshold_policy, dimension_convention, n, k, r) if r < n else None
        rejected = rejecting and threshold is not None and ev.ev < threshold
        if rejecting and not rejected:
            selected = r
            rejecting = False
        stat = max_eig_statistic(conc.eigenvalues, t, r) if r < n else None
        hypotheses.append(
            RankHypothesis(
                rank=r,
                log_s_star=stars[r],
                evidence=ev,
                max_eig_stat=stat,
                threshold=threshold,
                rejected=rejected,
            )
        )
    return RankTestReport(
        hypotheses=tuple(hypotheses),
        eigenvalues=conc.eigenvalues,
        selected_rank=selected,
        threshold_policy=threshold_policy,
        dimension_convention=dimension_convention,
        dummy_coding="centered" if spec.centered_dummies else "indicator",
    )
