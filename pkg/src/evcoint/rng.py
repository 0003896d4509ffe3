"""Seeded random generation with exact reproducibility.

The raw source is the PCG64 counter-based generator seeded through
``numpy.random.SeedSequence(seed, spawn_key=(stream,))``; only its raw
64-bit output is consumed, so draw sequences are bit-identical across
platforms.  Everything else (uniform doubles, Box-Muller normals,
Marsaglia-Tsang gammas, Bartlett Wisharts) is built here on top of that
stream and fixed permanently.

Each sampler has a matching log-density evaluator used by the Geweke-style
simulator checks in the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_spd
from .errors import DimensionMismatch

_INV_2_53 = 2.0 ** -53
_TWO_PI = 2.0 * math.pi


class RngState:
    """Deterministic random stream identified by ``(seed, stream)``.

    Distinct streams derived from one master seed are statistically
    independent; concurrent chains must each own their own stream.
    """

    def __init__(self, seed, stream=0):
        self.seed = int(seed)
        self.stream = int(stream)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        self._bitgen = np.random.PCG64(ss)

    def substream(self, stream):
        """Fresh RngState on another stream of the same master seed."""
        return RngState(self.seed, stream)

    def uniform(self, size=None):
        """Uniform doubles on the open interval (0, 1)."""
        raw = self._bitgen.random_raw(1 if size is None else size)
        u = ((np.asarray(raw, dtype=np.uint64) >> np.uint64(11)) + 0.5) * _INV_2_53
        return float(u[0]) if size is None else u

    def standard_normal(self, size=None):
        """Standard normals via Box-Muller on the uniform stream."""
        n = 1 if size is None else int(np.prod(size))
        m = (n + 1) // 2
        u1 = np.atleast_1d(self.uniform(m))
        u2 = np.atleast_1d(self.uniform(m))
        r = np.sqrt(-2.0 * np.log(u1))
        a = _TWO_PI * u2
        z = np.concatenate([r * np.cos(a), r * np.sin(a)])[:n]
        return float(z[0]) if size is None else z.reshape(size)

    def gamma(self, shape, scale=1.0):
        """One gamma draw by the Marsaglia-Tsang squeeze (boosted for shape < 1)."""
        if shape <= 0 or scale <= 0:
            raise ValueError("gamma shape and scale must be positive")
        if shape < 1.0:
            u = self.uniform()
            return self.gamma(shape + 1.0, scale) * u ** (1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.standard_normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = self.uniform()
            if math.log(u) < 0.5 * x * x + d - d * v + d * math.log(v):
                return d * v * scale

    def gamma_array(self, shape, n, scale=1.0):
        """Vector of gamma draws with common parameters, batched rejection."""
        if shape < 1.0:
            boost = self.uniform(n) ** (1.0 / shape)
            return self.gamma_array(shape + 1.0, n, scale) * boost
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        out = np.empty(n)
        filled = 0
        while filled < n:
            todo = n - filled
            x = np.atleast_1d(self.standard_normal(todo))
            v = (1.0 + c * x) ** 3
            u = np.atleast_1d(self.uniform(todo))
            ok = (v > 0) & (np.log(u) < 0.5 * x * x + d - d * v + d * np.where(v > 0, np.log(np.abs(v) + 1e-300), 0.0))
            good = d * v[ok] * scale
            out[filled:filled + good.size] = good
            filled += good.size
        return out


@dataclass(frozen=True)
class InverseGammaParams:
    shape: float
    scale: float

    def __post_init__(self):
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("inverse-gamma shape and scale must be positive")


@dataclass(frozen=True)
class MatrixNormalParams:
    mean: np.ndarray
    row_cov: np.ndarray
    col_cov: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.mean, "mean")
        u, _ = as_spd(self.row_cov, "row_cov")
        v, _ = as_spd(self.col_cov, "col_cov")
        if u.shape[0] != m.shape[0] or v.shape[0] != m.shape[1]:
            raise DimensionMismatch("matrix-normal parameter dimensions disagree")


@dataclass(frozen=True)
class InverseWishartParams:
    scale: np.ndarray
    dof: float

    def __post_init__(self):
        lam, _ = as_spd(self.scale, "scale")
        if self.dof <= lam.shape[0] - 1:
            raise ValueError("inverse-Wishart dof must exceed dimension - 1")


def sample_inverse_gamma(rng, params):
    """Inverse-gamma draw: scale / Gamma(shape, 1)."""
    return params.scale / rng.gamma(params.shape)


def log_inverse_gamma_pdf(x, params):
    a, b = params.shape, params.scale
    if x <= 0:
        return -math.inf
    return a * math.log(b) - math.lgamma(a) - (a + 1.0) * math.log(x) - b / x


def sample_matrix_normal(rng, params):
    """Matrix-normal draw M + A G B' with A, B Cholesky factors of the covariances."""
    m = np.asarray(params.mean, dtype=float)
    _, a = as_spd(params.row_cov, "row_cov")
    _, b = as_spd(params.col_cov, "col_cov")
    g = np.atleast_2d(rng.standard_normal(m.shape))
    return m + a @ g @ b.T


def log_matrix_normal_pdf(x, params):
    m = np.asarray(params.mean, dtype=float)
    u, lu = as_spd(params.row_cov, "row_cov")
    v, lv = as_spd(params.col_cov, "col_cov")
    p, q = m.shape
    d = np.asarray(x, dtype=float) - m
    # tr[V^-1 D' U^-1 D] through triangular solves.
    a = np.linalg.solve(lu, d)
    a = np.linalg.solve(lv, a.T)
    quad = float(np.sum(a * a))
    log_det_u = 2.0 * float(np.sum(np.log(np.diag(lu))))
    log_det_v = 2.0 * float(np.sum(np.log(np.diag(lv))))
    return -0.5 * quad - 0.5 * p * q * math.log(_TWO_PI) - 0.5 * p * log_det_v - 0.5 * q * log_det_u


def sample_wishart(rng, scale, dof):
    """Wishart draw via Bartlett decomposition; ``scale`` is the p x p scale matrix."""
    _, l = as_spd(scale, "scale")
    p = l.shape[0]
    a = np.zeros((p, p))
    for i in range(p):
        a[i, i] = math.sqrt(rng.gamma(0.5 * (dof - i), 2.0))
        for j in range(i):
            a[i, j] = rng.standard_normal()
    la = l @ a
    return la @ la.T


def sample_inverse_wishart(rng, params):
    """Inverse-Wishart draw: invert a Wishart with scale Lambda^-1 and the same dof.

    Only the Cholesky of Lambda and triangular solves are used; the single
    p x p inversion happens on the Bartlett product.
    """
    lam, l = as_spd(params.scale, "scale")
    p = l.shape[0]
    a = np.zeros((p, p))
    for i in range(p):
        a[i, i] = math.sqrt(rng.gamma(0.5 * (params.dof - i), 2.0))
        for j in range(i):
            a[i, j] = rng.standard_normal()
    # chol(Lambda^-1) = L^-T (up to orientation); W = L^-T A A' L^-1.
    # X = W^-1 = L A^-T A^-1 L' computed by triangular solves.
    ainv_l = np.linalg.solve(a, l.T)      # A^-1 L'
    x = ainv_l.T @ ainv_l                 # L A^-T A^-1 L'
    return 0.5 * (x + x.T)


def _multivariate_lgamma(a, p):
    out = 0.25 * p * (p - 1) * math.log(math.pi)
    for i in range(p):
        out += math.lgamma(a - 0.5 * i)
    return out


def log_inverse_wishart_pdf(x, params):
    lam, _ = as_spd(params.scale, "scale")
    p = lam.shape[0]
    nu = params.dof
    xm, lx = as_spd(x, "x")
    log_det_lam = 2.0 * float(np.sum(np.log(np.diag(np.linalg.cholesky(lam)))))
    log_det_x = 2.0 * float(np.sum(np.log(np.diag(lx))))
    # tr(Lambda x^-1) via solves against the Cholesky of x.
    s = np.linalg.solve(lx, lam)
    s = np.linalg.solve(lx, s.T)
    trace = float(np.trace(s))
    return (
        0.5 * nu * log_det_lam
        - 0.5 * nu * p * math.log(2.0)
        - _multivariate_lgamma(0.5 * nu, p)
        - 0.5 * (nu + p + 1.0) * log_det_x
        - 0.5 * trace
    )
