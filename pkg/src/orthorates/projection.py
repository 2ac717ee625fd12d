"""Truncation errors of Laguerre and Hermite projections.

With orthonormal coefficients the weighted L2 error is a plain tail sum,
||f - S_N f||^2 = sum_{n>N} c_n^2.  Weighted Sobolev errors reduce to the
same tail with exact per-degree weights:

    Laguerre H^{m,alpha}: sum_{n>N} ahat_n^2 sum_{q<=m} n!/(n-q)!
    Hermite  W^m:         sum_{n>N} hhat_n^2 sum_{p<=m} 2^p n!/(n-p)!

because a_k^(q)(alpha+q) = (-1)^q a_{k+q}(alpha) and h_k^(p) = (gamma_{k+p}/gamma_k) h_{k+p}.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .asymptotics import MAX_SOBOLEV_ORDER, predict_rate
from .orthopoly import iter_hermite, iter_laguerre
from .quadrature import Envelope, truncation_point

COMPLETION_CAP = 0.05


class FitUnavailable(ValueError):
    """No admissible decay fit for completing a tail beyond the computed degrees."""


@dataclass
class ErrorCurve:
    N_values: np.ndarray
    errors: np.ndarray
    norm: str
    basis: str
    alpha: Optional[float] = None
    m: int = 0
    completion_fraction: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def flagged(self):
        """Points whose beyond-n_max completion exceeds 5% of the squared tail."""
        if self.completion_fraction is None:
            return np.zeros(self.N_values.size, dtype=bool)
        return self.completion_fraction > COMPLETION_CAP


def _consecutive(series):
    n = np.asarray(series.n_values)
    if n[0] != 0 or np.any(np.diff(n) != 1):
        raise ValueError("tail errors need coefficients for every degree 0..n_max")
    return n


def _log_factor(n):
    return np.log(2.0 * np.sqrt(n))


def tail_completion(n, c2, log_power=0, blocks_from=8, per_octave=4):
    """Estimate sum_{k > n_max} c_k^2 from the top of a mean-square profile.

    c_k^2 is averaged over quarter-octave blocks of [n_max/blocks_from, n_max]
    (so oscillation averages out), modelled as A k^(-q) L(k)^(2 log_power),
    and integrated beyond n_max.  Returns (completion, q).
    """
    n = np.asarray(n, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    n_max = n[-1]
    if not np.any(c2[n > n_max / blocks_from]):
        return 0.0, math.inf  # finite expansion
    edges = n_max * 2.0 ** (-np.arange(int(np.log2(blocks_from) * per_octave), -1, -1) / per_octave)
    centers, means = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = (n > lo) & (n <= hi)
        if np.count_nonzero(m) >= 2:
            centers.append(math.sqrt(lo * hi))
            means.append(np.mean(c2[m] / _log_factor(n[m]) ** (2 * log_power)))
    centers, means = np.array(centers), np.array(means)
    if centers.size < 3 or np.any(means <= 0):
        raise FitUnavailable("not enough nonzero coefficient blocks for tail completion")
    slope, icpt = np.polyfit(np.log(centers), np.log(means), 1)
    q = -slope
    if q <= 1.0:
        raise FitUnavailable(f"fitted squared decay exponent {q:.3f} <= 1: tail diverges")
    A = math.exp(icpt)
    completion = A * _log_factor(n_max) ** (2 * log_power) * n_max ** (1.0 - q) / (q - 1.0)
    return completion, q


def _weighted_tails(series, N_values, weights, log_power, complete):
    n = _consecutive(series)
    N_values = np.asarray(N_values, dtype=int)
    if np.any(N_values < 0) or np.any(N_values >= n[-1]):
        raise ValueError("N values must lie in [0, n_max)")
    c2 = series.coeff_normalized**2 * weights
    # suffix sums in a fixed order
    suffix = np.cumsum(c2[::-1])[::-1]
    tails = np.array([suffix[N + 1] for N in N_values])
    frac = None
    if complete:
        extra, q = tail_completion(n[1:], c2[1:], log_power)
        total = tails + extra
        frac = np.divide(extra, total, out=np.zeros_like(total), where=total > 0)
        tails = tails + extra
    else:
        q = None
    return N_values, np.sqrt(tails), frac, q


def _sobolev_weights(basis, n, m):
    n = np.asarray(n, dtype=float)
    w = np.zeros_like(n)
    falling = np.ones_like(n)
    for q in range(m + 1):
        if q:
            falling = falling * np.maximum(n - (q - 1), 0.0)
        w += falling * (2.0**q if basis == "hermite" else 1.0)
    return w


def l2_tail_error(series, N_values, complete=True):
    """sqrt(sum_{n>N} c_n^2) with a fitted-rate completion beyond n_max.

    Needs consecutive degrees 0..n_max; n_max >= 4 max(N) keeps the completion
    small.  Points whose completion exceeds 5% of the squared tail are flagged.
    """
    mu = series.spec.log_power if series.spec is not None else 0
    N, err, frac, q = _weighted_tails(series, N_values, np.ones(series.n_values.size), mu, complete)
    return ErrorCurve(N, err, "l2_weighted", series.basis, series.alpha, 0, frac, {"completion_q": q})


def sobolev_error(series, m, N_values, complete=True):
    """Weighted Sobolev truncation error (H^{m,alpha} or W^m), m <= 3."""
    if not 0 <= m <= MAX_SOBOLEV_ORDER:
        raise ValueError(f"Sobolev order m must lie in [0, {MAX_SOBOLEV_ORDER}]")
    if series.spec is not None:
        predict_rate(series.spec, series.alpha, "sobolev_error", m=m)  # raises on guard failure
    mu = series.spec.log_power if series.spec is not None else 0
    w = _sobolev_weights(series.basis, series.n_values, m)
    N, err, frac, q = _weighted_tails(series, N_values, w, mu, complete)
    return ErrorCurve(N, err, f"sobolev({m})", series.basis, series.alpha, m, frac, {"completion_q": q})


# ---------------------------------------------------------------- sup norm


def _cluster(point, levels=40, ratio=0.5, width=0.05):
    offs = width * ratio ** np.arange(1, levels + 1)
    return np.concatenate([point - offs, point + offs])


def sup_grid(spec, alpha=None, step=0.05, levels=40, upper=None):
    """Uniform step-0.05 grid plus geometric clusters at 0 and the singular point."""
    if spec.basis == "laguerre":
        if upper is None:
            p = 0.5 * alpha + max(spec.exponent, 0.0) + 0.5 * spec.log_power
            upper = truncation_point(Envelope("exp", p, 2.0), 1e-18)
        lo = 0.0
    else:
        if upper is None:
            upper = max(truncation_point(Envelope("gauss", max(spec.exponent, 0.0) + 1.0), 1e-18), abs(spec.location) + 4)
        lo = -upper
    pts = [np.arange(lo, upper + 0.5 * step, step), _cluster(0.0, levels), _cluster(spec.singular_point, levels)]
    g = np.unique(np.concatenate(pts))
    g = g[(g >= lo) & (g <= upper)]
    if spec.basis == "laguerre":
        g = g[g > 0]  # weighted basis is singular at 0 for alpha < 0
    return g[g != spec.singular_point]


def _weighted_f(spec, alpha, x):
    if spec.basis == "laguerre":
        return spec(x) * np.exp(-0.5 * x + 0.5 * alpha * np.log(x))
    return spec(x) * np.exp(-0.5 * x * x)


def weighted_sup_errors(spec, series, N_values, grid=None):
    """max over grid of |w f - sum_{n<=N} c_n basis_n| for every N in N_values.

    w f is e^{-x/2} x^{alpha/2} f (Laguerre) or e^{-x^2/2} f (Hermite); the
    partial sums use the orthonormal weighted functions directly.
    """
    N_values = np.asarray(N_values, dtype=int)
    n = np.asarray(series.n_values)
    if n[0] != 0 or np.any(np.diff(n) != 1) or N_values.max() > n[-1]:
        raise ValueError("sup errors need coefficients for every degree 0..max(N)")
    alpha = series.alpha
    if grid is None:
        grid = sup_grid(spec, alpha)
    grid = np.asarray(grid, dtype=float)
    target = _weighted_f(spec, alpha, grid)
    n_top = int(N_values.max())
    rows = iter_laguerre(alpha, n_top, grid) if series.basis == "laguerre" else iter_hermite(n_top, grid)
    wanted = set(int(v) for v in N_values)
    partial = np.zeros_like(grid)
    out = {}
    for k, row in enumerate(rows):
        partial += series.coeff_normalized[k] * row
        if k in wanted:
            out[k] = float(np.max(np.abs(target - partial)))
    return np.array([out[int(v)] for v in N_values])


def weighted_sup_error(spec, series, N, grid=None):
    """Weighted sup-norm truncation error at a single N."""
    return float(weighted_sup_errors(spec, series, [N], grid)[0])


def sup_error_curve(spec, series, N_values, grid=None):
    errs = weighted_sup_errors(spec, series, N_values, grid)
    return ErrorCurve(np.asarray(N_values, dtype=int), errs, "sup_weighted", series.basis, series.alpha)
