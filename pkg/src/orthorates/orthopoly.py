"""Orthonormal Laguerre and Hermite functions.

The canonical objects are the orthonormal weighted functions

    lhat_n(x) = exp(-x/2) x^(alpha/2) L_n^(alpha)(x) / sqrt(sigma_n),
    psi_n(x)  = exp(-x^2/2) H_n(x) / sqrt(gamma_n),

with sigma_n = Gamma(n+alpha+1)/n! and gamma_n = sqrt(pi) 2^n n!.  They are
generated by normalized three-term recurrences carrying a per-point log
scale, so neither the exponential weight nor polynomial growth overflows.
Raw polynomials are exposed only for small degrees (identity checks).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .specfun import bessel_j, log_gamma

RAW_MAX_DEGREE = 64
_RESCALE_AT = 1e100
_CHUNK = 4096
_BLOCK = 64


@dataclass(frozen=True)
class LaguerreBasis:
    alpha: float

    def __post_init__(self):
        if not self.alpha > -1:
            raise ValueError(f"Laguerre parameter alpha={self.alpha} must be > -1")


@dataclass(frozen=True)
class WeightedPolyValue:
    """Value of an orthonormal weighted function; full value = value * exp(log_scale).

    log_scale is 0 for representable values and -inf where the function
    underflows (far beyond the turning point).
    """

    n: int
    value: float
    log_scale: float = 0.0

    @property
    def full(self):
        return 0.0 if self.log_scale == -math.inf else self.value * math.exp(self.log_scale)


def log_sigma(n, alpha):
    """ln sigma_n^(alpha) = ln Gamma(n+alpha+1) - ln Gamma(n+1)."""
    if not alpha > -1:
        raise ValueError("log_sigma: alpha must be > -1")
    n = np.asarray(n, dtype=float)
    out = log_gamma(n + alpha + 1.0) - log_gamma(n + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def log_gamma_hermite(n):
    """ln gamma_n = ln(sqrt(pi) 2^n n!)."""
    n = np.asarray(n, dtype=float)
    out = 0.5 * math.log(math.pi) + n * math.log(2.0) + log_gamma(n + 1.0)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- recurrences


def _laguerre_start(alpha, x, weighted):
    if weighted:
        logx = np.log(np.where(x == 0, 1.0, x))
        xterm = np.where(x == 0, 0.0 if alpha == 0 else -np.inf, 0.5 * alpha * logx)
        return -0.5 * x + xterm - 0.5 * log_gamma(alpha + 1.0)
    return np.full(x.shape, -0.5 * log_gamma(alpha + 1.0))


def iter_laguerre(alpha, n_max, x, weighted=True):
    """Yield lhat_n(x) for n = 0..n_max as arrays over x.

    With ``weighted=False`` yields the orthonormal polynomials L_n/sqrt(sigma_n).
    """
    LaguerreBasis(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise ValueError("iter_laguerre: x must be >= 0")
    if weighted and alpha < 0 and np.any(x == 0):
        raise ValueError("iter_laguerre: weighted function diverges at x=0 for alpha<0")
    scale = _laguerre_start(alpha, x, weighted)
    factor = np.exp(scale)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    yield p * factor
    for n in range(n_max):
        p_next = ((2 * n + alpha + 1.0 - x) * p - math.sqrt(n * (n + alpha)) * p_prev) / math.sqrt(
            (n + 1.0) * (n + alpha + 1.0)
        )
        p_prev, p = p, p_next
        if n % 8 == 7:
            big = np.abs(p) > _RESCALE_AT
            if np.any(big):
                s = np.abs(p[big])
                p[big] /= s
                p_prev[big] /= s
                scale[big] += np.log(s)
                factor[big] = np.exp(scale[big])
        yield p * factor


def iter_hermite(n_max, x, weighted=True):
    """Yield psi_n(x) for n = 0..n_max (or H_n/sqrt(gamma_n) if not weighted)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    scale = np.full(x.shape, -0.25 * math.log(math.pi))
    if weighted:
        scale = scale - 0.5 * x * x
    factor = np.exp(scale)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    yield p * factor
    for n in range(n_max):
        p_next = x * math.sqrt(2.0 / (n + 1.0)) * p - math.sqrt(n / (n + 1.0)) * p_prev
        p_prev, p = p, p_next
        if n % 8 == 7:
            big = np.abs(p) > _RESCALE_AT
            if np.any(big):
                s = np.abs(p[big])
                p[big] /= s
                p_prev[big] /= s
                scale[big] += np.log(s)
                factor[big] = np.exp(scale[big])
        yield p * factor


def laguerre_functions(alpha, n_max, x, weighted=True):
    """Matrix of lhat_n(x_j), shape (n_max+1, len(x))."""
    return np.array(list(iter_laguerre(alpha, n_max, x, weighted)))


def hermite_functions(n_max, x, weighted=True):
    """Matrix of psi_n(x_j), shape (n_max+1, len(x))."""
    return np.array(list(iter_hermite(n_max, x, weighted)))


def _to_values(column):
    return [
        WeightedPolyValue(n, float(v), 0.0 if v != 0.0 else -math.inf) for n, v in enumerate(column)
    ]


def laguerre_orthonormal_row(alpha, n_max, x):
    """[WeightedPolyValue] for lhat_0(x) .. lhat_{n_max}(x) at a scalar x >= 0."""
    return _to_values(laguerre_functions(alpha, n_max, [float(x)])[:, 0])


def hermite_orthonormal_row(n_max, x):
    """[WeightedPolyValue] for psi_0(x) .. psi_{n_max}(x) at a scalar x."""
    return _to_values(hermite_functions(n_max, [float(x)])[:, 0])


# ---------------------------------------------------------------- moments


def _moments_chunk(gen_factory, n_max, x, fws):
    k = len(fws)
    out = np.zeros((k, n_max + 1))
    block = np.empty((_BLOCK, x.size))
    start = 0
    for n, row in enumerate(gen_factory(x)):
        block[n - start] = row
        if n - start == _BLOCK - 1 or n == n_max:
            m = n - start + 1
            for i, fw in enumerate(fws):
                out[i, start : n + 1] = (block[:m] * fw).sum(axis=1)
            start = n + 1
    return out


def _moments(gen_factory, n_max, x, fws, threads):
    x = np.asarray(x, dtype=float)
    fws = [np.asarray(fw, dtype=float) for fw in fws]
    bounds = list(range(0, x.size, _CHUNK)) + [x.size]
    jobs = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]

    def run(job):
        lo, hi = job
        return _moments_chunk(gen_factory, n_max, x[lo:hi], [fw[lo:hi] for fw in fws])

    if threads and threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    # fixed chunk order keeps the reduction independent of the thread count
    total = np.zeros((len(fws), n_max + 1))
    for part in parts:
        total += part
    return total


def laguerre_moments(alpha, n_max, x, fws, threads=1):
    """sum_j fw[j] * lhat_n(x_j) for n = 0..n_max, one row per weight vector in fws."""
    return _moments(lambda xs: iter_laguerre(alpha, n_max, xs), n_max, x, fws, threads)


def hermite_moments(n_max, x, fws, threads=1):
    """sum_j fw[j] * psi_n(x_j) for n = 0..n_max, one row per weight vector in fws."""
    return _moments(lambda xs: iter_hermite(n_max, xs), n_max, x, fws, threads)


# ---------------------------------------------------------------- raw polynomials


def laguerre_poly(n, alpha, x):
    """Raw L_n^(alpha)(x), only for n <= RAW_MAX_DEGREE."""
    if n > RAW_MAX_DEGREE:
        raise ValueError(f"raw Laguerre evaluation limited to n <= {RAW_MAX_DEGREE}")
    if n < 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        prev, cur = cur, ((2 * k + alpha + 1 - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def hermite_poly(n, x):
    """Raw physicists' H_n(x), only for n <= RAW_MAX_DEGREE."""
    if n > RAW_MAX_DEGREE:
        raise ValueError(f"raw Hermite evaluation limited to n <= {RAW_MAX_DEGREE}")
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        prev, cur = cur, 2 * x * cur - 2 * k * prev
    return cur


# ---------------------------------------------------------------- asymptotics


def weighted_laguerre(alpha, n, x):
    """exp(-x/2) x^(alpha/2) L_n^(alpha)(x) at any degree, via the orthonormal row."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    row = None
    for row in iter_laguerre(alpha, n, x):
        pass
    return row * math.exp(0.5 * log_sigma(n, alpha))


def hilb_approx(alpha, n, x, omega_cap=1.0):
    """Main term ntilde^(-alpha/2) Gamma(n+alpha+1)/n! J_alpha(2 sqrt(ntilde x)).

    ntilde = n + (alpha+1)/2.  Valid on 0 < x <= omega_cap; x = 0 returns the
    right limit when alpha >= 0.
    """
    if not alpha > -1:
        raise ValueError("hilb_approx: alpha must be > -1")
    if n < 1:
        raise ValueError("hilb_approx: n must be >= 1")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > omega_cap) or (alpha < 0 and np.any(arr == 0)):
        raise ValueError(f"hilb_approx: x must lie in (0, {omega_cap}]")
    nt = n + 0.5 * (alpha + 1.0)
    pref = math.exp(-0.5 * alpha * math.log(nt) + log_sigma(n, alpha))
    out = pref * bessel_j(alpha, 2.0 * np.sqrt(nt * arr))
    return float(out) if np.ndim(out) == 0 else out


def hilb_residual(alpha, n, x, omega_cap=1.0):
    """Weighted L_n^(alpha) minus its Hilb main term."""
    exact = weighted_laguerre(alpha, n, x)
    out = exact - hilb_approx(alpha, n, np.atleast_1d(x), omega_cap)
    return float(out[0]) if np.ndim(x) == 0 else out


def _oscillation_grid(lo, hi, spacing, per_spacing=12):
    """Points on [lo, hi] with local step spacing(x)/per_spacing."""
    pts = [lo]
    x = lo
    while x < hi:
        x = min(hi, x + spacing(x) / per_spacing)
        pts.append(x)
    return np.array(pts)


def weighted_max_ratio(kind, n, alpha=0.0, lam=0.0, a=1.0, hi=None):
    """Sampled weighted maximum divided by its predicted power of n.

    laguerre: max_{a<=x<=hi} exp(-x/2) x^lam |L_n^(alpha)(x)| / n^max(lam-1/2, alpha/2-1/4),
              default hi = 3n.
    hermite:  max_{a<=x<=hi} exp(-x^2/2) x^lam |H_n(x)| / sqrt(2^n n!) / n^max(lam/2-1/4, -1/4),
              default hi = sqrt(1.5 n).
    At n = 0 the power of n is taken as 1.
    """
    if a <= 0:
        raise ValueError("weighted_max_ratio: a must be > 0")
    if kind == "laguerre":
        hi = 3.0 * max(n, 1) if hi is None else hi
        nt = n + 0.5 * (alpha + 1.0)
        grid = _oscillation_grid(a, hi, lambda x: math.pi * math.sqrt(x / nt))
        row = None
        for row in iter_laguerre(alpha, n, grid):
            pass
        vals = np.abs(row) * math.exp(0.5 * log_sigma(n, alpha)) * grid ** (lam - 0.5 * alpha)
        power = max(lam - 0.5, 0.5 * alpha - 0.25)
    elif kind == "hermite":
        hi = math.sqrt(1.5 * max(n, 1)) if hi is None else hi
        if hi < a:
            hi = a
        grid = _oscillation_grid(a, hi, lambda x: math.pi / math.sqrt(max(2 * n + 1 - x * x, 1.0)))
        row = None
        for row in iter_hermite(n, grid):
            pass
        # psi_n sqrt(gamma_n) / sqrt(2^n n!) = psi_n pi^(1/4)
        vals = np.abs(row) * math.pi**0.25 * grid**lam
        power = max(0.5 * lam - 0.25, -0.25)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    scale = 1.0 if n == 0 else float(n) ** power
    return float(vals.max()) / scale
