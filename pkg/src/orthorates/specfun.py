"""Special functions: log-Gamma, digamma, polygamma and Bessel J of real order.

``log_gamma``, ``digamma`` and ``polygamma`` are thin guarded wrappers over scipy.special.
``bessel_j`` is evaluated here: ascending series for small arguments and the
Hankel large-argument expansion beyond a crossover at ``max(12, 2|nu|)``.
All functions accept scalars or numpy arrays.
"""

import math

import numpy as np
from scipy import special as _sp

# Orders are restricted to keep the Hankel expansion accurate at the crossover.
MAX_ORDER = 6.0
_CROSSOVER = 12.0


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0)):
        raise ValueError("log_gamma: domain error, x must be > 0")
    out = _sp.gammaln(arr)
    return float(out) if scalar else out


def digamma(x):
    """psi(x) = d/dx ln Gamma(x) for x > 0."""
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0)):
        raise ValueError("digamma: domain error, x must be > 0")
    out = _sp.digamma(arr)
    return float(out) if scalar else out


def polygamma(k, x):
    """k-th derivative of digamma at x > 0."""
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0)):
        raise ValueError("polygamma: domain error, x must be > 0")
    out = _sp.polygamma(int(k), arr)
    return float(out) if scalar else out


def _gamma_signed(a):
    """Gamma(a) for real a > -1, a != 0 (reflection below zero)."""
    if a > 0:
        return math.gamma(a)
    # Gamma(a) = pi / (sin(pi a) Gamma(1 - a))
    return math.pi / (math.sin(math.pi * a) * math.gamma(1.0 - a))


def _series(nu, x):
    """Ascending series sum_k (-x^2/4)^k / (k! Gamma(k+nu+1)) * (x/2)^nu."""
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    k = 0
    # terms peak near k ~ x/2 and then fall factorially
    while True:
        k += 1
        term = term * q / (k * (k + nu))
        total = total + term
        if k > 4 and np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
        if k > 400:
            break
    with np.errstate(divide="ignore"):
        pref = np.power(0.5 * x, nu) / _gamma_signed(nu + 1.0)
    return pref * total


def _hankel(nu, x):
    """Large-argument expansion J_nu(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi)."""
    mu4 = 4.0 * nu * nu
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    a = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while np.any(active) and k < 200:
        k += 1
        a_new = a * (mu4 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        # stop each lane at its smallest term (optimal truncation)
        grow = np.abs(a_new) >= np.abs(a)
        active &= ~(grow & (k > 2))
        contrib = np.where(active, a_new, 0.0)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P = P + sign * contrib
        else:
            Q = Q + sign * contrib
        a = np.where(active, a_new, a)
        active &= np.abs(a_new) > 1e-17
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi))


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x), real nu in (-1, MAX_ORDER], x >= 0.

    Raises ValueError at x = 0 for negative orders, where J_nu diverges.
    """
    nu = float(nu)
    if not (nu > -1.0) or nu > MAX_ORDER:
        raise ValueError(f"bessel_j: order {nu} outside (-1, {MAX_ORDER}]")
    arr, scalar = _as_array(x)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise ValueError("bessel_j: x must be finite and >= 0")
    if nu < 0 and np.any(arr == 0):
        raise ValueError("bessel_j: J_nu(0) diverges for nu < 0")
    out = np.empty_like(arr)
    cross = max(_CROSSOVER, 2.0 * abs(nu))
    small = arr <= cross
    if np.any(small):
        out[small] = _series(nu, arr[small])
    if np.any(~small):
        out[~small] = _hankel(nu, arr[~small])
    return float(out) if scalar else out
