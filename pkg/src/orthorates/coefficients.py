"""Laguerre and Hermite expansion coefficients of singular functions.

The stored quantities are the normalized coefficients

    ahat_n = a_n(alpha) sqrt(sigma_n^(alpha)) = int f exp(-x/2) x^(alpha/2) lhat_n dx,
    hhat_n = h_n sqrt(gamma_n)                = int f exp(-x^2/2) psi_n dx,

computed for every degree up to max(n_values) in one sweep of the
orthonormal recurrence over a graded composite Gauss-Legendre mesh.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .orthopoly import hermite_moments, laguerre_moments, log_gamma_hermite, log_sigma
from .quadrature import Envelope, distance_to, SingularOscillatoryPlan, build_mesh, composite_rule, truncation_point
from .specfun import log_gamma, polygamma

KINDS = ("laguerre_endpoint", "laguerre_interior", "hermite_interior")

SMOOTH_FACTORS = {
    "1": lambda x: np.ones_like(x),
    "exp(-x)": lambda x: np.exp(-x),
    "1/(1+x^2)": lambda x: 1.0 / (1.0 + x * x),
}


class SpecError(ValueError):
    """Function family parameters violate a structural requirement."""


@dataclass(frozen=True)
class SingularFunctionSpec:
    """f(x) = |x - location|^exponent ln^log_power|x - location| g(x).

    For ``laguerre_endpoint`` the location is 0 and the factor reads
    x^delta ln^mu(x) g(x).
    """

    kind: str
    exponent: float
    log_power: int = 0
    location: Optional[float] = None
    smooth_factor: str = "1"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown kind {self.kind!r}")
        if int(self.log_power) != self.log_power or self.log_power < 0:
            raise SpecError("log_power must be a nonnegative integer")
        if self.smooth_factor not in SMOOTH_FACTORS:
            raise SpecError(f"smooth_factor must be one of {sorted(SMOOTH_FACTORS)}")
        if self.kind == "laguerre_endpoint":
            if self.location not in (None, 0, 0.0):
                raise SpecError("endpoint family has its singularity at 0; omit location")
        elif self.location is None:
            raise SpecError(f"{self.kind} needs a location")
        if self.kind == "laguerre_interior":
            if self.location == 0:
                raise SpecError("x0 = 0 is the endpoint family; use kind='laguerre_endpoint'")
            if self.location < 0:
                raise SpecError("laguerre_interior needs x0 > 0")
            if not self.exponent > -0.5:
                raise SpecError("laguerre_interior needs gamma > -1/2")
        if self.kind == "hermite_interior" and not self.exponent > 0:
            raise SpecError("hermite_interior needs s > 0")

    @property
    def singular_point(self):
        return 0.0 if self.kind == "laguerre_endpoint" else float(self.location)

    @property
    def basis(self):
        return "hermite" if self.kind == "hermite_interior" else "laguerre"

    def g(self, x):
        return SMOOTH_FACTORS[self.smooth_factor](np.asarray(x, dtype=float))

    def distance(self, x, offset=None, anchor=None):
        """|x - singular point|, exact when the node is given as anchor + offset."""
        x = np.asarray(x, dtype=float)
        if offset is None:
            return np.abs(x - self.singular_point)
        return distance_to(self.singular_point, x, offset, anchor)

    def __call__(self, x, offset=None, anchor=None):
        x = np.asarray(x, dtype=float)
        d = self.distance(x, offset, anchor)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = d**self.exponent * self.g(x)
            if self.log_power:
                out = out * np.log(d) ** self.log_power
        return out


@dataclass
class CoefficientSeries:
    basis: str
    alpha: Optional[float]
    n_values: np.ndarray
    coeff_normalized: np.ndarray
    err_est: np.ndarray
    converged: np.ndarray
    spec: Optional[SingularFunctionSpec] = None
    meta: dict = field(default_factory=dict)

    @property
    def log10_abs(self):
        with np.errstate(divide="ignore"):
            return np.log10(np.abs(self.coeff_normalized))

    @property
    def gated(self):
        """Accuracy gate for rate fitting: |c_n| >= 10 err_est and converged."""
        return self.converged & (np.abs(self.coeff_normalized) >= 10.0 * self.err_est)

    @property
    def log_norm(self):
        """ln of the normalization sqrt(sigma_n) or sqrt(gamma_n) per entry."""
        if self.basis == "hermite":
            return 0.5 * log_gamma_hermite(self.n_values)
        return 0.5 * log_sigma(self.n_values, self.alpha)

    @property
    def raw_log10(self):
        """log10 |a_n| or log10 |h_n| (un-normalized view, never underflows)."""
        return self.log10_abs - self.log_norm / math.log(10.0)

    def raw(self):
        """Un-normalized coefficients a_n (Laguerre); h_n underflows, use raw_log10."""
        return self.coeff_normalized * np.exp(-self.log_norm)

    def subset(self, mask):
        return CoefficientSeries(
            self.basis,
            self.alpha,
            self.n_values[mask],
            self.coeff_normalized[mask],
            self.err_est[mask],
            self.converged[mask],
            self.spec,
            dict(self.meta),
        )


# ---------------------------------------------------------------- closed form


def _log_abs_pochhammer_neg(delta, n):
    """(ln|(-delta)_n|, sign) with (-delta)_n = prod_{k<n} (k - delta) = Gamma(n-delta)/Gamma(-delta)."""
    k_split = min(n, max(0, math.ceil(delta) + 1))
    logv = 0.0
    sign = 1.0
    for k in range(k_split):
        t = k - delta
        if t == 0.0:
            return -math.inf, 0.0
        logv += math.log(abs(t))
        sign *= math.copysign(1.0, t)
    if n > k_split:
        logv += log_gamma(n - delta) - log_gamma(k_split - delta)
    return logv, sign


def _gamma_ratio(n, alpha, delta):
    """a_n(alpha) of x^delta: Gamma(alpha+delta+1) (-delta)_n / Gamma(n+alpha+1)."""
    lp, sign = _log_abs_pochhammer_neg(delta, n)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_gamma(alpha + delta + 1.0) - log_gamma(n + alpha + 1.0) + lp)


def _fd_weights(order, offsets):
    """Finite-difference weights for the order-th derivative on integer offsets."""
    offsets = np.asarray(offsets, dtype=float)
    k = len(offsets)
    V = np.vander(offsets, k, increasing=True).T
    rhs = np.zeros(k)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def _fd_derivative(func, x0, order, h):
    half = (order + 1) // 2 + 1  # 4th-order central stencil
    offsets = np.arange(-half, half + 1)
    w = _fd_weights(order, offsets)
    vals = np.array([func(x0 + o * h) for o in offsets])
    return float(np.dot(w, vals)) / h**order


def _log_derivatives(n, alpha, delta, mu, skip=None):
    """d^j/d delta^j of ln|prod| for j = 1..mu, where

    prod = Gamma(alpha+delta+1) prod_{k<n, k != skip} (k - delta) / Gamma(n+alpha+1).
    """
    k = np.arange(n, dtype=float)
    if skip is not None:
        k = k[k != skip]
    k = k - delta
    out = []
    for j in range(1, mu + 1):
        tail = math.factorial(j - 1) * float(np.sum(k ** (-j))) if k.size else 0.0
        out.append(polygamma(j - 1, alpha + delta + 1.0) - tail)
    return out


def _exp_derivatives(value, dL, mu):
    # F = exp(L): F^(m) = sum_k C(m-1, k) L^(k+1) F^(m-1-k)
    F = [value]
    for m in range(1, mu + 1):
        F.append(sum(math.comb(m - 1, k) * dL[k] * F[m - 1 - k] for k in range(m)))
    return F


def closed_form_endpoint_coeff(n, alpha, delta, mu=0, return_error=False):
    """a_n(alpha) of f(x) = x^delta ln^mu(x), independent of quadrature.

    mu = 0: Gamma(alpha+delta+1) Gamma(n-delta) / (Gamma(n+alpha+1) Gamma(-delta)),
    exactly 0 for integer delta < n.  For mu >= 1 this is differentiated mu
    times in delta through polygamma values.  When integer delta = d < n the
    product has the factor (d - delta); writing a_n = (d - delta) R(delta)
    gives a_n^(mu)(d) = -mu R^(mu-1)(d).  ``return_error`` adds an error
    estimate, always 0 here.
    """
    if not alpha + delta > -1:
        raise ValueError("closed_form_endpoint_coeff: needs alpha + delta > -1")
    d = float(delta)
    if d.is_integer() and 0 <= d < n:
        if mu == 0:
            val = 0.0
        else:
            lp, sign = _log_abs_pochhammer_neg(delta, int(d))
            rest = log_gamma(n - delta)  # prod_{d<k<n} (k-d) = (n-d-1)!
            logR = log_gamma(alpha + delta + 1.0) - log_gamma(n + alpha + 1.0) + lp + rest
            R = sign * math.exp(logR)
            dL = _log_derivatives(n, alpha, delta, mu - 1, skip=d)
            val = -mu * _exp_derivatives(R, dL, mu - 1)[mu - 1]
        return (val, 0.0) if return_error else val
    F = _exp_derivatives(_gamma_ratio(n, alpha, delta), _log_derivatives(n, alpha, delta, mu), mu)
    return (F[mu], 0.0) if return_error else F[mu]


def fd_endpoint_coeff(n, alpha, delta, mu, h=1e-3):
    """Richardson-extrapolated finite-difference version of the mu-th delta-derivative (cross-check)."""
    func = lambda d: _gamma_ratio(n, alpha, d)
    coarse = _fd_derivative(func, delta, mu, h)
    fine = _fd_derivative(func, delta, mu, h / 2)
    return fine + (fine - coarse) / 15.0


def closed_form_series(spec, alpha, n_values):
    """Exact normalized coefficients of x^delta ln^mu(x) (endpoint family, g = 1).

    Free of the ~1e-13 absolute cancellation floor of direct quadrature, so it
    resolves tails of fast-decaying coefficients (e.g. delta = 4).
    """
    if spec.kind != "laguerre_endpoint" or spec.smooth_factor != "1":
        raise SpecError("closed form exists only for the endpoint family with g = 1")
    n_values = _check_n_values(n_values)
    raw = np.array([closed_form_endpoint_coeff(int(n), alpha, spec.exponent, spec.log_power) for n in n_values])
    values = raw * np.exp(0.5 * log_sigma(n_values, alpha))
    return CoefficientSeries(
        basis="laguerre",
        alpha=alpha,
        n_values=n_values,
        coeff_normalized=values,
        err_est=np.zeros(n_values.size),
        converged=np.ones(n_values.size, dtype=bool),
        spec=spec,
        meta={"source": "closed_form"},
    )


# ---------------------------------------------------------------- quadrature


DEFAULT_TOL = 1e-13
_ENV_TOL = 1e-20


def _tol_vector(values, tol):
    return np.maximum(tol, 1e-6 * np.abs(values))


def _check_n_values(n_values):
    n_values = np.asarray(n_values, dtype=int)
    if n_values.ndim != 1 or n_values.size == 0:
        raise ValueError("n_values must be a nonempty 1-d sequence")
    if np.any(np.diff(n_values) <= 0) or n_values[0] < 0:
        raise ValueError("n_values must be sorted, distinct and nonnegative")
    return n_values


def laguerre_plan(spec, alpha, n_max, env_tol=_ENV_TOL, max_width=1.0):
    """Integration plan on [0, X] resolving lhat_n for all n <= n_max."""
    nt = n_max + 0.5 * (alpha + 1.0)
    p_env = 0.5 * alpha + max(spec.exponent, 0.0) + 0.5 * spec.log_power
    X = truncation_point(Envelope("exp", p_env, 2.0), env_tol)
    sing = [0.0]
    if spec.kind == "laguerre_interior":
        if spec.location >= X:
            raise SpecError(f"x0={spec.location} lies beyond the truncation point {X:.1f}")
        sing.append(spec.location)
    return SingularOscillatoryPlan(
        interval=(0.0, X),
        singular_points=sing,
        half_wavelength=lambda x: 0.5 * math.pi * math.sqrt(x / nt),
        max_width=max_width,
    )


def hermite_plan(spec, n_max, env_tol=_ENV_TOL, max_width=0.5):
    """Integration plan on [-X, X] resolving psi_n for all n <= n_max."""
    p_env = max(spec.exponent, 0.0) + 1.0 + 0.5 * spec.log_power
    X = truncation_point(Envelope("gauss", p_env), env_tol)
    X = max(X, abs(spec.location) + 4.0)
    two_n = 2.0 * n_max + 1.0
    return SingularOscillatoryPlan(
        interval=(-X, X),
        singular_points=[spec.location],
        half_wavelength=lambda x: 0.5 * math.pi / math.sqrt(max(two_n - x * x, 1.0)),
        max_width=max_width,
    )


def _sweep(kind, spec, alpha, plan, n_max, refine, threads):
    mesh = build_mesh(plan, refine)
    x1, w1, t1, c1 = composite_rule(mesh, plan.panel_order, offsets=True)
    x2, w2, t2, c2 = composite_rule(mesh, plan.check_order, offsets=True)
    x = np.concatenate([x1, x2])
    fx = spec(x, np.concatenate([t1, t2]), np.concatenate([c1, c2]))
    if kind == "laguerre":
        weight = np.exp(-0.5 * x + 0.5 * alpha * np.log(x))
    else:
        weight = np.exp(-0.5 * x * x)
    fw = fx * weight
    if not np.all(np.isfinite(fw)):
        raise ValueError("integrand not finite at a quadrature node")
    m1 = x1.size
    fw1 = np.concatenate([fw[:m1] * w1, np.zeros(x2.size)])
    fw2 = np.concatenate([np.zeros(m1), fw[m1:] * w2])
    if kind == "laguerre":
        mom = laguerre_moments(alpha, n_max, x, [fw1, fw2], threads)
    else:
        mom = hermite_moments(n_max, x, [fw1, fw2], threads)
    return mom[0], np.abs(mom[0] - mom[1])


def _compute(kind, spec, alpha, n_values, tol, threads, plan, max_refinements):
    n_values = _check_n_values(n_values)
    n_max = int(n_values[-1])
    for refine in range(max_refinements + 1):
        values, err = _sweep(kind, spec, alpha, plan, n_max, refine, threads)
        ok = err <= _tol_vector(values, tol)
        if np.all(ok[n_values]):
            break
    return CoefficientSeries(
        basis=kind,
        alpha=alpha if kind == "laguerre" else None,
        n_values=n_values,
        coeff_normalized=values[n_values],
        err_est=err[n_values],
        converged=ok[n_values],
        spec=spec,
    )


def laguerre_coeffs(spec, alpha, n_values, tol=DEFAULT_TOL, threads=1, plan=None, max_refinements=2):
    """Normalized Laguerre coefficients ahat_n = a_n(alpha) sqrt(sigma_n) of spec.

    Coefficients whose quadrature estimate misses max(tol, 1e-6|ahat_n|) after
    ``max_refinements`` mesh refinements are returned with converged=False.
    """
    if spec.basis != "laguerre":
        raise SpecError(f"laguerre_coeffs needs a Laguerre family, got {spec.kind}")
    if not alpha > -1:
        raise SpecError("alpha must be > -1")
    if spec.kind == "laguerre_endpoint" and not alpha + spec.exponent > -1:
        raise SpecError("endpoint family needs alpha + delta > -1")
    n_values = _check_n_values(n_values)
    if plan is None:
        plan = laguerre_plan(spec, alpha, int(n_values[-1]))
    return _compute("laguerre", spec, alpha, n_values, tol, threads, plan, max_refinements)


def hermite_coeffs(spec, n_values, tol=DEFAULT_TOL, threads=1, plan=None, max_refinements=2):
    """Normalized Hermite coefficients hhat_n = h_n sqrt(gamma_n) of spec."""
    if spec.kind != "hermite_interior":
        raise SpecError(f"hermite_coeffs needs kind='hermite_interior', got {spec.kind}")
    n_values = _check_n_values(n_values)
    if plan is None:
        plan = hermite_plan(spec, int(n_values[-1]))
    return _compute("hermite", spec, None, n_values, tol, threads, plan, max_refinements)


def derivative_coefficient(series, q, k):
    """a_k^(q)(alpha+q): coefficient of L_k^(alpha+q) in f^(q), from a_{k+q}(alpha).

    (-1)^q [sigma_{k+q}^(alpha) / sigma_k^(alpha+q)] (k+1)...(k+q) a_{k+q}(alpha);
    requires k+q among series.n_values.
    """
    alpha = series.alpha
    idx = np.searchsorted(series.n_values, k + q)
    if idx >= series.n_values.size or series.n_values[idx] != k + q:
        raise KeyError(f"degree {k + q} not in series")
    a = series.raw()[idx]
    log_pref = log_sigma(k + q, alpha) - log_sigma(k, alpha + q) + (log_gamma(k + q + 1.0) - log_gamma(k + 1.0))
    return (-1) ** q * math.exp(log_pref) * a
