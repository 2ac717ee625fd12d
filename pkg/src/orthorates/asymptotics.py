"""Predicted decay rates, empirical rate fits and the Bessel-transform harness.

Every model has the form |c(t)| ~ C t^(-p) L(t)^k where t is a degree n
(L = ln(2 sqrt n)) or a frequency omega (L = ln omega).  Fits subtract the
known log power exactly and regress on log10 t.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coefficients import SMOOTH_FACTORS
from .orthopoly import hermite_moments, laguerre_moments, log_gamma_hermite, log_sigma
from .quadrature import (
    NotConverged,
    SingularOscillatoryPlan,
    build_mesh,
    composite_rule,
    distance_to,
    integrate_singular_oscillatory,
)
from .specfun import bessel_j, log_gamma

TARGETS = ("coefficient", "l2_error", "weighted_sup_error", "sobolev_error")
MAX_SOBOLEV_ORDER = 3


class HypothesisViolation(ValueError):
    """A theorem hypothesis fails for the requested parameters."""


class TooFewPoints(ValueError):
    pass


class ZeroCoefficient(ValueError):
    pass


def _guard(ok, text):
    if not ok:
        raise HypothesisViolation(f"hypothesis violated: {text}")


# ---------------------------------------------------------------- predictions


@dataclass(frozen=True)
class RatePrediction:
    """Decay model t^(-exponent_p) ln^log_power for one quantity.

    ``shift`` is raw exponent minus normalized exponent (alpha/2 for
    Laguerre coefficients).  For raw Hermite coefficients the model carries
    an extra n^(-n/2) factor, flagged by ``factorial_half``.
    """

    exponent_p: float
    log_power: int
    target: str
    source: str
    view: str = "normalized"
    shift: float = 0.0
    factorial_half: bool = False
    m: int = 0

    @property
    def raw_exponent(self):
        return self.exponent_p + (0.0 if self.view == "raw" else self.shift)

    @property
    def normalized_exponent(self):
        return self.exponent_p - (self.shift if self.view == "raw" else 0.0)


def predict_rate(spec, alpha=None, target="coefficient", m=0, view=None):
    """Predicted (p, log power) for spec under the given target.

    view applies to coefficients only: 'raw' (a_n, h_n) or 'normalized'
    (ahat_n, hhat_n).  Defaults: raw for Laguerre, normalized for Hermite.
    """
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}")
    mu = int(spec.log_power)
    kind = spec.kind
    if kind != "hermite_interior":
        if alpha is None:
            raise ValueError("Laguerre predictions need alpha")
        _guard(alpha > -1, "alpha > -1")
    if target == "sobolev_error":
        if not 0 <= m <= MAX_SOBOLEV_ORDER:
            raise ValueError(f"Sobolev order m must lie in [0, {MAX_SOBOLEV_ORDER}]")
    if view is None:
        view = "normalized" if kind == "hermite_interior" else "raw"
    if view not in ("raw", "normalized"):
        raise ValueError("view must be 'raw' or 'normalized'")

    if kind == "laguerre_endpoint":
        d = spec.exponent
        _guard(alpha + d > -1, "alpha + delta > -1 (endpoint coefficients)")
        if target == "coefficient":
            raw = alpha + d + 1.0
            p = raw if view == "raw" else raw - alpha / 2
            return RatePrediction(p, mu, target, "endpoint-coefficient", view, alpha / 2)
        if target == "l2_error":
            _guard(alpha + 2 * d > -1, "alpha + 2 delta > -1 (endpoint errors)")
            return RatePrediction((alpha + 2 * d + 1) / 2, mu, target, "endpoint-error")
        if target == "weighted_sup_error":
            _guard(alpha + 2 * d > -0.5, "alpha + 2 delta > -1/2 (endpoint errors)")
            return RatePrediction(alpha / 2 + d + 0.25, mu, target, "endpoint-error")
        _guard(alpha + 2 * d > m - 1, f"alpha + 2 delta > m - 1 = {m - 1} (Sobolev error)")
        return RatePrediction((alpha + 2 * d + 1 - m) / 2, mu, target, "endpoint-sobolev", m=m)

    if kind == "laguerre_interior":
        g = spec.exponent
        _guard(g > -0.5, "gamma > -1/2")
        if target == "coefficient":
            raw = (alpha + g) / 2 + 0.75
            p = raw if view == "raw" else raw - alpha / 2
            return RatePrediction(p, mu, target, "interior-coefficient", view, alpha / 2)
        if target == "l2_error":
            return RatePrediction(g / 2 + 0.25, mu, target, "interior-error")
        if target == "weighted_sup_error":
            _guard(g > 0, "gamma > 0 (interior errors)")
            return RatePrediction(g / 2, mu, target, "interior-error")
        _guard(g > m - 0.5, f"gamma > m - 1/2 = {m - 0.5} (Sobolev error)")
        return RatePrediction((g - m) / 2 + 0.25, mu, target, "interior-sobolev", m=m)

    s = spec.exponent
    _guard(s > 0, "s > 0 (Hermite coefficients)")
    if target == "coefficient":
        if view == "raw":
            # |h_n| = O(n^(-(n+s)/2 - 1) ln^mu)
            return RatePrediction(s / 2 + 1.0, mu, target, "hermite-coefficient", "raw", 0.25, factorial_half=True)
        return RatePrediction(s / 2 + 0.75, mu, target, "hermite-coefficient", "normalized", 0.25)
    if target == "l2_error":
        return RatePrediction(s / 2 + 0.25, mu, target, "hermite-error")
    if target == "weighted_sup_error":
        return RatePrediction(s / 2, mu, target, "hermite-error")
    _guard(s > m - 0.5, f"s > m - 1/2 = {m - 0.5} (finite W^m norm)")
    return RatePrediction((s - m) / 2 + 0.25, mu, target, "hermite-sobolev", m=m)


def max_rule(branches):
    """Dominant term among t^(-p) ln^k branches: smallest p, ties to larger k."""
    best = None
    for p, k in branches:
        if best is None or p < best[0] - 1e-12 or (abs(p - best[0]) <= 1e-12 and k > best[1]):
            best = (float(p), int(k))
    return best


# ---------------------------------------------------------------- fitting


@dataclass
class FitResult:
    exponent_hat: float
    intercept: float
    max_residual: float
    window: tuple
    n_points: int
    log_power: int = 0
    view: str = "pointwise"
    abscissa: str = "n"
    points: tuple = ()
    predicted_p: Optional[float] = None
    branches: tuple = ()
    meta: dict = field(default_factory=dict)

    def passes(self, tol):
        return self.predicted_p is not None and abs(self.exponent_hat - self.predicted_p) <= tol


def _log_factor(t, abscissa):
    if abscissa == "n":
        return np.log(2.0 * np.sqrt(t))
    return np.log(t)


def fit_power_law(t, values, log_power=0, abscissa="n", window=None, view="pointwise", min_points=5):
    """Least squares log10|c| - k log10 L(t) = intercept - p log10 t."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, values = t[keep], values[keep]
    if t.size < min_points:
        raise TooFewPoints(f"need >= {min_points} points, got {t.size}")
    if np.any(values == 0):
        raise ZeroCoefficient("zero value in fit window; filter parity-null entries first")
    if log_power and np.any(_log_factor(t, abscissa) <= 0):
        raise ValueError("log factor must be positive on the fit window")
    y = np.log10(np.abs(values))
    if log_power:
        y = y - log_power * np.log10(_log_factor(t, abscissa))
    A = np.column_stack([np.ones_like(t), -np.log10(t)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.max(np.abs(A @ coef - y)))
    win = (float(t.min()), float(t.max())) if window is None else tuple(window)
    return FitResult(
        exponent_hat=float(coef[1]),
        intercept=float(coef[0]),
        max_residual=resid,
        window=win,
        n_points=int(t.size),
        log_power=int(log_power),
        view=view,
        abscissa=abscissa,
        points=(t, values),
    )


def envelope_peaks(n, values, stride=1):
    """Indices of local maxima of |values| along each residue class n mod stride.

    n must be consecutive integers.  Endpoints are never peaks.
    """
    n = np.asarray(n)
    a = np.abs(np.asarray(values, dtype=float))
    out = []
    for r in range(stride):
        idx = np.flatnonzero(n % stride == r)
        if idx.size < 3:
            continue
        s = a[idx]
        mid = np.arange(1, idx.size - 1)
        is_peak = (s[mid] >= s[mid - 1]) & (s[mid] > s[mid + 1])
        out.extend(idx[mid[is_peak]])
    return np.array(sorted(out), dtype=int)


def fit_rate(series, log_power, window=(64, 2048), view="pointwise", stride=None, raw=False):
    """Fit the decay exponent of a CoefficientSeries.

    pointwise: every gated coefficient in the window.
    envelope:  local maxima of |c_n| (per residue class mod ``stride``; 2 for
               Hermite, whose neighbouring degrees are a quarter period out of
               phase) on a consecutive-n series, then a pointwise fit of those.
    raw=True fits un-normalized Laguerre coefficients a_n.
    """
    n = np.asarray(series.n_values)
    vals = series.raw() if raw else series.coeff_normalized
    if view == "envelope":
        if np.any(np.diff(n) != 1):
            raise ValueError("envelope fits need consecutive n values")
        if stride is None:
            stride = 2 if series.basis == "hermite" else 1
        idx = envelope_peaks(n, vals, stride)
    elif view == "pointwise":
        idx = np.arange(n.size)
    else:
        raise ValueError("view must be 'pointwise' or 'envelope'")
    idx = idx[series.gated[idx]]
    res = fit_power_law(n[idx], vals[idx], log_power, "n", window, view)
    res.meta["raw"] = raw
    return res


# ---------------------------------------------------------------- Bessel-transform harness


FAMILIES = (
    "log_at_origin",
    "log_at_b",
    "interior_left",
    "interior_right",
    "signed_power",
    "laguerre_degree",
    "hermite_degree",
)


@dataclass
class BesselParams:
    """Parameters of the Bessel-transform and degree integrals (unused fields are ignored).

    equation selects the integral for laguerre_degree ('zero_log_at_0' or
    'zero_log_at_b' on [0, b]; 'interior_log_at_a' or 'interior_log_at_b' on
    [a, b]) and hermite_degree ('log_at_b' or 'log_at_a'); parity selects
    even or odd n for hermite_degree.
    """

    alpha: float = 0.5
    beta: float = 0.0
    tau: float = 0.0
    mu: int = 0
    nu: float = 0.0
    a: float = 0.0
    b: float = 1.0
    delta: float = 0.0
    psi: str = "1"
    equation: str = ""
    parity: str = "even"


DEFAULT_OMEGAS = tuple(2.0**k for k in range(4, 15))
DEFAULT_DEGREE_WINDOW = (64, 2048)


def _psi(name):
    if name not in SMOOTH_FACTORS:
        raise ValueError(f"psi must be one of {sorted(SMOOTH_FACTORS)}")
    return SMOOTH_FACTORS[name]


def _log_pow(d, mu):
    return np.log(d) ** mu if mu else 1.0


def _omega_family(family, P):
    """(interval, singular points, integrand(omega) -> f(x, d, c), branches, oscillation length)."""
    a, b, mu, beta, nu = P.a, P.b, int(P.mu), P.beta, P.nu
    psi = _psi(P.psi)
    if family in ("log_at_origin", "log_at_b"):
        al = P.alpha
        _guard(al + nu > -1, "alpha + nu > -1")
        _guard(beta > -1, "beta > -1")
        _guard(b > 0, "b > 0")
        at0 = family.endswith("_0")

        def make(omega):
            def f(x, d, c):
                x0 = distance_to(0.0, x, d, c)
                xb = distance_to(b, x, d, c)
                lg = _log_pow(x0 if at0 else xb, mu)
                return lg * x0**al * xb**beta * bessel_j(nu, omega * x0) * psi(x)

            return f

        lo = (P.alpha + 1.0, mu if at0 else 0)
        hi = (min(beta + 1.5, 1.5), 0 if at0 else mu)
        return (0.0, b), [0.0, b], make, [lo, hi], b

    if family in ("interior_left", "interior_right"):
        _guard(beta > -1, "beta > -1")
        _guard(0 < a < b, "0 < a < b")
        _guard(nu > -1, "nu > -1")
        left = family.endswith("left")
        p0 = a if left else b

        def make(omega):
            def f(x, d, c):
                t = distance_to(p0, x, d, c)
                return _log_pow(t, mu) * t**beta * psi(x) * bessel_j(nu, omega * x)

            return f

        return (a, b), [a, b], make, [(beta + 1.5, mu), (1.5, 0)], a

    if family == "signed_power":
        al, de = P.alpha, P.delta
        _guard(float(al).is_integer(), "alpha must be an integer (sign of x^alpha)")
        _guard(a < b, "a < b")
        _guard(nu > -1, "nu > -1")
        if 0 < a:
            _guard(beta > -1, "beta > -1 (0 < a)")
            branches = [(beta + 1.5, mu), (1.5, 0)]
        elif a == 0:
            _guard(al + de + beta + nu > -1, "alpha + delta + beta + nu > -1 (a = 0)")
            branches = [(al + de + beta + 1.0, mu), (1.5, 0)]
        elif b >= 0:
            _guard(al + de + nu > -1 and beta > -1, "alpha + delta + nu > -1 and beta > -1 (a < 0 <= b)")
            branches = [(al + de + 1.0, 0), (min(beta + 1.5, 1.5), mu)]
        else:
            _guard(beta > -1, "beta > -1 (b < 0)")
            branches = [(beta + 1.5, mu), (1.5, 0)]
        sing = sorted({a, b} | ({0.0} if a <= 0 <= b else set()))

        def make(omega):
            def f(x, d, c):
                ax = distance_to(0.0, x, d, c)
                t = distance_to(a, x, d, c)
                sign = np.sign(x) ** int(al)
                return sign * ax ** (al + de) * _log_pow(t, mu) * t**beta * psi(x) * bessel_j(nu, omega * ax)

            return f

        osc = min(abs(v) for v in (a, b) if v != 0)
        return (a, b), sing, make, branches, osc
    raise ValueError(f"unknown omega family {family!r}")


def _omega_samples(family, params, omegas, view, samples_per_period=12, tol=1e-13):
    interval, sing, make, branches, osc = _omega_family(family, params)
    width = interval[1] - interval[0]
    ts, vals = [], []
    for om in omegas:
        if view == "envelope":
            period = 2.0 * math.pi / osc
            grid = om + period * np.arange(samples_per_period) / samples_per_period
        else:
            grid = [om]
        best_t, best_v = None, None
        for w in grid:
            plan = SingularOscillatoryPlan(
                interval=interval,
                singular_points=sing,
                half_wavelength=lambda x, w=w: 0.5 * math.pi / w,
                max_width=min(1.0, width),
                abs_tol=tol * 1e-3,
                rel_tol=1e-9,
            )
            try:
                v, _ = integrate_singular_oscillatory(make(w), plan, local=True)
            except NotConverged as exc:
                raise NotConverged(f"omega={w}: {exc}") from exc
            if best_v is None or abs(v) > abs(best_v):
                best_t, best_v = float(w), v
        ts.append(best_t)
        vals.append(best_v)
    return np.array(ts), np.array(vals), branches


def _laguerre_family(P, n_max, threads):
    """log|I_n| for n <= n_max, I_n = int F(x) L_n^(alpha)(x) dx."""
    al, be, ta, mu, a, b = P.alpha, P.beta, P.tau, int(P.mu), P.a, P.b
    _guard(al > -1, "alpha > -1")
    _guard(be > -1, "beta > -1")
    psi = _psi(P.psi)
    eq = P.equation or "zero_log_at_0"
    nt = n_max + 0.5 * (al + 1.0)
    if eq in ("zero_log_at_0", "zero_log_at_b"):
        _guard(b > 0, "0 = a < b")
        _guard(ta + 1 > 0, "tau > -1 (integrability at 0)")
        lo = 0.0
        n_term = -(al - ta - 1.0)
        b_term = -max((al - be) / 2 - 0.75, al / 2 - 0.75)
        branches = [(n_term, mu), (b_term, 0)] if eq == "zero_log_at_0" else [(n_term, 0), (b_term, mu)]
    elif eq in ("interior_log_at_a", "interior_log_at_b"):
        _guard(0 < a < b, "0 < a < b")
        lo = a
        branches = [((be - al) / 2 + 0.75, mu), (0.75 - al / 2, 0)]
    else:
        raise ValueError(f"laguerre_degree equation must be zero_log_at_0, zero_log_at_b, interior_log_at_a or interior_log_at_b, got {eq!r}")
    plan = SingularOscillatoryPlan(
        interval=(lo, b),
        singular_points=[lo, b],
        half_wavelength=lambda x: 0.5 * math.pi * math.sqrt(max(x, 1e-300) / nt),
        max_width=0.25,
    )
    mesh = build_mesh(plan)
    x, w, d, c = composite_rule(mesh, plan.panel_order, offsets=True)
    x0 = distance_to(0.0, x, d, c)
    xb = distance_to(b, x, d, c)
    if eq in ("zero_log_at_0", "zero_log_at_b"):
        lg = _log_pow(x0 if eq == "zero_log_at_0" else xb, mu)
        # I_n = sqrt(sigma_n) sum w F e^{x/2} x^{-alpha/2} lhat_n
        fw = w * lg * x0 ** (ta - al / 2) * xb**be * np.exp(-x / 2) * psi(x)
    else:
        xa = distance_to(a, x, d, c)
        t = xa if eq == "interior_log_at_a" else xb
        fw = w * _log_pow(t, mu) * t**be * psi(x) * x0 ** (al / 2) * np.exp(-x / 2)
    mom = laguerre_moments(al, n_max, x0, [fw], threads)[0]
    n = np.arange(n_max + 1)
    with np.errstate(divide="ignore"):
        logv = np.log(np.abs(mom)) + 0.5 * log_sigma(n, al)
    return n, logv, branches


def _hermite_family(P, n_max, threads):
    """log|I_n| - n ln 2 - ln floor(n/2)!, I_n = int F(x) e^(-x^2) H_n(x) dx."""
    be, mu, a, b = P.beta, int(P.mu), P.a, P.b
    _guard(be > -1, "beta > -1")
    _guard(a < b, "a < b")
    psi = _psi(P.psi)
    eq = P.equation or "log_at_b"
    if eq not in ("log_at_b", "log_at_a"):
        raise ValueError(f"hermite_degree equation must be log_at_b or log_at_a, got {eq!r}")
    two_n = 2.0 * n_max + 1.0
    plan = SingularOscillatoryPlan(
        interval=(a, b),
        singular_points=[a, b],
        half_wavelength=lambda x: 0.5 * math.pi / math.sqrt(max(two_n - x * x, 1.0)),
        max_width=0.25,
    )
    mesh = build_mesh(plan)
    x, w, d, c = composite_rule(mesh, plan.panel_order, offsets=True)
    t = distance_to(b if eq == "log_at_b" else a, x, d, c)
    fw = w * _log_pow(t, mu) * t**be * np.exp(-0.5 * x * x) * psi(x)
    mom = hermite_moments(n_max, x, [fw], threads)[0]
    n = np.arange(n_max + 1)
    with np.errstate(divide="ignore"):
        logv = (
            np.log(np.abs(mom))
            + 0.5 * log_gamma_hermite(n)
            - n * math.log(2.0)
            - log_gamma(np.floor(n / 2) + 1.0)
        )
    if P.parity == "even":
        branches = [(be / 2 + 1.0, mu), (1.0, mu)]
    elif P.parity == "odd":
        branches = [(be / 2 + 0.5, mu), (0.5, mu)]
    else:
        raise ValueError("parity must be 'even' or 'odd'")
    return n, logv, branches


def bessel_transform_decay(family, params=None, omegas=None, window=None, view="envelope", threads=1):
    """Evaluate a Bessel-transform or degree integral along omega (or n) and fit its decay.

    Returns a FitResult whose predicted_p and log_power come from the max-rule
    of the stated asymptotics; branches lists every (p, log power) term.

    envelope view: for omega families each omega is replaced by the largest
    |I| over one oscillation period starting at omega; for degree families
    the local maxima of |I_n| are fitted.
    """
    P = params or BesselParams()
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if family in ("laguerre_degree", "hermite_degree"):
        lo, hi = window or DEFAULT_DEGREE_WINDOW
        n_max = int(hi) + 2
        if family == "laguerre_degree":
            n, logv, branches = _laguerre_family(P, n_max, threads)
            keep = np.ones(n.size, dtype=bool)
        else:
            n, logv, branches = _hermite_family(P, n_max, threads)
            keep = (n % 2 == 0) if P.parity == "even" else (n % 2 == 1)
        n, logv = n[keep], logv[keep]
        vals = np.exp(logv - logv[n >= lo].max())  # scale out huge magnitudes before fitting
        # dyadic degrees (shifted by one for odd parity)
        odd = family == "hermite_degree" and P.parity == "odd"
        dyadic = 2 ** np.arange(1, int(math.log2(hi)) + 1) + int(odd)
        idx = np.flatnonzero(np.isin(n, dyadic))
        used = "pointwise"
        if view == "envelope":
            peaks = envelope_peaks(np.arange(n.size), vals)
            in_win = peaks[(n[peaks] >= lo) & (n[peaks] <= hi)]
            # a non-oscillating sequence is its own envelope
            if in_win.size >= 5:
                idx, used = peaks, "envelope"
        p, k = max_rule(branches)
        res = fit_power_law(n[idx], vals[idx], k, "n", (lo, hi), used)
        res.intercept += float(logv[n >= lo].max()) / math.log(10.0)
    else:
        omegas = np.asarray(omegas if omegas is not None else DEFAULT_OMEGAS, dtype=float)
        t, vals, branches = _omega_samples(family, P, omegas, view)
        p, k = max_rule(branches)
        res = fit_power_law(t, vals, k, "omega", None, view)
    res.predicted_p = p
    res.branches = tuple(branches)
    res.meta.update(family=family, params=P)
    return res
