"""Gauss rules and a graded composite rule for singular, oscillatory integrands.

Gauss rules come from the symmetric Jacobi matrix (Golub-Welsch), diagonalized
by an implicit-shift QL iteration that tracks only the first component of each
eigenvector.  The composite rule splits an interval into Gauss-Legendre panels
that are (a) no wider than a caller-supplied local half-wavelength and
(b) geometrically graded toward declared singular points.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .specfun import log_gamma

QL_MAX_ITER = 50


class EigenNotConverged(RuntimeError):
    pass


class NotConverged(RuntimeError):
    """Composite quadrature did not meet its tolerance within the refinement cap."""


class NonFinite(RuntimeError):
    """Integrand produced NaN or inf at a quadrature node."""


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    params: tuple = ()

    @property
    def exactness_degree(self):
        return 2 * len(self.nodes) - 1


def tridiagonal_ql(diag, offdiag):
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    diag has length M, offdiag length M-1.  Returns (eigenvalues, first
    components) sorted by eigenvalue.
    """
    d = [float(v) for v in diag]
    m_size = len(d)
    e = [float(v) for v in offdiag] + [0.0]
    z = [0.0] * m_size
    z[0] = 1.0
    eps = np.finfo(float).eps
    for l in range(m_size):
        it = 0
        while True:
            m = l
            while m < m_size - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > QL_MAX_ITER:
                raise EigenNotConverged(f"QL iteration cap reached at eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d)
    return np.asarray(d)[order], np.asarray(z)[order]


def _jacobi(kind, M, alpha):
    k = np.arange(1, M, dtype=float)
    if kind == "laguerre":
        diag = 2 * np.arange(M) + alpha + 1.0
        off = np.sqrt(k * (k + alpha))
        mass = math.exp(log_gamma(alpha + 1.0))
    elif kind == "hermite":
        diag = np.zeros(M)
        off = np.sqrt(k / 2.0)
        mass = math.sqrt(math.pi)
    elif kind == "legendre":
        diag = np.zeros(M)
        off = k / np.sqrt(4 * k * k - 1)
        mass = 2.0
    else:
        raise ValueError(f"unknown rule kind {kind!r}")
    return diag, off, mass


@lru_cache(maxsize=64)
def _gauss_cached(kind, M, alpha):
    diag, off, mass = _jacobi(kind, M, alpha)
    nodes, first = tridiagonal_ql(diag, off)
    weights = mass * first**2
    if kind in ("legendre", "hermite"):
        # symmetrize to remove eigensolver asymmetry
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def gauss_rule(kind, M, alpha=0.0, a=-1.0, b=1.0):
    """M-point Gauss rule for weight x^alpha e^-x, e^-x^2, or 1 on [a, b]."""
    if M < 1:
        raise ValueError("gauss_rule: M must be >= 1")
    if kind == "laguerre" and not alpha > -1:
        raise ValueError("gauss_rule: alpha must be > -1")
    nodes, weights = _gauss_cached(kind, int(M), float(alpha) if kind == "laguerre" else 0.0)
    nodes, weights = nodes.copy(), weights.copy()
    params = ()
    if kind == "laguerre":
        params = (alpha,)
    elif kind == "legendre":
        half = 0.5 * (b - a)
        nodes = a + half * (nodes + 1.0)
        weights = half * weights
        params = (a, b)
    return QuadratureRule(nodes, weights, kind, params)


# ---------------------------------------------------------------- truncation


@dataclass(frozen=True)
class Envelope:
    """exp(-x/q) x^p  (kind='exp')  or  exp(-x^2/2) |x|^p  (kind='gauss')."""

    kind: str
    p: float = 0.0
    q: float = 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "exp":
            return np.exp(-x / self.q) * x**self.p
        return np.exp(-0.5 * x * x) * np.abs(x) ** self.p


def truncation_point(envelope, tol):
    """X beyond which the envelope is decreasing and <= tol."""
    L = math.log(1.0 / tol)
    p = envelope.p
    if envelope.kind == "exp":
        q = envelope.q
        peak = max(p * q, 0.0)
        X = max(q * L, peak, 1.0)
        for _ in range(200):
            X_new = max(q * (p * math.log(X) + L), peak, 1.0)
            if abs(X_new - X) <= 1e-14 * X:
                X = X_new
                break
            X = X_new
    elif envelope.kind == "gauss":
        peak = math.sqrt(max(p, 0.0))
        X = max(math.sqrt(2 * L), peak, 1.0)
        for _ in range(200):
            X_new = max(math.sqrt(max(2 * (p * math.log(X) + L), 0.0)), peak, 1.0)
            if abs(X_new - X) <= 1e-14 * X:
                X = X_new
                break
            X = X_new
    else:
        raise ValueError(f"unknown envelope kind {envelope.kind!r}")
    while float(envelope(X)) > tol:
        X *= 1.0 + 1e-12
    return X


# ---------------------------------------------------------------- composite rule


@dataclass
class SingularOscillatoryPlan:
    interval: tuple
    singular_points: Sequence[float] = ()
    grading_ratio: float = 0.5
    half_wavelength: Optional[Callable[[float], float]] = None
    panel_order: int = 16
    check_order: int = 24
    abs_tol: float = 1e-13
    rel_tol: float = 1e-10
    max_width: Optional[float] = None
    width_floor: Optional[float] = None
    envelope: Optional[Envelope] = None
    truncation_tol: float = 1e-18
    max_refinements: int = 3
    max_panels: int = 2_000_000

    def __post_init__(self):
        if not 0 < self.grading_ratio < 1:
            raise ValueError("grading_ratio must lie in (0, 1)")

    def finite_interval(self):
        a, b = self.interval
        if math.isinf(a) or math.isinf(b):
            if self.envelope is None:
                raise ValueError("infinite interval needs an envelope for truncation")
            X = truncation_point(self.envelope, self.truncation_tol)
            if self.envelope.kind == "exp":
                a = max(a, 0.0) if math.isinf(a) else a
                b = X if math.isinf(b) else b
            else:
                a = -X if math.isinf(a) else a
                b = X if math.isinf(b) else b
        return float(a), float(b)


@dataclass(frozen=True)
class Mesh:
    """Panels [anchor + lo, anchor + hi] stored as offsets from an anchor.

    Anchors are singular points (or 0 when there are none), so the distance
    from a node to its singular point is available to full relative precision
    even when the panel is far narrower than the spacing of doubles near the
    anchor.
    """

    anchors: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __len__(self):
        return self.anchors.size

    @property
    def widths(self):
        return self.hi - self.lo

    def breakpoints(self):
        pts = np.append(self.anchors + self.lo, self.anchors[-1] + self.hi[-1])
        return pts


def _grade(width, ratio, floor):
    """Offsets width*ratio, width*ratio^2, ... down to floor (decreasing)."""
    out = []
    k = width * ratio
    while k > floor:
        out.append(k)
        k *= ratio
    return out


def build_mesh(plan, refine=0):
    """Panel mesh covering the (truncated) interval.

    Singular points become vertices; each panel is no wider than the local
    half-wavelength at its midpoint (halved ``refine`` times); the panels
    touching a singular point are split geometrically down to width_floor.
    """
    a, b = plan.finite_interval()
    scale = max(b - a, 1.0)
    floor = plan.width_floor if plan.width_floor is not None else 1e-30 * scale
    max_width = plan.max_width if plan.max_width is not None else scale
    sing = sorted({float(s) for s in plan.singular_points if a <= s <= b})
    verts = sorted({a, b, *sing})
    hw = plan.half_wavelength
    shrink = 0.5**refine
    ratio = plan.grading_ratio
    sing_arr = np.array(sing)

    def cap(x):
        c = max_width if hw is None else min(max_width, hw(x))
        return c * shrink

    def anchor_of(x):
        if not sing:
            return 0.0
        return float(sing_arr[np.argmin(np.abs(sing_arr - x))])

    anchors, los, his = [], [], []
    for lo, hi in zip(verts[:-1], verts[1:]):
        # bisect until every panel respects the width cap
        pending = [(lo, hi)]
        panels = []
        while pending:
            l, r = pending.pop()
            mid = 0.5 * (l + r)
            both = l == lo and r == hi and lo in sing and hi in sing
            if both or (r - l > cap(mid) and r - l > floor):
                pending.append((mid, r))
                pending.append((l, mid))
            else:
                panels.append((l, r))
                if len(anchors) + len(panels) > plan.max_panels:
                    raise NotConverged("panel cap exceeded while building mesh")
        last = len(panels) - 1
        for j, (l, r) in enumerate(panels):
            if j == 0 and lo in sing:
                offs = [0.0] + _grade(r - lo, ratio, floor)[::-1] + [r - lo]
                anchors.extend([lo] * (len(offs) - 1))
                los.extend(offs[:-1])
                his.extend(offs[1:])
            elif j == last and hi in sing:
                offs = [l - hi] + [-k for k in _grade(hi - l, ratio, floor)] + [0.0]
                anchors.extend([hi] * (len(offs) - 1))
                los.extend(offs[:-1])
                his.extend(offs[1:])
            else:
                c = anchor_of(0.5 * (l + r))
                anchors.append(c)
                los.append(l - c)
                his.append(r - c)
    return Mesh(np.array(anchors), np.array(los), np.array(his))


def composite_rule(mesh, order, offsets=False):
    """Nodes and weights of order-point Gauss-Legendre on every panel of mesh.

    With ``offsets=True`` also returns each node's exact offset from its
    panel anchor (the nearest singular point) and that anchor.
    """
    ref = gauss_rule("legendre", order)
    lo = mesh.lo[:, None]
    half = 0.5 * (mesh.hi - mesh.lo)[:, None]
    t = lo + half * (ref.nodes[None, :] + 1.0)
    nodes = (mesh.anchors[:, None] + t).ravel()
    weights = (half * ref.weights[None, :]).ravel()
    if offsets:
        anchor = np.repeat(mesh.anchors, order)
        return nodes, weights, t.ravel(), anchor
    return nodes, weights


def distance_to(point, x, offset, anchor):
    """|x - point|, exact for nodes anchored at point."""
    return np.where(anchor == point, np.abs(offset), np.abs(x - point))


def _apply(f, nodes, local=None):
    vals = np.asarray(f(nodes) if local is None else f(nodes, *local), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = nodes[~np.isfinite(vals)][0]
        raise NonFinite(f"integrand is not finite at x={bad!r}")
    return vals


def integrate_singular_oscillatory(f, plan, local=False):
    """Composite Gauss-Legendre integral of a vectorized integrand f.

    With ``local=True`` f is called as f(x, d, c): c is the nearest singular
    point and d the exact offset x - c.  Integrands like |x - x0|^s need this
    because their singular factor must not be formed from the rounded node x.
    ``distance_to`` turns (x, d, c) into an exact |x - p|.

    Returns (value, err_est) with value from ``panel_order`` points per panel
    and err_est = |value - value at check_order|.  Refines the mesh up to
    ``max_refinements`` times before raising NotConverged.
    """
    for refine in range(plan.max_refinements + 1):
        mesh = build_mesh(plan, refine)
        x1, w1, d1, c1 = composite_rule(mesh, plan.panel_order, offsets=True)
        x2, w2, d2, c2 = composite_rule(mesh, plan.check_order, offsets=True)
        value = float(np.sum(w1 * _apply(f, x1, (d1, c1) if local else None)))
        check = float(np.sum(w2 * _apply(f, x2, (d2, c2) if local else None)))
        err = abs(value - check)
        if err <= max(plan.abs_tol, plan.rel_tol * abs(value)):
            return value, err
    raise NotConverged(f"err_est={err:.3e} exceeds tolerance after {plan.max_refinements} refinements")
