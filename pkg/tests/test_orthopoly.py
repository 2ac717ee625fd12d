import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthorates.orthopoly import (
    LaguerreBasis,
    hermite_functions,
    hermite_orthonormal_row,
    hermite_poly,
    hilb_approx,
    laguerre_functions,
    laguerre_orthonormal_row,
    laguerre_poly,
    log_gamma_hermite,
    log_sigma,
    weighted_laguerre,
    weighted_max_ratio,
)
from orthorates.quadrature import gauss_rule


def test_log_sigma_values():
    assert log_sigma(0, 0) == 0.0
    assert log_sigma(3, 0) == pytest.approx(0.0, abs=1e-14)
    for n in (1, 10, 100):
        assert log_sigma(n, 1) == pytest.approx(math.log(n + 1), rel=1e-13)
    with pytest.raises(ValueError):
        log_sigma(2, -1.0)


def test_basis_guard():
    with pytest.raises(ValueError):
        LaguerreBasis(-1.0)


def test_first_rows():
    row = laguerre_orthonormal_row(0, 1, 0.0)
    assert [v.full for v in row] == pytest.approx([1.0, 1.0], abs=1e-15)
    row = hermite_orthonormal_row(1, 0.0)
    assert row[0].full == pytest.approx(math.pi**-0.25, rel=1e-15)
    assert row[1].full == 0.0


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0])
def test_laguerre_gram(alpha):
    rule = gauss_rule("laguerre", 80, alpha=alpha)
    P = laguerre_functions(alpha, 50, rule.nodes, weighted=False)
    G = (P * rule.weights) @ P.T
    assert np.max(np.abs(G - np.eye(51))) <= 1e-10


def test_hermite_gram():
    rule = gauss_rule("hermite", 80)
    P = hermite_functions(50, rule.nodes, weighted=False)
    G = (P * rule.weights) @ P.T
    assert np.max(np.abs(G - np.eye(51))) <= 1e-10


@pytest.mark.parametrize("x", [0.1, 0.9, 2.5])
def test_hermite_laguerre_identity(x):
    for n in range(31):
        even = (-1) ** n * 2 ** (2 * n) * math.factorial(n) * laguerre_poly(n, -0.5, x * x)
        odd = (-1) ** n * 2 ** (2 * n + 1) * math.factorial(n) * x * laguerre_poly(n, 0.5, x * x)
        assert hermite_poly(2 * n, x) == pytest.approx(even, rel=1e-9)
        assert hermite_poly(2 * n + 1, x) == pytest.approx(odd, rel=1e-9)


@pytest.mark.parametrize("x", [0.5, 1.0, 4.0])
@pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
def test_rodrigues_first_step(x, alpha):
    # d/dx[e^-x x^(a+1) L_{n-1}^(a+1)] expanded with dL_m^(b)/dx = -L_{m-1}^(b+1)
    for n in range(1, 51):
        lhs = (alpha + 1 - x) * laguerre_poly(n - 1, alpha + 1, x) - x * laguerre_poly(n - 2, alpha + 2, x)
        rhs = n * laguerre_poly(n, alpha, x)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10 * abs(n * laguerre_poly(n - 1, alpha + 1, x)))


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.9, 3.0), st.floats(0.01, 40.0))
def test_orthonormal_matches_raw_laguerre(alpha, x):
    vals = laguerre_functions(alpha, 40, [x])[:, 0]
    for n in (0, 1, 7, 23, 40):
        raw = math.exp(-x / 2 + alpha / 2 * math.log(x) - 0.5 * log_sigma(n, alpha)) * laguerre_poly(n, alpha, x)
        scale = math.exp(-x / 2 + alpha / 2 * math.log(x) - 0.5 * log_sigma(n, alpha)) * max(
            1.0, float(np.max(np.abs([laguerre_poly(k, alpha, x) for k in range(n + 1)])))
        )
        assert abs(vals[n] - raw) <= 1e-12 * scale


@settings(max_examples=50, deadline=None)
@given(st.floats(-8.0, 8.0))
def test_orthonormal_matches_raw_hermite(x):
    vals = hermite_functions(40, [x])[:, 0]
    for n in (0, 1, 9, 30, 40):
        w = math.exp(-x * x / 2 - 0.5 * log_gamma_hermite(n))
        raw = w * hermite_poly(n, x)
        scale = w * max(1.0, float(np.max(np.abs([hermite_poly(k, x) for k in range(n + 1)]))))
        assert abs(vals[n] - raw) <= 1e-12 * scale


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.9, 3.0), st.floats(0.0, 300.0))
def test_laguerre_recurrence_residual(alpha, x):
    P = laguerre_functions(alpha, 200, [x])[:, 0] if x > 0 or alpha >= 0 else None
    if P is None:
        return
    n = np.arange(1, 200)
    lhs = np.sqrt((n + 1.0) * (n + alpha + 1.0)) * P[2:]
    mid = (2 * n + alpha + 1.0 - x) * P[1:-1]
    low = np.sqrt(n * (n + alpha)) * P[:-2]
    scale = np.abs(lhs) + np.abs(mid) + np.abs(low)
    resid = np.abs(lhs - mid + low)
    assert np.all(resid <= 1e-12 * scale + 1e-300)


@settings(max_examples=50, deadline=None)
@given(st.floats(-30.0, 30.0))
def test_hermite_recurrence_residual(x):
    P = hermite_functions(300, [x])[:, 0]
    n = np.arange(1, 300)
    lhs = P[2:]
    rhs = x * np.sqrt(2.0 / (n + 1.0)) * P[1:-1] - np.sqrt(n / (n + 1.0)) * P[:-2]
    scale = np.abs(lhs) + np.abs(x * np.sqrt(2.0 / (n + 1.0)) * P[1:-1]) + np.abs(np.sqrt(n / (n + 1.0)) * P[:-2])
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale + 1e-300)


def test_hermite_parity():
    x = np.linspace(0.1, 6.0, 50)
    P, Q = hermite_functions(40, x), hermite_functions(40, -x)
    for n in range(41):
        assert np.array_equal(Q[n], (-1) ** n * P[n])


def test_far_tail_underflows_to_zero():
    row = laguerre_orthonormal_row(0, 5, 3000.0)
    assert all(v.full == 0.0 for v in row)


def test_hilb_limit_at_zero():
    for n in (1, 10, 500):
        assert hilb_approx(0, n, 0.0) == pytest.approx(1.0, rel=1e-14)


def test_hilb_moderate_accuracy():
    exact = weighted_laguerre(0.5, 1000, 0.25)
    assert abs(hilb_approx(0.5, 1000, 0.25) - exact) <= 1e-2 * abs(exact)


def test_hilb_domain():
    with pytest.raises(ValueError):
        hilb_approx(0, 10, 1.5)
    with pytest.raises(ValueError):
        hilb_approx(0, 0, 0.5)
    with pytest.raises(ValueError):
        hilb_approx(-0.5, 10, 0.0)


def test_weighted_max_ratio_degree_zero():
    # L_0 = 1: the ratio is the max of the bare weight on [a, hi]
    assert weighted_max_ratio("laguerre", 0, a=1.0, hi=3.0) == pytest.approx(math.exp(-0.5), rel=1e-12)
    assert weighted_max_ratio("hermite", 0, a=1.0) == pytest.approx(math.exp(-0.5), rel=1e-12)


@pytest.mark.parametrize("kind", ["laguerre", "hermite"])
def test_weighted_max_ratio_bounded(kind):
    r = np.array([weighted_max_ratio(kind, 2**k) for k in range(6, 13)])
    assert r.max() <= 2.0 * np.median(r)
