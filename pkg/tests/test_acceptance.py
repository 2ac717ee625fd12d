"""Acceptance criteria 1-10 at their stated tolerances.

Each test records one PASS/FAIL line (printed in the terminal summary by
conftest.py) before asserting, so a failing criterion still reports its
worst case.
"""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from orthorates.asymptotics import BesselParams, bessel_transform_decay, fit_power_law, fit_rate, predict_rate
from orthorates.coefficients import (
    SingularFunctionSpec,
    closed_form_series,
    derivative_coefficient,
    hermite_coeffs,
    laguerre_coeffs,
)
from orthorates.orthopoly import (
    hermite_functions,
    hermite_poly,
    hilb_approx,
    iter_laguerre,
    laguerre_functions,
    laguerre_poly,
    log_gamma_hermite,
    log_sigma,
)
from orthorates.projection import l2_tail_error, weighted_sup_errors
from orthorates.quadrature import gauss_rule

THREADS = os.cpu_count() or 1
DYADIC_N = 2 ** np.arange(6, 11)  # 64 .. 1024


def _worst(items):
    return "; ".join(items)


def _report(record, k, checks):
    """checks: list of (ok, text).  Records the line and asserts."""
    ok = all(c for c, _ in checks)
    failing = [t for c, t in checks if not c]
    record(k, ok, _worst(failing) if failing else _worst(t for _, t in checks[:3]))
    assert ok, "\n".join(t for _, t in checks)


def test_criterion_01_orthonormality(record):
    worst = 0.0
    for alpha in (-0.5, 0.0, 1.0):
        rule = gauss_rule("laguerre", 80, alpha=alpha)
        P = laguerre_functions(alpha, 50, rule.nodes, weighted=False)
        worst = max(worst, np.max(np.abs((P * rule.weights) @ P.T - np.eye(51))))
    rule = gauss_rule("hermite", 80)
    P = hermite_functions(50, rule.nodes, weighted=False)
    worst = max(worst, np.max(np.abs((P * rule.weights) @ P.T - np.eye(51))))
    _report(record, 1, [(worst <= 1e-10, f"max Gram deviation {worst:.2e} (tol 1e-10)")])


def test_criterion_02_oracle_equivalence(record):
    n = np.arange(201)
    worst, where = 0.0, None
    for alpha, delta in ((0.0, 0.5), (1.0, 1.2), (-0.5, 0.7)):
        for mu in (0, 1, 2):
            spec = SingularFunctionSpec("laguerre_endpoint", delta, mu)
            q = laguerre_coeffs(spec, alpha, n, threads=THREADS)
            exact = closed_form_series(spec, alpha, n).coeff_normalized
            rel = np.abs(q.coeff_normalized - exact) / np.abs(exact)
            if rel.max() > worst:
                worst, where = float(rel.max()), (alpha, delta, mu, int(n[np.argmax(rel)]))
    _report(record, 2, [(worst <= 1e-7, f"worst relative error {worst:.2e} at (alpha, delta, mu, n) = {where} (tol 1e-7)")])


def test_criterion_03_endpoint_coefficient_slope(record):
    checks = []
    spec = SingularFunctionSpec("laguerre_endpoint", 1.2, 3)
    for alpha in (0.0, 1.0, 2.0):
        s = closed_form_series(spec, alpha, 2 ** np.arange(4, 12))
        pred = predict_rate(spec, alpha, "coefficient")
        fit = fit_rate(s, pred.log_power, (64, 2048), raw=True)
        target = alpha + 1.2 + 1
        checks.append((abs(fit.exponent_hat - target) <= 0.1, f"alpha={alpha:g}: raw slope {fit.exponent_hat:.3f} vs {target:.2f}"))
    _report(record, 3, checks)


def test_criterion_04_interior_coefficient_slope(record):
    checks = []
    n = np.arange(16, 2049)
    for gamma, mu in ((1.2, 2), (3.0, 1)):
        spec = SingularFunctionSpec("laguerre_interior", gamma, mu, 0.3)
        for alpha in (0.0, 1.0):
            s = laguerre_coeffs(spec, alpha, n, threads=THREADS)
            fit = fit_rate(s, mu, (64, 2048), "envelope", raw=True)
            target = (alpha + gamma) / 2 + 0.75
            checks.append((abs(fit.exponent_hat - target) <= 0.1,
                           f"gamma={gamma:g} mu={mu} alpha={alpha:g}: {fit.exponent_hat:.3f} vs {target:.2f}"))
    _report(record, 4, checks)


def _error_slopes(spec, alpha, series, checks, l2_target, sup_target):
    label = f"{spec.kind} e={spec.exponent:g} mu={spec.log_power} alpha={alpha}"
    l2 = l2_tail_error(series, DYADIC_N).errors
    sup = weighted_sup_errors(spec, series, DYADIC_N)
    k = spec.log_power
    p2 = fit_power_law(DYADIC_N, l2, k).exponent_hat
    ps = fit_power_law(DYADIC_N, sup, k).exponent_hat
    checks.append((abs(p2 - l2_target) <= 0.1, f"{label}: L2 {p2:.3f} vs {l2_target:.3f}"))
    checks.append((abs(ps - sup_target) <= 0.15, f"{label}: sup {ps:.3f} vs {sup_target:.3f}"))


def test_criterion_05_error_slopes(record):
    checks = []
    for delta, mu in ((1.2, 3), (4.0, 1)):
        spec = SingularFunctionSpec("laguerre_endpoint", delta, mu)
        for alpha in (0.0, 1.0, 2.0):
            # exact coefficients: quadrature sits on a ~1e-13 floor below the delta = 4 tail
            s = closed_form_series(spec, alpha, np.arange(4097))
            _error_slopes(spec, alpha, s, checks, (alpha + 2 * delta + 1) / 2, alpha / 2 + delta + 0.25)
    for gamma, mu in ((1.2, 2), (3.0, 1)):
        spec = SingularFunctionSpec("laguerre_interior", gamma, mu, 0.3)
        for alpha in (0.0, 1.0, 2.0):
            s = laguerre_coeffs(spec, alpha, np.arange(8193), threads=THREADS)
            _error_slopes(spec, alpha, s, checks, gamma / 2 + 0.25, gamma / 2)
    _report(record, 5, checks)


def test_criterion_06_hermite(record):
    checks = []
    spec = SingularFunctionSpec("hermite_interior", 1.2, 2, 3.0)
    s = hermite_coeffs(spec, np.arange(8193), threads=THREADS)
    fit = fit_rate(s, 2, (64, 2048), "envelope")
    checks.append((abs(fit.exponent_hat - 1.35) <= 0.1, f"normalized coefficient slope {fit.exponent_hat:.3f} vs 1.35"))
    p2 = fit_power_law(DYADIC_N, l2_tail_error(s, DYADIC_N).errors, 2).exponent_hat
    checks.append((abs(p2 - 0.85) <= 0.1, f"L2 slope {p2:.3f} vs 0.85"))
    n = 512
    log_h = math.log(abs(s.coeff_normalized[n])) - 0.5 * float(log_gamma_hermite(n))
    ratio = (log_h / math.log(n)) / (-(n + 1.2) / 2 - 1)
    checks.append((abs(ratio - 1) <= 0.05, f"log_n|h_n| ratio at n=512 {ratio:.4f} vs 1"))
    _report(record, 6, checks)


BESSEL_CASES = [
    ("log_at_origin", dict(alpha=0.5, beta=0.0, mu=0)),
    ("log_at_origin", dict(alpha=0.5, beta=0.0, mu=2)),
    ("interior_left", dict(beta=-0.5, mu=1, a=0.5, b=2.0)),
    ("interior_left", dict(beta=0.5, mu=1, a=0.5, b=2.0)),
    ("laguerre_degree", dict(alpha=0.0, tau=-0.5, beta=0.0, mu=1, b=1.0, equation="zero_log_at_0")),
    ("laguerre_degree", dict(alpha=0.0, tau=1.0, beta=0.0, mu=0, b=1.0, equation="zero_log_at_0")),
    ("laguerre_degree", dict(alpha=1.0, tau=0.0, beta=-0.5, mu=1, b=1.0, equation="zero_log_at_b")),
    ("laguerre_degree", dict(alpha=0.0, beta=-0.5, mu=1, a=0.5, b=1.5, equation="interior_log_at_a")),
    ("hermite_degree", dict(beta=0.5, a=0.5, b=2.0, parity="even")),
    ("hermite_degree", dict(beta=0.5, a=0.5, b=2.0, parity="odd")),
]


def test_criterion_07_bessel_harness(record):
    checks = []
    for family, kw in BESSEL_CASES:
        fit = bessel_transform_decay(family, BesselParams(**kw), threads=THREADS)
        text = f"{family} {kw}: {fit.exponent_hat:.3f} vs {fit.predicted_p:g}"
        checks.append((abs(fit.exponent_hat - fit.predicted_p) <= 0.1, text))
    _report(record, 7, checks)


def test_criterion_08_hilb_regime(record):
    checks = []
    x = 0.5
    n = np.arange(64, 4097)
    for alpha in (0.0, 0.5):
        weighted = np.empty(n.size)
        for k, row in enumerate(iter_laguerre(alpha, int(n[-1]), np.array([x]))):
            if k >= n[0]:
                weighted[k - n[0]] = row[0] * math.exp(0.5 * log_sigma(k, alpha))
        main = np.array([hilb_approx(alpha, int(k), x) for k in n])
        r = np.abs(weighted - main) / (x**1.25 * n ** (alpha / 2 - 0.75))
        q = r.max() / np.median(r)
        checks.append((q <= 2.0, f"alpha={alpha:g}: max/median {q:.3f} (tol 2)"))
    _report(record, 8, checks)


def test_criterion_09_identities(record):
    worst8 = worst_r = 0.0
    for x in (0.1, 0.9, 2.5):
        for n in range(31):
            even = (-1) ** n * 2 ** (2 * n) * math.factorial(n) * laguerre_poly(n, -0.5, x * x)
            odd = (-1) ** n * 2 ** (2 * n + 1) * math.factorial(n) * x * laguerre_poly(n, 0.5, x * x)
            worst8 = max(worst8, abs(hermite_poly(2 * n, x) - even) / abs(even), abs(hermite_poly(2 * n + 1, x) - odd) / abs(odd))
    for x in (0.5, 1.0, 4.0):
        for alpha in (0.0, 0.5, 2.0):
            for n in range(1, 51):
                lhs = (alpha + 1 - x) * laguerre_poly(n - 1, alpha + 1, x) - x * laguerre_poly(n - 2, alpha + 2, x)
                rhs = n * laguerre_poly(n, alpha, x)
                scale = max(abs(rhs), abs(n * laguerre_poly(n - 1, alpha + 1, x)))
                worst_r = max(worst_r, abs(lhs - rhs) / scale)
    s = laguerre_coeffs(SingularFunctionSpec("laguerre_endpoint", 1.0), 0.0, np.arange(4))
    d = derivative_coefficient(s, 1, 0)
    checks = [
        (worst8 <= 1e-9, f"Hermite-Laguerre identity {worst8:.1e} (tol 1e-9)"),
        (worst_r <= 1e-10, f"Rodrigues k=1 {worst_r:.1e} (tol 1e-10)"),
        (abs(d - 1.0) <= 1e-12, f"derivative coefficient of x: {d!r}"),
    ]
    _report(record, 9, checks)


def test_criterion_10_determinism(record, tmp_path):
    outs = []
    for threads in (1, 4):
        path = tmp_path / f"h{threads}.csv"
        subprocess.run(
            [sys.executable, "-m", "orthorates.cli", "coeffs", "--family", "hermite-interior", "--s", "1.2",
             "--mu", "2", "--z0", "3", "--n", "0:300", "--threads", str(threads), "--out", str(path)],
            check=True, capture_output=True,
        )
        outs.append(path.read_bytes())
    same = outs[0] == outs[1]
    _report(record, 10, [(same, f"CSV bytes identical across --threads 1/4: {same}")])
