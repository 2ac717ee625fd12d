"""Print predicted against fitted decay exponents for the standard parameter sets.

Coefficient slopes use n in [64, 2048]; error slopes use dyadic N in [64, 1024].
"""

import argparse
import os

import numpy as np

from orthorates.asymptotics import fit_power_law, fit_rate, predict_rate
from orthorates.coefficients import SingularFunctionSpec, closed_form_series, hermite_coeffs, laguerre_coeffs
from orthorates.projection import l2_tail_error, weighted_sup_errors

N = 2 ** np.arange(6, 11)


def series_for(spec, alpha, n_max, threads):
    if spec.kind == "laguerre_endpoint":
        return closed_form_series(spec, alpha, np.arange(n_max + 1))
    if spec.kind == "hermite_interior":
        return hermite_coeffs(spec, np.arange(n_max + 1), threads=threads)
    return laguerre_coeffs(spec, alpha, np.arange(n_max + 1), threads=threads)


def rows(spec, alpha, n_max, threads):
    s = series_for(spec, alpha, n_max, threads)
    k = spec.log_power
    pc = predict_rate(spec, alpha, "coefficient")
    view = "pointwise" if spec.kind == "laguerre_endpoint" else "envelope"
    coeff = fit_rate(s, k, (64, 2048), view, raw=pc.view == "raw").exponent_hat
    yield "coefficient", pc.exponent_p, coeff
    yield "l2", predict_rate(spec, alpha, "l2_error").exponent_p, fit_power_law(N, l2_tail_error(s, N).errors, k).exponent_hat
    yield "sup", predict_rate(spec, alpha, "weighted_sup_error").exponent_p, fit_power_law(N, weighted_sup_errors(spec, s, N), k).exponent_hat


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--n-max", type=int, default=8192)
    args = ap.parse_args()
    cases = []
    for alpha in (0.0, 1.0, 2.0):
        cases += [(SingularFunctionSpec("laguerre_endpoint", d, mu), alpha) for d, mu in ((1.2, 3), (4.0, 1))]
        cases += [(SingularFunctionSpec("laguerre_interior", g, mu, 0.3), alpha) for g, mu in ((1.2, 2), (3.0, 1))]
    cases += [(SingularFunctionSpec("hermite_interior", s, mu, 3.0), None) for s, mu in ((0.5, 0), (1.2, 2), (3.0, 1))]
    print(f"{'kind':18s} {'exp':>4s} {'mu':>2s} {'alpha':>5s} {'target':11s} {'predicted':>9s} {'fitted':>8s}")
    for spec, alpha in cases:
        for target, p, fit in rows(spec, alpha, args.n_max, args.threads):
            a = "-" if alpha is None else f"{alpha:g}"
            print(f"{spec.kind:18s} {spec.exponent:4g} {spec.log_power:2d} {a:>5s} {target:11s} {p:9.3f} {fit:8.3f}")


if __name__ == "__main__":
    main()
