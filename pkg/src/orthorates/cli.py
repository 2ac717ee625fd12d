"""Command-line front end.

Subcommands: coeffs, rates, errors, figures, lemma-check.  All numeric
output is CSV with a ``# meta:`` header block; exit codes are 0 (ok),
2 (hypothesis or parameter guard), 3 (quadrature not converged) and
4 (fitted rate outside --rate-tol).
"""

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .asymptotics import (
    FAMILIES,
    BesselParams,
    HypothesisViolation,
    RatePrediction,
    bessel_transform_decay,
    fit_power_law,
    fit_rate,
    predict_rate,
)
from .coefficients import (
    SMOOTH_FACTORS,
    CoefficientSeries,
    SingularFunctionSpec,
    SpecError,
    closed_form_series,
    hermite_coeffs,
    laguerre_coeffs,
)
from .orthopoly import log_gamma_hermite
from .projection import l2_tail_error, sobolev_error, weighted_sup_errors
from .quadrature import EigenNotConverged, NotConverged

EXIT_OK, EXIT_GUARD, EXIT_QUADRATURE, EXIT_RATE = 0, 2, 3, 4

COEFF_COLUMNS = ("n", "coeff_normalized", "coeff_raw_log10", "err_est", "gated")
FIGURE_COLUMNS = ("n_or_N", "value", "reference_line")

FIGURE_ALPHAS = (0.0, 1.0, 2.0)
FIGURE_HERMITE_SETS = ((0.5, 0), (1.2, 2), (3.0, 1))
FIGURE_Z0 = 3.0


# ---------------------------------------------------------------- config


@dataclass
class RunConfig:
    command: str
    family: str = "laguerre-endpoint"
    alpha: Optional[float] = None
    exponent: Optional[float] = None
    mu: int = 0
    location: Optional[float] = None
    smooth: str = "1"
    n_values: tuple = ()
    tol: float = 1e-13
    out: str = ""
    threads: int = 1
    rate_tol: float = 0.1
    window: tuple = (64, 2048)
    view: str = "auto"
    extra: dict = field(default_factory=dict)

    def spec(self):
        kind = self.family.replace("-", "_")
        if self.exponent is None:
            raise SpecError("missing exponent (--delta, --gamma or --s)")
        return SingularFunctionSpec(kind, self.exponent, self.mu, self.location, self.smooth)


def parse_n_spec(text):
    """'a:b:dyadic' (powers of two in [a, b]), 'a:b' (inclusive), 'a:b:step' or 'n1,n2,...'."""
    text = text.strip()
    if "," in text:
        vals = sorted({int(v) for v in text.split(",") if v})
        return np.array(vals, dtype=int)
    parts = text.split(":")
    if len(parts) == 1:
        return np.array([int(parts[0])])
    lo, hi = int(parts[0]), int(parts[1])
    if hi < lo or lo < 0:
        raise ValueError(f"bad range {text!r}")
    if len(parts) == 2:
        return np.arange(lo, hi + 1)
    if parts[2] == "dyadic":
        k = np.arange(0, int(math.log2(max(hi, 1))) + 1)
        p = 2**k
        return p[(p >= lo) & (p <= hi)].astype(int)
    return np.arange(lo, hi + 1, int(parts[2]))


def parse_window(text):
    lo, hi = text.split(":")
    return (float(lo), float(hi))


# ---------------------------------------------------------------- CSV


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _meta_value(v):
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, (tuple, list, np.ndarray)):
        return " ".join(_meta_value(x) for x in v)
    return str(v)


def render_csv(meta, columns, rows):
    lines = [f"# meta: {k}={_meta_value(v)}" for k, v in meta.items()]
    lines.append(",".join(columns))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\r\n".join(lines) + "\r\n"


def write_atomic(path, text):
    """Write text to path via a temp file in the same directory and rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path):
    """(meta dict, column names, float array) from a CSV written by this tool."""
    meta, header, rows = {}, None, []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# meta:"):
                k, _, v = line[len("# meta:"):].strip().partition("=")
                meta[k] = v
            elif line.startswith("#"):
                continue
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
    return meta, header, np.array(rows, dtype=float).reshape(-1, len(header))


def spec_meta(spec, alpha):
    meta = {"family": spec.kind.replace("_", "-"), "exponent": float(spec.exponent), "mu": int(spec.log_power)}
    if spec.location is not None:
        meta["location"] = float(spec.location)
    meta["smooth_factor"] = spec.smooth_factor
    if alpha is not None:
        meta["alpha"] = float(alpha)
    return meta


def spec_from_meta(meta):
    kind = meta["family"].replace("-", "_")
    loc = float(meta["location"]) if "location" in meta else None
    spec = SingularFunctionSpec(kind, float(meta["exponent"]), int(meta.get("mu", 0)), loc, meta.get("smooth_factor", "1"))
    alpha = float(meta["alpha"]) if "alpha" in meta else None
    return spec, alpha


# ---------------------------------------------------------------- computations


def compute_series(spec, alpha, n_values, tol=1e-13, threads=1, closed_form=False):
    if closed_form:
        return closed_form_series(spec, alpha, n_values)
    if spec.basis == "laguerre":
        return laguerre_coeffs(spec, alpha, n_values, tol=tol, threads=threads)
    return hermite_coeffs(spec, n_values, tol=tol, threads=threads)


def coeff_rows(series):
    raw = series.raw_log10
    return [
        (int(n), c, r, e, bool(g))
        for n, c, r, e, g in zip(series.n_values, series.coeff_normalized, raw, series.err_est, series.gated)
    ]


def reference_line(t, values, p, log_power, log_kind="n"):
    """C t^(-p) L(t)^k anchored at the last point."""
    t = np.asarray(t, dtype=float)
    L = np.log(2.0 * np.sqrt(t)) if log_kind == "n" else np.log(t)
    shape = t ** (-p) * (L**log_power if log_power else 1.0)
    return shape * (abs(values[-1]) / shape[-1])


def rate_report(predicted, tag, fit, tol):
    ok = abs(fit.exponent_hat - predicted) <= tol
    lo, hi = fit.window
    text = (
        f"predicted {predicted:.4g} ({tag}) fitted {fit.exponent_hat:.4f} "
        f"window [{lo:g}, {hi:g}] points {fit.n_points} view {fit.view} "
        f"log power {fit.log_power} max residual {fit.max_residual:.3g} "
        f"{'PASS' if ok else 'FAIL'}"
    )
    return ok, text


def _is_consecutive(n):
    return n.size > 2 and np.all(np.diff(n) == 1)


def fit_series_rate(series, prediction, window, view="auto"):
    """Fit a coefficient series in the view matching the prediction (raw or normalized)."""
    consecutive = _is_consecutive(np.asarray(series.n_values))
    if view == "auto":
        view = "envelope" if series.spec is not None and series.spec.kind != "laguerre_endpoint" and consecutive else "pointwise"
    raw = prediction.view == "raw" and series.basis == "laguerre"
    return fit_rate(series, prediction.log_power, window, view, raw=raw)


# ---------------------------------------------------------------- commands


def cmd_coeffs(cfg):
    spec = cfg.spec()
    pred = predict_rate(spec, cfg.alpha if spec.basis == "laguerre" else None, "coefficient")
    alpha = cfg.alpha if spec.basis == "laguerre" else None
    series = compute_series(spec, alpha, cfg.n_values, cfg.tol, cfg.threads, cfg.extra.get("closed_form", False))
    meta = {"command": "coeffs", **spec_meta(spec, alpha)}
    meta.update(
        n=cfg.extra.get("n_text", ""),
        tol=float(cfg.tol),
        source=series.meta.get("source", "quadrature"),
        predicted_p=float(pred.exponent_p),
        predicted_view=pred.view,
        tag=pred.source,
        version=__version__,
    )
    write_atomic(cfg.out, render_csv(meta, COEFF_COLUMNS, coeff_rows(series)))
    bad = int(np.count_nonzero(~series.converged))
    print(f"wrote {len(series.n_values)} coefficients to {cfg.out}")
    if bad:
        print(f"{bad} coefficients did not reach the quadrature tolerance (gated=0)", file=sys.stderr)
        return EXIT_QUADRATURE
    return EXIT_OK


def series_from_csv(path):
    meta, cols, data = read_csv(path)
    if list(cols) != list(COEFF_COLUMNS):
        raise ValueError(f"{path}: expected columns {','.join(COEFF_COLUMNS)}")
    spec, alpha = (None, None)
    if "family" in meta:
        spec, alpha = spec_from_meta(meta)
    n = data[:, 0].astype(int)
    basis = spec.basis if spec is not None else meta.get("basis", "laguerre")
    if basis == "laguerre" and alpha is None:
        alpha = float(meta.get("alpha", 0.0))
    series = CoefficientSeries(
        basis=basis,
        alpha=alpha if basis == "laguerre" else None,
        n_values=n,
        coeff_normalized=data[:, 1],
        err_est=data[:, 3],
        converged=np.ones(n.size, dtype=bool),
        spec=spec,
    )
    # respect the stored gate
    series.err_est = np.where(data[:, 4] > 0, series.err_est, np.inf)
    return meta, series


def cmd_rates(cfg):
    meta, series = series_from_csv(cfg.extra["csv"])
    if cfg.extra.get("predicted") is not None:
        pred = RatePrediction(cfg.extra["predicted"], cfg.extra.get("log_power") or 0, "coefficient", "given", "normalized")
    elif series.spec is not None:
        pred = predict_rate(series.spec, series.alpha, "coefficient")
    else:
        raise SpecError("CSV has no family metadata; pass --predicted and --log-power")
    fit = fit_series_rate(series, pred, cfg.window, cfg.view)
    ok, text = rate_report(pred.exponent_p, pred.source, fit, cfg.rate_tol)
    print(text)
    return EXIT_OK if ok else EXIT_RATE


NORM_TARGETS = {"l2": "l2_error", "sup": "weighted_sup_error", "sobolev": "sobolev_error"}


def error_curve(spec, alpha, N_values, norm, m=0, n_max=None, threads=1, closed_form=False, tol=1e-13, series=None):
    """(N, errors, prediction, flags) for one error norm.

    series (degrees 0..n_max) is computed when not supplied.
    """
    a = alpha if spec.basis == "laguerre" else None
    pred = predict_rate(spec, a, NORM_TARGETS[norm], m=m)
    N_values = np.asarray(N_values, dtype=int)
    if series is None:
        top = int(N_values.max()) if norm == "sup" else (n_max or 4 * int(N_values.max()))
        series = compute_series(spec, a, np.arange(top + 1), tol, threads, closed_form)
    if norm == "sup":
        errs = weighted_sup_errors(spec, series, N_values)
        return N_values, errs, pred, np.zeros(N_values.size, dtype=bool)
    curve = l2_tail_error(series, N_values) if norm == "l2" else sobolev_error(series, m, N_values)
    return N_values, curve.errors, pred, curve.flagged


def cmd_errors(cfg):
    spec = cfg.spec()
    norm = cfg.extra["norm"]
    N, errs, pred, flags = error_curve(
        spec, cfg.alpha, cfg.n_values, norm, cfg.extra.get("m", 0), cfg.extra.get("n_max"),
        cfg.threads, cfg.extra.get("closed_form", False), cfg.tol,
    )
    ref = reference_line(N, errs, pred.exponent_p, pred.log_power)
    meta = {"command": "errors", **spec_meta(spec, cfg.alpha if spec.basis == "laguerre" else None)}
    meta.update(norm=norm, m=cfg.extra.get("m", 0), N=cfg.extra.get("n_text", ""),
                predicted_p=float(pred.exponent_p), tag=pred.source, flagged=int(np.count_nonzero(flags)),
                version=__version__)
    write_atomic(cfg.out, render_csv(meta, FIGURE_COLUMNS, zip(N, errs, ref)))
    fit = fit_power_law(N, errs, pred.log_power, "n", (float(N.min()), float(N.max())))
    ok, text = rate_report(pred.exponent_p, pred.source, fit, cfg.rate_tol)
    print(text)
    if np.any(flags):
        print(f"{int(np.count_nonzero(flags))} points have tail completion above 5%", file=sys.stderr)
    return EXIT_OK if ok else EXIT_RATE


def cmd_lemma_check(cfg):
    P = cfg.extra["params"]
    omegas = cfg.extra.get("omegas")
    fit = bessel_transform_decay(cfg.family, P, omegas=omegas, window=cfg.extra.get("degree_window"),
                                 view=cfg.view if cfg.view != "auto" else "envelope", threads=cfg.threads)
    ok, text = rate_report(fit.predicted_p, cfg.family, fit, cfg.rate_tol)
    print(text)
    return EXIT_OK if ok else EXIT_RATE


# ---------------------------------------------------------------- figures


FIGURES = {
    1: "endpoint coefficients |a_n|, x^delta ln^mu x",
    2: "interior coefficients |a_n|, |x-0.3|^gamma ln^mu|x-0.3|",
    3: "endpoint truncation errors (weighted L2 and sup)",
    4: "interior truncation errors (weighted L2 and sup)",
    5: "Hermite coefficients |hhat_n|, |x-3|^s ln^mu|x-3|",
    6: "Hermite truncation errors (weighted L2 and sup)",
}


def _panel_name(fig, label, alpha=None):
    a = "" if alpha is None else f"_alpha{alpha:g}"
    return f"fig{fig}_{label}{a}"


def _emit_panel(out_dir, name, meta, columns, rows, panels):
    path = os.path.join(out_dir, name + ".csv")
    write_atomic(path, render_csv(meta, columns, rows))
    panels.append(path)


def _gnuplot(out_dir, fig, panels):
    lines = [
        "# usage: gnuplot -p " + f"fig{fig}.gp",
        "set datafile separator ','",
        "set logscale xy",
        "set key left bottom",
        f"set title '{FIGURES[fig]}'",
    ]
    plots = []
    for p in panels:
        base = os.path.basename(p)
        plots.append(f"'{base}' using 1:(abs($2)) with points title '{base[:-4]}'")
        plots.append(f"'{base}' using 1:3 with lines notitle")
    lines.append("plot " + ", \\\n     ".join(plots))
    with open(os.path.join(out_dir, f"fig{fig}.gp"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _figure_coefficients(fig, spec, alpha, n_values, threads, out_dir, panels, closed_form):
    a = alpha if spec.basis == "laguerre" else None
    series = compute_series(spec, a, n_values, threads=threads, closed_form=closed_form)
    pred = predict_rate(spec, a, "coefficient")
    keep = series.gated & (series.coeff_normalized != 0)
    n = series.n_values[keep]
    if pred.view == "raw":
        vals = 10.0 ** series.raw_log10[keep]
    else:
        vals = np.abs(series.coeff_normalized[keep])
    ref = reference_line(n, vals, pred.exponent_p, pred.log_power)
    meta = {"command": "figures", "figure": fig, **spec_meta(spec, a)}
    meta.update(value=f"|coefficient| ({pred.view})", predicted_p=float(pred.exponent_p), tag=pred.source,
                source=series.meta.get("source", "quadrature"), alpha_set="0 1 2 (chosen default)",
                version=__version__)
    label = f"e{spec.exponent:g}_mu{spec.log_power}"
    if spec.basis == "hermite":
        lh = np.log(np.abs(series.coeff_normalized[keep])) - 0.5 * log_gamma_hermite(n)
        with np.errstate(divide="ignore"):
            log_n = lh / np.log(n)
        meta.update(log_n_abs_h="ln|h_n| / ln n with h_n = hhat_n / sqrt(gamma_n)", sets="s mu in (0.5 0) (1.2 2) (3 1) (chosen default)")
        rows = zip(n, vals, ref, log_n)
        _emit_panel(out_dir, _panel_name(fig, label), meta, FIGURE_COLUMNS + ("log_n_abs_h",), rows, panels)
    else:
        _emit_panel(out_dir, _panel_name(fig, label, alpha), meta, FIGURE_COLUMNS, zip(n, vals, ref), panels)


def _figure_errors(fig, spec, alpha, N_values, n_max, threads, out_dir, panels, closed_form):
    a = alpha if spec.basis == "laguerre" else None
    series = compute_series(spec, a, np.arange(n_max + 1), threads=threads, closed_form=closed_form)
    for norm in ("l2", "sup"):
        N, errs, pred, flags = error_curve(spec, alpha, N_values, norm, series=series)
        ref = reference_line(N, errs, pred.exponent_p, pred.log_power)
        meta = {"command": "figures", "figure": fig, **spec_meta(spec, a)}
        meta.update(value=f"{norm} truncation error", predicted_p=float(pred.exponent_p), tag=pred.source,
                    n_max=int(n_max), flagged=int(np.count_nonzero(flags)),
                    source="closed_form" if closed_form else "quadrature", version=__version__)
        label = f"{norm}_e{spec.exponent:g}_mu{spec.log_power}"
        _emit_panel(out_dir, _panel_name(fig, label, a), meta, FIGURE_COLUMNS, zip(N, errs, ref), panels)


def build_figure(fig, out_dir, threads=1, alphas=FIGURE_ALPHAS, n_hi=2048, N_hi=1024):
    """Write every panel CSV of one figure plus a gnuplot script; returns the CSV paths."""
    panels = []
    dense = np.arange(16, n_hi + 1)
    Ns = parse_n_spec(f"16:{N_hi}:dyadic")
    if fig == 1:
        for d, mu in ((1.2, 3), (3.0, 3)):
            for al in alphas:
                spec = SingularFunctionSpec("laguerre_endpoint", d, mu)
                _figure_coefficients(1, spec, al, parse_n_spec(f"16:{n_hi}:dyadic"), threads, out_dir, panels, True)
    elif fig == 2:
        for g, mu in ((1.2, 2), (3.0, 1)):
            for al in alphas:
                spec = SingularFunctionSpec("laguerre_interior", g, mu, 0.3)
                _figure_coefficients(2, spec, al, dense, threads, out_dir, panels, False)
    elif fig == 3:
        for d, mu in ((1.2, 3), (4.0, 1)):
            for al in alphas:
                spec = SingularFunctionSpec("laguerre_endpoint", d, mu)
                _figure_errors(3, spec, al, Ns, 4 * N_hi, threads, out_dir, panels, True)
    elif fig == 4:
        for g, mu in ((1.2, 2), (3.0, 1)):
            for al in alphas:
                spec = SingularFunctionSpec("laguerre_interior", g, mu, 0.3)
                _figure_errors(4, spec, al, Ns, 8 * N_hi, threads, out_dir, panels, False)
    elif fig == 5:
        for s, mu in FIGURE_HERMITE_SETS:
            spec = SingularFunctionSpec("hermite_interior", s, mu, FIGURE_Z0)
            _figure_coefficients(5, spec, None, dense, threads, out_dir, panels, False)
    elif fig == 6:
        for s, mu in FIGURE_HERMITE_SETS:
            spec = SingularFunctionSpec("hermite_interior", s, mu, FIGURE_Z0)
            _figure_errors(6, spec, None, Ns, 8 * N_hi, threads, out_dir, panels, False)
    else:
        raise ValueError(f"figure must be 1..6, got {fig}")
    _gnuplot(out_dir, fig, panels)
    return panels


def cmd_figures(cfg):
    figs = range(1, 7) if cfg.extra["figure"] == "all" else [int(cfg.extra["figure"])]
    alphas = cfg.extra.get("alphas") or FIGURE_ALPHAS
    for fig in figs:
        panels = build_figure(fig, cfg.out, cfg.threads, alphas)
        print(f"figure {fig}: {len(panels)} panels in {cfg.out}")
    return EXIT_OK


# ---------------------------------------------------------------- argparse


def _add_family_args(p):
    p.add_argument("--family", choices=["laguerre-endpoint", "laguerre-interior", "hermite-interior"], required=True)
    p.add_argument("--alpha", type=float, default=0.0, help="Laguerre parameter (ignored for Hermite)")
    p.add_argument("--delta", type=float, help="endpoint exponent")
    p.add_argument("--gamma", type=float, help="interior Laguerre exponent")
    p.add_argument("--s", type=float, help="Hermite exponent")
    p.add_argument("--mu", type=int, default=0, help="power of the logarithm")
    p.add_argument("--x0", type=float, help="interior Laguerre singular point")
    p.add_argument("--z0", type=float, help="Hermite singular point")
    p.add_argument("--g", default="1", choices=sorted(SMOOTH_FACTORS), help="smooth factor")
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--closed-form", action="store_true", help="exact coefficients (endpoint family, g = 1)")


def build_parser():
    parser = argparse.ArgumentParser(prog="orthorates", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--rate-tol", type=float, default=0.1)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="coefficient series to CSV")
    _add_family_args(p)
    p.add_argument("--n", required=True, help="degrees: a:b, a:b:step, a:b:dyadic or a list")
    p.add_argument("--out", default="coeffs.csv")

    p = sub.add_parser("rates", parents=[common], help="fit a coefficient CSV and compare with the prediction")
    p.add_argument("csv")
    p.add_argument("--window", default="64:2048")
    p.add_argument("--view", choices=["auto", "pointwise", "envelope"], default="auto")
    p.add_argument("--predicted", type=float, help="override the predicted exponent")
    p.add_argument("--log-power", type=int, help="override the log power")

    p = sub.add_parser("errors", parents=[common], help="truncation error curve to CSV")
    _add_family_args(p)
    p.add_argument("--norm", choices=sorted(NORM_TARGETS), default="l2")
    p.add_argument("--m", type=int, default=0, help="Sobolev order")
    p.add_argument("--N", default="64:1024:dyadic")
    p.add_argument("--n-max", type=int, help="highest degree computed (default 4 max N)")
    p.add_argument("--out", default="errors.csv")

    p = sub.add_parser("figures", parents=[common], help="regenerate figure data")
    p.add_argument("--figure", default="all", help="1..6 or all")
    p.add_argument("--alphas", help="comma list of alpha values (default 0,1,2)")
    p.add_argument("--out", default="figures")

    p = sub.add_parser("lemma-check", parents=[common], help="decay of a Bessel-transform or degree integral")
    p.add_argument("--family", choices=FAMILIES, required=True)
    for name in ("alpha", "beta", "tau", "nu", "a", "b", "delta"):
        p.add_argument(f"--{name}", type=float, default=getattr(BesselParams, name))
    p.add_argument("--mu", type=int, default=0)
    p.add_argument("--psi", default="1", choices=sorted(SMOOTH_FACTORS))
    p.add_argument("--equation", default="")
    p.add_argument("--parity", choices=["even", "odd"], default="even")
    p.add_argument("--omegas", default="16:16384:dyadic")
    p.add_argument("--window", default="64:2048", help="degree window for degree families")
    p.add_argument("--view", choices=["pointwise", "envelope"], default="envelope")
    return parser


def config_from_args(args):
    cmd = args.command
    cfg = RunConfig(command=cmd, threads=max(1, args.threads), rate_tol=args.rate_tol)
    if cmd in ("coeffs", "errors"):
        cfg.family = args.family
        cfg.smooth = args.g
        cfg.tol = args.tol
        cfg.out = args.out
        cfg.mu = args.mu
        cfg.extra["closed_form"] = args.closed_form
        if args.family == "laguerre-endpoint":
            cfg.exponent, cfg.alpha = args.delta, args.alpha
        elif args.family == "laguerre-interior":
            cfg.exponent, cfg.alpha, cfg.location = args.gamma, args.alpha, args.x0
        else:
            cfg.exponent, cfg.location = args.s, args.z0
        text = args.n if cmd == "coeffs" else args.N
        cfg.n_values = tuple(int(v) for v in parse_n_spec(text))
        cfg.extra["n_text"] = text
        if cmd == "errors":
            cfg.extra.update(norm=args.norm, m=args.m, n_max=args.n_max)
    elif cmd == "rates":
        cfg.window = parse_window(args.window)
        cfg.view = args.view
        cfg.extra.update(csv=args.csv, predicted=args.predicted, log_power=args.log_power)
    elif cmd == "figures":
        cfg.out = args.out
        cfg.extra["figure"] = args.figure
        if args.alphas:
            cfg.extra["alphas"] = tuple(float(v) for v in args.alphas.split(","))
    elif cmd == "lemma-check":
        cfg.family = args.family
        cfg.view = args.view
        params = {k: getattr(args, k) for k in ("alpha", "beta", "tau", "nu", "a", "b", "delta", "mu", "psi", "equation", "parity")}
        cfg.extra["params"] = BesselParams(**params)
        cfg.extra["omegas"] = parse_n_spec(args.omegas).astype(float)
        cfg.extra["degree_window"] = parse_window(args.window)
    return cfg


COMMANDS = {
    "coeffs": cmd_coeffs,
    "rates": cmd_rates,
    "errors": cmd_errors,
    "figures": cmd_figures,
    "lemma-check": cmd_lemma_check,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (HypothesisViolation, SpecError) as exc:
        print(f"guard violated: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (NotConverged, EigenNotConverged) as exc:
        print(f"quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE


if __name__ == "__main__":
    sys.exit(main())
