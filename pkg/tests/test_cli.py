import math

import numpy as np
import pytest

from orthorates import cli
from orthorates.coefficients import CoefficientSeries


def run(args, capsys=None):
    code = cli.main(args)
    out = capsys.readouterr() if capsys is not None else None
    return code, out


def test_parse_n_spec():
    assert list(cli.parse_n_spec("16:2048:dyadic")) == [16, 32, 64, 128, 256, 512, 1024, 2048]
    assert list(cli.parse_n_spec("0:3")) == [0, 1, 2, 3]
    assert list(cli.parse_n_spec("0:10:5")) == [0, 5, 10]
    assert list(cli.parse_n_spec("7,3,3")) == [3, 7]
    with pytest.raises(ValueError):
        cli.parse_n_spec("5:1")


def test_fmt():
    assert cli.fmt(True) == "1"
    assert cli.fmt(np.int64(4)) == "4"
    assert float(cli.fmt(0.1)) == 0.1
    assert cli.fmt(math.inf) == "inf"


def test_coeffs_linear_function(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _ = run(["coeffs", "--family", "laguerre-endpoint", "--alpha", "0", "--delta", "1", "--mu", "0",
                   "--n", "0:8", "--out", str(out), "--threads", "1"], capsys)
    assert code == cli.EXIT_OK
    meta, cols, data = cli.read_csv(out)
    assert tuple(cols) == cli.COEFF_COLUMNS
    assert data[:, 0].tolist() == list(range(9))
    assert data[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert data[1, 1] == pytest.approx(-1.0, abs=1e-12)
    assert np.all(np.abs(data[2:, 1]) <= 1e-12)
    assert meta["family"] == "laguerre-endpoint"


def test_csv_layout(tmp_path, capsys):
    out = tmp_path / "c.csv"
    run(["coeffs", "--family", "laguerre-endpoint", "--delta", "0.5", "--n", "0:2", "--out", str(out), "--closed-form"], capsys)
    raw = out.read_bytes()
    lines = raw.split(b"\r\n")
    assert lines[0].startswith(b"# meta: ")
    header = next(line for line in lines if not line.startswith(b"#"))
    assert header == b"n,coeff_normalized,coeff_raw_log10,err_est,gated"
    assert raw.endswith(b"\r\n")


def test_guard_exit_code(tmp_path, capsys):
    code, out = run(["coeffs", "--family", "laguerre-endpoint", "--alpha", "0", "--delta", "-1.5",
                     "--n", "0:4", "--out", str(tmp_path / "x.csv")], capsys)
    assert code == cli.EXIT_GUARD
    assert "guard violated" in out.err
    assert not (tmp_path / "x.csv").exists()


def test_quadrature_exit_code(tmp_path, capsys, monkeypatch):
    def fake(spec, alpha, n_values, tol=1e-13, threads=1, closed_form=False):
        n = np.asarray(n_values)
        ok = np.ones(n.size, dtype=bool)
        ok[-1] = False
        return CoefficientSeries("laguerre", alpha, n, np.ones(n.size), np.zeros(n.size), ok, spec)

    monkeypatch.setattr(cli, "compute_series", fake)
    code, _ = run(["coeffs", "--family", "laguerre-endpoint", "--delta", "0.5", "--n", "0:4",
                   "--out", str(tmp_path / "x.csv")], capsys)
    assert code == cli.EXIT_QUADRATURE


def _synthetic_csv(path, p=2.0, log_power=1):
    n = np.arange(16, 4097)
    c = n**-p * np.log(2 * np.sqrt(n)) ** log_power
    rows = [(k, v, math.log10(v), 0.0, True) for k, v in zip(n, c)]
    cli.write_atomic(str(path), cli.render_csv({"basis": "laguerre", "alpha": 0.0}, cli.COEFF_COLUMNS, rows))


def test_rates_synthetic(tmp_path, capsys):
    path = tmp_path / "s.csv"
    _synthetic_csv(path)
    code, out = run(["rates", str(path), "--predicted", "2", "--log-power", "1", "--view", "pointwise"], capsys)
    assert code == cli.EXIT_OK
    assert "fitted 2.000" in out.out and "PASS" in out.out


def test_rates_fail_exit(tmp_path, capsys):
    path = tmp_path / "s.csv"
    _synthetic_csv(path)
    code, out = run(["rates", str(path), "--predicted", "2.5", "--log-power", "1", "--view", "pointwise"], capsys)
    assert code == cli.EXIT_RATE
    assert "FAIL" in out.out


def test_rates_without_metadata(tmp_path, capsys):
    path = tmp_path / "s.csv"
    _synthetic_csv(path)
    code, _ = run(["rates", str(path)], capsys)
    assert code == cli.EXIT_GUARD


def test_interior_prediction():
    cfg = cli.RunConfig("coeffs", family="laguerre-interior", alpha=2.0, exponent=3.0, mu=1, location=0.3)
    pred = cli.predict_rate(cfg.spec(), 2.0, "coefficient")
    assert pred.exponent_p == pytest.approx(3.25)


def test_endpoint_example(tmp_path, capsys):
    path = tmp_path / "e.csv"
    code, _ = run(["coeffs", "--family", "laguerre-endpoint", "--alpha", "0", "--delta", "1.2", "--mu", "3",
                   "--n", "16:2048:dyadic", "--out", str(path)], capsys)
    assert code == cli.EXIT_OK
    code, out = run(["rates", str(path)], capsys)
    assert "predicted 2.2" in out.out
    assert code == cli.EXIT_OK, out.out


def test_hermite_example(tmp_path, capsys):
    path = tmp_path / "h.csv"
    code, _ = run(["coeffs", "--family", "hermite-interior", "--s", "1.2", "--mu", "2", "--z0", "3",
                   "--n", "16:2048:dyadic", "--out", str(path)], capsys)
    assert code == cli.EXIT_OK
    code, out = run(["rates", str(path)], capsys)
    assert "predicted 1.35" in out.out
    assert code == cli.EXIT_OK, out.out


def test_thread_determinism(tmp_path, capsys):
    args = ["coeffs", "--family", "laguerre-interior", "--alpha", "1", "--gamma", "1.2", "--mu", "2",
            "--x0", "0.3", "--n", "0:96:8"]
    run(args + ["--threads", "1", "--out", str(tmp_path / "a.csv")], capsys)
    run(args + ["--threads", "3", "--out", str(tmp_path / "b.csv")], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_atomic_write_replaces(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("old")
    cli.write_atomic(str(path), "new\r\n")
    assert path.read_bytes() == b"new\r\n"
    assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]


def test_errors_command(tmp_path, capsys):
    path = tmp_path / "e.csv"
    code, out = run(["errors", "--family", "laguerre-endpoint", "--alpha", "1", "--delta", "1.2", "--mu", "3",
                     "--closed-form", "--norm", "l2", "--N", "64:1024:dyadic", "--out", str(path)], capsys)
    assert code == cli.EXIT_OK, out.out
    meta, cols, data = cli.read_csv(path)
    assert tuple(cols) == cli.FIGURE_COLUMNS
    assert data[-1, 1] == data[-1, 2]


@pytest.mark.parametrize(
    "args, expected",
    [
        (["--family", "log_at_origin", "--alpha", "0.5", "--beta", "0", "--mu", "0"], "predicted 1.5"),
        (["--family", "interior_left", "--beta", "-0.5", "--mu", "1", "--a", "1", "--b", "2"], "predicted 1 "),
        (["--family", "hermite_degree", "--beta", "0.5", "--a", "0.5", "--b", "2", "--parity", "even"], "predicted 1 "),
    ],
)
def test_bessel_check_examples(args, expected, capsys):
    code, out = run(["lemma-check"] + args, capsys)
    assert expected in out.out
    assert code == cli.EXIT_OK, out.out


def test_figure_metadata(tmp_path, capsys):
    code, _ = run(["figures", "--figure", "1", "--alphas", "1", "--out", str(tmp_path)], capsys)
    csvs = sorted(tmp_path.glob("*.csv"))
    assert csvs and (tmp_path / "fig1.gp").exists()
    meta, cols, _ = cli.read_csv(csvs[0])
    assert tuple(cols[:3]) == cli.FIGURE_COLUMNS
    assert "alpha" in meta
