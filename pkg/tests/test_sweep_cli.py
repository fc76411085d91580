"""Tests for metric sweeps, the delimited report format, figure rendering, and
the command-line interface (run in-process through ``main``)."""

import json
import math

import numpy as np
import pytest

from foxh_kit import SCHEMA_VERSION, __version__
from foxh_kit.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from foxh_kit.errors import ParameterError
from foxh_kit.fading import FadingParams, db_to_linear, gen_mgf, outage
from foxh_kit.fox_h import descriptor_to_json, scaled_to_json
from foxh_kit.identities import derivative_x, laplace_transform
from foxh_kit.montecarlo import SamplerConfig
from foxh_kit.sweep import (
    METHODS,
    Row,
    format_csv,
    parse_grid,
    parse_metric,
    sweep,
    worker_count,
    write_csv,
)
from tests.test_identities import EXP2

P1 = FadingParams(alpha=2.0, eta=0.3, mu=1.5, m_s=2.5)
P1_ARGS = ["--alpha", "2", "--eta", "0.3", "--mu", "1.5", "--m-s", "2.5"]


# -- metric / grid parsing -------------------------------------------------------


def test_parse_metric_outage():
    spec = parse_metric("outage:th_db=10")
    assert spec.kind == "outage"
    assert spec.threshold == pytest.approx(10.0)  # 10 dB = 10x linear
    assert parse_metric("outage:th=0.5").threshold == pytest.approx(0.5)


def test_parse_metric_sep_and_mgf():
    spec = parse_metric("sep:mpsk:16")
    assert spec.kind == "sep"
    assert spec.modulation.b == pytest.approx(math.sin(math.pi / 16) ** 2)
    spec = parse_metric("mgf:n=1,s=0.5")
    assert (spec.kind, spec.n, spec.s) == ("mgf", 1, 0.5)


@pytest.mark.parametrize(
    "bad",
    [
        "outage:th=-1",
        "outage:foo=1",
        "outage:th_db=abc",
        "sep:qam:64",
        "mgf:n=1",
        "mgf:n=-1,s=1",
        "mgf:n=1,s=0",
        "capacity",
    ],
)
def test_parse_metric_rejects(bad):
    with pytest.raises(ParameterError):
        parse_metric(bad)


def test_parse_grid_forms():
    np.testing.assert_allclose(parse_grid("0:10:3"), [0.0, 5.0, 10.0])
    np.testing.assert_allclose(parse_grid("1,2.5,4"), [1.0, 2.5, 4.0])
    np.testing.assert_allclose(parse_grid("-7.5"), [-7.5])


@pytest.mark.parametrize("bad", ["a:b:c", "1:2:0", "5:6:1", "", "1;2"])
def test_parse_grid_rejects(bad):
    with pytest.raises(ParameterError):
        parse_grid(bad)


# -- sweep ------------------------------------------------------------------------


def test_sweep_rows_sorted_and_consistent():
    rows = sweep(P1, ["outage:th=1", "mgf:n=0,s=1.3"], [0.0, 5.0])
    assert [r.sort_key for r in rows] == sorted(r.sort_key for r in rows)
    by_key = {(r.metric, r.x): r.value for r in rows}
    assert by_key[("outage:th=1", 0.0)] == pytest.approx(outage(P1, 1.0), rel=1e-12)
    p5 = P1.with_mean_snr(db_to_linear(5.0))
    assert by_key[("mgf:n=0,s=1.3", 5.0)] == pytest.approx(
        gen_mgf(p5, 0, 1.3), rel=1e-12
    )
    assert all(math.isnan(r.ci_low) for r in rows)  # analytic rows carry no CI


def test_sweep_mc_rows_have_intervals():
    cfg = SamplerConfig(n_samples=20_000, seed=3)
    rows = sweep(P1, ["outage:th=1"], [0.0], methods=("analytic", "mc"),
                 mc_config=cfg)
    mc = [r for r in rows if r.method == "mc"]
    assert len(mc) == 1
    assert mc[0].ci_low <= mc[0].value <= mc[0].ci_high
    analytic = [r for r in rows if r.method == "analytic"]
    assert mc[0].ci_low <= analytic[0].value <= mc[0].ci_high


def test_sweep_asymptotic_rejects_mgf():
    with pytest.raises(ParameterError):
        sweep(P1, ["mgf:n=0,s=1"], [0.0], methods=("asymptotic",))


def test_sweep_validates_inputs():
    with pytest.raises(ParameterError):
        sweep(P1, [], [0.0])
    with pytest.raises(ParameterError):
        sweep(P1, ["outage:th=1"], [0.0], methods=("exact",))
    assert METHODS == ("analytic", "asymptotic", "mc")


def test_parallel_sweep_matches_serial():
    metrics = ["outage:th=1", "mgf:n=0,s=1.3"]
    grid = [0.0, 6.0]
    serial = sweep(P1, metrics, grid, workers=1)
    parallel = sweep(P1, metrics, grid, workers=3)
    # NaN confidence fields defeat dataclass equality; the rendered report is
    # the deliverable, so compare that.
    assert format_csv(parallel) == format_csv(serial)


def test_worker_count_resolution(monkeypatch):
    monkeypatch.delenv("FOXH_WORKERS", raising=False)
    assert worker_count() == 1
    assert worker_count(4) == 4
    monkeypatch.setenv("FOXH_WORKERS", "3")
    assert worker_count() == 3
    assert worker_count(2) == 2  # explicit flag wins
    monkeypatch.setenv("FOXH_WORKERS", "abc")
    with pytest.raises(ParameterError):
        worker_count()
    monkeypatch.setenv("FOXH_WORKERS", "0")
    with pytest.raises(ParameterError):
        worker_count()
    with pytest.raises(ParameterError):
        worker_count(0)


# -- delimited output ----------------------------------------------------------------


def test_format_csv_golden():
    rows = [
        Row(0.0, "outage:th=1", 0.5, "analytic"),
        Row(0.0, "outage:th=1", 0.25, "mc", 0.2, 0.3),
    ]
    expected = (
        f"# foxh-kit v{__version__} schema {SCHEMA_VERSION}\n"
        "gamma_bar_dB,metric,value,method,ci_low,ci_high\n"
        "0,outage:th=1,0.5,analytic,,\n"
        "0,outage:th=1,0.25,mc,0.2,0.3\n"
    )
    assert format_csv(rows) == expected


def test_format_csv_is_deterministic():
    rows = sweep(P1, ["outage:th=1"], [0.0, 4.0])
    assert format_csv(rows) == format_csv(sweep(P1, ["outage:th=1"], [0.0, 4.0]))


def test_write_csv_roundtrip(tmp_path):
    rows = [Row(1.0, "m", 0.125, "analytic")]
    path = tmp_path / "out.csv"
    write_csv(rows, str(path), "gamma_dB")
    text = path.read_text()
    assert text.startswith(f"# foxh-kit v{__version__} schema {SCHEMA_VERSION}\n")
    assert "gamma_dB,metric,value,method,ci_low,ci_high" in text


# -- figure rendering --------------------------------------------------------------------


def test_render_rows_writes_figure(tmp_path):
    from foxh_kit.plotting import render_rows

    rows = [
        Row(0.0, "outage:th=1", 0.5, "analytic"),
        Row(5.0, "outage:th=1", 0.2, "analytic"),
        Row(0.0, "outage:th=1", 0.48, "mc", 0.45, 0.52),
        Row(5.0, "outage:th=1", 0.21, "mc", 0.18, 0.24),
        Row(0.0, "outage:th=1", 0.6, "asymptotic"),
        Row(5.0, "outage:th=1", 0.25, "asymptotic"),
    ]
    path = tmp_path / "fig.png"
    render_rows(rows, str(path), x_label="average SNR (dB)",
                y_label="outage probability", title="curve")
    assert path.stat().st_size > 1000


def test_render_rows_rejects_empty(tmp_path):
    from foxh_kit.plotting import render_rows

    with pytest.raises(ParameterError):
        render_rows([], str(tmp_path / "fig.png"), x_label="x", y_label="y")


# -- command-line interface ------------------------------------------------------------------


def _parse_report(text: str):
    lines = text.strip().splitlines()
    assert lines[0] == f"# foxh-kit v{__version__} schema {SCHEMA_VERSION}"
    header = lines[1].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[2:]]


def test_cli_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert "foxh-kit" in capsys.readouterr().out


def test_cli_outage_curve(capsys):
    code = main(["outage", *P1_ARGS, "--threshold-db", "0",
                 "--gamma-bar-db", "0:10:3"])
    assert code == EXIT_OK
    recs = _parse_report(capsys.readouterr().out)
    assert len(recs) == 3
    assert [r["gamma_bar_dB"] for r in recs] == ["0", "5", "10"]
    vals = [float(r["value"]) for r in recs]
    assert vals[0] == pytest.approx(outage(P1, 1.0), rel=1e-10)
    assert vals == sorted(vals, reverse=True)  # outage falls with average SNR


def test_cli_sep_with_asymptotic(capsys):
    code = main(["sep", *P1_ARGS, "--modulation", "dbpsk",
                 "--methods", "analytic,asymptotic", "--gamma-bar-db", "30"])
    assert code == EXIT_OK
    recs = _parse_report(capsys.readouterr().out)
    methods = {r["method"] for r in recs}
    assert methods == {"analytic", "asymptotic"}
    vals = {r["method"]: float(r["value"]) for r in recs}
    assert vals["asymptotic"] == pytest.approx(vals["analytic"], rel=0.1)


def test_cli_mc_reports_intervals(capsys):
    code = main(["mc", *P1_ARGS, "--metric", "outage:th_db=0",
                 "--gamma-bar-db", "0", "--mc-samples", "20000", "--seed", "3"])
    assert code == EXIT_OK
    recs = _parse_report(capsys.readouterr().out)
    assert recs[0]["method"] == "mc"
    assert float(recs[0]["ci_low"]) <= float(recs[0]["value"])


def test_cli_pdf_routes_agree(capsys):
    code = main(["pdf", *P1_ARGS, "--gamma-db", "0", "--route", "composite",
                 "--route", "quadrature"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    recs = _parse_report(out)
    assert "gamma_dB" in recs[0]
    by_route = {r["metric"]: float(r["value"]) for r in recs}
    assert by_route["pdf:composite"] == pytest.approx(
        by_route["pdf:quadrature"], rel=1e-7
    )


def test_cli_pdf_plot_writes_figure(tmp_path):
    csv_path = tmp_path / "pdf.csv"
    code = main(["pdf", *P1_ARGS, "--gamma-db=-10:10:5",
                 "-o", str(csv_path), "--plot"])
    assert code == EXIT_OK
    assert csv_path.exists()
    png_path = tmp_path / "pdf.png"
    assert png_path.exists() and png_path.stat().st_size > 1000


def test_cli_plot_needs_output_path(capsys):
    code = main(["pdf", *P1_ARGS, "--gamma-db", "0", "--plot"])
    capsys.readouterr()
    assert code == EXIT_USAGE


def test_cli_output_files_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["outage", *P1_ARGS, "--threshold", "1", "--gamma-bar-db", "0:8:3",
            "--methods", "analytic,mc", "--mc-samples", "20000", "--seed", "5"]
    assert main(argv + ["-o", str(a)]) == EXIT_OK
    assert main(argv + ["-o", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_cli_eval_h_univariate(tmp_path, capsys):
    from tests.test_fox_h import EXP_DESC

    f = tmp_path / "exp.json"
    f.write_text(json.dumps(descriptor_to_json(EXP_DESC)))
    assert main(["eval-h", str(f), "-x", "1.0"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(math.exp(-1.0), rel=1e-10)
    # Missing -x is a usage error.
    assert main(["eval-h", str(f)]) == EXIT_USAGE
    capsys.readouterr()


def test_cli_eval_h_scaled_payloads(tmp_path, capsys):
    const = tmp_path / "lap.json"
    const.write_text(json.dumps(scaled_to_json(laplace_transform(EXP2, 1.0, 1.0, 1.0))))
    assert main(["eval-h", str(const)]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(1.0 / 3.0, rel=1e-9)

    arg = tmp_path / "ddx.json"
    arg.write_text(json.dumps(scaled_to_json(derivative_x(EXP2, 1.0, 1.0))))
    assert main(["eval-h", str(arg), "-u", "1.0"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(
        -2.0 * math.exp(-2.0), rel=1e-9
    )
    assert main(["eval-h", str(arg)]) == EXIT_USAGE  # argument form needs -u
    capsys.readouterr()


def test_cli_identity_with_oracle(tmp_path, capsys):
    f = tmp_path / "exp2.json"
    f.write_text(json.dumps(descriptor_to_json(EXP2)))
    code = main(["identity", str(f), "--op", "laplace", "-a", "1", "-b", "1",
                 "--s", "1", "--check"])
    assert code == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(1.0 / 3.0, rel=1e-9)
    assert out["oracle"]["passed"] is True
    assert out["result"]["kind"] == "scaled_bivariate"


def test_cli_identity_missing_op_argument(tmp_path, capsys):
    f = tmp_path / "exp2.json"
    f.write_text(json.dumps(descriptor_to_json(EXP2)))
    code = main(["identity", str(f), "--op", "laplace", "-a", "1", "-b", "1"])
    capsys.readouterr()
    assert code == EXIT_USAGE


def test_cli_numeric_failure_exits_two(tmp_path, capsys):
    # Divergent origin: the identity raises a numeric-domain error (exit 2),
    # distinct from usage problems (exit 1).
    from foxh_kit.fox_h import BivariateHDescriptor

    desc = BivariateHDescriptor(
        s_lower=((-1.0, 1.0),), t_lower=((0.0, 1.0),), m2=1, m3=1
    )
    f = tmp_path / "divergent.json"
    f.write_text(json.dumps(descriptor_to_json(desc)))
    code = main(["identity", str(f), "--op", "integral", "-a", "1", "-b", "1",
                 "--limit", "1"])
    capsys.readouterr()
    assert code == EXIT_NUMERIC


@pytest.mark.parametrize(
    "argv",
    [
        ["outage", *P1_ARGS, "--threshold-db", "0", "--threshold", "1",
         "--gamma-bar-db", "0"],  # mutually exclusive
        ["outage", *P1_ARGS, "--threshold-db", "0", "--gamma-bar-db", "0:10:0"],
        ["sweep", *P1_ARGS, "--metric", "capacity", "--gamma-bar-db", "0"],
        ["sep", *P1_ARGS, "--modulation", "qam:16", "--gamma-bar-db", "0"],
        ["outage", "--alpha", "2", "--eta", "1.0", "--mu", "1", "--m-s", "1",
         "--threshold-db", "0", "--gamma-bar-db", "0"],  # eta at the unity pole
        ["warp", "--speed", "9"],  # unknown subcommand
    ],
)
def test_cli_usage_errors_exit_one(argv, capsys):
    assert main(argv) == EXIT_USAGE
    capsys.readouterr()


def test_cli_missing_file_exits_one(tmp_path, capsys):
    assert main(["eval-h", str(tmp_path / "nope.json"), "-x", "1"]) == EXIT_USAGE
    capsys.readouterr()
