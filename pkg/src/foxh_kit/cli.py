"""Command-line interface.

Subcommands:

* ``eval-h``    -- evaluate a (scaled) H-function descriptor from a JSON file
* ``identity``  -- apply an integral/derivative identity to a descriptor
* ``pdf``       -- tabulate the SNR density over an instantaneous-SNR grid
* ``outage``    -- outage probability over an average-SNR grid
* ``sep``       -- average symbol error probability over an average-SNR grid
* ``mgf``       -- generalized MGF values over an average-SNR grid
* ``mc``        -- Monte Carlo estimates with confidence intervals
* ``sweep``     -- several metrics/methods in one report
* ``selftest``  -- run the built-in diagnostic suite

Report subcommands write CSV (stdout or ``-o FILE``); ``--plot`` renders the
same rows to an image next to the output file.  Exit codes: 0 success, 1 bad
usage or invalid input values, 2 numeric/evaluation failure.

The ``FOXH_WORKERS`` environment variable (or ``--workers``) sets how many
processes sweep-style commands may use; each (metric, method) curve is one
task.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import FoxHError, ParameterError
from .fading import (
    FadingParams,
    composite_pdf,
    composite_pdf_quadrature,
    db_to_linear,
    pdf_direct,
    pdf_foxh,
)
from .fox_h import (
    BivariateHDescriptor,
    descriptor_from_json,
    eval_bivariate,
    eval_univariate,
    scaled_from_json,
    scaled_to_json,
)
from .identities import (
    definite_integral,
    derivative_arg,
    derivative_x,
    kernel_integral,
    laplace_transform,
)
from .montecarlo import SamplerConfig
from .selftest import format_report, run_all
from .sweep import Row, format_csv, parse_grid, parse_metric, sweep, write_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2

__all__ = ["main", "EXIT_OK", "EXIT_USAGE", "EXIT_NUMERIC"]


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit with code 1, not 2."""

    def exit(self, status=0, message=None):
        if message:
            self._print_message(message, sys.stderr)
        raise SystemExit(EXIT_USAGE if status else EXIT_OK)


# ---------------------------------------------------------------------------
# Shared argument groups
# ---------------------------------------------------------------------------


def _add_fading_params(p: argparse.ArgumentParser):
    g = p.add_argument_group("fading parameters")
    g.add_argument("--alpha", type=float, required=True,
                   help="nonlinearity exponent (> 0)")
    g.add_argument("--eta", type=float, required=True,
                   help="power-imbalance parameter")
    g.add_argument("--mu", type=float, required=True,
                   help="number of multipath clusters (> 0)")
    g.add_argument("--m-s", dest="m_s", type=float, required=True,
                   help="shadowing shape (> 0)")
    g.add_argument("--fmt", choices=("I", "II"), default="I",
                   help="imbalance format (default I)")


def _add_output(p: argparse.ArgumentParser):
    g = p.add_argument_group("output")
    g.add_argument("-o", "--output", metavar="FILE",
                   help="write CSV here (default: stdout)")
    g.add_argument("--plot", action="store_true",
                   help="render a figure next to the CSV output")
    g.add_argument("--plot-output", metavar="FILE",
                   help="explicit figure path (default: output with .png)")


def _add_methods(p: argparse.ArgumentParser, default="analytic"):
    g = p.add_argument_group("evaluation")
    g.add_argument("--methods", default=default,
                   help=f"comma list of analytic,asymptotic,mc (default {default})")
    g.add_argument("--mc-samples", type=int, default=1_000_000,
                   help="Monte Carlo sample count (default 1000000)")
    g.add_argument("--seed", type=int, default=0,
                   help="Monte Carlo seed (default 0)")
    g.add_argument("--rtol", type=float, default=1e-10,
                   help="relative tolerance of the contour engine")
    g.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: FOXH_WORKERS or 1)")


def _params_from(args) -> FadingParams:
    return FadingParams(
        alpha=args.alpha, eta=args.eta, mu=args.mu, m_s=args.m_s, fmt=args.fmt
    )


def _mc_config(args) -> SamplerConfig:
    return SamplerConfig(n_samples=args.mc_samples, seed=args.seed)


def _emit(args, rows, *, x_name="gamma_bar_dB", y_label="probability",
          title=None, logy=True) -> int:
    if args.output:
        write_csv(rows, args.output, x_name)
    else:
        sys.stdout.write(format_csv(rows, x_name))
    if args.plot:
        fig_path = args.plot_output
        if fig_path is None:
            if not args.output:
                raise ParameterError(
                    "--plot needs -o FILE (or an explicit --plot-output)"
                )
            fig_path = os.path.splitext(args.output)[0] + ".png"
        from .plotting import render_rows

        x_label = "average SNR (dB)" if x_name == "gamma_bar_dB" else \
            "instantaneous SNR (dB)"
        render_rows(rows, fig_path, x_label=x_label, y_label=y_label,
                    title=title, logy=logy)
    return EXIT_OK


def _run_sweep(args, metrics, *, y_label, title) -> int:
    params = _params_from(args)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    rows = sweep(
        params,
        metrics,
        parse_grid(args.gamma_bar_db),
        methods=methods,
        mc_config=_mc_config(args),
        rtol=args.rtol,
        workers=args.workers,
    )
    return _emit(args, rows, y_label=y_label, title=title)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _cmd_eval_h(args) -> int:
    payload = _load_json(args.file)
    if payload.get("kind") == "scaled_bivariate":
        sc = scaled_from_json(payload)
        if sc.form == "argument":
            if args.u is None:
                raise ParameterError("argument-form payload needs -u U")
            value = sc.value(args.u, rtol=args.rtol)
        else:
            value = sc.value(rtol=args.rtol)
    else:
        desc = descriptor_from_json(payload)
        if isinstance(desc, BivariateHDescriptor):
            if args.x is None or args.y is None:
                raise ParameterError("bivariate descriptor needs -x X and -y Y")
            value = eval_bivariate(desc, args.x, args.y, rtol=args.rtol)
        else:
            if args.x is None:
                raise ParameterError("univariate descriptor needs -x X")
            value = eval_univariate(desc, args.x, rtol=args.rtol)
    print(f"{float(value):.12g}")
    return EXIT_OK


_KERNEL_OPS = {
    "exp-sqrt": "exp_sqrt",
    "sqrt-exp-sqrt": "sqrt_exp_sqrt",
    "erfc-sqrt": "erfc_sqrt",
}


def _cmd_identity(args) -> int:
    desc = descriptor_from_json(_load_json(args.file))
    if not isinstance(desc, BivariateHDescriptor):
        raise ParameterError("identities operate on bivariate descriptors")
    a, b = args.a, args.b
    if args.op == "integral":
        if args.limit is None:
            raise ParameterError("--limit is required for op 'integral'")
        sc = definite_integral(desc, a, b, args.limit)
    elif args.op == "laplace":
        if args.s is None:
            raise ParameterError("--s is required for op 'laplace'")
        sc = laplace_transform(desc, a, b, args.s)
    elif args.op in _KERNEL_OPS:
        if args.k is None:
            raise ParameterError(f"--k is required for op '{args.op}'")
        sc = kernel_integral(desc, a, b, _KERNEL_OPS[args.op], args.k)
    elif args.op == "ddx":
        sc = derivative_x(desc, a, b, form=args.form)
    elif args.op == "darg":
        sc = derivative_arg(desc, a, b, axis=args.axis)
    else:  # pragma: no cover - argparse choices prevent this
        raise ParameterError(f"unknown op {args.op!r}")
    out = {"result": scaled_to_json(sc)}
    if sc.form == "constant":
        out["value"] = sc.value(rtol=args.rtol)
    elif args.at is not None:
        out["at"] = args.at
        out["value"] = sc.value(args.at, rtol=args.rtol)
    failed = False
    if args.check:
        rep = sc.oracle_check(args.tolerance)
        out["oracle"] = {
            "kind": rep.kind,
            "value": rep.value,
            "reference": rep.reference,
            "rel_error": rep.rel_error,
            "tolerance": rep.tolerance,
            "passed": rep.passed,
            "detail": rep.detail,
        }
        failed = not rep.passed
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_NUMERIC if failed else EXIT_OK


_PDF_ROUTES = ("composite", "direct", "foxh", "quadrature")


def _cmd_pdf(args) -> int:
    params = _params_from(args).with_mean_snr(db_to_linear(args.mean_snr_db))
    grid_db = parse_grid(args.gamma_db)
    gammas = np.array([db_to_linear(d) for d in grid_db])
    routes = args.route or ["composite"]
    rows = []
    for route in routes:
        if route == "composite":
            vals, method = composite_pdf(params, gammas, rtol=args.rtol), "analytic"
        elif route == "direct":
            vals, method = pdf_direct(params, gammas), "analytic"
        elif route == "foxh":
            vals, method = pdf_foxh(params, gammas, rtol=args.rtol), "analytic"
        else:
            vals, method = composite_pdf_quadrature(params, gammas), "quadrature"
        rows.extend(
            Row(db, f"pdf:{route}", float(v), method)
            for db, v in zip(grid_db, vals)
        )
    rows.sort(key=lambda r: r.sort_key)
    return _emit(args, rows, x_name="gamma_dB", y_label="density",
                 title="SNR probability density", logy=True)


def _cmd_outage(args) -> int:
    metric = (
        f"outage:th_db={args.threshold_db:g}"
        if args.threshold_db is not None
        else f"outage:th={args.threshold:g}"
    )
    return _run_sweep(args, [metric], y_label="outage probability",
                      title="Outage probability")


def _cmd_sep(args) -> int:
    return _run_sweep(
        args,
        [f"sep:{args.modulation}"],
        y_label="symbol error probability",
        title="Average symbol error probability",
    )


def _cmd_mgf(args) -> int:
    return _run_sweep(
        args,
        [f"mgf:n={args.n},s={args.s:g}"],
        y_label="value",
        title="Generalized MGF",
    )


def _cmd_mc(args) -> int:
    args.methods = "mc"
    return _run_sweep(args, args.metric, y_label="estimate",
                      title="Monte Carlo estimates")


def _cmd_sweep(args) -> int:
    return _run_sweep(args, args.metric, y_label="value", title=None)


def _cmd_selftest(args) -> int:
    report = run_all(rtol=args.rtol)
    print(format_report(report))
    return EXIT_OK if report.ok else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="foxh", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version",
                        version=f"foxh-kit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("eval-h", help="evaluate a descriptor from a JSON file")
    p.add_argument("file", help="descriptor or scaled-result JSON file")
    p.add_argument("-x", type=float, help="first argument")
    p.add_argument("-y", type=float, help="second argument (bivariate)")
    p.add_argument("-u", type=float, help="argument for scaled argument-form")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_eval_h)

    p = sub.add_parser("identity",
                       help="apply an integral/derivative identity")
    p.add_argument("file", help="bivariate descriptor JSON file")
    p.add_argument("--op", required=True,
                   choices=("integral", "laplace", "exp-sqrt", "sqrt-exp-sqrt",
                            "erfc-sqrt", "ddx", "darg"))
    p.add_argument("-a", type=float, required=True, help="first argument scale")
    p.add_argument("-b", type=float, required=True, help="second argument scale")
    p.add_argument("--limit", type=float, help="upper limit (op integral)")
    p.add_argument("--s", type=float, help="transform variable (op laplace)")
    p.add_argument("--k", type=float, help="kernel decay constant (kernel ops)")
    p.add_argument("--form", choices=("t_shift", "s_shift"), default="t_shift",
                   help="parameter-shift form for op ddx")
    p.add_argument("--axis", choices=("a", "b"), default="a",
                   help="which scale op darg differentiates")
    p.add_argument("--at", type=float,
                   help="evaluate an argument-form result at this point")
    p.add_argument("--check", action="store_true",
                   help="run the independent oracle cross-check")
    p.add_argument("--tolerance", type=float, default=1e-6,
                   help="oracle tolerance (default 1e-6)")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_identity)

    p = sub.add_parser("pdf", help="tabulate the SNR density")
    _add_fading_params(p)
    p.add_argument("--gamma-db", required=True,
                   help="instantaneous-SNR grid in dB ('lo:hi:n', 'a,b,c' or 'x')")
    p.add_argument("--mean-snr-db", type=float, default=0.0,
                   help="average SNR in dB (default 0)")
    p.add_argument("--route", action="append", choices=_PDF_ROUTES,
                   help="density route (repeatable; default composite)")
    p.add_argument("--rtol", type=float, default=1e-10)
    _add_output(p)
    p.set_defaults(func=_cmd_pdf)

    def metric_sweep_parser(name, help_text, *, methods_default="analytic"):
        q = sub.add_parser(name, help=help_text)
        _add_fading_params(q)
        q.add_argument("--gamma-bar-db", required=True,
                       help="average-SNR grid in dB ('lo:hi:n', 'a,b,c' or 'x')")
        _add_methods(q, default=methods_default)
        _add_output(q)
        return q

    p = metric_sweep_parser("outage", "outage probability curve")
    th = p.add_mutually_exclusive_group(required=True)
    th.add_argument("--threshold-db", type=float,
                    help="SNR threshold in dB")
    th.add_argument("--threshold", type=float,
                    help="SNR threshold on the linear scale")
    p.set_defaults(func=_cmd_outage)

    p = metric_sweep_parser("sep", "average symbol error probability curve")
    p.add_argument("--modulation", required=True,
                   help="bpsk, bfsk, dbpsk, ncfsk, mpsk:M, lbpsk, lqpsk, lmpsk:M")
    p.set_defaults(func=_cmd_sep)

    p = metric_sweep_parser("mgf", "generalized MGF curve")
    p.add_argument("--n", type=int, required=True, help="moment order (>= 0)")
    p.add_argument("--s", type=float, required=True, help="transform variable")
    p.set_defaults(func=_cmd_mgf)

    p = metric_sweep_parser("mc", "Monte Carlo estimates only")
    p.add_argument("--metric", action="append", required=True,
                   help="metric spec (repeatable): outage:th_db=X, sep:MOD, "
                        "mgf:n=N,s=S")
    p.set_defaults(func=_cmd_mc)

    p = metric_sweep_parser("sweep", "multi-metric report")
    p.add_argument("--metric", action="append", required=True,
                   help="metric spec (repeatable)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("selftest", help="run the built-in diagnostic suite")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FoxHError as exc:
        print(f"numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
