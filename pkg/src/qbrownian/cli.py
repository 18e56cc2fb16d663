"""Command line front end.

Six subcommands share one configuration pipeline: library defaults, then
an optional ``key=value`` config file (``--config``), then per-key flags,
later layers winning.  All numeric flags are parsed by the same converter
as the file, so ``--T 1e4`` and a ``T = 1e4`` line are interchangeable.

    kernel       response-kernel table A, dA/dt, d2A/dt2, R^2
    coeffs       fluctuation coefficients X, Xdot, Y with error estimates
    moments      evolved second moments of the oscillator ground state
    check        positivity theorem + generator corollary per grid time
    asymptotics  numeric coefficients against their small-time leading terms
    scenario     full violation/recovery run writing report.json + CSVs

Output is deterministic: floats are printed with ``repr`` (shortest round
trip), line endings are LF, no timestamps, every CSV starts with a header.
Rerunning a subcommand with identical inputs produces identical bytes.

``check`` and ``scenario`` exit 0 whenever the artifacts were produced;
a negative physical verdict is data, not an error.  Exit codes classify
failures only, per EXIT_CODES: 2 bad configuration, 3 out-of-domain or
out-of-scope inputs, 4 regime violations (including a scenario grid that
contains no qualifying time, which leaves nothing to report), 5 quadrature
that cannot reach its budget, 1 internal inconsistencies.
"""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import gap31, leading_set
from .config import parse_config, resolve_grid
from .errors import (
    ConfigError,
    DomainError,
    IntegrationError,
    QBrownianError,
    RegimeError,
)
from .gaussian import GaussianState, associate_theorem_params, propagate_moments
from .kernel import dissipation_R2, kernel_derivatives
from .params import PhysicalParams
from .positivity import (
    TheoremReport,
    associate_corollary_params,
    corollary_check,
    theorem_check,
)
from .scenario import (
    DEFAULT_GRID_COUNT,
    DEFAULT_GRID_SPAN,
    ScanPoint,
    _chi_from_map,
    _margins_point,
    _qualifies,
    run_scenario,
)
from .spectral import coefficients

EXIT_CODES = {
    "ok": 0,
    "internal": 1,
    "config": 2,
    "domain": 3,
    "regime": 4,
    "integration": 5,
}

# default grids in alpha*t units, chosen per subcommand scale
_SPAN_KERNEL = (1e-3, 10.0)
_SPAN_CHECK = (1e-9, 1e-2)
_SPAN_ASYMPT = (1e-4, 1e-2)
_DEFAULT_COUNT = 25


def _exit_code(exc: QBrownianError) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CODES["config"]
    if isinstance(exc, IntegrationError):
        return EXIT_CODES["integration"]
    if isinstance(exc, RegimeError):
        return EXIT_CODES["regime"]
    if isinstance(exc, DomainError):
        return EXIT_CODES["domain"]
    return EXIT_CODES["internal"]


def to_jsonable(obj):
    """Plain JSON types from the library's result objects.

    Dataclasses keep their field order, enums collapse to their value,
    complex numbers become {"re": .., "im": ..}, and non-finite floats
    become null (JSON has no spelling for them).  Theorem reports carry
    their derived overall verdict under "passed".
    """
    if isinstance(obj, TheoremReport):
        out = {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
        out["passed"] = obj.passed
        return out
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return {"re": to_jsonable(z.real), "im": to_jsonable(z.imag)}
    if isinstance(obj, tuple) and hasattr(obj, "_fields"):
        return {name: to_jsonable(v) for name, v in zip(obj._fields, obj)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _write_csv(stream, header, rows):
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_cell(v) for v in row) + "\n")


def _emit(args, writer):
    """Run writer(stream) against --out or stdout."""
    if args.out:
        with Path(args.out).open("w", encoding="utf-8", newline="\n") as fh:
            writer(fh)
    else:
        writer(sys.stdout)


def _ground_state(params: PhysicalParams) -> GaussianState:
    """Oscillator ground state: pure, centered, minimal uncertainty."""
    return GaussianState(
        mean_q=0.0,
        mean_p=0.0,
        cqq=0.5 * params.hbar / (params.m * params.omega),
        cpp=0.5 * params.m * params.hbar * params.omega,
        cqp_sym=0.0,
    )


# ---------------------------------------------------------------- handlers


def _cmd_kernel(cfg, args) -> int:
    ts = resolve_grid(cfg, _SPAN_KERNEL, _DEFAULT_COUNT)
    A, dA, d2A = kernel_derivatives(ts, cfg.params)
    r2, one_minus = dissipation_R2(ts, cfg.params)
    rows = list(zip(ts, A, dA, d2A, r2, one_minus))
    _emit(args, lambda fh: _write_csv(
        fh, ["t", "A", "dA", "d2A", "R2", "one_minus_R2"], rows))
    return EXIT_CODES["ok"]


def _cmd_coeffs(cfg, args) -> int:
    ts = resolve_grid(cfg, _SPAN_KERNEL, _DEFAULT_COUNT)
    rows = []
    for t in ts:
        c = coefficients(float(t), cfg.model, cfg.params, cfg.rel_tol)
        rows.append((c.t, c.X, c.Xdot, c.Y, c.R2, c.err_X, c.err_Xdot, c.err_Y))
    _emit(args, lambda fh: _write_csv(
        fh, ["t", "X", "Xdot", "Y", "R2", "err_X", "err_Xdot", "err_Y"], rows))
    return EXIT_CODES["ok"]


def _cmd_moments(cfg, args) -> int:
    ts = resolve_grid(cfg, _SPAN_KERNEL, _DEFAULT_COUNT)
    state = _ground_state(cfg.params)
    rows = []
    for t in ts:
        c = coefficients(float(t), cfg.model, cfg.params, cfg.rel_tol)
        ev = propagate_moments(
            state, associate_theorem_params(c, cfg.params),
            cfg.params.m, cfg.params.hbar)
        det_check = ev.q2 * ev.p2 - (0.5 * ev.qp_sym) ** 2
        rows.append((c.t, ev.q2, ev.p2, ev.qp_sym, det_check))
    _emit(args, lambda fh: _write_csv(
        fh, ["t", "q2", "p2", "qp_sym", "det_check"], rows))
    return EXIT_CODES["ok"]


_CHECK_CSV_HEADER = [
    "t", "model", "X", "Xdot", "Y", "R2", "one_minus_R2",
    "cs_gap", "err_cs_gap", "gap31",
    "cond9_value", "cond9_err", "cond10_value", "cond10_err",
    "cond14_left", "cond14_left_err", "cond14_margin", "cond14_err",
    "qualified", "theorem_passed", "corollary_passes",
]


def _cmd_check(cfg, args) -> int:
    ts = resolve_grid(cfg, _SPAN_CHECK, _DEFAULT_COUNT)
    p = cfg.params
    records = []
    for t in ts:
        co = coefficients(float(t), cfg.model, p, cfg.rel_tol)
        m = _margins_point(co, p)
        theorem = None
        skip = None
        try:
            abcr = associate_theorem_params(co, p)
            chi = _chi_from_map(abcr, p)
            theorem = theorem_check(chi, abcr, p.m, p.hbar, t=float(t))
        except (RegimeError, DomainError) as exc:
            skip = str(exc)
        corr = corollary_check(
            *associate_corollary_params(co, p.m, p.hbar), t=float(t))
        records.append((co, m, theorem, skip, corr))

    if args.csv:
        rows = []
        for co, m, theorem, skip, corr in records:
            rows.append((
                co.t, co.model, co.X, co.Xdot, co.Y, co.R2, co.one_minus_R2,
                co.cs_gap, co.err_cs_gap, m["gap31"],
                m["cond9_value"], m["cond9_err"],
                m["cond10_value"], m["cond10_err"],
                m["cond14_left"], m["cond14_left_err"],
                m["cond14_margin"], m["cond14_err"],
                _qualifies(m, cfg.margin_factor),
                "" if theorem is None else theorem.passed,
                corr.passes,
            ))
        _emit(args, lambda fh: _write_csv(fh, _CHECK_CSV_HEADER, rows))
        return EXIT_CODES["ok"]

    def write_ndjson(fh):
        for co, m, theorem, skip, corr in records:
            rec = {
                "t": co.t,
                "model": co.model.value,
                "coefficients": to_jsonable(co),
                "margins": to_jsonable(m),
                "qualified": _qualifies(m, cfg.margin_factor),
                "theorem": to_jsonable(theorem) if theorem else None,
                "theorem_skipped": skip,
                "corollary": to_jsonable(corr),
            }
            fh.write(json.dumps(rec, allow_nan=False) + "\n")

    _emit(args, write_ndjson)
    return EXIT_CODES["ok"]


def _cmd_asymptotics(cfg, args) -> int:
    ts = resolve_grid(cfg, _SPAN_ASYMPT, _DEFAULT_COUNT)
    rows = []
    for t in ts:
        co = coefficients(float(t), cfg.model, cfg.params, cfg.rel_tol)
        lead = leading_set(float(t), cfg.model, cfg.params)
        g31 = gap31(co, cfg.params.hbar)
        for name, num, ld in (
            ("X", co.X, lead.X_lead),
            ("Xdot", co.Xdot, lead.Xdot_lead),
            ("Y", co.Y, lead.Y_lead),
            ("one_minus_R2", co.one_minus_R2, lead.one_minus_R2_lead),
            ("gap31", g31, lead.gap31_lead),
        ):
            ratio = num / ld if ld != 0.0 else math.nan
            rows.append((co.t, name, num, ld, ratio))
    _emit(args, lambda fh: _write_csv(
        fh, ["t", "quantity", "numeric", "leading", "ratio"], rows))
    return EXIT_CODES["ok"]


def _cmd_scenario(cfg, args) -> int:
    explicit = (
        cfg.grid_start is not None
        or cfg.grid_count is not None
        or cfg.grid_kind != "log"
    )
    grid = (
        resolve_grid(cfg, DEFAULT_GRID_SPAN, DEFAULT_GRID_COUNT)
        if explicit else None
    )
    res = run_scenario(
        cfg.params,
        (cfg.violation_model, cfg.positivity_model),
        t_grid=grid,
        rel_tol=cfg.rel_tol,
        margin_factor=cfg.margin_factor,
    )

    outdir = Path(args.out) if args.out else Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)

    report = {
        "schema_version": 1,
        "config": to_jsonable(cfg.as_mapping()),
        "result": to_jsonable(res),
    }
    (outdir / "report.json").write_text(
        json.dumps(report, indent=2, allow_nan=False) + "\n", encoding="utf-8")

    fields = [f.name for f in dataclasses.fields(ScanPoint)]
    with (outdir / "margins.csv").open("w", encoding="utf-8", newline="\n") as fh:
        _write_csv(fh, fields,
                   (tuple(getattr(pt, n) for n in fields) for pt in res.scan))

    vm, pm = res.violation_model, res.positivity_model
    by_model = {vm: {}, pm: {}}
    for pt in res.scan:
        by_model[pt.model][pt.t] = pt.gap31
    with (outdir / "plotdata.csv").open("w", encoding="utf-8", newline="\n") as fh:
        _write_csv(
            fh,
            ["t", f"gap31_{vm.value}", f"gap31_{pm.value}"],
            ((t, by_model[vm][t], by_model[pm][t]) for t in res.t_grid),
        )

    sys.stdout.write(
        f"t_prime={res.t_prime!r} I={res.theorem.I_value!r} "
        f"uncertainty_violated={str(res.uncertainty.violated).lower()} "
        f"corollary_passes={str(res.corollary_uniform.passes).lower()}\n")
    sys.stdout.write(
        f"wrote report.json, margins.csv, plotdata.csv in {outdir}\n")
    return EXIT_CODES["ok"]


# ------------------------------------------------------------------ parser

_PARAM_FLAGS = (
    ("--m", "m", "oscillator mass"),
    ("--omega", "omega", "oscillator frequency"),
    ("--gamma", "gamma", "damping rate (needs alpha >= 3*gamma)"),
    ("--alpha", "alpha", "bath cutoff frequency"),
    ("--T", "T", "bath temperature"),
    ("--hbar", "hbar", "reduced Planck constant"),
    ("--k", "k", "Boltzmann constant"),
)

_GRID_FLAGS = (
    ("--grid-kind", "grid_kind", "grid spacing: log or linear"),
    ("--grid-start", "grid_start", "first grid time (seconds)"),
    ("--grid-stop", "grid_stop", "last grid time (seconds)"),
    ("--grid-count", "grid_count", "number of grid times"),
)

_OVERRIDE_KEYS = (
    "m", "omega", "gamma", "alpha", "T", "hbar", "k", "model",
    "violation_model", "positivity_model",
    "grid_kind", "grid_start", "grid_stop", "grid_count",
    "rel_tol", "margin_factor",
)


def _common_parser(with_model: bool = True) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", default=None,
                   help="key=value configuration file")
    for flag, dest, help_text in _PARAM_FLAGS:
        g.add_argument(flag, dest=dest, metavar="V", default=None,
                       help=help_text)
    if with_model:
        g.add_argument("--model", default=None,
                       help="occupation model: exact, high_t or uniform")
    for flag, dest, help_text in _GRID_FLAGS:
        g.add_argument(flag, dest=dest, metavar="V", default=None,
                       help=help_text)
    g.add_argument("--rel-tol", dest="rel_tol", metavar="V", default=None,
                   help="relative accuracy target for the coefficients")
    g.add_argument("--margin-factor", dest="margin_factor", metavar="V",
                   default=None,
                   help="required ratio of condition value to its error")
    return common


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbrownian",
        description=(
            "Exact coefficients, Gaussian moments and positivity witnesses "
            "for a damped oscillator in a Drude bath."),
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="COMMAND")
    common = _common_parser()
    out_file = dict(metavar="FILE", default=None,
                    help="output file (default: stdout)")

    p = sub.add_parser(
        "kernel", parents=[_common_parser(with_model=False)],
        help="response-kernel table over a time grid",
        description=(
            "CSV with columns t,A,dA,d2A,R2,one_minus_R2 over the grid "
            "(default: 25 log-spaced times, alpha*t in [1e-3, 10])."))
    p.add_argument("--out", **out_file)
    p.set_defaults(handler=_cmd_kernel, model=None)

    p = sub.add_parser(
        "coeffs", parents=[common],
        help="fluctuation coefficients with error estimates",
        description=(
            "CSV with columns t,X,Xdot,Y,R2,err_X,err_Xdot,err_Y over the "
            "grid (default: 25 log-spaced times, alpha*t in [1e-3, 10])."))
    p.add_argument("--out", **out_file)
    p.set_defaults(handler=_cmd_coeffs)

    p = sub.add_parser(
        "moments", parents=[common],
        help="evolved second moments of the oscillator ground state",
        description=(
            "CSV with columns t,q2,p2,qp_sym,det_check where qp_sym is the "
            "full anticommutator average and det_check = q2*p2 - "
            "(qp_sym/2)^2, evolved from the oscillator ground state "
            "(default grid: 25 log-spaced times, alpha*t in [1e-3, 10])."))
    p.add_argument("--out", **out_file)
    p.set_defaults(handler=_cmd_moments)

    p = sub.add_parser(
        "check", parents=[common],
        help="positivity theorem and generator corollary per grid time",
        description=(
            "One JSON record per grid time with the coefficient set, the "
            "state-independent condition margins, the full theorem report "
            "(null with a reason when no candidate state exists) and the "
            "generator corollary (default grid: 25 log-spaced times, "
            "alpha*t in [1e-9, 1e-2]).  Exit status reflects failures "
            "only, never the physical verdict."))
    p.add_argument("--csv", action="store_true",
                   help="flat CSV of the margins instead of JSON records")
    p.add_argument("--out", **out_file)
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser(
        "asymptotics", parents=[common],
        help="numeric coefficients against small-time leading terms",
        description=(
            "CSV with columns t,quantity,numeric,leading,ratio for X, Xdot, "
            "Y, one_minus_R2 and gap31 (default grid: 25 log-spaced times, "
            "alpha*t in [1e-4, 1e-2]).  The exact occupation model has no "
            "closed leading forms and is rejected."))
    p.add_argument("--out", **out_file)
    p.set_defaults(handler=_cmd_asymptotics)

    p = sub.add_parser(
        "scenario", parents=[common],
        help="full violation/recovery run with report and plot data",
        description=(
            "Scan the grid (default: 71 log-spaced times, alpha*t in "
            "[1e-9, 1e-2]), select the violation time, build the witness "
            "state and write report.json, margins.csv and plotdata.csv "
            "into the output directory.  A grid with no qualifying time "
            "exits 4, since there is nothing to report."))
    p.add_argument("--violation-model", dest="violation_model", default=None,
                   help="occupation model expected to break positivity "
                        "(default: high_t)")
    p.add_argument("--positivity-model", dest="positivity_model",
                   default=None,
                   help="occupation model expected to stay positive "
                        "(default: uniform)")
    p.add_argument("--out", metavar="DIR", default=None,
                   help="output directory (default: config key 'out', "
                        "else the working directory)")
    p.set_defaults(handler=_cmd_scenario)

    return parser


def _overrides(args) -> dict:
    out = {}
    for key in _OVERRIDE_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, _overrides(args))
        return args.handler(cfg, args)
    except QBrownianError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
