"""Command-line front end.

Subcommands:

* ``rearrange``  profile spec in, rearranged half-line weight spec out
* ``check``      evaluate the sufficient conditions and print the verdict
* ``oracle``     variational lower bounds for the four inequality constants
* ``probe``      counterexample experiments: ``torus``, ``line``, ``vdc``
* ``report``     check + oracle combined into one document

Exit codes: 0 success (for ``check``/``report``: inequality GUARANTEED),
2 verdict UNKNOWN, 3 indices INAPPLICABLE, 4 bad input (parse failure,
invalid parameters; the message names the offending field).

Outputs are written under ``--out`` (default: current directory) in the
formats selected by ``--format`` (default: both ``json`` and ``csv``), with
deterministic bytes for a fixed invocation.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import __version__
from .conditions import GUARANTEED, INAPPLICABLE, UNKNOWN, decide
from .errors import WfourierError
from .hardy import (
    GridSpec,
    best_constant_compound,
    best_constant_halfpower,
    best_constant_main,
    best_constant_tailmean,
)
from .io import (
    SpecError,
    dump_spec,
    dumps_json,
    estimates_csv,
    estimates_report,
    grid_meta,
    load_spec,
    probe_csv,
    probe_plot_data,
    probe_report,
    rows_to_csv,
    verdict_csv,
    verdict_report,
)
from .probe import (
    LINE_SCHEDULE,
    TORUS_SCHEDULE,
    OscillatoryProfile,
    ProbeParams,
    line_counterexample,
    torus_counterexample,
    vdc_bound_check,
)
from .weights import Indices, MeasureProfile, Weight, rearrange, reciprocal_rearrange

EXIT_OK = 0
EXIT_UNKNOWN = 2
EXIT_INAPPLICABLE = 3
EXIT_INPUT = 4

_VERDICT_EXIT = {GUARANTEED: EXIT_OK, UNKNOWN: EXIT_UNKNOWN, INAPPLICABLE: EXIT_INAPPLICABLE}


class CliError(Exception):
    """Input rejected; message is printed and the process exits with 4."""


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="wfourier",
        description="weighted Fourier inequality laboratory",
    )
    top.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=".", help="output directory (created if missing)")
        p.add_argument(
            "--format",
            default="json,csv",
            help="comma-separated output formats: json, csv",
        )
        p.add_argument("--seed", type=int, default=0, help="seed for randomized starts")

    def add_indices(p):
        p.add_argument("--p", type=float, required=True, help="input-side exponent")
        p.add_argument("--q", type=float, required=True, help="transform-side exponent")

    def add_grid(p):
        p.add_argument("--grid-min", type=float, default=1e-4, help="lower end of the ascent grid")
        p.add_argument("--grid-max", type=float, default=1e4, help="upper end of the ascent grid")
        p.add_argument("--ppd", type=int, default=32, help="grid points per decade")

    pr = sub.add_parser("rearrange", help="rearrange a profile onto the half line")
    pr.add_argument("input", help="profile or weight spec file")
    pr.add_argument(
        "--reciprocal",
        action="store_true",
        help="rearrange the reciprocal instead (for input-side weights)",
    )
    pr.add_argument("--out", default=".", help="output directory (created if missing)")

    pc = sub.add_parser("check", help="evaluate the sufficient weight conditions")
    pc.add_argument("u_input", help="transform-side weight or profile spec file")
    pc.add_argument("w_input", help="input-side weight or profile spec file")
    add_indices(pc)
    add_grid(pc)
    add_common(pc)

    po = sub.add_parser("oracle", help="variational lower bounds for the best constants")
    po.add_argument("u_input", help="transform-side weight or profile spec file")
    po.add_argument("w_input", help="input-side weight or profile spec file")
    add_indices(po)
    add_grid(po)
    add_common(po)
    po.add_argument(
        "--levels", type=int, default=3, help="number of grid refinement levels"
    )

    pp = sub.add_parser("probe", help="counterexample experiments")
    psub = pp.add_subparsers(dest="experiment", required=True)
    for name in ("torus", "line"):
        pe = psub.add_parser(name, help=f"{name} construction along a cutoff schedule")
        pe.add_argument("--p", type=float, default=20.0)
        pe.add_argument("--q", type=float, default=1.05)
        pe.add_argument("--alpha", type=float, default=0.97)
        pe.add_argument("--beta", type=float, default=0.945)
        pe.add_argument(
            "--k-schedule",
            default=None,
            help="comma-separated increasing cutoffs (default per experiment)",
        )
        pe.add_argument(
            "--m-points",
            type=int,
            default=1 << 21,
            help="evaluation points for the circle quadrature",
        )
        add_common(pe)
    pv = psub.add_parser("vdc", help="oscillatory-integral bound check")
    pv.add_argument("--a", type=float, required=True, help="lower endpoint, must exceed 1")
    pv.add_argument("--b", type=float, required=True, help="upper endpoint")
    pv.add_argument("--x", type=float, default=0.0, help="linear phase frequency")
    pv.add_argument("--amp-c", type=float, default=1.0, help="amplitude scale")
    pv.add_argument("--amp-s", type=float, default=0.0, help="amplitude power exponent")
    pv.add_argument("--amp-tau", type=float, default=0.0, help="amplitude log-power exponent")
    add_common(pv)

    pg = sub.add_parser("report", help="conditions and constants in one document")
    pg.add_argument("u_input", help="transform-side weight or profile spec file")
    pg.add_argument("w_input", help="input-side weight or profile spec file")
    add_indices(pg)
    add_grid(pg)
    add_common(pg)

    return top


# -- shared plumbing -------------------------------------------------------------


def _formats(arg: str) -> set:
    fmts = {f.strip() for f in arg.split(",") if f.strip()}
    bad = fmts - {"json", "csv"}
    if bad or not fmts:
        raise CliError(f"--format accepts json,csv; got {arg!r}")
    return fmts


def _outdir(arg: str) -> str:
    os.makedirs(arg, exist_ok=True)
    return arg


def _write(path: str, text: str) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(path)
    return path


def _load_halfline(path: str, side: str) -> Weight:
    """A spec file as the half-line weight for the given side.

    Weight specs are taken as already rearranged.  Profile specs are
    rearranged here: the transform side uses the plain rearrangement, the
    input side the reciprocal one (its reciprocal is what must decrease).
    """
    obj = load_spec(path)
    if isinstance(obj, MeasureProfile):
        return reciprocal_rearrange(obj) if side == "input" else rearrange(obj)
    return obj


def _gridspec(ns) -> GridSpec:
    try:
        return GridSpec(
            t_min=ns.grid_min,
            t_max=ns.grid_max,
            points_per_decade=ns.ppd,
            seed=ns.seed,
            levels=getattr(ns, "levels", 3),
        )
    except ValueError as e:
        raise CliError(f"grid rejected: {e}") from e


def _meta(ns, **extra) -> dict:
    meta = {"tool": "wfourier", "version": __version__, "command": ns.command}
    meta.update(extra)
    return meta


# -- subcommands ------------------------------------------------------------------


def cmd_rearrange(ns) -> int:
    obj = load_spec(ns.input)
    if isinstance(obj, Weight):
        if ns.reciprocal:
            raise CliError("--reciprocal needs a profile spec, not a half-line weight")
        out = obj  # already on the half line; emission still normalizes the spec
    else:
        out = reciprocal_rearrange(obj) if ns.reciprocal else rearrange(obj)
    stem = os.path.splitext(os.path.basename(ns.input))[0]
    suffix = "_reciprocal_rearranged.json" if ns.reciprocal else "_rearranged.json"
    path = os.path.join(_outdir(ns.out), stem + suffix)
    dump_spec(out, path)
    print(path)
    return EXIT_OK


def cmd_check(ns) -> int:
    u = _load_halfline(ns.u_input, "transform")
    w = _load_halfline(ns.w_input, "input")
    verdict = decide(u, w, ns.p, ns.q)
    fmts = _formats(ns.format)
    out = _outdir(ns.out)
    meta = _meta(ns, p=ns.p, q=ns.q, u_input=ns.u_input, w_input=ns.w_input)
    if "json" in fmts:
        _write(os.path.join(out, "report.json"), dumps_json(verdict_report(verdict, meta)))
    if "csv" in fmts:
        _write(os.path.join(out, "report.csv"), verdict_csv(verdict))
    print(f"verdict: {verdict.guarantee}" + (f" via {verdict.route}" if verdict.route else ""))
    return _VERDICT_EXIT[verdict.guarantee]


_ORACLES = (
    ("main", best_constant_main),
    ("halfpower", best_constant_halfpower),
    ("tailmean", best_constant_tailmean),
    ("compound", best_constant_compound),
)


def cmd_oracle(ns) -> int:
    u = _load_halfline(ns.u_input, "transform")
    w = _load_halfline(ns.w_input, "input")
    if not (1.0 < ns.p < math.inf and 0.0 < ns.q < math.inf):
        raise CliError("oracle needs finite indices with p > 1 and q > 0")
    idx = Indices(ns.p, ns.q)
    grid = _gridspec(ns)
    named = {name: fn(u, w, idx, grid=grid) for name, fn in _ORACLES}
    fmts = _formats(ns.format)
    out = _outdir(ns.out)
    meta = _meta(ns, p=ns.p, q=ns.q, grid=grid_meta(grid))
    if "json" in fmts:
        _write(os.path.join(out, "constants.json"), dumps_json(estimates_report(named, meta)))
    if "csv" in fmts:
        _write(os.path.join(out, "constants.csv"), estimates_csv(named))
    for name, est in named.items():
        tag = " (diverging)" if est.diverging else ""
        print(f"{name}: {est.value:.6g}{tag}")
    return EXIT_OK


def _probe_params(ns, default_schedule) -> ProbeParams:
    if ns.k_schedule is None:
        schedule = default_schedule
    else:
        try:
            schedule = tuple(int(tok) for tok in ns.k_schedule.split(",") if tok.strip())
        except ValueError as e:
            raise CliError(f"--k-schedule must be comma-separated integers: {e}") from e
    try:
        return ProbeParams(
            p=ns.p,
            q=ns.q,
            alpha=ns.alpha,
            beta=ns.beta,
            k_schedule=schedule,
            m_points=ns.m_points,
        )
    except ValueError as e:
        raise CliError(f"probe parameters rejected: {e}") from e


def cmd_probe(ns) -> int:
    fmts = _formats(ns.format)
    out = _outdir(ns.out)
    if ns.experiment == "vdc":
        if not 1.0 < ns.a < ns.b:
            raise CliError("--a and --b must satisfy 1 < a < b")
        try:
            prof = OscillatoryProfile(c=ns.amp_c, s=ns.amp_s, tau=ns.amp_tau)
            lhs, rhs, holds = vdc_bound_check(prof, ns.a, ns.b, ns.x)
        except WfourierError as e:
            raise CliError(f"bound check rejected: {e}") from e
        payload = {
            "lhs": lhs,
            "rhs": rhs,
            "holds": holds,
            "a": ns.a,
            "b": ns.b,
            "x": ns.x,
            "amplitude": {"c": ns.amp_c, "s": ns.amp_s, "tau": ns.amp_tau},
            "meta": _meta(ns),
        }
        if "json" in fmts:
            _write(os.path.join(out, "probe_vdc.json"), dumps_json(payload))
        if "csv" in fmts:
            _write(
                os.path.join(out, "probe_vdc.csv"),
                rows_to_csv(("lhs", "rhs", "holds"), [(lhs, rhs, holds)]),
            )
        print(f"lhs={lhs:.6g} rhs={rhs:.6g} holds={holds}")
        return EXIT_OK if holds else EXIT_UNKNOWN

    if ns.experiment == "torus":
        params = _probe_params(ns, TORUS_SCHEDULE)
        result = torus_counterexample(params)
    else:
        params = _probe_params(ns, LINE_SCHEDULE)
        result = line_counterexample(params)
    name = f"probe_{ns.experiment}"
    meta = _meta(
        ns,
        p=ns.p,
        q=ns.q,
        alpha=ns.alpha,
        beta=ns.beta,
        k_schedule=list(params.k_schedule),
    )
    if "json" in fmts:
        _write(os.path.join(out, f"{name}.json"), dumps_json(probe_report(result, meta)))
    if "csv" in fmts:
        _write(os.path.join(out, f"{name}.csv"), probe_csv(result))
        _write(os.path.join(out, f"{name}_plot.csv"), probe_plot_data(result))
    for r in result.rows:
        print(f"K={r.k} ratio={r.ratio:.6g}")
    return EXIT_OK


def cmd_report(ns) -> int:
    u = _load_halfline(ns.u_input, "transform")
    w = _load_halfline(ns.w_input, "input")
    verdict = decide(u, w, ns.p, ns.q)
    grid = _gridspec(ns)
    named = {}
    if 1.0 < ns.p < math.inf and 0.0 < ns.q < math.inf:
        idx = Indices(ns.p, ns.q)
        named = {name: fn(u, w, idx, grid=grid) for name, fn in _ORACLES}
    fmts = _formats(ns.format)
    out = _outdir(ns.out)
    meta = _meta(ns, p=ns.p, q=ns.q, grid=grid_meta(grid))
    doc = {
        "verdict": verdict_report(verdict),
        "constants": estimates_report(named) if named else None,
        "meta": meta,
    }
    if "json" in fmts:
        _write(os.path.join(out, "full_report.json"), dumps_json(doc))
    if "csv" in fmts:
        _write(os.path.join(out, "full_report_conditions.csv"), verdict_csv(verdict))
        if named:
            _write(os.path.join(out, "full_report_constants.csv"), estimates_csv(named))
    print(f"verdict: {verdict.guarantee}" + (f" via {verdict.route}" if verdict.route else ""))
    return _VERDICT_EXIT[verdict.guarantee]


_COMMANDS = {
    "rearrange": cmd_rearrange,
    "check": cmd_check,
    "oracle": cmd_oracle,
    "probe": cmd_probe,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        return _COMMANDS[ns.command](ns)
    except (CliError, SpecError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except WfourierError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
