"""Serialization: weight specification files, reports, tables.

Weight specification files are JSON-shaped text with a ``kind`` tag:

* ``power``    a single pure power piece c * (t/from)**a,
* ``samples``  a piecewise power weight, one segment per grid interval plus a
               trailing open-ended tail segment; each segment carries the
               value ``c`` at its left endpoint ``from`` and the local
               log-log slope ``a``,
* ``profile``  a weight attached to its measure space (even weight on the
               line, weight on the circle, even sequence), wrapping a weight
               spec or an explicit value list.

Parsing uses the segment endpoints and values (slopes are recomputed and only
checked for consistency), so a dump/parse cycle reproduces the in-memory
weight exactly: floats are written in shortest round-trip form.

Reports and tables are emitted deterministically: object keys sorted, fixed
column order, ``\n`` line endings, shortest round-trip floats.  Non-finite
values appear as the strings "inf", "-inf", "nan" in JSON and bare tokens in
CSV.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import math

import numpy as np

from .conditions import Verdict
from .hardy import ConstantEstimate, GridSpec, StepFunction
from .probe import ProbeResult
from .weights import (
    LOGLOG,
    STEP,
    MeasureProfile,
    SequenceWeight,
    Weight,
)

SPEC_KINDS = ("power", "samples", "profile")


class SpecError(ValueError):
    """Weight specification file rejected; the message names the field."""


# -- float and JSON discipline -------------------------------------------------


def _fmt(x: float) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def _plain(obj):
    """Recursively convert to JSON-ready python types; non-finite to strings."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    return obj


def dumps_json(payload: dict) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"


def _csv_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        v = _fmt(x)
        return v if isinstance(v, str) else repr(v)
    return str(x)


def rows_to_csv(header: tuple, rows) -> str:
    buf = _stdio.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([_csv_cell(c) for c in row])
    return buf.getvalue()


# -- weight specs ---------------------------------------------------------------


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise SpecError(f"{where}.{key} is missing")
    return d[key]


def _num(d: dict, key: str, where: str, optional: bool = False):
    if key not in d or d[key] is None:
        if optional:
            return None
        raise SpecError(f"{where}.{key} is missing")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"{where}.{key} must be a number, got {v!r}")
    return float(v)


def weight_to_spec(w: Weight) -> dict:
    """Weight as a JSON-shaped dict that parses back to an identical weight."""
    pure_power = (
        w.grid.size == 1
        and w.head_exp == w.tail_exp
        and w.inf_beyond is None
        and w.zero_beyond is None
        and w.interp == LOGLOG
    )
    if pure_power:
        return {
            "kind": "power",
            "segments": [
                {"c": float(w.values[0]), "a": float(w.head_exp), "from": float(w.grid[0]), "to": None}
            ],
            "head_exp": float(w.head_exp),
            "tail_exp": float(w.tail_exp),
            "inf_beyond": None,
            "zero_beyond": None,
            "interp": w.interp,
        }
    g, v = w.grid, w.values
    segs = []
    for i in range(g.size - 1):
        if w.interp == LOGLOG and v[i] > 0.0 and v[i + 1] > 0.0:
            slope = math.log(v[i + 1] / v[i]) / math.log(g[i + 1] / g[i])
        else:
            slope = 0.0
        segs.append({"c": float(v[i]), "a": slope, "from": float(g[i]), "to": float(g[i + 1])})
    segs.append({"c": float(v[-1]), "a": float(w.tail_exp), "from": float(g[-1]), "to": None})
    return {
        "kind": "samples",
        "segments": segs,
        "head_exp": float(w.head_exp),
        "tail_exp": float(w.tail_exp),
        "inf_beyond": None if w.inf_beyond is None else float(w.inf_beyond),
        "zero_beyond": None if w.zero_beyond is None else float(w.zero_beyond),
        "interp": w.interp,
    }


def weight_from_spec(d: dict) -> Weight:
    if not isinstance(d, dict):
        raise SpecError("spec root must be an object")
    kind = _need(d, "kind", "spec")
    if kind not in ("power", "samples"):
        raise SpecError(f"spec.kind must be 'power' or 'samples' here, got {kind!r}")
    segs = _need(d, "segments", "spec")
    if not isinstance(segs, list) or not segs:
        raise SpecError("spec.segments must be a non-empty list")
    interp = d.get("interp", LOGLOG)
    if interp not in (LOGLOG, STEP):
        raise SpecError(f"spec.interp must be {LOGLOG!r} or {STEP!r}, got {interp!r}")
    if kind == "power":
        if len(segs) != 1:
            raise SpecError("spec.segments of a power spec must hold exactly one segment")
        s0 = segs[0]
        c = _num(s0, "c", "segments[0]")
        a = _num(s0, "a", "segments[0]")
        anchor = _num(s0, "from", "segments[0]", optional=True)
        if c < 0.0:
            raise SpecError("segments[0].c must be non-negative")
        try:
            if anchor is None or anchor == 1.0:
                return Weight.from_power(c, a)
            return Weight(
                grid=np.array([anchor]), values=np.array([c]), head_exp=a, tail_exp=a
            )
        except ValueError as e:
            raise SpecError(f"spec rejected: {e}") from e
    grid, values = [], []
    for i, s in enumerate(segs):
        where = f"segments[{i}]"
        if not isinstance(s, dict):
            raise SpecError(f"{where} must be an object")
        grid.append(_num(s, "from", where))
        values.append(_num(s, "c", where))
        _num(s, "a", where)
        if i < len(segs) - 1 and _num(s, "to", where) != _num(segs[i + 1], "from", f"segments[{i + 1}]"):
            raise SpecError(f"{where}.to must equal segments[{i + 1}].from")
    head = _num(d, "head_exp", "spec", optional=True)
    tail = _num(d, "tail_exp", "spec", optional=True)
    try:
        return Weight.from_samples(
            np.array(grid),
            np.array(values),
            head_exp=head,
            tail_exp=tail if tail is not None else segs[-1].get("a"),
            inf_beyond=_num(d, "inf_beyond", "spec", optional=True),
            zero_beyond=_num(d, "zero_beyond", "spec", optional=True),
            interp=interp,
        )
    except ValueError as e:
        raise SpecError(f"spec rejected: {e}") from e


def profile_to_spec(p: MeasureProfile) -> dict:
    out = {"kind": "profile", "space": p.space, "even_half": bool(p.even_half)}
    if p.sequence is not None:
        out["sequence"] = {
            "values": [float(v) for v in p.sequence.values],
            "tail_exp": None if p.sequence.tail_exp is None else float(p.sequence.tail_exp),
        }
    else:
        out["weight"] = weight_to_spec(p.weight)
    return out


def profile_from_spec(d: dict) -> MeasureProfile:
    space = _need(d, "space", "profile")
    even_half = d.get("even_half", False)
    if not isinstance(even_half, bool):
        raise SpecError("profile.even_half must be a boolean")
    try:
        if "sequence" in d and d["sequence"] is not None:
            seq = d["sequence"]
            vals = _need(seq, "values", "profile.sequence")
            if not isinstance(vals, list) or not vals:
                raise SpecError("profile.sequence.values must be a non-empty list")
            return MeasureProfile(
                space=space,
                sequence=SequenceWeight(
                    np.array(vals, dtype=float),
                    tail_exp=_num(seq, "tail_exp", "profile.sequence", optional=True),
                ),
            )
        wt = _need(d, "weight", "profile")
        return MeasureProfile(space=space, weight=weight_from_spec(wt), even_half=even_half)
    except SpecError:
        raise
    except Exception as e:
        raise SpecError(f"profile rejected: {e}") from e


def load_spec(path: str):
    """Parse a spec file into a Weight or MeasureProfile."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecError(f"{path} is not valid structured text: line {e.lineno}: {e.msg}") from e
    if not isinstance(d, dict):
        raise SpecError(f"{path}: spec root must be an object")
    kind = _need(d, "kind", "spec")
    if kind == "profile":
        return profile_from_spec(d)
    if kind in ("power", "samples"):
        return weight_from_spec(d)
    raise SpecError(f"spec.kind must be one of {SPEC_KINDS}, got {kind!r}")


def dump_spec(obj, path: str) -> None:
    spec = profile_to_spec(obj) if isinstance(obj, MeasureProfile) else weight_to_spec(obj)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(spec))


# -- reports --------------------------------------------------------------------


def _cond_dict(c) -> dict:
    return {
        "cond_id": c.cond_id,
        "value": c.value,
        "holds": c.holds,
        "converged": c.converged,
        "refinement_delta": c.refinement_delta,
        "diagnostic": c.diagnostic,
        "series": list(c.series),
    }


def verdict_report(v: Verdict, meta: dict | None = None) -> dict:
    """Self-describing condition report for one (u, w, p, q) instance."""
    out = {
        "p": v.p,
        "q": v.q,
        "guarantee": v.guarantee,
        "route": v.route,
        "note": v.note,
        "conditions": [_cond_dict(c) for c in v.conditions],
    }
    if meta:
        out["meta"] = meta
    return out


VERDICT_CSV_HEADER = ("cond_id", "value", "holds", "converged", "refinement_delta", "diagnostic")


def verdict_csv(v: Verdict) -> str:
    rows = [
        (c.cond_id, c.value, c.holds, c.converged, c.refinement_delta, c.diagnostic)
        for c in v.conditions
    ]
    return rows_to_csv(VERDICT_CSV_HEADER, rows)


def _witness_dict(wit: StepFunction | None) -> dict | None:
    if wit is None:
        return None
    return {"edges": list(wit.edges), "values": list(wit.values)}


def estimate_dict(name: str, est: ConstantEstimate) -> dict:
    return {
        "inequality": name,
        "value": est.value,
        "diverging": est.diverging,
        "refinement_series": list(est.refinement_series),
        "witness": _witness_dict(est.lower_witness),
    }


ESTIMATE_CSV_HEADER = ("inequality", "value", "diverging", "refinement_series")


def estimates_csv(named: dict) -> str:
    rows = [
        (name, est.value, est.diverging, ";".join(repr(float(x)) for x in est.refinement_series))
        for name, est in named.items()
    ]
    return rows_to_csv(ESTIMATE_CSV_HEADER, rows)


def estimates_report(named: dict, meta: dict | None = None) -> dict:
    out = {"estimates": [estimate_dict(n, e) for n, e in named.items()]}
    if meta:
        out["meta"] = meta
    return out


PROBE_CSV_HEADER = ("k", "numerator", "denominator", "ratio", "sup_norm", "sup_delta")
PROBE_LINE_CSV_HEADER = PROBE_CSV_HEADER + (
    "a_lower_margin",
    "b1_cap",
    "b2_cap",
    "half_margin",
    "triangle_residual",
    "denominator_direct",
)


def probe_csv(res: ProbeResult) -> str:
    if res.line:
        rows = [
            (
                r.k, r.numerator, r.denominator, r.ratio, r.sup_norm, r.sup_delta,
                d.a_lower_margin, d.b1_cap, d.b2_cap, d.half_margin,
                d.triangle_residual, d.denominator_direct,
            )
            for r, d in zip(res.rows, res.line)
        ]
        return rows_to_csv(PROBE_LINE_CSV_HEADER, rows)
    rows = [
        (r.k, r.numerator, r.denominator, r.ratio, r.sup_norm, r.sup_delta) for r in res.rows
    ]
    return rows_to_csv(PROBE_CSV_HEADER, rows)


def probe_plot_data(res: ProbeResult) -> str:
    rows = [(math.log(r.k), math.log(r.ratio)) for r in res.rows]
    return rows_to_csv(("log_k", "log_ratio"), rows)


def probe_report(res: ProbeResult, meta: dict | None = None) -> dict:
    out = {
        "rows": [
            {
                "k": r.k,
                "numerator": r.numerator,
                "denominator": r.denominator,
                "ratio": r.ratio,
                "sup_norm": r.sup_norm,
                "sup_delta": r.sup_delta,
            }
            for r in res.rows
        ],
        "numerator_slope": res.numerator_slope,
        "numerator_residual": res.numerator_residual,
        "ratio_slope": res.ratio_slope,
        "ratio_residual": res.ratio_residual,
        "oracle_value": res.oracle_value,
        "parseval_rel": res.parseval_rel,
        "stable_k": res.stable_k,
    }
    if res.line:
        out["line_checks"] = [
            {
                "k": d.k,
                "a_lower_margin": d.a_lower_margin,
                "b1_cap": d.b1_cap,
                "b2_cap": d.b2_cap,
                "half_margin": d.half_margin,
                "triangle_residual": d.triangle_residual,
                "denominator_direct": d.denominator_direct,
            }
            for d in res.line
        ]
    if meta:
        out["meta"] = meta
    return out


def grid_meta(grid: GridSpec) -> dict:
    return {
        "t_min": grid.t_min,
        "t_max": grid.t_max,
        "points_per_decade": grid.points_per_decade,
        "cone": grid.cone,
        "seed": grid.seed,
        "levels": grid.levels,
    }
