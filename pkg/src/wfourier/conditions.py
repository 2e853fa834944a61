"""Sufficient weight conditions for weighted Fourier inequalities.

Every check below evaluates one scalar functional of a weight pair (u, w) on
the half line, u the non-increasing rearrangement of the value-side weight
and w the cost-side weight whose reciprocal rearranges to 1/w.  A check
returns a :class:`CondValue`: the size of the functional, whether finiteness
could be certified, and how the refinement protocol behaved.  ``decide``
combines the individual checks into a :class:`Verdict` for the Fourier
inequality itself, following the implication routes valid in each index
range; it never claims a failure, only GUARANTEED or UNKNOWN.

Conventions for extended arithmetic, used throughout: a product with a zero
factor is zero even when another factor is infinite, and a ratio is zero
whenever its denominator is infinite.  Points where both sides of a
pointwise inequality are infinite impose no constraint and contribute zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import dp_best_chain
from .asym import (
    AT_INF,
    AT_ZERO,
    Asym,
    ZERO,
    add as a_add,
    limit as a_limit,
    mul as a_mul,
    power as a_pow,
)
from .errors import DivergentIntegral, InfiniteLevel
from .quadrature import geometric_grid, improper_integral, sup_on_halfline
from .weights import (
    Indices,
    SequenceWeight,
    Weight,
    bp_constant,
    check_monotone_transform,
    level_function,
)

INF = math.inf

GUARANTEED = "GUARANTEED"
UNKNOWN = "UNKNOWN"
INAPPLICABLE = "INAPPLICABLE"

__all__ = [
    "CondValue",
    "Verdict",
    "GUARANTEED",
    "UNKNOWN",
    "INAPPLICABLE",
    "main_sup_condition",
    "level_sup_condition",
    "main_integral_condition",
    "main_integral_condition_alt",
    "halfpower_tail_ratio",
    "halfpower_tail_ratio_dual",
    "averaging_class_condition",
    "averaging_class_condition_dual",
    "monotone_tilt_condition",
    "monotone_tilt_condition_dual",
    "halfpower_integral_condition",
    "partition_sum_condition",
    "tail_average_condition",
    "two_point_sup_condition",
    "series_condition",
    "comparison_functionals",
    "decide",
]


@dataclass(frozen=True)
class CondValue:
    """Outcome of one weight-condition check.

    ``value`` is the size of the defining functional (+inf when it
    diverges); boolean conditions report 1.0/0.0.  ``holds`` means the
    condition is certified satisfied: a finite value the refinement
    protocol converged on.  ``converged`` is also True for analytically
    certified outcomes, including divergence certificates.
    """

    cond_id: str
    value: float
    holds: bool
    converged: bool
    refinement_delta: float
    diagnostic: str
    series: tuple = ()

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


@dataclass(frozen=True)
class Verdict:
    p: float
    q: float
    guarantee: str
    route: str | None
    conditions: tuple = ()
    note: str = ""

    @property
    def satisfied(self) -> tuple:
        return tuple(c for c in self.conditions if c.holds)


# ---------------------------------------------------------------------------
# extended arithmetic and asymptote helpers


def _flip(a: Asym) -> Asym:
    """Asymptote of x -> f(1/x) at the opposite end."""
    return Asym(a.coef, -a.exp, a.logp)


def _amul(*parts: Asym) -> Asym:
    out = parts[0]
    for b in parts[1:]:
        out = a_mul(out, b)
    return out


def _pow_arr(a, e: float):
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        return np.power(a, e)


def _ext_prod(*arrs):
    arrs = [np.asarray(a, dtype=float) for a in arrs]
    zero = np.zeros(np.broadcast(*arrs).shape, dtype=bool)
    for a in arrs:
        zero |= a == 0.0
    with np.errstate(invalid="ignore", over="ignore"):
        out = arrs[0].copy() if len(arrs) > 1 else arrs[0] + 0.0
        for a in arrs[1:]:
            out = out * a
    out = np.where(zero, 0.0, out)
    return out


def _ratio_arr(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    out = np.where((num == 0.0) | np.isinf(den), 0.0, out)
    out = np.where((den == 0.0) & (num > 0.0), INF, out)
    return out


def _tm_divergent(f: Weight, s: float) -> bool:
    try:
        f.tail_moment(1.0, s)
    except DivergentIntegral:
        return True
    return False


def _vanishes(f: Weight) -> bool:
    return f.inf_beyond is None and float(np.max(f.values)) == 0.0


def _support_start(f: Weight) -> float:
    """Smallest x with positive mass on (0, x)."""
    if f.values[0] > 0.0:
        return 0.0
    pos = np.nonzero(f.values > 0.0)[0]
    start = float(f.grid[pos[0]]) if pos.size else INF
    if f.inf_beyond is not None:
        start = min(start, float(f.inf_beyond))
    return start


def _bps(direct=(), flipped=()):
    pts = set()
    for f in direct:
        pts.update(float(g) for g in f.grid)
        for c in (f.inf_beyond, f.zero_beyond):
            if c is not None:
                pts.add(float(c))
    for f in flipped:
        pts.update(1.0 / float(g) for g in f.grid)
        for c in (f.inf_beyond, f.zero_beyond):
            if c is not None:
                pts.add(1.0 / float(c))
    return tuple(x for x in sorted(pts) if 0.0 < x < INF)


def _sigma(w: Weight, idx: Indices) -> Weight:
    return w.power_transform(1.0 - idx.p_prime)


def _certified(cond_id: str, value: float, holds: bool, diagnostic: str) -> CondValue:
    return CondValue(cond_id, value, holds, True, 0.0, diagnostic)


def _from_sup(cond_id: str, eng) -> CondValue:
    holds = math.isfinite(eng.value) and eng.converged
    return CondValue(
        cond_id,
        eng.value,
        holds,
        eng.converged,
        eng.refinement_delta,
        eng.diagnostic,
        tuple(eng.series),
    )


def _from_integral(cond_id: str, eng, invpow: float) -> CondValue:
    """Engine result for the raw integral, reported on the value scale."""
    series = tuple(s**invpow if s >= 0.0 else math.nan for s in eng.series)
    value = eng.value**invpow if math.isfinite(eng.value) else eng.value
    if len(series) >= 2 and math.isfinite(series[-1]) and series[-1] > 0.0:
        delta = abs(series[-1] - series[-2]) / series[-1]
    else:
        delta = eng.refinement_delta
    holds = math.isfinite(value) and eng.converged
    return CondValue(cond_id, value, holds, eng.converged, delta, eng.diagnostic, series)


# ---------------------------------------------------------------------------
# supremum conditions on the cumulative pair


def main_sup_condition(
    u: Weight, w: Weight, idx: Indices, *, span=(1e-8, 1e8), ppd: int = 64, rtol: float = 1e-3
) -> CondValue:
    """sup over x of (integral of u over (0,1/x))^(1/q) (integral of
    w^(1-p') over (0,x))^(1/p')."""
    return _cumulative_sup("BH0", u, w, idx, span=span, ppd=ppd, rtol=rtol)


def level_sup_condition(
    u: Weight, w: Weight, idx: Indices, *, span=(1e-8, 1e8), ppd: int = 64, rtol: float = 1e-3
) -> CondValue:
    """Same supremum with the level function of u in place of u."""
    try:
        uo = level_function(u)
    except InfiniteLevel as e:
        return _certified("LEVEL", INF, False, f"level function is infinite: {e}")
    inner = _cumulative_sup("LEVEL", uo, w, idx, span=span, ppd=ppd, rtol=rtol)
    return inner


def _cumulative_sup(cond_id, u, w, idx, *, span, ppd, rtol):
    sigma = _sigma(w, idx)
    iq, ipp = 1.0 / idx.q, 1.0 / idx.p_prime
    if _vanishes(u) or _vanishes(sigma):
        return _certified(cond_id, 0.0, True, "one side vanishes identically")
    if u.has_divergent_head:
        return _certified(cond_id, INF, False, "u is not locally integrable near 0")
    if sigma.has_divergent_head:
        return _certified(cond_id, INF, False, "w^(1-p') is not locally integrable near 0")
    if u.inf_beyond is not None and _support_start(sigma) < 1.0 / u.inf_beyond:
        return _certified(cond_id, INF, False, "u infinite on a tail that meets the support of w^(1-p')")
    if sigma.inf_beyond is not None and _support_start(u) < 1.0 / sigma.inf_beyond:
        return _certified(cond_id, INF, False, "w^(1-p') infinite on a tail that meets the support of u")

    def phi(x):
        cu = u.cumulative(1.0 / x)
        cs = sigma.cumulative(x)
        return _ext_prod(_pow_arr(cu, iq), _pow_arr(cs, ipp))

    a0 = _amul(a_pow(_flip(u.asym_cumulative(AT_INF)), iq), a_pow(sigma.asym_cumulative(AT_ZERO), ipp))
    ai = _amul(a_pow(_flip(u.asym_cumulative(AT_ZERO)), iq), a_pow(sigma.asym_cumulative(AT_INF), ipp))
    eng = sup_on_halfline(
        phi, a0, ai, breakpoints=_bps(direct=(sigma,), flipped=(u,)), span=span, ppd=ppd, rtol=rtol
    )
    return _from_sup(cond_id, eng)


# ---------------------------------------------------------------------------
# integral conditions on the cumulative pair


def main_integral_condition(
    u: Weight,
    w: Weight,
    idx: Indices,
    *,
    m_schedule=(1e4, 1e6, 1e8),
    ppd: int = 64,
    rtol: float = 1e-3,
) -> CondValue:
    """(integral of Cu(x)^(r/p) Cs(1/x)^(r/p') u(x) dx)^(1/r) with
    Cu, Cs the cumulatives of u and of w^(1-p'); needs q < p."""
    r = idx.r
    sigma = _sigma(w, idx)
    rp, rpp = r / idx.p, r / idx.p_prime
    if _vanishes(u):
        return _certified("MH", 0.0, True, "u vanishes identically")
    if u.has_divergent_head:
        return _certified("MH", INF, False, "u is not locally integrable near 0")
    if sigma.has_divergent_head and not _vanishes(sigma):
        return _certified("MH", INF, False, "w^(1-p') is not locally integrable near 0")
    if u.inf_beyond is not None and _support_start(sigma) < 1.0 / u.inf_beyond:
        return _certified("MH", INF, False, "u infinite on a tail that meets the support of w^(1-p')")
    if sigma.inf_beyond is not None and _support_start(u) < 1.0 / sigma.inf_beyond:
        return _certified("MH", INF, False, "w^(1-p') infinite on a tail that meets the support of u")

    def phi(x):
        cu = u.cumulative(x)
        cs = sigma.cumulative(1.0 / x)
        return _ext_prod(_pow_arr(cu, rp), _pow_arr(cs, rpp), u(x))

    a0 = _amul(
        a_pow(u.asym_cumulative(AT_ZERO), rp),
        a_pow(_flip(sigma.asym_cumulative(AT_INF)), rpp),
        u.asym_value(AT_ZERO),
    )
    ai = _amul(
        a_pow(u.asym_cumulative(AT_INF), rp),
        a_pow(_flip(sigma.asym_cumulative(AT_ZERO)), rpp),
        u.asym_value(AT_INF),
    )
    eng = improper_integral(
        phi,
        a0,
        ai,
        breakpoints=_bps(direct=(u,), flipped=(sigma,)),
        m_schedule=m_schedule,
        ppd=ppd,
        rtol=rtol,
    )
    return _from_integral("MH", eng, 1.0 / r)


def main_integral_condition_alt(
    u: Weight,
    w: Weight,
    idx: Indices,
    *,
    m_schedule=(1e4, 1e6, 1e8),
    ppd: int = 64,
    rtol: float = 1e-3,
) -> CondValue:
    """Mirror form of the main integral condition, integrating against
    w^(1-p'); needs 1 < q < p."""
    if idx.q <= 1.0:
        raise ValueError("the mirror integral condition needs q > 1")
    r = idx.r
    sigma = _sigma(w, idx)
    rq, rqp = r / idx.q, r / idx.q_prime
    if _vanishes(sigma):
        return _certified("ALT", 0.0, True, "w^(1-p') vanishes identically")
    if sigma.has_divergent_head:
        return _certified("ALT", INF, False, "w^(1-p') is not locally integrable near 0")
    if u.has_divergent_head and not _vanishes(u):
        return _certified("ALT", INF, False, "u is not locally integrable near 0")
    if sigma.inf_beyond is not None and _support_start(u) < 1.0 / sigma.inf_beyond:
        return _certified("ALT", INF, False, "w^(1-p') infinite on a tail that meets the support of u")
    if u.inf_beyond is not None and _support_start(sigma) < 1.0 / u.inf_beyond:
        return _certified("ALT", INF, False, "u infinite on a tail that meets the support of w^(1-p')")

    def phi(x):
        cu = u.cumulative(1.0 / x)
        cs = sigma.cumulative(x)
        return _ext_prod(_pow_arr(cu, rq), _pow_arr(cs, rqp), sigma(x))

    a0 = _amul(
        a_pow(_flip(u.asym_cumulative(AT_INF)), rq),
        a_pow(sigma.asym_cumulative(AT_ZERO), rqp),
        sigma.asym_value(AT_ZERO),
    )
    ai = _amul(
        a_pow(_flip(u.asym_cumulative(AT_ZERO)), rq),
        a_pow(sigma.asym_cumulative(AT_INF), rqp),
        sigma.asym_value(AT_INF),
    )
    eng = improper_integral(
        phi,
        a0,
        ai,
        breakpoints=_bps(direct=(sigma,), flipped=(u,)),
        m_schedule=m_schedule,
        ppd=ppd,
        rtol=rtol,
    )
    return _from_integral("ALT", eng, 1.0 / r)


# ---------------------------------------------------------------------------
# half-power comparison conditions on a single weight


def _tail_ratio(cond_id, f, e, *, span, ppd, rtol):
    """sup over y of y^(e/2) TM(y, e/2) / (C(y) + y^m TM(y, m)), m = max(1, e),
    with C the cumulative and TM(y, s) the tail moment of f against t^(-s)."""
    half = 0.5 * e
    m = max(1.0, e)
    if _vanishes(f):
        return _certified(cond_id, 0.0, True, "weight vanishes identically")
    if f.has_divergent_head:
        return _certified(cond_id, 0.0, True, "right side infinite for every y (vacuous)")
    if f.inf_beyond is not None:
        return _certified(cond_id, 0.0, True, "both sides infinite for every y (vacuous)")
    num_div = _tm_divergent(f, half)
    den_div = _tm_divergent(f, m)
    if num_div and den_div:
        return _certified(cond_id, 0.0, True, "both sides infinite for every y (vacuous)")
    if num_div:
        return _certified(cond_id, INF, False, "left side infinite, right side finite")

    def phi(y):
        num = _ext_prod(_pow_arr(y, half), f.tail_moment(y, half))
        den = f.cumulative(y) + _ext_prod(_pow_arr(y, m), f.tail_moment(y, m))
        return _ratio_arr(num, den)

    def ratio_asym(end):
        num = _amul(Asym(1.0, half), f.asym_tail_moment(end, half))
        den = a_add(
            f.asym_cumulative(end),
            _amul(Asym(1.0, m), f.asym_tail_moment(end, m)),
            end,
        )
        return _amul(num, a_pow(den, -1.0))

    eng = sup_on_halfline(
        phi,
        ratio_asym(AT_ZERO),
        ratio_asym(AT_INF),
        breakpoints=_bps(direct=(f,)),
        span=span,
        ppd=ppd,
        rtol=rtol,
    )
    return _from_sup(cond_id, eng)


def halfpower_tail_ratio(
    u: Weight, idx: Indices, *, span=(1e-8, 1e8), ppd: int = 64, rtol: float = 1e-3
) -> CondValue:
    """Half-power tail of u controlled by its cumulative plus full-power tail."""
    return _tail_ratio("T1c", u, idx.q, span=span, ppd=ppd, rtol=rtol)


def halfpower_tail_ratio_dual(
    w: Weight, idx: Indices, *, span=(1e-8, 1e8), ppd: int = 64, rtol: float = 1e-3
) -> CondValue:
    """Same control for w^(1-p'); meaningful only when q > 1."""
    if idx.q <= 1.0:
        return _certified("T1f", 0.0, False, "requires q > 1")
    return _tail_ratio("T1f", _sigma(w, idx), idx.p_prime, span=span, ppd=ppd, rtol=rtol)


def _bp_cond(cond_id, f, e, *, span, ppd, rtol):
    if f.inf_beyond is not None:
        return _certified(cond_id, INF, False, "weight infinite on a tail")
    b1 = bp_constant(f, e, span=span, ppd=ppd)
    b2 = bp_constant(f, e, span=span, ppd=2 * ppd)
    if math.isinf(b1) and math.isinf(b2):
        return _certified(cond_id, INF, False, "averaging constant infinite")
    if math.isinf(b1) != math.isinf(b2):
        return CondValue(cond_id, max(b1, b2), False, False, INF, "refinement disagrees on finiteness", (b1, b2))
    delta = abs(b2 - b1) / b2 if b2 > 0.0 else 0.0
    converged = delta <= rtol
    return CondValue(
        cond_id,
        b2,
        math.isfinite(b2) and converged,
        converged,
        delta,
        "averaging-class constant (sup of mean over tail value)",
        (b1, b2),
    )


def averaging_class_condition(
    u: Weight, idx: Indices, *, span: float = 1e5, ppd: int = 24, rtol: float = 1e-2
) -> CondValue:
    """u lies in the averaging class of order q/2."""
    return _bp_cond("T1d", u, 0.5 * idx.q, span=span, ppd=ppd, rtol=rtol)


def averaging_class_condition_dual(
    w: Weight, idx: Indices, *, span: float = 1e5, ppd: int = 24, rtol: float = 1e-2
) -> CondValue:
    """w^(1-p') lies in the averaging class of order p'/2; needs q > 1."""
    if idx.q <= 1.0:
        return _certified("T1g", 0.0, False, "requires q > 1")
    return _bp_cond("T1g", _sigma(w, idx), 0.5 * idx.p_prime, span=span, ppd=ppd, rtol=rtol)


def monotone_tilt_condition(u: Weight, idx: Indices) -> CondValue:
    """t^(2-q) u(t) non-increasing; needs q > 1."""
    if idx.q <= 1.0:
        return _certified("T1e", 0.0, False, "requires q > 1")
    ok = check_monotone_transform(u, 2.0 - idx.q)
    msg = "tilted weight is non-increasing" if ok else "tilted weight increases somewhere"
    return _certified("T1e", 1.0 if ok else 0.0, ok, msg)


def monotone_tilt_condition_dual(w: Weight, idx: Indices) -> CondValue:
    """t^(2-p') w(t)^(1-p') non-increasing; needs q > 1."""
    if idx.q <= 1.0:
        return _certified("T1h", 0.0, False, "requires q > 1")
    ok = check_monotone_transform(_sigma(w, idx), 2.0 - idx.p_prime)
    msg = "tilted weight is non-increasing" if ok else "tilted weight increases somewhere"
    return _certified("T1h", 1.0 if ok else 0.0, ok, msg)


# ---------------------------------------------------------------------------
# half-power integral condition on the pair


def halfpower_integral_condition(
    u: Weight,
    w: Weight,
    idx: Indices,
    *,
    m_schedule=(1e4, 1e6, 1e8),
    ppd: int = 64,
    rtol: float = 1e-3,
) -> CondValue:
    """(integral of TMu(x)^(r/p) TMs(1/x)^(r/p') x^(-q/2) u(x) dx)^(1/r),
    with TMu, TMs the half-power tail moments of u and w^(1-p')."""
    r = idx.r
    sigma = _sigma(w, idx)
    hq, hpp = 0.5 * idx.q, 0.5 * idx.p_prime
    rp, rpp = r / idx.p, r / idx.p_prime
    if _vanishes(u):
        return _certified("BHJH", 0.0, True, "u vanishes identically")
    if _tm_divergent(u, hq):
        return _certified("BHJH", INF, False, "half-power tail moment of u diverges")
    if _tm_divergent(sigma, hpp) and not _vanishes(sigma):
        return _certified("BHJH", INF, False, "half-power tail moment of w^(1-p') diverges")

    def phi(x):
        tu = u.tail_moment(x, hq)
        ts = sigma.tail_moment(1.0 / x, hpp)
        return _ext_prod(_pow_arr(tu, rp), _pow_arr(ts, rpp), _pow_arr(x, -hq), u(x))

    a0 = _amul(
        a_pow(u.asym_tail_moment(AT_ZERO, hq), rp),
        a_pow(_flip(sigma.asym_tail_moment(AT_INF, hpp)), rpp),
        Asym(1.0, -hq),
        u.asym_value(AT_ZERO),
    )
    ai = _amul(
        a_pow(u.asym_tail_moment(AT_INF, hq), rp),
        a_pow(_flip(sigma.asym_tail_moment(AT_ZERO, hpp)), rpp),
        Asym(1.0, -hq),
        u.asym_value(AT_INF),
    )
    eng = improper_integral(
        phi,
        a0,
        ai,
        breakpoints=_bps(direct=(u,), flipped=(sigma,)),
        m_schedule=m_schedule,
        ppd=ppd,
        rtol=rtol,
    )
    return _from_integral("BHJH", eng, 1.0 / r)


# ---------------------------------------------------------------------------
# partition sum condition (supremum over increasing block sequences)


def partition_sum_condition(
    u: Weight,
    w: Weight,
    idx: Indices,
    *,
    m_schedule=(1e2, 1e3, 1e4),
    ppd: int = 8,
    inner_nodes: int = 240,
    rtol: float = 5e-2,
    growth_threshold: float = 0.10,
) -> CondValue:
    """sup over increasing sequences {x_k} of the block sum

        sum_k (integral over (1/x_{k+1}, 1/x_k) of
               (x_{k+1} t - 1)^(q/2) u(t) t^(-q) dt)^(r/q)
              (integral of w over (0, x_{k+1}))^(-r/p),

    raised to 1/r.  Numerically a dynamic-programming lower bound over a
    geometric grid of block endpoints, refined by widening the grid; the
    analytic single-block certificates below detect divergence exactly.
    """
    q, p, r = idx.q, idx.p, idx.r
    hq = 0.5 * q
    if _vanishes(u):
        return _certified("SEQ", 0.0, True, "u vanishes identically")
    if w.has_divergent_head:
        return _certified("SEQ", 0.0, True, "cumulative of w infinite for every block (vacuous)")
    if u.inf_beyond is not None:
        return _certified("SEQ", INF, False, "u infinite on a tail, one block already diverges")
    s0w = _support_start(w)
    if s0w > 0.0:
        u_mass_beyond = u.zero_beyond is None and u.values[-1] > 0.0
        u_mass_beyond = u_mass_beyond or bool(np.any((u.grid >= 1.0 / s0w) & (u.values > 0.0)))
        if u_mass_beyond:
            return _certified(
                "SEQ", INF, False, "w vanishes below %.4g while u has mass beyond %.4g" % (s0w, 1.0 / s0w)
            )
    # block with fixed x_{k+1} and x_k -> 0: the inner integral reaches the
    # tail of u and diverges when its decay is no faster than t^(q/2-1)
    if u.zero_beyond is None and u.values[-1] > 0.0 and u.tail_exp >= hq - 1.0:
        return _certified(
            "SEQ",
            INF,
            False,
            "single block with x_k -> 0 diverges: u tail exponent %.4g >= q/2 - 1" % u.tail_exp,
        )
    # block with x_{k+1} = b -> infinity: inner integral grows like b^(q/2)
    # (faster when u is unbounded at 0) against Cw(b)^(-r/p)
    if w.inf_beyond is None:
        gamma = w.asym_cumulative(AT_INF).exp
        if u.values[0] > 0.0 and u.head_exp <= hq - 1.0:
            ginner = q - 1.0 - u.head_exp
        else:
            ginner = hq
        e_far = (r / q) * ginner - (r / p) * gamma
        if e_far > 1e-12:
            return _certified(
                "SEQ",
                INF,
                False,
                "single block with x_{k+1} -> infinity grows like b^%.4g" % e_far,
            )

    bps = _bps(direct=(w,), flipped=(u,))
    vals = []
    diag = "dynamic-programming lower bound over grid block endpoints"
    for m_dom in m_schedule:
        hi = m_dom
        if w.inf_beyond is not None:
            hi = min(hi, float(w.inf_beyond))
        lo = 1.0 / m_dom
        if not lo < hi:
            lo = hi / 10.0
        grid = geometric_grid(lo, hi, ppd, include=bps)
        n = grid.size
        cw = w.cumulative(grid)
        fac = _pow_arr(cw, -r / p)
        term = np.zeros((n, n))
        for j in range(1, n):
            b = grid[j]
            if fac[j] == 0.0:
                continue
            smax = b / grid[0]
            d = np.geomspace(1e-9, smax - 1.0, inner_nodes)
            s = 1.0 + d
            g = _pow_arr(d, hq) * u(s / b) * _pow_arr(s, -q)
            seg = 0.5 * (g[1:] + g[:-1]) * np.diff(s)
            cum = np.concatenate([[0.0], np.cumsum(seg)])
            a_inner = np.interp(b / grid[:j], s, cum) * b ** (q - 1.0)
            term[:j, j] = _ext_prod(_pow_arr(a_inner, r / q), np.full(j, fac[j]))
        best = float(dp_best_chain(term))
        if math.isinf(best):
            return _certified("SEQ", INF, False, "a grid block evaluates to infinity")
        vals.append(max(best, 0.0) ** (1.0 / r))
    if vals[-1] == 0.0:
        return CondValue("SEQ", 0.0, True, True, 0.0, diag, tuple(vals))
    delta = abs(vals[-1] - vals[-2]) / vals[-1] if len(vals) >= 2 else INF
    growth = vals[-1] / vals[-2] - 1.0 if len(vals) >= 2 and vals[-2] > 0.0 else INF
    if growth > growth_threshold:
        return CondValue(
            "SEQ",
            vals[-1],
            False,
            False,
            delta,
            "still growing under domain expansion, no analytic certificate",
            tuple(vals),
        )
    converged = delta <= rtol
    return CondValue("SEQ", vals[-1], converged, converged, delta, diag, tuple(vals))


# ---------------------------------------------------------------------------
# tail average condition (needs p > 2)


def tail_average_condition(
    u: Weight,
    w: Weight,
    idx: Indices,
    *,
    m_schedule=(1e3, 1e5),
    ppd: int = 24,
    inner_ppd: int = 12,
    rtol: float = 1e-2,
) -> CondValue:
    """(integral of L(x)^((r/2)(p-2)/p) TMu(x)^(r/p) x^(-q/2) u(x) dx)^(1/r)
    where L(x) integrates ((t - 1/x)^(-1) Cw(t))^(-p/(p-2)) w(t) over
    t > 1/x; needs p > 2 and q < p."""
    q, p, r = idx.q, idx.p, idx.r
    if p <= 2.0:
        raise ValueError("the tail average condition needs p > 2")
    hq = 0.5 * q
    pexp = p / (p - 2.0)
    rho = 0.5 * r * (p - 2.0) / p
    if _vanishes(u):
        return _certified("NH", 0.0, True, "u vanishes identically")
    if w.has_divergent_head:
        return _certified("NH", 0.0, True, "cumulative of w infinite, the averages blow up, integrand vanishes")
    if u.inf_beyond is not None:
        return _certified("NH", INF, False, "u infinite on a tail")
    if _tm_divergent(u, hq):
        return _certified("NH", INF, False, "half-power tail moment of u diverges")
    inner_tail_exp = None
    if w.inf_beyond is None and w.zero_beyond is None and w.values[-1] > 0.0:
        a_t = w.tail_exp
        if a_t >= -1.0:
            inner_tail_exp = -2.0 * a_t / (p - 2.0)
        else:
            inner_tail_exp = pexp + a_t
        if inner_tail_exp >= -1.0:
            return _certified(
                "NH",
                INF,
                False,
                "inner average integral diverges at infinity (w tail exponent %.4g)" % a_t,
            )

    t_cap = None
    if w.zero_beyond is not None:
        t_cap = float(w.zero_beyond)
    elif w.inf_beyond is not None:
        t_cap = float(w.inf_beyond)

    def lam(xarr):
        out = np.empty(xarr.shape)
        for i, x in enumerate(np.atleast_1d(xarr)):
            z = 1.0 / x
            thi = t_cap if t_cap is not None else z * 1e9
            if thi <= z:
                out[i] = 0.0
                continue
            span_d = (thi - z) / (z * 1e-9)
            n = max(8, int(inner_ppd * math.log10(span_d)) + 1)
            d = np.geomspace(z * 1e-9, thi - z, n)
            t = z + d
            cwv = w.cumulative(t)
            g = _ext_prod(_pow_arr(cwv / d, -pexp), w(t))
            val = float(np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(t)))
            if t_cap is None and inner_tail_exp is not None and g[-1] > 0.0:
                val += g[-1] * t[-1] / (-inner_tail_exp - 1.0)
            out[i] = val
        return out

    def phi(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return _ext_prod(
            _pow_arr(lam(x), rho), _pow_arr(u.tail_moment(x, hq), r / p), _pow_arr(x, -hq), u(x)
        )

    # L vanishes identically near 0 under a cutoff, otherwise decays with the
    # exponent of the convergent inner tail
    if t_cap is not None:
        lam0 = ZERO
    else:
        lam0 = Asym(1.0, -(inner_tail_exp + 1.0))
    a0w_growth = w.asym_cumulative(AT_ZERO).exp - 1.0
    lam_inf = Asym(1.0, max(2.0 * a0w_growth / (p - 2.0) - 1.0, 0.0))
    a0 = _amul(
        a_pow(lam0, rho),
        a_pow(u.asym_tail_moment(AT_ZERO, hq), r / p),
        Asym(1.0, -hq),
        u.asym_value(AT_ZERO),
    )
    ai = _amul(
        a_pow(lam_inf, rho),
        a_pow(u.asym_tail_moment(AT_INF, hq), r / p),
        Asym(1.0, -hq),
        u.asym_value(AT_INF),
    )
    eng = improper_integral(
        phi,
        a0,
        ai,
        breakpoints=_bps(direct=(u,), flipped=(w,)),
        m_schedule=m_schedule,
        ppd=ppd,
        rtol=rtol,
    )
    return _from_integral("NH", eng, 1.0 / r)


# ---------------------------------------------------------------------------
# two-point supremum condition (valid for 0 < p <= q, p may be <= 1)


def two_point_sup_condition(
    u: Weight,
    w: Weight,
    p: float,
    q: float,
    *,
    span=(1e-8, 1e8),
    ppd: int = 64,
    rtol: float = 1e-3,
) -> CondValue:
    """sup over x < y of ((x/y) Cu(y))^(1/q) D(x)^(-1/p) with
    D(x) = x^p Cw(1/x) + TMw(1/x, p).  Takes raw indices because p <= 1
    is allowed here."""
    if not (0.0 < p < INF and 0.0 < q < INF):
        raise ValueError("need finite positive indices")
    if _vanishes(u):
        return _certified("S1LEVEL", 0.0, True, "u vanishes identically")
    if _tm_divergent(w, p):
        return _certified("S1LEVEL", 0.0, True, "right-hand factor infinite for every x (vacuous)")
    if u.has_divergent_head:
        return _certified("S1LEVEL", INF, False, "u is not locally integrable near 0")
    if u.inf_beyond is not None or (u.zero_beyond is None and u.values[-1] > 0.0 and u.tail_exp > 0.0):
        return _certified("S1LEVEL", INF, False, "Cu(y)/y is unbounded")
    ratio_inf_asym = _amul(u.asym_cumulative(AT_INF), Asym(1.0, -1.0))
    lim_ratio = a_limit(ratio_inf_asym, AT_INF)

    def phi(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ratio_u = u.cumulative(x) / x
        run = np.maximum.accumulate(ratio_u[::-1])[::-1]
        run = np.maximum(run, lim_ratio)
        dval = _pow_arr(x, p) * w.cumulative(1.0 / x) + w.tail_moment(1.0 / x, p)
        return _ext_prod(_pow_arr(x * run, 1.0 / q), _pow_arr(dval, -1.0 / p))

    # R(x) = sup_{y >= x} Cu(y)/y: decays like Cu(x)/x when the cumulative
    # ratio blows up at the origin, otherwise tends to the global supremum
    if u.values[0] > 0.0 and u.head_exp < 0.0:
        r_asym0 = _amul(u.asym_cumulative(AT_ZERO), Asym(1.0, -1.0))
    else:
        probe = geometric_grid(1e-10, 1e10, 8, include=_bps(direct=(u,)))
        r_global = max(float(np.max(u.cumulative(probe) / probe)), lim_ratio)
        r_asym0 = Asym(r_global, 0.0)

    def d_asym(end: int) -> Asym:
        other = AT_INF if end == AT_ZERO else AT_ZERO
        return a_add(
            _amul(Asym(1.0, p), _flip(w.asym_cumulative(other))),
            _flip(w.asym_tail_moment(other, p)),
            end,
        )

    a0 = _amul(a_pow(_amul(Asym(1.0, 1.0), r_asym0), 1.0 / q), a_pow(d_asym(AT_ZERO), -1.0 / p))
    ai = _amul(a_pow(_amul(Asym(1.0, 1.0), ratio_inf_asym), 1.0 / q), a_pow(d_asym(AT_INF), -1.0 / p))
    eng = sup_on_halfline(
        phi, a0, ai, breakpoints=_bps(direct=(u,), flipped=(w,)), span=span, ppd=ppd, rtol=rtol
    )
    return _from_sup("S1LEVEL", eng)


# ---------------------------------------------------------------------------
# series condition for integer sequences against a torus-side weight


def series_condition(
    useq: SequenceWeight,
    w: Weight,
    idx: Indices,
    *,
    k_start: int = 4096,
    k_max: int = 1 << 22,
    rtol: float = 1e-3,
) -> CondValue:
    """(u(0)^(r/q) Cs(1)^(r/p') + sum over k >= 1 of
    (sum_{j<k} u(j))^(r/p) Cs(1/k)^(r/p') u(k))^(1/r) with Cs the
    cumulative of w^(1-p'); needs q < p."""
    r = idx.r
    sigma = _sigma(w, idx)
    rq, rp, rpp = r / idx.q, r / idx.p, r / idx.p_prime
    if sigma.has_divergent_head:
        return _certified("FS", INF, False, "w^(1-p') is not locally integrable near 0")
    u0 = useq.value(0)
    # tail exponent of the k-th term, for the analytic divergence test and
    # the integral-comparison tail correction
    term_exp = None
    if useq.tail_exp is not None and useq.values[-1] > 0.0:
        bu = useq.tail_exp
        cs0 = sigma.asym_cumulative(AT_ZERO).exp
        term_exp = rp * (bu + 1.0) - rpp * cs0 + bu
        if term_exp >= -1.0:
            return _certified(
                "FS", INF, False, "terms decay like k^%.4g, the series diverges" % term_exp
            )

    def partial(k_hi: int) -> float:
        ks = np.arange(1, k_hi + 1, dtype=float)
        explicit = useq.values
        vals = np.zeros(k_hi + 1)
        ncopy = min(explicit.size, k_hi + 1)
        vals[:ncopy] = explicit[:ncopy]
        if useq.tail_exp is not None and k_hi + 1 > explicit.size:
            anchor = explicit.size - 1
            kk = np.arange(explicit.size, k_hi + 1, dtype=float)
            vals[explicit.size:] = explicit[-1] * (kk / anchor) ** useq.tail_exp
        prefix = np.concatenate([[0.0], np.cumsum(vals[:-1])])
        cs = sigma.cumulative(1.0 / ks)
        terms = _ext_prod(_pow_arr(prefix[1:], rp), _pow_arr(cs, rpp), vals[1:])
        total = u0**rq * float(sigma.cumulative(1.0)) ** rpp + float(np.sum(terms))
        if term_exp is not None and terms.size:
            total += float(terms[-1]) * k_hi / (-term_exp - 1.0)
        return total

    if useq.tail_exp is None:
        k_hi = max(useq.values.size, 2)
        total = partial(k_hi)
        value = total ** (1.0 / r)
        return CondValue("FS", value, math.isfinite(value), True, 0.0, "finite sum, evaluated exactly", (value,))

    series = []
    k_hi = k_start
    while True:
        series.append(partial(k_hi) ** (1.0 / r))
        if len(series) >= 2:
            delta = abs(series[-1] - series[-2]) / series[-1] if series[-1] > 0.0 else 0.0
            if delta <= rtol or k_hi >= k_max:
                break
        k_hi *= 2
    converged = delta <= rtol
    diag = "partial sums with integral-comparison tail correction"
    if not converged:
        diag = "tail correction still moving at the largest partial sum"
    return CondValue("FS", series[-1], converged and math.isfinite(series[-1]), converged, delta, diag, tuple(series))


# ---------------------------------------------------------------------------
# comparison functionals equivalent to the cumulative-pair conditions under
# a-priori averaging-class assumptions


def comparison_functionals(
    u: Weight,
    w: Weight,
    idx: Indices,
    *,
    span=(1e-8, 1e8),
    m_schedule=(1e4, 1e6, 1e8),
    ppd: int = 64,
    rtol: float = 1e-3,
) -> dict:
    """The four functionals built from w itself (or from u^(1-q')) rather
    than from w^(1-p').  Only the entries whose index range applies are
    returned; each is equivalent to the corresponding cumulative-pair
    condition when the a-priori averaging-class assumption holds."""
    out = {}
    p, q = idx.p, idx.q
    if p <= q and q >= 2.0:

        def phi_i(x):
            return _ext_prod(
                x, _pow_arr(u.cumulative(1.0 / x), 1.0 / q), _pow_arr(w.cumulative(x), -1.0 / p)
            )

        a0 = _amul(
            Asym(1.0, 1.0),
            a_pow(_flip(u.asym_cumulative(AT_INF)), 1.0 / q),
            a_pow(w.asym_cumulative(AT_ZERO), -1.0 / p),
        )
        ai = _amul(
            Asym(1.0, 1.0),
            a_pow(_flip(u.asym_cumulative(AT_ZERO)), 1.0 / q),
            a_pow(w.asym_cumulative(AT_INF), -1.0 / p),
        )
        eng = sup_on_halfline(
            phi_i, a0, ai, breakpoints=_bps(direct=(w,), flipped=(u,)), span=span, ppd=ppd, rtol=rtol
        )
        out["T4i"] = _from_sup("T4i", eng)
    if 2.0 <= q < p:
        r = idx.r

        def phi_ii(x):
            return _ext_prod(
                _pow_arr(u.cumulative(x), r / p),
                _pow_arr(w.cumulative(1.0 / x), -r / p),
                _pow_arr(x, -r),
                u(x),
            )

        a0 = _amul(
            a_pow(u.asym_cumulative(AT_ZERO), r / p),
            a_pow(_flip(w.asym_cumulative(AT_INF)), -r / p),
            Asym(1.0, -r),
            u.asym_value(AT_ZERO),
        )
        ai = _amul(
            a_pow(u.asym_cumulative(AT_INF), r / p),
            a_pow(_flip(w.asym_cumulative(AT_ZERO)), -r / p),
            Asym(1.0, -r),
            u.asym_value(AT_INF),
        )
        eng = improper_integral(
            phi_ii,
            a0,
            ai,
            breakpoints=_bps(direct=(u,), flipped=(w,)),
            m_schedule=m_schedule,
            ppd=ppd,
            rtol=rtol,
        )
        out["T4ii"] = _from_integral("T4ii", eng, 1.0 / r)
    if 1.0 < p <= q < 2.0:
        qp = idx.q_prime
        nu = u.power_transform(1.0 - qp)
        sigma = _sigma(w, idx)

        def phi_iii(x):
            return _ext_prod(
                _pow_arr(x, -1.0),
                _pow_arr(nu.cumulative(1.0 / x), -1.0 / qp),
                _pow_arr(sigma.cumulative(x), 1.0 / idx.p_prime),
            )

        a0 = _amul(
            Asym(1.0, -1.0),
            a_pow(_flip(nu.asym_cumulative(AT_INF)), -1.0 / qp),
            a_pow(sigma.asym_cumulative(AT_ZERO), 1.0 / idx.p_prime),
        )
        ai = _amul(
            Asym(1.0, -1.0),
            a_pow(_flip(nu.asym_cumulative(AT_ZERO)), -1.0 / qp),
            a_pow(sigma.asym_cumulative(AT_INF), 1.0 / idx.p_prime),
        )
        eng = sup_on_halfline(
            phi_iii, a0, ai, breakpoints=_bps(direct=(sigma,), flipped=(nu,)), span=span, ppd=ppd, rtol=rtol
        )
        out["T4iii"] = _from_sup("T4iii", eng)
    if 1.0 < q < p <= 2.0:
        r = idx.r
        qp = idx.q_prime
        nu = u.power_transform(1.0 - qp)
        sigma = _sigma(w, idx)

        def phi_iv(x):
            return _ext_prod(
                _pow_arr(sigma.cumulative(x), r / qp),
                _pow_arr(nu.cumulative(1.0 / x), -r / qp),
                _pow_arr(x, -r),
                sigma(x),
            )

        a0 = _amul(
            a_pow(sigma.asym_cumulative(AT_ZERO), r / qp),
            a_pow(_flip(nu.asym_cumulative(AT_INF)), -r / qp),
            Asym(1.0, -r),
            sigma.asym_value(AT_ZERO),
        )
        ai = _amul(
            a_pow(sigma.asym_cumulative(AT_INF), r / qp),
            a_pow(_flip(nu.asym_cumulative(AT_ZERO)), -r / qp),
            Asym(1.0, -r),
            sigma.asym_value(AT_INF),
        )
        eng = improper_integral(
            phi_iv,
            a0,
            ai,
            breakpoints=_bps(direct=(sigma,), flipped=(nu,)),
            m_schedule=m_schedule,
            ppd=ppd,
            rtol=rtol,
        )
        out["T4iv"] = _from_integral("T4iv", eng, 1.0 / r)
    return out


# ---------------------------------------------------------------------------
# the decision procedure


def _route_menu(u, w, idx):
    """Auxiliary checks available to close the gap when q < min(2, p) in the
    fixed evaluation order."""
    q, p = idx.q, idx.p
    if 1.0 < q < 2.0 < p:
        return [
            lambda: halfpower_tail_ratio(u, idx),
            lambda: averaging_class_condition(u, idx),
            lambda: monotone_tilt_condition(u, idx),
            lambda: halfpower_tail_ratio_dual(w, idx),
            lambda: averaging_class_condition_dual(w, idx),
            lambda: monotone_tilt_condition_dual(w, idx),
            lambda: halfpower_integral_condition(u, w, idx),
        ]
    if q < 1.0:
        return [
            lambda: halfpower_tail_ratio(u, idx),
            lambda: averaging_class_condition(u, idx),
            lambda: halfpower_integral_condition(u, w, idx),
        ]
    return []


def decide(u: Weight, w: Weight, p: float, q: float) -> Verdict:
    """Guarantee for the weighted Fourier inequality with exponents (p, q).

    Returns GUARANTEED with the satisfied route, UNKNOWN when no known
    sufficient route could be certified, or INAPPLICABLE when the index
    pair is outside every covered range (p must exceed 1, q must be
    positive, both finite).
    """
    ok = (
        isinstance(p, (int, float))
        and isinstance(q, (int, float))
        and math.isfinite(p)
        and math.isfinite(q)
        and p > 1.0
        and q > 0.0
    )
    if not ok:
        return Verdict(p, q, INAPPLICABLE, None, (), "need finite indices with p > 1 and q > 0")
    p, q = float(p), float(q)
    idx = Indices(p, q)
    evaluated = []

    if p <= q:
        bh0 = main_sup_condition(u, w, idx)
        evaluated.append(bh0)
        if bh0.holds:
            return Verdict(p, q, GUARANTEED, "BH0", tuple(evaluated))
        if q >= 2.0:
            lvl = level_sup_condition(u, w, idx)
            evaluated.append(lvl)
            if lvl.holds:
                return Verdict(p, q, GUARANTEED, "LEVEL", tuple(evaluated))
        return Verdict(p, q, UNKNOWN, None, tuple(evaluated), "supremum condition not certified")

    mh = main_integral_condition(u, w, idx)
    evaluated.append(mh)
    if not mh.holds:
        return Verdict(p, q, UNKNOWN, None, tuple(evaluated), "main integral condition not certified")
    if q >= 2.0 or (q > 1.0 and p <= 2.0):
        return Verdict(p, q, GUARANTEED, "MH", tuple(evaluated))

    for make in _route_menu(u, w, idx):
        cond = make()
        evaluated.append(cond)
        if cond.holds:
            return Verdict(p, q, GUARANTEED, "MH+" + cond.cond_id, tuple(evaluated))

    if 1.0 < q < 2.0 < p or (q < 1.0 and p > 2.0):
        seq = partition_sum_condition(u, w, idx)
        evaluated.append(seq)
        nh = tail_average_condition(u, w, idx)
        evaluated.append(nh)
        if seq.holds and nh.holds:
            return Verdict(p, q, GUARANTEED, "MH+SEQ+NH", tuple(evaluated))
    elif q < 1.0:
        seq = partition_sum_condition(u, w, idx)
        evaluated.append(seq)
        if seq.holds:
            return Verdict(p, q, GUARANTEED, "MH+SEQ", tuple(evaluated))

    if q == 1.0:
        note = "no closing route covers q = 1 exactly"
    else:
        note = "all auxiliary routes unsatisfied"
    return Verdict(p, q, UNKNOWN, None, tuple(evaluated), note)
