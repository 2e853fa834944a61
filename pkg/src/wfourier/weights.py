"""Piecewise-power weights on the half line and their rearrangement calculus.

A :class:`Weight` is a non-negative function on (0, inf) stored as samples on
a strictly increasing grid together with head and tail power exponents.  Two
interpolation modes are supported:

  * ``loglog`` -- log-log linear between samples, so every piece is a pure
    power ``v_i * (t / t_i) ** a_i``.  A weight that is globally a power of t
    is represented exactly.
  * ``step``   -- right-continuous piecewise constant, the natural encoding
    for weights coming from sequence spaces.

Beyond an optional cutoff the weight may be identically zero
(``zero_beyond``) or identically infinite (``inf_beyond``); the latter
encodes reciprocal rearrangements of weights supported on a finite-measure
space.  All integral operations use closed forms per piece (expm1-based, so
exponents near -1 lose no precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import asym
from .asym import Asym, AT_INF, AT_ZERO
from ._kernels import upper_hull
from .errors import DivergentIntegral, InfiniteLevel, InvalidProfile

INF = math.inf

LOGLOG = "loglog"
STEP = "step"


def _edif(z, L):
    """(exp(z*L) - 1) / z, elementwise, with the z == 0 limit L."""
    z = np.asarray(z, dtype=float)
    L = np.asarray(L, dtype=float)
    safe = np.where(z == 0.0, 1.0, z)
    return np.where(z == 0.0, L, np.expm1(z * L) / safe)


def _edif_s(z: float, L: float) -> float:
    if z == 0.0:
        return L
    return math.expm1(z * L) / z


@dataclass(frozen=True)
class Indices:
    """Lebesgue exponents (p, q) with the derived conjugates.

    Requires p > 1 and q > 0.  ``q_prime`` exists only for q > 1 and ``r``
    (defined through 1/r = 1/q - 1/p) only for q < p.
    """

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 1.0 and math.isfinite(self.p)):
            raise ValueError(f"p must be finite and > 1, got {self.p}")
        if not (self.q > 0.0 and math.isfinite(self.q)):
            raise ValueError(f"q must be finite and > 0, got {self.q}")

    @property
    def p_prime(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def q_prime(self) -> float:
        if self.q <= 1.0:
            raise ValueError(f"conjugate exponent needs q > 1, got q={self.q}")
        return self.q / (self.q - 1.0)

    @property
    def r(self) -> float:
        if not self.q < self.p:
            raise ValueError(f"r is defined only for q < p, got p={self.p}, q={self.q}")
        return 1.0 / (1.0 / self.q - 1.0 / self.p)


@dataclass(frozen=True, eq=False)
class Weight:
    grid: np.ndarray
    values: np.ndarray
    head_exp: float
    tail_exp: float
    inf_beyond: float | None = None
    zero_beyond: float | None = None
    interp: str = LOGLOG

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.grid, dtype=float)).copy()
        v = np.atleast_1d(np.asarray(self.values, dtype=float)).copy()
        if g.ndim != 1 or v.ndim != 1 or g.size != v.size or g.size == 0:
            raise ValueError("grid and values must be 1-d arrays of equal positive length")
        if not np.all(np.isfinite(g)) or not np.all(g > 0.0):
            raise ValueError("grid entries must be finite and positive")
        if np.any(np.diff(g) <= 0.0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise ValueError("values must be finite and non-negative")
        if not (math.isfinite(self.head_exp) and math.isfinite(self.tail_exp)):
            raise ValueError("head_exp and tail_exp must be finite")
        if self.interp not in (LOGLOG, STEP):
            raise ValueError(f"interp must be {LOGLOG!r} or {STEP!r}, got {self.interp!r}")
        if self.interp == LOGLOG and np.any(v == 0.0) and np.any(v > 0.0):
            raise ValueError("loglog mode needs strictly positive values (use step mode for zeros)")
        if self.inf_beyond is not None and self.zero_beyond is not None:
            raise ValueError("at most one of inf_beyond and zero_beyond may be set")
        cut = self.inf_beyond if self.inf_beyond is not None else self.zero_beyond
        if cut is not None:
            cut = float(cut)
            if not (math.isfinite(cut) and cut > g[0]):
                raise ValueError("cutoff must be finite and lie beyond the first grid point")
            if cut <= g[-1]:
                keep = g < cut
                g, v = g[keep], v[keep]
            if self.inf_beyond is not None:
                object.__setattr__(self, "inf_beyond", cut)
            else:
                object.__setattr__(self, "zero_beyond", cut)
        g.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __repr__(self):
        cut = ""
        if self.inf_beyond is not None:
            cut = f", inf_beyond={self.inf_beyond:g}"
        if self.zero_beyond is not None:
            cut = f", zero_beyond={self.zero_beyond:g}"
        return (
            f"Weight(n={self.grid.size}, span=[{self.grid[0]:g}, {self.grid[-1]:g}], "
            f"head_exp={self.head_exp:g}, tail_exp={self.tail_exp:g}{cut}, interp={self.interp})"
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_power(cls, coef: float, exponent: float) -> "Weight":
        """The pure power weight coef * t**exponent, represented exactly."""
        if not (coef >= 0.0 and math.isfinite(coef)):
            raise ValueError("coef must be finite and non-negative")
        return cls(
            grid=np.array([1.0]),
            values=np.array([float(coef)]),
            head_exp=float(exponent),
            tail_exp=float(exponent),
        )

    @classmethod
    def from_samples(cls, grid, values, head_exp=None, tail_exp=None, **kw) -> "Weight":
        """Sampled weight; missing end exponents default to the end-segment slopes."""
        g = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        interp = kw.get("interp", LOGLOG)
        if head_exp is None or tail_exp is None:
            if interp == STEP or g.size < 2:
                fit_h = fit_t = 0.0
            else:
                with np.errstate(divide="ignore"):
                    fit_h = math.log(v[1] / v[0]) / math.log(g[1] / g[0]) if v[0] > 0 and v[1] > 0 else 0.0
                    fit_t = math.log(v[-1] / v[-2]) / math.log(g[-1] / g[-2]) if v[-1] > 0 and v[-2] > 0 else 0.0
            head_exp = fit_h if head_exp is None else head_exp
            tail_exp = fit_t if tail_exp is None else tail_exp
        return cls(grid=g, values=v, head_exp=float(head_exp), tail_exp=float(tail_exp), **kw)

    @classmethod
    def from_function(cls, fn, t_min=1e-6, t_max=1e6, ppd=64, **kw) -> "Weight":
        n = max(2, int(round(ppd * math.log10(t_max / t_min))) + 1)
        g = np.geomspace(t_min, t_max, n)
        v = np.asarray(fn(g), dtype=float)
        return cls.from_samples(g, v, **kw)

    @classmethod
    def from_steps(cls, edges, step_values) -> "Weight":
        """Compactly supported step weight: step_values[i] on [edges[i], edges[i+1]),
        zero outside [edges[0], edges[-1])."""
        e = np.asarray(edges, dtype=float)
        v = np.asarray(step_values, dtype=float)
        if e.size != v.size + 1:
            raise ValueError("need len(edges) == len(step_values) + 1")
        if v[0] == 0.0:
            grid, vals = e[:-1], v
        else:
            # a synthetic leading zero keeps the region below the support clean
            grid = np.concatenate([[e[0] * 0.5], e[:-1]])
            vals = np.concatenate([[0.0], v])
        return cls(grid=grid, values=vals, head_exp=0.0,
                   tail_exp=0.0, zero_beyond=float(e[-1]), interp=STEP)

    # -- basic structure -----------------------------------------------------

    @cached_property
    def _slopes(self) -> np.ndarray:
        if self.grid.size < 2:
            return np.zeros(0)
        if self.interp == STEP:
            return np.zeros(self.grid.size - 1)
        v = self.values
        if np.all(v == 0.0):
            return np.zeros(self.grid.size - 1)
        return np.diff(np.log(v)) / np.diff(np.log(self.grid))

    @property
    def _cutoff(self) -> float:
        if self.inf_beyond is not None:
            return self.inf_beyond
        if self.zero_beyond is not None:
            return self.zero_beyond
        return INF

    @cached_property
    def _head_divergent(self) -> bool:
        return self.values[0] > 0.0 and self.head_exp <= -1.0

    @property
    def has_divergent_head(self) -> bool:
        """True when the integral over (0, x) is infinite for every x > 0."""
        return self._head_divergent

    @cached_property
    def _seg_masses(self) -> np.ndarray:
        g, v = self.grid, self.values
        if g.size < 2:
            return np.zeros(0)
        L = np.diff(np.log(g))
        return v[:-1] * g[:-1] * _edif(self._slopes + 1.0, L)

    @cached_property
    def _prefix(self) -> np.ndarray:
        head = 0.0
        if self.values[0] > 0.0:
            head = INF if self._head_divergent else self.values[0] * self.grid[0] / (self.head_exp + 1.0)
        return head + np.concatenate([[0.0], np.cumsum(self._seg_masses)])

    @cached_property
    def _tail_mass(self) -> float:
        """Integral of the weight over (grid[-1], cutoff-or-infinity)."""
        vN, gN, a = self.values[-1], self.grid[-1], self.tail_exp
        if self.inf_beyond is not None:
            return INF
        if vN == 0.0:
            return 0.0
        if self.zero_beyond is not None:
            return vN * gN * _edif_s(a + 1.0, math.log(self.zero_beyond / gN))
        if a < -1.0:
            return vN * gN / (-a - 1.0)
        return INF

    @cached_property
    def total_mass(self) -> float:
        if self._head_divergent:
            return INF
        return float(self._prefix[-1] + self._tail_mass)

    @cached_property
    def is_nonincreasing(self) -> bool:
        if self.inf_beyond is not None:
            return False
        v = self.values
        if np.all(v == 0.0):
            return True
        if v[0] > 0.0 and self.head_exp > 0.0:
            return False
        if v[-1] > 0.0 and self.tail_exp > 0.0:
            return False
        if self.interp == STEP:
            return bool(np.all(np.diff(v) <= 0.0))
        return bool(np.all(self._slopes <= 0.0))

    # -- evaluation ----------------------------------------------------------

    def __call__(self, t):
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t <= 0.0):
            raise ValueError("weights are defined on (0, inf)")
        g, v = self.grid, self.values
        idx = np.searchsorted(g, t, side="right") - 1
        out = np.empty_like(t)

        head = idx < 0
        if np.any(head):
            out[head] = 0.0 if v[0] == 0.0 else v[0] * (t[head] / g[0]) ** self.head_exp
        tail = idx >= g.size - 1
        if np.any(tail):
            out[tail] = 0.0 if v[-1] == 0.0 else v[-1] * (t[tail] / g[-1]) ** self.tail_exp
        mid = ~head & ~tail
        if np.any(mid):
            i = idx[mid]
            if self.interp == STEP:
                out[mid] = v[i]
            else:
                base = v[i]
                out[mid] = np.where(base == 0.0, 0.0, base * (t[mid] / g[i]) ** self._slopes[i])
        if self.zero_beyond is not None:
            out[t >= self.zero_beyond] = 0.0
        if self.inf_beyond is not None:
            out[t >= self.inf_beyond] = INF
        return float(out[0]) if scalar else out

    # -- integrals -----------------------------------------------------------

    def cumulative(self, x):
        """Integral of the weight over (0, x], extended-real valued.

        Raises DivergentIntegral when the integral is infinite for every
        positive x because of the head behavior; returns +inf for x beyond an
        infinite-value cutoff.
        """
        if self._head_divergent:
            raise DivergentIntegral(
                f"cumulative integral diverges at 0 (head exponent {self.head_exp:g} <= -1)",
                exponent=self.head_exp,
            )
        scalar = np.isscalar(x)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0.0):
            raise ValueError("cumulative integral needs x >= 0")
        g, v = self.grid, self.values
        xe = np.minimum(x, self._cutoff)
        fin = np.isfinite(xe) & (xe > 0.0)
        idx = np.searchsorted(g, np.where(fin, xe, g[0]), side="right") - 1
        out = np.zeros_like(x)

        head = fin & (idx < 0)
        if np.any(head) and v[0] > 0.0:
            out[head] = v[0] * g[0] / (self.head_exp + 1.0) * (xe[head] / g[0]) ** (self.head_exp + 1.0)
        mid = fin & (idx >= 0) & (idx < g.size - 1)
        if np.any(mid):
            i = idx[mid]
            part = v[i] * g[i] * _edif(self._slopes[i] + 1.0, np.log(xe[mid] / g[i]))
            out[mid] = self._prefix[i] + part
        top = fin & (idx >= g.size - 1)
        if np.any(top):
            part = 0.0
            if v[-1] > 0.0:
                part = v[-1] * g[-1] * _edif(self.tail_exp + 1.0, np.log(xe[top] / g[-1]))
            out[top] = self._prefix[-1] + part
        out[xe <= 0.0] = 0.0
        out[~np.isfinite(xe)] = self.total_mass
        if self.inf_beyond is not None:
            out[x > self.inf_beyond] = INF
        return float(out[0]) if scalar else out

    def tail_moment(self, x, s: float = 0.0):
        """Integral of weight(t) * t**(-s) over [x, inf).

        Raises DivergentIntegral when the integral is infinite (divergent tail
        growth or an infinite-value region).
        """
        if self.inf_beyond is not None:
            raise DivergentIntegral(
                f"tail integral is infinite: weight is +inf beyond t={self.inf_beyond:g}"
            )
        g, v = self.grid, self.values
        a_t = self.tail_exp - s
        if v[-1] > 0.0 and self.zero_beyond is None and a_t >= -1.0:
            raise DivergentIntegral(
                f"tail integral diverges at infinity (exponent {a_t:g} >= -1)",
                exponent=a_t,
            )
        scalar = np.isscalar(x)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x <= 0.0):
            raise ValueError("tail moment needs x > 0")

        # closed tail piece over (grid[-1], zero_beyond or inf)
        if v[-1] == 0.0:
            tail_full = 0.0
        elif self.zero_beyond is not None:
            tail_full = v[-1] * g[-1] ** (1.0 - s) * _edif_s(a_t + 1.0, math.log(self.zero_beyond / g[-1]))
        else:
            tail_full = v[-1] * g[-1] ** (1.0 - s) / (-a_t - 1.0)

        if g.size > 1:
            L = np.diff(np.log(g))
            seg = v[:-1] * g[:-1] ** (1.0 - s) * _edif(self._slopes - s + 1.0, L)
        else:
            seg = np.zeros(0)
        suffix = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]]) + tail_full

        idx = np.searchsorted(g, x, side="right") - 1
        out = np.empty_like(x)
        head = idx < 0
        if np.any(head):
            part = 0.0
            if v[0] > 0.0:
                part = -v[0] * g[0] ** (1.0 - s) * _edif(self.head_exp - s + 1.0, np.log(x[head] / g[0]))
            out[head] = suffix[0] + part
        mid = (idx >= 0) & (idx < g.size - 1)
        if np.any(mid):
            i = idx[mid]
            done = v[i] * g[i] ** (1.0 - s) * _edif(self._slopes[i] - s + 1.0, np.log(x[mid] / g[i]))
            out[mid] = (seg[i] - done) + suffix[i + 1]
        top = idx >= g.size - 1
        if np.any(top):
            xt = x[top]
            if v[-1] == 0.0:
                out[top] = 0.0
            else:
                zb = self.zero_beyond
                if zb is not None:
                    rest = np.where(
                        xt >= zb,
                        0.0,
                        v[-1] * g[-1] ** (1.0 - s)
                        * (_edif_s(a_t + 1.0, math.log(zb / g[-1])) - _edif(a_t + 1.0, np.log(np.minimum(xt, zb) / g[-1]))),
                    )
                else:
                    rest = v[-1] * g[-1] ** (1.0 - s) / (-a_t - 1.0) * (xt / g[-1]) ** (a_t + 1.0)
                out[top] = rest
        return float(out[0]) if scalar else out

    def moment_between(self, a, b, s: float = 0.0):
        """Integral of weight(t) * t**(-s) over [a, b] for 0 < a <= b < inf.

        Unlike ``cumulative`` and ``tail_moment`` this never depends on the
        behavior at 0 or at infinity, so it stays finite even when those
        integrals diverge.  The only infinite results come from intervals that
        meet an infinite-value region.
        """
        scalar = np.isscalar(a) and np.isscalar(b)
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        a, b = np.broadcast_arrays(a, b)
        if np.any(a <= 0.0) or np.any(~np.isfinite(b)) or np.any(b < a):
            raise ValueError("moment_between needs 0 < a <= b < inf")
        g, v = self.grid, self.values
        zb = self.zero_beyond
        ae = np.minimum(a, zb) if zb is not None else a.astype(float)
        be = np.minimum(b, zb) if zb is not None else b.astype(float)

        # segment id: -1 for the head piece below grid[0], k for [g_k, g_{k+1}),
        # size-1 for the tail piece; each anchors its own closed form locally so
        # narrow intervals far from the grid anchor lose no precision
        exps = np.concatenate([self._slopes, [self.tail_exp]]) if g.size > 1 else np.array(
            [self.tail_exp]
        )

        def segdata(x):
            idx = np.searchsorted(g, x, side="right") - 1
            i = np.clip(idx, 0, g.size - 1)
            expo = np.where(idx < 0, self.head_exp, exps[i])
            return idx, expo, v[i]

        ia, expa, va = segdata(ae)
        ib, expb, vb = segdata(be)
        za = expa - s + 1.0
        zbv = expb - s + 1.0
        ra = g[np.clip(ia, 0, g.size - 1)]
        rb = g[np.clip(ib, 0, g.size - 1)]

        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            same = ib == ia
            out = np.where(
                same & (va > 0.0),
                va * ra ** (1.0 - s) * (ae / ra) ** za * _edif(za, np.log(be / ae)),
                0.0,
            )
            cross = ~same
            if np.any(cross):
                up_a = g[np.clip(ia + 1, 0, g.size - 1)]
                part_a = np.where(
                    va > 0.0,
                    va * ra ** (1.0 - s) * (ae / ra) ** za * _edif(za, np.log(up_a / ae)),
                    0.0,
                )
                part_b = np.where(
                    vb > 0.0,
                    vb * rb ** (1.0 - s) * _edif(zbv, np.log(be / rb)),
                    0.0,
                )
                if g.size > 1:
                    seg = np.where(
                        v[:-1] > 0.0,
                        v[:-1]
                        * g[:-1] ** (1.0 - s)
                        * _edif(self._slopes - s + 1.0, np.diff(np.log(g))),
                        0.0,
                    )
                else:
                    seg = np.zeros(0)
                starts = np.maximum(ia + 1, 0)[cross]
                stops = np.maximum(ib, 0)[cross]
                mid = np.zeros(starts.size)
                nz = stops > starts
                if seg.size and np.any(nz):
                    segx = np.concatenate([seg, [0.0]])
                    pairs = np.empty(2 * int(nz.sum()), dtype=np.int64)
                    pairs[0::2] = starts[nz]
                    pairs[1::2] = stops[nz]
                    mid[nz] = np.add.reduceat(segx, pairs)[0::2]
                out[cross] = part_a[cross] + mid + part_b[cross]
        out = np.maximum(out, 0.0)
        if self.inf_beyond is not None:
            out = np.where(b > self.inf_beyond, INF, out)
        return float(out[0]) if scalar else out

    # -- transforms ----------------------------------------------------------

    def power_transform(self, e: float) -> "Weight":
        """Pointwise power weight(t)**e; pure power pieces stay pure powers."""
        if e == 0.0:
            return Weight.from_power(1.0, 0.0)
        v = self.values
        if e < 0.0 and np.any(v == 0.0):
            raise InvalidProfile(
                "negative power of a weight with zero values: encode the zero "
                "region with zero_beyond so it can flip to inf_beyond"
            )
        inf_b, zero_b = self.inf_beyond, self.zero_beyond
        if e < 0.0:
            inf_b, zero_b = zero_b, inf_b
        return Weight(
            grid=self.grid,
            values=v**e,
            head_exp=self.head_exp * e,
            tail_exp=self.tail_exp * e,
            inf_beyond=inf_b,
            zero_beyond=zero_b,
            interp=self.interp,
        )

    def scaled(self, c: float) -> "Weight":
        if not (c > 0.0 and math.isfinite(c)):
            raise ValueError("scale factor must be finite and positive")
        return Weight(self.grid, self.values * c, self.head_exp, self.tail_exp,
                      self.inf_beyond, self.zero_beyond, self.interp)

    def dilated(self, lam: float) -> "Weight":
        """Weight(t / lam) as a new weight (grid and cutoffs scaled by lam)."""
        if not (lam > 0.0 and math.isfinite(lam)):
            raise ValueError("dilation factor must be finite and positive")
        return Weight(
            self.grid * lam,
            self.values,
            self.head_exp,
            self.tail_exp,
            None if self.inf_beyond is None else self.inf_beyond * lam,
            None if self.zero_beyond is None else self.zero_beyond * lam,
            self.interp,
        )

    # -- asymptotics ---------------------------------------------------------

    def asym_value(self, end: int) -> Asym:
        g, v = self.grid, self.values
        if end == AT_ZERO:
            if v[0] == 0.0:
                return asym.ZERO
            return Asym(v[0] * g[0] ** (-self.head_exp), self.head_exp)
        if self.inf_beyond is not None:
            return asym.INFINITE
        if self.zero_beyond is not None or v[-1] == 0.0:
            return asym.ZERO
        return Asym(v[-1] * g[-1] ** (-self.tail_exp), self.tail_exp)

    def asym_cumulative(self, end: int) -> Asym:
        if self._head_divergent:
            return asym.INFINITE
        a0 = self.asym_value(AT_ZERO)
        if end == AT_ZERO:
            if a0.is_zero():
                return asym.ZERO
            return Asym(a0.coef / (a0.exp + 1.0), a0.exp + 1.0)
        if self.inf_beyond is not None:
            return asym.INFINITE
        total = self.total_mass
        if math.isfinite(total):
            return Asym(total)
        ai = self.asym_value(AT_INF)
        if ai.exp > -1.0:
            return Asym(ai.coef / (ai.exp + 1.0), ai.exp + 1.0)
        return Asym(ai.coef, 0.0, 1.0)

    def asym_tail_moment(self, end: int, s: float = 0.0) -> Asym:
        if self.inf_beyond is not None:
            return asym.INFINITE
        ai = self.asym_value(AT_INF)
        diverges_at_inf = (not ai.is_zero()) and ai.exp - s >= -1.0
        if end == AT_INF:
            if ai.is_zero():
                return asym.ZERO
            if diverges_at_inf:
                return asym.INFINITE
            return Asym(ai.coef / (s - 1.0 - ai.exp), ai.exp - s + 1.0)
        if diverges_at_inf:
            return asym.INFINITE
        a0 = self.asym_value(AT_ZERO)
        e0 = a0.exp - s
        if not a0.is_zero() and e0 < -1.0:
            return Asym(a0.coef / (-e0 - 1.0), e0 + 1.0)
        if not a0.is_zero() and e0 == -1.0:
            return Asym(a0.coef, 0.0, 1.0)
        probe = self.grid[0] * 1e-9
        return Asym(float(self.tail_moment(probe, s)))


@dataclass(frozen=True)
class SequenceWeight:
    """Even weight on the integers, given by u(0), u(1), ... for k >= 0.

    With ``tail_exp`` set, u(k) = values[-1] * (k / (len - 1)) ** tail_exp
    beyond the stored range; otherwise the sequence vanishes there.
    """

    values: np.ndarray
    tail_exp: float | None = None

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=float)).copy()
        if v.ndim != 1 or v.size == 0:
            raise ValueError("need a 1-d non-empty value array")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise ValueError("sequence values must be finite and non-negative")
        if self.tail_exp is not None:
            if v.size < 2:
                raise ValueError("a power tail needs at least two explicit values")
            if not math.isfinite(self.tail_exp):
                raise ValueError("tail_exp must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def value(self, k: int) -> float:
        k = abs(int(k))
        if k < self.values.size:
            return float(self.values[k])
        if self.tail_exp is None:
            return 0.0
        anchor = self.values.size - 1
        return float(self.values[-1] * (k / anchor) ** self.tail_exp)


SPACE_LINE = "line-even"
SPACE_TORUS = "torus"
SPACE_SEQUENCE = "sequence"

_SPACES = (SPACE_LINE, SPACE_TORUS, SPACE_SEQUENCE)


@dataclass(frozen=True)
class MeasureProfile:
    """A weight attached to its underlying measure space.

    ``line-even``: an even weight on R given by its restriction to (0, inf).
    ``torus``: a weight on the circle of measure 1; with ``even_half`` the
    stored weight is the restriction to (0, 1/2] of a weight that is even
    around 0 and 1-periodic.
    ``sequence``: an even weight on Z given for k >= 0.
    """

    space: str
    weight: Weight | None = None
    sequence: SequenceWeight | None = None
    even_half: bool = False

    def __post_init__(self):
        if self.space not in _SPACES:
            raise InvalidProfile(f"unknown space {self.space!r}, expected one of {_SPACES}")
        if self.space == SPACE_SEQUENCE:
            if self.sequence is None or self.weight is not None:
                raise InvalidProfile("sequence profiles need exactly the sequence payload")
            return
        if self.weight is None or self.sequence is not None:
            raise InvalidProfile(f"{self.space} profiles need exactly the weight payload")
        if self.even_half and self.space != SPACE_TORUS:
            raise InvalidProfile("even_half only applies to torus profiles")
        if self.space == SPACE_TORUS:
            w = self.weight
            lim = 0.5 if self.even_half else 1.0
            if w.grid[-1] > lim or (w._cutoff is not INF and w._cutoff > lim):
                raise InvalidProfile(f"torus weight data must live inside (0, {lim:g}]")

    @classmethod
    def line_even(cls, weight: Weight) -> "MeasureProfile":
        return cls(space=SPACE_LINE, weight=weight)

    @classmethod
    def torus(cls, weight: Weight, even_half: bool = False) -> "MeasureProfile":
        return cls(space=SPACE_TORUS, weight=weight, even_half=even_half)

    @classmethod
    def of_sequence(cls, seq: SequenceWeight) -> "MeasureProfile":
        return cls(space=SPACE_SEQUENCE, sequence=seq)


# -- rearrangement -----------------------------------------------------------


def _distribution_rearrange(w: Weight, factor: float, cap: float | None,
                            x_lo: float, x_hi: float, n_alpha: int = 600,
                            n_t: int = 400) -> Weight:
    """Generic decreasing rearrangement through the distribution function.

    The distribution function is exact per power piece; the result is a
    log-log interpolation of samples of the inverse, so this path is
    approximate.  ``factor`` scales the measure (2 for even extensions)."""
    g, v = w.grid, w.values
    pieces = []  # (lo, hi, coef, a) with value coef * t**a
    if v[0] > 0.0 and x_lo < g[0]:
        pieces.append((x_lo, g[0], v[0] * g[0] ** (-w.head_exp), w.head_exp))
    for i in range(g.size - 1):
        if v[i] > 0.0:
            a = w._slopes[i]
            pieces.append((g[i], g[i + 1], v[i] * g[i] ** (-a), a))
    hi_end = min(x_hi, w._cutoff)
    if v[-1] > 0.0 and hi_end > g[-1]:
        pieces.append((g[-1], hi_end, v[-1] * g[-1] ** (-w.tail_exp), w.tail_exp))
    if not pieces:
        return Weight.from_steps(np.array([1.0, 2.0]), np.array([0.0]))

    ends = []
    for lo, hi, c, a in pieces:
        ends += [c * lo**a, c * hi**a]
    vmax, vmin = max(ends), min(ends)
    alphas = np.geomspace(max(vmin * 0.5, vmax * 1e-14), vmax * (1 - 1e-12), n_alpha)

    mu = np.zeros_like(alphas)
    for lo, hi, c, a in pieces:
        if a == 0.0:
            mu += np.where(c > alphas, hi - lo, 0.0)
        else:
            with np.errstate(over="ignore"):
                t_star = np.clip((alphas / c) ** (1.0 / a), lo, hi)
            mu += (hi - t_star) if a > 0 else (t_star - lo)
    mu *= factor
    support = factor * sum(hi - lo for lo, hi, _, _ in pieces)
    if cap is not None:
        mu = np.minimum(mu, cap)
        support = min(support, cap)

    order = np.argsort(mu)
    mu_s, al_s = mu[order], alphas[order]
    t_lo = max(float(mu_s[mu_s > 0].min()) if np.any(mu_s > 0) else 1e-12, 1e-300)
    t_hi = float(mu_s.max())
    if not t_hi > t_lo:
        t_hi = t_lo * 2.0
    ts = np.geomspace(t_lo * 1.000001, t_hi * 0.999999, n_t)
    us = np.interp(ts, mu_s, al_s)
    keep = us > 0
    ts, us = ts[keep], us[keep]

    def _fit(i0, i1):
        if us[i0] > 0 and us[i1] > 0 and us[i0] != us[i1]:
            return min(0.0, math.log(us[i1] / us[i0]) / math.log(ts[i1] / ts[i0]))
        return 0.0

    head_exp = _fit(0, 2) if ts.size >= 3 else 0.0
    finite_support = (
        cap is not None
        or w.zero_beyond is not None
        or v[-1] == 0.0
        or (v[0] == 0.0 and w.tail_exp < 0.0)
    )
    if finite_support and support > ts[-1]:
        return Weight(grid=ts, values=us, head_exp=head_exp, tail_exp=0.0,
                      zero_beyond=float(support), interp=LOGLOG)
    tail_exp = _fit(-3, -1) if ts.size >= 3 else 0.0
    return Weight(grid=ts, values=us, head_exp=head_exp, tail_exp=tail_exp,
                  interp=LOGLOG)


def _sequence_rearrange(seq: SequenceWeight) -> Weight:
    v = seq.values
    L = v.size
    monotone = bool(np.all(np.diff(v) <= 0.0)) and (seq.tail_exp is None or seq.tail_exp <= 0.0)
    if monotone and L == 1:
        return Weight(grid=np.array([0.5]), values=v.copy(), head_exp=0.0,
                      tail_exp=0.0, zero_beyond=1.0, interp=STEP)
    if monotone:
        grid = np.concatenate([[0.5], 2.0 * np.arange(1, L) - 1.0])
        if seq.tail_exp is None:
            return Weight(grid=grid, values=v.copy(), head_exp=0.0, tail_exp=0.0,
                          zero_beyond=2.0 * L - 1.0, interp=STEP)
        # beyond the stored range the k-th value sits on a cell of width 2
        # around t = 2k, so the tail exponent carries over unchanged
        return Weight(grid=grid, values=v.copy(), head_exp=0.0,
                      tail_exp=seq.tail_exp, interp=STEP)
    if seq.tail_exp is not None and seq.tail_exp > 0.0:
        raise InvalidProfile("an unbounded sequence has no finite rearrangement")
    # merge the sorted explicit block with the (already sorted) tail stream
    explicit = sorted(((float(x), (2.0 if k else 1.0)) for k, x in enumerate(v)), reverse=True)
    merged = []
    ti = L
    anchor = L - 1
    tail_val = (lambda k: v[-1] * (k / anchor) ** seq.tail_exp) if seq.tail_exp is not None else (lambda k: 0.0)
    ei = 0
    budget = 2 * L + 64
    while len(merged) < budget:
        tv = tail_val(ti)
        if ei < len(explicit) and explicit[ei][0] >= tv:
            merged.append(explicit[ei])
            ei += 1
        elif tv > 0.0:
            merged.append((tv, 2.0))
            ti += 1
        else:
            break
    vals = np.array([m[0] for m in merged])
    widths = np.array([m[1] for m in merged])
    edges = np.concatenate([[0.0], np.cumsum(widths)])
    pos = vals > 0
    if not np.any(pos):
        return Weight.from_steps(np.array([1.0, 2.0]), np.array([0.0]))
    last = int(np.nonzero(pos)[0][-1]) + 1
    vals, edges = vals[:last], edges[: last + 1]
    grid = np.concatenate([[edges[1] * 0.5], edges[1:-1]])
    if seq.tail_exp is not None and ei >= len(explicit):
        # ran into the pure tail stream: extend by its power law
        return Weight(grid=grid, values=vals, head_exp=0.0, tail_exp=seq.tail_exp, interp=STEP)
    return Weight(grid=grid, values=vals, head_exp=0.0, tail_exp=0.0,
                  zero_beyond=float(edges[-1]), interp=STEP)


def rearrange(profile: MeasureProfile) -> Weight:
    """Non-increasing rearrangement of the profile, as a weight on (0, inf).

    Monotone inputs use exact fast paths (a measure-preserving change of
    variable); general inputs go through the distribution function.
    """
    if profile.space == SPACE_SEQUENCE:
        return _sequence_rearrange(profile.sequence)
    w = profile.weight
    if profile.space == SPACE_LINE:
        if w.is_nonincreasing:
            return w.dilated(2.0)
        lo = w.grid[0] * 1e-8
        hi = min(w.grid[-1] * 1e8, w._cutoff)
        return _distribution_rearrange(w, factor=2.0, cap=None, x_lo=lo, x_hi=hi)
    # torus
    if profile.even_half:
        if w.is_nonincreasing:
            r = w.dilated(2.0)
            zb = 1.0 if r.zero_beyond is None else min(1.0, r.zero_beyond)
            return Weight(r.grid, r.values, r.head_exp, r.tail_exp,
                          None, zb, r.interp)
        return _distribution_rearrange(w, factor=2.0, cap=1.0, x_lo=w.grid[0] * 1e-8, x_hi=0.5)
    if w.is_nonincreasing:
        zb = 1.0 if w.zero_beyond is None else min(1.0, w.zero_beyond)
        return Weight(w.grid, w.values, w.head_exp, w.tail_exp, None, zb, w.interp)
    return _distribution_rearrange(w, factor=1.0, cap=1.0, x_lo=w.grid[0] * 1e-8, x_hi=1.0)


def reciprocal_rearrange(profile: MeasureProfile) -> Weight:
    """The weight w with 1/w equal to the rearrangement of 1/W.

    The reciprocal flips monotonicity, so weights increasing on their space
    (the usual case) take the exact fast path.  Regions outside the support
    of a finite-measure space come back as an inf_beyond cutoff.
    """
    if profile.space == SPACE_SEQUENCE:
        raise InvalidProfile("reciprocal rearrangement of sequence payloads is not defined here")
    recip = profile.weight.power_transform(-1.0)
    flipped = MeasureProfile(space=profile.space, weight=recip, even_half=profile.even_half)
    return rearrange(flipped).power_transform(-1.0)


# -- level function ----------------------------------------------------------


def level_function(u: Weight, extension_decades: float = 6.0, subdiv: int = 16) -> Weight:
    """Derivative of the least concave majorant of the primitive of u.

    Already non-increasing weights are returned unchanged.  Raises
    InfiniteLevel when no finite concave majorant exists (primitive divergent
    at 0, an infinite-value region, or superlinear growth)."""
    if u.is_nonincreasing:
        return u
    if u.inf_beyond is not None:
        raise InfiniteLevel("no finite concave majorant: weight has an infinite-value region")
    if u._head_divergent:
        raise InfiniteLevel("no finite concave majorant: primitive diverges at 0")
    if u.values[-1] > 0.0 and u.zero_beyond is None and u.tail_exp > 0.0:
        raise InfiniteLevel("no finite concave majorant: primitive grows superlinearly")

    g = u.grid
    compact_end = None
    if u.zero_beyond is not None:
        compact_end = u.zero_beyond
    elif u.values[-1] == 0.0:
        compact_end = g[-1]
    ext_ppd = max(16, 2 * subdiv)

    xs = [np.array([0.0])]
    xs.append(np.geomspace(g[0] * 1e-6, g[0], 6 * ext_ppd + 1)[:-1])
    for i in range(g.size - 1):
        xs.append(np.geomspace(g[i], g[i + 1], subdiv + 1)[:-1])
    xs.append(np.array([g[-1]]))
    if compact_end is not None:
        if compact_end > g[-1]:
            xs.append(np.geomspace(g[-1], compact_end, subdiv + 1)[1:])
    else:
        ext = np.geomspace(g[-1], g[-1] * 10.0**extension_decades,
                           int(ext_ppd * extension_decades) + 1)[1:]
        xs.append(ext)
    x = np.unique(np.concatenate(xs))
    F = u.cumulative(x)

    verts = upper_hull(x, F)
    xv, Fv = x[verts], F[verts]
    slopes = np.diff(Fv) / np.diff(xv)
    pos = slopes > 0.0
    if not np.any(pos):
        return Weight.from_steps(np.array([1.0, 2.0]), np.array([0.0]))
    last = int(np.nonzero(pos)[0][-1]) + 1
    flat_after = last < slopes.size or compact_end is not None
    xv, slopes = xv[: last + 1], slopes[:last]

    # when the weight falls near 0 the majorant follows the primitive there,
    # so the output keeps the head exponent instead of a flat cap
    head_out = min(u.head_exp, 0.0) if u.values[0] > 0.0 else 0.0

    # xv[0] == 0; slopes[i] rules (xv[i], xv[i+1])
    if flat_after:
        grid_out = np.concatenate([[xv[1] * 0.5], xv[1:-1]])
        return Weight(grid=grid_out, values=slopes, head_exp=head_out, tail_exp=0.0,
                      zero_beyond=float(xv[-1]), interp=STEP)
    grid_out = np.concatenate([[xv[1] * 0.5], xv[1:]])
    vals_out = np.concatenate([slopes, [slopes[-1]]])
    return Weight(grid=grid_out, values=vals_out, head_exp=head_out,
                  tail_exp=min(u.tail_exp, 0.0), interp=STEP)


# -- averaging-class constant ------------------------------------------------


def bp_constant(f: Weight, p: float, span: float = 1e5, ppd: int = 24) -> float:
    """Least beta with y**p * int_y^inf f(t) t**-p dt <= beta * int_0^y f.

    Returns +inf when the ratio is unbounded and 0.0 in the vacuous case
    where the right side is infinite for every y.
    """
    if not p > 0.0:
        raise ValueError("need p > 0")
    if f._head_divergent:
        return 0.0
    if float(np.max(f.values)) == 0.0:
        return 0.0
    g, v = f.grid, f.values

    if f.inf_beyond is not None:
        return INF
    if v[-1] > 0.0 and f.zero_beyond is None and f.tail_exp - p >= -1.0:
        return INF

    best = 0.0
    if v[0] > 0.0:
        a0 = f.head_exp
        if a0 >= p - 1.0:
            return INF
        best = max(best, (a0 + 1.0) / (p - 1.0 - a0))
    if v[-1] > 0.0 and f.zero_beyond is None:
        aN = f.tail_exp
        if aN > -1.0:
            best = max(best, (aN + 1.0) / (p - 1.0 - aN))

    lo = g[0] / span
    hi = g[-1] * span
    if math.isfinite(f._cutoff):
        hi = f._cutoff * (1.0 - 1e-9)
    hi = max(hi, g[0] * 2.0)
    n = int(ppd * math.log10(hi / lo)) + 2
    ys = np.unique(np.concatenate([np.geomspace(lo, hi, n), g]))
    num = ys**p * f.tail_moment(ys, p)
    den = f.cumulative(ys)
    if np.any((den == 0.0) & (num > 0.0)):
        return INF
    ok = den > 0.0
    if np.any(ok):
        best = max(best, float(np.max(num[ok] / den[ok])))
    return best


def check_monotone_transform(f: Weight, e: float) -> bool:
    """Whether t**e * f(t) is non-increasing on (0, inf)."""
    if f.inf_beyond is not None:
        return False
    v = f.values
    if np.all(v == 0.0):
        return True
    if v[0] > 0.0 and f.head_exp + e > 0.0:
        return False
    if v[-1] > 0.0 and f.zero_beyond is None and f.tail_exp + e > 0.0:
        return False
    if f.interp == STEP:
        # constant pieces tilted by t**e must fall within each piece and at jumps
        if e > 0.0 and np.any(v > 0.0):
            return False
        return bool(np.all(np.diff(v) <= 0.0))
    return bool(np.all(f._slopes + e <= 0.0))
