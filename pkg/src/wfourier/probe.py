"""Counterexample experiments for the weighted Fourier inequality.

Two constructions drive the package's headline demonstration.  On the circle,
a lacunary-phase trigonometric series with coefficients k^(-1/2)(log k)^(-2)
e^(ik log k) keeps a bounded weighted input norm while its weighted
coefficient norm grows like a divergent series.  On the line, a Gaussian
window of width 1/gamma, gamma = (2/3)(1+log K)^(3/2), modulated by the same
chirp produces a transform bounded below pointwise while the weighted input
norm tends to zero.  Both are monitored along a truncation schedule; the
reported ratios grow without bound as the cutoff increases, which is the
numerical stand-in for the non-existence of a finite inequality constant.

The oscillatory integrals are evaluated with a fixed phase-increment panel
rule (Gauss-Legendre nodes per panel, panel length bounded so the phase
advances at most a set fraction of a cycle), which stays valid across the
stationary-phase-free ranges the estimates use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import kahan_sum, osc_gauss_sum
from .errors import (
    NonMonotoneInput,
    OscillatoryQuadratureNotConverged,
    QuadratureNotConverged,
)

TWO_PI = 2.0 * math.pi

TORUS_SCHEDULE = (1_000, 10_000, 100_000, 1_000_000)
LINE_SCHEDULE = (50, 100, 200, 400)

# default phase advance per quadrature panel for the windowed transforms
PHASE_CAP = math.pi / 4.0
# long-range bound checks tolerate a full half-cycle per panel at GL-8
PHASE_CAP_WIDE = math.pi

_GL8_NODES, _GL8_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL16_NODES, _GL16_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class ProbeParams:
    """Exponents and schedule for the counterexample experiments.

    The exponent chain 1/2 < beta/q < alpha/p' < 1/q < 1 with 1 < q < 2 < p is
    what makes the construction work: the first inequality makes the
    coefficient series diverge, the middle one keeps the integral weight
    condition satisfied, and the last two keep both weights admissible.  The
    defaults maximize the detectable growth exponent beta/q - 1/2 = 0.4; the
    divergence is logarithmically damped and invisible for mild parameters at
    desk scale.
    """

    p: float = 20.0
    q: float = 1.05
    alpha: float = 0.97
    beta: float = 0.945
    k_schedule: tuple = TORUS_SCHEDULE
    m_points: int = 1 << 21
    rtol: float = 0.01

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (1.0 < q < 2.0 < p < math.inf):
            raise ValueError("need 1 < q < 2 < p")
        pp = p / (p - 1.0)
        al, be = float(self.alpha), float(self.beta)
        if not (0.0 < al < 1.0 and 0.0 < be < 1.0):
            raise ValueError("alpha and beta must lie in (0, 1)")
        chain = (0.5, be / q, al / pp, 1.0 / q, 1.0)
        if not all(a < b for a, b in zip(chain, chain[1:])):
            raise ValueError(
                "exponent chain 1/2 < beta/q < alpha/p' < 1/q < 1 violated: "
                + " , ".join(f"{v:.6g}" for v in chain)
            )
        ks = tuple(int(k) for k in self.k_schedule)
        if len(ks) < 1 or any(k < 3 for k in ks) or any(
            b <= a for a, b in zip(ks, ks[1:])
        ):
            raise ValueError("k_schedule must be increasing integers >= 3")
        object.__setattr__(self, "k_schedule", ks)
        m = int(self.m_points)
        if m < 2 * ks[-1] or m % 2 != 0:
            raise ValueError("m_points must be even and at least twice the largest cutoff")
        if not 0.0 < float(self.rtol) < 1.0:
            raise ValueError("rtol must lie in (0, 1)")

    @property
    def p_prime(self) -> float:
        return self.p / (self.p - 1.0)


@dataclass(frozen=True)
class ProbeRow:
    """One schedule entry: cutoff, weighted norms, their ratio, sup norms."""

    k: int
    numerator: float
    denominator: float
    ratio: float
    sup_norm: float
    sup_delta: float


@dataclass(frozen=True)
class LineDiagnostics:
    """Proof-chain checks for one line-experiment cutoff.

    Margins are minima over the z grid.  ``half_margin`` is min(A/2 - B1 - B2);
    non-negative means the window term dominates both remainders with a factor
    two to spare at every checked z.
    """

    k: int
    a_lower_margin: float
    b1_cap: float
    b2_cap: float
    half_margin: float
    triangle_residual: float
    denominator_direct: float


@dataclass(frozen=True)
class ProbeResult:
    rows: tuple
    numerator_slope: float
    numerator_residual: float
    ratio_slope: float
    ratio_residual: float
    oracle_value: float
    parseval_rel: float = math.nan
    stable_k: int | None = None
    line: tuple = field(default_factory=tuple)


# -- divergent series ---------------------------------------------------------


def _oracle_terms(beta: float, q: float, k: int) -> np.ndarray:
    ks = np.arange(2, k + 1, dtype=float)
    return ks ** (beta - 1.0 - 0.5 * q) * np.log(ks) ** (-2.0 * q)


def divergent_series_oracle(beta: float, q: float, k: int) -> float:
    """Partial sum of k^(beta-1-q/2) (log k)^(-2q) from k=2, compensated."""
    if not beta > 0.5 * q:
        raise ValueError("need beta > q/2 for the series to diverge")
    if int(k) < 2:
        raise ValueError("cutoff must be at least 2")
    return float(kahan_sum(_oracle_terms(beta, q, int(k))))


# -- oscillatory quadrature ----------------------------------------------------


@dataclass(frozen=True)
class OscillatoryProfile:
    """Amplitude c * y**s * (log y)**tau * exp(-g2*(y-z0)**2/2) on (1, inf),
    paired with the chirp phase y*log y + 2*pi*x*y in the transforms below."""

    c: float = 1.0
    s: float = 0.0
    tau: float = 0.0
    g2: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError("amplitude scale c must be positive and finite")
        if self.g2 < 0.0:
            raise ValueError("gaussian curvature g2 must be non-negative")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = self.c * y**self.s
        if self.tau != 0.0:
            out = out * np.log(y) ** self.tau
        if self.g2 != 0.0:
            out = out * np.exp(-0.5 * self.g2 * (y - self.z0) ** 2)
        return out

    def log_slope(self, y):
        y = np.asarray(y, dtype=float)
        out = self.s / y + self.tau / (y * np.log(y))
        if self.g2 != 0.0:
            out = out + self.g2 * (self.z0 - y)
        return out

    def classify_monotone(self, a: float, b: float) -> str:
        ys = np.geomspace(a, b, 4097)
        sl = self.log_slope(ys)
        scale = float(np.max(np.abs(sl)))
        tol = 1e-12 * max(scale, 1.0)
        if np.all(sl <= tol):
            return "decreasing"
        if np.all(sl >= -tol):
            return "increasing"
        raise NonMonotoneInput(
            f"profile changes direction inside [{a:g}, {b:g}]"
        )


def _phase_panels(a: float, b: float, x: float, cap: float, width_cap: float) -> np.ndarray:
    """Panel edges on [a, b] so the phase y log y + 2 pi x y advances at most
    ``cap`` per panel (linear term and curvature separately) and panel length
    never exceeds ``width_cap``."""
    pieces = [np.array([a])]
    pos = a
    while pos < b:
        hi = min(pos * 2.0, b)
        slope = max(abs(math.log(pos) + 1.0 + TWO_PI * x), abs(math.log(hi) + 1.0 + TWO_PI * x))
        step = min(
            cap / max(slope, 1e-12),
            math.sqrt(2.0 * cap * pos),
            0.35 * pos,
            width_cap,
        )
        n = max(1, int(math.ceil((hi - pos) / step)))
        pieces.append(np.linspace(pos, hi, n + 1)[1:])
        pos = hi
    return np.concatenate(pieces)


def _gauss_nodes(edges: np.ndarray):
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    y = (mid[:, None] + half[:, None] * _GL8_NODES[None, :]).ravel()
    wt = (half[:, None] * _GL8_WEIGHTS[None, :]).ravel()
    return np.ascontiguousarray(y), np.ascontiguousarray(wt)


def _osc_once(profile: OscillatoryProfile, a, b, x, cap, width_cap) -> complex:
    if b <= a:
        return 0.0 + 0.0j
    edges = _phase_panels(a, b, x, cap, width_cap)
    y, wt = _gauss_nodes(edges)
    re, im = osc_gauss_sum(y, wt, profile.c, profile.s, profile.tau, profile.g2, profile.z0, x)
    return complex(re, im)


def oscillatory_transform(
    profile: OscillatoryProfile,
    a: float,
    b: float,
    x: float = 0.0,
    cap: float = PHASE_CAP_WIDE,
    check: bool = True,
) -> complex:
    """Integral over [a, b] of profile(y) e^(iy log y) e^(2 pi i x y) dy.

    With ``check`` the quadrature is repeated at twice the panel density and
    the coarse result must agree within a relative 1e-8 of the amplitude mass,
    else OscillatoryQuadratureNotConverged is raised.
    """
    if not 1.0 < a < b:
        raise ValueError("need 1 < a < b")
    width_cap = 0.5 / math.sqrt(profile.g2) if profile.g2 > 0.0 else math.inf
    fine = _osc_once(profile, a, b, x, cap, width_cap)
    if check:
        coarse = _osc_once(profile, a, b, x, 2.0 * cap, 2.0 * width_cap)
        edges = _phase_panels(a, b, x, cap, width_cap)
        y, wt = _gauss_nodes(edges)
        scale = float(np.dot(np.abs(profile(y)), wt))
        if abs(fine - coarse) > 1e-8 * max(scale, 1e-300):
            raise OscillatoryQuadratureNotConverged(
                f"panel refinement moved the transform by {abs(fine - coarse):.3e} "
                f"against amplitude mass {scale:.3e}"
            )
    return fine


def vdc_bound_check(profile: OscillatoryProfile, a: float, b: float, x: float):
    """Chirp-transform bound for a monotone amplitude on [a, b].

    Decreasing f: |transform| <= 24 sqrt(a) f(a) + 12 integral of y^(-1/2) f;
    increasing f: |transform| <= 24 sqrt(b) f(b).  Returns (lhs, rhs, holds).
    """
    if not 1.0 < a < b:
        raise ValueError("need 1 < a < b")
    case = profile.classify_monotone(a, b)
    lhs = abs(oscillatory_transform(profile, a, b, x))
    if case == "decreasing":
        # smooth non-oscillatory integrand: log-space panels are exact here
        edges = np.geomspace(a, b, max(2, int(16 * math.log10(b / a)) + 2))
        lm = 0.5 * (np.log(edges[1:]) + np.log(edges[:-1]))
        lh = 0.5 * (np.log(edges[1:]) - np.log(edges[:-1]))
        y = np.exp(lm[:, None] + lh[:, None] * _GL16_NODES[None, :])
        wt = y * (lh[:, None] * _GL16_WEIGHTS[None, :])
        integral = float(np.sum(profile(y.ravel()) * y.ravel() ** -0.5 * wt.ravel()))
        rhs = 24.0 * math.sqrt(a) * float(profile(a)) + 12.0 * integral
    else:
        rhs = 24.0 * math.sqrt(b) * float(profile(b))
    return lhs, rhs, bool(lhs <= rhs * (1.0 + 1e-12))


# -- circle experiment ---------------------------------------------------------


def _slope_fit(ks, vals):
    lx = np.log(np.asarray(ks, dtype=float))
    ly = np.log(np.asarray(vals, dtype=float))
    if lx.size < 2 or not np.all(np.isfinite(ly)):
        return math.nan, math.nan
    coef = np.polyfit(lx, ly, 1)
    resid = ly - np.polyval(coef, lx)
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def _torus_cell_moments(m: int, nu: float) -> np.ndarray:
    """Exact integrals of dist(x, Z)^nu over the cells [j/m, (j+1)/m)."""
    j = np.arange(m // 2, dtype=float)
    half = ((j + 1.0) ** (nu + 1.0) - j ** (nu + 1.0)) / ((nu + 1.0) * float(m) ** (nu + 1.0))
    return np.concatenate([half, half[::-1]])


def torus_counterexample(params: ProbeParams | None = None) -> ProbeResult:
    """Ratio growth for the circle construction along the cutoff schedule.

    The weighted coefficient norm is the exact compensated partial sum (the
    same term array as divergent_series_oracle); the weighted input norm is a
    cell quadrature of the partial sum evaluated on m_points uniform points,
    with exact cell moments of the vanishing weight.  A half-density
    requadrature must agree within rtol, else QuadratureNotConverged.
    """
    params = params if params is not None else ProbeParams()
    p, q, al, be = params.p, params.q, params.alpha, params.beta
    m = params.m_points
    nu = (1.0 - al) * (p - 1.0)
    kmax = params.k_schedule[-1]

    ks_all = np.arange(2, kmax + 1, dtype=float)
    coeff = ks_all**-0.5 * np.log(ks_all) ** -2.0 * np.exp(1j * ks_all * np.log(ks_all))

    moments = _torus_cell_moments(m, nu)
    moments_half = _torus_cell_moments(m // 2, nu)

    rows = []
    parseval_worst = 0.0
    prev = None
    for k in params.k_schedule:
        pad = np.zeros(m, dtype=complex)
        pad[2 : k + 1] = coeff[: k - 1]
        g = np.fft.ifft(pad)
        g *= m
        mag = np.abs(g)

        num_q = kahan_sum(_oracle_terms(be, q, k))
        numerator = num_q ** (1.0 / q)

        den_p = float(kahan_sum(mag**p * moments))
        den_half = float(kahan_sum(mag[::2] ** p * moments_half))
        denominator = den_p ** (1.0 / p)
        drift = abs(den_p - den_half) / max(den_p, 1e-300)
        if drift > params.rtol:
            raise QuadratureNotConverged(
                f"input-norm quadrature drifts {drift:.3%} between m={m} and m={m // 2} at cutoff {k}"
            )

        par = abs(np.mean(mag**2) - float(np.sum(np.abs(pad) ** 2))) / float(
            np.sum(np.abs(pad) ** 2)
        )
        parseval_worst = max(parseval_worst, par)

        sup = float(np.max(mag))
        delta = float(np.max(np.abs(g - prev))) if prev is not None else math.nan
        prev = g
        rows.append(
            ProbeRow(
                k=k,
                numerator=float(numerator),
                denominator=float(denominator),
                ratio=float(numerator / denominator),
                sup_norm=sup,
                sup_delta=delta,
            )
        )

    slope, resid = _slope_fit([r.k for r in rows], [r.numerator for r in rows])
    rslope, rresid = _slope_fit([r.k for r in rows], [r.ratio for r in rows])
    return ProbeResult(
        rows=tuple(rows),
        numerator_slope=slope,
        numerator_residual=resid,
        ratio_slope=rslope,
        ratio_residual=rresid,
        oracle_value=divergent_series_oracle(be, q, kmax),
        parseval_rel=parseval_worst,
    )


# -- line experiment -----------------------------------------------------------


def _gauss_norm_weighted(gamma: float, p: float, nu: float) -> float:
    """Weighted p-norm of the Gaussian window sqrt(2 pi)/gamma e^(-2 pi^2 (x/gamma)^2)
    against |x|^nu dx, in closed form."""
    integral = (2.0 * math.pi**2 * p) ** (-(nu + 1.0) / 2.0) * math.gamma((nu + 1.0) / 2.0)
    return math.sqrt(TWO_PI) * gamma ** ((nu + 1.0) / p - 1.0) * integral ** (1.0 / p)


def _line_z_grid(k: int, ppd: int = 16):
    lo, hi = math.e + 1.0, float(k) - 1.0
    n = max(2, int(ppd * math.log10(hi / lo)) + 2)
    edges = np.geomspace(lo, hi, n)
    lm = 0.5 * (np.log(edges[1:]) + np.log(edges[:-1]))
    lh = 0.5 * (np.log(edges[1:]) - np.log(edges[:-1]))
    znodes = np.exp(lm[:, None] + lh[:, None] * _GL8_NODES[None, :])
    wt = (znodes * lh[:, None] * _GL8_WEIGHTS[None, :]).ravel()
    return znodes.ravel(), wt


def line_counterexample(params: ProbeParams | None = None) -> ProbeResult:
    """Ratio growth for the line construction along the cutoff schedule.

    For each cutoff K the windowed transform is evaluated on a geometric z
    grid in (e+1, K-1); the weighted transform norm comes from that grid, the
    input norm from the proof's closed-form Gaussian bound (36 times the
    window norm), with an independent direct quadrature recorded per cutoff.
    The reported ratio therefore underestimates the true norm ratio: the
    numerator is a restricted-domain norm and the denominator an upper bound.
    """
    params = (
        params
        if params is not None
        else replace(ProbeParams(), k_schedule=LINE_SCHEDULE)
    )
    p, q, al, be = params.p, params.q, params.alpha, params.beta
    pp = params.p_prime
    nu = (1.0 - al) * (p - 1.0)

    rows = []
    diags = []
    stable_k = None
    for k in params.k_schedule:
        kf = float(k)
        logk1 = 1.0 + math.log(kf)
        gamma = (2.0 / 3.0) * logk1**1.5
        g2 = gamma * gamma
        n_off = (math.pi / 2.0) / logk1
        window = 12.0 / gamma

        z, zwt = _line_z_grid(k)
        ghat = np.empty(z.size)
        a_vals = np.empty(z.size)
        b1_vals = np.empty(z.size)
        b2_vals = np.empty(z.size)
        tri = 0.0
        for i, zi in enumerate(z):
            pz = OscillatoryProfile(c=1.0, s=-0.5, tau=-2.0, g2=g2, z0=zi)
            lo = max(math.e, zi - window)
            hi = min(kf, zi + window)
            ia = _osc_once(pz, max(zi - n_off, lo), min(zi + n_off, hi), 0.0, PHASE_CAP, 0.5 / gamma)
            ib1 = _osc_once(pz, lo, zi - n_off, 0.0, PHASE_CAP, 0.5 / gamma)
            ib2 = _osc_once(pz, zi + n_off, hi, 0.0, PHASE_CAP, 0.5 / gamma)
            full = _osc_once(pz, lo, hi, 0.0, PHASE_CAP, 0.5 / gamma)
            ghat[i] = abs(full)
            a_vals[i] = abs(ia)
            b1_vals[i] = abs(ib1)
            b2_vals[i] = abs(ib2)
            tri = max(tri, abs(full - (ia + ib1 + ib2)))

        a_floor = 0.25 * z**-0.5 * np.log(z) ** -2.0 / gamma
        a_margin = float(np.min(a_vals / a_floor))
        cap_scale = kf ** (-math.pi**2 / 18.0)
        b1_cap = float(np.max(b1_vals)) / (24.0 * cap_scale)
        b2_cap = float(np.max(b2_vals)) / (36.0 * cap_scale)
        half_margin = float(np.min(0.5 * a_vals - b1_vals - b2_vals))
        if stable_k is None and half_margin >= 0.0:
            stable_k = k

        uvals = (z + 1.0) ** (be - 1.0)
        numerator = float(np.dot(ghat**q * uvals, zwt)) ** (1.0 / q)
        denominator = 36.0 * _gauss_norm_weighted(gamma, p, nu)

        # direct input norm: |window(x) * transform(x)|^p against |x|^nu
        xedges = np.geomspace(gamma * 1e-3, 1.6 * gamma, 20)
        xm = 0.5 * (xedges[1:] + xedges[:-1])
        xh = 0.5 * (xedges[1:] - xedges[:-1])
        xs = (xm[:, None] + xh[:, None] * _GL8_NODES[None, :]).ravel()
        xwt = (xh[:, None] * _GL8_WEIGHTS[None, :]).ravel()
        chirp = OscillatoryProfile(c=1.0, s=-0.5, tau=-2.0)
        hvals = math.sqrt(TWO_PI) / gamma * np.exp(-2.0 * math.pi**2 * (xs / gamma) ** 2)
        direct_p = 0.0
        for sign in (1.0, -1.0):
            gv = np.empty(xs.size)
            for i, xi in enumerate(xs):
                gv[i] = abs(_osc_once(chirp, math.e, kf, sign * xi, PHASE_CAP_WIDE, math.inf))
            direct_p += float(np.dot((hvals * gv) ** p * xs**nu, xwt))
        direct = direct_p ** (1.0 / p)

        sup = float(np.max(ghat))
        rows.append(
            ProbeRow(
                k=k,
                numerator=numerator,
                denominator=denominator,
                ratio=numerator / denominator,
                sup_norm=sup,
                sup_delta=math.nan,
            )
        )
        diags.append(
            LineDiagnostics(
                k=k,
                a_lower_margin=a_margin,
                b1_cap=b1_cap,
                b2_cap=b2_cap,
                half_margin=half_margin,
                triangle_residual=tri,
                denominator_direct=direct,
            )
        )

    slope, resid = _slope_fit([r.k for r in rows], [r.numerator for r in rows])
    rslope, rresid = _slope_fit([r.k for r in rows], [r.ratio for r in rows])
    return ProbeResult(
        rows=tuple(rows),
        numerator_slope=slope,
        numerator_residual=resid,
        ratio_slope=rslope,
        ratio_residual=rresid,
        oracle_value=divergent_series_oracle(be, q, params.k_schedule[-1]),
        parseval_rel=math.nan,
        stable_k=stable_k,
        line=tuple(diags),
    )
