import math
import time
import numpy as np

from wfourier.weights import Weight, Indices
from wfourier import hardy as H

print("== counterexample pair: main stable, others infinite ==")
BETA = 0.945
u_line = Weight.from_function(lambda t: (0.5 * t + 1.0) ** (BETA - 1.0), 1e-6, 1e6, ppd=64)
w_line = Weight.from_power(0.5 ** 0.57, 0.57)
idx = Indices(20.0, 1.05)
grid = H.GridSpec(t_min=1e-6, t_max=1e6, points_per_decade=8, levels=4)
t0 = time.perf_counter()
est_main = H.best_constant_main(u_line, w_line, idx, grid)
t1 = time.perf_counter()
print(f"  main: value {est_main.value:.6f} series {[f'{v:.6f}' for v in est_main.refinement_series]} diverging {est_main.diverging} [{t1-t0:.1f}s]")
assert math.isfinite(est_main.value) and not est_main.diverging
s = est_main.refinement_series
growth = [s[i + 1] / s[i] - 1.0 for i in range(len(s) - 1)]
print(f"  growth per expansion {[f'{g:.2%}' for g in growth]}")
# truncation converges: growth decays monotonically and ends below the flag threshold
assert all(g2 < g1 for g1, g2 in zip(growth, growth[1:]))
assert growth[-1] < H.GROWTH_TOL

for name, fn in [("halfpower", H.best_constant_halfpower),
                 ("tailmean", H.best_constant_tailmean),
                 ("compound", H.best_constant_compound)]:
    g = H.GridSpec(t_min=1e-3, t_max=1e3, points_per_decade=16, levels=2,
                   cone=H.NONINCREASING if name == "tailmean" else H.NONNEGATIVE)
    e = fn(u_line, w_line, idx, g)
    print(f"  {name}: value {e.value} diverging {e.diverging}")
    assert e.value == math.inf and e.diverging

print("== compound dominates main (pointwise domination of kernels) ==")
u_dec = Weight.from_function(lambda t: t ** 0.3 / (1.0 + t) ** 2.3, 1e-6, 1e6, ppd=48)
w1 = Weight.from_power(1.0, 0.0)
idx2 = Indices(2.5, 1.4)
g2 = H.GridSpec(t_min=1e-3, t_max=1e3, points_per_decade=16, levels=2, cone=H.NONINCREASING)
em = H.best_constant_main(u_dec, w1, idx2, g2)
ec = H.best_constant_compound(u_dec, w1, idx2, g2)
e3 = H.best_constant_tailmean(u_dec, w1, idx2, g2)
print(f"  main {em.value:.6f}  compound {ec.value:.6f}  tailmean {e3.value:.6f}")
assert ec.value >= em.value * (1 - 1e-9)
# compound ratio of main's own witness already dominates main's value
rc = H.compound_ratio(em.lower_witness, u_dec, w1, idx2)
print(f"  compound_ratio(main witness) {rc:.6f}")
assert rc >= em.value * (1 - 1e-12)
c = max(2.0 ** (1.0 / idx2.q - 1.0), 1.0)
bound = c * (em.value + 2.0 * e3.value)
print(f"  c(C1+2C3) = {bound:.6f} vs compound {ec.value:.6f}")
assert ec.value <= bound * 1.05

print("== duality: swapped-and-powered pair gives same main constant ==")
# (u, w, p, q) -> (w^(1-p'), u^(1-q'), q', p') keeps the constant
p, q = 2.0, 1.5
u_d = Weight.from_function(lambda t: (1.0 + t) ** -1.2, 1e-7, 1e7, ppd=48)
w_d = Weight.from_power(1.0, 0.3)
pp = p / (p - 1.0)
qp = q / (q - 1.0)
u2 = w_d.power_transform(1.0 - pp)
w2 = u_d.power_transform(1.0 - qp)
gd = H.GridSpec(t_min=1e-4, t_max=1e4, points_per_decade=24, levels=2)
e1 = H.best_constant_main(u_d, w_d, Indices(p, q), gd)
e2 = H.best_constant_main(u2, w2, Indices(qp, pp), gd)
rel = abs(e1.value - e2.value) / e1.value
print(f"  {e1.value:.6f} vs {e2.value:.6f} rel {rel:.2%}")
assert rel < 0.05

print("== cone relaxation: nonnegative >= nonincreasing ==")
for kind, fn in [("main", H.best_constant_main), ("tailmean", H.best_constant_tailmean)]:
    ga = H.GridSpec(t_min=1e-3, t_max=1e3, points_per_decade=16, levels=1, cone=H.NONNEGATIVE)
    gb = H.GridSpec(t_min=1e-3, t_max=1e3, points_per_decade=16, levels=1, cone=H.NONINCREASING)
    va = fn(u_dec, w1, idx2, ga).value
    vb = fn(u_dec, w1, idx2, gb).value
    print(f"  {kind}: free {va:.6f} cone {vb:.6f}")
    assert va >= vb * (1 - 1e-9)

print("== two-regime power catalog: integral condition finite <=> stable ==")
from wfourier.conditions import main_integral_condition
CATALOG = [
    # (p, q, alpha, beta): finite iff beta/q < alpha/p' with alpha < p'/q
    (2.0, 1.5, 0.80, 0.50),
    (3.0, 1.5, 0.90, 0.60),
    (2.5, 1.2, 0.85, 0.55),
    (4.0, 2.0, 0.60, 0.40),
    (2.0, 1.1, 0.95, 0.60),
    (3.0, 2.0, 0.70, 0.45),
    (2.0, 1.5, 0.30, 0.95),
    (3.0, 1.5, 0.40, 0.90),
    (2.5, 1.2, 0.35, 0.98),
    (4.0, 2.0, 0.50, 0.95),
    (2.0, 1.1, 0.40, 0.99),
    (3.0, 2.0, 0.45, 0.90),
]
g = H.GridSpec(t_min=1e-4, t_max=1e4, points_per_decade=8, levels=3)
for (p_, q_, al, be) in CATALOG:
    ix = Indices(p_, q_)
    uu = Weight.from_function(lambda t: (0.5 * t + 1.0) ** (be - 1.0), 1e-8, 1e8, ppd=32)
    ww = Weight.from_power(1.0, (1.0 - al) * (p_ - 1.0))
    mh = main_integral_condition(uu, ww, ix).value
    est = H.best_constant_main(uu, ww, ix, g)
    stable = math.isfinite(est.value) and not est.diverging
    finite_mh = math.isfinite(mh)
    tag = "finite" if finite_mh else "inf"
    print(f"  p={p_} q={q_} a={al} b={be}: mh={tag:6s} est series {[f'{v:.3g}' for v in est.refinement_series]} diverging={est.diverging}")
    assert stable == finite_mh, (p_, q_, al, be)

print("== energy majorization: single exponential and vacuous zero ==")
d0, ok0 = H.energy_majorization_check(np.zeros(4))
print(f"  zero: {d0} {ok0}")
assert d0 == 0.0 and ok0
c1 = np.zeros(8, dtype=complex); c1[5] = 2.0 - 1.0j
d1, ok1 = H.energy_majorization_check(c1)
print(f"  single mode: d_hat {d1:.12f}")
assert abs(d1 - 1.0) < 1e-6 and ok1

print("== energy majorization calibration: 100 random 64-term polys ==")
rng = np.random.default_rng(42)
worst = 0.0
t0 = time.perf_counter()
for i in range(100):
    c = rng.normal(size=64) + 1j * rng.normal(size=64)
    if i % 3 == 0:
        c *= np.exp(-rng.uniform(0, 0.1) * np.arange(64))
    if i % 5 == 0:
        keep = rng.uniform(size=64) < 0.3
        c = np.where(keep, c, 0.0)
        if not np.any(np.abs(c) > 0): c[0] = 1.0
    d, _ = H.energy_majorization_check(c)
    worst = max(worst, d)
t1 = time.perf_counter()
print(f"  max d_hat over 100 draws: {worst:.6f} [{t1-t0:.1f}s]")
print(f"  current cap {H.ENERGY_MAJORIZATION_D}")
