import math
import time

import numpy as np

import wfourier.probe as pb
from wfourier.errors import NonMonotoneInput
from wfourier._kernels import kahan_sum, warmup

warmup()

# --- oracle ---
v2 = pb.divergent_series_oracle(0.945, 1.05, 2)
expect2 = 2.0 ** (0.945 - 1.0 - 0.525) * math.log(2.0) ** -2.1
print(f"oracle K=2: {v2!r} vs {expect2!r} diff {abs(v2 - expect2):.3e}")
assert v2 == expect2

for k, frozen in [
    (10**3, 4.0029151690746545),
    (10**4, 4.862916337300807),
    (10**5, 6.200170435421182),
    (10**6, 8.513529605480267),
]:
    s = pb.divergent_series_oracle(0.945, 1.05, k)
    print(f"oracle S({k}) = {s!r} (fsum {frozen!r})")
    assert abs(s - frozen) <= 1e-14 * frozen, (k, s)

try:
    pb.divergent_series_oracle(0.5, 1.05, 100)
    raise SystemExit("beta<=q/2 accepted")
except ValueError:
    pass

# --- params validation ---
try:
    pb.ProbeParams(p=1.5)
    raise SystemExit("bad p accepted")
except ValueError as e:
    print("params reject p=1.5:", e)
try:
    pb.ProbeParams(alpha=0.5)  # alpha/p' too small
    raise SystemExit("bad chain accepted")
except ValueError as e:
    print("params reject alpha=0.5:", e)
try:
    pb.ProbeParams(k_schedule=(1000, 500))
    raise SystemExit("bad schedule accepted")
except ValueError:
    pass
try:
    pb.ProbeParams(m_points=100)
    raise SystemExit("bad m accepted")
except ValueError:
    pass

# --- vdc ---
prof = pb.OscillatoryProfile(c=1.0, s=-0.5, tau=-2.0)
lhs, rhs, ok = pb.vdc_bound_check(prof, math.e, 1.0e4, 0.0)
print(f"vdc decreasing: lhs={lhs:.6f} rhs={rhs:.6f} holds={ok} (rhs<=36: {rhs <= 36.0})")
assert ok and rhs <= 36.0

prof_inc = pb.OscillatoryProfile(c=1.0, s=0.3)
lhs, rhs, ok = pb.vdc_bound_check(prof_inc, 2.0, 50.0, 1.0)
print(f"vdc increasing: lhs={lhs:.6f} rhs={rhs:.6f} holds={ok}")
assert ok

prof_const = pb.OscillatoryProfile()
lhs, rhs, ok = pb.vdc_bound_check(prof_const, 2.0, 100.0, 0.0)
print(f"vdc constant: lhs={lhs:.6f} rhs={rhs:.6f} holds={ok}")
assert ok

bump = pb.OscillatoryProfile(c=1.0, g2=1.0, z0=50.0)
try:
    pb.vdc_bound_check(bump, 2.0, 100.0, 0.0)
    raise SystemExit("non-monotone accepted")
except NonMonotoneInput:
    print("vdc rejects gaussian bump inside the interval")
# same bump with domain right of the peak is decreasing
lhs, rhs, ok = pb.vdc_bound_check(bump, 51.0, 60.0, 0.0)
print(f"vdc gaussian slice (decreasing): lhs={lhs:.4e} rhs={rhs:.4e} holds={ok}")
assert ok

# randomized monotone checks
rng = np.random.default_rng(7)
fails = 0
for trial in range(30):
    a = float(rng.uniform(2.0, 50.0))
    b = float(a * rng.uniform(1.5, 200.0))
    b = min(b, 1.0e4)
    x = float(rng.uniform(-5.0, 5.0))
    if rng.random() < 0.5:
        pr = pb.OscillatoryProfile(c=float(rng.uniform(0.2, 3.0)), s=float(rng.uniform(-1.5, -0.1)))
    else:
        pr = pb.OscillatoryProfile(c=float(rng.uniform(0.2, 3.0)), s=float(rng.uniform(0.1, 1.0)))
    lhs, rhs, ok = pb.vdc_bound_check(pr, a, b, x)
    if not ok:
        fails += 1
        print(f"  FAIL a={a:.3g} b={b:.3g} x={x:.3g} s={pr.s:.3g} lhs={lhs:.4e} rhs={rhs:.4e}")
print(f"vdc randomized: {30 - fails}/30 hold")
assert fails == 0

# --- torus, small ---
t0 = time.perf_counter()
params_small = pb.ProbeParams(k_schedule=(1000,), m_points=1 << 15)
res = pb.torus_counterexample(params_small)
row = res.rows[0]
num_q = row.numerator ** 1.05
oracle = pb.divergent_series_oracle(0.945, 1.05, 1000)
# bit-level check: numerator is oracle**(1/q)
assert row.numerator == oracle ** (1.0 / 1.05), (row.numerator, oracle)
print(f"torus small: K=1000 num={row.numerator:.6f} den={row.denominator:.6f} "
      f"ratio={row.ratio:.6f} parseval={res.parseval_rel:.3e} [{time.perf_counter()-t0:.2f}s]")
assert res.parseval_rel < 1e-8

# --- torus, full schedule at delivery scale ---
t0 = time.perf_counter()
res = pb.torus_counterexample()
el = time.perf_counter() - t0
print(f"torus full schedule [{el:.1f}s]:")
for r in res.rows:
    print(f"  K={r.k:>7} num={r.numerator:.6f} den={r.denominator:.6f} "
          f"ratio={r.ratio:.6f} sup={r.sup_norm:.4f} sup_delta={r.sup_delta:.6f}")
print(f"  numerator slope {res.numerator_slope:.4f} (resid {res.numerator_residual:.2e}) "
      f"ratio slope {res.ratio_slope:.4f} parseval {res.parseval_rel:.2e}")
growth = res.rows[-1].ratio / res.rows[0].ratio
print(f"  ratio growth across schedule: {growth:.4f} (need >= 2)")
assert growth >= 2.0
nums = [r.numerator for r in res.rows]
assert all(b > a for a, b in zip(nums, nums[1:])), "numerator not increasing"
deltas = [r.sup_delta for r in res.rows[1:]]
print(f"  sup deltas: {deltas}")
assert all(b < a for a, b in zip(deltas, deltas[1:])), "sup deltas not decreasing"
assert el < 120.0

# --- line, K=50 only ---
t0 = time.perf_counter()
res50 = pb.line_counterexample(pb.ProbeParams(k_schedule=(50,)))
el50 = time.perf_counter() - t0
r = res50.rows[0]
d = res50.line[0]
print(f"line K=50 [{el50:.1f}s]: num={r.numerator:.6f} den={r.denominator:.6f} ratio={r.ratio:.6f}")
print(f"  a_margin={d.a_lower_margin:.4f} b1_cap={d.b1_cap:.4f} b2_cap={d.b2_cap:.4f} "
      f"half_margin={d.half_margin:.3e} tri={d.triangle_residual:.3e} direct={d.denominator_direct:.6f}")
assert d.a_lower_margin >= 1.0, "A lower bound violated"
assert d.b1_cap <= 1.0 and d.b2_cap <= 1.0, "B caps violated"
assert d.triangle_residual < 1e-10
assert d.denominator_direct <= r.denominator, "direct norm exceeds proof bound"

# --- line, full schedule ---
t0 = time.perf_counter()
resl = pb.line_counterexample()
el = time.perf_counter() - t0
print(f"line full schedule [{el:.1f}s]: stable_k={resl.stable_k}")
for r, d in zip(resl.rows, resl.line):
    print(f"  K={r.k:>4} num={r.numerator:.6f} den={r.denominator:.6f} ratio={r.ratio:.6f} "
        f"sup={r.sup_norm:.5f} a_m={d.a_lower_margin:.3f} half_m={d.half_margin:.2e} "
        f"b1={d.b1_cap:.3f} b2={d.b2_cap:.3f} direct={d.denominator_direct:.5f}")
ratios = [r.ratio for r in resl.rows]
assert all(b > a for a, b in zip(ratios, ratios[1:])), "line ratio not increasing"
print("smoke_probe OK")
