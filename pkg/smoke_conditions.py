import math

import numpy as np

from wfourier.weights import Indices, SequenceWeight, Weight
from wfourier import conditions as C

# 1) BH0 on u = chi_(0,1), w = 1, p = q = 2: sup sqrt(min(1/x,1)) sqrt(x) = 1
u1 = Weight.from_steps([0.5, 1.0], [1.0])
# from_steps([0.5,1]) is chi_(0.5,1); want chi_(0,1): build directly
u1 = Weight(grid=np.array([0.5]), values=np.array([1.0]), head_exp=0.0, tail_exp=0.0, zero_beyond=1.0)
w1 = Weight.from_power(1.0, 0.0)
i22 = Indices(2.0, 2.0)
c = C.main_sup_condition(u1, w1, i22)
print("BH0 indicator:", c.value, c.holds, c.converged, c.diagnostic)
assert abs(c.value - 1.0) < 1e-3, c

# 2) LEVEL on u = chi_(1,2), w = 1, p = q = 2: level = 1/2 on (0,2), sup = 1/sqrt(2)
u2 = Weight.from_steps([1.0, 2.0], [1.0])
c = C.level_sup_condition(u2, w1, i22)
print("LEVEL indicator:", c.value, c.holds, c.diagnostic)
assert abs(c.value - 1.0 / math.sqrt(2.0)) < 2e-3, c
# and the raw BH0 for the same pair (finite too, sup over x<=1 of sqrt(min(1/x,2)-1)*sqrt(x) )
c = C.main_sup_condition(u2, w1, i22)
print("BH0 same pair:", c.value, c.holds)

# 3) T1c with u identically 1, q = 1.5: left side infinite, right side finite
uflat = Weight.from_power(1.0, 0.0)
c = C.halfpower_tail_ratio(uflat, Indices(4.0, 1.5))
print("T1c flat:", c.value, c.holds, c.diagnostic)
assert math.isinf(c.value) and not c.holds

# 4a) T1c with u bounded at 0: ratio blows up like y^(q/2-1) at the origin
udec = Weight.from_function(lambda t: (1.0 + t) ** -3.0, 1e-6, 1e6, 16, head_exp=0.0, tail_exp=-3.0)
idx415 = Indices(4.0, 1.5)
c = C.halfpower_tail_ratio(udec, idx415)
print("T1c bounded-head:", c.value, c.holds, c.diagnostic)
assert math.isinf(c.value) and not c.holds, c

# 4b) T1c finite: u ~ t^(-1/2)(1+t)^(-5/2) has head exponent -1/2 <= q/2-1
using = Weight.from_function(lambda t: t**-0.5 * (1.0 + t) ** -2.5, 1e-6, 1e6, 16,
                             head_exp=-0.5, tail_exp=-3.0)
c = C.halfpower_tail_ratio(using, idx415)
ys = np.geomspace(1e-9, 1e9, 4000)
num = ys**0.75 * using.tail_moment(ys, 0.75)
den = using.cumulative(ys) + ys**1.5 * using.tail_moment(ys, 1.5)
brute = float(np.max(num / den))
print("T1c singular-head:", c.value, "brute:", brute, c.converged)
assert math.isfinite(c.value) and abs(c.value - brute) / brute < 1e-2, (c.value, brute)

# 5) counterexample pair: u = (t/2+1)^(beta-1), w = (t/2)^((1-alpha)(p-1)), p=20 q=1.05
p, q, alpha, beta = 20.0, 1.05, 0.97, 0.945
idx = Indices(p, q)
uex = Weight.from_function(lambda t: (0.5 * t + 1.0) ** (beta - 1.0), 1e-8, 1e8, 32,
                           head_exp=0.0, tail_exp=beta - 1.0)
wex = Weight.from_power(0.5 ** ((1.0 - alpha) * (p - 1.0)), (1.0 - alpha) * (p - 1.0))
print("w exponent:", (1.0 - alpha) * (p - 1.0))

mh = C.main_integral_condition(uex, wex, idx)
print("MH:", mh.value, mh.holds, mh.converged, mh.refinement_delta, mh.series)
assert abs(mh.value - 50.37867) / 50.37867 < 1e-3, mh

for fn, name in [
    (lambda: C.halfpower_tail_ratio(uex, idx), "T1c"),
    (lambda: C.averaging_class_condition(uex, idx), "T1d"),
    (lambda: C.monotone_tilt_condition(uex, idx), "T1e"),
    (lambda: C.halfpower_tail_ratio_dual(wex, idx), "T1f"),
    (lambda: C.averaging_class_condition_dual(wex, idx), "T1g"),
    (lambda: C.monotone_tilt_condition_dual(wex, idx), "T1h"),
    (lambda: C.halfpower_integral_condition(uex, wex, idx), "BHJH"),
    (lambda: C.partition_sum_condition(uex, wex, idx), "SEQ"),
    (lambda: C.tail_average_condition(uex, wex, idx), "NH"),
]:
    cv = fn()
    print(f"{name}: value={cv.value} holds={cv.holds} [{cv.diagnostic}]")
    assert not cv.holds, cv

v = C.decide(uex, wex, p, q)
print("verdict:", v.guarantee, v.route, v.note, [c.cond_id for c in v.conditions],
      [c.cond_id for c in v.satisfied])
assert v.guarantee == "UNKNOWN" and v.route is None
assert v.conditions[0].cond_id == "MH" and v.conditions[0].holds

# 6) decide on a guaranteed case: q >= 2, q < p: u compact, w = t
u6 = Weight(grid=np.array([0.5]), values=np.array([1.0]), head_exp=0.0, tail_exp=0.0, zero_beyond=1.0)
w6 = Weight.from_power(1.0, 1.0)
v = C.decide(u6, w6, 3.0, 2.0)
print("verdict easy:", v.guarantee, v.route, [(c.cond_id, round(c.value, 4)) for c in v.conditions])
assert v.guarantee == "GUARANTEED" and v.route == "MH"

# 7) INAPPLICABLE
v = C.decide(u6, w6, 1.0, 2.0)
print("verdict inapplicable:", v.guarantee, v.note)
assert v.guarantee == "INAPPLICABLE"

# 8) duality of BH0: swap u -> w^(1-p'), w -> u^(1-q'), p -> q', q -> p'
up = Weight.from_function(lambda t: (1.0 + t) ** -2.0, 1e-6, 1e6, 24, head_exp=0.0, tail_exp=-2.0)
wp = Weight.from_power(1.0, 0.8)
ix = Indices(2.5, 1.8)
a = C.main_sup_condition(up, wp, ix)
u_dual = wp.power_transform(1.0 - ix.p_prime)
w_dual = up.power_transform(1.0 - ix.q_prime)
b = C.main_sup_condition(u_dual, w_dual, Indices(ix.q_prime, ix.p_prime))
print("BH0 duality:", a.value, b.value)
assert abs(a.value - b.value) / max(a.value, 1e-300) < 1e-3, (a.value, b.value)

# 9) SEQ numeric finite case: u compact, w = t, q=1 p=3
iseq = Indices(3.0, 1.0)
cv = C.partition_sum_condition(u6, w6, iseq)
print("SEQ finite:", cv.value, cv.holds, cv.converged, cv.series, cv.diagnostic)
assert math.isfinite(cv.value) and cv.value > 0.0, cv

# 10) NH numeric finite case: u ~ (1+t)^-3, w = t^5, p=6, q=1.5
inh = Indices(6.0, 1.5)
wnh = Weight.from_power(1.0, 5.0)
cv = C.tail_average_condition(udec, wnh, inh)
print("NH finite:", cv.value, cv.holds, cv.converged, cv.refinement_delta, cv.diagnostic)
assert math.isfinite(cv.value) and cv.value > 0.0 and cv.holds, cv

# 11a) S1LEVEL: u = chi_(0,1), w = 1, p = 1.2, q = 2: D(x) = 6 x^0.2 and
# R(x) = min(1, 1/x), so the sup is 6^(-1/1.2) at x = 1
cv = C.two_point_sup_condition(u1, w1, 1.2, 2.0)
print("S1LEVEL:", cv.value, "expected:", 6.0 ** (-1.0 / 1.2), cv.holds)
assert abs(cv.value - 6.0 ** (-1.0 / 1.2)) < 2e-3, cv
# 11b) p = 1 exactly: the full-power tail integral of w = 1 log-diverges,
# the right factor is infinite everywhere and the condition is vacuous
cv = C.two_point_sup_condition(u1, w1, 1.0, 2.0)
print("S1LEVEL vacuous:", cv.value, cv.holds, cv.diagnostic)
assert cv.value == 0.0 and cv.holds
# 11c) p < 1 with integrable w: D(x) ~ x^p near 0, the sup escapes to 0
wdecay = Weight.from_function(lambda t: (1.0 + t) ** -2.0, 1e-6, 1e6, 16, head_exp=0.0, tail_exp=-2.0)
cv = C.two_point_sup_condition(u1, wdecay, 0.8, 2.0)
print("S1LEVEL p<1 divergent:", cv.value, cv.holds, cv.diagnostic)
assert math.isinf(cv.value) and not cv.holds, cv
# 11d) p < 1 finite: w = t^(-0.3) balances both ends
cv = C.two_point_sup_condition(u1, Weight.from_power(1.0, -0.3), 0.8, 2.0)
print("S1LEVEL p<1 finite:", cv.value, cv.holds)
assert math.isfinite(cv.value) and cv.value > 0.0 and cv.holds, cv

# 12) FS on the torus counterexample weights
K0 = 64
useq = SequenceWeight(np.arange(1, K0 + 1, dtype=float) ** (beta - 1.0), tail_exp=beta - 1.0)
wtor = Weight(grid=np.array([0.5]), values=np.array([0.5 ** ((1.0 - alpha) * (p - 1.0))]),
              head_exp=(1.0 - alpha) * (p - 1.0), tail_exp=(1.0 - alpha) * (p - 1.0),
              inf_beyond=1.0)
cv = C.series_condition(useq, wtor, idx)
print("FS:", cv.value, cv.holds, cv.converged, cv.refinement_delta, len(cv.series))
assert math.isfinite(cv.value) and cv.value > 0.0 and cv.converged, cv

# 13) comparison functionals on a q>=2 pair
cf = C.comparison_functionals(u6, w6, Indices(3.0, 2.0))
print("T4 keys (p>q):", sorted(cf))
assert sorted(cf) == ["T4ii"]
print("T4ii:", cf["T4ii"].value, cf["T4ii"].holds)
cf = C.comparison_functionals(u6, w6, Indices(2.0, 2.5))
print("T4 keys (p<=q, q>=2):", sorted(cf))
assert sorted(cf) == ["T4i"]
cf = C.comparison_functionals(up, wp, Indices(1.5, 1.8))
print("T4 keys (p<=q<2):", sorted(cf))
assert sorted(cf) == ["T4iii"]
cf = C.comparison_functionals(up, wp, Indices(1.9, 1.4))
print("T4 keys (1<q<p<=2):", sorted(cf))
assert sorted(cf) == ["T4iv"]

print("ALL CONDITIONS SMOKE OK")
