"""Leading power behavior of positive functions near 0 or +infinity.

An :class:`Asym` records ``f(x) ~ coef * x**exp * L(x)**logp`` near one end of
the half line, where ``L(x) = |log x|``.  Only the exponent structure is
guaranteed exact (it is derived from head/tail exponents of piecewise-power
weights); coefficients are best effort and are used qualitatively
(zero / finite / infinite) plus for tie-breaking in sums.

Conventions:
  * ``coef == 0``   -- the function vanishes identically near that end.
  * ``coef == inf`` -- the function is identically infinite near that end
                       (for example beyond an infinite-value cutoff), or a
                       quantity that is infinite for every argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf

AT_ZERO = 0
AT_INF = 1


@dataclass(frozen=True)
class Asym:
    coef: float
    exp: float = 0.0
    logp: float = 0.0

    def is_zero(self):
        return self.coef == 0.0

    def is_infinite(self):
        return self.coef == INF


ZERO = Asym(0.0)
INFINITE = Asym(INF)


def mul(a: Asym, b: Asym) -> Asym:
    if a.is_zero() or b.is_zero():
        return ZERO
    if a.is_infinite() or b.is_infinite():
        return INFINITE
    return Asym(a.coef * b.coef, a.exp + b.exp, a.logp + b.logp)


def power(a: Asym, e: float) -> Asym:
    if e == 0.0:
        return Asym(1.0)
    if a.is_zero():
        return INFINITE if e < 0 else ZERO
    if a.is_infinite():
        return ZERO if e < 0 else INFINITE
    return Asym(a.coef**e, a.exp * e, a.logp * e)


def add(a: Asym, b: Asym, end: int) -> Asym:
    """Dominant term of a + b near the given end (both non-negative)."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.is_infinite() or b.is_infinite():
        return INFINITE
    if a.exp != b.exp:
        if end == AT_ZERO:
            return a if a.exp < b.exp else b
        return a if a.exp > b.exp else b
    if a.logp != b.logp:
        return a if a.logp > b.logp else b
    return Asym(a.coef + b.coef, a.exp, a.logp)


def limit(a: Asym, end: int) -> float:
    """Pointwise limit of the function at the end (0, finite, or +inf)."""
    if a.is_zero():
        return 0.0
    if a.is_infinite():
        return INF
    if end == AT_ZERO:
        if a.exp > 0:
            return 0.0
        if a.exp < 0:
            return INF
    else:
        if a.exp < 0:
            return 0.0
        if a.exp > 0:
            return INF
    # exp == 0: the log factor decides
    if a.logp > 0:
        return INF
    if a.logp < 0:
        return 0.0
    return a.coef


def integral_diverges(a: Asym, end: int) -> bool:
    """Whether the integral of the function diverges at the given end.

    Near 0 the integral of x**e * L**l converges iff e > -1, or e == -1 with
    l < -1; symmetrically near infinity with e < -1.
    """
    if a.is_zero():
        return False
    if a.is_infinite():
        return True
    if end == AT_ZERO:
        if a.exp > -1.0:
            return False
        if a.exp < -1.0:
            return True
    else:
        if a.exp < -1.0:
            return False
        if a.exp > -1.0:
            return True
    return a.logp >= -1.0
