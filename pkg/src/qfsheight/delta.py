"""Production Delta_1 over F_p via the mod-p^2 lift identity.

For a = sum c_i M_i over F_p, let L be the termwise lift to Z/p^2 and
P = sum (lift c_i)^p M_i^p. Then L^p - P is divisible by p and
(L^p - P)/p mod p represents Delta_1(a) modulo p-th powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import factorial

from .polyring import Grading, PolyError, SparsePoly, lift_terms, power


class DeltaDivisibilityError(ArithmeticError):
    """L^p - P had a coefficient not divisible by p (cannot happen for valid input)."""


@dataclass(frozen=True)
class DeltaRepresentative:
    value: SparsePoly
    homogeneous_degree: tuple[int, ...] | None = None


def _delta1_value(a: SparsePoly) -> SparsePoly:
    if a.ring.modulus.e != 1:
        raise PolyError("delta1 expects a polynomial over F_p")
    p = a.ring.p
    if len(a) <= 1:
        return a.ring.zero()
    lifted = lift_terms(a, 2)
    lp = power(lifted, p)
    q = p * p
    diff = dict(lp.terms)
    for k, c in a.terms.items():
        kk = tuple(x * p for x in k)
        diff[kk] = (diff.get(kk, 0) - pow(c, p, q)) % q
    out = {}
    for k, c in diff.items():
        if c % p:
            raise DeltaDivisibilityError(f"coefficient {c} at {k} not divisible by {p}")
        c //= p
        if c:
            out[k] = c
    return SparsePoly(a.ring, out, _clean=True)


def delta1(a: SparsePoly, grading: Grading | None = None) -> DeltaRepresentative:
    value = _delta1_value(a)
    deg = None
    if grading is not None:
        d = grading.degree(a)
        if isinstance(d, tuple):
            deg = tuple(a.ring.p * x for x in d)
    return DeltaRepresentative(value, deg)


def _compositions(total: int, parts: int, cap: int):
    """Tuples of ``parts`` integers in [0, cap] summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap), -1, -1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def _composition_count(total: int, parts: int, cap: int) -> int:
    row = [1] + [0] * total
    for _ in range(parts):
        new = [0] * (total + 1)
        for s, v in enumerate(row):
            if v:
                for x in range(min(cap, total - s) + 1):
                    new[s + x] += v
        row = new
    return row[total]


MULTINOMIAL_GUARD = 10**6


def delta1_multinomial(a: SparsePoly) -> DeltaRepresentative:
    """Delta_1 from the explicit multinomial sum over compositions of p."""
    if a.ring.modulus.e != 1:
        raise PolyError("delta1_multinomial expects a polynomial over F_p")
    p = a.ring.p
    terms = a.sorted_terms()
    m = len(terms)
    if _composition_count(p, m, p - 1) > MULTINOMIAL_GUARD:
        raise PolyError(f"too many compositions for {m} terms at p={p}")
    out: dict[tuple[int, ...], int] = {}
    fp = factorial(p)
    n = a.ring.nvars
    for alpha in _compositions(p, m, p - 1):
        coeff = fp
        for x in alpha:
            coeff //= factorial(x)
        coeff = (coeff // p) % p
        if not coeff:
            continue
        exps = [0] * n
        for (k, c), x in zip(terms, alpha):
            if x:
                coeff = coeff * pow(c, x, p) % p
                for i in range(n):
                    exps[i] += x * k[i]
        key = tuple(exps)
        out[key] = (out.get(key, 0) + coeff) % p
    return DeltaRepresentative(SparsePoly(a.ring, out))


def delta_n_rep(a: SparsePoly, n: int, grading: Grading | None = None) -> DeltaRepresentative:
    """Representative a^(p^n - p) * Delta_1(a) of Delta_n(a)."""
    if n < 1:
        raise PolyError("delta_n_rep needs n >= 1")
    base = delta1(a, grading)
    if n == 1:
        return base
    p = a.ring.p
    value = power(a, p**n - p) * base.value
    deg = None
    if base.homogeneous_degree is not None:
        deg = tuple(x * p ** (n - 1) for x in base.homogeneous_degree)
    return DeltaRepresentative(value, deg)
