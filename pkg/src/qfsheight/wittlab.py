"""Truncated Witt vectors W_n(S) over S = F_p[x], computed through ghost components.

Entries are lifted to Z/p^(2n), ghost vectors are combined, and the result is
back-solved one component at a time with an exact divisibility check. This
is the slow reference implementation that the production Delta code is
tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .frobenius import normal_form_mod_frobenius
from .polyring import PolyError, PolyRing, SparsePoly, lift_terms, power

ORACLE_TERM_GUARD = 64


class WittPrecisionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class WittVector:
    entries: tuple[SparsePoly, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise PolyError("Witt vectors need length >= 1")
        ring = self.entries[0].ring
        if ring.modulus.e != 1:
            raise PolyError("Witt vector entries must live over F_p")
        if any(x.ring != ring for x in self.entries):
            raise PolyError("Witt vector entries must share one ring")

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def ring(self) -> PolyRing:
        return self.entries[0].ring

    @property
    def p(self) -> int:
        return self.ring.p

    def __getitem__(self, i: int) -> SparsePoly:
        return self.entries[i]

    def __add__(self, other: "WittVector") -> "WittVector":
        return witt_add(self, other)

    def __sub__(self, other: "WittVector") -> "WittVector":
        return witt_sub(self, other)

    def __mul__(self, other: "WittVector") -> "WittVector":
        return witt_mul(self, other)

    def __neg__(self) -> "WittVector":
        return witt_neg(self)


def _lift_ring(ring: PolyRing, n: int) -> PolyRing:
    return ring.with_precision(2 * n)


def ghost(alpha: WittVector) -> list[SparsePoly]:
    """Ghost components phi_m = sum_i p^i X_i^(p^(m-i)) over Z/p^(2n)."""
    n, p = alpha.n, alpha.p
    lifts = [lift_terms(x, 2 * n) for x in alpha.entries]
    out = []
    for m in range(n):
        total = _lift_ring(alpha.ring, n).zero()
        for i in range(m + 1):
            total = total + power(lifts[i], p ** (m - i)).scale(p**i)
        out.append(total)
    return out


def from_ghost(ghosts: Sequence[SparsePoly], ring: PolyRing) -> WittVector:
    """Back-solve s_m = (ghost_m - sum_{i<m} p^i s_i^(p^(m-i))) / p^m, reducing each s_m mod p."""
    p = ring.p
    n = len(ghosts)
    e = 2 * n
    comps: list[SparsePoly] = []
    pow_cache: list[list[SparsePoly]] = []
    for m, g in enumerate(ghosts):
        acc = g
        for i in range(m):
            cache = pow_cache[i]
            while len(cache) <= m - i:
                cache.append(power(cache[-1], p))
            acc = acc - cache[m - i].scale(p**i)
        pm = p**m
        out = {}
        for k, c in acc.terms.items():
            if c % pm:
                raise WittPrecisionError(f"ghost component {m} not divisible by p^{m} at {k}")
            c = (c // pm) % p
            if c:
                out[k] = c
        s = SparsePoly(ring, out, _clean=True)
        comps.append(s)
        pow_cache.append([lift_terms(s, e)])
    return WittVector(tuple(comps))


def _combine(alpha: WittVector, beta: WittVector, op: Callable[[SparsePoly, SparsePoly], SparsePoly]) -> WittVector:
    if alpha.n != beta.n or alpha.ring != beta.ring:
        raise PolyError("Witt vectors must have equal length and ring")
    ga, gb = ghost(alpha), ghost(beta)
    return from_ghost([op(x, y) for x, y in zip(ga, gb)], alpha.ring)


def witt_add(alpha: WittVector, beta: WittVector) -> WittVector:
    return _combine(alpha, beta, lambda x, y: x + y)


def witt_sub(alpha: WittVector, beta: WittVector) -> WittVector:
    return _combine(alpha, beta, lambda x, y: x - y)


def witt_mul(alpha: WittVector, beta: WittVector) -> WittVector:
    return _combine(alpha, beta, lambda x, y: x * y)


def witt_neg(alpha: WittVector) -> WittVector:
    return from_ghost([-g for g in ghost(alpha)], alpha.ring)


def witt_scalar(alpha: WittVector, k: int) -> WittVector:
    """k * alpha for an integer k."""
    return from_ghost([g.scale(k) for g in ghost(alpha)], alpha.ring)


def witt_zero(ring: PolyRing, n: int) -> WittVector:
    return WittVector((ring.zero(),) * n)


def teichmuller(a: SparsePoly, n: int) -> WittVector:
    return WittVector((a,) + (a.ring.zero(),) * (n - 1))


def V(alpha: WittVector) -> WittVector:
    """Verschiebung, truncated to the same length."""
    return WittVector((alpha.ring.zero(),) + alpha.entries[:-1])


def F(alpha: WittVector) -> WittVector:
    """Frobenius: componentwise p-th power."""
    return WittVector(tuple(x.frobenius() for x in alpha.entries))


def R(alpha: WittVector) -> WittVector:
    """Restriction W_n -> W_{n-1}."""
    if alpha.n < 2:
        raise PolyError("cannot restrict a length-1 Witt vector")
    return WittVector(alpha.entries[:-1])


# -- the Delta calculus ---------------------------------------------------


def _sub_teichmuller_terms(alpha: WittVector, guard: int | None = None) -> WittVector:
    """alpha - sum_i [c_i M_i] over the term decomposition of alpha_0."""
    a0 = alpha[0]
    if guard is not None and len(a0) > guard:
        raise PolyError(f"oracle guard: {len(a0)} terms exceeds {ORACLE_TERM_GUARD}")
    n, p = alpha.n, alpha.p
    lring = _lift_ring(alpha.ring, n)
    ghosts = ghost(alpha)
    out = []
    for m, g in enumerate(ghosts):
        pm = p**m
        q = lring.modulus.q
        tele = {tuple(x * pm for x in k): pow(c, pm, q) for k, c in a0.terms.items()}
        out.append(g - SparsePoly(lring, tele))
    return from_ghost(out, alpha.ring)


def delta_witt(alpha: WittVector, guard: int | None = None) -> WittVector:
    """The Witt-level Delta: the length n-1 vector beta with alpha - V(beta) a sum of Teichmuller p-monomials."""
    if alpha.n < 2:
        raise PolyError("Delta of a length-1 Witt vector is empty")
    gamma = _sub_teichmuller_terms(alpha, guard)
    if not gamma[0].is_zero():
        raise WittPrecisionError("0-th component did not cancel")
    return WittVector(gamma.entries[1:])


def small_deltas(a: SparsePoly, n: int) -> list[SparsePoly]:
    """[delta_1(a), ..., delta_n(a)] from [a] - sum [c_i M_i] = V(delta_1, delta_2, ...)."""
    beta = delta_witt(teichmuller(a, n + 1), ORACLE_TERM_GUARD)
    return [normal_form_mod_frobenius(x) for x in beta.entries]


def delta_oracle(a: SparsePoly, r: int, kind: str = "Delta") -> SparsePoly:
    """Representative mod F(S) of Delta_r(a) (kind="Delta") or delta_r(a) (kind="delta")."""
    if r < 1:
        raise PolyError("r must be >= 1")
    if kind == "delta":
        return small_deltas(a, r)[r - 1]
    if kind != "Delta":
        raise PolyError(f"unknown kind {kind!r}")
    alpha = delta_witt(teichmuller(a, r + 1), ORACLE_TERM_GUARD)
    for _ in range(r - 1):
        alpha = delta_witt(alpha)
    return normal_form_mod_frobenius(alpha[0])


def Delta_r(a: SparsePoly, r: int) -> SparsePoly:
    """Delta_r with the convention Delta_0 = identity."""
    if r == 0:
        return a
    return delta_oracle(a, r)


def sigma_n(w: WittVector) -> SparsePoly:
    """sigma_n(a_0, ..., a_{n-1}) = Delta_{n-1}(a_0) + ... + a_{n-1} mod F(S)."""
    n = w.n
    if n > 4:
        raise PolyError("sigma_n oracle is limited to n <= 4")
    total = w.ring.zero()
    for i, a in enumerate(w.entries):
        total = total + Delta_r(a, n - 1 - i)
    return normal_form_mod_frobenius(total)
