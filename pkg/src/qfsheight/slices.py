"""Monomial enumeration and small helpers shared by the ideal-chain engines."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .frobenius import is_special
from .polyring import Exps, Grading, SparsePoly


@lru_cache(maxsize=None)
def monomials_of_total_degree(n: int, d: int) -> tuple[Exps, ...]:
    if d < 0:
        return ()
    if n == 0:
        return ((),) if d == 0 else ()
    if n == 1:
        return ((d,),)
    out = []
    for a in range(d, -1, -1):
        for rest in monomials_of_total_degree(n - 1, d - a):
            out.append((a,) + rest)
    return tuple(out)


def monomials_up_to(n: int, d: int) -> list[Exps]:
    out: list[Exps] = []
    for k in range(d + 1):
        out.extend(monomials_of_total_degree(n, k))
    return out


@lru_cache(maxsize=None)
def _weighted(weights: tuple[int, ...], d: int) -> tuple[Exps, ...]:
    if d < 0:
        return ()
    if not weights:
        return ((),) if d == 0 else ()
    w = weights[0]
    out = []
    for a in range(d // w, -1, -1):
        for rest in _weighted(weights[1:], d - a * w):
            out.append((a,) + rest)
    return tuple(out)


def monomials_of_degree(grading: Grading, deg: tuple[int, ...]) -> tuple[Exps, ...]:
    """All monomials of multidegree ``deg``."""
    if any(x < 0 for x in deg):
        return ()
    cands = _weighted(grading.scalar_weights, sum(deg))
    if grading.m == 1:
        return cands
    return tuple(k for k in cands if grading.monomial_degree(k) == tuple(deg))


def small_monomials(n: int, p: int):
    """Exponent vectors with all entries in [0, p-1]."""
    return product(range(p), repeat=n)


def escapes(a: SparsePoly) -> bool:
    """a is not in m^[p]."""
    return not a.in_bracket_power(a.ring.p)


def ker_key(k: Exps, p: int) -> tuple:
    """Column key placing the support of u first, so ker u is read off lead columns."""
    return (0 if is_special(k, p) else 1, k)


def poly_to_keyed(a: SparsePoly) -> dict:
    p = a.ring.p
    return {ker_key(k, p): c for k, c in a.terms.items()}


def keyed_to_poly(ring, vec: dict) -> SparsePoly:
    return SparsePoly(ring, {k[1]: c for k, c in vec.items()}, _clean=True)


def vec_sub(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def vec_add(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))
