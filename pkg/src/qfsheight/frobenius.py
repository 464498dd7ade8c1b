"""Frobenius basis decomposition of F_*S and the dual functionals u_e.

Over F_p every polynomial splits uniquely as a = sum_e a_e^p x^e with
e in {0..p-1}^N. ``u_top`` picks out the component at e = (p-1, ..., p-1).
"""

from __future__ import annotations

from collections import defaultdict
from itertools import product
from typing import Iterator, Mapping, Sequence

from .polyring import Exps, PolyError, SparsePoly


def _require_field(a: SparsePoly) -> None:
    if a.ring.modulus.e != 1:
        raise PolyError("Frobenius components are defined for polynomials over F_p")


def component_indices(p: int, n: int) -> Iterator[Exps]:
    return product(range(p), repeat=n)


def component(a: SparsePoly, e: Sequence[int]) -> SparsePoly:
    _require_field(a)
    p = a.ring.p
    e = tuple(e)
    if len(e) != a.ring.nvars or any(not 0 <= x < p for x in e):
        raise PolyError(f"component index {e} out of range for p={p}")
    out = {}
    for k, c in a.terms.items():
        if all((x - y) % p == 0 for x, y in zip(k, e)):
            out[tuple((x - y) // p for x, y in zip(k, e))] = c
    return SparsePoly(a.ring, out, _clean=True)


def decompose(a: SparsePoly) -> dict[Exps, SparsePoly]:
    """All nonzero components, keyed by index."""
    _require_field(a)
    p = a.ring.p
    buckets: dict[Exps, dict[Exps, int]] = defaultdict(dict)
    for k, c in a.terms.items():
        e = tuple(x % p for x in k)
        buckets[e][tuple(x // p for x in k)] = c
    return {e: SparsePoly(a.ring, t, _clean=True) for e, t in buckets.items()}


def reassemble(components: Mapping[Sequence[int], SparsePoly]) -> SparsePoly:
    it = iter(components.items())
    try:
        e, first = next(it)
    except StopIteration as exc:
        raise PolyError("reassemble needs at least one component") from exc
    ring = first.ring
    total = first.frobenius().mul_monomial(tuple(e))
    for e, c in it:
        total = total + c.frobenius().mul_monomial(tuple(e))
    return total


def u_top(a: SparsePoly) -> SparsePoly:
    """Component at (p-1, ..., p-1)."""
    _require_field(a)
    p = a.ring.p
    t = p - 1
    out = {}
    for k, c in a.terms.items():
        if all(x % p == t for x in k):
            out[tuple(x // p for x in k)] = c
    return SparsePoly(a.ring, out, _clean=True)


def u_top_iter(a: SparsePoly, l: int) -> SparsePoly:
    for _ in range(l):
        if not a:
            break
        a = u_top(a)
    return a


def in_ker_u(a: SparsePoly) -> bool:
    p = a.ring.p
    t = p - 1
    return not any(all(x % p == t for x in k) for k in a.terms)


def is_special(k: Exps, p: int) -> bool:
    """Exponent vector congruent to (p-1, ..., p-1): the support of u."""
    t = p - 1
    return all(x % p == t for x in k)


def u_top_of_product(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    """u_top(a*b) without forming the full product.

    Terms are bucketed by exponent residues mod p so only pairs landing on
    the special residue class are multiplied.
    """
    _require_field(a)
    if not a or not b:
        return a.ring.zero()
    if len(a) > len(b):
        a, b = b, a
    p = a.ring.p
    q = p
    t = p - 1
    buckets: dict[Exps, list[tuple[Exps, int]]] = defaultdict(list)
    for k, c in b.terms.items():
        buckets[tuple(x % p for x in k)].append((k, c))
    acc: dict[Exps, int] = {}
    for ka, ca in a.terms.items():
        need = tuple((t - x) % p for x in ka)
        for kb, cb in buckets.get(need, ()):
            key = tuple((x + y) // p for x, y in zip(ka, kb))
            acc[key] = (acc.get(key, 0) + ca * cb) % q
    return SparsePoly(a.ring, {k: c for k, c in acc.items() if c}, _clean=True)


def normal_form_mod_frobenius(a: SparsePoly) -> SparsePoly:
    """Representative modulo F(S): drop terms whose exponents are all divisible by p."""
    _require_field(a)
    p = a.ring.p
    return SparsePoly(a.ring, {k: c for k, c in a.terms.items() if any(x % p for x in k)}, _clean=True)


def equal_mod_frobenius(a: SparsePoly, b: SparsePoly) -> bool:
    return normal_form_mod_frobenius(a - b).is_zero()


def is_pth_power(a: SparsePoly) -> bool:
    return normal_form_mod_frobenius(a).is_zero()
