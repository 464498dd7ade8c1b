"""Height engine for Calabi-Yau hypersurfaces (homogeneous f with deg f = mu).

The orbit g_1 = f^(p-1), g_{i+1} = theta(g_i) lives in the finite F_p-space of
forms of degree (p-1)*mu. The height is the first n with u(g_n) != 0. If the
orbit becomes linearly dependent on its earlier members while every u-image
is still zero, the span is theta-stable and killed by u, so the height is
infinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .delta import delta1
from .frobenius import u_top, u_top_of_product
from .linalg import Echelon
from .polyring import Grading, PolyError, PolyRing, SparsePoly, power

FINITE = "finite"
INFINITE = "infinite"
LOWER_BOUND = "lower_bound"


class ThetaOperator:
    """theta(a) = u(Delta_1(f^(p-1)) * a).

    By default the representative -f^(p(p-2)) * Delta_1(f) of Delta_1(f^(p-1))
    is used in factored form: theta(a) = -f^(p-2) * u(Delta_1(f) * a). Any two
    representatives agree on ker u. ``direct=True`` instead expands
    Delta_1(f^(p-1)) from the mod-p^2 lift.
    """

    def __init__(self, f: SparsePoly, grading: Grading | None = None, direct: bool = False):
        if f.ring.modulus.e != 1:
            raise PolyError("theta expects f over F_p; other coefficient fields reduce to F_p by base change")
        self.f = f
        self.grading = grading
        self.direct = direct
        p = f.ring.p
        self.p = p
        self.delta_f = delta1(f).value
        self.scale = -power(f, p - 2)

    @cached_property
    def delta_rep(self) -> SparsePoly:
        """A representative of Delta_1(f^(p-1))."""
        if self.direct:
            return delta1(power(self.f, self.p - 1)).value
        return self.scale.frobenius() * self.delta_f

    def __call__(self, a: SparsePoly) -> SparsePoly:
        if not a:
            return a
        if self.direct:
            return u_top_of_product(self.delta_rep, a)
        inner = u_top_of_product(self.delta_f, a)
        if not inner:
            return inner
        return self.scale * inner


def theta(op: ThetaOperator, a: SparsePoly) -> SparsePoly:
    return op(a)


@dataclass
class CYHeightResult:
    verdict: str
    height: int | None
    chain: list[SparsePoly]
    cycle_start: int | None = None
    cycle_len: int | None = None
    relation: dict[int, int] | None = None
    max_iter: int | None = None
    p: int = 0
    f: SparsePoly | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def is_finite(self) -> bool:
        return self.verdict == FINITE

    @property
    def is_infinite(self) -> bool:
        return self.verdict == INFINITE

    def label(self) -> str:
        if self.verdict == FINITE:
            return f"Finite({self.height})"
        if self.verdict == INFINITE:
            return "Infinite"
        return f"LowerBoundAtCap({len(self.chain) + 1}, max_iter={self.max_iter})"


def check_cy_input(f: SparsePoly, grading: Grading) -> None:
    if f.ring.modulus.e != 1:
        raise PolyError("coefficients must lie in F_p (extensions reduce to F_p by base change)")
    if f.is_zero():
        raise PolyError("f is zero")
    d = grading.degree(f)
    if not isinstance(d, tuple):
        raise PolyError("f is not homogeneous for the given grading")
    if d != grading.mu:
        raise PolyError(f"deg f = {d} differs from mu = {grading.mu}; use the complete-intersection engine")


def _as_vec(a: SparsePoly) -> dict:
    return dict(a.terms)


def cy_height(
    f: SparsePoly,
    grading: Grading | None = None,
    max_iter: int | None = None,
    op: ThetaOperator | None = None,
) -> CYHeightResult:
    grading = grading or Grading.standard(f.ring.nvars)
    check_cy_input(f, grading)
    p = f.ring.p
    op = op or ThetaOperator(f, grading)
    g = power(f, p - 1)
    chain: list[SparsePoly] = []
    seen: dict[SparsePoly, int] = {}
    span = Echelon(p, track=True)
    i = 0
    while True:
        i += 1
        chain.append(g)
        if u_top(g):
            return CYHeightResult(FINITE, i, chain, p=p, f=f)
        if g in seen:
            j = seen[g]
            return CYHeightResult(INFINITE, None, chain, cycle_start=j, cycle_len=i - j, p=p, f=f)
        if g.is_zero():
            chain.append(g)
            return CYHeightResult(INFINITE, None, chain, cycle_start=i, cycle_len=1, p=p, f=f)
        rel = span.express(_as_vec(g))
        if rel is not None:
            return CYHeightResult(INFINITE, None, chain, relation=rel, p=p, f=f)
        seen[g] = i
        span.add(_as_vec(g), {i: 1})
        if max_iter is not None and i >= max_iter:
            return CYHeightResult(LOWER_BOUND, None, chain, max_iter=max_iter, p=p, f=f)
        g = op(g)


def cy_height_fn_oracle(f: SparsePoly, grading: Grading | None = None, n_max: int = 3) -> list[bool]:
    """For n <= n_max: is the coefficient of (x_1...x_N)^(p^n - 1) in
    f_n = f^(p-1) * Delta_1(f^(p-1))^(1 + p + ... + p^(n-2)) nonzero?

    Uses the expanded representative of Delta_1(f^(p-1)) and reduces modulo
    m^[p^n] throughout.
    """
    if n_max > 5:
        raise PolyError("n_max is limited to 5")
    grading = grading or Grading.standard(f.ring.nvars)
    check_cy_input(f, grading)
    p = f.ring.p
    nv = f.ring.nvars
    g1 = power(f, p - 1)
    d = delta1(g1).value
    out = []
    for n in range(1, n_max + 1):
        q = p**n
        acc = g1.truncate_bracket(q)
        for k in range(n - 1):
            factor = d.truncate_bracket(p ** (n - k)).frobenius(k).truncate_bracket(q)
            acc = acc.mul_truncated(factor, q)
        out.append(acc.coefficient((q - 1,) * nv) != 0)
    return out


def fermat_height(N: int, p: int) -> int | None:
    """1 if p = 1 mod N, else None (infinite), for N >= 4."""
    if N < 4:
        raise PolyError("the Fermat rule is stated for N >= 4")
    return 1 if p % N == 1 else None


def fermat_poly(N: int, p: int, names: Sequence[str] | None = None) -> SparsePoly:
    names = names or [f"x{i}" for i in range(N)]
    ring = PolyRing.make(names, p)
    return SparsePoly(ring, {tuple(N if j == i else 0 for j in range(N)): 1 for i in range(N)})


def unbounded_family_p2(h: int) -> SparsePoly:
    """a^N+b^N+c^N+x_1^N+...+x_{N-3}^N+(b+c)g over F_2 with N = 2^h + 1."""
    if h < 1:
        raise PolyError("h must be >= 1")
    N = 2**h + 1
    names = ["a", "b", "c"] + [f"x{i}" for i in range(1, N - 2)]
    ring = PolyRing.make(names, 2)
    nv = len(names)

    def mono(**pos: int) -> tuple[int, ...]:
        e = [0] * nv
        for k, v in pos.items():
            e[names.index(k)] = v
        return tuple(e)

    terms = {mono(**{n: N}): 1 for n in names}
    f = SparsePoly(ring, terms)
    if h == 1:
        return f
    g_terms = {}
    e = [0] * nv
    e[2] = 2
    for i in range(1, N - 2):
        e[2 + i] = 1
    g_terms[tuple(e)] = 1
    # block i holds 2^(h-i) variables raised to 2^i, so every term has degree 2^h
    bounds = [N - 2]
    for i in range(1, h):
        bounds.append(bounds[-1] - 2 ** (h - i))
    for i in range(1, h):
        lo, hi = bounds[i], bounds[i - 1] - 1
        e = [0] * nv
        for j in range(lo, hi + 1):
            e[2 + j] = 2**i
        g_terms[tuple(e)] = 1
    g = SparsePoly(ring, g_terms)
    return f + (ring.var("b") + ring.var("c")) * g
