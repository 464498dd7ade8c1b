"""Fedder-type height engine for complete intersections.

The chain is I_1 = (f^(p-1)) + I^[p] with f the product of the generators, and
I_{n+1} = theta(I_n cap ker u) + I_1. The height is the first n with
I_n not contained in m^[p].

Graded mode works degree by degree. theta sends degree d(e) to e, where
d(e) = p*e + (p-1)*mu - p*(p-1)*deg f, so the degrees needed to test escape
form a set closed under e -> d(e). When that set fits under the cap every
slice is computed exactly, and a chain that stops growing proves height
infinity.

Local mode keeps truncated spans of monomial multiples up to a total-degree
cap and deepens the cap gradually. Whatever it finds is a genuine certificate.
For hypersurfaces, the missing lower bound is certified separately by
checking f_l in m^[p^l], where f_l = f^(p-1) * D^(1+p+...+p^(l-2)) and D
represents Delta_1(f^(p-1)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

from .delta import delta1
from .frobenius import in_ker_u, u_top
from .linalg import Echelon
from .polyring import INHOMOGENEOUS, Exps, Grading, PolyError, SparsePoly, power
from .qfs_cy import ThetaOperator
from .slices import (
    escapes,
    keyed_to_poly,
    monomials_of_degree,
    monomials_of_total_degree,
    poly_to_keyed,
    small_monomials,
    vec_add,
    vec_sub,
)

GRADED = "graded"
LOCAL = "local"

EXACT = "exact"
LOWER_BOUND = "lower_bound"
INFINITE_BY_CHECK = "infinite_by_check"

DEFAULT_MAX_LEVEL = 40
# largest p^l for which the f_l test is tried before deepening
LOWER_BOUND_SHORTCUT = 4096


class CapError(PolyError):
    """The degree cap cannot hold the generators of I_1."""


@dataclass
class CIInput:
    gens: list[SparsePoly]
    grading: Grading
    mode: str
    degree_cap: int
    regular_hint: bool = True

    @property
    def p(self) -> int:
        return self.gens[0].ring.p

    @property
    def ring(self):
        return self.gens[0].ring

    @property
    def f(self) -> SparsePoly:
        return reduce(lambda a, b: a * b, self.gens)

    @classmethod
    def build(
        cls,
        gens: Sequence[SparsePoly],
        grading: Grading | None = None,
        mode: str = "auto",
        degree_cap: int | None = None,
    ) -> "CIInput":
        gens = list(gens)
        if not gens:
            raise PolyError("need at least one generator")
        ring = gens[0].ring
        if ring.modulus.e != 1:
            raise PolyError("generators must be over F_p")
        if any(g.ring != ring for g in gens):
            raise PolyError("generators must share one ring")
        if any(g.is_zero() for g in gens):
            raise PolyError("zero generator")
        grading = grading or Grading.standard(ring.nvars)
        homogeneous = all(isinstance(grading.degree(g), tuple) for g in gens)
        if mode == "auto":
            mode = GRADED if homogeneous else LOCAL
        if mode == GRADED and not homogeneous:
            raise PolyError("graded mode needs homogeneous generators")
        if mode == LOCAL and any(g.constant_term() for g in gens):
            raise PolyError("local mode needs generators vanishing at the origin")
        if mode not in (GRADED, LOCAL):
            raise PolyError(f"unknown mode {mode!r}")
        p = ring.p
        f = reduce(lambda a, b: a * b, gens)
        if degree_cap is None:
            if mode == GRADED:
                sw = grading.scalar_weights
                deg = lambda g: max(sum(a * w for a, w in zip(k, sw)) for k in g.terms)
                mu = sum(sw)
                degree_cap = max((p - 1) * deg(f), p * (p - 1) * mu) + 2 * max(deg(g) for g in gens)
            else:
                degree_cap = 4 * p * f.total_degree()
        regular = _leading_terms_coprime(gens)
        if not regular:
            warnings.warn("generators may not form a regular sequence; results are formula-level", stacklevel=2)
        return cls(gens, grading, mode, degree_cap, regular)


def _leading_terms_coprime(gens: Sequence[SparsePoly]) -> bool:
    leads = [max(g.terms, key=lambda k: (sum(k), k)) for g in gens]
    for i in range(len(leads)):
        for j in range(i + 1, len(leads)):
            if any(a and b for a, b in zip(leads[i], leads[j])):
                return False
    return True


def colon_bracket(gens: Sequence[SparsePoly], s: int) -> list[SparsePoly]:
    """Generators {f^(s-1)} + {f_j^s} of (I^[s] : I) for a regular sequence."""
    f = reduce(lambda a, b: a * b, gens)
    return [power(f, s - 1)] + [power(g, s) for g in gens]


# -- results and certificates ---------------------------------------------


@dataclass
class ChainLink:
    """h with cofactors c_0..c_m such that h - theta(next h) = sum c_j * I1[j]."""

    h: SparsePoly
    cofactors: list[SparsePoly]


@dataclass
class CICertificate:
    """Escape witness for height <= n.

    ``escape`` is the element of I_n outside m^[p]. For n = 1 it lies in I_1
    with ``escape_cofactors``; otherwise escape - theta(h_2) = sum of
    ``escape_cofactors`` times I_1 generators, and ``chain`` lists h_2..h_n.
    """

    escape: SparsePoly
    escape_cofactors: list[SparsePoly]
    chain: list[ChainLink]

    @property
    def height(self) -> int:
        return len(self.chain) + 1

    def hs(self) -> list[SparsePoly]:
        return [link.h for link in self.chain]


@dataclass
class CIHeightResult:
    verdict: str
    height: int | None
    lower_bound: int
    cap: int
    certificate: CICertificate | None = None
    lower_bound_certified: bool = False
    check: str | None = None
    mode: str = GRADED
    trace: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def label(self) -> str:
        if self.verdict == EXACT:
            return f"Exact({self.height})"
        if self.verdict == INFINITE_BY_CHECK:
            return f"InfiniteByCheck({self.check})"
        return f"LowerBoundAtCap({self.lower_bound}, {self.cap})"


def _i1_cofactors_from_tag(tag: dict, items: list, ring, m: int) -> list[SparsePoly]:
    cof: list[dict] = [dict() for _ in range(m)]
    p = ring.p
    for idx, c in tag.items():
        item = items[idx]
        if item[0] != "i1":
            continue
        _, j, mono = item
        cof[j][mono] = (cof[j].get(mono, 0) + c) % p
    return [SparsePoly(ring, t) for t in cof]


# -- graded engine --------------------------------------------------------


class _GradedSlices:
    def __init__(self, inp: CIInput, theta: ThetaOperator, i1: list[SparsePoly]):
        self.inp = inp
        self.theta = theta
        self.i1 = i1
        g = inp.grading
        self.g = g
        self.p = inp.p
        self.ring = inp.ring
        self.mu = g.mu
        self.deg_f = g.degree(inp.f)
        self.i1_deg = [g.degree(x) for x in i1]
        self.degrees = self._closure()

    def scalar(self, d) -> int:
        return sum(d)

    def pre(self, e):
        p = self.p
        return tuple(p * a + (p - 1) * m - p * (p - 1) * df for a, m, df in zip(e, self.mu, self.deg_f))

    def _closure(self) -> list[tuple[int, ...]]:
        # Breadth-first over preimages. exact_levels is the number of chain
        # levels whose escape test sees every degree it needs.
        g = self.g
        cap = self.inp.degree_cap
        escape_degs = {g.monomial_degree(k) for k in small_monomials(self.ring.nvars, self.p)}
        self.escape_degrees = {e for e in escape_degs if sum(e) <= cap}
        self.exact_levels = 0 if len(self.escape_degrees) < len(escape_degs) else None
        seen = set(self.escape_degrees)
        frontier = list(self.escape_degrees)
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for e in frontier:
                d = self.pre(e)
                if any(x < 0 for x in d) or d in seen:
                    continue
                if sum(d) > cap:
                    if self.exact_levels is None:
                        self.exact_levels = depth
                    continue
                seen.add(d)
                nxt.append(d)
            frontier = nxt
        self.cap_hit = self.exact_levels is not None
        return sorted(seen, key=lambda d: (sum(d), d))

    def certifies(self, levels: int) -> bool:
        """Whether the escape tests of levels 1..levels were exact."""
        return self.exact_levels is None or levels <= self.exact_levels

    def level_one(self) -> dict:
        out = {}
        for d in self.degrees:
            ech = Echelon(self.p, track=True)
            items: list = []
            for j, (gen, gd) in enumerate(zip(self.i1, self.i1_deg)):
                for mono in monomials_of_degree(self.g, vec_sub(d, gd)):
                    items.append(("i1", j, mono))
                    ech.add(poly_to_keyed(gen.mul_monomial(mono)), {len(items) - 1: 1})
            out[d] = (ech, items)
        return out

    def next_level(self, prev: dict) -> dict:
        out = {}
        kernels = {}
        for d, (ech, _) in prev.items():
            kernels[d] = [keyed_to_poly(self.ring, vec) for lead, (vec, _) in ech.rows.items() if lead[0] == 1]
        self.last_kernels = kernels
        for d in self.degrees:
            ech = Echelon(self.p, track=True)
            items: list = []
            for j, (gen, gd) in enumerate(zip(self.i1, self.i1_deg)):
                for mono in monomials_of_degree(self.g, vec_sub(d, gd)):
                    items.append(("i1", j, mono))
                    ech.add(poly_to_keyed(gen.mul_monomial(mono)), {len(items) - 1: 1})
            src = self.pre(d)
            for r, k in enumerate(kernels.get(src, ())):
                t = self.theta(k)
                if t:
                    items.append(("th", src, r))
                    ech.add(poly_to_keyed(t), {len(items) - 1: 1})
            out[d] = (ech, items)
        return out


def _find_escape(level: dict, degrees, p: int) -> tuple | None:
    for d in degrees:
        if d not in level:
            continue
        ech, _ = level[d]
        for vec, tag in ech.rows.values():
            if any(max(k[1], default=0) < p for k in vec):
                return d, vec, tag
    return None


def _graded_certificate(levels: list[dict], kernels_by_level: list[dict], n: int, d, vec, tag, inp, ring) -> CICertificate:
    m = len(inp.gens) + 1
    p = inp.p
    escape = keyed_to_poly(ring, vec)

    def split(level_idx: int, deg, tag):
        ech, items = levels[level_idx][deg]
        cof = _i1_cofactors_from_tag(tag, items, ring, m)
        h = ring.zero()
        for idx, c in tag.items():
            item = items[idx]
            if item[0] == "th":
                _, src, r = item
                h = h + kernels_by_level[level_idx][src][r].scale(c)
        return h, cof

    chain: list[ChainLink] = []
    h, cof = split(n - 1, d, tag)
    esc_cof = cof
    deg = d
    for lvl in range(n - 2, -1, -1):
        deg = _pre_of(inp, deg)
        ech, _ = levels[lvl][deg]
        t = ech.express(poly_to_keyed(h))
        if t is None:
            raise AssertionError("chain element not found in its slice")
        nxt, cof = split(lvl, deg, t)
        chain.append(ChainLink(h, cof))
        h = nxt
    return CICertificate(escape, esc_cof, chain)


def _pre_of(inp: CIInput, e):
    g = inp.grading
    p = inp.p
    df = g.degree(inp.f)
    return tuple(p * a + (p - 1) * mm - p * (p - 1) * x for a, mm, x in zip(e, g.mu, df))


def _ci_height_graded(inp: CIInput, max_level: int, trace: bool) -> CIHeightResult:
    p = inp.p
    ring = inp.ring
    theta = ThetaOperator(inp.f, inp.grading)
    i1 = colon_bracket(inp.gens, p)
    need = max(sum(inp.grading.degree(g)) for g in i1[:1])
    if need > inp.degree_cap:
        raise CapError(f"degree cap {inp.degree_cap} is below deg f^(p-1) = {need}; need at least {need}")
    sl = _GradedSlices(inp, theta, i1)
    levels = [sl.level_one()]
    kernels_by_level: list[dict] = [{}]
    tr = []
    for n in range(1, max_level + 1):
        cur = levels[-1]
        dims = {d: len(cur[d][0]) for d in sl.degrees}
        if trace:
            tr.append({"level": n, "dims": {",".join(map(str, d)): v for d, v in dims.items()}})
        hit = _find_escape(cur, sorted(sl.escape_degrees, key=lambda d: (sum(d), d)), p)
        if hit is not None:
            d, vec, tag = hit
            cert = _graded_certificate(levels, kernels_by_level, n, d, vec, tag, inp, ring)
            return CIHeightResult(
                EXACT, n, n, inp.degree_cap, cert, lower_bound_certified=sl.certifies(n - 1), mode=GRADED, trace=tr
            )
        if n >= 2:
            prev_dims = {d: len(levels[-2][d][0]) for d in sl.degrees}
            if prev_dims == dims:
                if not sl.cap_hit:
                    return CIHeightResult(
                        INFINITE_BY_CHECK,
                        None,
                        n,
                        inp.degree_cap,
                        check="graded-fixed-point",
                        lower_bound_certified=True,
                        mode=GRADED,
                        trace=tr,
                        notes=["chain stabilized on a degree set closed under theta-preimages"],
                    )
                return CIHeightResult(LOWER_BOUND, None, n + 1, inp.degree_cap, mode=GRADED, trace=tr,
                                      lower_bound_certified=sl.certifies(n),
                                      notes=["chain stabilized under the cap"])
        nxt = sl.next_level(cur)
        kernels_by_level.append(sl.last_kernels)
        levels.append(nxt)
    return CIHeightResult(LOWER_BOUND, None, max_level + 1, inp.degree_cap, mode=GRADED, trace=tr,
                          lower_bound_certified=sl.certifies(max_level), notes=["max_level reached"])


# -- local engine ---------------------------------------------------------


def local_lower_bound(f: SparsePoly, n: int) -> bool:
    """True if f_l lies in m^[p^l] for every l <= n, which forces height > n."""
    p = f.ring.p
    theta = ThetaOperator(f)
    g1 = power(f, p - 1)
    D = None
    for l in range(1, n + 1):
        q = p**l
        acc = g1.truncate_bracket(q)
        if l >= 2:
            if D is None:
                D = theta.delta_rep
            for k in range(l - 1):
                factor = D.truncate_bracket(p ** (l - k)).frobenius(k).truncate_bracket(q)
                acc = acc.mul_truncated(factor, q)
                if not acc:
                    break
        if acc:
            return False
    return True


class _LocalRun:
    def __init__(self, inp: CIInput, theta: ThetaOperator, i1: list[SparsePoly], D: int):
        self.inp = inp
        self.theta = theta
        self.i1 = i1
        self.D = D
        self.ring = inp.ring
        self.p = inp.p
        self.nv = self.ring.nvars
        self.levels: list[tuple[Echelon, list]] = []
        self.kernels: list[list[SparsePoly]] = []
        self.kernel_tags: list[list[dict]] = []
        self.images: list[list[SparsePoly]] = []

    def _span(self, gens_items: list[tuple[SparsePoly, tuple]]) -> tuple[Echelon, list]:
        ech = Echelon(self.p, track=True)
        items: list = []
        for poly, label in gens_items:
            dg = poly.total_degree()
            for k in range(self.D - dg + 1):
                for mono in monomials_of_total_degree(self.nv, k):
                    items.append(label + (mono,))
                    ech.add(poly_to_keyed(poly.mul_monomial(mono)), {len(items) - 1: 1})
        return ech, items

    def base_items(self):
        return [(g, ("i1", j)) for j, g in enumerate(self.i1) if g.total_degree() <= self.D]

    def run(self, max_level: int) -> tuple[int, CICertificate] | None:
        ring = self.ring
        ech, items = self._span(self.base_items())
        self.levels.append((ech, items))
        for j, g in enumerate(self.i1):
            if escapes(g):
                cof = [ring.zero() for _ in self.i1]
                cof[j] = ring.one()
                return 1, CICertificate(g, cof, [])
        for n in range(2, max_level + 1):
            ech, items = self.levels[-1]
            krows = [(vec, tag) for lead, (vec, tag) in ech.rows.items() if lead[0] == 1]
            kernel = [keyed_to_poly(ring, vec) for vec, _ in krows]
            images = [self.theta(k) for k in kernel]
            self.kernels.append(kernel)
            self.kernel_tags.append([tag for _, tag in krows])
            self.images.append(images)
            for r, t in enumerate(images):
                if t and escapes(t):
                    return n, self._certificate(n, r)
            gi = self.base_items() + [
                (t, ("th", r)) for r, t in enumerate(images) if t and t.total_degree() <= self.D
            ]
            ech2, items2 = self._span(gi)
            self.levels.append((ech2, items2))
            if len(ech2) == len(ech):
                return None
        return None

    def _certificate(self, n: int, r: int) -> CICertificate:
        # Work symbolically: a level-l element is sum c * mono * item, and a
        # theta item times mono equals theta(mono^p * kernel row) one level down.
        ring = self.ring
        p = self.p
        m = len(self.i1)
        escape = self.images[n - 2][r]
        chain: list[ChainLink] = []
        lvl = n - 2
        combo = {(idx, (0,) * self.nv): c for idx, c in self.kernel_tags[lvl][r].items()}
        while True:
            _, items = self.levels[lvl]
            cof: list[dict] = [dict() for _ in range(m)]
            h = ring.zero()
            nxt: dict = {}
            for (idx, mult), c in combo.items():
                item = items[idx]
                h = h + (self.i1[item[1]] if item[0] == "i1" else self.images[lvl - 1][item[1]]).mul_monomial(
                    vec_add(mult, item[2]), c
                )
                if item[0] == "i1":
                    key = vec_add(mult, item[2])
                    cof[item[1]][key] = (cof[item[1]].get(key, 0) + c) % p
                else:
                    twist = tuple(p * a for a in vec_add(mult, item[2]))
                    for idx2, c2 in self.kernel_tags[lvl - 1][item[1]].items():
                        k2 = (idx2, twist)
                        v = (nxt.get(k2, 0) + c * c2) % p
                        if v:
                            nxt[k2] = v
                        else:
                            nxt.pop(k2, None)
            chain.append(ChainLink(h, [SparsePoly(ring, t) for t in cof]))
            if lvl == 0:
                break
            combo = nxt
            lvl -= 1
        return CICertificate(escape, [ring.zero() for _ in range(m)], chain)


def _ci_height_local(inp: CIInput, max_level: int) -> CIHeightResult:
    p = inp.p
    theta = ThetaOperator(inp.f)
    i1 = colon_bracket(inp.gens, p)
    start = min(g.total_degree() for g in i1)
    if start > inp.degree_cap:
        raise CapError(f"degree cap {inp.degree_cap} is below deg f^(p-1) = {start}; need at least {start}")
    hyper = len(inp.gens) == 1
    if hyper and p**max_level <= LOWER_BOUND_SHORTCUT and local_lower_bound(inp.f, max_level):
        # no escape can occur within max_level levels, so deepening is pointless
        return CIHeightResult(LOWER_BOUND, None, max_level + 1, inp.degree_cap, lower_bound_certified=True,
                              mode=LOCAL, notes=["height exceeds max_level by the f_l criterion"])
    best: tuple[int, CICertificate, int] | None = None
    D = start
    while D <= inp.degree_cap:
        limit = max_level if best is None else best[0] - 1
        if limit < 1:
            break
        run = _LocalRun(inp, theta, i1, D)
        found = run.run(limit)
        if found is not None and (best is None or found[0] < best[0]):
            best = (found[0], found[1], D)
            if best[0] == 1 or (hyper and local_lower_bound(inp.f, best[0] - 1)):
                return CIHeightResult(EXACT, best[0], best[0], D, best[1], lower_bound_certified=True, mode=LOCAL)
        D += 1 if D < start + 8 else 2
    if best is not None:
        return CIHeightResult(EXACT, best[0], best[0], best[2], best[1], lower_bound_certified=False, mode=LOCAL,
                              notes=["lower bound holds up to the degree cap only"])
    lb = 1
    if hyper:
        while lb <= max_level and local_lower_bound(inp.f, lb):
            lb += 1
    return CIHeightResult(LOWER_BOUND, None, lb, inp.degree_cap, mode=LOCAL,
                          notes=["no escape found under the cap"])


def ci_height(inp: CIInput, max_level: int = DEFAULT_MAX_LEVEL, trace: bool = False) -> CIHeightResult:
    if inp.mode == GRADED:
        return _ci_height_graded(inp, max_level, trace)
    return _ci_height_local(inp, max_level)


# -- finite non-splitting checks ------------------------------------------


def nonsplit_checks(inp: CIInput) -> CIHeightResult | None:
    """The two finite sufficient conditions for height infinity."""
    p = inp.p
    f = inp.f
    if p >= 3 and power(f, p - 2, bracket=p).is_zero():
        return CIHeightResult(INFINITE_BY_CHECK, None, 0, inp.degree_cap, check="i", mode=inp.mode)
    if not power(f, p - 1, bracket=p).is_zero():
        return None
    q = p * p
    tail = power(f, p - 2, bracket=p).frobenius().mul_truncated(delta1(f).value.truncate_bracket(q), q)
    if tail.is_zero():
        return CIHeightResult(INFINITE_BY_CHECK, None, 0, inp.degree_cap, check="ii", mode=inp.mode)
    factors = [power(f, p - 2, bracket=q)] + [power(g, p, bracket=q) for g in inp.gens]
    if all(a.mul_truncated(tail, q).is_zero() for a in factors):
        return CIHeightResult(INFINITE_BY_CHECK, None, 0, inp.degree_cap, check="ii", mode=inp.mode)
    return None


# -- ideal membership helpers ---------------------------------------------


def _is_monomial(a: SparsePoly) -> bool:
    return len(a) == 1


def _divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_ideal_intersection(*ideals: Sequence[SparsePoly]) -> list[SparsePoly]:
    """Minimal monomial generators of an intersection of monomial ideals."""
    ring = ideals[0][0].ring
    cur = [next(iter(m.terms)) for m in ideals[0]]
    for ideal in ideals[1:]:
        other = [next(iter(m.terms)) for m in ideal]
        cur = [tuple(max(x, y) for x, y in zip(a, b)) for a in cur for b in other]
    cur = sorted(set(cur), key=lambda k: (sum(k), k))
    minimal: list[Exps] = []
    for k in cur:
        if not any(_divides(m, k) for m in minimal):
            minimal.append(k)
    return [ring.monomial(k) for k in minimal]


class _IdealSpan:
    """Truncated span of an ideal: monomial generators act by deleting terms,
    the others contribute monomial multiples degree by degree."""

    def __init__(self, gens: Sequence[SparsePoly], grading: Grading | None, flag: int = 1):
        self.ring = gens[0].ring
        self.p = self.ring.p
        self.monos = [next(iter(g.terms)) for g in gens if _is_monomial(g)]
        self.others = [g for g in gens if not _is_monomial(g)]
        self.grading = grading
        self.flag = flag
        self._cache: dict = {}

    def reduce_monomial(self, a: SparsePoly) -> SparsePoly:
        if not self.monos:
            return a
        return SparsePoly(self.ring, {k: c for k, c in a.terms.items() if not any(_divides(m, k) for m in self.monos)}, _clean=True)

    def keyed(self, a: SparsePoly) -> dict:
        a = self.reduce_monomial(a)
        return {(self.flag, k): c for k, c in a.terms.items()}

    def rows_in_degree(self, deg) -> list[dict]:
        """Generators of J in one graded degree (graded use)."""
        if deg in self._cache:
            return self._cache[deg]
        g = self.grading
        out = []
        for j in self.others:
            dj = g.degree(j)
            for mono in monomials_of_degree(g, vec_sub(deg, dj)):
                v = self.keyed(j.mul_monomial(mono))
                if v:
                    out.append(v)
        self._cache[deg] = out
        return out

    def rows_up_to(self, bound: int) -> list[dict]:
        out = []
        nv = self.ring.nvars
        for j in self.others:
            dj = j.total_degree()
            for k in range(bound - dj + 1):
                for mono in monomials_of_total_degree(nv, k):
                    v = self.keyed(j.mul_monomial(mono))
                    if v:
                        out.append(v)
        return out

    def contains(self, a: SparsePoly, bound: int) -> bool:
        a = self.reduce_monomial(a)
        if not a:
            return True
        ech = Echelon(self.p)
        if self.grading is not None and self.grading.is_homogeneous(a):
            rows = self.rows_in_degree(self.grading.degree(a))
        else:
            rows = self.rows_up_to(max(bound, a.total_degree()))
        for r in rows:
            ech.add(r)
        return ech.contains(self.keyed(a))


# -- fixed-point candidates -----------------------------------------------


VERIFIED_UP_TO_CAP = "VerifiedUpToCap"
REFUTED = "Refuted"


@dataclass
class FixedPointResult:
    status: str
    cap: int
    reason: str = ""
    witness: SparsePoly | None = None

    def label(self) -> str:
        if self.status == VERIFIED_UP_TO_CAP:
            return f"VerifiedUpToCap({self.cap}) [heuristic: closure checked only through degree {self.cap}]"
        return f"Refuted({self.reason})"

    def __bool__(self) -> bool:
        return self.status == VERIFIED_UP_TO_CAP


def _pair(theta: ThetaOperator, a: SparsePoly) -> dict:
    vec = {(0, k): c for k, c in u_top(a).terms.items()}
    return vec, theta(a)


def verify_fixed_point(inp: CIInput, J_gens: Sequence[SparsePoly], cap: int = 20) -> FixedPointResult:
    """Check J ⊆ m^[p] exactly, and (I^[p]:I) + theta(F_*J ∩ ker u) ⊆ J up to ``cap``.

    The closure test uses the pairs (u(a), theta(a)) for a in J of degree at
    most ``cap``. A combination with vanishing first coordinate whose second
    coordinate leaves J refutes the candidate.
    """
    p = inp.p
    J_gens = [g for g in J_gens if g]
    for j in J_gens:
        if escapes(j):
            return FixedPointResult(REFUTED, cap, "J is not contained in m^[p]", j)
    theta = ThetaOperator(inp.f)
    span = _IdealSpan(J_gens, inp.grading if inp.mode == GRADED else None)
    for g in colon_bracket(inp.gens, p):
        if not span.contains(g, cap):
            return FixedPointResult(REFUTED, cap, "a generator of (I^[p]:I) is not in J (up to the cap)", g)
    if inp.mode == GRADED and all(isinstance(inp.grading.degree(j), tuple) for j in J_gens):
        return _closure_graded(inp, J_gens, cap, theta, span)
    return _closure_filtered(inp, J_gens, cap, theta, span)


def _witness(ring, vec: dict) -> SparsePoly:
    return SparsePoly(ring, {k[1]: c for k, c in vec.items() if k[0] == 1}, _clean=True)


def _closure_graded(inp, J_gens, cap, theta, span) -> FixedPointResult:
    # The pair module is graded by tau = deg u(a) = (deg a - (p-1) mu) / p and
    # its degree-tau part is sum_i x_i * M_(tau - w_i) plus the new generators.
    p = inp.p
    ring = inp.ring
    g = inp.grading
    mu = g.mu
    deg_f = g.degree(inp.f)
    nv = ring.nvars
    gens_by_tau: dict = {}
    for j in J_gens:
        dj = g.degree(j)
        for small in small_monomials(nv, p):
            a = j.mul_monomial(small)
            da = vec_add(dj, g.monomial_degree(small))
            num = [x - (p - 1) * m for x, m in zip(da, mu)]
            if any(x % p for x in num):
                continue
            tau = tuple(x // p for x in num)
            if sum(da) > cap or any(x < 0 for x in tau):
                continue
            gens_by_tau.setdefault(tau, []).append(a)
    levels = sorted(
        {t for t in _tau_closure(gens_by_tau, g, p, mu, cap)},
        key=lambda t: (sum(t), t),
    )
    basis: dict = {}
    unit = [tuple(1 if i == k else 0 for i in range(nv)) for k in range(nv)]
    for tau in levels:
        ech = Echelon(p)
        e = vec_add(tau, tuple((p - 1) * x for x in deg_f))
        for r in span.rows_in_degree(e):
            ech.add(r)
        cands = []
        for k in range(nv):
            prev = tuple(t - w for t, w in zip(tau, g.weights[k]))
            for vec in basis.get(prev, ()):
                cands.append({(fl, vec_add(ex, unit[k])): c for (fl, ex), c in vec.items()})
        for a in gens_by_tau.get(tau, ()):
            first, second = _pair(theta, a)
            v = dict(first)
            v.update(span.keyed(second))
            cands.append(v)
        rows = []
        for v in cands:
            lead = ech.add(v)
            if lead is None:
                continue
            if lead[0] == 1:
                return FixedPointResult(
                    REFUTED, cap, "theta(F_*J cap ker u) is not contained in J (up to the cap)", _witness(ring, ech.rows[lead][0])
                )
            rows.append(lead)
        basis[tau] = [ech.rows[lead][0] for lead in rows]
    return FixedPointResult(VERIFIED_UP_TO_CAP, cap)


def _tau_closure(gens_by_tau, g: Grading, p: int, mu, cap: int):
    out = set(gens_by_tau)
    todo = list(out)
    nv = g.nvars
    while todo:
        t = todo.pop()
        for k in range(nv):
            s = vec_add(t, g.weights[k])
            if p * sum(s) + (p - 1) * sum(mu) <= cap and s not in out:
                out.add(s)
                todo.append(s)
    return out


def _closure_filtered(inp, J_gens, cap, theta, span) -> FixedPointResult:
    p = inp.p
    ring = inp.ring
    nv = ring.nvars
    seen: set = set()
    elems: list[SparsePoly] = []
    for j in J_gens:
        dj = j.total_degree()
        mono_gen = next(iter(j.terms)) if _is_monomial(j) else None
        for k in range(cap - dj + 1):
            for mono in monomials_of_total_degree(nv, k):
                if mono_gen is not None:
                    key = vec_add(mono_gen, mono)
                    if key in seen:
                        continue
                    seen.add(key)
                elems.append(j.mul_monomial(mono))
    pairs = []
    top = 0
    for a in elems:
        first, second = _pair(theta, a)
        pairs.append((first, second))
        if second:
            top = max(top, second.total_degree())
    ech = Echelon(p)
    for r in span.rows_up_to(top):
        ech.add(r)
    for first, second in pairs:
        v = dict(first)
        v.update(span.keyed(second))
        lead = ech.add(v)
        if lead is not None and lead[0] == 1:
            return FixedPointResult(
                REFUTED, cap, "theta(F_*J cap ker u) is not contained in J (up to the cap)", _witness(ring, ech.rows[lead][0])
            )
    return FixedPointResult(VERIFIED_UP_TO_CAP, cap)


# -- splitting tuples -----------------------------------------------------


@dataclass
class SplittingTupleReport:
    ok: bool
    condition1: bool
    failures: list[tuple[int, int]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def exact_divides(a: SparsePoly, d: SparsePoly) -> bool:
    """Whether d divides a in the polynomial ring (division by a single
    polynomial leaves remainder zero exactly when it divides)."""
    if not a:
        return True
    p = a.ring.p
    key = lambda k: (sum(k), k)
    lead = max(d.terms, key=key)
    inv = pow(d.terms[lead], -1, p)
    rem = dict(a.terms)
    while rem:
        top = max(rem, key=key)
        if not _divides(lead, top):
            return False
        q = tuple(x - y for x, y in zip(top, lead))
        c = rem[top] * inv % p
        for k, v in d.terms.items():
            kk = vec_add(k, q)
            w = (rem.get(kk, 0) - c * v) % p
            if w:
                rem[kk] = w
            else:
                rem.pop(kk, None)
    return True


def _in_bracket_ideal(a: SparsePoly, gens: Sequence[SparsePoly], q: int, grading, cap: int) -> bool:
    powered = [power(g, q) for g in gens]
    if len(powered) == 1:
        return exact_divides(a, powered[0])
    if grading is None and a.total_degree() > cap:
        raise CapError(f"degree {a.total_degree()} exceeds the cap {cap}")
    return _IdealSpan(powered, grading).contains(a, cap)


def verify_splitting_tuple(inp: CIInput, tuple_g: Sequence[SparsePoly], cap: int | None = None) -> SplittingTupleReport:
    """Check the two conditions on (g_1, ..., g_n) for every generator f_j."""
    from .delta import delta_n_rep
    from .frobenius import u_top_iter

    cap = inp.degree_cap if cap is None else cap
    p = inp.p
    n = len(tuple_g)
    c1 = escapes(tuple_g[0]) and all(not u_top(g) for g in tuple_g[1:])
    rep = SplittingTupleReport(ok=c1, condition1=c1)
    if not c1:
        rep.notes.append("condition (1) fails")
        return rep
    grading = inp.grading if inp.mode == GRADED else None
    for j, fj in enumerate(inp.gens):
        deltas = [fj] + [delta_n_rep(fj, r).value for r in range(1, n)]
        for s in range(1, n + 1):
            total = inp.ring.zero()
            for r in range(0, n - s + 1):
                term = tuple_g[r + s - 1] * deltas[r]
                total = total + (u_top_iter(term, r) if r else term)
            if not _in_bracket_ideal(total, inp.gens, p**s, grading, cap):
                rep.failures.append((s, j))
    rep.ok = not rep.failures
    if rep.failures:
        rep.notes.append(f"condition (2) fails at (s, j) in {rep.failures}")
    return rep


def splitting_tuple_from_certificate(inp: CIInput, cert: CICertificate) -> list[SparsePoly]:
    """g_i = f^(p^i - p) h_i with h_1 the escaping element."""
    p = inp.p
    f = inp.f
    hs = [cert.escape] + cert.hs()
    return [power(f, p**i - p) * h for i, h in enumerate(hs, start=1)]


# -- the CI-versus-hypersurface inequality --------------------------------


@dataclass
class InequalityReport:
    ok: bool
    ideal: CIHeightResult
    hypersurface: object

    def __bool__(self) -> bool:
        return self.ok


def _bounds_ci(r: CIHeightResult) -> tuple[float, float]:
    inf = float("inf")
    if r.verdict == EXACT:
        return (r.height, r.height) if r.lower_bound_certified else (1, r.height)
    if r.verdict == INFINITE_BY_CHECK:
        return inf, inf
    return (r.lower_bound if r.lower_bound_certified else 1), inf


def hypersurface_height(f: SparsePoly, grading: Grading | None = None, mode: str = "auto", max_level: int = DEFAULT_MAX_LEVEL):
    from .qfs_cy import cy_height

    grading = grading or Grading.standard(f.ring.nvars)
    if mode in ("auto", "cy") and grading.degree(f) == grading.mu:
        return cy_height(f, grading)
    return ci_height(CIInput.build([f], grading, mode=mode), max_level)


def _bounds_any(r) -> tuple[float, float]:
    from .qfs_cy import CYHeightResult

    inf = float("inf")
    if isinstance(r, CYHeightResult):
        if r.verdict == "finite":
            return r.height, r.height
        if r.verdict == "infinite":
            return inf, inf
        return len(r.chain) + 1, inf
    return _bounds_ci(r)


def ci_le_hypersurface_check(inp: CIInput, max_level: int = DEFAULT_MAX_LEVEL) -> InequalityReport:
    """Height of S/I is at most the height of S/f.

    A violation is reported only when it is proven: the lower bound on the
    ideal side exceeds the upper bound on the hypersurface side.
    """
    ri = nonsplit_checks(inp) or ci_height(inp, max_level)
    mode = inp.mode if len(inp.gens) > 1 else "auto"
    rf = hypersurface_height(inp.f, inp.grading, "auto" if mode == GRADED else mode, max_level)
    lo_i, _ = _bounds_any(ri)
    _, hi_f = _bounds_any(rf)
    return InequalityReport(lo_i <= hi_f, ri, rf)


def fixed_point_closure(
    inp: CIInput, J_gens: Sequence[SparsePoly], cap: int = 20, max_rounds: int = 50
) -> tuple[list[SparsePoly], FixedPointResult]:
    """Enlarge J by refuting witnesses until the closure test passes under the cap.

    Stops early if a witness leaves m^[p] (then no fixed point inside m^[p]
    contains J) or if a generator of (I^[p]:I) is missing from J.
    """
    J = list(J_gens)
    res = verify_fixed_point(inp, J, cap)
    for _ in range(max_rounds):
        if res or res.witness is None or escapes(res.witness) or "generator" in res.reason:
            break
        J.append(res.witness)
        res = verify_fixed_point(inp, J, cap)
    return J, res
