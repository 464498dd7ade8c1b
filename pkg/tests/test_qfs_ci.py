import warnings

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from gf_oracle import rank
from qfsheight.certificates import replay_ci
from qfsheight.corpus import G_HEIGHT_INF, J_HEIGHT_INF
from qfsheight.polyring import Grading, PolyError, PolyRing, SparsePoly, power
from qfsheight.qfs_ci import (
    EXACT,
    GRADED,
    INFINITE_BY_CHECK,
    LOCAL,
    LOWER_BOUND,
    REFUTED,
    VERIFIED_UP_TO_CAP,
    CapError,
    CIInput,
    _GradedSlices,
    ci_height,
    ci_le_hypersurface_check,
    colon_bracket,
    exact_divides,
    local_lower_bound,
    monomial_ideal_intersection,
    nonsplit_checks,
    splitting_tuple_from_certificate,
    verify_fixed_point,
    verify_splitting_tuple,
)
from qfsheight.qfs_cy import FINITE, INFINITE, ThetaOperator, cy_height, fermat_poly
from qfsheight.slices import monomials_of_total_degree
from strategies import homogeneous

SLOW = dict(deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])

R2 = PolyRing.make("x y z", 2)


def local(text, p=2, names="x y z", **kw):
    return CIInput.build([PolyRing.make(names, p).parse(text)], mode=LOCAL, **kw)


# -- colon ideals -----------------------------------------------------------


def test_colon_bracket_examples():
    R = PolyRing.make("x", 2)
    x = R.var("x")
    assert colon_bracket([x], 2) == [x, power(x, 2)]
    f, g = R2.parse("x^2+y*z"), R2.parse("z^3")
    assert colon_bracket([f, g], 2) == [f * g, power(f, 2), power(g, 2)]


def _slice_rows(gens, d, n):
    monos = list(monomials_of_total_degree(n, d))
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for g in gens:
        gd = g.total_degree()
        for m in monomials_of_total_degree(n, d - gd):
            v = [0] * len(monos)
            for k, c in g.mul_monomial(m).terms.items():
                v[index[k]] = c
            rows.append(v)
    return rows, monos


def _colon_dim_oracle(gens, s, d, p):
    # dim of {a in S_d : a f_j in I^[s] for all j} by brute-force linear algebra
    n = gens[0].ring.nvars
    bracket = [power(g, s) for g in gens]
    monos = list(monomials_of_total_degree(n, d))
    blocks = []
    for fj in gens:
        target = d + fj.total_degree()
        w_rows, tmonos = _slice_rows(bracket, target, n)
        tindex = {m: i for i, m in enumerate(tmonos)}
        images = []
        for m in monos:
            v = [0] * len(tmonos)
            for k, c in fj.mul_monomial(m).terms.items():
                v[tindex[k]] = c
            images.append(v)
        blocks.append((images, w_rows))
    # a in kernel iff each image lies in the span of w_rows: count via ranks
    # of the stacked system [images | 0 ; w_rows]
    width = sum(len(b[0][0]) if b[0] else 0 for b in blocks)
    stacked = []
    for i in range(len(monos)):
        row = [1 if j == i else 0 for j in range(len(monos))]
        for images, _ in blocks:
            row += images[i]
        stacked.append(row)
    offset = len(monos)
    for images, w_rows in blocks:
        w = len(images[0]) if images else 0
        for r in w_rows:
            full = [0] * (len(monos) + width)
            full[offset : offset + w] = r
            stacked.append(full)
        offset += w
    # kernel of the projection onto the image coordinates, restricted to the first block
    from gf_oracle import row_reduce

    red, pivots = row_reduce([r[len(monos):] + r[: len(monos)] for r in stacked], p)
    return sum(1 for r, c in zip(red, pivots) if c >= width)


@pytest.mark.parametrize("p", [2, 3])
@settings(max_examples=25, **SLOW)
@given(data=st.data())
def test_colon_bracket_matches_linear_algebra(p, data):
    R = PolyRing.make("x y z", p)
    a = data.draw(st.integers(1, 2))
    c = data.draw(st.integers(1, 2))
    f1 = data.draw(homogeneous(PolyRing.make("x y z", p), a, max_terms=3))
    f1 = SparsePoly(R, {k: v for k, v in f1.terms.items() if k[2] == 0})
    assume(f1)
    f2 = power(R.var("z"), c)
    gens = [f1, f2]
    formula = colon_bracket(gens, p)
    for d in range(0, 9):
        rows, _ = _slice_rows([g for g in formula if g.total_degree() <= d], d, 3)
        assert (rank(rows, p) if rows else 0) == _colon_dim_oracle(gens, p, d, p)


# -- heights --------------------------------------------------------------


def test_e8_local_chain():
    inp = local("x^2+y^3+z^5")
    res = ci_height(inp)
    assert res.label() == "Exact(4)"
    cert = res.certificate
    assert cert.escape == R2.parse("x*y*z")
    assert cert.hs()[:2] == [R2.parse("x*z^3"), R2.parse("x*y*z^2")]
    assert res.lower_bound_certified


@pytest.mark.parametrize("n", range(2, 9))
def test_d_type_zero(n):
    from math import ceil, log2

    res = ci_height(local(f"z^2+x^2*y+x*y^{n}"))
    assert res.verdict == EXACT
    assert res.height == ceil(log2(n)) + 1


def test_wild_conic_bundle():
    R = PolyRing.make("x0 x1 x2 y0 y1 y2", 2)
    f = R.parse("x0*y0^2+x1*y1^2+x2*y2^2")
    g = Grading.from_weights([(1, 0)] * 3 + [(0, 1)] * 3)
    res = ci_height(CIInput.build([f], g, mode=GRADED))
    assert res.label() == "Exact(2)"
    assert replay_ci([f], _cert_json(res))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_single_variable(p):
    R = PolyRing.make("x y", p)
    res = ci_height(CIInput.build([R.var("x")], mode=GRADED))
    assert res.label() == "Exact(1)"
    assert ci_height(CIInput.build([R.var("x")], mode=LOCAL)).label() == "Exact(1)"


def test_cubic_graded():
    res = ci_height(CIInput.build([R2.parse("x^3+y^3+z^3")], mode=GRADED))
    assert res.label() == "Exact(2)"


def test_fermat_quartic_graded_fixed_point():
    R = PolyRing.make("x y z w", 3)
    res = ci_height(CIInput.build([R.parse("x^4+y^4+z^4+w^4")], mode=GRADED))
    assert res.verdict == INFINITE_BY_CHECK
    assert res.check == "graded-fixed-point"


def test_cap_error():
    with pytest.raises(CapError):
        ci_height(CIInput.build([R2.parse("x^3+y^3+z^3")], mode=GRADED, degree_cap=2))


def test_input_validation():
    with pytest.raises(PolyError):
        CIInput.build([R2.parse("x+1")], mode=LOCAL)
    with pytest.raises(PolyError):
        CIInput.build([R2.parse("x+y^2")], mode=GRADED)
    with pytest.raises(PolyError):
        CIInput.build([])
    with pytest.warns(UserWarning):
        CIInput.build([R2.parse("x*y"), R2.parse("x*z")], mode=GRADED)


def test_default_caps():
    inp = CIInput.build([R2.parse("x^3+y^3+z^3")], mode=GRADED)
    assert inp.degree_cap == max(3, 2 * 3) + 6
    assert local("x^2+y^3+z^5").degree_cap == 4 * 2 * 5


def test_max_level_gives_lower_bound():
    res = ci_height(local("x^2+y^3+z^5"), max_level=2)
    assert res.verdict == LOWER_BOUND
    assert res.lower_bound == 3
    assert res.label().startswith("LowerBoundAtCap(3")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_local_lower_bound(n):
    f = R2.parse("x^2+y^3+z^5")
    assert local_lower_bound(f, n)
    assert not local_lower_bound(f, 4)


def _cert_json(res):
    from qfsheight.certificates import ci_to_json

    return ci_to_json(res)["certificate"]


@pytest.mark.parametrize(
    "text,p", [("z^2+x^3+y^5", 2), ("z^2+x^3+x*y^3", 2), ("z^2+x^3+y^5", 3), ("z^2+x^3+y^4", 3), ("z^2+x^3+y^5", 5)]
)
def test_local_certificates_replay(text, p):
    inp = local(text, p)
    res = ci_height(inp)
    assert replay_ci(inp.gens, _cert_json(res))


# -- structural invariants ------------------------------------------------


def _graded_levels(inp, count):
    th = ThetaOperator(inp.f, inp.grading)
    sl = _GradedSlices(inp, th, colon_bracket(inp.gens, inp.p))
    levels = [sl.level_one()]
    for _ in range(count - 1):
        levels.append(sl.next_level(levels[-1]))
    return sl, levels


@pytest.mark.parametrize(
    "text,p,names,count",
    [
        ("x^4+y^4+z^4+w^4+x^2*z^2+x*y*z^2", 3, "x y z w", 4),
        ("x^4+y^4+z^4+w^4", 3, "x y z w", 3),
        ("x^3+y^3+z^3", 2, "x y z", 2),
    ],
)
def test_chain_monotone_and_homogeneous(text, p, names, count):
    f = PolyRing.make(names, p).parse(text)
    inp = CIInput.build([f], mode=GRADED)
    sl, levels = _graded_levels(inp, count)
    for d in sl.degrees:
        for lower, upper in zip(levels, levels[1:]):
            ech_lo, ech_hi = lower[d][0], upper[d][0]
            for vec, _ in ech_lo.rows.values():
                assert ech_hi.express(dict(vec)) is not None
                assert all(sum(k[1]) == sum(d) for k in vec)


@pytest.mark.parametrize("text,p", [("z^2+x^3+y^5", 2), ("z^2+x^3+x*y^3", 2), ("z^2+x^3+y^5", 3)])
def test_cap_monotonicity(text, p):
    previous = None
    for cap in (6, 10, 16, 24, 40):
        try:
            res = ci_height(local(text, p, degree_cap=cap))
        except CapError:
            continue
        if previous is not None and previous.verdict == EXACT:
            assert res.verdict == EXACT
            assert res.height <= previous.height
        previous = res
    assert previous.verdict == EXACT


# -- finite non-splitting checks -------------------------------------------


def test_nonsplit_fano_check_i():
    f = fermat_poly(5, 3)
    f = SparsePoly(f.ring, {tuple(4 if x else 0 for x in k): 1 for k in f.terms})
    assert nonsplit_checks(CIInput.build([f])).check == "i"


@pytest.mark.parametrize("N,p", [(4, 2), (4, 3), (5, 2), (5, 3)])
def test_nonsplit_fermat_check_ii(N, p):
    res = nonsplit_checks(CIInput.build([fermat_poly(N, p)]))
    assert res is not None
    assert res.label() == f"InfiniteByCheck({res.check})"


@pytest.mark.parametrize("text", ["x*y*z", "x^3+y^3+z^3"])
def test_nonsplit_silent_on_split_cases(text):
    assert nonsplit_checks(CIInput.build([R2.parse(text)])) is None


# -- fixed points -----------------------------------------------------------


def _height_inf_input():
    R = PolyRing.make("x y z w", 2)
    g = R.parse(G_HEIGHT_INF)
    J = monomial_ideal_intersection(*[[R.parse(t) for t in part] for part in J_HEIGHT_INF]) + [g]
    return CIInput.build([g], mode=LOCAL), J


def test_monomial_intersection():
    R = PolyRing.make("x y", 2)
    got = monomial_ideal_intersection([R.parse("x*y"), R.parse("y^3")], [R.parse("x^2"), R.parse("y^2")])
    assert sorted(str(m) for m in got) == ["x*y^2", "x^2*y", "y^3"]


def test_fixed_point_height_inf_example():
    inp, J = _height_inf_input()
    res = verify_fixed_point(inp, J, cap=20)
    assert res.status == VERIFIED_UP_TO_CAP
    assert "heuristic" in res.label()


def test_fixed_point_unit_ideal_refuted():
    inp, _ = _height_inf_input()
    res = verify_fixed_point(inp, [inp.ring.one()], cap=20)
    assert res.status == REFUTED
    assert not res


def test_fixed_point_missing_generator_refuted():
    inp, J = _height_inf_input()
    res = verify_fixed_point(inp, J[:-1], cap=20)
    assert res.status == REFUTED
    assert res.witness == inp.gens[0]


# -- splitting tuples -------------------------------------------------------


def test_splitting_tuple_f_split():
    f = R2.parse("x*y*z")
    assert verify_splitting_tuple(CIInput.build([f]), [f])


def test_splitting_tuple_condition_one():
    f = R2.parse("x^3+y^3+z^3")
    rep = verify_splitting_tuple(CIInput.build([f]), [f])
    assert not rep.ok and not rep.condition1


@pytest.mark.parametrize("text,p", [("z^2+x^3+y^5", 2), ("z^2+x^3+x*y^3", 2), ("z^2+x^3+y^5", 3)])
def test_splitting_tuple_from_certificate(text, p):
    inp = local(text, p)
    res = ci_height(inp)
    tup = splitting_tuple_from_certificate(inp, res.certificate)
    assert len(tup) == res.height
    assert verify_splitting_tuple(inp, tup)
    tampered = list(tup)
    tampered[-1] = tampered[-1] + inp.ring.var("x")
    assert not verify_splitting_tuple(inp, tampered)


def test_exact_divides():
    f = R2.parse("x^2+y*z")
    assert exact_divides(f * R2.parse("x+z^3"), f)
    assert not exact_divides(f + R2.one(), f)


# -- inequalities -------------------------------------------------------------


def test_principal_inequality_is_equality():
    inp = local("z^2+x^3+y^2*z")
    rep = ci_le_hypersurface_check(inp)
    assert rep.ok
    assert rep.ideal.height == rep.hypersurface.height == 2


def _not_divisible_by_linear(q, lin):
    return not exact_divides(q, lin)


def _random_pair(data, p, N):
    R = PolyRing.make(["x", "y", "z", "w"][:N], p)
    d1 = data.draw(st.integers(1, N // 2))
    f1 = data.draw(homogeneous(R, d1, max_terms=4))
    f2 = data.draw(homogeneous(R, N - d1, max_terms=5))
    if d1 == 1:
        assume(not exact_divides(f2, f1))
    else:
        from sympy import Poly, gcd, symbols

        syms = symbols(R.names)
        to = lambda a: Poly(sum(c * __import__("math").prod(s**e for s, e in zip(syms, k)) for k, c in a.terms.items()), *syms, modulus=p)
        assume(gcd(to(f1), to(f2)).total_degree() == 0)
    return R, f1, f2


@pytest.mark.filterwarnings("ignore:generators may not")
@settings(max_examples=70, **SLOW)
@given(data=st.data(), N=st.sampled_from([3, 4]))
def test_ci_le_hypersurface_random_p2(data, N):
    _, f1, f2 = _random_pair(data, 2, N)
    rep = ci_le_hypersurface_check(CIInput.build([f1, f2], mode=GRADED))
    assert rep.ok


@pytest.mark.filterwarnings("ignore:generators may not")
@settings(max_examples=50, **SLOW)
@given(data=st.data())
def test_ci_le_hypersurface_random_p3(data):
    _, f1, f2 = _random_pair(data, 3, 3)
    rep = ci_le_hypersurface_check(CIInput.build([f1, f2], mode=GRADED))
    assert rep.ok


# -- fiber products -----------------------------------------------------------


RJ = PolyRing.make("x y z a b c", 2)


def test_fiber_product_of_height_two_cubics_is_infinite():
    f = RJ.parse("x^3+y^3+z^3") * RJ.parse("a^3+b^3+c^3")
    assert cy_height(f).verdict == INFINITE


def test_fiber_product_with_f_split_factor_keeps_height():
    f = RJ.parse("x^3+y^3+z^3") * RJ.parse("a*b*c")
    res = cy_height(f)
    assert res.verdict == FINITE and res.height == 2
