import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from qfsheight.delta import delta1, delta1_multinomial, delta_n_rep
from qfsheight.frobenius import equal_mod_frobenius, normal_form_mod_frobenius
from qfsheight.polyring import Grading, PolyError, PolyRing, SparsePoly, degree, lift_terms, power
from qfsheight.wittlab import delta_oracle, delta_witt, small_deltas, teichmuller, witt_add
from strategies import homogeneous, polys, ring

SLOW = dict(deadline=None, suppress_health_check=[HealthCheck.too_slow])

R2 = PolyRing.make("x y z", 2)


@pytest.mark.parametrize(
    "f,expected",
    [
        ("x^3+y^3+z^3", "x^3*y^3+x^3*z^3+y^3*z^3"),
        ("x^2+y^3+z^5", "x^2*y^3+x^2*z^5+y^3*z^5"),
    ],
)
def test_delta1_examples(f, expected):
    assert delta1(R2.parse(f)).value == R2.parse(expected)


@pytest.mark.parametrize("n", range(2, 9))
def test_delta1_d_type(n):
    f = R2.parse(f"z^2+x^2*y+x*y^{n}")
    expected = R2.parse(f"x^2*y*z^2+x*y^{n}*z^2+x^3*y^{n + 1}")
    assert delta1(f).value == expected


def test_delta1_single_term_is_zero():
    assert delta1(PolyRing.make("x y", 5).parse("3*x^2*y^7")).value.is_zero()


def test_multinomial_examples():
    assert delta1_multinomial(PolyRing.make("x y", 2).parse("x+y")).value == PolyRing.make("x y", 2).parse("x*y")
    R3 = PolyRing.make("x y z", 3)
    expected = R3.parse("x^2*y+x^2*z+x*y^2+y^2*z+x*z^2+y*z^2+2*x*y*z")
    assert delta1_multinomial(R3.parse("x+y+z")).value == expected


def test_multinomial_guard():
    R = PolyRing.make("x", 13)
    many = SparsePoly(R, {(i,): 1 for i in range(40)})
    with pytest.raises(PolyError):
        delta1_multinomial(many)


def test_delta_n_rep_examples():
    f = R2.parse("x^3+y^3+z^3")
    assert delta_n_rep(f, 1).value == delta1(f).value
    assert delta_n_rep(f, 2).value == power(f, 2) * R2.parse("x^3*y^3+x^3*z^3+y^3*z^3")
    with pytest.raises(PolyError):
        delta_n_rep(f, 0)


def test_rejects_non_field_input():
    with pytest.raises(PolyError):
        delta1(PolyRing.make("x", 2, 2).parse("x+1"))


@pytest.mark.parametrize("p", [2, 3, 5])
@settings(max_examples=500, **SLOW)
@given(data=st.data())
def test_three_way_agreement(p, data):
    a = data.draw(polys(ring(p), max_terms=4, max_exp=3))
    d = delta1(a).value
    assert equal_mod_frobenius(d, delta1_multinomial(a).value)
    assert equal_mod_frobenius(d, small_deltas(a, 1)[0])


@pytest.mark.parametrize("p", [2, 3, 5])
@settings(max_examples=200, **SLOW)
@given(data=st.data())
def test_leibniz(p, data):
    R = ring(p)
    a = data.draw(polys(R, max_terms=4, max_exp=3))
    b = data.draw(polys(R, max_terms=4, max_exp=3))
    lhs = delta1(a * b).value
    rhs = power(a, p) * delta1(b).value + power(b, p) * delta1(a).value
    assert equal_mod_frobenius(lhs, rhs)


@pytest.mark.parametrize("p", [2, 3, 5])
@settings(max_examples=200, **SLOW)
@given(data=st.data())
def test_pth_power_absorption(p, data):
    # absorption holds for the Witt-level Delta: Delta_W([a] + [g^p]) = Delta_W([a])
    R = ring(p)
    a = data.draw(polys(R, max_terms=4, max_exp=3))
    g = data.draw(polys(R, max_terms=3, max_exp=2))
    shifted = witt_add(teichmuller(a, 2), teichmuller(power(g, p), 2))
    assert equal_mod_frobenius(delta_witt(shifted)[0], delta1(a).value)


def test_absorption_is_not_termwise_additive():
    R = PolyRing.make("z", 5)
    z = R.var("z")
    assert not equal_mod_frobenius(delta1(z + R.one()).value, delta1(z).value)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@settings(max_examples=200, **SLOW)
@given(data=st.data())
def test_lift_independence(p, data):
    a = data.draw(polys(ring(p), max_terms=5, max_exp=3))
    shifts = {k: data.draw(st.integers(0, p - 1)) for k in a.terms}
    L = SparsePoly(a.ring.with_precision(2), {k: c + p * shifts[k] for k, c in a.terms.items()})
    q = p * p
    diff = dict(power(L, p).terms)
    for k, c in L.terms.items():
        kk = tuple(x * p for x in k)
        diff[kk] = (diff.get(kk, 0) - pow(c, p, q)) % q
    assert all(c % p == 0 for c in diff.values())
    recomputed = SparsePoly(a.ring, {k: c // p for k, c in diff.items()})
    assert recomputed == delta1(a).value


@pytest.mark.parametrize("p", [2, 3, 5])
@settings(max_examples=200, **SLOW)
@given(data=st.data(), d=st.integers(1, 4))
def test_homogeneity(p, data, d):
    R = ring(p)
    a = data.draw(homogeneous(R, d))
    g = Grading.standard(3)
    rep = delta1(a, g)
    assert rep.homogeneous_degree == (p * d,)
    if rep.value:
        assert degree(rep.value, g) == (p * d,)


@pytest.mark.parametrize("p,n,terms", [(2, 2, 6), (2, 3, 6), (3, 2, 6), (3, 3, 3)])
@settings(max_examples=40, **SLOW)
@given(data=st.data())
def test_delta_formula_against_witt(p, n, terms, data):
    R = PolyRing.make("x y", p)
    f = data.draw(polys(R, max_terms=terms, max_exp=2))
    assume(len(f) <= terms)
    assert equal_mod_frobenius(delta_n_rep(f, n).value, delta_oracle(f, n))


@settings(max_examples=100, **SLOW)
@given(data=st.data())
def test_normal_form_is_idempotent(data):
    a = data.draw(polys(ring(3), max_exp=6))
    nf = normal_form_mod_frobenius(a)
    assert normal_form_mod_frobenius(nf) == nf
    assert equal_mod_frobenius(a, nf)
