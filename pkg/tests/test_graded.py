from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from erjw.errors import MathInvariantError, NonUnitDivisionError
from erjw.graded import GradedSeries, GradingSpec, parse_series
from erjw.scalar2 import TwoLocal

HAT2 = GradingSpec(n=2, q=2, roots=2, alphabet="hat")
STD2 = GradingSpec(n=2, q=2, roots=2, alphabet="standard")


def test_lambda_and_offset_values():
    assert GradingSpec(1).lam == 1
    assert GradingSpec(2).lam == 17
    assert GradingSpec(3).lam == 97
    assert GradingSpec(1).hat_offset == 0
    assert GradingSpec(2).hat_offset == 8
    assert GradingSpec(3).hat_offset == 48
    for n in range(1, 7):
        spec = GradingSpec(n)
        assert spec.lam - 1 == 2 * spec.hat_offset
        assert spec.lam + 1 == 2 * (2 ** n - 1) ** 2


def test_hat_degrees_n2():
    spec = GradingSpec(2, q=1, roots=1)
    vh1 = GradedSeries.gen(spec, "vh1")
    vn = GradedSeries.gen(spec, "vn")
    c1 = GradedSeries.gen(spec, "c1")
    x1 = GradedSeries.gen(spec, "x1")
    y = GradedSeries.gen(spec, "y")
    assert vh1.internal_degree() == 16
    assert vn.internal_degree() == -6
    assert (vn ** 8).internal_degree() == -48
    assert c1.internal_degree() == -16
    assert x1.internal_degree() == -16
    assert y.internal_degree() == 0
    mixed = GradedSeries.monomial(spec, y=1, vh=(1,), vn=-1)
    assert mixed.internal_degree() == 22
    key = next(iter((vh1 * y).terms))
    assert spec.total_of(key) == -1
    # the top hat generator is vn^-P and sits where the k = n formula says
    vhat_n = GradedSeries.monomial(spec, vn=-spec.hat_offset)
    assert vhat_n.internal_degree() == (2 ** 2 - 1) * (spec.lam - 1) == 48


def test_standard_degrees():
    spec = GradingSpec(3, q=2, roots=1, alphabet="standard")
    assert GradedSeries.gen(spec, "v1").internal_degree() == -2
    assert GradedSeries.gen(spec, "v2").internal_degree() == -6
    assert GradedSeries.gen(spec, "v3").internal_degree() == -14
    assert GradedSeries.gen(spec, "c2").internal_degree() == 4
    assert GradedSeries.gen(spec, "x1").internal_degree() == 2
    assert GradedSeries.gen(spec, "v3", exp=16).internal_degree() == -224


def test_periodicity_degrees():
    for n, period in [(1, -8), (2, -48), (3, -224)]:
        spec = GradingSpec(n)
        g = GradedSeries.monomial(spec, vn=2 ** (n + 1))
        assert g.internal_degree() == period


def test_weight_and_truncation():
    spec = GradingSpec(2, q=2, roots=1)
    c2 = GradedSeries.gen(spec, "c2")
    x1 = GradedSeries.gen(spec, "x1")
    s = c2 * c2 + x1 + 1
    assert spec.weight_of(next(iter((c2 * c2).terms))) == 4
    t = s.truncated(3)
    assert t == x1 + 1
    assert t.trunc == 3
    # products combine truncation bounds by min
    u = t * (c2.truncated(5))
    assert u.trunc == 3
    assert u == (x1 * c2 + c2).truncated(3)
    assert (c2 * c2).truncated(3).is_zero


def test_mul_respects_truncation_content():
    spec = GradingSpec(1, q=1, roots=0)
    c1 = GradedSeries.gen(spec, "c1")
    a = (1 + c1).truncated(4)
    b = sum((c1 ** k for k in range(5)), GradedSeries.zero(spec, 4))
    prod = a * b
    expect = (1 + 2 * c1 + 2 * c1 ** 2 + 2 * c1 ** 3 + 2 * c1 ** 4).truncated(4)
    assert prod == expect


def test_add_filters_against_combined_bound():
    spec = GradingSpec(1, q=1)
    c1 = GradedSeries.gen(spec, "c1")
    narrow = GradedSeries.unit(spec, 1, trunc=1)
    wide = (c1 ** 3).truncated(5)
    s = narrow + wide
    assert s.trunc == 1
    assert s == GradedSeries.unit(spec, 1)


def test_pow_and_monomial_inverse():
    spec = GradingSpec(2)
    vn = GradedSeries.gen(spec, "vn")
    assert (vn ** 0) == GradedSeries.unit(spec)
    assert vn ** -3 == GradedSeries.monomial(spec, vn=-3)
    two_vn = GradedSeries.monomial(spec, coeff=TwoLocal(2), vn=1)
    with pytest.raises(NonUnitDivisionError):
        two_vn.monomial_inverse()
    vh1 = GradedSeries.gen(spec, "vh1")
    with pytest.raises(MathInvariantError):
        vh1.monomial_inverse()
    with pytest.raises(MathInvariantError):
        (vn + vh1).monomial_inverse()


def test_conjugate():
    spec = GradingSpec(2, q=1)
    vn = GradedSeries.gen(spec, "vn")
    vh1 = GradedSeries.gen(spec, "vh1")
    c1 = GradedSeries.gen(spec, "c1")
    s = vn * c1 + vh1 + vn ** 2
    assert s.conjugate() == -vn * c1 + vh1 + vn ** 2
    assert s.conjugate().conjugate() == s
    std = GradingSpec(2, alphabet="standard")
    v1 = GradedSeries.gen(std, "v1")
    v2 = GradedSeries.gen(std, "v2")
    assert (v1 * v2).conjugate() == v1 * v2
    assert (v1 + v2).conjugate() == -(v1 + v2)
    # hat conjugation fixes the represented top hat generator (even offset)
    vhat2 = GradedSeries.monomial(spec, vn=-spec.hat_offset)
    assert vhat2.conjugate() == vhat2


def test_regrade_to_hat_degrees_scale():
    spec = GradingSpec(2, q=1, roots=1, alphabet="standard")
    hat = GradingSpec(2, q=1, roots=1, alphabet="hat")
    scale = (1 - spec.lam) // 2
    s = GradedSeries(spec, {
        (0, (1,), 3, (0,), (0,)): TwoLocal(3),
        (2, (0,), -1, (2,), (1,)): TwoLocal(1, 5),
    })
    h = s.regrade_to_hat()
    assert h.spec == hat
    assert len(h.terms) == 2
    std_keys = sorted(s.terms)
    hat_keys = sorted(h.terms)
    for sk, hk in zip(std_keys, hat_keys):
        assert hat.degree_of(hk) == spec.degree_of(sk) * scale
        assert hk[0] == sk[0]  # filtration untouched


def test_regrade_n1_collapses():
    spec = GradingSpec(1, alphabet="standard")
    s = GradedSeries(spec, {
        (0, (), 2, (), ()): TwoLocal(3),
        (0, (), 5, (), ()): TwoLocal(5),
        (1, (), 1, (), ()): TwoLocal(1),
    })
    h = s.regrade_to_hat()
    assert h == GradedSeries(GradingSpec(1), {
        (0, (), 0, (), ()): TwoLocal(8),
        (1, (), 0, (), ()): TwoLocal(1),
    })
    cancel = GradedSeries(spec, {
        (0, (), 2, (), ()): TwoLocal(1),
        (0, (), 4, (), ()): TwoLocal(-1),
    })
    assert cancel.regrade_to_hat().is_zero


def test_divide_by_key():
    spec = GradingSpec(2, roots=2)
    x1 = GradedSeries.gen(spec, "x1")
    x2 = GradedSeries.gen(spec, "x2")
    s = (x1 * x1 * x2 + 3 * x1 * x2).truncated(5)
    key = next(iter(x1.terms))
    d = s.divide_by_key(key)
    assert d == x1 * x2 + 3 * x2
    assert d.trunc == 4
    with pytest.raises(MathInvariantError):
        (x2 + x1).divide_by_key(key)


def test_extended_to():
    small = GradingSpec(2, q=1)
    big = GradingSpec(2, q=2, roots=1)
    s = GradedSeries.gen(small, "c1") + 2
    e = s.extended_to(big)
    assert e.spec == big
    assert e == GradedSeries.gen(big, "c1") + 2
    with pytest.raises(ValueError):
        e.extended_to(small)


def test_homogeneous_parts():
    spec = GradingSpec(2)
    vn = GradedSeries.gen(spec, "vn")
    vh1 = GradedSeries.gen(spec, "vh1")
    s = vn + vh1
    assert not s.is_homogeneous()
    with pytest.raises(MathInvariantError):
        s.internal_degree()
    assert s.homogeneous_part(-6) == vn
    assert s.homogeneous_part(16) == vh1
    assert s.homogeneous_part(3).is_zero
    assert sorted(s.degrees()) == [-6, 16]


def test_key_validation():
    spec = GradingSpec(2, q=1)
    with pytest.raises(ValueError):
        GradedSeries(spec, {(-1, (0,), 0, (0,), ()): 1})
    with pytest.raises(ValueError):
        GradedSeries(spec, {(0, (0, 0), 0, (0,), ()): 1})
    with pytest.raises(ValueError):
        GradedSeries(spec, {(0, (-1,), 0, (0,), ()): 1})
    with pytest.raises(ValueError):
        GradedSeries(spec, {(0, (0,), 0, (-1,), ()): 1})
    with pytest.raises(ValueError):
        GradedSeries.gen(spec, "nope")


def test_str_and_parse_round_trip():
    spec = GradingSpec(2, q=2, roots=1)
    s = GradedSeries(spec, {
        (0, (0,), 0, (0, 0), (0,)): TwoLocal(3, 5),
        (1, (2,), -3, (0, 0), (0,)): TwoLocal(-1),
        (0, (0,), 0, (1, 0), (0,)): TwoLocal(1),
        (2, (0,), 1, (0, 2), (1,)): TwoLocal(-7),
    })
    text = str(s)
    assert text == "3/5 + c1 + -vh1^2*vn^-3*y + -7*vn*y^2*c2^2*x1"
    back = parse_series(text, spec)
    assert back == s
    assert parse_series("0", spec).is_zero
    assert str(GradedSeries.zero(spec)) == "0"


def test_parse_fraction_coefficients():
    spec = GradingSpec(1, q=1, alphabet="standard")
    s = GradedSeries(spec, {(0, (), 1, (1,), ()): Fraction(-3, 7)})
    assert parse_series(str(s), spec, coeff_type=Fraction) == s


small_exps = st.integers(0, 2)
keys2 = st.tuples(small_exps,
                  st.tuples(small_exps),
                  st.integers(-2, 2),
                  st.tuples(small_exps, small_exps),
                  st.tuples(small_exps, small_exps))
series2 = st.dictionaries(keys2, st.integers(-4, 4), max_size=3).map(
    lambda t: GradedSeries(HAT2, t))


@settings(max_examples=60)
@given(series2, series2, series2)
def test_series_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == GradedSeries.zero(HAT2)


@settings(max_examples=40)
@given(series2, series2)
def test_conjugate_is_ring_map(a, b):
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert (a + b).conjugate() == a.conjugate() + b.conjugate()
    assert a.conjugate().conjugate() == a


@settings(max_examples=40)
@given(st.dictionaries(keys2, st.integers(-4, 4), max_size=3),
       st.dictionaries(keys2, st.integers(-4, 4), max_size=3))
def test_regrade_is_ring_map(ta, tb):
    a = GradedSeries(STD2, ta)
    b = GradedSeries(STD2, tb)
    assert (a * b).regrade_to_hat() == a.regrade_to_hat() * b.regrade_to_hat()
    assert (a + b).regrade_to_hat() == a.regrade_to_hat() + b.regrade_to_hat()


def test_mixing_coefficient_fields_raises():
    spec = GradingSpec(1)
    a = GradedSeries.unit(spec, TwoLocal(1, 3))
    b = GradedSeries.unit(spec, Fraction(1, 2))
    with pytest.raises(TypeError):
        _ = a + b
    with pytest.raises(TypeError):
        _ = a * b
