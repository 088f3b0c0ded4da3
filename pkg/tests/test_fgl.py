from fractions import Fraction

import pytest

from erjw.errors import (
    ConstantTermError,
    IntegralityError,
    MathInvariantError,
    PrecisionError,
)
from erjw.fgl import GroupLaw, ToyLaw, UniSeries, additive_law
from erjw.graded import GradedSeries, GradingSpec
from erjw.scalar2 import TwoLocal

SPEC1 = GradingSpec(1, alphabet="standard")
SPEC2 = GradingSpec(2, alphabet="standard")

LAW1 = GroupLaw(1, precision=8)
LAW2 = GroupLaw(2, precision=8)


def _v(spec, i, exp=1, coeff=None):
    return GradedSeries.gen(spec, f"v{i}", exp=exp,
                            coeff=coeff if coeff is not None else TwoLocal(1))


def test_uniseries_arithmetic():
    u = UniSeries.identity(SPEC1, 6)
    s = u + u * u
    assert s[1] == GradedSeries.unit(SPEC1, 2) - 1
    sq = s * s
    assert sq[2] == GradedSeries.unit(SPEC1, 1)
    assert sq[3] == GradedSeries.unit(SPEC1, 2)
    assert sq[4] == GradedSeries.unit(SPEC1, 1)
    assert (u ** 3)[3] == GradedSeries.unit(SPEC1, 1)
    assert (u ** 3).order() == 3
    assert UniSeries.zero(SPEC1, 4).is_zero()


def test_uniseries_compose():
    u = UniSeries.identity(SPEC1, 6)
    s = u + u * u          # u + u^2
    t = s.compose(s)       # (u+u^2) + (u+u^2)^2 = u + 2u^2 + 2u^3 + u^4
    expect = UniSeries.from_terms(SPEC1, {1: 1, 2: 2, 3: 2, 4: 1}, 6)
    assert t == expect
    const = UniSeries.from_terms(SPEC1, {0: 1, 1: 1}, 6)
    with pytest.raises(ConstantTermError):
        u.compose(const)
    assert const.compose(s)[0] == GradedSeries.unit(SPEC1, 1)


def test_araki_logarithm_frozen():
    log = LAW2.log_series()
    assert log[1] == GradedSeries.unit(SPEC2, Fraction(1))
    assert log[2] == _v(SPEC2, 1, coeff=Fraction(-1, 2))
    assert log[4] == (_v(SPEC2, 2, coeff=Fraction(-1, 14))
                      + _v(SPEC2, 1, exp=3, coeff=Fraction(1, 28)))
    assert log[3].is_zero and log[5].is_zero


def test_exp_frozen_and_inverts():
    exp = LAW1.exp_series()
    assert exp[1] == GradedSeries.unit(SPEC1, Fraction(1))
    assert exp[2] == _v(SPEC1, 1, coeff=Fraction(1, 2))
    assert exp[3] == _v(SPEC1, 1, exp=2, coeff=Fraction(1, 2))
    # log(exp(t)) = t as well, not only the direction asserted internally
    log = LAW1.log_series()
    assert log.compose(exp) == UniSeries.identity(SPEC1, 8)


def test_law_table_frozen():
    t1 = LAW1.law_table()
    assert t1[(1, 1)] == _v(SPEC1, 1)
    assert t1[(2, 1)] == _v(SPEC1, 1, exp=2)
    assert (1, 0) in t1 and t1[(1, 0)] == GradedSeries.unit(SPEC1, 1)
    assert (2, 0) not in t1
    t2 = LAW2.law_table()
    assert t2[(1, 1)] == _v(SPEC2, 1)
    for (i, j), c in t2.items():
        assert c.internal_degree() == 2 - 2 * (i + j)


def test_hat_law_degrees():
    # with roots in degree 1-lam the whole law sits in degree 1-lam, so the
    # bare coefficient of x^i y^j must make up the difference
    lam = GradingSpec(2).lam
    for (i, j), c in LAW2.hat_law_table().items():
        assert c.internal_degree() == (1 - lam) * (1 - (i + j))
    table1 = LAW1.hat_law_table()
    assert table1[(1, 1)] == GradedSeries.unit(GradingSpec(1), 1)


def test_iota_frozen_and_dual_route():
    iota = LAW2.iota()
    assert iota[1] == GradedSeries.unit(SPEC2, -1)
    assert iota[2] == _v(SPEC2, 1)
    assert iota == LAW2.iota_by_inversion()
    assert LAW2.apply2(UniSeries.identity(SPEC2, 8), iota).is_zero()


def test_iota_is_involution():
    iota = LAW1.iota()
    assert iota.compose(iota) == UniSeries.identity(SPEC1, 8)


def test_k_series_basics():
    two = LAW2.k_series(2)
    assert two[1] == GradedSeries.unit(SPEC2, 2)
    assert two[2] == _v(SPEC2, 1)
    assert LAW2.k_series(1) == UniSeries.identity(SPEC2, 8)
    assert LAW2.k_series(0).is_zero()
    assert LAW2.k_series(-1) == LAW2.iota()
    for k in range(-3, 4):
        assert LAW2.k_series(k)[1] == GradedSeries.unit(SPEC2, k)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 2), (2, 3), (1, 4), (3, 3)])
def test_k_series_additivity(a, b):
    lhs = LAW2.apply2(LAW2.k_series(a), LAW2.k_series(b))
    assert lhs == LAW2.k_series(a + b)


def test_k_series_negation():
    assert LAW1.apply2(LAW1.k_series(3), LAW1.k_series(-3)).is_zero()


def test_araki_identity_dual_route():
    assert LAW1.araki_identity_holds()
    assert LAW2.araki_identity_holds()
    direct = LAW2.k_series(2)
    formal = LAW2.two_series_via_formal_sum()
    assert direct == formal
    assert formal[4].coefficient((0, (0,), 1, (), ())) == TwoLocal(1)


def _apply_series(law, a: GradedSeries, b: GradedSeries) -> GradedSeries:
    spec = a.spec
    out = GradedSeries.zero(spec, a.trunc)
    apow = {0: GradedSeries.unit(spec, 1, a.trunc)}
    bpow = {0: GradedSeries.unit(spec, 1, b.trunc)}

    def power(cache, base, e):
        while e not in cache:
            top = max(cache)
            cache[top + 1] = cache[top] * base
        return cache[e]

    bound = a.trunc if a.trunc is not None else law.precision
    for (i, j), c in sorted(law.law_table().items()):
        if i + j > bound:
            continue
        out = out + c.extended_to(spec) * power(apow, a, i) * power(bpow, b, j)
    return out


def test_law_is_associative_at_truncation():
    W = 5
    spec3 = GradingSpec(2, q=0, roots=3, alphabet="standard")
    x1 = GradedSeries.gen(spec3, "x1", trunc=W)
    x2 = GradedSeries.gen(spec3, "x2", trunc=W)
    x3 = GradedSeries.gen(spec3, "x3", trunc=W)
    left = _apply_series(LAW2, _apply_series(LAW2, x1, x2), x3)
    right = _apply_series(LAW2, x1, _apply_series(LAW2, x2, x3))
    assert not left.is_zero
    assert left == right


def test_evaluate_at():
    spec = GradingSpec(1, q=1, alphabet="standard")
    c1 = GradedSeries.gen(spec, "c1", trunc=2)
    got = LAW1.iota().evaluate_at(c1)
    v1 = GradedSeries.gen(spec, "v1")
    assert got == -c1 + v1 * c1 * c1
    with pytest.raises(PrecisionError):
        LAW1.iota().evaluate_at(GradedSeries.gen(spec, "c1", trunc=40))
    with pytest.raises(PrecisionError):
        LAW1.iota().evaluate_at(GradedSeries.gen(spec, "c1"))  # no bound
    with pytest.raises(ConstantTermError):
        LAW1.iota().evaluate_at(c1 + 1)
    deep = GradedSeries.gen(spec, "c1", exp=3, trunc=8)
    assert LAW1.iota().evaluate_at(deep).coefficient(
        (0, (), 0, (3,), ())) == TwoLocal(-1)


def test_toy_law_validation():
    with pytest.raises(MathInvariantError):
        ToyLaw(SPEC1, {(1, 0): 1, (0, 1): 1, (2, 1): 1}, 6)
    with pytest.raises(MathInvariantError):
        ToyLaw(SPEC1, {(1, 0): 2, (0, 1): 2}, 6)
    with pytest.raises(MathInvariantError):
        ToyLaw(SPEC1, {(0, 0): 1, (1, 0): 1, (0, 1): 1}, 6)


def test_additive_toy_law():
    add = additive_law(SPEC1, 6)
    u = UniSeries.identity(SPEC1, 6)
    assert add.apply2(u, u) == u + u
    assert add.iota() == -u
    assert add.k_series(5)[1] == GradedSeries.unit(SPEC1, 5)


def test_multiplicative_toy_law():
    mul = ToyLaw(SPEC1, {(1, 0): 1, (0, 1): 1, (1, 1): -1}, 8)
    # x + y - xy: inverse is -x/(1-x) = -(x + x^2 + x^3 + ...)
    iota = mul.iota()
    for m in range(1, 9):
        assert iota[m] == GradedSeries.unit(SPEC1, -1)
    # [2](u) = 2u - u^2, and [2] of the inverse composes to [-2]
    two = mul.k_series(2)
    assert two == UniSeries.from_terms(SPEC1, {1: 2, 2: -1}, 8)


def test_integrality_error_path():
    bad = UniSeries.from_terms(SPEC1, {1: Fraction(1, 2)}, 4)
    from erjw.fgl import _to_two_local
    with pytest.raises(IntegralityError):
        _to_two_local(bad[1])
