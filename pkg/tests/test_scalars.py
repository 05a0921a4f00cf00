import decimal
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distrep.scalars import (
    DualScalar,
    QuadScalar,
    approx_float,
    dual_floor_index,
    format_rational,
    isqrt,
    parse_rational,
    quad_sign,
    scalar_floor,
    sign,
)

fractions_st = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=40
)
radicands = st.sampled_from([Fraction(2), Fraction(3), Fraction(5), Fraction(1, 2), Fraction(7, 3)])


def test_isqrt_examples():
    assert isqrt(0) == 0
    assert isqrt(9) == 3
    assert isqrt(17) == 4  # 4^2 <= 17 < 5^2
    with pytest.raises(ValueError):
        isqrt(-1)


def test_isqrt_exact_boundaries():
    for s in range(1, 10_001):
        assert isqrt(s * s) == s
        assert isqrt(s * s - 1) == s - 1


def test_quad_sign_examples():
    assert quad_sign(QuadScalar(0, 0, 2)) == 0
    assert quad_sign(QuadScalar(-1, 1, 2)) == 1  # sqrt(2) > 1
    # 3 - 2*sqrt(2) ~ 0.1716 > 0
    assert quad_sign(QuadScalar(3, -2, 2)) == 1


def test_quad_sign_against_200_digit_decimal():
    rng = random.Random(7)
    ms = [Fraction(2), Fraction(3), Fraction(5), Fraction(7, 2), Fraction(13)]
    with decimal.localcontext() as ctx:
        ctx.prec = 210
        for _ in range(10_000):
            a = Fraction(rng.randint(-400, 400), rng.randint(1, 60))
            b = Fraction(rng.randint(-400, 400), rng.randint(1, 60))
            m = ms[rng.randrange(len(ms))]
            x = QuadScalar(a, b, m)
            da = decimal.Decimal(a.numerator) / decimal.Decimal(a.denominator)
            db = decimal.Decimal(b.numerator) / decimal.Decimal(b.denominator)
            dm = decimal.Decimal(m.numerator) / decimal.Decimal(m.denominator)
            val = da + db * dm.sqrt()
            expected = 0 if val == 0 else (1 if val > 0 else -1)
            assert quad_sign(x) == expected, (a, b, m)


@given(fractions_st, fractions_st, radicands)
def test_quad_field_identities(a, b, m):
    x = QuadScalar(a, b, m)
    y = QuadScalar(b, a, m)
    assert (x + y) - y == x
    assert x * 1 == x
    assert quad_sign(x) * quad_sign(-x) in (0, -1)
    assert quad_sign(x * x) >= 0
    if quad_sign(x) != 0:
        assert x * (1 / x) == 1


@given(fractions_st, fractions_st, fractions_st, radicands)
def test_quad_order_is_total_and_transitive(a, b, c, m):
    xs = [QuadScalar(a, b, m), QuadScalar(b, c, m), QuadScalar(c, a, m)]
    xs.sort()
    assert xs[0] <= xs[1] <= xs[2]
    if xs[0] < xs[1] and xs[1] < xs[2]:
        assert xs[0] < xs[2]


@given(
    st.fractions(max_denominator=30),
    st.fractions(max_denominator=30),
)
def test_rational_order_matches_cross_multiplication(p, q):
    lhs = p < q
    rhs = p.numerator * q.denominator < q.numerator * p.denominator
    assert lhs == rhs
    assert (p < q) or (q < p) or (p == q)


@given(fractions_st, fractions_st, fractions_st, fractions_st)
def test_dual_arithmetic_identities(v1, e1, v2, e2):
    x = DualScalar(v1, e1)
    y = DualScalar(v2, e2)
    assert (x + y) - y == x
    prod = x * y
    assert prod.value == v1 * v2
    assert prod.eps == v1 * e2 + v2 * e1  # first-order truncation
    if v2 != 0:
        back = (x / y) * y
        assert back == x


@given(
    st.lists(st.tuples(fractions_st, fractions_st), min_size=3, max_size=3)
)
def test_dual_order_lexicographic_and_transitive(triple):
    xs = [DualScalar(v, e) for v, e in triple]
    xs.sort()
    assert xs[0] <= xs[1] <= xs[2]
    a, b = xs[0], xs[2]
    if a < xs[1] and xs[1] < b:
        assert a < b
    # lexicographic: value decides first
    assert DualScalar(1, -999) > DualScalar(0, 999)


def test_dual_floor_index_examples():
    assert dual_floor_index(DualScalar(Fraction(5), 0), Fraction(2)) == 2
    assert dual_floor_index(DualScalar(Fraction(6), 1), Fraction(2)) == 3
    assert dual_floor_index(DualScalar(Fraction(6), -1), Fraction(2)) == 2


def test_dual_floor_index_quad_unit():
    # unit sqrt(2): 3*sqrt(2) ~ 4.24; x = 4 -> index 2
    unit = QuadScalar.sqrt_of(2)
    assert dual_floor_index(DualScalar(Fraction(4), 0), unit) == 2
    # exactly on 2*sqrt(2) with negative perturbation drops to 1
    x = DualScalar(QuadScalar(0, 2, 2), QuadScalar(-1, 0, 2))
    assert dual_floor_index(x, unit) == 1


def test_scalar_floor_quad():
    assert scalar_floor(QuadScalar(Fraction(1, 2), 1, 2)) == 1
    assert scalar_floor(QuadScalar(0, -1, 2)) == -2  # -1.414...
    assert scalar_floor(QuadScalar(0, 3, 4)) == 6  # perfect square folds
    assert scalar_floor(Fraction(7, 2)) == 3
    assert scalar_floor(Fraction(-7, 2)) == -4


def test_parse_and_format_round_trip():
    for text in ["3/4", "5", "-7/3", "0"]:
        assert format_rational(parse_rational(text)) == text
    with pytest.raises(ValueError):
        parse_rational("x/y")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_approx_float_accuracy():
    x = QuadScalar(Fraction(1, 3), Fraction(2, 7), 2)
    approx = approx_float(x)
    exact = 1 / 3 + (2 / 7) * 2 ** 0.5
    assert abs(approx - exact) < 1e-12
    assert approx_float(Fraction(22, 7)) == 22 / 7


def test_sign_helper_spans_types():
    assert sign(Fraction(-3, 2)) == -1
    assert sign(0) == 0
    assert sign(QuadScalar(0, 1, 2)) == 1
    assert sign(DualScalar(Fraction(0), Fraction(-1))) == -1


def test_mixed_radicands_rejected():
    with pytest.raises(ValueError):
        QuadScalar(0, 1, 2) + QuadScalar(0, 1, 3)


def test_perfect_square_radicand_normalizes():
    x = QuadScalar(1, 3, 4)  # 1 + 3*2
    assert x.is_rational and x.a == 7
    y = QuadScalar(0, 2, Fraction(9, 4))  # 2 * 3/2
    assert y == 3
