from fractions import Fraction
from math import gcd

import pytest

from orbitclosure.arith import (
    ConductorMismatch,
    CycloNum,
    cyclo_field_op,
    cyclotomic_poly,
    euler_phi,
    format_rat,
    parse_rat,
    zeta_pow,
)


@pytest.mark.parametrize("q, coeffs", [(1, [-1, 1]), (2, [1, 1]), (4, [1, 0, 1]),
                                       (3, [1, 1, 1]), (12, [1, 0, -1, 0, 1])])
def test_cyclotomic_poly(q, coeffs):
    assert cyclotomic_poly(q) == coeffs


def test_cyclotomic_poly_divides_x_to_the_q():
    # x^q - 1 is the product of Phi_d over d | q
    for q in range(1, 13):
        prod = [1]
        for d in range(1, q + 1):
            if q % d == 0:
                f = cyclotomic_poly(d)
                out = [0] * (len(prod) + len(f) - 1)
                for i, a in enumerate(prod):
                    for j, b in enumerate(f):
                        out[i + j] += a * b
                prod = out
        assert prod == [-1] + [0] * (q - 1) + [1]
        assert len(cyclotomic_poly(q)) - 1 == euler_phi(q)


def test_field_ops_examples():
    z4 = CycloNum.zeta(4)
    assert cyclo_field_op(z4, z4, "mul") == -1
    assert cyclo_field_op(CycloNum.from_rat(2, 1), CycloNum.zeta(2), "add") == 0
    assert cyclo_field_op(z4, zeta_pow(4, 3), "mul") == 1
    assert cyclo_field_op(z4, z4, "div") == 1


def test_conductor_mismatch_and_division_by_zero():
    with pytest.raises(ConductorMismatch):
        cyclo_field_op(CycloNum.zeta(3), CycloNum.zeta(4), "add")
    with pytest.raises(ConductorMismatch):
        CycloNum.zeta(3) + CycloNum.zeta(4)
    with pytest.raises(ZeroDivisionError):
        cyclo_field_op(CycloNum.zeta(3), CycloNum(3), "div")


def test_zeta_pow():
    assert zeta_pow(2, 1) == -1
    for q in (1, 3, 5, 8):
        assert zeta_pow(q, 0) == 1
    assert zeta_pow(4, 3) == -CycloNum.zeta(4)
    assert zeta_pow(4, 3) == CycloNum.zeta(4) * CycloNum.zeta(4) * CycloNum.zeta(4)
    assert zeta_pow(6, -1) == zeta_pow(6, 5)


@pytest.mark.parametrize("q", range(1, 13))
def test_zeta_pow_order(q):
    for k in range(q):
        z = zeta_pow(q, k)
        assert z * zeta_pow(q, q - k) == 1
        order = q // gcd(q, k)
        assert z ** order == 1
        assert all(z ** m != 1 for m in range(1, order))


def test_rational_embedding_round_trip():
    for x in (Fraction(0), Fraction(-7, 3), Fraction(5)):
        for q in (1, 3, 7):
            c = CycloNum.from_rat(q, x)
            assert c.is_rational() and c.to_rat() == x
    with pytest.raises(ValueError):
        CycloNum.zeta(4).to_rat()


def test_field_axioms_random(rng):
    def rand(q):
        return CycloNum(q, [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(euler_phi(q))])

    for _ in range(200):
        q = rng.choice([1, 2, 3, 4, 5, 6, 8, 12])
        a, b, c = rand(q), rand(q), rand(q)
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        if a:
            assert a * a.inverse() == 1
            assert (b / a) * a == b


def test_string_round_trip():
    x = CycloNum(12, [Fraction(1, 2), 3, 0, Fraction(-5, 7)])
    assert str(x).startswith("q=12;")
    assert CycloNum.parse(str(x)) == x
    assert str(CycloNum.parse("q=4; 1/2 + 3*zeta")) == "q=4; 1/2 + 3*zeta"
    assert CycloNum.parse("q=4; -zeta") == -CycloNum.zeta(4)
    assert parse_rat(format_rat(Fraction(-3, 4))) == Fraction(-3, 4)
    assert format_rat(Fraction(6, 3)) == "2"


def test_immutable():
    z = CycloNum.zeta(3)
    with pytest.raises(AttributeError):
        z.q = 4
    assert hash(CycloNum.from_rat(5, 2)) == hash(Fraction(2))
