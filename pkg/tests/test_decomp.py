from math import prod

import pytest

from orbitclosure.arith import CycloNum
from orbitclosure.decomp import (
    NoIdentityComponent,
    NotInClass,
    identity_component,
    is_binomial_ideal,
    min_primes_binomial_class,
)
from orbitclosure.poly import Ideal, Poly, ideal_equal, intersect, parse_poly, saturate

VARS2X2 = ("x", "z", "w", "y")


def ideal(vars, *texts):
    vars = tuple(vars)
    return Ideal([parse_poly(t, vars) for t in texts], vars)


def reassemble(D):
    out = D.components[0]
    for c in D.components[1:]:
        out = intersect(out, c)
    return out


def laurent(I, skip=()):
    m = prod((Poly.var(I.vars, v) for v in I.vars if v not in skip), start=Poly.const(I.vars, 1))
    return saturate(I, m)


def test_is_binomial_ideal():
    assert is_binomial_ideal(ideal("xy", "x^2 - y"))
    assert not is_binomial_ideal(ideal("xy", "x^2 + y + 1"))
    I = ideal(VARS2X2, "w", "z", "(y^2 - x)*(x^2 - y)")
    assert not is_binomial_ideal(I)
    assert any(len(g.terms) == 4 for g in I.groebner())


def test_cyclic2x2_components():
    I = ideal(VARS2X2, "w", "z", "(y^2 - x)*(x^2 - y)")
    D = min_primes_binomial_class(I)
    got = sorted(c.canonical_strings() for c in D.components)
    expected = sorted(ideal(VARS2X2, *g).canonical_strings() for g in (("w", "z", "y^2 - x"), ("w", "z", "x^2 - y")))
    assert got == expected
    P0 = identity_component(D)
    assert P0.canonical_strings() in expected
    assert P0.canonical_strings() == D.components[0].canonical_strings()


def test_prime_binomial_is_single_component():
    I = ideal("xy", "x^2 - y")
    D = min_primes_binomial_class(I)
    assert len(D.components) == 1
    assert ideal_equal(D.components[0], I)
    assert identity_component(D) is D.components[0]


def test_laurent_line():
    D = min_primes_binomial_class(ideal("x", "x^2 - 1"))
    assert sorted(c.canonical_strings() for c in D.components) == [("x + 1",), ("x - 1",)]
    assert identity_component(D).canonical_strings() == ("x - 1",)


def test_no_identity_component():
    with pytest.raises(NoIdentityComponent):
        identity_component(min_primes_binomial_class(ideal("x", "x + 1")))


def test_sign_cosets_four_cosets():
    I = ideal(("x1", "x2", "x3"), "x1^2 - x3^2", "x2^2 - x3^2")
    D = min_primes_binomial_class(I)
    assert len(D.components) == 4
    assert ideal_equal(laurent(reassemble(D)), laurent(I))


def test_cyclotomic_components():
    D = min_primes_binomial_class(ideal("xy", "x^3 - y^3"), q=3)
    assert len(D.components) == 3
    assert D.general_coefficients
    coeffs = [c for comp in D.components for g in comp.generators for c in g.terms.values()]
    assert any(isinstance(c, CycloNum) for c in coeffs)


def test_not_in_class():
    with pytest.raises(NotInClass):
        min_primes_binomial_class(ideal("xy", "x^2 + y^2 - 1"))


def test_components_pairwise_incomparable_and_binomial():
    I = ideal(("x", "y", "z"), "(x - y)*(x*y - 1)", "z^2 - 1")
    D = min_primes_binomial_class(I)
    for i, a in enumerate(D.components):
        assert is_binomial_ideal(a)
        for j, b in enumerate(D.components):
            if i != j:
                assert not all(b.contains(g) for g in a.generators)
    assert ideal_equal(laurent(reassemble(D)), laurent(I))


def test_zero_variables_kept():
    I = ideal(VARS2X2, "w", "z", "x - y")
    D = min_primes_binomial_class(I)
    assert D.zero_vars == ("z", "w")
    assert identity_component(D).canonical_strings() == I.canonical_strings()


def test_json():
    D = min_primes_binomial_class(ideal("x", "x^2 - 1"))
    assert D.to_json() == [["x + 1"], ["x - 1"]]


def test_union_of_permuted_curves():
    # (t, t, t^2), (t, t^2, t), (t^2, t, t): no basis element has a binomial divisor
    V = ("a", "b", "c")
    curves = [ideal(V, "a - b", "c - a^2"), ideal(V, "a - c", "b - a^2"), ideal(V, "b - c", "a - b^2")]
    I = intersect(intersect(curves[0], curves[1]), curves[2])
    D = min_primes_binomial_class(I)
    assert sorted(c.canonical_strings() for c in D.components) == sorted(c.canonical_strings() for c in curves)
