"""Independent reference computations used by the tests (sympy and brute force)."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import sympy

from orbitclosure.poly import Poly


def to_sympy(p: Poly, syms):
    expr = sympy.Integer(0)
    for exps, c in p.terms.items():
        c = Fraction(c)
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, exps):
            term *= s ** e
        expr += term
    return expr


def sympy_reduced_basis(polys, vars, order="grevlex"):
    """Reduced basis from sympy, normalized to monic and returned as sorted strings of expanded terms."""
    syms = sympy.symbols(vars)
    gens = [to_sympy(p, syms) for p in polys]
    G = sympy.groebner(gens, *syms, order=order)
    out = []
    for g in G.exprs:
        poly = sympy.Poly(g, *syms)
        lc = poly.coeffs(order=order)[0]
        out.append(sympy.Poly(g / lc, *syms).as_dict())
    return sorted(out, key=lambda d: sorted(d.items()))


def our_as_dicts(basis):
    out = []
    for g in basis:
        out.append({e: sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for e, c in g.terms.items()})
    return sorted(out, key=lambda d: sorted(d.items()))


def _frac(v):
    return tuple(x - (x.numerator // x.denominator) for x in v)


def _span(gens, start):
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _frac([a + b for a, b in zip(x, g)])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def torsion_group(rows):
    """Elements of the torsion of Z^d / span(rows), for linearly independent integer ``rows``.

    An element is a coefficient vector c in [0,1)^r with sum c_i a_i integral.
    Candidates come from the inverse of a nonsingular r x r minor.
    """
    A = sympy.Matrix(rows)
    r, d = A.shape
    for cols in combinations(range(d), r):
        M = A[:, list(cols)]
        if M.det() != 0:
            break
    Minv = M.inv()
    gens = [tuple(Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in Minv.row(i))
            for i in range(r)]
    zero = tuple(Fraction(0) for _ in range(r))
    out = []
    for c in _span([_frac(g) for g in gens], zero):
        v = [sum(ci * int(A[i, j]) for i, ci in enumerate(c)) for j in range(d)]
        if all(x.denominator == 1 for x in v):
            out.append(c)
    return out


def min_generators(elements):
    """Smallest k such that some k elements generate the finite group, by exhaustive search."""
    if len(elements) == 1:
        return 0
    zero = next(e for e in elements if not any(e))
    n = len(elements)
    for k in range(1, 5):
        for gens in combinations([e for e in elements if any(e)], k):
            if len(_span(gens, zero)) == n:
                return k
    raise AssertionError("group needs more than four generators")
