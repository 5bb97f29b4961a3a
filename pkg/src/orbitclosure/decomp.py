"""Minimal primes for ideals whose components are torsion cosets of tori.

Variables that lie in the ideal are set aside as identically zero; on the
remaining variables we work in the Laurent setting, saturating by their
product.  An ideal is split along binomial divisors of its Groebner-basis
elements until every piece is binomial.  A binomial piece is the ideal of a
partial character on a lattice, and its minimal primes are the extensions of
that character to the saturated lattice.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .arith import CycloNum, ugcd, utrim
from .lattice import _adapted_basis, lattice_from_polys
from .matgroup import roots_in_field
from .poly import Ideal, Poly, eliminate, normal_form, saturate

__all__ = [
    "Decomposition",
    "NotInClass",
    "NoIdentityComponent",
    "is_binomial_ideal",
    "min_primes_binomial_class",
    "identity_component",
]


class NotInClass(ValueError):
    """The ideal has a component that is not a torsion coset."""


class NoIdentityComponent(ValueError):
    pass


@dataclass(frozen=True)
class Decomposition:
    components: tuple[Ideal, ...]
    source: Ideal
    zero_vars: tuple[str, ...] = ()
    general_coefficients: bool = False

    def to_json(self) -> list[list[str]]:
        return [list(c.canonical_strings()) for c in self.components]

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def is_binomial_ideal(I: Ideal) -> bool:
    return all(len(g.terms) <= 2 for g in I.groebner())


def _var_product(vars: Sequence[str], ring: Sequence[str]) -> Poly:
    out = Poly.const(ring, 1)
    for v in vars:
        out = out * Poly.var(ring, v)
    return out


def _zero_variables(I: Ideal) -> list[str]:
    out = []
    for g in I.groebner():
        if len(g.terms) == 1:
            (e,) = g.terms
            if sum(e) == 1:
                out.append(I.vars[e.index(1)])
    return out


def _restrict(I: Ideal, zero: Sequence[str]) -> tuple[Ideal, tuple[str, ...]]:
    rest = tuple(v for v in I.vars if v not in zero)
    sub = {v: 0 for v in zero}
    return Ideal([g.substitute(sub, rest) for g in I.generators], rest), rest


def _laurent(I: Ideal) -> Ideal:
    if I.is_zero() or not I.vars:
        return I
    return saturate(I, _var_product(I.vars, I.vars))


def _binomial_divisors(g: Poly, q: int):
    """Candidate divisors ``x^a - c x^b`` of ``g`` (disjoint supports, c != 0)."""
    n = len(g.vars)
    bound = [max(e[i] for e in g.terms) for i in range(n)]
    exps = [e for e in product(*(range(b + 1) for b in bound)) if any(e)]
    exps.sort(key=lambda e: (sum(e), e))
    seen = set()
    for a in exps:
        for b in [(0,) * n] + exps:
            if any(x and y for x, y in zip(a, b)) or a == b:
                continue
            if sum(b) > sum(a) or (sum(b) == sum(a) and b > a):
                continue
            for c in _divisor_constants(g, a, b, q):
                key = (a, b, c)
                if key not in seen:
                    seen.add(key)
                    yield Poly(g.vars, {a: 1}) - Poly(g.vars, {b: c})


def _divisor_constants(g: Poly, a: tuple, b: tuple, q: int) -> list:
    """Values ``c`` with ``x^a - c x^b`` dividing ``g``.

    Rewriting ``x^a -> c x^b`` terminates (supports are disjoint) and yields
    the normal form modulo the principal ideal, as a polynomial in ``c``.
    """
    rem: dict[tuple, dict[int, object]] = {}
    for e, coef in g.terms.items():
        k = 0
        e = list(e)
        while all(x >= y for x, y in zip(e, a)):
            e = [x - y + z for x, y, z in zip(e, a, b)]
            k += 1
        slot = rem.setdefault(tuple(e), {})
        slot[k] = slot.get(k, 0) + coef
    polys = []
    for slot in rem.values():
        top = max(slot)
        dense = utrim([slot.get(i, 0) for i in range(top + 1)])
        if dense:
            polys.append(dense)
    if not polys:
        return []
    h = polys[0]
    for p in polys[1:]:
        h = ugcd(h, p)
        if len(h) <= 1:
            return []
    if len(h) <= 1:
        return []
    return [r for r in roots_in_field(h, q) if r != 0]


def _split(I: Ideal, q: int, depth: int = 0) -> list[Ideal]:
    if I.is_unit():
        return []
    if is_binomial_ideal(I):
        return [I]
    if depth > 12:
        raise NotInClass("splitting did not terminate")
    for g in _split_candidates(I):
        for b in _binomial_divisors(g, q):
            b = b.to_ring(I.vars)
            if I.contains(b):
                continue
            left = _laurent(I + [b])
            right = _laurent(saturate(I, b))
            if right.groebner() == I.groebner():
                continue
            out = []
            for piece in (left, right):
                out.extend(_split(piece, q, depth + 1))
            return out
    raise NotInClass(f"no binomial divisor splits {I}")


def _split_candidates(I: Ideal):
    """Non-binomial basis elements, then those of one- and two-variable eliminations.

    A union of cosets in general position has no binomial divisor in its
    basis, but its projections to coordinate planes are products of binomials.
    """
    for g in I.groebner():
        if len(g.terms) > 2:
            yield g
    n = len(I.vars)
    for k in (1, 2):
        for keep in combinations(range(n), k):
            if k == n:
                continue
            kept = [I.vars[i] for i in keep]
            E = eliminate(I, [v for v in I.vars if v not in kept])
            for g in E.groebner():
                if len(g.terms) > 2:
                    yield g


def _character_roots(c, d: int, q: int) -> list:
    """All ``d``-th roots of ``c`` in ``Q(zeta_q)`` of the form ``r * zeta^k``."""
    poly = [-c] + [0] * (d - 1) + [1]
    return roots_in_field(poly, q)


def _binomial_primes(I: Ideal, q: int) -> tuple[list[Ideal], bool]:
    """Minimal primes of a Laurent binomial ideal (one per character extension)."""
    vars = I.vars
    gb = I.groebner()
    if not gb:
        return [I], False
    lat = lattice_from_polys(list(gb), len(vars))
    general = any(any(c not in (1, -1) for c in g.terms.values()) for g in gb)
    W, divs, _ = _adapted_basis(lat)

    def rho(v: Sequence[int]):
        pos = tuple(max(x, 0) for x in v)
        neg = tuple(max(-x, 0) for x in v)
        a = normal_form(Poly(vars, {pos: 1}), gb)
        b = normal_form(Poly(vars, {neg: 1}), gb)
        if len(a.terms) != 1 or len(b.terms) != 1 or set(a.terms) != set(b.terms):
            raise NotInClass("binomial ideal is not a lattice ideal")
        (ea, ca), = a.terms.items()
        (_, cb), = b.terms.items()
        return Fraction(ca) / Fraction(cb) if not isinstance(ca, CycloNum) and not isinstance(cb, CycloNum) else ca / cb

    options = []
    for w, d in zip(W, divs):
        val = rho([d * x for x in w])
        roots = _character_roots(val, d, q) if d > 1 else [val]
        if len(roots) != d:
            raise NotInClass(f"{d}-th roots of {val} are not in Q(zeta_{q})")
        options.append(roots)
    primes = []
    for choice in product(*options):
        gens = []
        for w, c in zip(W, choice):
            pos = tuple(max(x, 0) for x in w)
            neg = tuple(max(-x, 0) for x in w)
            gens.append(Poly(vars, {pos: 1}) - Poly(vars, {neg: c}))
        primes.append(_laurent(Ideal(gens, vars)))
    general = general or any(c not in (1, -1) for P in primes for g in P.generators for c in g.terms.values())
    return primes, general


def _contains(big: Ideal, small: Ideal) -> bool:
    return all(big.contains(g) for g in small.generators)


def min_primes_binomial_class(I: Ideal, q: int | None = None) -> Decomposition:
    """Minimal primes of ``I`` when they are all torsion cosets (Laurent setting).

    ``q`` is the conductor used for roots of unity; by default the smallest
    one that works among the divisors seen is tried, starting from ``1``.
    """
    zero = _zero_variables(I)
    J, rest = _restrict(I, zero)
    J = _laurent(J)
    conductors = [q] if q is not None else [1, 2, 4, 3, 6, 8, 12]
    last_error: Exception | None = None
    for cond in conductors:
        try:
            leaves = _split(J, cond)
            comps: list[Ideal] = []
            general = False
            for leaf in leaves:
                primes, gen = _binomial_primes(leaf, cond)
                general = general or gen
                comps.extend(primes)
            break
        except NotInClass as exc:
            last_error = exc
    else:
        raise last_error or NotInClass("decomposition failed")
    # minimalize: drop components containing another one
    unique: list[Ideal] = []
    for c in comps:
        if not any(c.groebner() == u.groebner() for u in unique):
            unique.append(c)
    minimal = [c for i, c in enumerate(unique)
               if not any(j != i and _contains(c, o) for j, o in enumerate(unique))]
    full = []
    for c in minimal:
        gens = [Poly.var(I.vars, z) for z in zero] + [g.to_ring(I.vars) for g in c.generators]
        full.append(Ideal(gens, I.vars))
    full.sort(key=lambda c: c.canonical_strings())
    return Decomposition(tuple(full), I, tuple(zero), general)


def identity_component(D: Decomposition) -> Ideal:
    """First component (in canonical order) containing the identity point."""
    point = {v: (0 if v in D.zero_vars else 1) for v in D.source.vars}
    for c in D.components:
        if all(g.evaluate(point) == 0 for g in c.generators):
            return c
    raise NoIdentityComponent("no component passes through the identity")
