"""Ideals with cached reduced Groebner bases and the standard ideal operations."""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Sequence

from ..arith import CycloNum
from .core import GREVLEX, LEX, MonomialOrder, Poly, RingMismatch, block_order
from .groebner import groebner, normal_form

__all__ = [
    "Ideal",
    "ideal_member",
    "radical_member",
    "eliminate",
    "intersect",
    "saturate",
    "substitute_linear",
    "ideal_equal",
    "linear_variety_basis",
    "DimensionMismatch",
    "fresh_name",
]


class DimensionMismatch(ValueError):
    pass


def fresh_name(taken: Iterable[str], stem: str = "t") -> str:
    taken = set(taken)
    if stem not in taken:
        return stem
    i = 0
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def _cyclo_conductor(polys: Iterable[Poly]) -> int | None:
    q = None
    for p in polys:
        for c in p.terms.values():
            if isinstance(c, CycloNum) and not c.is_rational():
                if q is not None and q != c.q:
                    from ..arith import ConductorMismatch
                    raise ConductorMismatch(f"conductors {q} and {c.q} differ")
                q = c.q
    return q


def _lift_cyclo(polys: list[Poly]) -> list[Poly]:
    q = _cyclo_conductor(polys)
    if q is None:
        return [p.map_coeffs(lambda c: c.to_rat() if isinstance(c, CycloNum) else c) for p in polys]
    return [p.map_coeffs(lambda c: c if isinstance(c, CycloNum) else CycloNum(q, [c])) for p in polys]


class Ideal:
    """A finitely generated ideal of ``Q[vars]`` (or ``Q(zeta_q)[vars]``).

    Reduced Groebner bases are cached per monomial order; the cache is
    filled at most once per order.
    """

    def __init__(self, generators: Iterable[Poly], vars: Sequence[str] | None = None):
        gens = list(generators)
        if vars is None:
            if not gens:
                raise ValueError("the ring of an empty ideal must be given")
            vars = gens[0].vars
        self.vars = tuple(vars)
        clean = []
        for g in gens:
            if g.vars != self.vars:
                raise RingMismatch(f"generator ring {g.vars} differs from {self.vars}")
            if g:
                clean.append(g)
        self.generators = tuple(_lift_cyclo(clean))
        self._gb: dict[MonomialOrder, tuple[Poly, ...]] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"Ideal([{', '.join(map(str, self.generators))}], vars={self.vars})"

    def __str__(self):
        return "<" + ", ".join(map(str, self.generators)) + ">"

    def groebner(self, order: MonomialOrder = GREVLEX, budget: int | None = None) -> tuple[Poly, ...]:
        gb = self._gb.get(order)
        if gb is None:
            gb = tuple(groebner(self.generators, order, budget))
            with self._lock:
                gb = self._gb.setdefault(order, gb)
        return gb

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def is_zero(self) -> bool:
        return not self.generators

    def contains(self, f: Poly) -> bool:
        return ideal_member(f, self)

    def __add__(self, other: "Ideal | Iterable[Poly]") -> "Ideal":
        gens = other.generators if isinstance(other, Ideal) else tuple(other)
        return Ideal(list(self.generators) + list(gens), self.vars)

    def to_ring(self, vars: Sequence[str]) -> "Ideal":
        return Ideal([g.to_ring(vars) for g in self.generators], vars)

    def subs(self, mapping, vars: Sequence[str] | None = None) -> "Ideal":
        target = tuple(vars) if vars is not None else self.vars
        return Ideal([g.substitute(mapping, target) for g in self.generators], target)

    def max_degree(self) -> int:
        return max((g.total_degree() for g in self.generators), default=0)

    def dimension(self) -> int:
        """Krull dimension of the quotient ring (-1 for the unit ideal)."""
        return krull_dimension(self.groebner(), len(self.vars))

    def hilbert_function(self, upto: int) -> list[int]:
        """Affine Hilbert function: dim of polys of degree <= s modulo the ideal."""
        leads = [g.leading(GREVLEX)[0] for g in self.groebner()]
        return affine_hilbert_function(leads, len(self.vars), upto)

    def canonical_strings(self) -> tuple[str, ...]:
        return tuple(str(g) for g in self.groebner())


def krull_dimension(gb: Sequence[Poly], nvars: int, order: MonomialOrder = GREVLEX) -> int:
    if any(g.is_constant() and g for g in gb):
        return -1
    supports = []
    for g in gb:
        lead = g.leading(order)[0]
        supports.append(frozenset(i for i, a in enumerate(lead) if a))
    # dimension = nvars - minimum hitting set of the lead supports
    supports = sorted(set(supports), key=len)
    best = [nvars]

    def search(chosen: frozenset, remaining: list):
        if len(chosen) >= best[0]:
            return
        for s in remaining:
            if not (s & chosen):
                for v in sorted(s):
                    search(chosen | {v}, remaining)
                return
        best[0] = len(chosen)

    search(frozenset(), supports)
    return nvars - best[0]


def affine_hilbert_function(leads: Sequence[tuple], nvars: int, upto: int) -> list[int]:
    out, count = [], 0
    layer = [(0,) * nvars]
    seen = set(layer)
    for deg in range(upto + 1):
        if deg > 0:
            nxt = []
            for e in layer:
                for i in range(nvars):
                    ne = e[:i] + (e[i] + 1,) + e[i + 1:]
                    if ne not in seen:
                        seen.add(ne)
                        nxt.append(ne)
            layer = nxt
        standard = [e for e in layer if not any(all(a <= b for a, b in zip(l, e)) for l in leads)]
        count += len(standard)
        out.append(count)
        layer = standard
    return out


def ideal_member(f: Poly, I: Ideal) -> bool:
    if f.vars != I.vars:
        raise RingMismatch("polynomial and ideal live in different rings")
    if not f:
        return True
    f = _lift_cyclo([f] + list(I.generators[:1]))[0]
    return not normal_form(f, I.groebner(), GREVLEX)


def radical_member(f: Poly, I: Ideal) -> bool:
    """Rabinowitsch test: ``f`` is in sqrt(I) iff ``1`` is in ``I + <1 - t f>``."""
    if f.vars != I.vars:
        raise RingMismatch("polynomial and ideal live in different rings")
    if not f:
        return True
    t = fresh_name(I.vars, "_t")
    ring = I.vars + (t,)
    gens = [g.to_ring(ring) for g in I.generators]
    gens.append(1 - Poly.var(ring, t) * f.to_ring(ring))
    return Ideal(gens, ring).is_unit()


def eliminate(I: Ideal, drop: Iterable[str], budget: int | None = None) -> Ideal:
    """Generators of the elimination ideal ``I ∩ Q[remaining variables]``."""
    drop = [v for v in I.vars if v in set(drop)]
    keep = [v for v in I.vars if v not in drop]
    if not drop:
        return I
    ring = tuple(drop) + tuple(keep)
    order = block_order(len(drop))
    gb = groebner([g.to_ring(ring) for g in I.generators], order, budget)
    nd = len(drop)
    out = [g.to_ring(keep) for g in gb if not any(any(e[:nd]) for e in g.terms)]
    J = Ideal(out, keep)
    return J


def intersect(I: Ideal, J: Ideal) -> Ideal:
    if I.vars != J.vars:
        raise RingMismatch("ideals live in different rings")
    if I.is_zero() or J.is_zero():
        return Ideal([], I.vars)
    t = fresh_name(I.vars, "_t")
    ring = (t,) + I.vars
    tv = Poly.var(ring, t)
    gens = [tv * g.to_ring(ring) for g in I.generators]
    gens += [(1 - tv) * g.to_ring(ring) for g in J.generators]
    out = eliminate(Ideal(gens, ring), [t])
    return Ideal(out.groebner(), I.vars) if out.generators else Ideal([], I.vars)


def saturate(I: Ideal, f: Poly, budget: int | None = None) -> Ideal:
    """``I : f^∞``."""
    if not f:
        raise ValueError("cannot saturate by the zero polynomial")
    t = fresh_name(I.vars, "_t")
    ring = (t,) + I.vars
    gens = [g.to_ring(ring) for g in I.generators]
    gens.append(1 - Poly.var(ring, t) * f.to_ring(ring))
    out = eliminate(Ideal(gens, ring), [t], budget)
    return out.to_ring(I.vars) if out.vars != I.vars else out


def substitute_linear(I: Ideal, A: Sequence[Sequence], xvars: Sequence[str] | None = None,
                      ring: Sequence[str] | None = None) -> Ideal:
    """The ideal ``{f(A x)}``: each variable x_i is replaced by row i of ``A x``.

    ``xvars`` are the substituted variables (default: all of ``I.vars``, in
    order).  Entries of ``A`` may be scalars or polynomials over a larger
    ring ``ring`` that contains ``xvars``; the result lives in ``ring``.
    """
    xvars = tuple(xvars) if xvars is not None else I.vars
    n = len(xvars)
    if len(A) != n or any(len(row) != n for row in A):
        raise DimensionMismatch(f"matrix must be {n}x{n}")
    if ring is None:
        ring = I.vars
        for row in A:
            for a in row:
                if isinstance(a, Poly):
                    ring = tuple(dict.fromkeys(ring + a.vars))
    ring = tuple(ring)
    xs = [Poly.var(ring, v) for v in xvars]
    images = {}
    for i, v in enumerate(xvars):
        acc = Poly(ring)
        for a, x in zip(A[i], xs):
            if isinstance(a, Poly):
                acc = acc + a.to_ring(ring) * x
            elif a != 0:
                acc = acc + x * a
        images[v] = acc
    return Ideal([g.substitute(images, ring) for g in I.generators], ring)


def ideal_equal(I: Ideal, J: Ideal, order: MonomialOrder = GREVLEX) -> bool:
    if I.vars != J.vars:
        raise RingMismatch("ideals live in different rings")
    return I.groebner(order) == J.groebner(order)


def _linear_root(g: Poly) -> Poly | None:
    """If ``g = c * l^k`` for an affine-linear ``l``, return monic ``l``."""
    k = g.total_degree()
    if k <= 1:
        return g if k == 1 else None
    n = len(g.vars)
    top = g.homogeneous_part(k)
    for u in range(n):
        eu = tuple(k if i == u else 0 for i in range(n))
        a = top.terms.get(eu)
        if a is None:
            continue
        terms = {tuple(1 if i == u else 0 for i in range(n)): Fraction(1)}
        for w in range(n):
            if w == u:
                continue
            ew = tuple((k - 1) if i == u else (1 if i == w else 0) for i in range(n))
            if ew in g.terms:
                terms[tuple(1 if i == w else 0 for i in range(n))] = Fraction(g.terms[ew]) / (k * Fraction(a))
        e0 = tuple((k - 1) if i == u else 0 for i in range(n))
        if e0 in g.terms:
            terms[(0,) * n] = Fraction(g.terms[e0]) / (k * Fraction(a))
        lin = Poly(g.vars, terms)
        if lin ** k * a == g:
            return lin
        return None
    return None


def linear_variety_basis(I: Ideal, max_rounds: int = 8) -> list[Poly] | None:
    """Affine-linear generators of sqrt(I) when V(I) is an affine subspace.

    Returns ``None`` when the reduced basis of the radical could not be
    shown to consist of polynomials of degree at most one.  Every linear
    form that is added beyond the generators of ``I`` is certified by a
    radical-membership test, so a returned basis is exact.
    """
    current = I
    for _ in range(max_rounds):
        gb = current.groebner(LEX)
        if len(gb) == 1 and gb[0].is_constant():
            return [gb[0]]
        if all(g.total_degree() <= 1 for g in gb):
            return list(gb)
        added = []
        for g in gb:
            if g.total_degree() > 1:
                lin = _linear_root(g)
                if lin is None:
                    lin = _univariate_linear_part(g)
                if lin is not None and radical_member(lin, I):
                    added.append(lin)
        if not added:
            return None
        current = current + added
    return None


def _univariate_linear_part(g: Poly) -> Poly | None:
    used = g.support_vars()
    if len(used) != 1:
        return None
    (v,) = used
    i = g.vars.index(v)
    dense = [Fraction(0)] * (g.total_degree() + 1)
    for e, c in g.terms.items():
        dense[e[i]] = Fraction(c)
    from ..arith import ugcd, uderiv, udivmod
    sqf = udivmod(dense, ugcd(dense, uderiv(dense)))[0]
    if len(sqf) != 2:
        return None
    x = Poly.var(g.vars, v)
    return x * sqf[1] + sqf[0]
