"""Buchberger's algorithm with the Gebauer-Moeller criteria and sugar selection.

Internally a polynomial is a dict from order keys (see
:meth:`MonomialOrder.key`) to coefficients, so the leading term is just
``max(p)``.  Rational coefficients are carried as ``gmpy2.mpq`` during the
computation.
"""
from __future__ import annotations

import heapq
import os
from fractions import Fraction
from operator import add, le, sub
from typing import Sequence

from ..arith import CycloNum
from .core import GREVLEX, MonomialOrder, Poly

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction

__all__ = ["ResourceLimit", "groebner", "normal_form", "reduce_basis", "DEFAULT_BUDGET", "set_default_budget"]

DEFAULT_BUDGET = int(os.environ.get("ORBITCLOSURE_GB_BUDGET", 200_000))


def set_default_budget(steps: int) -> None:
    global DEFAULT_BUDGET
    DEFAULT_BUDGET = int(steps)


class ResourceLimit(RuntimeError):
    """Raised when a Groebner computation exceeds its reduction budget."""


def _to_field(c):
    if isinstance(c, CycloNum):
        return c
    if isinstance(c, Fraction):
        return _mpq(c.numerator, c.denominator)
    return _mpq(c)


def _from_field(c):
    if isinstance(c, CycloNum):
        if c.is_rational():
            c = c.coeffs[0]
            return c.numerator if c.denominator == 1 else c
        return c
    f = Fraction(int(c.numerator), int(c.denominator))
    return f.numerator if f.denominator == 1 else f


def _inv(c):
    if isinstance(c, CycloNum):
        return c.inverse()
    return 1 / c


class _Engine:
    def __init__(self, nvars: int, order: MonomialOrder, budget: int | None):
        self.n = nvars
        self.order = order
        self.budget = DEFAULT_BUDGET if budget is None else budget
        self.steps = 0
        self._exps: dict[tuple, tuple] = {}

    def exps(self, key: tuple) -> tuple:
        e = self._exps.get(key)
        if e is None:
            e = self.order.exps(key, self.n)
            self._exps[key] = e
        return e

    def internal(self, p: Poly) -> dict:
        key = self.order.key
        return {key(e): _to_field(c) for e, c in p.terms.items()}

    def external(self, d: dict, vars: Sequence[str]) -> Poly:
        return Poly(vars, {self.exps(k): _from_field(c) for k, c in d.items()})

    def make_monic(self, d: dict) -> dict:
        lk = max(d)
        c = d[lk]
        if c == 1:
            return d
        inv = _inv(c)
        return {k: v * inv for k, v in d.items()}

    def reduce(self, h: dict, basis: list, full: bool = True) -> dict:
        """Reduce ``h`` in place by ``basis`` (list of (lead_exps, lead_key, poly))."""
        rem: dict = {}
        exps = self.exps
        while h:
            lk = max(h)
            le_ = exps(lk)
            for ge, gk, g in basis:
                if all(map(le, ge, le_)):
                    break
            else:
                if not full:
                    rem.update(h)
                    return rem
                rem[lk] = h.pop(lk)
                continue
            self.steps += 1
            if self.steps > self.budget:
                raise ResourceLimit(f"Groebner basis budget of {self.budget} reductions exceeded")
            c = h[lk]
            mk = tuple(map(sub, lk, gk))
            get = h.get
            for k, v in g.items():
                nk = tuple(map(add, k, mk))
                old = get(nk)
                if old is None:
                    h[nk] = -c * v
                else:
                    s = old - c * v
                    if s:
                        h[nk] = s
                    else:
                        del h[nk]
        return rem

    def spoly(self, f: tuple, g: tuple) -> dict:
        fe, fk, fp = f
        ge, gk, gp = g
        lcm = tuple(map(max, fe, ge))
        lk = self.order.key(lcm)
        mf = tuple(map(sub, lk, fk))
        mg = tuple(map(sub, lk, gk))
        out = {tuple(map(add, k, mf)): v for k, v in fp.items()}
        for k, v in gp.items():
            nk = tuple(map(add, k, mg))
            old = out.get(nk)
            if old is None:
                out[nk] = -v
            else:
                s = old - v
                if s:
                    out[nk] = s
                else:
                    del out[nk]
        return out

    def buchberger(self, polys: list[dict]) -> list[tuple]:
        exps = self.exps
        elems: list[tuple] = []  # (lead_exps, lead_key, poly)
        sugar: list[int] = []
        alive: list[int] = []
        pairs: list = []
        counter = 0

        def tdeg(d: dict) -> int:
            return max(sum(exps(k)) for k in d)

        def update(h: int):
            nonlocal counter, pairs
            he = elems[h][0]
            cands = [(g, tuple(map(max, he, elems[g][0]))) for g in alive]
            kept = []
            for idx, (g, lcm) in enumerate(cands):
                ge = elems[g][0]
                coprime = not any(a and b for a, b in zip(he, ge))
                if coprime:
                    kept.append((g, lcm, True))
                    continue
                redundant = False
                for other in cands[idx + 1:]:
                    if all(map(le, other[1], lcm)):
                        redundant = True
                        break
                if not redundant:
                    for other in kept:
                        if all(map(le, other[1], lcm)):
                            redundant = True
                            break
                if not redundant:
                    kept.append((g, lcm, False))
            # Buchberger's product criterion drops coprime pairs
            new = [(g, lcm) for g, lcm, coprime in kept if not coprime]
            # old pairs made redundant by h
            filtered = []
            for entry in pairs:
                _, _, _, i, j, lcm = entry
                if all(map(le, he, lcm)):
                    lih = tuple(map(max, elems[i][0], he))
                    ljh = tuple(map(max, elems[j][0], he))
                    if lih != lcm and ljh != lcm:
                        continue
                filtered.append(entry)
            pairs = filtered
            heapq.heapify(pairs)
            for g, lcm in new:
                dl = sum(lcm)
                s = max(sugar[g] - sum(elems[g][0]), sugar[h] - sum(he)) + dl
                counter += 1
                heapq.heappush(pairs, (s, self.order.key(lcm), counter, g, h, lcm))
            alive[:] = [g for g in alive if not all(map(le, he, elems[g][0]))]
            alive.append(h)

        def add_elem(d: dict, s: int):
            d = self.make_monic(d)
            lk = max(d)
            elems.append((exps(lk), lk, d))
            sugar.append(s)
            update(len(elems) - 1)

        start = sorted((p for p in polys if p), key=lambda d: max(d))
        for p in start:
            basis = [elems[i] for i in alive]
            h = self.reduce(dict(p), basis)
            if h:
                if len(h) == 1 and not any(exps(next(iter(h)))):
                    return [((0,) * self.n, max(h), {max(h): 1})]
                add_elem(h, tdeg(p))
        while pairs:
            s, _, _, i, j, _ = heapq.heappop(pairs)
            h = self.spoly(elems[i], elems[j])
            if not h:
                continue
            basis = [elems[k] for k in alive]
            h = self.reduce(h, basis)
            if h:
                lk = max(h)
                if not any(exps(lk)):
                    return [((0,) * self.n, lk, {lk: 1})]
                add_elem(h, max(s, tdeg(h)))
        return [elems[i] for i in alive]

    def interreduce(self, basis: list[tuple]) -> list[tuple]:
        basis = sorted(basis, key=lambda t: t[1])
        minimal = []
        for idx, b in enumerate(basis):
            if any(all(map(le, o[0], b[0])) for o in minimal):
                continue
            if any(all(map(le, o[0], b[0])) for o in basis[idx + 1:] if o[0] == b[0]):
                continue
            minimal.append(b)
        out = []
        for idx, (be, bk, bp) in enumerate(minimal):
            others = minimal[:idx] + minimal[idx + 1:]
            tail = dict(bp)
            lead_c = tail.pop(bk)
            red = self.reduce(tail, others)
            red[bk] = lead_c
            red = self.make_monic(red)
            out.append((be, bk, red))
        out.sort(key=lambda t: t[1], reverse=True)
        return out


def groebner(polys: Sequence[Poly], order: MonomialOrder = GREVLEX, budget: int | None = None) -> list[Poly]:
    """Reduced Groebner basis of the ideal generated by ``polys``.

    Elements are monic and sorted by decreasing leading monomial.  The zero
    ideal yields ``[]`` and the unit ideal ``[1]``.
    """
    polys = [p for p in polys if p]
    if not polys:
        return []
    vars = polys[0].vars
    eng = _Engine(len(vars), order, budget)
    basis = eng.buchberger([eng.internal(p) for p in polys])
    basis = eng.interreduce(basis)
    return [eng.external(d, vars) for _, _, d in basis]


def normal_form(f: Poly, basis: Sequence[Poly], order: MonomialOrder = GREVLEX,
                budget: int | None = None) -> Poly:
    """Full remainder of ``f`` on division by ``basis`` (a Groebner basis)."""
    if not f:
        return f
    eng = _Engine(len(f.vars), order, budget if budget is not None else 10**9)
    elems = []
    for g in basis:
        if not g:
            continue
        d = eng.make_monic(eng.internal(g))
        lk = max(d)
        elems.append((eng.exps(lk), lk, d))
    rem = eng.reduce(eng.internal(f), elems)
    return eng.external(rem, f.vars)


def reduce_basis(polys: Sequence[Poly], order: MonomialOrder = GREVLEX) -> list[Poly]:
    """Interreduce a set that is already a Groebner basis."""
    polys = [p for p in polys if p]
    if not polys:
        return []
    vars = polys[0].vars
    eng = _Engine(len(vars), order, None)
    elems = []
    for p in polys:
        d = eng.make_monic(eng.internal(p))
        lk = max(d)
        elems.append((eng.exps(lk), lk, d))
    return [eng.external(d, vars) for _, _, d in eng.interreduce(elems)]
