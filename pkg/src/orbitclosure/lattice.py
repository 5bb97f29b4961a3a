"""Integer lattices, Hermite and Smith normal forms, and the groups H_Lambda.

A lattice ``Lambda`` in ``Z^d`` determines the diagonal group

    H_Lambda = {x in G_m^d : x^v = 1 for all v in Lambda}

whose component group is the torsion of ``Z^d / Lambda``.  Everything here
is exact integer arithmetic; roots of unity are :class:`CycloNum` values.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import lcm, prod
from typing import Iterable, Iterator, Sequence

from .arith import CycloNum, zeta_pow
from .poly import Ideal, Poly, saturate

__all__ = [
    "IntMat",
    "SNFResult",
    "Lattice",
    "TorsionCharacter",
    "NotSGenerated",
    "hnf",
    "snf",
    "is_s_generated",
    "lattice_from_polys",
    "binomial_ideal_of",
    "lattice_ideal",
    "saturation",
    "torsion_characters",
    "coset_ideal",
    "generators_of_H",
    "enumerate_lattices",
    "kernel_basis",
    "PRIMES",
]

IntMat = list[list[int]]

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class NotSGenerated(ValueError):
    """The group H_Lambda needs more topological generators than requested."""


def _identity(n: int) -> IntMat:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matmul(A: IntMat, B: IntMat) -> IntMat:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row)) for j in range(cols)] for row in A]


def int_det(A: IntMat) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def hnf(rows: Sequence[Sequence[int]], ncols: int | None = None) -> IntMat:
    """Row-style Hermite normal form with the zero rows dropped.

    Pivots are positive and the entries above a pivot lie in ``[0, pivot)``.
    """
    A = [[int(x) for x in r] for r in rows]
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    r = 0
    for c in range(n):
        # gcd-combine everything below row r into row r
        for i in range(r + 1, len(A)):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            if a == 0:
                A[r], A[i] = A[i], A[r]
                continue
            g, x, y = _xgcd(a, b)
            ra, rb = A[r], A[i]
            A[r] = [x * u + y * v for u, v in zip(ra, rb)]
            A[i] = [(a // g) * v - (b // g) * u for u, v in zip(ra, rb)]
        if r < len(A) and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            p = A[r][c]
            for i in range(r):
                q = A[i][c] // p
                if q:
                    A[i] = [u - q * v for u, v in zip(A[i], A[r])]
            r += 1
            if r == len(A):
                break
    return [row for row in A[:r] if any(row)]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True)
class SNFResult:
    U: IntMat
    S: IntMat
    V: IntMat
    divisors: tuple[int, ...]

    def to_json(self) -> dict:
        return {"U": self.U, "S": self.S, "V": self.V, "divisors": list(self.divisors)}


def snf(A: Sequence[Sequence[int]]) -> SNFResult:
    """Smith normal form ``U A V = S`` with unimodular ``U`` and ``V``."""
    S = [[int(x) for x in r] for r in A]
    m = len(S)
    n = len(S[0]) if m else 0
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        S[dst] = [a + k * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for M in (S, V):
            for row in M:
                row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        entries = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // S[t][t]))
                    if S[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // S[t][t]))
                    if S[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % S[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    divisors = tuple(S[i][i] for i in range(min(m, n)) if S[i][i])
    return SNFResult(U, S, V, divisors)


def kernel_basis(rows: Sequence[Sequence[int]], ncols: int) -> IntMat:
    """HNF basis of ``{u in Z^n : A u = 0}``."""
    if not rows:
        return _identity(ncols)
    res = snf(rows)
    r = len(res.divisors)
    cols = [[res.V[i][j] for i in range(ncols)] for j in range(r, ncols)]
    return hnf(cols, ncols)


def _solve_unimodular_inverse(V: IntMat) -> IntMat:
    n = len(V)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(V)]
    for c in range(n):
        p = next(i for i in range(c, n) if M[i][c])
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [[int(x) for x in row[n:]] for row in M]


class Lattice:
    """A sublattice of ``Z^d``, stored by its Hermite normal form."""

    __slots__ = ("ambient", "basis", "__dict__")

    def __init__(self, rows: Iterable[Sequence[int]], ambient: int):
        rows = [list(r) for r in rows]
        if any(len(r) != ambient for r in rows):
            raise ValueError(f"lattice vectors must have length {ambient}")
        self.ambient = ambient
        self.basis = tuple(tuple(r) for r in hnf(rows, ambient))

    @classmethod
    def full(cls, d: int) -> "Lattice":
        return cls(_identity(d), d)

    @classmethod
    def zero(cls, d: int) -> "Lattice":
        return cls([], d)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        return f"Lattice({[list(r) for r in self.basis]}, ambient={self.ambient})"

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def smith(self) -> SNFResult:
        return snf([list(r) for r in self.basis]) if self.basis else SNFResult([], [], _identity(self.ambient), ())

    @property
    def divisors(self) -> tuple[int, ...]:
        return self.smith.divisors

    @property
    def torsion_order(self) -> int:
        return prod(self.divisors)

    def contains(self, v: Sequence[int]) -> bool:
        rest = list(v)
        for row in self.basis:
            c = next(i for i, x in enumerate(row) if x)
            if rest[c] % row[c]:
                return False
            k = rest[c] // row[c]
            rest = [a - k * b for a, b in zip(rest, row)]
        return not any(rest)

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.basis]

    @classmethod
    def from_json(cls, data, ambient: int | None = None) -> "Lattice":
        if isinstance(data, str):
            data = json.loads(data)
        if ambient is None:
            if not data:
                raise ValueError("ambient dimension needed for an empty lattice")
            ambient = len(data[0])
        return cls(data, ambient)


def is_s_generated(lat: Lattice, s: int) -> bool:
    """At most ``s`` elementary divisors differ from 1."""
    if s < 1:
        raise ValueError("s must be positive")
    return sum(1 for d in lat.divisors if d != 1) <= s


def _exponent_vectors(p: Poly) -> list[tuple]:
    return sorted(p.terms)


def lattice_from_polys(gens: Sequence[Poly], ambient: int | None = None) -> Lattice:
    """Lattice spanned by exponent differences inside each generator."""
    gens = [g for g in gens if g]
    if ambient is None:
        if not gens:
            raise ValueError("cannot infer the ambient dimension")
        ambient = len(gens[0].vars)
    rows = []
    for g in gens:
        exps = _exponent_vectors(g)
        base = exps[0]
        rows.extend([a - b for a, b in zip(e, base)] for e in exps[1:])
    return Lattice(rows, ambient)


def _binomial(v: Sequence[int], vars: Sequence[str], coeff=1) -> Poly:
    pos = tuple(max(a, 0) for a in v)
    neg = tuple(max(-a, 0) for a in v)
    return Poly(vars, {pos: 1}) - Poly(vars, {neg: coeff})


def binomial_ideal_of(lat: Lattice, vars: Sequence[str]) -> Ideal:
    """``<x^{v+} - x^{v-}>`` over the HNF rows ``v``; cuts out H_Lambda inside G_m^d."""
    if len(vars) != lat.ambient:
        raise ValueError("variable count differs from the lattice dimension")
    return Ideal([_binomial(v, vars) for v in lat.basis], vars)


def lattice_ideal(lat: Lattice, vars: Sequence[str]) -> Ideal:
    """Vanishing ideal of the Zariski closure of H_Lambda in affine space."""
    I = binomial_ideal_of(lat, vars)
    if I.is_zero():
        return I
    return saturate(I, prod(Poly.gens(vars), start=Poly.const(vars, 1)))


def saturation(lat: Lattice) -> Lattice:
    """``(Q Lambda) ∩ Z^d``."""
    if not lat.basis:
        return lat
    res = lat.smith
    Winv = _solve_unimodular_inverse(res.V)
    return Lattice(Winv[: lat.rank], lat.ambient)


@dataclass(frozen=True)
class TorsionCharacter:
    """A character of ``Lambda_sat`` that is trivial on ``Lambda``.

    ``basis`` is a basis ``w_1..w_r`` of ``Lambda_sat`` adapted to ``Lambda``
    (``Lambda`` is spanned by ``d_i w_i``) and the value on ``w_i`` is
    ``zeta_{d_i}^{exponents[i]}``.
    """

    basis: tuple[tuple[int, ...], ...]
    divisors: tuple[int, ...]
    exponents: tuple[int, ...]
    q: int = field(default=1)

    def value_on_basis(self, i: int) -> CycloNum:
        d = self.divisors[i]
        return zeta_pow(self.q, self.exponents[i] * (self.q // d))

    @property
    def values(self) -> dict[tuple[int, ...], CycloNum]:
        return {w: self.value_on_basis(i) for i, w in enumerate(self.basis)}

    def value(self, v: Sequence[int]) -> CycloNum:
        """Value on an element of ``Lambda_sat``."""
        coords = _coordinates(self.basis, v)
        out = CycloNum(self.q, [1])
        for i, c in enumerate(coords):
            out = out * self.value_on_basis(i) ** c
        return out

    def is_trivial(self) -> bool:
        return all(e % d == 0 for e, d in zip(self.exponents, self.divisors))


def _coordinates(basis: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    """Integer coordinates of ``v`` in a basis (raises if not in the span)."""
    n = len(basis)
    if n == 0:
        if any(v):
            raise ValueError("vector outside the lattice")
        return []
    d = len(v)
    # least squares via exact normal equations suffices for full-rank bases
    G = [[Fraction(sum(a * b for a, b in zip(basis[i], basis[j]))) for j in range(n)] for i in range(n)]
    rhs = [Fraction(sum(a * b for a, b in zip(basis[i], v))) for i in range(n)]
    M = [G[i] + [rhs[i]] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if M[i][c])
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    coords = [M[i][n] for i in range(n)]
    if any(c.denominator != 1 for c in coords):
        raise ValueError("vector outside the lattice")
    coords = [int(c) for c in coords]
    if [sum(c * basis[i][k] for i, c in enumerate(coords)) for k in range(d)] != list(v):
        raise ValueError("vector outside the lattice")
    return coords


def _adapted_basis(lat: Lattice) -> tuple[list[list[int]], tuple[int, ...], IntMat]:
    """Rows ``w_i`` of ``V^{-1}`` with ``Lambda = <d_i w_i>``, and ``V`` itself."""
    res = lat.smith
    r = lat.rank
    Winv = _solve_unimodular_inverse(res.V)
    return Winv[:r], res.divisors, res.V


def torsion_characters(lat: Lattice) -> list[TorsionCharacter]:
    """One character per element of ``Lambda_sat / Lambda`` (in lexicographic order)."""
    if not lat.basis:
        return [TorsionCharacter((), (), (), 1)]
    W, divs, _ = _adapted_basis(lat)
    q = lcm(*divs) if divs else 1
    basis = tuple(tuple(w) for w in W)
    return [TorsionCharacter(basis, divs, exps, q) for exps in product(*(range(d) for d in divs))]


def coset_ideal(chi: TorsionCharacter, vars: Sequence[str]) -> Ideal:
    """Prime ideal of the closure of the torsion coset selected by ``chi``."""
    gens = []
    for i, w in enumerate(chi.basis):
        c = chi.value_on_basis(i)
        c = c.to_rat() if c.is_rational() else c
        gens.append(_binomial(w, vars, c))
    if not gens:
        return Ideal([], vars)
    return saturate(Ideal(gens, vars), prod(Poly.gens(vars), start=Poly.const(vars, 1)))


def _normalize_entry(c: CycloNum):
    if c.is_rational():
        r = c.to_rat()
        return r.numerator if r.denominator == 1 else r
    return c


def generators_of_H(lat: Lattice, s: int) -> list[tuple]:
    """Diagonal entries of ``s`` topological generators of H_Lambda.

    Free directions carry powers of the primes 2, 3, 5, ... along an HNF
    basis of the orthogonal lattice; each nontrivial elementary divisor
    contributes a root of unity to one generator.
    """
    if not is_s_generated(lat, s):
        raise NotSGenerated(f"elementary divisors {lat.divisors} need more than {s} generators")
    d = lat.ambient
    free = kernel_basis([list(r) for r in lat.basis], d)
    if len(free) > len(PRIMES):
        raise ValueError("too many free directions")
    free_part = [Fraction(1)] * d
    for p, k in zip(PRIMES, free):
        for j in range(d):
            free_part[j] *= Fraction(p) ** k[j]
    torsion: list[list[int] | None] = []
    q = 1
    if lat.basis:
        _, divs, V = _adapted_basis(lat)
        nontrivial = [i for i, dv in enumerate(divs) if dv != 1]
        q = lcm(*(divs[i] for i in nontrivial)) if nontrivial else 1
        for i in nontrivial:
            torsion.append([(V[j][i] % divs[i]) * (q // divs[i]) for j in range(d)])
    out = []
    for g in range(s):
        exps = torsion[g] if g < len(torsion) else [0] * d
        entries = tuple(_normalize_entry(zeta_pow(q, e) * free_part[j]) for j, e in enumerate(exps))
        out.append(entries)
    return out


def _closure_lattices(vectors: Sequence[Sequence[int]], d: int, limit: int = 200_000) -> set[Lattice]:
    seen = {Lattice.zero(d)}
    frontier = [Lattice.zero(d)]
    while frontier:
        nxt = []
        for lat in frontier:
            for v in vectors:
                if lat.contains(v):
                    continue
                new = Lattice(list(lat.basis) + [list(v)], d)
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
                    if len(seen) > limit:
                        raise ValueError("lattice enumeration limit exceeded")
        frontier = nxt
    return seen


def _sort_key(lat: Lattice):
    return (lat.rank, [[abs(x) for x in r] for r in lat.basis], lat.basis)


def sublattices_of_index(lat: Lattice, index: int) -> list[Lattice]:
    """All sublattices of ``lat`` of the given finite index."""
    r = lat.rank
    out = []
    # upper-triangular HNF matrices in lattice coordinates with diagonal product = index
    def diagonals(k, rest):
        if k == 0:
            if rest == 1:
                yield ()
            return
        for a in range(1, rest + 1):
            if rest % a == 0:
                for tail in diagonals(k - 1, rest // a):
                    yield (a,) + tail

    B = [list(row) for row in lat.basis]
    for diag in diagonals(r, index):
        slots = [(i, j) for i in range(r) for j in range(i + 1, r)]
        ranges = [range(diag[j]) for (_, j) in slots]
        for vals in product(*ranges):
            C = [[0] * r for _ in range(r)]
            for i in range(r):
                C[i][i] = diag[i]
            for (i, j), v in zip(slots, vals):
                C[i][j] = v
            rows = _matmul(C, B)
            out.append(Lattice(rows, lat.ambient))
    return sorted(set(out), key=_sort_key)


def enumerate_lattices(k: int, b: int, s: int, mode: str = "heuristic",
                       seeds: Sequence[Sequence[int]] = (), rank: int | None = None) -> Iterator[Lattice]:
    """Candidate lattices in ``Z^k`` with entries bounded by ``b``.

    ``exhaustive`` closes the set of all vectors in ``[-b, b]^k`` under
    lattice sums (only allowed for ``k * b <= 6``).  ``heuristic`` starts
    from the seed vectors: every lattice spanned by a subset of seeds, then
    every sublattice of their saturation with the same index.  Each yielded
    lattice is ``s``-generated and appears once.
    """
    if k < 0 or b < 1:
        raise ValueError("need k >= 0 and b >= 1")
    if mode == "exhaustive":
        if k * b > 6:
            raise ValueError("exhaustive lattice enumeration is capped at k*b <= 6")
        vectors = [v for v in product(range(-b, b + 1), repeat=k) if any(v)]
        for lat in sorted(_closure_lattices(vectors, k), key=_sort_key):
            if (rank is None or lat.rank == rank) and is_s_generated(lat, s):
                yield lat
        return
    if mode != "heuristic":
        raise ValueError(f"unknown enumeration mode {mode!r}")
    seeds = list(dict.fromkeys(tuple(v) for v in seeds if any(v) and max(map(abs, v)) <= b))
    emitted: set[Lattice] = set()
    base: list[Lattice] = []
    if rank == 0:
        yield Lattice.zero(k)
        return
    sizes = [rank] if rank is not None else range(1, k + 1)
    for size in sizes:
        for combo in combinations(seeds, size):
            lat = Lattice(combo, k)
            if lat.rank != size or lat in emitted or lat in base:
                continue
            base.append(lat)
            if is_s_generated(lat, s):
                emitted.add(lat)
                yield lat
    for lat in base:
        sat = saturation(lat)
        idx = lat.torsion_order
        for cand in sublattices_of_index(sat, idx):
            if cand in emitted or not is_s_generated(cand, s):
                continue
            emitted.add(cand)
            yield cand
