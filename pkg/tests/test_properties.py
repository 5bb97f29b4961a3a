"""Randomized property suites; the seed comes from ``--prop-seed``."""
from fractions import Fraction
from math import prod

from oracles import min_generators, torsion_group

from orbitclosure.decomp import NotInClass, min_primes_binomial_class
from orbitclosure.lattice import Lattice, is_s_generated, snf
from orbitclosure.matgroup import Mat, is_semisimple, is_unipotent, jordan_chevalley, nil_exp, nil_log
from orbitclosure.poly import (
    Ideal,
    Poly,
    eliminate,
    intersect,
    parse_poly,
    radical_member,
    saturate,
)

CASES = 200
V3 = ("x", "y", "z")


def random_poly(rng, vars, deg=2, terms=3):
    out = []
    for _ in range(rng.randint(1, terms)):
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if c == 0:
            continue
        exps = [0] * len(vars)
        for _ in range(rng.randint(0, deg)):
            exps[rng.randrange(len(vars))] += 1
        mono = "*".join(f"{v}^{e}" for v, e in zip(vars, exps) if e) or "1"
        out.append(f"({c})*{mono}")
    return parse_poly(" + ".join(out) or "0", vars)


def random_ideal(rng, vars, n=2):
    gens = [random_poly(rng, vars) for _ in range(n)]
    return Ideal([g for g in gens if g] or [Poly.gens(vars)[0]], vars)


def random_unimodular(rng, n):
    A = Mat.identity(n)
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        E = Mat([[1 if r == c else (rng.randint(-2, 2) if (r, c) == (i, j) else 0) for c in range(n)]
                 for r in range(n)])
        A = A * E
    return A


# polynomials

def test_groebner_canonical_under_shuffles(rng):
    done = 0
    while done < CASES:
        I = random_ideal(rng, V3, rng.randint(1, 3))
        if I.is_unit():
            continue
        done += 1
        gens = list(I.generators)
        rng.shuffle(gens)
        extra = []
        for g in gens:
            h = random_poly(rng, V3, deg=1, terms=2)
            extra.append(g + h * gens[0] if h else g)
        # adding multiples of one generator to the others does not change the ideal
        mixed = [gens[0]] + extra[1:]
        rng.shuffle(mixed)
        J = Ideal(mixed + [Fraction(rng.randint(1, 5)) * gens[0]], V3)
        assert I.groebner() == J.groebner()
        assert I.canonical_strings() == J.canonical_strings()


def test_eliminate_and_intersect_laws(rng):
    for _ in range(CASES):
        I = random_ideal(rng, V3)
        J = random_ideal(rng, V3)
        E = eliminate(I, ["x"])
        for g in E.generators:
            g = g.to_ring(V3)
            assert all(e[0] == 0 for e in g.terms)
            assert I.contains(g)
        K = intersect(I, J)
        for g in K.generators:
            assert I.contains(g) and J.contains(g)
        for f in I.generators:
            for g in J.generators:
                assert K.contains(f * g)


# lattices

def _det(rows):
    return Mat(rows).det()


def test_snf_reassembly(rng):
    for _ in range(CASES):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        A = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(m)]
        res = snf(A)
        U, S, V = res.U, res.S, res.V
        assert (Mat(U) * Mat(A) * Mat(V)) == Mat(S)
        assert abs(_det(U)) == 1 and abs(_det(V)) == 1
        assert all(S[i][j] == 0 for i in range(m) for j in range(n) if i != j)
        diag = [S[i][i] for i in range(min(m, n))]
        assert all(x >= 0 for x in diag)
        nz = [x for x in diag if x]
        assert diag[:len(nz)] == nz
        assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
        assert list(res.divisors) == nz


def _independent_rows(rng, d):
    r = rng.randint(1, d)
    while True:
        rows = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(r)]
        if Mat([[sum(a * b for a, b in zip(u, v)) for v in rows] for u in rows]).det() != 0:
            return rows


def test_generator_count_matches_brute_force(rng):
    done = 0
    while done < CASES:
        d = rng.randint(1, 4)
        rows = _independent_rows(rng, d)
        lat = Lattice(rows, d)
        order = prod(lat.divisors)
        if order > 40:
            continue
        group = torsion_group(rows)
        assert len(group) == order
        k = min_generators(group)
        for s in range(1, 4):
            assert is_s_generated(lat, s) == (k <= s)
        done += 1


# matrices

def test_nil_exp_inverts_nil_log(rng):
    for _ in range(CASES):
        n = rng.randint(1, 5)
        N = Mat([[Fraction(rng.randint(-3, 3), rng.randint(1, 2)) if j > i else 0 for j in range(n)]
                 for i in range(n)])
        P = random_unimodular(rng, n)
        Pinv = P.inverse()
        U = P * nil_exp(N) * Pinv
        assert is_unipotent(U)
        assert nil_exp(nil_log(U)) == U
        L = P * N * Pinv
        assert nil_log(nil_exp(L)) == L


def _random_jordan_form(rng, n):
    blocks, left = [], n
    while left:
        size = rng.randint(1, left)
        blocks.append((Fraction(rng.choice([-3, -2, -1, 1, 2, 3, 5]), rng.randint(1, 2)), size))
        left -= size
    rows = [[0] * n for _ in range(n)]
    k = 0
    for lam, size in blocks:
        for i in range(size):
            rows[k + i][k + i] = lam
            if i + 1 < size:
                rows[k + i][k + i + 1] = 1
        k += size
    return Mat(rows)


def test_jordan_chevalley_reassembly(rng):
    for case in range(CASES):
        n = rng.randint(1, 5)
        if case % 2:
            M = _random_jordan_form(rng, n)
            P = random_unimodular(rng, n)
            M = P * M * P.inverse()
        else:
            M = Mat([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
            if M.det() == 0:
                M = M + Mat.identity(n).scale(7)
        Ms, Mu = jordan_chevalley(M)
        assert Ms * Mu == M
        assert Ms * Mu == Mu * Ms
        assert is_semisimple(Ms)
        assert is_unipotent(Mu)


# binomial decomposition

def _random_binomial(rng, vars):
    while True:
        a = [rng.randint(0, 2) for _ in vars]
        b = [rng.randint(0, 2) if x == 0 else 0 for x in a]
        if any(a) or any(b):
            break
    mono = lambda e: "*".join(f"{v}^{k}" for v, k in zip(vars, e) if k) or "1"
    if mono(a) == mono(b):
        return _random_binomial(rng, vars)
    return f"({mono(a)} - ({rng.choice([1, -1])})*{mono(b)})"


def test_decomposition_reassembly(rng):
    done = 0
    while done < CASES:
        n = rng.randint(1, 3)
        vars = V3[:n]
        f = parse_poly("*".join(_random_binomial(rng, vars) for _ in range(rng.randint(1, 3))), vars)
        I = Ideal([f], vars)
        try:
            D = min_primes_binomial_class(I)
        except NotInClass:
            continue
        torus = saturate(I, prod(Poly.gens(vars), start=Poly.const(vars, 1)))
        if torus.is_unit():
            assert all(c.is_unit() for c in D.components) or not D.components
            done += 1
            continue
        meet = D.components[0]
        for c in D.components[1:]:
            meet = intersect(meet, c)
        meet = saturate(meet, prod(Poly.gens(vars), start=Poly.const(vars, 1)))
        # equal up to radical: the intersection is the radical of the torus part
        assert all(meet.contains(g) for g in torus.generators)
        assert all(radical_member(g, torus) for g in meet.generators)
        done += 1
