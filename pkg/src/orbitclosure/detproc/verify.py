"""Independent checks of certificates and closure ideals rebuilt from generators."""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial, lcm, prod
from typing import Sequence

from ..arith import CycloNum, zeta_pow
from ..lattice import Lattice, kernel_basis, lattice_ideal
from ..matgroup import (
    Mat,
    Singular,
    is_unipotent,
    jordan_chevalley,
    nil_log,
    normalize_semisimple,
)
from ..poly import Ideal, Poly, ResourceLimit, eliminate, ideal_equal
from .types import Certificate

__all__ = [
    "relation_lattice",
    "closure_ideal",
    "verify_certificate",
]


def _root_of_unity_form(c) -> tuple[Fraction, int, int]:
    """Write ``c`` as ``r * zeta_Q^e`` with ``r > 0`` rational."""
    if isinstance(c, CycloNum) and not c.is_rational():
        q = c.q
        Q = lcm(q, 2)
        for e in range(q):
            w = c * zeta_pow(q, -e % q)
            if w.is_rational():
                r = w.to_rat()
                e2 = e * (Q // q)
                if r < 0:
                    r, e2 = -r, e2 + Q // 2
                return Fraction(r), e2 % Q, Q
        raise ValueError(f"{c} is not a rational multiple of a root of unity")
    r = Fraction(c.to_rat() if isinstance(c, CycloNum) else c)
    if r == 0:
        raise ValueError("zero has no multiplicative relations")
    return (r, 0, 1) if r > 0 else (-r, 1, 2)


def _prime_exponents(r: Fraction) -> dict[int, int]:
    out: dict[int, int] = {}
    for n, sign in ((r.numerator, 1), (r.denominator, -1)):
        p = 2
        while n > 1:
            if p * p > n:
                out[n] = out.get(n, 0) + sign
                break
            while n % p == 0:
                out[p] = out.get(p, 0) + sign
                n //= p
            p += 1
    return out


def relation_lattice(points: Sequence[Sequence]) -> Lattice:
    """``{u : prod_j g_j^u_j = 1 for every g in points}`` (entries ``r * zeta^e``)."""
    k = len(points[0]) if points else 0
    forms = [[_root_of_unity_form(c) for c in g] for g in points]
    Q = lcm(1, *(f[2] for g in forms for f in g))
    primes = sorted({p for g in forms for f in g for p in _prime_exponents(f[0])})
    rows = []
    nmod = len(forms)
    for i, g in enumerate(forms):
        exps = [_prime_exponents(f[0]) for f in g]
        for p in primes:
            rows.append([e.get(p, 0) for e in exps] + [0] * nmod)
        rows.append([f[1] * (Q // f[2]) for f in g] + [Q if j == i else 0 for j in range(nmod)])
    rows = [r for r in rows if any(r)]
    basis = kernel_basis(rows, k + nmod) if rows else [[int(i == j) for j in range(k)] for i in range(k)]
    return Lattice([v[:k] for v in basis if any(v[:k])], k)


def _poly_exp(N: Mat, ring: Sequence[str]) -> Mat:
    n = N.nrows
    one = Mat([[Poly.const(ring, int(i == j)) for j in range(n)] for i in range(n)])
    out, power = one, one
    for k in range(1, n):
        power = power * N
        out = out + power.scale(Fraction(1, factorial(k)))
    return out


def _lift(M: Mat, ring: Sequence[str]) -> Mat:
    return M.map(lambda a: a.to_ring(ring) if isinstance(a, Poly) else Poly.const(ring, a))


def closure_ideal(Ms: Sequence[Mat], xvars: Sequence[str], v: Sequence | None = None,
                  budget: int | None = None) -> Ideal:
    """Ideal of the closure of ``<M_1..M_s> v`` (or of the group itself when ``v`` is None).

    Group closures use ``d*d`` matrix variables, or ``d`` diagonal variables
    when every generator is diagonal.

    The generators are split into semisimple and unipotent parts, the
    semisimple parts are diagonalized together, their eigenvalue relations
    give the lattice, and the unipotent parts contribute ``exp(sum t_i log U_i)``.
    The parametrization is then eliminated.
    """
    Ms = list(Ms)
    d = Ms[0].nrows
    parts = [jordan_chevalley(M) for M in Ms]
    semis = [p[0] for p in parts]
    base = list(v) if v is not None else [1] * d
    P, Ds, T = normalize_semisimple(semis, base)
    Pinv = P.inverse()
    cols = list(T.cols) if v is not None else list(range(d))
    k = len(cols)
    lat = relation_lattice([[D[c, c] for c in cols] for D in Ds])
    logs = [P * nil_log(U) * Pinv for _, U in parts]
    logs = [L for L in logs if not L.is_zero()]
    tnames = [f"_t{i}" for i in range(len(logs))]
    gnames = [f"_g{j}" for j in range(k)]
    xvars = tuple(xvars)
    ring = tuple(tnames) + tuple(gnames) + xvars
    gen = Poly.var
    L = Mat.zeros(d).map(lambda a: Poly.const(ring, 0))
    for t, N in zip(tnames, logs):
        L = L + _lift(N, ring).scale(gen(ring, t))
    E = _poly_exp(L, ring)
    Pi = _lift(Pinv, ring)
    eqs = []
    lat_gens = [g.to_ring(ring) for g in lattice_ideal(lat, gnames).generators] if k else []
    if v is not None:
        y = [Poly.const(ring, 0)] * d
        for c, gname in zip(cols, gnames):
            y[c] = gen(ring, gname)
        point = Pi.apply(E.apply(y))
        eqs = [gen(ring, x) - point[i] for i, x in enumerate(xvars)]
    else:
        Dg = Mat([[gen(ring, gnames[i]) if i == j else Poly.const(ring, 0) for j in range(d)] for i in range(d)])
        X = Pi * E * Dg * _lift(P, ring)
        if len(xvars) == d * d:
            eqs = [gen(ring, xvars[i * d + j]) - X[i, j] for i in range(d) for j in range(d)]
        elif len(xvars) == d and all(M.is_diagonal() for M in Ms):
            eqs = [gen(ring, xvars[i]) - X[i, i] for i in range(d)]
        else:
            raise ValueError("group closure needs d*d matrix variables or diagonal generators")
    J = eliminate(Ideal(eqs + lat_gens, ring), tnames + gnames, budget)
    return J.to_ring(xvars)


def _mat_pow(M: Mat, n: int, cache: dict) -> Mat:
    if n not in cache:
        cache[n] = M ** n
    return cache[n]


def _check(report: dict, name: str, ok: bool, detail: str = "") -> None:
    report[name] = {"ok": bool(ok)} if not detail else {"ok": bool(ok), "detail": detail}


def _structure(cert: Certificate, report: dict) -> None:
    d = cert.M[0].nrows
    I = Mat.identity(d)
    Ms = cert.M
    _check(report, "generators_commute", all(A.commutes_with(B) for i, A in enumerate(Ms) for B in Ms[i + 1:]))
    if cert.P is not None and cert.Pinv is not None:
        _check(report, "P_times_Pinv", (cert.P * cert.Pinv).is_identity())
    if cert.D:
        _check(report, "D_diagonal", all(D.is_diagonal() for D in cert.D))
    if cert.U:
        _check(report, "U_unipotent", all(is_unipotent(U) for U in cert.U))
    if cert.D and cert.U:
        _check(report, "U_commutes_with_D", all(U.commutes_with(D) for U, D in zip(cert.U, cert.D)))
    if cert.Pinv is not None and cert.P is not None and cert.D:
        Us = cert.U or [I] * len(cert.D)
        ok = len(Us) == len(cert.D) == len(Ms) and all(
            cert.Pinv * U * D * cert.P == M for U, D, M in zip(Us, cert.D, Ms))
        _check(report, "M_equals_Pinv_U_D_P", ok)
    if cert.v is not None and cert.T is not None and cert.Pinv is not None:
        _check(report, "v_equals_Pinv_T_1", cert.Pinv.apply(cert.T.ones()) == list(cert.v))
    if cert.lattice is not None and cert.D:
        cols = list(cert.T.cols) if cert.T is not None else list(range(d))
        ok = True
        for D in cert.D:
            g = [D[c, c] for c in cols]
            for u in cert.lattice.basis:
                val = prod((x ** e for x, e in zip(g, u)), start=Fraction(1))
                if val != 1:
                    ok = False
        _check(report, "D_in_H_lattice", ok)


def _sampling(I: Ideal, cert: Certificate, N: int, report: dict) -> None:
    Ms = cert.M
    caches = [dict() for _ in Ms]
    failure = None
    count = 0
    try:
        for ns in product(range(-N, N + 1), repeat=len(Ms)):
            A = Mat.identity(Ms[0].nrows)
            for M, n, cache in zip(Ms, ns, caches):
                A = A * _mat_pow(M, n, cache)
            if cert.v is not None:
                point = A.apply(cert.v)
            elif len(I.vars) == A.nrows:
                point = A.diagonal() if A.is_diagonal() else []
            else:
                point = [a for row in A.rows for a in row]
            if len(point) != len(I.vars):
                failure = "point dimension does not match the ideal's variables"
                break
            values = dict(zip(I.vars, point))
            for idx, g in enumerate(I.generators):
                if g.evaluate(values) != 0:
                    failure = f"generator {idx} does not vanish at exponents {list(ns)}"
                    break
            if failure:
                break
            count += 1
    except Singular:
        failure = "a generator is singular"
    _check(report, "sampling", failure is None, failure or f"{count} points, |n| <= {N}")


def _closure(I: Ideal, cert: Certificate, report: dict, budget: int | None) -> None:
    try:
        J = closure_ideal(cert.M, I.vars, cert.v, budget)
        ok = ideal_equal(J, I)
        detail = "" if ok else "reconstructed ideal: " + "; ".join(J.canonical_strings())
    except ResourceLimit:
        ok, detail = False, "resource limit while eliminating"
    except (ValueError, ArithmeticError) as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    _check(report, "closure_equality", ok, detail)


def verify_certificate(I: Ideal, cert: Certificate, N: int = 5, budget: int | None = None) -> dict:
    """Run every check; ``report["ok"]`` is true iff all of them passed."""
    report: dict = {}
    d = cert.M[0].nrows
    if any(M.shape != (d, d) for M in cert.M):
        _check(report, "shapes", False, "generators must be square of one size")
    elif cert.v is not None and len(cert.v) != d:
        _check(report, "shapes", False, "base point has the wrong length")
    else:
        _structure(cert, report)
        _sampling(I, cert, N, report)
        if report["sampling"]["ok"]:
            _closure(I, cert, report, budget)
        else:
            _check(report, "closure_equality", False, "skipped after sampling failure")
    report["ok"] = all(entry["ok"] for entry in report.values())
    return report
