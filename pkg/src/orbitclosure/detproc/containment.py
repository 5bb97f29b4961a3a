"""Change-of-variables loci and rational points on them."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterator, Mapping, Sequence

from ..arith import CycloNum, euler_phi, rational_roots, utrim, zeta_pow
from ..matgroup import Mat
from ..poly import GREVLEX, LEX, Ideal, Poly, eliminate, groebner, normal_form
from ..poly.core import monomials_up_to
from .types import AnsatzDegreeExceeded

__all__ = [
    "symbolic_matrix",
    "containment_iso",
    "candidate_values",
    "rational_points",
    "rational_point",
    "field_roots",
]


def symbolic_matrix(d: int, stem: str = "p") -> tuple[list[list[str]], tuple[str, ...]]:
    """Names ``p11 .. pdd`` (``p_i_j`` once ``d`` exceeds 9) and their flat tuple."""
    sep = "" if d <= 9 else "_"
    names = [[f"{stem}{sep}{i + 1}{sep}{j + 1}" for j in range(d)] for i in range(d)]
    return names, tuple(n for row in names for n in row)


def _leading_x(g: Poly, xvars: Sequence[str]) -> tuple | None:
    """Leading x-monomial of ``g`` when its coefficient is a nonzero constant."""
    parts = g.coefficients_in(xvars)
    top = max(parts, key=lambda e: GREVLEX.key(e))
    coeff = parts[top]
    return top if coeff.is_constant() else None


def _complete_basis(G: Sequence[Poly], xvars: Sequence[str]) -> bool:
    """Pairwise coprime constant-coefficient leading terms: a Groebner basis in x
    for every value of the parameters, so degree-bounded cofactors suffice."""
    leads = [_leading_x(g, xvars) for g in G]
    if any(e is None for e in leads):
        return False
    for i, a in enumerate(leads):
        for b in leads[i + 1:]:
            if any(x and y for x, y in zip(a, b)):
                return False
    return True


def _x_degree(g: Poly, xvars: Sequence[str]) -> int:
    return max(sum(e) for e in g.coefficients_in(xvars))


def _ansatz_equations(sources: Sequence[Poly], targets: Sequence[Poly], xvars: Sequence[str],
                      ring: Sequence[str], stem: str, deg_bound: int | None) -> tuple[list[Poly], list[str]]:
    """Coefficient equations for ``F = sum h_j G_j`` with unknown cofactors ``h_j``."""
    cvars: list[str] = []
    pending = []
    for i, F in enumerate(sources):
        dF = _x_degree(F, xvars)
        combo = []
        for j, G in enumerate(targets):
            top = dF - _x_degree(G, xvars) if deg_bound is None else deg_bound
            if top < 0:
                continue
            for m in monomials_up_to(len(xvars), top):
                name = f"{stem}{len(cvars)}"
                cvars.append(name)
                combo.append((name, m, G))
        pending.append((F, combo))
    full = tuple(cvars) + tuple(ring)
    idx = {v: i for i, v in enumerate(full)}
    xpos = [idx[x] for x in xvars]
    eqs: list[Poly] = []
    for F, combo in pending:
        E = F.to_ring(full)
        for name, m, G in combo:
            exps = [0] * len(full)
            exps[idx[name]] = 1
            for p, a in zip(xpos, m):
                exps[p] += a
            E = E - Poly(full, {tuple(exps): 1}) * G.to_ring(full)
        eqs.extend(E.coefficients_in(xvars).values())
    return [e for e in eqs if e], cvars


def containment_iso(I1: Ideal, I2: Ideal, params: Mat | None = None, deg_bound: int | None = None,
                    mode: str = "contain", budget: int | None = None) -> Ideal:
    """Locus of parameters with ``F(P x) in I2`` for every generator ``F`` of ``I1``.

    ``I1`` lives in the point variables ``x``; ``I2`` may carry extra
    parameters (template parameters) after the point variables.  ``params``
    is a square matrix of polynomials in fresh parameter variables; by
    default ``p11 .. pdd``.  The result lives in the ring of matrix
    parameters followed by the extra parameters of ``I2``.

    Cofactors ``h_j`` have degree at most ``deg F - deg G_j`` (or
    ``deg_bound`` when given).  When ``I2`` has no extra parameters its
    reduced basis is used, and the default bound is then complete.  In
    ``equal`` mode the reverse containment is imposed as well.
    """
    xvars = I1.vars
    if I2.vars[:len(xvars)] != xvars:
        raise ValueError("the target ideal must start with the point variables")
    extra = I2.vars[len(xvars):]
    d = len(xvars)
    if params is None:
        _, pnames = symbolic_matrix(d)
        pring = pnames
        S = Mat([[Poly.var(pring, n) for n in row] for row in symbolic_matrix(d)[0]])
    else:
        S = params
        pring = S[0, 0].vars if isinstance(S[0, 0], Poly) else ()
    prm = tuple(pring) + tuple(v for v in extra if v not in pring)
    ring = prm + xvars
    if extra:
        targets = [g for g in I2.generators if g]
        complete = deg_bound is None and _complete_basis(targets, xvars)
    else:
        targets = list(I2.groebner())
        complete = deg_bound is None
    targets = [g.to_ring(ring) for g in targets]
    if any(g.is_constant() for g in targets):
        return Ideal([], prm)
    Sr = S.map(lambda a: a.to_ring(ring) if isinstance(a, Poly) else Poly.const(ring, a))
    xs = [Poly.var(ring, x) for x in xvars]
    images = {x: sum((Sr[i, j] * xs[j] for j in range(d)), Poly(ring)) for i, x in enumerate(xvars)}
    moved = [F.substitute(images, ring) for F in I1.generators]
    eqs, cvars = _ansatz_equations(moved, targets, xvars, ring, "_c", deg_bound)
    if mode == "equal":
        back, bvars = _ansatz_equations(targets, moved, xvars, ring, "_e", deg_bound)
        full = tuple(cvars) + tuple(bvars) + prm
        eqs = [e.to_ring(full) for e in eqs] + [e.to_ring(full) for e in back]
        cvars = cvars + bvars
        complete = False
    elif mode != "contain":
        raise ValueError(f"unknown containment mode {mode!r}")
    full = tuple(cvars) + prm
    J = eliminate(Ideal([e.to_ring(full) for e in eqs], full), cvars, budget)
    J = J.to_ring(prm)
    if J.is_unit() and not complete:
        raise AnsatzDegreeExceeded("no cofactors of the requested degree exist for any parameter value")
    return J


def candidate_values(bound: int) -> list[Fraction]:
    """``0, 1, -1, 2, -2, 1/2, -1/2, 3, ...`` up to numerators/denominators ``bound``."""
    out = [Fraction(0)]
    for n in range(1, bound + 1):
        for v in (Fraction(n), Fraction(-n), Fraction(1, n), Fraction(-1, n)):
            if v not in out:
                out.append(v)
    return out


def _solve_rational(polys: Sequence[Poly], vars: tuple[str, ...]) -> list[dict]:
    """All rational solutions of a zero-dimensional system (lex back-substitution)."""
    gb = groebner(list(polys), LEX) if polys else []
    if len(gb) == 1 and gb[0].is_constant():
        return []
    if not vars:
        return [{}] if not gb else []
    last = vars[-1]
    rest = vars[:-1]
    uni = [g for g in gb if g.support_vars() <= {last} and not g.is_constant()]
    if not uni:
        raise ValueError("system is not zero-dimensional")
    out = []
    for r in rational_roots(_dense(uni[0], last)):
        sub = [g.substitute({last: r}, rest) for g in gb]
        for sol in _solve_rational([g for g in sub if g], rest):
            out.append({**sol, last: r})
    return out


def _root_key(x):
    if isinstance(x, CycloNum):
        coords = [Fraction(c) for c in x.coeffs]
        return (1, max(max(abs(c.numerator), c.denominator) for c in coords), coords)
    x = Fraction(x)
    return (0, max(abs(x.numerator), x.denominator), [x < 0])


def field_roots(f: Sequence, q: int = 1) -> list:
    """All roots of ``f`` in ``Q(zeta_q)``.

    A root ``sum y_k zeta^k`` is found by solving the rational system given
    by the components of ``f(sum y_k zeta^k)`` in the power basis.
    """
    f = utrim(list(f))
    if len(f) <= 1:
        return []
    cyclo = any(isinstance(c, CycloNum) and not c.is_rational() for c in f)
    if q == 1 or (not cyclo and q == 2):
        if cyclo:
            raise ValueError("coefficients outside Q need a conductor")
        return sorted(set(rational_roots([Fraction(c.to_rat() if isinstance(c, CycloNum) else c) for c in f])),
                      key=_root_key)
    n = euler_phi(q)
    ys = tuple(f"_y{k}" for k in range(n))
    alpha = Poly(ys, {tuple(int(i == k) for i in range(n)): (zeta_pow(q, k) if k else 1) for k in range(n)})
    val = Poly(ys)
    power = Poly.const(ys, 1)
    for c in f:
        if c != 0:
            val = val + power * c
        power = power * alpha
    comps: list[dict] = [dict() for _ in range(n)]
    for e, c in val.terms.items():
        coords = list(c.coeffs) if isinstance(c, CycloNum) else [c]
        for m, a in enumerate(coords):
            if a != 0:
                comps[m][e] = a
    eqs = [Poly(ys, t) for t in comps if t]
    roots = []
    for sol in _solve_rational(eqs, ys):
        root = CycloNum(q, [sol[y] for y in ys])
        roots.append(_clean_scalar(root))
    return sorted(roots, key=_root_key)


def _solvable_linear(g: Poly) -> tuple[str, Poly] | None:
    """``(v, expr)`` with ``g = c (v - expr)``, ``c`` constant, ``expr`` free of ``v``.

    The leading variable is preferred when several qualify.
    """
    n = len(g.vars)
    lead, _ = g.leading(GREVLEX)
    order = sorted(range(n), key=lambda i: lead[i] == 0)
    for i in order:
        unit = tuple(int(j == i) for j in range(n))
        if unit not in g.terms or any(e[i] for e in g.terms if e != unit):
            continue
        rest = Poly(g.vars, {e: a for e, a in g.terms.items() if e != unit})
        return g.vars[i], -rest / g.terms[unit]
    return None


def _univariate(g: Poly) -> str | None:
    used = g.support_vars()
    return next(iter(used)) if len(used) == 1 else None


def _dense(g: Poly, v: str) -> list:
    i = g.vars.index(v)
    out = [0] * (g.degree_in(v) + 1)
    for e, c in g.terms.items():
        out[e[i]] = c
    return out


def _independent(gb: Sequence[Poly], vars: Sequence[str]) -> list[str]:
    """Greedy set of variables containing no leading monomial of ``gb``."""
    leads = [g.leading(GREVLEX)[0] for g in gb]
    chosen: list[int] = []
    for i in reversed(range(len(vars))):
        trial = set(chosen) | {i}
        if not any(all(a == 0 or j in trial for j, a in enumerate(e)) for e in leads):
            chosen.append(i)
    return [vars[i] for i in sorted(chosen)]


class _Budget:
    def __init__(self, nodes: int):
        self.left = nodes

    def take(self) -> bool:
        self.left -= 1
        return self.left >= 0


def rational_points(J: Ideal, nonvanishing: Sequence[Poly] = (), search_bound: int = 3, q: int = 1,
                    max_nodes: int = 4000) -> Iterator[dict[str, object]]:
    """Points of ``V(J)`` with coordinates in ``Q(zeta_q)``, found by back-substitution.

    Linear elements are solved directly, univariate ones through their roots
    in the field, and variables that are free modulo the leading ideal take
    values from :func:`candidate_values`.  Branches where a polynomial of
    ``nonvanishing`` lies in the ideal are pruned; yielded points make every
    one of them nonzero.
    """
    values = candidate_values(search_bound)
    budget = _Budget(max_nodes)
    checks = [f.to_ring(J.vars) for f in nonvanishing]
    yield from _search(J, checks, {}, [], values, q, budget)


def _finish(assign: dict, solved: list[tuple[str, Poly]]) -> dict:
    out = dict(assign)
    for v, expr in reversed(solved):
        val = expr.evaluate({w: out[w] for w in expr.vars})
        out[v] = _clean_scalar(val)
    return out


def _clean_scalar(x):
    if isinstance(x, CycloNum) and x.is_rational():
        x = x.to_rat()
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _search(J: Ideal, checks: list[Poly], assign: dict, solved: list, values, q: int,
            budget: _Budget) -> Iterator[dict]:
    if not budget.take():
        return
    while True:
        gb = J.groebner()
        if len(gb) == 1 and gb[0].is_constant():
            return
        for f in checks:
            if not normal_form(f, gb):
                return
        lin = None
        for g in sorted(gb, key=len):
            lin = _solvable_linear(g)
            if lin is not None:
                break
        if lin is None:
            break
        v, expr = lin
        rest = tuple(w for w in J.vars if w != v)
        J = Ideal([g.substitute({v: expr}, rest) for g in gb], rest)
        checks = [f.substitute({v: expr}, rest) for f in checks]
        solved = solved + [(v, expr.to_ring(rest))]
    if not J.vars:
        if all(f.evaluate({}) != 0 for f in checks):
            yield _finish(assign, solved)
        return
    branch_var, options = None, None
    for g in sorted(gb, key=lambda g: (g.total_degree(), len(g))):
        v = _univariate(g)
        if v is not None:
            branch_var, options = v, field_roots(_dense(g, v), q)
            break
    if branch_var is None:
        used = set().union(*(g.support_vars() for g in gb)) if gb else set()
        free = [v for v in J.vars if v not in used]
        if free:
            branch_var, options = free[0], values
        else:
            indep = _independent(gb, J.vars)
            if indep:
                branch_var, options = indep[0], values
            else:
                lex = groebner(list(gb), LEX)
                for g in lex:
                    v = _univariate(g)
                    if v is not None:
                        branch_var, options = v, field_roots(_dense(g, v), q)
                        break
    if branch_var is None:
        return
    rest = tuple(w for w in J.vars if w != branch_var)
    for val in options:
        val = _clean_scalar(val)
        sub = {branch_var: val}
        J2 = Ideal([g.substitute(sub, rest) for g in J.generators], rest)
        checks2 = [f.substitute(sub, rest) for f in checks]
        if any(f.is_constant() and not f for f in checks2):
            continue
        yield from _search(J2, checks2, {**assign, branch_var: val}, solved, values, q, budget)
        if budget.left < 0:
            return


def rational_point(J: Ideal, nonvanishing: Sequence[Poly] = (), search_bound: int = 3, q: int = 1,
                   accept: Callable[[Mapping[str, object]], bool] | None = None,
                   max_nodes: int = 4000) -> dict[str, object] | None:
    """First point found by :func:`rational_points` (passing ``accept``), or ``None``."""
    for point in rational_points(J, nonvanishing, search_bound, q, max_nodes):
        if accept is None or accept(point):
            return point
    return None
