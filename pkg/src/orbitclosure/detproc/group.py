"""Group determination and cyclic generators for varieties of matrices.

Matrix variables are the ``d*d`` entries in row-major order.  Diagonal
instances carry only the ``d`` diagonal entries.  Conjugating matrices
follow the certificate convention ``M = Pinv U D P``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import permutations, product
from math import lcm
from typing import Sequence

from ..arith import CycloNum, zeta_pow
from ..decomp import NoIdentityComponent, NotInClass, identity_component, min_primes_binomial_class
from ..lattice import (
    Lattice,
    coset_ideal,
    generators_of_H,
    is_s_generated,
    lattice_from_polys,
    lattice_ideal,
    sublattices_of_index,
    torsion_characters,
)
from ..matgroup import (
    EigenvalueFieldTooLarge,
    Mat,
    NotSimultaneouslyDiagonalizable,
    Singular,
    jordan_chevalley,
    nil_exp,
    nil_log,
    normalize_semisimple,
    nullspace,
)
from ..poly import (
    Ideal,
    Poly,
    ResourceLimit,
    eliminate,
    ideal_equal,
    intersect,
    linear_variety_basis,
    radical_member,
)
from .containment import rational_points, symbolic_matrix
from .types import NO, UNKNOWN, YES, Certificate, DetInstance, Verdict
from .verify import relation_lattice, verify_certificate

__all__ = [
    "is_alg_group",
    "is_commutative_group",
    "diagonal_conjugates",
    "group_det_semisimple",
    "group_det_commutative",
    "gen_semisimple_cyclic",
    "gen_general_cyclic",
]

SAMPLE_POINTS = 6


# ---------------------------------------------------------------------------
# shapes and substitutions


def _dim(vars: Sequence[str], shape: str) -> int:
    return math.isqrt(len(vars)) if shape == "matrix" else len(vars)


def _var_matrix(names: Sequence[str], ring: Sequence[str], shape: str) -> Mat:
    ring = tuple(ring)
    d = _dim(names, shape)
    zero = Poly.const(ring, 0)
    if shape == "diagonal":
        return Mat([[Poly.var(ring, names[i]) if i == j else zero for j in range(d)] for i in range(d)])
    return Mat([[Poly.var(ring, names[i * d + j]) for j in range(d)] for i in range(d)])


def _flat(X: Mat, shape: str) -> list:
    if shape == "diagonal":
        return X.diagonal()
    return [a for row in X.rows for a in row]


def _compose(F: Poly, X: Mat, shape: str, ring: Sequence[str]) -> Poly:
    """``F`` evaluated at the entries of ``X`` (polynomials over ``ring``)."""
    return F.substitute(dict(zip(F.vars, _flat(X, shape))), tuple(ring))


def _lift(M: Mat, ring: Sequence[str]) -> Mat:
    return M.map(lambda a: a.to_ring(ring) if isinstance(a, Poly) else Poly.const(ring, a))


def conjugate_ideal(I: Ideal, P: Mat, shape: str = "matrix") -> Ideal:
    """``{f(P X P^-1)}``, the ideal of ``P^-1 V(I) P``."""
    X = _var_matrix(I.vars, I.vars, shape)
    Y = _lift(P, I.vars) * X * _lift(P.inverse(), I.vars)
    return Ideal([_compose(f, Y, shape, I.vars) for f in I.generators], I.vars)


# ---------------------------------------------------------------------------
# group tests


def _doubled(I: Ideal, shape: str):
    xs = I.vars
    ys = tuple(f"_y{i}" for i in range(len(xs)))
    ring = xs + ys + ("_u", "_w")
    X = _var_matrix(xs, ring, shape)
    Y = _var_matrix(ys, ring, shape)
    rename = dict(zip(xs, (Poly.var(ring, y) for y in ys)))
    gens = [f.to_ring(ring) for f in I.generators]
    gens += [f.substitute(rename, ring) for f in I.generators]
    gens += [X.det() * Poly.var(ring, "_u") - 1, Y.det() * Poly.var(ring, "_w") - 1]
    return Ideal(gens, ring), X, Y, ring


def is_alg_group(I: Ideal, shape: str = "matrix") -> bool:
    """``V(I)`` inside GL_d is nonempty and closed under products.

    A nonempty Zariski-closed submonoid of GL_d is a subgroup, so the product
    test settles the question.
    """
    base, X, Y, ring = _doubled(I, shape)
    if base.is_unit():
        return False
    XY = X * Y
    return all(radical_member(_compose(f, XY, shape, ring), base) for f in I.generators)


def is_commutative_group(I: Ideal, shape: str = "matrix") -> bool:
    if not is_alg_group(I, shape):
        return False
    if shape == "diagonal":
        return True
    base, X, Y, _ = _doubled(I, shape)
    C = X * Y - Y * X
    return all(radical_member(c, base) for row in C.rows for c in row if c != 0)


def _group_checks(inst: DetInstance, log: list) -> Verdict | None:
    """NO verdict when the variety is not a commutative group."""
    if not is_alg_group(inst.ideal, inst.shape):
        return Verdict(NO, reason="the variety is not a group (not closed under products or empty)", log=log)
    if not is_commutative_group(inst.ideal, inst.shape):
        return Verdict(NO, reason="the group is not commutative", log=log)
    log.append("commutative algebraic group")
    return None


# ---------------------------------------------------------------------------
# diagonal conjugates and their torsion-coset components


def _diag_names(d: int) -> tuple[str, ...]:
    return tuple(f"_x{i}" for i in range(d))


def _projected_components(I: Ideal, R: Mat, budget: int | None) -> list[Ideal] | None:
    """Components of the diagonal conjugates through a triangularization ``R^-1 V(I) R``.

    For a commutative group in upper triangular form the diagonal conjugates
    are the permutations of the diagonal projection (semisimple parts keep
    the diagonal).  None when ``R`` does not triangularize all of ``V(I)``.
    """
    d = R.nrows
    G = conjugate_ideal(I, R)
    lower = [Poly.var(G.vars, G.vars[i * d + j]) for i in range(d) for j in range(i)]
    if not all(radical_member(x, G) for x in lower):
        return None
    diag = [G.vars[i * d + i] for i in range(d)]
    image = eliminate(G, [v for v in G.vars if v not in diag], budget).to_ring(tuple(diag))
    dn = _diag_names(d)
    image = Ideal([g.substitute({a: Poly.var(dn, b) for a, b in zip(diag, dn)}, dn) for g in image.generators], dn)
    comps: list[Ideal] = []
    for c in min_primes_binomial_class(image).components:
        for sigma in permutations(range(d)):
            pc = _permuted(c, sigma)
            if _index_of(pc, comps) is None:
                comps.append(pc)
    return sorted(_minimal(comps), key=lambda c: c.canonical_strings())


def _triangular_components(I: Ideal, samples: Sequence[Mat], budget: int | None) -> list[Ideal] | None:
    d = samples[0].nrows
    R = _triangularizing(list(samples))
    for cand in [Mat.identity(d)] + ([R] if R is not None and not R.is_identity() else []):
        comps = _projected_components(I, cand, budget)
        if comps is not None:
            return comps
    return None


def diagonal_conjugates(I: Ideal, budget: int | None = None, samples: Sequence[Mat] = ()) -> Ideal:
    """Ideal of the diagonal matrices conjugate to a point of ``V(I)``.

    The result lives in the diagonal variables ``_x0 .. _x{d-1}``.  With
    sample points of a commutative group, a rational triangularization is
    tried first; otherwise ``P X P^-1`` is eliminated over ``P``.
    """
    d = math.isqrt(len(I.vars))
    comps = _triangular_components(I, samples, budget) if samples else None
    if comps is not None:
        return _intersection(comps)
    pn, pflat = symbolic_matrix(d, "_p")
    qn, qflat = symbolic_matrix(d, "_q")
    dn = _diag_names(d)
    ring = pflat + qflat + dn
    P = Mat([[Poly.var(ring, a) for a in row] for row in pn])
    Q = Mat([[Poly.var(ring, a) for a in row] for row in qn])
    X = _var_matrix(dn, ring, "diagonal")
    gens = [_compose(f, P * X * Q, "matrix", ring) for f in I.generators]
    gens += [c for row in (P * Q - Mat.identity(d)).rows for c in row if c != 0]
    return eliminate(Ideal(gens, ring), pflat + qflat, budget).to_ring(dn)


def _same(a: Ideal, b: Ideal) -> bool:
    return all(a.contains(g) for g in b.generators) and all(b.contains(g) for g in a.generators)


def _index_of(comp: Ideal, comps: Sequence[Ideal]) -> int | None:
    for i, c in enumerate(comps):
        if _same(comp, c):
            return i
    return None


def _translate(P0: Ideal, c: Sequence) -> Ideal:
    """Ideal of ``c * V(P0)`` (coordinatewise product)."""
    vars = P0.vars
    sub = {v: Poly.var(vars, v) * (1 / ci if not isinstance(ci, int) else Fraction(1, ci))
           for v, ci in zip(vars, c)}
    return Ideal([g.substitute(sub, vars) for g in P0.generators], vars)


def _permuted(I: Ideal, sigma: Sequence[int]) -> Ideal:
    vars = I.vars
    sub = {vars[i]: Poly.var(vars, vars[sigma[i]]) for i in range(len(vars))}
    return Ideal([g.substitute(sub, vars) for g in I.generators], vars)


def _minimal(comps: list[Ideal]) -> list[Ideal]:
    unique: list[Ideal] = []
    for c in comps:
        if _index_of(c, unique) is None:
            unique.append(c)
    return [c for i, c in enumerate(unique)
            if not any(j != i and all(c.contains(g) for g in o.generators) for j, o in enumerate(unique))]


def _lattice_of(component: Ideal) -> Lattice:
    gb = list(component.groebner())
    return lattice_from_polys(gb, len(component.vars)) if gb else Lattice.zero(len(component.vars))


def _coset_components(lat: Lattice, vars: Sequence[str]) -> list[Ideal]:
    return [coset_ideal(chi, vars) for chi in torsion_characters(lat)]


def _fitting_lattices(comps: Sequence[Ideal], lam0: Lattice, exact: bool) -> list[Lattice]:
    """Finite-index sublattices of ``lam0`` whose cosets are components.

    With ``exact`` the cosets must be all of the components.  Otherwise the
    components are the diagonal forms of every conjugate, so the coordinate
    permutations of the cosets must give each component.
    """
    vars = comps[0].vars
    d = len(vars)
    out = []
    for n in range(1, len(comps) + 1):
        if exact and n != len(comps):
            continue
        for lat in sublattices_of_index(lam0, n):
            cosets = _coset_components(lat, vars)
            if any(_index_of(c, comps) is None for c in cosets):
                continue
            if not exact:
                orbit = [_permuted(c, sigma) for sigma in permutations(range(d)) for c in cosets]
                if any(_index_of(c, orbit) is None for c in comps):
                    continue
            out.append(lat)
    return out


def _torus_data(J: Ideal, log: list):
    """Components of ``J`` (diagonal variables) and the identity component."""
    dec = min_primes_binomial_class(J)
    comps = list(dec.components)
    P0 = identity_component(dec)
    log.append(f"{len(comps)} components: " + " | ".join(", ".join(c.canonical_strings()) for c in comps))
    return comps, P0


def _embed_diagonal(comp: Ideal, xvars: Sequence[str], d: int) -> Ideal:
    """A diagonal-variable ideal placed on the diagonal of the matrix ring."""
    dn = comp.vars
    diag = {dn[i]: Poly.var(xvars, xvars[i * d + i]) for i in range(d)}
    gens = [Poly.var(xvars, xvars[i * d + j]) for i in range(d) for j in range(d) if i != j]
    gens += [g.substitute(diag, xvars) for g in comp.generators]
    return Ideal(gens, xvars)


def _conductor(values: Sequence) -> int:
    return lcm(1, *(v.q for v in values if isinstance(v, CycloNum)))


def _inverse_point(I: Ideal, Ds: Sequence[Mat], q: int, opts: dict, log: list):
    """Points ``P`` with ``P^-1 D_i P`` in ``V(I)`` for every ``i``.

    Yields ``(P, J_1)``; ``J_1`` is the elimination ideal in the entries of P.
    """
    d = Ds[0].nrows
    pn, pflat = symbolic_matrix(d, "p")
    qn, qflat = symbolic_matrix(d, "q")
    ring = pflat + qflat
    P = Mat([[Poly.var(ring, a) for a in row] for row in pn])
    Q = Mat([[Poly.var(ring, a) for a in row] for row in qn])
    gens = []
    for D in Ds:
        Y = Q * _lift(D, ring) * P
        gens += [_compose(f, Y, "matrix", ring) for f in I.generators]
    gens += [c for row in (P * Q - Mat.identity(d)).rows for c in row if c != 0]
    J1 = eliminate(Ideal(gens, ring), qflat, opts.get("budget")).to_ring(pflat)
    if J1.is_unit():
        return J1, []
    det = Mat([[Poly.var(pflat, a) for a in row] for row in pn]).det()
    points = []
    for point in rational_points(J1, [det], opts.get("search_bound", 3), q, opts.get("max_nodes", 4000)):
        points.append(Mat([[point[a] for a in row] for row in pn]))
        if len(points) >= 4:
            break
    return J1, points


def _certify(inst: DetInstance, cert: Certificate, opts: dict) -> bool:
    cert.verify = verify_certificate(inst.ideal, cert, opts.get("verify_N", 5), opts.get("budget"))
    return cert.verify["ok"]


# ---------------------------------------------------------------------------
# semisimple group determination


def _diagonal_instance(inst: DetInstance, kind: str, log: list, opts: dict) -> Verdict:
    """Group modes when the variables are the diagonal entries themselves."""
    try:
        comps, P0 = _torus_data(inst.ideal, log)
    except NotInClass as exc:
        return Verdict(UNKNOWN, reason=f"decomposition outside the torsion-coset class: {exc}", log=log)
    except NoIdentityComponent:
        return Verdict(NO, reason="no component passes through the identity", log=log)
    lam0 = _lattice_of(P0)
    fits = _fitting_lattices(comps, lam0, exact=True)
    if not fits:
        return Verdict(NO, reason="the components are not the cosets of one diagonal group", log=log)
    lat = fits[0]
    log.append(f"lattice {lat.to_json()} with elementary divisors {list(lat.divisors)}")
    if not is_s_generated(lat, inst.s):
        return Verdict(NO, reason=f"elementary divisors {list(lat.divisors)} need more than {inst.s} generators",
                       log=log)
    d = inst.dim
    Ds = [Mat.diag(g) for g in generators_of_H(lat, inst.s)]
    I_d = Mat.identity(d)
    cert = Certificate(kind, Ds, P=I_d, Pinv=I_d, lattice=lat, D=Ds, U=[I_d] * inst.s)
    if _certify(inst, cert, opts):
        return Verdict(YES, cert, log=log, trace={"lattice": lat, "components": comps})
    return Verdict(UNKNOWN, reason="the diagonal certificate failed verification", log=log)


def _zariski_dim(I: Ideal, shape: str) -> int:
    X = _var_matrix(I.vars, I.vars + ("_u",), shape)
    ring = I.vars + ("_u",)
    gens = [g.to_ring(ring) for g in I.generators] + [X.det() * Poly.var(ring, "_u") - 1]
    return Ideal(gens, ring).dimension()


def group_det_semisimple(inst: DetInstance, **opts) -> Verdict:
    """Is ``V(I)`` the closure of the group generated by ``s`` commuting semisimple matrices?"""
    log: list[str] = []
    try:
        bad = _group_checks(inst, log)
        if bad is not None:
            return bad
        if inst.shape == "diagonal":
            return _diagonal_instance(inst, "group-semisimple", log, opts)
        return _matrix_semisimple(inst, log, opts)
    except ResourceLimit:
        return Verdict(UNKNOWN, reason="resource limit", log=log, limit_hit=True)


def _matrix_semisimple(inst: DetInstance, log: list, opts: dict) -> Verdict:
    I = inst.ideal
    d = inst.dim
    J = diagonal_conjugates(I, opts.get("budget"))
    try:
        comps, P0 = _torus_data(J, log)
    except NotInClass as exc:
        return Verdict(UNKNOWN, reason=f"decomposition outside the torsion-coset class: {exc}", log=log)
    except NoIdentityComponent:
        return Verdict(NO, reason="no diagonal conjugate component passes through the identity", log=log)
    lam0 = _lattice_of(P0)
    if d - lam0.rank != _zariski_dim(I, "matrix"):
        return Verdict(NO, reason="the group has non-semisimple elements (semisimple part has lower dimension)",
                       log=log)
    fits = _fitting_lattices(comps, lam0, exact=False)
    good = [lat for lat in fits if is_s_generated(lat, inst.s)]
    if not good:
        return Verdict(NO, reason=f"no candidate diagonal group is {inst.s}-generated", log=log)
    upto = inst.b + 1
    hf = I.hilbert_function(upto)
    for lat in good:
        target = _embed_diagonal(lattice_ideal(lat, _diag_names(d)), I.vars, d)
        if target.hilbert_function(upto) != hf:
            continue
        gens = generators_of_H(lat, inst.s)
        Ds = [Mat.diag(g) for g in gens]
        q = _conductor([x for g in gens for x in g])
        log.append(f"lattice {lat.to_json()}")
        J1, points = _inverse_point(I, Ds, q, opts, log)
        for P in points:
            try:
                Pinv = P.inverse()
            except Singular:
                continue
            Ms = [Pinv * D * P for D in Ds]
            cert = Certificate("group-semisimple", Ms, P=P, Pinv=Pinv, lattice=lat, D=Ds,
                               U=[Mat.identity(d)] * inst.s)
            if _certify(inst, cert, opts):
                return Verdict(YES, cert, log=log, trace={"J": J, "components": comps, "J_1": J1})
        log.append("no verified conjugating matrix")
    return Verdict(UNKNOWN, reason="no rational conjugating matrix produced a verified certificate", log=log)


# ---------------------------------------------------------------------------
# commutative group determination


def _chain_basis(Ns: Sequence[Mat], n: int) -> list[list]:
    """Basis ``b_1..b_n`` with every ``N b_j`` in the span of earlier vectors."""
    basis: list[list] = []
    while len(basis) < n:
        # vectors x with N x in span(basis) for every N
        rows = []
        k = len(basis)
        width = n + k * len(Ns)
        for t, N in enumerate(Ns):
            # N x - B c_t = 0 with unknowns (x, c_1, .., c_m)
            for i in range(n):
                row = list(N.rows[i]) + [0] * (k * len(Ns))
                for j, b in enumerate(basis):
                    row[n + t * k + j] = -b[i]
                rows.append(row)
        if rows:
            sols = nullspace(Mat(rows))
        else:
            sols = [[int(i == j) for i in range(width)] for j in range(width)]
        added = False
        for s in sols:
            x = s[:n]
            M = Mat.from_columns(basis + [x]) if basis else Mat.from_columns([x])
            if len(nullspace(M)) == 0:
                basis.append(x)
                added = True
        if not added:
            break
    return basis


def _triangularizing(samples: Sequence[Mat]) -> Mat | None:
    """``P`` with ``P^-1 A P`` upper triangular for all samples."""
    d = samples[0].nrows
    parts = [jordan_chevalley(A) for A in samples]
    S = [p[0] for p in parts]
    try:
        P0, Ds, _ = normalize_semisimple(S, [1] * d)
    except (NotSimultaneouslyDiagonalizable, EigenvalueFieldTooLarge, Singular):
        return None
    P0inv = P0.inverse()
    Ns = [P0 * (U - Mat.identity(d)) * P0inv for _, U in parts]
    labels = [tuple(D[i, i] for D in Ds) for i in range(d)]
    blocks: list[list[int]] = []
    for i in range(d):
        if blocks and labels[blocks[-1][0]] == labels[i]:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    B = [[0] * d for _ in range(d)]
    for block in blocks:
        sub = [Mat([[N[i, j] for j in block] for i in block]) for N in Ns]
        basis = _chain_basis(sub, len(block))
        if len(basis) != len(block):
            return None
        for col, vec in zip(block, basis):
            for r, val in zip(block, vec):
                B[r][col] = val
    return P0inv * Mat(B)


def _samples(I: Ideal, opts: dict) -> list[Mat]:
    d = math.isqrt(len(I.vars))
    X = _var_matrix(I.vars, I.vars, "matrix")
    out = []
    for point in rational_points(I, [X.det()], opts.get("search_bound", 3), 1, opts.get("max_nodes", 4000)):
        A = Mat([[point[I.vars[i * d + j]] for j in range(d)] for i in range(d)])
        if any(A[i, j] != 0 for i in range(d) for j in range(d) if i != j) or len(set(A.diagonal())) > 1:
            out.append(A)
        if len(out) >= SAMPLE_POINTS:
            break
    return out


def _with_inverse(G: Ideal) -> Ideal:
    ring = G.vars + ("_u",)
    X = _var_matrix(G.vars, ring, "matrix")
    return Ideal([g.to_ring(ring) for g in G.generators] + [X.det() * Poly.var(ring, "_u") - 1], ring)


def _upper_triangular_group(G: Ideal) -> bool:
    """Strictly lower entries vanish and the diagonal projection stays inside."""
    d = math.isqrt(len(G.vars))
    base = _with_inverse(G)
    ring = base.vars
    for i in range(d):
        for j in range(i):
            if not radical_member(Poly.var(ring, G.vars[i * d + j]), base):
                return False
    X = _var_matrix(G.vars, ring, "matrix")
    Dx = Mat([[X[i, j] if i == j else Poly.const(ring, 0) for j in range(d)] for i in range(d)])
    return all(radical_member(_compose(f, Dx, "matrix", ring), base) for f in G.generators)


def _unipotent_log_space(G: Ideal) -> list[Mat] | None:
    """Basis of ``{log A : A in G unipotent}`` when it is a linear space."""
    d = math.isqrt(len(G.vars))
    xv = G.vars
    upper = [(i, j) for i in range(d) for j in range(i + 1, d)]
    nn = tuple(f"_n{i}{j}" for i, j in upper)
    ring = xv + nn
    L = nil_log(_unitriangular(xv, ring, d))
    gens = [g.to_ring(ring) for g in G.generators]
    gens += [Poly.var(ring, xv[i * d + j]) for i in range(d) for j in range(i)]
    gens += [Poly.var(ring, xv[i * d + i]) - 1 for i in range(d)]
    gens += [Poly.var(ring, n) - L[i, j] for n, (i, j) in zip(nn, upper)]
    image = eliminate(Ideal(gens, ring), xv).to_ring(nn) if nn else Ideal([], ())
    if not nn:
        return []
    forms = linear_variety_basis(image)
    if forms is None:
        return None
    if forms and forms[0].is_constant() and forms[0] != 0:
        return None
    rows = []
    for f in forms:
        if f.constant_term() != 0:
            return None
        rows.append([f.terms.get(tuple(int(k == m) for k in range(len(nn))), 0) for m in range(len(nn))])
    basis = nullspace(Mat(rows)) if rows else [[int(i == j) for i in range(len(nn))] for j in range(len(nn))]
    out = []
    for vec in basis:
        N = [[0] * d for _ in range(d)]
        for (i, j), val in zip(upper, vec):
            N[i][j] = val
        out.append(Mat(N))
    return out


def _unitriangular(xv, ring, d) -> Mat:
    one, zero = Poly.const(ring, 1), Poly.const(ring, 0)
    return Mat([[one if i == j else (Poly.var(ring, xv[i * d + j]) if j > i else zero) for j in range(d)]
                for i in range(d)])


def group_det_commutative(inst: DetInstance, **opts) -> Verdict:
    """Is ``V(I)`` the closure of the group generated by ``s`` commuting matrices?"""
    log: list[str] = []
    try:
        bad = _group_checks(inst, log)
        if bad is not None:
            return bad
        if inst.shape == "diagonal":
            return _diagonal_instance(inst, "group-commutative", log, opts)
        return _matrix_commutative(inst, log, opts)
    except ResourceLimit:
        return Verdict(UNKNOWN, reason="resource limit", log=log, limit_hit=True)


def _matrix_commutative(inst: DetInstance, log: list, opts: dict) -> Verdict:
    I = inst.ideal
    d = inst.dim
    candidates = [Mat.identity(d)]
    samples = _samples(I, opts)
    if samples:
        P = _triangularizing(samples)
        if P is not None and not P.is_identity():
            candidates.append(P)
    for P in candidates:
        G = conjugate_ideal(I, P)  # ideal of P^-1 Z P
        if not _upper_triangular_group(G):
            log.append("candidate P does not triangularize with diagonal semisimple part")
            continue
        diag_ideal = _diagonal_slice(G, d)
        try:
            comps, P0 = _torus_data(diag_ideal, log)
        except NotInClass as exc:
            return Verdict(UNKNOWN, reason=f"decomposition outside the torsion-coset class: {exc}", log=log)
        fits = _fitting_lattices(comps, _lattice_of(P0), exact=True)
        if not fits:
            log.append("diagonal slice is not a diagonal group")
            continue
        lat = fits[0]
        logs = _unipotent_log_space(G)
        if logs is None:
            return Verdict(UNKNOWN, reason="unipotent logarithms do not form a recognizable linear variety", log=log)
        log.append(f"lattice {lat.to_json()}, unipotent dimension {len(logs)}")
        if not is_s_generated(lat, inst.s):
            return Verdict(NO, reason=f"elementary divisors {list(lat.divisors)} need more than {inst.s} generators",
                           log=log)
        if len(logs) > inst.s:
            return Verdict(NO, reason=f"unipotent part has dimension {len(logs)} > s = {inst.s}", log=log)
        Ds = [Mat.diag(g) for g in generators_of_H(lat, inst.s)]
        Us = [nil_exp(N) for N in logs] + [Mat.identity(d)] * (inst.s - len(logs))
        Pinv = P
        Pm = P.inverse()
        Ms = [Pinv * U * D * Pm for U, D in zip(Us, Ds)]
        cert = Certificate("group-commutative", Ms, P=Pm, Pinv=Pinv, lattice=lat, D=Ds, U=Us)
        if _certify(inst, cert, opts):
            return Verdict(YES, cert, log=log, trace={"G": G, "components": comps})
        log.append("assembled generators failed verification")
    return Verdict(UNKNOWN, reason="no triangularizing rational P found", log=log)


def _diagonal_slice(G: Ideal, d: int) -> Ideal:
    dn = _diag_names(d)
    sub = {}
    for i in range(d):
        for j in range(d):
            sub[G.vars[i * d + j]] = Poly.var(dn, dn[i]) if i == j else Poly.const(dn, 0)
    return Ideal([g.substitute(sub, dn) for g in G.generators], dn)


# ---------------------------------------------------------------------------
# cyclic generators


def _cyclic_setup(inst: DetInstance, log: list, opts: dict, trace: dict):
    """Diagonal conjugates, their components and the identity component."""
    samples = _samples(inst.ideal, opts) if inst.dim > 2 else []
    comps = _triangular_components(inst.ideal, samples, opts.get("budget")) if samples else None
    if comps is not None:
        # components come from the projection; J is kept for the trace only
        J = _intersection(comps)
        P0 = next(c for c in comps if all(g.evaluate([1] * inst.dim) == 0 for g in c.generators))
        log.append(f"{len(comps)} components from the triangularized diagonal projection")
    else:
        J = diagonal_conjugates(inst.ideal, opts.get("budget"))
        comps, P0 = _torus_data(J, log)
    trace.update(J0_elim=J, components=comps, P0=P0)
    return J, comps, P0


def _root_candidates(comps: Sequence[Ideal], P0: Ideal, d: int):
    """Candidates ``(q, e, D_q, translates, orbit_ok)`` whose translates are all components.

    ``orbit_ok`` says whether coordinate permutations of the translates give every component.
    """
    lam0 = _lattice_of(P0)
    (free,) = generators_of_H(lam0, 1)
    target = _minimal(list(comps))
    for q in range(1, len(comps) + 1):
        for e in product(range(q), repeat=d):
            if q > 1 and math.gcd(q, *e) != 1:
                continue
            Dq = [_clean(zeta_pow(q, ej) * f) if q > 1 else f for ej, f in zip(e, free)]
            translates = [P0]
            ok = True
            power = [1] * d
            for i in range(1, q):
                power = [_clean(a * b) for a, b in zip(power, Dq)]
                T = _translate(P0, power)
                if _index_of(T, comps) is None:
                    ok = False
                    break
                translates.append(T)
            if not ok:
                continue
            orbit = []
            for sigma in permutations(range(d)):
                orbit.extend(_permuted(T, sigma) for T in translates)
            if len(_minimal(orbit)) != len(target) or any(_index_of(c, target) is None for c in _minimal(orbit)):
                yield q, e, Dq, translates, False
                continue
            yield q, e, Dq, translates, True


def _clean(x):
    if isinstance(x, CycloNum) and x.is_rational():
        r = x.to_rat()
        return r.numerator if r.denominator == 1 else r
    return x


def _intersection(ideals: Sequence[Ideal]) -> Ideal:
    out = ideals[0]
    for other in ideals[1:]:
        out = intersect(out, other)
    return out


def _cyclic_front(inst: DetInstance, log: list, opts: dict, trace: dict):
    """Shared search for ``D_q`` and ``J_1``; returns a verdict or ``(D_q, J_1, points, I_q)``."""
    I = inst.ideal
    d = inst.dim
    try:
        J, comps, P0 = _cyclic_setup(inst, log, opts, trace)
    except NotInClass as exc:
        return Verdict(UNKNOWN, reason=f"components outside the binomial class ({exc})", log=log)
    except NoIdentityComponent:
        return Verdict(NO, reason="no component passes through the identity", log=log)
    saw_orbit_miss = False
    for q, e, Dq, translates, orbit_ok in _root_candidates(comps, P0, d):
        if not orbit_ok:
            saw_orbit_miss = True
            continue
        D = [_clean(x ** q) for x in Dq]
        Dqm = Mat.diag(Dq)
        log.append(f"q={q}, e={list(e)}, D={[str(x) for x in D]}")
        Iq = _intersection(translates)
        J1, points = _inverse_point(I, [Dqm], q, opts, log)
        trace.update(q=q, e=e, D=Mat.diag(D), D_q=Dqm, I_q=Iq, J_1=J1)
        if J1.is_unit():
            log.append("J_1 is the unit ideal")
            continue
        if not points:
            return Verdict(UNKNOWN, reason="no rational point of V(J_1) found", log=log)
        return Dqm, J1, points, Iq
    if saw_orbit_miss:
        return Verdict(NO, reason="permuted copies of I_q do not give J", log=log)
    return Verdict(NO, reason="no root of D rotates the components", log=log)


def gen_semisimple_cyclic(inst: DetInstance, **opts) -> Verdict:
    """Is ``V(I)`` the closure of the cyclic group of one semisimple matrix?"""
    log: list[str] = []
    trace: dict = {}
    try:
        bad = _group_checks(inst, log)
        if bad is not None:
            return bad
        out = _cyclic_front(inst, log, opts, trace)
        if isinstance(out, Verdict):
            out.trace = trace
            return out
        Dq, J1, points, Iq = out
        d = inst.dim
        Iq_full = _embed_diagonal(Iq, inst.vars, d)
        radical_only = False
        for P in points:
            Pinv = P.inverse()
            conj = conjugate_ideal(Iq_full, P)  # ideal of Pinv V(I_q) P
            if not ideal_equal(conj, inst.ideal):
                if all(radical_member(g, inst.ideal) for g in conj.generators):
                    radical_only = True
                continue
            M = Pinv * Dq * P
            lat = relation_lattice([Dq.diagonal()])
            cert = Certificate("gen-cyclic-semisimple", [M], P=P, Pinv=Pinv, lattice=lat, D=[Dq],
                               U=[Mat.identity(d)])
            if _certify(inst, cert, opts):
                trace["P"] = P
                return Verdict(YES, cert, log=log, trace=trace)
        if radical_only:
            return Verdict(UNKNOWN, reason="the conjugated I_q agrees with I only up to radical; the input ideal is not radical",
                           log=log, trace=trace)
        return Verdict(NO, reason="the conjugated I_q differs from I", log=log, trace=trace)
    except ResourceLimit:
        return Verdict(UNKNOWN, reason="resource limit", log=log, trace=trace, limit_hit=True)


def unipotent_slice(I: Ideal) -> Ideal:
    """``I + <entries of (X - Id)^d>``."""
    d = math.isqrt(len(I.vars))
    X = _var_matrix(I.vars, I.vars, "matrix") - Mat.identity(d)
    Nd = X ** d if d > 1 else X
    return I + [c for row in Nd.rows for c in row if c != 0]


def gen_general_cyclic(inst: DetInstance, **opts) -> Verdict:
    """Closure of the cyclic group of one matrix with a unipotent part of dimension at most one."""
    log: list[str] = []
    trace: dict = {}
    try:
        bad = _group_checks(inst, log)
        if bad is not None:
            return bad
        Iu = unipotent_slice(inst.ideal)
        if not is_commutative_group(Iu):
            return Verdict(NO, reason="the unipotent part is not a commutative group", log=log)
        du = _zariski_dim(Iu, "matrix")
        trace["unipotent_dim"] = du
        if du > 1:
            return Verdict(NO, reason=f"the unipotent part has dimension {du} > 1", log=log, trace=trace)
        out = _cyclic_front(inst, log, opts, trace)
        if isinstance(out, Verdict):
            out.trace = trace
            return out
        Dq, J1, _, _ = out
        return _bidiagonal(inst, Dq, J1, du, log, trace, opts)
    except ResourceLimit:
        return Verdict(UNKNOWN, reason="resource limit", log=log, trace=trace, limit_hit=True)


def _bidiagonal(inst: DetInstance, Dq: Mat, J1: Ideal, du: int, log: list, trace: dict, opts: dict) -> Verdict:
    """Find ``(P, X)`` with ``P in V(J_1)`` and ``P^-1 X P`` in V(I), X unit upper bidiagonal."""
    d = inst.dim
    I = inst.ideal
    pn, pflat = symbolic_matrix(d, "p")
    qn, qflat = symbolic_matrix(d, "q")
    sup = tuple(f"_s{i}" for i in range(d - 1))
    ring = pflat + qflat + sup
    P = Mat([[Poly.var(ring, a) for a in row] for row in pn])
    Q = Mat([[Poly.var(ring, a) for a in row] for row in qn])
    one, zero = Poly.const(ring, 1), Poly.const(ring, 0)
    X = Mat([[one if i == j else (Poly.var(ring, sup[i]) if j == i + 1 else zero) for j in range(d)]
             for i in range(d)])
    comm = _lift(Dq, ring) * X - X * _lift(Dq, ring)
    gens = [_compose(f, Q * X * P, "matrix", ring) for f in I.generators]
    gens += [c for row in (P * Q - Mat.identity(d)).rows for c in row if c != 0]
    gens += [c for row in comm.rows for c in row if c != 0]
    gens += [g.to_ring(ring) for g in J1.generators]
    H = eliminate(Ideal(gens, ring), qflat, opts.get("budget")).to_ring(pflat + sup)
    trace["H"] = H
    det = Mat([[Poly.var(H.vars, a) for a in row] for row in pn]).det()
    q = _conductor(Dq.diagonal())
    targets = [[]] if du == 0 else [[Poly.var(H.vars, s)] for s in sup]
    for extra in targets:
        Hk = H if du else H + [Poly.var(H.vars, s) for s in sup]
        tried = 0
        for point in rational_points(Hk, [det] + extra, opts.get("search_bound", 3), q, opts.get("max_nodes", 4000)):
            tried += 1
            if tried > 6:
                break
            Pm = Mat([[point[a] for a in row] for row in pn])
            Xm = Mat([[1 if i == j else (point[sup[i]] if j == i + 1 else 0) for j in range(d)] for i in range(d)])
            Pinv = Pm.inverse()
            M = Pinv * Dq * Xm * Pm
            lat = relation_lattice([Dq.diagonal()])
            cert = Certificate("gen-cyclic-general", [M], P=Pm, Pinv=Pinv, lattice=lat, D=[Dq], U=[Xm])
            if _certify(inst, cert, opts):
                trace.update(P=Pm, X=Xm)
                return Verdict(YES, cert, log=log, trace=trace)
    return Verdict(UNKNOWN, reason="no rational (P, X) produced a verified certificate", log=log, trace=trace)
