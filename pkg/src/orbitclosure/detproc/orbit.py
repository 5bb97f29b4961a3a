"""Orbit-closure determination: search for (template, T, lattice, P)."""
from __future__ import annotations

from itertools import combinations
from math import lcm
from typing import Iterator, Sequence

from ..lattice import Lattice, NotSGenerated, enumerate_lattices, generators_of_H, lattice_ideal
from ..matgroup import Mat, SelectorMatrix, Singular, unipotent_one_param
from ..poly import Ideal, Poly, ResourceLimit, eliminate, ideal_equal, saturate, substitute_linear
from .containment import containment_iso, rational_points, symbolic_matrix
from .types import (
    NO,
    UNKNOWN,
    YES,
    AnsatzDegreeExceeded,
    Certificate,
    DetInstance,
    UnipotentTemplate,
    Verdict,
    default_templates,
)
from .verify import verify_certificate

__all__ = [
    "exponent_seeds",
    "orbit_target",
    "orbit_candidates",
    "orbit_det_semisimple",
    "orbit_det_commutative",
]

POINTS_PER_CANDIDATE = 12


def exponent_seeds(I: Ideal) -> list[tuple[int, ...]]:
    """Differences of exponent vectors inside each generator and basis element."""
    out: dict[tuple, None] = {}
    for g in list(I.generators) + list(I.groebner()):
        exps = sorted(g.terms)
        for a, b in combinations(exps, 2):
            u = tuple(x - y for x, y in zip(a, b))
            if any(u):
                out[u] = None
                out[tuple(-x for x in u)] = None
    return list(out)


def _projected(seeds: Sequence[Sequence[int]], cols: Sequence[int]) -> list[tuple[int, ...]]:
    out: dict[tuple, None] = {}
    for u in seeds:
        w = tuple(u[c] for c in cols)
        if any(w):
            out[w] = None
    return list(out)


def orbit_target(xvars: Sequence[str], T: SelectorMatrix, lat: Lattice,
                 template: UnipotentTemplate | None = None) -> Ideal:
    """Ideal of ``{exp(t log U) T g : g in H_Lambda}`` over the template parameters.

    The result lives in ``xvars`` followed by the template's parameters.
    """
    xvars = tuple(xvars)
    d = len(xvars)
    gnames = [f"_g{j}" for j in range(T.k)]
    if template is None or template.is_trivial:
        gens = [Poly.var(xvars, x) for i, x in enumerate(xvars) if i not in T.cols]
        if T.k:
            sel = tuple(xvars[c] for c in T.cols)
            for g in lattice_ideal(lat, sel).generators:
                gens.append(g.to_ring(xvars))
        return Ideal(gens, xvars)
    params = tuple(template.params)
    ring = ("_t",) + tuple(gnames) + xvars + params
    E = unipotent_one_param(template.matrix(ring), "_t", ring)
    y = [Poly.const(ring, 0)] * d
    for c, gname in zip(T.cols, gnames):
        y[c] = Poly.var(ring, gname)
    point = E.apply(y)
    eqs = [Poly.var(ring, x) - point[i] for i, x in enumerate(xvars)]
    eqs += [g.to_ring(ring) for g in lattice_ideal(lat, gnames).generators] if T.k else []
    return eliminate(Ideal(eqs, ring), ["_t"] + gnames).to_ring(xvars + params)


def _specialize(H: Ideal, xvars: Sequence[str], value=1) -> Ideal:
    extra = [v for v in H.vars if v not in xvars]
    if not extra:
        return H
    return H.subs({v: value for v in extra}, tuple(xvars))


def _unipotent_rank(template: UnipotentTemplate | None) -> int:
    return 0 if template is None or template.is_trivial else 1


def orbit_candidates(inst: DetInstance, templates: Sequence[UnipotentTemplate],
                     exhaustive: bool = False) -> Iterator[tuple]:
    """Candidate ``(template, T, lattice)`` in the fixed search order."""
    d = len(inst.vars)
    dimZ = inst.ideal.dimension()
    seeds = exponent_seeds(inst.ideal)
    mode = "exhaustive" if exhaustive else "heuristic"
    for template in templates:
        extra = _unipotent_rank(template)
        for k in range(d + 1):
            rank = k + extra - dimZ
            if rank < 0 or rank > k:
                continue
            for cols in combinations(range(d), k):
                T = SelectorMatrix(d, cols)
                if extra and not _moves(template, cols):
                    continue
                if k == 0:
                    yield template, T, Lattice.zero(0)
                    continue
                try:
                    lats = list(enumerate_lattices(k, inst.b, inst.s, mode, _projected(seeds, cols), rank))
                except ValueError:
                    lats = list(enumerate_lattices(k, inst.b, inst.s, "heuristic", _projected(seeds, cols), rank))
                for lat in lats:
                    yield template, T, lat


def _moves(template: UnipotentTemplate, cols: Sequence[int]) -> bool:
    """The one-parameter group moves some selected coordinate."""
    return any(template.pattern[i][c] != 0 for c in cols for i in range(c))


def _block_diagonal(template: UnipotentTemplate | None, T: SelectorMatrix, g: Sequence) -> list | None:
    """Diagonal of ``D`` with ``D T = T diag(g)``, constant on the template's blocks."""
    d = T.dim
    entries: list = [1] * d
    for c, x in zip(T.cols, g):
        entries[c] = x
    if template is None or template.is_trivial:
        return entries
    for block in template.blocks():
        chosen = {entries[c] for c in block if c in T.cols}
        if len(chosen) > 1:
            return None
        if chosen:
            (val,) = chosen
            for c in block:
                entries[c] = val
    return entries


def _field_for(lat: Lattice, inst: DetInstance) -> int:
    if inst.q is not None:
        return inst.q
    divs = [x for x in lat.divisors if x > 1] if lat.basis else []
    return lcm(1, *divs)


def _assemble(inst: DetInstance, S: Mat, T: SelectorMatrix, lat: Lattice,
              template: UnipotentTemplate | None, values: dict) -> Certificate | None:
    d = len(inst.vars)
    P = S.inverse()
    gens = generators_of_H(lat, inst.s) if T.k else [()] * inst.s
    Ds = []
    for g in gens:
        diag = _block_diagonal(template, T, g)
        if diag is None:
            return None
        Ds.append(Mat.diag(diag))
    if template is not None and not template.is_trivial:
        U1 = template.instantiate(values)
        Us = [U1] + [Mat.identity(d)] * (inst.s - 1)
    else:
        Us = [Mat.identity(d)] * inst.s
    Ms = [S * U * D * P for U, D in zip(Us, Ds)]
    v = S.apply(T.ones())
    kind = inst.mode
    return Certificate(kind, Ms, v=v, P=P, Pinv=S, lattice=lat, T=T, D=Ds, U=Us,
                       template=template if template is not None and not template.is_trivial else None,
                       template_values=dict(values))


def _points(J: Ideal, nonzero: Sequence[Poly], q: int, opts: dict):
    """Rational points of ``J`` off ``V(prod nonzero)``; the search runs on the saturation."""
    K = J
    for f in nonzero:
        K = saturate(K, f, opts.get("budget"))
    yield from rational_points(K, nonzero, opts.get("search_bound", 3), q, opts.get("max_nodes", 4000))


def _solve_candidate(inst: DetInstance, template, T, lat, H: Ideal, log: list, opts: dict):
    d = len(inst.vars)
    xvars = inst.vars
    names, pnames = symbolic_matrix(d)
    try:
        J = containment_iso(inst.ideal, H, deg_bound=opts.get("ansatz_deg"), budget=opts.get("budget"))
    except AnsatzDegreeExceeded:
        log.append("ansatz bound exceeded")
        return None, None
    if J.is_unit():
        log.append("no change of variables")
        return None, J
    det = Mat([[Poly.var(J.vars, n) for n in row] for row in names]).det()
    tparams = [v for v in J.vars if v not in pnames]
    nonzero = [det] + [Poly.var(J.vars, v) for v in tparams]
    q = _field_for(lat, inst)
    tried = 0
    for point in _points(J, nonzero, q, opts):
        tried += 1
        if tried > POINTS_PER_CANDIDATE:
            break
        S = Mat([[point[n] for n in row] for row in names])
        values = {v: point[v] for v in tparams}
        Hv = H.subs(values, xvars) if tparams else H
        if not ideal_equal(substitute_linear(inst.ideal, S.rows), Hv):
            continue
        try:
            cert = _assemble(inst, S, T, lat, template, values)
        except (Singular, NotSGenerated):
            cert = None
        if cert is None:
            continue
        report = verify_certificate(inst.ideal, cert, opts.get("verify_N", 5), opts.get("budget"))
        cert.verify = report
        if report["ok"]:
            return cert, J
        log.append("certificate failed verification")
    log.append(f"{tried} rational points tried")
    return None, J


def _orbit_search(inst: DetInstance, templates: Sequence[UnipotentTemplate], opts: dict) -> Verdict:
    log: list[str] = []
    I = inst.ideal
    if I.is_unit():
        return Verdict(NO, reason="the ideal defines the empty set", log=log)
    xvars = inst.vars
    upto = inst.b + 1
    hf = I.hilbert_function(upto)
    dimZ = I.dimension()
    hit_limit = False
    for template, T, lat in orbit_candidates(inst, templates, opts.get("exhaustive", False)):
        tag = f"{template.name or 'template'} T={list(T.cols)} lattice={lat.to_json()}"
        try:
            H = orbit_target(xvars, T, lat, template)
            Hs = _specialize(H, xvars)
            if Hs.dimension() != dimZ or Hs.hilbert_function(upto) != hf:
                continue
            log.append(tag)
            cert, J = _solve_candidate(inst, template, T, lat, H, log, opts)
        except ResourceLimit:
            log.append(tag + ": resource limit")
            hit_limit = True
            continue
        if cert is not None:
            trace = {"H": H, "J": J, "template": template, "T": T, "lattice": lat}
            return Verdict(YES, cert, log=log, trace=trace)
    names = ", ".join(t.name for t in templates)
    reason = "no candidate produced a verified certificate"
    reason += f" (templates searched: {names}; the template family under-approximates all unipotent tuples)"
    if hit_limit:
        reason += "; some candidates hit the resource limit"
    return Verdict(UNKNOWN, reason=reason, log=log, limit_hit=hit_limit)


def orbit_det_semisimple(inst: DetInstance, **opts) -> Verdict:
    """Is ``V(I)`` the orbit closure of a point under ``s`` commuting semisimple matrices?"""
    d = len(inst.vars)
    return _orbit_search(inst, [UnipotentTemplate.jordan((1,) * d)], opts)


def orbit_det_commutative(inst: DetInstance, templates: Sequence[UnipotentTemplate] | None = None,
                          **opts) -> Verdict:
    """Orbit closure under ``s`` commuting matrices, unipotent parts from ``templates``."""
    d = len(inst.vars)
    if templates is None:
        templates = inst.templates or default_templates(d)
    templates = sorted(templates, key=lambda t: len(t.params))
    return _orbit_search(inst, templates, opts)
