from fractions import Fraction

import pytest

from orbitclosure.detproc import (
    NO,
    UNKNOWN,
    YES,
    Certificate,
    DetInstance,
    InstanceError,
    UnipotentTemplate,
    Verdict,
    conjugate_ideal,
    containment_iso,
    default_templates,
    detect,
    gen_general_cyclic,
    gen_semisimple_cyclic,
    group_det_commutative,
    group_det_semisimple,
    is_alg_group,
    is_commutative_group,
    orbit_det_commutative,
    orbit_det_semisimple,
    rational_point,
    symbolic_matrix,
    unipotent_slice,
    verify_certificate,
)
from orbitclosure.lattice import Lattice, is_s_generated
from orbitclosure.matgroup import Mat, SelectorMatrix
from orbitclosure.poly import Ideal, ideal_equal, parse_poly, substitute_linear

F = Fraction
M2 = ("x11", "x12", "x21", "x22")
VARS2X2 = ("x", "z", "w", "y")
CYCLIC2X2 = ("2*z + w", "2*x - 2*y + 3*w", "4*y^2 - 4*y*w + w^2 - 4*y + 4*w")


def ideal(vars, *texts):
    vars = tuple(vars)
    return Ideal([parse_poly(t, vars) for t in texts], vars)


def make(vars, texts, mode, s=1, **kw):
    return DetInstance(tuple(vars), ideal(vars, *texts), s=s, mode=mode, **kw)


def check_yes(verdict, I, N=5):
    assert verdict.answer == YES, verdict.reason
    report = verify_certificate(I, verdict.certificate, N)
    assert report["ok"], report
    return verdict.certificate


# types

def test_instance_validation():
    with pytest.raises(InstanceError):
        make("xy", ["x"], "orbit-semisimple", s=0)
    with pytest.raises(InstanceError):
        make("xy", ["x"], "no-such-mode")
    with pytest.raises(InstanceError):
        make("xy", ["x^3"], "orbit-semisimple", b=2)
    with pytest.raises(InstanceError):
        make("xy", ["x"], "group-semisimple", shape="point")
    inst = make("xyz", ["x"], "group-semisimple")
    assert inst.shape == "diagonal" and inst.dim == 3
    assert make(M2, ["x12"], "group-semisimple").shape == "matrix"
    assert make("xy", ["x^2 - y"], "orbit-semisimple").b == 2


def test_templates():
    t = UnipotentTemplate.jordan((3, 1))
    assert t.params == ("lam",)
    assert t.blocks() == [[0, 1, 2], [3]]
    assert UnipotentTemplate.from_json(t.to_json()) == t
    assert UnipotentTemplate.jordan((1, 1)).is_trivial
    with pytest.raises(InstanceError):
        UnipotentTemplate(((1, 0), (1, 1)), ())
    names = [x.name for x in default_templates(3)]
    assert names[0] == "jordan(1,1,1)" and "jordan(3)" in names and "jordan(2,1)" in names


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict(YES)
    with pytest.raises(ValueError):
        Verdict("MAYBE")
    assert Verdict(NO, reason="r").to_json() == {"answer": "NO", "reason": "r", "log": []}


# group checks

def test_is_alg_group():
    torus = ideal(M2, "x12", "x21", "x11*x22 - 1")
    assert is_alg_group(torus)
    assert not is_alg_group(ideal(M2, "x11 - 2"))
    assert is_alg_group(ideal(VARS2X2, *CYCLIC2X2))
    assert is_alg_group(ideal("xy", "x*y - 1"), shape="diagonal")


def test_is_commutative_group():
    assert is_commutative_group(ideal(M2, "x12", "x21"))
    assert is_commutative_group(ideal(VARS2X2, *CYCLIC2X2))
    gl2 = Ideal([], M2)
    assert is_alg_group(gl2)
    assert not is_commutative_group(gl2)
    # the oracle: two invertible matrices that do not commute
    A, B = Mat([[1, 1], [0, 1]]), Mat([[1, 0], [1, 1]])
    assert A * B != B * A


def test_conjugate_ideal():
    I = ideal(M2, "x12", "x21", "x11 - x22^2")
    P = Mat([[1, 1], [-2, -1]])
    J = conjugate_ideal(I, P)
    # a point of V(I) conjugated by P lies in V(J)
    D = Mat.diag([4, 2])
    X = P.inverse() * D * P
    for g in J.generators:
        assert g.evaluate([a for row in X.rows for a in row]) == 0


# containment and points

def test_containment_conic():
    I = ideal("xy", "4*x^2 + y^2 + 4*x*y - x - y")
    H = ideal("xy", "x^2 - y")
    J = containment_iso(I, H)
    expected = ideal(J.vars, "p11 + p21", "p21^2 - p12 - p22", "2*p12*p21 + p21*p22", "(2*p12 + p22)^2")
    assert ideal_equal(J, expected)
    assert all(g.evaluate({"p11": 1, "p12": -1, "p21": -1, "p22": 2}) == 0 for g in J.generators)


def test_containment_identity_parameters():
    I = ideal("xy", "x^2 - y")
    J = containment_iso(I, I, params=Mat.identity(2))
    assert J.is_zero()


def test_containment_equal_mode():
    I = ideal("xy", "4*x^2 + y^2 + 4*x*y - x - y")
    H = ideal("xy", "x^2 - y")
    Jc = containment_iso(I, H)
    Je = containment_iso(I, H, mode="equal")
    assert all(Je.contains(g) for g in Jc.generators)


def test_rational_point():
    assert rational_point(ideal("p", "p - 1")) == {"p": 1}
    J1 = ideal(("p1", "p2", "p3", "p4"), "p3 - 2*p4", "p1 - p2")
    det = parse_poly("p1*p4 - p2*p3", J1.vars)
    pt = rational_point(J1, [det], accept=lambda p: p["p1"] == 1 and p["p4"] == -1)
    assert pt == {"p1": 1, "p2": 1, "p3": -2, "p4": -1}
    assert rational_point(ideal("p", "p^2 - 2")) is None


def test_symbolic_matrix():
    names, flat = symbolic_matrix(2)
    assert names == [["p11", "p12"], ["p21", "p22"]]
    assert flat == ("p11", "p12", "p21", "p22")


# group determination

def test_group_semisimple_diagonal_torus():
    inst = make(("a", "b"), ["a*b - 1"], "group-semisimple", shape="diagonal")
    cert = check_yes(group_det_semisimple(inst), inst.ideal)
    assert cert.P.is_identity()


def test_group_semisimple_sign_cosets():
    texts = ["x1^2 - x3^2", "x2^2 - x3^2"]
    vars = ("x1", "x2", "x3")
    no = group_det_semisimple(make(vars, texts, "group-semisimple"))
    assert no.answer == NO and "2, 2" in no.reason
    inst = make(vars, texts, "group-semisimple", s=2)
    cert = check_yes(group_det_semisimple(inst), inst.ideal)
    assert sorted(tuple(M.diagonal()) for M in cert.M) == sorted([(2, -2, 2), (-2, 2, 2)])


def test_group_semisimple_not_closed():
    v = group_det_semisimple(make(M2, ["x11 - 2", "x12", "x21"], "group-semisimple"))
    assert v.answer == NO


def test_group_semisimple_matrix_cyclic2x2():
    inst = make(VARS2X2, CYCLIC2X2, "group-semisimple")
    check_yes(group_det_semisimple(inst), inst.ideal)


def test_group_semisimple_rejects_unipotent():
    inst = make(M2, ["x11 - 1", "x21", "x22 - 1"], "group-semisimple")
    assert group_det_semisimple(inst).answer == NO


def test_klein_four_group():
    texts = ["x12", "x21", "x11^2 - 1", "x22^2 - 1"]
    assert group_det_semisimple(make(M2, texts, "group-semisimple")).answer == NO
    inst = make(M2, texts, "group-semisimple", s=2)
    check_yes(group_det_semisimple(inst), inst.ideal)
    # not cyclic: the permutation-orbit check must reject it
    v = gen_semisimple_cyclic(make(M2, texts, "gen-cyclic-semisimple"))
    assert v.answer == NO


def test_group_commutative_upper_triangular():
    inst = make(M2, ["x11 - 1", "x21", "x22 - 1"], "group-commutative")
    cert = check_yes(group_det_commutative(inst), inst.ideal)
    assert cert.P.is_identity()


def test_group_commutative_cyclic2x2():
    inst = make(VARS2X2, CYCLIC2X2, "group-commutative")
    check_yes(group_det_commutative(inst), inst.ideal)


def test_group_commutative_full_torus():
    # a torus is topologically generated by one element, e.g. diag(2, 3)
    assert is_s_generated(Lattice.zero(2), 1)
    for s in (1, 2):
        inst = make(M2, ["x12", "x21"], "group-commutative", s=s)
        cert = check_yes(group_det_commutative(inst), inst.ideal)
        assert len(cert.M) == s


def test_group_commutative_torsion_needs_two():
    texts = ["x12", "x21", "x11^2 - 1", "x22^2 - 1"]
    assert group_det_commutative(make(M2, texts, "group-commutative", s=1)).answer == NO
    inst = make(M2, texts, "group-commutative", s=2)
    check_yes(group_det_commutative(inst), inst.ideal)


def test_group_commutative_two_dimensional_unipotent():
    vars = tuple(f"x{i}{j}" for i in range(1, 4) for j in range(1, 4))
    texts = ["x11 - 1", "x22 - 1", "x33 - 1", "x21", "x31", "x32", "x23"]
    inst = make(vars, texts, "group-commutative", s=1)
    assert group_det_commutative(inst).answer == NO
    inst2 = make(vars, texts, "group-commutative", s=2)
    check_yes(group_det_commutative(inst2), inst2.ideal)


# cyclic generators

def test_gen_semisimple_cyclic_cyclic2x2():
    inst = make(VARS2X2, CYCLIC2X2, "gen-cyclic-semisimple")
    v = gen_semisimple_cyclic(inst)
    cert = check_yes(v, inst.ideal, N=8)
    assert cert.M[0] == Mat([[6, 2], [-4, 0]])
    J1 = v.trace["J_1"]
    assert ideal_equal(J1, ideal(J1.vars, "p21 - 2*p22", "p11 - p12"))
    assert sorted(v.trace["D"].diagonal()) == [2, 4]


def test_gen_semisimple_cyclic_identity():
    inst = make(M2, ["x11 - 1", "x12", "x21", "x22 - 1"], "gen-cyclic-semisimple")
    cert = check_yes(gen_semisimple_cyclic(inst), inst.ideal)
    assert cert.M[0].is_identity()


def test_gen_semisimple_cyclic_rejects_unipotent():
    inst = make(M2, ["x11 - x22", "x21"], "gen-cyclic-semisimple")
    assert gen_semisimple_cyclic(inst).answer == NO


def test_gen_general_cyclic_semisimple_input():
    inst = make(VARS2X2, CYCLIC2X2, "gen-cyclic-general")
    v = gen_general_cyclic(inst)
    cert = check_yes(v, inst.ideal)
    assert cert.U[0].is_identity()


def test_gen_general_cyclic_jordan_block():
    inst = make(M2, ["x11 - x22", "x21"], "gen-cyclic-general")
    cert = check_yes(gen_general_cyclic(inst), inst.ideal)
    assert not cert.U[0].is_identity()


def test_gen_general_cyclic_two_dimensional_unipotent():
    vars = tuple(f"x{i}{j}" for i in range(1, 4) for j in range(1, 4))
    texts = ["x11 - 1", "x22 - 1", "x33 - 1", "x21", "x31", "x32", "x23"]
    inst = make(vars, texts, "gen-cyclic-general")
    v = gen_general_cyclic(inst)
    assert v.answer == NO and "dimension 2" in v.reason


def test_unipotent_slice():
    # the slice is not radical; its radical is the identity point
    from orbitclosure.poly import radical_member
    S = unipotent_slice(ideal(VARS2X2, *CYCLIC2X2))
    point = ideal(VARS2X2, "x - 1", "y - 1", "z", "w")
    assert all(radical_member(g, S) for g in point.generators)
    assert all(S.contains(g) for g in ideal(VARS2X2, "2*z + w").generators)
    assert not ideal_equal(S, point)


# orbit closures

def test_orbit_semisimple_conic():
    inst = make("xy", ["4*x^2 + y^2 + 4*x*y - x - y"], "orbit-semisimple")
    cert = check_yes(orbit_det_semisimple(inst), inst.ideal, N=8)
    assert cert.M[0] == Mat([[0, -2], [4, 6]])
    # the base point may be any point of the dense orbit
    assert all(g.evaluate(cert.v) == 0 for g in inst.ideal.generators)
    reference = Certificate("orbit-semisimple", [Mat([[0, -2], [4, 6]])], v=[0, 1])
    assert verify_certificate(inst.ideal, reference, 8)["ok"]


def test_orbit_semisimple_single_point():
    inst = make("xy", ["x - 1", "y"], "orbit-semisimple")
    cert = check_yes(orbit_det_semisimple(inst), inst.ideal)
    assert cert.T == SelectorMatrix(2, [0])
    assert cert.M[0].is_identity()


def test_orbit_semisimple_sign_cosets():
    inst = make(("x1", "x2", "x3"), ["x1^2 - x3^2", "x2^2 - x3^2"], "orbit-semisimple")
    check_yes(orbit_det_semisimple(inst), inst.ideal, N=8)


def test_orbit_commutative_trivial_template_agrees():
    inst = make("xy", ["4*x^2 + y^2 + 4*x*y - x - y"], "orbit-commutative")
    a = orbit_det_commutative(inst, templates=[UnipotentTemplate.jordan((1, 1))])
    b = orbit_det_semisimple(inst)
    assert a.answer == b.answer == YES
    assert a.certificate.M == b.certificate.M


def test_orbit_not_an_orbit_closure():
    # a circle contains no orbit closure of this shape with rational data
    inst = make("xy", ["x^2 + y^2 - 1"], "orbit-semisimple")
    assert orbit_det_semisimple(inst).answer in (NO, UNKNOWN)


@pytest.mark.parametrize("R", [[[1, 1], [0, 1]], [[2, 1], [1, 1]], [[0, 1], [1, 0]], [[1, F(1, 2)], [-1, 3]]])
def test_orbit_conjugation_invariance(R):
    I = ideal("xy", "4*x^2 + y^2 + 4*x*y - x - y")
    J = substitute_linear(I, R)
    inst = DetInstance(("x", "y"), J, s=1, mode="orbit-semisimple")
    v = orbit_det_semisimple(inst)
    check_yes(v, J)


# verification

def test_verify_wrong_point_fails_at_zero():
    I = ideal("xy", "4*x^2 + y^2 + 4*x*y - x - y")
    cert = Certificate("orbit-semisimple", [Mat([[0, -2], [4, 6]])], v=[1, 1])
    report = verify_certificate(I, cert, 8)
    assert not report["ok"]
    assert not report["sampling"]["ok"]
    assert "0" in str(report["sampling"])


def test_certificate_json_round_trip():
    inst = make("xy", ["4*x^2 + y^2 + 4*x*y - x - y"], "orbit-semisimple")
    cert = orbit_det_semisimple(inst).certificate
    again = Certificate.from_json(cert.to_json())
    assert again.to_json() == cert.to_json()


def test_combined_generators_match_separate_parts():
    # closure from U_i D_i equals the closure from the U_i and D_i separately
    from orbitclosure.detproc import closure_ideal
    inst = make(M2, ["x11 - x22", "x21"], "gen-cyclic-general")
    cert = gen_general_cyclic(inst).certificate
    P, Pinv = cert.P, cert.Pinv
    combined = closure_ideal(cert.M, M2)
    parts = [Pinv * cert.U[0] * P, Pinv * cert.D[0] * P]
    assert ideal_equal(combined, closure_ideal(parts, M2))


def test_detect_dispatch():
    inst = make("xy", ["4*x^2 + y^2 + 4*x*y - x - y"], "orbit-semisimple")
    assert detect(inst).answer == YES


# diagonal conjugates by projection versus elimination

def _closure(M, d):
    from orbitclosure.detproc.verify import closure_ideal
    return closure_ideal([M], tuple(f"x{i}{j}" for i in range(1, d + 1) for j in range(1, d + 1)))


@pytest.mark.parametrize("rows", [[[2, 1, 0], [0, 2, 0], [0, 0, 4]], [[1, 1, 0], [0, 1, 0], [0, 0, -1]]])
def test_diagonal_conjugates_two_routes(rows):
    from orbitclosure.detproc import group
    G = _closure(Mat(rows), 3)
    fast = group._triangular_components(G, group._samples(G, {}), None)
    assert fast is not None
    slow, _ = group._torus_data(group.diagonal_conjugates(G), [])
    assert sorted(c.canonical_strings() for c in fast) == sorted(c.canonical_strings() for c in slow)


@pytest.mark.parametrize("A", [[[1, 2], [1, 3]], [[2, 1], [1, 1]], [[1, 1], [0, 1]]])
def test_gen_semisimple_cyclic_conjugated(A):
    A = Mat(A)
    G = _closure(A.inverse() * Mat.diag([4, 2]) * A, 2)
    inst = DetInstance(M2, G, s=1, mode="gen-cyclic-semisimple")
    check_yes(gen_semisimple_cyclic(inst), G)


@pytest.mark.slow
def test_gen_general_cyclic_unipotent4_closure():
    M = Mat([[25, 0, -1, 20], [0, 5, 0, 0], [0, F(-1, 2), 5, 0], [0, 0, 1, 5]])
    G = _closure(M, 4)
    inst = DetInstance(G.vars, G, s=1, mode="gen-cyclic-general")
    cert = check_yes(gen_general_cyclic(inst), G, N=3)
    assert not cert.U[0].is_identity()
