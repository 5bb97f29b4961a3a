"""Acceptance suite: one PASS/FAIL line per criterion, with its runtime limit."""
import json
import random
import time
from fractions import Fraction

import pytest
from conftest import DATA

import test_properties as props
from orbitclosure.cli import lattice_report, main, read_instance
from orbitclosure.detproc import (
    NO,
    YES,
    Certificate,
    DetInstance,
    containment_iso,
    detect,
    gen_semisimple_cyclic,
    symbolic_matrix,
    verify_certificate,
)
from orbitclosure.detproc.verify import closure_ideal
from orbitclosure.matgroup import Mat
from orbitclosure.poly import Ideal, Poly, eliminate, ideal_equal, parse_poly, saturate

F = Fraction


def report(capsys, n, ok, seconds, limit, detail=""):
    bound = f"limit {limit}s" if limit is not None else "no time limit"
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s, {bound}){' ' + detail if detail else ''}"
    with capsys.disabled():
        print("\n" + line)
    return line


def ideal(vars, *texts):
    return Ideal([parse_poly(t, vars) for t in texts], tuple(vars))


def verify_exit(capsys, inst, cert, N):
    code = main(["verify", str(DATA / inst), str(DATA / cert), "--N", str(N)])
    capsys.readouterr()
    return code


def check_all(checks):
    failed = [name for name, ok in checks if not ok]
    return not failed, ("failed: " + ", ".join(failed)) if failed else ""


def test_criterion_1_conic(capsys):
    t0 = time.perf_counter()
    inst = read_instance(str(DATA / "conic.inst"))
    v = detect(inst)
    checks = [("YES", v.answer == YES)]
    if v.answer == YES:
        J = v.trace["J"]
        reference = ideal(J.vars, "p11 + p21", "p21^2 - p12 - p22", "2*p12*p21 + p21*p22", "(2*p12 + p22)^2")
        checks.append(("J_P reduced basis", J.groebner() == reference.groebner()))
        P = {"p11": 1, "p12": -1, "p21": -1, "p22": 2}
        checks.append(("reference P in V(J_P)", all(g.evaluate(P) == 0 for g in J.generators)))
        cert = v.certificate
        closure = closure_ideal(cert.M, inst.vars, cert.v)
        checks.append(("closure reconstruction", closure.groebner() == inst.ideal.groebner()))
    checks.append(("verify reference M, v at N=8", verify_exit(capsys, "conic.inst", "conic_reference_cert.json", 8) == 0))
    dt = time.perf_counter() - t0
    ok, detail = check_all(checks + [("runtime", dt <= 10)])
    report(capsys, 1, ok, dt, 10, detail)
    assert ok, detail


UNIPOTENT4_REFERENCE = ("p34", "p31", "p24", "p22", "p21", "p13 + p43", "p12 + p42", "p11 + p41", "p33*p44", "p32*p44",
              "p23*p44", "p14*p44 + p44^2", "p23*p33 + 10*p33^2 + 10*p23*p43", "2*p32^2 + p23*p41",
              "p23^2 - p14 - p44")
UNIPOTENT4_P = [[F(1, 2), 0, 0, 1], [0, 0, 1, 0], [0, F(1, 2), 0, 0], [F(-1, 2), 0, 0, 0]]


def test_criterion_2_unipotent4(capsys):
    t0 = time.perf_counter()
    inst = read_instance(str(DATA / "unipotent4.inst"))
    v = detect(inst)
    checks = [("YES", v.answer == YES)]
    strict = None
    if v.answer == YES:
        # admissible P for equality of the conjugated ideals, as in the worked example
        J = containment_iso(inst.ideal, v.trace["H"], mode="equal")
        JP = eliminate(J, ["lam"])
        reference = ideal(JP.vars, *UNIPOTENT4_REFERENCE)
        checks.append(("15 reference generators in J_P", all(JP.contains(g) for g in reference.generators)))
        # P ranges over GL_4, so the reverse direction is taken modulo det P
        names, _ = symbolic_matrix(4)
        det = Mat([[Poly.var(JP.vars, n) for n in row] for row in names]).det()
        on_gl = saturate(reference, det)
        checks.append(("J_P in reference ideal on GL_4", all(on_gl.contains(g) for g in JP.groebner())))
        strict = all(reference.contains(g) for g in JP.groebner())
        point = {names[i][j]: UNIPOTENT4_P[i][j] for i in range(4) for j in range(4)}
        point["lam"] = F(-1, 5)
        checks.append(("reference P, lam = -1/5 in V(J)", all(g.evaluate(point) == 0 for g in J.generators)))
    checks.append(("verify reference M, v at N=5", verify_exit(capsys, "unipotent4.inst", "unipotent4_reference_cert.json", 5) == 0))
    dt = time.perf_counter() - t0
    ok, detail = check_all(checks + [("runtime", dt <= 120)])
    if strict is not None:
        detail = (detail + "; " if detail else "") + f"reverse containment without det: {strict}"
    report(capsys, 2, ok, dt, 120, detail)
    assert ok, detail


VARS2X2 = ("x", "z", "w", "y")


def _embed_component(c):
    # diagonal coordinates (_x0, _x1) are the matrix entries x and y
    texts = [s.replace("_x0", "x").replace("_x1", "y") for s in c.canonical_strings()]
    return ideal(VARS2X2, "w", "z", *texts)


def test_criterion_3_cyclic2x2(capsys):
    t0 = time.perf_counter()
    inst = read_instance(str(DATA / "cyclic2x2.inst"))
    v = gen_semisimple_cyclic(inst)
    checks = [("YES", v.answer == YES)]
    if v.answer == YES:
        comps = {_embed_component(c).canonical_strings() for c in v.trace["components"]}
        reference = {ideal(VARS2X2, "w", "z", "y^2 - x").canonical_strings(),
                 ideal(VARS2X2, "w", "z", "x^2 - y").canonical_strings()}
        checks.append(("components", comps == reference))
        checks.append(("D", v.trace["D"] in (Mat.diag([4, 2]), Mat.diag([2, 4]))))
        J1 = v.trace["J_1"]
        checks.append(("J_1", ideal_equal(J1, ideal(J1.vars, "p21 - 2*p22", "p11 - p12"))))
    cert = Certificate.from_json(json.loads((DATA / "cyclic2x2_reference_cert.json").read_text()))
    checks.append(("reference M verifies", verify_certificate(inst.ideal, cert, 8)["ok"]))
    checks.append(("verify reference M at N=8", verify_exit(capsys, "cyclic2x2.inst", "cyclic2x2_reference_cert.json", 8) == 0))
    dt = time.perf_counter() - t0
    ok, detail = check_all(checks + [("runtime", dt <= 30)])
    report(capsys, 3, ok, dt, 30, detail)
    assert ok, detail


def test_criterion_4_sign_cosets(capsys):
    t0 = time.perf_counter()
    group = read_instance(str(DATA / "cosets_group.inst"))
    one = detect(group)
    two = detect(DetInstance(group.vars, group.ideal, s=2, mode=group.mode, shape=group.shape))
    orbit = detect(read_instance(str(DATA / "cosets_orbit.inst")))
    checks = [
        ("group s=1 NO", one.answer == NO),
        ("group s=2 YES", two.answer == YES),
        ("divisors (2,2)", lattice_report(group)["divisors"] == [2, 2]),
        ("orbit s=1 YES", orbit.answer == YES),
        ("verify reference M, v at N=8", verify_exit(capsys, "cosets_orbit.inst", "cosets_reference_cert.json", 8) == 0),
    ]
    if two.answer == YES:
        checks.append(("certificate lattice divisors", list(two.certificate.lattice.divisors)[-2:] == [2, 2]))
    dt = time.perf_counter() - t0
    ok, detail = check_all(checks + [("runtime", dt <= 10)])
    report(capsys, 4, ok, dt, 10, detail)
    assert ok, detail


PROPERTY_SUITES = [
    props.test_groebner_canonical_under_shuffles,
    props.test_eliminate_and_intersect_laws,
    props.test_snf_reassembly,
    props.test_generator_count_matches_brute_force,
    props.test_nil_exp_inverts_nil_log,
    props.test_jordan_chevalley_reassembly,
    props.test_decomposition_reassembly,
]


def test_criterion_5_property_suites(capsys, seed):
    t0 = time.perf_counter()
    checks = []
    for suite in PROPERTY_SUITES:
        try:
            suite(random.Random(seed))
            checks.append((suite.__name__, True))
        except AssertionError:
            checks.append((suite.__name__, False))
    dt = time.perf_counter() - t0
    ok, detail = check_all(checks + [("runtime", dt <= 300), ("cases", props.CASES >= 200)])
    report(capsys, 5, ok, dt, 300, detail or f"{len(PROPERTY_SUITES)} suites x {props.CASES} cases, seed {seed}")
    assert ok, detail


M2 = ("x11", "x12", "x21", "x22")
CORPUS_FILES = [
    ("conic.inst", {}),
    ("cosets_orbit.inst", {}),
    ("cosets_group.inst", {"s": 2}),
    ("cyclic2x2.inst", {}),
    ("cyclic2x2.inst", {"mode": "gen-cyclic-general"}),
    ("unipotent4.inst", {}),
]
CORPUS_INLINE = [
    (M2, ["x12", "x21"], "group-semisimple", 1),
    (M2, ["x12", "x21"], "group-commutative", 2),
    (M2, ["x21", "x11 - x22"], "group-commutative", 1),
    (M2, ["x12", "x21", "x11^2 - 1", "x22^2 - 1"], "group-commutative", 2),
    (M2, ["x11 - 1", "x12", "x21", "x22 - 1"], "gen-cyclic-semisimple", 1),
    (M2, ["x11 - 1", "x21", "x22 - 1"], "gen-cyclic-general", 1),
    (("x", "y"), ["x^2 - y"], "orbit-semisimple", 1),
    (("x", "y"), ["x - 2", "y - 3"], "orbit-semisimple", 1),
    (("x", "y", "z"), ["x*z - y^2"], "orbit-semisimple", 2),
]


def corpus():
    out = []
    for name, over in CORPUS_FILES:
        base = read_instance(str(DATA / name))
        inst = DetInstance(base.vars, base.ideal, s=over.get("s", base.s), b=base.b,
                           mode=over.get("mode", base.mode), shape=base.shape, templates=base.templates)
        out.append((f"{name} {over}", inst))
    for vars, texts, mode, s in CORPUS_INLINE:
        out.append((f"{mode} {texts}", DetInstance(vars, ideal(vars, *texts), s=s, mode=mode)))
    return out


def _mutate(rng, cert: Certificate) -> Certificate:
    data = cert.to_json()
    data["verify"] = {}
    targets = [("M", i, r, c) for i, m in enumerate(data["M"]) for r in range(len(m)) for c in range(len(m[r]))]
    if data.get("v") is not None:
        targets += [("v", i) for i in range(len(data["v"]))]
    t = rng.choice(targets)
    delta = rng.choice([F(1), F(-1), F(1, 2), F(2), F(-3, 2)])
    if t[0] == "M":
        _, i, r, c = t
        data["M"][i][r][c] = str(F(data["M"][i][r][c]) + delta)
    else:
        data["v"][t[1]] = str(F(data["v"][t[1]]) + delta)
    return Certificate.from_json(data)


@pytest.mark.slow
def test_criterion_6_soundness(capsys, seed):
    t0 = time.perf_counter()
    checks, yes = [], []
    for label, inst in corpus():
        v = detect(inst)
        if v.answer != YES:
            checks.append((f"{label} answered {v.answer}", False))
            continue
        rep = verify_certificate(inst.ideal, v.certificate, 5)
        closure = rep.get("closure_equality", {}).get("ok", False)
        checks.append((label, rep["ok"] and closure))
        yes.append((inst, v.certificate))
    rng = random.Random(seed)
    flipped = 0
    for _ in range(50):
        inst, cert = rng.choice(yes)
        if not verify_certificate(inst.ideal, _mutate(rng, cert), 5)["ok"]:
            flipped += 1
    checks.append((f"mutations flipped {flipped}/50", flipped == 50))
    dt = time.perf_counter() - t0
    ok, detail = check_all(checks)
    report(capsys, 6, ok, dt, None, detail or f"{len(yes)} YES certificates, 50/50 mutations rejected")
    assert ok, detail
