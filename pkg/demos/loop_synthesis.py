"""Synthesize a linear loop from polynomial invariants and run it.

Given invariants f_1 = f_2 = 0, the orbit-closure procedure returns a
matrix M and a start vector v whose orbit closure is exactly the zero set.
The loop ``x := v; while *: x := M x`` then satisfies both invariants,
and no invariant ideal strictly larger holds for it.

Usage: python demos/loop_synthesis.py
"""
from orbitclosure.detproc import DetInstance, UnipotentTemplate, detect
from orbitclosure.poly import Ideal, parse_poly

VARS = ("x1", "x2", "x3", "x4")
INVARIANTS = ["x2^2 - x1 - x4", "-2*x4*x2 - 2*x3^2 - (1/5)*x2*x3"]


def main():
    I = Ideal([parse_poly(f, VARS) for f in INVARIANTS], VARS)
    inst = DetInstance(VARS, I, s=1, b=2, mode="orbit-commutative",
                       templates=[UnipotentTemplate.jordan((3, 1))])
    verdict = detect(inst)
    print("answer:", verdict.answer)
    if verdict.certificate is None:
        print(verdict.reason)
        return
    M, v = verdict.certificate.M[0], verdict.certificate.v
    print("M =")
    for row in M.rows:
        print("   ", [str(a) for a in row])
    print("v =", [str(a) for a in v])
    x = list(v)
    for n in range(6):
        values = [g.evaluate(dict(zip(VARS, x))) for g in I.generators]
        print(f"n={n}  x={[str(a) for a in x]}  invariants={[str(a) for a in values]}")
        x = M.apply(x)


if __name__ == "__main__":
    main()
