"""Exact coefficient domains: rationals and cyclotomic fields Q(zeta_q).

Rationals are :class:`fractions.Fraction`; a value of Q(zeta_q) is a
:class:`CycloNum`, stored as its residue modulo the q-th cyclotomic
polynomial.  Dense univariate helpers over Q live here as well since both
the cyclotomic reduction and the matrix code need them.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence, Union

__all__ = [
    "Rat",
    "CycloNum",
    "ConductorMismatch",
    "cyclotomic_poly",
    "cyclo_field_op",
    "zeta_pow",
    "euler_phi",
    "format_rat",
    "parse_rat",
    "to_rat",
]

Rat = Fraction


class ConductorMismatch(ValueError):
    pass


def to_rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, CycloNum):
        return value.to_rat()
    if isinstance(value, str):
        return parse_rat(value)
    return Fraction(value)


def format_rat(value) -> str:
    value = to_rat(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rat(text: str) -> Fraction:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    return Fraction(text.replace(" ", ""))


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q, coefficient lists low -> high degree


def utrim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def uadd(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    return utrim(out)


def usub(a: Sequence, b: Sequence) -> list:
    return uadd(a, [-c for c in b])


def umul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return utrim(out)


def _field(c):
    # CycloNum already is a field element; everything else becomes a Fraction
    return c if isinstance(c, CycloNum) else Fraction(c)


def udivmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    b = utrim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [_field(c) for c in a]
    utrim(rem)
    lead = _field(b[-1])
    quot = [Fraction(0)] * max(len(rem) - len(b) + 1, 0)
    while len(rem) >= len(b):
        shift = len(rem) - len(b)
        c = rem[-1] / lead
        quot[shift] = c
        for i, bi in enumerate(b):
            rem[i + shift] -= c * bi
        rem.pop()
        utrim(rem)
    return utrim(quot), rem


def umonic(a: Sequence) -> list:
    a = utrim([_field(c) for c in a])
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def ugcd(a: Sequence, b: Sequence) -> list:
    a, b = utrim(list(a)), utrim(list(b))
    while b:
        a, b = b, udivmod(a, b)[1]
    return umonic(a)


def uxgcd(a: Sequence, b: Sequence) -> tuple[list, list, list]:
    """Return (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = utrim([_field(c) for c in a]), utrim([_field(c) for c in b])
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = udivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, usub(s0, umul(q, s1))
        t0, t1 = t1, usub(t0, umul(q, t1))
    if not r0:
        return [], s0, t0
    lead = r0[-1]
    return [c / lead for c in r0], [c / lead for c in s0], [c / lead for c in t0]


def uderiv(a: Sequence) -> list:
    return utrim([i * a[i] for i in range(1, len(a))])


def ueval(a: Sequence, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def upow(a: Sequence, n: int) -> list:
    out = [1]
    base = list(a)
    while n:
        if n & 1:
            out = umul(out, base)
        base = umul(base, base)
        n >>= 1
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def rational_roots(a: Sequence) -> list[Fraction]:
    """Distinct rational roots of a polynomial with rational coefficients."""
    a = utrim([Fraction(c) for c in a])
    if len(a) <= 1:
        return []
    roots = []
    while a and a[0] == 0:
        a.pop(0)
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
    if len(a) <= 1:
        return roots
    den = 1
    for c in a:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in a]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    for p in _divisors(ints[0]):
        for qd in _divisors(ints[-1]):
            for sign in (1, -1):
                r = Fraction(sign * p, qd)
                if r not in roots and ueval(ints, r) == 0:
                    roots.append(r)
    return sorted(roots)


# ---------------------------------------------------------------------------
# cyclotomic fields


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def _cyclotomic(q: int) -> tuple[int, ...]:
    num = [-1] + [0] * (q - 1) + [1]  # x^q - 1
    for d in range(1, q):
        if q % d == 0:
            num, rem = udivmod(num, _cyclotomic(d))
            assert not rem
    return tuple(int(c) for c in num)


def cyclotomic_poly(q: int) -> list[int]:
    """Integer coefficients of the q-th cyclotomic polynomial, low degree first."""
    if q < 1:
        raise ValueError("conductor must be positive")
    return list(_cyclotomic(q))


class CycloNum:
    """An element of Q(zeta_q), reduced modulo the q-th cyclotomic polynomial.

    Instances are immutable.  Arithmetic with ints and Fractions embeds them
    in the same field; mixing two different conductors raises
    :class:`ConductorMismatch`.
    """

    __slots__ = ("q", "coeffs", "_hash")

    def __init__(self, q: int, coeffs: Sequence = ()):
        if q < 1:
            raise ValueError("conductor must be positive")
        modulus = _cyclotomic(q)
        c = [Fraction(x) for x in coeffs]
        if len(c) >= len(modulus):
            c = udivmod(c, modulus)[1]
        n = len(modulus) - 1
        c = c + [Fraction(0)] * (n - len(c))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("CycloNum is immutable")

    @classmethod
    def from_rat(cls, q: int, value) -> "CycloNum":
        return cls(q, [Fraction(value)])

    @classmethod
    def zeta(cls, q: int) -> "CycloNum":
        return zeta_pow(q, 1)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_rat(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def _coerce(self, other) -> "CycloNum":
        if isinstance(other, CycloNum):
            if other.q != self.q:
                raise ConductorMismatch(f"conductors {self.q} and {other.q} differ")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNum(self.q, [other])
        try:
            return CycloNum(self.q, [Fraction(other)])
        except (TypeError, ValueError):
            return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloNum(self.q, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.q, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloNum(self.q, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloNum(self.q, umul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        if self == 0:
            raise ZeroDivisionError("inverse of zero in Q(zeta_%d)" % self.q)
        g, s, _ = uxgcd(self.coeffs, _cyclotomic(self.q))
        assert g == [1]
        return CycloNum(self.q, s)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = CycloNum(self.q, [1]), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, CycloNum):
            return self.q == other.q and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.q, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def sort_key(self) -> tuple:
        return tuple(self.coeffs)

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(format_rat(c))
                continue
            mono = "zeta" if i == 1 else f"zeta^{i}"
            if c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{format_rat(c)}*{mono}")
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return f"q={self.q}; {body}"

    def __repr__(self):
        return f"CycloNum({self})"

    @classmethod
    def parse(cls, text: str) -> "CycloNum":
        """Inverse of ``str``: ``"q=4; 1/2 + 3*zeta"``."""
        head, _, body = text.partition(";")
        m = re.fullmatch(r"\s*q\s*=\s*(\d+)\s*", head)
        if not m:
            raise ValueError(f"bad cyclotomic literal {text!r}")
        q = int(m.group(1))
        coeffs: dict[int, Fraction] = {}
        body = body.replace(" ", "").replace("-", "+-")
        for term in filter(None, body.split("+")):
            sign = 1
            if term.startswith("-"):
                sign, term = -1, term[1:]
            coef, _, mono = term.rpartition("*") if "zeta" in term else (term, "", "")
            if "zeta" in term and not coef and "*" not in term:
                coef, mono = "1", term
            power = 0
            if mono:
                power = int(mono.split("^")[1]) if "^" in mono else 1
            coeffs[power] = coeffs.get(power, Fraction(0)) + sign * parse_rat(coef or "1")
        dense = [coeffs.get(i, Fraction(0)) for i in range(max(coeffs, default=0) + 1)]
        return cls(q, dense)


Scalar = Union[int, Fraction, CycloNum]


def zeta_pow(q: int, k: int) -> CycloNum:
    """zeta_q ** k reduced modulo the cyclotomic polynomial."""
    k %= q
    return CycloNum(q, [0] * k + [1])


def cyclo_field_op(a: CycloNum, b: CycloNum, op: str) -> CycloNum:
    if a.q != b.q:
        raise ConductorMismatch(f"conductors {a.q} and {b.q} differ")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown field operation {op!r}")
