"""Sparse multivariate polynomials and monomial orders."""
from __future__ import annotations

from fractions import Fraction
from itertools import product as _iproduct
from typing import Iterable, Mapping, Sequence

from ..arith import CycloNum, format_rat

__all__ = ["MonomialOrder", "Poly", "GREVLEX", "LEX", "block_order", "RingMismatch"]


class RingMismatch(ValueError):
    pass


class MonomialOrder:
    """A monomial order given as a sequence of blocks.

    Each block is ``(size, kind)`` with kind ``"lex"`` or ``"grevlex"``.
    Blocks compare left to right, so any order with more than one block
    eliminates the variables of the earlier blocks.  A block of size ``None``
    extends to the remaining variables.

    Every order maps an exponent vector to a sort key which is a *linear*
    function of the exponents; monomial products therefore correspond to
    componentwise sums of keys and comparisons are plain tuple comparisons.
    """

    def __init__(self, blocks: Sequence[tuple[int | None, str]], name: str | None = None):
        for _, kind in blocks:
            if kind not in ("lex", "grevlex"):
                raise ValueError(f"unknown block kind {kind!r}")
        self.blocks = tuple(blocks)
        self.name = name or "+".join(f"{k}({s})" for s, k in blocks)
        self._plans: dict[int, tuple] = {}

    def __repr__(self):
        return f"MonomialOrder({self.name})"

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def _plan(self, nvars: int):
        plan = self._plans.get(nvars)
        if plan is not None:
            return plan
        spans, start = [], 0
        for size, kind in self.blocks:
            stop = nvars if size is None else min(nvars, start + size)
            spans.append((start, stop, kind))
            start = stop
        if start < nvars:
            spans.append((start, nvars, "grevlex"))
        plan = tuple(spans)
        self._plans[nvars] = plan
        return plan

    def key(self, exps: Sequence[int]) -> tuple:
        out: list[int] = []
        for start, stop, kind in self._plan(len(exps)):
            if kind == "lex":
                out.extend(exps[start:stop])
            else:
                out.append(sum(exps[start:stop]))
                out.extend(-exps[i] for i in range(stop - 1, start - 1, -1))
        return tuple(out)

    def exps(self, key: Sequence[int], nvars: int) -> tuple:
        out = [0] * nvars
        pos = 0
        for start, stop, kind in self._plan(nvars):
            if kind == "lex":
                out[start:stop] = key[pos:pos + stop - start]
                pos += stop - start
            else:
                pos += 1
                for i in range(stop - 1, start - 1, -1):
                    out[i] = -key[pos]
                    pos += 1
        return tuple(out)

    def eliminates(self, nvars: int) -> int:
        """Number of leading variables eliminated by the first block."""
        plan = self._plan(nvars)
        return plan[0][1] if len(plan) > 1 else 0


GREVLEX = MonomialOrder([(None, "grevlex")], "grevlex")
LEX = MonomialOrder([(None, "lex")], "lex")


def block_order(first: int, inner: str = "grevlex") -> MonomialOrder:
    """Elimination order: the first ``first`` variables are bigger than the rest."""
    return MonomialOrder([(first, inner), (None, inner)], f"block({first})")


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, CycloNum)) or type(x).__name__ == "mpq"


def _normalize_coeff(c):
    if isinstance(c, (int, CycloNum)):
        return c if not isinstance(c, bool) else int(c)
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if type(c).__name__ == "mpq":
        c = Fraction(int(c.numerator), int(c.denominator))
        return c.numerator if c.denominator == 1 else c
    return c


class Poly:
    """Immutable sparse polynomial over Q or Q(zeta_q).

    ``terms`` maps exponent tuples (one entry per ring variable) to nonzero
    coefficients.  Integer-valued rationals are stored as ``int``.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(vars)
        clean = {}
        if terms:
            n = len(self.vars)
            for e, c in terms.items():
                if len(e) != n:
                    raise RingMismatch(f"exponent {e} does not fit ring {self.vars}")
                if c != 0:
                    clean[tuple(e)] = _normalize_coeff(c)
        self.terms = clean
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, vars: Sequence[str], c) -> "Poly":
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, vars: Sequence[str], name: str) -> "Poly":
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, {tuple(e): 1})

    @classmethod
    def gens(cls, vars: Sequence[str]) -> list["Poly"]:
        return [cls.var(vars, v) for v in vars]

    @classmethod
    def monomial(cls, vars: Sequence[str], exps: Sequence[int], c=1) -> "Poly":
        return cls(vars, {tuple(exps): c})

    # basic protocol -------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), 0)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vars == other.vars and self.terms == other.terms
        if _is_scalar(other):
            if other == 0:
                return not self.terms
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise RingMismatch(f"rings {self.vars} and {other.vars} differ")
            return other
        if _is_scalar(other):
            return Poly.const(self.vars, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for e, c in o.terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Poly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            if other == 0:
                return Poly(self.vars)
            return Poly(self.vars, {e: c * other for e, c in self.terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_scalar(other):
            return NotImplemented
        if isinstance(other, int):
            other = Fraction(other)
        return Poly(self.vars, {e: c / other for e, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out, base = Poly.const(self.vars, 1), self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # structure ------------------------------------------------------------
    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def support_vars(self) -> set[str]:
        used = set()
        for e in self.terms:
            used.update(v for v, a in zip(self.vars, e) if a)
        return used

    def coefficients(self) -> list:
        return list(self.terms.values())

    def leading(self, order: MonomialOrder = GREVLEX) -> tuple[tuple, object]:
        e = max(self.terms, key=order.key)
        return e, self.terms[e]

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list[tuple[tuple, object]]:
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def monic(self, order: MonomialOrder = GREVLEX) -> "Poly":
        if not self.terms:
            return self
        _, c = self.leading(order)
        if c == 1:
            return self
        inv = (Fraction(1) / c) if not isinstance(c, CycloNum) else c.inverse()
        return self * inv

    def homogeneous_part(self, degree: int) -> "Poly":
        return Poly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == degree})

    # evaluation and substitution ---------------------------------------
    def evaluate(self, point: Mapping[str, object] | Sequence):
        if isinstance(point, Mapping):
            values = [point[v] for v in self.vars]
        else:
            values = list(point)
        total = 0
        for e, c in self.terms.items():
            term = c
            for val, a in zip(values, e):
                if a:
                    term = term * val**a
            total = total + term
        return total

    def substitute(self, mapping: Mapping[str, object], vars: Sequence[str] | None = None) -> "Poly":
        """Replace variables by polynomials (in ring ``vars``) or scalars.

        Variables absent from ``mapping`` are kept and must exist in the
        target ring.
        """
        target = tuple(vars) if vars is not None else self.vars
        images = []
        for v in self.vars:
            if v in mapping:
                img = mapping[v]
                if _is_scalar(img):
                    img = Poly.const(target, img)
                elif img.vars != target:
                    img = img.to_ring(target)
            else:
                img = Poly.var(target, v)
            images.append(img)
        out = Poly(target)
        cache: dict[tuple[int, int], Poly] = {}

        def power(i: int, a: int) -> Poly:
            if (i, a) not in cache:
                cache[(i, a)] = images[i] ** a
            return cache[(i, a)]

        acc: dict = {}
        for e, c in self.terms.items():
            term = Poly.const(target, c)
            for i, a in enumerate(e):
                if a:
                    term = term * power(i, a)
            for te, tc in term.terms.items():
                s = acc.get(te, 0) + tc
                if s == 0:
                    acc.pop(te, None)
                else:
                    acc[te] = s
        out = Poly(target, acc)
        return out

    def to_ring(self, vars: Sequence[str]) -> "Poly":
        """Re-express in a ring with a different variable list."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        index = {v: i for i, v in enumerate(vars)}
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for v, a in zip(self.vars, e):
                if a:
                    if v not in index:
                        raise RingMismatch(f"variable {v} missing from target ring")
                    ne[index[v]] = a
            out[tuple(ne)] = c
        return Poly(vars, out)

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    def diff(self, name: str) -> "Poly":
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.vars, out)

    def coefficients_in(self, names: Sequence[str]) -> dict[tuple, "Poly"]:
        """Split as a polynomial in ``names`` with coefficients in the other variables."""
        idx = [self.vars.index(n) for n in names]
        rest = [i for i in range(len(self.vars)) if i not in idx]
        rest_vars = tuple(self.vars[i] for i in rest)
        out: dict[tuple, dict] = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in idx)
            out.setdefault(key, {})[tuple(e[i] for i in rest)] = c
        return {k: Poly(rest_vars, v) for k, v in out.items()}

    # printing -----------------------------------------------------------------
    def __str__(self):
        return self.to_str()

    def to_str(self, order: MonomialOrder = GREVLEX) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms(order):
            mono = "*".join(
                v if a == 1 else f"{v}^{a}" for v, a in zip(self.vars, e) if a
            )
            neg = False
            if isinstance(c, CycloNum):
                cs = f"({c})"
            else:
                if c < 0:
                    neg, c = True, -c
                if c == 1 and mono:
                    cs = ""
                elif isinstance(c, Fraction) and c.denominator != 1:
                    cs = f"({format_rat(c)})" if mono else format_rat(c)
                else:
                    cs = format_rat(c)
            body = f"{cs}*{mono}" if cs and mono else (cs or mono)
            pieces.append(("-" if neg else "+", body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({self.to_str()!r}, vars={self.vars})"


def expand_product(factors: Iterable[Poly], vars: Sequence[str]) -> Poly:
    out = Poly.const(vars, 1)
    for f in factors:
        out = out * f
    return out


def monomials_up_to(nvars: int, degree: int) -> list[tuple]:
    """All exponent vectors of total degree at most ``degree``."""
    out = [e for e in _iproduct(range(degree + 1), repeat=nvars) if sum(e) <= degree]
    out.sort(key=lambda e: (sum(e), tuple(-a for a in e)))
    return out
