"""Exact dense matrices and the structure theory of single matrices.

Entries are ``Fraction``/``int``, :class:`CycloNum` or :class:`Poly` (for
matrices depending on parameters).  Field operations such as inversion
need scalar entries.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .arith import (
    CycloNum,
    format_rat,
    parse_rat,
    rational_roots,
    udivmod,
    uderiv,
    ugcd,
    utrim,
    zeta_pow,
)
from .poly import Poly

__all__ = [
    "Mat",
    "SelectorMatrix",
    "Singular",
    "NotUnipotent",
    "NotNilpotent",
    "NotSimultaneouslyDiagonalizable",
    "EigenvalueFieldTooLarge",
    "charpoly",
    "minpoly",
    "is_semisimple",
    "is_unipotent",
    "is_nilpotent",
    "jordan_chevalley",
    "nil_log",
    "nil_exp",
    "unipotent_one_param",
    "eigenvalues",
    "roots_in_field",
    "nullspace",
    "normalize_semisimple",
    "format_entry",
    "parse_entry",
]


class Singular(ValueError):
    pass


class NotUnipotent(ValueError):
    pass


class NotNilpotent(ValueError):
    pass


class NotSimultaneouslyDiagonalizable(ValueError):
    pass


class EigenvalueFieldTooLarge(ValueError):
    """Some eigenvalue does not lie in Q(zeta_q) for the conductors tried."""


def _clean(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, CycloNum) and x.is_rational():
        return _clean(x.to_rat())
    if type(x).__name__ == "mpq":
        return _clean(Fraction(int(x.numerator), int(x.denominator)))
    return x


def _div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def format_entry(x) -> str:
    x = _clean(x)
    if isinstance(x, (int, Fraction)):
        return format_rat(x)
    return str(x)


def parse_entry(text):
    if isinstance(text, (int, Fraction)):
        return _clean(text)
    text = str(text).strip()
    if "zeta" in text or text.startswith("q="):
        return _clean(CycloNum.parse(text))
    return _clean(parse_rat(text))


class Mat:
    """An immutable dense matrix."""

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(_clean(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")
        self._hash = None

    # construction ----------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "Mat":
        return cls([[0] * (n if m is None else m) for _ in range(n)])

    @classmethod
    def diag(cls, entries: Sequence) -> "Mat":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "Mat":
        return cls(list(zip(*cols)))

    # access ----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def diagonal(self) -> list:
        return [self.rows[i][i] for i in range(min(self.shape))]

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(tuple(str(x) for x in r) for r in self.rows))
        return self._hash

    def __repr__(self):
        return "Mat([" + ", ".join("[" + ", ".join(format_entry(x) for x in r) + "]" for r in self.rows) + "])"

    __str__ = __repr__

    # arithmetic ------------------------------------------------------------
    def __add__(self, other: "Mat") -> "Mat":
        return Mat([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "Mat":
        return Mat([[c * a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} x {other.shape}")
            cols = list(zip(*other.rows)) if other.rows else []
            out = []
            for r in self.rows:
                row = []
                for c in cols:
                    acc = 0
                    for a, b in zip(r, c):
                        if a != 0 and b != 0:
                            acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return Mat(out)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    __matmul__ = __mul__

    def __truediv__(self, c):
        return Mat([[_div(a, c) for a in r] for r in self.rows])

    def apply(self, v: Sequence) -> list:
        out = []
        for r in self.rows:
            acc = 0
            for a, b in zip(r, v):
                if a != 0 and b != 0:
                    acc = acc + a * b
            out.append(_clean(acc))
        return out

    def __pow__(self, n: int) -> "Mat":
        if self.nrows != self.ncols:
            raise ValueError("power of a non-square matrix")
        if n < 0:
            return self.inverse() ** (-n)
        out, base = Mat.identity(self.nrows), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def transpose(self) -> "Mat":
        return Mat(list(zip(*self.rows))) if self.rows else self

    T = property(transpose)

    def trace(self):
        acc = 0
        for i in range(self.nrows):
            acc = acc + self.rows[i][i]
        return acc

    def map(self, fn) -> "Mat":
        return Mat([[fn(a) for a in r] for r in self.rows])

    def evaluate(self, point) -> "Mat":
        """Evaluate polynomial entries at a point (mapping name -> value)."""
        return self.map(lambda a: a.evaluate({v: point.get(v, 0) for v in a.vars})
                        if isinstance(a, Poly) else a)

    # predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and self == Mat.identity(self.nrows)

    def is_diagonal(self) -> bool:
        return all(a == 0 for i, r in enumerate(self.rows) for j, a in enumerate(r) if i != j)

    def is_upper_unitriangular(self) -> bool:
        return all((a == 1 if i == j else a == 0)
                   for i, r in enumerate(self.rows) for j, a in enumerate(r) if j <= i)

    def commutes_with(self, other: "Mat") -> bool:
        return self * other == other * self

    # field linear algebra --------------------------------------------------
    def det(self):
        n = self.nrows
        if n != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if any(isinstance(a, Poly) for r in self.rows for a in r):
            return _laplace_det([list(r) for r in self.rows])
        M = [list(r) for r in self.rows]
        det = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if M[i][c] != 0), None)
            if p is None:
                return 0
            if p != c:
                M[c], M[p] = M[p], M[c]
                det = -det
            det = det * M[c][c]
            inv = _div(1, M[c][c])
            for i in range(c + 1, n):
                if M[i][c] != 0:
                    f = M[i][c] * inv
                    M[i] = [a - f * b for a, b in zip(M[i], M[c])]
        return _clean(det)

    def inverse(self) -> "Mat":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        M = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            p = next((i for i in range(c, n) if M[i][c] != 0), None)
            if p is None:
                raise Singular("matrix is singular")
            M[c], M[p] = M[p], M[c]
            inv = _div(1, M[c][c])
            M[c] = [x * inv for x in M[c]]
            for i in range(n):
                if i != c and M[i][c] != 0:
                    f = M[i][c]
                    M[i] = [a - f * b for a, b in zip(M[i], M[c])]
        return Mat([r[n:] for r in M])

    # serialization ---------------------------------------------------------
    def to_json(self) -> list[list[str]]:
        return [[format_entry(a) for a in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> "Mat":
        return cls([[parse_entry(a) for a in r] for r in data])


def _laplace_det(M: list[list]):
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    acc = 0
    for j in range(n):
        if M[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _laplace_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


class SelectorMatrix:
    """A d x k 0/1 matrix whose columns are distinct standard unit vectors."""

    __slots__ = ("dim", "cols")

    def __init__(self, dim: int, cols: Sequence[int]):
        cols = tuple(cols)
        if len(set(cols)) != len(cols) or any(not 0 <= c < dim for c in cols):
            raise ValueError("selector columns must be distinct coordinates")
        self.dim = dim
        self.cols = cols

    @property
    def k(self) -> int:
        return len(self.cols)

    def matrix(self) -> Mat:
        return Mat([[int(self.cols[j] == i) for j in range(self.k)] for i in range(self.dim)])

    def ones(self) -> list[int]:
        """The vector ``T 1``."""
        return [int(i in self.cols) for i in range(self.dim)]

    def embed(self, g: Sequence) -> list:
        """``T g``: place the entries of ``g`` at the selected coordinates."""
        out = [0] * self.dim
        for c, x in zip(self.cols, g):
            out[c] = x
        return out

    def __eq__(self, other):
        return isinstance(other, SelectorMatrix) and (self.dim, self.cols) == (other.dim, other.cols)

    def __hash__(self):
        return hash((self.dim, self.cols))

    def __repr__(self):
        return f"SelectorMatrix({self.dim}, {list(self.cols)})"

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.matrix().rows]

    @classmethod
    def from_json(cls, data) -> "SelectorMatrix":
        dim = len(data)
        k = len(data[0]) if data else 0
        cols = [next(i for i in range(dim) if data[i][j] == 1) for j in range(k)]
        return cls(dim, cols)


# ---------------------------------------------------------------------------
# characteristic and minimal polynomials


def charpoly(M: Mat) -> list:
    """Characteristic polynomial ``det(x I - M)`` (Faddeev-LeVerrier), low degree first."""
    n = M.nrows
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    N = Mat.zeros(n)
    I = Mat.identity(n)
    for k in range(1, n + 1):
        N = M * N + I.scale(coeffs[n - k + 1])
        coeffs[n - k] = _clean(-(M * N).trace() / Fraction(k))
    return coeffs


def _vec(M: Mat) -> list:
    return [a for r in M.rows for a in r]


def minpoly(M: Mat) -> list:
    """Monic minimal polynomial, low degree first."""
    n = M.nrows
    powers = [Mat.identity(n)]
    while True:
        k = len(powers)
        cand = powers[-1] * M
        # solve sum c_i vec(M^i) = vec(M^k)
        A = Mat(list(zip(*[_vec(P) for P in powers])))
        sol = _solve(A, _vec(cand))
        if sol is not None:
            return [_clean(-c) for c in sol] + [1]
        powers.append(cand)
        if k > n:  # pragma: no cover - Cayley-Hamilton forbids this
            raise RuntimeError("minimal polynomial search failed")


def _rref(rows: list[list]) -> tuple[list[list], list[int]]:
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = _div(1, M[r][c])
        M[r] = [_clean(x * inv) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [_clean(a - f * b) for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def _solve(A: Mat, b: Sequence) -> list | None:
    aug = [list(r) + [bi] for r, bi in zip(A.rows, b)]
    R, piv = _rref(aug)
    n = A.ncols
    if n in piv:
        return None
    sol = [0] * n
    for i, c in enumerate(piv):
        sol[c] = R[i][n]
    return sol


def nullspace(A: Mat) -> list[list]:
    """Basis of ``{x : A x = 0}`` read off the reduced row echelon form."""
    n = A.ncols
    if A.nrows == 0:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    R, piv = _rref([list(r) for r in A.rows])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = _clean(-R[i][f])
        basis.append(v)
    return basis


def _mat_poly(p: Sequence, M: Mat) -> Mat:
    n = M.nrows
    out = Mat.zeros(n)
    for c in reversed(p):
        out = out * M + Mat.identity(n).scale(c)
    return out


def is_semisimple(M: Mat) -> bool:
    m = minpoly(M)
    return len(ugcd(m, uderiv(m))) == 1


def is_nilpotent(N: Mat) -> bool:
    return (N ** N.nrows).is_zero()


def is_unipotent(M: Mat) -> bool:
    return is_nilpotent(M - Mat.identity(M.nrows))


def jordan_chevalley(M: Mat) -> tuple[Mat, Mat]:
    """Multiplicative Jordan-Chevalley decomposition ``M = M_s M_u``.

    The semisimple part is the Newton limit of the squarefree part of the
    characteristic polynomial, which stays inside the entry field.
    """
    if M.det() == 0:
        raise Singular("Jordan-Chevalley decomposition needs an invertible matrix")
    chi = charpoly(M)
    p = udivmod(chi, ugcd(chi, uderiv(chi)))[0]
    dp = uderiv(p)
    A = M
    for _ in range(2 * M.nrows + 2):
        pA = _mat_poly(p, A)
        if pA.is_zero():
            break
        A = A - pA * _mat_poly(dp, A).inverse()
    else:  # pragma: no cover - Newton converges in log2(n) steps
        raise RuntimeError("Newton iteration did not converge")
    Ms = A
    Mu = Ms.inverse() * M
    return Ms, Mu


def nil_log(U: Mat) -> Mat:
    """Logarithm of a unipotent matrix (a finite series)."""
    n = U.nrows
    N = U - Mat.identity(n)
    if not (N ** n).is_zero():
        raise NotUnipotent("matrix is not unipotent")
    out = Mat.zeros(n)
    power = Mat.identity(n)
    for k in range(1, n):
        power = power * N
        term = power / Fraction(k)
        out = out + term if k % 2 else out - term
    return out


def nil_exp(N: Mat) -> Mat:
    """Exponential of a nilpotent matrix."""
    n = N.nrows
    if not (N ** n).is_zero():
        raise NotNilpotent("matrix is not nilpotent")
    out = Mat.identity(n)
    power = Mat.identity(n)
    for k in range(1, n):
        power = power * N
        out = out + power / Fraction(factorial(k))
    return out


def unipotent_one_param(U: Mat, t: str = "t", ring: Sequence[str] | None = None) -> Mat:
    """``exp(t log U)`` as a matrix of polynomials in ``t``.

    Entries of ``U`` may be polynomials (parameters); the result lives in
    ``ring`` (default: the parameters of ``U`` followed by ``t``).
    """
    if ring is None:
        names: list[str] = []
        for r in U.rows:
            for a in r:
                if isinstance(a, Poly):
                    names.extend(v for v in a.vars if v not in names)
        ring = tuple(names) + ((t,) if t not in names else ())
    ring = tuple(ring)

    def lift(a):
        return a.to_ring(ring) if isinstance(a, Poly) else Poly.const(ring, a)

    L = nil_log(U).map(lift)
    tv = Poly.var(ring, t)
    n = U.nrows
    out = Mat.identity(n).map(lift)
    power = Mat.identity(n).map(lift)
    for k in range(1, n):
        power = power * L
        out = out + power.scale(tv ** k / Fraction(factorial(k)))
    return out


# ---------------------------------------------------------------------------
# eigenvalues over Q and Q(zeta_q)


def _coords(c, q: int) -> list:
    from .arith import euler_phi
    if isinstance(c, CycloNum):
        return list(c.coeffs) + [0] * (euler_phi(q) - len(c.coeffs))
    return [Fraction(c)] + [0] * (euler_phi(q) - 1)


def roots_in_field(f: Sequence, q: int = 1) -> list:
    """Distinct roots of ``f`` of the form ``r * zeta_q^k`` with ``r`` rational."""
    f = utrim(list(f))
    if len(f) <= 1:
        return []
    roots: list = []
    if f[0] == 0:
        roots.append(0)
    for k in range(q):
        z = zeta_pow(q, k) if q > 1 else 1
        g = [c * z ** i if i else c for i, c in enumerate(f)]
        comps = list(zip(*[_coords(c, q) for c in g])) if q > 1 else [tuple(Fraction(c) for c in g)]
        h: list = []
        for comp in comps:
            comp = utrim(list(comp))
            if comp:
                h = comp if not h else ugcd(h, comp)
        for r in rational_roots(h) if h else []:
            if r == 0:
                continue
            root = _clean(z * r) if q > 1 else r
            if all(root != x for x in roots):
                roots.append(root)
    return roots


def _eig_key(x):
    x = _clean(x)
    if isinstance(x, CycloNum):
        return (1, tuple(Fraction(c) for c in x.coeffs))
    return (0, (Fraction(x),))


def _field_conductor(M: Mat) -> int | None:
    for r in M.rows:
        for a in r:
            if isinstance(a, CycloNum):
                return a.q
    return None


DEFAULT_CONDUCTORS = (1, 4, 3, 6, 8, 5, 10, 12)


def eigenvalues(M: Mat, q: int | None = None) -> list[tuple[object, int]]:
    """Eigenvalues with algebraic multiplicities, sorted deterministically.

    Raises :class:`EigenvalueFieldTooLarge` unless the characteristic
    polynomial splits over ``Q(zeta_q)`` into factors ``x - r zeta^k``.
    """
    chi = charpoly(M)
    fixed = _field_conductor(M)
    tries = [q] if q is not None else ([fixed] if fixed else list(DEFAULT_CONDUCTORS))
    for cond in tries:
        rest = list(chi)
        out = []
        for root in roots_in_field(chi, cond):
            mult = 0
            while True:
                quo, rem = udivmod(rest, [-root, 1])
                if utrim([x for x in rem]):
                    break
                rest = quo
                mult += 1
            out.append((root, mult))
        if len(utrim(rest)) == 1:
            return sorted(out, key=lambda p: _eig_key(p[0]))
    raise EigenvalueFieldTooLarge("characteristic polynomial does not split over the cyclotomic fields tried")


def normalize_semisimple(Ms: Sequence[Mat], v: Sequence, q: int | None = None):
    """Simultaneous diagonalization with the base point moved to ``T 1``.

    Returns ``(P, D_list, T)`` with ``M_i = P^{-1} D_i P`` and ``P v = T 1``.
    """
    Ms = list(Ms)
    if not Ms:
        raise ValueError("need at least one matrix")
    n = Ms[0].nrows
    for i, A in enumerate(Ms):
        for B in Ms[i + 1:]:
            if not A.commutes_with(B):
                raise NotSimultaneouslyDiagonalizable("matrices do not commute")
        if not is_semisimple(A):
            raise NotSimultaneouslyDiagonalizable("a matrix is not semisimple")
    spaces: list[tuple[tuple, list[list]]] = [((), [[int(i == j) for i in range(n)] for j in range(n)])]
    for A in Ms:
        eigs = [e for e, _ in eigenvalues(A, q)]
        refined = []
        for label, basis in spaces:
            Bm = Mat.from_columns(basis)
            for e in eigs:
                K = nullspace((A - Mat.identity(n).scale(e)) * Bm)
                if K:
                    vecs = [Bm.apply(c) for c in K]
                    refined.append((label + (e,), vecs))
        spaces = refined
    if sum(len(b) for _, b in spaces) != n:
        raise NotSimultaneouslyDiagonalizable("eigenvectors do not span the space")
    spaces.sort(key=lambda s: tuple(_eig_key(e) for e in s[0]))
    w = Mat.from_columns([c for _, b in spaces for c in b]).inverse().apply(v)
    columns: list[list] = []
    labels: list[tuple] = []
    start = 0
    for label, basis in spaces:
        # v's component inside this common eigenspace becomes the first basis vector
        comp = Mat.from_columns(basis).apply(w[start:start + len(basis)])
        start += len(basis)
        if any(x != 0 for x in comp):
            new = [comp]
            for c in basis:
                if len(new) == len(basis):
                    break
                if not nullspace(Mat.from_columns(new + [c])):
                    new.append(c)
            basis = new
        columns.extend(basis)
        labels.extend([label] * len(basis))
    Pinv = Mat.from_columns(columns)
    P = Pinv.inverse()
    w = P.apply(v)
    rows = [list(r) for r in P.rows]
    selected = []
    for j, x in enumerate(w):
        if x != 0:
            rows[j] = [_clean(_div(a, x)) for a in rows[j]]
            selected.append(j)
    P = Mat(rows)
    D_list = [Mat.diag([lab[i] for lab in labels]) for i in range(len(Ms))]
    return P, D_list, SelectorMatrix(n, selected)
