"""Data carried through the decision procedures."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from ..lattice import Lattice
from ..matgroup import Mat, SelectorMatrix, format_entry, parse_entry
from ..poly import Ideal, Poly

__all__ = [
    "MODES",
    "GROUP_MODES",
    "ORBIT_MODES",
    "AnsatzDegreeExceeded",
    "InstanceError",
    "DetInstance",
    "UnipotentTemplate",
    "default_templates",
    "Certificate",
    "Verdict",
    "YES",
    "NO",
    "UNKNOWN",
]

GROUP_MODES = ("group-semisimple", "group-commutative", "gen-cyclic-semisimple", "gen-cyclic-general")
ORBIT_MODES = ("orbit-semisimple", "orbit-commutative")
MODES = GROUP_MODES[:2] + ORBIT_MODES + GROUP_MODES[2:]

YES, NO, UNKNOWN = "YES", "NO", "UNKNOWN"


class AnsatzDegreeExceeded(RuntimeError):
    """The cofactor ansatz has no solution at the requested degree."""


class InstanceError(ValueError):
    pass


@dataclass
class DetInstance:
    """A question about an ideal: is its variety a (orbit of a) s-generated group?

    Group modes take either ``d*d`` matrix variables in row-major order or,
    with ``shape="diagonal"``, the ``d`` diagonal entries of a diagonal group.
    """

    vars: tuple[str, ...]
    ideal: Ideal
    s: int = 1
    b: int | None = None
    mode: str = "orbit-semisimple"
    q: int | None = None
    shape: str | None = None
    templates: list["UnipotentTemplate"] | None = None

    def __post_init__(self):
        self.vars = tuple(self.vars)
        if self.ideal.vars != self.vars:
            self.ideal = self.ideal.to_ring(self.vars)
        if self.mode not in MODES:
            raise InstanceError(f"unknown mode {self.mode!r}")
        if self.s < 1:
            raise InstanceError("s must be at least 1")
        if not self.ideal.generators:
            raise InstanceError("the ideal has no generators")
        deg = self.ideal.max_degree()
        if self.b is None:
            self.b = max(deg, 1)
        elif self.b < deg:
            raise InstanceError(f"bound b={self.b} is below the generator degree {deg}")
        if self.shape is None:
            self.shape = self._infer_shape()
        if self.shape not in ("matrix", "diagonal", "point"):
            raise InstanceError(f"unknown shape {self.shape!r}")
        if self.mode in GROUP_MODES:
            if self.shape == "point":
                raise InstanceError("group modes need matrix or diagonal variables")
            if self.shape == "matrix" and math.isqrt(len(self.vars)) ** 2 != len(self.vars):
                raise InstanceError("matrix shape needs a square number of variables")
        elif self.shape != "point":
            raise InstanceError("orbit modes take point variables")

    def _infer_shape(self) -> str:
        if self.mode in ORBIT_MODES:
            return "point"
        n = len(self.vars)
        return "matrix" if math.isqrt(n) ** 2 == n else "diagonal"

    @property
    def dim(self) -> int:
        if self.shape == "matrix":
            return math.isqrt(len(self.vars))
        return len(self.vars)


@dataclass(frozen=True)
class UnipotentTemplate:
    """Upper unitriangular pattern whose entries are 0, 1 or parameter names."""

    pattern: tuple[tuple[Any, ...], ...]
    params: tuple[str, ...]
    constraints: tuple[str, ...] = ()
    name: str = ""

    def __post_init__(self):
        n = len(self.pattern)
        for i, row in enumerate(self.pattern):
            if len(row) != n:
                raise InstanceError("template pattern must be square")
            for j, a in enumerate(row):
                if j < i and a != 0:
                    raise InstanceError("template pattern must be upper triangular")
                if j == i and a != 1:
                    raise InstanceError("template diagonal must be 1")
                if isinstance(a, str) and a not in self.params:
                    raise InstanceError(f"undeclared template parameter {a!r}")

    @property
    def dim(self) -> int:
        return len(self.pattern)

    @property
    def is_trivial(self) -> bool:
        return all(a == (1 if i == j else 0) for i, row in enumerate(self.pattern) for j, a in enumerate(row))

    def matrix(self, ring: Sequence[str]) -> Mat:
        """The pattern as a matrix of polynomials over ``ring``."""
        ring = tuple(ring)
        return Mat([[Poly.var(ring, a) if isinstance(a, str) else Poly.const(ring, a) for a in row]
                    for row in self.pattern])

    def instantiate(self, values: dict[str, Any]) -> Mat:
        return Mat([[values[a] if isinstance(a, str) else a for a in row] for row in self.pattern])

    @classmethod
    def jordan(cls, blocks: Sequence[int], param: str = "lam") -> "UnipotentTemplate":
        """Jordan profile ``blocks`` with one shared super-diagonal parameter."""
        n = sum(blocks)
        rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        start = 0
        for size in blocks:
            for i in range(start, start + size - 1):
                rows[i][i + 1] = param
            start += size
        used = any(size > 1 for size in blocks)
        return cls(tuple(tuple(r) for r in rows), (param,) if used else (),
                   name="jordan(" + ",".join(map(str, blocks)) + ")")

    def blocks(self) -> list[list[int]]:
        """Index groups linked by nonzero super-diagonal entries."""
        n = self.dim
        out = [[0]]
        for i in range(1, n):
            if any(self.pattern[r][c] != 0 for r in range(i) for c in range(i, n)
                   if r in out[-1]):
                out[-1].append(i)
            else:
                out.append([i])
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": list(self.params),
            "pattern": [[a if isinstance(a, str) else format_entry(a) for a in row] for row in self.pattern],
            "constraints": list(self.constraints),
        }

    @classmethod
    def from_json(cls, data: dict) -> "UnipotentTemplate":
        params = tuple(data.get("params", ()))
        rows = []
        for row in data["pattern"]:
            rows.append(tuple(a if isinstance(a, str) and a in params else parse_entry(a) for a in row))
        return cls(tuple(rows), params, tuple(data.get("constraints", ())), data.get("name", ""))


def default_templates(d: int) -> list[UnipotentTemplate]:
    """Trivial template first, then one template per Jordan profile of ``d``."""
    def partitions(n, largest):
        if n == 0:
            yield ()
            return
        for k in range(min(n, largest), 0, -1):
            for rest in partitions(n - k, k):
                yield (k,) + rest

    out = [UnipotentTemplate.jordan((1,) * d)]
    for p in sorted(partitions(d, d), key=lambda p: (max(p), p)):
        if max(p) > 1:
            out.append(UnipotentTemplate.jordan(p))
    return out


def _mat_json(M: Mat | None):
    return None if M is None else M.to_json()


@dataclass
class Certificate:
    """Witness of a YES answer.

    ``M_i = P^{-1} U_i D_i P`` and, in orbit modes, ``v = P^{-1} T 1``.
    ``Pinv`` is stored alongside ``P`` so both can be checked exactly.
    """

    kind: str
    M: list[Mat]
    v: list | None = None
    P: Mat | None = None
    Pinv: Mat | None = None
    lattice: Lattice | None = None
    T: SelectorMatrix | None = None
    D: list[Mat] = field(default_factory=list)
    U: list[Mat] = field(default_factory=list)
    template: UnipotentTemplate | None = None
    template_values: dict[str, Any] = field(default_factory=dict)
    verify: dict | None = None

    @property
    def is_orbit(self) -> bool:
        return self.v is not None

    def to_json(self) -> dict:
        out = {
            "P": _mat_json(self.P),
            "Pinv": _mat_json(self.Pinv),
            "lattice": None if self.lattice is None else self.lattice.to_json(),
            "T": None if self.T is None else self.T.to_json(),
            "D": [m.to_json() for m in self.D],
            "U": [m.to_json() for m in self.U],
            "v": None if self.v is None else [format_entry(x) for x in self.v],
            "M": [m.to_json() for m in self.M],
            "kind": self.kind,
        }
        if self.template is not None:
            out["template"] = self.template.to_json()
            out["template_values"] = {k: format_entry(v) for k, v in sorted(self.template_values.items())}
        out["verify"] = self.verify if self.verify is not None else {}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        def mat(x):
            return None if x is None else Mat.from_json(x)

        if "M" not in data or not data["M"]:
            raise InstanceError("certificate needs at least one matrix under 'M'")
        lat = data.get("lattice")
        T = data.get("T")
        template = data.get("template")
        tvals = {k: parse_entry(v) for k, v in (data.get("template_values") or {}).items()}
        v = data.get("v")
        Ms = [Mat.from_json(m) for m in data["M"]]
        return cls(
            kind=data.get("kind", ""),
            M=Ms,
            v=None if v is None else [parse_entry(x) for x in v],
            P=mat(data.get("P")),
            Pinv=mat(data.get("Pinv")),
            lattice=None if lat is None else Lattice.from_json(lat, ambient=(len(T[0]) if T else Ms[0].nrows)),
            T=None if T is None else SelectorMatrix.from_json(T),
            D=[Mat.from_json(m) for m in data.get("D") or []],
            U=[Mat.from_json(m) for m in data.get("U") or []],
            template=None if template is None else UnipotentTemplate.from_json(template),
            template_values=tvals,
            verify=data.get("verify"),
        )


@dataclass
class Verdict:
    answer: str
    certificate: Certificate | None = None
    reason: str = ""
    log: list[str] = field(default_factory=list)
    trace: dict = field(default_factory=dict, repr=False)
    limit_hit: bool = False

    def __post_init__(self):
        if self.answer not in (YES, NO, UNKNOWN):
            raise ValueError(f"bad answer {self.answer!r}")
        if self.answer == YES and self.certificate is None:
            raise ValueError("YES needs a certificate")

    def to_json(self) -> dict:
        if self.answer == YES:
            return self.certificate.to_json()
        return {"answer": self.answer, "reason": self.reason, "log": self.log}
