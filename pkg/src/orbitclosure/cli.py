"""Command-line front end: ``orbitclosure detect | verify | lattice``."""
from __future__ import annotations

import argparse
import json
import sys
from math import prod
from pathlib import Path

from .detproc import (
    MODES,
    NO,
    YES,
    Certificate,
    DetInstance,
    InstanceError,
    UnipotentTemplate,
    detect,
    verify_certificate,
)
from .lattice import lattice_from_polys
from .poly import GREVLEX, LEX, Ideal, Poly, PolySyntaxError, ResourceLimit, UnknownVariable, parse_poly, saturate
from .poly.groebner import set_default_budget

EXIT_YES, EXIT_NO, EXIT_UNKNOWN, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3, 4

HEADER_KEYS = ("vars", "s", "b", "mode", "q", "templates", "shape")
ORDERS = {"grevlex": GREVLEX, "lex": LEX}


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def load_templates(path: Path) -> list[UnipotentTemplate]:
    """A JSON template object or a list of them."""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read templates {path}: {exc}") from exc
    items = data if isinstance(data, list) else [data]
    try:
        return [UnipotentTemplate.from_json(item) for item in items]
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"bad template in {path}: {exc}") from exc


def parse_instance(text: str, base: Path | None = None) -> DetInstance:
    """Parse the line-oriented instance format; ``base`` resolves a relative templates path."""
    header: dict[str, str] = {}
    polys: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep:
            raise InstanceError(f"line {lineno}: expected 'key: value'")
        if key == "poly":
            polys.append(value)
        elif key in HEADER_KEYS:
            if key in header:
                raise InstanceError(f"line {lineno}: duplicate key {key!r}")
            header[key] = value
        else:
            raise InstanceError(f"line {lineno}: unknown key {key!r}")
    if "vars" not in header:
        raise InstanceError("missing 'vars'")
    if not polys:
        raise InstanceError("the instance has no 'poly' lines")
    vars = tuple(header["vars"].split())
    if len(set(vars)) != len(vars):
        raise InstanceError("repeated variable names")
    try:
        gens = [parse_poly(p, vars) for p in polys]
        s = int(header.get("s", 1))
        b = int(header["b"]) if "b" in header else None
        q = int(header["q"]) if "q" in header else None
    except (PolySyntaxError, UnknownVariable) as exc:
        raise InstanceError(str(exc)) from exc
    except ValueError as exc:
        raise InstanceError(f"bad number: {exc}") from exc
    gens = [g for g in gens if g]
    if not gens:
        raise InstanceError("every generator is zero")
    templates = None
    if "templates" in header:
        path = Path(header["templates"])
        if base is not None and not path.is_absolute():
            path = base / path
        templates = load_templates(path)
    return DetInstance(vars, Ideal(gens, vars), s=s, b=b, mode=header.get("mode", "orbit-semisimple"),
                       q=q, shape=header.get("shape"), templates=templates)


def read_instance(path: str) -> DetInstance:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc
    return parse_instance(text, p.parent)


def _apply_overrides(inst: DetInstance, args) -> DetInstance:
    if args.bound is None and args.s is None and args.mode is None:
        return inst
    return DetInstance(inst.vars, inst.ideal, s=args.s or inst.s, b=args.bound or inst.b,
                       mode=args.mode or inst.mode, q=inst.q,
                       shape=inst.shape if args.mode is None else None, templates=inst.templates)


def _trace_json(trace: dict, order) -> dict:
    out = {}
    for key, val in sorted(trace.items()):
        if isinstance(val, Ideal):
            out[key] = [str(g) for g in val.groebner(order)]
        elif isinstance(val, (list, tuple)) and val and all(isinstance(x, Ideal) for x in val):
            out[key] = [list(x.canonical_strings()) for x in val]
        elif hasattr(val, "to_json"):
            out[key] = val.to_json()
        elif isinstance(val, (int, str, list, tuple)):
            out[key] = list(val) if isinstance(val, tuple) else val
    return out


def cmd_detect(args) -> int:
    inst = _apply_overrides(read_instance(args.instance), args)
    if args.budget:
        set_default_budget(args.budget)
    opts = {"verify_N": args.verify_N, "ansatz_deg": args.ansatz_deg, "exhaustive": args.exhaustive_lattices,
            "search_bound": args.search_bound}
    if args.budget:
        opts["budget"] = args.budget
    if inst.mode == "orbit-commutative":
        templates = load_templates(Path(args.templates)) if args.templates else None
        if templates is not None:
            inst.templates = templates
    verdict = detect(inst, **opts)
    out = verdict.to_json()
    if args.trace:
        out = dict(out)
        out["trace"] = _trace_json(verdict.trace, ORDERS[args.order])
        if verdict.answer == YES:
            out["log"] = verdict.log
    print(_dumps(out))
    if verdict.answer == YES:
        return EXIT_YES
    if verdict.answer == NO:
        return EXIT_NO
    return EXIT_LIMIT if verdict.limit_hit else EXIT_UNKNOWN


def cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    try:
        data = json.loads(Path(args.certificate).read_text(encoding="utf-8"))
        cert = Certificate.from_json(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"cannot read certificate {args.certificate}: {exc}") from exc
    if args.budget:
        set_default_budget(args.budget)
    report = verify_certificate(inst.ideal, cert, args.N, args.budget)
    failed = [name for name, entry in report.items() if name != "ok" and not entry["ok"]]
    print(_dumps({"ok": report["ok"], "failed": failed, "report": report}))
    return EXIT_YES if report["ok"] else EXIT_NO


def lattice_report(inst: DetInstance) -> dict:
    """Lattice, elementary divisors and generator count of a binomial instance."""
    I = inst.ideal
    vars = I.vars
    mono = prod(Poly.gens(vars), start=Poly.const(vars, 1))
    L = saturate(I, mono)
    gb = L.groebner()
    if any(len(g.terms) > 2 for g in gb):
        raise InstanceError("the ideal is not binomial on the torus")
    if len(gb) == 1 and gb[0].is_constant():
        raise InstanceError("the ideal has no zeros on the torus")
    lat = lattice_from_polys(list(gb), len(vars))
    divisors = list(lat.divisors)
    nontrivial = sum(1 for x in divisors if x != 1)
    pure = all(sorted(g.terms.values()) == [-1, 1] for g in gb)
    return {
        "lattice": lat.to_json(),
        "divisors": divisors,
        "minimal_s": max(1, nontrivial),
        "torsion_characters": prod(divisors),
        "pure": pure,
        "trivial_group": pure and lat.rank == len(vars) and nontrivial == 0,
    }


def cmd_lattice(args) -> int:
    print(_dumps(lattice_report(read_instance(args.instance))))
    return EXIT_YES


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are input errors, not UNKNOWN
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="orbitclosure", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="decide an instance and print a certificate or a reason")
    det.add_argument("instance")
    det.add_argument("--bound", type=int, help="degree/entry bound b (overrides the file)")
    det.add_argument("--s", type=int, help="number of generators (overrides the file)")
    det.add_argument("--mode", choices=MODES, help="procedure (overrides the file)")
    det.add_argument("--order", choices=sorted(ORDERS), default="grevlex", help="order for printed trace ideals")
    det.add_argument("--verify-N", type=int, default=5, dest="verify_N")
    det.add_argument("--ansatz-deg", type=int, dest="ansatz_deg")
    det.add_argument("--exhaustive-lattices", action="store_true", dest="exhaustive_lattices")
    det.add_argument("--budget", type=int, help="reduction budget per Groebner computation")
    det.add_argument("--templates", help="JSON file of unipotent templates (orbit-commutative)")
    det.add_argument("--search-bound", type=int, default=3, dest="search_bound",
                     help="largest integer tried for free coordinates in the point search")
    det.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; search is sequential")
    det.add_argument("--seed", type=int, default=0, help="accepted for compatibility; the search is deterministic")
    det.add_argument("--trace", action="store_true", help="include intermediate ideals in the output")
    det.set_defaults(func=cmd_detect)

    ver = sub.add_parser("verify", help="re-check a certificate against an instance")
    ver.add_argument("instance")
    ver.add_argument("certificate")
    ver.add_argument("--N", "--verify-N", type=int, default=5, dest="N")
    ver.add_argument("--budget", type=int)
    ver.set_defaults(func=cmd_verify)

    lat = sub.add_parser("lattice", help="report the lattice of a binomial instance")
    lat.add_argument("instance")
    lat.set_defaults(func=cmd_lattice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InstanceError as exc:
        print(_dumps({"error": str(exc)}))
        return EXIT_INPUT
    except ResourceLimit as exc:
        print(_dumps({"answer": "UNKNOWN", "reason": f"resource limit: {exc}"}))
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
