"""Command-line front end.

Every subcommand reads a forest document, runs one computation and prints a
:class:`RunReport`, as a text table or as JSON (``--format json``).  Exit
codes: 0 success, 1 domain failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import divisors as dv
from . import forest as fr
from . import glue as gl
from .errors import DomainError, SchemaError
from .lattice import from_order
from .poset import is_order_isomorphism


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    results: Any = None
    failures: list = field(default_factory=list)
    exit_code: int = 0

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "failures": self.failures,
            "exit_code": self.exit_code,
        }


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- helpers ---------------------------------------------------------------


def load_forest(path: str) -> fr.BlowupForest:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    return fr.parse_forest(text)


def parse_ideal(F: fr.BlowupForest, text: str | None) -> fr.Contraction:
    """``p1,p2`` (or ``E[p1],E[p2]``); empty is the identity, missing is the full contraction."""
    if text is None:
        return fr.full(F)
    labels = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if tok.startswith("E[") and tok.endswith("]"):
            tok = tok[2:-1]
        labels.append(tok)
    return fr.contraction(F, labels)


def _e(labels) -> list[str]:
    return [f"E[{x}]" for x in labels]


def _dot(name: str, covers, nodes) -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for v in nodes:
        lines.append(f'  "{v}";')
    for a, b in covers:
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines)


def _ideal_name(labels) -> str:
    return "{" + ",".join(labels) + "}"


def _divisor(F, args) -> dv.DivisorClass:
    return dv.parse_divisor(F, args.divisor, args.basis)


def _fmt(D: dv.DivisorClass, basis: str) -> str:
    return dv.format_divisor(D.in_basis(basis))


def _summand(s: dv.Summand, basis: str) -> dict:
    return {
        "key": None if s.key is None else f"E[{s.key}]",
        "twist": _fmt(s.twist, basis),
        "support": None if s.support is None else _fmt(s.support, basis),
        "shift": s.shift,
    }


# -- subcommands --------------------------------------------------------------


def cmd_validate(F, args, rep):
    rep.results = {
        "nodes": len(F),
        "roots": _e(F.roots),
        "satellites": _e(i for i in F.ids if F.node(i).proximate_to),
        "canonical_code": F.canonical_code(),
    }


def cmd_irr(F, args, rep):
    P = F.irr_poset
    rep.results = {"elements": _e(P.elements), "covers": [_e(c) for c in P.covers()]}
    if args.dot:
        rep.results["dot"] = _dot("irr", [_e(c) for c in P.covers()], _e(P.elements))


def cmd_conn(F, args, rep):
    rep.results = {
        "conn": [{"generator": f"E[{fr.generator(g)}]", "irr": _e(g.irr)} for g in fr.conn(F)]
    }


def cmd_dec(F, args, rep):
    L = fr.dec_lattice(F)
    names = {m: _ideal_name(L.base.labels_of(m)) for m in L.masks}
    covers = [[names[a.mask], names[b.mask]] for a, b in L.covers()]
    rep.results = {"count": len(L), "elements": [names[m] for m in L.masks], "covers": covers}
    if args.dot:
        rep.results["dot"] = _dot("dec", covers, [names[m] for m in L.masks])


def cmd_lattice(F, args, rep):
    """Birkhoff round trips for Dec(f)."""
    L = fr.dec_lattice(F)
    jp = L.join_primes()
    princ = L.principal_map()
    poset_ok = is_order_isomorphism(F.irr_poset, jp, princ)
    LP = L.as_poset()
    L2, iso = from_order(LP.elements, LP.relation())
    Q = L2.base
    lattice_ok = len(L2) == len(L) and all(
        LP.leq(a, b) == L2.leq(iso[a], iso[b]) for a in LP.elements for b in LP.elements
    )
    irr_ok = len(Q) == len(F.irr_poset)
    rep.results = {
        "elements": len(L),
        "join_primes": [_ideal_name(j) for j in jp.elements],
        "poset_roundtrip": poset_ok,
        "lattice_roundtrip": lattice_ok and irr_ok,
    }
    if not poset_ok:
        rep.failures.append("JP(Dec) is not isomorphic to Irr")
    if not (lattice_ok and irr_ok):
        rep.failures.append("ideal lattice of JP(Dec) is not isomorphic to Dec")


def cmd_intersection(F, args, rep):
    N = dv.intersection_matrix(F)
    rep.results = {
        "components": _e(F.ids),
        "proximity": [list(r) for r in dv.proximity_matrix(F)],
        "intersection": [list(r) for r in N],
        "leading_minors": dv.leading_minors(N),
        "negative_definite": dv.is_negative_definite(N),
    }


def cmd_ample(F, args, rep):
    g = parse_ideal(F, args.g)
    D = _divisor(F, args)
    pair = D.pairings()
    rep.results = {
        "divisor": _fmt(D, args.basis),
        "g": _e(g.irr),
        "pairings": {f"E[{i}]": pair[i] for i in F.ids},
        "ample": dv.is_relatively_ample(F, g, D),
    }


def _step(s: dv.DescentStep, basis: str) -> dict:
    return {
        "leaf": f"E[{s.leaf}]",
        "k": s.k,
        "lifted": _fmt(s.lifted, basis),
        "result": _fmt(s.result, basis),
        "remaining": _e(s.remaining.irr),
        "ample": dv.is_relatively_ample(s.result.forest, s.remaining, s.result),
    }


def cmd_descend(F, args, rep):
    g = parse_ideal(F, args.g)
    D = _divisor(F, args)
    leaf = args.leaf
    if leaf is None:
        leaf = next((i for i in g.irr if not F.children(i)), None)
        if leaf is None:
            raise UsageError("nothing to contract: g is the identity")
    elif leaf.startswith("E["):
        leaf = leaf[2:-1]
    rep.results = _step(dv.descend_ample(F, g, D, leaf), args.basis)


def cmd_danilov(F, args, rep):
    D = _divisor(F, args)
    steps = dv.danilov_factorize(F, D)
    rep.results = {
        "divisor": _fmt(D, args.basis),
        "steps": [_step(s, args.basis) for s in steps],
        "center": _e(sorted(fr.danilov_center(F), key=F.index)),
    }
    for i, s in enumerate(rep.results["steps"]):
        if not s["ample"]:
            rep.failures.append(f"ampleness lost after step {i + 1}")


def cmd_multiplicity(F, args, rep):
    """Multiplicities of the base ideal of ``O(-D)``, ``D`` effective."""
    D = _divisor(F, args)
    roots = [args.root[2:-1] if args.root.startswith("E[") else args.root] if args.root else F.roots
    rep.results = {
        "divisor": _fmt(D, args.basis),
        "multiplicity": {f"E[{r}]": dv.multiplicity(F, r, D) for r in roots},
    }


def cmd_generator(F, args, rep):
    g = parse_ideal(F, args.g)
    gen = dv.tilting_generator(F, g, args.variant)
    rep.results = {
        "variant": args.variant,
        "g": _e(g.irr),
        "summands": [_summand(s, args.basis) for s in gen.summands],
    }


def cmd_identities(F, args, rep):
    a = dv.verify_generator_identities(F)
    b = dv.verify_pushforward(F)
    rep.results = {"identities_checked": a.checked, "pushforward_checked": b.checked}
    rep.failures.extend(_jsonable(f) for f in a.failures + b.failures)


def cmd_glue(F, args, rep):
    filt = gl.dec_filtration(F)
    t = gl.parse_tstructure(args.tstructure)
    x = gl.parse_object(args.object or "")
    glued = gl.glue(filt, t)
    low, high = glued.truncate(x, args.m)
    rep.results = {
        "tstructure": gl.format_tstructure(t, filt.slots.elements),
        "object": gl.format_object(x),
        "m": args.m,
        "le": glued.le(x, args.m),
        "ge": glued.ge(x, args.m),
        "heart": glued.in_heart(x),
        "truncation": [gl.format_object(low), gl.format_object(high)],
        "order_independent": gl.verify_linear_extension_independence(filt, t),
    }
    if not rep.results["order_independent"]:
        rep.failures.append("gluing depends on the linear extension")


def cmd_tstructures(F, args, rep):
    filt = gl.dec_filtration(F)
    order = filt.slots.elements
    if args.g is not None:
        gs = [parse_ideal(F, args.g)]
    else:
        gs = fr.dec_elements(F)
    rows = []
    for g in gs:
        t = gl.tstructure_for_element(F, g)
        rows.append({"g": _e(g.irr), "tstructure": gl.format_tstructure(t, order)})
    rep.results = {"tstructures": rows}


def cmd_tilts(F, args, rep):
    r = gl.check_tilt_relations(F)
    rep.results = {"checked": r.checked}
    rep.failures.extend(_jsonable(f) for f in r.failures)


def cmd_simples(F, args, rep):
    g = parse_ideal(F, args.g)
    simples = gl.heart_simples(F, g, args.orientation)
    rep.results = {
        "g": _e(g.irr),
        "orientation": args.orientation,
        "simples": [
            {
                "name": s.name,
                "slot": gl._slot_name(s.slot),
                "shadow": gl.format_object(s.shadow),
                "embedding": s.embedding,
                "quotient_of_O_X": s.quotient_of_structure_sheaf,
                "witness": s.witness,
            }
            for s in simples
        ],
    }
    n_quot = sum(s.quotient_of_structure_sheaf for s in simples)
    if n_quot != 1:
        rep.failures.append(f"{n_quot} simple quotients of O_X, expected 1")


def cmd_check_all(F, args, rep):
    """Every verification suite on one forest."""
    out = {}
    for name, fn in [
        ("lattice", cmd_lattice),
        ("identities", cmd_identities),
        ("tilts", cmd_tilts),
    ]:
        sub = RunReport(name)
        fn(F, args, sub)
        out[name] = {"failures": len(sub.failures)}
        rep.failures.extend(f"{name}: {f}" for f in sub.failures)
    filt = gl.dec_filtration(F)
    conf = dual = simp = 0
    for g in fr.dec_elements(F):
        t = gl.tstructure_for_element(F, g)
        if not gl.verify_linear_extension_independence(filt, t):
            conf += 1
            rep.failures.append(f"confluence: {_ideal_name(g.irr)}")
        bad = gl.check_duality(filt, t)
        if bad:
            dual += 1
            rep.failures.append(f"duality: {_ideal_name(g.irr)}")
        if sum(s.quotient_of_structure_sheaf for s in gl.heart_simples(F, g)) != 1:
            simp += 1
            rep.failures.append(f"simples: {_ideal_name(g.irr)}")
    out["confluence"] = {"failures": conf}
    out["duality"] = {"failures": dual}
    out["simples"] = {"failures": simp}
    D = dv.search_ample_seeds(F)[0]
    steps = dv.danilov_factorize(F, D)
    ok = all(dv.is_relatively_ample(s.result.forest, s.remaining, s.result) for s in steps)
    out["danilov"] = {"seed": dv.format_divisor(D), "steps": len(steps), "failures": 0 if ok else 1}
    if not ok or len(steps) != len(F):
        rep.failures.append("danilov: factorization failed")
    rep.results = out


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    return str(x)


# -- parser -------------------------------------------------------------------

COMMANDS: dict[str, tuple[Callable, str]] = {
    "validate": (cmd_validate, "check a forest document"),
    "irr": (cmd_irr, "component poset Irr(f)"),
    "conn": (cmd_conn, "principal contractions Conn(f)"),
    "dec": (cmd_dec, "lattice of intermediate contractions"),
    "lattice": (cmd_lattice, "Birkhoff round-trip report"),
    "intersection": (cmd_intersection, "proximity and intersection matrices"),
    "ample": (cmd_ample, "relative ampleness of a class"),
    "descend": (cmd_descend, "one ample descent step"),
    "danilov": (cmd_danilov, "full factorization of an ample class"),
    "multiplicity": (cmd_multiplicity, "multiplicities at the roots"),
    "generator": (cmd_generator, "tilting generator summands"),
    "identities": (cmd_identities, "generator class identities"),
    "glue": (cmd_glue, "aisle membership and truncation of an object"),
    "tstructures": (cmd_tstructures, "shift vectors of the Dec(f) system"),
    "tilts": (cmd_tilts, "nesting and naive intersection checks"),
    "simples": (cmd_simples, "simple objects of a heart"),
    "check-all": (cmd_check_all, "run every verification suite"),
}

_DIVISOR_CMDS = {"ample", "descend", "danilov", "multiplicity"}
_G_CMDS = {"ample", "descend", "generator", "tstructures", "simples"}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="declat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (fn, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=fn.__doc__ or help_)
        sp.add_argument("forest", help="forest JSON file, '-' for stdin")
        sp.add_argument("--format", choices=("table", "json"), default="table")
        sp.add_argument("--basis", choices=("strict", "total"), default="strict")
        if name in ("irr", "dec"):
            sp.add_argument("--dot", action="store_true", help="add Graphviz text")
        if name in _DIVISOR_CMDS:
            sp.add_argument("--divisor", required=True, help="e.g. -2*E[p1]-3*E[p2]")
        if name in _G_CMDS:
            sp.add_argument("--g", help="contracted components, e.g. p1,p2 (default: all)")
        if name == "descend":
            sp.add_argument("--leaf", help="component to contract (default: first minimal)")
        if name == "multiplicity":
            sp.add_argument("--root")
        if name == "generator":
            sp.add_argument("--variant", choices=("T", "S"), default="T")
        if name == "glue":
            sp.add_argument("--tstructure", required=True, help="e.g. E[p1]=1,E[p2]=0,Y=0")
            sp.add_argument("--object", help="e.g. E[p1]={0,2},Y={0}")
            sp.add_argument("--m", type=int, default=0)
        if name == "simples":
            sp.add_argument("--orientation", choices=gl.ORIENTATIONS, default="right_dual")
    return p


def _inputs(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "command"}


def run(argv=None) -> RunReport:
    """Parse ``argv``, execute, and return the report (nothing is printed)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return RunReport("usage", {"argv": argv}, None, [str(exc)], 2)
    rep = RunReport(args.command, _inputs(args))
    try:
        F = load_forest(args.forest)
        COMMANDS[args.command][0](F, args, rep)
    except UsageError as exc:
        rep.failures.append(str(exc))
        rep.exit_code = 2
        return rep
    except DomainError as exc:
        rep.failures.append(f"{type(exc).__name__}: {exc}")
    rep.exit_code = 1 if rep.failures else 0
    return rep


def render(rep: RunReport, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(rep.to_dict(), indent=2, sort_keys=True)
    lines = [f"command: {rep.command}"]
    lines += _table(rep.results)
    if rep.failures:
        lines.append(f"failures ({len(rep.failures)}):")
        lines += [f"  {f}" for f in rep.failures]
    lines.append(f"exit: {rep.exit_code}")
    return "\n".join(lines)


def _table(obj, indent: str = "") -> list[str]:
    if obj is None:
        return []
    if not isinstance(obj, dict):
        return [f"{indent}{obj}"]
    out = []
    width = max((len(k) for k in obj), default=0)
    for k, v in obj.items():
        if k == "dot":
            out.append(f"{indent}{k}:")
            out += [f"{indent}  {ln}" for ln in v.splitlines()]
        elif isinstance(v, dict):
            out.append(f"{indent}{k}:")
            out += _table(v, indent + "  ")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            out.append(f"{indent}{k}:")
            for row in v:
                out.append(f"{indent}  - " + "  ".join(f"{a}={_cell(b)}" for a, b in row.items()))
        else:
            out.append(f"{indent}{k.ljust(width)}  {_cell(v)}")
    return out


def _cell(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_cell(x) for x in v) + "]"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def main(argv=None) -> int:
    rep = run(argv)
    fmt = rep.inputs.get("format", "table")
    if rep.exit_code == 2 and rep.command == "usage":
        print(f"declat: error: {rep.failures[0]}", file=sys.stderr)
        build_parser().print_usage(sys.stderr)
        return 2
    print(render(rep, fmt))
    return rep.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
