"""JSON documents for modules, homs, posets and systems, and JSON-ready report fragments.

A document looks like::

    {"schema": 1, "ring": {"modulus": 4},
     "modules": {"A": [[2]], "B": {"factors": [2, 4]}},
     "homs": {"f": {"src": "A", "dst": "B", "matrix": [[0], [2]]}},
     "poset": {"elements": ["a", "b"], "le": [["a", "b"]]},
     "systems": {"S": {"kind": "direct", "assign": {"a": "A", "b": "A"}, "maps": {"a<=b": "id"}}}}

A module is its relation matrix (one row per generator, one column per
relation); ``[]`` is the zero module and ``[[]]`` is Λ.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .diagram import Diagram
from .errors import InputError, ParseError, ValidationError
from .limits import Poset, system_from_generators
from .linalg import IntMatrix
from .modules import FPModule, ModHom, from_factors

SCHEMA = 1


def _scalar(x) -> bool:
    return not isinstance(x, (list, dict))


def _format(obj: Any, depth: int) -> str:
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {_format(v, depth + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(_scalar(x) for x in obj):
            return json.dumps(list(obj), ensure_ascii=False)
        return "[\n" + ",\n".join(inner + _format(x, depth + 1) for x in obj) + "\n" + pad + "]"
    return json.dumps(obj, ensure_ascii=False)


def dumps(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, flat lists on one line."""
    return _format(obj, 0) + "\n"


def digest(text) -> str:
    data = text.encode("utf-8") if isinstance(text, str) else text
    return hashlib.sha256(data).hexdigest()


# -- fragments -----------------------------------------------------------------

def matrix_json(M: IntMatrix, n: int) -> list:
    return [[x % n for x in row] for row in M.tolist()]


def module_json(A: FPModule) -> list:
    return matrix_json(A.relations, A.n)


def module_report(A: FPModule) -> dict:
    return {"factors": list(A.invariant_factors), "order": A.order,
            "generators": A.g, "relations": module_json(A)}


def hom_report(h: ModHom) -> dict:
    return {"src": list(h.src.invariant_factors), "dst": list(h.dst.invariant_factors),
            "matrix": matrix_json(h.matrix, h.n)}


def _matrix_from_json(value, rows: int, cols: int, where: str) -> IntMatrix:
    if not isinstance(value, list) or any(not isinstance(r, list) for r in value):
        raise ValidationError(f"{where}: matrix must be an array of arrays")
    if len(value) != rows or any(len(r) != cols for r in value):
        raise ValidationError(f"{where}: expected a {rows}x{cols} matrix")
    for r in value:
        for x in r:
            if not isinstance(x, int) or isinstance(x, bool):
                raise ValidationError(f"{where}: matrix entries must be integers")
    return IntMatrix(rows, cols, value)


def module_from_json(value, n: int, where: str = "module") -> FPModule:
    if isinstance(value, dict):
        if "factors" in value:
            fac = value["factors"]
            if not isinstance(fac, list) or any(not isinstance(d, int) or isinstance(d, bool) for d in fac):
                raise ValidationError(f"{where}: factors must be a list of integers")
            return from_factors(n, fac)
        if "free" in value:
            rank = value["free"]
            if not isinstance(rank, int) or rank < 0:
                raise ValidationError(f"{where}: free rank must be a non-negative integer")
            return FPModule(n, IntMatrix(rank, 0))
        raise ValidationError(f"{where}: expected a relation matrix, {{'factors': ...}} or {{'free': ...}}")
    if not isinstance(value, list) or any(not isinstance(r, list) for r in value):
        raise ValidationError(f"{where}: relation matrix must be an array of arrays")
    g = len(value)
    r = len(value[0]) if value else 0
    return FPModule(n, _matrix_from_json(value, g, r, where))


# -- documents -------------------------------------------------------------------

def diagram_to_obj(d: Diagram) -> dict:
    n = d.modulus
    obj: dict = {"schema": SCHEMA, "ring": {"modulus": n},
                 "modules": {k: module_json(A) for k, A in d.modules.items()}}
    if d.homs:
        obj["homs"] = {k: {"src": s, "dst": t, "matrix": matrix_json(h.matrix, n)}
                       for k, (h, s, t) in d.homs.items()}
    if d.poset_elements is not None:
        obj["poset"] = {"elements": list(d.poset_elements), "le": [list(p) for p in d.poset_le]}
    if d.systems:
        obj["systems"] = d.systems
    if d.morphisms:
        obj["morphisms"] = d.morphisms
    if d.sequences:
        obj["sequences"] = d.sequences
    if d.args:
        obj["args"] = list(d.args)
    if d.command:
        obj["command"] = d.command
    if d.note:
        obj["note"] = d.note
    return obj


def serialize(d: Diagram) -> str:
    return dumps(diagram_to_obj(d))


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise ValidationError(f"{where}: missing field {key!r}")
    if not isinstance(obj[key], kind):
        raise ValidationError(f"{where}.{key}: wrong type")
    return obj[key]


def parse(text: str) -> Diagram:
    """Parse and validate a document; syntax errors carry line and column."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return diagram_from_obj(obj)


def diagram_from_obj(obj) -> Diagram:
    if not isinstance(obj, dict):
        raise ValidationError("document must be a JSON object")
    if obj.get("schema") != SCHEMA:
        raise ValidationError(f"unsupported schema {obj.get('schema')!r}; expected {SCHEMA}")
    ring = _require(obj, "ring", dict, "document")
    n = _require(ring, "modulus", int, "ring")
    if n < 2:
        raise ValidationError("ring.modulus must be at least 2")
    d = Diagram(n)
    for name, value in sorted(_require(obj, "modules", dict, "document").items()):
        try:
            d.modules[name] = module_from_json(value, n, f"modules.{name}")
        except ValidationError:
            raise
        except InputError as exc:
            raise ValidationError(f"modules.{name}: {exc}") from exc

    def module_ref(name, where):
        if name not in d.modules:
            raise ValidationError(f"{where}: unknown module {name!r}")
        return d.modules[name]

    for name, h in sorted(obj.get("homs", {}).items()):
        where = f"homs.{name}"
        if not isinstance(h, dict):
            raise ValidationError(f"{where}: hom must be an object")
        src = module_ref(_require(h, "src", str, where), where + ".src")
        dst = module_ref(_require(h, "dst", str, where), where + ".dst")
        mat = _matrix_from_json(_require(h, "matrix", list, where), dst.g, src.g, where + ".matrix")
        try:
            hom = ModHom(src, dst, mat)
        except InputError as exc:
            raise ValidationError(f"{where}: {exc}") from exc
        d.homs[name] = (hom, h["src"], h["dst"])

    if "poset" in obj:
        P = obj["poset"]
        if not isinstance(P, dict):
            raise ValidationError("poset must be an object")
        elems = _require(P, "elements", list, "poset")
        if len(set(elems)) != len(elems) or any(not isinstance(e, str) for e in elems):
            raise ValidationError("poset.elements must be distinct strings")
        le = P.get("le", [])
        for pair in le:
            if not (isinstance(pair, list) and len(pair) == 2 and all(p in elems for p in pair)):
                raise ValidationError(f"poset.le: bad pair {pair!r}")
        d.poset_elements = list(elems)
        d.poset_le = [list(p) for p in le]
        resolve_poset(d)

    for name, S in sorted(obj.get("systems", {}).items()):
        where = f"systems.{name}"
        if d.poset_elements is None:
            raise ValidationError(f"{where}: systems need a poset")
        if not isinstance(S, dict):
            raise ValidationError(f"{where}: system must be an object")
        kind = _require(S, "kind", str, where)
        if kind not in ("direct", "inverse"):
            raise ValidationError(f"{where}.kind must be 'direct' or 'inverse'")
        assign = _require(S, "assign", dict, where)
        maps = S.get("maps", {})
        for label in d.poset_elements:
            module_ref(assign.get(label), f"{where}.assign.{label}")
        for key, hname in maps.items():
            if hname not in d.homs:
                raise ValidationError(f"{where}.maps.{key}: unknown hom {hname!r}")
        d.systems[name] = {"kind": kind, "assign": dict(assign), "maps": dict(maps)}
        resolve_system(d, name)

    for name, m in sorted(obj.get("morphisms", {}).items()):
        where = f"morphisms.{name}"
        for key in ("src", "dst"):
            if _require(m, key, str, where) not in d.systems:
                raise ValidationError(f"{where}.{key}: unknown system {m[key]!r}")
        comps = _require(m, "components", dict, where)
        for label, hname in comps.items():
            if hname not in d.homs:
                raise ValidationError(f"{where}.components.{label}: unknown hom {hname!r}")
        d.morphisms[name] = {"src": m["src"], "dst": m["dst"], "components": dict(comps)}

    for i, seq in enumerate(obj.get("sequences", [])):
        where = f"sequences[{i}]"
        if not isinstance(seq, dict):
            raise ValidationError(f"{where}: must be an object")
        for key in ("f", "g"):
            ref = _require(seq, key, str, where)
            if ref not in d.homs and ref not in d.morphisms:
                raise ValidationError(f"{where}.{key}: unknown hom or morphism {ref!r}")
        d.sequences.append({"f": seq["f"], "g": seq["g"]})

    args = obj.get("args", [])
    if not isinstance(args, list) or any(a not in d.modules for a in args):
        raise ValidationError("args must list module names")
    d.args = list(args)
    d.command = obj.get("command")
    d.note = obj.get("note", "")
    return d


def resolve_poset(d: Diagram) -> tuple:
    labels = d.poset_elements
    index = {lab: i for i, lab in enumerate(labels)}
    try:
        poset = Poset.from_pairs(len(labels), [(index[a], index[b]) for a, b in d.poset_le])
    except ValidationError as exc:
        raise ValidationError(f"poset: {exc}") from exc
    return poset, labels


def resolve_system(d: Diagram, name: str):
    """Build the system object; maps may be given on a generating subset of pairs."""
    poset, labels = resolve_poset(d)
    index = {lab: i for i, lab in enumerate(labels)}
    spec = d.systems[name]
    modules = [d.modules[spec["assign"][lab]] for lab in labels]
    covers = {}
    for key, hname in spec["maps"].items():
        if "<=" not in key:
            raise ValidationError(f"systems.{name}.maps: key {key!r} is not of the form 'a<=b'")
        a, b = key.split("<=", 1)
        if a not in index or b not in index:
            raise ValidationError(f"systems.{name}.maps.{key}: unknown node")
        ia, ib = index[a], index[b]
        if ia == ib:
            continue
        if not poset.le(ia, ib):
            raise ValidationError(f"systems.{name}.maps.{key}: nodes are not ordered")
        covers[(ia, ib)] = d.homs[hname][0]
    try:
        return system_from_generators(spec["kind"], poset, modules, covers, labels)
    except (ValidationError, KeyError) as exc:
        raise ValidationError(f"systems.{name}: {exc}") from exc


def resolve_morphism(d: Diagram, name: str) -> tuple:
    _, labels = resolve_poset(d)
    m = d.morphisms[name]
    family = [d.homs[m["components"][lab]][0] for lab in labels]
    return resolve_system(d, m["src"]), resolve_system(d, m["dst"]), family
