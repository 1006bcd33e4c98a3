"""JSON forms of the library's objects.

Graphs: {"n": 2, "vertices": [...], "edges": [[src, dst, "a"], ...],
"basepoint": 0}. Edge labels are lowercase letters for alphabets of size
at most 26 and plain integers beyond that. Vertex labels round-trip as JSON
scalars; tuple labels (cover sheets, product pairs) are written as nested
lists and frozen back into tuples on read, since JSON has no tuple type.

Hypertournaments: {"L": [2], "universe": [...], "relations": {"2":
[[x, y], ...]}}. Partial map families: [{"map": {"0": "1"}}, ...]; object
keys are always strings in JSON, so keys are matched against the universe
first verbatim and then through a JSON parse (which also restores integer
labels).
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Sequence

from .covers import CoverDescription
from .errors import InputError
from .graphs import (
    LabeledGraph,
    SubgroupGraph,
    core,
    cycle_basis,
    fold,
    make_graph,
    relabel_canonical,
)
from .hypertournaments import (
    ExtensionResult,
    Hypertournament,
    PartialAutomorphismFamily,
    make_family,
    make_hypertournament,
)
from .separability import SeparationWitness


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(x) for x in value)
    return value


def _thaw(value):
    if isinstance(value, tuple):
        return [_thaw(x) for x in value]
    return value


def _order_key(value):
    return (str(type(value)), value)


def letter_text(i: int, n: int) -> str | int:
    if not 1 <= i <= n:
        raise InputError(f"letter {i} out of range 1..{n}")
    if n > 26:
        return i
    return chr(ord("a") + i - 1)


def parse_letter(raw, n: int) -> int:
    if isinstance(raw, bool):
        raise InputError(f"edge label {raw!r} is not a letter")
    if isinstance(raw, int):
        i = raw
    elif isinstance(raw, str) and len(raw) == 1 and "a" <= raw <= "z":
        i = ord(raw) - ord("a") + 1
    elif isinstance(raw, str) and raw.isdigit():
        i = int(raw)
    else:
        raise InputError(f"edge label {raw!r} is not a letter")
    if not 1 <= i <= n:
        raise InputError(f"edge label {raw!r} out of range 1..{n}")
    return i


# -- graphs -------------------------------------------------------------------------


def graph_to_dict(g: LabeledGraph) -> dict:
    out: dict[str, Any] = {
        "n": g.n,
        "vertices": [_thaw(v) for v in g.vertices],
        "edges": [
            [_thaw(u), _thaw(v), letter_text(i, g.n)] for u, v, i in g.sorted_edges
        ],
    }
    if g.basepoint is not None:
        out["basepoint"] = _thaw(g.basepoint)
    return out


def graph_from_dict(d: Mapping) -> LabeledGraph:
    if not isinstance(d, Mapping):
        raise InputError("graph JSON must be an object")
    try:
        n = int(d["n"])
        raw_vertices = list(d["vertices"])
        raw_edges = list(d["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"graph JSON needs n, vertices and edges: {exc}") from exc
    vertices = [_freeze(v) for v in raw_vertices]
    edges = []
    for item in raw_edges:
        if not isinstance(item, Sequence) or len(item) != 3:
            raise InputError(f"edge {item!r} is not a [src, dst, label] triple")
        u, v, lab = item
        edges.append((_freeze(u), _freeze(v), parse_letter(lab, n)))
    bp = _freeze(d["basepoint"]) if d.get("basepoint") is not None else None
    return make_graph(n, vertices, edges, bp)


def subgroup_from_dict(d: Mapping) -> SubgroupGraph:
    """Read a based graph and normalize it into a subgroup graph (fold, take
    the core, relabel); the stored generators are a cycle basis."""
    g = graph_from_dict(d)
    if g.basepoint is None:
        raise InputError("a subgroup graph needs a basepoint")
    cored = relabel_canonical(core(fold(g)))
    return SubgroupGraph(cored, tuple(cycle_basis(cored)))


# -- cocycles -----------------------------------------------------------------------


def cocycle_from_value(base: LabeledGraph, p: int, value) -> CoverDescription:
    """Two accepted shapes: a per-letter object {"a": 1, "b": 0} giving one
    value to every edge with that label, or a per-edge list
    [[[u, v, "a"], 1], ...]. Unmentioned edges get 0."""
    if isinstance(value, Mapping):
        shifts = {}
        for k, v in value.items():
            shifts[parse_letter(k, base.n)] = int(v)
        values = {e: shifts.get(e[2], 0) for e in base.edges}
        return CoverDescription.from_dict(base, p, values)
    if isinstance(value, Sequence) and not isinstance(value, str):
        given = {}
        edge_set = set(base.edges)
        for item in value:
            if not isinstance(item, Sequence) or len(item) != 2:
                raise InputError(f"cocycle entry {item!r} is not an [edge, value] pair")
            raw_edge, val = item
            if not isinstance(raw_edge, Sequence) or len(raw_edge) != 3:
                raise InputError(f"cocycle edge {raw_edge!r} is not a triple")
            e = (
                _freeze(raw_edge[0]),
                _freeze(raw_edge[1]),
                parse_letter(raw_edge[2], base.n),
            )
            if e not in edge_set:
                raise InputError(f"cocycle names a non-edge {raw_edge!r}")
            given[e] = int(val)
        values = {e: given.get(e, 0) for e in base.edges}
        return CoverDescription.from_dict(base, p, values)
    raise InputError("cocycle must be a per-letter object or an [edge, value] list")


def parse_cocycle_text(text: str) -> dict:
    """The command-line form "a=1,b=0" as a per-letter object."""
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise InputError(f"cocycle term {part!r} is not letter=value")
        key, _, val = part.partition("=")
        try:
            out[key.strip()] = int(val)
        except ValueError as exc:
            raise InputError(f"cocycle value {val!r} is not an integer") from exc
    if not out:
        raise InputError("empty cocycle")
    return out


# -- hypertournaments ----------------------------------------------------------------


def hypertournament_to_dict(h: Hypertournament) -> dict:
    relations = {}
    for l, tuples in h.relations:
        rows = sorted(tuples, key=lambda t: tuple(_order_key(x) for x in t))
        relations[str(l)] = [[_thaw(x) for x in t] for t in rows]
    return {
        "L": sorted(h.L),
        "universe": [_thaw(x) for x in h.universe],
        "relations": relations,
    }


def hypertournament_from_dict(d: Mapping) -> Hypertournament:
    if not isinstance(d, Mapping):
        raise InputError("hypertournament JSON must be an object")
    try:
        L = [int(l) for l in d["L"]]
        universe = [_freeze(x) for x in d["universe"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"hypertournament JSON needs L and universe: {exc}") from exc
    relations: dict[int, list] = {}
    raw = d.get("relations") or {}
    if not isinstance(raw, Mapping):
        raise InputError("relations must be an object keyed by arity")
    for key, tuples in raw.items():
        try:
            l = int(key)
        except (TypeError, ValueError) as exc:
            raise InputError(f"relation arity {key!r} is not an integer") from exc
        rows = []
        for t in tuples:
            if not isinstance(t, Sequence) or isinstance(t, str):
                raise InputError(f"relation tuple {t!r} is not a list")
            rows.append(tuple(_freeze(x) for x in t))
        relations[l] = rows
    return make_hypertournament(universe, L, relations)


def _resolve_label(raw, points: set):
    value = _freeze(raw)
    if value in points:
        return value
    if isinstance(raw, str):
        try:
            parsed = _freeze(json.loads(raw))
        except (json.JSONDecodeError, ValueError):
            parsed = None
        if parsed is not None and parsed in points:
            return parsed
    raise InputError(f"label {raw!r} is not in the universe")


def _key_text(value) -> str:
    return value if isinstance(value, str) else json.dumps(_thaw(value))


def family_to_list(p: PartialAutomorphismFamily) -> list:
    return [
        {"map": {_key_text(x): _thaw(y) for x, y in pairs}} for pairs in p.maps
    ]


def family_from_list(host: Hypertournament, items) -> PartialAutomorphismFamily:
    if isinstance(items, Mapping) or isinstance(items, str):
        raise InputError("partial maps JSON must be a list of {\"map\": ...} objects")
    points = set(host.universe)
    maps = []
    for k, item in enumerate(items):
        if not isinstance(item, Mapping) or "map" not in item:
            raise InputError(f"entry {k} must be an object with a map field")
        m = {}
        for src, dst in item["map"].items():
            m[_resolve_label(src, points)] = _resolve_label(dst, points)
        maps.append(m)
    return make_family(host, maps)


# -- witnesses and extensions ---------------------------------------------------------


def witness_to_dict(w: SeparationWitness) -> dict:
    q = w.quotient
    return {
        "order": q.order,
        "degree": q.degree,
        "group": q.name,
        "images": {
            str(letter_text(i + 1, q.n)): list(g) for i, g in enumerate(q.images)
        },
        "subgroup": str(w.subgroup),
        "excluded": str(w.excluded),
        "allowed_primes": (
            sorted(w.allowed_primes) if w.allowed_primes is not None else None
        ),
        "excluded_primes": sorted(w.excluded_primes),
        "transcript": list(w.transcript),
    }


def extension_to_dict(r: ExtensionResult) -> dict:
    return {
        "extended": hypertournament_to_dict(r.extended),
        "embedding": [[_thaw(x), _thaw(v)] for x, v in r.embedding],
        "automorphisms": [
            [[_thaw(u), _thaw(v)] for u, v in pairs] for pairs in r.automorphisms
        ],
        "notes": list(r.notes),
    }


def extension_from_dict(d: Mapping) -> ExtensionResult:
    if not isinstance(d, Mapping):
        raise InputError("extension JSON must be an object")
    try:
        extended = hypertournament_from_dict(d["extended"])
        raw_embedding = list(d["embedding"])
        raw_autos = list(d["automorphisms"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"extension JSON is missing a field: {exc}") from exc
    embedding = []
    for item in raw_embedding:
        if not isinstance(item, Sequence) or len(item) != 2:
            raise InputError(f"embedding entry {item!r} is not a pair")
        embedding.append((_freeze(item[0]), _freeze(item[1])))
    autos = []
    for pairs in raw_autos:
        rows = []
        for item in pairs:
            if not isinstance(item, Sequence) or len(item) != 2:
                raise InputError(f"automorphism entry {item!r} is not a pair")
            rows.append((_freeze(item[0]), _freeze(item[1])))
        autos.append(tuple(sorted(rows, key=lambda kv: _order_key(kv[0]))))
    notes = tuple(str(x) for x in d.get("notes", ()))
    return ExtensionResult(
        extended,
        tuple(sorted(embedding, key=lambda kv: _order_key(kv[0]))),
        tuple(autos),
        notes,
    )
