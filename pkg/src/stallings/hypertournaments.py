"""Hypertournaments, partial automorphisms, and the extension constructor.

For a set L of primes, an L-hypertournament carries one relation of arity l
per l in L such that every l-subset of distinct points supports the relation
in at least one arrangement, and no arrangement has all of its l cyclic
shifts in the relation. A family of partial automorphisms induces a labeled
graph on the universe (one letter per map); when that graph is a subtadpole
(at most one vertex of degree 3, the rest of degree at most 2), every
vertex group is cyclic and the extension problem reduces to separating
finitely many cosets in a finite quotient of the free group on the letters.

Word actions on points compose right to left: ``w(x)`` follows the letters
of w from last to first, each letter moving along (or against) its edge. A
word therefore stabilizes a basepoint exactly when its letter reversal is a
loop in the graph, so vertex groups are read off cycle bases by reversal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .arith import is_prime
from .errors import (
    ForcedCycleError,
    InputError,
    NotInjectiveError,
    NotPartialIsomorphismError,
    NotSubtadpoleError,
    PreconditionError,
    ResourceCapError,
    RootClosureError,
    SearchCapError,
)
from .fiber import is_l_root_closed
from .graphs import LabeledGraph, cycle_basis, make_graph, path_words_from, subgroup_graph
from .separability import (
    Perm,
    p_identity,
    p_mul,
    perm_order,
    separate_coset_system,
)
from .words import Word, empty_word

COSET_CAP = 10_000
TUPLE_CAP = 8_000_000


# -- hypertournaments ---------------------------------------------------------------


@dataclass(frozen=True)
class Hypertournament:
    """Finite L-hypertournament; relations stored per arity."""

    universe: tuple
    L: frozenset
    relations: tuple  # ((l, frozenset of tuples), ...) sorted by l

    def __post_init__(self):
        if len(set(self.universe)) != len(self.universe):
            raise InputError("universe has repeated labels")
        points = set(self.universe)
        arities = [l for l, _ in self.relations]
        if arities != sorted(self.L) or len(set(arities)) != len(arities):
            raise InputError("need exactly one relation per arity in L")
        for l in self.L:
            if not (isinstance(l, int) and is_prime(l)):
                raise InputError(f"arity {l} is not a prime")
        for l, tuples in self.relations:
            for t in tuples:
                if len(t) != l:
                    raise InputError(f"tuple {t} has arity {len(t)}, expected {l}")
                if len(set(t)) != l:
                    raise InputError(f"tuple {t} has repeated entries")
                if not set(t) <= points:
                    raise InputError(f"tuple {t} uses labels outside the universe")

    @cached_property
    def relation_map(self) -> dict:
        return {l: tuples for l, tuples in self.relations}

    def holds(self, t: tuple) -> bool:
        return t in self.relation_map[len(t)]


def make_hypertournament(
    universe: Iterable, L: Iterable[int], relations: Mapping[int, Iterable[tuple]]
) -> Hypertournament:
    L = frozenset(L)
    extra = set(relations) - L
    if extra:
        raise InputError(f"relations given for arities {sorted(extra)} outside L")
    universe = _canonical_universe(universe)
    rels = tuple(
        (l, frozenset(tuple(t) for t in relations.get(l, ())))
        for l in sorted(L)
    )
    return Hypertournament(universe, L, rels)


def _label_key(v):
    return (str(type(v)), v)


def _canonical_universe(universe: Iterable) -> tuple:
    labels = list(universe)
    try:
        return tuple(sorted(set(labels), key=_label_key))
    except TypeError as exc:
        raise InputError("universe labels must be mutually orderable") from exc


def _shifts(t: tuple) -> list[tuple]:
    return [t[i:] + t[:i] for i in range(len(t))]


@dataclass(frozen=True)
class Violation:
    """Certificate for a failed hypertournament invariant."""

    kind: str  # "unoriented" or "cycle"
    l: int
    witness: tuple


def validate(h: Hypertournament) -> tuple[bool, Violation | None]:
    """Check both defining conditions exhaustively.

    Orientation existence needs one related arrangement per l-subset; the
    cycle condition forbids any arrangement whose l cyclic shifts all lie in
    the relation (quantifying over permuted copies of the relation adds
    nothing beyond shift classes, so this scan is complete).
    """
    for l in sorted(h.L):
        tuples = h.relation_map[l]
        for t in tuples:
            if all(s in tuples for s in _shifts(t)):
                return False, Violation("cycle", l, t)
        if len(h.universe) < l:
            continue
        for subset in itertools.combinations(h.universe, l):
            if not any(
                perm in tuples for perm in itertools.permutations(subset)
            ):
                return False, Violation("unoriented", l, subset)
    return True, None


# -- partial automorphism families --------------------------------------------------


@dataclass(frozen=True)
class PartialAutomorphismFamily:
    """Injective partial maps on a hypertournament, each preserving and
    reflecting every relation on tuples inside its domain."""

    host: Hypertournament
    maps: tuple  # one tuple of sorted (x, y) pairs per map

    def __post_init__(self):
        points = set(self.host.universe)
        for index, pairs in enumerate(self.maps):
            seen_src: set = set()
            seen_dst: set = set()
            for x, y in pairs:
                if x not in points or y not in points:
                    raise InputError(f"map {index} uses labels outside the universe")
                if x in seen_src:
                    raise InputError(f"map {index} defines {x!r} twice")
                if y in seen_dst:
                    raise NotInjectiveError(
                        f"map {index} sends two points to {y!r}", map_index=index
                    )
                seen_src.add(x)
                seen_dst.add(y)
        for index in range(len(self.maps)):
            bad = self._iso_violation(index)
            if bad is not None:
                t, image = bad
                raise NotPartialIsomorphismError(
                    f"map {index} does not respect the relation on {t}",
                    map_index=index,
                    tuple=t,
                    image=image,
                )

    def _iso_violation(self, index: int):
        m = dict(self.maps[index])
        dom = sorted(m, key=lambda v: (str(type(v)), v))
        for l in sorted(self.host.L):
            if len(dom) < l:
                continue
            for t in itertools.permutations(dom, l):
                image = tuple(m[x] for x in t)
                if self.host.holds(t) != self.host.holds(image):
                    return t, image
        return None

    @cached_property
    def map_dicts(self) -> tuple:
        return tuple(dict(pairs) for pairs in self.maps)


def make_family(
    host: Hypertournament, maps: Sequence[Mapping]
) -> PartialAutomorphismFamily:
    canonical = tuple(
        tuple(sorted(m.items(), key=lambda kv: (str(type(kv[0])), kv[0])))
        for m in maps
    )
    return PartialAutomorphismFamily(host, canonical)


def family_graph(p: PartialAutomorphismFamily) -> LabeledGraph:
    """One letter per partial map, one edge x -> map(x) per defined point."""
    edges = []
    for index, pairs in enumerate(p.maps):
        for x, y in pairs:
            edges.append((x, y, index + 1))
    g = make_graph(max(len(p.maps), 1), p.host.universe, edges)
    assert g.is_immersed, "injective maps always induce an immersed graph"
    return g


def is_subtadpole(g: LabeledGraph) -> bool:
    degree_three = 0
    for d in g.degrees.values():
        if d > 3:
            return False
        if d == 3:
            degree_three += 1
    return degree_three <= 1


# -- orbit structures ---------------------------------------------------------------


def _tuple_orbit(t: tuple, forward: list[dict], backward: list[dict]) -> frozenset:
    seen = {t}
    frontier = [t]
    while frontier:
        nxt = []
        for cur in frontier:
            for step in (*forward, *backward):
                if all(x in step for x in cur):
                    img = tuple(step[x] for x in cur)
                    if img not in seen:
                        seen.add(img)
                        nxt.append(img)
        frontier = nxt
    return frozenset(seen)


def orbit_structure(
    universe: Iterable,
    generators: Sequence[Mapping],
    L: Iterable[int],
    seeds: Mapping[int, Iterable[tuple]] | None = None,
) -> Hypertournament:
    """An L-hypertournament on the set, invariant under the partial action.

    Seed tuples are first closed under the action orbit by orbit; remaining
    l-subsets then receive the lexicographically least arrangement whose
    orbit closes no cycle. An l-subset all of whose arrangements force a
    cycle signals a root-closure failure in the acting group.
    """
    universe = _canonical_universe(universe)
    L = frozenset(L)
    for l in L:
        if not is_prime(l):
            raise InputError(f"arity {l} is not a prime")
    position = {v: i for i, v in enumerate(universe)}
    forward = [dict(g) for g in generators]
    for g in forward:
        for x, y in g.items():
            if x not in position or y not in position:
                raise InputError("generator moves labels outside the universe")
        if len(set(g.values())) != len(g):
            raise NotInjectiveError("generator is not injective")
    backward = [{y: x for x, y in g.items()} for g in forward]
    if L and len(universe) ** max(L) > TUPLE_CAP:
        raise ResourceCapError(
            f"{len(universe)} points at arity {max(L)} exceeds the tuple cap"
        )

    relations: dict[int, set] = {}
    for l in sorted(L):
        positive: set = set()

        def closes_cycle(orbit) -> bool:
            for t in orbit:
                if all(s in positive or s in orbit for s in _shifts(t)):
                    return True
            return False

        for seed in (seeds or {}).get(l, ()):  # carry over given relations
            seed = tuple(seed)
            if len(seed) != l or len(set(seed)) != l:
                raise InputError(f"seed {seed} is not an arity-{l} tuple of distinct points")
            if not set(seed) <= set(universe):
                raise InputError(f"seed {seed} uses labels outside the universe")
            if seed in positive:
                continue
            orbit = _tuple_orbit(seed, forward, backward)
            if closes_cycle(orbit):
                raise ForcedCycleError(
                    f"the orbit of seed {seed} closes a cycle at arity {l}",
                    orbit_representative=seed,
                    l=l,
                )
            positive |= orbit
        if len(universe) >= l:
            for subset in itertools.combinations(universe, l):
                if any(p in positive for p in itertools.permutations(subset)):
                    continue
                chosen = None
                for arrangement in itertools.permutations(subset):
                    orbit = _tuple_orbit(arrangement, forward, backward)
                    if not closes_cycle(orbit):
                        chosen = orbit
                        break
                if chosen is None:
                    raise ForcedCycleError(
                        f"every arrangement of {subset} closes a cycle at arity {l}",
                        orbit_representative=subset,
                        l=l,
                    )
                positive |= chosen
        relations[l] = positive
    return make_hypertournament(universe, L, relations)


# -- the extension constructor ------------------------------------------------------


@dataclass(frozen=True)
class ExtensionResult:
    extended: Hypertournament
    embedding: tuple  # sorted (point, extended-point) pairs
    automorphisms: tuple  # one permutation dict (as sorted pairs) per input map
    notes: tuple = field(default=())

    @cached_property
    def embedding_map(self) -> dict:
        return dict(self.embedding)

    @cached_property
    def automorphism_maps(self) -> tuple:
        return tuple(dict(pairs) for pairs in self.automorphisms)


def _connect_family(
    p: PartialAutomorphismFamily,
) -> tuple[tuple, tuple[str, ...]]:
    """Extended map list whose graph is connected, plus notes on what was
    added. Components are chained end to end through low-degree vertices,
    with the unique cyclic or branched component (if any) attached last."""
    maps = [dict(pairs) for pairs in p.maps]
    notes: list[str] = []
    while True:
        g = _graph_of(maps, p.host.universe)
        comps = g.component_lists
        if len(comps) <= 1:
            break
        special = []
        plain = []
        for comp in comps:
            edges = sum(1 for e in g.edges if e[0] in comp)
            has_cycle = edges >= len(comp)
            has_branch = any(g.degrees[v] >= 3 for v in comp)
            (special if has_cycle or has_branch else plain).append(comp)
        if len(special) > 1:
            raise NotSubtadpoleError(
                "multiple components with cycles or branch vertices cannot be "
                "joined while keeping every vertex group cyclic"
            )
        # with at most one special component and >= 2 components total, the
        # first chain element is always a line or a point
        order = plain + special
        a, b = order[0], order[1]
        u = min((x for x in a if g.degrees[x] <= 1), key=_label_key)
        v = min(
            (x for x in b if g.degrees[x] <= 1),
            key=_label_key,
            default=min(b, key=_label_key),
        )
        added = False
        if maps:
            last = maps[-1]
            for src, dst in ((u, v), (v, u)):
                if src in last or dst in set(last.values()):
                    continue
                candidate = dict(last)
                candidate[src] = dst
                if _is_partial_iso(p.host, candidate):
                    maps[-1] = candidate
                    notes.append(f"extended map {len(maps) - 1} by {src!r} -> {dst!r}")
                    added = True
                    break
        if not added:
            maps.append({u: v})
            notes.append(f"added connector map {len(maps) - 1}: {u!r} -> {v!r}")
    return tuple(tuple(sorted(m.items(), key=lambda kv: (str(type(kv[0])), kv[0]))) for m in maps), tuple(notes)


def _graph_of(maps: Sequence[Mapping], universe) -> LabeledGraph:
    edges = []
    for index, m in enumerate(maps):
        for x, y in m.items():
            edges.append((x, y, index + 1))
    return make_graph(max(len(maps), 1), universe, edges)


def _is_partial_iso(host: Hypertournament, m: Mapping) -> bool:
    dom = sorted(m, key=lambda v: (str(type(v)), v))
    if len(set(m.values())) != len(m):
        return False
    for l in sorted(host.L):
        if len(dom) < l:
            continue
        for t in itertools.permutations(dom, l):
            if host.holds(t) != host.holds(tuple(m[x] for x in t)):
                return False
    return True


def eppa_extend(
    m: Hypertournament,
    p: PartialAutomorphismFamily,
    bound: int = 500_000,
    seed: int = 0,
) -> ExtensionResult:
    """Extend every partial map of a subtadpole family to an automorphism of
    a finite hypertournament containing m.

    The universe of the extension is a coset space of the free group on the
    letters: with basepoint stabilizer H and a finite quotient separating
    the required cosets (kernel J), the point set is F/HJ. Relations are
    carried over orbit-wise and completed; every postcondition is
    re-verified before returning.
    """
    if p.host != m:
        raise InputError("family is not over the given hypertournament")
    if not m.L:
        raise InputError("L must be a nonempty set of primes")
    ok, violation = validate(m)
    if not ok:
        raise PreconditionError(
            f"input is not a hypertournament: {violation.kind} at {violation.witness}",
            violation=violation,
        )
    if not any(p.maps):
        identity = tuple((x, x) for x in m.universe)
        autos = tuple(identity for _ in p.maps)
        result = ExtensionResult(m, identity, autos, ("family has no defined pairs",))
        assert verify_extension(result, m, p)
        return result

    g0 = family_graph(p)
    if not is_subtadpole(g0):
        raise NotSubtadpoleError("family graph has too many branch vertices")
    maps, notes = _connect_family(p)
    map_dicts = [dict(pairs) for pairs in maps]
    graph = _graph_of(map_dicts, m.universe)
    if not is_subtadpole(graph):
        raise NotSubtadpoleError("connecting the family graph broke the subtadpole shape")
    assert graph.is_connected
    k = max(len(maps), 1)

    base = min(m.universe, key=lambda v: (str(type(v)), v))
    paths = path_words_from(graph, base)
    w = {x: paths[x].reversed() for x in m.universe}

    loops = cycle_basis(graph, base)
    assert len(loops) <= 1, "a connected subtadpole has cyclic vertex groups"
    h0 = loops[0].reversed() if loops else None

    if h0 is not None:
        sub = subgroup_graph([h0], k)
        for l in sorted(m.L):
            res = is_l_root_closed(sub, l)
            if not res.closed:
                raise RootClosureError(
                    f"the basepoint stabilizer is not closed under {l}-th roots",
                    witness=res.witness,
                    l=l,
                )

    empty = empty_word(k)
    constraints = []
    labels: list[tuple] = []
    points = sorted(m.universe, key=lambda v: (str(type(v)), v))
    for x, y in itertools.combinations(points, 2):
        constraints.append(
            ((w[x].inverse() * w[y], h0), (empty, h0))
        )
        labels.append(("embedding", x, y))
    for l in sorted(m.L):
        tuples = m.relation_map[l]
        if len(points) < l:
            continue
        for zs in itertools.permutations(points, l):
            if zs in tuples:
                continue
            for ys in sorted(tuples):
                clause = tuple(
                    (
                        w[z] * w[y].inverse(),
                        w[y] * h0 * w[y].inverse() if h0 is not None else None,
                    )
                    for y, z in zip(ys, zs)
                )
                constraints.append(clause)
                labels.append(("relation", ys, zs))

    try:
        q = separate_coset_system(constraints, m.L, bound, seed)
    except SearchCapError as exc:
        index = exc.details.get("constraint_index")
        if index is not None and index < len(labels):
            raise SearchCapError(
                f"no quotient separates {labels[index]}",
                constraint_index=index,
                label=labels[index],
            ) from exc
        raise

    # enumerate the coset space by a Schreier walk from the identity coset;
    # the full quotient group is never listed
    stab = q.cyclic_image(h0)

    def canon(perm: Perm) -> Perm:
        return min(p_mul(perm, s) for s in stab)

    start = canon(p_identity(q.degree))
    coset_of: dict[Perm, int] = {start: 0}
    reps: list[Perm] = [start]
    steps = list(q.images) + list(q.inverse_images)
    frontier = [start]
    while frontier:
        nxt = []
        for r0 in frontier:
            for g in steps:
                c = canon(p_mul(g, r0))
                if c not in coset_of:
                    if len(reps) >= COSET_CAP:
                        raise ResourceCapError(
                            f"coset space exceeds {COSET_CAP} points",
                            attempted_index=len(reps) + 1,
                        )
                    coset_of[c] = len(reps)
                    reps.append(c)
                    nxt.append(c)
        frontier = nxt

    def coset(perm: Perm) -> int:
        return coset_of[canon(perm)]

    actions = []
    for i in range(k):
        img = q.images[i]
        actions.append({j: coset(p_mul(img, reps[j])) for j in range(len(reps))})

    embed = {x: coset(q.evaluate(w[x])) for x in points}
    if len(set(embed.values())) != len(points):
        raise AssertionError("separation verified but the embedding is not injective")
    for i, mp in enumerate(map_dicts):
        for x, y in mp.items():
            assert actions[i][embed[x]] == embed[y], "action fails to extend a map"

    # no element of the acting group has order divisible by any l: its order
    # divides the certified quotient order, a product of prime powers away
    # from L; the letter actions are checked directly as well
    for l in sorted(m.L):
        assert q.order % l, "quotient order admits an excluded prime"
        for act in actions:
            perm = tuple(act[j] for j in range(len(reps)))
            if perm_order(perm) % l == 0:
                raise AssertionError(f"letter action has order divisible by {l}")

    seeds = {
        l: [tuple(embed[y] for y in ys) for ys in sorted(m.relation_map[l])]
        for l in sorted(m.L)
    }
    extended = orbit_structure(range(len(reps)), actions, m.L, seeds)

    back = {v: x for x, v in embed.items()}
    for l in sorted(m.L):
        for t in itertools.permutations(sorted(embed.values()), l):
            inside = extended.holds(t)
            original = tuple(back[v] for v in t) in m.relation_map[l]
            assert inside == original, (
                "relation extension altered the embedded structure; the coset "
                "separation cannot have held"
            )

    embedding = tuple(sorted(embed.items(), key=lambda kv: (str(type(kv[0])), kv[0])))
    autos = tuple(
        tuple(sorted(actions[i].items())) for i in range(len(p.maps))
    )
    result = ExtensionResult(extended, embedding, autos, notes)
    assert verify_extension(result, m, p), "extension failed its own audit"
    return result


def verify_extension(
    r: ExtensionResult, m: Hypertournament, p: PartialAutomorphismFamily
) -> bool:
    """Re-check every claimed property from scratch; False on the first
    violation, never an exception."""
    try:
        ext = r.extended
        if not validate(ext)[0] or ext.L != m.L:
            return False
        e = r.embedding_map
        if set(e) != set(m.universe) or len(set(e.values())) != len(e):
            return False
        if not set(e.values()) <= set(ext.universe):
            return False
        for l in sorted(m.L):
            for t in itertools.permutations(m.universe, l):
                if m.holds(t) != ext.holds(tuple(e[x] for x in t)):
                    return False
        if len(r.automorphisms) != len(p.maps):
            return False
        for auto, pairs in zip(r.automorphism_maps, p.maps):
            if set(auto) != set(ext.universe):
                return False
            if set(auto.values()) != set(ext.universe):
                return False
            for l in sorted(m.L):
                tuples = ext.relation_map[l]
                if frozenset(tuple(auto[x] for x in t) for t in tuples) != tuples:
                    return False
            for x, y in pairs:
                if auto[e[x]] != e[y]:
                    return False
        return True
    except (KeyError, InputError):
        return False
