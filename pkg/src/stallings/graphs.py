"""Edge-labeled directed graphs, Stallings folding, and subgroup graphs.

A :class:`LabeledGraph` has edges labeled by letters ``1..n`` and represents,
when immersed (at most one in-edge and one out-edge per letter per vertex),
a family of n partial injections of its vertex set. A based connected core
immersed graph is the canonical representative of a finitely generated
subgroup of the free group F_n; words are read left-to-right along edges
(letter ``i`` follows the out-edge labeled i, letter ``-i`` walks an in-edge
backwards).

Edges are a *set* of (src, dst, letter) triples: parallel edges with equal
endpoints and equal label coincide, which is harmless because folding would
identify them immediately anyway.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import InputError, PreconditionError
from .words import Word, empty_word, reduce

Vertex = Hashable
Edge = tuple[Vertex, Vertex, int]


def _signed_letters(n: int) -> list[int]:
    """Deterministic traversal order: +1, -1, +2, -2, ..."""
    out = []
    for i in range(1, n + 1):
        out.append(i)
        out.append(-i)
    return out


@dataclass(frozen=True)
class LabeledGraph:
    n: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    basepoint: Vertex | None = None

    def __post_init__(self):
        if self.n < 0:
            raise InputError("alphabet size must be >= 0")
        seen = set(self.vertices)
        if len(seen) != len(self.vertices):
            raise InputError("duplicate vertex ids")
        for u, v, i in self.edges:
            if u not in seen or v not in seen:
                raise InputError(f"edge ({u!r}, {v!r}, {i}) uses unknown vertex")
            if not 1 <= i <= self.n:
                raise InputError(f"edge label {i} out of range 1..{self.n}")
        if self.basepoint is not None and self.basepoint not in seen:
            raise InputError(f"basepoint {self.basepoint!r} is not a vertex")

    # -- derived views (cached; the dataclass itself stays immutable) -------

    @cached_property
    def vertex_index(self) -> dict[Vertex, int]:
        return {v: k for k, v in enumerate(self.vertices)}

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        ix = self.vertex_index
        return tuple(sorted(self.edges, key=lambda e: (ix[e[0]], ix[e[1]], e[2])))

    @cached_property
    def is_immersed(self) -> bool:
        out_seen: set[tuple[Vertex, int]] = set()
        in_seen: set[tuple[Vertex, int]] = set()
        for u, v, i in self.edges:
            if (u, i) in out_seen or (v, i) in in_seen:
                return False
            out_seen.add((u, i))
            in_seen.add((v, i))
        return True

    @cached_property
    def steps(self) -> dict[tuple[Vertex, int], Vertex]:
        """Partial transition map (vertex, signed letter) -> vertex."""
        if not self.is_immersed:
            raise PreconditionError("graph is not immersed")
        table: dict[tuple[Vertex, int], Vertex] = {}
        for u, v, i in self.edges:
            table[(u, i)] = v
            table[(v, -i)] = u
        return table

    @cached_property
    def letter_maps(self) -> dict[int, dict[Vertex, Vertex]]:
        """Per-letter partial injections (immersed graphs only)."""
        if not self.is_immersed:
            raise PreconditionError("graph is not immersed")
        maps: dict[int, dict[Vertex, Vertex]] = {i: {} for i in range(1, self.n + 1)}
        for u, v, i in self.edges:
            maps[i][u] = v
        return maps

    @cached_property
    def neighbors(self) -> dict[Vertex, tuple[tuple[Vertex, int], ...]]:
        """Undirected adjacency with signed letters, in traversal order."""
        adj: dict[Vertex, list[tuple[Vertex, int]]] = {v: [] for v in self.vertices}
        for u, v, i in self.sorted_edges:
            adj[u].append((v, i))
            adj[v].append((u, -i))
        order = {t: k for k, t in enumerate(_signed_letters(self.n))}
        ix = self.vertex_index
        return {
            v: tuple(sorted(lst, key=lambda p: (order[p[1]], ix[p[0]])))
            for v, lst in adj.items()
        }

    @cached_property
    def degrees(self) -> dict[Vertex, int]:
        deg = {v: 0 for v in self.vertices}
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def edge_count(self, letter: int | None = None) -> int:
        if letter is None:
            return len(self.edges)
        return sum(1 for e in self.edges if e[2] == letter)

    # -- components ----------------------------------------------------------

    @cached_property
    def component_lists(self) -> tuple[tuple[Vertex, ...], ...]:
        seen: set[Vertex] = set()
        comps: list[tuple[Vertex, ...]] = []
        for start in self.vertices:
            if start in seen:
                continue
            order = [start]
            seen.add(start)
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w, _ in self.neighbors[v]:
                    if w not in seen:
                        seen.add(w)
                        order.append(w)
                        queue.append(w)
            comps.append(tuple(order))
        return tuple(comps)

    @cached_property
    def is_connected(self) -> bool:
        return len(self.component_lists) <= 1

    def component_of(self, v: Vertex) -> tuple[Vertex, ...]:
        for comp in self.component_lists:
            if v in comp:
                return comp
        raise InputError(f"{v!r} is not a vertex")

    def restrict(
        self, keep: Iterable[Vertex], basepoint: Vertex | None = None
    ) -> "LabeledGraph":
        keep_set = set(keep)
        verts = tuple(v for v in self.vertices if v in keep_set)
        edges = tuple(
            e for e in self.sorted_edges if e[0] in keep_set and e[1] in keep_set
        )
        return LabeledGraph(self.n, verts, edges, basepoint)


def make_graph(
    n: int,
    vertices: Sequence[Vertex],
    edges: Iterable[tuple[Vertex, Vertex, int]],
    basepoint: Vertex | None = None,
) -> LabeledGraph:
    """Normalize and build: dedup vertices (order kept) and edges (sorted)."""
    verts = tuple(dict.fromkeys(vertices))
    ix = {v: k for k, v in enumerate(verts)}
    dedup = sorted(
        {(u, v, int(i)) for (u, v, i) in edges},
        key=lambda e: (ix.get(e[0], -1), ix.get(e[1], -1), e[2]),
    )
    return LabeledGraph(n, verts, tuple(dedup), basepoint)


def wedge_graph(n: int) -> LabeledGraph:
    """The wedge of n circles: one vertex, one loop per letter."""
    return make_graph(n, [0], [(0, 0, i) for i in range(1, n + 1)], basepoint=0)


# -- folding ------------------------------------------------------------------


class _DSU:
    def __init__(self, items: Sequence[Vertex], rank_of: Mapping[Vertex, int]):
        self.parent = {v: v for v in items}
        self.rank_of = rank_of  # deterministic representative: smallest rank wins

    def find(self, v: Vertex) -> Vertex:
        p = self.parent
        root = v
        while p[root] != root:
            root = p[root]
        while p[v] != root:
            p[v], v = root, p[v]
        return root

    def union(self, a: Vertex, b: Vertex) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank_of[rb] < self.rank_of[ra]:
            ra, rb = rb, ra
        self.parent[rb] = ra


def fold(g: LabeledGraph) -> LabeledGraph:
    """Stallings folding: merge equal-label edges sharing a source or a target
    until the graph is immersed. The image of pi_1 in F_n is unchanged."""
    dsu = _DSU(g.vertices, g.vertex_index)
    edges = list(g.sorted_edges)
    while True:
        out: dict[tuple[Vertex, int], Vertex] = {}
        inn: dict[tuple[Vertex, int], Vertex] = {}
        merge: tuple[Vertex, Vertex] | None = None
        for u, v, i in edges:
            ru, rv = dsu.find(u), dsu.find(v)
            prev = out.get((ru, i))
            if prev is not None and prev != rv:
                merge = (prev, rv)
                break
            out[(ru, i)] = rv
            prev = inn.get((rv, i))
            if prev is not None and prev != ru:
                merge = (prev, ru)
                break
            inn[(rv, i)] = ru
        if merge is None:
            break
        dsu.union(*merge)
    verts = tuple(dict.fromkeys(dsu.find(v) for v in g.vertices))
    folded = {(dsu.find(u), dsu.find(v), i) for u, v, i in edges}
    bp = dsu.find(g.basepoint) if g.basepoint is not None else None
    return make_graph(g.n, verts, folded, bp)


def core(g: LabeledGraph) -> LabeledGraph:
    """Restrict to the basepoint component and strip degree-1 vertices other
    than the basepoint, repeatedly."""
    if g.basepoint is None:
        raise PreconditionError("core reduction needs a basepoint")
    cur = g.restrict(g.component_of(g.basepoint), g.basepoint)
    while True:
        leaves = [
            v for v in cur.vertices if v != cur.basepoint and cur.degrees[v] <= 1
        ]
        if not leaves:
            return cur
        drop = set(leaves)
        cur = cur.restrict(
            (v for v in cur.vertices if v not in drop), cur.basepoint
        )


def is_core(g: LabeledGraph) -> bool:
    """No vertex of degree <= 1 except possibly the basepoint."""
    return all(
        g.degrees[v] > 1 for v in g.vertices if v != g.basepoint
    )


def relabel_canonical(g: LabeledGraph) -> LabeledGraph:
    """Rename vertices 0..V-1 in deterministic traversal order from the
    basepoint (connected based immersed graphs only)."""
    if g.basepoint is None or not g.is_connected:
        raise PreconditionError("canonical relabeling needs a connected based graph")
    if not g.is_immersed:
        raise PreconditionError("canonical relabeling needs an immersed graph")
    number: dict[Vertex, int] = {g.basepoint: 0}
    queue = deque([g.basepoint])
    while queue:
        v = queue.popleft()
        for t in _signed_letters(g.n):
            w = g.steps.get((v, t))
            if w is not None and w not in number:
                number[w] = len(number)
                queue.append(w)
    verts = tuple(range(len(number)))
    edges = [(number[u], number[v], i) for u, v, i in g.edges]
    return make_graph(g.n, verts, edges, 0)


def canonical_form(g: LabeledGraph) -> tuple:
    """A complete label-isomorphism invariant of a connected based immersed
    graph (traversal from the basepoint is unique in an immersed graph)."""
    h = relabel_canonical(g)
    return (h.n, len(h.vertices), h.sorted_edges)


# -- subgroup graphs -----------------------------------------------------------


@dataclass(frozen=True)
class SubgroupGraph:
    """Core based immersed graph of the subgroup generated by ``generators``."""

    graph: LabeledGraph
    generators: tuple[Word, ...]

    def __post_init__(self):
        g = self.graph
        if g.basepoint is None:
            raise InputError("subgroup graph needs a basepoint")
        if not g.is_immersed:
            raise InputError("subgroup graph must be immersed")
        if not g.is_connected:
            raise InputError("subgroup graph must be connected")
        if not is_core(g):
            raise InputError("subgroup graph must be core")
        for w in self.generators:
            if trace(g, g.basepoint, w) != g.basepoint:
                raise InputError(f"generator {w} is not a loop at the basepoint")

    @property
    def n(self) -> int:
        return self.graph.n

    def contains(self, w: Word) -> bool:
        return contains(self, w)

    def rank(self) -> int:
        return rank(self.graph)


def subgroup_graph(gens: Sequence[Word], n: int) -> SubgroupGraph:
    """Fold the wedge of generator loops into the core subgroup graph."""
    gens = tuple(gens)
    for w in gens:
        if w.n > n:
            raise InputError(f"generator {w} uses letters beyond alphabet size {n}")
    vertices: list[Vertex] = [0]
    edges: list[Edge] = []
    fresh = 1
    for w in gens:
        letters = w.letters
        if not letters:
            continue
        prev = 0
        for k, t in enumerate(letters):
            nxt = 0 if k == len(letters) - 1 else fresh
            if nxt != 0:
                vertices.append(nxt)
                fresh += 1
            if t > 0:
                edges.append((prev, nxt, t))
            else:
                edges.append((nxt, prev, -t))
            prev = nxt
    raw = make_graph(n, vertices, edges, basepoint=0)
    cored = core(fold(raw))
    return SubgroupGraph(relabel_canonical(cored), gens)


# -- reading words --------------------------------------------------------------


def trace(
    g: LabeledGraph | SubgroupGraph, v: Vertex, w: Word
) -> Vertex | None:
    """Endpoint of the path reading w from v, or None if the path leaves the
    graph. Words are read left-to-right; negative letters walk edges backwards."""
    if isinstance(g, SubgroupGraph):
        g = g.graph
    if v not in g.vertex_index:
        raise InputError(f"{v!r} is not a vertex")
    steps = g.steps
    for t in w:
        v = steps.get((v, t))
        if v is None:
            return None
    return v


def contains(h: SubgroupGraph | LabeledGraph, w: Word) -> bool:
    """Membership: w is in the subgroup iff its reduced word is a loop at the
    basepoint."""
    g = h.graph if isinstance(h, SubgroupGraph) else h
    if g.basepoint is None:
        raise PreconditionError("membership needs a based graph")
    return trace(g, g.basepoint, w) == g.basepoint


def path_words_from(g: LabeledGraph, start: Vertex) -> dict[Vertex, Word]:
    """Shortest path words from ``start`` to every reachable vertex (BFS in
    deterministic letter order; words are reduced since BFS paths do not
    backtrack in an immersed graph)."""
    words: dict[Vertex, Word] = {start: empty_word(g.n)}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for t in _signed_letters(g.n):
            w = g.steps.get((v, t))
            if w is not None and w not in words:
                words[w] = Word(words[v].letters + (t,), g.n)
                queue.append(w)
    return words


# -- bases and ranks -------------------------------------------------------------


def spanning_tree(
    g: LabeledGraph, root: Vertex
) -> tuple[set[Edge], dict[Vertex, Word]]:
    """BFS spanning tree of root's component: (tree edge set, path words)."""
    words: dict[Vertex, Word] = {root: empty_word(g.n)}
    tree: set[Edge] = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for t in _signed_letters(g.n):
            w = g.steps.get((v, t))
            if w is not None and w not in words:
                words[w] = Word(words[v].letters + (t,), g.n)
                tree.add((v, w, t) if t > 0 else (w, v, -t))
                queue.append(w)
    return tree, words


def cycle_basis(g: LabeledGraph, v: Vertex | None = None) -> list[Word]:
    """Free generating set of pi_1(g, v): one loop word per non-tree edge.

    Requires a connected immersed graph; |result| = E - V + 1.
    """
    if v is None:
        v = g.basepoint
    if v is None:
        raise PreconditionError("cycle basis needs a basepoint")
    if not g.is_connected:
        raise InputError("cycle basis needs a connected graph")
    tree, words = spanning_tree(g, v)
    basis = []
    for u, w, i in g.sorted_edges:
        if (u, w, i) in tree:
            continue
        loop = words[u] * Word((i,), g.n) * words[w].inverse()
        basis.append(loop)
    return basis


def rank(g: LabeledGraph) -> int:
    """E - V + 1 of a connected graph (the rank of its fundamental group)."""
    if not g.is_connected:
        raise InputError("rank of a disconnected graph is per component; "
                         "use component_ranks")
    if not g.vertices:
        raise InputError("rank of the empty graph is undefined")
    return len(g.edges) - len(g.vertices) + 1


def component_ranks(g: LabeledGraph) -> list[int]:
    """E - V + 1 for each connected component, in component order."""
    out = []
    for comp in g.component_lists:
        comp_set = set(comp)
        e = sum(1 for u, v, _ in g.edges if u in comp_set)
        out.append(e - len(comp) + 1)
    return out


# -- morphisms -------------------------------------------------------------------


@dataclass(frozen=True)
class GraphMorphism:
    """Label-preserving graph morphism given by its vertex map."""

    domain: LabeledGraph
    codomain: LabeledGraph
    vertex_map: tuple[tuple[Vertex, Vertex], ...] = field()

    def __post_init__(self):
        vmap = dict(self.vertex_map)
        if set(vmap) != set(self.domain.vertices):
            raise InputError("vertex map must be defined on every domain vertex")
        cod = set(self.codomain.vertices)
        for v, fv in vmap.items():
            if fv not in cod:
                raise InputError(f"image {fv!r} of {v!r} is not a codomain vertex")
        cod_edges = set(self.codomain.edges)
        for u, v, i in self.domain.edges:
            if (vmap[u], vmap[v], i) not in cod_edges:
                raise InputError(
                    f"edge ({u!r}, {v!r}, {i}) has no image edge "
                    f"({vmap[u]!r}, {vmap[v]!r}, {i})"
                )

    @staticmethod
    def from_dict(
        domain: LabeledGraph, codomain: LabeledGraph, vmap: Mapping[Vertex, Vertex]
    ) -> "GraphMorphism":
        ix = domain.vertex_index
        items = tuple(sorted(vmap.items(), key=lambda p: ix[p[0]]))
        return GraphMorphism(domain, codomain, items)

    @cached_property
    def mapping(self) -> dict[Vertex, Vertex]:
        return dict(self.vertex_map)

    def __call__(self, v: Vertex) -> Vertex:
        return self.mapping[v]

    def edge_image(self, e: Edge) -> Edge:
        u, v, i = e
        return (self.mapping[u], self.mapping[v], i)

    def compose(self, then: "GraphMorphism") -> "GraphMorphism":
        """The morphism (then o self): domain -> then.codomain."""
        if self.codomain is not then.domain and self.codomain != then.domain:
            raise InputError("composition mismatch")
        return GraphMorphism.from_dict(
            self.domain,
            then.codomain,
            {v: then.mapping[fv] for v, fv in self.mapping.items()},
        )

    @cached_property
    def is_vertex_injective(self) -> bool:
        vals = list(self.mapping.values())
        return len(set(vals)) == len(vals)


def to_wedge_morphism(g: LabeledGraph) -> GraphMorphism:
    """The canonical morphism of any labeled graph to the wedge of n circles."""
    return GraphMorphism.from_dict(g, wedge_graph(g.n), {v: 0 for v in g.vertices})


def identity_morphism(g: LabeledGraph) -> GraphMorphism:
    return GraphMorphism.from_dict(g, g, {v: v for v in g.vertices})
