"""Fiber products of immersed graphs over the wedge of n circles, with the
two decision procedures they support: malnormality and closure under l-th
roots.

The product of A and B has vertex set V(A) x V(B) and an i-edge
(a,b) -> (a',b') for every pair of i-edges a -> a', b -> b'. Reading a word
in the product reads it in both coordinates simultaneously, which is what
makes component fundamental groups compute intersections of conjugates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import InputError, PreconditionError, ResourceCapError
from .graphs import (
    GraphMorphism,
    LabeledGraph,
    SubgroupGraph,
    Vertex,
    _signed_letters,
    core,
    cycle_basis,
    is_core,
    make_graph,
    path_words_from,
    relabel_canonical,
)
from .words import Word

TUPLE_CAP = 2_000_000


def _as_graph(g: LabeledGraph | SubgroupGraph) -> LabeledGraph:
    return g.graph if isinstance(g, SubgroupGraph) else g


def _check_product_input(g: LabeledGraph, side: str) -> None:
    if not g.is_immersed:
        raise PreconditionError(f"{side} factor is not immersed")
    if not is_core(g):
        raise PreconditionError(
            f"{side} factor has a degree-1 vertex off the basepoint; "
            "core-reduce it first"
        )


@dataclass(frozen=True)
class FiberProduct:
    left: LabeledGraph
    right: LabeledGraph
    product: LabeledGraph

    @cached_property
    def component_index(self) -> dict[Vertex, int]:
        comps = self.product.component_lists
        return {v: k for k, comp in enumerate(comps) for v in comp}

    @property
    def components(self) -> tuple[tuple[Vertex, ...], ...]:
        return self.product.component_lists

    @cached_property
    def diagonal(self) -> int | None:
        """Component id of the diagonal, when the two factors coincide."""
        if self.left != self.right:
            return None
        ix = self.component_index
        ids = {ix[(v, v)] for v in self.left.vertices}
        if len(ids) != 1:
            # can only happen for a disconnected factor
            return None
        return next(iter(ids))

    def component_vertices(self, cid: int) -> tuple[Vertex, ...]:
        return self.components[cid]

    def component_edge_counts(self, cid: int) -> dict[int, int]:
        comp = set(self.components[cid])
        counts = {i: 0 for i in range(1, self.product.n + 1)}
        for u, _, i in self.product.edges:
            if u in comp:
                counts[i] += 1
        return counts

    def component_is_tree(self, cid: int) -> bool:
        comp = self.components[cid]
        e = sum(self.component_edge_counts(cid).values())
        return e == len(comp) - 1

    def projection(self, side: str) -> GraphMorphism:
        target = self.left if side == "left" else self.right
        coord = 0 if side == "left" else 1
        return GraphMorphism.from_dict(
            self.product, target, {v: v[coord] for v in self.product.vertices}
        )

    def non_diagonal_edge_counts(self) -> dict[int, int]:
        """Per-letter edge counts outside the diagonal component."""
        d = self.diagonal
        if d is None:
            raise PreconditionError("no diagonal: the factors differ")
        diag = set(self.components[d])
        counts = {i: 0 for i in range(1, self.product.n + 1)}
        for u, _, i in self.product.edges:
            if u not in diag:
                counts[i] += 1
        return counts


def fiber_product(
    a: LabeledGraph | SubgroupGraph, b: LabeledGraph | SubgroupGraph
) -> FiberProduct:
    """The fiber product of two core immersed graphs over the wedge."""
    ga, gb = _as_graph(a), _as_graph(b)
    if ga.n != gb.n:
        raise InputError(f"alphabet mismatch: {ga.n} vs {gb.n}")
    _check_product_input(ga, "left")
    _check_product_input(gb, "right")
    verts = [(u, v) for u in ga.vertices for v in gb.vertices]
    by_letter: dict[int, list[tuple[Vertex, Vertex]]] = {}
    for u, v, i in gb.edges:
        by_letter.setdefault(i, []).append((u, v))
    edges = []
    for u1, u2, i in ga.edges:
        for v1, v2 in by_letter.get(i, ()):
            edges.append(((u1, v1), (u2, v2), i))
    bp = None
    if ga.basepoint is not None and gb.basepoint is not None:
        bp = (ga.basepoint, gb.basepoint)
    return FiberProduct(ga, gb, make_graph(ga.n, verts, edges, bp))


def fiber_product_over(f: GraphMorphism, g: GraphMorphism) -> FiberProduct:
    """Fiber product of two morphisms with a common codomain: vertices are
    pairs with equal image, edges are pairs of edges with equal image edge.
    Over the wedge this is exactly :func:`fiber_product`."""
    if f.codomain != g.codomain:
        raise InputError("fiber product needs a common codomain")
    ga, gb = f.domain, g.domain
    verts = [
        (u, v) for u in ga.vertices for v in gb.vertices if f(u) == g(v)
    ]
    edges = []
    by_image: dict[tuple, list] = {}
    for e in gb.edges:
        by_image.setdefault(g.edge_image(e), []).append(e)
    for e in ga.edges:
        for e2 in by_image.get(f.edge_image(e), ()):
            edges.append(((e[0], e2[0]), (e[1], e2[1]), e[2]))
    bp = None
    if ga.basepoint is not None and gb.basepoint is not None:
        cand = (ga.basepoint, gb.basepoint)
        if f(ga.basepoint) == g(gb.basepoint):
            bp = cand
    return FiberProduct(ga, gb, make_graph(ga.n, verts, edges, bp))


def component_pi1(
    fp: FiberProduct, a: Vertex, b: Vertex
) -> SubgroupGraph:
    """Core based graph of the product component at (a, b); its membership
    predicate is 'loop at a in the left factor AND loop at b in the right'."""
    v = (a, b)
    if v not in fp.product.vertex_index:
        raise InputError(f"({a!r}, {b!r}) is not a product vertex")
    comp = fp.product.component_of(v)
    sub = fp.product.restrict(comp, basepoint=v)
    cored = relabel_canonical(core(sub))
    return SubgroupGraph(cored, tuple(cycle_basis(cored)))


# -- malnormality ---------------------------------------------------------------


@dataclass(frozen=True)
class MalnormalityCertificate:
    """A non-tree non-diagonal component, witnessed by explicit words:
    ``conjugator`` lies outside the subgroup while ``element`` and
    ``conjugator * element * conjugator^-1`` both lie inside."""

    component_id: int
    component: tuple[Vertex, ...]
    conjugator: Word
    element: Word
    conjugated: Word


@dataclass(frozen=True)
class MalnormalityResult:
    malnormal: bool
    certificate: MalnormalityCertificate | None
    product: FiberProduct


def is_malnormal(h: SubgroupGraph) -> MalnormalityResult:
    """A subgroup is malnormal iff every non-diagonal component of the fiber
    product of its graph with itself is a tree."""
    fp = fiber_product(h, h)
    d = fp.diagonal
    paths = path_words_from(h.graph, h.graph.basepoint)
    for cid, comp in enumerate(fp.components):
        if cid == d or fp.component_is_tree(cid):
            continue
        x1, x2 = comp[0]
        w = cycle_basis(fp.product.restrict(comp, basepoint=comp[0]))[0]
        p1, p2 = paths[x1], paths[x2]
        cert = MalnormalityCertificate(
            component_id=cid,
            component=comp,
            conjugator=p1 * p2.inverse(),
            element=p2 * w * p2.inverse(),
            conjugated=p1 * w * p1.inverse(),
        )
        return MalnormalityResult(False, cert, fp)
    return MalnormalityResult(True, None, fp)


# -- closure under l-th roots -----------------------------------------------------


@dataclass(frozen=True)
class RootClosureResult:
    closed: bool
    witness: Word | None


class _TupleDSU:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _tuple_digits(t: int, base: int, l: int) -> list[int]:
    out = []
    for _ in range(l):
        out.append(t % base)
        t //= base
    return out


def is_l_root_closed(h: SubgroupGraph, l: int) -> RootClosureResult:
    """True iff no word w has w^l in the subgroup but w outside it.

    The subgroup fails to be closed under l-th roots exactly when some
    component of the l-fold simultaneous product of its graph contains a
    non-constant vertex tuple together with its cyclic shift: a path word v
    between them reads t_0 -> t_1, ..., t_{l-1} -> t_0 in the graph, so v^l
    is a loop while v is not.
    """
    if l < 2:
        raise InputError("root index l must be at least 2")
    g = h.graph
    nv = len(g.vertices)
    if nv ** l > TUPLE_CAP:
        raise ResourceCapError(
            f"{nv}^{l} vertex tuples exceed the cap of {TUPLE_CAP}",
            vertices=nv,
            l=l,
        )
    idx = g.vertex_index
    maps = []
    for s in _signed_letters(g.n):
        m = [-1] * nv
        for (v, t), w in g.steps.items():
            if t == s:
                m[idx[v]] = idx[w]
        maps.append(m)

    total = nv ** l
    dsu = _TupleDSU(total)
    for m in maps[::2]:  # positive letters suffice; inverses give the same unions
        for t in range(total):
            digits = _tuple_digits(t, nv, l)
            image = 0
            ok = True
            for d in reversed(digits):
                md = m[d]
                if md < 0:
                    ok = False
                    break
                image = image * nv + md
            if ok:
                dsu.union(t, image)

    def shift(t: int) -> int:
        digits = _tuple_digits(t, nv, l)
        rot = digits[1:] + digits[:1]
        s = 0
        for d in reversed(rot):
            s = s * nv + d
        return s

    hit = None
    for t in range(total):
        digits = _tuple_digits(t, nv, l)
        if all(d == digits[0] for d in digits):
            continue
        if dsu.find(t) == dsu.find(shift(t)):
            hit = digits
            break
    if hit is None:
        return RootClosureResult(True, None)

    v_word = _tuple_path_word(g, maps, hit, l)
    u = path_words_from(g, g.basepoint)[g.vertices[hit[0]]]
    witness = u * v_word * u.inverse()
    return RootClosureResult(False, witness)


def _tuple_path_word(
    g: LabeledGraph, maps: list[list[int]], start_digits: list[int], l: int
) -> Word:
    """BFS path word in the l-fold product from a tuple to its cyclic shift."""
    signed = _signed_letters(g.n)
    start = tuple(start_digits)
    goal = tuple(start_digits[1:] + start_digits[:1])
    prev: dict[tuple, tuple | None] = {start: None}
    letter_to: dict[tuple, int] = {}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            letters = []
            node = cur
            while prev[node] is not None:
                letters.append(letter_to[node])
                node = prev[node]
            return Word(tuple(reversed(letters)), g.n)
        for k, s in enumerate(signed):
            m = maps[k]
            nxt = []
            ok = True
            for d in cur:
                md = m[d]
                if md < 0:
                    ok = False
                    break
                nxt.append(md)
            if not ok:
                continue
            nt = tuple(nxt)
            if nt not in prev:
                prev[nt] = cur
                letter_to[nt] = s
                queue.append(nt)
    raise AssertionError("shifted tuple vanished from its own component")
