from __future__ import annotations

import random

import pytest

import oracles
from stallings import (
    GraphMorphism,
    InputError,
    Word,
    canonical_form,
    core,
    cycle_basis,
    fold,
    make_graph,
    rank,
    subgroup_graph,
    to_wedge_morphism,
    wedge_graph,
)
from stallings.graphs import is_core, path_words_from, relabel_canonical, spanning_tree, trace


def _words(*texts: str, n: int = 2) -> list[Word]:
    return [Word.parse(t, n) for t in texts]


def _counts(g):
    by_letter = {}
    for _, _, letter in g.edges:
        by_letter[letter] = by_letter.get(letter, 0) + 1
    return len(g.vertices), by_letter


def test_wedge_graph_shape():
    w = wedge_graph(3)
    assert len(w.vertices) == 1
    assert len(w.edges) == 3
    assert w.basepoint in w.vertices


def test_make_graph_rejects_bad_edges():
    with pytest.raises(InputError):
        make_graph(2, [0, 1], [(0, 1, 3)], 0)
    with pytest.raises(InputError):
        make_graph(2, [0, 1], [(0, 1, -1)], 0)
    with pytest.raises(InputError):
        make_graph(2, [0, 1], [(0, 2, 1)], 0)


def test_fold_whole_group():
    # b = A * (ab), so these generators give back all of F2 and the
    # folded core must be the wedge itself.
    cl = oracles.closure({(1,), (1, 2)}, max_factors=6, lmax=3)
    assert (2,) in cl
    h = subgroup_graph(_words("a", "ab"), 2)
    assert len(h.graph.vertices) == 1
    assert len(h.graph.edges) == 2
    assert h.rank() == 2


def test_fold_is_idempotent_and_label_invariant():
    rng = random.Random(7)
    for _ in range(40):
        k = rng.randint(1, 3)
        gens = []
        while len(gens) < k:
            m = rng.randint(1, 5)
            raw = [rng.choice([1, -1, 2, -2]) for _ in range(m)]
            w = Word(oracles.reduce_tuple(raw), 2)
            if w:
                gens.append(w)
        folded = subgroup_graph(gens, 2).graph
        assert canonical_form(fold(folded)) == canonical_form(folded)

        # shuffle the vertex names; the canonical form must not move
        names = list(folded.vertices)
        rng.shuffle(names)
        perm = {v: ("x", i) for i, v in enumerate(names)}
        shuffled = make_graph(
            folded.n,
            [perm[v] for v in names],
            [(perm[u], perm[v], a) for u, v, a in folded.edges],
            perm[folded.basepoint],
        )
        assert canonical_form(shuffled) == canonical_form(folded)


def test_known_core_shape():
    h = subgroup_graph(_words("abABa", "b"), 2)
    v, by_letter = _counts(h.graph)
    assert v == 5
    assert by_letter == {1: 3, 2: 3}
    assert is_core(h.graph)


def test_core_prunes_hanging_trees():
    g = make_graph(2, [0, 1, 2], [(0, 0, 1), (0, 1, 2), (1, 2, 1)], 0)
    c = core(g)
    assert set(c.vertices) == {0}
    assert is_core(c)


def test_core_keeps_basepoint_even_if_degree_one():
    g = make_graph(2, [0, 1], [(0, 1, 1), (1, 1, 2)], 0)
    c = core(g)
    assert 0 in c.vertices
    assert len(c.vertices) == 2


def test_membership_against_oracle():
    gens = [_words("aa", "b"), _words("abA"), _words("ab", "ba"), _words("aba", "bb")]
    for gen_set in gens:
        h = subgroup_graph(gen_set, 2)
        raw = {w.letters for w in gen_set}
        cl = oracles.closure(raw, max_factors=6, lmax=12)
        for letters in oracles.ball(2, 5):
            w = Word(letters, 2)
            if letters in cl:
                assert h.contains(w), (gen_set, w)
            elif h.contains(w):
                # the oracle ball is bounded; confirm with a deeper pass
                deep = oracles.closure(raw, max_factors=10, lmax=12)
                assert letters in deep, (gen_set, w)


def test_cycle_basis_generates_and_has_rank_many_words():
    h = subgroup_graph(_words("abABa", "b"), 2)
    basis = cycle_basis(h.graph)
    assert len(basis) == rank(h.graph) == 2
    for w in basis:
        assert h.contains(w)
    again = subgroup_graph(list(basis), 2)
    assert canonical_form(again.graph) == canonical_form(h.graph)


def test_spanning_tree_and_path_words():
    h = subgroup_graph(_words("abABa", "b"), 2)
    tree, words = spanning_tree(h.graph, h.graph.basepoint)
    assert len(tree) == len(h.graph.vertices) - 1
    paths = path_words_from(h.graph, h.graph.basepoint)
    assert paths == words
    for v, w in paths.items():
        assert trace(h.graph, h.graph.basepoint, w) == v


def test_trace_missing_edge_is_none():
    w = wedge_graph(1)
    assert trace(w, w.basepoint, Word.parse("ab", 2)) is None


def test_relabel_canonical_is_stable():
    h = subgroup_graph(_words("ab", "aab"), 2)
    g1 = relabel_canonical(h.graph)
    g2 = relabel_canonical(g1)
    assert g1 == g2


def test_morphism_validation():
    h = subgroup_graph(_words("aa"), 2)
    f = to_wedge_morphism(h.graph)
    assert set(f.mapping.values()) == {f.codomain.basepoint}
    with pytest.raises(InputError):
        GraphMorphism(h.graph, wedge_graph(2), {})


def test_rank_formula_on_schreier_covers():
    rng = random.Random(11)
    checked = 0
    while checked < 25:
        n = rng.randint(1, 3)
        k = rng.randint(1, 8)
        perms = {}
        for letter in range(1, n + 1):
            images = list(range(k))
            rng.shuffle(images)
            perms[letter] = images
        edges = [
            (s, perms[letter][s], letter)
            for letter in range(1, n + 1)
            for s in range(k)
        ]
        g = make_graph(n, range(k), edges, 0)
        if not g.is_connected:
            continue
        assert rank(g) == 1 + k * (n - 1)
        checked += 1
