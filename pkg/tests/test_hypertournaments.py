from __future__ import annotations

import itertools
import random

import pytest

from stallings import (
    ForcedCycleError,
    InputError,
    NotInjectiveError,
    NotPartialIsomorphismError,
    NotSubtadpoleError,
    PreconditionError,
    eppa_extend,
    family_graph,
    is_subtadpole,
    make_family,
    make_hypertournament,
    orbit_structure,
    validate,
    verify_extension,
)


def _transitive(k: int):
    rel = [(i, j) for i in range(k) for j in range(i + 1, k)]
    return make_hypertournament(range(k), [2], {2: rel})


def _brute_validate(h) -> bool:
    for l in sorted(h.L):
        tuples = h.relation_map[l]
        for subset in itertools.combinations(h.universe, l):
            arrangements = [t for t in itertools.permutations(subset) if t in tuples]
            if not arrangements:
                return False
        for t in tuples:
            shifts = [t[i:] + t[:i] for i in range(len(t))]
            if all(s in tuples for s in shifts):
                return False
    return True


_SIX = [
    (0, 1), (2, 5), (4, 3), (0, 5), (3, 1),
    (0, 2), (0, 3), (0, 4), (1, 2), (1, 4),
    (1, 5), (2, 3), (2, 4), (3, 5), (4, 5),
]


def test_make_hypertournament_validation():
    # repeated universe labels are normalized away by the constructor helper
    deduped = make_hypertournament([0, 0, 1], [2], {2: [(0, 1)]})
    assert deduped.universe == (0, 1)
    from stallings import Hypertournament

    with pytest.raises(InputError):
        Hypertournament((0, 0, 1), frozenset([2]), ((2, frozenset([(0, 1)])),))
    with pytest.raises(InputError):
        make_hypertournament([0, 1], [4], {4: []})
    with pytest.raises(InputError):
        make_hypertournament([0, 1], [2], {2: [(0, 0)]})
    with pytest.raises(InputError):
        make_hypertournament([0, 1], [2], {2: [(0, 5)]})
    with pytest.raises(InputError):
        make_hypertournament([0, 1], [2], {3: [(0, 1, 2)]})


def test_validate_known_shapes():
    ok, _ = validate(_transitive(4))
    assert ok

    cyclic = make_hypertournament([0, 1], [2], {2: [(0, 1), (1, 0)]})
    ok, violation = validate(cyclic)
    assert not ok and violation.kind == "cycle"

    bare = make_hypertournament([0, 1, 2], [2], {2: [(0, 1)]})
    ok, violation = validate(bare)
    assert not ok and violation.kind == "unoriented"
    assert set(violation.witness) <= {0, 1, 2}


def test_validate_matches_brute_force():
    rng = random.Random(13)
    for _ in range(60):
        k = rng.randint(2, 5)
        rel = []
        for i, j in itertools.combinations(range(k), 2):
            roll = rng.random()
            if roll < 0.45:
                rel.append((i, j))
            elif roll < 0.9:
                rel.append((j, i))
            if rng.random() < 0.1:
                rel.append((j, i) if rel and rel[-1] == (i, j) else (i, j))
        h = make_hypertournament(range(k), [2], {2: rel})
        assert validate(h)[0] == _brute_validate(h)


def test_arity_three_validation():
    h = make_hypertournament(
        range(3), [3], {3: [(0, 1, 2)]}
    )
    ok, violation = validate(h)
    # a single oriented triple: its three shifts are not all present
    assert ok

    spun = make_hypertournament(
        range(3), [3], {3: [(0, 1, 2), (1, 2, 0), (2, 0, 1)]}
    )
    ok, violation = validate(spun)
    assert not ok and violation.kind == "cycle"


def test_family_graph_and_subtadpole():
    m = _transitive(4)
    fam = make_family(m, [{0: 1, 1: 2}])
    g = family_graph(fam)
    assert len(g.vertices) == 4
    assert len(g.edges) == 2
    assert is_subtadpole(g)

    # a two-branch star: two vertices of degree three
    host = make_hypertournament(range(6), [2], {2: _SIX})
    assert validate(host)[0]
    star = make_family(host, [{0: 2, 1: 5}, {0: 3, 5: 1}, {0: 4, 1: 3}])
    assert not is_subtadpole(family_graph(star))


def test_make_family_rejects_non_isomorphisms():
    m = make_hypertournament([0, 1], [2], {2: [(0, 1)]})
    with pytest.raises(NotPartialIsomorphismError):
        make_family(m, [{0: 1, 1: 0}])
    with pytest.raises(NotInjectiveError):
        make_family(_transitive(3), [{0: 2, 1: 2}])


def test_orbit_structure_invariance():
    rng = random.Random(21)
    for _ in range(20):
        k = rng.randint(3, 6)
        universe = list(range(k))
        pts = rng.sample(universe, rng.randint(2, k))
        shift = {x: y for x, y in zip(pts, pts[1:])}
        try:
            h = orbit_structure(universe, [shift], [2])
        except ForcedCycleError:
            continue
        assert validate(h)[0]
        rel = h.relation_map[2]
        for x, y in rel:
            if x in shift and y in shift:
                assert (shift[x], shift[y]) in rel


def test_orbit_structure_detects_forced_cycles():
    # swapping two points forces both orientations of their pair
    with pytest.raises(ForcedCycleError):
        orbit_structure([0, 1], [{0: 1, 1: 0}], [2])


def test_orbit_structure_input_checks():
    with pytest.raises(NotInjectiveError):
        orbit_structure([0, 1, 2], [{0: 2, 1: 2}], [2])
    with pytest.raises(InputError):
        orbit_structure([0, 1], [{0: 9}], [2])
    with pytest.raises(InputError):
        orbit_structure([0, 1, 2], [{}], [2], seeds={2: [(0, 0)]})


def test_eppa_extend_single_map():
    m = _transitive(4)
    fam = make_family(m, [{0: 3}])
    result = eppa_extend(m, fam)
    assert verify_extension(result, m, fam)
    auto = result.automorphism_maps[0]
    e = result.embedding_map
    assert auto[e[0]] == e[3]


def test_eppa_extend_empty_family():
    m = _transitive(3)
    fam = make_family(m, [{}])
    result = eppa_extend(m, fam)
    assert verify_extension(result, m, fam)
    assert len(result.extended.universe) == 3


def test_eppa_extend_arity_three():
    m = make_hypertournament(
        range(4),
        [3],
        {3: [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]},
    )
    fam = make_family(m, [{0: 3}])
    result = eppa_extend(m, fam)
    assert verify_extension(result, m, fam)
    assert result.extended.L == frozenset([3])


def test_eppa_extend_refuses_non_subtadpole_families():
    m = make_hypertournament(range(6), [2], {2: _SIX})
    fam = make_family(m, [{0: 2, 1: 5}, {0: 3, 5: 1}, {0: 4, 1: 3}])
    with pytest.raises(NotSubtadpoleError):
        eppa_extend(m, fam)


def test_eppa_extend_refuses_invalid_hosts():
    # bypass make_family validation by building the family on a valid host,
    # then handing eppa_extend a mismatched one
    m = _transitive(3)
    fam = make_family(m, [{0: 1}])
    with pytest.raises(InputError):
        eppa_extend(_transitive(4), fam)


def test_verify_extension_catches_tampering():
    m = _transitive(4)
    fam = make_family(m, [{0: 3}])
    result = eppa_extend(m, fam)
    import dataclasses

    identity = tuple((x, x) for x in result.extended.universe)
    broken = dataclasses.replace(
        result, automorphisms=tuple(identity for _ in result.automorphisms)
    )
    assert not verify_extension(broken, m, fam)
