from __future__ import annotations

import dataclasses

import pytest

from stallings import (
    FiniteQuotient,
    InputError,
    PreconditionError,
    RootClosureError,
    Word,
    constraint_satisfied,
    direct_product,
    prime_factors,
    separate_coset_system,
    separate_from_cyclic,
    separate_maximal_cyclic,
    verify_witness,
)
from stallings.separability import closure as perm_closure
from stallings.separability import p_identity, p_inv, p_mul, perm_order
from stallings.words import empty_word


def _w(text: str, n: int = 2) -> Word:
    return Word.parse(text, n)


# -- permutation plumbing -----------------------------------------------------------


def test_perm_arithmetic():
    s = (1, 0, 2)
    c = (1, 2, 0)
    assert p_mul(s, p_inv(s)) == p_identity(3)
    assert perm_order(c) == 3
    assert perm_order(p_identity(5)) == 1
    assert len(perm_closure([s, c])) == 6


def test_prime_factors():
    assert prime_factors(12) == {2, 3}
    assert prime_factors(1) == set()
    assert prime_factors(125) == {5}


# -- finite quotients ---------------------------------------------------------------


def test_quotient_evaluation():
    s3 = FiniteQuotient.create(2, [(1, 0, 2), (1, 2, 0)], "S3")
    assert s3.order == 6
    ab = s3.evaluate(_w("ab"))
    assert ab == p_mul((1, 0, 2), (1, 2, 0))
    assert s3.evaluate(_w("aA")) == p_identity(3)
    assert len(s3.cyclic_image(_w("b"))) == 3
    assert s3.cyclic_image(None) == frozenset([p_identity(3)])
    assert s3.element_orders() <= {1, 2, 3, 6}


def test_quotient_validation():
    with pytest.raises(InputError):
        FiniteQuotient.create(2, [(1, 0, 2)], "half")
    with pytest.raises(InputError):
        FiniteQuotient.create(1, [(0, 0)], "not a perm")
    trivial = FiniteQuotient.trivial(2)
    with pytest.raises(InputError):
        trivial.evaluate(Word.parse("c", 3))


def test_direct_product_orders_multiply():
    s3 = FiniteQuotient.create(2, [(1, 0, 2), (1, 2, 0)], "S3")
    z2 = FiniteQuotient.create(2, [(1, 0), (0, 1)], "Z2")
    prod = direct_product(s3, z2)
    assert prod.degree == 5
    assert prod.order == 12
    assert prod.evaluate(_w("a")) == (1, 0, 2, 4, 3)


# -- witnesses ----------------------------------------------------------------------


def test_separate_maximal_cyclic_known_case():
    wit = separate_maximal_cyclic(_w("a"), _w("b"), 2)
    assert verify_witness(wit)
    assert prime_factors(wit.quotient.order) == {2}
    q = wit.quotient
    assert q.evaluate(_w("b")) not in q.cyclic_image(_w("a"))


def test_separate_maximal_cyclic_preconditions():
    with pytest.raises(PreconditionError):
        separate_maximal_cyclic(_w("aa"), _w("b"), 2)
    with pytest.raises(PreconditionError):
        separate_maximal_cyclic(_w("a"), _w("aaa"), 2)
    with pytest.raises(InputError):
        separate_maximal_cyclic(_w("a"), _w("b"), 6)


def test_separate_from_cyclic_power_case():
    wit = separate_from_cyclic(_w("aa"), _w("a"), [3])
    assert verify_witness(wit)
    assert wit.quotient.order == 2
    assert not prime_factors(wit.quotient.order) & {3}


def test_separate_from_cyclic_generic_case():
    wit = separate_from_cyclic(_w("ab"), _w("ba"), [2, 3])
    assert verify_witness(wit)
    assert not prime_factors(wit.quotient.order) & {2, 3}
    q = wit.quotient
    assert q.evaluate(_w("ba")) not in q.cyclic_image(_w("ab"))


def test_separate_from_cyclic_refuses_open_roots():
    with pytest.raises(RootClosureError) as info:
        separate_from_cyclic(_w("aa"), _w("b"), [2])
    exc = info.value
    assert exc.details["l"] == 2
    witness = exc.details["witness"]
    assert witness is not None
    from stallings import subgroup_graph

    h = subgroup_graph([_w("aa")], 2)
    assert not h.contains(witness)
    assert h.contains(witness**2)

    with pytest.raises(RootClosureError):
        separate_from_cyclic(_w("abab"), _w("a"), [2])


def test_separate_from_cyclic_input_checks():
    with pytest.raises(InputError):
        separate_from_cyclic(_w("aa"), _w("b"), [4])
    with pytest.raises(InputError):
        separate_from_cyclic(empty_word(2), _w("b"), [3])
    with pytest.raises(PreconditionError):
        separate_from_cyclic(_w("aa"), _w("aaaa"), [3])


def test_separate_from_cyclic_power_sweep():
    for i in range(2, 9):
        c = Word((1,) * i, 2)
        L = [l for l in (2, 3, 5) if i % l]
        for m in range(1, i):
            g = Word((1,) * m, 2)
            wit = separate_from_cyclic(c, g, L)
            assert verify_witness(wit), (i, m)
            assert not prime_factors(wit.quotient.order) & set(L), (i, m)


def test_witness_tampering_is_caught():
    wit = separate_from_cyclic(_w("ab"), _w("ba"), [3])
    assert verify_witness(wit)
    fake = dataclasses.replace(wit, excluded=_w("abab"))
    assert not verify_witness(fake)
    lying = dataclasses.replace(
        wit, excluded_primes=frozenset(prime_factors(wit.quotient.order))
    )
    assert not verify_witness(lying)


def test_separation_is_deterministic():
    a = separate_from_cyclic(_w("ab"), _w("ba"), [2], seed=7)
    b = separate_from_cyclic(_w("ab"), _w("ba"), [2], seed=7)
    assert a.quotient.images == b.quotient.images
    assert a.quotient.order == b.quotient.order


# -- coset systems ------------------------------------------------------------------


def _non_membership(g: Word, h: Word):
    return ((g, h), (empty_word(max(g.n, h.n)), h))


def test_constraint_semantics_on_trivial_quotient():
    q = FiniteQuotient.trivial(2)
    assert not constraint_satisfied(q, _non_membership(_w("b"), _w("a")))


def test_coset_system_single_constraint():
    cons = [_non_membership(_w("b"), _w("a"))]
    q = separate_coset_system(cons, [3])
    assert constraint_satisfied(q, cons[0])
    assert not prime_factors(q.order) & {3}


def test_coset_system_multiple_constraints():
    cons = [
        _non_membership(_w("b"), _w("a")),
        _non_membership(_w("a"), _w("b")),
        _non_membership(_w("ab"), _w("ba")),
    ]
    q = separate_coset_system(cons, [5])
    for c in cons:
        assert constraint_satisfied(q, c)
    assert not prime_factors(q.order) & {5}


def test_coset_system_rejects_non_prime_l():
    with pytest.raises(InputError):
        separate_coset_system([_non_membership(_w("b"), _w("a"))], [6])
