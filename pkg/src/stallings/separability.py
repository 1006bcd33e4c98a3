"""Constructive separation of cyclic subgroups in finite quotients.

Quotients are given as permutation actions: a homomorphism from the free
group assigns one permutation per letter, a word evaluates by composing
left to right, and the quotient order is the size of the generated
permutation group. Witnesses certify that the image of a word avoids the
image of a cyclic subgroup, with the quotient order constrained to
prescribed primes. The search enumerates homomorphisms into a small graded
library of p-groups, so failures are honest cap reports rather than
non-constructive appeals to residual properties.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .arith import is_prime, require_prime, smallest_prime_not_in, valuation
from .errors import (
    InputError,
    PreconditionError,
    ResourceCapError,
    RootClosureError,
    SearchCapError,
)
from .fiber import is_l_root_closed
from .graphs import subgroup_graph
from .words import Word, cyclic_reduce, empty_word, maximal_root

Perm = tuple[int, ...]

GROUP_ORDER_CAP = 20_000


def p_identity(degree: int) -> Perm:
    return tuple(range(degree))


def p_mul(f: Perm, g: Perm) -> Perm:
    """Apply f first, then g."""
    return tuple(g[x] for x in f)


def p_inv(f: Perm) -> Perm:
    out = [0] * len(f)
    for i, x in enumerate(f):
        out[x] = i
    return tuple(out)


def closure(perms: Iterable[Perm], cap: int = GROUP_ORDER_CAP) -> frozenset[Perm]:
    gens = [p for p in perms]
    if not gens:
        raise InputError("closure of an empty generator list has no degree")
    seen: set[Perm] = {p_identity(len(gens[0]))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for f in frontier:
            for g in gens:
                h = p_mul(f, g)
                if h not in seen:
                    if len(seen) >= cap:
                        raise ResourceCapError(
                            f"permutation group exceeds {cap} elements"
                        )
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return frozenset(seen)


@dataclass(frozen=True)
class FiniteQuotient:
    """A quotient of F_n presented by letter images in a permutation group.

    ``order`` is the order of a certified ambient permutation group
    containing the image: exact for single library groups, and a product of
    certified factor orders for direct products. Every order-theoretic
    guarantee (which primes can divide element orders) passes from the
    ambient group to the image by Lagrange.
    """

    n: int
    degree: int
    order: int
    images: tuple[Perm, ...]
    name: str

    def __post_init__(self):
        if len(self.images) != self.n:
            raise InputError("need one image per letter")
        for g in self.images:
            if sorted(g) != list(range(self.degree)):
                raise InputError("images must be permutations of 0..degree-1")

    @staticmethod
    def create(n: int, images: Sequence[Perm], name: str) -> "FiniteQuotient":
        images = tuple(tuple(g) for g in images)
        degree = len(images[0]) if images else 1
        order = len(closure(images)) if images else 1
        return FiniteQuotient(n, degree, order, images, name)

    @staticmethod
    def trivial(n: int) -> "FiniteQuotient":
        return FiniteQuotient(n, 1, 1, tuple([(0,)] * n), "1")

    @cached_property
    def inverse_images(self) -> tuple[Perm, ...]:
        return tuple(p_inv(g) for g in self.images)

    def evaluate(self, w: Word) -> Perm:
        if w.n > self.n:
            raise InputError(f"word uses letters beyond the quotient's {self.n}")
        acc = p_identity(self.degree)
        for t in w:
            g = self.images[t - 1] if t > 0 else self.inverse_images[-t - 1]
            acc = p_mul(acc, g)
        return acc

    def cyclic_image(self, w: Word | None) -> frozenset[Perm]:
        """The subgroup generated by the image of one word."""
        if w is None:
            return frozenset([p_identity(self.degree)])
        g = self.evaluate(w)
        out = {p_identity(self.degree)}
        cur = g
        while cur not in out:
            out.add(cur)
            cur = p_mul(cur, g)
        return frozenset(out)

    def element_orders(self) -> set[int]:
        return {perm_order(g) for g in closure(self.images)}


def perm_order(g: Perm) -> int:
    order = 1
    seen = [False] * len(g)
    for start in range(len(g)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = g[x]
            length += 1
        order = _lcm(order, length)
    return order


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def direct_product(a: FiniteQuotient, b: FiniteQuotient, name: str | None = None) -> FiniteQuotient:
    """Product quotient acting on the disjoint union of the factors' points.

    The image is a subgroup of the full direct product, so the certified
    order is the product of the factor orders; no closure is computed.
    """
    if a.n != b.n:
        raise InputError("alphabet mismatch in product")
    da = a.degree
    images = tuple(
        ga + tuple(x + da for x in gb) for ga, gb in zip(a.images, b.images)
    )
    return FiniteQuotient(
        a.n, da + b.degree, a.order * b.order, images, name or f"{a.name} x {b.name}"
    )


def prime_factors(m: int) -> set[int]:
    out = set()
    d = 2
    while d * d <= m:
        while m % d == 0:
            out.add(d)
            m //= d
        d += 1
    if m > 1:
        out.add(m)
    return out


# -- the p-group library -------------------------------------------------------------


def _cyclic_elements(q: int) -> list[Perm]:
    return [tuple((x + k) % q for x in range(q)) for k in range(q)]


def _elementary_squared_elements(p: int) -> list[Perm]:
    out = []
    for k1 in range(p):
        for k2 in range(p):
            first = tuple((x + k1) % p for x in range(p))
            second = tuple(p + (x + k2) % p for x in range(p))
            out.append(first + second)
    return out


def _heisenberg_elements(p: int) -> list[Perm]:
    """Order p^3, upper unitriangular 3x3 over Z/p, in its right regular
    action: (a,b,c) * (a',b',c') = (a+a', b+b', c+c'+a*b')."""
    def pid(t):
        return (t[0] * p + t[1]) * p + t[2]

    triples = [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]
    out = []
    for g in triples:
        ga, gb, gc = g
        perm = [0] * (p ** 3)
        for x in triples:
            xa, xb, xc = x
            y = ((xa + ga) % p, (xb + gb) % p, (xc + gc + xa * gb) % p)
            perm[pid(x)] = pid(y)
        out.append(tuple(perm))
    return out


def _wreath_elements(p: int) -> list[Perm]:
    """Z/p wr Z/p of order p^(p+1) acting on the p x p grid:
    (i, j) -> (i + s, j + o_i)."""
    def pid(i, j):
        return i * p + j

    out = []
    for s in range(p):
        for offsets in itertools.product(range(p), repeat=p):
            perm = [0] * (p * p)
            for i in range(p):
                for j in range(p):
                    perm[pid(i, j)] = pid((i + s) % p, (j + offsets[i]) % p)
            out.append(tuple(perm))
    return out


def group_library(p: int) -> list[tuple[str, str, object]]:
    """Candidate p-groups in increasing order: cyclic up to p^4, elementary
    abelian rank 2, mod-p Heisenberg, and (for p <= 3) the wreath product.

    Cyclic entries carry their modulus (("cyclic", q)) so searches can use
    integer arithmetic; the rest carry explicit permutation element lists.
    """
    require_prime(p)
    entries: list[tuple[int, str, str, object]] = [
        (p, f"Z/{p}", "cyclic", p),
        (p ** 2, f"(Z/{p})^2", "perm", lambda: _elementary_squared_elements(p)),
        (p ** 2, f"Z/{p ** 2}", "cyclic", p ** 2),
        (p ** 3, f"Heis({p})", "perm", lambda: _heisenberg_elements(p)),
        (p ** 3, f"Z/{p ** 3}", "cyclic", p ** 3),
    ]
    if p <= 3:
        entries.append((p ** (p + 1), f"Z/{p} wr Z/{p}", "perm", lambda: _wreath_elements(p)))
    entries.append((p ** 4, f"Z/{p ** 4}", "cyclic", p ** 4))
    entries.sort(key=lambda e: e[0])
    return [
        (name, kind, data if kind == "cyclic" else data())
        for _, name, kind, data in entries
    ]


# -- witnesses ---------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationWitness:
    quotient: FiniteQuotient
    subgroup: Word
    excluded: Word
    allowed_primes: frozenset | None
    excluded_primes: frozenset
    transcript: tuple[str, ...]


def verify_witness(w: SeparationWitness) -> bool:
    """Re-evaluate everything inside the finite quotient; no exceptions,
    just a verdict."""
    try:
        q = w.quotient
        factors = prime_factors(q.order) if q.order > 1 else set()
        if w.allowed_primes is not None and not factors <= set(w.allowed_primes):
            return False
        if factors & set(w.excluded_primes):
            return False
        actual = len(closure(q.images))
        if actual == 0 or q.order % actual:
            return False
        sub_image = q.cyclic_image(w.subgroup)
        return q.evaluate(w.excluded) not in sub_image
    except (InputError, ResourceCapError):
        return False


# -- constraint search -------------------------------------------------------------
#
# A constraint is a conjunction of coset clauses (coset_word, generator); it is
# satisfied in a quotient when the intersection of the cosets
# evaluate(coset_word) * <evaluate(generator)> is empty. Non-membership of g in
# a cyclic subgroup <h> is the two-clause constraint ((g, h), (empty, h)).

CosetClause = tuple[Word, "Word | None"]
Constraint = tuple[CosetClause, ...]


def constraint_satisfied(q: FiniteQuotient, constraint: Constraint) -> bool:
    """True when the intersection of the clause cosets is empty in q."""
    common: frozenset[Perm] | None = None
    for coset_word, generator in constraint:
        rep = q.evaluate(coset_word)
        sub = q.cyclic_image(generator)
        coset = frozenset(p_mul(rep, s) for s in sub)
        common = coset if common is None else common & coset
        if not common:
            return True
    return common is not None and not common


def _letter_sums(w: Word, n: int) -> tuple[int, ...]:
    sums = [0] * n
    for t in w:
        sums[abs(t) - 1] += 1 if t > 0 else -1
    return tuple(sums)


def _occurring_letters(constraint: Constraint) -> tuple[int, ...]:
    letters: set[int] = set()
    for coset_word, generator in constraint:
        for w in (coset_word, generator):
            if w is not None:
                letters.update(abs(t) for t in w)
    return tuple(sorted(letters))


def _cyclic_satisfied(rows, q: int, shifts: Sequence[int]) -> bool:
    """Constraint check in Z/q by integer arithmetic: each clause coset is an
    arithmetic progression a + gZ mod q, and the intersection is empty exactly
    when some pair of progressions disagrees modulo the gcd of their steps."""
    data = []
    for coset_sums, gen_sums in rows:
        a = sum(e * s for e, s in zip(coset_sums, shifts)) % q
        step = 0
        if gen_sums is not None:
            step = sum(e * s for e, s in zip(gen_sums, shifts)) % q
        data.append((a, gcd(step, q)))
    for i in range(len(data)):
        ai, gi = data[i]
        for j in range(i + 1, len(data)):
            aj, gj = data[j]
            if (ai - aj) % gcd(gi, gj):
                return True
    return False


FALLBACK_SAMPLES = 2_000
FALLBACK_CLOSURE_TRIES = 40
FALLBACK_POOL = 10


def _tower_perm(p: int, levels: int, offsets: Sequence[int]) -> Perm:
    """One automorphism of the depth-``levels`` p-ary rooted tree, acting on
    its p^levels leaves; ``offsets`` gives the rotation at each internal
    node, level by level in prefix order."""
    degree = p ** levels
    perm = [0] * degree
    for x in range(degree):
        digits = []
        t = x
        for _ in range(levels):
            digits.append(t % p)
            t //= p
        digits.reverse()
        start = 0
        prefix = 0
        y = 0
        for level, d in enumerate(digits):
            y = y * p + (d + offsets[start + prefix]) % p
            start += p ** level
            prefix = prefix * p + d
        perm[x] = y
    return tuple(perm)


def _constraint_search(
    n: int,
    p: int,
    constraint: Constraint,
    bound: int,
    context: str,
    seed: int = 0,
) -> tuple[FiniteQuotient, int]:
    """First quotient in the p-group library satisfying the constraint;
    returns (quotient, assignments examined). Deterministic order, then a
    seeded randomized fallback.

    Letters absent from the constraint cannot affect it, so assignments put
    non-identity elements on a subset of the occurring letters and the
    identity everywhere else. Subset size is the outer loop: small-support
    witnesses in any group are tried before any group's full enumeration.
    Cyclic groups are checked by exponent-sum arithmetic, the rest by
    evaluating permutations.

    The library stops at nilpotency class 2 for p > 3, and some constraint
    systems (pairs of distinct conjugates of one word) are unsatisfiable in
    any class-2 group. The fallback samples letter images from the Sylow
    p-subgroup of the symmetric group on p^2 or p^3 points, the iterated
    wreath product that contains every p-group acting on that many points;
    a sample is accepted only when the generated group stays inside the
    certification cap, so witnesses remain checkable.
    """
    occurring = _occurring_letters(constraint)
    rows = tuple(
        (
            _letter_sums(coset_word, n),
            _letter_sums(generator, n) if generator is not None else None,
        )
        for coset_word, generator in constraint
    )
    library = group_library(p)
    examined = 0
    for size in range(1, len(occurring) + 1):
        for name, kind, data in library:
            for active in itertools.combinations(occurring, size):
                if kind == "cyclic":
                    choices = itertools.product(range(1, data), repeat=size)
                else:
                    choices = itertools.product(data[1:], repeat=size)
                for values in choices:
                    examined += 1
                    if examined > bound:
                        raise SearchCapError(
                            f"search cap {bound} exhausted in {context}",
                            examined=examined,
                            context=context,
                        )
                    if kind == "cyclic":
                        shifts = [0] * n
                        for letter, v in zip(active, values):
                            shifts[letter - 1] = v
                        if _cyclic_satisfied(rows, data, shifts):
                            images = tuple(
                                tuple((x + shifts[j]) % data for x in range(data))
                                for j in range(n)
                            )
                            return FiniteQuotient.create(n, images, name), examined
                    else:
                        degree = len(data[0])
                        images = [p_identity(degree)] * n
                        for letter, g in zip(active, values):
                            images[letter - 1] = g
                        if constraint_satisfied(_raw_quotient(n, images), constraint):
                            return FiniteQuotient.create(n, images, name), examined
    levels = 3 if p <= 3 else 2
    degree = p ** levels
    nodes = sum(p ** i for i in range(levels))
    rng = random.Random(seed * 1_000_003 + p * 1_009 + levels)
    name = " wr ".join([f"Z/{p}"] * levels) + " sample"
    identity = p_identity(degree)
    misses = 0
    attempts = 0
    best: tuple[int, int, tuple[Perm, ...]] | None = None
    pooled = 0
    while occurring and examined < bound and attempts < FALLBACK_SAMPLES:
        attempts += 1
        examined += 1
        images = [identity] * n
        for letter in occurring:
            offsets = [rng.randrange(p) for _ in range(nodes)]
            images[letter - 1] = _tower_perm(p, levels, offsets)
        raw = _raw_quotient(n, images)
        if not constraint_satisfied(raw, constraint):
            continue
        try:
            order = len(closure(images))
        except ResourceCapError:
            misses += 1
            if misses >= FALLBACK_CLOSURE_TRIES:
                break
            continue
        # score by the smallest coset-space index this sample could give a
        # caller tracking cosets of a clause generator's cyclic image
        score = order
        for _, generator in constraint:
            if generator is not None:
                score = min(score, order // len(raw.cyclic_image(generator)))
        if best is None or (score, order) < (best[0], best[1]):
            best = (score, order, tuple(images))
        pooled += 1
        if pooled >= FALLBACK_POOL:
            break
    if best is not None:
        _, order, images = best
        return FiniteQuotient(n, degree, order, images, name), examined
    raise SearchCapError(
        f"p-group library and sampling exhausted in {context} (examined {examined})",
        examined=examined,
        context=context,
    )


def separate_maximal_cyclic(
    a: Word, g: Word, p: int, bound: int = 500_000, seed: int = 0
) -> SeparationWitness:
    """Witness that g avoids the maximal cyclic subgroup generated by a,
    inside a finite p-group."""
    require_prime(p)
    _, exponent = maximal_root(a)
    if exponent != 1:
        raise PreconditionError(f"{a} is a proper power, not a maximal root")
    n = max(a.n, g.n)
    h = subgroup_graph([a], n)
    if h.contains(g):
        raise PreconditionError(f"{g} lies in the cyclic subgroup of {a}")
    constraint: Constraint = ((g, a), (empty_word(n), a))
    quotient, examined = _constraint_search(
        n, p, constraint, bound, "separate_maximal_cyclic", seed
    )
    transcript = (
        f"images in {quotient.name} (order {quotient.order})",
        f"cyclic image of {a} has {len(quotient.cyclic_image(a))} elements",
        f"image of {g} lies outside it ({examined} homomorphisms examined)",
    )
    return SeparationWitness(
        quotient, a, g, frozenset([p]), frozenset(), transcript
    )


def _raw_quotient(n: int, images) -> FiniteQuotient:
    """Ephemeral quotient for search loops: skips the closure computation."""
    return FiniteQuotient(n, len(images[0]), 0, tuple(images), "?")


def separate_from_cyclic(
    c: Word, g: Word, L: Iterable[int], bound: int = 500_000, seed: int = 0
) -> SeparationWitness:
    """Witness that g avoids the cyclic subgroup generated by c, in a finite
    quotient whose order avoids every prime in L. Requires that subgroup to
    be closed under l-th roots for each l in L."""
    L = frozenset(L)
    for l in sorted(L):
        if not is_prime(l):
            raise InputError(f"{l} in L is not prime")
    if not c:
        raise InputError("cyclic generator must be nontrivial")
    n = max(c.n, g.n)
    h = subgroup_graph([c], n)
    for l in sorted(L):
        res = is_l_root_closed(h, l)
        if not res.closed:
            raise RootClosureError(
                f"the subgroup of {c} is not closed under {l}-th roots",
                witness=res.witness,
                l=l,
            )
    if h.contains(g):
        raise PreconditionError(f"{g} lies in the cyclic subgroup of {c}")

    a, i = maximal_root(c)
    ha = subgroup_graph([a], n)
    if not ha.contains(g):
        # Case 1: g avoids even the maximal cyclic subgroup
        p = smallest_prime_not_in(L)
        base = separate_maximal_cyclic(a, g, p, bound, seed)
        quotient = base.quotient
        assert quotient.evaluate(g) not in quotient.cyclic_image(c)
        transcript = base.transcript + (
            f"maximal root {a} separated; restriction to powers of {c} retained",
        )
        return SeparationWitness(
            quotient, c, g, frozenset([p]), L, transcript
        )

    # Case 2: g is a power of the maximal root a, c = a^i
    e = _power_exponent(a, g)
    m = e % i
    assert m != 0, "membership test should have caught multiples of i"
    p = None
    for cand in sorted(prime_factors(i)):
        if valuation(m, cand) < valuation(i, cand):
            p = cand
            break
    assert p is not None, "i does not divide m, so some prime factor works"
    assert p not in L, "root closure forces the prime factors of i out of L"
    k = valuation(m, p) + 1
    q_order = p ** k
    quotient = _cyclic_quotient_killing(a, n, q_order)
    if quotient is None:
        # every exponent sum of a vanishes mod p: fall back to the library
        constraint: Constraint = ((g, c), (empty_word(n), c))
        quotient, examined = _constraint_search(
            n, p, constraint, bound, "separate_from_cyclic", seed
        )
        transcript = (
            f"power case: g = root^{e}, subgroup = root^{i} powers",
            f"abelian exponent sums of {a} all vanish mod {p}",
            f"library search found {quotient.name} ({examined} homomorphisms)",
        )
    else:
        transcript = (
            f"power case: g = root^{e}, subgroup = root^{i} powers",
            f"prime {p} divides {i} with excess over its share of {m}",
            f"cyclic quotient Z/{q_order} maps the root to a unit",
        )
    assert quotient.evaluate(g) not in quotient.cyclic_image(c)
    return SeparationWitness(quotient, c, g, frozenset([p]), L, transcript)


def _power_exponent(a: Word, g: Word) -> int:
    """g known to be a power of a: find the exponent.

    Lengths are compared after cyclic reduction, since a = u r u^-1 gives
    a^e = u r^e u^-1 and the conjugating prefix does not scale with e.
    """
    _, ra = cyclic_reduce(a)
    _, rg = cyclic_reduce(g)
    e = len(rg) // len(ra)
    for cand in (e, -e):
        if a ** cand == g:
            return cand
    raise AssertionError("membership said g is a power of a, but none matched")


def _cyclic_quotient_killing(a: Word, n: int, q: int) -> FiniteQuotient | None:
    """A homomorphism to Z/q sending a to 1, via exponent sums; None when
    impossible (all exponent sums share the relevant prime)."""
    sums = [0] * n
    for t in a:
        sums[abs(t) - 1] += 1 if t > 0 else -1
    unit_at = None
    for j, s in enumerate(sums):
        if _invertible_mod(s, q):
            unit_at = j
            break
    if unit_at is None:
        return None
    inv = pow(sums[unit_at] % q, -1, q)
    shifts = [0] * n
    shifts[unit_at] = inv
    images = [
        tuple((x + shifts[j]) % q for x in range(q)) for j in range(n)
    ]
    return FiniteQuotient.create(n, images, f"Z/{q}")


def _invertible_mod(s: int, q: int) -> bool:
    return gcd(s % q, q) == 1


# -- coset systems -----------------------------------------------------------------


def separate_coset_system(
    constraints: Sequence[Constraint],
    L: Iterable[int],
    bound: int = 500_000,
    seed: int = 0,
) -> FiniteQuotient:
    """One finite quotient, of order prime to every l in L, in which every
    constraint's coset intersection is empty.

    Built constraint by constraint as a direct product of individual
    witnesses; satisfied constraints stay satisfied under products. Factors
    made redundant by later, stronger ones are pruned, largest first, and
    all constraints are re-verified against the final product.
    """
    L = frozenset(L)
    for l in sorted(L):
        if not is_prime(l):
            raise InputError(f"{l} in L is not prime")
    ns = [w.n for cons in constraints for cl in cons for w in cl if w is not None]
    n = max(ns, default=1)
    q = FiniteQuotient.trivial(n)
    factors: list[FiniteQuotient] = []
    ladder = []
    seen_p = set()
    while len(ladder) < 3:
        p = smallest_prime_not_in(L | seen_p)
        ladder.append(p)
        seen_p.add(p)
    for index, cons in enumerate(constraints):
        if constraint_satisfied(q, cons):
            continue
        found = None
        for p in ladder:
            try:
                found, _ = _constraint_search(
                    n, p, cons, bound, f"constraint {index}", seed
                )
                break
            except SearchCapError:
                continue
        if found is None:
            raise SearchCapError(
                f"no quotient found for constraint {index}",
                constraint_index=index,
            )
        factors.append(found)
        q = direct_product(q, found)

    def assemble(parts: Sequence[FiniteQuotient]) -> FiniteQuotient:
        out = FiniteQuotient.trivial(n)
        for part in parts:
            out = direct_product(out, part)
        return out

    keep = [True] * len(factors)
    for i in sorted(range(len(factors)), key=lambda j: -factors[j].order):
        if sum(keep) <= 1:
            break
        keep[i] = False
        trial = assemble([f for f, k in zip(factors, keep) if k])
        if not all(constraint_satisfied(trial, cons) for cons in constraints):
            keep[i] = True
    q = assemble([f for f, k in zip(factors, keep) if k])
    for index, cons in enumerate(constraints):
        if not constraint_satisfied(q, cons):
            raise SearchCapError(
                f"constraint {index} failed in the assembled product",
                constraint_index=index,
            )
    if prime_factors(q.order) & L:
        raise AssertionError("product order picked up an excluded prime")
    return q
