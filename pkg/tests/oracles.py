"""Brute-force reference implementations used to validate the library.

Everything here works on plain tuples of signed ints (letter i, inverse -i)
and avoids the library's graph machinery entirely. The membership oracle is
asymmetric by design:

  * positive answers are proofs (the word was literally assembled as a
    product of generators),
  * negative answers are bounded (not expressible within ``max_factors``
    factors), so callers escalate the factor budget before treating a
    library/oracle mismatch as a failure.
"""

from __future__ import annotations


def inv(w: tuple) -> tuple:
    return tuple(-x for x in reversed(w))


def red_concat(a: tuple, b: tuple) -> tuple:
    """Free reduction of the concatenation of two reduced words."""
    la = list(a)
    j = 0
    nb = len(b)
    while la and j < nb and la[-1] == -b[j]:
        la.pop()
        j += 1
    return tuple(la) + b[j:]


def reduce_tuple(raw) -> tuple:
    out = []
    for x in raw:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def power(w: tuple, k: int) -> tuple:
    if k < 0:
        return power(inv(w), -k)
    acc: tuple = ()
    for _ in range(k):
        acc = red_concat(acc, w)
    return acc


def ball(n: int, radius: int) -> list[tuple]:
    """All reduced words of length <= radius, shortest first (includes ())."""
    letters = [i for i in range(1, n + 1)] + [-i for i in range(1, n + 1)]
    out: list[tuple] = [()]
    frontier: list[tuple] = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for t in letters:
                if w and w[-1] == -t:
                    continue
                nxt.append(w + (t,))
        out.extend(nxt)
        frontier = nxt
    return out


def closure(gens, max_factors: int, lmax: int) -> set[tuple]:
    """Every element of <gens> expressible as a product of at most
    ``max_factors`` generators or inverse generators, pruned so that all
    words of length <= lmax among such products are present.

    A partial product longer than lmax + (remaining factors) * max|gen|
    cannot shrink back below lmax, so dropping it loses nothing.
    """
    gens = [tuple(g) for g in gens if len(g) > 0]
    if not gens:
        return {()}
    factors = gens + [inv(g) for g in gens]
    maxlen = max(len(g) for g in gens)
    best: dict[tuple, int] = {(): 0}
    frontier = [()]
    for used in range(1, max_factors + 1):
        cap = lmax + (max_factors - used) * maxlen
        nxt = []
        for w in frontier:
            for f in factors:
                p = red_concat(w, f)
                if len(p) > cap:
                    continue
                if p not in best:
                    best[p] = used
                    nxt.append(p)
        frontier = nxt
        if not frontier:
            break
    return set(best)


def smallest_period(w: tuple) -> int:
    """Smallest p with w[k] == w[k-p] for all k >= p (classic doubling trick)."""
    m = len(w)
    if m == 0:
        return 0
    doubled = (w + w)[1:-1]
    for start in range(m - 1):
        if doubled[start:start + m] == w:
            return start + 1
    return m


def naive_cyclic_core(w: tuple) -> tuple[tuple, tuple]:
    """(conjugator u, core c) with w = u c u^-1 and c cyclically reduced."""
    u: list[int] = []
    c = list(w)
    while len(c) >= 2 and c[0] == -c[-1]:
        u.append(c[0])
        c = c[1:-1]
    return tuple(u), tuple(c)


def oracle_maximal_root(w: tuple) -> tuple[tuple, int]:
    """Reference maximal root via the string-period of the cyclic core."""
    u, c = naive_cyclic_core(w)
    if not c:
        raise ValueError("no root of the empty word")
    p = smallest_period(c)
    if len(c) % p != 0:
        p = len(c)
    root = red_concat(red_concat(u, c[:p]), inv(u))
    return root, len(c) // p


def oracle_membership_table(gens, queries, max_factors: int) -> dict[tuple, bool]:
    """True entries are proofs of membership; False entries are bounded."""
    queries = [tuple(q) for q in queries]
    lmax = max((len(q) for q in queries), default=0)
    cl = closure(gens, max_factors, lmax)
    return {q: q in cl for q in queries}


def oracle_malnormality_violation(
    gens,
    n: int,
    library_contains,
    t_radius: int = 6,
    h_radius: int = 8,
    max_factors: int = 9,
    cl: set | None = None,
):
    """Search for (t, h): t outside the subgroup, h and t h t^-1 inside.

    ``library_contains`` supplies the membership filter for t; the closure
    set supplies membership proofs for h and the conjugate. Any t on which
    the filter and the closure disagree positively is surfaced separately
    by the membership comparison, so using both keeps this check sound.
    Returns (t, h) or None. ``cl`` may be a precomputed closure built with
    lmax >= h_radius + 2 * t_radius.
    """
    if cl is None:
        cl = closure(gens, max_factors, h_radius + 2 * t_radius)
    hs = sorted(
        (w for w in cl if 0 < len(w) <= h_radius), key=lambda w: (len(w), w)
    )
    for t in ball(n, t_radius):
        if not t or t in cl or library_contains(t):
            continue
        ti = inv(t)
        for h in hs:
            conj = red_concat(red_concat(t, h), ti)
            if conj in cl:
                return t, h
    return None


def oracle_root_violation(
    gens,
    n: int,
    ell: int,
    library_contains,
    w_radius: int = 6,
    max_factors: int = 9,
    cl: set | None = None,
):
    """Search for w with w^ell in the subgroup but w outside. Returns w or
    None. Same soundness contract as the malnormality search. ``cl`` may be
    a precomputed closure built with lmax >= w_radius * ell."""
    if cl is None:
        cl = closure(gens, max_factors, w_radius * ell)
    for w in ball(n, w_radius):
        if not w:
            continue
        if power(w, ell) in cl and w not in cl and not library_contains(w):
            return w
    return None


def all_small_generating_sets(n: int, max_len: int, max_gens: int):
    """Every nonempty set of at most max_gens nonempty reduced words of
    length <= max_len, as tuples of letter tuples, deterministic order."""
    assert 1 <= max_gens <= 2
    words = [w for w in ball(n, max_len) if w]
    sets = []
    for w in words:
        sets.append((w,))
    if max_gens >= 2:
        for i, w in enumerate(words):
            for v in words[i + 1:]:
                sets.append((w, v))
    return sets
