"""Small number-theoretic helpers shared across modules."""

from __future__ import annotations

from .errors import InputError


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


def require_prime(p: int) -> int:
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    return p


def primes() :
    """All primes in increasing order."""
    m = 2
    while True:
        if is_prime(m):
            yield m
        m += 1


def smallest_prime_not_in(excluded) -> int:
    ex = set(excluded)
    for p in primes():
        if p not in ex:
            return p
    raise AssertionError("unreachable")


def valuation(m: int, p: int) -> int:
    """Largest k with p^k dividing m (m nonzero)."""
    if m == 0:
        raise InputError("valuation of 0 is infinite")
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return k


def is_smooth(m: int, allowed) -> bool:
    """True iff every prime factor of m lies in ``allowed``."""
    if m < 1:
        return False
    for p in sorted(set(allowed)):
        while m % p == 0:
            m //= p
    return m == 1
