"""Integer number theory shared by every other module.

Primality, sieving, factorization, modular arithmetic and prime-power
valuations, all on plain Python integers. Every function is pure and
deterministic, so the module is safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class DomainError(ValueError):
    """Input outside an operation's documented domain."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed its configured memory or time budget."""


class FactorizationError(ResourceLimitError):
    """Factoring gave up inside its iteration budget; never a wrong answer."""


# Sieve allocations are capped; a full sweep at 10^8 already needs ~100 MB.
SIEVE_LIMIT = 100_000_000

_TRIAL_DIVISION_BOUND = 1_000_000
_RHO_ITERATION_BUDGET = 1 << 22

# These twelve witnesses decide primality for all n < 3.3 * 10^24 (> 2^64).
_MR_WITNESSES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# Above 2^64: 40 fixed prime bases. A composite passes one Miller-Rabin
# round with probability < 1/4, so the heuristic failure bound is 4^-40.
_MR_WITNESSES_LARGE = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139,
    149, 151, 157, 163, 167, 173,
)


def sieve_primes(bound: int) -> list[int]:
    """All primes <= bound, ascending, by a byte-array Eratosthenes sieve."""
    if bound < 2:
        raise DomainError(f"sieve bound must be >= 2, got {bound}")
    if bound > SIEVE_LIMIT:
        raise ResourceLimitError(f"sieve bound {bound} exceeds limit {SIEVE_LIMIT}")
    flags = bytearray([1]) * (bound + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return [i for i in range(2, bound + 1) if flags[i]]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin below 2^64, 40 fixed bases above."""
    if n < 0:
        raise DomainError("primality is defined for n >= 0 here")
    if n < 2:
        return False
    for p in _MR_WITNESSES_64:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witnesses = _MR_WITNESSES_64 if n < 1 << 64 else _MR_WITNESSES_LARGE
    for a in witnesses:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """A positive integer with its full prime factorization.

    Factors are (prime, exponent) pairs with primes strictly increasing;
    their product reconstructs `value`.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.value < 1:
            raise DomainError("factorizations exist for positive integers only")
        product = 1
        previous = 1
        for p, e in self.factors:
            if p <= previous or e < 1 or not is_prime(p):
                raise DomainError(f"bad factor ({p}, {e}) in factorization of {self.value}")
            previous = p
            product *= p**e
        if product != self.value:
            raise DomainError(f"factors multiply to {product}, not {self.value}")

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def exponent_of(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


@dataclass(frozen=True)
class PrimeRange:
    """The primes p with lo <= p <= hi, minus an explicit excluded set.

    Iteration yields exactly those primes in increasing order. The excluded
    set is how callers realize "almost every prime": bad-reduction primes
    and primes dividing numerators or denominators go here, and reports
    carry the set so a run is reproducible.
    """

    lo: int
    hi: int
    excluded: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if not 2 <= self.lo <= self.hi:
            raise DomainError(f"need 2 <= lo <= hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "excluded", frozenset(self.excluded))

    def __iter__(self):
        skip = self.excluded
        for p in sieve_primes(self.hi):
            if p >= self.lo and p not in skip:
                yield p

    def excluding(self, more) -> "PrimeRange":
        return PrimeRange(self.lo, self.hi, self.excluded | frozenset(more))

    def is_subrange_of(self, other: "PrimeRange") -> bool:
        return (
            self.lo >= other.lo
            and self.hi <= other.hi
            and self.excluded >= other.excluded
        )


def factorize(n: int, *, rho_budget: int = _RHO_ITERATION_BUDGET) -> Factorization:
    """Full factorization: trial division to 10^6, then Brent's rho.

    Exceeding the rho iteration budget raises FactorizationError; there is
    no silent fallback and never an unverified answer.
    """
    if n < 1:
        raise DomainError(f"cannot factor {n}; need n >= 1")
    counts: dict[int, int] = {}
    m = n
    for p in (2, 3, 5):
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    # 2-3-5 wheel
    increments = (4, 2, 4, 2, 4, 6, 2, 6)
    d, i = 7, 0
    while d <= _TRIAL_DIVISION_BOUND and d * d <= m:
        while m % d == 0:
            counts[d] = counts.get(d, 0) + 1
            m //= d
        d += increments[i]
        i = (i + 1) % 8
    pending = [m] if m > 1 else []
    while pending:
        c = pending.pop()
        if c == 1:
            continue
        if is_prime(c):
            counts[c] = counts.get(c, 0) + 1
            continue
        split = _pollard_brent(c, rho_budget)
        pending.append(split)
        pending.append(c // split)
    return Factorization(n, tuple(sorted(counts.items())))


def _pollard_brent(n: int, rho_budget: int) -> int:
    """A nontrivial factor of composite n via Brent-cycle Pollard rho."""
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        y, r, q, g = 2 + c, 1, 1, 1
        x = ys = y
        spent = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            spent += r
            r *= 2
            if spent > rho_budget:
                raise FactorizationError(
                    f"rho budget {rho_budget} exhausted while splitting {n}"
                )
        if g == n:
            # The batched gcd overshot; replay single steps from the saved point.
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise FactorizationError(f"no rho parameter split {n}")


def mod_pow(base: int, exp: int, modulus: int) -> int:
    """base**exp mod modulus for exp >= 0, modulus >= 1."""
    if modulus < 1:
        raise DomainError(f"modulus must be >= 1, got {modulus}")
    if exp < 0:
        raise DomainError(f"exponent must be >= 0, got {exp}")
    return pow(base, exp, modulus)


def multiplicative_order(a: int, p: int) -> int:
    """Least n >= 1 with a^n = 1 mod p, via factoring p - 1 and stripping."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    a %= p
    if a == 0:
        raise DomainError(f"{p} divides the base; order undefined")
    n = p - 1
    for q, _ in factorize(p - 1).factors:
        while n % q == 0 and pow(a, n // q, p) == 1:
            n //= q
    return n


def l_part(n: int, l: int) -> int:
    """Largest power of the prime l dividing n >= 1."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not is_prime(l):
        raise DomainError(f"{l} is not prime")
    part = 1
    while n % l == 0:
        part *= l
        n //= l
    return part


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_x, x = x, old_x - quot * x
        old_y, y = y, old_y - quot * y
    return old_r, old_x, old_y


def modinv(a: int, m: int) -> int:
    """Inverse of a modulo m; DomainError when gcd(a, m) != 1."""
    try:
        return pow(a, -1, m)
    except ValueError:
        raise DomainError(f"{a} has no inverse modulo {m}") from None


def crt_merge(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int] | None:
    """Intersect residue classes r1 mod m1 and r2 mod m2.

    Returns (r, lcm(m1, m2)) describing the intersection, or None when the
    classes are disjoint. Moduli need not be coprime.
    """
    if m1 < 1 or m2 < 1:
        raise DomainError("moduli must be positive")
    g = math.gcd(m1, m2)
    if (r2 - r1) % g != 0:
        return None
    l = m1 // g * m2
    if m2 == g:  # class 2 contains class 1
        return r1 % l, l
    step = (r2 - r1) // g * pow(m1 // g, -1, m2 // g)
    return (r1 + m1 * (step % (m2 // g))) % l, l


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a modulo prime p (the smaller of the pair), or None."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    a %= p
    if p == 2 or a == 0:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)
