"""Prime sweeps for prescribed prime-power reduction orders.

Given elements of Q* or rational points on a curve, a prime l and target
exponents (k_1, ..., k_s), a sweep scans a prime range and reports every p
where the l-part of the reduction order of the t-th input equals l^{k_t}
for all t simultaneously. Infinitely many such primes exist when the
inputs are independent and of infinite order; a sweep only certifies the
matches it found, and an empty match list never claims a refutation.

p = l and bad-reduction primes are excluded, and the exclusion list rides
along in the report. Linear independence of the inputs is not checked
here: it is the caller's responsibility (the dependence module offers a
bounded heuristic check).
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import DomainError, PrimeRange, is_prime, l_part
from .elliptic import EllipticCurve, RationalPoint, good_primes, point_order, reduce_point
from .mulgroup import MulElement, bad_primes, reduction_order
from .parallel import prime_map


@dataclass(frozen=True)
class OrderProfile:
    """A prime l and one target exponent per swept input."""

    l: int
    ks: tuple[int, ...]

    def __post_init__(self) -> None:
        if not is_prime(self.l):
            raise DomainError(f"profile base {self.l} is not prime")
        object.__setattr__(self, "ks", tuple(self.ks))
        if not self.ks or any(k < 0 for k in self.ks):
            raise DomainError("profile needs at least one exponent, all >= 0")

    def targets(self) -> tuple[int, ...]:
        return tuple(self.l**k for k in self.ks)


@dataclass(frozen=True)
class SweepRow:
    p: int
    lparts: tuple[int, ...]
    match: bool


@dataclass(frozen=True)
class SweepReport:
    """Outcome of one sweep.

    matches lists every prime where all l-parts hit their targets; scanned
    counts the primes examined. rows carries the per-prime l-part vectors
    when the caller asked to keep them. An empty match list means "no match
    in this range", never a refutation.
    """

    profile: OrderProfile
    lo: int
    hi: int
    excluded: tuple[int, ...]
    matches: tuple[int, ...]
    scanned: int
    rows: tuple[SweepRow, ...] | None = None


def _run_sweep(profile, prime_range, lparts_at, threads, keep_rows) -> SweepReport:
    primes = list(prime_range)
    if not primes:
        raise DomainError(
            f"no primes to scan in [{prime_range.lo}, {prime_range.hi}] "
            f"after exclusions"
        )
    targets = profile.targets()

    def work(p: int) -> SweepRow:
        lparts = lparts_at(p)
        return SweepRow(p, lparts, lparts == targets)

    rows = prime_map(work, primes, threads)
    return SweepReport(
        profile=profile,
        lo=prime_range.lo,
        hi=prime_range.hi,
        excluded=tuple(sorted(prime_range.excluded)),
        matches=tuple(r.p for r in rows if r.match),
        scanned=len(rows),
        rows=tuple(rows) if keep_rows else None,
    )


def sweep_mul(
    xs,
    profile: OrderProfile,
    prime_range: PrimeRange,
    threads: int = 1,
    keep_rows: bool = False,
) -> SweepReport:
    """Primes p where l_part(ord_p(x_t)) = l^{k_t} for every t."""
    xs = list(xs)
    if len(xs) != len(profile.ks):
        raise DomainError(f"profile has {len(profile.ks)} exponents for {len(xs)} elements")
    for x in xs:
        if x.is_unit():
            raise DomainError(f"{x} has finite order; sweeps need infinite order")
    effective = prime_range.excluding(bad_primes(xs) | {profile.l})

    def lparts_at(p: int) -> tuple[int, ...]:
        return tuple(l_part(reduction_order(x, p), profile.l) for x in xs)

    return _run_sweep(profile, effective, lparts_at, threads, keep_rows)


def sweep_ec(
    E: EllipticCurve,
    points,
    profile: OrderProfile,
    prime_range: PrimeRange,
    threads: int = 1,
    keep_rows: bool = False,
) -> SweepReport:
    """Primes p where l_part(order of the reduction of P_t) = l^{k_t} for every t.

    Points must lie on E; they are assumed nontorsion and, for the
    guarantee that matches keep appearing, independent over Z. Neither is
    verified here.
    """
    points = list(points)
    if len(points) != len(profile.ks):
        raise DomainError(f"profile has {len(profile.ks)} exponents for {len(points)} points")
    for P in points:
        if not E.contains(P):
            raise DomainError(f"{P} is not on {E}")
    effective = good_primes(E, prime_range).excluding({profile.l})

    def lparts_at(p: int) -> tuple[int, ...]:
        return tuple(
            l_part(point_order(E, reduce_point(E, P, p), p), profile.l) for P in points
        )

    return _run_sweep(profile, effective, lparts_at, threads, keep_rows)
