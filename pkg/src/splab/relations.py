"""Residue-class machinery behind relation recovery.

A per-prime order condition pins an unknown integer exponent to a residue
class modulo a divisor of the local group order. Classes collected across
primes are intersected by CRT and lifted to balanced (smallest absolute
value) integer candidates, which exact global verification then accepts or
rejects. The same module houses the kernel-containment decision for linear
forms on a cyclic group, used by both the multiplicative and the elliptic
per-prime implication testers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import DomainError, crt_merge, ext_gcd


@dataclass(frozen=True)
class PrimeExponentConstraint:
    """At prime p the exponent is congruent to `residue` mod `modulus`."""

    p: int
    modulus: int
    residue: int

    def __post_init__(self) -> None:
        if self.modulus < 1 or not 0 <= self.residue < self.modulus:
            raise DomainError(
                f"bad constraint at p={self.p}: {self.residue} mod {self.modulus}"
            )

    def admits(self, e: int) -> bool:
        return e % self.modulus == self.residue


class ConstraintConflict(Exception):
    """Two per-prime constraints exclude each other; no integer satisfies both."""

    def __init__(self, first: PrimeExponentConstraint, second: PrimeExponentConstraint):
        super().__init__(
            f"e = {first.residue} mod {first.modulus} (p={first.p}) conflicts with "
            f"e = {second.residue} mod {second.modulus} (p={second.p})"
        )
        self.first = first
        self.second = second


def fold_constraints(
    constraints: list[PrimeExponentConstraint] | tuple[PrimeExponentConstraint, ...],
) -> tuple[int, int]:
    """Intersect constraints into one class (residue, modulus).

    The fold is an associative, commutative meet, so any evaluation order
    gives the same class. Raises ConstraintConflict carrying a concrete
    incompatible pair: when the running intersection rejects a constraint,
    some single earlier constraint already disagrees with it pairwise
    (pairwise-compatible congruences are always simultaneously solvable).
    """
    residue, modulus = 0, 1
    seen: list[PrimeExponentConstraint] = []
    for c in constraints:
        merged = crt_merge(residue, modulus, c.residue, c.modulus)
        if merged is None:
            for earlier in seen:
                g = math.gcd(earlier.modulus, c.modulus)
                if (earlier.residue - c.residue) % g != 0:
                    raise ConstraintConflict(earlier, c)
            raise AssertionError("intersection failed without a pairwise conflict")
        residue, modulus = merged
        seen.append(c)
    return residue, modulus


def balanced_candidates(residue: int, modulus: int) -> list[int]:
    """Nonzero representatives of a residue class, nearest to zero first.

    Ties between e and -e prefer the positive sign. Zero is skipped: a zero
    exponent cannot relate elements of infinite order.
    """
    r = residue % modulus
    candidates = {r, r - modulus, r + modulus}
    candidates.discard(0)
    return sorted(candidates, key=lambda e: (abs(e), -e))


@dataclass(frozen=True)
class RelationWitness:
    """Outcome of a relation search, exact-verification status included.

    kind is one of:
      "exponent"     -- verified integer e relating every coordinate pair
      "pairs"        -- verified coefficient pairs (alpha, beta)
      "refuted"      -- a concrete prime (and usually a vector m) rules the
                        relation out
      "inconclusive" -- nothing failed, but no candidate verified inside the
                        searched bounds; the collected constraints are kept
    """

    kind: str
    exponent: int | None = None
    pairs: tuple[tuple[int, int], ...] | None = None
    refuted_prime: int | None = None
    refuted_witness: tuple[int, ...] | None = None
    conflict: tuple[PrimeExponentConstraint, PrimeExponentConstraint] | None = None
    constraints: tuple[PrimeExponentConstraint, ...] = ()
    bound: int | None = None

    @classmethod
    def verified(cls, e, constraints=()):
        return cls(kind="exponent", exponent=e, constraints=tuple(constraints))

    @classmethod
    def pairs_found(cls, pairs):
        return cls(kind="pairs", pairs=tuple(pairs))

    @classmethod
    def refuted(cls, p, witness=None):
        return cls(
            kind="refuted",
            refuted_prime=p,
            refuted_witness=None if witness is None else tuple(witness),
        )

    @classmethod
    def refuted_by_conflict(cls, conflict: ConstraintConflict):
        return cls(
            kind="refuted",
            refuted_prime=conflict.second.p,
            conflict=(conflict.first, conflict.second),
        )

    @classmethod
    def inconclusive(cls, constraints=(), bound=None):
        return cls(kind="inconclusive", constraints=tuple(constraints), bound=bound)


def cyclic_kernel_containment(
    avec: list[int] | tuple[int, ...],
    bvec: list[int] | tuple[int, ...],
    order: int,
) -> tuple:
    """Decide kernel containment of two linear forms on a cyclic group.

    Working in Z/order with coefficient vectors a, b of equal length s:
    decides whether every integer vector m with sum(m_i * a_i) = 0 also has
    sum(m_i * b_i) = 0. Positivity of m never matters, because each residue
    class mod `order` has positive representatives.

    Containment holds exactly when b = c*a (mod order) for some c; the
    solutions c form a residue class. Returns one of
      ("vacuous",)                 all a_i and b_i vanish,
      ("holds", residue, modulus)  the class of admissible c,
      ("fails", m)                 m in [1, order]^s satisfying the
                                   antecedent but not the consequent.
    """
    n = order
    if n < 1 or len(avec) != len(bvec) or not avec:
        raise DomainError("need equal-length nonempty vectors and order >= 1")
    a = [x % n for x in avec]
    b = [x % n for x in bvec]
    if all(x == 0 for x in a) and all(x == 0 for x in b):
        return ("vacuous",)
    residue, modulus = 0, 1
    solved: list[tuple[int, int, int]] = []  # (index, c_i, M_i)
    for i in range(len(a)):
        ai, bi = a[i], b[i]
        if ai == 0 and bi == 0:
            continue
        g = math.gcd(ai, n)  # == n when ai == 0
        if bi % g != 0:
            # m_i * a_i kills the antecedent while m_i * b_i survives.
            m = [n] * len(a)
            m[i] = n // g
            return ("fails", tuple(m))
        m_i = n // g
        c_i = (bi // g) * pow(ai // g, -1, m_i) % m_i if m_i > 1 else 0
        merged = crt_merge(residue, modulus, c_i, m_i)
        if merged is None:
            for j, c_j, m_j in solved:
                if (c_j - c_i) % math.gcd(m_j, m_i) != 0:
                    return ("fails", _pair_witness(a, b, n, j, i))
            raise AssertionError("no pairwise conflict behind failed merge")
        residue, modulus = merged
        solved.append((i, c_i, m_i))
    return ("holds", residue, modulus)


def _pair_witness(a: list[int], b: list[int], n: int, i: int, j: int) -> tuple[int, ...]:
    """A violating vector supported on two jointly unsolvable coordinates.

    The sublattice {(u, v): u*a_i + v*a_j = 0 mod n} has basis
      t1 = (a_j/d, -a_i/d),              d = gcd(a_i, a_j)  (exact kernel)
      t2 = (x, y) * (n / gcd(d, n)),     x*a_i + y*a_j = d   (value lcm(d, n))
    so containment restricted to these coordinates fails on t1 or on t2.
    Entries are lifted to positive representatives in [1, n]; remaining
    coordinates get m_k = n, contributing zero to both sides.
    """
    ai, aj = a[i], a[j]
    d = math.gcd(ai, aj)
    scale = n // math.gcd(d, n)
    _, x, y = ext_gcd(ai, aj)
    for u, v in ((aj // d, -(ai // d)), (x * scale, y * scale)):
        if (u * b[i] + v * b[j]) % n != 0:
            m = [n] * len(a)
            m[i] = u % n or n
            m[j] = v % n or n
            return tuple(m)
    raise AssertionError("pair conflict produced no violating vector")
