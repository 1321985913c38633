"""The multiplicative group of Q as a reduction system.

Nonzero rationals reduce modulo good primes to the cyclic group F_p*.
This module computes support sets, runs the support-equality witness
search for a pair of rationals, decides the per-prime exponent condition
(whether every multiplicative relation among the reductions of one tuple
forces the same relation among the reductions of another), and recovers
the global exponent the condition pins down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    DomainError,
    PrimeRange,
    crt_merge,
    factorize,
    is_prime,
    multiplicative_order,
    sieve_primes,
)
from .parallel import prime_map
from .relations import (
    ConstraintConflict,
    PrimeExponentConstraint,
    RelationWitness,
    balanced_candidates,
    cyclic_kernel_containment,
    fold_constraints,
)


@dataclass(frozen=True)
class MulElement:
    """A nonzero rational in canonical lowest terms (denominator > 0)."""

    numerator: int
    denominator: int = 1

    def __post_init__(self) -> None:
        if self.numerator == 0:
            raise DomainError("0 is not a multiplicative-group element")
        if self.denominator <= 0:
            raise DomainError(f"denominator must be positive, got {self.denominator}")
        if math.gcd(abs(self.numerator), self.denominator) != 1:
            raise DomainError(
                f"{self.numerator}/{self.denominator} is not in lowest terms"
            )

    @classmethod
    def from_rational(cls, value) -> "MulElement":
        f = Fraction(value)
        return cls(f.numerator, f.denominator)

    @classmethod
    def parse(cls, text: str) -> "MulElement":
        """Parse "n" or "n/d"."""
        try:
            return cls.from_rational(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse element {text!r}: {exc}") from None

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def is_unit(self) -> bool:
        """True for 1 and -1, the torsion of Q*."""
        return abs(self.numerator) == 1 and self.denominator == 1

    def __str__(self) -> str:
        if self.denominator == 1:
            return str(self.numerator)
        return f"{self.numerator}/{self.denominator}"


def supp(m: int) -> frozenset[int]:
    """The set of primes dividing the positive integer m; supp(1) is empty."""
    if m < 1:
        raise DomainError(f"support is defined for positive integers, got {m}")
    return frozenset(factorize(m).primes())


def bad_primes(elements) -> frozenset[int]:
    """Primes dividing some numerator or denominator; reduction elsewhere is good."""
    out: frozenset[int] = frozenset()
    for x in elements:
        out |= supp(abs(x.numerator)) | supp(x.denominator)
    return out


def reduce_element(x: MulElement, p: int) -> int:
    """The residue of x in F_p* at a good prime p."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if x.numerator % p == 0 or x.denominator % p == 0:
        raise DomainError(f"{p} divides numerator or denominator of {x}")
    return x.numerator * pow(x.denominator, -1, p) % p


def reduction_order(x: MulElement, p: int) -> int:
    """Multiplicative order of the reduction of x at the good prime p."""
    return multiplicative_order(reduce_element(x, p), p)


@dataclass(frozen=True)
class SupportWitness:
    """Least (n, prime) at which the supports of x^n - 1 and y^n - 1 differ."""

    n: int
    prime: int
    side: str  # "x" or "y": whose support contains the prime


@dataclass(frozen=True)
class SupportReport:
    x: MulElement
    y: MulElement
    n_max: int
    p_max: int
    verdict: str  # "equal-in-range" | "witness"
    witness: SupportWitness | None
    excluded: tuple[int, ...]


def _member(num: int, den: int, n: int, p: int) -> bool:
    """Whether p divides the numerator of x^n - 1, for x = num/den coprime to p.

    Order criterion: p | num^n - den^n iff (num/den)^n = 1 in F_p*, i.e. iff
    the reduction order of x divides n.
    """
    if den == 1:
        return pow(num, n, p) == 1
    return pow(num, n, p) == pow(den, n, p)


def erdos_test(x: MulElement, y: MulElement, n_max: int, p_max: int) -> SupportReport:
    """Search for (n, p) where the supports of x^n - 1 and y^n - 1 differ.

    Scans n = 1..n_max and, per level, good primes p <= p_max in increasing
    order, so a returned witness has the least n and, within it, the least
    prime. Membership uses the order criterion; witnesses at n <= 12 are
    cross-checked against a direct factorization of both values.
    """
    for z in (x, y):
        if z.is_unit():
            raise DomainError(f"degenerate element {z}; need |x| not in {{0, 1}}")
    if n_max < 1 or p_max < 2:
        raise DomainError(f"need n_max >= 1 and p_max >= 2, got {n_max}, {p_max}")
    excluded = tuple(sorted(bad_primes([x, y])))
    if x == y:
        # identical elements have identical supports at every n
        return SupportReport(x, y, n_max, p_max, "equal-in-range", None, excluded)
    skip = set(excluded)
    primes = [p for p in sieve_primes(p_max) if p not in skip]
    nx, dx = x.numerator, x.denominator
    ny, dy = y.numerator, y.denominator
    for n in range(1, n_max + 1):
        for p in primes:
            mx = _member(nx, dx, n, p)
            my = _member(ny, dy, n, p)
            if mx != my:
                witness = SupportWitness(n, p, "x" if mx else "y")
                if n <= 12:
                    _crosscheck_witness(x, y, witness)
                return SupportReport(x, y, n_max, p_max, "witness", witness, excluded)
    return SupportReport(x, y, n_max, p_max, "equal-in-range", None, excluded)


def _crosscheck_witness(x: MulElement, y: MulElement, w: SupportWitness) -> None:
    vx = abs(x.numerator**w.n - x.denominator**w.n)
    vy = abs(y.numerator**w.n - y.denominator**w.n)
    in_x = vx > 0 and w.prime in supp(vx)
    in_y = vy > 0 and w.prime in supp(vy)
    if in_x == in_y or (w.side == "x") != in_x:
        raise AssertionError(f"order criterion disagrees with factorization at {w}")


@dataclass(frozen=True)
class SchinzelReport:
    """Per-prime decision of the multiplicative exponent condition.

    status "holds": every positive vector m with prod p_i^m_i = 1 (mod p)
    also has prod q_i^m_i = 1 (mod p); the admissible per-prime exponents
    form the attached residue class. status "fails": witness_m is a
    concrete violating vector. status "vacuous": all reductions are 1.
    """

    p: int
    status: str  # "holds" | "fails" | "vacuous"
    constraint: PrimeExponentConstraint | None = None
    witness_m: tuple[int, ...] | None = None


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    cofactors = [(p - 1) // q for q in factorize(p - 1).primes()]
    g = 2
    while True:
        if all(pow(g, c, p) != 1 for c in cofactors):
            return g
        g += 1


def _bsgs_dlog(h: int, g: int, q: int, p: int) -> int | None:
    """x in [0, q) with g^x = h mod p, where g has order q; None if absent."""
    m = math.isqrt(q - 1) + 1
    table: dict[int, int] = {}
    e = 1
    for j in range(m):
        table.setdefault(e, j)
        e = e * g % p
    giant = pow(g, -m, p)
    w = h
    for i in range(m + 1):
        j = table.get(w)
        if j is not None:
            x = i * m + j
            return x if x < q else x % q
        w = w * giant % p
    return None


def dlog_mod(target: int, base: int, p: int, base_order: int) -> int | None:
    """Least e >= 0 with base^e = target mod p, or None if target is outside
    the subgroup generated by base.

    Pohlig-Hellman over the factorization of base_order, baby-step
    giant-step inside each prime-power part.
    """
    target %= p
    base %= p
    if target == 1:
        return 0
    residues: list[int] = []
    moduli: list[int] = []
    for q, e in factorize(base_order).factors:
        qe = q**e
        g_q = pow(base, base_order // qe, p)
        t_q = pow(target, base_order // qe, p)
        gamma = pow(g_q, q ** (e - 1), p)
        x = 0
        for k in range(e):
            h = pow(t_q * pow(g_q, -x, p) % p, q ** (e - 1 - k), p)
            digit = _bsgs_dlog(h, gamma, q, p)
            if digit is None:
                return None
            x += digit * q**k
        residues.append(x)
        moduli.append(qe)
    e, m = 0, 1
    for r_i, m_i in zip(residues, moduli):
        e, m = crt_merge(e, m, r_i, m_i)  # prime-power moduli are coprime
    if pow(base, e, p) != target:
        return None
    return e


def schinzel_condition_at(ps, qs, p: int) -> SchinzelReport:
    """Decide the per-prime exponent condition for tuples of rationals.

    With a_i, b_i the discrete logs of the reductions of p_i, q_i in the
    cyclic group F_p* of order N = p - 1, the implication
        prod p_i^m_i = 1 (mod p)  =>  prod q_i^m_i = 1 (mod p)
    for all positive integer vectors m is exactly kernel containment of the
    linear forms m -> sum(m_i a_i), m -> sum(m_i b_i) on Z/N, which holds
    iff b = c*a (mod N) for some c. The restriction to positive m costs
    nothing: every residue class mod N has positive representatives.
    """
    ps = list(ps)
    qs = list(qs)
    if not ps or len(ps) != len(qs):
        raise DomainError("need equally many p_i and q_i, at least one pair")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p in bad_primes(ps + qs):
        raise DomainError(f"{p} divides a numerator or denominator")
    n = p - 1
    rs = [reduce_element(x, p) for x in ps]
    ss = [reduce_element(x, p) for x in qs]
    if all(r == 1 for r in rs) and all(s == 1 for s in ss):
        return SchinzelReport(p, "vacuous")
    g = _primitive_root(p)
    a = [dlog_mod(r, g, p, n) for r in rs]
    b = [dlog_mod(s, g, p, n) for s in ss]
    if any(v is None for v in a + b):
        raise AssertionError(f"discrete log failed in the full group F_{p}*")
    outcome = cyclic_kernel_containment(a, b, n)
    if outcome[0] == "vacuous":
        return SchinzelReport(p, "vacuous")
    if outcome[0] == "fails":
        m = outcome[1]
        _check_violation(rs, ss, m, p)
        return SchinzelReport(p, "fails", witness_m=m)
    _, residue, modulus = outcome
    for r_i, s_i in zip(rs, ss):
        if pow(r_i, residue, p) != s_i:
            raise AssertionError(f"exponent class {residue} mod {modulus} fails at {p}")
    return SchinzelReport(
        p, "holds", constraint=PrimeExponentConstraint(p, modulus, residue)
    )


def _check_violation(rs, ss, m, p) -> None:
    ante = math.prod(pow(r, k, p) for r, k in zip(rs, m)) % p
    cons = math.prod(pow(s, k, p) for s, k in zip(ss, m)) % p
    if ante != 1 or cons == 1:
        raise AssertionError(f"bogus violating vector {m} at prime {p}")


def recover_exponent_mul(
    ps, qs, prime_range: PrimeRange, threads: int = 1
) -> RelationWitness:
    """Recover the integer e with q_i = p_i^e, or refute that it exists.

    Per good prime in the range the exponent condition yields a residue
    class for e; classes are intersected by CRT, lifted to the balanced
    integer candidates, and each candidate is verified exactly in Q. A
    failing prime (or a pair of incompatible classes) refutes; a class with
    no exactly-verifying candidate is reported inconclusive together with
    the collected constraints.
    """
    ps = list(ps)
    qs = list(qs)
    if not ps or len(ps) != len(qs):
        raise DomainError("need equally many p_i and q_i, at least one pair")
    for x in ps + qs:
        if x.is_unit():
            raise DomainError(f"{x} has finite order; need elements of infinite order")
    primes = list(prime_range.excluding(bad_primes(ps + qs)))
    if not primes:
        raise DomainError("prime range contains no usable primes")
    reports = prime_map(lambda p: schinzel_condition_at(ps, qs, p), primes, threads)
    constraints: list[PrimeExponentConstraint] = []
    for rep in reports:
        if rep.status == "fails":
            return RelationWitness.refuted(rep.p, rep.witness_m)
        if rep.status == "holds":
            constraints.append(rep.constraint)
    try:
        residue, modulus = fold_constraints(constraints)
    except ConstraintConflict as conflict:
        return RelationWitness.refuted_by_conflict(conflict)
    for e in balanced_candidates(residue, modulus):
        if all(y.value == x.value**e for x, y in zip(ps, qs)):
            return RelationWitness.verified(e, constraints)
    return RelationWitness.inconclusive(constraints)
