"""The support-problem engine.

Tests, prime by prime, whether every additive relation among the
reductions of one tuple of points forces the same relation among the
reductions of a second tuple, and inverts the phenomenon: when the
implication holds everywhere sampled, it recovers the integer e with
Q_i = e * P_i (verified exactly in the global group), and for a single
pair it searches bounded coefficients alpha, beta with
alpha * P + beta * Q = 0.

Both reduction systems are supported: the multiplicative group of Q and
the points of an elliptic curve over Q. Per-prime decisions are exact for
s = 1 and whenever the reductions live in one cyclic subgroup; otherwise a
bounded box search is used and flagged as such. "Almost every prime" is
realized as all good primes of the user's range minus an explicit
exclusion list.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .arith import DomainError, PrimeRange, factorize, is_prime, multiplicative_order
from .elliptic import (
    EllipticCurve,
    FieldPoint,
    RationalPoint,
    add,
    certainly_nontorsion,
    dlog_in_cyclic,
    point_order,
    reduce_point,
    scalar_mul,
)
from .mulgroup import (
    MulElement,
    bad_primes,
    dlog_mod,
    reduce_element,
    schinzel_condition_at,
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

DEFAULT_M_BOUND = 16


class MulSystem:
    """Q* with its reductions to F_p*."""

    name = "mul"

    def bad_primes(self, elements) -> frozenset[int]:
        return bad_primes(elements)

    def check_element(self, x) -> None:
        if not isinstance(x, MulElement):
            raise DomainError(f"{x!r} is not a multiplicative element")

    def check_infinite_order(self, x: MulElement) -> None:
        if x.is_unit():
            raise DomainError(f"{x} has finite order in Q*")

    def reduce(self, x: MulElement, p: int) -> int:
        return reduce_element(x, p)

    def is_identity(self, r: int, p: int) -> bool:
        return r == 1

    def local_add(self, r1: int, r2: int, p: int) -> int:
        return r1 * r2 % p

    def local_scale(self, m: int, r: int, p: int) -> int:
        return pow(r, m, p)

    def local_order(self, r: int, p: int) -> int:
        return 1 if r == 1 else multiplicative_order(r, p)

    def local_dlog(self, base: int, target: int, p: int) -> int | None:
        return dlog_mod(target, base, p, self.local_order(base, p))

    def global_power_equals(self, e: int, x: MulElement, y: MulElement) -> bool:
        return y.value == x.value**e

    def pair_relation_holds(self, alpha: int, x, beta: int, y) -> bool:
        return x.value**alpha * y.value**beta == 1


class EcSystem:
    """E(Q) with its reductions to E(F_p)."""

    name = "ec"

    def __init__(self, curve: EllipticCurve):
        self.curve = curve

    def bad_primes(self, points) -> frozenset[int]:
        return frozenset(factorize(abs(self.curve.discriminant)).primes())

    def check_element(self, P) -> None:
        if not isinstance(P, RationalPoint):
            raise DomainError(f"{P!r} is not a rational point")
        if not self.curve.contains(P):
            raise DomainError(f"{P} is not on {self.curve}")

    def check_infinite_order(self, P: RationalPoint) -> None:
        if not certainly_nontorsion(self.curve, P):
            raise DomainError(
                f"{P} was not certified nontorsion (reduction orders stayed <= 16)"
            )

    def reduce(self, P: RationalPoint, p: int) -> FieldPoint:
        return reduce_point(self.curve, P, p)

    def is_identity(self, R: FieldPoint, p: int) -> bool:
        return R.is_infinity

    def local_add(self, R1: FieldPoint, R2: FieldPoint, p: int) -> FieldPoint:
        return add(self.curve, R1, R2, p)

    def local_scale(self, m: int, R: FieldPoint, p: int) -> FieldPoint:
        return scalar_mul(self.curve, m, R, p)

    def local_order(self, R: FieldPoint, p: int) -> int:
        return point_order(self.curve, R, p)

    def local_dlog(self, base: FieldPoint, target: FieldPoint, p: int) -> int | None:
        return dlog_in_cyclic(self.curve, base, target, p)

    def global_power_equals(self, e: int, P: RationalPoint, Q: RationalPoint) -> bool:
        return scalar_mul(self.curve, e, P) == Q

    def pair_relation_holds(self, alpha: int, P, beta: int, Q) -> bool:
        return add(
            self.curve, scalar_mul(self.curve, alpha, P), scalar_mul(self.curve, beta, Q)
        ).is_infinity


@dataclass(frozen=True)
class ImplicationReport:
    """Per-prime decision of the relation implication.

    status: "holds" and "fails" are exact; "holds-up-to-bound" means a box
    search up to `bound` found no violation but did not cover a full period
    vector; "vacuous" means the antecedent is never satisfied (affine case)
    or every reduction involved is trivial.

    method records how the decision was reached: "exact-s1" (order
    divisibility / coset reasoning for one pair), "cyclic" (kernel
    containment inside one cyclic subgroup), or "box" (brute force over
    positive vectors up to `bound`).
    """

    system: str
    p: int
    status: str
    method: str
    witness_m: tuple[int, ...] | None = None
    bound: int | None = None
    constraint: PrimeExponentConstraint | None = None


def _check_local_violation(system, p, rps, rqs, tp, tq, m) -> None:
    ante = tp
    cons = tq
    # recompute both sides; a returned witness must truly separate them
    lhs = None
    rhs = None
    for m_i, rp_i, rq_i in zip(m, rps, rqs):
        piece_p = system.local_scale(m_i, rp_i, p)
        piece_q = system.local_scale(m_i, rq_i, p)
        lhs = piece_p if lhs is None else system.local_add(lhs, piece_p, p)
        rhs = piece_q if rhs is None else system.local_add(rhs, piece_q, p)
    if lhs != ante or rhs == cons:
        raise AssertionError(f"bogus implication witness {m} at p={p}")


def _identity_elements(system, p, rps):
    return [r for r in rps if system.is_identity(r, p)]


def _validate_inputs(system, Ps, Qs) -> None:
    if not Ps or len(Ps) != len(Qs):
        raise DomainError("need equally many P_i and Q_i, at least one pair")
    for x in list(Ps) + list(Qs):
        system.check_element(x)


def _validate_prime(system, items, p) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p in system.bad_primes(items):
        raise DomainError(f"{p} is a bad prime for these inputs")


def implication_at(system, Ps, Qs, p: int, m_bound: int = DEFAULT_M_BOUND) -> ImplicationReport:
    """Decide: does m_1*r(P_1) + ... + m_s*r(P_s) = 0 force the same with Q?

    Quantified over all positive integer vectors m, at the single prime p.
    s = 1 is decided exactly by order divisibility. Larger multiplicative
    systems are exact via kernel containment in the cyclic group F_p*;
    elliptic systems are exact whenever all reductions lie in one cyclic
    subgroup (found by discrete logs), and otherwise fall back to a box
    search over m in [1, min(m_bound, period_i)]^s, where period_i is the
    lcm of the local orders of r(P_i) and r(Q_i). The box is exhaustive
    (hence exact) when every period fits under m_bound.
    """
    Ps, Qs = list(Ps), list(Qs)
    _validate_inputs(system, Ps, Qs)
    _validate_prime(system, Ps + Qs, p)
    if m_bound < 1:
        raise DomainError(f"m_bound must be >= 1, got {m_bound}")
    rps = [system.reduce(P, p) for P in Ps]
    rqs = [system.reduce(Q, p) for Q in Qs]
    s = len(rps)
    if len(_identity_elements(system, p, rps + rqs)) == 2 * s:
        return ImplicationReport(system.name, p, "vacuous", "exact-s1" if s == 1 else "cyclic")
    if s == 1:
        n_p = system.local_order(rps[0], p)
        n_q = system.local_order(rqs[0], p)
        if n_p % n_q == 0:
            return ImplicationReport(system.name, p, "holds", "exact-s1")
        witness = (n_p,)
        _check_local_violation(system, p, rps, rqs, *_identities(system, p), witness)
        return ImplicationReport(system.name, p, "fails", "exact-s1", witness_m=witness)
    if system.name == "mul":
        # F_p* is cyclic, so the kernel-containment criterion is always exact
        rep = schinzel_condition_at(Ps, Qs, p)
        return ImplicationReport(
            system.name,
            p,
            rep.status,
            "cyclic",
            witness_m=rep.witness_m,
            constraint=rep.constraint,
        )
    cyclic = _cyclic_containment(system, p, rps, rqs)
    if cyclic is not None:
        return cyclic
    return _box_implication(system, p, rps, rqs, *_identities(system, p), m_bound, affine=False)


def _identities(system, p):
    if system.name == "mul":
        return 1, 1
    return FieldPoint.infinity(), FieldPoint.infinity()


def _cyclic_containment(system, p, rps, rqs) -> ImplicationReport | None:
    """Exact decision when every reduction lies in one cyclic subgroup."""
    candidates = [r for r in rps + rqs if not system.is_identity(r, p)]
    base = max(candidates, key=lambda r: system.local_order(r, p))
    n = system.local_order(base, p)
    dlogs: dict = {}
    for r in candidates:
        d = system.local_dlog(base, r, p)
        if d is None:
            return None
        dlogs[r] = d
    avec = [0 if system.is_identity(r, p) else dlogs[r] for r in rps]
    bvec = [0 if system.is_identity(r, p) else dlogs[r] for r in rqs]
    outcome = cyclic_kernel_containment(avec, bvec, n)
    if outcome[0] == "vacuous":
        return ImplicationReport(system.name, p, "vacuous", "cyclic")
    if outcome[0] == "fails":
        m = outcome[1]
        _check_local_violation(system, p, rps, rqs, *_identities(system, p), m)
        return ImplicationReport(system.name, p, "fails", "cyclic", witness_m=m)
    _, residue, modulus = outcome
    return ImplicationReport(
        system.name,
        p,
        "holds",
        "cyclic",
        constraint=PrimeExponentConstraint(p, modulus, residue),
    )


def _box_implication(system, p, rps, rqs, tp, tq, m_bound, affine) -> ImplicationReport:
    """Brute force over positive vectors; exhaustive when periods fit the bound.

    Coordinate m_i only matters modulo the lcm of the local orders of
    r(P_i) and r(Q_i), so covering those periods decides the implication
    for every positive vector.
    """
    s = len(rps)
    periods = [
        math.lcm(system.local_order(a, p), system.local_order(b, p))
        for a, b in zip(rps, rqs)
    ]
    caps = [min(m_bound, L) for L in periods]
    exhaustive = all(L <= m_bound for L in periods)
    tables_p = [_multiples(system, p, r, cap) for r, cap in zip(rps, caps)]
    tables_q = [_multiples(system, p, r, cap) for r, cap in zip(rqs, caps)]
    found_antecedent = False
    for m in itertools.product(*(range(1, cap + 1) for cap in caps)):
        lhs = tables_p[0][m[0]]
        for i in range(1, s):
            lhs = system.local_add(lhs, tables_p[i][m[i]], p)
        if lhs != tp:
            continue
        found_antecedent = True
        rhs = tables_q[0][m[0]]
        for i in range(1, s):
            rhs = system.local_add(rhs, tables_q[i][m[i]], p)
        if rhs != tq:
            _check_local_violation(system, p, rps, rqs, tp, tq, m)
            return ImplicationReport(
                system.name, p, "fails", "box", witness_m=m, bound=m_bound
            )
    if not exhaustive:
        return ImplicationReport(system.name, p, "holds-up-to-bound", "box", bound=m_bound)
    if affine and not found_antecedent:
        return ImplicationReport(system.name, p, "vacuous", "box", bound=m_bound)
    return ImplicationReport(system.name, p, "holds", "box", bound=m_bound)


def _multiples(system, p, r, cap) -> list:
    out = [None, r]
    for _ in range(cap - 1):
        out.append(system.local_add(out[-1], r, p))
    return out


def affine_implication_at(
    system, Ps, P0, Qs, Q0, p: int, m_bound: int = DEFAULT_M_BOUND
) -> ImplicationReport:
    """Like implication_at, with affine targets r(P_0) and r(Q_0).

    Decides whether m_1*r(P_1)+...+m_s*r(P_s) = r(P_0) forces
    m_1*r(Q_1)+...+m_s*r(Q_s) = r(Q_0) for all positive integer vectors m.
    Exact coset reasoning for s = 1; box search otherwise. "vacuous" means
    no positive vector satisfies the antecedent at this prime.
    """
    Ps, Qs = list(Ps), list(Qs)
    _validate_inputs(system, Ps, Qs)
    system.check_element(P0)
    system.check_element(Q0)
    _validate_prime(system, Ps + Qs + [P0, Q0], p)
    if m_bound < 1:
        raise DomainError(f"m_bound must be >= 1, got {m_bound}")
    rps = [system.reduce(P, p) for P in Ps]
    rqs = [system.reduce(Q, p) for Q in Qs]
    tp = system.reduce(P0, p)
    tq = system.reduce(Q0, p)
    if len(rps) == 1:
        return _affine_single(system, p, rps[0], rqs[0], tp, tq)
    return _box_implication(system, p, rps, rqs, tp, tq, m_bound, affine=True)


def _affine_single(system, p, rp, rq, tp, tq) -> ImplicationReport:
    name = system.name
    if system.is_identity(rp, p):
        if not system.is_identity(tp, p):
            return ImplicationReport(name, p, "vacuous", "exact-s1")
        # antecedent holds for every m >= 1
        if system.is_identity(rq, p):
            if system.is_identity(tq, p):
                return ImplicationReport(name, p, "holds", "exact-s1")
            witness = (1,)
        else:
            witness = (1,) if system.local_scale(1, rq, p) != tq else (2,)
        _check_local_violation(system, p, [rp], [rq], tp, tq, witness)
        return ImplicationReport(name, p, "fails", "exact-s1", witness_m=witness)
    n1 = system.local_order(rp, p)
    e0 = system.local_dlog(rp, tp, p)
    if e0 is None:
        return ImplicationReport(name, p, "vacuous", "exact-s1")
    m1 = e0 if e0 >= 1 else n1
    base_ok = system.local_scale(m1, rq, p) == tq
    period_ok = n1 % system.local_order(rq, p) == 0
    if base_ok and period_ok:
        return ImplicationReport(name, p, "holds", "exact-s1")
    witness = (m1,) if not base_ok else (m1 + n1,)
    _check_local_violation(system, p, [rp], [rq], tp, tq, witness)
    return ImplicationReport(name, p, "fails", "exact-s1", witness_m=witness)


def infer_exponent(
    system,
    Ps,
    Qs,
    prime_range: PrimeRange,
    m_bound: int = DEFAULT_M_BOUND,
    threads: int = 1,
) -> RelationWitness:
    """Recover the integer e with Q_i = e * P_i from reduction data.

    At every good prime where the implication holds, membership of each
    r(Q_i) in the cyclic subgroup generated by r(P_i) yields the constraint
    e = dlog (mod local order); a prime with failing implication or failing
    membership refutes the relation outright, as do two incompatible
    constraints. Surviving constraints are CRT-merged, lifted to balanced
    candidates, and verified exactly in the global group.
    """
    Ps, Qs = list(Ps), list(Qs)
    _validate_inputs(system, Ps, Qs)
    for x in Ps + Qs:
        system.check_infinite_order(x)
    primes = list(prime_range.excluding(system.bad_primes(Ps + Qs)))
    if not primes:
        raise DomainError("prime range contains no usable primes")

    def job(p: int):
        rep = implication_at(system, Ps, Qs, p, m_bound)
        if rep.status == "fails":
            return ("refuted", p, rep.witness_m)
        if rep.status == "vacuous":
            return ("skip", p, None)
        if rep.constraint is not None:
            return ("constraints", p, [rep.constraint])
        collected = []
        for P, Q in zip(Ps, Qs):
            rp = system.reduce(P, p)
            rq = system.reduce(Q, p)
            if system.is_identity(rp, p):
                if system.is_identity(rq, p):
                    continue
                return ("refuted", p, None)
            d = system.local_dlog(rp, rq, p)
            if d is None:  # r(Q) outside <r(P)>: no exponent can exist
                return ("refuted", p, None)
            collected.append(PrimeExponentConstraint(p, system.local_order(rp, p), d))
        return ("constraints", p, collected)

    results = prime_map(job, primes, threads)
    constraints: list[PrimeExponentConstraint] = []
    for kind, p, payload in results:
        if kind == "refuted":
            return RelationWitness.refuted(p, payload)
        if kind == "constraints":
            constraints.extend(payload)
    try:
        residue, modulus = fold_constraints(constraints)
    except ConstraintConflict as conflict:
        return RelationWitness.refuted_by_conflict(conflict)
    for e in balanced_candidates(residue, modulus):
        if all(system.global_power_equals(e, P, Q) for P, Q in zip(Ps, Qs)):
            return RelationWitness.verified(e, constraints)
    return RelationWitness.inconclusive(constraints)


def search_pair_relation(system, P, Q, bound: int) -> RelationWitness:
    """Smallest coefficients alpha, beta with alpha*P + beta*Q = 0, exactly.

    Candidates are ordered by max(|alpha|, |beta|), then lexicographically,
    with the sign convention alpha > 0 (negating both coefficients leaves
    the relation invariant). No violation up to the bound yields
    "inconclusive", never a claim of independence: genuine independence
    admits no bound a finite search could certify.
    """
    if bound < 1:
        raise DomainError(f"bound must be >= 1, got {bound}")
    system.check_element(P)
    system.check_element(Q)
    system.check_infinite_order(P)
    system.check_infinite_order(Q)
    for size in range(1, bound + 1):
        for alpha in range(1, size + 1):
            for beta in range(-size, size + 1):
                if beta == 0 or max(alpha, abs(beta)) != size:
                    continue
                if system.pair_relation_holds(alpha, P, beta, Q):
                    return RelationWitness.pairs_found(((alpha, beta),))
    return RelationWitness.inconclusive(bound=bound)
