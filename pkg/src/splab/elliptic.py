"""Exact elliptic-curve arithmetic over Q and over prime fields.

Curves stay in long Weierstrass form y^2 + a1*x*y + a3*y = x^3 + a2*x^2 +
a4*x + a6 throughout, so standard integral models are entered verbatim and
p = 2, 3 need no special casing in the group law. A short-model transform
is used only internally for quadratic-character point counting at p > 3.

Good primes are those not dividing the discriminant of the given model; no
minimal-model computation is attempted, so a prime of potentially good
reduction on a non-minimal model is conservatively excluded.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .arith import (
    DomainError,
    PrimeRange,
    ResourceLimitError,
    crt_merge,
    factorize,
    is_prime,
    sqrt_mod,
)

Coeffs = tuple[int, int, int, int, int]
ModPoint = tuple[int, int] | None  # internal mod-p representation; None = infinity


@dataclass(frozen=True)
class EllipticCurve:
    """An integral long-Weierstrass model [a1, a2, a3, a4, a6]."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    discriminant: int = field(init=False)

    def __post_init__(self) -> None:
        disc = compute_discriminant(self.a1, self.a2, self.a3, self.a4, self.a6)
        if disc == 0:
            raise DomainError(f"singular model {self.coefficients()}")
        object.__setattr__(self, "discriminant", disc)

    def coefficients(self) -> Coeffs:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1**2 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3**2 + 4 * self.a6

    @property
    def b8(self) -> int:
        return (
            self.a1**2 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3**2
            - self.a4**2
        )

    def is_good_prime(self, p: int) -> bool:
        return is_prime(p) and self.discriminant % p != 0

    def contains(self, P: "RationalPoint") -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        return (
            y * y + self.a1 * x * y + self.a3 * y
            == x**3 + self.a2 * x * x + self.a4 * x + self.a6
        )

    def contains_mod(self, R: "FieldPoint", p: int) -> bool:
        if R.is_infinity:
            return True
        x, y = R.x, R.y
        return (
            y * y + self.a1 * x * y + self.a3 * y - (x**3 + self.a2 * x * x + self.a4 * x + self.a6)
        ) % p == 0

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.coefficients())


def compute_discriminant(a1: int, a2: int, a3: int, a4: int, a6: int) -> int:
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class RationalPoint:
    """A point of E(Q): affine rational coordinates, or the point at infinity."""

    x: Fraction | None = None
    y: Fraction | None = None

    def __post_init__(self) -> None:
        if (self.x is None) != (self.y is None):
            raise DomainError("affine points need both coordinates")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))

    @classmethod
    def infinity(cls) -> "RationalPoint":
        return cls(None, None)

    @classmethod
    def affine(cls, x, y) -> "RationalPoint":
        return cls(Fraction(x), Fraction(y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self) -> str:
        return format_point(self)


@dataclass(frozen=True)
class FieldPoint:
    """A point of E(F_p): residues mod p, or the point at infinity."""

    x: int | None = None
    y: int | None = None

    def __post_init__(self) -> None:
        if (self.x is None) != (self.y is None):
            raise DomainError("affine points need both coordinates")

    @classmethod
    def infinity(cls) -> "FieldPoint":
        return cls(None, None)

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self) -> str:
        return format_point(self)


@dataclass(frozen=True)
class GroupOrderCertificate:
    """#E(F_p) together with how it was obtained.

    The order always lies in the Hasse interval [p+1-2*sqrt(p), p+1+2*sqrt(p)],
    enforced at construction.
    """

    p: int
    order: int
    method: str  # "naive-count" | "point-order-lcm"

    def __post_init__(self) -> None:
        t = self.order - self.p - 1
        if t * t > 4 * self.p:
            raise DomainError(f"order {self.order} outside Hasse interval at {self.p}")


# ---------------------------------------------------------------------------
# internal mod-p group law on plain tuples (hot path for sweeps and BSGS)


def _neg_mod(c: Coeffs, p: int, P: ModPoint) -> ModPoint:
    if P is None:
        return None
    a1, _, a3, _, _ = c
    x, y = P
    return (x, (-y - a1 * x - a3) % p)


def _add_mod(c: Coeffs, p: int, P: ModPoint, Q: ModPoint) -> ModPoint:
    a1, a2, a3, a4, _ = c
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2 + a1 * x1 + a3) % p == 0:  # Q == -P, includes 2-torsion doubling
            return None
        num = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) % p
        den = (2 * y1 + a1 * x1 + a3) % p
    else:
        num = (y2 - y1) % p
        den = (x2 - x1) % p
    lam = num * pow(den, -1, p) % p
    nu = (y1 - lam * x1) % p
    x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % p
    y3 = (-(lam + a1) * x3 - nu - a3) % p
    return (x3, y3)


def _scalar_mod(c: Coeffs, p: int, n: int, P: ModPoint) -> ModPoint:
    if n < 0:
        return _scalar_mod(c, p, -n, _neg_mod(c, p, P))
    acc: ModPoint = None
    addend = P
    while n:
        if n & 1:
            acc = _add_mod(c, p, acc, addend)
        n >>= 1
        if n:
            addend = _add_mod(c, p, addend, addend)
    return acc


def _to_mod(R: FieldPoint) -> ModPoint:
    return None if R.is_infinity else (R.x, R.y)


def _from_mod(P: ModPoint) -> FieldPoint:
    return FieldPoint.infinity() if P is None else FieldPoint(P[0], P[1])


# ---------------------------------------------------------------------------
# exact group law over Q


def _neg_exact(E: EllipticCurve, P: RationalPoint) -> RationalPoint:
    if P.is_infinity:
        return P
    return RationalPoint(P.x, -P.y - E.a1 * P.x - E.a3)


def _add_exact(E: EllipticCurve, P: RationalPoint, Q: RationalPoint) -> RationalPoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y1 + y2 + E.a1 * x1 + E.a3 == 0:
            return RationalPoint.infinity()
        lam = (3 * x1 * x1 + 2 * E.a2 * x1 + E.a4 - E.a1 * y1) / (
            2 * y1 + E.a1 * x1 + E.a3
        )
    else:
        lam = (y2 - y1) / (x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + E.a1 * lam - E.a2 - x1 - x2
    y3 = -(lam + E.a1) * x3 - nu - E.a3
    return RationalPoint(x3, y3)


# ---------------------------------------------------------------------------
# public operations


def neg(E: EllipticCurve, P, p: int | None = None):
    """The additive inverse -P = (x, -y - a1*x - a3)."""
    if isinstance(P, RationalPoint):
        return _neg_exact(E, P)
    if p is None:
        raise DomainError("field points need the prime p")
    return _from_mod(_neg_mod(E.coefficients(), p, _to_mod(P)))


def add(E: EllipticCurve, P, Q, p: int | None = None):
    """Chord-tangent sum of two points, over Q or over F_p."""
    if isinstance(P, RationalPoint) and isinstance(Q, RationalPoint):
        return _add_exact(E, P, Q)
    if isinstance(P, FieldPoint) and isinstance(Q, FieldPoint):
        if p is None:
            raise DomainError("field points need the prime p")
        return _from_mod(_add_mod(E.coefficients(), p, _to_mod(P), _to_mod(Q)))
    raise DomainError("cannot add points from different systems")


def scalar_mul(E: EllipticCurve, n: int, P, p: int | None = None):
    """n*P by double-and-add; n may be negative or zero."""
    if isinstance(P, RationalPoint):
        if n < 0:
            return scalar_mul(E, -n, _neg_exact(E, P))
        acc = RationalPoint.infinity()
        addend = P
        while n:
            if n & 1:
                acc = _add_exact(E, acc, addend)
            n >>= 1
            if n:
                addend = _add_exact(E, addend, addend)
        return acc
    if p is None:
        raise DomainError("field points need the prime p")
    return _from_mod(_scalar_mod(E.coefficients(), p, n, _to_mod(P)))


def good_primes(E: EllipticCurve, prime_range: PrimeRange) -> PrimeRange:
    """The range with primes dividing the model discriminant excluded."""
    return prime_range.excluding(factorize(abs(E.discriminant)).primes())


def reduce_point(E: EllipticCurve, P: RationalPoint, p: int) -> FieldPoint:
    """Reduction of P modulo a good prime p.

    The projective representative with coprime integer coordinates is
    reduced; a point with p in a coordinate denominator maps to infinity.
    """
    if not E.is_good_prime(p):
        raise DomainError(f"{p} is not a good prime for {E}")
    if P.is_infinity:
        return FieldPoint.infinity()
    if P.x.denominator % p == 0 or P.y.denominator % p == 0:
        return FieldPoint.infinity()
    xm = P.x.numerator * pow(P.x.denominator, -1, p) % p
    ym = P.y.numerator * pow(P.y.denominator, -1, p) % p
    return FieldPoint(xm, ym)


def _hasse_bounds(p: int) -> tuple[int, int]:
    t = math.isqrt(4 * p)
    return max(1, p + 1 - t), p + 1 + t


_NAIVE_COUNT_LIMIT = 2_000_000


def count_points(E: EllipticCurve, p: int, naive_limit: int = _NAIVE_COUNT_LIMIT) -> GroupOrderCertificate:
    """Exact #E(F_p) at a good prime.

    p in {2, 3}: direct enumeration. 3 < p <= naive_limit: transform to a
    short model and sum quadratic characters with a residue table. Larger p:
    lcm of random point orders until exactly one multiple lies in the Hasse
    interval; if that stays ambiguous the count fails explicitly rather
    than guessing.
    """
    if not E.is_good_prime(p):
        raise DomainError(f"{p} is not a good prime for {E}")
    if p <= 3:
        count = 1
        for x in range(p):
            for y in range(p):
                if E.contains_mod(FieldPoint(x, y), p):
                    count += 1
        return GroupOrderCertificate(p, count, "naive-count")
    if p <= naive_limit:
        return GroupOrderCertificate(p, _count_short_model(E, p), "naive-count")
    return _count_by_point_orders(E, p)


def _count_short_model(E: EllipticCurve, p: int) -> int:
    # y^2 = x^3 + A*x + B has the same count as E for p > 3
    b2, b4, b6 = E.b2, E.b4, E.b6
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    a = -27 * c4 % p
    b = -54 * c6 % p
    squares = bytearray(p)
    for i in range(1, p // 2 + 1):
        squares[i * i % p] = 1
    affine = 0
    for x in range(p):
        v = (x * x % p * x + a * x + b) % p
        if v == 0:
            affine += 1
        elif squares[v]:
            affine += 2
    return affine + 1


def _count_by_point_orders(E: EllipticCurve, p: int) -> GroupOrderCertificate:
    rng = random.Random(f"count:{E}:{p}")
    lo, hi = _hasse_bounds(p)
    exponent = 1
    for _ in range(32):
        R = random_point(E, p, rng)
        exponent = math.lcm(exponent, point_order(E, R, p))
        k_lo = -(-lo // exponent)
        k_hi = hi // exponent
        if k_lo == k_hi:
            return GroupOrderCertificate(p, k_lo * exponent, "point-order-lcm")
    raise ResourceLimitError(
        f"group exponent at p={p} leaves several Hasse candidates; "
        f"raise naive_limit to count directly"
    )


def _annihilator_in_hasse(c: Coeffs, p: int, R: ModPoint) -> int:
    """Smallest m in the Hasse interval with m*R = infinity (baby-step giant-step)."""
    lo, hi = _hasse_bounds(p)
    width = hi - lo + 1
    s = math.isqrt(width - 1) + 1
    baby: dict[ModPoint, int] = {}
    pt: ModPoint = None
    for j in range(s):
        baby.setdefault(pt, j)
        pt = _add_mod(c, p, pt, R)
    giant = _scalar_mod(c, p, s, R)
    walk = _scalar_mod(c, p, lo, R)
    for i in range(width // s + 2):
        j = baby.get(_neg_mod(c, p, walk))
        if j is not None:
            return lo + i * s + j
        walk = _add_mod(c, p, walk, giant)
    raise AssertionError(f"no annihilator in the Hasse interval at p={p}")


@lru_cache(maxsize=65536)
def _point_order_cached(E: EllipticCurve, R: FieldPoint, p: int) -> int:
    c = E.coefficients()
    pt = _to_mod(R)
    if pt is None:
        return 1
    m = _annihilator_in_hasse(c, p, pt)
    order = m
    for q in factorize(m).primes():
        while order % q == 0 and _scalar_mod(c, p, order // q, pt) is None:
            order //= q
    return order


def point_order(E: EllipticCurve, R: FieldPoint, p: int) -> int:
    """Exact order of R in E(F_p).

    A multiple of the order is found by baby-step giant-step across the
    Hasse interval (any annihilator there is a multiple of the true order);
    stripping its prime factors while the point still dies leaves the order
    itself. Results are memoized; inputs are immutable.
    """
    if not E.is_good_prime(p):
        raise DomainError(f"{p} is not a good prime for {E}")
    return _point_order_cached(E, R, p)


def _bsgs_point_dlog(c: Coeffs, p: int, base: ModPoint, target: ModPoint, q: int) -> int | None:
    """d in [0, q) with d*base = target, where base has order q; None if absent."""
    m = math.isqrt(q - 1) + 1
    baby: dict[ModPoint, int] = {}
    pt: ModPoint = None
    for j in range(m):
        baby.setdefault(pt, j)
        pt = _add_mod(c, p, pt, base)
    giant = _neg_mod(c, p, _scalar_mod(c, p, m, base))
    walk = target
    for i in range(m + 1):
        j = baby.get(walk)
        if j is not None:
            d = i * m + j
            return d % q
        walk = _add_mod(c, p, walk, giant)
    return None


def dlog_in_cyclic(
    E: EllipticCurve, base: FieldPoint, target: FieldPoint, p: int
) -> int | None:
    """Least e >= 0 with e*base = target in E(F_p), or None when target is
    outside the cyclic subgroup generated by base.

    Pohlig-Hellman over the factorization of the base order with baby-step
    giant-step in each prime-power part.
    """
    if base.is_infinity:
        raise DomainError("dlog base must not be the point at infinity")
    if not E.is_good_prime(p):
        raise DomainError(f"{p} is not a good prime for {E}")
    c = E.coefficients()
    b = _to_mod(base)
    t = _to_mod(target)
    if t is None:
        return 0
    n = point_order(E, base, p)
    residues: list[int] = []
    moduli: list[int] = []
    for q, k in factorize(n).factors:
        qk = q**k
        b_q = _scalar_mod(c, p, n // qk, b)
        t_q = _scalar_mod(c, p, n // qk, t)
        gamma = _scalar_mod(c, p, q ** (k - 1), b_q)
        x = 0
        for step in range(k):
            shifted = _add_mod(c, p, t_q, _scalar_mod(c, p, -x, b_q))
            h = _scalar_mod(c, p, q ** (k - 1 - step), shifted)
            digit = _bsgs_point_dlog(c, p, gamma, h, q)
            if digit is None:
                return None
            x += digit * q**step
        residues.append(x)
        moduli.append(qk)
    e, m = 0, 1
    for r_i, m_i in zip(residues, moduli):
        e, m = crt_merge(e, m, r_i, m_i)  # prime-power moduli are coprime
    if _scalar_mod(c, p, e, b) != t:
        return None
    return e


def random_point(E: EllipticCurve, p: int, rng: random.Random) -> FieldPoint:
    """A uniform-ish random affine point of E(F_p) (infinity if none exist)."""
    if not E.is_good_prime(p):
        raise DomainError(f"{p} is not a good prime for {E}")
    if p <= 3:  # E(F_p) may consist of infinity alone; enumerate
        affine = [
            FieldPoint(x, y)
            for x in range(p)
            for y in range(p)
            if E.contains_mod(FieldPoint(x, y), p)
        ]
        return rng.choice(affine) if affine else FieldPoint.infinity()
    inv2 = pow(2, -1, p)
    for _ in range(20 * p):
        x = rng.randrange(p)
        b = (E.a1 * x + E.a3) % p
        f = (x * x % p * x + E.a2 * x * x + E.a4 * x + E.a6) % p
        disc = (b * b + 4 * f) % p
        s = sqrt_mod(disc, p)
        if s is None:
            continue
        y = (s - b) * inv2 % p
        if rng.random() < 0.5:
            y = (-s - b) * inv2 % p
        return FieldPoint(x, y)
    raise AssertionError(f"no affine point found on {E} at p={p}")


def certainly_nontorsion(E: EllipticCurve, P: RationalPoint, probes: int = 100) -> bool:
    """True once two good primes give the reduction of P an order above 16.

    Rational torsion has order at most 16 and injects into E(F_p) at good
    odd primes, so two such certificates prove infinite order. False means
    "not certified", not "torsion".
    """
    if not E.contains(P):
        raise DomainError(f"{P} is not on {E}")
    if P.is_infinity:
        return False
    certificates = 0
    checked = 0
    for p in PrimeRange(3, 10**4).excluding(factorize(abs(E.discriminant)).primes()):
        if checked >= probes:
            break
        checked += 1
        if point_order(E, reduce_point(E, P, p), p) > 16:
            certificates += 1
            if certificates >= 2:
                return True
    return False


# ---------------------------------------------------------------------------
# input grammar shared with the CLI


def parse_curve(text: str) -> EllipticCurve:
    """Parse "a1,a2,a3,a4,a6" into an integral model."""
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 5:
        raise DomainError(f"curve needs 5 coefficients a1,a2,a3,a4,a6: {text!r}")
    try:
        a1, a2, a3, a4, a6 = (int(s) for s in parts)
    except ValueError:
        raise DomainError(f"curve coefficients must be integers: {text!r}") from None
    return EllipticCurve(a1, a2, a3, a4, a6)


def parse_point(text: str) -> RationalPoint:
    """Parse "(x,y)" with optional "n/d" rational coordinates, or "inf"."""
    s = text.strip()
    if s.lower() in ("inf", "infinity", "o"):
        return RationalPoint.infinity()
    if not (s.startswith("(") and s.endswith(")")):
        raise DomainError(f"point must be '(x,y)' or 'inf': {text!r}")
    parts = s[1:-1].split(",")
    if len(parts) != 2:
        raise DomainError(f"point must have two coordinates: {text!r}")
    try:
        x = Fraction(parts[0].strip())
        y = Fraction(parts[1].strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad point coordinates {text!r}: {exc}") from None
    return RationalPoint(x, y)


def format_point(P) -> str:
    if P.is_infinity:
        return "inf"
    return f"({P.x},{P.y})"
