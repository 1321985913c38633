"""splab: a desk-scale laboratory for the support problem.

Computes reductions of nonzero rationals and of rational points on
elliptic curves modulo primes, searches for primes realizing prescribed
prime-power reduction orders, tests per-prime support implications, and
recovers the global linear relations those implications force.
"""

__version__ = "0.1.0"

from .arith import (
    DomainError,
    FactorizationError,
    Factorization,
    PrimeRange,
    ResourceLimitError,
    factorize,
    is_prime,
    l_part,
    mod_pow,
    multiplicative_order,
    sieve_primes,
)
from .elliptic import (
    EllipticCurve,
    FieldPoint,
    GroupOrderCertificate,
    RationalPoint,
    add,
    count_points,
    dlog_in_cyclic,
    good_primes,
    neg,
    point_order,
    reduce_point,
    scalar_mul,
)
from .mulgroup import (
    MulElement,
    SchinzelReport,
    SupportReport,
    erdos_test,
    recover_exponent_mul,
    reduction_order,
    schinzel_condition_at,
    supp,
)
from .relations import PrimeExponentConstraint, RelationWitness
from .order_search import OrderProfile, SweepReport, sweep_ec, sweep_mul
from .dependence import (
    EcSystem,
    ImplicationReport,
    MulSystem,
    affine_implication_at,
    implication_at,
    infer_exponent,
    search_pair_relation,
)
