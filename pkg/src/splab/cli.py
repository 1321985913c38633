"""Command-line front end.

Subcommands: erdos, order-search, implication, detect-relation. Reports
render as human-readable text, canonical JSON, or (sweeps only) flat CSV.
JSON reports share one top-level shape: {"tool_version", "config",
"exclusions", "result"}, with every integer serialized as a decimal string
so 64-bit consumers never truncate. Identical configs produce byte-
identical JSON, and --threads never changes output bytes.

Exit codes: erdos 0 equal-in-range / 1 witness; detect-relation 0 verified
/ 1 refuted / 3 inconclusive; other subcommands 0; usage errors 2. No
result is conveyed only by exit code: the report body always says it too.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .arith import DomainError, PrimeRange, ResourceLimitError
from .dependence import (
    DEFAULT_M_BOUND,
    EcSystem,
    MulSystem,
    affine_implication_at,
    implication_at,
    infer_exponent,
    search_pair_relation,
)
from .elliptic import parse_curve, parse_point
from .mulgroup import MulElement, bad_primes, erdos_test
from .order_search import OrderProfile, sweep_ec, sweep_mul
from .parallel import default_threads
from .relations import RelationWitness

DEFAULT_N_MAX = 100
DEFAULT_P_MAX = 100_000

REPORT_SCHEMA = {
    "type": "object",
    "required": ["tool_version", "config", "exclusions", "result"],
    "additionalProperties": False,
    "properties": {
        "tool_version": {"type": "string"},
        "config": {
            "type": "object",
            "required": ["subcommand", "seed"],
            "properties": {"subcommand": {"type": "string"}},
        },
        "exclusions": {
            "type": "array",
            "items": {"type": "string", "pattern": "^[0-9]+$"},
        },
        "result": {"type": "object"},
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Canonical, re-runnable description of one experiment.

    Presentation knobs (format, output path, thread count) are not part of
    the config: they must never change what was computed.
    """

    subcommand: str
    seed: int = 0
    system: str | None = None
    curve: str | None = None
    x: str | None = None
    y: str | None = None
    elements: tuple[str, ...] | None = None
    points: tuple[str, ...] | None = None
    ps: tuple[str, ...] | None = None
    qs: tuple[str, ...] | None = None
    p0: str | None = None
    q0: str | None = None
    l: int | None = None
    ks: tuple[int, ...] | None = None
    p: int | None = None
    p_min: int | None = None
    p_max: int | None = None
    n_max: int | None = None
    m_bound: int | None = None
    pair_bound: int | None = None
    per_prime: bool = False

    def to_argv(self) -> list[str]:
        """The argument vector that reproduces this config exactly."""
        out = [self.subcommand]
        flags = {
            "system": "--system",
            "curve": "--curve",
            "x": "--x",
            "y": "--y",
            "p0": "--P0",
            "q0": "--Q0",
            "l": "--l",
            "p": "--p",
            "p_min": "--p-min",
            "p_max": "--p-max",
            "n_max": "--n-max",
            "m_bound": "--m-bound",
            "pair_bound": "--pair-bound",
        }
        for name, flag in flags.items():
            value = getattr(self, name)
            if value is not None:
                out += [flag, str(value)]
        lists = {
            "elements": "--elements",
            "points": "--points",
            "ps": "--Ps" if self.subcommand == "implication" else "--P",
            "qs": "--Qs" if self.subcommand == "implication" else "--Q",
            "ks": "--ks",
        }
        for name, flag in lists.items():
            value = getattr(self, name)
            if value is not None:
                out += [flag] + [str(v) for v in value]
        if self.per_prime:
            out.append("--per-prime")
        out += ["--seed", str(self.seed)]
        return out


class UsageError(Exception):
    pass


def _add_common(sub: argparse.ArgumentParser, formats=("text", "json")) -> None:
    sub.add_argument("--format", choices=formats, default="text")
    sub.add_argument("--threads", type=int, default=None, help="worker cap; falls back to SPLAB_THREADS, then 1")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("-o", "--output", default=None, help="write the report to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splab",
        description="Support-problem experiments on Q* and elliptic curves over Q.",
    )
    parser.add_argument("--version", action="version", version=f"splab {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p_erdos = subs.add_parser("erdos", help="search for n, p where supports of x^n-1 and y^n-1 differ")
    p_erdos.add_argument("--x", required=True)
    p_erdos.add_argument("--y", required=True)
    p_erdos.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p_erdos.add_argument("--p-max", type=int, default=DEFAULT_P_MAX)
    _add_common(p_erdos)

    p_sweep = subs.add_parser("order-search", help="sweep primes for prescribed l-power reduction orders")
    p_sweep.add_argument("--system", choices=("mul", "ec"), required=True)
    p_sweep.add_argument("--curve", default=None)
    p_sweep.add_argument("--elements", nargs="+", default=None)
    p_sweep.add_argument("--points", nargs="+", default=None)
    p_sweep.add_argument("--l", type=int, required=True)
    p_sweep.add_argument("--ks", type=int, nargs="+", required=True)
    p_sweep.add_argument("--p-min", type=int, default=2)
    p_sweep.add_argument("--p-max", type=int, required=True)
    p_sweep.add_argument("--per-prime", action="store_true", help="keep per-prime l-part rows in the report")
    _add_common(p_sweep, formats=("text", "json", "csv"))

    p_impl = subs.add_parser("implication", help="test the per-prime relation implication at one prime")
    p_impl.add_argument("--system", choices=("mul", "ec"), required=True)
    p_impl.add_argument("--curve", default=None)
    p_impl.add_argument("--Ps", nargs="+", required=True)
    p_impl.add_argument("--Qs", nargs="+", required=True)
    p_impl.add_argument("--P0", default=None, help="affine antecedent target")
    p_impl.add_argument("--Q0", default=None, help="affine consequent target")
    p_impl.add_argument("--p", type=int, required=True)
    p_impl.add_argument("--m-bound", type=int, default=DEFAULT_M_BOUND)
    _add_common(p_impl)

    p_rel = subs.add_parser("detect-relation", help="recover the exponent e with Q_i = e*P_i from reductions")
    p_rel.add_argument("--system", choices=("mul", "ec"), required=True)
    p_rel.add_argument("--curve", default=None)
    p_rel.add_argument("--P", nargs="+", required=True, dest="Ps")
    p_rel.add_argument("--Q", nargs="+", required=True, dest="Qs")
    p_rel.add_argument("--p-min", type=int, default=2)
    p_rel.add_argument("--p-max", type=int, required=True)
    p_rel.add_argument("--m-bound", type=int, default=DEFAULT_M_BOUND)
    p_rel.add_argument("--pair-bound", type=int, default=None,
                       help="with a single pair, also search |alpha|,|beta| <= bound for alpha*P + beta*Q = 0")
    _add_common(p_rel)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Validate the parsed arguments and freeze them into a canonical config."""
    sub = args.subcommand
    if sub == "erdos":
        x = MulElement.parse(args.x)
        y = MulElement.parse(args.y)
        if args.n_max < 1 or args.p_max < 2:
            raise UsageError("need --n-max >= 1 and --p-max >= 2")
        if x.is_unit() or y.is_unit():
            raise UsageError("x and y must differ from 0, 1 and -1")
        return ExperimentConfig(
            subcommand=sub, seed=args.seed, x=str(x), y=str(y),
            n_max=args.n_max, p_max=args.p_max,
        )
    if sub == "order-search":
        _check_system_inputs(args, want_elements=True)
        cfg = ExperimentConfig(
            subcommand=sub, seed=args.seed, system=args.system,
            curve=_canonical_curve(args), l=args.l, ks=tuple(args.ks),
            p_min=args.p_min, p_max=args.p_max, per_prime=bool(args.per_prime),
            elements=_canonical_elements(args.elements) if args.system == "mul" else None,
            points=_canonical_points(args.points) if args.system == "ec" else None,
        )
        arity = len(cfg.elements or cfg.points or ())
        if len(cfg.ks) != arity:
            raise UsageError(f"--ks has {len(cfg.ks)} entries for {arity} inputs")
        return cfg
    if sub == "implication":
        _check_system_inputs(args)
        if (args.P0 is None) != (args.Q0 is None):
            raise UsageError("--P0 and --Q0 must be given together")
        parse_one = (lambda s: str(MulElement.parse(s))) if args.system == "mul" else (lambda s: str(parse_point(s)))
        return ExperimentConfig(
            subcommand=sub, seed=args.seed, system=args.system,
            curve=_canonical_curve(args),
            ps=_canonical_items(args.Ps, args.system),
            qs=_canonical_items(args.Qs, args.system),
            p0=None if args.P0 is None else parse_one(args.P0),
            q0=None if args.Q0 is None else parse_one(args.Q0),
            p=args.p, m_bound=args.m_bound,
        )
    if sub == "detect-relation":
        _check_system_inputs(args)
        return ExperimentConfig(
            subcommand=sub, seed=args.seed, system=args.system,
            curve=_canonical_curve(args),
            ps=_canonical_items(args.Ps, args.system),
            qs=_canonical_items(args.Qs, args.system),
            p_min=args.p_min, p_max=args.p_max, m_bound=args.m_bound,
            pair_bound=args.pair_bound,
        )
    raise UsageError(f"unknown subcommand {sub!r}")


def _check_system_inputs(args, want_elements: bool = False) -> None:
    if args.system == "ec" and not args.curve:
        raise UsageError("--system ec needs --curve a1,a2,a3,a4,a6")
    if args.system == "mul" and args.curve:
        raise UsageError("--curve makes no sense with --system mul")
    if want_elements:
        if args.system == "mul" and not args.elements:
            raise UsageError("--system mul needs --elements")
        if args.system == "ec" and not args.points:
            raise UsageError("--system ec needs --points")
        if args.system == "mul" and args.points:
            raise UsageError("--points makes no sense with --system mul")
        if args.system == "ec" and args.elements:
            raise UsageError("--elements makes no sense with --system ec")


def _canonical_curve(args) -> str | None:
    if getattr(args, "curve", None) is None:
        return None
    return str(parse_curve(args.curve))


def _canonical_elements(raw) -> tuple[str, ...]:
    return tuple(str(MulElement.parse(s)) for s in raw)


def _canonical_points(raw) -> tuple[str, ...]:
    return tuple(str(parse_point(s)) for s in raw)


def _canonical_items(raw, system) -> tuple[str, ...]:
    return _canonical_elements(raw) if system == "mul" else _canonical_points(raw)


# ---------------------------------------------------------------------------
# runners


def _system_for(cfg: ExperimentConfig):
    if cfg.system == "mul":
        return MulSystem()
    return EcSystem(parse_curve(cfg.curve))


def _items_for(cfg: ExperimentConfig, raw) -> list:
    if cfg.system == "mul":
        return [MulElement.parse(s) for s in raw]
    return [parse_point(s) for s in raw]


def run_erdos(cfg: ExperimentConfig, threads: int):
    report = erdos_test(
        MulElement.parse(cfg.x), MulElement.parse(cfg.y), cfg.n_max, cfg.p_max
    )
    exclusions = list(report.excluded)
    result = {
        "verdict": report.verdict,
        "x": cfg.x,
        "y": cfg.y,
        "n_max": report.n_max,
        "p_max": report.p_max,
        "witness": None
        if report.witness is None
        else {"n": report.witness.n, "p": report.witness.prime, "side": report.witness.side},
    }
    text = [f"erdos: x={cfg.x} y={cfg.y} n_max={cfg.n_max} p_max={cfg.p_max}"]
    if report.verdict == "witness":
        w = report.witness
        text.append(
            f"verdict: witness at n={w.n}, p={w.p}: prime divides "
            f"{'x' if w.side == 'x' else 'y'}^n - 1 only"
        )
    else:
        text.append("verdict: equal-in-range (no witness found)")
    text.append(f"excluded primes: {_fmt_list(exclusions)}")
    return result, exclusions, (1 if report.verdict == "witness" else 0), text, None


def run_order_search(cfg: ExperimentConfig, threads: int, want_rows: bool):
    profile = OrderProfile(cfg.l, cfg.ks)
    prime_range = PrimeRange(cfg.p_min, cfg.p_max)
    keep = cfg.per_prime or want_rows
    if cfg.system == "mul":
        xs = [MulElement.parse(s) for s in cfg.elements]
        report = sweep_mul(xs, profile, prime_range, threads=threads, keep_rows=keep)
    else:
        E = parse_curve(cfg.curve)
        pts = [parse_point(s) for s in cfg.points]
        report = sweep_ec(E, pts, profile, prime_range, threads=threads, keep_rows=keep)
    exclusions = list(report.excluded)
    result = {
        "profile": {"l": profile.l, "ks": list(profile.ks)},
        "lo": report.lo,
        "hi": report.hi,
        "matches": list(report.matches),
        "match_count": len(report.matches),
        "scanned": report.scanned,
        "rows": None
        if not cfg.per_prime
        else [{"p": r.p, "lparts": list(r.lparts), "match": r.match} for r in report.rows],
    }
    targets = ", ".join(f"{profile.l}^{k}" for k in profile.ks)
    text = [
        f"order-search ({cfg.system}): targets [{targets}] over primes "
        f"[{report.lo}, {report.hi}]",
        f"scanned {report.scanned} primes, {len(report.matches)} matches",
        f"matches: {_fmt_list(report.matches)}",
        f"excluded primes: {_fmt_list(exclusions)}",
        "note: an empty match list means no match in range, not a refutation",
    ]
    return result, exclusions, 0, text, report


def run_implication(cfg: ExperimentConfig, threads: int):
    system = _system_for(cfg)
    Ps = _items_for(cfg, cfg.ps)
    Qs = _items_for(cfg, cfg.qs)
    if cfg.p0 is not None:
        P0 = _items_for(cfg, [cfg.p0])[0]
        Q0 = _items_for(cfg, [cfg.q0])[0]
        rep = affine_implication_at(system, Ps, P0, Qs, Q0, cfg.p, cfg.m_bound)
        affine = True
    else:
        rep = implication_at(system, Ps, Qs, cfg.p, cfg.m_bound)
        affine = False
    exclusions = sorted(system.bad_primes(Ps + Qs))
    result = {
        "system": rep.system,
        "p": rep.p,
        "affine": affine,
        "status": rep.status,
        "method": rep.method,
        "witness_m": None if rep.witness_m is None else list(rep.witness_m),
        "bound": rep.bound,
        "constraint": None
        if rep.constraint is None
        else {"p": rep.constraint.p, "modulus": rep.constraint.modulus, "residue": rep.constraint.residue},
    }
    text = [
        f"implication ({rep.system}{', affine' if affine else ''}) at p={rep.p}: "
        f"{rep.status} [method: {rep.method}"
        + (f", bound {rep.bound}" if rep.bound is not None else "")
        + "]"
    ]
    if rep.witness_m is not None:
        text.append(f"violating m: {list(rep.witness_m)}")
    if rep.constraint is not None:
        text.append(
            f"admissible exponents: e = {rep.constraint.residue} "
            f"(mod {rep.constraint.modulus})"
        )
    return result, exclusions, 0, text, None


def run_detect_relation(cfg: ExperimentConfig, threads: int):
    system = _system_for(cfg)
    Ps = _items_for(cfg, cfg.ps)
    Qs = _items_for(cfg, cfg.qs)
    prime_range = PrimeRange(cfg.p_min, cfg.p_max)
    witness = infer_exponent(system, Ps, Qs, prime_range, m_bound=cfg.m_bound, threads=threads)
    pair = None
    if cfg.pair_bound is not None:
        if len(Ps) != 1:
            raise UsageError("--pair-bound needs exactly one P and one Q")
        pair = search_pair_relation(system, Ps[0], Qs[0], cfg.pair_bound)
    exclusions = sorted(system.bad_primes(Ps + Qs))
    result = {
        "witness": _witness_payload(witness),
        "pair_search": None if pair is None else _witness_payload(pair),
    }
    text = [f"detect-relation ({cfg.system}) over primes [{cfg.p_min}, {cfg.p_max}]"]
    text += _witness_text(witness)
    if pair is not None:
        if pair.kind == "pairs":
            alpha, beta = pair.pairs[0]
            text.append(f"pair search: {alpha}*P + {beta}*Q = 0 (exact)")
        else:
            text.append(
                f"pair search: no relation with max(|alpha|,|beta|) <= {pair.bound}"
            )
    code = {"exponent": 0, "pairs": 0, "refuted": 1, "inconclusive": 3}[witness.kind]
    return result, exclusions, code, text, None


def _witness_payload(w: RelationWitness) -> dict:
    return {
        "kind": w.kind,
        "exponent": w.exponent,
        "pairs": None if w.pairs is None else [list(pair) for pair in w.pairs],
        "refuted_prime": w.refuted_prime,
        "refuted_witness": None if w.refuted_witness is None else list(w.refuted_witness),
        "conflict": None
        if w.conflict is None
        else [
            {"p": c.p, "modulus": c.modulus, "residue": c.residue} for c in w.conflict
        ],
        "constraints": [
            {"p": c.p, "modulus": c.modulus, "residue": c.residue} for c in w.constraints
        ],
        "bound": w.bound,
    }


def _witness_text(w: RelationWitness) -> list[str]:
    if w.kind == "exponent":
        return [f"verdict: verified, e = {w.exponent} relates every pair exactly"]
    if w.kind == "refuted":
        extra = f", violating m {list(w.refuted_witness)}" if w.refuted_witness else ""
        if w.conflict:
            a, b = w.conflict
            return [
                "verdict: refuted, incompatible exponent classes "
                f"(p={a.p}: e={a.residue} mod {a.modulus}; p={b.p}: e={b.residue} mod {b.modulus})"
            ]
        return [f"verdict: refuted at prime {w.refuted_prime}{extra}"]
    return [
        "verdict: inconclusive (condition held everywhere sampled, "
        "no integer exponent verified exactly)"
    ]


# ---------------------------------------------------------------------------
# rendering


def _fmt_list(values) -> str:
    seq = list(values)
    if not seq:
        return "(none)"
    if len(seq) > 25:
        head = ", ".join(str(v) for v in seq[:25])
        return f"{head}, ... ({len(seq)} total)"
    return ", ".join(str(v) for v in seq)


def jsonable(obj):
    """Recursive conversion with every integer as a decimal string."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [jsonable(v) for v in sorted(obj)]
    if dataclasses.is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot serialize {type(obj)!r}")


def render_json(cfg: ExperimentConfig, exclusions, result) -> str:
    config_payload = {
        k: v for k, v in dataclasses.asdict(cfg).items() if v is not None
    }
    payload = {
        "tool_version": __version__,
        "config": jsonable(config_payload),
        "exclusions": [str(p) for p in sorted(int(q) for q in exclusions)],
        "result": jsonable(result),
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def render_csv(report) -> str:
    buf = io.StringIO()
    s = len(report.profile.ks)
    header = ["p"] + [f"lpart_{i + 1}" for i in range(s)] + ["match"]
    buf.write(",".join(header) + "\n")
    for row in report.rows:
        cells = [str(row.p)] + [str(v) for v in row.lparts] + ["1" if row.match else "0"]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    threads = args.threads if args.threads is not None else default_threads()
    try:
        cfg = config_from_args(args)
        if args.format == "csv" and cfg.subcommand != "order-search":
            raise UsageError("csv output exists for order-search sweeps only")
        if cfg.subcommand == "erdos":
            result, exclusions, code, text, report = run_erdos(cfg, threads)
        elif cfg.subcommand == "order-search":
            result, exclusions, code, text, report = run_order_search(
                cfg, threads, want_rows=args.format == "csv"
            )
        elif cfg.subcommand == "implication":
            result, exclusions, code, text, report = run_implication(cfg, threads)
        else:
            result, exclusions, code, text, report = run_detect_relation(cfg, threads)
    except (UsageError, DomainError, ResourceLimitError) as exc:
        print(f"splab: error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        out = render_json(cfg, exclusions, result)
    elif args.format == "csv":
        out = render_csv(report)
    else:
        out = "\n".join(text) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
