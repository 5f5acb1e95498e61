"""命令行入口

用法示例:
    python -m src.cli scan-not-group --min 0 --max 1000
    python -m src.cli families --pmax 41 --solved-only
    python -m src.cli reps --trace 70 --dmax 260
    python -m src.cli verify-chains fixtures/special_chains.json
    python -m src.cli check 2 7 27

退出码: 0 成立，1 不成立，2 用法或输入错误，3 无法判定。
"""
import argparse
import contextlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

from src.cstriple import CSTriple, InvalidTripleError, dual, is_valid_triple, make_standard_matrix, trace_discriminant
from src.cubicorder import (BOUND_CAP, DEFAULT_BOUND, Equivalent, Inconclusive, OrderMismatchError,
                            ideal_from_triple, is_equivalent, is_invertible, is_invertible_fast)
from src.families import (FILTER_FIRST_FAILURE, FILTER_MEMBERSHIP, FILTERS, FamilySolution, certify_family,
                          non_invertible_witnesses, scan_families, scan_not_group)
from src.gompf import DEFAULT_BUDGET, load_chains, reduce_to_base, verify_chain
from src.intarith import factorize
from src.representatives import DEFAULT_D_MAX, compare_with_table, load_table, mark_special, minimal_representatives

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

BOUND_ENV = "CS_TOOLKIT_BOUND"
FULL_SCAN_PMAX = 32455777
FULL_SCAN_COUNT = {FILTER_FIRST_FAILURE: 146, FILTER_MEMBERSHIP: 197}

FORMATS = ("json", "tsv")
_DEFAULT_FORMAT = {"scan-not-group": "tsv", "families": "json", "reps": "tsv"}


@dataclass(frozen=True)
class RunConfig:
    command: str
    bound: int = DEFAULT_BOUND
    cap: int = BOUND_CAP
    budget: int = DEFAULT_BUDGET
    d_max: int = DEFAULT_D_MAX
    output_format: str = "json"
    output: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        for name in ("bound", "cap", "budget", "d_max", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.output_format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.output_format!r}")

    @classmethod
    def from_args(cls, args):
        bound = args.bound if getattr(args, "bound", None) is not None else default_bound()
        return cls(
            command=args.command,
            bound=bound,
            cap=max(getattr(args, "cap", BOUND_CAP), bound),
            budget=getattr(args, "budget", DEFAULT_BUDGET),
            d_max=getattr(args, "dmax", DEFAULT_D_MAX),
            output_format=getattr(args, "format", None) or _DEFAULT_FORMAT.get(args.command, "json"),
            output=getattr(args, "output", None),
            workers=getattr(args, "workers", 1),
        )


def default_bound():
    raw = os.environ.get(BOUND_ENV)
    if raw is None or raw == "":
        return DEFAULT_BOUND
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{BOUND_ENV} must be an integer, got {raw!r}") from None


@contextlib.contextmanager
def _output(config):
    if config.output is None:
        yield sys.stdout
    else:
        with open(config.output, "w", encoding="utf-8") as fh:
            yield fh


def _triple_from(values):
    c, d, n = values
    if not is_valid_triple(c, d, n):
        raise InvalidTripleError(f"({c},{d},{n}) is not a CS triple: d must be nonzero and divide f_n(c)")
    return CSTriple(c, d, n)


def cmd_scan_not_group(args, config):
    if args.min > args.max:
        print(f"error: --min {args.min} exceeds --max {args.max}", file=sys.stderr)
        return EXIT_USAGE
    traces = scan_not_group(args.min, args.max, workers=config.workers)
    with _output(config) as out:
        for n in traces:
            if config.output_format == "json":
                out.write(json.dumps({"n": n, "witnesses": non_invertible_witnesses(n)}) + "\n")
            else:
                out.write(f"{n}\n")
    return EXIT_OK


def cmd_families(args, config):
    if args.pmax < 2:
        print(f"error: --pmax must be at least 2, got {args.pmax}", file=sys.stderr)
        return EXIT_USAGE
    solutions = scan_families(args.pmax, only_solved=not args.all, rule=args.filter, workers=config.workers)
    with _output(config) as out:
        for sol in solutions:
            out.write((json.dumps(sol.to_json()) if config.output_format == "json" else sol.to_tsv()) + "\n")
    print(f"{len(solutions)} solutions with p <= {args.pmax}", file=sys.stderr)
    expected = FULL_SCAN_COUNT[args.filter]
    if not args.all and args.pmax == FULL_SCAN_PMAX and len(solutions) != expected:
        logger.warning("expected %d solved families up to %d under %s, found %d",
                       expected, FULL_SCAN_PMAX, args.filter, len(solutions))
    return EXIT_OK


def cmd_reps(args, config):
    reps = minimal_representatives(args.trace, config.d_max, config.bound, cap=config.cap)
    reps = mark_special(reps)
    with _output(config) as out:
        out.write((json.dumps(reps.to_json()) if config.output_format == "json" else reps.to_tsv()) + "\n")
    if reps.inconclusive:
        print(f"{len(reps.inconclusive)} comparisons undecided at bound {config.cap}", file=sys.stderr)
    if args.compare:
        expected = load_table(args.compare).get(args.trace)
        if expected is None:
            print(f"error: trace {args.trace} not in {args.compare}", file=sys.stderr)
            return EXIT_USAGE
        diff = compare_with_table(reps, expected)
        for key, value in diff.items():
            print(f"{key}: {value}", file=sys.stderr)
        if diff:
            return EXIT_FALSE
    return EXIT_INCONCLUSIVE if reps.inconclusive else EXIT_OK


def cmd_verify_chains(args, config):
    chains = load_chains(args.file)
    passed, undecided = 0, 0
    with _output(config) as out:
        for i, chain in enumerate(chains, 1):
            report = verify_chain(chain, config.bound)
            name = chain.name or f"chain {i}"
            if report.ok:
                passed += 1
                out.write(f"{name}: ok ({len(chain.steps)} steps)\n")
            else:
                undecided += report.inconclusive
                failure = report.first_failure
                out.write(f"{name}: FAIL at step {failure.index} ({failure.move}): {failure.reason}\n")
        out.write(f"{passed}/{len(chains)} chains verified\n")
    if passed == len(chains):
        return EXIT_OK
    return EXIT_FALSE if passed + undecided < len(chains) else EXIT_INCONCLUSIVE


def cmd_check(args, config):
    t = _triple_from(args.triple)
    ideal = ideal_from_triple(t)
    invertible = is_invertible(ideal)
    with _output(config) as out:
        out.write(f"triple {t}: valid\n")
        out.write(f"matrix: {[list(row) for row in make_standard_matrix(t).matrix]}\n")
        out.write(f"ideal: den={ideal.den} basis={[list(row) for row in ideal.basis]}\n")
        out.write(f"norm: {ideal.norm}\n")
        out.write(f"invertible: {invertible} (fast path: {is_invertible_fast(t)})\n")
    return EXIT_OK


def cmd_equivalent(args, config):
    first = _triple_from(args.triples[:3])
    second = _triple_from(args.triples[3:])
    verdict = is_equivalent(ideal_from_triple(first), ideal_from_triple(second), config.bound, cap=config.cap)
    with _output(config) as out:
        out.write(f"{first} vs {second}: {verdict}\n")
    if isinstance(verdict, Equivalent):
        return EXIT_OK
    return EXIT_INCONCLUSIVE if isinstance(verdict, Inconclusive) else EXIT_FALSE


def cmd_reduce(args, config):
    t = _triple_from(args.triple)
    result = reduce_to_base(t, config.budget, config.bound, d_max=config.d_max, cap=config.cap)
    if result is None:
        print(f"no chain from {t} within {config.budget} expansions", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    with _output(config) as out:
        out.write(json.dumps(result.to_json()) + "\n")
    return EXIT_OK


def cmd_dual(args, config):
    t = _triple_from(args.triple)
    with _output(config) as out:
        out.write(f"{dual(t)}\n")
    return EXIT_OK


def cmd_certify(args, config):
    sol = FamilySolution(args.c, args.p, args.n0)
    ok = certify_family(sol, range(args.kmin, args.kmax + 1))
    with _output(config) as out:
        out.write(f"({args.c},{args.p},{args.n0}) k in [{args.kmin}, {args.kmax}]: "
                  f"{'certified' if ok else 'not certified'}\n")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_disc(args, config):
    disc = trace_discriminant(args.n)
    factors = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in factorize(disc))
    with _output(config) as out:
        out.write(f"disc(f_{args.n}) = {disc} = {'-' if disc < 0 else ''}{factors}\n")
        for c, p in non_invertible_witnesses(args.n):
            out.write(f"non-invertible: ({c},{p},{args.n})\n")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cs-toolkit", description="Cappell-Shaneson matrix computations")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--output", default=None, help="write results here instead of stdout")
    bounded = argparse.ArgumentParser(add_help=False)
    bounded.add_argument("--bound", type=int, default=None,
                         help=f"initial equivalence bound (default {DEFAULT_BOUND}, env {BOUND_ENV})")
    bounded.add_argument("--cap", type=int, default=BOUND_CAP)
    parallel = argparse.ArgumentParser(add_help=False)
    parallel.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("scan-not-group", parents=[common, parallel], help="traces whose class monoid is not a group")
    p.add_argument("--min", type=int, required=True)
    p.add_argument("--max", type=int, required=True)
    p.set_defaults(handler=cmd_scan_not_group)

    p = sub.add_parser("families", parents=[common, parallel], help="scan primes for non-invertible families")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true", help="keep every solution")
    group.add_argument("--solved-only", action="store_true", help="keep solutions with a solved trace (default)")
    p.add_argument("--filter", choices=FILTERS, default=FILTER_FIRST_FAILURE,
                   help="how --solved-only tests a root: stop at the first failing root (default) or keep every match")
    p.add_argument("--pmax", type=int, required=True)
    p.set_defaults(handler=cmd_families)

    p = sub.add_parser("reps", parents=[common, bounded], help="minimal class representatives of one trace")
    p.add_argument("--trace", type=int, required=True)
    p.add_argument("--dmax", type=int, default=DEFAULT_D_MAX)
    p.add_argument("--compare", default=None, help="representative table JSON to compare against")
    p.set_defaults(handler=cmd_reps)

    p = sub.add_parser("verify-chains", parents=[common, bounded], help="re-verify equivalence chains")
    p.add_argument("file")
    p.set_defaults(handler=cmd_verify_chains)

    for name, handler, text in (("check", cmd_check, "validity, matrix, ideal and invertibility"),
                                ("dual", cmd_dual, "dual triple (c*, d, 5 - n)")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("triple", type=int, nargs=3, metavar=("C", "D", "N"))
        p.set_defaults(handler=handler)

    p = sub.add_parser("equivalent", parents=[common, bounded], help="are two triples similar")
    p.add_argument("triples", type=int, nargs=6, metavar=("C1", "D1", "N1", "C2", "D2", "N2"))
    p.set_defaults(handler=cmd_equivalent)

    p = sub.add_parser("reduce", parents=[common, bounded], help="search a chain to (1,1,2)")
    p.add_argument("triple", type=int, nargs=3, metavar=("C", "D", "N"))
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--dmax", type=int, default=DEFAULT_D_MAX)
    p.set_defaults(handler=cmd_reduce)

    p = sub.add_parser("certify", parents=[common], help="certify a family (c, p, n0 + p^2 k)")
    p.add_argument("c", type=int)
    p.add_argument("p", type=int)
    p.add_argument("n0", type=int)
    p.add_argument("--kmin", type=int, default=-2)
    p.add_argument("--kmax", type=int, default=2)
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("disc", parents=[common], help="discriminant of f_n and its factorisation")
    p.add_argument("n", type=int)
    p.set_defaults(handler=cmd_disc)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        config = RunConfig.from_args(args)
        return args.handler(args, config)
    except (InvalidTripleError, OrderMismatchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
