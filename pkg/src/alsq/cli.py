"""Command-line interface.

Exit codes: 0 when a witness was found (or the command simply succeeded),
2 for a certified impossibility, 3 for an undetermined outcome, and 1 for
usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .analyze import AnalyzeOptions, analyze
from .diagram import render_diagram
from .generate import MODES, GeneratorSpec, generate
from .measures import (
    AtomicMeasure,
    MeasureError,
    convolve,
    dumps_measure,
    load_measure,
    measure_to_json_dict,
    save_measure,
    strip_zero_atom,
)
from .scalars import DEFAULT_PRECISION_BITS, DEFAULT_TOLERANCE, ScalarError
from .shifts import minimal_recurrence, moment_sequence
from .solver import (
    IMPOSSIBLE,
    UNDETERMINED,
    WITNESS,
    SolverConfig,
    Verdict,
    aluthge_subnormal,
    sqrt_of,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IMPOSSIBLE = 2
EXIT_UNDETERMINED = 3

_VERDICT_EXIT = {WITNESS: EXIT_OK, IMPOSSIBLE: EXIT_IMPOSSIBLE,
                 UNDETERMINED: EXIT_UNDETERMINED}

SCHEMA = "alsq/1"


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION_BITS,
                        metavar="BITS", help="working precision in bits")
    common.add_argument("--tol", default=None, metavar="DECIMAL",
                        help="comparison tolerance (default 2^-64)")
    common.add_argument("--json", action="store_true",
                        help="emit machine-readable JSON")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized components")
    common.add_argument("--max-candidates", type=int, default=20000,
                        help="cap on enumerated candidate supports")
    return common


def _config(args) -> SolverConfig:
    if args.tol is None:
        tol = DEFAULT_TOLERANCE
    else:
        try:
            tol = Fraction(args.tol)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarError(f"cannot parse tolerance {args.tol!r}") from exc
    return SolverConfig(precision_bits=args.precision, tolerance=tol,
                        max_candidates=args.max_candidates, seed=args.seed)


def _load(path: str, args) -> AtomicMeasure:
    return load_measure(path, bits=args.precision)


def _print_verdict(verdict: Verdict, args) -> int:
    if args.json:
        payload = verdict.to_json_dict()
        payload["schema"] = SCHEMA
        print(json.dumps(payload, indent=2))
    else:
        print(verdict.render())
    return _VERDICT_EXIT[verdict.outcome]


def cmd_analyze(args) -> int:
    mu = _load(args.measure, args)
    options = AnalyzeOptions(config=_config(args), shift_terms=args.shift_terms)
    report = analyze(mu, options)
    if args.json:
        payload = report.to_json_dict()
        if args.diagram:
            _, body = strip_zero_atom(mu)
            payload["diagram"] = render_diagram(body)
        print(json.dumps(payload, indent=2))
    else:
        print(report.render())
        if args.diagram:
            _, body = strip_zero_atom(mu)
            print()
            print(render_diagram(body))
    if report.aluthge_verdict is not None:
        return _VERDICT_EXIT[report.aluthge_verdict.outcome]
    return EXIT_OK


def cmd_sqrt(args) -> int:
    _, mu = strip_zero_atom(_load(args.measure, args))
    return _print_verdict(sqrt_of(mu, _config(args)), args)


def cmd_aluthge(args) -> int:
    _, mu = strip_zero_atom(_load(args.measure, args))
    return _print_verdict(aluthge_subnormal(mu, _config(args)), args)


def cmd_convolve(args) -> int:
    left = _load(args.left, args)
    right = _load(args.right, args)
    result = convolve(left, right, bits=args.precision)
    if args.out:
        save_measure(result, args.out)
        print(f"wrote {result.p} atoms to {args.out}")
    elif args.json:
        print(dumps_measure(result), end="")
    else:
        print(result)
    return EXIT_OK


def cmd_shift(args) -> int:
    _, mu = strip_zero_atom(_load(args.measure, args))
    options = AnalyzeOptions(config=_config(args), shift_terms=args.terms,
                             run_sqrt=False, run_aluthge=False)
    report = analyze(mu, options)
    if args.json:
        print(json.dumps({"schema": SCHEMA, "shift_tables": report.shift_tables},
                         indent=2))
    else:
        header = f"{'n':>3} {'alpha':>22} {'aluthge alpha':>22} " \
                 f"{'gamma':>22} {'aluthge gamma':>22}"
        print(header)
        for row in report.shift_tables["rows"]:
            print("{:>3} {:>22} {:>22} {:>22} {:>22}".format(*row))
    return EXIT_OK


def cmd_recurrence(args) -> int:
    _, mu = strip_zero_atom(_load(args.measure, args))
    if mu.mode != "rational" or any(pos.k == 1 for pos in mu.support):
        print("error: exact moments require a rational-mode measure with "
              "rational positions", file=sys.stderr)
        return EXIT_ERROR
    gammas = moment_sequence(mu, 2 * args.max_order)
    recurrence = minimal_recurrence(gammas, args.max_order)
    if args.json:
        payload = {
            "schema": SCHEMA,
            "order": recurrence.order if recurrence else None,
            "coefficients": [str(c) for c in recurrence.coefficients]
            if recurrence else None,
        }
        print(json.dumps(payload, indent=2))
    elif recurrence is None:
        print(f"no linear recurrence of order <= {args.max_order}")
    else:
        terms = " + ".join(
            f"({c})*g[n+{j}]" for j, c in enumerate(recurrence.coefficients))
        print(f"order {recurrence.order}: g[n+{recurrence.order}] = {terms}")
    return EXIT_OK if recurrence is not None else EXIT_UNDETERMINED


def cmd_gen(args) -> int:
    spec = GeneratorSpec(p=args.p, mode=args.mode, seed=args.seed,
                         position_style=args.style, case=args.case)
    instance = generate(spec)
    if args.out:
        save_measure(instance.measure, args.out)
        print(f"wrote {instance.measure.p}-atom measure to {args.out}")
        if args.witness_out and instance.witness is not None:
            save_measure(instance.witness, args.witness_out)
            print(f"wrote retained witness to {args.witness_out}")
    else:
        payload = {
            "schema": SCHEMA,
            "measure": measure_to_json_dict(instance.measure),
            "witness": measure_to_json_dict(instance.witness)
            if instance.witness is not None else None,
            "meta": instance.meta,
        }
        print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_all

    results = run_all(verbose=True)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alsq",
        description="Square roots of finitely atomic measures under "
                    "multiplicative convolution, with exact certificates.")
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", parents=[common],
                               help="full report for a measure file")
    p_analyze.add_argument("measure")
    p_analyze.add_argument("--diagram", action="store_true",
                           help="append the ASCII product diagram")
    p_analyze.add_argument("--shift-terms", type=int, default=0, metavar="N",
                           help="include N rows of shift/moment tables")
    p_analyze.set_defaults(func=cmd_analyze)

    p_sqrt = sub.add_parser("sqrt", parents=[common],
                            help="decide the square root problem")
    p_sqrt.add_argument("measure")
    p_sqrt.set_defaults(func=cmd_sqrt)

    p_aluthge = sub.add_parser("aluthge", parents=[common],
                               help="decide subnormality of the transformed shift")
    p_aluthge.add_argument("measure")
    p_aluthge.set_defaults(func=cmd_aluthge)

    p_conv = sub.add_parser("convolve", parents=[common],
                            help="multiplicative convolution of two measures")
    p_conv.add_argument("left")
    p_conv.add_argument("right")
    p_conv.add_argument("--out", help="write the result to a measure file")
    p_conv.set_defaults(func=cmd_convolve)

    p_shift = sub.add_parser("shift", parents=[common],
                             help="shift weight and moment tables")
    p_shift.add_argument("measure")
    p_shift.add_argument("--terms", type=int, default=8)
    p_shift.set_defaults(func=cmd_shift)

    p_rec = sub.add_parser("recurrence", parents=[common],
                           help="minimal linear recurrence of the moments")
    p_rec.add_argument("measure")
    p_rec.add_argument("--max-order", type=int, default=8)
    p_rec.set_defaults(func=cmd_recurrence)

    p_gen = sub.add_parser("gen", parents=[common],
                           help="generate a random instance")
    p_gen.add_argument("--p", type=int, required=True)
    p_gen.add_argument("--mode", choices=MODES, default="arbitrary")
    p_gen.add_argument("--style", choices=("geometric", "random"),
                       default="geometric")
    p_gen.add_argument("--case", choices=("I", "II"), default=None,
                       help="six-atom closed-form pattern")
    p_gen.add_argument("--out", help="write the measure to a file")
    p_gen.add_argument("--witness-out",
                       help="write the retained witness, when one exists")
    p_gen.set_defaults(func=cmd_gen)

    p_self = sub.add_parser("selftest", parents=[common],
                            help="run the acceptance suite")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MeasureError, ScalarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
