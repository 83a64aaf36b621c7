"""Command-line entry point.

Exit codes: 0 success, 1 property violated (a witness is reported), 2 usage
error, 3 resource limit, 4 indeterminate numeric result.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .errors import IndeterminateError, InvalidInputError, VcsatError
from .family import vc_dimension
from .io import Report, format_family, read_family, set_list, write_family
from .modular import (
    ResidueSet,
    check_even_conditions,
    check_odd_conditions,
    construct,
    find_valid_X,
    infer_residue_set,
)
from .probabilistic import lll_evaluate, monte_carlo_search, sample_pair_family, verify_almost_shattering
from .saturation import (
    duplicate_classes,
    extend_by_duplication,
    is_duplication_safe,
    is_saturated,
    min_saturated_size,
)
from .sumset import restricted_sumset

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_RESOURCE, EXIT_INDETERMINATE = range(5)


def _int_list(text: str) -> list[int]:
    text = text.strip().strip("{}")
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _conditions(d: int, x: ResidueSet) -> dict:
    rep = check_odd_conditions(d, x) if d % 2 else check_even_conditions(d, x)
    return {"X": list(x), "cond1": rep.cond1, "cond2": rep.cond2, "cond3": rep.cond3,
            "witness": rep.witness, "all_pass": rep.all_pass}


def cmd_construct(args, report: Report) -> int:
    built = construct(args.d, args.n)
    fam = built.family
    report.family_size = len(fam)
    report.vc = vc_dimension(fam)
    report.saturated = True
    report.details = {
        "base_size": len(built.base),
        "duplicated_element": built.duplicated,
        "verification": built.verification,
        "size_bound_4_pow_d": 4 ** args.d,
    }
    if args.out:
        write_family(fam, args.out)
        report.details["out"] = args.out
    else:
        args.emit = format_family(fam)
    return EXIT_OK


def cmd_verify(args, report: Report) -> int:
    fam = read_family(args.family)
    report.family_size = len(fam)
    check = args.check
    if check == "vc":
        report.vc = vc_dimension(fam)
        return EXIT_OK
    if check == "saturation":
        sat = is_saturated(fam)
        report.vc = sat.vc
        report.saturated = sat.saturated
        if not sat.saturated:
            report.ok = False
            report.witnesses.append({"addable": set_list(sat.counterexample)})
            return EXIT_VIOLATED
        if sat.shattering_witness:
            a, s = sat.shattering_witness
            report.details["example_blocked"] = {"add": set_list(a), "shatters": set_list(s)}
        return EXIT_OK
    if fam.n % 2:
        report.ok = False
        report.message = f"ground set [{fam.n}] is not of the form [2d]"
        return EXIT_USAGE
    d = fam.n // 2
    if check == "almost-shatter":
        res = verify_almost_shattering(fam, d)
        report.almost_shattering = res.ok
        report.details["subsets_checked"] = res.checked
        if not res.ok:
            report.ok = False
            report.witnesses.append({"S": set_list(res.failing), "missing": [set_list(m) for m in res.missing]})
            return EXIT_VIOLATED
        return EXIT_OK
    # conditions
    if args.set is not None:
        x = ResidueSet.mod(2 * d, args.set)
    else:
        x = infer_residue_set(fam)
        if x is None:
            report.ok = False
            report.message = "family is not a residue-sum family; pass --set"
            return EXIT_VIOLATED
    report.conditions = _conditions(d, x)
    if not report.conditions["all_pass"]:
        report.ok = False
        report.witnesses.append({"X": list(x), "leave_one_out": report.conditions["witness"]})
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_search_x(args, report: Report) -> int:
    found = find_valid_X(args.d)
    report.details = {"count": len(found), "sets": [list(x) for x in found]}
    return EXIT_OK


def cmd_sample(args, report: Report) -> int:
    res = monte_carlo_search(args.d, args.trials, args.seed)
    report.details = {
        "successes": res.successes,
        "rate": res.rate,
        "first_success_trial": res.first_success_trial,
        "first_success_seed": res.first_success_seed,
    }
    if args.out and res.first_success_seed is not None:
        write_family(sample_pair_family(args.d, res.first_success_seed), args.out)
        report.details["out"] = args.out
    return EXIT_OK


def cmd_lll(args, report: Report) -> int:
    if args.d_min > args.d_max:
        raise InvalidInputError("--d-min must not exceed --d-max")
    rows = []
    code = EXIT_OK
    for d in range(args.d_min, args.d_max + 1):
        try:
            ev = lll_evaluate(d)
            rows.append({"d": d, "holds": ev.holds, "log_margin": ev.log_margin, "bracket": list(ev.bracket)})
        except IndeterminateError as exc:
            rows.append({"d": d, "holds": None, "error": str(exc)})
            code = EXIT_INDETERMINATE
    report.details = {"results": rows}
    report.ok = code == EXIT_OK
    return code


def cmd_extend(args, report: Report) -> int:
    fam = read_family(args.family)
    if not 1 <= args.element <= fam.n:
        raise InvalidInputError(f"element {args.element} outside [1, {fam.n}]")
    classes = duplicate_classes(fam)
    if not classes.reduced:
        report.ok = False
        report.message = "family has duplicate elements"
        report.witnesses.extend({"class": list(c)} for c in classes.classes if len(c) > 1)
        return EXIT_VIOLATED
    if not is_duplication_safe(fam, args.element):
        flip = 1 << (args.element - 1)
        pair = next(b for b in fam.bits if (b ^ flip) in fam)
        report.ok = False
        report.message = f"element {args.element} is not safe to duplicate"
        report.witnesses.append({"F": set_list(pair), "F_flipped": set_list(pair ^ flip)})
        return EXIT_VIOLATED
    out = extend_by_duplication(fam, args.element, args.n)
    report.family_size = len(out)
    if args.out:
        write_family(out, args.out)
        report.details["out"] = args.out
    else:
        args.emit = format_family(out)
    return EXIT_OK


def cmd_sumset(args, report: Report) -> int:
    a = ResidueSet.mod(args.modulus, args.set)
    res = restricted_sumset(a, args.s)
    report.details = {"sumset": list(res), "size": len(res)}
    return EXIT_OK


def cmd_satnum(args, report: Report) -> int:
    report.details = {"sat_vc": min_saturated_size(args.n, args.d)}
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    report_opt = argparse.ArgumentParser(add_help=False)
    report_opt.add_argument("--report", choices=("text", "machine"), default=argparse.SUPPRESS,
                            help="output form (default: text)")
    parser = argparse.ArgumentParser(prog="vcsat", description="Build and verify saturated families of bounded VC dimension.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--report", choices=("text", "machine"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[report_opt], help="build a saturated family")
    p.add_argument("--d", type=int, required=True, help="construction parameter; VC dimension is d-1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[report_opt], help="check a family file")
    p.add_argument("--family", required=True)
    p.add_argument("--check", required=True, choices=("vc", "saturation", "almost-shatter", "conditions"))
    p.add_argument("--set", type=_int_list, help="residue set X for --check conditions")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search-x", parents=[report_opt], help="enumerate valid residue sets")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_search_x)

    p = sub.add_parser("sample", parents=[report_opt], help="Monte Carlo over random pair families")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--out", help="write the first almost-shattering sample here")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("lll", parents=[report_opt], help="evaluate the Local Lemma inequality")
    p.add_argument("--d-min", type=int, required=True)
    p.add_argument("--d-max", type=int, required=True)
    p.set_defaults(func=cmd_lll)

    p = sub.add_parser("extend", parents=[report_opt], help="duplicate an element")
    p.add_argument("--family", required=True)
    p.add_argument("--element", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("sumset", parents=[report_opt], help="restricted sumset")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--set", type=_int_list, required=True)
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_sumset)

    p = sub.add_parser("satnum", parents=[report_opt], help="exhaustive saturation number")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_satnum)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "report", "command", "emit")}
    report = Report(command=args.command, parameters=params)
    args.emit = None
    start = time.perf_counter()
    try:
        code = args.func(args, report)
    except VcsatError as exc:
        report.ok, report.message, code = False, str(exc), exc.exit_code
    except OSError as exc:
        report.ok, report.message, code = False, str(exc), EXIT_USAGE
    report.duration_s = time.perf_counter() - start

    rendered = report.to_json() if args.report == "machine" else report.to_text()
    if args.emit is not None:
        sys.stdout.write(args.emit)
        sys.stderr.write(rendered)
    else:
        sys.stdout.write(rendered)
    return code


if __name__ == "__main__":
    sys.exit(main())
