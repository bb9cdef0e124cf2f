"""
Command-line front end.

    fib present --r 2 --n 5
    fib tietze --family seven --k 1
    fib order --r 3 --n 6 --max-cosets 500000
    fib star-labels --degree 4
    fib curvature 3 3 4 6
    fib regions classify --degree 8 --labelings
    fib ledger check ledgers/thresholds.ledger --json
    fib report --output-dir verification_results
"""

import sys
import json
import logging
import argparse

from curvature import curvature, load_complex, total_curvature
from ledger import check_file
from oracle import (DEFAULT_MAX_COSETS, Finite, abelianization, coset_enumerate, format_abelian,
                    verify_fibonacci_orders)
from presentations import (FAMILIES, build_extension, build_fibonacci, build_relative_pn,
                           format_presentation, load_tietze_script, tietze_script_for,
                           verify_tietze_script)
from regions import classify_regions
from reports import VerificationReport
from stargraph import enumerate_vertex_labels, format_label

logger = logging.getLogger(__name__)


def present_command(args):
    if args.relative is not None:
        p = build_relative_pn(args.relative).as_presentation()
    elif args.family is not None:
        p = build_extension(args.k, args.family)
    else:
        p = build_fibonacci(args.r, args.n)
    print(format_presentation(p), end="")
    return 0


def tietze_command(args):
    if args.script:
        script = load_tietze_script(args.script, args.N)
    else:
        script = tietze_script_for(args.family, args.k)
    verdict = verify_tietze_script(script.start, script, script.target)
    if args.trace:
        for i, step in enumerate(verdict.trace):
            print(f"--- after {i} steps")
            print(format_presentation(step), end="")
    print(verdict)
    return 0 if verdict.valid else 1


def order_command(args):
    result = coset_enumerate(build_fibonacci(args.r, args.n), max_cosets=args.max_cosets,
                             strategy=args.strategy)
    if isinstance(result, Finite):
        print(f"F({args.r},{args.n}): order {result.order} ({result.cosets_defined} cosets defined)")
        return 0
    print(f"F({args.r},{args.n}): not closed within {args.max_cosets} cosets "
          f"({result.cosets_defined} defined)")
    return 1


def ab_command(args):
    factors = abelianization(build_fibonacci(args.r, args.n))
    print(f"F({args.r},{args.n})^ab = {format_abelian(factors)}")
    return 0


def verify_orders_command(args):
    reports = verify_fibonacci_orders(max_cosets=args.max_cosets, strategy=args.strategy,
                                      progress=not args.quiet)
    if args.json:
        print(json.dumps([rep.as_dict() for rep in reports], indent=2))
    else:
        for rep in reports:
            print(f"F({rep.r},{rep.n}): expected {rep.expected}, got {rep.got} "
                  f"[{rep.status}] {rep.cosets_defined} cosets, {rep.ms:.0f} ms")
    failures = [rep for rep in reports if rep.status != "pass"]
    if failures and not args.json:
        print(f"{len(failures)} of {len(reports)} cases did not pass")
    return 1 if failures else 0


def star_labels_command(args):
    labels = enumerate_vertex_labels(args.degree, args.mod, progress=not args.quiet)
    texts = [format_label(label, pretty=args.pretty) for label in labels]
    for text in texts:
        print(text)
    print(json.dumps({"degree": args.degree, "count": len(texts), "labels": texts}))
    return 0


def curvature_command(args):
    print(curvature(args.degrees, raw=args.raw))
    return 0


def euler_command(args):
    complex_ = load_complex(args.complex)
    print(f"{args.complex}: chi = {complex_.euler_characteristic()}, total curvature "
          f"{total_curvature(complex_)}")
    return 0


def regions_classify_command(args):
    report = classify_regions(args.degree, args.nmin, allow_large=args.allow_large,
                              progress=not args.quiet)
    print(json.dumps(report.as_dict(labelings=args.labelings), indent=2))
    return 0


def ledger_check_command(args):
    report = check_file(args.file, progress=not args.quiet)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2))
    else:
        print(f"{args.file}: {report.verified} verified, {report.refuted} refuted, "
              f"{report.malformed} malformed")
        for v in report.verdicts:
            if v.status != "verified":
                print(f"  {v.entry_id}: {v.status} {v.value if v.value is not None else ''} {v.reason}".rstrip())
        for v in report.findings():
            print(f"  finding {v.entry_id}: {v.finding}")
    return report.exit_status


def report_command(args):
    report = VerificationReport(args.output_dir, nmin=args.nmin, max_cosets=args.max_cosets,
                                strategy=args.strategy, progress=not args.quiet)
    findings = report.run_all(include_orders=not args.skip_orders)
    if args.json:
        print(json.dumps(findings, indent=2))
    return 0


def _add_enumeration_args(parser):
    parser.add_argument('--max-cosets', type=int, default=DEFAULT_MAX_COSETS,
                        help='Give up when this many cosets are live')
    parser.add_argument('--strategy', choices=['hlt', 'felsch'], default='hlt',
                        help='Coset enumeration strategy')


def build_parser():
    parser = argparse.ArgumentParser(prog='fib', description='Checks for the P_n asphericity argument')
    parser.add_argument('--verbose', '-v', action='store_true', help='Log debug detail')
    parser.add_argument('--quiet', '-q', action='store_true', help='Hide progress bars')
    subparsers = parser.add_subparsers(dest='command', required=True)

    present = subparsers.add_parser('present', help='Print a presentation')
    present.add_argument('--r', type=int, default=2)
    present.add_argument('--n', type=int, default=5)
    present.add_argument('--relative', type=int, metavar='N', help='Print P_N instead')
    present.add_argument('--family', choices=sorted(FAMILIES), help='Print an extension presentation')
    present.add_argument('--k', type=int, default=0)
    present.set_defaults(func=present_command)

    tietze = subparsers.add_parser('tietze', help='Replay a Tietze script')
    tietze.add_argument('--script', help='JSON script file')
    tietze.add_argument('--N', type=int, help='Exponent for templated scripts')
    tietze.add_argument('--family', choices=sorted(FAMILIES), default='seven',
                        help='Shipped script to use when --script is not given')
    tietze.add_argument('--k', type=int, default=0)
    tietze.add_argument('--trace', action='store_true', help='Print every intermediate presentation')
    tietze.set_defaults(func=tietze_command)

    order = subparsers.add_parser('order', help='Order of F(r,n) by coset enumeration')
    order.add_argument('--r', type=int, required=True)
    order.add_argument('--n', type=int, required=True)
    _add_enumeration_args(order)
    order.set_defaults(func=order_command)

    ab = subparsers.add_parser('ab', help='Abelianization of F(r,n)')
    ab.add_argument('--r', type=int, required=True)
    ab.add_argument('--n', type=int, required=True)
    ab.set_defaults(func=ab_command)

    orders = subparsers.add_parser('verify-orders', aliases=['verify-thm1'],
                                   help='Check the F(r,n) order classification')
    _add_enumeration_args(orders)
    orders.add_argument('--json', action='store_true')
    orders.set_defaults(func=verify_orders_command)

    labels = subparsers.add_parser('star-labels', help='Admissible vertex labels of a degree')
    labels.add_argument('--degree', type=int, required=True)
    labels.add_argument('--mod', type=int, default=5)
    labels.add_argument('--pretty', action='store_true', help='Unicode letters')
    labels.set_defaults(func=star_labels_command)

    curv = subparsers.add_parser('curvature', help='Curvature of a region from its vertex degrees')
    curv.add_argument('degrees', type=int, nargs='+')
    curv.add_argument('--raw', action='store_true', help='Allow degrees below 3')
    curv.set_defaults(func=curvature_command)

    euler = subparsers.add_parser('euler', help='Total curvature of a spherical complex')
    euler.add_argument('--complex', required=True, help='JSON complex file')
    euler.set_defaults(func=euler_command)

    regions = subparsers.add_parser('regions', help='Region classification')
    region_commands = regions.add_subparsers(dest='regions_command', required=True)
    classify = region_commands.add_parser('classify', help='Surviving chord configurations of a degree')
    classify.add_argument('--degree', type=int, required=True)
    classify.add_argument('--nmin', type=int, default=7)
    classify.add_argument('--labelings', action='store_true')
    classify.add_argument('--allow-large', action='store_true')
    classify.set_defaults(func=regions_classify_command)

    ledger = subparsers.add_parser('ledger', help='Ledger files')
    ledger_commands = ledger.add_subparsers(dest='ledger_command', required=True)
    check = ledger_commands.add_parser('check', help='Re-evaluate every entry of a ledger file')
    check.add_argument('file')
    check.add_argument('--json', action='store_true')
    check.set_defaults(func=ledger_check_command)

    report = subparsers.add_parser('report', help='Write the full verification report')
    report.add_argument('--output-dir', '-o', default='verification_results',
                        help='Directory to save the report and figures')
    report.add_argument('--nmin', type=int, default=7)
    report.add_argument('--skip-orders', action='store_true', help='Skip the coset enumerations')
    report.add_argument('--json', action='store_true', help='Print the findings as JSON')
    _add_enumeration_args(report)
    report.set_defaults(func=report_command)

    return parser


def main(argv=None):
    """Parse the command line and run one subcommand; returns the exit status"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        return int(args.func(args))
    except (ValueError, OSError) as e:
        print(f"Error running {args.command}: {str(e)}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
