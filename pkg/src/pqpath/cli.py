"""pqpath command line.

Exit codes: 0 success, 1 usage or parse error, 2 verification failure,
3 internal invariant breach.
"""

import argparse
import sys
from pathlib import Path

from . import io as pqp_io
from .builders import ConjointDesign, build_cbc, build_svm_dual
from .core import format_rat, qp_to_lcp, to_rat, validate_psd
from .crisscross import DEFAULT_MAX_PIVOTS
from .errors import InvariantError, PQPError
from .oracle import verify_path
from .path import INFEASIBLE, eval_path, trace_path

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_INVARIANT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text):
    try:
        return to_rat(text)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _levels(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


def _add_output_options(p):
    p.add_argument("--eval", dest="eval_mu", type=_rational, metavar="MU",
                   help="print x*(MU) instead of the whole path")
    p.add_argument("--sample", type=_rational, metavar="STEP",
                   help="print a CSV sampled every STEP")
    p.add_argument("--exact", action="store_true", help="print exact segments (default)")
    p.add_argument("--precision", type=int, default=pqp_io.DEFAULT_PRECISION,
                   help="significant digits in sampled output")
    p.add_argument("--verify", type=int, metavar="N",
                   help="check the path against brute-force enumeration at N extra points")
    p.add_argument("--max-pivots", type=int, default=DEFAULT_MAX_PIVOTS)
    p.add_argument("--stats", action="store_true",
                   help="print (cold, bend1, bend2, ...) pivot counts to stderr")


def build_parser():
    parser = _Parser(prog="pqpath", description="Exact solution paths of parametric QPs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve-path", help="trace the path of a PQP file")
    p.add_argument("file")
    _add_output_options(p)

    p = sub.add_parser("svm-path", help="C-path of the dual soft-margin SVM")
    p.add_argument("points")
    p.add_argument("--c-min", type=_rational, required=True)
    p.add_argument("--c-max", type=_rational, required=True)
    p.add_argument("--sum-alpha", type=int, choices=(0, 1), default=0,
                   help="right-hand side of sum_i y_i alpha_i")
    _add_output_options(p)

    p = sub.add_parser("cbc-path", help="C-path of choice-based conjoint part-worths")
    p.add_argument("choices")
    p.add_argument("--levels", type=_levels, required=True, help="levels per attribute, e.g. 3,5,6")
    p.add_argument("--c-min", type=_rational, required=True)
    p.add_argument("--c-max", type=_rational, required=True)
    _add_output_options(p)

    p = sub.add_parser("check", help="validate shape and positive semidefiniteness of a PQP file")
    p.add_argument("file")
    return parser


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PQPError(f"cannot read {path}: {exc.strerror}") from exc


def _run_path(args, qp, back_map=None, out=sys.stdout, err=sys.stderr):
    if not validate_psd(qp.Q):
        raise PQPError("Q is not positive semidefinite")
    if args.eval_mu is not None and not qp.mu_min <= args.eval_mu <= qp.mu_max:
        raise PQPError(f"--eval {format_rat(args.eval_mu)} lies outside [{format_rat(qp.mu_min)}, {format_rat(qp.mu_max)}]")
    path = trace_path(qp_to_lcp(qp), max_pivots=args.max_pivots)
    show = back_map if back_map is not None else list
    if args.eval_mu is not None:
        left, right = eval_path(path, args.eval_mu, both=True)
        if right is INFEASIBLE:
            out.write("infeasible\n")
        else:
            out.write(" ".join(format_rat(v) for v in show(right)) + "\n")
            if left != right:
                out.write("# jump; left limit: " + " ".join(format_rat(v) for v in show(left)) + "\n")
    elif args.sample is not None:
        out.write(pqp_io.write_path(path, "sampled", args.sample, args.precision,
                                    objective=qp.objective, back_map=back_map))
    else:
        out.write(pqp_io.write_path(path, "exact", objective=qp.objective, back_map=back_map))
    if args.stats:
        seq = path.stats.sequence()
        err.write(f"stats: bends={path.stats.bends} pivots=({','.join(map(str, seq))})\n")
    if args.verify is not None:
        report = verify_path(qp, path, args.verify)
        err.write(report.summary() + "\n")
        if not report.ok:
            return EXIT_VERIFY
    return EXIT_OK


def run(argv=None, out=sys.stdout, err=sys.stderr):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            pf = pqp_io.parse_problem_file(_read(args.file))
            if not validate_psd(pf.qp.Q):
                err.write("Q is not positive semidefinite\n")
                return EXIT_USAGE
            out.write(f"ok: n={pf.qp.n} m={pf.qp.m} mu=[{format_rat(pf.qp.mu_min)}, {format_rat(pf.qp.mu_max)}]\n")
            return EXIT_OK
        if args.command == "solve-path":
            qp = pqp_io.parse_problem(_read(args.file))
            return _run_path(args, qp, out=out, err=err)
        if args.command == "svm-path":
            inst = pqp_io.read_svm_csv(_read(args.points))
            qp = build_svm_dual(inst, (args.c_min, args.c_max), sum_alpha=args.sum_alpha)
            return _run_path(args, qp, out=out, err=err)
        if args.command == "cbc-path":
            design = ConjointDesign(args.levels)
            choices = pqp_io.read_cbc_csv(_read(args.choices), design)
            problem = build_cbc(design, choices, (args.c_min, args.c_max))
            return _run_path(args, problem.qp, back_map=problem.recover, out=out, err=err)
    except InvariantError as exc:
        err.write(f"internal error: {exc}\n")
        return EXIT_INVARIANT
    except PQPError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
