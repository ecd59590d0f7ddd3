"""Command-line front end.

Exit codes: 0 on pass, 1 when an axiom or property check fails, 2 for
file/parse/usage errors.  The last output line is always
``RESULT: PASS|FAIL <details>`` so scripts can grep one line.
"""

from __future__ import annotations

import argparse
import random
import sys

from . import bordism, crossed, frobenius, gerbe, groups
from .bordism import ArityError, WordSyntaxError
from .crossed import BundleError, LabelError
from .frobenius import StructureError
from .gerbe import CocycleError
from .groups import GroupError
from .tensor import equal, format_scalar

PARSE_ERRORS = (WordSyntaxError, ArityError, StructureError, GroupError,
                BundleError, LabelError, CocycleError, OSError, ValueError)


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _result(out, ok, details=""):
    tail = (" " + details) if details else ""
    out.write("RESULT: %s%s\n" % ("PASS" if ok else "FAIL", tail))
    return 0 if ok else 1


def _load_word(source):
    """--word accepts either a literal word or a path to a file holding one."""
    import os
    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            source = fh.read()
    return bordism.parse_word(source)


def _load_group(path):
    with open(path, "r", encoding="utf-8") as fh:
        return groups.parse_group(fh.read())


def _print_matrix(out, t, arity_in, dim):
    rows, cols = dim ** (t.rank - arity_in), dim ** arity_in
    mat = bordism.as_matrix(t, arity_in, dim)
    out.write("%d x %d\n" % (rows, cols))
    for i in range(rows):
        out.write(" ".join(format_scalar(mat[i, j]) for j in range(cols)) + "\n")


def _report_lines(out, report):
    out.write("checked: %s\n" % ", ".join(report.checked))
    for v in report.violations:
        out.write("violation: %s\n" % v)


def cmd_validate(args, out):
    if args.bundle:
        bundle = crossed.load_bundle(args.bundle, exact=args.mode == "exact")
        report = crossed.validate_bundle(bundle)
    elif args.algebra:
        algebra = frobenius.load_algebra(args.algebra, exact=args.mode == "exact")
        report = frobenius.validate(algebra)
    else:
        raise _Exit(2, "validate needs --algebra or --bundle")
    _report_lines(out, report)
    return _result(out, report.passed,
                   "%d axioms checked, %d violations"
                   % (len(report.checked), len(report.violations)))


def cmd_eval(args, out):
    if not args.algebra or not args.word:
        raise _Exit(2, "eval needs --algebra and --word")
    algebra = frobenius.load_algebra(args.algebra, exact=args.mode == "exact")
    w = _load_word(args.word)
    t = bordism.evaluate(w, algebra)
    _print_matrix(out, t, w.arity_in, algebra.dim)
    return _result(out, True, "%d->%d" % (w.arity_in, w.arity_out))


def cmd_invariant(args, out):
    if not args.algebra:
        raise _Exit(2, "invariant needs --algebra")
    algebra = frobenius.load_algebra(args.algebra, exact=args.mode == "exact")
    z = frobenius.closed_invariant(algebra, args.genus)
    out.write("%s\n" % format_scalar(z))
    return _result(out, True, "genus %d invariant %s" % (args.genus, format_scalar(z)))


def cmd_type(args, out):
    if not args.word:
        raise _Exit(2, "type needs --word")
    w = _load_word(args.word)
    tt = bordism.topological_type(w)
    for genus, ins, outs in tt.components:
        out.write("component genus %d in %s out %s\n"
                  % (genus, sorted(ins), sorted(outs)))
    return _result(out, True, "%d components" % len(tt.components))


def cmd_fuzz_equiv(args, out):
    if not args.algebra:
        raise _Exit(2, "fuzz-equiv needs --algebra")
    algebra = frobenius.load_algebra(args.algebra, exact=args.mode == "exact")
    rng = random.Random(args.seed)
    agree = 0
    first_bad = None
    for i in range(args.count):
        arity = (rng.randrange(3), rng.randrange(3))
        w1, w2 = bordism.random_equivalent_pair(arity, args.max_layers,
                                                args.seed + i)
        if equal(bordism.evaluate(w1, algebra), bordism.evaluate(w2, algebra)):
            agree += 1
        elif first_bad is None:
            first_bad = i
    ok = agree == args.count
    if first_bad is not None:
        out.write("disagreement at case %d\n" % first_bad)
    return _result(out, ok, "%d/%d agreements" % (agree, args.count))


def cmd_roundtrip(args, out):
    if args.bundle:
        bundle = crossed.load_bundle(args.bundle, exact=args.mode == "exact")
    elif args.group:
        bundle = crossed.from_group_algebra(_load_group(args.group))
    else:
        raise _Exit(2, "roundtrip needs --bundle or --group")
    words = crossed.enumerate_labeled_words(bundle.group, args.max_gens,
                                            budget_per_shape=args.count)
    report = crossed.roundtrip_check(bundle, words)
    _report_lines(out, report)
    return _result(out, report.passed, "%d test words" % len(words))


def cmd_holonomy(args, out):
    if args.bundle:
        bundle = crossed.load_bundle(args.bundle, exact=args.mode == "exact")
    elif args.group:
        bundle = crossed.from_group_algebra(_load_group(args.group))
    else:
        raise _Exit(2, "holonomy needs --bundle or --group")
    G = bundle.group
    if args.surface:
        with open(args.surface, "r", encoding="utf-8") as fh:
            b = crossed.parse_labeled(fh.read(), G)
    elif args.labels is not None:
        names = [s for s in args.labels.split(",") if s]
        if len(names) % 2:
            raise _Exit(2, "--labels wants pairs a1,b1,a2,b2,...")
        handles = [(G.index(names[i]), G.index(names[i + 1]))
                   for i in range(0, len(names), 2)]
        b = crossed.closed_surface_word(G, args.genus, handles)
    else:
        raise _Exit(2, "holonomy needs --surface or --genus/--labels")
    z = crossed.holonomy(b, bundle)
    out.write("%s\n" % format_scalar(z))
    return _result(out, True, "holonomy %s" % format_scalar(z))


def cmd_cocycle(args, out):
    if not args.cocycle:
        raise _Exit(2, "cocycle needs --cocycle <file>")
    sb = gerbe.load_cocycle(args.cocycle, exact=args.mode == "exact")
    report = gerbe.check_cocycle(sb)
    _report_lines(out, report)
    if report.passed and args.labels is not None:
        G = sb.group
        names = [s for s in args.labels.split(",") if s]
        handles = [(G.index(names[i]), G.index(names[i + 1]))
                   for i in range(0, len(names), 2)]
        z = gerbe.gerbe_holonomy(sb, args.genus, handles)
        out.write("%s\n" % format_scalar(z))
        return _result(out, True, "holonomy %s" % format_scalar(z))
    return _result(out, report.passed,
                   "%d axioms checked, %d violations"
                   % (len(report.checked), len(report.violations)))


COMMANDS = {
    "validate": cmd_validate,
    "eval": cmd_eval,
    "invariant": cmd_invariant,
    "type": cmd_type,
    "fuzz-equiv": cmd_fuzz_equiv,
    "roundtrip": cmd_roundtrip,
    "holonomy": cmd_holonomy,
    "cocycle": cmd_cocycle,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="tqft2d",
        description="Evaluate bordism words against Frobenius algebras and "
                    "graded Frobenius bundles over a finite group.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--algebra", help="algebra file or builtin name")
    p.add_argument("--bundle", help="bundle file")
    p.add_argument("--group", help="group file")
    p.add_argument("--word", help="bordism word, literal or a file path")
    p.add_argument("--surface", help="labeled surface file")
    p.add_argument("--cocycle", help="cocycle file")
    p.add_argument("--genus", type=int, default=1)
    p.add_argument("--labels", help="comma-separated handle labels a1,b1,...")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-layers", type=int, default=8)
    p.add_argument("--max-gens", type=int, default=3)
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--tolerance", type=float, default=1e-9)
    return p


def run(argv, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 2
    try:
        return COMMANDS[args.command](args, out)
    except _Exit as exc:
        out.write("error: %s\n" % exc)
        out.write("RESULT: FAIL %s\n" % exc)
        return exc.code
    except PARSE_ERRORS as exc:
        out.write("error: %s\n" % exc)
        out.write("RESULT: FAIL %s\n" % exc)
        return 2


def entry():
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    entry()
