"""Command-line interface: box/hom/ext/tor tables, sphere grids, checks.

Exit codes: 0 success, 2 validation or input failure, 3 resource limit.
Output is deterministic: identical invocations print identical bytes.
"""

import argparse
import json
import os
import re
import sys

from .intlin import FgAbGroup
from .mackey import (
    ResourceLimit,
    TowerShape,
    bform,
    catalog,
    constant_z,
    dual_levelwise,
    form_z,
    from_json,
    fingerprint,
    render_lewis,
    to_json,
    z_star,
    zero_functor,
)
from .boxhom import box, hom_group, internal_hom
from .homalg import ext_z, tor_z, pullback_compat_check
from .spheres import (
    RepLabel,
    anderson_check,
    bredon_homology,
    ext_sphere_crosscheck,
    form_to_rep,
    format_label,
    parse_label,
)
from . import selftest as selftest_mod


class CliError(Exception):
    def __init__(self, message, code=2):
        super().__init__(message)
        self.code = code


def parse_operand(shape, text):
    """Catalog names, JSON paths and a few aliases.

    Grammar: Z, Z*, Z<bits>, B<bits>, optional trailing * (levelwise dual)
    or E (levelwise Ext dual); Z- (p = 2 sign form); P<level> (permutation
    orbit); 0; json:<path>.
    """
    text = text.strip()
    if text.startswith("json:"):
        with open(text[5:]) as fh:
            return from_json(json.load(fh))
    dual_mode = None
    if text.endswith("E") and len(text) > 1 and text[0] in "ZB":
        dual_mode, text = "E", text[:-1]
    elif text.endswith("*") and len(text) > 1 and text != "Z*":
        dual_mode, text = "star", text[:-1]
    if text == "0":
        out = zero_functor(shape)
    elif text == "Z":
        out = constant_z(shape)
    elif text == "Z*":
        out = z_star(shape)
    elif text == "Z-":
        out = catalog(shape, "sign", None)
    elif text.startswith("P") and text[1:].isdigit():
        out = catalog(shape, "perm", [int(text[1:])])
    elif text.startswith("Z") and _is_bits(text[1:], shape.n):
        out = form_z(shape, tuple(int(c) for c in text[1:]))
    elif text.startswith("B") and _is_bits(text[1:], shape.n):
        out = bform(shape, tuple(int(c) for c in text[1:]))
    else:
        raise CliError("cannot parse operand %r (want Z, Z*, Z<bits>, B<bits>, "
                       "Z-, P<level>, 0 or json:<path>)" % text)
    if dual_mode:
        out = dual_levelwise(out, dual_mode)
    return out


def _is_bits(text, n):
    return len(text) == n and all(c in "01" for c in text)


def _shape(args):
    return TowerShape(args.p, args.n)


def emit_functor(m, fmt, out):
    if fmt == "json":
        out.write(json.dumps(to_json(m), sort_keys=True) + "\n")
    else:
        out.write(render_lewis(m) + "\n")


def emit_graded(shape, graded, fmt, out, pi_offset=None):
    """Print a graded Mackey functor as a table, Lewis diagrams or JSON."""
    if fmt == "json":
        doc = {"schema": "mackey-graded/1", "p": shape.p, "n": shape.n,
               "degrees": {str(d): to_json(m) for d, m in graded.values.items()}}
        out.write(json.dumps(doc, sort_keys=True) + "\n")
        return
    degrees = graded.degrees()
    if not degrees:
        out.write("zero in all degrees\n")
        return
    for d in degrees:
        m = graded.values[d]
        levels = " | ".join(g.describe() for g in reversed(m.level))
        stem = "" if pi_offset is None else "   stem %d" % (d - pi_offset)
        out.write("degree %d%s:  %s\n" % (d, stem, levels))
        if fmt == "lewis":
            for line in render_lewis(m).splitlines()[1:]:
                out.write("    " + line + "\n")


def cmd_box(args, out):
    shape = _shape(args)
    m = parse_operand(shape, args.left)
    n_ = parse_operand(shape, args.right)
    result = box(m, n_)
    emit_functor(result, args.format, out)
    return 0


def cmd_hom(args, out):
    shape = _shape(args)
    m = parse_operand(shape, args.left)
    n_ = parse_operand(shape, args.right)
    result = internal_hom(m, n_)
    emit_functor(result, args.format, out)
    return 0


def _cmd_derived(args, out, functor):
    shape = _shape(args)
    m = parse_operand(shape, args.left)
    n_ = parse_operand(shape, args.right)
    graded = functor(m, n_)
    emit_graded(shape, graded, args.format, out)
    return 0


def cmd_ext(args, out):
    return _cmd_derived(args, out, ext_z)


def cmd_tor(args, out):
    return _cmd_derived(args, out, tor_z)


def cmd_sphere(args, out):
    shape = _shape(args)
    label = parse_label(shape, args.label)
    graded = bredon_homology(label)
    out.write("S^{%s}  (dimension %d)\n" % (format_label(label), label.dim()))
    emit_graded(shape, graded, args.format, out, pi_offset=label.dim())
    return 0


def cmd_forms(args, out):
    shape = _shape(args)
    rows = []
    for bits in range(2 ** shape.n):
        ts = tuple((bits >> i) & 1 for i in range(shape.n))
        label = form_to_rep(form_z(shape, ts))
        rows.append(("Z_" + "".join(str(t) for t in ts), format_label(label)))
    if args.format == "json":
        out.write(json.dumps({"schema": "mackey-forms/1",
                              "forms": [{"name": a, "label": b}
                                        for a, b in rows]}, sort_keys=True) + "\n")
    else:
        for name, label in rows:
            out.write("%s  ~  S^{%s} ^ HZ\n" % (name, label))
    return 0


def cmd_pullback(args, out):
    shape = _shape(args)
    m = parse_operand(shape, args.left)
    n_ = parse_operand(shape, args.right)
    report = pullback_compat_check(m, n_, args.k)
    out.write(json.dumps(report, sort_keys=True) + "\n")
    return 0 if report["ok"] else 2


def cmd_duality(args, out):
    shape = _shape(args)
    label = parse_label(shape, args.label)
    report = anderson_check(label)
    out.write(json.dumps(report, sort_keys=True) + "\n")
    return 0 if report["ok"] else 2


def cmd_crosscheck(args, out):
    shape = _shape(args)
    m = parse_operand(shape, args.left)
    n_ = parse_operand(shape, args.right)
    report = ext_sphere_crosscheck(m, n_)
    out.write(json.dumps(report, sort_keys=True) + "\n")
    return 0 if report["ok"] else 2


def cmd_selftest(args, out):
    results = selftest_mod.run(suite=args.suite, pmax=args.pmax, jobs=args.jobs,
                               golden_dir=os.environ.get("MACKEY_GOLDEN_DIR"),
                               out=out, write_golden=args.write_golden)
    return 0 if all(ok for _name, ok, _detail in results) else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cpmackey",
        description="Exact Mackey-functor homological algebra and Bredon "
                    "homology for cyclic p-groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_shape=True):
        if needs_shape:
            p.add_argument("--p", type=int, default=3, help="the prime")
            p.add_argument("--n", type=int, default=1,
                           help="exponent: the group is C_{p^n}")
        p.add_argument("--format", choices=("lewis", "json", "grid"),
                       default="grid")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes for grid commands")

    for name, fn, doc in (("box", cmd_box, "box product of two Z-modules"),
                          ("hom", cmd_hom, "internal Hom of two Z-modules"),
                          ("ext", cmd_ext, "derived Ext table"),
                          ("tor", cmd_tor, "derived Tor table")):
        p = sub.add_parser(name, help=doc)
        common(p)
        p.add_argument("left")
        p.add_argument("right")
        p.set_defaults(func=fn)

    p = sub.add_parser("sphere", help="Bredon homology of a representation sphere")
    common(p)
    p.add_argument("label", help="e.g. '2L1-3L0+4', '-2s', 'L0@2'")
    p.set_defaults(func=cmd_sphere)

    p = sub.add_parser("forms", help="all forms of Z and their sphere labels")
    common(p)
    p.set_defaults(func=cmd_forms)

    p = sub.add_parser("pullback", help="check Ext/Tor commute with inflation")
    common(p)
    p.add_argument("--k", type=int, default=1,
                   help="inflate along the quotient by C_{p^k}")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_pullback)

    p = sub.add_parser("duality", help="Anderson pairing check for a label")
    common(p)
    p.add_argument("label")
    p.set_defaults(func=cmd_duality)

    p = sub.add_parser("crosscheck", help="Ext/Tor of forms against the sphere engine")
    common(p)
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_crosscheck)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    common(p, needs_shape=False)
    p.add_argument("--suite", default="all",
                   help="criterion selector, e.g. all, quick, cp2, c2, forms")
    p.add_argument("--pmax", type=int, default=5,
                   help="largest prime used by the C_{p^2} grid suites")
    p.add_argument("--write-golden", action="store_true",
                   help="regenerate the golden fingerprint files")
    p.set_defaults(func=cmd_selftest)
    return parser


_LABELY = re.compile(r"^-(\d|L\d|s)")


def _protect_labels(argv):
    """Insert '--' before a leading-dash representation label like '-2s'."""
    out = []
    inserted = False
    for tok in argv:
        if not inserted and _LABELY.match(tok):
            out.append("--")
            inserted = True
        out.append(tok)
    return out


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_protect_labels(list(argv)))
    try:
        return args.func(args, out)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.code
    except ResourceLimit as exc:
        print("resource limit: %s" % exc, file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
