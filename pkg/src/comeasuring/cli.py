"""Command-line front end.

Exit status: 0 when every check passes, 1 when a verification fails, 2 on
bad input or usage.
"""

import argparse
import json
import sys
from fractions import Fraction

from . import presets
from .braided import BraidedPresentation, verify_braided_bialgebra
from .comeasure import (AlgebraSpec, BialgebraPresentation, Report, build, parse_variant,
                        universal_check, validate_algebra, verify_bialgebra, verify_coaction)
from .rmat import RMatrix, covariance_check, qybe_check, unit_compatible
from .scalars import ScalarField


class UsageError(Exception):
    pass


def _dump(doc):
    return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError("cannot read %s: %s" % (path, e.strerror))
    except json.JSONDecodeError as e:
        raise UsageError("%s is not valid JSON: %s" % (path, e))


def _field(args, default="q"):
    try:
        return ScalarField.from_string(args.field or default)
    except ValueError as e:
        raise UsageError(str(e))


def _q(args, F):
    """q from --q: ``symbolic`` (the field's generator) or an exact number."""
    text = args.q
    if text is None or text == "symbolic":
        return F.q() if F.has_q else None
    try:
        val = Fraction(text)
    except ValueError:
        raise UsageError("--q takes 'symbolic' or an exact number, not %r" % text)
    if not val:
        raise UsageError("q must be nonzero")
    return F.from_rational(val)


def _variant(args, default):
    try:
        return parse_variant(args.variant or default)
    except ValueError as e:
        raise UsageError(str(e))


def _load_spec(path, F):
    doc = _read_json(path)
    try:
        return AlgebraSpec.from_json(doc, F if "field" not in doc else None)
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError("bad algebra spec in %s: %s" % (path, e))


def _load_bialgebra(doc):
    try:
        if "braiding" in doc:
            return BraidedPresentation.from_json(doc)
        return BialgebraPresentation.from_json(doc)
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError("bad presentation: %s" % (e,))


def render(bp, grouped=True):
    """Text rendering, with grouped power identities where they span the ideal."""
    lines = [bp.to_text()]
    if grouped and len(bp.generators) <= 4 and any(bp.relations):
        found = presets.power_groupings(bp.base)
        if found:
            lines.append("grouped:")
            lines.extend("  " + x for x in found)
    return "\n".join(lines) + "\n"


class Output:
    def __init__(self, args):
        self.fmt = args.format
        self.path = args.out
        self.text = []
        self.doc = {}

    def emit(self):
        body = _dump(self.doc) if self.fmt == "json" else "".join(self.text)
        if self.path:
            with open(self.path, "w") as fh:
                fh.write(body)
        else:
            sys.stdout.write(body)

    def report(self, rep, key="report"):
        self.doc[key] = rep.to_json()
        self.text.append(rep.to_text() + "\n")

    def presentation(self, bp):
        self.doc["presentation"] = bp.to_json()
        self.text.append(render(bp))


# ---------------------------------------------------------------- commands


def cmd_validate(args, out):
    spec = _load_spec(args.input, _field(args))
    rep = validate_algebra(spec)
    out.report(rep)
    return rep.ok


def _verify(bp, spec, L, oracle):
    rep = Report("verification")
    if isinstance(bp, BraidedPresentation):
        rep.merge(verify_braided_bialgebra(bp, L, coaction=bool(bp.braiding.cross_left)))
    elif not bp.formal:
        rep.merge(verify_bialgebra(bp, L))
    if spec is not None and bp.coaction is not None:
        rep.merge(verify_coaction(bp, spec, L))
    if oracle:
        if spec is None:
            raise UsageError("--oracle needs an algebra spec")
        rank, match = universal_check(spec, bp.variant, L)
        rep.check("oracle ideal slice matches (rank %d)" % rank, match, rank)
    return rep


def cmd_build(args, out):
    spec = _load_spec(args.input, _field(args))
    try:
        bp = build(spec, _variant(args, "m1"))
    except ValueError as e:
        raise UsageError(str(e))
    out.presentation(bp)
    if args.verify or args.oracle:
        rep = _verify(bp, spec, args.degree, args.oracle)
        out.report(rep)
        return rep.ok
    return True


def cmd_verify(args, out):
    doc = _read_json(args.input)
    if "dim" in doc:
        spec = _load_spec(args.input, _field(args))
        try:
            bp = build(spec, _variant(args, "m1"))
        except ValueError as e:
            raise UsageError(str(e))
    else:
        bp = _load_bialgebra(doc)
        spec = bp.spec
    rep = _verify(bp, spec, args.degree, args.oracle)
    out.report(rep)
    return rep.ok


def _run_preset(args):
    if not args.preset:
        raise UsageError("a preset name is required")
    F = _field(args, None) if args.field else None
    q = _q(args, F or ScalarField.from_string("q")) if args.q else None
    if q is not None and F is None:
        F = q.field
    try:
        return presets.run_preset(args.preset, variant=args.variant, L=args.degree,
                                  D=args.truncate, field=F, q=q, verify=args.verify,
                                  oracle=args.oracle, derive_mq2=args.derive_mq2)
    except (KeyError, ValueError) as e:
        raise UsageError(e.args[0] if e.args else str(e))


def cmd_preset(args, out):
    res = _run_preset(args)
    out.doc["preset"] = res.name
    out.presentation(res.bp)
    out.report(res.report)
    return res.report.ok


def cmd_check_r(args, out):
    F = _field(args, None) if args.field else None
    spec = None
    if args.r:
        doc = _read_json(args.r)
        try:
            R = RMatrix.from_json(doc, F or ScalarField.from_string(doc.get("field", "q")))
        except (KeyError, ValueError) as e:
            raise UsageError("bad R-matrix: %s" % (e,))
        if args.input:
            spec = _load_spec(args.input, R.field)
    elif args.preset:
        q = _q(args, F or ScalarField.from_string("q")) if args.q else None
        try:
            R, spec = presets.r_preset(args.preset, args.truncate, F, q)
        except (KeyError, ValueError) as e:
            raise UsageError(e.args[0] if e.args else str(e))
    else:
        raise UsageError("check-r needs --r FILE or --preset NAME")
    rep = Report("check-r %s" % (R.name or "R"))
    rep.merge(qybe_check(R))
    if spec is not None:
        rep.merge(covariance_check(R, spec))
        if spec.unit is not None:
            rep.data["unit compatible"] = unit_compatible(R, spec.unit)
    rep.data["size"] = R.n
    out.report(rep)
    return rep.ok


def cmd_coinv(args, out):
    from .comeasure import coinvariant_closure, coinvariants
    name = args.preset or "two_point"
    if name not in presets.BUNDLES:
        raise UsageError("unknown bundle %r (choose from %s)"
                         % (name, ", ".join(sorted(presets.BUNDLES))))
    M, pi, M0 = presets.BUNDLES[name](_field(args, "rational"))
    co = coinvariants(M, pi, M0, args.degree)
    rep = Report("coinvariants of %s at weight <= %d" % (name, args.degree))
    rep.data["basis"] = [M.base.poly_str(p) for p in co]
    rep.check("closed under products", coinvariant_closure(M, co, args.degree) is None)
    out.report(rep)
    return rep.ok


def cmd_export(args, out):
    if args.preset:
        bp = _run_preset(args).bp
    elif args.input:
        doc = _read_json(args.input)
        if "dim" in doc:
            spec = _load_spec(args.input, _field(args))
            try:
                bp = build(spec, _variant(args, "m1"))
            except ValueError as e:
                raise UsageError(str(e))
        else:
            bp = _load_bialgebra(doc)
    else:
        raise UsageError("export needs an input file or --preset")
    if args.format == "json":
        out.doc = bp.to_json()
    else:
        out.text.append(render(bp))
    return True


COMMANDS = {
    "validate": cmd_validate,
    "build": cmd_build,
    "verify": cmd_verify,
    "preset": cmd_preset,
    "check-r": cmd_check_r,
    "coinv": cmd_coinv,
    "export": cmd_export,
}


def make_parser():
    p = argparse.ArgumentParser(prog="comeasuring",
                                description="Comeasuring bialgebras of finite-dimensional "
                                            "and graded algebras.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("input", nargs="?", help="algebra spec or presentation JSON")
    p.add_argument("name", nargs="?", help="preset name (same as --preset)")
    p.add_argument("--preset")
    p.add_argument("--r", help="R-matrix JSON for check-r")
    p.add_argument("--variant", help="m1, m or m0")
    p.add_argument("-L", "--degree", type=int, default=3)
    p.add_argument("-D", "--truncate", type=int)
    p.add_argument("--field", help="q, rational or cyclotomic:N")
    p.add_argument("--q", help="'symbolic' or an exact number")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--derive-mq2", action="store_true")
    return p


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    # ``preset fermion`` and ``check-r --preset x`` both work
    if args.command in ("preset", "coinv") and args.input and not args.preset:
        args.preset, args.input = args.input, None
    if args.name and not args.preset:
        args.preset = args.name
    if args.degree < 0 or (args.truncate is not None and args.truncate < 0):
        print("error: -L and -D must be >= 0", file=sys.stderr)
        return 2
    out = Output(args)
    try:
        ok = COMMANDS[args.command](args, out)
        out.emit()
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
