"""
Command-line front end.

    antisym-ainf check FILE
    antisym-ainf minmodel FILE
    antisym-ainf formality run [FILE] [--seed N --generators n] [--no-symmetrize]
    antisym-ainf scramble --seed N [--generators n] [--grading N] [--profile P] [FILE]
    antisym-ainf mc eval FILE --b EXPR
    antisym-ainf mc gauge FILE --b0 EXPR --b1 EXPR --c EXPR
    antisym-ainf mc floer FILE --b EXPR
    antisym-ainf hochschild check|epsilon|primitive FILE [--slot k,beta]

FILE may be a path or '@name' for a bundled fixture (see `list`).
Exit status: 0 pass, 1 mathematical failure, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources

from .ainfinity import check_ainf, check_homomorphism, check_self_dual, is_quasi_iso, nu
from .formality import (
    FormalityError, ScrambleProfile, formality_run, is_formal, scramble, torus_model,
    validate_antisymmetric,
)
from .graded import NO_SOLUTION
from .hochschild import epsilon, hoch_b, is_antisymmetric, solve_primitive, structure_cochain
from .mc import (
    CandidateError, ObstructedError, check_gauge, floer_rank, format_element, mc_residual,
    parse_element,
)
from .perturbation import RetractionError, build_minimal_model, derive_retraction
from .scalars import TruncParams, fmt_rational, parse_rational
from .textio import Model, ParseError, emit, model_for, parse

PASS, FAIL, INPUT_ERROR = 0, 1, 2

PROFILES = {
    "default": ScrambleProfile(),
    "light": ScrambleProfile(slots=((2, 0), (1, 1), (2, 1)), entries=2),
    "empty": ScrambleProfile.empty(),
}


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# reports


def render_text(report: dict) -> str:
    lines = []

    def walk(value, indent):
        pad = "  " * indent
        if isinstance(value, dict):
            for key in sorted(value):
                v = value[key]
                if isinstance(v, (dict, list)) and v:
                    lines.append("%s%s:" % (pad, key))
                    walk(v, indent + 1)
                elif isinstance(v, str) and "\n" in v:
                    lines.append("%s%s: |" % (pad, key))
                    for ln in v.rstrip("\n").split("\n"):
                        lines.append("%s  %s" % (pad, ln))
                else:
                    lines.append("%s%s: %s" % (pad, key, _scalar(v)))
        elif isinstance(value, list):
            for v in value:
                if isinstance(v, (dict, list)) and v:
                    lines.append("%s-" % pad)
                    walk(v, indent + 1)
                else:
                    lines.append("%s- %s" % (pad, _scalar(v)))

    walk(report, 0)
    return "\n".join(lines) + "\n"


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, (dict, list)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return render_text(report)


# ---------------------------------------------------------------------------
# inputs


def fixture_names():
    base = resources.files("antisym_ainf") / "data"
    return sorted(p.name[:-5] for p in base.iterdir() if p.name.endswith(".ainf"))


def read_input(name: str) -> str:
    if name.startswith("@"):
        path = resources.files("antisym_ainf") / "data" / (name[1:] + ".ainf")
        if not path.is_file():
            raise InputError("no bundled fixture %r (try `list`)" % name[1:])
        return path.read_text(encoding="utf-8")
    try:
        with open(name, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError("cannot read %s: %s" % (name, e.strerror)) from None


def load(args) -> tuple:
    text = read_input(args.file)
    model = parse(text)
    trunc = model.trunc
    energy = trunc.energy if trunc else None
    arity = trunc.arity if trunc else None
    if args.trunc_energy is not None:
        energy = parse_rational(args.trunc_energy)
    if args.trunc_arity is not None:
        arity = args.trunc_arity
    if energy is None or arity is None:
        raise InputError("no truncation window: add a truncation line or pass "
                         "--trunc-energy and --trunc-arity")
    trunc = TruncParams(energy, arity)
    model.trunc = trunc
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return model, trunc, digest


def _slot_str(k, b):
    return "(%d, %s)" % (k, fmt_rational(b))


def _failure_str(f, space):
    return f.describe(space)


def _nu_str(r):
    return str(r)


def _verdict(ok):
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# commands


def cmd_check(args):
    model, trunc, digest = load(args)
    m = model.structure
    c = model.involution_map()
    fails = check_ainf(m, trunc)
    sd = check_self_dual(m, c, trunc)
    ok = not fails and sd.ok
    report = {
        "command": "check",
        "input_sha256": digest,
        "window": str(trunc),
        "ainf_relations": _verdict(not fails),
        "ainf_failures": [_failure_str(f, m.source) for f in fails[:10]],
        "self_dual": _verdict(sd.ok),
        "self_dual_witness": sd.witness.describe(m.source) if sd.witness else None,
        "weakly_minimal": m.is_weakly_minimal(),
        "flat": m.is_flat(),
        "minimal": m.is_minimal(),
        "nu": _nu_str(nu(m, max_arity=trunc.arity - 1)),
        "verdict": _verdict(ok),
    }
    return report, PASS if ok else FAIL


def cmd_minmodel(args):
    model, trunc, digest = load(args)
    m = model.structure
    c = model.involution_map()
    if check_ainf(m, trunc):
        raise InputError("input violates the A∞ relations; run `check`")
    try:
        r = derive_retraction(m, c)
    except RetractionError as e:
        raise InputError(str(e)) from None
    mD, i = build_minimal_model(m, r, trunc)
    checks = {
        "ainf_relations": not check_ainf(mD, trunc),
        "weakly_minimal": mD.is_weakly_minimal(),
        "homomorphism": check_homomorphism(i, mD, m, trunc).ok,
        "quasi_isomorphism": is_quasi_iso(i, mD, m).ok,
        "self_dual": check_self_dual(mD, r.c_hat, trunc).ok,
    }
    ok = all(checks.values())
    report = {
        "command": "minmodel",
        "input_sha256": digest,
        "window": str(trunc),
        "cohomology_dim": r.harmonic.dim,
        "checks": {k: _verdict(v) for k, v in checks.items()},
        "structure": emit(model_for(mD, trunc, r.c_hat)),
        "verdict": _verdict(ok),
    }
    return report, PASS if ok else FAIL


def _scramble_model(args):
    n = args.generators
    if not 1 <= n <= 4:
        raise InputError("--generators must be between 1 and 4")
    if args.grading < 0 or args.grading % 2:
        raise InputError("--grading must be even and nonnegative")
    gca, minf, c = torus_model(n, args.grading)
    energy = parse_rational(args.trunc_energy) if args.trunc_energy else 3
    trunc = TruncParams(energy, args.trunc_arity or 5)
    m = scramble(args.seed, PROFILES[args.profile], c, trunc, space=gca)
    return Model(gca, m, trunc), trunc


def cmd_scramble(args):
    if args.file:
        model, trunc, digest = load(args)
        c = model.involution_map()
        m = scramble(args.seed, PROFILES[args.profile], c, trunc, base=model.structure)
        out = Model(model.space, m, trunc, model.involution, model.extra_signs,
                    model.custom_cols)
    else:
        out, trunc = _scramble_model(args)
        digest = None
    report = {
        "command": "scramble",
        "input_sha256": digest,
        "seed": args.seed,
        "profile": args.profile,
        "window": str(trunc),
        "structure": emit(out),
        "verdict": "pass",
    }
    return report, PASS


def cmd_formality(args):
    if args.file:
        model, trunc, digest = load(args)
    elif args.seed is not None:
        model, trunc = _scramble_model(args)
        digest = None
    else:
        raise InputError("formality run needs FILE or --seed")
    m = model.structure
    c = model.involution_map()
    v = validate_antisymmetric(m, c, trunc)
    report = {
        "command": "formality run",
        "input_sha256": digest,
        "seed": args.seed,
        "window": str(trunc),
        "symmetrize": not args.no_symmetrize,
        "validation": {name: _verdict(x.ok) for name, x in v.items()},
    }
    if not v.ok:
        name, x = v.first_failure()
        report["reason"] = "%s: %s" % (name, x.reason or x.witness)
        report["verdict"] = "fail"
        return report, FAIL
    try:
        g, m_inf, log = formality_run(m, c, trunc, not args.no_symmetrize, validate=False)
    except FormalityError as e:
        report["reason"] = str(e)
        report["verdict"] = "fail"
        return report, FAIL
    hom = check_homomorphism(g, m_inf, m, trunc).ok
    qi = is_quasi_iso(g, m_inf, m).ok
    formal = is_formal(m_inf, trunc)
    incr = log.strictly_increasing()
    rows = []
    for rec in log.records:
        rows.append("%d  nu %s -> %s  slots %s" % (
            rec.j, rec.nu_before, rec.nu_after,
            " ".join(_slot_str(k, b) for k, b in rec.slots)))
    ok = hom and qi and formal and incr
    report.update({
        "iterations": len(log.records),
        "gauge_log": rows,
        "nu_column": [str(x.value is None and "inf" or fmt_rational(x.value))
                      for x in log.nu_column()],
        "nu_strictly_increasing": incr,
        "formal": formal,
        "homomorphism": _verdict(hom),
        "quasi_isomorphism": _verdict(qi),
        "structure": emit(model_for(m_inf, trunc, c)),
        "verdict": _verdict(ok),
    })
    return report, PASS if ok else FAIL


def _element(text, space, what):
    try:
        return parse_element(text or "0", space)
    except (ValueError, KeyError) as e:
        raise InputError("bad %s: %s" % (what, e.args[0] if e.args else e)) from None


def _elem_report(b, space):
    return format_element(b, space)


def cmd_mc(args):
    model, trunc, digest = load(args)
    m = model.structure
    sp = model.space
    report = {"command": "mc " + args.mc_cmd, "input_sha256": digest, "window": str(trunc)}
    try:
        if args.mc_cmd == "eval":
            b = _element(args.b, sp, "--b")
            res = mc_residual(m, b, trunc)
            report.update({
                "b": _elem_report(b, sp),
                "residual": _elem_report(res.value, sp),
                "precision_energy": fmt_rational(res.precision),
                "bounding": res.vanishes,
                "verdict": _verdict(res.vanishes),
            })
            return report, PASS if res.vanishes else FAIL
        if args.mc_cmd == "gauge":
            b0 = _element(args.b0, sp, "--b0")
            b1 = _element(args.b1, sp, "--b1")
            cc = _element(args.c, sp, "--c")
            g = check_gauge(m, b0, b1, cc, trunc)
            report.update({
                "b0": _elem_report(b0, sp),
                "b1": _elem_report(b1, sp),
                "c": _elem_report(cc, sp),
                "difference": _elem_report(g.difference, sp),
                "precision_energy": fmt_rational(g.precision),
                "verdict": _verdict(g.ok),
            })
            return report, PASS if g.ok else FAIL
        b = _element(args.b, sp, "--b")
        try:
            fr = floer_rank(m, b, trunc)
        except ObstructedError as e:
            report.update({"b": _elem_report(b, sp), "reason": str(e), "verdict": "fail"})
            return report, FAIL
        report.update({
            "b": _elem_report(b, sp),
            "differential_zero": fr.differential_zero,
            "differential_rank": {str(d): r for d, r in fr.differential_rank.items()},
            "hf_rank": {str(d): r for d, r in fr.ranks.items()},
            "precision_energy": fmt_rational(fr.precision),
            "verdict": "pass",
        })
        return report, PASS
    except CandidateError as e:
        raise InputError(str(e)) from None


def _pick_slot(args, m, trunc):
    if args.slot:
        try:
            k, b = args.slot.split(",")
            return int(k), parse_rational(b)
        except ValueError:
            raise InputError("--slot expects k,beta") from None
    level = nu(m, max_arity=trunc.arity - 1)
    if not level.finite:
        return None
    return level.witness


def cmd_hochschild(args):
    model, trunc, digest = load(args)
    m = model.structure
    gca = model.space.gca
    if gca is None or model.space.dim != gca.size:
        raise InputError("hochschild commands need a structure on ΛV without extras")
    report = {"command": "hochschild " + args.h_cmd, "input_sha256": digest,
              "window": str(trunc)}
    slot = _pick_slot(args, m, trunc)
    if slot is None:
        report.update({"slot": None, "reason": "no operation at a finite level",
                       "verdict": "pass"})
        return report, PASS
    k, b = slot
    zeta = structure_cochain(gca, m.entry(k, b), arity=k)
    closed = hoch_b(zeta).is_zero()
    anti, witness = is_antisymmetric(zeta)
    report.update({"slot": _slot_str(k, b), "closed": closed, "antisymmetric": anti})
    if witness is not None:
        report["antisymmetry_witness"] = ", ".join(gca.names[j] for j in witness)
    if args.h_cmd == "check":
        report["verdict"] = _verdict(closed)
        return report, PASS if closed else FAIL
    if not closed:
        report["reason"] = "cochain is not closed"
        report["verdict"] = "fail"
        return report, FAIL
    if args.h_cmd == "epsilon":
        eps = epsilon(zeta, check_closed=False)
        report["epsilon"] = [
            "%s -> %s" % (" ".join(gca.names[j] for j in word), gca.format(v))
            for word, v in sorted(eps.items())]
        report["epsilon_zero"] = not eps
        report["verdict"] = "pass"
        return report, PASS
    eta = solve_primitive(zeta, check_closed=False)
    if eta is NO_SOLUTION:
        report["primitive"] = None
        report["verdict"] = "fail"
        return report, FAIL
    verified = hoch_b(eta) == zeta
    report["primitive"] = [
        "%s -> %s" % (", ".join(gca.labels[i] for i in key), gca.format(v))
        for key, v in sorted(eta.values.items())]
    report["verified"] = verified
    report["verdict"] = _verdict(verified)
    return report, PASS if verified else FAIL


def cmd_list(args):
    return {"command": "list", "fixtures": fixture_names(), "verdict": "pass"}, PASS


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc-energy", metavar="p/q")
    common.add_argument("--trunc-arity", type=int, metavar="k")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--output", "-o", metavar="PATH",
                        help="also write the emitted structure to PATH")

    p = argparse.ArgumentParser(prog="antisym-ainf",
                                description="Gapped A∞ algebras over a truncated Novikov field.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common])
    s.add_argument("file")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("minmodel", parents=[common])
    s.add_argument("file")
    s.set_defaults(run=cmd_minmodel)

    f = sub.add_parser("formality")
    fsub = f.add_subparsers(dest="f_cmd", required=True)
    s = fsub.add_parser("run", parents=[common])
    s.add_argument("file", nargs="?")
    s.add_argument("--seed", type=int)
    s.add_argument("--generators", type=int, default=2)
    s.add_argument("--grading", type=int, default=0)
    s.add_argument("--profile", choices=sorted(PROFILES), default="default")
    s.add_argument("--no-symmetrize", action="store_true")
    s.set_defaults(run=cmd_formality)

    s = sub.add_parser("scramble", parents=[common])
    s.add_argument("file", nargs="?")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--generators", type=int, default=2)
    s.add_argument("--grading", type=int, default=0)
    s.add_argument("--profile", choices=sorted(PROFILES), default="default")
    s.set_defaults(run=cmd_scramble)

    mc = sub.add_parser("mc")
    msub = mc.add_subparsers(dest="mc_cmd", required=True)
    for name in ("eval", "floer"):
        s = msub.add_parser(name, parents=[common])
        s.add_argument("file")
        s.add_argument("--b", default="0", metavar="EXPR",
                       help="e.g. 'v1 = 1*T^{1/2}; v2 = -1*T^{1}'")
        s.set_defaults(run=cmd_mc)
    s = msub.add_parser("gauge", parents=[common])
    s.add_argument("file")
    s.add_argument("--b0", default="0")
    s.add_argument("--b1", default="0")
    s.add_argument("--c", default="0")
    s.set_defaults(run=cmd_mc)

    h = sub.add_parser("hochschild")
    hsub = h.add_subparsers(dest="h_cmd", required=True)
    for name in ("check", "epsilon", "primitive"):
        s = hsub.add_parser(name, parents=[common])
        s.add_argument("file")
        s.add_argument("--slot", metavar="k,beta")
        s.set_defaults(run=cmd_hochschild)

    s = sub.add_parser("list", parents=[common])
    s.set_defaults(run=cmd_list)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    for attr in ("file", "trunc_energy", "trunc_arity", "seed"):
        if not hasattr(args, attr):
            setattr(args, attr, None)
    try:
        report, code = args.run(args)
    except (InputError, ParseError) as e:
        stderr.write("error: %s\n" % e)
        return INPUT_ERROR
    except ValueError as e:
        stderr.write("error: %s\n" % e)
        return INPUT_ERROR
    stdout.write(render(report, args.format))
    out = getattr(args, "output", None)
    if out and "structure" in report:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(report["structure"])
    return code


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
