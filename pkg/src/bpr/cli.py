"""Command-line front end.

Exit status: 0 for an affirmative verdict (valid, derivable, supported, adequate),
1 for a negative or undetermined one, 2 for bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bases, completeness, fileformat, rewrite, search, semantics
from .calculus import check_derivation, end_judgment, random_derivation
from .syntax import Sign, parse_formula, subformula_closure

OK, NO, BAD = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None


def _write(path: str, text: str) -> None:
    Path(path).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _formulas(text: Optional[str]) -> list:
    if not text:
        return []
    return [parse_formula(part) for part in text.split(",") if part.strip()]


def _atoms(text: Optional[str]) -> list[str]:
    return [a.strip() for a in (text or "").split(",") if a.strip()]


def _load_base(path: str, raw: bool) -> bases.Base:
    b = fileformat.parse_base(_read(path))
    return b if raw else bases.adequate_closure(b)


def _load_simulation(map_path: str) -> completeness.SimulationBase:
    table = fileformat.parse_mapping(_read(map_path))
    alpha = completeness.AtomicMapping(table)
    theta = subformula_closure(table)
    return completeness.build_simulation_base(theta, alpha)


def _bound(args) -> semantics.ExtensionBound:
    return semantics.ExtensionBound(args.extra_atoms, args.max_rules, args.max_premises,
                                    args.max_discharge)


# -- commands ------------------------------------------------------------------------

def cmd_check(args) -> int:
    text = _read(args.file)
    if fileformat.is_atomic_derivation_text(text):
        if not args.base:
            raise InputError("an atomic derivation needs --base")
        b = _load_base(args.base, args.raw)
        rep = bases.check_atomic_derivation(fileformat.parse_atomic_derivation(text, b), b)
    else:
        d = fileformat.parse_derivation(text)
        rep = check_derivation(d, bot_axiom=not args.no_bot_axiom)
        if rep.valid and args.subformula and not rewrite.check_subformula_property(d):
            print(f"VALID  {rep.end}\nSUBFORMULA PROPERTY FAILS")
            return NO
    print(rep)
    return OK if rep.valid else NO


def cmd_normalize(args) -> int:
    d = fileformat.parse_derivation(_read(args.file))
    rep = check_derivation(d, bot_axiom=not args.no_bot_axiom)
    if not rep.valid:
        print(rep)
        return NO
    normal, trace = rewrite.normalize(d)
    if args.trace:
        for line in trace.lines():
            print(line)
    out = fileformat.format_derivation(normal)
    if args.output:
        _write(args.output, out)
        print(f"NORMALIZED  {end_judgment(normal)}  ({len(trace)} steps)")
    else:
        print(out)
    return OK


def _prove(args, sign: Sign) -> int:
    goal = parse_formula(args.goal)
    gamma, delta = _formulas(args.gamma), _formulas(args.delta)
    cert = search.prove(gamma, delta, sign, goal, bot_axiom=not args.no_bot_axiom)
    if cert is None:
        print("NOT DERIVABLE")
        return NO
    print(f"DERIVABLE  {end_judgment(cert.derivation)}")
    text = fileformat.format_derivation(cert.derivation)
    if args.output:
        _write(args.output, text)
    else:
        print(text)
    return OK


def cmd_prove(args) -> int:
    return _prove(args, Sign.parse(args.sign))


def cmd_refute(args) -> int:
    return _prove(args, Sign.parse("-"))


def cmd_support(args) -> int:
    b = fileformat.parse_base(_read(args.base))
    if args.raw and not bases.is_epistemically_adequate(b):
        raise InputError("the base is not epistemically adequate (drop --raw to close it)")
    goal = parse_formula(args.goal)
    v = semantics.support(b, _formulas(args.gamma), _formulas(args.delta),
                          Sign.parse(args.sign), goal, _bound(args))
    print(v)
    if isinstance(v, semantics.Refuted) and args.output:
        _write(args.output, fileformat.format_base(v.witness))
    return OK if isinstance(v, semantics.Supported) else NO


def cmd_base_adequacy(args) -> int:
    b = _load_base(args.base, args.raw)
    checks = [("logically consistent", bases.is_logically_consistent(b)),
              ("unit complete", bases.is_unit_complete(b)),
              ("epistemically consistent", bases.is_epistemically_consistent(b))]
    for name, ok in checks:
        print(f"{name}: {'yes' if ok else 'no'}")
    ok = all(v for _, v in checks)
    print("ADEQUATE" if ok else "NOT ADEQUATE")
    return OK if ok else NO


def cmd_base_derive(args) -> int:
    b = _load_base(args.base, args.raw)
    S, T = _atoms(args.assume), _atoms(args.deny)
    d = bases.derivation_of(b, S, T, args.atom, Sign.parse(args.sign))
    if d is None:
        print("NOT DERIVABLE")
        return NO
    print(f"DERIVABLE  {bases.check_atomic_derivation(d).end}")
    print(fileformat.format_atomic_derivation(d))
    return OK


def cmd_simulate(args) -> int:
    theta = subformula_closure(_formulas(args.formulas))
    u = completeness.build_simulation_base(theta)
    base = completeness.inject_assumption_axioms(
        u, [u.mapping(f) for f in _formulas(args.gamma)],
        [u.mapping(f) for f in _formulas(args.delta)])
    _write(args.output + ".base", fileformat.format_base(base))
    _write(args.output + ".map", fileformat.format_mapping(u.mapping.table))
    print(f"SIMULATION  {len(theta)} formulas, {len(base.rules)} rules")
    return OK


def cmd_translate(args) -> int:
    u = _load_simulation(args.map)
    text = _read(args.file)
    if args.direction == "to-bpr":
        b = fileformat.parse_base(_read(args.base)) if args.base else u.base
        a = fileformat.parse_atomic_derivation(text, b)
        rep = bases.check_atomic_derivation(a, b)
        if not rep.valid:
            print(rep)
            return NO
        d = completeness.translate_to_bpr(a, u)
        print(check_derivation(d))
        print(fileformat.format_derivation(d))
    else:
        d = fileformat.parse_derivation(text)
        rep = check_derivation(d)
        if not rep.valid:
            print(rep)
            return NO
        a = completeness.translate_from_bpr(d, u)
        print(bases.check_atomic_derivation(a, u.base))
        print(fileformat.format_atomic_derivation(a))
    return OK


def cmd_random(args) -> int:
    d = random_derivation(args.seed, args.size, _atoms(args.atoms))
    print(fileformat.format_derivation(d))
    return OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bpr", description="Bilateral proof and refutation workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    def query(sp, sign=True):
        if sign:
            sp.add_argument("--sign", required=True, choices=["+", "-"])
        sp.add_argument("--goal", required=True, help="formula to prove or refute")
        sp.add_argument("--gamma", help="comma separated assumptions")
        sp.add_argument("--delta", help="comma separated counterassumptions")

    sp = sub.add_parser("check", help="check a derivation file")
    sp.add_argument("file")
    sp.add_argument("--base", help="base file, for atomic derivations")
    sp.add_argument("--raw", action="store_true", help="use the base exactly as written")
    sp.add_argument("--subformula", action="store_true", help="also require the subformula property")
    sp.add_argument("--no-bot-axiom", action="store_true")
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("normalize", help="normalise a derivation")
    sp.add_argument("file")
    sp.add_argument("-o", "--output")
    sp.add_argument("--trace", action="store_true", help="print every reduction step")
    sp.add_argument("--no-bot-axiom", action="store_true")
    sp.set_defaults(run=cmd_normalize)

    for name, fn, signed in (("prove", cmd_prove, True), ("refute", cmd_refute, False)):
        sp = sub.add_parser(name, help=f"search for a normal derivation ({name})")
        query(sp, signed)
        sp.add_argument("-o", "--output", help="write the certificate here")
        sp.add_argument("--no-bot-axiom", action="store_true")
        sp.set_defaults(run=fn)

    sp = sub.add_parser("support", help="bounded support check in a base")
    sp.add_argument("base")
    query(sp)
    sp.add_argument("--extra-atoms", type=int, default=0)
    sp.add_argument("--max-rules", type=int, default=1)
    sp.add_argument("--max-premises", type=int, default=1)
    sp.add_argument("--max-discharge", type=int, default=1)
    sp.add_argument("--raw", action="store_true")
    sp.add_argument("-o", "--output", help="write a refuting witness base here")
    sp.set_defaults(run=cmd_support)

    sp = sub.add_parser("base-adequacy", help="check epistemic adequacy of a base")
    sp.add_argument("base")
    sp.add_argument("--raw", action="store_true")
    sp.set_defaults(run=cmd_base_adequacy)

    sp = sub.add_parser("base-derive", help="atomic derivability in a base")
    sp.add_argument("base")
    sp.add_argument("--sign", required=True, choices=["+", "-"])
    sp.add_argument("--atom", required=True)
    sp.add_argument("--assume", help="comma separated proved atoms")
    sp.add_argument("--deny", help="comma separated refuted atoms")
    sp.add_argument("--raw", action="store_true")
    sp.set_defaults(run=cmd_base_derive)

    sp = sub.add_parser("simulate", help="write a simulation base and its atom table")
    sp.add_argument("--formulas", required=True, help="comma separated formulas; theta is their closure")
    sp.add_argument("--gamma", help="assumptions to inject as proof axioms")
    sp.add_argument("--delta", help="counterassumptions to inject as refutation axioms")
    sp.add_argument("-o", "--output", required=True, help="output prefix")
    sp.set_defaults(run=cmd_simulate)

    sp = sub.add_parser("translate", help="translate between atomic and calculus derivations")
    sp.add_argument("direction", choices=["to-bpr", "from-bpr"])
    sp.add_argument("file")
    sp.add_argument("--map", required=True, help="atom table written by simulate")
    sp.add_argument("--base", help="base the atomic derivation lives in (to-bpr)")
    sp.set_defaults(run=cmd_translate)

    sp = sub.add_parser("random", help="print a random valid derivation")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--size", type=int, default=40)
    sp.add_argument("--atoms", default="p,q,r")
    sp.set_defaults(run=cmd_random)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return BAD if e.code else OK
    try:
        return args.run(args)
    except (InputError, ValueError, semantics.BoundExplosion) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD


if __name__ == "__main__":
    sys.exit(main())
