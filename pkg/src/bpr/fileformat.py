"""Textual formats: derivations, bases, atomic derivations and atom mapping tables."""

from __future__ import annotations

from typing import TYPE_CHECKING

from .calculus import Derivation, Hyp, Node, RuleId
from .sexpr import SexprError, Symbol, flatten, read_one, where
from .syntax import Formula, ParseError, Sign, parse_formula, print_formula

if TYPE_CHECKING:
    from .bases import AtomicDerivation, Base


class FormatError(ValueError):
    """Malformed input file; the message carries a line:column position."""


def _err(item, msg: str) -> FormatError:
    line, col = where(item)
    return FormatError(f"{line}:{col}: {msg}" if line else msg)


def _sign(item) -> Sign:
    if not isinstance(item, Symbol) or item not in ("+", "-"):
        raise _err(item, f"expected a sign, got {flatten([item])!r}")
    return Sign(str(item))


def _formula(items, anchor) -> Formula:
    if not items:
        raise _err(anchor, "missing formula")
    text = flatten(items)
    try:
        return parse_formula(text)
    except ParseError as e:
        raise _err(items[0], f"{e.message} at column {e.pos + 1} of formula {text!r}") from None
    except ValueError as e:
        raise _err(items[0], str(e)) from None


def _int(item) -> int:
    if not isinstance(item, Symbol) or not item.isdigit():
        raise _err(item, f"expected a label, got {flatten([item])!r}")
    return int(item)


def _head(lst, name: str) -> bool:
    return isinstance(lst, list) and bool(lst) and lst[0] == name


# -- derivations -------------------------------------------------------------------

def _read_derivation(x) -> Derivation:
    if not isinstance(x, list) or not x:
        raise _err(x, "expected (hyp ...) or (rule ...)")
    head = x[0]
    if head == "hyp":
        if len(x) < 4:
            raise _err(x, "leaf needs a sign, a label and a formula")
        return Hyp(_sign(x[1]), _formula(x[3:], x), _int(x[2]))
    if head != "rule":
        raise _err(x, f"unknown form {str(head)!r}")
    if len(x) < 3:
        raise _err(x, "rule needs an id and a conclusion")
    try:
        rule = RuleId.from_token(str(x[1]))
    except ValueError as e:
        raise _err(x[1], str(e)) from None
    concl = x[2]
    if not _head(concl, "concl") or len(concl) < 3:
        raise _err(concl, "expected (concl <sign> <formula>)")
    sign = _sign(concl[1])
    formula = _formula(concl[2:], concl)
    rest = list(x[3:])
    discharged: set[int] = set()
    if rest and _head(rest[0], "discharge"):
        discharged = {_int(i) for i in rest.pop(0)[1:]}
    dotted = None
    if rest and _head(rest[0], "dotted"):
        d = rest.pop(0)
        if len(d) != 2:
            raise _err(d, "expected (dotted <sign>)")
        dotted = _sign(d[1])
    kids = tuple(_read_derivation(c) for c in rest)
    return Node(rule, sign, formula, kids, frozenset(discharged), dotted)


def parse_derivation(text: str) -> Derivation:
    try:
        return _read_derivation(read_one(text))
    except SexprError as e:
        raise FormatError(str(e)) from None


def format_derivation(d: Derivation, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(d, Hyp):
        return f"{pad}(hyp {d.sign} {d.label} {print_formula(d.formula)})"
    head = f"{pad}(rule {d.rule.token} (concl {d.sign} {print_formula(d.formula)})"
    labels = " ".join(str(i) for i in sorted(d.discharged))
    head += f" (discharge{' ' + labels if labels else ''})"
    if d.dotted is not None:
        head += f" (dotted {d.dotted})"
    if not d.children:
        return head + ")"
    body = "\n".join(format_derivation(c, indent + 1) for c in d.children)
    return head + "\n" + body + ")"


# -- bases -----------------------------------------------------------------------

def _atom(item) -> str:
    if not isinstance(item, Symbol):
        raise _err(item, "expected an atom")
    try:
        f = parse_formula(str(item))
    except ValueError:
        raise _err(item, f"bad atom {str(item)!r}") from None
    from .syntax import atom_name, is_basic
    if not is_basic(f):
        raise _err(item, f"bad atom {str(item)!r}")
    return atom_name(f)


def parse_base(text: str) -> "Base":
    from .bases import AtomicRule, Base, Premise
    try:
        x = read_one(text)
    except SexprError as e:
        raise FormatError(str(e)) from None
    if not _head(x, "base"):
        raise _err(x, "expected (base ...)")
    atoms: set[str] = set()
    rules = []
    for item in x[1:]:
        if _head(item, "atoms"):
            atoms.update(_atom(a) for a in item[1:])
        elif _head(item, "rule"):
            if len(item) < 3 or not isinstance(item[1], Symbol):
                raise _err(item, "expected (rule <name> (prem ...)* (concl <sign> <atom>))")
            name = str(item[1])
            prems = []
            concl = None
            for part in item[2:]:
                if _head(part, "prem"):
                    assume: set[str] = set()
                    deny: set[str] = set()
                    body = list(part[1:])
                    while body and isinstance(body[0], list):
                        grp = body.pop(0)
                        if _head(grp, "assume"):
                            assume.update(_atom(a) for a in grp[1:])
                        elif _head(grp, "deny"):
                            deny.update(_atom(a) for a in grp[1:])
                        else:
                            raise _err(grp, "expected (assume ...) or (deny ...)")
                    if len(body) != 3 or body[0] != "=>":
                        raise _err(part, "expected => <sign> <atom> in premise")
                    prems.append(Premise(frozenset(assume), frozenset(deny),
                                         _atom(body[2]), _sign(body[1])))
                elif _head(part, "concl"):
                    if len(part) != 3:
                        raise _err(part, "expected (concl <sign> <atom>)")
                    concl = (_atom(part[2]), _sign(part[1]))
                else:
                    raise _err(part, "expected (prem ...) or (concl ...)")
            if concl is None:
                raise _err(item, "rule without conclusion")
            rules.append(AtomicRule(frozenset(prems), concl[0], concl[1], name))
        else:
            raise _err(item, "expected (atoms ...) or (rule ...)")
    return Base.make(rules, atoms)


def format_premise(p) -> str:
    parts = ["(prem"]
    if p.gamma:
        parts.append("(assume " + " ".join(sorted(p.gamma)) + ")")
    if p.delta:
        parts.append("(deny " + " ".join(sorted(p.delta)) + ")")
    parts.append(f"=> {p.sign} {p.atom})")
    return " ".join(parts)


def format_rule(r) -> str:
    prems = " ".join(format_premise(p) for p in r.sorted_premises())
    return f"(rule {r.name} {prems + ' ' if prems else ''}(concl {r.sign} {r.atom}))"


def format_base(b: "Base") -> str:
    atoms = " ".join(sorted(b.declared_atoms))
    lines = [f"(base (atoms {atoms})"]
    for r in b.sorted_rules():
        lines.append("  " + format_rule(r))
    lines[-1] += ")"
    return "\n".join(lines)


# -- atomic derivations ------------------------------------------------------------

def _read_atomic(x, rules: dict) -> "AtomicDerivation":
    from .bases import ALeaf, ANode
    if _head(x, "ahyp"):
        if len(x) != 3:
            raise _err(x, "expected (ahyp <sign> <atom>)")
        return ALeaf(_atom(x[2]), _sign(x[1]))
    if not _head(x, "arule") or len(x) < 3:
        raise _err(x, "expected (ahyp ...) or (arule <name> (concl ...) ...)")
    name = str(x[1])
    if name not in rules:
        raise _err(x[1], f"rule {name!r} is not in the base")
    concl = x[2]
    if not _head(concl, "concl") or len(concl) != 3:
        raise _err(concl, "expected (concl <sign> <atom>)")
    kids = tuple(_read_atomic(c, rules) for c in x[3:])
    return ANode(rules[name], _atom(concl[2]), _sign(concl[1]), kids)


def parse_atomic_derivation(text: str, base: "Base") -> "AtomicDerivation":
    rules = {r.name: r for r in base.rules}
    try:
        return _read_atomic(read_one(text), rules)
    except SexprError as e:
        raise FormatError(str(e)) from None


def format_atomic_derivation(d: "AtomicDerivation", indent: int = 0) -> str:
    from .bases import ALeaf
    pad = "  " * indent
    if isinstance(d, ALeaf):
        return f"{pad}(ahyp {d.sign} {d.atom})"
    head = f"{pad}(arule {d.rule.name} (concl {d.sign} {d.atom})"
    if not d.children:
        return head + ")"
    return head + "\n" + "\n".join(format_atomic_derivation(c, indent + 1)
                                   for c in d.children) + ")"


def is_atomic_derivation_text(text: str) -> bool:
    try:
        x = read_one(text)
    except SexprError:
        return False
    return _head(x, "arule") or _head(x, "ahyp")


# -- mapping tables ----------------------------------------------------------------

def format_mapping(table: dict) -> str:
    """`<atom> := <formula>` lines, sorted by atom."""
    rows = sorted((a, print_formula(f)) for f, a in table.items())
    return "".join(f"{a} := {f}\n" for a, f in rows)


def parse_mapping(text: str) -> dict:
    table = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if ":=" not in line:
            raise FormatError(f"{n}:1: expected '<atom> := <formula>'")
        atom, _, ftext = line.partition(":=")
        try:
            f = parse_formula(ftext.strip())
        except ValueError as e:
            raise FormatError(f"{n}:{line.index(':=') + 3}: {e}") from None
        table[f] = atom.strip()
    return table
