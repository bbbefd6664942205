"""Derivation trees for the bilateral calculus and a checker for them."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

from .syntax import (
    BOT, MINUS, PLUS, TOP, And, Atom, Binary, CoImp, Formula, Imp, Or, Sign,
    formula_set_str, print_formula,
)


class RuleId(enum.Enum):
    HypP = "hyp+"
    HypR = "hyp-"
    AxTopP = "top+ax"
    AxBotR = "bot-ax"
    ImpIP = "imp+i"
    ImpEP = "imp+e"
    OrI1P = "or+i1"
    OrI2P = "or+i2"
    OrEP = "or+e"
    AndIP = "and+i"
    AndE1P = "and+e1"
    AndE2P = "and+e2"
    CoImpIP = "coimp+i"
    CoImpE1P = "coimp+e1"
    CoImpE2P = "coimp+e2"
    CoImpIR = "coimp-i"
    CoImpER = "coimp-e"
    AndI1R = "and-i1"
    AndI2R = "and-i2"
    AndER = "and-e"
    OrIR = "or-i"
    OrE1R = "or-e1"
    OrE2R = "or-e2"
    ImpIR = "imp-i"
    ImpE1R = "imp-e1"
    ImpE2R = "imp-e2"
    BotP = "bot+"
    TopR = "top-"
    PRP = "pr+"
    PRR = "pr-"

    @property
    def token(self) -> str:
        return self.value

    @classmethod
    def from_token(cls, tok: str) -> "RuleId":
        try:
            r = cls(tok)
        except ValueError:
            raise ValueError(f"unknown rule id {tok!r}") from None
        if r in (cls.HypP, cls.HypR):
            raise ValueError(f"{tok!r} is a leaf kind, not a rule")
        return r


R = RuleId

ARITY = {
    R.AxTopP: 0, R.AxBotR: 0,
    R.ImpIP: 1, R.ImpEP: 2, R.OrI1P: 1, R.OrI2P: 1, R.OrEP: 3,
    R.AndIP: 2, R.AndE1P: 1, R.AndE2P: 1,
    R.CoImpIP: 2, R.CoImpE1P: 1, R.CoImpE2P: 1,
    R.CoImpIR: 1, R.CoImpER: 2, R.AndI1R: 1, R.AndI2R: 1, R.AndER: 3,
    R.OrIR: 2, R.OrE1R: 1, R.OrE2R: 1,
    R.ImpIR: 2, R.ImpE1R: 1, R.ImpE2R: 1,
    R.BotP: 1, R.TopR: 1, R.PRP: 2, R.PRR: 2,
}

INTRO = frozenset({R.ImpIP, R.OrI1P, R.OrI2P, R.AndIP, R.CoImpIP,
                   R.CoImpIR, R.AndI1R, R.AndI2R, R.OrIR, R.ImpIR})
# eliminations; the major premise is always child 0
ELIM = frozenset({R.ImpEP, R.OrEP, R.AndE1P, R.AndE2P, R.CoImpE1P, R.CoImpE2P,
                  R.CoImpER, R.AndER, R.OrE1R, R.OrE2R, R.ImpE1R, R.ImpE2R})
CASE = frozenset({R.OrEP, R.AndER})
SPECIAL = frozenset({R.BotP, R.TopR, R.PRP, R.PRR})
DOTTED = frozenset({R.OrEP, R.AndER, R.BotP, R.TopR})
BINDERS = frozenset({R.ImpIP, R.CoImpIR, R.OrEP, R.AndER})
AXIOMS = frozenset({R.AxTopP, R.AxBotR})

# conclusion sign for rules whose sign is fixed
FIXED_SIGN = {
    R.AxTopP: PLUS, R.AxBotR: MINUS, R.ImpIP: PLUS, R.ImpEP: PLUS, R.OrI1P: PLUS,
    R.OrI2P: PLUS, R.AndIP: PLUS, R.AndE1P: PLUS, R.AndE2P: PLUS, R.CoImpIP: PLUS,
    R.CoImpE1P: PLUS, R.CoImpE2P: MINUS, R.CoImpIR: MINUS, R.CoImpER: MINUS,
    R.AndI1R: MINUS, R.AndI2R: MINUS, R.OrIR: MINUS, R.OrE1R: MINUS, R.OrE2R: MINUS,
    R.ImpIR: MINUS, R.ImpE1R: PLUS, R.ImpE2R: MINUS, R.PRP: PLUS, R.PRR: MINUS,
}


@dataclass(frozen=True)
class Hyp:
    sign: Sign
    formula: Formula
    label: int = 0

    @property
    def rule(self) -> RuleId:
        return R.HypP if self.sign is PLUS else R.HypR

    children = ()


@dataclass(frozen=True)
class Node:
    rule: RuleId
    sign: Sign
    formula: Formula
    children: tuple = ()
    discharged: frozenset = frozenset()
    dotted: Optional[Sign] = None


Derivation = Union[Hyp, Node]


@dataclass(frozen=True)
class Judgment:
    gamma: frozenset
    delta: frozenset
    sign: Sign
    conclusion: Formula

    def __str__(self) -> str:
        return (f"{formula_set_str(self.gamma)}; {formula_set_str(self.delta)} "
                f"⊢{self.sign} {print_formula(self.conclusion)}")


@dataclass
class CheckReport:
    valid: bool
    end: Judgment
    violations: list = field(default_factory=list)

    def __str__(self) -> str:
        if self.valid:
            return f"VALID  {self.end}"
        lines = [f"INVALID  {self.end}"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


class RuleError(ValueError):
    pass


def path_str(path: Sequence[int]) -> str:
    return ".".join(map(str, path)) if path else "root"


# -- schema checking -------------------------------------------------------------

def discharge_spec(node: Node) -> dict[int, tuple[Sign, Formula]]:
    """Which children a binder may discharge into, and the expected hypothesis."""
    r, f = node.rule, node.formula
    if r is R.ImpIP and isinstance(f, Imp):
        return {0: (PLUS, f.left)}
    if r is R.CoImpIR and isinstance(f, CoImp):
        return {0: (MINUS, f.right)}
    if r in CASE and node.children:
        major = node.children[0].formula
        if r is R.OrEP and isinstance(major, Or):
            return {1: (PLUS, major.left), 2: (PLUS, major.right)}
        if r is R.AndER and isinstance(major, And):
            return {1: (MINUS, major.left), 2: (MINUS, major.right)}
    return {}


def _schema(node: Node, bot_axiom: bool) -> list[str]:
    """Violations of the rule schema at one node, given its children's conclusions."""
    r, f, s = node.rule, node.formula, node.sign
    kids = [(c.formula, c.sign) for c in node.children]
    out: list[str] = []
    if len(kids) != ARITY[r]:
        return [f"expected {ARITY[r]} premises, got {len(kids)}"]

    if r in DOTTED:
        if node.dotted is None:
            out.append("dotted sign missing")
        elif node.dotted is not s:
            out.append("conclusion sign differs from dotted sign")
    elif node.dotted is not None:
        out.append("rule has no dotted line")
    if r not in BINDERS and node.discharged:
        out.append("rule discharges nothing")
    if r in FIXED_SIGN and FIXED_SIGN[r] is not s:
        out.append(f"conclusion must carry sign {FIXED_SIGN[r]}")

    def want(i: int, g: Formula, sg: Sign, what: str) -> None:
        if kids[i][1] is not sg:
            out.append(f"{what} must carry sign {sg}")
        if kids[i][0] != g:
            out.append(f"{what} is {print_formula(kids[i][0])}, expected {print_formula(g)}")

    def shape(g: Formula, cls: type, what: str) -> bool:
        if not isinstance(g, cls):
            out.append(f"{what} {print_formula(g)} has the wrong main connective")
            return False
        return True

    if r is R.AxTopP:
        if f != TOP:
            out.append("axiom concludes top")
    elif r is R.AxBotR:
        if f != BOT:
            out.append("axiom concludes bot")
        if not bot_axiom:
            out.append("bot refutation axiom disabled")
    elif r is R.ImpIP:
        if shape(f, Imp, "conclusion"):
            want(0, f.right, PLUS, "premise")
    elif r is R.ImpEP:
        major = kids[0][0]
        if shape(major, Imp, "major premise"):
            want(0, Imp(kids[1][0], f), PLUS, "major premise")
            want(1, major.left, PLUS, "minor premise")
    elif r in (R.OrI1P, R.OrI2P):
        if shape(f, Or, "conclusion"):
            want(0, f.left if r is R.OrI1P else f.right, PLUS, "premise")
    elif r in CASE:
        cls = Or if r is R.OrEP else And
        sg = PLUS if r is R.OrEP else MINUS
        if kids[0][1] is not sg:
            out.append(f"major premise must carry sign {sg}")
        shape(kids[0][0], cls, "major premise")
        for i in (1, 2):
            want(i, f, s, f"minor premise {i}")
    elif r is R.AndIP:
        if shape(f, And, "conclusion"):
            want(0, f.left, PLUS, "left premise")
            want(1, f.right, PLUS, "right premise")
    elif r in (R.AndE1P, R.AndE2P):
        if kids[0][1] is not PLUS:
            out.append("premise must carry sign +")
        if shape(kids[0][0], And, "premise"):
            part = kids[0][0].left if r is R.AndE1P else kids[0][0].right
            if part != f:
                out.append("conclusion is not the projected conjunct")
    elif r is R.CoImpIP:
        if shape(f, CoImp, "conclusion"):
            want(0, f.left, PLUS, "left premise")
            want(1, f.right, MINUS, "right premise")
    elif r in (R.CoImpE1P, R.CoImpE2P):
        if kids[0][1] is not PLUS:
            out.append("premise must carry sign +")
        if shape(kids[0][0], CoImp, "premise"):
            part = kids[0][0].left if r is R.CoImpE1P else kids[0][0].right
            if part != f:
                out.append("conclusion is not the projected component")
    elif r is R.CoImpIR:
        if shape(f, CoImp, "conclusion"):
            want(0, f.left, MINUS, "premise")
    elif r is R.CoImpER:
        major = kids[0][0]
        if shape(major, CoImp, "major premise"):
            want(0, CoImp(f, kids[1][0]), MINUS, "major premise")
            want(1, major.right, MINUS, "minor premise")
    elif r in (R.AndI1R, R.AndI2R):
        if shape(f, And, "conclusion"):
            want(0, f.left if r is R.AndI1R else f.right, MINUS, "premise")
    elif r is R.OrIR:
        if shape(f, Or, "conclusion"):
            want(0, f.left, MINUS, "left premise")
            want(1, f.right, MINUS, "right premise")
    elif r in (R.OrE1R, R.OrE2R):
        if kids[0][1] is not MINUS:
            out.append("premise must carry sign -")
        if shape(kids[0][0], Or, "premise"):
            part = kids[0][0].left if r is R.OrE1R else kids[0][0].right
            if part != f:
                out.append("conclusion is not the projected disjunct")
    elif r is R.ImpIR:
        if shape(f, Imp, "conclusion"):
            want(0, f.left, PLUS, "left premise")
            want(1, f.right, MINUS, "right premise")
    elif r in (R.ImpE1R, R.ImpE2R):
        if kids[0][1] is not MINUS:
            out.append("premise must carry sign -")
        if shape(kids[0][0], Imp, "premise"):
            part = kids[0][0].left if r is R.ImpE1R else kids[0][0].right
            if part != f:
                out.append("conclusion is not the projected component")
    elif r is R.BotP:
        want(0, BOT, PLUS, "premise")
    elif r is R.TopR:
        want(0, TOP, MINUS, "premise")
    elif r in (R.PRP, R.PRR):
        if kids[0][1] is not PLUS or kids[1][1] is not MINUS:
            out.append("premises must be a proof and a refutation, in that order")
        if kids[0][0] != kids[1][0]:
            out.append("premise formulas differ")
    return out


def check_derivation(d: Derivation, bot_axiom: bool = True) -> CheckReport:
    violations: list[str] = []
    gamma: set[Formula] = set()
    delta: set[Formula] = set()

    def go(t: Derivation, path: tuple, scope: dict, blocked: dict) -> None:
        if isinstance(t, Hyp):
            if not isinstance(t.label, int) or t.label < 0:
                violations.append(f"at {path_str(path)}: bad label {t.label!r}")
                return
            if t.label and t.label in scope:
                sg, g, where = scope[t.label]
                if sg is not t.sign or g != t.formula:
                    violations.append(
                        f"at {path_str(path)}: hypothesis {t.sign}{print_formula(t.formula)} "
                        f"carries label {t.label} bound at {path_str(where)} to "
                        f"{sg}{print_formula(g)}")
                return
            if t.label and t.label in blocked:
                violations.append(
                    f"at {path_str(path)}: label {t.label} discharged at "
                    f"{path_str(blocked[t.label])} outside its permitted subtree")
            (gamma if t.sign is PLUS else delta).add(t.formula)
            return
        if not isinstance(t, Node) or not isinstance(t.rule, RuleId) or t.rule not in ARITY:
            violations.append(f"at {path_str(path)}: not a derivation node")
            return
        for v in _schema(t, bot_axiom):
            violations.append(f"at {path_str(path)}: {t.rule.token}: {v}")
        spec = discharge_spec(t) if t.discharged else {}
        if t.discharged:
            if t.rule in BINDERS and not spec:
                violations.append(f"at {path_str(path)}: cannot determine discharged formulas")
            for lab in t.discharged:
                if not isinstance(lab, int) or lab <= 0:
                    violations.append(f"at {path_str(path)}: discharge label must be positive")
                elif lab in scope or lab in blocked:
                    violations.append(f"at {path_str(path)}: label {lab} collides with an "
                                      f"enclosing discharge")
        for i, c in enumerate(t.children):
            if t.discharged and spec:
                if i in spec:
                    sc = dict(scope)
                    for lab in t.discharged:
                        sc[lab] = (spec[i][0], spec[i][1], path)
                    go(c, path + (i,), sc, blocked)
                else:
                    bl = dict(blocked)
                    for lab in t.discharged:
                        bl[lab] = path
                    go(c, path + (i,), scope, bl)
            else:
                go(c, path + (i,), scope, blocked)

    go(d, (), {}, {})
    end = Judgment(frozenset(gamma), frozenset(delta), getattr(d, "sign", PLUS),
                   getattr(d, "formula", TOP))
    return CheckReport(not violations, end, violations)


def open_premises(d: Derivation) -> tuple[frozenset, frozenset]:
    gamma: set[Formula] = set()
    delta: set[Formula] = set()

    def go(t: Derivation, bound: dict) -> None:
        if isinstance(t, Hyp):
            if not (t.label and t.label in bound):
                (gamma if t.sign is PLUS else delta).add(t.formula)
            return
        spec = discharge_spec(t) if t.discharged else {}
        for i, c in enumerate(t.children):
            if i in spec:
                b = dict(bound)
                for lab in t.discharged:
                    b[lab] = True
                go(c, b)
            else:
                go(c, bound)

    go(d, {})
    return frozenset(gamma), frozenset(delta)


def end_judgment(d: Derivation) -> Judgment:
    g, dl = open_premises(d)
    return Judgment(g, dl, d.sign, d.formula)


# -- tree utilities ----------------------------------------------------------------

def size(d: Derivation) -> int:
    n = 0
    stack = [d]
    while stack:
        t = stack.pop()
        n += 1
        stack.extend(t.children)
    return n


def iter_positions(d: Derivation) -> Iterator[tuple[tuple, Derivation]]:
    """Preorder walk yielding (path, subtree)."""
    stack = [((), d)]
    while stack:
        path, t = stack.pop()
        yield path, t
        for i in range(len(t.children) - 1, -1, -1):
            stack.append((path + (i,), t.children[i]))


def subtree(d: Derivation, path: Sequence[int]) -> Derivation:
    for i in path:
        d = d.children[i]
    return d


def replace_at(d: Derivation, path: Sequence[int], new: Derivation) -> Derivation:
    if not path:
        return new
    i = path[0]
    assert isinstance(d, Node)
    kids = list(d.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return Node(d.rule, d.sign, d.formula, tuple(kids), d.discharged, d.dotted)


def max_label(d: Derivation) -> int:
    m = 0
    for _, t in iter_positions(d):
        if isinstance(t, Hyp):
            m = max(m, t.label)
        elif t.discharged:
            m = max(m, max(t.discharged))
    return m


def relabel(d: Derivation) -> Derivation:
    """Canonical renaming: binders numbered 1, 2, ... in preorder; open leaves get 0."""
    counter = [0]

    def go(t: Derivation, env: dict) -> Derivation:
        if isinstance(t, Hyp):
            new = env.get(t.label, 0) if t.label else 0
            return t if new == t.label else Hyp(t.sign, t.formula, new)
        if not t.discharged:
            kids = tuple(go(c, env) for c in t.children)
            return Node(t.rule, t.sign, t.formula, kids, t.discharged, t.dotted)
        spec = discharge_spec(t)
        mapping = {}
        for lab in sorted(t.discharged):
            counter[0] += 1
            mapping[lab] = counter[0]
        inner = dict(env)
        inner.update(mapping)
        outer = dict(env)
        for lab in t.discharged:
            outer.pop(lab, None)
        kids = tuple(go(c, inner if i in spec else outer) for i, c in enumerate(t.children))
        return Node(t.rule, t.sign, t.formula, kids, frozenset(mapping.values()), t.dotted)

    return go(d, {})


# -- forward construction ----------------------------------------------------------

def apply_rule(rule: RuleId, children: Sequence[Derivation] = (), *,
               target: Optional[Formula] = None, dotted: Optional[Sign] = None,
               other: Optional[Formula] = None, labels: Iterable[int] = (),
               bot_axiom: bool = True) -> Node:
    """Build one rule application on top of already valid children.

    `target` is the conclusion of the rules that conclude anything (bot+, top-, pr+, pr-)
    and may be given for the case rules; `dotted` the sign of a dotted conclusion;
    `other` the formula part not visible in the premises (the absent disjunct or
    conjunct, the antecedent of imp+i, the refuted right side of coimp-i); `labels`
    the discharge labels of a binder.
    """
    if rule in (R.HypP, R.HypR):
        raise RuleError("use Hyp(...) for leaves")
    kids = tuple(children)
    if len(kids) != ARITY[rule]:
        raise RuleError(f"{rule.token} takes {ARITY[rule]} premises")
    fs = [c.formula for c in kids]
    try:
        if rule is R.AxTopP:
            f, s = TOP, PLUS
        elif rule is R.AxBotR:
            f, s = BOT, MINUS
        elif rule is R.ImpIP:
            f, s = Imp(_need(other, "antecedent"), fs[0]), PLUS
        elif rule is R.ImpEP:
            f, s = _part(fs[0], Imp, 1), PLUS
        elif rule is R.OrI1P:
            f, s = Or(fs[0], _need(other, "right disjunct")), PLUS
        elif rule is R.OrI2P:
            f, s = Or(_need(other, "left disjunct"), fs[0]), PLUS
        elif rule in CASE:
            f = fs[1] if target is None else target
            s = _need(dotted, "dotted sign")
        elif rule is R.AndIP:
            f, s = And(fs[0], fs[1]), PLUS
        elif rule is R.AndE1P:
            f, s = _part(fs[0], And, 0), PLUS
        elif rule is R.AndE2P:
            f, s = _part(fs[0], And, 1), PLUS
        elif rule is R.CoImpIP:
            f, s = CoImp(fs[0], fs[1]), PLUS
        elif rule is R.CoImpE1P:
            f, s = _part(fs[0], CoImp, 0), PLUS
        elif rule is R.CoImpE2P:
            f, s = _part(fs[0], CoImp, 1), MINUS
        elif rule is R.CoImpIR:
            f, s = CoImp(fs[0], _need(other, "refuted component")), MINUS
        elif rule is R.CoImpER:
            f, s = _part(fs[0], CoImp, 0), MINUS
        elif rule is R.AndI1R:
            f, s = And(fs[0], _need(other, "right conjunct")), MINUS
        elif rule is R.AndI2R:
            f, s = And(_need(other, "left conjunct"), fs[0]), MINUS
        elif rule is R.OrIR:
            f, s = Or(fs[0], fs[1]), MINUS
        elif rule is R.OrE1R:
            f, s = _part(fs[0], Or, 0), MINUS
        elif rule is R.OrE2R:
            f, s = _part(fs[0], Or, 1), MINUS
        elif rule is R.ImpIR:
            f, s = Imp(fs[0], fs[1]), MINUS
        elif rule is R.ImpE1R:
            f, s = _part(fs[0], Imp, 0), PLUS
        elif rule is R.ImpE2R:
            f, s = _part(fs[0], Imp, 1), MINUS
        elif rule in (R.BotP, R.TopR):
            f, s = _need(target, "target"), _need(dotted, "dotted sign")
        elif rule is R.PRP:
            f, s = _need(target, "target"), PLUS
        else:
            f, s = _need(target, "target"), MINUS
    except (TypeError, AttributeError) as e:
        raise RuleError(f"{rule.token}: {e}") from None
    node = Node(rule, s, f, kids, frozenset(labels), s if rule in DOTTED else None)
    rep = check_derivation(node, bot_axiom=bot_axiom)
    if not rep.valid:
        raise RuleError("; ".join(rep.violations))
    return node


def _need(x, what: str):
    if x is None:
        raise TypeError(f"missing parameter: {what}")
    return x


def _part(f: Formula, cls: type, i: int) -> Formula:
    if not isinstance(f, cls):
        raise TypeError(f"premise {print_formula(f)} has the wrong main connective")
    return f.children()[i]


# -- random generation ---------------------------------------------------------------

class _Gen:
    def __init__(self, rng: random.Random, atoms: Sequence[Formula]):
        self.rng = rng
        self.atoms = list(atoms)
        self.label = 0

    def fresh(self) -> int:
        self.label += 1
        return self.label

    def formula(self, depth: int) -> Formula:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.4:
            if rng.random() < 0.12:
                return rng.choice((TOP, BOT))
            return rng.choice(self.atoms)
        cls = rng.choice((And, Or, Imp, CoImp))
        return cls(self.formula(depth - 1), self.formula(depth - 1))

    def leaf(self, f: Formula, s: Sign, ctx: list) -> Derivation:
        hits = [lab for (sg, g, lab) in ctx if sg is s and g == f]
        if hits and self.rng.random() < 0.8:
            return Hyp(s, f, self.rng.choice(hits))
        return Hyp(s, f, 0)

    def split(self, budget: int, k: int) -> list[int]:
        """Share budget-1 among k premises, each getting at least 1."""
        rest = budget - 1 - k
        cuts = sorted(self.rng.randint(0, rest) for _ in range(k - 1))
        parts, prev = [], 0
        for c in cuts + [rest]:
            parts.append(1 + c - prev)
            prev = c
        return parts

    def derive(self, f: Formula, s: Sign, budget: int, ctx: list) -> Derivation:
        rng = self.rng
        if budget <= 1 or rng.random() < 0.15:
            return self.leaf(f, s, ctx)
        options = []
        if isinstance(f, Binary):
            options += ["intro"] * 3
        if f == TOP and s is PLUS or f == BOT and s is MINUS:
            options.append("axiom")
        options += ["elim"] * 2 + ["case", "special", "special"]
        for _ in range(6):
            kind = rng.choice(options)
            t = getattr(self, "_" + kind)(f, s, budget, ctx)
            if t is not None:
                return t
        return self.leaf(f, s, ctx)

    def _axiom(self, f, s, budget, ctx):
        return Node(R.AxTopP, PLUS, TOP) if s is PLUS else Node(R.AxBotR, MINUS, BOT)

    def _intro(self, f, s, budget, ctx):
        a, b = f.left, f.right
        if s is PLUS:
            if isinstance(f, And):
                if budget < 3:
                    return None
                n1, n2 = self.split(budget, 2)
                return Node(R.AndIP, PLUS, f, (self.derive(a, PLUS, n1, ctx),
                                               self.derive(b, PLUS, n2, ctx)))
            if isinstance(f, Or):
                i = self.rng.randint(0, 1)
                return Node((R.OrI1P, R.OrI2P)[i], PLUS, f,
                            (self.derive((a, b)[i], PLUS, budget - 1, ctx),))
            if isinstance(f, Imp):
                lab = self.fresh()
                body = self.derive(b, PLUS, budget - 1, ctx + [(PLUS, a, lab)])
                return Node(R.ImpIP, PLUS, f, (body,), frozenset({lab}))
            if budget < 3:
                return None
            n1, n2 = self.split(budget, 2)
            return Node(R.CoImpIP, PLUS, f, (self.derive(a, PLUS, n1, ctx),
                                             self.derive(b, MINUS, n2, ctx)))
        if isinstance(f, And):
            i = self.rng.randint(0, 1)
            return Node((R.AndI1R, R.AndI2R)[i], MINUS, f,
                        (self.derive((a, b)[i], MINUS, budget - 1, ctx),))
        if isinstance(f, Or) or isinstance(f, Imp):
            if budget < 3:
                return None
            n1, n2 = self.split(budget, 2)
            s1 = MINUS if isinstance(f, Or) else PLUS
            rule = R.OrIR if isinstance(f, Or) else R.ImpIR
            return Node(rule, MINUS, f, (self.derive(a, s1, n1, ctx),
                                         self.derive(b, MINUS, n2, ctx)))
        lab = self.fresh()
        body = self.derive(a, MINUS, budget - 1, ctx + [(MINUS, b, lab)])
        return Node(R.CoImpIR, MINUS, f, (body,), frozenset({lab}))

    def _elim(self, f, s, budget, ctx):
        rng = self.rng
        x = self.formula(1)
        if s is PLUS:
            choices = ["imp+e", "and+e1", "and+e2", "coimp+e1", "imp-e1"]
        else:
            choices = ["coimp+e2", "coimp-e", "or-e1", "or-e2", "imp-e2"]
        c = rng.choice(choices)
        if c in ("imp+e", "coimp-e"):
            if budget < 3:
                return None
            n1, n2 = self.split(budget, 2)
            if c == "imp+e":
                major = self.derive(Imp(x, f), PLUS, n1, ctx)
                return Node(R.ImpEP, PLUS, f, (major, self.derive(x, PLUS, n2, ctx)))
            major = self.derive(CoImp(f, x), MINUS, n1, ctx)
            return Node(R.CoImpER, MINUS, f, (major, self.derive(x, MINUS, n2, ctx)))
        table = {
            "and+e1": (R.AndE1P, And(f, x), PLUS), "and+e2": (R.AndE2P, And(x, f), PLUS),
            "coimp+e1": (R.CoImpE1P, CoImp(f, x), PLUS),
            "imp-e1": (R.ImpE1R, Imp(f, x), MINUS),
            "coimp+e2": (R.CoImpE2P, CoImp(x, f), PLUS),
            "or-e1": (R.OrE1R, Or(f, x), MINUS), "or-e2": (R.OrE2R, Or(x, f), MINUS),
            "imp-e2": (R.ImpE2R, Imp(x, f), MINUS),
        }
        rule, major, ms = table[c]
        return Node(rule, s, f, (self.derive(major, ms, budget - 1, ctx),))

    def _case(self, f, s, budget, ctx):
        if budget < 4:
            return None
        a, b = self.formula(1), self.formula(1)
        n0, n1, n2 = self.split(budget, 3)
        l1, l2 = self.fresh(), self.fresh()
        if self.rng.random() < 0.5:
            major = self.derive(Or(a, b), PLUS, n0, ctx)
            sg, rule = PLUS, R.OrEP
        else:
            major = self.derive(And(a, b), MINUS, n0, ctx)
            sg, rule = MINUS, R.AndER
        m1 = self.derive(f, s, n1, ctx + [(sg, a, l1)])
        m2 = self.derive(f, s, n2, ctx + [(sg, b, l2)])
        return Node(rule, s, f, (major, m1, m2), frozenset({l1, l2}), s)

    def _special(self, f, s, budget, ctx):
        r = self.rng.random()
        if r < 0.2:
            return Node(R.BotP, s, f, (self.derive(BOT, PLUS, budget - 1, ctx),), dotted=s)
        if r < 0.35:
            return Node(R.TopR, s, f, (self.derive(TOP, MINUS, budget - 1, ctx),), dotted=s)
        if budget < 3:
            return None
        x = self.formula(2)
        n1, n2 = self.split(budget, 2)
        return Node(R.PRP if s is PLUS else R.PRR, s, f,
                    (self.derive(x, PLUS, n1, ctx), self.derive(x, MINUS, n2, ctx)))


def random_derivation(seed: int, size_bound: int, atom_pool: Iterable[Union[str, Formula]]
                      ) -> Derivation:
    """A random valid derivation with at most size_bound nodes (deterministic per seed)."""
    if size_bound < 1:
        raise ValueError("size_bound must be at least 1")
    atoms = sorted({Atom(a) if isinstance(a, str) else a for a in atom_pool}, key=print_formula)
    if not atoms:
        atoms = [TOP, BOT]
    rng = random.Random(seed)
    gen = _Gen(rng, atoms)
    goal = gen.formula(2)
    sign = rng.choice((PLUS, MINUS))
    d = gen.derive(goal, sign, size_bound, [])
    return relabel(d)
