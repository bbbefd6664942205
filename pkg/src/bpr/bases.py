"""Bilateral atomic bases: rules over basic sentences, adequacy predicates and derivability.

Atoms are plain names here; `top` and `bot` are ordinary names that every base declares.
Derivability is decided by saturating the set of derivable signed atoms over all
hypothesis contexts a derivation can reach (a least fixed point, so no depth cap).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .calculus import Judgment
from .syntax import MINUS, PLUS, Sign, basic

UNITS = frozenset({"top", "bot"})

Literal = tuple  # (atom, sign)


@dataclass(frozen=True)
class Premise:
    """Γ; Δ ⇒ atom with sign: derive atom from the rule's context plus Γ (proved) and Δ (refuted)."""

    gamma: frozenset
    delta: frozenset
    atom: str
    sign: Sign

    @property
    def literal(self) -> Literal:
        return (self.atom, self.sign)

    def key(self) -> tuple:
        return (self.atom, self.sign.value, sorted(self.gamma), sorted(self.delta))

    def atoms(self) -> set:
        return set(self.gamma) | set(self.delta) | {self.atom}


def premise(atom: str, sign: Sign, gamma: Iterable[str] = (), delta: Iterable[str] = ()) -> Premise:
    return Premise(frozenset(gamma), frozenset(delta), atom, sign)


@dataclass(frozen=True)
class AtomicRule:
    premises: frozenset
    atom: str
    sign: Sign
    name: str = field(default="", compare=False)

    @property
    def is_axiom(self) -> bool:
        return not self.premises

    @property
    def literal(self) -> Literal:
        return (self.atom, self.sign)

    def sorted_premises(self) -> list[Premise]:
        return sorted(self.premises, key=Premise.key)

    def atoms(self) -> set:
        out = {self.atom}
        for p in self.premises:
            out |= p.atoms()
        return out

    def key(self) -> tuple:
        return (len(self.premises), self.atom, self.sign.value,
                [p.key() for p in self.sorted_premises()])

    def named(self, name: str) -> "AtomicRule":
        return AtomicRule(self.premises, self.atom, self.sign, name)

    def __str__(self) -> str:
        from .fileformat import format_rule
        return format_rule(self)


def rule(atom: str, sign: Sign, premises: Iterable[Premise] = (), name: str = "") -> AtomicRule:
    r = AtomicRule(frozenset(premises), atom, sign, name)
    return r if name else r.named(canonical_name(r))


def canonical_name(r: AtomicRule) -> str:
    """A name determined by the rule's content, usable as a file-format token."""
    parts = []
    for p in r.sorted_premises():
        ctx = ".".join(sorted(p.gamma)) + "|" + ".".join(sorted(p.delta))
        parts.append((ctx + ">" if ctx != "|" else "") + f"{p.sign}{p.atom}")
    return f"{r.sign}{r.atom}" + ("<=" + "/".join(parts) if parts else "")


def unit_rules() -> tuple[AtomicRule, AtomicRule]:
    return (AtomicRule(frozenset(), "top", PLUS, "unit+top"),
            AtomicRule(frozenset(), "bot", MINUS, "unit-bot"))


def epistemic_rules(atom: str) -> tuple[AtomicRule, AtomicRule]:
    both = frozenset({premise(atom, PLUS), premise(atom, MINUS)})
    return (AtomicRule(both, "bot", PLUS, f"epi+:{atom}"),
            AtomicRule(both, "top", MINUS, f"epi-:{atom}"))


# -- bases ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Base:
    rules: frozenset
    declared_atoms: frozenset
    _memo: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @classmethod
    def make(cls, rules: Iterable[AtomicRule] = (), atoms: Iterable[str] = ()) -> "Base":
        rules = frozenset(rules)
        names: dict = {}
        for r in rules:
            if r.name in names and names[r.name] != r:
                raise ValueError(f"two different rules named {r.name!r}")
            names[r.name] = r
        declared = set(atoms) | UNITS
        for r in rules:
            declared |= r.atoms()
        return cls(rules, frozenset(declared))

    def with_rules(self, extra: Iterable[AtomicRule], atoms: Iterable[str] = ()) -> "Base":
        extra = [r for r in extra if r not in self.rules]
        if not extra and set(atoms) <= self.declared_atoms:
            return self
        return Base.make(self.rules | frozenset(extra), self.declared_atoms | set(atoms))

    def sorted_rules(self) -> list[AtomicRule]:
        return sorted(self.rules, key=lambda r: (r.key(), r.name))

    def rule_named(self, name: str) -> AtomicRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def __len__(self) -> int:
        return len(self.rules)

    def __str__(self) -> str:
        from .fileformat import format_base
        return format_base(self)


def extends(c: Base, b: Base) -> bool:
    return b.rules <= c.rules


def close_epistemic(b: Base, universe: Optional[Iterable[str]] = None) -> Base:
    atoms = b.declared_atoms if universe is None else frozenset(universe) | b.declared_atoms
    extra = [r for a in sorted(atoms) for r in epistemic_rules(a)]
    return b.with_rules(extra, atoms)


def with_units(b: Base) -> Base:
    return b.with_rules(unit_rules())


def adequate_closure(b: Base, universe: Optional[Iterable[str]] = None) -> Base:
    """Add the unit axioms and the epistemic rules over the universe."""
    return close_epistemic(with_units(b), universe)


# -- derivability -----------------------------------------------------------------------

class _Saturation:
    """Least fixed point of derivable literals over every reachable hypothesis context."""

    def __init__(self, b: Base, S: frozenset, T: frozenset):
        self.base = b
        self.rules = b.sorted_rules()
        self.root = (S, T)
        self.lits: dict = {}
        self.why: dict = {}
        # premises share a few discharge patterns; index them once
        patterns: dict = {}
        info = []
        for r in self.rules:
            deps = tuple((patterns.setdefault((p.gamma, p.delta), len(patterns)), p.literal)
                         for p in r.premises)
            info.append((r, r.literal, deps))
        pats = list(patterns)
        order = [self.root]
        succ = {self.root: None}
        for ctx in order:
            s, t = ctx
            row = []
            for g, d in pats:
                nxt = ctx if g <= s and d <= t else (s | g, t | d)
                if nxt not in succ:
                    order.append(nxt)
                    succ[nxt] = None
                row.append(nxt)
            succ[ctx] = row
        for ctx in order:
            cs, ct = ctx
            self.lits[ctx] = {(a, PLUS) for a in cs} | {(a, MINUS) for a in ct}
            for lit in self.lits[ctx]:
                self.why[ctx, lit] = None
        ext = {ctx: [self.lits[n] for n in succ[ctx]] for ctx in order}
        changed = True
        while changed:
            changed = False
            for ctx in order:
                have = self.lits[ctx]
                e = ext[ctx]
                for r, lit, deps in info:
                    if lit in have:
                        continue
                    if all(x in e[i] for i, x in deps):
                        have.add(lit)
                        self.why[ctx, lit] = r
                        changed = True

    @staticmethod
    def extend(ctx: tuple, p: Premise) -> tuple:
        s, t = ctx
        if p.gamma <= s and p.delta <= t:
            return ctx
        return (s | p.gamma, t | p.delta)

    def holds(self, lit: Literal, ctx: Optional[tuple] = None) -> bool:
        return lit in self.lits[ctx or self.root]

    def certificate(self, lit: Literal, ctx: Optional[tuple] = None) -> "AtomicDerivation":
        ctx = ctx or self.root
        r = self.why[ctx, lit]
        if r is None:
            return ALeaf(*lit)
        kids = tuple(self.certificate(p.literal, self.extend(ctx, p)) for p in r.sorted_premises())
        return ANode(r, lit[0], lit[1], kids)


def _saturation(b: Base, S: Iterable[str], T: Iterable[str]) -> _Saturation:
    key = (frozenset(S), frozenset(T))
    sat = b._memo.get(key)
    if sat is None:
        sat = b._memo[key] = _Saturation(b, *key)
    return sat


def derives(b: Base, S: Iterable[str], T: Iterable[str], p: str, sign: Sign) -> bool:
    """Is there an atomic derivation of p (with sign) from proved S and refuted T using b?"""
    return _saturation(b, S, T).holds((p, sign))


def derivable_literals(b: Base, S: Iterable[str] = (), T: Iterable[str] = ()) -> frozenset:
    sat = _saturation(b, S, T)
    return frozenset(sat.lits[sat.root])


def derivation_of(b: Base, S: Iterable[str], T: Iterable[str], p: str, sign: Sign
                  ) -> Optional["AtomicDerivation"]:
    sat = _saturation(b, S, T)
    return sat.certificate((p, sign)) if sat.holds((p, sign)) else None


# -- adequacy ------------------------------------------------------------------------------

def is_logically_consistent(b: Base) -> bool:
    lits = derivable_literals(b)
    return ("bot", PLUS) not in lits and ("top", MINUS) not in lits


def is_unit_complete(b: Base) -> bool:
    return all(r in b.rules for r in unit_rules())


def is_epistemically_consistent(b: Base, universe: Optional[Iterable[str]] = None) -> bool:
    atoms = b.declared_atoms if universe is None else universe
    return all(r in b.rules for a in atoms for r in epistemic_rules(a))


def is_epistemically_adequate(b: Base, universe: Optional[Iterable[str]] = None) -> bool:
    return (is_unit_complete(b) and is_epistemically_consistent(b, universe)
            and is_logically_consistent(b))


# -- atomic derivations ----------------------------------------------------------------------

@dataclass(frozen=True)
class ALeaf:
    atom: str
    sign: Sign

    children = ()


@dataclass(frozen=True)
class ANode:
    rule: AtomicRule
    atom: str
    sign: Sign
    children: tuple = ()


AtomicDerivation = Union[ALeaf, ANode]


@dataclass
class AtomicCheckReport:
    valid: bool
    end: Judgment
    violations: list

    def __str__(self) -> str:
        if self.valid:
            return f"VALID  {self.end}"
        return "\n".join([f"INVALID  {self.end}"] + [f"  {v}" for v in self.violations])


def check_atomic_derivation(d: AtomicDerivation, base: Optional[Base] = None) -> AtomicCheckReport:
    """Check every rule use; open leaves are those not discharged by an enclosing premise."""
    violations: list[str] = []
    gamma: set = set()
    delta: set = set()

    def go(t: AtomicDerivation, path: str, S: frozenset, T: frozenset) -> None:
        if isinstance(t, ALeaf):
            if t.sign is PLUS and t.atom not in S:
                gamma.add(t.atom)
            elif t.sign is MINUS and t.atom not in T:
                delta.add(t.atom)
            return
        r = t.rule
        if base is not None and r not in base.rules:
            violations.append(f"at {path}: rule {r.name} is not in the base")
        if (t.atom, t.sign) != r.literal:
            violations.append(f"at {path}: rule {r.name} concludes {r.sign}{r.atom}, "
                              f"not {t.sign}{t.atom}")
        prems = r.sorted_premises()
        if len(prems) != len(t.children):
            violations.append(f"at {path}: rule {r.name} has {len(prems)} premises, "
                              f"got {len(t.children)}")
            return
        for i, (p, c) in enumerate(zip(prems, t.children)):
            where = f"{path}.{i}" if path != "root" else str(i)
            if (c.atom, c.sign) != p.literal:
                violations.append(f"at {where}: premise must conclude {p.sign}{p.atom}")
            go(c, where, S | p.gamma, T | p.delta)

    go(d, "root", frozenset(), frozenset())
    end = Judgment(frozenset(basic(a) for a in gamma), frozenset(basic(a) for a in delta),
                   d.sign, basic(d.atom))
    return AtomicCheckReport(not violations, end, violations)


def atomic_size(d: AtomicDerivation) -> int:
    return 1 + sum(atomic_size(c) for c in d.children)


def atomic_depth(d: AtomicDerivation) -> int:
    return 1 + max((atomic_depth(c) for c in d.children), default=0)
