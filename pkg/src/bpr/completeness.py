"""Simulation bases: atomic mirrors of the calculus over a finite, subformula-closed set.

Each compound formula of theta gets its own atom, and every rule instance over theta
becomes an atomic rule on those atoms. Rules that may conclude anything (the case
rules, bot+/top- and the proof-refutation rules) are instantiated once per atom of the
base's universe and per sign. Derivations then translate back and forth rule by rule,
which is what makes the support/derivability round trip checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .bases import (
    ALeaf, ANode, AtomicDerivation, AtomicRule, Base, Premise, premise, unit_rules,
)
from .calculus import CASE, DOTTED, INTRO, Derivation, Hyp, Node, R, RuleId, relabel
from .rewrite import normalize
from .syntax import (
    BOT, MINUS, PLUS, TOP, And, CoImp, Formula, Imp, Or, Sign, atom_name, basic,
    is_basic, print_formula, subformula_closure,
)

SIGNS = (PLUS, MINUS)


class SimulationError(ValueError):
    pass


# -- atomic mapping -------------------------------------------------------------------

@dataclass(frozen=True)
class AtomicMapping:
    table: dict  # Formula -> atom name

    def __post_init__(self) -> None:
        inv: dict = {}
        for f, a in self.table.items():
            if a in inv and inv[a] != f:
                raise SimulationError(f"mapping is not injective on {a}")
            inv[a] = f
        object.__setattr__(self, "_inverse", inv)

    def __call__(self, f: Formula) -> str:
        try:
            return self.table[f]
        except KeyError:
            raise SimulationError(f"{print_formula(f)} is outside the mapped set") from None

    def preimage(self, atom: str) -> Formula:
        """The formula an atom stands for; atoms outside the image stand for themselves."""
        return self._inverse.get(atom) or basic(atom)  # type: ignore[attr-defined]

    @property
    def theta(self) -> frozenset:
        return frozenset(self.table)

    def atoms(self) -> frozenset:
        return frozenset(self.table.values())


def fresh_atom_name(f: Formula) -> str:
    return "s_" + print_formula(f).encode().hex()


def atomic_mapping(theta: Iterable[Formula]) -> AtomicMapping:
    theta = frozenset(theta)
    if subformula_closure(theta) != theta:
        missing = sorted(print_formula(f) for f in subformula_closure(theta) - theta)
        raise SimulationError("theta is not subformula closed; missing " + ", ".join(missing))
    table = {f: (atom_name(f) if is_basic(f) else fresh_atom_name(f))
             for f in theta | {TOP, BOT}}
    return AtomicMapping(table)


# -- the simulation base ----------------------------------------------------------------

@dataclass(frozen=True)
class Mirror:
    """How an atomic rule reads as a calculus rule.

    `premises` lists the atomic premises in the calculus rule's child order (two children
    may share one atomic premise when their sentences coincide). `formula` is the
    compound the rule works on, the premise formula of a proof-refutation pair, or None.
    """

    rule: RuleId
    formula: Optional[Formula]
    premises: tuple
    conclusion: str
    sign: Sign

    def key(self, alpha: AtomicMapping) -> tuple:
        if self.rule in CASE or self.rule in (R.PRP, R.PRR):
            return (self.rule, self.formula, self.conclusion, self.sign)
        if self.rule in (R.BotP, R.TopR):
            return (self.rule, self.conclusion, self.sign)
        return (self.rule, self.formula)


@dataclass(frozen=True)
class SimulationBase:
    base: Base
    mapping: AtomicMapping
    mirrors: dict = field(compare=False, repr=False)  # rule -> [Mirror]
    index: dict = field(compare=False, repr=False)    # Mirror key -> (rule, Mirror)

    @property
    def universe(self) -> frozenset:
        return self.base.declared_atoms


def _mirrors(chi: Formula, A, universe: list) -> list[tuple[str, Mirror]]:
    """(name suffix, mirror) pairs for every rule acting on the compound chi."""
    a, b = chi.left, chi.right
    pa, pb, pc = A(a), A(b), A(chi)
    P = premise
    out: list = []

    def put(rid: RuleId, prems, concl: str, sign: Sign, tag: str = "") -> None:
        out.append((f"{rid.token}:{pc}{tag}", Mirror(rid, chi, tuple(prems), concl, sign)))

    def cases(rid: RuleId, major: Premise, left: Premise, right: Premise) -> None:
        for q in universe:
            for s in SIGNS:
                l1 = Premise(left.gamma, left.delta, q, s)
                l2 = Premise(right.gamma, right.delta, q, s)
                put(rid, (major, l1, l2), q, s, f":{s}{q}")

    if isinstance(chi, Imp):
        put(R.ImpIP, [P(pb, PLUS, gamma=[pa])], pc, PLUS)
        put(R.ImpEP, [P(pc, PLUS), P(pa, PLUS)], pb, PLUS)
        put(R.ImpIR, [P(pa, PLUS), P(pb, MINUS)], pc, MINUS)
        put(R.ImpE1R, [P(pc, MINUS)], pa, PLUS)
        put(R.ImpE2R, [P(pc, MINUS)], pb, MINUS)
    elif isinstance(chi, CoImp):
        put(R.CoImpIP, [P(pa, PLUS), P(pb, MINUS)], pc, PLUS)
        put(R.CoImpE1P, [P(pc, PLUS)], pa, PLUS)
        put(R.CoImpE2P, [P(pc, PLUS)], pb, MINUS)
        put(R.CoImpIR, [P(pa, MINUS, delta=[pb])], pc, MINUS)
        put(R.CoImpER, [P(pc, MINUS), P(pb, MINUS)], pa, MINUS)
    elif isinstance(chi, And):
        put(R.AndIP, [P(pa, PLUS), P(pb, PLUS)], pc, PLUS)
        put(R.AndE1P, [P(pc, PLUS)], pa, PLUS)
        put(R.AndE2P, [P(pc, PLUS)], pb, PLUS)
        put(R.AndI1R, [P(pa, MINUS)], pc, MINUS)
        put(R.AndI2R, [P(pb, MINUS)], pc, MINUS)
        cases(R.AndER, P(pc, MINUS), P(pa, MINUS, delta=[pa]), P(pb, MINUS, delta=[pb]))
    elif isinstance(chi, Or):
        put(R.OrI1P, [P(pa, PLUS)], pc, PLUS)
        put(R.OrI2P, [P(pb, PLUS)], pc, PLUS)
        put(R.OrIR, [P(pa, MINUS), P(pb, MINUS)], pc, MINUS)
        put(R.OrE1R, [P(pc, MINUS)], pa, MINUS)
        put(R.OrE2R, [P(pc, MINUS)], pb, MINUS)
        cases(R.OrEP, P(pc, PLUS), P(pa, PLUS, gamma=[pa]), P(pb, PLUS, gamma=[pb]))
    return out


def _as_rule(m: Mirror, name: str) -> AtomicRule:
    return AtomicRule(frozenset(m.premises), m.conclusion, m.sign, name)


def build_simulation_base(theta: Iterable[Formula], alpha: Optional[AtomicMapping] = None
                          ) -> SimulationBase:
    theta = frozenset(theta)
    alpha = alpha or atomic_mapping(theta)
    missing = [f for f in theta if f not in alpha.table]
    if missing:
        raise SimulationError(f"mapping undefined on {print_formula(missing[0])}")
    universe = sorted(alpha.atoms() | {"top", "bot"})
    entries: list[tuple[str, Mirror]] = []
    for chi in sorted((f for f in theta if not is_basic(f)), key=print_formula):
        entries += _mirrors(chi, alpha, universe)
    for x in universe:
        for q in universe:
            both = (premise(x, PLUS), premise(x, MINUS))
            entries.append((f"pr+:{x}:{q}", Mirror(R.PRP, alpha.preimage(x), both, q, PLUS)))
            entries.append((f"pr-:{x}:{q}", Mirror(R.PRR, alpha.preimage(x), both, q, MINUS)))
    for q in universe:
        for s in SIGNS:
            entries.append((f"bot+:{s}{q}", Mirror(R.BotP, None, (premise("bot", PLUS),), q, s)))
            entries.append((f"top-:{s}{q}", Mirror(R.TopR, None, (premise("top", MINUS),), q, s)))

    # distinct instances can coincide as atomic rules (p&p projections, pr vs imp-i on
    # p->p, ...); the first name wins and every reading is kept
    rules: dict = {}
    mirrors: dict = {}
    index: dict = {}
    for name, m in entries:
        r = _as_rule(m, name)
        r = rules.setdefault(r, r)
        mirrors.setdefault(r, []).append(m)
        index[m.key(alpha)] = (r, m)
    base = Base.make(list(rules) + list(unit_rules()), universe)
    return SimulationBase(base, alpha, mirrors, index)


def assumption_axiom(atom: str, sign: Sign) -> AtomicRule:
    return AtomicRule(frozenset(), atom, sign, f"assume{sign}:{atom}")


def inject_assumption_axioms(u: SimulationBase, gamma_at: Iterable[str] = (),
                             delta_at: Iterable[str] = ()) -> Base:
    extra = ([assumption_axiom(a, PLUS) for a in sorted(set(gamma_at))]
             + [assumption_axiom(a, MINUS) for a in sorted(set(delta_at))])
    bad = [r.atom for r in extra if r.atom not in u.universe]
    if bad:
        raise SimulationError(f"atom {bad[0]} is outside the simulation universe")
    return u.base.with_rules(extra)


# -- translations -------------------------------------------------------------------------

def translate_to_bpr(d: AtomicDerivation, u: SimulationBase) -> Derivation:
    """Read an atomic derivation as a calculus derivation.

    Zero-premise rules that are not unit axioms (the injected assumption axioms) become
    open hypotheses. A leaf is bound by the innermost premise whose context contains it.
    """
    top_ax, bot_ax = unit_rules()
    inv = u.mapping.preimage
    counter = [0]

    def go(t: AtomicDerivation, env: dict) -> Derivation:
        if isinstance(t, ALeaf):
            return Hyp(t.sign, inv(t.atom), env.get((t.sign, t.atom), 0))
        r = t.rule
        if r == top_ax:
            return Node(R.AxTopP, PLUS, TOP)
        if r == bot_ax:
            return Node(R.AxBotR, MINUS, BOT)
        if r.is_axiom and r not in u.mirrors:
            return Hyp(t.sign, inv(t.atom), 0)
        if r not in u.mirrors:
            raise SimulationError(f"rule {r.name} is not part of the simulation base")
        m = u.mirrors[r][0]
        order = r.sorted_premises()
        if len(order) != len(t.children) or any(
                (c.atom, c.sign) != p.literal for p, c in zip(order, t.children)):
            raise SimulationError(f"premises of {r.name} do not match the rule")
        kids = []
        labels = set()
        for p in m.premises:
            inner = env
            if p.gamma or p.delta:
                counter[0] += 1
                labels.add(counter[0])
                inner = dict(env)
                for a in p.gamma:
                    inner[PLUS, a] = counter[0]
                for a in p.delta:
                    inner[MINUS, a] = counter[0]
            kids.append(go(t.children[order.index(p)], inner))
        formula = m.formula if m.rule in INTRO else inv(t.atom)
        return Node(m.rule, t.sign, formula, tuple(kids), frozenset(labels),
                    t.sign if m.rule in DOTTED else None)

    return relabel(go(d, {}))


def _mirror_key(t: Node, alpha: AtomicMapping) -> tuple:
    r = t.rule
    if r in CASE:
        return (r, t.children[0].formula, alpha(t.formula), t.sign)
    if r in (R.PRP, R.PRR):
        return (r, t.children[0].formula, alpha(t.formula), t.sign)
    if r in (R.BotP, R.TopR):
        return (r, alpha(t.formula), t.sign)
    if r in INTRO:
        return (r, t.formula)
    return (r, t.children[0].formula)


def translate_from_bpr(d: Derivation, u: SimulationBase) -> AtomicDerivation:
    """Rule-by-rule image of a calculus derivation; hypotheses become atomic leaves."""
    top_ax, bot_ax = unit_rules()
    alpha = u.mapping

    def go(t: Derivation) -> AtomicDerivation:
        if isinstance(t, Hyp):
            return ALeaf(alpha(t.formula), t.sign)
        if t.rule is R.AxTopP:
            return ANode(top_ax, "top", PLUS)
        if t.rule is R.AxBotR:
            return ANode(bot_ax, "bot", MINUS)
        for c in t.children:
            alpha(c.formula)
        hit = u.index.get(_mirror_key(t, alpha))
        if hit is None:
            raise SimulationError(f"no mirror for {t.rule.token} on {print_formula(t.formula)}")
        r, m = hit
        kids = tuple(go(t.children[m.premises.index(p)]) for p in r.sorted_premises())
        return ANode(r, alpha(t.formula), t.sign, kids)

    return go(d)


def _restore_axioms(d: AtomicDerivation, base: Base) -> AtomicDerivation:
    """Put zero-premise rules of the base back in place of open leaves they conclude."""
    axioms = {r.literal: r for r in base.rules if r.is_axiom}

    def go(t: AtomicDerivation, S: frozenset, T: frozenset) -> AtomicDerivation:
        if isinstance(t, ALeaf):
            bound = t.atom in (S if t.sign is PLUS else T)
            ax = axioms.get((t.atom, t.sign))
            return ANode(ax, t.atom, t.sign) if ax is not None and not bound else t
        prems = t.rule.sorted_premises()
        kids = tuple(go(c, S | p.gamma, T | p.delta) for p, c in zip(prems, t.children))
        return ANode(t.rule, t.atom, t.sign, kids)

    return go(d, frozenset(), frozenset())


def normalize_atomic(d: AtomicDerivation, u: SimulationBase, base: Optional[Base] = None
                     ) -> AtomicDerivation:
    """Normalise through the calculus: translate, normalise, translate back.

    Assumption axioms of `base` (default: the simulation base) that turned into open
    hypotheses on the way are put back as axioms.
    """
    normal, _ = normalize(translate_to_bpr(d, u))
    return _restore_axioms(translate_from_bpr(normal, u), base or u.base)


def image_sets(alpha: AtomicMapping, gamma: Iterable[Formula], delta: Iterable[Formula]
               ) -> tuple[frozenset, frozenset]:
    return frozenset(alpha(f) for f in gamma), frozenset(alpha(f) for f in delta)


def simulation_for(formulas: Iterable[Formula]) -> SimulationBase:
    return build_simulation_base(subformula_closure(list(formulas)))


__all__ = [
    "AtomicMapping", "Mirror", "SimulationBase", "SimulationError", "assumption_axiom",
    "atomic_mapping", "build_simulation_base", "fresh_atom_name", "image_sets",
    "inject_assumption_axioms", "normalize_atomic", "simulation_for", "translate_from_bpr",
    "translate_to_bpr",
]
