"""Decision procedure: exhaustive search for normal derivations inside the subformula closure.

Three kinds of judgment are tracked for a context (Γ; Δ) drawn from the closure:

    N  a normal derivation of the signed formula,
    E  an elimination part: a hypothesis followed by eliminations on major premises
       (case rules in between only if their minor premises are elimination parts too),
    P  a premise of a special rule: an elimination part or an axiom.

Special rules only conclude basic sentences and only take basic premises. The reachable
judgments form a finite and/or graph; its least fixed point is computed by counter
propagation (each alternative waits for its remaining premises), so no depth cap is needed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .calculus import Derivation, Hyp, Node, R, relabel
from .syntax import (
    BOT, MINUS, PLUS, TOP, And, Formula, Imp, Or, Sign, is_basic, subformula_closure,
)

# alternative tags; the tuple after the tag says how to rebuild the rule application
_HYP, _AX, _INTRO, _ELIM, _CASE, _SPECIAL, _LIFT = range(7)


@dataclass
class Certificate:
    derivation: Derivation
    explored: int    # judgments expanded in the space when the query was answered

    def __str__(self) -> str:
        from .fileformat import format_derivation
        return format_derivation(self.derivation)


class SequentSpace:
    """Judgments over one closure; reusable across queries whose formulas lie in it."""

    def __init__(self, closure: Iterable[Formula], bot_axiom: bool = True):
        self.closure = frozenset(closure) | {TOP, BOT}
        self.bot_axiom = bot_axiom
        self.basics = sorted((f for f in self.closure if is_basic(f)), key=str)
        compound = sorted((f for f in self.closure if not is_basic(f)), key=str)
        # majors by the signed formula they eliminate to
        self.elims: dict = {}
        self.ors = [m for m in compound if isinstance(m, Or)]
        self.ands = [m for m in compound if isinstance(m, And)]
        for m in compound:
            a, b = m.left, m.right
            if isinstance(m, Imp):
                self._elim(PLUS, b, (R.ImpEP, PLUS, m, (PLUS, a)))
                self._elim(PLUS, a, (R.ImpE1R, MINUS, m, None))
                self._elim(MINUS, b, (R.ImpE2R, MINUS, m, None))
            elif isinstance(m, And):
                self._elim(PLUS, a, (R.AndE1P, PLUS, m, None))
                self._elim(PLUS, b, (R.AndE2P, PLUS, m, None))
            elif isinstance(m, Or):
                self._elim(MINUS, a, (R.OrE1R, MINUS, m, None))
                self._elim(MINUS, b, (R.OrE2R, MINUS, m, None))
            else:
                self._elim(PLUS, a, (R.CoImpE1P, PLUS, m, None))
                self._elim(MINUS, b, (R.CoImpE2P, PLUS, m, None))
                self._elim(MINUS, a, (R.CoImpER, MINUS, m, (MINUS, b)))
        self.ids: dict = {}
        self.keys: list = []
        self.alts: list = []         # per judgment: list of (tag, info, premise ids)
        self.true: list = []
        self.why: list = []          # index of the alternative that made it true
        self.watch: list = []        # judgment id -> list of (head id, alt index)
        self.missing: dict = {}      # (head id, alt index) -> count of premises not yet true

    def _elim(self, sign: Sign, f: Formula, entry) -> None:
        self.elims.setdefault((sign, f), []).append(entry)

    # -- the graph ------------------------------------------------------------------

    def _id(self, key: tuple, todo: deque) -> int:
        i = self.ids.get(key)
        if i is None:
            i = self.ids[key] = len(self.keys)
            self.keys.append(key)
            self.alts.append(None)
            self.true.append(False)
            self.why.append(None)
            self.watch.append([])
            todo.append(i)
        return i

    @staticmethod
    def _add(ctx: tuple, sign: Sign, f: Formula) -> tuple:
        g, d = ctx
        if sign is PLUS:
            return ctx if f in g else (g | {f}, d)
        return ctx if f in d else (g, d | {f})

    def _alternatives(self, key: tuple, todo: deque) -> list:
        kind, g, d, s, f = key
        ctx = (g, d)
        J = lambda k, c, sg, h: self._id((k, c[0], c[1], sg, h), todo)  # noqa: E731
        out = []
        if kind == "P":
            if (s is PLUS and f == TOP) or (s is MINUS and f == BOT and self.bot_axiom):
                out.append((_AX, None, ()))
            out.append((_LIFT, None, (J("E", ctx, s, f),)))
            return out
        if kind == "E":
            if f in (g if s is PLUS else d):
                out.append((_HYP, None, ()))
            for rule, msign, m, minor in self.elims.get((s, f), ()):
                prem = [J("E", ctx, msign, m)]
                if minor is not None:
                    prem.append(J("N", ctx, minor[0], minor[1]))
                out.append((_ELIM, (rule, m), tuple(prem)))
            out += self._cases(ctx, s, f, "E", J, key)
            return out
        # N
        out.append((_LIFT, None, (J("E", ctx, s, f),)))
        if (s is PLUS and f == TOP) or (s is MINUS and f == BOT and self.bot_axiom):
            out.append((_AX, None, ()))
        if not is_basic(f):
            for rule, prems, disch in _intros(s, f):
                c = ctx if disch is None else self._add(ctx, *disch)
                out.append((_INTRO, (rule, disch), tuple(J("N", c, sg, h) for sg, h in prems)))
        out += self._cases(ctx, s, f, "N", J, key)
        if is_basic(f):
            out.append((_SPECIAL, (R.BotP, None), (J("E", ctx, PLUS, BOT),)))
            out.append((_SPECIAL, (R.TopR, None), (J("E", ctx, MINUS, TOP),)))
            pr = R.PRP if s is PLUS else R.PRR
            for x in self.basics:
                out.append((_SPECIAL, (pr, x), (J("P", ctx, PLUS, x), J("P", ctx, MINUS, x))))
        return out

    def _cases(self, ctx, s, f, kind, J, key) -> list:
        out = []
        for majors, msign, rule in ((self.ors, PLUS, R.OrEP), (self.ands, MINUS, R.AndER)):
            for m in majors:
                c1 = self._add(ctx, msign, m.left)
                c2 = self._add(ctx, msign, m.right)
                if c1 == ctx or c2 == ctx:
                    continue    # a branch would be the goal itself
                prem = (J("E", ctx, msign, m), J(kind, c1, s, f), J(kind, c2, s, f))
                out.append((_CASE, (rule, m), prem))
        return out

    def _expand(self, root: int, todo: deque) -> None:
        fired = deque()
        while todo:
            i = todo.popleft()
            alts = self._alternatives(self.keys[i], todo)
            self.alts[i] = alts
            for k, (_, _, prem) in enumerate(alts):
                need = {p for p in prem if not self.true[p]}
                if not need:
                    fired.append((i, k))
                else:
                    self.missing[i, k] = len(need)
                    for p in need:
                        self.watch[p].append((i, k))
            self._propagate(fired)

    def _propagate(self, fired: deque) -> None:
        while fired:
            i, k = fired.popleft()
            if self.true[i]:
                continue
            self.true[i] = True
            self.why[i] = k
            for head, alt in self.watch[i]:
                n = self.missing[head, alt] - 1
                self.missing[head, alt] = n
                if n == 0 and not self.true[head]:
                    fired.append((head, alt))
            self.watch[i] = []

    # -- queries ----------------------------------------------------------------------

    def _root(self, gamma, delta, sign: Sign, goal: Formula) -> int:
        gamma, delta = frozenset(gamma), frozenset(delta)
        outside = [f for f in [goal, *gamma, *delta] if f not in self.closure]
        if outside:
            raise ValueError(f"formula {outside[0]} is not in the closure of this space")
        todo: deque = deque()
        i = self._id(("N", gamma, delta, sign, goal), todo)
        self._expand(i, todo)
        return i

    def decide(self, gamma, delta, sign: Sign, goal: Formula) -> bool:
        return self.true[self._root(gamma, delta, sign, goal)]

    def prove(self, gamma, delta, sign: Sign, goal: Formula) -> Optional[Certificate]:
        i = self._root(gamma, delta, sign, goal)
        if not self.true[i]:
            return None
        env = {(PLUS, f): 0 for f in gamma}
        env.update({(MINUS, f): 0 for f in delta})
        d = _Builder(self).build(i, env)
        # the search may put a special rule under a case conclusion; normalising moves it
        # into the branches, so certificates are fixpoints of normalize
        from .rewrite import normalize
        return Certificate(normalize(relabel(d))[0], len(self.keys))

    @property
    def explored(self) -> int:
        return len(self.keys)


def _intros(s: Sign, f: Formula):
    """(rule, premises, discharged hypothesis or None) for each introduction concluding s f."""
    a, b = f.left, f.right
    if s is PLUS:
        if isinstance(f, And):
            return [(R.AndIP, [(PLUS, a), (PLUS, b)], None)]
        if isinstance(f, Or):
            return [(R.OrI1P, [(PLUS, a)], None), (R.OrI2P, [(PLUS, b)], None)]
        if isinstance(f, Imp):
            return [(R.ImpIP, [(PLUS, b)], (PLUS, a))]
        return [(R.CoImpIP, [(PLUS, a), (MINUS, b)], None)]
    if isinstance(f, And):
        return [(R.AndI1R, [(MINUS, a)], None), (R.AndI2R, [(MINUS, b)], None)]
    if isinstance(f, Or):
        return [(R.OrIR, [(MINUS, a), (MINUS, b)], None)]
    if isinstance(f, Imp):
        return [(R.ImpIR, [(PLUS, a), (MINUS, b)], None)]
    return [(R.CoImpIR, [(MINUS, a)], (MINUS, b))]


class _Builder:
    """Unfold the justification graph into a derivation, threading discharge labels."""

    def __init__(self, space: SequentSpace):
        self.space = space
        self.next = 0

    def fresh(self) -> int:
        self.next += 1
        return self.next

    def build(self, i: int, env: dict) -> Derivation:
        sp = self.space
        kind, g, d, s, f = sp.keys[i]
        tag, info, prem = sp.alts[i][sp.why[i]]
        if tag == _HYP:
            return Hyp(s, f, env[(s, f)])
        if tag == _AX:
            return Node(R.AxTopP, PLUS, TOP) if s is PLUS else Node(R.AxBotR, MINUS, BOT)
        if tag == _LIFT:
            return self.build(prem[0], env)
        if tag == _ELIM:
            return Node(info[0], s, f, tuple(self.build(p, env) for p in prem))
        if tag == _INTRO:
            rule, disch = info
            if disch is None:
                return Node(rule, s, f, tuple(self.build(p, env) for p in prem))
            inner, labels = self.bind(env, [disch])
            return Node(rule, s, f, (self.build(prem[0], inner),), labels)
        if tag == _CASE:
            rule, m = info
            msign = PLUS if rule is R.OrEP else MINUS
            major = self.build(prem[0], env)
            env1, lab1 = self.bind(env, [(msign, m.left)])
            env2, lab2 = self.bind(env, [(msign, m.right)])
            kids = (major, self.build(prem[1], env1), self.build(prem[2], env2))
            return Node(rule, s, f, kids, lab1 | lab2, s)
        rule, x = info
        kids = tuple(self.build(p, env) for p in prem)
        if rule in (R.BotP, R.TopR):
            return Node(rule, s, f, kids, frozenset(), s)
        return Node(rule, s, f, kids)

    def bind(self, env: dict, hyps) -> tuple[dict, frozenset]:
        inner = dict(env)
        labels = set()
        for h in hyps:
            if h not in inner:
                inner[h] = lab = self.fresh()
                labels.add(lab)
        return inner, frozenset(labels)


# -- one-shot API --------------------------------------------------------------------------

def space_for(gamma, delta, goal: Formula, bot_axiom: bool = True) -> SequentSpace:
    return SequentSpace(subformula_closure([goal, *gamma, *delta, TOP, BOT]), bot_axiom)


def decide(gamma, delta, sign: Sign, goal: Formula, bot_axiom: bool = True) -> bool:
    """Is Γ; Δ ⊢sign goal derivable?"""
    return space_for(gamma, delta, goal, bot_axiom).decide(gamma, delta, sign, goal)


def prove(gamma, delta, sign: Sign, goal: Formula, bot_axiom: bool = True
          ) -> Optional[Certificate]:
    return space_for(gamma, delta, goal, bot_axiom).prove(gamma, delta, sign, goal)
