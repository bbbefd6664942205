"""Bilateral base-extension support, evaluated over a bounded space of extensions.

The clauses that quantify over extensions are checked against every adequate extension
root ∪ R where R is a set of at most k candidate rules; nested quantifiers range over the
same finite family (the budget is counted from the root), so evaluation is a walk over a
finite partial order of bases.

Verdicts are three-valued. Quantifier-free clauses over exact sub-verdicts are exact.
A quantified clause that holds on every enumerated extension is only supported up to the
bound. A clause is refuted only when an extension makes its antecedents hold exactly
and its consequent fail, so every refutation is a genuine counter-model; when the
antecedents hold only up to the bound the verdict is unknown instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .bases import (
    AtomicRule, Base, Premise, adequate_closure, canonical_name, derivable_literals, extends,
    is_epistemically_adequate, is_logically_consistent,
)
from .syntax import (
    MINUS, PLUS, And, Formula, Imp, Or, Sign, atom_name, atoms_of, basic, formula_set_str,
    is_basic, print_formula,
)


@dataclass(frozen=True)
class ExtensionBound:
    extra_atoms: Union[int, tuple] = 0
    max_added_rules: int = 1
    max_premises_per_rule: int = 1
    max_discharge_size: int = 1
    candidate_cap: int = 200_000

    def __post_init__(self):
        for name in ("max_added_rules", "max_premises_per_rule", "max_discharge_size"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        n = self.extra_atoms if isinstance(self.extra_atoms, int) else len(self.extra_atoms)
        if n < 0:
            raise ValueError("extra_atoms must be nonnegative")


AXIOMS_ONLY = ExtensionBound(0, 1, 0, 0)


@dataclass(frozen=True)
class Supported:
    exact: bool

    def __str__(self) -> str:
        return f"SUPPORTED({'exact' if self.exact else 'bounded'})"


@dataclass(frozen=True)
class Refuted:
    """The clause fails in `witness`: the antecedents hold there exactly, the consequent fails."""

    witness: Base
    clause: str
    antecedents: tuple = ()     # (sign, formula) pairs supported exactly in the witness
    consequent: tuple = ()      # (sign, formula) not supported in the witness

    def __str__(self) -> str:
        ants = ", ".join(_show_item(a) for a in self.antecedents) or "nothing"
        s, f = self.consequent
        return (f"REFUTED  clause {self.clause}: with {ants} supported, "
                f"{s}{print_formula(f)} fails in the witness")


def _show_item(a: tuple) -> str:
    if len(a) == 4:
        s, f, G, D = a
        return describe_query(G, D, s, f)
    return f"{a[0]}{print_formula(a[1])}"


@dataclass(frozen=True)
class UnknownAtBound:
    reason: str = ""

    def __str__(self) -> str:
        return "UNKNOWN" + (f"  ({self.reason})" if self.reason else "")


SupportVerdict = Union[Supported, Refuted, UnknownAtBound]


@dataclass(frozen=True)
class SupportQuery:
    base: Base
    gamma: frozenset
    delta: frozenset
    sign: Sign
    goal: Formula
    bound: ExtensionBound = field(default_factory=ExtensionBound)


class BoundExplosion(RuntimeError):
    pass


# -- candidate rules and extensions ------------------------------------------------------

def extra_atom_names(n: Union[int, Iterable[str]], taken: Iterable[str]) -> list[str]:
    if not isinstance(n, int):
        return sorted(n)
    taken = set(taken)
    out, i = [], 1
    while len(out) < n:
        name = f"x{i}"
        if name not in taken:
            out.append(name)
        i += 1
    return out


def candidate_rules(universe: Iterable[str], bound: ExtensionBound,
                    exclude: Iterable[AtomicRule] = ()) -> list[AtomicRule]:
    """Canonical rule space over the universe, in a fixed order.

    Rules concluding top with + or bot with - are left out (the unit axioms already give
    them), as are premises whose conclusion is among their own hypotheses (always met).
    """
    atoms = sorted(set(universe))
    lits = [(a, s) for a in atoms for s in (PLUS, MINUS)]
    ctxs = [c for k in range(bound.max_discharge_size + 1) for c in itertools.combinations(lits, k)]
    prems = []
    for (a, s) in lits:
        for c in ctxs:
            if (a, s) in c:
                continue
            prems.append(Premise(frozenset(x for x, t in c if t is PLUS),
                                 frozenset(x for x, t in c if t is MINUS), a, s))
    prems.sort(key=Premise.key)
    heads = [(a, s) for (a, s) in lits if (a, s) not in (("top", PLUS), ("bot", MINUS))]
    skip = set(exclude)
    out = []
    for k in range(bound.max_premises_per_rule + 1):
        for ps in itertools.combinations(prems, k):
            for (a, s) in heads:
                r = AtomicRule(frozenset(ps), a, s)
                if r in skip:
                    continue
                out.append(r.named(canonical_name(r)))
    return out


def candidate_count(universe: Iterable[str], bound: ExtensionBound) -> int:
    """len(candidate_rules(universe, bound)) with nothing excluded, by counting."""
    n = 2 * len(set(universe))
    prems = n * sum(_comb(n - 1, j) for j in range(bound.max_discharge_size + 1))
    heads = n - 2
    return heads * sum(_comb(prems, k) for k in range(bound.max_premises_per_rule + 1))


def _in_space(r: AtomicRule, universe: frozenset, bound: ExtensionBound) -> bool:
    if (r.atom, r.sign) in (("top", PLUS), ("bot", MINUS)) or not r.atoms() <= universe:
        return False
    if len(r.premises) > bound.max_premises_per_rule:
        return False
    for p in r.premises:
        own = p.gamma if p.sign is PLUS else p.delta
        if p.atom in own or len(p.gamma) + len(p.delta) > bound.max_discharge_size:
            return False
    return True


class ExtensionSpace:
    """Adequate extensions root ∪ R, |R| <= k, over a fixed universe of atoms."""

    def __init__(self, root: Base, bound: ExtensionBound, universe: Iterable[str]):
        self.root = root
        self.bound = bound
        self.universe = frozenset(universe)
        self._candidates: Optional[list] = None
        self._bases: dict = {frozenset(): root}
        self._ok: dict = {frozenset(): True}
        self._up: dict = {}

    @property
    def candidates(self) -> list:
        if self._candidates is None:
            self._candidates = candidate_rules(self.universe, self.bound, self.root.rules)
        return self._candidates

    def base(self, node: frozenset) -> Base:
        b = self._bases.get(node)
        if b is None:
            rules = [self.candidates[i] for i in sorted(node)]
            b = self._bases[node] = self.root.with_rules(rules)
        return b

    def adequate(self, node: frozenset) -> bool:
        ok = self._ok.get(node)
        if ok is None:
            ok = all(self.adequate(node - {i}) for i in node) and \
                is_logically_consistent(self.base(node))
            self._ok[node] = ok
        return ok

    def _size(self) -> int:
        if self._candidates is not None:
            return len(self._candidates)
        # counted without building the rules, so the cap can fire before the cost is paid
        return candidate_count(self.universe, self.bound) - sum(
            1 for r in self.root.rules if _in_space(r, self.universe, self.bound))

    def count(self, node: frozenset) -> int:
        n = self._size() - len(node)
        room = self.bound.max_added_rules - len(node)
        return sum(_comb(n, j) for j in range(max(room, 0) + 1))

    def up(self, node: frozenset) -> list:
        """Adequate nodes containing node, node itself first, canonical order."""
        hit = self._up.get(node)
        if hit is not None:
            return hit
        if self.count(node) > self.bound.candidate_cap:
            raise BoundExplosion(f"{self.count(node)} extensions exceed the cap "
                                 f"{self.bound.candidate_cap}")
        rest = [i for i in range(len(self.candidates)) if i not in node]
        out = []
        for j in range(self.bound.max_added_rules - len(node) + 1):
            for extra in itertools.combinations(rest, j):
                n = node | frozenset(extra)
                if self.adequate(n):
                    out.append(n)
        self._up[node] = out
        return out


def _comb(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    from math import comb
    return comb(n, k)


def relevant_universe(b: Base, formulas: Iterable[Formula] = (), extra=0) -> frozenset:
    atoms = set(b.declared_atoms)
    for f in formulas:
        atoms |= atoms_of(f)
    atoms |= {"top", "bot"}
    return frozenset(atoms | set(extra_atom_names(extra, atoms)))


def enumerate_extensions(b: Base, bound: ExtensionBound,
                         universe: Optional[Iterable[str]] = None) -> Iterator[Base]:
    """b first, then every adequate b ∪ R for R within the bound, canonical order."""
    uni = relevant_universe(b, (), bound.extra_atoms) if universe is None else frozenset(universe)
    root = adequate_closure(b, uni)
    yield root
    if bound.max_added_rules == 0:
        return
    space = ExtensionSpace(root, bound, uni)
    rest = list(range(len(space.candidates)))
    for j in range(1, bound.max_added_rules + 1):
        for extra in itertools.combinations(rest, j):
            n = frozenset(extra)
            if space.adequate(n):
                yield space.base(n)


# -- evaluation ------------------------------------------------------------------------------

class _T:
    __slots__ = ("exact",)

    def __init__(self, exact: bool):
        self.exact = exact


_TE, _TB = _T(True), _T(False)


class _F:
    __slots__ = ("node", "clause", "ants", "cons")

    def __init__(self, node, clause, ants, cons):
        self.node, self.clause, self.ants, self.cons = node, clause, ants, cons


class _U:
    __slots__ = ("reason",)

    def __init__(self, reason: str):
        self.reason = reason


def _conj(vals) -> object:
    exact = True
    unknown = None
    for v in vals:
        if isinstance(v, _F):
            return v
        if isinstance(v, _U):
            unknown = unknown or v
        elif not v.exact:
            exact = False
    if unknown is not None:
        return unknown
    return _TE if exact else _TB


class Evaluator:
    """Support relation for one root base, bound and universe; results are memoised."""

    def __init__(self, base: Base, bound: ExtensionBound = ExtensionBound(),
                 formulas: Iterable[Formula] = (), universe: Optional[Iterable[str]] = None):
        uni = relevant_universe(base, formulas, bound.extra_atoms) if universe is None \
            else frozenset(universe) | {"top", "bot"}
        root = adequate_closure(base, uni)
        if not is_logically_consistent(root):
            raise ValueError("the base is not logically consistent, so it is not adequate")
        self.root = root
        self.bound = bound
        self.universe = uni
        self.atoms = sorted(uni)
        self.space = ExtensionSpace(root, bound, uni)
        self.memo: dict = {}
        self.lits: dict = {}

    def _lits(self, node):
        v = self.lits.get(node)
        if v is None:
            v = self.lits[node] = derivable_literals(self.space.base(node))
        return v

    def _check_atoms(self, fs) -> None:
        for f in fs:
            extra = atoms_of(f) - self.universe
            if extra:
                raise ValueError(f"atom {sorted(extra)[0]} is outside the evaluation universe")

    # public

    def supports(self, gamma: Iterable[Formula], delta: Iterable[Formula], sign: Sign,
                 goal: Formula) -> SupportVerdict:
        gamma, delta = frozenset(gamma), frozenset(delta)
        self._check_atoms([goal, *gamma, *delta])
        try:
            v = self.ev(frozenset(), gamma, delta, sign, goal)
        except BoundExplosion as e:
            return UnknownAtBound(str(e))
        return self._public(v)

    def _public(self, v) -> SupportVerdict:
        if isinstance(v, _T):
            return Supported(v.exact)
        if isinstance(v, _U):
            return UnknownAtBound(v.reason)
        return Refuted(self.space.base(v.node), v.clause, tuple(v.ants), v.cons)

    # clauses

    def ev(self, node, G, D, s, f):
        key = (node, G, D, s, f)
        v = self.memo.get(key)
        if v is None:
            v = self.memo[key] = self._ev(node, G, D, s, f)
        return v

    def _ev(self, node, G, D, s, f):
        if G or D:
            ants = [(PLUS, g) for g in sorted(G, key=print_formula)] + \
                   [(MINUS, d) for d in sorted(D, key=print_formula)]
            return self._forall(node, f"(Inf {s})", [(ants, (s, f))])
        if is_basic(f):
            if (atom_name(f), s) in self._lits(node):
                return _TE
            return _F(node, f"(At {s})", [], (s, f))
        a, b = f.left, f.right
        E = lambda sg, g: self.ev(node, frozenset(), frozenset(), sg, g)  # noqa: E731
        if s is PLUS:
            if isinstance(f, And):
                return _conj([E(PLUS, a), E(PLUS, b)])
            if isinstance(f, Or):
                return self._elim_clause(node, "(or +)", frozenset({a}), frozenset({b}), True)
            if isinstance(f, Imp):
                return self.ev(node, frozenset({a}), frozenset(), PLUS, b)
            return _conj([E(PLUS, a), E(MINUS, b)])
        if isinstance(f, And):
            return self._elim_clause(node, "(and -)", frozenset({a}), frozenset({b}), False)
        if isinstance(f, Or):
            return _conj([E(MINUS, a), E(MINUS, b)])
        if isinstance(f, Imp):
            return _conj([E(PLUS, a), E(MINUS, b)])
        return self.ev(node, frozenset(), frozenset({b}), MINUS, a)

    def _elim_clause(self, node, clause, left, right, as_proof: bool):
        """For all extensions and atoms p, both signs: left ⊩ p and right ⊩ p imply ⊩ p."""
        bodies = []
        for p in self.atoms:
            q = basic(p)
            for sg in (PLUS, MINUS):
                if as_proof:
                    ants = [("inf", left, frozenset(), sg, q), ("inf", right, frozenset(), sg, q)]
                else:
                    ants = [("inf", frozenset(), left, sg, q), ("inf", frozenset(), right, sg, q)]
                bodies.append((ants, (sg, q)))
        return self._forall(node, clause, bodies)

    def _forall(self, node, clause, bodies):
        unknown = None
        for c in self.space.up(node):
            for ants, cons in bodies:
                vals = [self._ant(c, a) for a in ants]
                A = _conj(vals)
                if isinstance(A, _F):
                    continue
                K = self.ev(c, frozenset(), frozenset(), *cons)
                if isinstance(K, _T):
                    continue
                if isinstance(K, _F) and isinstance(A, _T) and A.exact:
                    return _F(c, clause, [self._show(a) for a in ants], cons)
                if unknown is None:
                    why = K.reason if isinstance(K, _U) else (
                        A.reason if isinstance(A, _U) else
                        "antecedents hold only up to the bound where the consequent fails")
                    unknown = _U(why)
        return unknown if unknown is not None else _TB

    def _ant(self, node, a):
        if a[0] == "inf":
            _, G, D, s, f = a
            return self.ev(node, G, D, s, f)
        return self.ev(node, frozenset(), frozenset(), *a)

    @staticmethod
    def _show(a):
        if a[0] == "inf":
            _, G, D, s, f = a
            return (s, f, G, D)
        return a


def supports(q: SupportQuery) -> SupportVerdict:
    ev = Evaluator(q.base, q.bound, [q.goal, *q.gamma, *q.delta])
    return ev.supports(q.gamma, q.delta, q.sign, q.goal)


def support(base: Base, gamma: Iterable[Formula], delta: Iterable[Formula], sign: Sign,
            goal: Formula, bound: ExtensionBound = ExtensionBound()) -> SupportVerdict:
    return supports(SupportQuery(base, frozenset(gamma), frozenset(delta), sign, goal, bound))


def recheck_witness(query_base: Base, v: Refuted, bound: ExtensionBound,
                    universe: Iterable[str]) -> bool:
    """Re-verify a refutation: the witness extends the base, is adequate, and fails the clause."""
    w = v.witness
    if not extends(w, query_base) or not is_epistemically_adequate(w, universe):
        return False
    ev = Evaluator(w, bound, universe=universe)
    for a in v.antecedents:
        if len(a) == 4:
            s, f, G, D = a
            ok = ev.ev(frozenset(), G, D, s, f)
        else:
            s, f = a
            ok = ev.ev(frozenset(), frozenset(), frozenset(), s, f)
        if not (isinstance(ok, _T) and ok.exact):
            return False
    s, f = v.consequent
    return isinstance(ev.ev(frozenset(), frozenset(), frozenset(), s, f), _F)


def valid(gamma: Iterable[Formula], delta: Iterable[Formula], sign: Sign, goal: Formula,
          bot_axiom: bool = True) -> bool:
    """Validity in every base, decided through derivability in the calculus."""
    from .search import decide
    return decide(list(gamma), list(delta), sign, goal, bot_axiom)


def profile(b: Base, atoms: Iterable[str]) -> dict:
    """Which of the given atoms are provable and which refutable, closed, in b."""
    lits = derivable_literals(b)
    return {a: tuple(s for s in (PLUS, MINUS) if (a, s) in lits) for a in sorted(atoms)}


def describe_query(gamma, delta, sign: Sign, goal: Formula) -> str:
    return f"{formula_set_str(gamma)}; {formula_set_str(delta)} ⊩{sign} {print_formula(goal)}"
