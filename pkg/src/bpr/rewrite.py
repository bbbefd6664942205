"""Normalisation: measures, maximal segments, reductions and the staged strategy.

Rewriting works on immutable trees. Each subtree caches a small summary (size,
largest label, special-rule degrees, segment data), so a step only rebuilds the
spine above the rewritten position. Binder labels are kept globally distinct
while rewriting: duplicated copies get fresh labels, and the result is
renumbered canonically once at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .calculus import (
    AXIOMS, CASE, ELIM, INTRO, SPECIAL, Derivation, Hyp, Node, R, discharge_spec,
    iter_positions, open_premises, path_str, relabel, replace_at, subtree,
)
from .syntax import MINUS, PLUS, And, CoImp, Formula, Imp, Or, Sign, degree, subformula_closure


class NormalizationError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class Measure:
    d: int
    n: int

    def __str__(self) -> str:
        return f"{self.d},{self.n}"


ZERO = Measure(0, 0)


@dataclass(frozen=True)
class Step:
    kind: str          # Lemma1 | Lemma2 | Proper | Permutative
    path: tuple
    before: Measure
    after: Measure
    phase: str         # lemma1 | lemma2 | main | cleanup
    fallback: bool = False

    def line(self, k: int) -> str:
        return (f"step {k} {self.kind} at {path_str(self.path)} "
                f"measure {self.before} -> {self.after}")


class ReductionTrace(list):
    def lines(self) -> list[str]:
        return [s.line(k) for k, s in enumerate(self, 1)]

    def __str__(self) -> str:
        return "\n".join(self.lines())


def parse_trace_line(line: str) -> tuple[int, str, tuple, Measure, Measure]:
    parts = line.split()
    if (len(parts) != 9 or parts[0] != "step" or parts[3] != "at" or parts[5] != "measure"
            or parts[7] != "->"):
        raise ValueError(f"bad trace line {line!r}")
    path = () if parts[4] == "root" else tuple(int(i) for i in parts[4].split("."))
    before = Measure(*map(int, parts[6].split(",")))
    after = Measure(*map(int, parts[8].split(",")))
    return int(parts[1]), parts[2], path, before, after


# -- cached subtree summaries ------------------------------------------------------

class Info:
    __slots__ = ("size", "maxlab", "spdeg", "spcnt", "chains", "segdeg", "seglen",
                 "links", "overcase")

    def __init__(self):
        self.size = 1
        self.maxlab = 0
        self.spdeg = -1     # max degree of a special-rule occurrence in the subtree
        self.spcnt = 0      # occurrences at that degree
        self.chains = ()    # paths from here up to introductions through case minors
        self.segdeg = -1    # max degree of a segment whose elimination is in the subtree
        self.seglen = 0     # summed lengths at that degree
        self.links = 0      # special rules with a special premise
        self.overcase = 0   # special rules with a case-rule premise


def _own_degree(node: Node) -> int:
    return max([degree(node.formula)] + [degree(c.formula) for c in node.children])


def info(t: Derivation) -> Info:
    cached = t.__dict__.get("_info")
    if cached is not None:
        return cached
    inf = Info()
    if isinstance(t, Hyp):
        inf.maxlab = t.label
        t.__dict__["_info"] = inf
        return inf
    kids = [info(c) for c in t.children]
    inf.size = 1 + sum(k.size for k in kids)
    inf.maxlab = max([k.maxlab for k in kids] + list(t.discharged) + [0])
    spdeg, spcnt = -1, 0
    segdeg, seglen = -1, 0
    for k in kids:
        if k.spdeg > spdeg:
            spdeg, spcnt = k.spdeg, k.spcnt
        elif k.spdeg == spdeg:
            spcnt += k.spcnt
        if k.segdeg > segdeg:
            segdeg, seglen = k.segdeg, k.seglen
        elif k.segdeg == segdeg:
            seglen += k.seglen
        inf.links += k.links
        inf.overcase += k.overcase
    r = t.rule
    if r in SPECIAL:
        for f in [c.formula for c in t.children] + [t.formula]:
            g = degree(f)
            if g > spdeg:
                spdeg, spcnt = g, 1
            elif g == spdeg:
                spcnt += 1
        for c in t.children:
            if isinstance(c, Node):
                if c.rule in SPECIAL:
                    inf.links += 1
                elif c.rule in CASE:
                    inf.overcase += 1
    if r in ELIM:
        major = t.children[0]
        chains = kids[0].chains
        if chains:
            g = degree(major.formula)
            total = sum(len(c) + 1 for c in chains)
            if g > segdeg:
                segdeg, seglen = g, total
            elif g == segdeg:
                seglen += total
    if r in INTRO:
        inf.chains = ((),)
    elif r in CASE:
        inf.chains = tuple((1,) + c for c in kids[1].chains) + \
            tuple((2,) + c for c in kids[2].chains)
    inf.spdeg, inf.spcnt = spdeg, spcnt
    inf.segdeg, inf.seglen = segdeg, seglen
    t.__dict__["_info"] = inf
    return inf


class _Labels:
    def __init__(self, start: int):
        self.next = start

    def take(self) -> int:
        self.next += 1
        return self.next


def freshen(t: Derivation, labels: _Labels) -> Derivation:
    """Rename every binder inside t (and the hypotheses it binds) to fresh labels."""

    def go(t: Derivation, env: dict) -> Derivation:
        if isinstance(t, Hyp):
            new = env.get(t.label)
            return t if new is None else Hyp(t.sign, t.formula, new)
        if t.discharged:
            env = dict(env)
            mapping = {lab: labels.take() for lab in sorted(t.discharged)}
            env.update(mapping)
            discharged = frozenset(mapping.values())
        else:
            discharged = t.discharged
        kids = tuple(go(c, env) for c in t.children)
        if discharged is t.discharged and all(a is b for a, b in zip(kids, t.children)):
            return t
        return Node(t.rule, t.sign, t.formula, kids, discharged, t.dotted)

    if info(t).maxlab == 0:
        return t
    return go(t, {})


def _node(rule: R, sign: Sign, f: Formula, kids=(), discharged=(), dotted=None) -> Node:
    return Node(rule, sign, f, tuple(kids), frozenset(discharged), dotted)


def _pr(sign: Sign) -> R:
    return R.PRP if sign is PLUS else R.PRR


def retarget(special: Node, f: Formula, sign: Sign) -> Node:
    """The same special-rule application, concluding f with the given sign."""
    if special.rule in (R.PRP, R.PRR):
        return _node(_pr(sign), sign, f, special.children)
    return _node(special.rule, sign, f, special.children, dotted=sign)


# -- complexity value and the atomic-premise lemma -----------------------------------

def complexity_value(d: Derivation) -> Measure:
    inf = info(d)
    return Measure(inf.spdeg, inf.spcnt) if inf.spdeg > 0 else ZERO


def _premise_rewrite(node: Node, labels: _Labels) -> Node:
    """Rewrite a PR application on a compound premise via the dual eliminations."""
    sigma, sigma_r = node.children
    a = sigma.formula
    s, chi = node.sign, node.formula
    pr = _pr(s)
    b, c = a.left, a.right
    if isinstance(a, And):
        l1, l2 = labels.take(), labels.take()
        left = _node(pr, s, chi, (_node(R.AndE1P, PLUS, b, (sigma,)), Hyp(MINUS, b, l1)))
        right = _node(pr, s, chi, (_node(R.AndE2P, PLUS, c, (freshen(sigma, labels),)),
                                   Hyp(MINUS, c, l2)))
        return _node(R.AndER, s, chi, (sigma_r, left, right), (l1, l2), s)
    if isinstance(a, Or):
        l1, l2 = labels.take(), labels.take()
        left = _node(pr, s, chi, (Hyp(PLUS, b, l1), _node(R.OrE1R, MINUS, b, (sigma_r,))))
        right = _node(pr, s, chi, (Hyp(PLUS, c, l2),
                                   _node(R.OrE2R, MINUS, c, (freshen(sigma_r, labels),))))
        return _node(R.OrEP, s, chi, (sigma, left, right), (l1, l2), s)
    if isinstance(a, Imp):
        minor = _node(R.ImpE1R, PLUS, b, (sigma_r,))
        proof = _node(R.ImpEP, PLUS, c, (sigma, minor))
        refut = _node(R.ImpE2R, MINUS, c, (freshen(sigma_r, labels),))
        return _node(pr, s, chi, (proof, refut))
    if isinstance(a, CoImp):
        proof = _node(R.CoImpE1P, PLUS, b, (sigma,))
        second = _node(R.CoImpE2P, MINUS, c, (freshen(sigma, labels),))
        refut = _node(R.CoImpER, MINUS, b, (sigma_r, second))
        return _node(pr, s, chi, (proof, refut))
    raise NormalizationError("premise rewrite on an atomic formula")


def _conclusion_rewrite(node: Node, labels: _Labels) -> Node:
    """Push a special rule with compound conclusion through the matching introduction."""
    f, s = node.formula, node.sign
    a, b = f.left, f.right

    def sp(g: Formula, sg: Sign, copy: bool = False) -> Node:
        n = retarget(node, g, sg)
        return freshen(n, labels) if copy else n

    if s is PLUS:
        if isinstance(f, And):
            return _node(R.AndIP, PLUS, f, (sp(a, PLUS), sp(b, PLUS, True)))
        if isinstance(f, Or):
            return _node(R.OrI1P, PLUS, f, (sp(a, PLUS),))
        if isinstance(f, Imp):
            return _node(R.ImpIP, PLUS, f, (sp(b, PLUS),))
        return _node(R.CoImpIP, PLUS, f, (sp(a, PLUS), sp(b, MINUS, True)))
    if isinstance(f, And):
        return _node(R.AndI1R, MINUS, f, (sp(a, MINUS),))
    if isinstance(f, Or):
        return _node(R.OrIR, MINUS, f, (sp(a, MINUS), sp(b, MINUS, True)))
    if isinstance(f, Imp):
        return _node(R.ImpIR, MINUS, f, (sp(a, PLUS), sp(b, MINUS, True)))
    return _node(R.CoImpIR, MINUS, f, (sp(a, MINUS),))


def _find_special(t: Derivation, path: tuple, top: int) -> Optional[tuple]:
    """Leftmost-outermost special application with a degree-top occurrence and none above."""
    if info(t).spdeg < top:
        return None
    if t.rule in SPECIAL and _own_degree(t) == top and \
            all(info(c).spdeg < top for c in t.children):
        return path
    for i, c in enumerate(t.children):
        hit = _find_special(c, path + (i,), top)
        if hit is not None:
            return hit
    return None


def lemma1_step(d: Derivation, labels: Optional[_Labels] = None
                ) -> Optional[tuple[Derivation, tuple]]:
    """One rewrite on a maximal-degree special occurrence, or None if all are atomic."""
    top = info(d).spdeg
    if top <= 0:
        return None
    if labels is None:
        labels = _Labels(info(d).maxlab)
    path = _find_special(d, (), top)
    if path is None:
        raise NormalizationError("no eligible special occurrence (internal error)")
    node = subtree(d, path)
    if node.rule in (R.PRP, R.PRR) and degree(node.children[0].formula) == top:
        new = _premise_rewrite(node, labels)
    else:
        new = _conclusion_rewrite(node, labels)
    return replace_at(d, path, new), path


def reduce_atomic_premises(d: Derivation) -> tuple[Derivation, ReductionTrace]:
    trace = ReductionTrace()
    d = relabel(d)
    labels = _Labels(info(d).maxlab)
    before = complexity_value(d)
    while True:
        res = lemma1_step(d, labels)
        if res is None:
            return d, trace
        d, path = res
        after = complexity_value(d)
        trace.append(Step("Lemma1", path, before, after, "lemma1"))
        before = after


# -- chains of special rules -----------------------------------------------------------

def chain_count(d: Derivation) -> int:
    return info(d).links


def _find_link(t: Derivation, path: tuple) -> Optional[tuple]:
    if info(t).links == 0:
        return None
    if t.rule in SPECIAL and any(isinstance(c, Node) and c.rule in SPECIAL for c in t.children):
        return path
    for i, c in enumerate(t.children):
        hit = _find_link(c, path + (i,))
        if hit is not None:
            return hit
    return None


def collapse_step(d: Derivation) -> Optional[tuple[Derivation, tuple]]:
    path = _find_link(d, ())
    if path is None:
        return None
    t = subtree(d, path)
    upper = next(c for c in t.children if isinstance(c, Node) and c.rule in SPECIAL)
    return replace_at(d, path, retarget(upper, t.formula, t.sign)), path


def collapse_special_chains(d: Derivation) -> tuple[Derivation, ReductionTrace]:
    trace = ReductionTrace()
    before = Measure(0, chain_count(d))
    while True:
        res = collapse_step(d)
        if res is None:
            return d, trace
        d, path = res
        after = Measure(0, chain_count(d))
        trace.append(Step("Lemma2", path, before, after, "lemma2"))
        before = after


def is_prenormal(d: Derivation) -> bool:
    return complexity_value(d) == ZERO and chain_count(d) == 0


def to_prenormal(d: Derivation) -> tuple[Derivation, ReductionTrace]:
    trace = ReductionTrace()
    while True:
        d, t1 = reduce_atomic_premises(d)
        d, t2 = collapse_special_chains(d)
        trace += t1
        trace += t2
        if is_prenormal(d):
            return d, trace


# -- maximal segments ----------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    occurrences: tuple   # paths of the concluding nodes, from the introduction down
    formula: Formula

    @property
    def degree(self) -> int:
        return degree(self.formula)

    @property
    def length(self) -> int:
        return len(self.occurrences)

    @property
    def final(self) -> tuple:
        """Path of the elimination whose major premise ends the segment."""
        return self.occurrences[-1][:-1]

    @property
    def start(self) -> tuple:
        return self.occurrences[0]


def _segments_at(t: Node, path: tuple) -> list[Segment]:
    major = path + (0,)
    out = []
    for chain in info(t.children[0]).chains:
        occ = [major + chain[:k] for k in range(len(chain), -1, -1)]
        out.append(Segment(tuple(occ), t.children[0].formula))
    return out


def maximal_segments(d: Derivation, min_degree: int = 0) -> list[Segment]:
    """All maximal segments of degree >= min_degree, leftmost-outermost first."""
    out: list[Segment] = []

    def go(t: Derivation, path: tuple) -> None:
        if info(t).segdeg < min_degree:
            return
        if t.rule in ELIM and degree(t.children[0].formula) >= min_degree:
            out.extend(_segments_at(t, path))
        for i, c in enumerate(t.children):
            go(c, path + (i,))

    go(d, ())
    out.sort(key=lambda s: (s.final, s.occurrences))
    return out


def inductive_value(d: Derivation) -> Measure:
    inf = info(d)
    return Measure(inf.segdeg, inf.seglen) if inf.segdeg >= 0 else ZERO


def _zone(d: Derivation, seg: Segment) -> list[tuple]:
    """Subtrees whose segments a reduction of seg would duplicate or lengthen."""
    final = subtree(d, seg.final)
    if seg.length > 1:
        return [seg.final + (i,) for i in range(1, len(final.children))]
    if final.rule in (R.ImpEP, R.CoImpER):
        return [seg.final + (1,)]
    if final.rule in CASE:
        return [seg.start + (0,)]
    return []


def _inside(path: tuple, roots: list[tuple]) -> bool:
    return any(path[:len(r)] == r for r in roots)


def _continues(d: Derivation, path: tuple) -> bool:
    """Whether the occurrence at path lies on a segment ending below it."""
    nodes = [d]
    for i in path:
        nodes.append(nodes[-1].children[i])
    for k in range(len(path) - 1, -1, -1):
        parent, i = nodes[k], path[k]
        if i == 0 and parent.rule in ELIM:
            return True
        if not (i > 0 and parent.rule in CASE):
            return False
    return False


def _zone_occupied(d: Derivation, zone: list[tuple], top: int) -> bool:
    """Does a segment of degree top have an occurrence inside one of the zone subtrees?"""
    for z in zone:
        t = subtree(d, z)
        if info(t).segdeg == top:
            return True
        if info(t).chains and degree(t.formula) == top and _continues(d, z):
            return True
    return False


def select_segment(d: Derivation) -> tuple[Optional[Segment], bool]:
    """Leftmost-outermost eligible segment of maximal degree; flag if none was eligible."""
    top = info(d).segdeg
    if top < 0:
        return None, False
    first: list[Segment] = []

    def go(t: Derivation, path: tuple) -> Optional[Segment]:
        if info(t).segdeg < top:
            return None
        if t.rule in ELIM and degree(t.children[0].formula) == top:
            for s in sorted(_segments_at(t, path), key=lambda s: s.occurrences):
                if not first:
                    first.append(s)
                zone = _zone(d, s)
                if not zone or not _zone_occupied(d, zone, top):
                    return s
        for i, c in enumerate(t.children):
            hit = go(c, path + (i,))
            if hit is not None:
                return hit
        return None

    hit = go(d, ())
    if hit is not None:
        return hit, False
    return first[0], True


# -- proper and permutative reductions -----------------------------------------------------

def substitute(t: Derivation, sign: Sign, f: Formula, bound: frozenset, repl: Derivation,
               labels: Optional[_Labels] = None) -> Derivation:
    """Replace the hypotheses sign/f labelled from `bound` by repl.

    With `labels`, every copy after the first gets freshly renamed binders.
    """
    used = [False]

    def go(t: Derivation) -> Derivation:
        if isinstance(t, Hyp):
            if t.label and t.label in bound and t.sign is sign and t.formula == f:
                if used[0] and labels is not None:
                    return freshen(repl, labels)
                used[0] = True
                return repl
            return t
        kids = tuple(go(c) for c in t.children)
        if all(a is b for a, b in zip(kids, t.children)):
            return t
        return Node(t.rule, t.sign, t.formula, kids, t.discharged, t.dotted)

    return go(t)


def contract(final: Node, labels: Optional[_Labels] = None) -> Derivation:
    """Contract an introduction immediately followed by the matching elimination."""
    intro = final.children[0]
    r, ir = final.rule, intro.rule
    if r is R.ImpEP and ir is R.ImpIP:
        return substitute(intro.children[0], PLUS, intro.formula.left, intro.discharged,
                          final.children[1], labels)
    if r is R.CoImpER and ir is R.CoImpIR:
        return substitute(intro.children[0], MINUS, intro.formula.right, intro.discharged,
                          final.children[1], labels)
    pick = {
        (R.AndE1P, R.AndIP): 0, (R.AndE2P, R.AndIP): 1,
        (R.CoImpE1P, R.CoImpIP): 0, (R.CoImpE2P, R.CoImpIP): 1,
        (R.ImpE1R, R.ImpIR): 0, (R.ImpE2R, R.ImpIR): 1,
        (R.OrE1R, R.OrIR): 0, (R.OrE2R, R.OrIR): 1,
    }
    if (r, ir) in pick:
        return intro.children[pick[(r, ir)]]
    routes = {
        (R.OrEP, R.OrI1P): 1, (R.OrEP, R.OrI2P): 2,
        (R.AndER, R.AndI1R): 1, (R.AndER, R.AndI2R): 2,
    }
    if (r, ir) in routes:
        i = routes[(r, ir)]
        sign, part = discharge_spec(final)[i]
        return substitute(final.children[i], sign, part, final.discharged, intro.children[0],
                          labels)
    raise NormalizationError(f"no proper reduction for {ir.token} followed by {r.token}")


def permute(final: Node, labels: Optional[_Labels] = None) -> Node:
    """Push an elimination whose major premise is a case conclusion into the branches."""
    case = final.children[0]
    if case.rule not in CASE:
        raise NormalizationError("permutative reduction needs a case rule above the major premise")
    branches = [
        Node(final.rule, final.sign, final.formula, (case.children[k],) + final.children[1:],
             final.discharged, final.dotted)
        for k in (1, 2)]
    if labels is not None:
        branches[1] = freshen(branches[1], labels)
    return Node(case.rule, final.sign, final.formula, (case.children[0],) + tuple(branches),
                case.discharged, final.sign)


def _labels_for(d: Derivation, labels: Optional[_Labels]) -> _Labels:
    return labels if labels is not None else _Labels(info(d).maxlab)


def proper_reduce_at(d: Derivation, seg: Segment, labels: Optional[_Labels] = None
                     ) -> Derivation:
    if seg.length != 1:
        raise NormalizationError("proper reduction needs a segment of length 1")
    final = subtree(d, seg.final)
    return replace_at(d, seg.final, contract(final, _labels_for(d, labels)))


def permutative_reduce_at(d: Derivation, seg: Segment, labels: Optional[_Labels] = None
                          ) -> Derivation:
    if seg.length < 2:
        raise NormalizationError("permutative reduction needs a segment longer than 1")
    final = subtree(d, seg.final)
    return replace_at(d, seg.final, permute(final, _labels_for(d, labels)))


# -- cleanup: special rules below case conclusions -------------------------------------------

def _find_overcase(t: Derivation, path: tuple) -> Optional[tuple]:
    if info(t).overcase == 0:
        return None
    if t.rule in SPECIAL:
        for i, c in enumerate(t.children):
            if isinstance(c, Node) and c.rule in CASE:
                return path, i
    for i, c in enumerate(t.children):
        hit = _find_overcase(c, path + (i,))
        if hit is not None:
            return hit
    return None


def _permute_special(node: Node, i: int, labels: _Labels) -> Node:
    case = node.children[i]
    branches = []
    for k in (1, 2):
        kids = list(node.children)
        kids[i] = case.children[k]
        b = Node(node.rule, node.sign, node.formula, tuple(kids), node.discharged, node.dotted)
        branches.append(b if k == 1 else freshen(b, labels))
    return Node(case.rule, node.sign, node.formula, (case.children[0],) + tuple(branches),
                case.discharged, node.sign)


# -- the strategy --------------------------------------------------------------------------

def normalize(d: Derivation, max_steps: int = 10 ** 6) -> tuple[Derivation, ReductionTrace]:
    """Pre-normal form, then segment reductions, then a final pass over special rules.

    The final pass collapses special-rule chains recreated by substitution and moves
    special rules whose premise is a case conclusion into the case branches.
    """
    d, trace = to_prenormal(d)
    if len(trace) > max_steps:
        raise NormalizationError(f"step limit {max_steps} exceeded (internal error)")
    labels = _Labels(info(d).maxlab)

    def record(step: Step) -> None:
        trace.append(step)
        if len(trace) > max_steps:
            raise NormalizationError(f"step limit {max_steps} exceeded (internal error)")

    value = inductive_value(d)
    while True:
        seg, fallback = select_segment(d)
        if seg is None:
            break
        if seg.length == 1:
            d, kind = proper_reduce_at(d, seg, labels), "Proper"
        else:
            d, kind = permutative_reduce_at(d, seg, labels), "Permutative"
        after = inductive_value(d)
        record(Step(kind, seg.final, value, after, "main", fallback))
        value = after

    while True:
        before = Measure(0, chain_count(d))
        res = collapse_step(d)
        if res is not None:
            d, path = res
            record(Step("Lemma2", path, before, Measure(0, chain_count(d)), "cleanup"))
            continue
        hit = _find_overcase(d, ())
        if hit is None:
            break
        path, i = hit
        d = replace_at(d, path, _permute_special(subtree(d, path), i, labels))
        record(Step("Permutative", path + (i,), before, Measure(0, chain_count(d)), "cleanup"))
    if inductive_value(d) != ZERO:
        raise NormalizationError("final pass re-introduced a maximal segment (internal error)")
    return relabel(d), trace


# -- properties of normal derivations ---------------------------------------------------------

def check_subformula_property(d: Derivation) -> bool:
    gamma, delta = open_premises(d)
    allowed = subformula_closure([d.formula, *gamma, *delta])
    return all(t.formula in allowed for _, t in iter_positions(d))


def has_undischarged_or_ends_in_I(d: Derivation) -> bool:
    gamma, delta = open_premises(d)
    if gamma or delta:
        return True
    return isinstance(d, Node) and (d.rule in INTRO or d.rule in AXIOMS)
