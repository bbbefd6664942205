import random

import pytest

from bpr.bases import (
    Base, adequate_closure, derives, extends, is_epistemically_adequate, premise, rule,
)
from bpr.fileformat import parse_base
from bpr.semantics import (
    AXIOMS_ONLY, BoundExplosion, Evaluator, ExtensionBound, Refuted, Supported,
    UnknownAtBound, candidate_rules, enumerate_extensions, recheck_witness, support, valid,
)
from bpr.syntax import BOT, MINUS, PLUS, TOP, And, Atom, CoImp, Imp, Or, parse_formula
from oracles import formulas_up_to

p, q, r = Atom("p"), Atom("q"), Atom("r")
SMALL_BOUNDS = [ExtensionBound(0, 0, 0, 0), ExtensionBound(0, 1, 0, 0),
                ExtensionBound(0, 1, 1, 1), ExtensionBound(1, 1, 1, 1),
                ExtensionBound(0, 2, 1, 0)]


def minimal():
    return adequate_closure(Base.make())


def test_bound_rejects_negative_values():
    with pytest.raises(ValueError):
        ExtensionBound(0, -1, 0, 0)
    with pytest.raises(ValueError):
        ExtensionBound(-1, 0, 0, 0)


def test_top_is_supported_exactly():
    for b in (minimal(), Base.make([rule("p", PLUS)])):
        assert support(b, (), (), PLUS, TOP) == Supported(True)
        assert support(b, (), (), MINUS, BOT) == Supported(True)


def test_inconsistent_base_is_rejected():
    b = Base.make([rule("p", PLUS), rule("p", MINUS)])
    with pytest.raises(ValueError):
        support(b, (), (), PLUS, p)


def test_atom_outside_universe_is_an_error():
    ev = Evaluator(minimal(), AXIOMS_ONLY, universe=["p"])
    with pytest.raises(ValueError):
        ev.supports((), (), PLUS, q)


@pytest.mark.parametrize("bound", SMALL_BOUNDS, ids=str)
def test_b1_supports_negation_of_p(corpus, bound):
    b1 = parse_base((corpus / "r1.base").read_text())
    assert not derives(adequate_closure(b1), (), (), "p", MINUS)
    v = support(b1, (), (), PLUS, Imp(p, BOT), bound)
    assert isinstance(v, Supported)


@pytest.mark.parametrize("bound", SMALL_BOUNDS, ids=str)
def test_b2_supports_refutation_of_top_coimp_p(corpus, bound):
    b2 = parse_base((corpus / "r2.base").read_text())
    assert not derives(adequate_closure(b2), (), (), "p", PLUS)
    v = support(b2, (), (), MINUS, CoImp(TOP, p), bound)
    assert isinstance(v, Supported)


def test_without_the_rule_negation_of_p_is_refuted():
    # With nothing about p, adding the axiom p gives a consistent extension without bot.
    v = support(minimal(), (), (), PLUS, Imp(p, BOT), ExtensionBound(0, 1, 0, 0))
    assert isinstance(v, Refuted)
    assert v.witness.rules > minimal().rules
    assert recheck_witness(minimal(), v, ExtensionBound(0, 1, 0, 0), {"p", "top", "bot"})


def test_disjunction_refuted_in_the_base_itself():
    b = Base.make([rule("q", MINUS)])
    bound = ExtensionBound(0, 1, 1, 1)
    v = support(b, (), (), MINUS, Or(q, r), bound)
    assert isinstance(v, Refuted)
    closed = adequate_closure(b, {"q", "r"})
    assert v.witness == closed
    assert v.consequent == (MINUS, r)
    assert recheck_witness(closed, v, bound, {"q", "r", "top", "bot"})
    assert str(v).startswith("REFUTED  clause (At -)")


def test_conjunction_needs_both_sides():
    b = Base.make([rule("p", PLUS), rule("q", PLUS)])
    assert support(b, (), (), PLUS, And(p, q)) == Supported(True)
    b = Base.make([rule("p", PLUS)])
    assert isinstance(support(b, (), (), PLUS, And(p, q)), Refuted)


def test_verdict_strings():
    assert str(Supported(True)) == "SUPPORTED(exact)"
    assert str(Supported(False)) == "SUPPORTED(bounded)"
    assert str(UnknownAtBound("x")) == "UNKNOWN  (x)"


# -- extensions ---------------------------------------------------------------------------

def test_zero_rules_yields_only_the_base():
    b = minimal()
    assert list(enumerate_extensions(b, ExtensionBound(0, 0, 2, 2))) == [b]
    # extra atoms only widen the epistemic closure of the base
    got = list(enumerate_extensions(b, ExtensionBound(2, 0, 2, 2)))
    assert got == [adequate_closure(b, {"x1", "x2"})]


def test_one_extra_atom_one_axiom():
    b = minimal()
    got = list(enumerate_extensions(b, ExtensionBound(1, 1, 0, 0)))
    assert got[0] == adequate_closure(b, {"x1"})
    plus = {x for c in got for x in c.rules if x.atom == "x1" and not x.premises}
    assert {x.sign for x in plus} == {PLUS, MINUS}
    for c in got:
        axioms = {(x.atom, x.sign) for x in c.rules if not x.premises}
        assert not {("x1", PLUS), ("x1", MINUS)} <= axioms
    # base, +x1, -x1, -top, +bot are the axioms; the last two make it inconsistent
    assert len(got) == 3


def test_two_axioms_inconsistent_pair_is_dropped():
    b = minimal()
    got = list(enumerate_extensions(b, ExtensionBound(1, 2, 0, 0)))
    assert all(is_epistemically_adequate(c) for c in got)
    assert len(got) == 3


@pytest.mark.parametrize("bound", SMALL_BOUNDS, ids=str)
def test_extensions_extend_and_are_adequate(corpus, bound):
    b1 = adequate_closure(parse_base((corpus / "r1.base").read_text()))
    got = list(enumerate_extensions(b1, bound))
    assert got[0] == adequate_closure(b1, got[0].declared_atoms)
    assert len(set(got)) == len(got)
    for c in got:
        assert extends(c, b1)
        assert is_epistemically_adequate(c)


def test_enumeration_is_deterministic():
    bound = ExtensionBound(1, 2, 1, 0)
    a = [c.rules for c in enumerate_extensions(minimal(), bound)]
    b = [c.rules for c in enumerate_extensions(minimal(), bound)]
    assert a == b


def test_candidate_space_skips_trivial_rules():
    cands = candidate_rules({"p", "top", "bot"}, ExtensionBound(0, 1, 1, 1))
    assert len(cands) == len(set(cands))
    for c in cands:
        assert (c.atom, c.sign) not in (("top", PLUS), ("bot", MINUS))
        for pr in c.premises:
            own = pr.gamma if pr.sign is PLUS else pr.delta
            assert pr.atom not in own


@pytest.mark.parametrize("bound", SMALL_BOUNDS + [ExtensionBound(0, 2, 2, 1)], ids=str)
def test_counted_space_matches_built_space(corpus, bound):
    for b in (minimal(), parse_base((corpus / "r1.base").read_text()),
              Base.make([rule("p", PLUS, [premise("q", MINUS, ["p"])]), rule("q", MINUS)])):
        space = Evaluator(b, bound, [p, q]).space
        counted = space._size()
        assert counted == len(space.candidates) == space._size()


def test_bound_explosion_is_unknown():
    bound = ExtensionBound(2, 3, 2, 2, candidate_cap=10)
    v = support(minimal(), (), (), PLUS, Imp(p, q), bound)
    assert isinstance(v, UnknownAtBound)
    assert "exceed the cap" in v.reason
    with pytest.raises(BoundExplosion):
        list(Evaluator(minimal(), bound, [p, q]).space.up(frozenset()))


# -- properties ---------------------------------------------------------------------------

def random_base(seed, atoms=("p", "q")):
    rng = random.Random(seed)
    rules = []
    for _ in range(rng.randint(0, 3)):
        prems = [premise(rng.choice(atoms), rng.choice((PLUS, MINUS)),
                         rng.sample(atoms, rng.choice([0, 1])))
                 for _ in range(rng.choice([0, 1, 1, 2]))]
        rules.append(rule(rng.choice(atoms + ("bot", "top")), rng.choice((PLUS, MINUS)), prems))
    return Base.make(rules, atoms)


def consistent_bases(n, atoms=("p", "q")):
    out = []
    seed = 0
    while len(out) < n:
        b = adequate_closure(random_base(seed, atoms))
        seed += 1
        if not derives(b, (), (), "bot", PLUS) and not derives(b, (), (), "top", MINUS):
            out.append(b)
    return out


def test_atoms_agree_with_derivability():
    for b in consistent_bases(60):
        for a in ("p", "q", "top", "bot"):
            for s in (PLUS, MINUS):
                v = support(b, (), (), s, Atom(a) if a not in ("top", "bot") else
                            (TOP if a == "top" else BOT), ExtensionBound(0, 0, 0, 0))
                assert (v == Supported(True)) == derives(b, (), (), a, s)
                assert isinstance(v, (Supported, Refuted))


def test_witnesses_recheck():
    bound = ExtensionBound(0, 1, 1, 0)
    fs = formulas_up_to("pq", 1)
    seen = 0
    for b in consistent_bases(8):
        uni = b.declared_atoms
        ev = Evaluator(b, bound, universe=uni)
        for f in fs:
            for s in (PLUS, MINUS):
                v = ev.supports((), (), s, f)
                if isinstance(v, Refuted):
                    seen += 1
                    assert recheck_witness(b, v, bound, uni)
    assert seen > 50


def test_upward_monotonicity_on_extension_pairs():
    """Support at a base implies no refutation at any enumerated extension of it.

    The extension is evaluated with one rule less budget, so its extension space sits
    inside the base's space and the two bounded evaluations are comparable.
    """
    big, small = ExtensionBound(0, 2, 1, 0), ExtensionBound(0, 1, 1, 0)
    fs = formulas_up_to("pq", 1)
    pairs = 0
    for b in consistent_bases(3):
        uni = b.declared_atoms
        ev_b = Evaluator(b, big, universe=uni)
        verdicts = {(s, f): ev_b.supports((), (), s, f) for f in fs for s in (PLUS, MINUS)}
        for c in list(enumerate_extensions(b, small, uni))[1:12]:
            pairs += 1
            ev_c = Evaluator(c, small, universe=uni)
            for (s, f), v in verdicts.items():
                if isinstance(v, Supported):
                    assert not isinstance(ev_c.supports((), (), s, f), Refuted), (s, f)
    assert pairs > 10


def test_exclusivity_small_sweep():
    fs = formulas_up_to("pq", 1)
    bound = ExtensionBound(0, 1, 1, 0)
    for b in consistent_bases(10):
        ev = Evaluator(b, bound, universe=b.declared_atoms)
        for f in fs:
            both = [ev.supports((), (), s, f) for s in (PLUS, MINUS)]
            assert not all(v == Supported(True) for v in both), f


def test_inference_with_assumptions():
    b = minimal()
    bound = ExtensionBound(0, 1, 1, 1)
    assert isinstance(support(b, [p], (), PLUS, p, bound), Supported)
    assert isinstance(support(b, (), [p], MINUS, p, bound), Supported)
    assert isinstance(support(b, [p, q], (), PLUS, And(p, q), bound), Supported)
    assert isinstance(support(b, [p], (), PLUS, q, bound), Refuted)


def test_valid_examples():
    assert valid((), [p], PLUS, Imp(p, BOT))
    assert valid([p], (), MINUS, CoImp(TOP, p))
    assert not valid((), (), PLUS, p)
    assert valid((), (), PLUS, Imp(p, p))
    assert not valid((), (), PLUS, parse_formula("p | (p -> bot)"))
