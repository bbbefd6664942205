import random

import pytest
from hypothesis import given, strategies as st

from bpr.bases import (
    ALeaf, ANode, Base, adequate_closure, atomic_depth, check_atomic_derivation,
    close_epistemic, derivable_literals, derivation_of, derives, epistemic_rules, extends,
    is_epistemically_adequate, is_epistemically_consistent, is_logically_consistent,
    is_unit_complete, premise, rule, unit_rules,
)
from bpr.fileformat import parse_base
from bpr.syntax import MINUS, PLUS
from oracles import brute_derives

SIGNS = (PLUS, MINUS)


def random_base(seed, atoms=("a", "b", "c", "d"), max_rules=6):
    rng = random.Random(seed)
    rules = []
    for _ in range(rng.randint(0, max_rules)):
        prems = []
        for _ in range(rng.choice([0, 0, 1, 1, 2])):
            gamma = rng.sample(atoms, rng.choice([0, 0, 1]))
            delta = rng.sample(atoms, rng.choice([0, 0, 1]))
            prems.append(premise(rng.choice(atoms), rng.choice(SIGNS), gamma, delta))
        rules.append(rule(rng.choice(atoms), rng.choice(SIGNS), prems))
    return Base.make(rules, atoms)


def test_extends():
    b = Base.make([rule("a", PLUS)])
    r = rule("b", MINUS)
    assert extends(b, b)
    assert extends(b.with_rules([r]), b)
    assert not extends(b, b.with_rules([r]))


def test_two_rule_chain():
    b = Base.make([rule("a", PLUS), rule("c", PLUS, [premise("a", PLUS)])])
    assert derives(b, (), (), "c", PLUS)


def test_r1_base_has_no_refutation_of_p(corpus):
    b = parse_base((corpus / "r1.base").read_text())
    assert not derives(b, (), (), "p", MINUS)
    assert derives(b, ["p"], (), "bot", PLUS)


def test_discharging_premise():
    b = Base.make([rule("s", PLUS, [premise("r", PLUS, gamma=["q"])]),
                   rule("r", PLUS, [premise("q", PLUS)])])
    assert derives(b, (), (), "s", PLUS)
    assert not derives(b, (), (), "r", PLUS)
    d = derivation_of(b, (), (), "s", PLUS)
    rep = check_atomic_derivation(d, b)
    assert rep.valid and str(rep) == "VALID  ∅; ∅ ⊢+ s"


def test_epistemic_closure():
    empty = Base.make([], ["p"])
    closed = close_epistemic(empty, {"p", "top", "bot"})
    assert len(closed.rules) == 6
    assert close_epistemic(closed, {"p", "top", "bot"}).rules == closed.rules
    both = close_epistemic(Base.make([rule("p", PLUS), rule("p", MINUS)]))
    assert derives(both, (), (), "bot", PLUS)
    assert not is_logically_consistent(both)


def test_adequacy_predicates():
    minimal = adequate_closure(Base.make())
    assert is_epistemically_adequate(minimal)
    assert is_unit_complete(minimal) and is_epistemically_consistent(minimal)
    no_top = Base.make([unit_rules()[1]])
    assert not is_unit_complete(no_top)
    assert not is_epistemically_consistent(Base.make([], ["p"]))
    assert not is_epistemically_consistent(minimal, {"p"})


def test_atomic_checker_reports_problems():
    r = rule("q", PLUS, [premise("p", PLUS)], name="r")
    good = ANode(r, "q", PLUS, (ALeaf("p", PLUS),))
    rep = check_atomic_derivation(good)
    assert rep.valid and str(rep.end) == "{p}; ∅ ⊢+ q"
    assert not check_atomic_derivation(good, Base.make()).valid
    assert not check_atomic_derivation(ANode(r, "q", MINUS, (ALeaf("p", PLUS),))).valid
    assert not check_atomic_derivation(ANode(r, "q", PLUS, (ALeaf("p", MINUS),))).valid
    assert not check_atomic_derivation(ANode(r, "q", PLUS, ())).valid


def test_leaf_discharged_by_premise_context():
    r = rule("s", PLUS, [premise("q", PLUS, gamma=["q"])], name="r")
    rep = check_atomic_derivation(ANode(r, "s", PLUS, (ALeaf("q", PLUS),)))
    assert rep.valid and not rep.end.gamma


@pytest.mark.parametrize("seed", range(300))
def test_saturation_agrees_with_bounded_enumeration(seed):
    b = random_base(seed)
    rng = random.Random(seed)
    S = rng.sample(["a", "b"], rng.randint(0, 1))
    T = rng.sample(["c", "d"], rng.randint(0, 1))
    for a in ("a", "b", "c", "d"):
        for s in SIGNS:
            exact = derives(b, S, T, a, s)
            assert brute_derives(b, S, T, a, s, depth=6) <= exact
            if exact:
                d = derivation_of(b, S, T, a, s)
                rep = check_atomic_derivation(d, b)
                assert rep.valid and rep.end.sign is s
                assert {str(x) for x in rep.end.gamma} <= set(S)
                assert {str(x) for x in rep.end.delta} <= set(T)
                # the certificate's depth is a witness for the bounded search
                assert brute_derives(b, S, T, a, s, depth=atomic_depth(d))


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_monotone_in_rules_and_hypotheses(seed1, seed2):
    b = random_base(seed1)
    c = b.with_rules(random_base(seed2).rules)
    before = derivable_literals(b)
    assert before <= derivable_literals(c)
    assert before <= derivable_literals(b, ["a"], ["b"])


@given(st.integers(0, 10**6))
def test_exclusivity_at_atoms(seed):
    b = adequate_closure(random_base(seed))
    if not is_logically_consistent(b):
        return
    lits = derivable_literals(b)
    for a in b.declared_atoms:
        assert not ((a, PLUS) in lits and (a, MINUS) in lits)
    assert ("top", PLUS) in lits and ("bot", MINUS) in lits


def test_epistemic_rule_names():
    plus, minus = epistemic_rules("p")
    assert (plus.atom, plus.sign, minus.atom, minus.sign) == ("bot", PLUS, "top", MINUS)
