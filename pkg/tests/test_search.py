import itertools

import pytest

from bpr.calculus import check_derivation, open_premises
from bpr.rewrite import check_subformula_property, maximal_segments, normalize
from bpr.search import decide, prove
from bpr.syntax import MINUS, PLUS, Atom, expand_strong_negation, parse_formula, StrongNeg
from oracles import brute_decide, closure_lfp, formulas_up_to

F = parse_formula
p = Atom("p")


@pytest.mark.parametrize("gamma, delta, sign, goal, want", [
    ((), (), PLUS, "p -> p", True),
    ((), (), MINUS, "top <- top", True),
    ((), (), PLUS, "bot", False),
    ((), (), MINUS, "top", False),
    ((), (), PLUS, "p", False),
    ((), ("p",), PLUS, "p -> bot", True),
    (("p",), (), MINUS, "top <- p", True),
    ((), ("p",), PLUS, "~p", True),
    (("p",), (), MINUS, "~p", True),
    ((), (), PLUS, "p | (p -> bot)", False),
    ((), (), PLUS, "(p & q) -> (q & p)", True),
    (("p | q",), (), PLUS, "q | p", True),
    ((), ("p & q",), MINUS, "q & p", True),
])
def test_decide_examples(gamma, delta, sign, goal, want):
    g, d = [F(x) for x in gamma], [F(x) for x in delta]
    assert decide(g, d, sign, F(goal)) is want


def check_certificate(gamma, delta, sign, goal):
    cert = prove(gamma, delta, sign, goal)
    assert cert is not None
    d = cert.derivation
    rep = check_derivation(d)
    assert rep.valid and d.sign is sign and d.formula == goal
    g, dl = open_premises(d)
    assert g <= set(gamma) and dl <= set(delta)
    assert check_subformula_property(d)
    assert maximal_segments(d) == []
    out, trace = normalize(d)
    assert len(trace) == 0 and out == d
    return d


def test_weak_provability_certificate_matches_the_displayed_tree(corpus):
    from bpr.calculus import relabel
    from bpr.fileformat import parse_derivation
    d = check_certificate([p], [], MINUS, F("top <- p"))
    want = parse_derivation((corpus / "weak-provability.drv").read_text())
    assert relabel(d) == relabel(want)


def test_strong_negation_certificates():
    neg = expand_strong_negation(StrongNeg(p))
    check_certificate([], [p], PLUS, neg)
    check_certificate([p], [], MINUS, neg)


def test_consistency_pair():
    assert prove([], [], PLUS, F("bot")) is None
    assert prove([], [], MINUS, F("top")) is None


@pytest.mark.parametrize("atom", ["p", "q", "top <- top", "bot"])
def test_no_closed_proof_of_atoms_despite_pr(atom):
    f = F(atom)
    if f.children():
        return
    assert not decide([], [], PLUS, f)


def test_bot_axiom_flag():
    assert decide([], [], MINUS, F("bot"))
    assert not decide([], [], MINUS, F("bot"), bot_axiom=False)
    assert decide([], [], MINUS, F("bot & p"))
    assert not decide([], [], MINUS, F("bot & p"), bot_axiom=False)


def sequents(goal_degree, ctx_degree):
    goals = formulas_up_to("pq", goal_degree)
    ctx = formulas_up_to("pq", ctx_degree)
    for goal in goals:
        for sign in (PLUS, MINUS):
            yield (), (), sign, goal
            for c in ctx:
                yield (c,), (), sign, goal
                yield (), (c,), sign, goal


def test_agrees_with_brute_force_on_small_sequents():
    for gamma, delta, sign, goal in sequents(1, 1):
        assert decide(gamma, delta, sign, goal) == brute_decide(gamma, delta, sign, goal, 8), \
            (gamma, delta, sign, goal)


def test_agrees_with_unrestricted_closure_fixpoint():
    # every rule allowed, no normal-form restriction: the subformula property says the
    # answers coincide
    for gamma, delta, sign, goal in itertools.islice(sequents(2, 0), 0, None, 3):
        assert decide(gamma, delta, sign, goal) == closure_lfp(gamma, delta, sign, goal)


def test_certificates_for_small_sequents():
    n = 0
    for gamma, delta, sign, goal in sequents(1, 1):
        if decide(gamma, delta, sign, goal):
            check_certificate(gamma, delta, sign, goal)
            n += 1
    assert n > 50
