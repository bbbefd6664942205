"""The command line, driven through main() on the shipped corpus."""

import pytest

from bpr.calculus import check_derivation
from bpr.cli import BAD, NO, OK, main
from bpr.fileformat import (
    format_base, format_derivation, format_mapping, parse_base,
    parse_derivation, parse_mapping,
)
from bpr.rewrite import check_subformula_property, normalize


def line_end(text):
    return text if text.endswith("\n") else text + "\n"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check_weak_falsity(capsys, corpus):
    code, out, _ = run(capsys, "check", corpus / "weak-falsity.drv")
    assert code == OK
    assert out.strip() == "VALID  ∅; {p} ⊢+ p -> bot"


def test_check_every_corpus_derivation(capsys, corpus):
    for f in sorted(corpus.glob("*.drv")):
        code, out, _ = run(capsys, "check", f)
        assert code == OK and out.startswith("VALID"), f


def test_check_atomic_needs_base(capsys, corpus):
    code, _, err = run(capsys, "check", corpus / "simulation.adrv")
    assert code == BAD and "needs --base" in err
    code, out, _ = run(capsys, "check", corpus / "simulation.adrv",
                       "--base", corpus / "simulation.base", "--raw")
    assert code == OK and out.strip() == "VALID  ∅; ∅ ⊢+ s_7020262070"


def test_check_subformula_flag(capsys, corpus):
    code, out, _ = run(capsys, "check", corpus / "counterexample.drv", "--subformula")
    assert code == NO and "SUBFORMULA PROPERTY FAILS" in out
    code, _, _ = run(capsys, "check", corpus / "weak-falsity.drv", "--subformula")
    assert code == OK


def test_check_without_bot_axiom(capsys, tmp_path):
    f = tmp_path / "ax.drv"
    f.write_text("(rule bot-ax (concl - bot))\n")
    assert run(capsys, "check", f)[0] == OK
    code, out, _ = run(capsys, "check", f, "--no-bot-axiom")
    assert code == NO and out.startswith("INVALID")


def test_prove_bot_fails(capsys):
    code, out, _ = run(capsys, "prove", "--sign", "+", "--goal", "bot")
    assert code == NO and out.strip() == "NOT DERIVABLE"
    code, out, _ = run(capsys, "refute", "--goal", "top")
    assert code == NO and out.strip() == "NOT DERIVABLE"


def test_prove_writes_a_checkable_certificate(capsys, tmp_path):
    out_file = tmp_path / "cert.drv"
    code, out, _ = run(capsys, "prove", "--sign", "+", "--goal", "p -> bot", "--delta", "p",
                       "-o", out_file)
    assert code == OK and out.strip() == "DERIVABLE  ∅; {p} ⊢+ p -> bot"
    code, out, _ = run(capsys, "check", out_file, "--subformula")
    assert code == OK and out.strip() == "VALID  ∅; {p} ⊢+ p -> bot"


def test_refute_prints_certificate(capsys):
    code, out, _ = run(capsys, "refute", "--goal", "top <- p", "--gamma", "p")
    assert code == OK
    head, body = out.split("\n", 1)
    assert head == "DERIVABLE  {p}; ∅ ⊢- top <- p"
    assert check_derivation(parse_derivation(body)).valid


def test_normalize_detour(capsys, corpus, tmp_path):
    out_file = tmp_path / "out.drv"
    code, out, _ = run(capsys, "normalize", corpus / "detour.drv", "-o", out_file)
    assert code == OK and out.startswith("NORMALIZED  {bot}; ∅ ⊢- top")
    code, out, _ = run(capsys, "check", out_file, "--subformula")
    assert code == OK and out.strip() == "VALID  {bot}; ∅ ⊢- top"


def test_normalize_trace(capsys, corpus):
    code, out, _ = run(capsys, "normalize", corpus / "detour.drv", "--trace")
    assert code == OK
    lines = out.splitlines()
    assert lines[0].startswith("step 1 ")
    assert check_derivation(parse_derivation("\n".join(
        x for x in lines if not x.startswith("step")))).valid


def test_normalize_rejects_invalid(capsys, tmp_path):
    f = tmp_path / "bad.drv"
    f.write_text("(rule and+i (concl + p & q) (hyp + 0 p))\n")
    code, out, _ = run(capsys, "normalize", f)
    assert code == NO and out.startswith("INVALID")


def test_support_and_witness(capsys, corpus, tmp_path):
    code, out, _ = run(capsys, "support", corpus / "r1.base", "--sign", "+",
                       "--goal", "p -> bot")
    assert code == OK and out.strip() == "SUPPORTED(bounded)"
    w = tmp_path / "w.base"
    code, out, _ = run(capsys, "support", corpus / "r1.base", "--sign", "+", "--goal", "q -> bot",
                       "--max-premises", "0", "--max-discharge", "0", "-o", w)
    assert code == NO and out.startswith("REFUTED")
    wb = parse_base(w.read_text())
    assert any(r.atom == "q" and not r.premises for r in wb.rules)


def test_support_raw_requires_adequacy(capsys, corpus):
    code, _, err = run(capsys, "support", corpus / "r1.base", "--sign", "+", "--goal", "p",
                       "--raw")
    assert code == BAD and "adequate" in err


def test_base_adequacy(capsys, corpus):
    code, out, _ = run(capsys, "base-adequacy", corpus / "r1.base")
    assert code == OK and out.splitlines()[-1] == "ADEQUATE"
    code, out, _ = run(capsys, "base-adequacy", corpus / "r1.base", "--raw")
    assert code == NO
    assert out.splitlines() == ["logically consistent: yes", "unit complete: no",
                                "epistemically consistent: no", "NOT ADEQUATE"]


def test_base_derive(capsys, corpus):
    code, out, _ = run(capsys, "base-derive", corpus / "r1.base", "--sign", "+", "--atom", "bot",
                       "--assume", "p")
    assert code == OK and out.splitlines()[0] == "DERIVABLE  {p}; ∅ ⊢+ bot"
    code, out, _ = run(capsys, "base-derive", corpus / "r1.base", "--sign", "-", "--atom", "p")
    assert code == NO and out.strip() == "NOT DERIVABLE"


def test_simulate_then_translate(capsys, corpus, tmp_path):
    prefix = tmp_path / "sim"
    code, out, _ = run(capsys, "simulate", "--formulas", "p -> p & p", "--gamma", "p", "-o", prefix)
    assert code == OK and out.strip() == "SIMULATION  3 formulas, 91 rules"
    base_text = (tmp_path / "sim.base").read_text()
    map_text = (tmp_path / "sim.map").read_text()
    assert parse_base(base_text) == parse_base((corpus / "simulation.base").read_text())
    assert parse_mapping(map_text) == parse_mapping((corpus / "simulation.map").read_text())

    code, out, _ = run(capsys, "translate", "to-bpr", corpus / "simulation.adrv",
                       "--map", tmp_path / "sim.map", "--base", tmp_path / "sim.base")
    assert code == OK
    head, body = out.split("\n", 1)
    assert head == "VALID  {p}; ∅ ⊢+ p & p"
    d = tmp_path / "x.drv"
    d.write_text(body)
    code, out, _ = run(capsys, "translate", "from-bpr", d, "--map", tmp_path / "sim.map")
    assert code == OK and out.startswith("VALID  {p}; ∅ ⊢+ s_7020262070")


def test_random_output_checks(capsys, tmp_path):
    code, out, _ = run(capsys, "random", "--seed", "7", "--size", "20", "--atoms", "p,q")
    assert code == OK
    f = tmp_path / "r.drv"
    f.write_text(out)
    assert run(capsys, "check", f)[0] == OK


@pytest.mark.parametrize("text,where", [
    ("(rule and+i (concl + p &)\n", "1:1"),
    ("(rule and+i (concl + p & q)\n  (hyp + 0 p)\n  (hyp + 0 q)))\n", "3:"),
])
def test_bad_input_reports_position(capsys, tmp_path, text, where):
    f = tmp_path / "bad.drv"
    f.write_text(text)
    code, out, err = run(capsys, "check", f)
    assert code == BAD and not out
    assert err.startswith("error: ") and where in err


def test_bad_formula_reports_column(capsys):
    code, _, err = run(capsys, "prove", "--sign", "+", "--goal", "p &")
    assert code == BAD and "column 4" in err


def test_missing_file_and_bad_flags(capsys):
    assert run(capsys, "check", "/no/such/file.drv")[0] == BAD
    assert run(capsys, "prove", "--sign", "*", "--goal", "p")[0] == BAD
    assert run(capsys, "--help")[0] == OK


def test_emitted_files_round_trip(capsys, corpus, tmp_path):
    out_file = tmp_path / "n.drv"
    run(capsys, "normalize", corpus / "counterexample.drv", "-o", out_file)
    text = out_file.read_text()
    d = parse_derivation(text)
    assert line_end(format_derivation(d)) == text
    expected, _ = normalize(parse_derivation((corpus / "counterexample.drv").read_text()))
    assert d == expected and check_subformula_property(d)

    prefix = tmp_path / "s"
    run(capsys, "simulate", "--formulas", "p | q, q <- p", "--delta", "p", "-o", prefix)
    base_text = (tmp_path / "s.base").read_text()
    map_text = (tmp_path / "s.map").read_text()
    assert line_end(format_base(parse_base(base_text))) == base_text
    assert line_end(format_mapping(parse_mapping(map_text))) == map_text


def test_translate_rejects_invalid_atomic(capsys, corpus, tmp_path):
    bad = tmp_path / "bad.adrv"
    bad.write_text("(arule imp+e:s_70202d3e207020262070 (concl + s_7020262070)\n"
                   "  (ahyp + p))\n")
    code, out, _ = run(capsys, "translate", "to-bpr", bad, "--map", corpus / "simulation.map",
                       "--base", corpus / "simulation.base")
    assert code == NO
    assert out.startswith("INVALID") and "has 2 premises, got 1" in out
