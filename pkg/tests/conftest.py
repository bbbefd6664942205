import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from bpr.syntax import BOT, TOP, And, Atom, CoImp, Imp, Or  # noqa: E402

CORPUS = HERE.parent / "corpus"

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def formulas(atoms="pqr", units=True, max_leaves=12):
    leaves = [Atom(a) for a in atoms] + ([TOP, BOT] if units else [])
    return st.recursive(
        st.sampled_from(leaves),
        lambda sub: st.builds(lambda c, a, b: c(a, b),
                              st.sampled_from([And, Or, Imp, CoImp]), sub, sub),
        max_leaves=max_leaves)


@pytest.fixture
def corpus():
    return CORPUS


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
