import re
from fractions import Fraction
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_ROW = re.compile(r"^([+-]?[\d. ]+?) x 10\^\{(-?\d+)\}$")


def _literal(text: str) -> str:
    m = _ROW.match(text.strip())
    assert m, text
    return m.group(1).replace(" ", "") + "e" + m.group(2)


def load_tables():
    """{order: {name: (re_literal, im_literal)}} from the printed-table transcription."""
    out = {}
    for line in (FIXTURES / "tables.txt").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        head, re_part, im_part = [p.strip() for p in line.split("|")]
        order, name = head.split()
        out.setdefault(int(order), {})[name] = (_literal(re_part), _literal(im_part))
    return out


@pytest.fixture(scope="session")
def tables():
    return load_tables()


def exact_r(table: dict, x) -> Fraction:
    """r(x) in exact rational arithmetic straight from the table literals."""
    x = Fraction(x)
    total = Fraction(table["alpha0"][0])
    j = 1
    while f"theta{j}" in table:
        tr, ti = (Fraction(v) for v in table[f"theta{j}"])
        ar, ai = (Fraction(v) for v in table[f"alpha{j}"])
        dr = x - tr
        total += 2 * (ar * dr - ai * ti) / (dr * dr + ti * ti)
        j += 1
    return total


# One pass/fail line per acceptance criterion, printed at the end of the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
