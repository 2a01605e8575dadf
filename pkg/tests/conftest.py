import itertools
from pathlib import Path

import pytest

from sftlab.groups import parse_grp

CORPUS = Path(__file__).resolve().parents[1] / "src" / "sftlab" / "corpus"
SPECS = CORPUS / "specs"
GROUPS = CORPUS / "groups"

# (criterion, passed, detail) collected by the acceptance tests
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    def record(number, passed, detail=""):
        ACCEPTANCE_LINES.append((number, passed, detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def shipped_groups():
    return {p.stem: parse_grp(p.read_text()) for p in sorted(GROUPS.glob("*.grp"))}


def all_subgroups(G):
    """Every subgroup of a small finite group, by closure check over all subsets."""
    others = [g for g in G.elements() if not G.is_identity(g)]
    out = []
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            S = set(combo) | {G.identity()}
            if all(G.mul(a, b) in S for a in S for b in S):
                out.append(tuple(sorted(S)))
    return out
