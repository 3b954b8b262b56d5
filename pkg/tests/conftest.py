import random
import sys
from fractions import Fraction

import pytest


def random_rationals(seed, count, max_den=10**6, lo=0, hi=1):
    """Seeded random rationals in [lo, hi] with denominator at most ``max_den``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        q = rng.randint(1, max_den)
        p = rng.randint(0, q)
        out.append(lo + (hi - lo) * Fraction(p, q))
    return out


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.format_results():
        terminalreporter.write_line(line)
