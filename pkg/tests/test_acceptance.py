"""Acceptance criteria, one check per criterion.

Run under pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import hashlib
import json
import random
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from cantorlike.arith import INFINITE, to_digits
from cantorlike.families import (
    SVC,
    GammaSeq,
    GeneralizedSVC,
    KAdic,
    LambdaFat,
    MiddleBeta,
    MiddleBetaSeq,
    Seq,
    Ternary,
    to_two_sequence,
)
from cantorlike.generation import (
    InAllChecked,
    Interval,
    RejectedAt,
    contains,
    digit_member,
    generate,
    generate_direct,
    left_endpoints,
    member_up_to,
    midpoint_decompose,
    nearest_endpoint_distance,
)
from cantorlike.measure import (
    LogRatio,
    box_estimator,
    generation_measure,
    hausdorff_dimension,
    limit_measure,
    removed_mass_partial,
)
from cantorlike.staircase import eval_classic_digit, eval_general, eval_iterative

F = Fraction
TERNARY = Ternary()
GOLDEN = Path(__file__).parent / "golden"

RESULTS: dict[int, tuple[str, bool, str]] = {}


def _rand_unit(rng, max_den):
    q = rng.randint(1, max_den)
    return F(rng.randint(0, q), q)


def golden_generation():
    expected = tuple(Interval(F(a), F(b)) for a, b in [(0, "1/9"), ("2/9", "1/3"), ("2/3", "7/9"), ("8/9", 1)])
    assert generate(TERNARY, 2).intervals == expected


def measure_conservation():
    for spec in (TERNARY, SVC(4), LambdaFat(F(1, 2)), MiddleBeta(F(1, 2)), GeneralizedSVC(F(1, 4), F(1, 4))):
        for n in range(13):
            assert generation_measure(spec, n) + removed_mass_partial(spec, n) == 1


def closed_form_limits():
    assert limit_measure(SVC(4)) == F(1, 2)
    assert abs(generation_measure(SVC(4), 30) - F(1, 2)) <= F(1, 2**25)
    for lam in (F(1, 3), F(1, 2), F(5, 7), F(1)):
        assert limit_measure(LambdaFat(lam)) == 1 - lam
        for k in range(13):
            assert removed_mass_partial(LambdaFat(lam), k) == lam * (1 - F(2, 3) ** k)
    rng = random.Random(2024)
    for _ in range(5):
        a = F(rng.randint(1, 499), 1000)
        b = F(rng.randint(1, 1000), 1000) * (1 - 2 * a)
        assert limit_measure(GeneralizedSVC(a, b)) == 1 - b / (1 - 2 * a)


def embedding_equivalence():
    families = [
        TERNARY,
        SVC(3),
        SVC(4),
        SVC(6),
        LambdaFat(F(1, 2)),
        LambdaFat(F(1)),
        MiddleBeta(F(1, 2)),
        MiddleBeta(F(1, 5)),
        GeneralizedSVC(F(1, 4), F(1, 4)),
        GeneralizedSVC(F(1, 5), F(3, 5)),
        MiddleBetaSeq(Seq.reciprocal_power(1, 2, shift=1)),
        GammaSeq(Seq.geometric(F(1, 4), F(1, 5))),
    ]
    for spec in families:
        for n in range(11):
            assert generate(spec, n).intervals == generate_direct(spec, n).intervals, (spec, n)


def dimension_formulas():
    with mpmath.workdps(40):
        ref = mpmath.log(2) / mpmath.log(3)
        assert abs(hausdorff_dimension(TERNARY).value - ref) <= mpmath.mpf(10) ** -12
    assert hausdorff_dimension(MiddleBeta(F(1, 2))).exact == LogRatio(2, 4)
    assert hausdorff_dimension(MiddleBeta(F(1, 2))).rational() == F(1, 2)
    for spec in (LambdaFat(F(1, 2)), SVC(4), GeneralizedSVC(F(1, 4), F(1, 4))):
        assert limit_measure(spec) > 0
        assert hausdorff_dimension(spec).rational() == 1
    for spec in (TERNARY, MiddleBeta(F(1, 2))):
        assert box_estimator(spec, 12) == hausdorff_dimension(spec).exact


def cantor_function_triple():
    rng = random.Random(6)
    for _ in range(1000):
        x = _rand_unit(rng, 10**4)
        g = eval_classic_digit(x).value
        assert abs(eval_iterative(x, 20).value - g) <= F(1, 2**20)
        r = eval_general(TERNARY, x, 20)
        assert abs(r.value - g) <= F(1, 2**20)
    assert eval_classic_digit(F(1, 4)).value == F(1, 3)


def functional_identities():
    G = lambda x: eval_classic_digit(x).value  # noqa: E731
    rng = random.Random(7)
    for _ in range(1000):
        x = _rand_unit(rng, 10**4)
        assert G(x / 3) == G(x) / 2
        assert G(1 - x) == 1 - G(x)
    count = 0
    for n in range(1, 9):
        for t in left_endpoints(TERNARY, n - 1):
            assert G(t + F(1, 3**n)) == G(t + F(2, 3**n))
            count += 1
    assert count == 255
    for spec in (MiddleBeta(F(1, 2)), GeneralizedSVC(F(1, 4), F(1, 4))):
        two = to_two_sequence(spec)
        for n in range(7):
            for t in left_endpoints(spec, n):
                lhs = eval_general(spec, t + two.c(n + 1), 10)
                rhs = eval_general(spec, t + two.r(n + 1), 10)
                assert lhs.exact and rhs.exact and lhs.value == rhs.value


def membership_oracle():
    rng = random.Random(8)
    kd = KAdic(3, frozenset({0, 2}))
    for _ in range(200):
        q = rng.randint(1, 10**4)
        x = F(rng.randint(0, q), q)
        d = to_digits(x, 3, INFINITE)
        depth = 40 + len(d.prefix) + len(d.period)
        res = member_up_to(TERNARY, x, depth)
        if digit_member(kd, x):
            assert res == InAllChecked(depth)
        else:
            assert isinstance(res, RejectedAt) and res.step <= depth


def midpoint_property():
    rng = random.Random(9)
    g20 = generate(TERNARY, 20)
    for _ in range(500):
        q = rng.randint(2, 10**4)
        y = F(rng.randint(1, q - 1), q)
        x1, x2 = midpoint_decompose(y, 20)
        assert contains(g20, x1) and contains(g20, x2)
        assert abs((x1 + x2) / 2 - y) <= F(1, 3**20)


def accumulation():
    rng = random.Random(10)
    g15 = generate(TERNARY, 15)
    for _ in range(100):
        iv = rng.choice(g15.intervals)
        x = iv.lo + iv.length * F(rng.randint(0, 997), 997)
        for n in range(16):
            assert nearest_endpoint_distance(TERNARY, x, n) <= F(1, 3**n)


CLI_RUNS = [
    ["validate", "ternary"],
    ["generate", "ternary", "--depth", "2"],
    ["endpoints", "ternary", "--depth", "3"],
    ["measure", "svc4", "--depth", "6"],
    ["dimension", "ternary"],
    ["boxdim", "ternary", "--depth", "8"],
    ["member", "ternary", "--x", "1/4"],
    ["midpoint", "--y", "1/5"],
    ["feval", "ternary", "--x", "1/4"],
    ["fsample", "ternary", "--samples", "11", "--depth", "12"],
    ["render", "ternary", "--depth", "4"],
    ["render", "ternary", "--mode", "staircase", "--depth", "3", "--samples", "129"],
]
GOLDEN_FROM = {
    "ternary_gen2.json": 1,
    "svc4_measure6.json": 3,
    "ternary_fsample11.csv": 9,
    "ternary_bars4.svg": 10,
    "ternary_staircase3.svg": 11,
}


def cli_determinism():
    outputs = []
    for args in CLI_RUNS:
        runs = [subprocess.run([sys.executable, "-m", "cantorlike", *args], capture_output=True) for _ in range(2)]
        assert runs[0].returncode == runs[1].returncode == 0, args
        assert runs[0].stdout == runs[1].stdout, args
        outputs.append(runs[0].stdout)
    sums = json.loads((GOLDEN / "SHA256SUMS.json").read_text())
    for name, idx in GOLDEN_FROM.items():
        assert hashlib.sha256(outputs[idx]).hexdigest() == sums[name], name
        assert hashlib.sha256((GOLDEN / name).read_bytes()).hexdigest() == sums[name], name


CRITERIA = [
    (1, "golden generation C_2", golden_generation),
    (2, "measure conservation", measure_conservation),
    (3, "closed-form limit measures", closed_form_limits),
    (4, "embedding equivalence", embedding_equivalence),
    (5, "dimension formulas", dimension_formulas),
    (6, "Cantor function triple agreement", cantor_function_triple),
    (7, "exact functional identities", functional_identities),
    (8, "membership differential oracle", membership_oracle),
    (9, "midpoint property", midpoint_property),
    (10, "endpoint accumulation (finite form)", accumulation),
    (11, "CLI determinism and golden hashes", cli_determinism),
]


def _record(number, title, fn):
    try:
        fn()
    except BaseException as exc:
        RESULTS[number] = (title, False, f"{type(exc).__name__}: {exc}"[:200])
        raise
    RESULTS[number] = (title, True, "")


def format_results() -> list[str]:
    lines = []
    for number, title, _ in CRITERIA:
        if number in RESULTS:
            _, ok, why = RESULTS[number]
            lines.append(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({why})" if why else ""))
        else:
            lines.append(f"criterion {number:2d} SKIP  {title}")
    return lines


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn):
    _record(number, title, fn)
    print(format_results()[number - 1])


if __name__ == "__main__":
    failed = 0
    for number, title, fn in CRITERIA:
        try:
            _record(number, title, fn)
        except BaseException:
            failed += 1
        print(format_results()[number - 1], flush=True)
    sys.exit(1 if failed else 0)
