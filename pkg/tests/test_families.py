import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorlike.errors import NotEmbeddable, SpecParseError, ValidationError
from cantorlike.families import (
    SVC,
    Custom,
    GammaSeq,
    GeneralizedSVC,
    KAdic,
    LambdaFat,
    MiddleBeta,
    MiddleBetaSeq,
    Rescaling,
    Seq,
    SubdivisionTemplate,
    Ternary,
    TwoSequenceSpec,
    gsvc_c_closed,
    r_sequence,
    spec_from_json,
    to_two_sequence,
    validate,
)

F = Fraction


def c_seq(spec, n):
    two = to_two_sequence(spec)
    return [two.c(j) for j in range(n + 1)]


def k_seq(spec, n):
    two = to_two_sequence(spec)
    return [two.k(j) for j in range(1, n + 1)]


def removal_recursion(first_gap, n):
    """c_n from the direct removal description: c_j = (c_{j-1} - gap(j)) / 2."""
    c = [F(1)]
    for j in range(1, n + 1):
        c.append((c[-1] - first_gap(j)) / 2)
    return c


# ---- validation


def test_gsvc_one_third_is_valid():
    validate(GeneralizedSVC(F(1, 3), F(1, 3)))


def test_gsvc_alpha_half_rejected():
    with pytest.raises(ValidationError) as info:
        validate(GeneralizedSVC(F(1, 2), F(1, 4)))
    assert info.value.constraint == "0 < alpha < 1/2"


def test_gsvc_beta_too_large_rejected():
    with pytest.raises(ValidationError) as info:
        validate(GeneralizedSVC(F(1, 4), F(3, 4)))
    assert "beta" in info.value.constraint


def test_svc2_rejected():
    with pytest.raises(ValidationError) as info:
        validate(SVC(2))
    assert info.value.constraint == "n >= 3"


@pytest.mark.parametrize(
    "spec",
    [
        LambdaFat(F(0)),
        LambdaFat(F(3, 2)),
        MiddleBeta(F(0)),
        MiddleBeta(F(1)),
        KAdic(5, frozenset({1, 4})),
        KAdic(5, frozenset({0, 1, 2, 3, 4})),
        KAdic(2, frozenset({0, 1})),
        Rescaling(SubdivisionTemplate((F(1, 3), F(1, 3)), (F(1, 2),))),
        Rescaling(SubdivisionTemplate((F(1, 2),), ())),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(ValidationError):
        validate(spec)


def test_gamma_seq_infeasible_reports_step():
    # gamma_0 = 1/2 leaves 1/4 per side; gamma_1 = 1/4 swallows it.
    spec = GammaSeq(Seq.from_table([F(1, 2), F(1, 4), F(1, 100)]))
    with pytest.raises(ValidationError) as info:
        validate(spec, depth=3)
    assert info.value.step == 2
    assert info.value.report()["constraint"] == "gamma_{n-1} < L_{n-1}"


def test_custom_violating_k_c_constraint():
    bad = TwoSequenceSpec(Seq.constant(2, start=1), Seq.from_table([1, F(1, 2)]))
    with pytest.raises(ValidationError) as info:
        validate(Custom(bad), depth=1)
    assert info.value.constraint == "0 < k_n*c_n < c_{n-1}"


def test_table_too_short_fails_validation():
    spec = MiddleBetaSeq(Seq.from_table([F(1, 2), F(1, 3)], start=1))
    validate(spec, depth=2)
    with pytest.raises(ValidationError):
        validate(spec, depth=3)


# ---- embeddings


def test_ternary_embedding():
    assert c_seq(Ternary(), 5) == [F(1, 3**n) for n in range(6)]
    assert r_sequence(Ternary(), 2) == F(2, 9)
    assert all(r_sequence(Ternary(), n) == F(2, 3**n) for n in range(1, 10))


def test_middle_beta_first_step():
    beta = F(2, 7)
    assert to_two_sequence(MiddleBeta(beta)).c(1) == (1 - beta) / 2
    assert r_sequence(MiddleBeta(F(1, 2)), 1) == F(3, 4)


def test_custom_r1():
    c1 = F(2, 9)
    two = TwoSequenceSpec(Seq.constant(2, start=1), Seq.from_table([1, c1]))
    assert r_sequence(two, 1) == 1 - c1


@pytest.mark.parametrize("spec", [KAdic(3, frozenset({0, 2})), Rescaling(SubdivisionTemplate((F(1, 4), F(1, 2)), (F(1, 4),)))])
def test_not_embeddable(spec):
    with pytest.raises(NotEmbeddable):
        to_two_sequence(spec)


def test_kn_equals_two_for_named_families():
    for spec in (Ternary(), SVC(5), LambdaFat(F(1, 2)), MiddleBeta(F(1, 3)), GeneralizedSVC(F(1, 4), F(1, 4))):
        assert k_seq(spec, 8) == [2] * 8


@pytest.mark.parametrize("n", [3, 4, 5, 7, 10])
def test_svc_against_removal(n):
    assert c_seq(SVC(n), 12) == removal_recursion(lambda j: F(1, n**j), 12)


@pytest.mark.parametrize("lam", [F(1, 5), F(1, 2), F(1)])
def test_lambda_fat_against_removal(lam):
    assert c_seq(LambdaFat(lam), 12) == removal_recursion(lambda j: lam / 3**j, 12)


def test_gsvc_closed_form_second_step():
    # left interval of the second generation is [0, (1-beta)/4 - alpha*beta/2]
    a, b = F(1, 5), F(2, 5)
    c2 = gsvc_c_closed(a, b, 2)
    assert c2 == F(1, 4) * (1 - b) - F(1, 2) * a * b


def _gsvc_r_closed(a, b, n):
    return F(1, 2**n) * (1 - b) - a * b / (1 - 2 * a) * (F(1, 2 ** (n - 1)) - (1 - a) * a ** (n - 2))


def test_gsvc_r_sequence_closed_form():
    for a, b in [(F(1, 4), F(1, 4)), (F(1, 5), F(1, 3)), (F(1, 3), F(1, 3))]:
        for n in range(1, 10):
            assert r_sequence(GeneralizedSVC(a, b), n) == _gsvc_r_closed(a, b, n)


def _random_gsvc(rng):
    a = F(rng.randint(1, 99), 200)
    b = F(rng.randint(1, 1000), 1000) * (1 - 2 * a)
    return a, b


def test_gsvc_against_removal_random():
    rng = random.Random(3)
    for _ in range(20):
        a, b = _random_gsvc(rng)
        assert c_seq(GeneralizedSVC(a, b), 15) == removal_recursion(lambda j: a ** (j - 1) * b, 15)


def test_gsvc_specializations():
    for lam in (F(1, 4), F(1, 2), F(1)):
        assert c_seq(GeneralizedSVC(F(1, 3), lam / 3), 12) == c_seq(LambdaFat(lam), 12)
    for beta in (F(1, 3), F(1, 2), F(4, 5)):
        assert c_seq(GeneralizedSVC((1 - beta) / 2, beta), 12) == c_seq(MiddleBeta(beta), 12)
    for n in (3, 4, 6):
        assert c_seq(GeneralizedSVC(F(1, n), F(1, n)), 12) == c_seq(SVC(n), 12)
    assert c_seq(GeneralizedSVC(F(1, 3), F(1, 3)), 12) == c_seq(Ternary(), 12)


def test_gamma_seq_specializations():
    depth = 12
    assert c_seq(GammaSeq(Seq.geometric(F(1, 3), F(1, 3))), depth) == c_seq(Ternary(), depth)
    lam = F(2, 5)
    assert c_seq(GammaSeq(Seq.geometric(lam / 3, F(1, 3))), depth) == c_seq(LambdaFat(lam), depth)
    assert c_seq(GammaSeq(Seq.geometric(F(1, 5), F(1, 5))), depth) == c_seq(SVC(5), depth)
    a, b = F(1, 4), F(1, 3)
    # each of the 2^j intervals loses alpha^j * beta at step j + 1
    assert c_seq(GammaSeq(Seq.geometric(b, a)), depth) == c_seq(GeneralizedSVC(a, b), depth)
    # (2 alpha)^j beta is the total removed at that step, not the per-interval length
    assert c_seq(GammaSeq(Seq.geometric(b, 2 * a)), depth) != c_seq(GeneralizedSVC(a, b), depth)


def test_middle_beta_seq_constant_matches_middle_beta():
    beta = F(2, 5)
    assert c_seq(MiddleBetaSeq(Seq.constant(beta, start=1)), 10) == c_seq(MiddleBeta(beta), 10)


def test_two_sequence_count_and_h():
    two = TwoSequenceSpec(Seq.from_function(lambda n: 2 + n % 2, start=1), Seq.geometric(1, F(1, 7)))
    validate(Custom(two), depth=6)
    assert two.count(4) == 3 * 2 * 3 * 2
    assert two.h(4) == F(1, 36)


# ---- serialization


ROUND_TRIP = [
    Ternary(),
    SVC(4),
    LambdaFat(F(1, 2)),
    MiddleBeta(F(1, 3)),
    GeneralizedSVC(F(1, 4), F(1, 4)),
    MiddleBetaSeq(Seq.reciprocal_power(1, 2, shift=1)),
    MiddleBetaSeq(Seq.from_table([F(1, 2), F(1, 3)], start=1)),
    GammaSeq(Seq.geometric(F(1, 3), F(1, 3))),
    KAdic(5, frozenset({0, 2, 4})),
    Rescaling(SubdivisionTemplate((F(1, 4), F(1, 2)), (F(1, 4),))),
    Custom(TwoSequenceSpec(Seq.constant(3, start=1), Seq.geometric(1, F(1, 5)))),
]


@pytest.mark.parametrize("spec", ROUND_TRIP, ids=lambda s: s.name)
def test_json_round_trip(spec):
    text = json.dumps(spec.to_json())
    back = spec_from_json(json.loads(text))
    assert back == spec
    assert json.dumps(back.to_json()) == text


def test_from_function_not_serializable():
    spec = GammaSeq(Seq.from_function(lambda j: F(1, 3 ** (j + 1))))
    with pytest.raises(SpecParseError):
        spec.to_json()


@pytest.mark.parametrize("obj", [[], {"params": {}}, {"family": "nope"}, {"family": "svc", "params": {}}, {"family": "svc", "params": 3}])
def test_bad_json(obj):
    with pytest.raises(SpecParseError):
        spec_from_json(obj)


@settings(max_examples=60, deadline=None)
@given(
    a=st.fractions(min_value=F(1, 1000), max_value=F(499, 1000), max_denominator=1000),
    t=st.fractions(min_value=F(1, 1000), max_value=1, max_denominator=1000),
)
def test_gsvc_closed_form_property(a, t):
    b = t * (1 - 2 * a)
    validate(GeneralizedSVC(a, b), depth=25)
    two = to_two_sequence(GeneralizedSVC(a, b))
    for n in range(1, 15):
        assert 0 < 2 * two.c(n) < two.c(n - 1)
