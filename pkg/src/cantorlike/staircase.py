"""Cantor-Lebesgue staircase functions with certified enclosures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import INFINITE, DigitExpansion, as_rational, format_rational, from_digits, to_decimal, to_digits
from .errors import DomainError
from .families import Custom, FamilySpec, Ternary, TwoSequenceSpec, to_two_sequence, validate
from .generation import children, mother_length

DEFAULT_DEPTH = 30
ONE_THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)


@dataclass(frozen=True)
class EvalResult:
    """``value`` together with a bound: the true value lies within ``error_bound`` of it."""

    value: Fraction
    error_bound: Fraction = Fraction(0)

    @property
    def exact(self) -> bool:
        return self.error_bound == 0

    def encloses(self, y) -> bool:
        return abs(as_rational(y) - self.value) <= self.error_bound


@dataclass(frozen=True)
class StaircaseSpec:
    """A construction together with its staircase weights.

    ``h(n)`` is the increment carried by each level-n child,
    ``1 / (k_1 * ... * k_n)``; for the digit and rescaling families the
    branching number is the number of kept children.
    """

    family: FamilySpec

    def _branching(self, n: int) -> int:
        fam = self.family
        if fam.embeddable:
            return to_two_sequence(fam).k(n)
        return len(children(fam, None, Fraction(0), Fraction(1), 1))

    def h(self, n: int) -> Fraction:
        w = Fraction(1)
        for j in range(1, n + 1):
            w /= self._branching(j)
        return w

    @property
    def c0(self) -> Fraction:
        return mother_length(self.family)


def staircase(spec: FamilySpec | TwoSequenceSpec) -> StaircaseSpec:
    if isinstance(spec, TwoSequenceSpec):
        spec = Custom(spec)
    return StaircaseSpec(spec)


def _check_unit(x: Fraction) -> None:
    if not 0 <= x <= 1:
        raise DomainError(f"{format_rational(x)} is outside [0, 1]")


def eval_classic_digit(x) -> EvalResult:
    """The Cantor function from the ternary digits of ``x`` (exact).

    Digits up to the first 1 are halved and read in binary; the first 1
    contributes ``2**-N`` and ends the sum.  The infinite expansion is used
    for ternary rationals.
    """
    x = as_rational(x)
    _check_unit(x)
    d = to_digits(x, 3, INFINITE)
    digits = d.prefix + d.period
    if 1 not in digits:
        value = from_digits(DigitExpansion(2, tuple(e // 2 for e in d.prefix), tuple(e // 2 for e in d.period)))
        return EvalResult(value)
    first = digits.index(1)
    head = sum(Fraction(digits[i] // 2, 2 ** (i + 1)) for i in range(first))
    return EvalResult(head + Fraction(1, 2 ** (first + 1)))


def eval_iterative(x, n: int) -> EvalResult:
    """``psi_n(x)`` from the three-branch recursion, with the ``2**-n`` uniform bound."""
    x = as_rational(x)
    _check_unit(x)
    if n < 0:
        raise DomainError("n must be non-negative")
    offset, scale = Fraction(0), Fraction(1)
    for _ in range(n):
        if x <= ONE_THIRD:
            x = 3 * x
        elif x <= TWO_THIRDS:
            return EvalResult(offset + scale / 2, Fraction(1, 2**n))
        else:
            x = 3 * x - 2
            offset += scale / 2
        scale /= 2
    return EvalResult(offset + scale * x, Fraction(1, 2**n))


def eval_general(spec: StaircaseSpec | FamilySpec, x, depth: int = DEFAULT_DEPTH) -> EvalResult:
    """Staircase value at ``x`` in ``[0, c_0]``.

    Exact on gaps up to ``depth`` and at interval endpoints; otherwise the
    value at the left end of the containing level-``depth`` interval with
    error bound ``h(depth)``.
    """
    if not isinstance(spec, StaircaseSpec):
        spec = StaircaseSpec(spec)
    fam = spec.family
    validate(fam, depth)
    x = as_rational(x)
    lo, hi = Fraction(0), spec.c0
    if not lo <= x <= hi:
        raise DomainError(f"{format_rational(x)} is outside [0, {format_rational(hi)}]")
    two = to_two_sequence(fam) if fam.embeddable else None
    value, weight = Fraction(0), Fraction(1)
    for level in range(1, depth + 1):
        if x == lo:
            return EvalResult(value)
        if x == hi:
            return EvalResult(value + weight)
        kids = children(fam, two, lo, hi, level)
        weight /= len(kids)
        for i, (clo, chi) in enumerate(kids):
            if x <= chi:
                break
        if x < clo:
            # in the gap just before child i
            return EvalResult(value + i * weight)
        value += i * weight
        lo, hi = clo, chi
    if x == lo:
        return EvalResult(value)
    if x == hi:
        return EvalResult(value + weight)
    return EvalResult(value, weight)


@dataclass(frozen=True)
class SampleRow:
    x: Fraction
    value: Fraction
    error_bound: Fraction

    def to_json(self, precision: int = 12) -> dict:
        return {
            "x_exact": format_rational(self.x),
            "x_decimal": to_decimal(self.x, precision),
            "value_exact": format_rational(self.value),
            "value_decimal": to_decimal(self.value, precision),
            "error_bound": format_rational(self.error_bound),
        }


CSV_COLUMNS = ("x_exact", "x_decimal", "value_exact", "value_decimal", "error_bound")


def sample_staircase(spec: StaircaseSpec | FamilySpec, m: int, depth: int = DEFAULT_DEPTH) -> list[SampleRow]:
    """Evaluate on ``m`` equally spaced points of ``[0, c_0]``."""
    if not isinstance(spec, StaircaseSpec):
        spec = StaircaseSpec(spec)
    if m < 2:
        raise DomainError("need at least two sample points")
    c0 = spec.c0
    rows = []
    for i in range(m):
        x = c0 * Fraction(i, m - 1)
        r = eval_general(spec, x, depth)
        rows.append(SampleRow(x, r.value, r.error_bound))
    return rows


def rows_to_csv(rows: list[SampleRow], precision: int = 12) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        d = row.to_json(precision)
        lines.append(",".join(d[c] for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


TERNARY_STAIRCASE = StaircaseSpec(Ternary())
