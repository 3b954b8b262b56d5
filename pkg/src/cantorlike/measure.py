"""Measures, limit measures and Hausdorff dimensions of the families."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import gmpy2
import mpmath

from .arith import format_rational, to_decimal
from .errors import BracketUnavailable, DomainError, NoLimit, NotApplicable, TranscriptionError, ValidationError
from .families import (
    SVC,
    Custom,
    FamilySpec,
    GammaSeq,
    GeneralizedSVC,
    KAdic,
    LambdaFat,
    MiddleBeta,
    MiddleBetaSeq,
    Rescaling,
    Ternary,
    to_two_sequence,
    validate,
)
from .generation import interval_count

PREC_BITS = 128
RATIO_TOL = mpmath.mpf("1e-12")
RATIO_STEPS = 400


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class Bracket:
    lower: Fraction
    upper: Fraction

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper

    def to_json(self) -> dict:
        return {"lower": format_rational(self.lower), "upper": format_rational(self.upper)}


def generation_measure(spec: FamilySpec, n: int) -> Fraction:
    """Lebesgue measure of the level-n generation, from the closed form of each family."""
    validate(spec, n)
    if n < 0:
        raise DomainError("step must be non-negative")
    match spec:
        case KAdic():
            return Fraction(len(spec.allowed), spec.base) ** n
        case Rescaling():
            return sum(spec.template.child_lengths) ** n
    two = to_two_sequence(spec)
    return two.count(n) * two.c(n)


def removed_mass_partial(spec: FamilySpec, n: int) -> Fraction:
    """Total length of the gaps opened during steps 1..n (summed gap by gap)."""
    validate(spec, n)
    if n < 0:
        raise DomainError("step must be non-negative")
    total = Fraction(0)
    match spec:
        case KAdic(base=k):
            for j in range(1, n + 1):
                total += len(spec.allowed) ** (j - 1) * spec.removed * Fraction(1, k**j)
            return total
        case Rescaling(template=t):
            kept, gap = sum(t.child_lengths), sum(t.gap_lengths)
            for j in range(1, n + 1):
                total += kept ** (j - 1) * gap
            return total
    two = to_two_sequence(spec)
    for j in range(1, n + 1):
        total += two.count(j - 1) * (two.k(j) - 1) * (two.r(j) - two.c(j))
    return total


def _limit_with_tag(spec: FamilySpec, depth: int):
    try:
        validate(spec, depth)
    except ValidationError as exc:
        # a finite table that stops short of ``depth`` cannot bound the limit
        if isinstance(exc.__cause__, DomainError):
            raise BracketUnavailable(str(exc.__cause__)) from exc
        raise
    match spec:
        case Ternary():
            return Fraction(0), "ternary: 0"
        case SVC(n=n):
            closed = Fraction(n - 3, n - 2)
            series = 1 - Fraction(1, n) / (1 - Fraction(2, n))
            if closed != series:
                raise TranscriptionError(f"SVC({n}) limit measure: {closed} != {series}")
            return closed, "svc: (n-3)/(n-2)"
        case LambdaFat(lam=lam):
            return 1 - lam, "lambda_fat: 1 - lambda"
        case MiddleBeta():
            return Fraction(0), "middle_beta: lim (1-beta)^n = 0"
        case GeneralizedSVC(alpha=a, beta=b):
            return 1 - b / (1 - 2 * a), "generalized_svc: 1 - beta/(1-2 alpha)"
        case KAdic():
            return Fraction(0), "kadic: lim ((k-p)/k)^n = 0"
        case Rescaling():
            return Fraction(0), "rescaling: lim (sum eps)^n = 0"
        case GammaSeq(gammas=g) if g.closed_form and g.closed_form[0] == "geometric" and g.start == 0:
            scale, ratio = g.params["scale"], g.params["ratio"]
            if abs(2 * ratio) < 1:
                return 1 - scale / (1 - 2 * ratio), "gamma_seq: 1 - sum 2^j gamma_j"
        case MiddleBetaSeq(betas=betas):
            upper = _measure_or_unavailable(spec, depth)
            tail = betas.tail_bound(depth)
            lower = upper * (1 - tail) if tail is not None and tail < 1 else Fraction(0)
            return Bracket(lower, upper), f"middle_beta_seq: bracket at depth {depth}"
    upper = _measure_or_unavailable(spec, depth)
    return Bracket(Fraction(0), upper), f"{spec.name}: bracket at depth {depth}"


def _measure_or_unavailable(spec, depth):
    try:
        return generation_measure(spec, depth)
    except DomainError as exc:
        raise BracketUnavailable(str(exc)) from exc


def limit_measure(spec: FamilySpec, depth: int = 30) -> Fraction | Bracket:
    """Measure of the limit set: exact where a closed form exists, else a bracket at ``depth``."""
    return _limit_with_tag(spec, depth)[0]


@dataclass(frozen=True)
class MeasureReport:
    measures: tuple[Fraction, ...]
    limit: Fraction | Bracket
    formula_tag: str

    def to_json(self, precision: int = 12) -> dict:
        if isinstance(self.limit, Bracket):
            limit = self.limit.to_json()
            limit_dec = {"lower": to_decimal(self.limit.lower, precision), "upper": to_decimal(self.limit.upper, precision)}
        else:
            limit = format_rational(self.limit)
            limit_dec = to_decimal(self.limit, precision)
        return {
            "measures": [format_rational(m) for m in self.measures],
            "measures_decimal": [to_decimal(m, precision) for m in self.measures],
            "limit": limit,
            "limit_decimal": limit_dec,
            "formula": self.formula_tag,
        }


def measure_report(spec: FamilySpec, n: int, limit_depth: int | None = None) -> MeasureReport:
    measures = tuple(generation_measure(spec, j) for j in range(n + 1))
    limit, tag = _limit_with_tag(spec, n if limit_depth is None else limit_depth)
    return MeasureReport(measures, limit, tag)


# ---------------------------------------------------------------------------
# exact log ratios


def _max_power(n: int) -> int:
    """Largest e with n a perfect e-th power (0 for n == 1)."""
    if n == 1:
        return 0
    for e in range(n.bit_length(), 0, -1):
        root, exact = gmpy2.iroot(n, e)
        if exact:
            return e
    return 1


def _rational_root(r: Fraction) -> tuple[Fraction, int]:
    """Write ``r = s**e`` with ``e`` maximal; requires r > 0, r != 1."""
    e = gcd(_max_power(r.numerator), _max_power(r.denominator))
    s = Fraction(int(gmpy2.iroot(r.numerator, e)[0]), int(gmpy2.iroot(r.denominator, e)[0]))
    return s, e


@dataclass(frozen=True, eq=False)
class LogRatio:
    """The real number ``log(num) / log(den)`` for positive rationals, den != 1."""

    num: Fraction
    den: Fraction

    def __post_init__(self):
        num, den = Fraction(self.num), Fraction(self.den)
        if num <= 0 or den <= 0 or den == 1:
            raise DomainError("log ratio needs positive arguments and den != 1")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def canonical(self) -> tuple:
        """``(q, s, t)`` with value ``q * log(s) / log(t)``, s, t > 1 not perfect powers."""
        if self.num == 1:
            return (Fraction(0), Fraction(1), Fraction(1))
        s, e1 = _rational_root(self.num)
        t, e2 = _rational_root(self.den)
        q = Fraction(e1, e2)
        if s < 1:
            s, q = 1 / s, -q
        if t < 1:
            t, q = 1 / t, -q
        if s == t:
            return (q, Fraction(1), Fraction(1))
        return (q, s, t)

    def rational(self) -> Fraction | None:
        q, s, t = self.canonical()
        return q if s == t else None

    def __eq__(self, other):
        return isinstance(other, LogRatio) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def value(self):
        with mpmath.workprec(PREC_BITS):
            return mpmath.log(_mpf(self.num)) / mpmath.log(_mpf(self.den))

    def __str__(self):
        return f"log({format_rational(self.num)})/log({format_rational(self.den)})"

    def canonical_str(self) -> str:
        """``str`` of the canonical form: a rational, or ``[q*]log(s)/log(t)``."""
        q, s, t = self.canonical()
        if s == t:
            return format_rational(q)
        body = f"log({format_rational(s)})/log({format_rational(t)})"
        return body if q == 1 else f"{format_rational(q)}*{body}"


def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def mpf_to_fraction(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    man = int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


@dataclass(frozen=True)
class Dimension:
    """A dimension value with its exactness tag.

    ``exact`` is set when the value is ``log(p)/log(q)`` for rationals p, q
    (tag ``exact-ratio``); otherwise the value came from numeric limits
    (tag ``float``).
    """

    value: object
    exact: LogRatio | None
    tag: str

    def rational(self) -> Fraction | None:
        return self.exact.rational() if self.exact is not None else None

    def decimal(self, precision: int = 12) -> str:
        r = self.rational()
        if r is not None:
            return to_decimal(r, precision)
        return to_decimal(mpf_to_fraction(self.value), precision)

    def to_json(self, precision: int = 12) -> dict:
        r = self.rational()
        return {
            "value_decimal": self.decimal(precision),
            "exact_form": self.exact.canonical_str() if self.exact is not None else None,
            "rational": format_rational(r) if r is not None else None,
            "tag": self.tag,
        }


def _exact_dimension(k: int, a: Fraction) -> Dimension:
    ratio = LogRatio(Fraction(k), 1 / a)
    return Dimension(ratio.value(), ratio, "exact-ratio")


def _numeric_ratio_limit(two, steps: int = RATIO_STEPS):
    ratios = []
    with mpmath.workprec(PREC_BITS):
        for n in range(1, steps + 1):
            ratios.append(_mpf(two.c(n) / two.c(n - 1)))
        tail = ratios[-10:]
        if max(tail) - min(tail) > RATIO_TOL:
            raise NoLimit(f"c_n/c_(n-1) has not settled within {RATIO_TOL} after {steps} steps")
        return tail[-1]


def _constant_k(spec: FamilySpec, steps: int) -> int:
    two = to_two_sequence(spec)
    seq = two.k_seq
    if seq.closed_form and seq.closed_form[0] == "constant":
        return seq.params["value"]
    ks = {two.k(n) for n in range(1, steps + 1)}
    if len(ks) != 1:
        raise NotApplicable("the dimension formula needs a constant branching number k_n")
    return ks.pop()


def _symbolic_ratio(spec: FamilySpec) -> Fraction | None:
    """``a = lim c_n / c_{n-1}`` where a closed form is known."""
    match spec:
        case Ternary():
            return Fraction(1, 3)
        case SVC(n=n):
            return Fraction(1, 3) if n == 3 else Fraction(1, 2)
        case LambdaFat(lam=lam):
            return Fraction(1, 3) if lam == 1 else Fraction(1, 2)
        case MiddleBeta(beta=b):
            return (1 - b) / 2
        case MiddleBetaSeq(betas=betas):
            lim = betas.limit()
            if lim is None:
                return None
            if not 0 <= lim < 1:
                raise NoLimit("lim beta_n must lie in [0, 1)")
            return (1 - lim) / 2
        case GeneralizedSVC(alpha=a, beta=b):
            # beta = 1 - 2 alpha gives c_n = alpha^n exactly
            return a if b == 1 - 2 * a else Fraction(1, 2)
        case GammaSeq(gammas=g) if g.closed_form and g.closed_form[0] == "geometric" and g.start == 0:
            scale, ratio = g.params["scale"], g.params["ratio"]
            if abs(2 * ratio) < 1:
                total = scale / (1 - 2 * ratio)
                if total < 1:
                    return Fraction(1, 2)
                if total == 1:
                    return ratio
    return None


def hausdorff_dimension(spec: FamilySpec, steps: int = RATIO_STEPS) -> Dimension:
    """``log k / -log a`` with ``a = lim c_n / c_{n-1}`` for constant ``k_n = k``."""
    if isinstance(spec, (KAdic, Rescaling)):
        raise NotApplicable(f"no dimension formula for {spec.name} sets")
    validate(spec, 20)
    k = _constant_k(spec, 20 if not isinstance(spec, Custom) else steps)
    a = _symbolic_ratio(spec)
    if a is None and isinstance(spec, MiddleBetaSeq) and spec.betas.table is not None:
        raise NoLimit("a finite beta table has no limit")
    if a is not None:
        dim = _exact_dimension(k, a)
    else:
        validate(spec, steps)
        a_num = _numeric_ratio_limit(to_two_sequence(spec), steps)
        if not 0 < a_num < 1:
            raise NoLimit("ratio limit outside (0, 1)")
        with mpmath.workprec(PREC_BITS):
            value = mpmath.log(k) / -mpmath.log(a_num)
        dim = Dimension(value, None, "float")

    try:
        limit = limit_measure(spec, 20)
    except BracketUnavailable:
        limit = None
    if isinstance(limit, Fraction) and limit > 0 and dim.exact is not None and dim.rational() != 1:
        raise TranscriptionError(f"{spec.name}: positive measure but dimension {dim.exact}")
    return dim


def box_count(spec: FamilySpec, n: int) -> tuple[int, Fraction]:
    """(number of level-n intervals, longest level-n interval)."""
    validate(spec, n)
    count = interval_count(spec, n)
    match spec:
        case KAdic(base=k):
            scale = Fraction(1, k**n)
        case Rescaling(template=t):
            scale = max(t.child_lengths) ** n
        case _:
            scale = to_two_sequence(spec).c(n)
    return count, scale


def box_estimator(spec: FamilySpec, n: int) -> LogRatio | None:
    """``log(count) / -log(scale)`` at level n (None at n = 0, where it is 0/0)."""
    count, scale = box_count(spec, n)
    if scale == 1:
        return None
    return LogRatio(Fraction(count), 1 / scale)
