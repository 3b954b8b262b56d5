"""Parameterized Cantor-like families and their two-sequence embeddings.

Every construction is a frozen dataclass deriving from :class:`FamilySpec`.
The symmetric families (two children per step, centered removals) embed
into the general ``(k_n, c_n)`` description through :func:`to_two_sequence`;
the digit and rescaling families do not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, ClassVar

from .arith import as_rational, format_rational
from .errors import DomainError, NotEmbeddable, SpecParseError, TranscriptionError, ValidationError

ONE = Fraction(1)
HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# sequence parameters


def _int_or_rational(value):
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    v = as_rational(value)
    return v.numerator if v.denominator == 1 else v


def _fmt(value):
    if isinstance(value, int):
        return value
    return format_rational(value)


@dataclass(frozen=True, eq=False)
class Seq:
    """A sequence parameter ``n -> value`` defined for ``n >= start``.

    Built either from a named closed form (serializable, with known tail
    sums and limits), from a finite table, or from an arbitrary pure
    Python callable.
    """

    fn: Callable[[int], object]
    start: int = 0
    closed_form: tuple[str, tuple] | None = None
    table: tuple | None = None

    def __call__(self, n: int):
        if n < self.start:
            raise IndexError(f"sequence index {n} below start {self.start}")
        if self.table is not None and n - self.start >= len(self.table):
            raise DomainError(
                f"sequence table has {len(self.table)} entries; index {n} is beyond it"
            )
        return self.fn(n)

    @classmethod
    def constant(cls, value, start: int = 0) -> "Seq":
        v = _int_or_rational(value)
        return cls(lambda n: v, start, ("constant", (("value", v),)))

    @classmethod
    def geometric(cls, scale, ratio, start: int = 0) -> "Seq":
        """``scale * ratio**n`` (n is the actual index, not an offset)."""
        a, r = as_rational(scale), as_rational(ratio)
        return cls(lambda n: a * r**n, start, ("geometric", (("scale", a), ("ratio", r))))

    @classmethod
    def reciprocal_power(cls, scale, power: int, shift: int = 0, start: int = 1) -> "Seq":
        """``scale / (n + shift)**power``."""
        a = as_rational(scale)
        if not isinstance(power, int) or power < 1:
            raise DomainError("power must be a positive integer")
        if start + shift < 1:
            raise DomainError("start + shift must be positive")
        return cls(
            lambda n: a / Fraction(n + shift) ** power,
            start,
            ("reciprocal_power", (("scale", a), ("power", power), ("shift", shift))),
        )

    @classmethod
    def from_table(cls, values, start: int = 0) -> "Seq":
        vals = tuple(_int_or_rational(v) for v in values)
        return cls(lambda n: vals[n - start], start, table=vals)

    @classmethod
    def from_function(cls, fn: Callable[[int], object], start: int = 0) -> "Seq":
        return cls(fn, start)

    @property
    def params(self) -> dict:
        return dict(self.closed_form[1]) if self.closed_form else {}

    def _key(self):
        if self.closed_form is not None:
            return ("cf", self.start, self.closed_form)
        if self.table is not None:
            return ("tb", self.start, self.table)
        return ("fn", self.start, id(self.fn))

    def __eq__(self, other):
        return isinstance(other, Seq) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def tail_bound(self, n: int) -> Fraction | None:
        """Upper bound on ``sum_{j > n} value_j`` (None when unknown or divergent)."""
        if self.closed_form is None:
            return None
        name, p = self.closed_form[0], self.params
        j0 = max(n + 1, self.start)
        if name == "constant":
            return Fraction(0) if p["value"] == 0 else None
        if name == "geometric":
            a, r = p["scale"], p["ratio"]
            if a == 0 or r == 0:
                return Fraction(0)
            if abs(r) >= 1:
                return None
            return abs(a) * abs(r) ** j0 / (1 - abs(r))
        if name == "reciprocal_power":
            a, power, shift = p["scale"], p["power"], p["shift"]
            if power < 2:
                return None
            # sum_{m >= M} m^-power <= M^-power + (M)^(1-power)/(power-1)
            m0 = j0 + shift
            return abs(a) * (Fraction(1, m0**power) + Fraction(1, (power - 1) * m0 ** (power - 1)))
        return None

    def limit(self) -> Fraction | None:
        if self.closed_form is None:
            return None
        name, p = self.closed_form[0], self.params
        if name == "constant":
            return Fraction(p["value"])
        if name == "geometric":
            r = p["ratio"]
            if abs(r) < 1 or p["scale"] == 0:
                return Fraction(0)
            if r == 1:
                return p["scale"]
            return None
        if name == "reciprocal_power":
            return Fraction(0)
        return None

    def to_json(self) -> dict:
        if self.closed_form is not None:
            name, items = self.closed_form
            return {"closed_form": {"name": name, "params": {k: _fmt(v) for k, v in items}}}
        if self.table is not None:
            return {"table": [_fmt(v) for v in self.table], "depth": len(self.table)}
        raise SpecParseError("sequence built from a Python callable cannot be serialized")

    @classmethod
    def from_json(cls, obj, start: int = 0) -> "Seq":
        if isinstance(obj, (int, str)) and not isinstance(obj, bool):
            return cls.constant(obj, start)
        if not isinstance(obj, dict):
            raise SpecParseError(f"bad sequence parameter: {obj!r}")
        try:
            if "closed_form" in obj:
                cf = obj["closed_form"]
                name, p = cf["name"], cf.get("params", {})
                if name == "constant":
                    return cls.constant(p["value"], start)
                if name == "geometric":
                    return cls.geometric(p["scale"], p["ratio"], start)
                if name == "reciprocal_power":
                    return cls.reciprocal_power(
                        p.get("scale", 1), int(p["power"]), int(p.get("shift", 0)), start
                    )
                raise SpecParseError(f"unknown closed form {name!r}")
            if "table" in obj:
                values = obj["table"]
                if "depth" in obj and obj["depth"] != len(values):
                    raise SpecParseError("table depth does not match its length")
                return cls.from_table(values, start)
        except (KeyError, TypeError, ValueError, DomainError) as exc:
            if isinstance(exc, SpecParseError):
                raise
            raise SpecParseError(f"bad sequence parameter: {exc}") from exc
        raise SpecParseError("sequence needs 'closed_form' or 'table'")


# ---------------------------------------------------------------------------
# two-sequence framework


@dataclass(frozen=True)
class TwoSequenceSpec:
    """Branching counts ``k_n`` (n >= 1) and child lengths ``c_n`` (n >= 0).

    Level n consists of ``k_1 * ... * k_n`` closed intervals of length
    ``c_n``; the children of an interval starting at t start at
    ``t + e * r_n`` for ``e = 0 .. k_n - 1``.
    """

    k_seq: Seq
    c_seq: Seq
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def k(self, n: int) -> int:
        if n < 1:
            raise IndexError("k_n is defined for n >= 1")
        return self.k_seq(n)

    def c(self, n: int) -> Fraction:
        key = ("c", n)
        if key not in self._cache:
            self._cache[key] = as_rational(self.c_seq(n))
        return self._cache[key]

    def r(self, n: int) -> Fraction:
        return (self.c(n - 1) - self.c(n)) / (self.k(n) - 1)

    def h(self, n: int) -> Fraction:
        """Staircase weight ``1 / (k_1 * ... * k_n)``."""
        return Fraction(1, self.count(n))

    def count(self, n: int) -> int:
        total = 1
        for j in range(1, n + 1):
            total *= self.k(j)
        return total

    def check(self, depth: int, family: str = "custom") -> None:
        c0 = self.c(0)
        if c0 <= 0:
            raise ValidationError(family, "c_0 > 0", 0, f"c_0 = {format_rational(c0)}")
        for n in range(1, depth + 1):
            try:
                kn = self.k(n)
                cn = self.c(n)
            except DomainError as exc:
                raise ValidationError(family, "sequence defined", n, str(exc)) from exc
            if not isinstance(kn, int) or kn < 2:
                raise ValidationError(family, "k_n >= 2", n, f"k_{n} = {kn}")
            if not 0 < kn * cn < self.c(n - 1):
                raise ValidationError(
                    family,
                    "0 < k_n*c_n < c_{n-1}",
                    n,
                    f"k_{n}*c_{n} = {format_rational(kn * cn)}, c_{n - 1} = {format_rational(self.c(n - 1))}",
                )

    def to_json(self) -> dict:
        return {"k": self.k_seq.to_json(), "c": self.c_seq.to_json()}


def _recursive(first: Fraction, step: Callable[[int, Fraction], Fraction]) -> Callable[[int], Fraction]:
    """Memoized ``a_0 = first, a_n = step(n, a_{n-1})``."""
    memo = [first]

    def fn(n: int) -> Fraction:
        while len(memo) <= n:
            memo.append(step(len(memo), memo[-1]))
        return memo[n]

    return fn


# ---------------------------------------------------------------------------
# family specs


class FamilySpec:
    """Base class of the tagged union of constructions."""

    name: ClassVar[str] = ""
    embeddable: ClassVar[bool] = True

    def params_json(self) -> dict:
        return {}

    def to_json(self) -> dict:
        return {"family": self.name, "params": self.params_json()}


@dataclass(frozen=True)
class Ternary(FamilySpec):
    name: ClassVar[str] = "ternary"


@dataclass(frozen=True)
class SVC(FamilySpec):
    """Remove an interval of length ``1/n**k`` from every center at step k."""

    n: int
    name: ClassVar[str] = "svc"

    def params_json(self):
        return {"n": self.n}


@dataclass(frozen=True)
class LambdaFat(FamilySpec):
    """Remove ``lam/3**k`` from every center at step k."""

    lam: Fraction
    name: ClassVar[str] = "lambda_fat"

    def __post_init__(self):
        object.__setattr__(self, "lam", as_rational(self.lam))

    def params_json(self):
        return {"lambda": format_rational(self.lam)}


@dataclass(frozen=True)
class MiddleBeta(FamilySpec):
    """Remove the middle ``beta`` proportion of every interval at every step."""

    beta: Fraction
    name: ClassVar[str] = "middle_beta"

    def __post_init__(self):
        object.__setattr__(self, "beta", as_rational(self.beta))

    def params_json(self):
        return {"beta": format_rational(self.beta)}


@dataclass(frozen=True)
class MiddleBetaSeq(FamilySpec):
    """Remove the middle ``beta_k`` proportion at step k (beta indexed from 1)."""

    betas: Seq
    name: ClassVar[str] = "middle_beta_seq"

    def params_json(self):
        return {"beta": self.betas.to_json()}


@dataclass(frozen=True)
class GeneralizedSVC(FamilySpec):
    """Remove ``alpha**(k-1) * beta`` from every center at step k."""

    alpha: Fraction
    beta: Fraction
    name: ClassVar[str] = "generalized_svc"

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        object.__setattr__(self, "beta", as_rational(self.beta))

    def params_json(self):
        return {"alpha": format_rational(self.alpha), "beta": format_rational(self.beta)}


@dataclass(frozen=True)
class GammaSeq(FamilySpec):
    """Remove ``gamma_{k-1}`` from every center at step k (gamma indexed from 0)."""

    gammas: Seq
    name: ClassVar[str] = "gamma_seq"

    def params_json(self):
        return {"gamma": self.gammas.to_json()}


@dataclass(frozen=True)
class KAdic(FamilySpec):
    """Keep the base-k digit cells listed in ``allowed`` at every step."""

    base: int
    allowed: frozenset
    name: ClassVar[str] = "kadic"
    embeddable: ClassVar[bool] = False

    def __post_init__(self):
        object.__setattr__(self, "allowed", frozenset(self.allowed))

    @property
    def digits(self) -> tuple[int, ...]:
        return tuple(sorted(self.allowed))

    @property
    def removed(self) -> int:
        return self.base - len(self.allowed)

    def params_json(self):
        return {"base": self.base, "allowed": list(self.digits)}


DigitFamilySpec = KAdic


@dataclass(frozen=True)
class SubdivisionTemplate:
    """Relative child lengths and the gaps between consecutive children."""

    child_lengths: tuple
    gap_lengths: tuple

    def __post_init__(self):
        object.__setattr__(self, "child_lengths", tuple(as_rational(v) for v in self.child_lengths))
        object.__setattr__(self, "gap_lengths", tuple(as_rational(v) for v in self.gap_lengths))

    def offsets(self) -> tuple[Fraction, ...]:
        """Relative start of each child."""
        out, pos = [], Fraction(0)
        for i, length in enumerate(self.child_lengths):
            out.append(pos)
            pos += length
            if i < len(self.gap_lengths):
                pos += self.gap_lengths[i]
        return tuple(out)


@dataclass(frozen=True)
class Rescaling(FamilySpec):
    """Replace every interval by scaled copies of a fixed template."""

    template: SubdivisionTemplate
    name: ClassVar[str] = "rescaling"
    embeddable: ClassVar[bool] = False

    def params_json(self):
        return {
            "children": [format_rational(v) for v in self.template.child_lengths],
            "gaps": [format_rational(v) for v in self.template.gap_lengths],
        }


@dataclass(frozen=True)
class Custom(FamilySpec):
    two: TwoSequenceSpec
    name: ClassVar[str] = "custom"

    def params_json(self):
        return self.two.to_json()


FAMILIES = {
    cls.name: cls
    for cls in (Ternary, SVC, LambdaFat, MiddleBeta, MiddleBetaSeq, GeneralizedSVC, GammaSeq, KAdic, Rescaling, Custom)
}


# ---------------------------------------------------------------------------
# closed forms for the embeddings


def gsvc_c_closed(alpha: Fraction, beta: Fraction, n: int) -> Fraction:
    if n == 0:
        return ONE
    two_a = 2 * alpha
    return (1 - beta) / 2**n - alpha * beta / 2 ** (n - 1) * ((1 - two_a ** (n - 1)) / (1 - two_a))


def lambda_fat_c_closed(lam: Fraction, n: int) -> Fraction:
    return (1 - (1 - Fraction(2, 3) ** n) * lam) / 2**n


def removal_length(spec: FamilySpec, step: int, parent_length: Fraction) -> Fraction:
    """Length of the open interval removed from the center of each interval at ``step``.

    This is the direct (removal-based) description of the symmetric
    families, independent of the two-sequence embedding.
    """
    match spec:
        case Ternary():
            return Fraction(1, 3**step)
        case SVC(n=n):
            return Fraction(1, n**step)
        case LambdaFat(lam=lam):
            return lam / 3**step
        case MiddleBeta(beta=beta):
            return beta * parent_length
        case MiddleBetaSeq(betas=betas):
            return as_rational(betas(step)) * parent_length
        case GeneralizedSVC(alpha=a, beta=b):
            return a ** (step - 1) * b
        case GammaSeq(gammas=gammas):
            return as_rational(gammas(step - 1))
    raise NotEmbeddable(f"{spec.name} is not a centered-removal family")


def to_two_sequence(spec: FamilySpec) -> TwoSequenceSpec:
    """The ``(k_n, c_n)`` description of an embeddable family (k_n = 2 for all named ones)."""
    two = Seq.constant(2, start=1)
    match spec:
        case Ternary():
            return TwoSequenceSpec(two, Seq.geometric(1, Fraction(1, 3)))
        case SVC(n=n):
            fn = _recursive(ONE, lambda k, prev: (prev - Fraction(1, n**k)) / 2)
            return TwoSequenceSpec(two, Seq.from_function(fn))
        case LambdaFat(lam=lam):
            return TwoSequenceSpec(two, Seq.from_function(lambda n: lambda_fat_c_closed(lam, n)))
        case MiddleBeta(beta=beta):
            return TwoSequenceSpec(two, Seq.geometric(1, (1 - beta) / 2))
        case MiddleBetaSeq(betas=betas):
            fn = _recursive(ONE, lambda k, prev: prev * (1 - as_rational(betas(k))) / 2)
            return TwoSequenceSpec(two, Seq.from_function(fn))
        case GeneralizedSVC(alpha=a, beta=b):
            return TwoSequenceSpec(two, Seq.from_function(lambda n: gsvc_c_closed(a, b, n)))
        case GammaSeq(gammas=gammas):
            fn = _recursive(ONE, lambda k, prev: (prev - as_rational(gammas(k - 1))) / 2)
            return TwoSequenceSpec(two, Seq.from_function(fn))
        case Custom(two=custom):
            return custom
    raise NotEmbeddable(f"{spec.name} sets are not described by two sequences")


def two_sequence_or_none(spec: FamilySpec) -> TwoSequenceSpec | None:
    return to_two_sequence(spec) if spec.embeddable else None


def r_sequence(spec: TwoSequenceSpec | FamilySpec, n: int) -> Fraction:
    """Child spacing ``r_n = (c_{n-1} - c_n) / (k_n - 1)``."""
    if n < 1:
        raise DomainError("r_n is defined for n >= 1")
    two = spec if isinstance(spec, TwoSequenceSpec) else to_two_sequence(spec)
    two.check(n)
    return two.r(n)


# ---------------------------------------------------------------------------
# validation


def _interval_check(family, name, value, lo, hi, lo_strict=True, hi_strict=True):
    ok_lo = value > lo if lo_strict else value >= lo
    ok_hi = value < hi if hi_strict else value <= hi
    if not (ok_lo and ok_hi):
        lo_op = "<" if lo_strict else "<="
        hi_op = "<" if hi_strict else "<="
        raise ValidationError(
            family,
            f"{format_rational(lo)} {lo_op} {name} {hi_op} {format_rational(hi)}",
            None,
            f"{name} = {format_rational(value)}",
        )


def validate(spec: FamilySpec, depth: int = 20) -> FamilySpec:
    """Check every constraint of ``spec`` through ``depth`` steps and return it.

    Raises :class:`ValidationError` naming the first failing constraint.
    """
    fam = spec.name
    match spec:
        case Ternary():
            pass
        case SVC(n=n):
            if not isinstance(n, int) or isinstance(n, bool) or n < 3:
                raise ValidationError(fam, "n >= 3", None, f"n = {n}")
        case LambdaFat(lam=lam):
            _interval_check(fam, "lambda", lam, 0, 1, hi_strict=False)
        case MiddleBeta(beta=beta):
            _interval_check(fam, "beta", beta, 0, 1)
        case MiddleBetaSeq(betas=betas):
            for n in range(1, depth + 1):
                try:
                    b = as_rational(betas(n))
                except DomainError as exc:
                    raise ValidationError(fam, "beta_n defined", n, str(exc)) from exc
                if not 0 < b < 1:
                    raise ValidationError(fam, "0 < beta_n < 1", n, f"beta_{n} = {format_rational(b)}")
        case GeneralizedSVC(alpha=a, beta=b):
            _interval_check(fam, "alpha", a, 0, HALF)
            if not 0 < b <= 1 - 2 * a:
                raise ValidationError(
                    fam, "0 < beta <= 1 - 2*alpha", None,
                    f"beta = {format_rational(b)}, 1 - 2*alpha = {format_rational(1 - 2 * a)}",
                )
            _check_gsvc_transcription(a, b, depth)
        case GammaSeq(gammas=gammas):
            length = ONE
            for n in range(1, depth + 1):
                try:
                    g = as_rational(gammas(n - 1))
                except DomainError as exc:
                    raise ValidationError(fam, "gamma_j defined", n, str(exc)) from exc
                if g <= 0:
                    raise ValidationError(fam, "gamma_j > 0", n, f"gamma_{n - 1} = {format_rational(g)}")
                if g >= length:
                    raise ValidationError(
                        fam, "gamma_{n-1} < L_{n-1}", n,
                        f"gamma_{n - 1} = {format_rational(g)}, L_{n - 1} = {format_rational(length)}",
                    )
                length = (length - g) / 2
        case KAdic(base=k, allowed=allowed):
            if not isinstance(k, int) or isinstance(k, bool) or k < 3:
                raise ValidationError(fam, "base >= 3", None, f"base = {k}")
            if not all(isinstance(d, int) and 0 <= d < k for d in allowed):
                raise ValidationError(fam, "allowed digits in 0..base-1", None, str(sorted(allowed)))
            if 0 not in allowed or k - 1 not in allowed:
                raise ValidationError(fam, "0 and base-1 allowed", None, str(sorted(allowed)))
            if not 2 <= len(allowed) <= k - 1:
                raise ValidationError(fam, "2 <= |allowed| <= base-1", None, str(sorted(allowed)))
        case Rescaling(template=t):
            p = len(t.child_lengths)
            if p < 2:
                raise ValidationError(fam, "p >= 2", None, f"p = {p}")
            if len(t.gap_lengths) != p - 1:
                raise ValidationError(fam, "len(gaps) = p - 1", None, f"{len(t.gap_lengths)} gaps")
            if any(v <= 0 for v in t.child_lengths + t.gap_lengths):
                raise ValidationError(fam, "positive lengths", None)
            total = sum(t.child_lengths) + sum(t.gap_lengths)
            if total != 1:
                raise ValidationError(fam, "sum(children) + sum(gaps) = 1", None, f"sum = {format_rational(total)}")
        case Custom():
            pass
        case _:
            raise SpecParseError(f"unknown family spec {spec!r}")
    if spec.embeddable:
        to_two_sequence(spec).check(depth, fam)
    return spec


def _check_gsvc_transcription(alpha, beta, depth):
    c = ONE
    for n in range(1, depth + 1):
        c = (c - alpha ** (n - 1) * beta) / 2
        if c != gsvc_c_closed(alpha, beta, n):
            raise TranscriptionError(f"generalized SVC c_{n}: closed form disagrees with recursion")


# ---------------------------------------------------------------------------
# serialization


def spec_from_json(obj) -> FamilySpec:
    if not isinstance(obj, dict) or "family" not in obj:
        raise SpecParseError("spec must be an object with a 'family' key")
    name = obj["family"]
    p = obj.get("params") or {}
    if not isinstance(p, dict):
        raise SpecParseError("'params' must be an object")
    try:
        match name:
            case "ternary":
                return Ternary()
            case "svc":
                return SVC(int(p["n"]))
            case "lambda_fat":
                return LambdaFat(as_rational(p["lambda"]))
            case "middle_beta":
                return MiddleBeta(as_rational(p["beta"]))
            case "middle_beta_seq":
                return MiddleBetaSeq(Seq.from_json(p["beta"], start=1))
            case "generalized_svc":
                return GeneralizedSVC(as_rational(p["alpha"]), as_rational(p["beta"]))
            case "gamma_seq":
                return GammaSeq(Seq.from_json(p["gamma"], start=0))
            case "kadic":
                return KAdic(int(p["base"]), frozenset(int(d) for d in p["allowed"]))
            case "rescaling":
                return Rescaling(SubdivisionTemplate(tuple(p["children"]), tuple(p["gaps"])))
            case "custom":
                return Custom(TwoSequenceSpec(Seq.from_json(p["k"], start=1), Seq.from_json(p["c"], start=0)))
    except SpecParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecParseError(f"bad parameters for family {name!r}: {exc}") from exc
    raise SpecParseError(f"unknown family {name!r}")
