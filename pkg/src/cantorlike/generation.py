"""Step-n residual sets as exact unions of closed intervals, plus point queries."""

from __future__ import annotations

import bisect
import json
import os
from dataclasses import dataclass
from fractions import Fraction

from .arith import INFINITE, TERMINATING, DigitExpansion, as_rational, expansions, format_rational, from_digits, to_digits
from .errors import CapExceeded, DomainError, NotEmbeddable, SpecParseError
from .families import (
    FamilySpec,
    KAdic,
    Rescaling,
    Ternary,
    TwoSequenceSpec,
    removal_length,
    spec_from_json,
    to_two_sequence,
    validate,
)

DEFAULT_CAP = 2**20
CAP_ENV = "CANTOR_INTERVAL_CAP"


def interval_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise DomainError(f"{CAP_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise DomainError(f"{CAP_ENV} must be positive")
    return cap


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> list[str]:
        return [format_rational(self.lo), format_rational(self.hi)]


@dataclass(frozen=True)
class Generation:
    """The closed intervals that survive ``step`` removal steps, sorted."""

    step: int
    intervals: tuple[Interval, ...]
    spec: FamilySpec | None = None

    def __len__(self):
        return len(self.intervals)

    @property
    def measure(self) -> Fraction:
        return sum((iv.length for iv in self.intervals), Fraction(0))

    @property
    def endpoints(self) -> list[Fraction]:
        pts = []
        for iv in self.intervals:
            pts.append(iv.lo)
            if iv.hi != iv.lo:
                pts.append(iv.hi)
        return pts

    def gaps(self) -> list[Interval]:
        """The open gaps between consecutive intervals (as closures)."""
        ivs = self.intervals
        return [Interval(a.hi, b.lo) for a, b in zip(ivs, ivs[1:])]

    def contains(self, x) -> bool:
        return contains(self, x)

    def to_json(self) -> dict:
        try:
            family = self.spec.to_json() if self.spec is not None else None
        except SpecParseError:
            family = {"family": self.spec.name, "params": None}
        return {
            "family": family,
            "step": self.step,
            "intervals": [iv.to_json() for iv in self.intervals],
            "measure": format_rational(self.measure),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, obj: dict) -> "Generation":
        fam = obj.get("family")
        spec = spec_from_json(fam) if fam and fam.get("params") is not None else None
        ivs = tuple(Interval(as_rational(lo), as_rational(hi)) for lo, hi in obj["intervals"])
        gen = cls(int(obj["step"]), ivs, spec)
        if "measure" in obj and as_rational(obj["measure"]) != gen.measure:
            raise SpecParseError("stored measure does not match the intervals")
        return gen

    def to_csv(self) -> str:
        rows = ["step,index,lo,hi"]
        for i, iv in enumerate(self.intervals):
            rows.append(f"{self.step},{i},{format_rational(iv.lo)},{format_rational(iv.hi)}")
        return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# construction


def mother_length(spec: FamilySpec) -> Fraction:
    if spec.embeddable:
        return to_two_sequence(spec).c(0)
    return Fraction(1)


def interval_count(spec: FamilySpec, n: int) -> int:
    if spec.embeddable:
        return to_two_sequence(spec).count(n)
    if isinstance(spec, KAdic):
        return len(spec.allowed) ** n
    if isinstance(spec, Rescaling):
        return len(spec.template.child_lengths) ** n
    raise NotEmbeddable(spec.name)


def _guard(spec: FamilySpec, n: int, cap: int | None) -> None:
    if n < 0:
        raise DomainError("step must be non-negative")
    cap = interval_cap() if cap is None else cap
    count = interval_count(spec, n)
    if count > cap:
        raise CapExceeded(count, cap)


def children(spec: FamilySpec, two: TwoSequenceSpec | None, lo: Fraction, hi: Fraction, level: int):
    """The level-``level`` sub-intervals ``(lo, hi)`` of a level-``level-1`` interval."""
    if two is not None:
        r, c = two.r(level), two.c(level)
        return [(lo + e * r, lo + e * r + c) for e in range(two.k(level))]
    length = hi - lo
    if isinstance(spec, KAdic):
        cell = length / spec.base
        return [(lo + d * cell, lo + (d + 1) * cell) for d in spec.digits]
    if isinstance(spec, Rescaling):
        t = spec.template
        return [(lo + off * length, lo + (off + eps) * length) for off, eps in zip(t.offsets(), t.child_lengths)]
    raise NotEmbeddable(spec.name)


def _two(spec: FamilySpec) -> TwoSequenceSpec | None:
    return to_two_sequence(spec) if spec.embeddable else None


def left_endpoints(spec: FamilySpec, n: int, cap: int | None = None) -> list[Fraction]:
    """Sorted left endpoints of the level-n intervals.

    For two-sequence families these are the sums ``sum_j e_j r_j`` with
    ``0 <= e_j < k_j``.
    """
    validate(spec, n)
    _guard(spec, n, cap)
    two = _two(spec)
    if two is None:
        return [iv.lo for iv in generate(spec, n, cap).intervals]
    points = [Fraction(0)]
    for j in range(1, n + 1):
        r = two.r(j)
        offsets = [e * r for e in range(two.k(j))]
        points = [t + off for t in points for off in offsets]
    return points


def generate(spec: FamilySpec, n: int, cap: int | None = None) -> Generation:
    """Exact level-n generation of ``spec``."""
    validate(spec, n)
    _guard(spec, n, cap)
    two = _two(spec)
    if two is not None:
        c = two.c(n)
        ivs = tuple(Interval(t, t + c) for t in left_endpoints(spec, n, cap))
        return Generation(n, ivs, spec)
    level = [(Fraction(0), Fraction(1))]
    for j in range(1, n + 1):
        level = [kid for lo, hi in level for kid in children(spec, None, lo, hi, j)]
    return Generation(n, tuple(Interval(lo, hi) for lo, hi in level), spec)


def generate_direct(spec: FamilySpec, n: int, cap: int | None = None) -> Generation:
    """Level-n generation by literally cutting centered gaps (symmetric families only).

    Independent of the two-sequence embedding; used to cross-check it.
    """
    validate(spec, n)
    _guard(spec, n, cap)
    level = [(Fraction(0), Fraction(1))]
    for step in range(1, n + 1):
        nxt = []
        for lo, hi in level:
            gap = removal_length(spec, step, hi - lo)
            half = (hi - lo - gap) / 2
            if half <= 0:
                raise DomainError(f"removal at step {step} exhausts an interval")
            nxt.append((lo, lo + half))
            nxt.append((hi - half, hi))
        level = nxt
    return Generation(n, tuple(Interval(lo, hi) for lo, hi in level), spec)


# ---------------------------------------------------------------------------
# point queries


def contains(g: Generation, x) -> bool:
    x = as_rational(x)
    ivs = g.intervals
    i = bisect.bisect_right(ivs, Interval(x, x)) - 1
    for j in (i, i + 1):
        if 0 <= j < len(ivs) and x in ivs[j]:
            return True
    return False


@dataclass(frozen=True)
class InAllChecked:
    """``x`` survived every checked step (a semidecision only)."""

    depth: int

    def __str__(self):
        return "InAllChecked"


@dataclass(frozen=True)
class RejectedAt:
    """``x`` was removed at ``step``, so it is definitely not in the limit set."""

    step: int

    def __str__(self):
        return f"RejectedAt({self.step})"


def _locate_child(kids, x):
    """Index of the first child containing ``x``, or ``(None, i)`` with x in the gap after child i."""
    los = [lo for lo, _ in kids]
    i = bisect.bisect_right(los, x) - 1
    if i < 0:
        return None, -1
    if x <= kids[i][1]:
        return i, i
    return None, i


def descend(spec: FamilySpec, x, depth: int):
    """Follow ``x`` down the construction tree.

    Yields ``(level, lo, hi, index, n_children)`` for every level at which
    ``x`` stays inside an interval; stops early (yielding ``(level, None,
    gap_index, None, n_children)``) when ``x`` falls into a removed gap.
    """
    x = as_rational(x)
    two = _two(spec)
    lo, hi = Fraction(0), mother_length(spec)
    for level in range(1, depth + 1):
        kids = children(spec, two, lo, hi, level)
        idx, after = _locate_child(kids, x)
        if idx is None:
            yield level, None, after, None, len(kids)
            return
        lo, hi = kids[idx]
        yield level, lo, hi, idx, len(kids)


def member_up_to(spec: FamilySpec, x, depth: int):
    """Check ``x`` against steps 1..depth; return InAllChecked or RejectedAt(m)."""
    validate(spec, depth)
    x = as_rational(x)
    if not 0 <= x <= mother_length(spec):
        return RejectedAt(0)
    for level, lo, *_ in descend(spec, x, depth):
        if lo is None:
            return RejectedAt(level)
    return InAllChecked(depth)


def digit_member(spec: KAdic, x) -> bool:
    """Exact limit-set membership for digit families: some base-k expansion uses only allowed digits."""
    x = as_rational(x)
    if not 0 <= x <= 1:
        raise DomainError(f"{format_rational(x)} is outside [0, 1]")
    allowed = spec.allowed
    return any(set(d.prefix) <= allowed and set(d.period) <= allowed for d in expansions(x, spec.base))


def _split_for_midpoint(d: DigitExpansion):
    # y = u + v with u, v having ternary digits in {0, 1}: 0 -> (0,0), 2 -> (1,1),
    # and each 1 goes to v the first time, to u afterwards (keeps v - u small)
    full = d.prefix + d.period
    seen_one = False
    u_pre, v_pre = [], []
    for e in full:
        if e == 1 and not seen_one:
            u_pre.append(0)
            v_pre.append(1)
            seen_one = True
        else:
            u_pre.append(1 if e >= 1 else 0)
            v_pre.append(1 if e == 2 else 0)
    u_per = [1 if e >= 1 else 0 for e in d.period]
    v_per = [1 if e == 2 else 0 for e in d.period]
    if not seen_one:
        u_per = v_per = [e // 2 for e in d.period]
    x1 = from_digits(DigitExpansion(3, tuple(2 * e for e in u_pre), tuple(2 * e for e in u_per)))
    x2 = from_digits(DigitExpansion(3, tuple(2 * e for e in v_pre), tuple(2 * e for e in v_per)))
    return x1, x2


def midpoint_decompose(y, depth: int = 20) -> tuple[Fraction, Fraction]:
    """Two points of the ternary Cantor set whose midpoint is ``y``.

    The pair is exact (residual 0) for every rational ``0 < y < 1``; both
    points have ternary digits in {0, 2} and so survive every step.
    """
    y = as_rational(y)
    if not 0 < y < 1:
        raise DomainError("midpoint decomposition needs 0 < y < 1")
    best = None
    for variant in (INFINITE, TERMINATING):
        x1, x2 = _split_for_midpoint(to_digits(y, 3, variant))
        if best is None or x2 - x1 < best[1] - best[0]:
            best = (x1, x2)
    x1, x2 = best
    assert x1 + x2 == 2 * y
    return x1, x2


def nearest_endpoint_distance(spec: FamilySpec, x, n: int) -> Fraction:
    """Distance from ``x`` to the closest endpoint of the level-n intervals."""
    validate(spec, n)
    x = as_rational(x)
    lo, hi = Fraction(0), mother_length(spec)
    if not lo <= x <= hi:
        raise DomainError(f"{format_rational(x)} is not in generation {n}")
    for _level, clo, chi, *_ in descend(spec, x, n):
        if clo is None:
            raise DomainError(f"{format_rational(x)} is not in generation {n}")
        lo, hi = clo, chi
    return min(x - lo, hi - x)


TERNARY = Ternary()
