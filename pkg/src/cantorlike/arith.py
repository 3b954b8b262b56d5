"""Exact rationals and eventually periodic base-k digit expansions.

Rationals are :class:`fractions.Fraction` objects; this module adds the
parsing/formatting conventions used throughout the package and the
:class:`DigitExpansion` type.  Nothing here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import gmpy2

from .errors import DomainError

Rational = Fraction

TERMINATING = "terminating"
INFINITE = "infinite"
VARIANTS = (TERMINATING, INFINITE)

_DIGIT_CHARS = b"0123456789abcdefghijklmnopqrstuvwxyz"
_TO_CHARS = bytes.maketrans(bytes(range(36)), _DIGIT_CHARS)
_FROM_CHARS = bytes.maketrans(_DIGIT_CHARS, bytes(range(36)))


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and strings ("3/8", "5", "0.6") to a Fraction.

    Floats are rejected: they are never exact enough to define a Cantor set.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


def format_rational(x) -> str:
    x = as_rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def to_decimal(x, digits: int = 12) -> str:
    """Truncate ``x`` to ``digits`` fractional digits.

    Exact values are printed without trailing zeros; truncated values end
    with an explicit ``…`` marker.
    """
    x = as_rational(x)
    if digits < 0:
        raise ValueError("digits must be non-negative")
    sign = "-" if x < 0 else ""
    ax = abs(x)
    scaled, rem = divmod(ax.numerator * 10**digits, ax.denominator)
    whole, frac = divmod(scaled, 10**digits)
    frac_str = str(frac).rjust(digits, "0") if digits else ""
    if rem == 0:
        frac_str = frac_str.rstrip("0")
        body = f"{whole}.{frac_str}" if frac_str else str(whole)
        if body == "0":
            sign = ""
        return sign + body
    body = f"{whole}.{frac_str}" if digits else str(whole)
    return f"{sign}{body}…"


def _int_to_digits(n: int, base: int, width: int) -> tuple[int, ...]:
    if width == 0:
        return ()
    if base <= 36:
        s = gmpy2.digits(n, base).encode("ascii").rjust(width, b"0")
        return tuple(s.translate(_FROM_CHARS))
    out = []
    for _ in range(width):
        n, d = divmod(n, base)
        out.append(d)
    return tuple(reversed(out))


def _digits_to_int(digits, base: int) -> int:
    if not digits:
        return 0
    if base <= 36:
        return int(gmpy2.mpz(bytes(digits).translate(_TO_CHARS).decode("ascii"), base))
    n = 0
    for d in digits:
        n = n * base + d
    return n


def _minimal_period(period: tuple[int, ...], base: int) -> tuple[int, ...]:
    n = len(period)
    if n == 1:
        return period
    if base <= 256:
        s = bytes(period)
        p = (s + s).find(s, 1)
    else:
        p = next(p for p in range(1, n + 1) if n % p == 0 and period == period[p:] + period[:p])
    return period[:p]


@dataclass(frozen=True)
class DigitExpansion:
    """``0.prefix period period period ...`` in the given base.

    Instances are normalized on construction (least period, shortest
    prefix), so two expansions are equal iff their fields are equal.
    """

    base: int
    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        base = self.base
        if not isinstance(base, int) or base < 2:
            raise DomainError(f"base must be an integer >= 2, got {base!r}")
        prefix = tuple(self.prefix)
        period = tuple(self.period)
        if not period:
            raise DomainError("period must be nonempty")
        digits = prefix + period
        try:
            ok = min(digits) >= 0 and max(digits) < base
            if base <= 256:
                bytes(digits)
            elif not all(isinstance(d, int) for d in digits):
                ok = False
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise DomainError(f"digits out of range for base {base}")
        period = _minimal_period(period, base)
        while prefix and prefix[-1] == period[-1]:
            period = (prefix[-1],) + period[:-1]
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    @property
    def terminates(self) -> bool:
        return self.period == (0,)

    def digit(self, k: int) -> int:
        """The k-th digit after the point (k >= 1)."""
        if k < 1:
            raise IndexError("digits are indexed from 1")
        m = len(self.prefix)
        if k <= m:
            return self.prefix[k - 1]
        return self.period[(k - m - 1) % len(self.period)]

    def to_json(self) -> dict:
        return {"base": self.base, "prefix": list(self.prefix), "period": list(self.period)}

    @classmethod
    def from_json(cls, obj: dict) -> "DigitExpansion":
        return cls(obj["base"], tuple(obj["prefix"]), tuple(obj["period"]))

    def __str__(self):
        if self.base <= 36:
            pre = bytes(self.prefix).translate(_TO_CHARS).decode()
            per = bytes(self.period).translate(_TO_CHARS).decode()
        else:
            pre = ",".join(map(str, self.prefix))
            per = ",".join(map(str, self.period))
        return f"0.{pre}({per})_{self.base}"


def _split_denominator(q: int, base: int) -> tuple[int, int]:
    """Return (m, q') with q' coprime to base and m the least power with q | base^m * q'."""
    coprime = q
    while (g := gcd(coprime, base)) > 1:
        coprime //= g
    s = q // coprime
    m = 0
    while s > 1:
        s //= gcd(s, base)
        m += 1
    return m, coprime


def _multiplicative_order(base: int, modulus: int) -> int:
    if modulus < 1 << 16:
        b = base % modulus
        k, acc = 1, b
        while acc != 1:
            acc = acc * b % modulus
            k += 1
        return k
    from sympy.ntheory import n_order

    return int(n_order(base % modulus, modulus))


def to_digits(x, base: int, variant: str = TERMINATING) -> DigitExpansion:
    """Base-``base`` expansion of a rational ``x`` in [0, 1].

    For base-adic ``x`` (other than 0 and 1) the two expansions differ:
    ``terminating`` ends in repeating 0, ``infinite`` ends in repeating
    ``base - 1``.  The variant is irrelevant for every other ``x``.
    """
    x = as_rational(x)
    if not isinstance(base, int) or base < 2:
        raise DomainError(f"base must be an integer >= 2, got {base!r}")
    if variant not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r}")
    if not 0 <= x <= 1:
        raise DomainError(f"{format_rational(x)} is outside [0, 1]")
    if x == 0:
        return DigitExpansion(base, (), (0,))
    if x == 1:
        return DigitExpansion(base, (), (base - 1,))

    m, q_tail = _split_denominator(x.denominator, base)
    head, r = divmod(x.numerator * base**m, x.denominator)
    # r / x.denominator == r' / q_tail for the tail after the prefix
    if q_tail == 1:
        if variant == INFINITE:
            return DigitExpansion(base, _int_to_digits(head - 1, base, m), (base - 1,))
        return DigitExpansion(base, _int_to_digits(head, base, m), (0,))
    tail_num = r * q_tail // x.denominator
    length = _multiplicative_order(base, q_tail)
    block = int(gmpy2.mpz(tail_num) * (gmpy2.mpz(base) ** length - 1) // q_tail)
    return DigitExpansion(base, _int_to_digits(head, base, m), _int_to_digits(block, base, length))


def from_digits(d: DigitExpansion) -> Fraction:
    """Exact value of an eventually periodic expansion (geometric series)."""
    b = gmpy2.mpz(d.base)
    head = _digits_to_int(d.prefix, d.base)
    block = _digits_to_int(d.period, d.base)
    cycle = b ** len(d.period) - 1
    num = head * cycle + block
    den = cycle * b ** len(d.prefix)
    g = gmpy2.gcd(num, den)
    return Fraction(int(num // g), int(den // g))


def expansions(x, base: int) -> tuple[DigitExpansion, ...]:
    """All base-``base`` expansions of ``x`` (one, or two for base-adic x)."""
    a = to_digits(x, base, TERMINATING)
    b = to_digits(x, base, INFINITE)
    return (a,) if a == b else (a, b)
