"""Exact dyadic-rational arithmetic and small number-theory helpers.

A dyadic (binary) rational is a number of the form num / 2**exp with
integer num and exp >= 0.  Every concentration flowing through a mixing
graph is dyadic, so this is the universal value type of the package.
All arithmetic is exact; floats never enter.
"""

from __future__ import annotations

import math
import re

__all__ = [
    "Dyadic",
    "mid",
    "precision",
    "parse_dyadic",
    "format_dyadic",
    "odd_part",
    "odd_prime_factors",
    "odd_prime_power_candidates",
    "greatest_common_odd_divisor",
]


class Dyadic:
    """An immutable binary rational num / 2**exp in canonical form.

    Canonical means exp == 0 or num is odd, so equal values always have
    equal (num, exp) fields.  Supports exact +, -, * and total ordering;
    there is deliberately no general division.
    """

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0) -> None:
        if exp < 0:
            raise ValueError(f"exponent must be non-negative, got {exp}")
        if num == 0:
            exp = 0
        else:
            while exp > 0 and num % 2 == 0:
                num //= 2
                exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Dyadic is immutable")

    # -- conversions ---------------------------------------------------

    @property
    def is_integer(self) -> bool:
        return self.exp == 0

    def as_integer(self) -> int:
        if self.exp != 0:
            raise ValueError(f"{self} is not an integer")
        return self.num

    def __float__(self) -> float:
        return self.num / (1 << self.exp)

    # -- arithmetic ----------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Dyadic":
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = max(self.exp, other.exp)
        return Dyadic(
            (self.num << (e - self.exp)) + (other.num << (e - other.exp)), e
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.num, self.exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.num), self.exp)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def scale2(self, k: int) -> "Dyadic":
        """Return self * 2**k (k may be negative)."""
        if k >= 0:
            return Dyadic(self.num << k, self.exp)
        return Dyadic(self.num, self.exp - k)

    # -- ordering ------------------------------------------------------

    def _cmp_key(self, other: "Dyadic") -> tuple[int, int]:
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.exp == other.exp

    def __lt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._cmp_key(other)
        return a <= b

    def __gt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._cmp_key(other)
        return a > b

    def __ge__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._cmp_key(other)
        return a >= b

    def __hash__(self):
        return hash((self.num, self.exp))

    def __repr__(self) -> str:
        return f"Dyadic({format_dyadic(self)!r})"

    def __str__(self) -> str:
        return format_dyadic(self)


def mid(x: Dyadic | int, y: Dyadic | int) -> Dyadic:
    """Exact average (x + y) / 2, the value a micro-mixer produces."""
    if isinstance(x, int):
        x = Dyadic(x)
    if isinstance(y, int):
        y = Dyadic(y)
    return (x + y).scale2(-1)


def precision(x: Dyadic) -> int:
    """Number of fractional bits of x: the smallest d with x = a / 2**d."""
    return x.exp


_DECIMAL_RE = re.compile(r"^[+-]?\d+\.\d+$")
_INT_RE = re.compile(r"^[+-]?\d+$")
_FRACTION_RE = re.compile(r"^([+-]?\d+)/(\d+)$")


def parse_dyadic(text: str) -> Dyadic:
    """Parse an integer literal, p/q with q a power of two, or an exact decimal.

    Rejects non-power-of-two denominators and decimals without a finite
    binary expansion (e.g. "0.1").
    """
    text = text.strip()
    if _INT_RE.match(text):
        return Dyadic(int(text))
    m = _FRACTION_RE.match(text)
    if m:
        p, q = int(m.group(1)), int(m.group(2))
        if q <= 0 or q & (q - 1) != 0:
            raise ValueError(f"denominator of {text!r} is not a power of two")
        return Dyadic(p, q.bit_length() - 1)
    if _DECIMAL_RE.match(text):
        sign = -1 if text[0] == "-" else 1
        whole, frac = text.lstrip("+-").split(".")
        num = int(whole) * 10 ** len(frac) + int(frac)
        den = 10 ** len(frac)
        g = math.gcd(num, den)
        num, den = num // g, den // g
        if den & (den - 1) != 0:
            raise ValueError(f"{text!r} has no finite binary representation")
        return Dyadic(sign * num, den.bit_length() - 1)
    raise ValueError(f"cannot parse {text!r} as a dyadic rational")


def format_dyadic(x: Dyadic) -> str:
    """Render as an integer literal or p/q with q a power of two."""
    if x.exp == 0:
        return str(x.num)
    return f"{x.num}/{1 << x.exp}"


def odd_part(k: int) -> int:
    """Largest odd divisor of k (k > 0)."""
    if k <= 0:
        raise ValueError(f"odd_part requires a positive integer, got {k}")
    while k % 2 == 0:
        k //= 2
    return k


def odd_prime_factors(n: int) -> list[int]:
    """Odd prime divisors of n, ascending, by trial division.

    n is at most the droplet count, itself bounded by the bit size of the
    input, so O(sqrt n) factoring is polynomial in the input size.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    n = odd_part(n)
    primes = []
    p = 3
    while p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        primes.append(n)
    return primes


def odd_prime_power_candidates(n: int, cap: int) -> list[int]:
    """All b = p**k <= cap with p an odd prime factor of n, ascending.

    These are the only moduli the mixability test has to examine.
    """
    out = []
    for p in odd_prime_factors(n):
        b = p
        while b <= cap:
            out.append(b)
            b *= p
    return sorted(out)


def greatest_common_odd_divisor(values: list[int]) -> int:
    """Largest odd integer dividing every value; errors on all-zero input."""
    g = 0
    for v in values:
        g = math.gcd(g, v)
    if g == 0:
        raise ValueError("greatest common odd divisor of all-zero values is undefined")
    return odd_part(g)
