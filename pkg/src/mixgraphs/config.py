"""Droplet configurations: multisets of concentrations and their normal forms.

A configuration is a multiset of dyadic concentrations.  The statistics
that drive everything else live here (average, the potential Psi = the
un-normalized variance, diameter, bit size), together with the affine
normalization pipeline: offsetting, power-of-two rescaling to an integer
frame, and the "hat" normal form (offset to min, divide out the greatest
common odd divisor, double) on which all synthesis operates.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from .dyadic import (
    Dyadic,
    format_dyadic,
    greatest_common_odd_divisor,
    mid,
    odd_part,
    parse_dyadic,
)

__all__ = [
    "Configuration",
    "ConfigStats",
    "NormalizationRecord",
    "stats",
    "offset",
    "scale_pow2",
    "normalize_integral",
    "normalize_hat",
    "apply_mix",
    "parity_split",
    "parse_configuration",
    "format_configuration",
]


def _as_dyadic(v) -> Dyadic:
    if isinstance(v, Dyadic):
        return v
    if isinstance(v, int):
        return Dyadic(v)
    raise TypeError(f"expected Dyadic or int, got {type(v).__name__}")


class Configuration:
    """Immutable multiset of dyadic concentrations.

    Stored as entries (value, multiplicity) sorted strictly ascending by
    value with no repeated values.  May be empty; operations that need a
    droplet (stats, mixing) reject emptiness themselves.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[tuple[Dyadic | int, int]]) -> None:
        merged: dict[Dyadic, int] = {}
        for value, mult in entries:
            value = _as_dyadic(value)
            if mult < 1:
                raise ValueError(f"multiplicity must be >= 1, got {mult}")
            merged[value] = merged.get(value, 0) + mult
        object.__setattr__(
            self, "entries", tuple(sorted(merged.items(), key=lambda e: e[0]))
        )

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Configuration is immutable")

    @classmethod
    def from_values(cls, values: Iterable[Dyadic | int]) -> "Configuration":
        return cls((v, 1) for v in values)

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        """Total droplet count."""
        return sum(f for _, f in self.entries)

    @property
    def m(self) -> int:
        """Number of distinct concentrations."""
        return len(self.entries)

    def values(self) -> tuple[Dyadic, ...]:
        return tuple(v for v, _ in self.entries)

    def droplets(self) -> Iterator[Dyadic]:
        for v, f in self.entries:
            for _ in range(f):
                yield v

    def multiplicity(self, value: Dyadic | int) -> int:
        value = _as_dyadic(value)
        for v, f in self.entries:
            if v == value:
                return f
        return 0

    def __contains__(self, value) -> bool:
        return self.multiplicity(value) > 0

    def total(self) -> Dyadic:
        acc = Dyadic(0)
        for v, f in self.entries:
            acc = acc + v * f
        return acc

    def min_value(self) -> Dyadic:
        if not self.entries:
            raise ValueError("empty configuration has no minimum")
        return self.entries[0][0]

    def max_value(self) -> Dyadic:
        if not self.entries:
            raise ValueError("empty configuration has no maximum")
        return self.entries[-1][0]

    @property
    def is_integral(self) -> bool:
        return all(v.is_integer for v, _ in self.entries)

    def as_int_counter(self) -> Counter[int]:
        """Integer multiset view; errors on fractional values."""
        if not self.is_integral:
            raise ValueError(f"configuration {self} is not integral")
        return Counter({v.as_integer(): f for v, f in self.entries})

    @classmethod
    def from_int_counter(cls, counter: Counter[int]) -> "Configuration":
        return cls((Dyadic(v), f) for v, f in counter.items() if f)

    # -- dunder ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"Configuration({format_configuration(self)!r})"


@dataclass(frozen=True)
class ConfigStats:
    """Summary statistics of a configuration.

    mu is None when the average has no finite binary representation, in
    which case psi is None as well (Psi is only used over dyadic means).
    size_bits is sum over droplets of log2(|c| + 2), the input-size
    measure all polynomial bounds are stated in.
    """

    n: int
    m: int
    mu: Dyadic | None
    psi: Dyadic | None
    diam: Dyadic
    size_bits: float
    c_max: Dyadic


def _dyadic_mean(total: Dyadic, n: int) -> Dyadic | None:
    sigma = odd_part(n)
    tau = (n // sigma).bit_length() - 1
    if total.num % sigma != 0:
        return None
    return Dyadic(total.num // sigma, total.exp + tau)


def stats(C: Configuration) -> ConfigStats:
    """Exact n, m, mean, Psi, diameter, size and max |c| of C."""
    if C.n == 0:
        raise ValueError("empty configuration has no statistics")
    n = C.n
    mu = _dyadic_mean(C.total(), n)
    psi = None
    if mu is not None:
        acc = Dyadic(0)
        for v, f in C.entries:
            d = v - mu
            acc = acc + d * d * f
        psi = acc
    diam = C.max_value() - C.min_value()
    size = 0.0
    for v, f in C.entries:
        # |v| + 2 == (|num| + 2**(exp+1)) / 2**exp, so take log2 of integers
        size += f * (math.log2(abs(v.num) + (1 << (v.exp + 1))) - v.exp)
    c_max = max(abs(v) for v in C.values())
    return ConfigStats(n=n, m=C.m, mu=mu, psi=psi, diam=diam, size_bits=size, c_max=c_max)


@dataclass(frozen=True)
class NormalizationRecord:
    """The affine map applied by a normalization step.

    Replaying offset, power-of-two shift, odd divisor and the final
    doubling sends the original configuration to the normalized one.
    """

    offset: Dyadic
    pow2_shift: int
    odd_divisor: int
    doubled: bool


def offset(C: Configuration, x: Dyadic | int) -> Configuration:
    """Shift every concentration by x; preserves n, m, Psi and diameter."""
    x = _as_dyadic(x)
    return Configuration((v + x, f) for v, f in C.entries)


def scale_pow2(C: Configuration, delta: int) -> Configuration:
    """Multiply every concentration by 2**delta (delta may be negative)."""
    return Configuration((v.scale2(delta), f) for v, f in C.entries)


def normalize_integral(C: Configuration) -> tuple[Configuration, NormalizationRecord]:
    """Rescale by the smallest power of two making C and its mean integers."""
    st = stats(C)
    if st.mu is None:
        raise ValueError(
            "not perfectly mixable: average has no finite binary representation"
        )
    delta = max([st.mu.exp] + [v.exp for v in C.values()])
    record = NormalizationRecord(
        offset=Dyadic(0), pow2_shift=delta, odd_divisor=1, doubled=False
    )
    return scale_pow2(C, delta), record


def normalize_hat(C_int: Configuration) -> tuple[Configuration, NormalizationRecord]:
    """Hat normal form: offset to min, divide out the odd content, double.

    Requires an integral configuration with integral mean that satisfies
    the mixability condition and is not constant.  The result has all
    values even, integral mean, and is incongruent modulo every odd prime
    factor of n; these are the preconditions of the synthesis invariants.
    """
    counter = C_int.as_int_counter()
    if len(counter) == 1:
        raise ValueError("all-equal configuration is already perfectly mixed")
    c1 = min(counter)
    shifted = [v - c1 for v in counter]
    theta = greatest_common_odd_divisor(shifted)
    hat = Configuration(
        (Dyadic(2 * (v - c1) // theta), f) for v, f in counter.items()
    )
    record = NormalizationRecord(
        offset=Dyadic(-c1), pow2_shift=0, odd_divisor=theta, doubled=True
    )
    return hat, record


def apply_mix(C: Configuration, x: Dyadic | int, y: Dyadic | int) -> Configuration:
    """Mix one droplet of x with one of y: both become mid(x, y).

    Preserves n and the total; x == y needs multiplicity >= 2 and is a
    no-op.
    """
    x, y = _as_dyadic(x), _as_dyadic(y)
    if x == y:
        if C.multiplicity(x) < 2:
            raise ValueError(f"cannot mix {x} with itself: multiplicity < 2")
        return C
    counts = {v: f for v, f in C.entries}
    for v in (x, y):
        if counts.get(v, 0) < 1:
            raise ValueError(f"value {v} not present in configuration")
    counts[x] -= 1
    counts[y] -= 1
    z = mid(x, y)
    counts[z] = counts.get(z, 0) + 2
    return Configuration((v, f) for v, f in counts.items() if f > 0)


def parity_split(C_int: Configuration) -> tuple[Configuration, Configuration]:
    """Partition an integral configuration into its even and odd parts."""
    counter = C_int.as_int_counter()
    even = Configuration((Dyadic(v), f) for v, f in counter.items() if v % 2 == 0)
    odd = Configuration((Dyadic(v), f) for v, f in counter.items() if v % 2 != 0)
    return even, odd


# -- text format ---------------------------------------------------------
#
# One droplet entry per line, either "<value>" or "<mult>:<value>".
# '#' starts a comment; blank lines are ignored.


def parse_configuration(text: str) -> Configuration:
    entries: list[tuple[Dyadic, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mult = 1
        value_text = line
        if ":" in line:
            mult_text, value_text = line.split(":", 1)
            try:
                mult = int(mult_text.strip())
            except ValueError:
                raise ValueError(f"line {lineno}: bad multiplicity {mult_text!r}")
            if mult < 1:
                raise ValueError(f"line {lineno}: multiplicity must be >= 1")
        try:
            value = parse_dyadic(value_text)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}")
        entries.append((value, mult))
    return Configuration(entries)


def format_configuration(C: Configuration) -> str:
    parts = []
    for v, f in C.entries:
        parts.append(format_dyadic(v) if f == 1 else f"{f}:{format_dyadic(v)}")
    return "\n".join(parts)
