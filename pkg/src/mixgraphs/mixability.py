"""Deciding perfect mixability.

A configuration with at least four droplets and integral values and mean
is perfectly mixable exactly when, for every odd modulus b, all values
sharing one residue class mod b forces the mean into that class too.
Only moduli that are powers of odd prime factors of n and at most the
largest absolute concentration ever need checking, which is what makes
the test polynomial.  n <= 3 has its own rules: n <= 2 is always
mixable, and {a, b, c} is mixable iff b is the average of a and c.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .config import Configuration, normalize_integral, stats
from .dyadic import mid, odd_prime_power_candidates

__all__ = [
    "Reason",
    "MixabilityVerdict",
    "is_b_congruent",
    "check_mc",
    "is_perfectly_mixable",
]


class Reason(enum.Enum):
    ALL_EQUAL = "AllEqual"
    CONDITION_MC = "ConditionMC"
    SMALL_N_RULE = "SmallNRule"
    NON_DYADIC_MEAN = "NonDyadicMean"
    MC_VIOLATION = "MCViolation"
    N3_VIOLATION = "N3Violation"
    N2_TRIVIAL = "N2Trivial"


@dataclass(frozen=True)
class MixabilityVerdict:
    """Outcome of the mixability test, with a witness modulus on violation."""

    mixable: bool
    reason: Reason
    witness_b: int | None = None

    def describe(self) -> str:
        if self.reason is Reason.MC_VIOLATION:
            return f"congruence violation at odd modulus b={self.witness_b}"
        if self.reason is Reason.N3_VIOLATION:
            return "three droplets whose middle value is not the average of the outer two"
        if self.reason is Reason.NON_DYADIC_MEAN:
            return "average has no finite binary representation"
        return self.reason.value


def is_b_congruent(A: Configuration, b: int) -> bool:
    """True iff all values of A share one residue class mod b."""
    if b < 1:
        raise ValueError(f"modulus must be positive, got {b}")
    counter = A.as_int_counter()
    residues = {v % b for v in counter}
    return len(residues) <= 1


def check_mc(C_int: Configuration) -> MixabilityVerdict:
    """Congruence test over ascending prime-power moduli.

    Returns the first violating modulus, giving deterministic witnesses.
    Requires integral values and integral mean.
    """
    counter = C_int.as_int_counter()
    st = stats(C_int)
    if st.mu is None or not st.mu.is_integer:
        raise ValueError("congruence test requires an integral mean")
    mu = st.mu.as_integer()
    n = st.n
    c_max = st.c_max.as_integer()
    values = list(counter)
    for b in odd_prime_power_candidates(n, c_max):
        residues = {v % b for v in values}
        if len(residues) == 1 and mu % b not in residues:
            return MixabilityVerdict(False, Reason.MC_VIOLATION, witness_b=b)
    return MixabilityVerdict(True, Reason.CONDITION_MC)


def is_perfectly_mixable(C: Configuration) -> MixabilityVerdict:
    """Full dispatch over general dyadic configurations."""
    if C.n == 0:
        raise ValueError("empty configuration")
    st = stats(C)
    if st.mu is None:
        return MixabilityVerdict(False, Reason.NON_DYADIC_MEAN)
    if C.m == 1:
        return MixabilityVerdict(True, Reason.ALL_EQUAL)
    if C.n <= 2:
        return MixabilityVerdict(True, Reason.N2_TRIVIAL)
    if C.n == 3:
        droplets = list(C.droplets())
        if droplets[1] == mid(droplets[0], droplets[2]):
            return MixabilityVerdict(True, Reason.SMALL_N_RULE)
        return MixabilityVerdict(False, Reason.N3_VIOLATION)
    C_int, _ = normalize_integral(C)
    return check_mc(C_int)
