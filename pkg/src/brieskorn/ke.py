"""Exponent sequences and the Sasakian-Einstein existence inequality.

For ``a = (a_1, ..., a_m)`` the link of ``sum z_i**a_i = 0`` carries a
Sasakian-Einstein metric whenever

    1 < sum 1/a_i < 1 + (m-1)/(m-2) * min{1/a_i, 1/(b_i b_j)}

where ``b_j = gcd(a_j, lcm(a_i : i != j))``.  Both inequalities are strict and
evaluated over exact rationals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .numtheory import gcd_with_lcm_of_others, lcm_all


class PairMode(str, enum.Enum):
    """Which (i, j) pairs enter the ``1/(b_i b_j)`` part of the minimum."""

    INCLUDE_DIAGONAL = "include_diagonal"
    OFF_DIAGONAL_ONLY = "off_diagonal_only"


@dataclass(frozen=True)
class ExponentSequence:
    """Canonical (sorted) exponent sequence with its derived weight data."""

    a: tuple[int, ...]

    def __post_init__(self):
        if len(self.a) < 3:
            raise ValueError(f"need at least 3 exponents, got {len(self.a)}")
        if any(x < 2 for x in self.a):
            raise ValueError(f"all exponents must be >= 2, got {self.a}")
        if list(self.a) != sorted(self.a):
            raise ValueError("exponents must be sorted; use derive()")

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def link_dim(self) -> int:
        return 2 * self.m - 3

    @cached_property
    def C(self) -> int:
        return lcm_all(self.a)

    @cached_property
    def weights(self) -> tuple[int, ...]:
        return tuple(self.C // x for x in self.a)

    @cached_property
    def b(self) -> tuple[int, ...]:
        return tuple(gcd_with_lcm_of_others(self.a, j) for j in range(self.m))

    @cached_property
    def d(self) -> tuple[int, ...]:
        return tuple(x // y for x, y in zip(self.a, self.b))

    @cached_property
    def reciprocal_sum(self) -> Fraction:
        return Fraction(sum(self.weights), self.C)

    def __str__(self):
        return "(" + ",".join(map(str, self.a)) + ")"


def derive(raw: Iterable[int]) -> ExponentSequence:
    """Validate and sort a raw exponent list."""
    values = [int(x) for x in raw]
    return ExponentSequence(tuple(sorted(values)))


@dataclass(frozen=True)
class KECertificate:
    fano_sum: Fraction
    upper_bound: Fraction
    min_term: Fraction
    min_term_kind: str  # "reciprocal_a" or "reciprocal_bb"
    min_term_indices: tuple[int, int]
    pair_mode: PairMode
    passes_fano: bool
    passes_upper: bool

    @property
    def passes(self) -> bool:
        return self.passes_fano and self.passes_upper


def _largest_bb(b: tuple[int, ...], pair_mode: PairMode) -> tuple[int, tuple[int, int]]:
    order = sorted(range(len(b)), key=lambda i: (-b[i], i))
    i = order[0]
    if pair_mode is PairMode.INCLUDE_DIAGONAL:
        return b[i] * b[i], (i, i)
    j = order[1]
    return b[i] * b[j], (min(i, j), max(i, j))


def min_term_of(seq: ExponentSequence, pair_mode: PairMode = PairMode.INCLUDE_DIAGONAL):
    """``min{1/a_i, 1/(b_i b_j)}`` with the kind and indices that realize it."""
    pair_mode = PairMode(pair_mode)
    bb, pair = _largest_bb(seq.b, pair_mode)
    last = seq.m - 1  # sorted, so the largest a_i sits at the end
    if seq.a[last] >= bb:
        return Fraction(1, seq.a[last]), "reciprocal_a", (last, last)
    return Fraction(1, bb), "reciprocal_bb", pair


def check_ke(
    seq: ExponentSequence, pair_mode: PairMode = PairMode.INCLUDE_DIAGONAL
) -> KECertificate:
    pair_mode = PairMode(pair_mode)
    m = seq.m
    term, kind, pair = min_term_of(seq, pair_mode)
    upper = 1 + Fraction(m - 1, m - 2) * term
    s = seq.reciprocal_sum
    return KECertificate(
        fano_sum=s,
        upper_bound=upper,
        min_term=term,
        min_term_kind=kind,
        min_term_indices=pair,
        pair_mode=pair_mode,
        passes_fano=s > 1,
        passes_upper=s < upper,
    )


def check_contact_exclusion(seq: ExponentSequence) -> bool:
    """True when the quotient orbifold provably has no holomorphic contact structure."""
    if seq.m < 4:
        raise ValueError("contact exclusion criterion needs m >= 4")
    # (2/(m-1)) * (sum w_i - C) < min w_i, cleared of denominators.
    excess = sum(seq.weights) - seq.C
    return 2 * excess < (seq.m - 1) * min(seq.weights)


def has_finite_automorphisms(seq: ExponentSequence) -> bool:
    return seq.m >= 4 and seq.a.count(2) <= 1
