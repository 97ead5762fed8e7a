"""Weighted-homogeneous monomial counts and moduli of the Einstein families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .ke import ExponentSequence, has_finite_automorphisms

DEFAULT_STATE_CAP = 10**7


class ModuliBudgetExceeded(RuntimeError):
    pass


def count_monomials(weights: Sequence[int], degree: int, state_cap: int = DEFAULT_STATE_CAP) -> int:
    """Number of monomials of weighted degree ``degree`` (the denumerant).

    Dynamic programming over the reachable partial degrees, one weight at a
    time.  The smallest weight is handled last in closed form: a partial
    degree ``s`` extends in exactly one way iff ``degree - s`` is a multiple
    of it.
    """
    if not weights:
        raise ValueError("need at least one weight")
    if any(w < 1 for w in weights):
        raise ValueError("weights must be positive")
    if degree < 0:
        return 0
    ws = sorted(weights, reverse=True)
    states: dict[int, int] = {0: 1}
    for w in ws[:-1]:
        nxt: dict[int, int] = {}
        for s, c in states.items():
            for t in range(s, degree + 1, w):
                nxt[t] = nxt.get(t, 0) + c
        states = nxt
        if len(states) > state_cap:
            raise ModuliBudgetExceeded(
                f"{len(states)} partial degrees exceed the cap {state_cap}"
            )
    last = ws[-1]
    return sum(c for s, c in states.items() if (degree - s) % last == 0)


def sylvester_giant_index(seq: ExponentSequence) -> Optional[int]:
    """If ``a = (c_1, ..., c_{m-1}, (c_{m-1} - 2) c_{m-1})``, return ``c_{m-1}``."""
    from .search import sylvester

    m = seq.m
    prefix = tuple(sylvester(k) for k in range(1, m))
    c = prefix[-1]
    if seq.a[:-1] == prefix and seq.a[-1] == (c - 2) * c:
        return c
    return None


@dataclass(frozen=True)
class ModuliReport:
    dim_sections_d: Optional[int]
    dim_sections_wi: Optional[tuple[int, ...]]
    complex_dim: int
    real_dim: int
    exact: bool
    clamped: bool = False
    closed_form: bool = False


def moduli_dimension(
    seq: ExponentSequence, use_fast_path: bool = True, state_cap: int = DEFAULT_STATE_CAP
) -> ModuliReport:
    """Dimension of the family of hypersurfaces of degree C modulo automorphisms.

    The count is ``dim H0(d) - sum dim H0(w_i)`` at ``d = C``; it is a lower
    bound in general and exact when the automorphism group is finite.
    """
    exact = has_finite_automorphisms(seq)
    if use_fast_path:
        c = sylvester_giant_index(seq)
        if c is not None:
            cdim = c - 2
            return ModuliReport(None, None, cdim, 2 * cdim, exact, closed_form=True)
    w = seq.weights
    top = count_monomials(w, seq.C, state_cap)
    per_weight = tuple(count_monomials(w, wi, state_cap) for wi in w)
    raw = top - sum(per_weight)
    cdim = max(raw, 0)
    return ModuliReport(top, per_weight, cdim, 2 * cdim, exact, clamped=raw < 0)
