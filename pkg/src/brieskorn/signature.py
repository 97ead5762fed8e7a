"""Signature of the Milnor fiber and the resulting class in bP_{4k}.

With ``C = lcm(a)`` and ``w_i = C / a_i`` every lattice point
``0 < x_i < a_i`` has the integer "height" ``s = sum x_i w_i``.  The signature
counts points with ``s / C`` in ``(0, 1) mod 2`` positively and points in
``(1, 2) mod 2`` negatively; points with ``s`` a multiple of ``C`` are
ignored.  Three independent evaluations are provided:

* :func:`signature_brute` walks the whole lattice,
* :func:`signature_dp` folds a histogram of heights modulo ``2C`` one
  coordinate at a time and counts the last coordinate in closed form,
* :func:`signature_zagier` sums the cotangent formula in multiprecision
  floating point with an explicit error bound.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .ke import ExponentSequence
from .numtheory import bp_order

DEFAULT_BRUTE_BUDGET = 10**8
DEFAULT_DP_BUDGET = 10**8
DEFAULT_ZAGIER_CAP = 10**5

_INT64_SAFE = 2**62


class Method(str, enum.Enum):
    BRUTE_LATTICE = "BruteLattice"
    POLYNOMIAL_DP = "PolynomialDP"
    ZAGIER_FLOAT = "ZagierFloat"


class SignatureNotApplicable(ValueError):
    """Signature requested for an even number of exponents."""


class BudgetExceeded(RuntimeError):
    """The requested method would exceed its configured work budget."""


class PrecisionInsufficient(ArithmeticError):
    pass


@dataclass(frozen=True)
class SignatureResult:
    tau: int
    method: Method
    lattice_size: int
    N: int
    error_bound: float = 0.0


def _require_odd(seq: ExponentSequence):
    if seq.m % 2 == 0:
        raise SignatureNotApplicable(
            f"signature needs an odd number of exponents (link dim 4k-1), got m={seq.m}"
        )


def lattice_size(seq: ExponentSequence) -> int:
    return math.prod(x - 1 for x in seq.a)


def signature_brute(seq: ExponentSequence, budget: int = DEFAULT_BRUTE_BUDGET) -> SignatureResult:
    """Count every lattice point directly."""
    _require_odd(seq)
    size = lattice_size(seq)
    if size > budget:
        raise BudgetExceeded(
            f"lattice has {size} points (budget {budget}); use the dp method instead"
        )
    C, w, a = seq.C, seq.weights, seq.a
    # Vectorize the innermost coordinates, loop in Python over the rest.
    split = len(a)
    inner_size = 1
    while split > 0 and inner_size * (a[split - 1] - 1) <= 2**20:
        split -= 1
        inner_size *= a[split] - 1
    inner = np.zeros(1, dtype=object if C * len(a) >= _INT64_SAFE else np.int64)
    for ai, wi in zip(a[split:], w[split:]):
        steps = np.arange(1, ai, dtype=inner.dtype) * wi
        inner = (inner[:, None] + steps[None, :]).ravel()

    tau = 0
    outer_ranges = [range(1, ai) for ai in a[:split]]
    for xs in itertools.product(*outer_ranges):
        offset = sum(x * wi for x, wi in zip(xs, w))
        s = inner + offset
        q, r = np.divmod(s, C)
        live = r != 0
        even = (q % 2 == 0) & live
        tau += int(np.count_nonzero(even)) - int(np.count_nonzero(live & ~even))
    return SignatureResult(tau=tau, method=Method.BRUTE_LATTICE, lattice_size=size, N=C)


def _fold(support, counts, a_i, w_i, period):
    """Add coordinate ``x in [1, a_i)`` to a sparse height histogram mod ``period``."""
    steps = np.arange(1, a_i, dtype=support.dtype) * w_i
    heights = ((support[:, None] + steps[None, :]) % period).ravel()
    weights = np.repeat(counts, a_i - 1)
    order = np.argsort(heights, kind="stable")
    heights = heights[order]
    weights = weights[order]
    starts = np.flatnonzero(np.r_[True, heights[1:] != heights[:-1]])
    return heights[starts], np.add.reduceat(weights, starts)


def _fold_dense(support, counts, a_i, w_i, period):
    dense = np.zeros(period, dtype=counts.dtype)
    dense[support] = counts
    acc = np.zeros_like(dense)
    for x in range(1, a_i):
        acc += np.roll(dense, x * w_i)
    nz = np.flatnonzero(acc)
    return nz.astype(support.dtype), acc[nz]


def _last_axis_signed_count(support, counts, a_last, w_last, C):
    """Signed count after adding the last coordinate, in closed form.

    For height ``s = q w + r`` the point ``x`` lands strictly inside
    ``(jC, (j+1)C)`` iff ``j a - q + [r == 0] <= x <= (j+1) a - q - 1``.
    Heights are below ``2C`` and ``x w < C``, so only ``j = 0, 1, 2`` occur.
    """
    q, r = np.divmod(support, w_last)
    exact = (r == 0).astype(q.dtype)
    total = 0
    for j, sign in ((0, 1), (1, -1), (2, 1)):
        lo = np.maximum(j * a_last - q + exact, 1)
        hi = np.minimum((j + 1) * a_last - q - 1, a_last - 1)
        n = np.maximum(hi - lo + 1, 0)
        total += sign * int((n * counts).sum())
    return total


def signature_dp(seq: ExponentSequence, budget: int = DEFAULT_DP_BUDGET) -> SignatureResult:
    """Histogram of heights modulo 2C, built one coordinate at a time."""
    _require_odd(seq)
    C = seq.C
    period = 2 * C
    size = lattice_size(seq)
    count_dtype = np.int64 if size < _INT64_SAFE else object
    height_dtype = np.int64 if 3 * C < _INT64_SAFE else object

    a, w = seq.a, seq.weights  # sorted: the largest exponent is folded last
    support = np.zeros(1, dtype=height_dtype)
    counts = np.ones(1, dtype=count_dtype)
    for ai, wi in zip(a[:-1], w[:-1]):
        sparse_cost = len(support) * (ai - 1)
        dense_cost = period * (ai - 1)
        if min(sparse_cost, dense_cost) > budget:
            raise BudgetExceeded(
                f"dp step needs ~{min(sparse_cost, dense_cost)} operations (budget {budget})"
            )
        if sparse_cost <= dense_cost or height_dtype is object:
            support, counts = _fold(support, counts, ai, wi, period)
        else:
            support, counts = _fold_dense(support, counts, ai, wi, period)
    tau = _last_axis_signed_count(support, counts, a[-1], w[-1], C)
    return SignatureResult(tau=tau, method=Method.POLYNOMIAL_DP, lattice_size=size, N=C)


def _cot_table(a: int, prec: int):
    """cot(pi r / (2a)) for odd r in [1, 2a), with absolute error bounds."""
    vals, errs = {}, {}
    u = 2.0 ** (2 - prec)
    with mpmath.workprec(prec):
        for r in range(1, 2 * a, 2):
            # Reduce to (0, pi/2]: cot(pi - y) = -cot(y).
            rr, sign = (r, 1) if 2 * r <= 2 * a else (2 * a - r, -1)
            y = mpmath.pi * rr / (2 * a)
            c = mpmath.cot(y)
            vals[r] = sign * c
            cf = abs(float(c))
            # rounding of cot itself plus propagation of the argument error
            errs[r] = u * (cf + (1 + cf * cf) * float(y)) * 2
    return vals, errs


def signature_zagier(
    seq: ExponentSequence, precision: int = 64, cap: int = DEFAULT_ZAGIER_CAP
) -> SignatureResult:
    """Cotangent-sum evaluation, rounded only when the error bound is below 1/2."""
    _require_odd(seq)
    N = seq.C
    if N > cap:
        raise BudgetExceeded(f"lcm {N} exceeds the cotangent-sum cap {cap}")
    k = (seq.m - 1) // 2
    tables = [_cot_table(x, precision) for x in (N, *seq.a)]
    mods = [2 * x for x in (N, *seq.a)]
    u = 2.0 ** (1 - precision)
    nfac = len(mods)
    terms = []
    err = 0.0
    abs_sum = 0.0
    with mpmath.workprec(precision):
        for j in range(N):
            r = 2 * j + 1
            prod = mpmath.mpf(1)
            mag = 1.0
            mag_hi = 1.0
            for (vals, errs), mod in zip(tables, mods):
                rr = r % mod
                v = vals[rr]
                prod *= v
                fv = abs(float(v))
                mag *= fv
                mag_hi *= fv + errs[rr]
            terms.append(prod)
            err += (mag_hi - mag) + nfac * u * mag_hi
            abs_sum += mag_hi
        total = mpmath.fsum(terms)
        value = (-1) ** k * total / N
    bound = (err + (nfac + 2) * u * abs_sum) / N
    bound *= 1.01  # float64 slack in the bound arithmetic itself
    nearest = int(mpmath.nint(value))
    if bound >= 0.5 or abs(float(value) - nearest) + bound >= 0.5:
        raise PrecisionInsufficient(
            f"error bound {bound:.3g} too large to round {float(value):.6g} at {precision} bits"
        )
    return SignatureResult(
        tau=nearest,
        method=Method.ZAGIER_FLOAT,
        lattice_size=lattice_size(seq),
        N=N,
        error_bound=bound,
    )


def signature(seq: ExponentSequence, method: Method | str = Method.POLYNOMIAL_DP) -> SignatureResult:
    method = Method(method) if not isinstance(method, Method) else method
    if method is Method.BRUTE_LATTICE:
        return signature_brute(seq)
    if method is Method.ZAGIER_FLOAT:
        return signature_zagier(seq)
    return signature_dp(seq)


def bp_class_of(tau: int, link_dim: int) -> int:
    """Class of the homotopy sphere in bP_{4k} (0 is the standard sphere)."""
    if link_dim % 4 != 3 or link_dim < 7:
        raise ValueError(f"bP classes exist for link dimension 4k-1 >= 7, got {link_dim}")
    if tau % 8:
        raise ValueError(f"signature {tau} is not divisible by 8; not a homotopy sphere")
    return (tau // 8) % bp_order(link_dim + 1)


def unoriented_class(cls: int, link_dim: int) -> int:
    """Identify a class with its inverse (orientation reversal)."""
    order = bp_order(link_dim + 1)
    cls %= order
    return min(cls, order - cls)
