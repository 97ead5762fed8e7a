"""Exhaustive search for Einstein homotopy-sphere links, plus closed-form families.

A *family* is a sorted exponent sequence that satisfies the existence
inequality and whose link is a homotopy sphere.  Sequences are generated
depth first in lexicographic order.  Work is split on the first two entries;
each such prefix is an independent task, and tasks are merged back in order,
so the output does not depend on the number of workers.
"""

from __future__ import annotations

import enum
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .ke import (
    ExponentSequence,
    KECertificate,
    PairMode,
    check_contact_exclusion,
    check_ke,
    derive,
)
from .moduli import moduli_dimension
from .numtheory import is_prime
from .signature import BudgetExceeded, Method, bp_class_of, signature
from .topology import LinkClass, build_graph, classify_link, is_homotopy_sphere


def sylvester(k: int) -> int:
    """k-th term of 2, 3, 7, 43, 1807, ... (c_{k+1} = c_k**2 - c_k + 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    c = 2
    for _ in range(k - 1):
        c = c * c - c + 1
    return c


@dataclass(frozen=True)
class EnumerationRecord:
    a: tuple[int, ...]
    certificate: KECertificate
    link: LinkClass
    tau: Optional[int]
    moduli_real_dim: int
    contact_excluded: bool

    @property
    def class_key(self) -> Optional[str]:
        """Label used for per-class tallies."""
        if not self.link.is_homotopy_sphere:
            return None
        if self.link.bp_class is not None:
            return str(self.link.bp_class)
        return self.link.kervaire.value


def classify(
    seq: ExponentSequence,
    pair_mode: PairMode = PairMode.INCLUDE_DIAGONAL,
    method: Method | str = Method.POLYNOMIAL_DP,
) -> EnumerationRecord:
    """Run every check on one sequence (m >= 4)."""
    if seq.m < 4:
        raise ValueError("classification needs m >= 4")
    cert = check_ke(seq, pair_mode)
    link = classify_link(seq)
    tau = None
    if seq.m % 2 == 1:
        try:
            tau = signature(seq, method).tau
        except BudgetExceeded:
            if link.is_homotopy_sphere:
                raise
    if link.is_homotopy_sphere and tau is not None and seq.link_dim % 4 == 3:
        cls = bp_class_of(tau, seq.link_dim)
        link = LinkClass(
            link_dim=link.link_dim,
            is_homotopy_sphere=True,
            criterion=link.criterion,
            kervaire=link.kervaire,
            bp_class=cls,
            exotic=cls != 0,
        )
    return EnumerationRecord(
        a=seq.a,
        certificate=cert,
        link=link,
        tau=tau,
        moduli_real_dim=moduli_dimension(seq).real_dim,
        contact_excluded=check_contact_exclusion(seq),
    )


# -- candidate generation ---------------------------------------------------


def _m_for_dim(link_dim: int) -> int:
    if link_dim < 5 or link_dim % 2 == 0:
        raise ValueError(f"link dimension must be odd and >= 5, got {link_dim}")
    return (link_dim + 3) // 2


def _next_entries(m: int, prefix: tuple[int, ...], S: Fraction, max_last: Optional[int]):
    """Admissible values for the entry after ``prefix`` (not the last entry)."""
    k = len(prefix)
    x = prefix[-1] if prefix else 2
    remaining = m - k
    while S + Fraction(remaining, x) > 1:
        if max_last is not None and x > max_last:
            return
        S2 = S + Fraction(1, x)
        if k + 1 <= m - 2:
            # Reaching 1 before the last two entries leaves no room for the
            # upper bound, whose minimum term is at most 1/a_m.
            if S2 < 1:
                yield x, S2
        elif S2 < 1 or (S2 > 1 and (S2 - 1) * (m - 2) * x < 1):
            # S2 == 1 is skipped: all of a_1..a_{m-1} then share primes
            # pairwise, and no homotopy sphere can arise.
            yield x, S2
        x += 1


def _last_entry_range(m: int, prefix: tuple[int, ...], S: Fraction, max_last: Optional[int]) -> range:
    lo = prefix[-1]
    if S < 1:
        # Fano: a_m (1 - S) < 1
        gap = 1 - S
        hi = math.ceil(1 / gap) - 1
    else:
        # Relaxed upper bound: (S - 1)(m - 2) a_m < 1
        excess = (S - 1) * (m - 2)
        hi = math.ceil(1 / excess) - 1
    if max_last is not None:
        hi = min(hi, max_last)
    return range(lo, hi + 1)


def _candidates(m: int, prefix: tuple[int, ...], S: Fraction, max_last: Optional[int]) -> Iterator[tuple[int, ...]]:
    if len(prefix) == m - 1:
        for x in _last_entry_range(m, prefix, S, max_last):
            yield prefix + (x,)
        return
    for x, S2 in _next_entries(m, prefix, S, max_last):
        yield from _candidates(m, prefix + (x,), S2, max_last)


def prefix_tasks(link_dim: int, max_last: Optional[int] = None) -> list[tuple[int, int]]:
    """All admissible (a_1, a_2) pairs, in lexicographic order."""
    m = _m_for_dim(link_dim)
    tasks = []
    for x1, S1 in _next_entries(m, (), Fraction(0), max_last):
        for x2, _ in _next_entries(m, (x1,), S1, max_last):
            tasks.append((x1, x2))
    return tasks


@dataclass
class PrefixResult:
    prefix: tuple[int, int]
    records: list[EnumerationRecord]
    candidates: int
    alt_passing: int


def _alternate(mode: PairMode) -> PairMode:
    if mode is PairMode.INCLUDE_DIAGONAL:
        return PairMode.OFF_DIAGONAL_ONLY
    return PairMode.INCLUDE_DIAGONAL


def process_prefix(args) -> PrefixResult:
    """Search the subtree under one (a_1, a_2) prefix."""
    link_dim, prefix, pair_mode, max_last, method = args
    pair_mode = PairMode(pair_mode)
    m = _m_for_dim(link_dim)
    S = Fraction(1, prefix[0]) + Fraction(1, prefix[1])
    records = []
    n_candidates = 0
    alt_passing = 0
    alt_mode = _alternate(pair_mode)
    for a in _candidates(m, tuple(prefix), S, max_last):
        n_candidates += 1
        seq = ExponentSequence(a)
        sphere, _ = is_homotopy_sphere(build_graph(seq))
        if not sphere:
            continue
        if check_ke(seq, alt_mode).passes:
            alt_passing += 1
        if check_ke(seq, pair_mode).passes:
            records.append(classify(seq, pair_mode, method))
    return PrefixResult(tuple(prefix), records, n_candidates, alt_passing)


# -- tallies and checkpoints --------------------------------------------------


@dataclass
class Tally:
    total: int = 0
    alt_total: int = 0
    candidates: int = 0
    classes: dict[str, int] = field(default_factory=dict)
    contact_violations: list[str] = field(default_factory=list)
    tau_violations: list[str] = field(default_factory=list)

    def add(self, result: PrefixResult):
        self.candidates += result.candidates
        self.alt_total += result.alt_passing
        for rec in result.records:
            self.total += 1
            key = rec.class_key
            if key is not None:
                self.classes[key] = self.classes.get(key, 0) + 1
            label = ",".join(map(str, rec.a))
            if not rec.contact_excluded:
                self.contact_violations.append(label)
            if rec.tau is not None and rec.link.link_dim % 4 == 3 and rec.tau % 8:
                self.tau_violations.append(label)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "alt_total": self.alt_total,
            "candidates": self.candidates,
            "classes": dict(sorted(self.classes.items(), key=lambda kv: _class_sort_key(kv[0]))),
            "contact_violations": list(self.contact_violations),
            "tau_violations": list(self.tau_violations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tally":
        return cls(
            total=d["total"],
            alt_total=d["alt_total"],
            candidates=d["candidates"],
            classes=dict(d["classes"]),
            contact_violations=list(d["contact_violations"]),
            tau_violations=list(d["tau_violations"]),
        )


def _class_sort_key(key: str):
    return (0, int(key), "") if key.isdigit() else (1, 0, key)


@dataclass
class SearchCheckpoint:
    dimension: int
    pair_mode: PairMode
    max_last: Optional[int]
    last_completed_prefix: Optional[tuple[int, ...]]
    partial_counts: Tally
    output_bytes: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "format": "brieskorn-search-checkpoint/1",
            "dimension": self.dimension,
            "pair_mode": self.pair_mode.value,
            "max_last": self.max_last,
            "last_completed_prefix": (
                list(self.last_completed_prefix) if self.last_completed_prefix else None
            ),
            "partial_counts": self.partial_counts.to_dict(),
            "output_bytes": self.output_bytes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SearchCheckpoint":
        if d.get("format") != "brieskorn-search-checkpoint/1":
            raise ValueError("not a search checkpoint document")
        last = d["last_completed_prefix"]
        return cls(
            dimension=d["dimension"],
            pair_mode=PairMode(d["pair_mode"]),
            max_last=d["max_last"],
            last_completed_prefix=tuple(last) if last else None,
            partial_counts=Tally.from_dict(d["partial_counts"]),
            output_bytes=d.get("output_bytes"),
        )

    def save(self, path: str | os.PathLike):
        path = os.fspath(path)
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(prefix=".ckpt-", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(self.to_dict(), fh, indent=2)
                fh.write("\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path: str | os.PathLike) -> "SearchCheckpoint":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


class Search:
    """One enumeration run; iterate :meth:`records` and read :attr:`tally`."""

    def __init__(
        self,
        link_dim: int,
        pair_mode: PairMode | str = PairMode.INCLUDE_DIAGONAL,
        *,
        max_last: Optional[int] = None,
        jobs: int = 1,
        method: Method | str = Method.POLYNOMIAL_DP,
        resume: Optional[SearchCheckpoint] = None,
        on_prefix_complete: Optional[Callable[[SearchCheckpoint], None]] = None,
    ):
        self.m = _m_for_dim(link_dim)
        self.link_dim = link_dim
        self.pair_mode = PairMode(pair_mode)
        self.max_last = max_last
        self.jobs = max(1, jobs)
        self.method = Method(method)
        self.on_prefix_complete = on_prefix_complete
        self.tally = Tally()
        self.last_completed: Optional[tuple[int, ...]] = None
        self.finished = False
        if resume is not None:
            if (resume.dimension, resume.pair_mode, resume.max_last) != (
                link_dim,
                self.pair_mode,
                max_last,
            ):
                raise ValueError("checkpoint was written for a different search")
            self.tally = Tally.from_dict(resume.partial_counts.to_dict())
            self.last_completed = resume.last_completed_prefix

    @property
    def partial(self) -> bool:
        return self.max_last is not None

    def checkpoint(self) -> SearchCheckpoint:
        return SearchCheckpoint(
            dimension=self.link_dim,
            pair_mode=self.pair_mode,
            max_last=self.max_last,
            last_completed_prefix=self.last_completed,
            partial_counts=Tally.from_dict(self.tally.to_dict()),
        )

    def _results(self, tasks) -> Iterator[PrefixResult]:
        args = [
            (self.link_dim, t, self.pair_mode.value, self.max_last, self.method.value)
            for t in tasks
        ]
        if self.jobs == 1:
            yield from map(process_prefix, args)
            return
        with ProcessPoolExecutor(max_workers=self.jobs) as pool:
            yield from pool.map(process_prefix, args, chunksize=1)

    def records(self, stop_after_prefixes: Optional[int] = None) -> Iterator[EnumerationRecord]:
        tasks = prefix_tasks(self.link_dim, self.max_last)
        if self.last_completed is not None:
            tasks = [t for t in tasks if t > tuple(self.last_completed)]
        complete = stop_after_prefixes is None or stop_after_prefixes >= len(tasks)
        if not complete:
            tasks = tasks[:stop_after_prefixes]
        for result in self._results(tasks):
            self.tally.add(result)
            yield from result.records
            self.last_completed = result.prefix
            if self.on_prefix_complete is not None:
                self.on_prefix_complete(self.checkpoint())
        self.finished = complete


def enumerate_families(
    link_dim: int, pair_mode: PairMode | str = PairMode.INCLUDE_DIAGONAL, **kwargs
) -> Iterator[EnumerationRecord]:
    """Stream every family in the given link dimension, in lexicographic order."""
    yield from Search(link_dim, pair_mode, **kwargs).records()


# -- closed-form families -----------------------------------------------------


class FamilyKind(str, enum.Enum):
    TAIL_RANGE = "TailRange"
    MODULI_GIANT = "ModuliGiant"
    KERVAIRE_EVEN = "KervaireEven"


def generate_family(kind: FamilyKind | str, m: int) -> Iterator[ExponentSequence]:
    """Candidates from the Sylvester-sequence constructions; all pass check_ke.

    TailRange: ``(c_1, ..., c_{m-1}, a)`` with ``c_m - c_{m-1} < a < c_m`` and
    ``a`` prime to 6.  ModuliGiant: ``(c_1, ..., c_{m-1}, (c_{m-1}-2) c_{m-1})``.
    KervaireEven: ``(2c_1, ..., 2c_{m-2}, 2, p)`` with ``p`` prime and
    ``2c_{m-2} < p < 2c_{m-1} - 2``.
    """
    kind = FamilyKind(kind)
    if m < 4:
        raise ValueError("families are defined for m >= 4")
    c = [sylvester(k) for k in range(1, m + 1)]
    if kind is FamilyKind.TAIL_RANGE:
        head = tuple(c[: m - 1])
        for x in range(c[m - 1] - c[m - 2] + 1, c[m - 1]):
            if math.gcd(x, 6) != 1:
                continue
            seq = derive(head + (x,))
            if check_ke(seq).passes:
                yield seq
    elif kind is FamilyKind.MODULI_GIANT:
        top = c[m - 2]
        seq = derive(tuple(c[: m - 1]) + ((top - 2) * top,))
        assert check_ke(seq).passes, seq
        yield seq
    else:
        head = tuple(2 * x for x in c[: m - 2]) + (2,)
        for p in range(2 * c[m - 3] + 1, 2 * c[m - 2] - 2):
            if is_prime(p):
                seq = derive(head + (p,))
                assert check_ke(seq).passes, seq
                yield seq
