"""Homeomorphism type of Brieskorn-Pham links.

Brieskorn's graph has one vertex per exponent and an edge between ``a_i`` and
``a_j`` whenever they share a factor.  For ``m >= 4`` the link is a
topological sphere iff the graph has two isolated vertices, or it has exactly
one isolated vertex, that vertex is odd, and the component holding the even
vertices has an odd number of vertices with every pairwise gcd equal to 2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .ke import ExponentSequence
from .numtheory import BPEven, bp_even_status


class Criterion(str, enum.Enum):
    TWO_ISOLATED = "TwoIsolated"
    EVEN_COMPONENT_RULE = "EvenComponentRule"
    NOT_SPHERE = "NotSphere"


class Kervaire(str, enum.Enum):
    NOT_APPLICABLE = "NotApplicable"
    STANDARD = "Standard"
    KERVAIRE_SPHERE = "KervaireSphere"


@dataclass(frozen=True)
class BrieskornGraph:
    values: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    components: tuple[tuple[int, ...], ...]
    ev_component: Optional[tuple[int, ...]]
    isolated: tuple[int, ...]

    @property
    def isolated_odd(self) -> tuple[int, ...]:
        return tuple(i for i in self.isolated if self.values[i] % 2)

    def degree(self, i: int) -> int:
        return sum(i in e for e in self.edges)


def build_graph(seq: ExponentSequence) -> BrieskornGraph:
    a = seq.a
    n = len(a)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    touched = [False] * n
    for i, j in combinations(range(n), 2):
        if math.gcd(a[i], a[j]) > 1:
            edges.append((i, j))
            touched[i] = touched[j] = True
            parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    components = tuple(sorted(tuple(g) for g in groups.values()))

    evens = [i for i in range(n) if a[i] % 2 == 0]
    ev_component = None
    if evens:
        root = find(evens[0])
        ev_component = next(c for c in components if find(c[0]) == root)

    return BrieskornGraph(
        values=a,
        edges=tuple(edges),
        components=components,
        ev_component=ev_component,
        isolated=tuple(i for i in range(n) if not touched[i]),
    )


def is_homotopy_sphere(graph: BrieskornGraph) -> tuple[bool, Criterion]:
    if len(graph.values) < 4:
        raise ValueError("the graph criterion is only stated for m >= 4")
    if len(graph.isolated) >= 2:
        return True, Criterion.TWO_ISOLATED
    if len(graph.isolated) == 1 and graph.isolated_odd and graph.ev_component:
        ev = graph.ev_component
        vals = graph.values
        if len(ev) % 2 == 1 and all(
            math.gcd(vals[i], vals[j]) == 2 for i, j in combinations(ev, 2)
        ):
            return True, Criterion.EVEN_COMPONENT_RULE
    return False, Criterion.NOT_SPHERE


def arf_class(graph: BrieskornGraph, seq: ExponentSequence) -> Kervaire:
    """Arf invariant of the Milnor fiber, for homotopy spheres of dimension 4k+1."""
    if seq.link_dim % 4 != 1:
        return Kervaire.NOT_APPLICABLE
    sphere, criterion = is_homotopy_sphere(graph)
    if not sphere:
        return Kervaire.NOT_APPLICABLE
    if criterion is Criterion.EVEN_COMPONENT_RULE:
        a0 = graph.values[graph.isolated[0]]
        if a0 % 8 in (3, 5):
            return Kervaire.KERVAIRE_SPHERE
    return Kervaire.STANDARD


def kervaire_exotic(kervaire: Kervaire, link_dim: int) -> Optional[bool]:
    """Whether the sphere is exotic; ``None`` where bP_{4k+2} is still open."""
    if kervaire is not Kervaire.KERVAIRE_SPHERE:
        return False
    status = bp_even_status(link_dim + 1)
    if status is BPEven.UNKNOWN:
        return None
    return status is BPEven.Z2


@dataclass(frozen=True)
class LinkClass:
    link_dim: int
    is_homotopy_sphere: bool
    criterion: Criterion
    kervaire: Kervaire
    bp_class: Optional[int] = None
    exotic: Optional[bool] = False
    arf_invariant: Optional[int] = None


def classify_link(seq: ExponentSequence) -> LinkClass:
    """Topological verdict without the signature-based bP class.

    ``kervaire`` is the diffeomorphism verdict: where bP_{4k+2} vanishes the
    Kervaire sphere is standard, so it is reported as ``STANDARD`` while
    ``arf_invariant`` keeps the raw value.
    """
    graph = build_graph(seq)
    sphere, criterion = is_homotopy_sphere(graph)
    arf = arf_class(graph, seq)
    kervaire = arf
    arf_value = None
    if arf is not Kervaire.NOT_APPLICABLE:
        arf_value = int(arf is Kervaire.KERVAIRE_SPHERE)
        if arf_value and bp_even_status(seq.link_dim + 1) is BPEven.ZERO:
            kervaire = Kervaire.STANDARD
    return LinkClass(
        link_dim=seq.link_dim,
        is_homotopy_sphere=sphere,
        criterion=criterion,
        kervaire=kervaire,
        exotic=kervaire_exotic(kervaire, seq.link_dim) if sphere else None,
        arf_invariant=arf_value,
    )
