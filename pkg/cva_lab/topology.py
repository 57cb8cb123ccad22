"""Finite topological spaces: construction from subbases and network graphs, and the inclusion order."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import chain, combinations
from typing import TYPE_CHECKING

from cva_lab.exceptions import DomainError
from cva_lab.settings import CvaLabSettings

if TYPE_CHECKING:
    from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

SETTINGS = CvaLabSettings()

OpenSet = frozenset
"""Open sets are frozensets of atom names; `canonical` gives the sorted list form."""


def canonical(atoms: Iterable[str]) -> list[str]:
    """Sorted list form of a set of atoms."""
    return sorted(atoms)


def _open_key(s: frozenset[str]) -> tuple[int, list[str]]:
    return (len(s), canonical(s))


@dataclass(frozen=True)
class Topology:
    """
    A finite ground set with its family of open sets.

    Parameters
    -----------
    ground : frozenset[str]
        Atom identifiers.
    opens : tuple[frozenset[str], ...]
        Open sets, ordered by size then lexicographically.
    """

    ground: frozenset[str]
    opens: tuple[frozenset[str], ...]
    _open_set: frozenset[frozenset[str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        family = frozenset(self.opens)
        if frozenset() not in family or self.ground not in family:
            raise DomainError("a topology must contain the empty set and the ground set")
        for a, b in combinations(family, 2):
            if a | b not in family or a & b not in family:
                raise DomainError(f"open sets {canonical(a)} and {canonical(b)} break union/intersection closure")
        object.__setattr__(self, "opens", tuple(sorted(family, key=_open_key)))
        object.__setattr__(self, "_open_set", family)

    def is_open(self, atoms: Iterable[str]) -> bool:
        return frozenset(atoms) in self._open_set

    def require_open(self, atoms: Iterable[str]) -> frozenset[str]:
        """Return `atoms` as an open set, raising DomainError if it is not one."""
        s = frozenset(atoms)
        if s not in self._open_set:
            if not s <= self.ground:
                raise DomainError(f"{canonical(s - self.ground)} not in the ground set")
            raise DomainError(
                f"{canonical(s)} is not an open set of this topology; "
                f"it lies between {canonical(self.interior(s))} and {canonical(self.hull(s))}"
            )
        return s

    def hull(self, atoms: Iterable[str]) -> frozenset[str]:
        """Smallest open set containing `atoms`."""
        s = frozenset(atoms)
        if not s <= self.ground:
            raise DomainError(f"{canonical(s - self.ground)} not in the ground set")
        smallest = self.ground
        for u in self.opens:
            if s <= u:
                smallest = smallest & u
        return smallest

    def interior(self, atoms: Iterable[str]) -> frozenset[str]:
        """Largest open set contained in `atoms`."""
        s = frozenset(atoms)
        largest: frozenset[str] = frozenset()
        for u in self.opens:
            if u <= s:
                largest = largest | u
        return largest

    def subopens(self, a: frozenset[str]) -> list[frozenset[str]]:
        """Open subsets of `a`, smallest first."""
        return [b for b in self.opens if b <= a]

    def as_dict(self) -> dict:
        return {"ground": canonical(self.ground), "opens": [canonical(u) for u in self.opens]}

    def __len__(self) -> int:
        return len(self.opens)


def _check_ground(ground: Iterable[str], max_atoms: int | None) -> frozenset[str]:
    atoms = list(ground)
    if len(set(atoms)) != len(atoms):
        raise DomainError("atom identifiers must be unique")
    max_atoms = SETTINGS.MAX_GROUND_ATOMS if max_atoms is None else max_atoms
    if len(atoms) > max_atoms:
        raise DomainError(f"ground set has {len(atoms)} atoms; at most {max_atoms} are supported")
    return frozenset(atoms)


def _close(family: set[frozenset[str]]) -> set[frozenset[str]]:
    # pairwise closure suffices for finite families
    frontier = set(family)
    while frontier:
        new: set[frozenset[str]] = set()
        for a in frontier:
            for b in family:
                for c in (a | b, a & b):
                    if c not in family:
                        new.add(c)
        family |= new
        frontier = new
    return family


def generate_topology(
    ground: Iterable[str],
    subbasis: Iterable[Iterable[str]],
    max_atoms: int | None = None,
) -> Topology:
    """
    Smallest topology on `ground` containing every set of `subbasis`.

    Parameters
    -----------
    ground : Iterable[str]
        Atom identifiers.
    subbasis : Iterable[Iterable[str]]
        Generating subsets of the ground set.
    max_atoms : int or None
        Ground-set cap, defaults to `MAX_GROUND_ATOMS` in the settings.
    """
    x = _check_ground(ground, max_atoms)
    family: set[frozenset[str]] = {frozenset(), x}
    for member in subbasis:
        s = frozenset(member)
        if not s <= x:
            raise DomainError(f"subbasis element {canonical(s)} is not contained in the ground set")
        family.add(s)
    opens = _close(family)
    logger.debug("generated %d open sets on %d atoms", len(opens), len(x))
    return Topology(ground=x, opens=tuple(opens))


def alexandrov_from_graph(
    nodes: Iterable[str],
    edges: Iterable[tuple[str, Sequence[str]]],
    max_atoms: int | None = None,
) -> Topology:
    """
    Alexandrov topology of the face poset of a graph.

    The ground set is nodes plus edge labels; a node lies below each edge it is an
    endpoint of, and the open sets are the upward-closed sets.
    """
    node_list = list(nodes)
    edge_list = [(label, tuple(ends)) for label, ends in edges]
    labels = [label for label, _ in edge_list]
    if len(set(labels)) != len(labels):
        raise DomainError("duplicate edge labels")
    if set(labels) & set(node_list):
        raise DomainError("edge labels must differ from node names")
    x = _check_ground(node_list + labels, max_atoms)

    above: dict[str, set[str]] = {node: set() for node in node_list}
    for label, ends in edge_list:
        for end in ends:
            if end not in above:
                raise DomainError(f"edge {label} references undeclared node {end}")
            above[end].add(label)

    # an up-set is any set of edges plus the nodes all of whose edges it contains
    opens: set[frozenset[str]] = set()
    for k in range(len(labels) + 1):
        for chosen in combinations(labels, k):
            chosen_set = set(chosen)
            allowed = [node for node in node_list if above[node] <= chosen_set]
            for j in range(len(allowed) + 1):
                for extra in combinations(allowed, j):
                    opens.add(frozenset(chosen_set | set(extra)))
    logger.debug("face poset of %d nodes and %d edges has %d up-sets", len(node_list), len(labels), len(opens))
    return Topology(ground=x, opens=tuple(opens))


def discrete_topology(ground: Iterable[str], max_atoms: int | None = None) -> Topology:
    """Topology whose open sets are all subsets of `ground`."""
    x = _check_ground(ground, max_atoms)
    atoms = canonical(x)
    powerset = chain.from_iterable(combinations(atoms, k) for k in range(len(atoms) + 1))
    return Topology(ground=x, opens=tuple(frozenset(s) for s in powerset))


def inclusions(t: Topology) -> list[tuple[frozenset[str], frozenset[str]]]:
    """All pairs (B, A) of open sets with B a subset of A, reflexive pairs included."""
    return [(b, a) for a in t.opens for b in t.opens if b <= a]
