"""
Knowledgebases and inference problems.

The joint valuation of a knowledgebase is the fold of its items under one combine
operator; an inference problem asks for the joint restricted to each query domain.
For the commutative operator the joint never needs to be built: atoms outside the
query are eliminated one at a time, combining only the items that mention them and
restricting the result early, as licensed by the combination axiom.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import reduce
import logging
from typing import TYPE_CHECKING, Literal, Union

from cva_lab.cva import CvaInstance
from cva_lab.exceptions import DomainError, UnsupportedOperationError
from cva_lab.topology import canonical

if TYPE_CHECKING:
    from typing import Iterable, Sequence

    from cva_lab.ova import OvaInstance
    from cva_lab.topology import Topology
    from cva_lab.valuations import Prealgebra, Valuation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Knowledgebase:
    """
    A finite list of valuations of one algebra, combined with a chosen operator.

    Parameters
    -----------
    items : tuple[Valuation, ...]
        The valuations, in the order they are combined.
    model : CvaInstance or OvaInstance
        Algebra the valuations belong to.
    op : "seq" or "par"
        Which combine operator of a CVA to use; an OVA only has "par".
    """

    items: tuple
    model: Union[CvaInstance, OvaInstance]
    op: Literal["seq", "par"] = "par"

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise DomainError("a knowledgebase needs at least one valuation")
        if self.op not in ("seq", "par"):
            raise DomainError(f"unknown combine selector {self.op!r}")
        if self.op == "seq" and not isinstance(self.model, CvaInstance):
            raise UnsupportedOperationError(f"{self.model.name} has no sequential operator")
        topology = self.prealgebra.topology
        for v in self.items:
            topology.require_open(v.domain)

    @property
    def ova(self) -> OvaInstance:
        if isinstance(self.model, CvaInstance):
            return self.model.seq if self.op == "seq" else self.model.par
        return self.model

    @property
    def prealgebra(self) -> Prealgebra:
        return self.ova.prealgebra

    @property
    def domain(self) -> frozenset[str]:
        return frozenset().union(*(v.domain for v in self.items))


@dataclass(frozen=True)
class InferenceProblem:
    """
    A knowledgebase and the open sets to project its joint valuation onto.

    Raises
    -------
    DomainError
        If a query is not open or not covered by the knowledgebase.
    """

    kb: Knowledgebase
    queries: tuple

    def __post_init__(self) -> None:
        queries = tuple(frozenset(q) for q in self.queries)
        object.__setattr__(self, "queries", queries)
        covered = self.kb.domain
        topology = self.kb.prealgebra.topology
        for q in queries:
            topology.require_open(q)
            if not q <= covered:
                raise DomainError(
                    f"query {canonical(q)} is not covered by the knowledgebase domain {canonical(covered)}"
                )


def joint_valuation(kb: Knowledgebase) -> Valuation:
    """Left fold of the selected combine operator over the items."""
    if not kb.items:
        raise DomainError("the joint valuation of an empty knowledgebase is undefined")
    return reduce(kb.ova.combine, kb.items)


def solve_inference(problem: InferenceProblem) -> dict[frozenset, Valuation]:
    """Restrict the joint valuation to every query domain."""
    joint = joint_valuation(problem.kb)
    pa = problem.kb.prealgebra
    return {q: pa.restrict(joint, q) for q in problem.queries}


@dataclass(frozen=True)
class EliminationStep:
    """
    One round of elimination.

    Parameters
    -----------
    atom : str
        Atom removed by this step.
    bucket : tuple[int, ...]
        Positions of the factors that mention `atom` and are combined.
    target : frozenset[str]
        Open set the combined bucket is restricted to.
    """

    atom: str
    bucket: tuple
    target: frozenset


def _plan(domains: Sequence[frozenset], query: frozenset, topology: Topology) -> Iterable[EliminationStep]:
    """
    Choose elimination steps from the factor domains alone.

    Atoms are tried by fewest occurrences first, ties broken by name. An atom is
    eliminated when the smallest open set covering what the rest of the problem still
    needs from its bucket leaves the atom out.
    """
    domains = list(domains)
    progress = True
    while progress:
        progress = False
        counts = Counter(atom for d in domains for atom in d if atom not in query)
        for atom in sorted(counts, key=lambda x: (counts[x], x)):
            bucket = tuple(i for i, d in enumerate(domains) if atom in d)
            joined = frozenset().union(*(domains[i] for i in bucket))
            others = frozenset().union(*(d for i, d in enumerate(domains) if i not in bucket))
            needed = joined & (query | others)
            target = topology.hull(needed)
            if target <= joined - {atom}:
                yield EliminationStep(atom=atom, bucket=bucket, target=target)
                domains = [d for i, d in enumerate(domains) if i not in bucket] + [target]
                progress = True
                break


def elimination_order(kb: Knowledgebase, query) -> list[str]:
    """Atoms in the order the semi-join path eliminates them for `query`."""
    topology = kb.prealgebra.topology
    return [step.atom for step in _plan([v.domain for v in kb.items], frozenset(query), topology)]


def _solve_query(kb: Knowledgebase, query: frozenset) -> Valuation:
    ova = kb.ova
    pa = ova.prealgebra
    factors = list(kb.items)
    for step in _plan([v.domain for v in factors], query, pa.topology):
        combined = reduce(ova.combine, (factors[i] for i in step.bucket))
        rest = [v for i, v in enumerate(factors) if i not in step.bucket]
        factors = rest + [pa.restrict(combined, step.target)]
        logger.debug("eliminated %s: %d factors combined into %s", step.atom, len(step.bucket), canonical(step.target))
    return pa.restrict(reduce(ova.combine, factors), query)


def solve_inference_semijoin(problem: InferenceProblem) -> dict[frozenset, Valuation]:
    """
    Answer every query by eliminating atoms with early restriction.

    Agrees exactly with `solve_inference` for the commutative operator.

    Raises
    -------
    UnsupportedOperationError
        If the knowledgebase uses the sequential operator.
    """
    kb = problem.kb
    if kb.op != "par" or not kb.ova.commutative:
        raise UnsupportedOperationError("local computation needs the commutative (par) operator")
    if not kb.items:
        raise DomainError("the joint valuation of an empty knowledgebase is undefined")
    return {q: _solve_query(kb, q) for q in problem.queries}
