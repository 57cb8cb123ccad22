"""
Valuations and the prealgebras they live in.

A valuation is a pair (A, a) of an open set and a finite set of tuples on A. Valuations
on one domain are ordered by inclusion; across domains they are ordered by the
Grothendieck refinement order: a <= b iff d(b) is contained in d(a) and a restricted
to d(b) is a subset of b.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import chain, combinations
import json
import logging
from typing import TYPE_CHECKING, Any

from cva_lab.exceptions import DomainError, ValuationFormatError
from cva_lab.report import CheckReport, LawEvidence, LawValidator
from cva_lab.topology import canonical, inclusions

if TYPE_CHECKING:
    from typing import Callable, Iterator, Mapping, Union

    from cva_lab.topology import Topology
    from cva_lab.tuples import TupleSystem

    GlobalElement = Union[Mapping[frozenset, "Valuation"], Callable[[frozenset], "Valuation"]]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Valuation:
    """
    An element of the Grothendieck construction: a domain and a finite set of tuples on it.

    Parameters
    -----------
    domain : frozenset[str]
        Open set the tuples live on.
    content : frozenset
        Tuples (traces, states or events) on `domain`.
    """

    domain: frozenset[str]
    content: frozenset

    def __len__(self) -> int:
        return len(self.content)

    def __repr__(self) -> str:
        return f"Valuation({canonical(self.domain)}, {len(self.content)} tuples)"


def domain_of(a: Valuation) -> frozenset[str]:
    """The domain d(a)."""
    return a.domain


@lru_cache(maxsize=None)
def _universe(ts: TupleSystem, domain: frozenset[str], max_length: int | None) -> tuple:
    return tuple(sorted(ts.tuples(domain, max_length), key=ts.sort_key))


def _canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True)


@dataclass(frozen=True)
class Prealgebra:
    """
    The powerset prealgebra of a tuple system on a finite space.

    Parameters
    -----------
    topology : Topology
        Space whose open sets are the domains.
    tuples : TupleSystem
        Tuples per domain.
    cap : int or None
        Length cap L_max used whenever all traces of a domain are needed. None for
        systems whose tuples have no length.
    """

    topology: Topology
    tuples: TupleSystem
    cap: int | None = None

    def _domain(self, atoms) -> frozenset[str]:
        return self.topology.require_open(atoms)

    def restrict(self, v: Valuation, b) -> Valuation:
        b = self._domain(b)
        if not b <= v.domain:
            raise DomainError(f"cannot restrict from {canonical(v.domain)} to {canonical(b)}")
        if b == v.domain:
            return v
        return Valuation(b, frozenset(self.tuples.restrict(t, b) for t in v.content))

    def extend(self, b: Valuation, a) -> Valuation:
        """
        Preimage of `b` under restriction to its domain, i.e. every tuple on `a` restricting into `b`.

        Under length preserving restriction the preimage of a finite set is finite and
        computed exactly. Under reducing restriction it is infinite, and the lifts of a
        trace are kept up to the cap or the trace's own length, whichever is larger.
        """
        a = self._domain(a)
        if not b.domain <= a:
            raise DomainError(f"cannot extend from {canonical(b.domain)} to {canonical(a)}")
        if a == b.domain:
            return b
        content = set()
        for t in b.content:
            content.update(self.tuples.lifts(t, b.domain, a, self.lift_bound(t)))
        return Valuation(a, frozenset(content))

    def lift_bound(self, t) -> int | None:
        """Longest lift kept when extending `t`; None when the preimage is finite."""
        if not self.tuples.reducing:
            return None
        return max(self.cap or 1, self.tuples.length(t))

    def universe(self, a, max_length: int | None = None) -> tuple:
        """Every tuple on `a`, traces of length at most `max_length` (defaults to the cap)."""
        a = self._domain(a)
        if not self.tuples.traced:
            return _universe(self.tuples, a, None)
        return _universe(self.tuples, a, self.cap if max_length is None else max_length)

    def top(self, a) -> Valuation:
        """Largest valuation on `a`, capped at `cap` for traced systems."""
        a = self._domain(a)
        return Valuation(a, frozenset(self.universe(a)))

    def valuations(self, a, max_length: int | None = None) -> Iterator[Valuation]:
        """Enumerate the local lattice on `a` built from traces of length at most `max_length`."""
        a = self._domain(a)
        universe = self.universe(a, max_length)
        subsets = chain.from_iterable(combinations(universe, k) for k in range(len(universe) + 1))
        for subset in subsets:
            yield Valuation(a, frozenset(subset))

    def truncate(self, v: Valuation, k: int | None = None) -> Valuation:
        """Drop traces longer than `k` (the cap by default); the identity for tuples without length."""
        k = self.cap if k is None else k
        if not self.tuples.traced or k is None:
            return v
        return Valuation(v.domain, frozenset(t for t in v.content if self.tuples.length(t) <= k))

    def window(self, max_length: int) -> int | None:
        """
        Length up to which capped computations on inputs of length <= `max_length` are complete.

        Length preserving restriction makes everything up to the cap exact. Reducing
        restriction can lengthen lifts, so the window shrinks with the input length.
        """
        if self.cap is None or not self.tuples.traced:
            return None
        if not self.tuples.reducing:
            return self.cap
        return max(1, self.cap - max_length + 1)

    def leq(self, a: Valuation, b: Valuation, window: int | None = None) -> bool:
        """Grothendieck order, comparing traces of length at most `window` when given."""
        if not b.domain <= a.domain:
            return False
        lhs = self.restrict(a, b.domain)
        if window is not None:
            return self.truncate(lhs, window).content <= self.truncate(b, window).content
        return lhs.content <= b.content

    def equal(self, a: Valuation, b: Valuation, window: int | None = None) -> bool:
        if a.domain != b.domain:
            return False
        if window is not None:
            return self.truncate(a, window).content == self.truncate(b, window).content
        return a.content == b.content

    def encode(self, v: Valuation) -> dict:
        """JSON-ready form with a sorted domain and sorted tuple encodings."""
        encoded = sorted((self.tuples.encode(t) for t in v.content), key=_canonical_json)
        key = "traces" if self.tuples.traced else "rows"
        return {"domain": canonical(v.domain), key: encoded}

    def decode(self, obj: Any, path: str | None = None) -> Valuation:
        """Parse the JSON form of a valuation; traces may be given under `traces` or `rows`."""
        if not isinstance(obj, dict) or "domain" not in obj:
            raise ValuationFormatError("a valuation needs a 'domain' entry", path=path)
        items = obj.get("traces", obj.get("rows"))
        if not isinstance(items, list):
            raise ValuationFormatError("a valuation needs a list of 'traces' or 'rows'", path=path)
        domain = self._domain(obj["domain"])
        decoded = set()
        for i, item in enumerate(items):
            try:
                decoded.add(self.tuples.decode(item, domain))
            except ValueError as exc:
                raise ValuationFormatError(str(exc), trace_index=i, path=path) from exc
        return Valuation(domain, frozenset(decoded))

    def dumps(self, v: Valuation) -> str:
        return _canonical_json(self.encode(v))


def restrict(v: Valuation, b, prealgebra: Prealgebra) -> Valuation:
    """Restrict `v` to the open subset `b` of its domain."""
    return prealgebra.restrict(v, b)


def gc_leq(a: Valuation, b: Valuation, prealgebra: Prealgebra, window: int | None = None) -> bool:
    """Grothendieck refinement order a <= b."""
    return prealgebra.leq(a, b, window)


def truncate(v: Valuation, prealgebra: Prealgebra, k: int | None = None) -> Valuation:
    """Keep the traces of `v` of length at most `k` (the prealgebra cap by default)."""
    return prealgebra.truncate(v, k)


@dataclass
class CheckGlobalElement:
    """
    Check restrict(e(A), B) = e(B) for every inclusion B <= A.

    Parameters
    -----------
    element : dict[frozenset, Valuation]
        The candidate evaluated on every open set.
    prealgebra : Prealgebra
        Prealgebra the candidate lives in.
    law_id : str
        Catalog entry to report under.
    """

    element: dict[frozenset, Valuation]
    prealgebra: Prealgebra
    law_id: str = "valuations.global_element"

    def check(
        self,
        reasons: list[str],
        warnings: list[str],
        evidence: LawEvidence,
        sampler=None,
    ) -> None:
        """
        Check the family against restriction on every inclusion.

        Parameters
        -----------
        reasons : list[str]
            A list of error strings to update if a law fails. These are higher
            severity and invalidate the structure under test.
        warnings : list[str]
            A list of warning strings to update with lower-severity findings.
        evidence : LawEvidence
            Instance tallies, counterexamples and properties to update.
        sampler : Sampler or None
            Unused; the family is checked on every inclusion.
        """
        validator = LawValidator()
        pa = self.prealgebra
        evidence.touch(self.law_id)
        for b, a in inclusions(pa.topology):
            restricted = pa.restrict(self.element[a], b)
            validator.check_law(
                reasons, warnings, evidence, self.law_id,
                pa.equal(restricted, self.element[b], pa.cap),
                lambda a=a, b=b, restricted=restricted: {
                    "domain": canonical(a),
                    "subdomain": canonical(b),
                    "restricted": pa.encode(restricted),
                    "expected": pa.encode(self.element[b]),
                },
            )


def evaluate_global(e: GlobalElement, prealgebra: Prealgebra) -> dict[frozenset, Valuation]:
    """Evaluate a candidate global element on every open set."""
    table: dict[frozenset, Valuation] = {}
    for a in prealgebra.topology.opens:
        if callable(e):
            value = e(a)
        elif a in e:
            value = e[a]
        else:
            raise DomainError(f"global element candidate is undefined on {canonical(a)}")
        if value.domain != a:
            raise DomainError(f"value on {canonical(a)} has domain {canonical(value.domain)}")
        table[a] = value
    return table


def global_element_check(
    e: GlobalElement, prealgebra: Prealgebra, law_id: str = "valuations.global_element"
) -> CheckReport:
    """
    Check that `e` is a global element: compatible with every restriction map.

    Parameters
    -----------
    e : mapping or callable
        Open set to valuation; mappings must cover every open set.
    prealgebra : Prealgebra
        Prealgebra the candidate lives in.
    """
    table = evaluate_global(e, prealgebra)
    reasons: list[str] = []
    warnings: list[str] = []
    evidence = LawEvidence()
    CheckGlobalElement(table, prealgebra, law_id).check(reasons, warnings, evidence)
    return CheckReport.from_evidence(
        name="global element",
        reasons=reasons,
        warnings=warnings,
        evidence=evidence,
        cap=prealgebra.cap,
        window=prealgebra.cap if prealgebra.tuples.traced else None,
    )
