"""
Tuple systems: per-domain families of tuples with restriction, lifting and binary gluing.

Representations (all hashable, canonical):

* a state on domain A is a tuple of ``(atom, value)`` pairs sorted by atom; the empty
  state ``()`` is the unique state on the empty domain;
* an event is a pair ``(pre, post)`` of states on the same domain;
* a trace is a tuple of base tuples.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import product
import logging
from typing import TYPE_CHECKING, Any

from cva_lab.exceptions import DomainError
from cva_lab.report import CheckReport, LawValidator
from cva_lab.sampling import Budget, TupleSampler
from cva_lab.valuations import Valuation

if TYPE_CHECKING:
    from typing import Callable, Iterable, Iterator, Sequence

    from cva_lab.report import LawEvidence
    from cva_lab.topology import Topology

    State = tuple[tuple[str, Any], ...]

logger = logging.getLogger(__name__)

EMPTY_STATE: tuple = ()
"""The unique state on the empty domain."""


def _restrict_state(state: tuple, domain: frozenset[str]) -> tuple:
    return tuple(pair for pair in state if pair[0] in domain)


def _merge_states(left: tuple, right: tuple) -> tuple | None:
    merged = dict(left)
    for atom, value in right:
        if merged.setdefault(atom, value) != value:
            return None
    return tuple(sorted(merged.items()))


class TupleSystem(ABC):
    """
    A presheaf of tuples on the open sets of a finite space.

    Subclasses enumerate tuples per domain, restrict them, and construct liftings.

    Attrs
    ---------
    traced : bool
        Tuples are traces with a length; universes are infinite and enumerated up to a cap.
    reducing : bool
        Restriction may shorten traces (stutter reduction).
    """

    traced: bool = False
    reducing: bool = False
    name: str = "tuples"

    @abstractmethod
    def tuples(self, domain: frozenset[str], max_length: int | None = None) -> Iterator[Any]:
        """Enumerate the tuples on `domain`; traced systems need `max_length`."""

    @abstractmethod
    def restrict(self, t: Any, domain: frozenset[str]) -> Any:
        """Restrict a tuple to a subdomain."""

    @abstractmethod
    def lifts(
        self, t: Any, source: frozenset[str], target: frozenset[str], max_length: int | None = None
    ) -> Iterator[Any]:
        """Every tuple on `target` restricting to `t` on `source` (up to `max_length` if infinitely many)."""

    @abstractmethod
    def common_lifts(self, t: Any, a: frozenset[str], s: Any, b: frozenset[str]) -> Iterator[Any]:
        """Every tuple on a | b restricting to `t` on `a` and `s` on `b`."""

    def length(self, t: Any) -> int | None:
        return None

    @abstractmethod
    def encode(self, t: Any) -> Any:
        """JSON-ready form of a tuple."""

    @abstractmethod
    def decode(self, obj: Any, domain: frozenset[str]) -> Any:
        """Parse the JSON form of a tuple on `domain`, raising ValueError on mismatch."""

    def sort_key(self, t: Any) -> str:
        return repr(t)


@dataclass(frozen=True)
class StateTuples(TupleSystem):
    """Total assignments of values to the atoms of a domain."""

    values: tuple = (0, 1)
    name: str = "state"

    def tuples(self, domain, max_length=None):
        atoms = sorted(domain)
        for assignment in product(self.values, repeat=len(atoms)):
            yield tuple(zip(atoms, assignment))

    def restrict(self, t, domain):
        return _restrict_state(t, domain)

    def lifts(self, t, source, target, max_length=None):
        extra = sorted(target - source)
        for assignment in product(self.values, repeat=len(extra)):
            yield tuple(sorted(t + tuple(zip(extra, assignment))))

    def common_lifts(self, t, a, s, b):
        merged = _merge_states(t, s)
        if merged is not None:
            yield merged

    def encode(self, t):
        return dict(t)

    def decode(self, obj, domain):
        if not isinstance(obj, dict):
            raise ValueError(f"expected a state object, got {obj!r}")
        if set(obj) != set(domain):
            raise ValueError(f"state atoms {sorted(obj)} do not match domain {sorted(domain)}")
        for atom, value in obj.items():
            if value not in self.values:
                raise ValueError(f"value {value!r} of atom {atom} is not in {list(self.values)}")
        return tuple(sorted(obj.items()))


@dataclass(frozen=True)
class EventTuples(TupleSystem):
    """Pairs (pre, post) of states on the same domain."""

    states: StateTuples = StateTuples()
    name: str = "event"

    def tuples(self, domain, max_length=None):
        states = list(self.states.tuples(domain))
        return iter(product(states, states))

    def restrict(self, t, domain):
        return (_restrict_state(t[0], domain), _restrict_state(t[1], domain))

    def lifts(self, t, source, target, max_length=None):
        pres = list(self.states.lifts(t[0], source, target))
        posts = list(self.states.lifts(t[1], source, target))
        return iter(product(pres, posts))

    def common_lifts(self, t, a, s, b):
        pre = _merge_states(t[0], s[0])
        post = _merge_states(t[1], s[1])
        if pre is not None and post is not None:
            yield (pre, post)

    def encode(self, t):
        return {"pre": dict(t[0]), "post": dict(t[1])}

    def decode(self, obj, domain):
        if not isinstance(obj, dict) or set(obj) != {"pre", "post"}:
            raise ValueError(f"expected an event object with 'pre' and 'post', got {obj!r}")
        return (self.states.decode(obj["pre"], domain), self.states.decode(obj["post"], domain))


@dataclass(frozen=True)
class ListTuples(TupleSystem):
    """Finite lists of base tuples with componentwise restriction."""

    base: TupleSystem = StateTuples()
    nonempty: bool = True
    traced: bool = True
    name: str = "list"

    def tuples(self, domain, max_length=None):
        if max_length is None:
            raise DomainError("enumerating traces requires a length cap")
        base = list(self.base.tuples(domain))
        for n in range(1 if self.nonempty else 0, max_length + 1):
            yield from product(base, repeat=n)

    def restrict(self, t, domain):
        return tuple(self.base.restrict(c, domain) for c in t)

    def lifts(self, t, source, target, max_length=None):
        # length preserving, so the preimage is finite and the cap is not needed
        return iter(product(*(list(self.base.lifts(c, source, target)) for c in t)))

    def common_lifts(self, t, a, s, b):
        if len(t) != len(s):
            return iter(())
        parts = [list(self.base.common_lifts(x, a, y, b)) for x, y in zip(t, s)]
        return iter(product(*parts))

    def length(self, t):
        return len(t)

    def encode(self, t):
        return [self.base.encode(c) for c in t]

    def decode(self, obj, domain):
        if not isinstance(obj, list):
            raise ValueError(f"expected a trace (list of tuples), got {obj!r}")
        if self.nonempty and not obj:
            raise ValueError("traces of this model are nonempty")
        return tuple(self.base.decode(c, domain) for c in obj)


def list_lift(ts: TupleSystem) -> ListTuples:
    """Lists of `ts` tuples, the empty list included."""
    return ListTuples(base=ts, nonempty=False, name=f"list({ts.name})")


def nonempty_list_lift(ts: TupleSystem) -> ListTuples:
    """Nonempty lists of `ts` tuples."""
    return ListTuples(base=ts, nonempty=True, name=f"list+({ts.name})")


def stutter_reduce(word: Sequence[Any]) -> tuple:
    """Collapse every run of equal adjacent letters to one letter."""
    if len(word) == 0:
        raise DomainError("cannot reduce the empty word")
    reduced = [word[0]]
    for letter in word[1:]:
        if letter != reduced[-1]:
            reduced.append(letter)
    return tuple(reduced)


def semigroup_product_rel(t: Sequence[Any], s: Sequence[Any]) -> tuple:
    """Product in the free semigroup with idempotent generators: concatenate, then reduce."""
    return stutter_reduce(tuple(t) + tuple(s))


def is_stutter_free(word: Sequence[Any]) -> bool:
    return len(word) > 0 and all(x != y for x, y in zip(word, word[1:]))


@dataclass(frozen=True)
class StutterFreeTraces(TupleSystem):
    """Nonempty stutter-free words of states; restriction reduces after projecting."""

    states: StateTuples = StateTuples()
    traced: bool = True
    reducing: bool = True
    name: str = "stutter-free"

    def tuples(self, domain, max_length=None):
        if max_length is None:
            raise DomainError("enumerating traces requires a length cap")
        letters = list(self.states.tuples(domain))

        def grow(word):
            yield word
            if len(word) < max_length:
                for letter in letters:
                    if letter != word[-1]:
                        yield from grow(word + (letter,))

        for letter in letters:
            if max_length >= 1:
                yield from grow((letter,))

    def restrict(self, t, domain):
        return stutter_reduce([_restrict_state(c, domain) for c in t])

    def lifts(self, t, source, target, max_length=None):
        if source == target:
            yield t
            return
        if max_length is None:
            raise DomainError("the preimage under reducing restriction is infinite; a length cap is required")
        last = len(t) - 1

        def walk(i, word):
            if i == last:
                yield word
            if len(word) == max_length:
                return
            current = word[-1]
            for nxt in range(i, min(i + 2, last + 1)):
                for letter in self.states.lifts(t[nxt], source, target):
                    if letter != current:
                        yield from walk(nxt, word + (letter,))

        for first in self.states.lifts(t[0], source, target):
            if max_length >= 1:
                yield from walk(0, (first,))

    def common_lifts(self, t, a, s, b):
        overlap = a & b
        p, q = len(t), len(s)

        def letter(i, j):
            if _restrict_state(t[i], overlap) != _restrict_state(s[j], overlap):
                return None
            return _merge_states(t[i], s[j])

        # monotone paths through index pairs; every step advances at least one side
        def walk(i, j, word):
            if i == p - 1 and j == q - 1:
                yield word
                return
            for di, dj in ((1, 0), (0, 1), (1, 1)):
                ni, nj = i + di, j + dj
                if ni < p and nj < q:
                    x = letter(ni, nj)
                    if x is not None:
                        yield from walk(ni, nj, word + (x,))

        start = letter(0, 0)
        if start is not None:
            yield from set(walk(0, 0, (start,)))

    def length(self, t):
        return len(t)

    def encode(self, t):
        return [dict(c) for c in t]

    def decode(self, obj, domain):
        if not isinstance(obj, list) or not obj:
            raise ValueError("expected a nonempty trace")
        word = tuple(self.states.decode(c, domain) for c in obj)
        if not is_stutter_free(word):
            raise ValueError("trace repeats a state in adjacent positions")
        return word


def relational_join(a: Valuation, b: Valuation, ts: TupleSystem) -> Valuation:
    """
    Relational join of two T-relations.

    Tuples on the union domain whose restrictions lie in `a` and `b`, built by gluing
    compatible pairs, so the result is exact without enumerating the union universe.
    """
    u = a.domain | b.domain
    content: set[Any] = set()
    for t in a.content:
        for s in b.content:
            content.update(ts.common_lifts(t, a.domain, s, b.domain))
    return Valuation(u, frozenset(content))


@dataclass
class CheckTupleSystem:
    """
    Check the presheaf, flasque and binary gluing properties of a tuple system.

    Parameters
    -----------
    ts : TupleSystem
        System under test.
    topology : Topology
        Space whose open sets index the tuples.
    max_length : int or None
        Length of the enumerated strata for traced systems.
    """

    ts: TupleSystem
    topology: Topology
    max_length: int | None = None

    def _universe(self, domain):
        return sorted(self.ts.tuples(domain, self.max_length), key=self.ts.sort_key)

    def check(
        self,
        reasons: list[str],
        warnings: list[str],
        evidence: LawEvidence,
        sampler: TupleSampler,
    ) -> None:
        """
        Check the presheaf, flasque and gluing laws stratum by stratum.

        Parameters
        -----------
        reasons : list[str]
            A list of error strings to update if a law fails. These are higher
            severity and invalidate the structure under test.
        warnings : list[str]
            A list of warning strings to update with lower-severity findings.
        evidence : LawEvidence
            Instance tallies, counterexamples and properties to update.
        sampler : TupleSampler
            Unused beyond the report metadata; strata are enumerated exhaustively.
        """
        validator = LawValidator()
        ts = self.ts
        # lifts of long tuples are only needed up to the stratum being checked
        cap = self.max_length
        pairs = [(b, a) for a in self.topology.opens for b in self.topology.subopens(a)]
        for law in ("tuples.presheaf", "tuples.flasque", "tuples.binary_gluing"):
            evidence.touch(law)

        for b, a in pairs:
            for t in sampler.pick(self._universe(a)):
                restricted = ts.restrict(t, b)
                ok = ts.restrict(t, a) == t and all(
                    ts.restrict(restricted, c) == ts.restrict(t, c) for c in self.topology.subopens(b)
                )
                validator.check_law(
                    reasons, warnings, evidence, "tuples.presheaf", ok,
                    lambda t=t, a=a, b=b: {"tuple": ts.encode(t), "domain": sorted(a), "subdomain": sorted(b)},
                )
            for t in sampler.pick(self._universe(b)):
                lifted = list(ts.lifts(t, b, a, cap if ts.reducing else None))
                ok = len(lifted) > 0 and all(ts.restrict(x, b) == t for x in lifted)
                validator.check_law(
                    reasons, warnings, evidence, "tuples.flasque", ok,
                    lambda t=t, a=a, b=b: {"tuple": ts.encode(t), "domain": sorted(b), "target": sorted(a)},
                )

        for a in self.topology.opens:
            for b in self.topology.opens:
                overlap = a & b
                left = sampler.pick(self._universe(a))
                right = sampler.pick(self._universe(b))
                for t in left:
                    for s in right:
                        if ts.restrict(t, overlap) != ts.restrict(s, overlap):
                            continue
                        glued = list(ts.common_lifts(t, a, s, b))
                        ok = len(glued) > 0 and all(
                            ts.restrict(c, a) == t and ts.restrict(c, b) == s for c in glued
                        )
                        validator.check_law(
                            reasons, warnings, evidence, "tuples.binary_gluing", ok,
                            lambda t=t, s=s, a=a, b=b: {
                                "left": ts.encode(t), "left_domain": sorted(a),
                                "right": ts.encode(s), "right_domain": sorted(b),
                            },
                        )


@dataclass
class CheckProjectionExchange:
    """
    Check that a trace operator commutes with restriction.

    Parameters
    -----------
    name : str
        Operator name used in reports.
    trace_op : Callable
        Binary operator on traces of one domain returning an iterable of traces.
    ts : TupleSystem
        Trace system the operator acts on.
    topology : Topology
        Space whose inclusions are exercised.
    max_length : int
        Length of sampled traces.
    pairs : int
        Number of sampled (B, A, t, s) instances.
    """

    name: str
    trace_op: Callable[[Any, Any], Iterable[Any]]
    ts: TupleSystem
    topology: Topology
    max_length: int
    pairs: int = 500

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler) -> None:
        validator = LawValidator()
        inclusions = [(b, a) for a in self.topology.opens for b in self.topology.subopens(a)]
        universes = {a: sorted(self.ts.tuples(a, self.max_length), key=self.ts.sort_key) for a in self.topology.opens}
        evidence.touch("tuples.projection_exchange")
        tested = 0
        for _ in range(self.pairs * 50):
            if tested == self.pairs:
                break
            b, a = inclusions[sampler.index(len(inclusions))]
            universe = universes[a]
            t = universe[sampler.index(len(universe))]
            s = universe[sampler.index(len(universe))]
            product_ts = list(self.trace_op(t, s))
            # partial operators are only compared where defined
            if not product_ts:
                continue
            tested += 1
            lhs = {self.ts.restrict(r, b) for r in product_ts}
            rhs = set(self.trace_op(self.ts.restrict(t, b), self.ts.restrict(s, b)))
            validator.check_law(
                reasons, warnings, evidence, "tuples.projection_exchange", lhs == rhs,
                lambda t=t, s=s, a=a, b=b: {
                    "operator": self.name, "left": self.ts.encode(t), "right": self.ts.encode(s),
                    "domain": sorted(a), "subdomain": sorted(b),
                },
            )


def check_tuple_system(ts: TupleSystem, topology: Topology, budget: Budget | None = None) -> CheckReport:
    """
    Check that `ts` is a tuple system on `topology`: presheaf laws, flasque, binary gluing.

    Traced systems are checked stratum by stratum up to `budget.max_length`.
    """
    budget = budget or Budget()
    sampler = TupleSampler(budget)
    max_length = budget.max_length if ts.traced else None
    return CheckReport.from_checks(
        name=f"tuple system {ts.name}",
        checks=[CheckTupleSystem(ts=ts, topology=topology, max_length=max_length)],
        sampler=sampler,
    )


def check_projection_exchange(
    name: str,
    trace_op: Callable[[Any, Any], Iterable[Any]],
    ts: TupleSystem,
    topology: Topology,
    budget: Budget | None = None,
    pairs: int = 500,
) -> CheckReport:
    """Check restrict(t op s, B) = restrict(t, B) op restrict(s, B) on sampled trace pairs."""
    budget = budget or Budget()
    sampler = TupleSampler(budget)
    check = CheckProjectionExchange(
        name=name, trace_op=trace_op, ts=ts, topology=topology, max_length=budget.max_length, pairs=pairs
    )
    return CheckReport.from_checks(name=f"projection exchange {name}", checks=[check], sampler=sampler)

