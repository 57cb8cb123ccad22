"""Seeded generation of law-check instances, exhaustive when small enough."""
from __future__ import annotations

from itertools import product
import logging
from typing import TYPE_CHECKING, Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from cva_lab.settings import CvaLabSettings
from cva_lab.topology import inclusions
from cva_lab.valuations import Valuation

if TYPE_CHECKING:
    from typing import Iterator, Sequence

    from cva_lab.valuations import Prealgebra

logger = logging.getLogger(__name__)

SETTINGS = CvaLabSettings()


class Budget(BaseModel):
    """
    How much work a law check may do.
    """

    model_config = ConfigDict(frozen=True)

    samples: int = Field(SETTINGS.SAMPLES, ge=1, description="Sampled instances per law")

    max_traces: int = Field(SETTINGS.SAMPLE_MAX_TRACES, ge=0, description="Largest sampled valuation")

    max_length: int = Field(SETTINGS.SAMPLE_MAX_LENGTH, ge=0, description="Longest sampled trace")

    exhaustive_limit: int = Field(
        SETTINGS.EXHAUSTIVE_LIMIT, ge=0, description="Enumerate every instance when there are at most this many"
    )

    seed: int = Field(SETTINGS.SEED, description="Seed of the random generator")


class Sampler:
    """
    Seeded random choices shared by every check of one run.

    Records whether instances were enumerated exhaustively, sampled, or both.
    """

    cap: int | None = None

    def __init__(self, budget: Budget | None = None) -> None:
        self.budget = budget or Budget()
        self.rng = np.random.default_rng(self.budget.seed)
        self._modes: set[str] = set()

    @property
    def mode(self) -> str:
        if len(self._modes) > 1:
            return "mixed"
        return next(iter(self._modes), "exhaustive")

    def _note(self, mode: str) -> None:
        if mode not in self._modes:
            logger.debug("switching to %s instances (seed=%d)", mode, self.budget.seed)
        self._modes.add(mode)

    def _small(self, count: int) -> bool:
        return count <= self.budget.exhaustive_limit

    def index(self, n: int) -> int:
        """Uniform index in range(n)."""
        self._note("sampled")
        return int(self.rng.integers(n))

    def pick(self, items: Sequence[Any], limit: int | None = None) -> list[Any]:
        """All of `items` if there are at most `limit` (default `samples`), else a random subset in order."""
        items = list(items)
        limit = self.budget.samples if limit is None else limit
        if len(items) <= limit:
            self._note("exhaustive")
            return items
        self._note("sampled")
        chosen = sorted(self.rng.choice(len(items), size=limit, replace=False))
        return [items[i] for i in chosen]


class TupleSampler(Sampler):
    """Sampler for checks on bare tuple systems."""


class ValuationSampler(Sampler):
    """
    Valuations of one prealgebra, drawn at random or enumerated.

    Parameters
    -----------
    prealgebra : Prealgebra
        Where the valuations live.
    budget : Budget
        Sample count, valuation size, trace length and seed.
    """

    def __init__(self, prealgebra: Prealgebra, budget: Budget | None = None) -> None:
        super().__init__(budget)
        self.prealgebra = prealgebra
        self.max_length = self.budget.max_length
        if prealgebra.cap is not None:
            self.max_length = min(self.max_length, prealgebra.cap)
        self.opens = prealgebra.topology.opens
        self.inclusions = inclusions(prealgebra.topology)

    @property
    def cap(self) -> int | None:
        return self.prealgebra.cap

    def window(self) -> int | None:
        """Comparison window for laws involving capped universes."""
        return self.prealgebra.window(self.max_length)

    def universe(self, a: frozenset[str]) -> tuple:
        return self.prealgebra.universe(a, self.max_length)

    def lattice_size(self, a: frozenset[str]) -> int:
        return 2 ** len(self.universe(a))

    def lattice(self, a: frozenset[str]) -> list[Valuation]:
        return list(self.prealgebra.valuations(a, self.max_length))

    def domain(self) -> frozenset[str]:
        return self.opens[self.index(len(self.opens))]

    def traces(self, a: frozenset[str], k: int) -> frozenset:
        """`k` distinct random tuples on `a` (fewer if the universe is smaller)."""
        universe = self.universe(a)
        k = min(k, len(universe))
        if k == 0:
            return frozenset()
        return frozenset(universe[i] for i in self.rng.choice(len(universe), size=k, replace=False))

    def valuation(self, domain: frozenset[str] | None = None) -> Valuation:
        """A random valuation with at most `max_traces` tuples."""
        a = self.domain() if domain is None else domain
        self._note("sampled")
        k = int(self.rng.integers(self.budget.max_traces + 1))
        return Valuation(a, self.traces(a, k))

    def instances(self, arity: int) -> Iterator[tuple[Valuation, ...]]:
        """Tuples of `arity` valuations on arbitrary domains."""
        total = sum(self.lattice_size(a) for a in self.opens)
        if self._small(total**arity):
            self._note("exhaustive")
            everything = [v for a in self.opens for v in self.lattice(a)]
            yield from product(everything, repeat=arity)
            return
        for _ in range(self.budget.samples):
            yield tuple(self.valuation() for _ in range(arity))

    def local_instances(self, arity: int) -> Iterator[tuple]:
        """Tuples (A, v1, ..., vk) of valuations sharing the domain A."""
        if self._small(sum(self.lattice_size(a) ** arity for a in self.opens)):
            self._note("exhaustive")
            for a in self.opens:
                for values in product(self.lattice(a), repeat=arity):
                    yield (a, *values)
            return
        for _ in range(self.budget.samples):
            a = self.domain()
            yield (a, *(self.valuation(a) for _ in range(arity)))

    def inclusion_instances(self, on_a: int, on_b: int) -> Iterator[tuple]:
        """Tuples (B, A, valuations on A, valuations on B) over inclusions B <= A."""
        count = sum(self.lattice_size(a) ** on_a * self.lattice_size(b) ** on_b for b, a in self.inclusions)
        if self._small(count):
            self._note("exhaustive")
            for b, a in self.inclusions:
                for xs in product(self.lattice(a), repeat=on_a):
                    for ys in product(self.lattice(b), repeat=on_b):
                        yield b, a, xs, ys
            return
        for _ in range(self.budget.samples):
            b, a = self.inclusions[self.index(len(self.inclusions))]
            yield b, a, tuple(self.valuation(a) for _ in range(on_a)), tuple(self.valuation(b) for _ in range(on_b))

    def chain_instances(self) -> Iterator[tuple]:
        """Tuples (C, B, A, c) with C <= B <= A open and c on C."""
        chains = [(c, b, a) for b, a in self.inclusions for c in self.prealgebra.topology.subopens(b)]
        if self._small(sum(self.lattice_size(c) for c, _, _ in chains)):
            self._note("exhaustive")
            for c, b, a in chains:
                for v in self.lattice(c):
                    yield c, b, a, v
            return
        for _ in range(self.budget.samples):
            c, b, a = chains[self.index(len(chains))]
            yield c, b, a, self.valuation(c)

    def singletons(self) -> list[Valuation]:
        """Every one-tuple valuation, on every open set."""
        return [Valuation(a, frozenset([t])) for a in self.opens for t in self.universe(a)]

    def singleton_pairs(self) -> list[tuple[Valuation, Valuation]]:
        """Pairs of one-tuple valuations: order-sensitive witnesses are usually found among them."""
        singles = self.singletons()
        if self._small(len(singles) ** 2):
            self._note("exhaustive")
            return list(product(singles, repeat=2))
        n = len(singles)
        return [(singles[self.index(n)], singles[self.index(n)]) for _ in range(self.budget.samples)]

    def coarsening(self, a: Valuation) -> Valuation:
        """A random b with a <= b: restrict to a random open subset, then add tuples."""
        subs = self.prealgebra.topology.subopens(a.domain)
        b = subs[int(self.rng.integers(len(subs)))]
        restricted = self.prealgebra.restrict(a, b)
        extra = self.traces(b, int(self.rng.integers(3)))
        return Valuation(b, restricted.content | extra)

    def enlargement(self, a: Valuation) -> Valuation:
        """A random superset of `a` on the same domain."""
        extra = self.traces(a.domain, int(self.rng.integers(3)))
        return Valuation(a.domain, a.content | extra)
