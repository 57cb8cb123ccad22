"""
The concrete algebras: action traces, state traces, relative (stutter-free) state traces,
and relations over states as a database.

==========  ======================  ================  ===================  ==============
model       tuples                  sequential        parallel             neutrals
==========  ======================  ================  ===================  ==============
action      lists of events         concatenation     interleaving         iota, iota
state       nonempty state lists    gluing            relational join      tau, top
relative    stutter-free words      relative gluing   relational join      tau, top
db          states                  (none)            natural join         top
==========  ======================  ================  ===================  ==============
"""
from __future__ import annotations

from functools import partial
from itertools import combinations
import logging
from typing import TYPE_CHECKING, Any, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from cva_lab.cva import CvaInstance
from cva_lab.exceptions import ConfigError
from cva_lab.ova import LocalOperatorFamily, OvaInstance, extend_local_operator
from cva_lab.settings import CvaLabSettings
from cva_lab.topology import Topology
from cva_lab.tuples import (
    EventTuples,
    StateTuples,
    StutterFreeTraces,
    list_lift,
    nonempty_list_lift,
    relational_join,
)
from cva_lab.valuations import Prealgebra, Valuation

if TYPE_CHECKING:
    from typing import Iterator, Sequence

logger = logging.getLogger(__name__)

SETTINGS = CvaLabSettings()

MODEL_IDS = ("action", "state", "relative", "db")


def interleave_traces(t: Sequence[Any], s: Sequence[Any]) -> set[tuple]:
    """All (p, q)-shuffles of two traces."""
    p, q = len(t), len(s)
    shuffles = set()
    for positions in combinations(range(p + q), p):
        chosen = set(positions)
        left, right = iter(t), iter(s)
        shuffles.add(tuple(next(left) if i in chosen else next(right) for i in range(p + q)))
    return shuffles


def concatenate(t: Sequence[Any], s: Sequence[Any]) -> Iterator[tuple]:
    yield tuple(t) + tuple(s)


def glue_traces(t: Sequence[Any], s: Sequence[Any]) -> Optional[tuple]:
    """Fuse the last state of `t` with the first of `s`; None unless they are equal."""
    if len(t) == 0 or len(s) == 0 or t[-1] != s[0]:
        return None
    return tuple(t[:-1]) + tuple(s)


def relative_glue_traces(t: Sequence[Any], s: Sequence[Any]) -> Optional[tuple]:
    """
    Endpoint-matched product of stutter-free words.

    With matching endpoints the semigroup product only collapses the shared letter,
    so the result is already stutter-free.
    """
    return glue_traces(t, s)


def _optional(op):
    def lifted(t, s):
        r = op(t, s)
        return () if r is None else (r,)

    return lifted


SHUFFLE = LocalOperatorFamily.from_trace_operator("shuffle", interleave_traces)
CONCATENATION = LocalOperatorFamily.from_trace_operator("concatenation", concatenate)
GLUE = LocalOperatorFamily.from_trace_operator("glue", _optional(glue_traces))
RELATIVE_GLUE = LocalOperatorFamily.from_trace_operator("relative glue", _optional(relative_glue_traces))


def interleaving_product(a: Valuation, b: Valuation, prealgebra: Prealgebra) -> Valuation:
    """a shuffled with b after extending both to the union domain."""
    return extend_local_operator(SHUFFLE, prealgebra)(a, b)


def concatenating_product(a: Valuation, b: Valuation, prealgebra: Prealgebra) -> Valuation:
    return extend_local_operator(CONCATENATION, prealgebra)(a, b)


def gluing_product(a: Valuation, b: Valuation, prealgebra: Prealgebra) -> Valuation:
    """Traces of a glued to traces of b with matching endpoints, over the union domain."""
    return extend_local_operator(GLUE, prealgebra)(a, b)


def relative_gluing_product(a: Valuation, b: Valuation, prealgebra: Prealgebra) -> Valuation:
    return extend_local_operator(RELATIVE_GLUE, prealgebra)(a, b)


def iota(a: frozenset[str]) -> Valuation:
    """The valuation holding only the empty trace."""
    return Valuation(a, frozenset([()]))


def tau(a: frozenset[str], states: StateTuples) -> Valuation:
    """Every trace of length one."""
    return Valuation(a, frozenset((state,) for state in states.tuples(a)))


class ModelConfig(BaseModel):
    """
    Which algebra to build, on which space.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: Literal["action", "state", "relative", "db"] = Field(..., description="Model identifier")

    topology: Topology = Field(..., description="Space whose open sets are the domains")

    values: List[Union[int, str]] = Field(SETTINGS.DEFAULT_VALUES, description="Value set S of every atom")

    cap: int = Field(SETTINGS.DEFAULT_CAP, description="Length cap L_max for enumerated universes")


def _validate(cfg: ModelConfig) -> tuple:
    if len(cfg.values) == 0:
        raise ConfigError("the value set must be nonempty")
    if len(set(cfg.values)) != len(cfg.values):
        raise ConfigError(f"the value set {cfg.values} has duplicates")
    least = 0 if cfg.model in ("action", "db") else 1
    if cfg.cap < least:
        raise ConfigError(f"the {cfg.model} model needs cap >= {least}, got {cfg.cap}")
    return tuple(cfg.values)


def make_config(**kwargs) -> ModelConfig:
    """Construct a ModelConfig, reporting invalid fields as ConfigError."""
    try:
        return ModelConfig(**kwargs)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def build_model(cfg: ModelConfig) -> Union[CvaInstance, OvaInstance]:
    """
    Wire up the algebra named by `cfg.model`.

    Returns a CvaInstance for the trace models and a commutative relational
    OvaInstance for the database model.

    Raises
    -------
    ConfigError
        For an empty or repeated value set, or a cap below the model's minimum.
    """
    values = _validate(cfg)
    states = StateTuples(values=values)
    topology = cfg.topology
    logger.info("building %s model on %d atoms, |S|=%d, cap=%d", cfg.model, len(topology.ground), len(values), cfg.cap)

    if cfg.model == "db":
        pa = Prealgebra(topology=topology, tuples=states, cap=None)
        return OvaInstance(
            name="natural join",
            prealgebra=pa,
            combine=partial(relational_join, ts=states),
            neutral=pa.top,
            commutative=True,
            relational=True,
        )

    if cfg.model == "action":
        pa = Prealgebra(topology=topology, tuples=list_lift(EventTuples(states=states)), cap=cfg.cap)
        seq = OvaInstance(
            name="concatenation",
            prealgebra=pa,
            combine=partial(concatenating_product, prealgebra=pa),
            neutral=iota,
            family=CONCATENATION,
        )
        par = OvaInstance(
            name="interleaving",
            prealgebra=pa,
            combine=partial(interleaving_product, prealgebra=pa),
            neutral=iota,
            commutative=True,
            family=SHUFFLE,
        )
        return CvaInstance(name="action", seq=seq, par=par)

    if cfg.model == "state":
        pa = Prealgebra(topology=topology, tuples=nonempty_list_lift(states), cap=cfg.cap)
        glue, family = gluing_product, GLUE
    else:
        pa = Prealgebra(topology=topology, tuples=StutterFreeTraces(states=states), cap=cfg.cap)
        glue, family = relative_gluing_product, RELATIVE_GLUE

    seq = OvaInstance(
        name=family.name,
        prealgebra=pa,
        combine=partial(glue, prealgebra=pa),
        neutral=partial(tau, states=states),
        family=family,
    )
    par = OvaInstance(
        name="join",
        prealgebra=pa,
        combine=partial(relational_join, ts=pa.tuples),
        neutral=pa.top,
        commutative=True,
        relational=True,
    )
    return CvaInstance(name=cfg.model, seq=seq, par=par)
