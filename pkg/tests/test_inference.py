from itertools import combinations

import pytest
from conftest import get_model, state

from cva_lab.exceptions import DomainError, UnsupportedOperationError
from cva_lab.inference import (
    InferenceProblem,
    Knowledgebase,
    elimination_order,
    joint_valuation,
    solve_inference,
    solve_inference_semijoin,
)
from cva_lab.sampling import Budget, ValuationSampler
from cva_lab.topology import discrete_topology
from cva_lab.valuations import Valuation

X, Y, XY, YZ = frozenset({"x"}), frozenset({"y"}), frozenset({"x", "y"}), frozenset({"y", "z"})


@pytest.fixture(scope="module")
def three_atoms():
    return discrete_topology(["x", "y", "z"])


@pytest.fixture(scope="module")
def relations(three_atoms):
    db = get_model("db", three_atoms)
    left = Valuation(XY, frozenset([state(x=0, y=0), state(x=0, y=1), state(x=1, y=1)]))
    right = Valuation(YZ, frozenset([state(y=1, z=0)]))
    return Knowledgebase(items=(left, right), model=db)


def test_joint_valuation(relations):
    joint = joint_valuation(relations)
    assert joint.domain == frozenset({"x", "y", "z"})
    assert joint.content == {state(x=0, y=1, z=0), state(x=1, y=1, z=0)}


def test_naive_and_semijoin_agree(relations):
    problem = InferenceProblem(kb=relations, queries=[["x"], ["y", "z"], []])
    naive = solve_inference(problem)
    assert naive[X].content == {state(x=0), state(x=1)}
    assert naive[frozenset()].content == {()}
    assert solve_inference_semijoin(problem) == naive


def test_elimination_order(relations):
    # z occurs once, so it goes first; y then only links the remaining factors
    assert elimination_order(relations, ["x"]) == ["z", "y"]
    assert elimination_order(relations, ["x", "y", "z"]) == []


def test_semijoin_on_triangle(db_model):
    pa = db_model.prealgebra
    ade, bef, fcd = frozenset("ade"), frozenset("bef"), frozenset("fcd")
    items = (
        Valuation(ade, frozenset(t for t in pa.universe(ade) if dict(t)["d"] == dict(t)["e"])),
        Valuation(bef, frozenset(t for t in pa.universe(bef) if dict(t)["e"] != dict(t)["f"])),
        Valuation(fcd, frozenset(t for t in pa.universe(fcd) if dict(t)["d"] == 1)),
    )
    problem = InferenceProblem(kb=Knowledgebase(items=items, model=db_model), queries=[["d"], ["e"], ["f"]])
    answers = solve_inference_semijoin(problem)
    assert answers == solve_inference(problem)
    assert answers[frozenset("d")].content == {(("d", 1),)}
    assert answers[frozenset("e")].content == {(("e", 1),)}
    assert answers[frozenset("f")].content == {(("f", 0),)}


@pytest.mark.parametrize("seed", range(100))
def test_semijoin_on_random_triangle(db_model, seed):
    sampler = ValuationSampler(db_model.prealgebra, Budget(max_traces=5, seed=seed))
    items = tuple(sampler.valuation(frozenset(d)) for d in ("ade", "bef", "fcd"))
    problem = InferenceProblem(kb=Knowledgebase(items=items, model=db_model), queries=[["d"], ["e"], ["f"]])
    assert solve_inference_semijoin(problem) == solve_inference(problem)


@pytest.mark.parametrize("seed", range(100))
def test_semijoin_on_state_traces(state_model, seed):
    sampler = ValuationSampler(state_model.prealgebra, Budget(max_traces=4, max_length=2, seed=seed))
    domains = [X, XY, Y] + ([sampler.domain()] if seed % 2 else [])
    items = tuple(sampler.valuation(d) for d in domains)
    problem = InferenceProblem(kb=Knowledgebase(items=items, model=state_model), queries=[X, Y, []])
    assert solve_inference_semijoin(problem) == solve_inference(problem)


def test_natural_join_restricts_as_semijoin():
    db = get_model("db", discrete_topology(["x", "y", "z"]))
    pa = db.prealgebra
    relations = [
        Valuation(d, frozenset(rows))
        for d in pa.topology.opens
        for k in range(5)
        for rows in combinations(pa.universe(d), k)
    ]
    for a in relations:
        for b in relations:
            shared = pa.restrict(b, a.domain & b.domain)
            assert pa.restrict(db(a, b), a.domain) == db(a, shared)


def test_seq_knowledgebase(state_model):
    p = Valuation(X, frozenset([(state(x=0),)]))
    a = Valuation(X, frozenset([(state(x=0), state(x=1))]))
    kb = Knowledgebase(items=[p, a], model=state_model, op="seq")
    assert kb.ova is state_model.seq
    problem = InferenceProblem(kb=kb, queries=[X])
    assert solve_inference(problem)[X].content == {(state(x=0), state(x=1))}
    with pytest.raises(UnsupportedOperationError):
        solve_inference_semijoin(problem)


@pytest.mark.parametrize(
    "build, error",
    [
        pytest.param(lambda m, db: Knowledgebase(items=(), model=m), DomainError, id="empty-kb"),
        pytest.param(lambda m, db: Knowledgebase(items=(m.run(X),), model=m, op="both"), DomainError, id="bad-op"),
        pytest.param(
            lambda m, db: Knowledgebase(items=(db.epsilon(frozenset("d")),), model=db, op="seq"),
            UnsupportedOperationError,
            id="seq-on-db",
        ),
        pytest.param(
            lambda m, db: InferenceProblem(kb=Knowledgebase(items=(m.run(X),), model=m), queries=[["y"]]),
            DomainError,
            id="uncovered-query",
        ),
        pytest.param(
            lambda m, db: InferenceProblem(
                kb=Knowledgebase(items=(db.epsilon(frozenset("ade")),), model=db), queries=[["a"]]
            ),
            DomainError,
            id="query-not-open",
        ),
    ],
)
def test_invalid_problems(state_model, db_model, build, error):
    with pytest.raises(error):
        build(state_model, db_model)
