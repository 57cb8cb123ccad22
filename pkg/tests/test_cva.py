import pytest
from conftest import state

from cva_lab.cva import (
    CvaInstance,
    check_concurrency_rule,
    check_cva,
    check_derived_neutral_props,
    check_neutral_laws,
    check_seq_le_par,
    check_weak_exchange,
    exchange_sides,
    find_strict_exchange_witness,
    hoare,
    jones,
    refines,
)
from cva_lab.exceptions import DomainError
from cva_lab.ova import OvaInstance
from cva_lab.valuations import Valuation

X = frozenset({"x"})


def _property(report, name):
    return next(v for k, v in report.properties.items() if k.endswith(name))


def test_action_cva(action_model, action_budget):
    report = check_cva(action_model, action_budget)
    assert report.valid, report.reasons
    for law in ("cva.weak_exchange", "cva.local_weak_exchange", "cva.neutral_skip", "cva.seq_le_par"):
        assert report.instances_tested[law] > 0
    assert _property(report, "neutrals_coincide")


def test_state_cva(state_model, trace_budget):
    report = check_cva(state_model, trace_budget)
    assert report.valid, report.reasons
    assert "ova.associativity" in report.law_ids
    assert "cva.concurrency_rule" in report.law_ids
    assert not _property(report, "neutrals_coincide")
    # skip and run differ, so a ; b <= a || b is not derivable and is left out
    assert "cva.seq_le_par" not in report.law_ids
    assert any("cva.seq_le_par" in w for w in report.warnings)


@pytest.mark.parametrize(
    "check",
    [
        pytest.param(check_weak_exchange, id="weak-exchange"),
        pytest.param(check_neutral_laws, id="neutral-laws"),
        pytest.param(check_concurrency_rule, id="concurrency-rule"),
    ],
)
def test_relative_cva_laws(relative_model, trace_budget, check):
    report = check(relative_model, trace_budget)
    assert report.valid, report.reasons


def test_relative_cva(relative_model, trace_budget):
    report = check_cva(relative_model, trace_budget)
    assert report.valid, report.reasons
    assert not _property(report, "neutrals_coincide")
    assert "cva.run_seq_idempotent" in report.law_ids


@pytest.mark.parametrize("fixture", ["action_model", "state_model", "relative_model"])
def test_derived_neutral_props(request, trace_budget, fixture):
    report = check_derived_neutral_props(request.getfixturevalue(fixture), trace_budget)
    assert report.valid, report.reasons
    opens = 2 if fixture == "action_model" else 4
    assert report.instances_tested["cva.skip_le_run"] == opens


def test_seq_le_par_on_action(action_model, action_budget):
    report = check_seq_le_par(action_model, action_budget)
    assert report.valid
    assert report.properties["neutrals_coincide"]


def test_strict_exchange_witness(action_model, action_budget):
    report = find_strict_exchange_witness(action_model, action_budget)
    assert report.valid
    assert report.properties["strict_exchange_found"]
    witness = report.witnesses["cva.strict_exchange"]
    # two interleavings on the left, six on the right
    assert len(witness["left"]["traces"]) == 4
    assert len(witness["right"]["traces"]) == 6


def test_exchange_sides_for_single_steps(action_model):
    events = [((("x", i),), (("x", j),)) for i in (0, 1) for j in (0, 1)]
    a, b, c, d = (Valuation(X, frozenset([(e,)])) for e in events)
    lhs, rhs = exchange_sides(action_model, a, b, c, d)
    assert lhs.content < rhs.content


def test_mutated_run_breaks_neutral_laws(state_model, trace_budget):
    pa = state_model.prealgebra

    def length_two(a):
        return Valuation(a, frozenset(t for t in pa.universe(a) if len(t) == 2))

    par = OvaInstance(
        name="join", prealgebra=pa, combine=state_model.par.combine, neutral=length_two,
        commutative=True, relational=True,
    )
    mutant = CvaInstance(name="state", seq=state_model.seq, par=par)
    report = check_neutral_laws(mutant, trace_budget)
    assert not report.valid
    assert "cva.neutral_run" in report.counterexamples


def test_non_commutative_par_is_rejected(state_model):
    with pytest.raises(DomainError):
        CvaInstance(name="bad", seq=state_model.seq, par=state_model.seq)


def test_shared_prealgebra_is_required(state_model, relative_model):
    with pytest.raises(DomainError):
        CvaInstance(name="bad", seq=state_model.seq, par=relative_model.par)


def test_hoare_and_refinement(state_model):
    p = Valuation(X, frozenset([(state(x=0),)]))
    a = Valuation(X, frozenset([(state(x=0), state(x=1))]))
    q = Valuation(X, frozenset([(state(x=0), state(x=1)), (state(x=1),)]))
    assert hoare(p, a, q, state_model)
    assert not hoare(p, a, Valuation(X, frozenset([(state(x=1),)])), state_model)
    assert refines(a, q, state_model)
    assert not refines(q, a, state_model)
    assert refines(a, q, state_model.prealgebra)


def test_jones(state_model):
    p = Valuation(X, frozenset([(state(x=0),)]))
    a = Valuation(X, frozenset([(state(x=0), state(x=1))]))
    rely = state_model.run(frozenset())
    guarantee = state_model.run(X)
    # the trivial rely constrains nothing, so the quintuple reduces to the Hoare triple
    q = Valuation(X, frozenset([(state(x=0), state(x=1))]))
    assert jones(p, rely, a, guarantee, q, state_model)
    assert refines(a, guarantee, state_model)
    assert not jones(p, rely, a, p, q, state_model)


def test_relative_products_are_not_capped(relative_model):
    # both traces fit the cap of 3, their glue does not
    p = Valuation(X, frozenset([(state(x=0), state(x=1))]))
    a = Valuation(X, frozenset([(state(x=1), state(x=0), state(x=1))]))
    glued = relative_model.seq(p, a)
    assert glued.content == {(state(x=0), state(x=1), state(x=0), state(x=1))}
    assert not hoare(p, a, Valuation(X, frozenset()), relative_model)
    assert hoare(p, a, glued, relative_model)


@pytest.mark.parametrize("fixture", ["state_model", "relative_model"])
def test_skip_is_a_left_unit_for_hoare(request, fixture):
    cva = request.getfixturevalue(fixture)
    a = Valuation(X, frozenset([(state(x=0), state(x=1)), (state(x=1),)]))
    assert hoare(cva.skip(X), a, a, cva)
