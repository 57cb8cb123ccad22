import pytest
from conftest import get_model, state

from cva_lab.exceptions import DomainError
from cva_lab.morphisms import (
    MorphismCandidate,
    check_extension_preservation,
    check_gamma_sigma_obstruction,
    check_morphism,
    identity_morphism,
    stutter_quotient,
    stutter_quotient_morphism,
)
from cva_lab.sampling import Budget
from cva_lab.valuations import Valuation

X = frozenset({"x"})

PAIRS = Budget(samples=20, max_traces=2, max_length=2, exhaustive_limit=2000)


@pytest.mark.parametrize(
    "mode, level",
    [
        pytest.param("strong", "cva", id="strong-cva"),
        pytest.param("lax", "ova", id="lax-ova"),
        pytest.param("colax", "cva", id="colax-cva"),
    ],
)
def test_identity_is_a_morphism(state_model, trace_budget, mode, level):
    report = check_morphism(identity_morphism(state_model), mode=mode, level=level, budget=trace_budget)
    assert report.valid, report.reasons
    assert "morphism.multiplicativity_seq" in report.law_ids
    assert ("morphism.multiplicativity_par" in report.law_ids) is (level == "cva")


def test_stutter_quotient_is_not_lax_for_join(state_model, relative_model):
    m = stutter_quotient_morphism(state_model, relative_model)
    report = check_morphism(m, mode="lax", level="cva", budget=PAIRS)
    assert not report.valid
    # [x0, x1] and [y0] join only as stutter-free words
    assert "morphism.multiplicativity_par" in report.counterexamples
    assert any("morphism.multiplicativity_par" in r for r in report.reasons)


@pytest.mark.parametrize(
    "mode, valid",
    [
        pytest.param("colax", True, id="colax"),
        pytest.param("strong", False, id="strong"),
    ],
)
def test_stutter_quotient_is_colax(state_model, relative_model, mode, valid):
    m = stutter_quotient_morphism(state_model, relative_model)
    report = check_morphism(m, mode=mode, level="cva", budget=PAIRS)
    assert report.valid is valid, report.reasons
    if valid:
        assert report.instances_tested["morphism.multiplicativity_par"] > 0
    else:
        assert "morphism.multiplicativity_par" in report.counterexamples


def test_stutter_quotient_sends_neutrals_to_neutrals(state_model, relative_model):
    for a in state_model.prealgebra.topology.opens:
        assert stutter_quotient(state_model.run(a)) == relative_model.run(a)
        assert stutter_quotient(state_model.skip(a)) == relative_model.skip(a)


def test_stutter_quotient_preserves_extension(state_model, relative_model, trace_budget):
    report = check_extension_preservation(stutter_quotient_morphism(state_model, relative_model), trace_budget)
    assert report.valid, report.reasons
    assert report.instances_tested["morphism.extension_preservation"] > 0


def test_stutter_quotient():
    a = Valuation(X, frozenset([(state(x=0), state(x=0), state(x=1)), (state(x=1),)]))
    assert stutter_quotient(a).content == {(state(x=0), state(x=1)), (state(x=1),)}


def test_candidate_wiring(state_model, relative_model, one_atom):
    with pytest.raises(DomainError):
        stutter_quotient_morphism(relative_model, state_model)
    elsewhere = get_model("state", one_atom)
    with pytest.raises(DomainError):
        check_morphism(MorphismCandidate("across", state_model, elsewhere, lambda a: a))

    def forget(a):
        return Valuation(frozenset(), frozenset())

    moved = MorphismCandidate("forget", state_model, state_model, forget)
    with pytest.raises(DomainError):
        moved(Valuation(X, frozenset()))


def test_action_state_obstruction():
    report = check_gamma_sigma_obstruction()
    assert report.valid, report.reasons
    assert report.properties["no_unit_preserving_strong_morphism_action_to_state"]
    assert report.instances_tested["obstruction.below_top"] == 2**2 + 2**6
    # on the empty domain the monotone maps with f(top) = iota are the five up-sets of a square
    assert report.instances_tested["obstruction.below_iota"] == 5
