from itertools import product

import pytest
from conftest import state

from cva_lab.exceptions import DomainError
from cva_lab.models import concatenate, glue_traces, interleave_traces, relative_glue_traces
from cva_lab.sampling import Budget
from cva_lab.tuples import (
    EventTuples,
    StateTuples,
    StutterFreeTraces,
    check_projection_exchange,
    check_tuple_system,
    is_stutter_free,
    list_lift,
    nonempty_list_lift,
    relational_join,
    semigroup_product_rel,
    stutter_reduce,
)
from cva_lab.valuations import Valuation

STATES = StateTuples(values=(0, 1))
X, Y, XY = frozenset({"x"}), frozenset({"y"}), frozenset({"x", "y"})

SMALL = Budget(samples=200, max_traces=3, max_length=2, exhaustive_limit=2000, seed=0)


@pytest.mark.parametrize(
    "ts",
    [
        pytest.param(STATES, id="states"),
        pytest.param(EventTuples(states=STATES), id="events"),
        pytest.param(list_lift(EventTuples(states=STATES)), id="action-traces"),
        pytest.param(nonempty_list_lift(STATES), id="state-traces"),
        pytest.param(StutterFreeTraces(states=STATES), id="stutter-free"),
    ],
)
def test_tuple_system_laws(ts, two_atoms):
    report = check_tuple_system(ts, two_atoms, SMALL)
    assert report.valid, report.reasons
    assert set(report.law_ids) == {"tuples.presheaf", "tuples.flasque", "tuples.binary_gluing"}
    assert all(n > 0 for n in report.instances_tested.values())


def test_tuple_system_on_triangle(triangle):
    report = check_tuple_system(STATES, triangle, Budget(samples=20, seed=3))
    assert report.valid


def test_state_restriction_and_lifts():
    s = state(x=0, y=1)
    assert STATES.restrict(s, X) == state(x=0)
    assert STATES.restrict(s, frozenset()) == ()
    lifted = set(STATES.lifts(state(x=0), X, XY))
    assert lifted == {state(x=0, y=0), state(x=0, y=1)}
    assert list(STATES.common_lifts(state(x=0), X, state(y=1), Y)) == [s]


def test_stutter_reduce():
    assert stutter_reduce("aabbba") == tuple("aba")
    assert stutter_reduce([1]) == (1,)
    assert semigroup_product_rel("ab", "bc") == tuple("abc")
    assert semigroup_product_rel((0, 1, 0), (0, 1)) == (0, 1, 0, 1)
    assert is_stutter_free("aba")
    assert not is_stutter_free("abb")
    assert not is_stutter_free("")
    with pytest.raises(DomainError):
        stutter_reduce([])


def test_idempotent_generator_semigroup():
    words = [w for n in (1, 2, 3) for w in product("abc", repeat=n) if is_stutter_free(w)]
    assert len(words) == 3 + 6 + 12
    for x in "abc":
        assert semigroup_product_rel(x, x) == (x,)
    for t, s, r in product(words, repeat=3):
        left = semigroup_product_rel(semigroup_product_rel(t, s), r)
        assert left == semigroup_product_rel(t, semigroup_product_rel(s, r))
    # reducing first and multiplying agrees with multiplying the stuttering words
    for t, s in product(words, repeat=2):
        doubled = tuple(c for c in t for _ in range(2))
        assert semigroup_product_rel(doubled, s) == semigroup_product_rel(t, s)


def test_stutter_free_restriction_reduces():
    ts = StutterFreeTraces(states=STATES)
    word = (state(x=0, y=0), state(x=0, y=1), state(x=1, y=1))
    assert ts.restrict(word, X) == (state(x=0), state(x=1))
    assert ts.restrict(word, frozenset()) == ((),)
    for lift in ts.lifts((state(x=0), state(x=1)), X, XY, max_length=3):
        assert ts.restrict(lift, X) == (state(x=0), state(x=1))
        assert is_stutter_free(lift)
    with pytest.raises(DomainError):
        list(ts.lifts((state(x=0),), X, XY))


def test_stutter_free_universe_size():
    ts = StutterFreeTraces(states=STATES)
    # 4 letters on two atoms: 4 words of length 1, 4*3 of length 2, 4*3*3 of length 3
    assert len(list(ts.tuples(XY, 3))) == 4 + 12 + 36
    assert len(list(ts.tuples(X, 2))) == 2 + 2


def test_relational_join_synchronises():
    ts = nonempty_list_lift(STATES)
    a = Valuation(X, frozenset([(state(x=0), state(x=1))]))
    b = Valuation(Y, frozenset([(state(y=1), state(y=1)), (state(y=0),)]))
    joined = relational_join(a, b, ts)
    assert joined.domain == XY
    # equal lengths are required for componentwise gluing
    assert joined.content == {(state(x=0, y=1), state(x=1, y=1))}


def test_relational_join_of_stutter_free_words():
    ts = StutterFreeTraces(states=STATES)
    a = Valuation(X, frozenset([(state(x=0), state(x=1))]))
    b = Valuation(Y, frozenset([(state(y=0),)]))
    assert relational_join(a, b, ts).content == {(state(x=0, y=0), state(x=1, y=0))}


def test_interleave_traces():
    assert interleave_traces("ab", "c") == {tuple("abc"), tuple("acb"), tuple("cab")}
    assert interleave_traces((), "c") == {("c",)}
    assert len(interleave_traces("ab", "cd")) == 6


def test_glue_traces():
    assert glue_traces("ab", "bc") == tuple("abc")
    assert glue_traces("ab", "cb") is None
    assert glue_traces("", "a") is None
    assert relative_glue_traces("ab", "ba") == tuple("aba")


@pytest.mark.parametrize(
    "name, op, ts",
    [
        pytest.param("shuffle", interleave_traces, list_lift(EventTuples(states=STATES)), id="shuffle"),
        pytest.param("concatenation", concatenate, list_lift(EventTuples(states=STATES)), id="concatenation"),
        pytest.param(
            "glue", lambda t, s: [r for r in [glue_traces(t, s)] if r is not None], nonempty_list_lift(STATES),
            id="glue",
        ),
        pytest.param(
            "relative glue",
            lambda t, s: [r for r in [relative_glue_traces(t, s)] if r is not None],
            StutterFreeTraces(states=STATES),
            id="relative-glue",
        ),
    ],
)
def test_projection_exchange(name, op, ts, two_atoms):
    report = check_projection_exchange(name, op, ts, two_atoms, SMALL, pairs=500)
    assert report.valid, report.reasons
    assert report.instances_tested["tuples.projection_exchange"] == 500


def test_projection_exchange_detects_broken_operator(two_atoms):
    # dropping the first letter of the right operand does not commute with stutter reduction
    def broken(t, s):
        yield tuple(t) + tuple(s[1:])

    ts = StutterFreeTraces(states=STATES)
    report = check_projection_exchange("broken", broken, ts, two_atoms, SMALL, pairs=200)
    assert not report.valid
    assert any("tuples.projection_exchange" in r for r in report.reasons)


@pytest.mark.parametrize(
    "ts, obj, domain",
    [
        pytest.param(STATES, {"x": 0, "y": 1}, XY, id="state"),
        pytest.param(EventTuples(states=STATES), {"pre": {"x": 0}, "post": {"x": 1}}, X, id="event"),
        pytest.param(list_lift(EventTuples(states=STATES)), [], X, id="empty-action-trace"),
        pytest.param(StutterFreeTraces(states=STATES), [{"x": 0}, {"x": 1}], X, id="stutter-free"),
    ],
)
def test_decode(ts, obj, domain):
    assert ts.encode(ts.decode(obj, domain)) == obj


@pytest.mark.parametrize(
    "ts, obj, domain",
    [
        pytest.param(STATES, {"x": 2}, X, id="value-outside-set"),
        pytest.param(STATES, {"x": 0, "y": 0}, X, id="extra-atom"),
        pytest.param(nonempty_list_lift(STATES), [], X, id="empty-state-trace"),
        pytest.param(StutterFreeTraces(states=STATES), [{"x": 0}, {"x": 0}], X, id="stuttering"),
        pytest.param(EventTuples(states=STATES), {"pre": {"x": 0}}, X, id="missing-post"),
    ],
)
def test_decode_rejects(ts, obj, domain):
    with pytest.raises(ValueError):
        ts.decode(obj, domain)
