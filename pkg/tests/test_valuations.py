import pytest
from conftest import state

from cva_lab.exceptions import DomainError, ValuationFormatError
from cva_lab.tuples import StateTuples, StutterFreeTraces, nonempty_list_lift
from cva_lab.valuations import (
    Prealgebra,
    Valuation,
    domain_of,
    evaluate_global,
    gc_leq,
    global_element_check,
    restrict,
    truncate,
)

STATES = StateTuples(values=(0, 1))
X, Y, XY = frozenset({"x"}), frozenset({"y"}), frozenset({"x", "y"})


@pytest.fixture(scope="module")
def relations(two_atoms):
    return Prealgebra(topology=two_atoms, tuples=STATES)


@pytest.fixture(scope="module")
def traces(two_atoms):
    return Prealgebra(topology=two_atoms, tuples=nonempty_list_lift(STATES), cap=3)


@pytest.fixture(scope="module")
def words(two_atoms):
    return Prealgebra(topology=two_atoms, tuples=StutterFreeTraces(states=STATES), cap=3)


def test_restrict(relations):
    a = Valuation(XY, frozenset([state(x=0, y=0), state(x=0, y=1)]))
    assert restrict(a, X, relations) == Valuation(X, frozenset([state(x=0)]))
    assert restrict(a, XY, relations) is a
    assert domain_of(a) == XY
    with pytest.raises(DomainError):
        relations.restrict(Valuation(X, frozenset()), XY)


def test_refinement_order(relations):
    a = Valuation(XY, frozenset([state(x=0, y=0)]))
    b = Valuation(X, frozenset([state(x=0)]))
    assert gc_leq(a, b, relations)
    # the coarser valuation is never below a finer one
    assert not gc_leq(b, a, relations)
    assert not gc_leq(a, Valuation(X, frozenset([state(x=1)])), relations)
    assert gc_leq(Valuation(XY, frozenset()), b, relations)


def test_extend_is_preimage(relations):
    b = Valuation(X, frozenset([state(x=1)]))
    up = relations.extend(b, XY)
    assert up.content == {state(x=1, y=0), state(x=1, y=1)}
    assert relations.extend(b, X) is b
    with pytest.raises(DomainError):
        relations.extend(up, X)


def test_extend_under_reducing_restriction_is_capped(words):
    b = Valuation(X, frozenset([(state(x=0),)]))
    up = words.extend(b, XY)
    assert up.content
    assert all(len(t) <= 3 for t in up.content)
    # x stays 0 while y may alternate
    assert (state(x=0, y=0), state(x=0, y=1), state(x=0, y=0)) in up.content
    assert words.restrict(up, X) == b


def test_extend_keeps_traces_longer_than_the_cap(words):
    word = (state(x=0), state(x=1), state(x=0), state(x=1))
    b = Valuation(X, frozenset([word]))
    up = words.extend(b, XY)
    assert up.content
    assert max(len(t) for t in up.content) == 4
    assert words.restrict(up, X) == b
    assert (state(x=0, y=1), state(x=1, y=1), state(x=0, y=1), state(x=1, y=1)) in up.content


def test_universe_and_top(traces):
    assert len(traces.universe(X)) == 2 + 4 + 8
    assert len(traces.universe(X, max_length=1)) == 2
    top = traces.top(frozenset())
    # one trace per length on the empty domain
    assert len(top) == 3
    assert len(list(traces.valuations(X, max_length=1))) == 4


def test_truncate_and_window(traces, words, relations):
    long = Valuation(X, frozenset([(state(x=0),), (state(x=0),) * 3]))
    assert truncate(long, traces, 2).content == {(state(x=0),)}
    assert truncate(long, traces).content == long.content
    assert truncate(Valuation(X, frozenset([state(x=0)])), relations, 1).content == {state(x=0)}
    assert traces.window(2) == 3
    assert words.window(2) == 2
    assert words.window(5) == 1
    assert relations.window(2) is None


def test_equal_within_window(traces):
    short = Valuation(X, frozenset([(state(x=0),)]))
    longer = Valuation(X, frozenset([(state(x=0),), (state(x=1),) * 3]))
    assert not traces.equal(short, longer)
    assert traces.equal(short, longer, window=2)
    assert not traces.equal(short, Valuation(Y, frozenset([(state(y=0),)])))


def test_encode_is_canonical(traces):
    v = Valuation(XY, frozenset([(state(x=1, y=0),), (state(x=0, y=0), state(x=0, y=1))]))
    encoded = traces.encode(v)
    assert encoded["domain"] == ["x", "y"]
    assert encoded["traces"] == [[{"x": 0, "y": 0}, {"x": 0, "y": 1}], [{"x": 1, "y": 0}]]
    assert traces.decode(encoded) == v
    assert traces.dumps(v) == traces.dumps(traces.decode(encoded))


def test_decode_rows(relations):
    v = relations.decode({"domain": ["y"], "rows": [{"y": 1}]})
    assert v == Valuation(Y, frozenset([state(y=1)]))
    assert "rows" in relations.encode(v)


@pytest.mark.parametrize(
    "obj, index",
    [
        pytest.param({"domain": ["x"], "traces": [[{"x": 0}], [{"x": 0, "y": 1}]]}, 1, id="wrong-atoms"),
        pytest.param({"domain": ["x"], "traces": [[{"x": 3}]]}, 0, id="bad-value"),
        pytest.param({"domain": ["x"], "traces": [[{"x": 0}], []]}, 1, id="empty-trace"),
    ],
)
def test_decode_names_trace_index(traces, obj, index):
    with pytest.raises(ValuationFormatError) as exc:
        traces.decode(obj, path="v.json")
    assert exc.value.trace_index == index
    assert f"trace {index}" in str(exc.value)
    assert "v.json" in str(exc.value)


def test_decode_rejects_malformed(traces, triangle):
    with pytest.raises(ValuationFormatError):
        traces.decode({"traces": []})
    with pytest.raises(ValuationFormatError):
        traces.decode({"domain": ["x"], "traces": {}})
    with pytest.raises(DomainError):
        Prealgebra(topology=triangle, tuples=STATES).decode({"domain": ["a"], "rows": []})


def test_global_elements(traces):
    top = global_element_check(traces.top, traces)
    assert top.valid
    assert top.instances_tested["valuations.global_element"] == 9

    def shrinking(a):
        # keeps only traces longer than the number of atoms: not compatible with restriction
        return Valuation(a, frozenset(t for t in traces.universe(a) if len(t) > len(a)))

    report = global_element_check(shrinking, traces)
    assert not report.valid
    assert report.counterexample["law_id"] == "valuations.global_element"


def test_evaluate_global_rejects_partial(traces):
    with pytest.raises(DomainError):
        evaluate_global({frozenset(): traces.top(frozenset())}, traces)
    with pytest.raises(DomainError):
        evaluate_global(lambda a: traces.top(frozenset()), traces)
