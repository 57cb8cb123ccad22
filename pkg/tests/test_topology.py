import pytest

from cva_lab.exceptions import DomainError
from cva_lab.topology import (
    Topology,
    alexandrov_from_graph,
    canonical,
    discrete_topology,
    generate_topology,
    inclusions,
)

TRIANGLE_EDGES = [("d", ("a", "c")), ("e", ("a", "b")), ("f", ("b", "c"))]


def test_triangle_opens(triangle):
    assert len(triangle) == 18
    for member in (["a", "d", "e"], ["d"], ["d", "e"], ["a", "b", "d", "e", "f"]):
        assert triangle.is_open(member)
    # a node is open only together with every link it touches
    assert not triangle.is_open(["a"])
    assert not triangle.is_open(["a", "d"])
    assert triangle.opens[0] == frozenset()
    assert triangle.opens[-1] == triangle.ground


def test_graph_matches_subbasis(triangle):
    from_graph = alexandrov_from_graph(["a", "b", "c"], TRIANGLE_EDGES)
    assert set(from_graph.opens) == set(triangle.opens)
    assert from_graph == triangle


@pytest.mark.parametrize(
    "nodes, edges, n_opens",
    [
        pytest.param(["u", "v"], [("uv", ("u", "v"))], 5, id="single-edge"),
        pytest.param(["u"], [], 2, id="isolated-node"),
        pytest.param(["u", "v", "w"], [("p", ("u", "v")), ("q", ("v", "w"))], 13, id="path"),
    ],
)
def test_alexandrov_counts(nodes, edges, n_opens):
    assert len(alexandrov_from_graph(nodes, edges)) == n_opens


def test_empty_subbasis():
    t = generate_topology(["x", "y"], [])
    assert set(t.opens) == {frozenset(), frozenset({"x", "y"})}


def test_generation_is_idempotent(triangle):
    regenerated = generate_topology(triangle.ground, triangle.opens)
    assert regenerated == triangle


def test_discrete():
    t = discrete_topology(["x", "y", "z"])
    assert len(t) == 8
    assert all(t.is_open(s) for s in (["x"], ["y", "z"], []))


@pytest.mark.parametrize(
    "call",
    [
        pytest.param(lambda: generate_topology(["x"], [["y"]]), id="subbasis-outside-ground"),
        pytest.param(lambda: generate_topology(["x", "x"], []), id="duplicate-atoms"),
        pytest.param(lambda: discrete_topology([f"a{i}" for i in range(13)]), id="too-many-atoms"),
        pytest.param(lambda: alexandrov_from_graph(["u"], [("e", ("u", "v"))]), id="undeclared-node"),
        pytest.param(lambda: alexandrov_from_graph(["u"], [("u", ("u", "u"))]), id="label-is-node"),
        pytest.param(
            lambda: Topology(
                ground=frozenset({"x", "y"}),
                opens=(frozenset(), frozenset({"x", "y"}), frozenset({"x"}), frozenset({"z"})),
            ),
            id="not-closed",
        ),
    ],
)
def test_invalid_spaces(call):
    with pytest.raises(DomainError):
        call()


def test_hull_and_interior(triangle):
    assert triangle.hull(["a"]) == frozenset({"a", "d", "e"})
    assert triangle.hull([]) == frozenset()
    assert triangle.interior(["a", "d"]) == frozenset({"d"})
    with pytest.raises(DomainError):
        triangle.hull(["z"])
    with pytest.raises(DomainError):
        triangle.require_open(["a"])
    with pytest.raises(DomainError) as exc:
        triangle.require_open(["a", "d"])
    # the message names the nearest open sets around a non-open set
    assert "between ['d'] and ['a', 'd', 'e']" in str(exc.value)
    with pytest.raises(DomainError, match="not in the ground set"):
        triangle.require_open(["z"])


def test_inclusions(two_atoms):
    pairs = inclusions(two_atoms)
    # reflexive pairs are included; every open set contains the empty set
    assert len(pairs) == 9
    assert (frozenset(), frozenset({"x", "y"})) in pairs
    assert all(b <= a for b, a in pairs)


def test_as_dict(two_atoms):
    d = two_atoms.as_dict()
    assert d["ground"] == ["x", "y"]
    assert d["opens"] == [[], ["x"], ["y"], ["x", "y"]]
    assert canonical({"b", "a"}) == ["a", "b"]
