import pytest

from ringmpc.errors import TopologyError
from ringmpc.topology import (
    ChannelGraph,
    build_cycle,
    default_parties,
    dummy_triangle,
    secure_cycles,
    validate_topology,
)


def test_build_cycle_3():
    g = build_cycle(3)
    assert {(i, j) for i, j, _ in g.edges()} == {(0, 1), (1, 2), (0, 2)}
    assert all(sec == "secure" for _, _, sec in g.edges())


def test_build_cycle_5_degrees():
    g = build_cycle(5)
    assert len(g.edges()) == 5
    deg = {v: 0 for v in range(5)}
    for i, j, _ in g.edges():
        deg[i] += 1
        deg[j] += 1
    assert set(deg.values()) == {2}


def test_two_parties_rejected():
    with pytest.raises(TopologyError):
        build_cycle(2)


def test_validate_accepts_cycle():
    assert validate_topology(build_cycle(3))


def test_validate_rejects_path():
    g = ChannelGraph(default_parties(3), [(0, 1, "secure"), (1, 2, "secure")])
    result = validate_topology(g)
    assert not result
    assert "degree 1" in result.reason
    assert "vertex 0" in result.reason or "vertex 2" in result.reason


def test_validate_accepts_two_disjoint_triangles():
    edges = [(0, 1, "secure"), (1, 2, "secure"), (0, 2, "secure"),
             (3, 4, "secure"), (4, 5, "secure"), (3, 5, "secure")]
    g = ChannelGraph(default_parties(6), edges)
    assert validate_topology(g)
    assert secure_cycles(g) == [[0, 1, 2], [3, 4, 5]]


def test_validate_rejects_triangle_with_extra_degree():
    # 4 secure edges on 4 vertices with a degree-3 vertex
    edges = [(0, 1, "secure"), (1, 2, "secure"), (0, 2, "secure"), (0, 3, "secure")]
    g = ChannelGraph(default_parties(4), edges)
    result = validate_topology(g)
    assert not result
    assert "degree 3" in result.reason or "degree 1" in result.reason


def test_duplicate_edge_rejected_at_construction():
    g = build_cycle(3)
    with pytest.raises(TopologyError):
        g.add_edge(0, 1, "secure")
    with pytest.raises(TopologyError):
        g.add_edge(1, 0, "insecure")


def test_self_loop_rejected():
    with pytest.raises(TopologyError):
        ChannelGraph(default_parties(3), [(1, 1, "secure")])


@pytest.mark.parametrize("k", list(range(3, 65)))
def test_all_cycles_validate(k):
    assert validate_topology(build_cycle(k))


def test_insecure_edges_do_not_count_for_the_cycle_cover():
    g = build_cycle(3)
    g.add_edge(0, 2, "insecure") if not g.has_edge(0, 2) else None
    # adding an insecure chord to a 4-cycle leaves it valid
    g4 = build_cycle(4)
    g4.add_edge(0, 2, "insecure")
    assert validate_topology(g4)


def test_dummy_triangle_roles():
    g = dummy_triangle()
    assert [p.name for p in g.parties] == ["A", "B", "D"]
    assert [p.full for p in g.parties] == [True, True, False]
    assert validate_topology(g)


def test_secure_cycles_orientation_deterministic():
    g = build_cycle(5)
    assert secure_cycles(g) == [[0, 1, 2, 3, 4]]


def test_config_roundtrip():
    g = dummy_triangle()
    g2 = ChannelGraph.from_config(g.to_config())
    assert g2.to_config() == g.to_config()
    assert ChannelGraph.from_config({"cycle": 4}).to_config() == build_cycle(4).to_config()


def test_unknown_party_lookup():
    with pytest.raises(TopologyError):
        build_cycle(3).party("Q7")
