import numpy as np
import pytest

from app.errors import DomainError
from app.graph import Graph, connected_components, from_edge_list, is_connected, mean_degree


def _path(n):
    return Graph.from_pairs(n, np.arange(n - 1), np.arange(1, n))


def test_from_pairs_builds_sorted_symmetric_adjacency():
    g = Graph.from_pairs(4, np.array([2, 0, 1]), np.array([0, 1, 3]))
    assert g.adjacency == [[1, 2], [0, 3], [0], [1]]
    assert g.degrees.tolist() == [2, 2, 1, 1]
    assert g.num_edges == 3
    assert g.edges().tolist() == [[0, 1], [0, 2], [1, 3]]


def test_graph_arrays_are_read_only():
    g = _path(3)
    with pytest.raises(ValueError):
        g.degrees[0] = 7
    with pytest.raises(ValueError):
        g.indices[0] = 2


def test_rejects_self_loop_and_asymmetry():
    with pytest.raises(DomainError):
        Graph(2, np.array([0, 1, 1]), np.array([0]))
    with pytest.raises(DomainError):
        Graph(2, np.array([0, 1, 1]), np.array([1]))


def test_rejects_repeated_neighbour():
    with pytest.raises(DomainError):
        Graph(2, np.array([0, 2, 4]), np.array([1, 1, 0, 0]))


def test_mean_degree():
    assert mean_degree(_path(4)) == pytest.approx(1.5)


def test_mean_degree_of_large_sparse_graph():
    # 16082 vertices with 108334 edges: circulant offsets 1..6 everywhere plus offset 7 on a prefix
    n = 16082
    u = [np.arange(n) for _ in range(6)] + [np.arange(11842)]
    v = [(np.arange(n) + k) % n for k in range(1, 7)] + [(np.arange(11842) + 7) % n]
    g = Graph.from_pairs(n, np.concatenate(u), np.concatenate(v))
    assert g.num_edges == 108334
    assert mean_degree(g) == pytest.approx(13.47, abs=0.01)


def test_components_ordered_by_size_then_smallest_vertex():
    # {0,1}, {2,3,4}, {5}, {6,7}
    g = Graph.from_pairs(8, np.array([0, 2, 3, 6]), np.array([1, 3, 4, 7]))
    comp = connected_components(g)
    assert comp.count == 4
    assert comp.component_sizes == [3, 2, 2, 1]
    assert comp.label.tolist() == [1, 1, 0, 0, 0, 3, 2, 2]
    assert not is_connected(g)


def test_connected_path_and_isolated_vertices():
    assert is_connected(_path(5))
    empty = Graph(3, np.zeros(4, dtype=np.int64), np.array([], dtype=np.int64))
    comp = connected_components(empty)
    assert comp.count == 3
    assert comp.component_sizes == [1, 1, 1]


def test_from_edge_list_maps_ids_and_cleans():
    g, report = from_edge_list([("a", "b"), ("b", "a"), ("c", "c"), ("b", "c")])
    assert g.labels == ("a", "b", "c")
    assert g.num_edges == 2
    assert report.duplicate_edges == 1
    assert report.self_loops == 1
    assert report.vertices == 3
    assert g.label(1) == "b"
    assert g.degree(1) == 2
