import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gehm.errors import GraphParseError, GraphValidationError, ParameterError
from gehm.graph import (
    GraphModelSpec,
    WeightedGraph,
    degree_vector,
    generate_graph,
    graph_io,
    matched_specs,
    normalize_weights,
    read_graph,
    write_graph,
)

from conftest import cycle_graph, edge_graph, random_connected_graph, star_graph


def test_rejects_self_loop():
    with pytest.raises(GraphValidationError):
        WeightedGraph(2, [0, 1, 1], [1, 0, 1])


def test_rejects_duplicate_and_asymmetric_edges():
    with pytest.raises(GraphValidationError):
        WeightedGraph(3, [0, 0, 1], [1, 1, 0])
    with pytest.raises(GraphValidationError):
        WeightedGraph(3, [0, 1, 1], [1, 0, 2])


def test_rejects_bad_weights_and_ids():
    with pytest.raises(GraphValidationError):
        WeightedGraph(2, [0, 1], [1, 0], [1.0, -1.0])
    with pytest.raises(GraphValidationError):
        WeightedGraph(2, [0, 1], [1, 0], [1.0, np.nan])
    with pytest.raises(GraphValidationError):
        WeightedGraph(2, [0, 2], [2, 0])


def test_arrays_are_read_only():
    g = cycle_graph(4)
    with pytest.raises(ValueError):
        g.weight[0] = 3.0


def test_reverse_index_points_to_transpose():
    g = cycle_graph(7)
    r = g.reverse_index
    assert np.array_equal(g.src[r], g.dst)
    assert np.array_equal(g.dst[r], g.src)


def test_ba_reference_size_and_attachment():
    spec = GraphModelSpec("barabasi_albert", n=2000, seed=123456, m=3)
    g = generate_graph(spec)
    assert g.n == 2000
    # complete core on 3 nodes, then 3 new edges per added node
    assert g.num_edges == 3 + 3 * (2000 - 3)
    deg = degree_vector(g)
    assert deg[3:].min() >= 3
    assert deg.sum() == 2 * g.num_edges
    assert g.is_connected()


def test_generation_is_deterministic():
    spec = GraphModelSpec("barabasi_albert", n=300, seed=5, m=2)
    assert generate_graph(spec) == generate_graph(spec)
    other = generate_graph(GraphModelSpec("barabasi_albert", n=300, seed=6, m=2))
    assert generate_graph(spec) != other


def test_er_zero_probability():
    g = generate_graph(GraphModelSpec("erdos_renyi", n=5, seed=1, prob=0.0))
    assert g.n == 5 and g.num_edges == 0


def test_er_full_probability_is_complete():
    g = generate_graph(GraphModelSpec("erdos_renyi", n=6, seed=1, prob=1.0))
    assert g.num_edges == 15


def test_ws_without_rewiring_is_ring():
    g = generate_graph(GraphModelSpec("watts_strogatz", n=6, seed=7, k=2, beta=0.0))
    assert np.all(degree_vector(g) == 2)
    assert g == cycle_graph(6)


def test_ws_rewiring_keeps_edge_count():
    g = generate_graph(GraphModelSpec("watts_strogatz", n=100, seed=3, k=4, beta=0.5))
    assert g.num_edges == 200


@pytest.mark.parametrize(
    "spec",
    [
        GraphModelSpec("barabasi_albert", n=5, m=5),
        GraphModelSpec("barabasi_albert", n=0, m=1),
        GraphModelSpec("erdos_renyi", n=5, prob=1.5),
        GraphModelSpec("watts_strogatz", n=10, k=3, beta=0.1),
        GraphModelSpec("watts_strogatz", n=10, k=4, beta=-0.1),
        GraphModelSpec("nonsense", n=10),
    ],
)
def test_invalid_specs_raise(spec):
    with pytest.raises(ParameterError):
        generate_graph(spec)


def test_matched_specs_share_mean_degree():
    specs = matched_specs(400, 3, seed=1)
    degs = [degree_vector(generate_graph(s)).mean() for s in specs]
    assert [s.model for s in specs] == ["barabasi_albert", "erdos_renyi", "watts_strogatz"]
    assert abs(degs[0] - 6) < 0.1 and abs(degs[2] - 6) < 1e-12
    assert abs(degs[1] - degs[0]) < 0.5


def test_row_normalization_star():
    g = normalize_weights(star_graph(3), "row")
    w = g.weight_matrix().toarray()
    assert np.allclose(w[0, 1:], 1 / 3)
    assert np.all(w[1:, 0] == 1.0)


def test_row_sums_are_one(rng):
    g = normalize_weights(random_connected_graph(rng, 25), "row")
    sums = np.asarray(g.weight_matrix().sum(axis=1)).ravel()
    assert np.max(np.abs(sums - 1)) <= 1e-12


def test_symmetric_normalization():
    g = normalize_weights(edge_graph(), "symmetric")
    assert list(g.weight) == [1.0, 1.0]
    g2 = normalize_weights(star_graph(4), "symmetric")
    assert g2.is_value_symmetric()
    assert np.allclose(g2.weight, 0.5)


def test_none_normalization_is_identity(rng):
    g = random_connected_graph(rng, 10)
    assert normalize_weights(g, "none") is g


def test_isolated_nodes_keep_zero_rows():
    g = WeightedGraph.from_edges(4, [(0, 1)])
    for scheme in ("row", "symmetric"):
        w = normalize_weights(g, scheme).weight_matrix().toarray()
        assert np.all(w[2:] == 0)


def test_unknown_scheme():
    with pytest.raises(ParameterError):
        normalize_weights(edge_graph(), "column")


def test_degrees():
    assert np.all(degree_vector(cycle_graph(6)) == 2)
    assert list(degree_vector(star_graph(3))) == [3, 1, 1, 1]


def test_roundtrip(tmp_path, rng):
    path = tmp_path / "g.txt"
    for g in (cycle_graph(6), random_connected_graph(rng, 12)):
        graph_io(g, path, "write")
        assert graph_io(None, path, "read") == g


def test_roundtrip_row_normalized_weights_exact(tmp_path):
    g = normalize_weights(generate_graph(GraphModelSpec("barabasi_albert", n=50, seed=2, m=2)), "row")
    write_graph(g, tmp_path / "g.txt")
    back = read_graph(tmp_path / "g.txt")
    assert np.array_equal(back.weight, g.weight)


def test_header_and_format(tmp_path):
    write_graph(edge_graph(), tmp_path / "g.txt")
    text = (tmp_path / "g.txt").read_bytes().decode()
    assert text.splitlines()[0] == "gehm-graph v1 n=2"
    assert "\r" not in text


def test_out_of_range_node(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("gehm-graph v1 n=3\n0 5 1.0\n5 0 1.0\n")
    with pytest.raises(GraphValidationError):
        read_graph(p)


def test_asymmetric_file(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("gehm-graph v1 n=3\n0 1 1.0\n")
    with pytest.raises(GraphValidationError):
        read_graph(p)


def test_malformed_line_reports_line_number(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("gehm-graph v1 n=3\n0 1 1.0\n1 0\n")
    with pytest.raises(GraphParseError) as info:
        read_graph(p)
    assert info.value.line == 3


def test_bad_header(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("graph n=3\n")
    with pytest.raises(GraphParseError):
        read_graph(p)


def test_empty_edge_list(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("gehm-graph v1 n=4\n")
    g = read_graph(p)
    assert g.n == 4 and g.num_edges == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 40), st.integers(1, 3), st.integers(0, 2**31))
def test_handshake_property(n, m, seed):
    for spec in (
        GraphModelSpec("barabasi_albert", n=n, seed=seed, m=min(m, n - 1)),
        GraphModelSpec("erdos_renyi", n=n, seed=seed, prob=0.2),
        GraphModelSpec("watts_strogatz", n=n, seed=seed, k=2, beta=0.3),
    ):
        g = generate_graph(spec)
        assert degree_vector(g).sum() == 2 * g.num_edges
