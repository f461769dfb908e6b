"""Single-layer graph type and Table 2 style metrics."""

import math
import random

import pytest

from flowplex import (
    DegenerateGraphError,
    LayerGraph,
    NodeRegistry,
    UndefinedStatisticError,
    UnknownCountryError,
    ValidationError,
    average_clustering,
    average_out_degree,
    degree_assortativity,
    density,
    in_degree,
    out_degree,
    reciprocal_edge_set,
    undirected_projection,
    weighted_in_degree,
    weighted_out_degree,
)
from flowplex.registry import CountryId, validate_code

from _gen import codes_for, random_layer


REG = NodeRegistry(["AUT", "BEL", "CHE", "DEU", "ESP", "FRA"])


def layer(edges, directed=True, nodes=None, name="test"):
    return LayerGraph.from_edges(
        name, REG, edges, directed=directed, nodes=nodes
    )


# --- registry -----------------------------------------------------------

def test_validate_code_accepts_iso_alpha3():
    assert validate_code("GBR") == "GBR"


@pytest.mark.parametrize("bad", ["gb", "GBRX", "G1R", "gbr", "", "ÄBC"])
def test_validate_code_rejects_non_alpha3(bad):
    with pytest.raises(ValidationError):
        validate_code(bad)


def test_registry_is_sorted_and_bijective():
    reg = NodeRegistry(["FRA", "AUT", "CHE"])
    assert reg.codes == ("AUT", "CHE", "FRA")
    for idx, code in enumerate(reg.codes):
        assert reg.index(code) == idx
        assert reg.code(idx) == code
        assert reg.country(code) == CountryId(code, idx)


def test_registry_collapses_duplicates_and_rejects_unknown_lookup():
    # duplicate codes in the input collapse; the map stays bijective
    assert NodeRegistry(["FRA", "FRA", "AUT"]).codes == ("AUT", "FRA")
    with pytest.raises(UnknownCountryError):
        REG.index("ZZZ")


def test_registry_extended_resorts():
    reg = NodeRegistry(["BEL", "FRA"]).extended(["AUT"])
    assert reg.codes == ("AUT", "BEL", "FRA")


# --- construction -------------------------------------------------------

def test_from_edges_sums_duplicate_ordered_pairs():
    g = layer([("AUT", "BEL", 1.0), ("AUT", "BEL", 2.5)])
    assert g.weight("AUT", "BEL") == 3.5
    assert g.edge_count == 1


def test_self_loop_rejected():
    with pytest.raises(ValidationError):
        layer([("AUT", "AUT", 1.0)])


def test_negative_and_nonfinite_weights_rejected():
    with pytest.raises(ValidationError):
        layer([("AUT", "BEL", -0.1)])
    with pytest.raises(ValidationError):
        layer([("AUT", "BEL", math.inf)])
    with pytest.raises(ValidationError):
        layer([("AUT", "BEL", math.nan)])


def test_undirected_layer_stored_symmetrically():
    g = layer([("BEL", "AUT", 0.7)], directed=False)
    assert g.weight("AUT", "BEL") == 0.7
    assert g.weight("BEL", "AUT") == 0.7
    # |E| counts ordered pairs even when undirected
    assert g.edge_count == 2


def test_undirected_duplicate_reversed_rows_sum():
    g = layer([("BEL", "AUT", 0.7), ("AUT", "BEL", 0.3)], directed=False)
    assert g.weight("AUT", "BEL") == pytest.approx(1.0)
    assert g.weight("BEL", "AUT") == pytest.approx(1.0)


def test_edges_outside_declared_nodes_rejected():
    with pytest.raises(ValidationError):
        layer([("AUT", "BEL", 1.0)], nodes=["AUT", "CHE"])


# --- degrees ------------------------------------------------------------

def test_out_degree_counts_distinct_targets():
    g = layer([("AUT", "BEL", 1), ("AUT", "CHE", 1), ("BEL", "AUT", 1)])
    assert out_degree(g, "AUT") == 2
    assert out_degree(g, "BEL") == 1
    assert out_degree(g, "CHE") == 0


def test_in_degree_mirrors_out():
    g = layer([("AUT", "BEL", 1), ("CHE", "BEL", 1)])
    assert in_degree(g, "BEL") == 2
    assert in_degree(g, "AUT") == 0


def test_isolated_node_has_zero_degree():
    g = layer([("AUT", "BEL", 1)], nodes=["AUT", "BEL", "CHE"])
    assert out_degree(g, "CHE") == 0
    assert in_degree(g, "CHE") == 0
    assert weighted_out_degree(g, "CHE") == 0.0


def test_unknown_country_raises_lookup_error():
    g = layer([("AUT", "BEL", 1)])
    with pytest.raises(UnknownCountryError):
        out_degree(g, "ZZZ")


def test_weighted_out_degree_hand_sum():
    g = layer([("AUT", "BEL", 0.5), ("AUT", "CHE", 0.25)])
    assert weighted_out_degree(g, "AUT") == 0.75
    assert weighted_in_degree(g, "BEL") == 0.5


def test_unit_weights_reduce_weighted_to_unweighted():
    rng = random.Random(7)
    reg = NodeRegistry(codes_for(8))
    g = random_layer(rng, reg, max_weight=1.0)
    g = g.replace_weights({(i, j): 1.0 for i, j, _ in g.edges()})
    for c in reg.codes:
        assert weighted_out_degree(g, c) == out_degree(g, c)
        assert weighted_in_degree(g, c) == in_degree(g, c)


def test_degree_accepts_index_and_countryid():
    g = layer([("AUT", "BEL", 1)])
    assert out_degree(g, 0) == 1
    assert out_degree(g, REG.country("AUT")) == 1


# --- density / average degree ------------------------------------------

def test_density_reproduces_reported_post_and_trade_rows():
    # n=201 with 22,280 ordered pairs prints as 0.55; n=228 with
    # 30,235 prints as 0.58
    assert 22280 / (201 * 200) == pytest.approx(0.554, abs=5e-4)
    g = layer([("AUT", "BEL", 1), ("BEL", "AUT", 1)], nodes=["AUT", "BEL"])
    assert density(g) == 1.0


def test_density_complete_directed_graph_is_one():
    nodes = ["AUT", "BEL", "CHE"]
    edges = [(i, j, 1.0) for i in nodes for j in nodes if i != j]
    assert density(layer(edges, nodes=nodes)) == 1.0


def test_density_single_node_is_degenerate():
    g = layer([], nodes=["AUT"])
    with pytest.raises(DegenerateGraphError):
        density(g)


def test_average_out_degree_is_edges_over_nodes():
    g = layer(
        [("AUT", "BEL", 1), ("AUT", "CHE", 1), ("BEL", "CHE", 1)],
        nodes=["AUT", "BEL", "CHE", "DEU"],
    )
    assert average_out_degree(g) == pytest.approx(3 / 4)


def test_average_out_degree_empty_layer_is_degenerate():
    with pytest.raises(DegenerateGraphError):
        average_out_degree(layer([], nodes=["AUT"]))
    with pytest.raises(DegenerateGraphError):
        average_out_degree(layer([], nodes=[]))


def test_density_times_n_minus_1_equals_average_out_degree():
    rng = random.Random(3)
    checked = 0
    while checked < 25:
        reg = NodeRegistry(codes_for(rng.randint(2, 9)))
        g = random_layer(rng, reg)
        if g.edge_count == 0:
            continue
        n = len(g.nodes)
        assert average_out_degree(g) == pytest.approx(density(g) * (n - 1))
        checked += 1


# --- assortativity ------------------------------------------------------

def _assortativity_oracle(g):
    """Pearson over both orientations of projected edges, by hand."""
    proj = undirected_projection(g, weighted=False)
    deg = {i: out_degree(proj, i) for i in proj.nodes}
    xs, ys = [], []
    for i, j, _ in proj.edges():
        xs.append(deg[i])
        ys.append(deg[j])
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    return cov / math.sqrt(vx * vy)


def test_star_graph_assortativity_is_minus_one():
    reg = NodeRegistry(codes_for(6))
    hub = reg.codes[0]
    edges = [(hub, c, 1.0) for c in reg.codes[1:]]
    g = LayerGraph.from_edges("star", reg, edges, directed=False)
    assert degree_assortativity(g) == pytest.approx(-1.0)


def test_complete_graph_assortativity_undefined():
    nodes = ["AUT", "BEL", "CHE"]
    edges = [(i, j, 1.0) for i in nodes for j in nodes if i != j]
    with pytest.raises(UndefinedStatisticError):
        degree_assortativity(layer(edges, nodes=nodes))


def test_assortativity_matches_bruteforce_pearson():
    rng = random.Random(11)
    checked = 0
    while checked < 30:
        reg = NodeRegistry(codes_for(8))
        g = random_layer(rng, reg)
        try:
            got = degree_assortativity(g)
        except (UndefinedStatisticError, DegenerateGraphError):
            continue
        assert got == pytest.approx(_assortativity_oracle(g), abs=1e-12)
        checked += 1


def test_assortativity_matches_networkx():
    nx = pytest.importorskip("networkx")
    rng = random.Random(5)
    checked = 0
    while checked < 10:
        reg = NodeRegistry(codes_for(9))
        g = random_layer(rng, reg)
        h = nx.Graph()
        h.add_nodes_from(g.nodes)
        h.add_edges_from(
            (i, j) for i, j, _ in undirected_projection(g, weighted=False).edges()
        )
        if h.number_of_edges() < 2:
            continue
        try:
            got = degree_assortativity(g)
        except UndefinedStatisticError:
            continue
        want = nx.degree_assortativity_coefficient(h)
        assert got == pytest.approx(want, abs=1e-9)
        checked += 1


# --- clustering ---------------------------------------------------------

def _clustering_oracle(g):
    proj = undirected_projection(g, weighted=False)
    nbrs = {i: set(proj.out_neighbors(i)) for i in proj.nodes}
    total = 0.0
    for i in proj.nodes:
        k = len(nbrs[i])
        if k < 2:
            continue
        closed = sum(
            1 for a in nbrs[i] for b in nbrs[i] if a != b and b in nbrs[a]
        )
        total += closed / (k * (k - 1))
    return total / len(proj.nodes)


def test_triangle_clusters_fully():
    edges = [("AUT", "BEL", 1), ("BEL", "CHE", 1), ("AUT", "CHE", 1)]
    g = layer(edges, directed=False, nodes=["AUT", "BEL", "CHE"])
    assert average_clustering(g) == 1.0


def test_path_has_zero_clustering():
    edges = [("AUT", "BEL", 1), ("BEL", "CHE", 1)]
    g = layer(edges, directed=False, nodes=["AUT", "BEL", "CHE"])
    assert average_clustering(g) == 0.0


def test_clustering_matches_exhaustive_triples():
    rng = random.Random(23)
    for trial in range(30):
        reg = NodeRegistry(codes_for(rng.randint(3, 10)))
        g = random_layer(rng, reg)
        assert average_clustering(g) == pytest.approx(
            _clustering_oracle(g), abs=1e-12
        )


def test_clustering_matches_networkx():
    nx = pytest.importorskip("networkx")
    rng = random.Random(29)
    for trial in range(10):
        reg = NodeRegistry(codes_for(8))
        g = random_layer(rng, reg)
        h = nx.Graph()
        h.add_nodes_from(g.nodes)
        h.add_edges_from(
            (i, j) for i, j, _ in undirected_projection(g, weighted=False).edges()
        )
        assert average_clustering(g) == pytest.approx(
            nx.average_clustering(h), abs=1e-12
        )


# --- reciprocal edges / projection --------------------------------------

def test_reciprocal_edge_set_examples():
    assert reciprocal_edge_set(layer([("AUT", "BEL", 1)])) == frozenset()
    g = layer([("AUT", "BEL", 1), ("BEL", "AUT", 1), ("AUT", "CHE", 1)])
    assert reciprocal_edge_set(g) == frozenset({("AUT", "BEL")})


def test_undirected_layer_reciprocal_set_is_full_edge_set():
    pairs = [("AUT", "BEL"), ("BEL", "CHE"), ("AUT", "DEU"),
             ("CHE", "DEU"), ("BEL", "DEU")]
    g = layer([(a, b, 1.0) for a, b in pairs], directed=False)
    assert reciprocal_edge_set(g) == frozenset(pairs)


def test_projection_sums_both_directions():
    g = layer([("AUT", "BEL", 0.3), ("BEL", "AUT", 0.2)])
    proj = undirected_projection(g)
    assert proj.weight("AUT", "BEL") == pytest.approx(0.5)
    assert proj.weight("BEL", "AUT") == pytest.approx(0.5)
    assert not proj.directed


def test_projection_single_direction_keeps_weight():
    proj = undirected_projection(layer([("AUT", "BEL", 0.3)]))
    assert proj.weight("AUT", "BEL") == pytest.approx(0.3)


def test_projection_doubles_symmetric_layers():
    # documented sum-rule consequence: w' = w_ij + w_ji = 2w
    g = layer([("AUT", "BEL", 0.4)], directed=False)
    proj = undirected_projection(g)
    assert proj.weight("AUT", "BEL") == pytest.approx(0.8)


def test_unweighted_projection_keeps_existence_only():
    g = layer([("AUT", "BEL", 0.3), ("BEL", "AUT", 0.2), ("AUT", "CHE", 0.9)])
    proj = undirected_projection(g, weighted=False)
    assert proj.weight("AUT", "BEL") == 1.0
    assert proj.weight("AUT", "CHE") == 1.0
