"""
Build a small multiplex by hand and measure it
==============================================

Three country-level flow layers over five countries: a dense postal
layer, a sparse trade layer, and an undirected peering layer. The
multiplex degree of a country counts distinct partners across all
layers at once; the weighted variant only credits reciprocated flows.
"""

from flowplex import (
    LayerGraph,
    Multiplex,
    NodeRegistry,
    average_clustering,
    average_out_degree,
    degree_assortativity,
    density,
    global_degree,
    multiplex_neighborhood,
    weighted_global_degree,
)

# one shared registry so node indices line up across layers
registry = NodeRegistry(["AUT", "BRA", "CHE", "DNK", "EST"])

post = LayerGraph.from_edges("post", registry, [
    ("AUT", "CHE", 0.9), ("CHE", "AUT", 1.0),
    ("AUT", "DNK", 0.4), ("DNK", "AUT", 0.2),
    ("BRA", "AUT", 0.3), ("DNK", "EST", 0.6),
    ("EST", "DNK", 0.5),
], nodes=registry.codes)

trade = LayerGraph.from_edges("trade", registry, [
    ("BRA", "CHE", 1.0), ("CHE", "BRA", 0.7),
    ("AUT", "BRA", 0.2),
], nodes=["AUT", "BRA", "CHE"])

# peering is symmetric: one undirected edge stores both directions
peering = LayerGraph.from_edges("peering", registry, [
    ("AUT", "EST", 1.0), ("CHE", "DNK", 0.8),
], directed=False, nodes=["AUT", "CHE", "DNK", "EST"])

mx = Multiplex([post, trade, peering])
print(f"multiplex: {mx.m} layers over {mx.n} countries\n")

# per-layer descriptive metrics (edge counts are ordered pairs)
print(f"{'layer':<8} {'edges':>5} {'density':>8} {'avg out':>8} "
      f"{'assort':>8} {'clustering':>10}")
for g in mx.layers:
    try:
        assort = f"{degree_assortativity(g):8.3f}"
    except Exception as exc:
        assort = "     n/a"  # constant-degree layers have no assortativity
    print(f"{g.name:<8} {g.edge_count:>5} {density(g):8.3f} "
          f"{average_out_degree(g):8.3f} {assort} "
          f"{average_clustering(g):10.3f}")

# the union neighborhood drives the global degree
print("\ncountry  union neighborhood             global  weighted")
for code in registry.codes:
    nbrs = sorted(multiplex_neighborhood(mx, code))
    print(f"{code:<8} {', '.join(nbrs):<30} {global_degree(mx, code):>6} "
          f"{weighted_global_degree(mx, code):>9.4f}")

# AUT<->CHE is the only reciprocated postal pair involving AUT, and
# BRA->AUT is one-way, so AUT's weighted degree comes from CHE alone
# on the postal layer plus the symmetric peering edge with EST.
print("\nweighted degree of AUT by summand convention:")
for mode in ("wji", "wij", "mean"):
    print(f"  {mode:>4}: {weighted_global_degree(mx, 'AUT', mode=mode):.4f}")
