"""Directed weighted graph for a single flow layer, plus its descriptive metrics.

A :class:`LayerGraph` stores one layer of country-to-country flows as a
set of ordered (origin, dest, weight) edges over a shared
:class:`~flowplex.registry.NodeRegistry`. Undirected layers are stored
as symmetric directed edge sets (w_ij = w_ji for every edge), which
keeps every metric below well-defined without special cases: the edge
count |E| always counts ordered pairs.

Metric functions are free functions taking the graph, in the style of

    >>> g = LayerGraph.from_edges("post", reg, [("USA", "GBR", 2.0)])
    >>> out_degree(g, "USA")
    1
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, Mapping

from .errors import (
    DegenerateGraphError,
    InsufficientDataError,
    UndefinedStatisticError,
    ValidationError,
)
from .registry import CountryId, NodeRegistry
from .stats import pearson

Edge = tuple[int, int, float]


class LayerGraph:
    """Immutable single-layer flow graph.

    ``nodes`` is the set of registry indices present in the layer, which
    may include isolated countries and is always a superset of the edge
    endpoints. Countries in the registry but not in ``nodes`` are absent
    from the layer, which is distinct from being isolated.
    """

    __slots__ = ("_name", "_directed", "_registry", "_weights", "_nodes", "_out", "_in")

    def __init__(
        self,
        name: str,
        registry: NodeRegistry,
        weights: Mapping[tuple[int, int], float],
        directed: bool = True,
        nodes: Iterable[int] | None = None,
    ):
        n = len(registry)
        out: dict[int, dict[int, float]] = {}
        inc: dict[int, dict[int, float]] = {}
        clean: dict[tuple[int, int], float] = {}
        for (i, j), w in weights.items():
            if i == j:
                raise ValidationError(f"self-loop on index {i} is not allowed")
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"edge ({i}, {j}) outside registry of size {n}")
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise ValidationError(f"edge ({i}, {j}) has invalid weight {w!r}")
            clean[(i, j)] = w
            out.setdefault(i, {})[j] = w
            inc.setdefault(j, {})[i] = w
        if not directed:
            for (i, j), w in clean.items():
                if clean.get((j, i)) != w:
                    raise ValidationError(
                        f"undirected layer {name!r} has asymmetric edge ({i}, {j})"
                    )
        endpoints = {i for ij in clean for i in ij}
        if nodes is None:
            node_set = frozenset(endpoints)
        else:
            node_set = frozenset(nodes)
            if not endpoints <= node_set:
                raise ValidationError("node set must cover all edge endpoints")
            for i in node_set:
                if not 0 <= i < n:
                    raise ValidationError(f"node index {i} outside registry of size {n}")
        self._name = name
        self._directed = bool(directed)
        self._registry = registry
        self._weights = clean
        self._nodes = node_set
        self._out = out
        self._in = inc

    @classmethod
    def from_edges(
        cls,
        name: str,
        registry: NodeRegistry,
        edges: Iterable[tuple[str | CountryId | int, str | CountryId | int, float]],
        directed: bool = True,
        nodes: Iterable[str | CountryId | int] | None = None,
    ) -> "LayerGraph":
        """Build a layer from (origin, dest, weight) triples.

        Duplicate ordered pairs are summed. For undirected layers each
        pair is canonicalized first, so (A, B, x) and (B, A, y) describe
        the same edge and sum to x + y; the result is stored in both
        orientations.
        """
        resolve = _make_resolver(registry)
        acc: dict[tuple[int, int], float] = {}
        for orig, dest, w in edges:
            i, j = resolve(orig), resolve(dest)
            if not directed and i > j:
                i, j = j, i
            acc[(i, j)] = acc.get((i, j), 0.0) + float(w)
        if not directed:
            acc = {**acc, **{(j, i): w for (i, j), w in acc.items()}}
        idx_nodes = None if nodes is None else [resolve(c) for c in nodes]
        return cls(name, registry, acc, directed=directed, nodes=idx_nodes)

    @property
    def name(self) -> str:
        return self._name

    @property
    def directed(self) -> bool:
        return self._directed

    @property
    def registry(self) -> NodeRegistry:
        return self._registry

    @property
    def nodes(self) -> frozenset[int]:
        return self._nodes

    @property
    def node_codes(self) -> tuple[str, ...]:
        return tuple(sorted(self._registry.code(i) for i in self._nodes))

    @property
    def edge_count(self) -> int:
        """Number of stored ordered pairs (undirected edges count twice)."""
        return len(self._weights)

    def edges(self) -> Iterator[Edge]:
        for (i, j), w in self._weights.items():
            yield i, j, w

    def edge_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._weights)

    def _idx(self, country: "str | CountryId | int") -> int:
        if isinstance(country, int):
            return country
        return self.registry.resolve(country)

    def has_edge(self, i, j) -> bool:
        return (self._idx(i), self._idx(j)) in self._weights

    def weight(self, i, j) -> float:
        return self._weights.get((self._idx(i), self._idx(j)), 0.0)

    def out_neighbors(self, i: int) -> Mapping[int, float]:
        return self._out.get(i, _EMPTY)

    def in_neighbors(self, i: int) -> Mapping[int, float]:
        return self._in.get(i, _EMPTY)

    def max_weight(self) -> float:
        return max(self._weights.values()) if self._weights else 0.0

    def replace_weights(
        self, weights: Mapping[tuple[int, int], float]
    ) -> "LayerGraph":
        """Same layer shape with new weights (normalization steps use this)."""
        return LayerGraph(
            self._name, self._registry, weights,
            directed=self._directed, nodes=self._nodes,
        )

    def __repr__(self) -> str:  # pragma: no cover
        kind = "directed" if self._directed else "undirected"
        return (
            f"LayerGraph({self._name!r}, {kind}, "
            f"{len(self._nodes)} nodes, {self.edge_count} edges)"
        )


_EMPTY: Mapping[int, float] = {}


def _make_resolver(registry: NodeRegistry):
    def resolve(country: str | CountryId | int) -> int:
        if isinstance(country, int):
            if not 0 <= country < len(registry):
                raise ValidationError(f"index {country} outside registry")
            return country
        return registry.resolve(country)

    return resolve


def _node_index(g: LayerGraph, country: str | CountryId | int) -> int:
    return _make_resolver(g.registry)(country)


def out_degree(g: LayerGraph, country: str | CountryId | int) -> int:
    """Count of distinct destinations with an edge from ``country``."""
    return len(g.out_neighbors(_node_index(g, country)))


def in_degree(g: LayerGraph, country: str | CountryId | int) -> int:
    """Count of distinct origins with an edge into ``country``."""
    return len(g.in_neighbors(_node_index(g, country)))


def weighted_out_degree(g: LayerGraph, country: str | CountryId | int) -> float:
    """Sum of outgoing edge weights at ``country``.

    Summed in neighbor order so the result is independent of edge
    insertion order (and bitwise equal to the in-sum on undirected layers).
    """
    nbrs = g.out_neighbors(_node_index(g, country))
    return float(sum(nbrs[j] for j in sorted(nbrs)))


def weighted_in_degree(g: LayerGraph, country: str | CountryId | int) -> float:
    """Sum of incoming edge weights at ``country``."""
    nbrs = g.in_neighbors(_node_index(g, country))
    return float(sum(nbrs[j] for j in sorted(nbrs)))


def density(g: LayerGraph) -> float:
    """|E| / (n (n-1)) over ordered pairs and the layer's node count."""
    n = len(g.nodes)
    if n < 2:
        raise DegenerateGraphError(
            f"density undefined for layer {g.name!r} with {n} node(s)"
        )
    return g.edge_count / (n * (n - 1))


def average_out_degree(g: LayerGraph) -> float:
    """|E| / n over ordered pairs; requires at least one edge."""
    n = len(g.nodes)
    if n == 0 or g.edge_count == 0:
        raise DegenerateGraphError(
            f"average degree undefined for empty layer {g.name!r}"
        )
    return g.edge_count / n


def _undirected_adjacency(g: LayerGraph) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {i: set() for i in g.nodes}
    for i, j, _ in g.edges():
        adj[i].add(j)
        adj[j].add(i)
    return adj


def degree_assortativity(g: LayerGraph) -> float:
    """Pearson correlation of endpoint total degrees over undirected edges.

    Each undirected-projection edge contributes both orientations of its
    endpoint degree pair, so the statistic is symmetric. Degree-regular
    graphs have no degree variance and the correlation is undefined.
    """
    adj = _undirected_adjacency(g)
    deg = {i: len(nbrs) for i, nbrs in adj.items()}
    xs: list[float] = []
    ys: list[float] = []
    for i, nbrs in adj.items():
        for j in nbrs:
            if i < j:
                xs.extend((deg[i], deg[j]))
                ys.extend((deg[j], deg[i]))
    if not xs:
        raise UndefinedStatisticError(
            f"assortativity undefined for edgeless layer {g.name!r}"
        )
    try:
        return pearson(xs, ys).rho
    except (UndefinedStatisticError, InsufficientDataError):
        raise UndefinedStatisticError(
            f"assortativity undefined for layer {g.name!r}: "
            "endpoint degrees have zero variance or too few edges"
        ) from None


def average_clustering(g: LayerGraph) -> float:
    """Mean local clustering coefficient on the undirected projection.

    Nodes of projection degree < 2 contribute 0 to the mean.
    """
    if not g.nodes:
        raise DegenerateGraphError(
            f"clustering undefined for empty layer {g.name!r}"
        )
    adj = _undirected_adjacency(g)
    total = 0.0
    for i in g.nodes:
        nbrs = adj[i]
        k = len(nbrs)
        if k < 2:
            continue
        links = 0
        for u in nbrs:
            # each linked neighbor pair is counted from both ends, which
            # matches the k*(k-1) ordered-pair denominator
            links += len(adj[u] & nbrs)
        total += links / (k * (k - 1))
    return total / len(g.nodes)


def reciprocal_edge_set(g: LayerGraph) -> frozenset[tuple[str, str]]:
    """Unordered code pairs connected in both directions."""
    pairs = set()
    for i, j, _ in g.edges():
        if i < j and g.has_edge(j, i):
            a, b = g.registry.code(i), g.registry.code(j)
            pairs.add((a, b) if a <= b else (b, a))
    return frozenset(pairs)


def undirected_projection(g: LayerGraph, weighted: bool = True) -> LayerGraph:
    """Symmetric graph with w'_ij = w_ij + w_ji.

    The sum rule is applied uniformly, so an already-symmetric layer
    comes out with doubled weights. With ``weighted=False`` all weights
    become 1.0 (edge existence only).
    """
    acc: dict[tuple[int, int], float] = {}
    for i, j, w in g.edges():
        key = (i, j) if i < j else (j, i)
        acc[key] = acc.get(key, 0.0) + w
    sym: dict[tuple[int, int], float] = {}
    for (i, j), w in acc.items():
        value = 1.0 if not weighted else w
        sym[(i, j)] = value
        sym[(j, i)] = value
    return LayerGraph(g.name, g.registry, sym, directed=False, nodes=g.nodes)
