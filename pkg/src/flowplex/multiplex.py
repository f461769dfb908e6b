"""Multiplex of flow layers: global connectivity degrees and layer comparison.

A :class:`Multiplex` is an ordered collection of layers over one shared
registry. Its node count n is the size of the union of the layer node
sets (not the registry size: a registry may carry countries that appear
in no layer). The global degree of a country counts the distinct
partners it has on any layer in either direction; the weighted global
degree sums reciprocated edge weights over all layers and normalizes by
n*m, the number of per-layer slots.

The pairwise comparison functions (edge overlap, shared fraction,
weight and degree rank correlations) operate on directed edge sets;
undirected layers take part through their symmetric stored form.
"""

from __future__ import annotations

from typing import Iterable, Literal, Sequence

from .errors import (
    ContractViolationError,
    InsufficientDataError,
    UndefinedStatisticError,
    ValidationError,
)
from .graph import LayerGraph
from .registry import CountryId, NodeRegistry
from .stats import CorrelationResult, spearman

Eq4Mode = Literal["wji", "wij", "mean"]

EQ4_MODES: tuple[str, ...] = ("wji", "wij", "mean")


class Multiplex:
    """Ordered, immutable collection of layers over one registry."""

    __slots__ = ("_layers", "_by_name", "_registry", "_union", "_max_weights")

    def __init__(self, layers: Sequence[LayerGraph]):
        layers = tuple(layers)
        if not layers:
            raise ValidationError("a multiplex needs at least one layer")
        registry = layers[0].registry
        names = [g.name for g in layers]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate layer names: {names}")
        for g in layers:
            if g.registry is not registry:
                raise ValidationError(
                    f"layer {g.name!r} does not share the multiplex registry"
                )
        union: set[int] = set()
        for g in layers:
            union |= g.nodes
        self._layers = layers
        self._by_name = {g.name: g for g in layers}
        self._registry = registry
        self._union = frozenset(union)
        self._max_weights = tuple(g.max_weight() for g in layers)

    @property
    def layers(self) -> tuple[LayerGraph, ...]:
        return self._layers

    @property
    def registry(self) -> NodeRegistry:
        return self._registry

    @property
    def m(self) -> int:
        return len(self._layers)

    @property
    def n(self) -> int:
        return len(self._union)

    @property
    def union_nodes(self) -> frozenset[int]:
        return self._union

    def layer(self, name: str) -> LayerGraph:
        try:
            return self._by_name[name]
        except KeyError:
            raise ValidationError(f"no layer named {name!r}") from None

    def layer_names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self._layers)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Multiplex({self.m} layers, {self.n} countries)"


def _resolve(mx: Multiplex, country: str | CountryId | int) -> int:
    if isinstance(country, int):
        if not 0 <= country < len(mx.registry):
            raise ValidationError(f"index {country} outside registry")
        return country
    return mx.registry.resolve(country)


def neighborhood_indices(mx: Multiplex, i: int) -> set[int]:
    """Union over layers of in- and out-neighbors, as registry indices."""
    out: set[int] = set()
    for g in mx.layers:
        out.update(g.out_neighbors(i))
        out.update(g.in_neighbors(i))
    return out


def multiplex_neighborhood(
    mx: Multiplex, country: str | CountryId | int
) -> frozenset[str]:
    """Country codes adjacent to ``country`` on any layer, either direction."""
    i = _resolve(mx, country)
    reg = mx.registry
    return frozenset(reg.code(j) for j in neighborhood_indices(mx, i))


def global_degree(mx: Multiplex, country: str | CountryId | int) -> int:
    """Number of distinct countries connected to ``country`` across layers."""
    return len(neighborhood_indices(mx, _resolve(mx, country)))


def weighted_global_degree(
    mx: Multiplex, country: str | CountryId | int, mode: Eq4Mode = "wji"
) -> float:
    """Normalized sum of reciprocated edge weights across all layers.

    Only edges present in both directions on a layer contribute
    (undirected layers qualify everywhere by symmetric storage). Each
    qualifying (partner, layer) slot adds w_ji under the default mode;
    ``wij`` takes the outgoing weight instead and ``mean`` averages the
    two. The total is divided by n*m, so values live in [0, (n-1)/n].
    """
    if mode not in EQ4_MODES:
        raise ValidationError(f"unknown weighted-degree mode {mode!r}")
    i = _resolve(mx, country)
    for g, w_max in zip(mx.layers, mx._max_weights):
        if w_max > 1.0:
            raise ContractViolationError(
                f"layer {g.name!r} is not normalized (max weight {w_max})"
            )
    total = 0.0
    for g in mx.layers:
        incoming = g.in_neighbors(i)
        outgoing = g.out_neighbors(i)
        for j, w_ji in incoming.items():
            if j not in outgoing:
                continue
            if mode == "wji":
                total += w_ji
            elif mode == "wij":
                total += outgoing[j]
            else:
                total += 0.5 * (w_ji + outgoing[j])
    return total / (mx.n * mx.m)


def _check_comparable(a: LayerGraph, b: LayerGraph) -> None:
    if a.registry is not b.registry:
        raise ValidationError(
            f"layers {a.name!r} and {b.name!r} do not share a registry"
        )


def jaccard_overlap(a: LayerGraph, b: LayerGraph) -> float:
    """|E_a intersect E_b| / |E_a union E_b| over directed edge sets."""
    _check_comparable(a, b)
    ea, eb = a.edge_pairs(), b.edge_pairs()
    union = ea | eb
    if not union:
        raise UndefinedStatisticError(
            f"edge overlap undefined: layers {a.name!r} and {b.name!r} are both empty"
        )
    return len(ea & eb) / len(union)


def shared_edge_fraction(a: LayerGraph, b: LayerGraph) -> float:
    """Fraction of a's directed edges also present in b (asymmetric)."""
    _check_comparable(a, b)
    ea = a.edge_pairs()
    if not ea:
        raise UndefinedStatisticError(
            f"shared-edge fraction undefined: layer {a.name!r} is empty"
        )
    return len(ea & b.edge_pairs()) / len(ea)


def edge_weight_correlation(a: LayerGraph, b: LayerGraph) -> CorrelationResult:
    """Spearman correlation of weights over the shared directed edge set."""
    _check_comparable(a, b)
    shared = sorted(a.edge_pairs() & b.edge_pairs())
    if len(shared) < 3:
        raise InsufficientDataError(
            f"layers {a.name!r} and {b.name!r} share only {len(shared)} edges; "
            "need at least 3"
        )
    wa = [a.weight(i, j) for i, j in shared]
    wb = [b.weight(i, j) for i, j in shared]
    return spearman(wa, wb)


def degree_correlation(
    a: LayerGraph,
    b: LayerGraph,
    direction: Literal["in", "out"] = "out",
    weighted: bool = False,
) -> CorrelationResult:
    """Spearman correlation of per-country degrees on the node intersection."""
    _check_comparable(a, b)
    if direction not in ("in", "out"):
        raise ValidationError(f"direction must be 'in' or 'out', got {direction!r}")
    common = sorted(a.nodes & b.nodes)
    if len(common) < 3:
        raise InsufficientDataError(
            f"layers {a.name!r} and {b.name!r} share only {len(common)} countries; "
            "need at least 3"
        )

    def vector(g: LayerGraph) -> list[float]:
        adj = g.out_neighbors if direction == "out" else g.in_neighbors
        if weighted:
            return [float(sum(adj(i).values())) for i in common]
        return [float(len(adj(i))) for i in common]

    return spearman(vector(a), vector(b))


def compare_layers(
    layers: Iterable[LayerGraph],
) -> dict[str, dict[tuple[str, str], float | None]]:
    """All pairwise comparison statistics, keyed by statistic name.

    Produces the square matrices behind the comparison report: jaccard,
    shared_fraction (row layer as the denominator), weight_rho, in_rho,
    out_rho. Undefined or insufficient-data cells are None.
    """
    ls = list(layers)
    out: dict[str, dict[tuple[str, str], float | None]] = {
        "jaccard": {},
        "shared_fraction": {},
        "weight_rho": {},
        "in_rho": {},
        "out_rho": {},
    }
    for a in ls:
        for b in ls:
            key = (a.name, b.name)
            out["jaccard"][key] = _or_none(jaccard_overlap, a, b)
            out["shared_fraction"][key] = _or_none(shared_edge_fraction, a, b)
            out["weight_rho"][key] = _rho_or_none(edge_weight_correlation, a, b)
            out["in_rho"][key] = _rho_or_none(
                lambda x, y: degree_correlation(x, y, "in"), a, b
            )
            out["out_rho"][key] = _rho_or_none(
                lambda x, y: degree_correlation(x, y, "out"), a, b
            )
    return out


def _or_none(fn, a, b) -> float | None:
    try:
        return fn(a, b)
    except (UndefinedStatisticError, InsufficientDataError):
        return None


def _rho_or_none(fn, a, b) -> float | None:
    try:
        return fn(a, b).rho
    except (UndefinedStatisticError, InsufficientDataError):
        return None
