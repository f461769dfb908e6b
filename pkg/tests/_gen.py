"""Seeded random instance builders shared by the test modules.

Everything takes an explicit ``random.Random`` (or a seed) so each
property trial is reproducible from its trial index alone.
"""

from __future__ import annotations

import random
import string

from flowplex import LayerGraph, Multiplex, NodeRegistry


def codes_for(n: int) -> list[str]:
    letters = string.ascii_uppercase
    return [
        letters[k // 676] + letters[(k // 26) % 26] + letters[k % 26]
        for k in range(n)
    ]


def random_layer(
    rng: random.Random,
    registry: NodeRegistry,
    name: str = "L0",
    directed: bool | None = None,
    p: float | None = None,
    max_weight: float = 1.0,
    nodes: list[str] | None = None,
) -> LayerGraph:
    if directed is None:
        directed = rng.random() < 0.5
    if p is None:
        p = rng.uniform(0.1, 0.9)
    pool = list(nodes) if nodes is not None else list(registry.codes)
    edges = []
    for i in pool:
        for j in pool:
            if i == j:
                continue
            if not directed and i > j:
                continue
            if rng.random() < p:
                edges.append((i, j, rng.uniform(1e-6, max_weight)))
    return LayerGraph.from_edges(
        name, registry, edges, directed=directed, nodes=pool
    )


def set_partitions(items):
    """All set partitions, as lists of lists (restricted growth)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def random_multiplex(
    rng: random.Random,
    n: int | None = None,
    m: int | None = None,
    max_weight: float = 1.0,
) -> Multiplex:
    if n is None:
        n = rng.randint(3, 10)
    if m is None:
        m = rng.randint(1, 4)
    registry = NodeRegistry(codes_for(n))
    layers = []
    for t in range(m):
        # random sub-coverage so some countries miss some layers
        pool = [c for c in registry.codes if rng.random() < 0.85]
        while len(pool) < 2:
            pool = [c for c in registry.codes if rng.random() < 0.85]
        layers.append(
            random_layer(
                rng, registry, name=f"L{t}", max_weight=max_weight, nodes=pool
            )
        )
    return Multiplex(layers)
