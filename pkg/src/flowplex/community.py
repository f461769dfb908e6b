"""Community detection per layer and cross-layer community multiplexity.

Louvain runs on the weighted undirected projection of a layer (sum of
the two directed weights per pair). Aggregated passes carry internal
edge weight as self-loops; a supernode's degree counts its loop twice,
which keeps modularity identical between the coarse partition on the
original graph and the singleton partition on the aggregated graph.

Community multiplexity of a country pair counts the layers on which the
two countries land in the same detected community; layers missing
either country never count. The similarity profile groups pairwise
indicator differences by multiplexity level and compares the groups
with two-sample KS tests.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ContractViolationError, InsufficientDataError, ValidationError
from .graph import LayerGraph
from .indicators import IndicatorTable
from .multiplex import Multiplex
from .stats import KsResult, ks_two_sample

# accept a move only if it beats staying by more than float noise
_GAIN_EPS = 1e-12


@dataclass(frozen=True)
class CommunityAssignment:
    """Partition of one layer's countries into dense community indices."""

    layer: str
    communities: Mapping[str, int]
    modularity: float
    pass_modularities: tuple[float, ...] = field(default=())

    @property
    def community_count(self) -> int:
        return len(set(self.communities.values())) if self.communities else 0

    def community_of(self, code: str) -> int | None:
        return self.communities.get(code)


def _pair_weights(g: LayerGraph) -> dict[tuple[int, int], float]:
    """Undirected projection weights keyed by (low, high) index pair."""
    acc: dict[tuple[int, int], float] = {}
    for i, j, w in g.edges():
        key = (i, j) if i < j else (j, i)
        acc[key] = acc.get(key, 0.0) + w
    return dict(sorted(acc.items()))


def _q_singletons(
    adj: dict[int, dict[int, float]], loops: dict[int, float], resolution: float
) -> float:
    k = {i: sum(adj[i].values()) + 2.0 * loops[i] for i in adj}
    two_w = sum(k.values())
    if two_w == 0.0:
        return 0.0
    q = 0.0
    for i in adj:
        q += 2.0 * loops[i] / two_w - resolution * (k[i] / two_w) ** 2
    return q


def _one_level(
    adj: dict[int, dict[int, float]],
    loops: dict[int, float],
    rng: random.Random,
    resolution: float,
) -> tuple[dict[int, int], bool]:
    k = {i: sum(adj[i].values()) + 2.0 * loops[i] for i in adj}
    two_w = sum(k.values())
    comm = {i: i for i in adj}
    if two_w == 0.0:
        return comm, False
    tot = dict(k)
    moved_any = False
    improved = True
    while improved:
        improved = False
        order = sorted(adj)
        rng.shuffle(order)
        for i in order:
            ci = comm[i]
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= k[i]
            best_c = ci
            best_gain = links.get(ci, 0.0) - resolution * tot[ci] * k[i] / two_w
            for c in sorted(links):
                if c == ci:
                    continue
                gain = links[c] - resolution * tot[c] * k[i] / two_w
                if gain > best_gain + _GAIN_EPS:
                    best_c, best_gain = c, gain
            tot[best_c] += k[i]
            if best_c != ci:
                comm[i] = best_c
                improved = True
                moved_any = True
    return comm, moved_any


def _aggregate(
    adj: dict[int, dict[int, float]],
    loops: dict[int, float],
    comm: dict[int, int],
) -> tuple[dict[int, dict[int, float]], dict[int, float], dict[int, int]]:
    labels = sorted(set(comm.values()))
    remap = {c: t for t, c in enumerate(labels)}
    new_adj: dict[int, dict[int, float]] = {t: {} for t in range(len(labels))}
    new_loops: dict[int, float] = {t: 0.0 for t in range(len(labels))}
    for i, nbrs in adj.items():
        ci = remap[comm[i]]
        new_loops[ci] += loops[i]
        for j, w in nbrs.items():
            cj = remap[comm[j]]
            if ci == cj:
                # stored in both directions, so half per visit
                new_loops[ci] += w / 2.0
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
    return new_adj, new_loops, remap


def _louvain_run(
    nodes: list[int],
    pair_w: dict[tuple[int, int], float],
    rng: random.Random,
    resolution: float,
) -> tuple[dict[int, int], list[float]]:
    adj: dict[int, dict[int, float]] = {i: {} for i in nodes}
    loops: dict[int, float] = {i: 0.0 for i in nodes}
    for (i, j), w in pair_w.items():
        adj[i][j] = w
        adj[j][i] = w
    node_of = {i: i for i in nodes}
    passes = [_q_singletons(adj, loops, resolution)]
    while True:
        comm, moved = _one_level(adj, loops, rng, resolution)
        if not moved:
            break
        adj, loops, remap = _aggregate(adj, loops, comm)
        node_of = {v: remap[comm[node_of[v]]] for v in node_of}
        passes.append(_q_singletons(adj, loops, resolution))
    return node_of, passes


def louvain(
    g: LayerGraph,
    seed: int = 0,
    resolution: float = 1.0,
    restarts: int = 1,
) -> CommunityAssignment:
    """Seeded Louvain partition of the layer's weighted undirected projection.

    The node visiting order is shuffled by a generator seeded from
    ``seed``, so results are reproducible. With ``restarts`` > 1 the
    best-modularity run wins (ties keep the earliest run). Per-pass
    modularities of the winning run are recorded and are non-decreasing.
    """
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    nodes = sorted(g.nodes)
    pair_w = _pair_weights(g)
    seeder = random.Random(seed)
    best: tuple[dict[int, int], list[float]] | None = None
    for _ in range(restarts):
        run_rng = random.Random(seeder.randrange(2**32))
        node_of, passes = _louvain_run(nodes, pair_w, run_rng, resolution)
        if best is None or passes[-1] > best[1][-1] + _GAIN_EPS:
            best = (node_of, passes)
    node_of, passes = best
    # dense relabel in order of first appearance over sorted codes
    reg = g.registry
    dense: dict[int, int] = {}
    communities: dict[str, int] = {}
    for i in nodes:
        label = node_of[i]
        if label not in dense:
            dense[label] = len(dense)
        communities[reg.code(i)] = dense[label]
    return CommunityAssignment(
        layer=g.name,
        communities=communities,
        modularity=passes[-1],
        pass_modularities=tuple(passes),
    )


def modularity(
    g: LayerGraph,
    assignment: CommunityAssignment | Mapping[str, int],
    resolution: float = 1.0,
) -> float:
    """Weighted modularity of a partition on the undirected projection."""
    by_code = (
        assignment.communities
        if isinstance(assignment, CommunityAssignment)
        else assignment
    )
    reg = g.registry
    part: dict[int, int] = {}
    for i in g.nodes:
        code = reg.code(i)
        if code not in by_code:
            raise ContractViolationError(
                f"assignment does not cover country {code!r} of layer {g.name!r}"
            )
        part[i] = by_code[code]
    pair_w = _pair_weights(g)
    two_w = 2.0 * sum(pair_w.values())
    if two_w == 0.0:
        return 0.0
    k: dict[int, float] = {i: 0.0 for i in g.nodes}
    internal: dict[int, float] = {}
    tot: dict[int, float] = {}
    for (i, j), w in pair_w.items():
        k[i] += w
        k[j] += w
        if part[i] == part[j]:
            # ordered-pair (doubled) internal weight
            internal[part[i]] = internal.get(part[i], 0.0) + 2.0 * w
    for i, ki in k.items():
        tot[part[i]] = tot.get(part[i], 0.0) + ki
    q = 0.0
    for c, t in tot.items():
        q += internal.get(c, 0.0) / two_w - resolution * (t / two_w) ** 2
    return q


def community_multiplexity(
    i: str,
    j: str,
    assignments: Sequence[CommunityAssignment],
) -> int:
    """Number of layers assigning ``i`` and ``j`` to the same community."""
    count = 0
    for a in assignments:
        ci = a.communities.get(i)
        if ci is None:
            continue
        if ci == a.communities.get(j):
            count += 1
    return count


def indicator_difference(
    i: str,
    j: str,
    indicator: str,
    table: IndicatorTable,
) -> float | None:
    """|v_i - v_j| for one indicator; None when either value is missing."""
    vi = table.get(i, indicator)
    vj = table.get(j, indicator)
    if vi is None or vj is None:
        return None
    return abs(vi - vj)


@dataclass(frozen=True)
class SimilarityProfile:
    """Pairwise indicator differences grouped by community multiplexity."""

    levels: tuple[int, ...]
    cm: Mapping[tuple[str, str], int]
    differences: Mapping[str, Mapping[int, tuple[float, ...]]]
    ks: Mapping[str, Mapping[tuple[int, int], KsResult]]

    def median_difference(self, indicator: str, level: int) -> float | None:
        values = self.differences.get(indicator, {}).get(level, ())
        if not values:
            return None
        s = sorted(values)
        mid = len(s) // 2
        if len(s) % 2:
            return s[mid]
        return 0.5 * (s[mid - 1] + s[mid])


def similarity_profile(
    mx: Multiplex,
    assignments: Sequence[CommunityAssignment],
    table: IndicatorTable,
    indicators: Iterable[str] | None = None,
) -> SimilarityProfile:
    """Group pairwise indicator differences by multiplexity level 0..m.

    Every unordered pair of countries present in the multiplex union
    contributes a multiplexity level; a pair contributes to an
    indicator's distribution only when both countries have a value. The
    KS grid compares every pair of non-empty levels per indicator.
    """
    names = sorted(a.layer for a in assignments)
    if names != sorted(mx.layer_names()):
        raise ValidationError(
            f"assignments cover layers {names}, multiplex has {sorted(mx.layer_names())}"
        )
    reg = mx.registry
    codes = sorted(reg.code(i) for i in mx.union_nodes)
    levels = tuple(range(mx.m + 1))
    wanted = tuple(indicators) if indicators is not None else table.indicators
    cm_map: dict[tuple[str, str], int] = {}
    diffs: dict[str, dict[int, list[float]]] = {
        ind: {lv: [] for lv in levels} for ind in wanted
    }
    for a_code, b_code in itertools.combinations(codes, 2):
        level = community_multiplexity(a_code, b_code, assignments)
        cm_map[(a_code, b_code)] = level
        for ind in wanted:
            d = indicator_difference(a_code, b_code, ind, table)
            if d is not None:
                diffs[ind][level].append(d)
    ks: dict[str, dict[tuple[int, int], KsResult]] = {ind: {} for ind in wanted}
    for ind in wanted:
        for la, lb in itertools.combinations(levels, 2):
            a_vals = diffs[ind][la]
            b_vals = diffs[ind][lb]
            if not a_vals or not b_vals:
                continue
            try:
                ks[ind][(la, lb)] = ks_two_sample(a_vals, b_vals)
            except InsufficientDataError:  # pragma: no cover
                continue
    frozen_diffs = {
        ind: {lv: tuple(vals) for lv, vals in by_level.items()}
        for ind, by_level in diffs.items()
    }
    return SimilarityProfile(
        levels=levels, cm=cm_map, differences=frozen_diffs, ks=ks
    )


def detect_communities(
    mx: Multiplex,
    seed: int = 0,
    resolution: float = 1.0,
    restarts: int = 1,
) -> list[CommunityAssignment]:
    """Louvain on every layer with per-layer seeds derived from ``seed``."""
    seeder = random.Random(seed)
    out = []
    for g in mx.layers:
        out.append(
            louvain(
                g,
                seed=seeder.randrange(2**32),
                resolution=resolution,
                restarts=restarts,
            )
        )
    return out
