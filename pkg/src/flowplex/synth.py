"""Seeded gravity-model generator of multiplex fixtures with planted structure.

Countries live in a unit square. Masses are log-normal, handed out by
noisy spatial rank (countries toward the (1,1) corner tend to get the
large masses), so the marginal mass distribution is exactly log-normal
while mass and position stay coupled. Raw flow volume between two
countries on a layer is

    v_ij = mass_i * mass_j / dist(i,j)^gamma * exp(noise_ij)

where the noise combines a per-pair term (epsilon) with a per-country
layer affinity (a country punches above or below its mass on any given
flow type). Each layer keeps its top pairs by perturbed volume until
the target density is hit exactly, with a seeded tiebreak for
degenerate configs, and covers only its top share of countries by noisy
mass rank, mirroring how the real networks differ in country coverage.
Recorded volumes then pick up reporting noise on top of the true ones:
which links exist is observed much more reliably than how large they
are. Because every single layer is a biased partial view, the union
across layers tracks the underlying masses better than any one layer
does, and binary presence tracks them better than reported magnitude.

Planted ground truth: populations are proportional to mass with heavy
noise, and six development indicators (GDP, LifeExp, CPI, Inet, HDI,
PovRate) are monotone functions of log mass at increasing noise levels,
with HDI expressed as a rank (1 = best) and PovRate decreasing in mass
so both orientations occur. Two control indicators (Mobile, EdRate)
are pure seeded noise. Everything is a pure function of the config, so
the same seed always produces byte-identical fixture files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Mapping, NamedTuple

import numpy as np

from .artifacts import write_csv
from .errors import ConfigError, ContractViolationError
from .graph import LayerGraph
from .indicators import IndicatorTable
from .ingest import (
    LayerSpec,
    PopulationTable,
    RawFlowRecord,
    write_indicators_csv,
    write_layers_csv,
    write_manifest_json,
    write_population_csv,
)
from .multiplex import Multiplex
from .registry import NodeRegistry
from .stats import spearman

# distances below this are clamped so near-coincident points cannot
# produce unbounded volumes
_MIN_DIST = 1e-3

PLANTED_INDICATOR = "GDP"
POPULATION_YEAR = 2010

DEFAULT_INDICATOR_NOISE = 0.08


class LayerSynthSpec(NamedTuple):
    name: str
    density: float
    directed: bool = True
    coverage: float = 1.0
    # how loosely layer membership follows mass rank; None falls back
    # to the config-wide coverage_noise
    coverage_noise: float | None = None
    # multiplier on the per-country affinity noise: how far this flow
    # type strays from pure economic mass
    affinity: float = 1.0


# densities follow the six flow networks' reported values; coverage
# follows their node-count share of the union. Distortion is
# layer-specific: trade tracks economic mass closely, flight volume is
# shaped by tourism and hub geography, and social-media presence is
# only loosely tied to mass at all.
DEFAULT_LAYERS: tuple[LayerSynthSpec, ...] = (
    LayerSynthSpec("post", 0.55, True, 0.88, 0.15, 1.0),
    LayerSynthSpec("trade", 0.58, True, 1.00, None, 0.8),
    LayerSynthSpec("migration", 0.31, True, 0.85, 0.15, 1.2),
    LayerSynthSpec("flights", 0.13, True, 0.98, None, 1.6),
    LayerSynthSpec("ip", 0.19, False, 0.90, 0.20, 1.2),
    LayerSynthSpec("sm", 0.98, False, 0.64, 0.50, 1.4),
)


@dataclass(frozen=True)
class SynthConfig:
    n: int = 100
    layers: tuple[LayerSynthSpec, ...] = DEFAULT_LAYERS
    gamma: float = 1.0
    mass_mu: float = 0.0
    mass_sigma: float = 1.0
    epsilon: float = 0.5
    layer_affinity_noise: float = 0.7
    reporting_noise: float = 1.0
    spatial_noise: float = 0.10
    coverage_noise: float = 0.05
    population_noise: float = 2.0
    population_scale: float = 3.0e5
    indicator_noise: float = DEFAULT_INDICATOR_NOISE
    seed: int = 0

    def __post_init__(self):
        # canonical container so equal configs compare equal
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.n < 2:
            raise ConfigError(f"need at least 2 countries, got {self.n}")
        if self.n > 17576:
            raise ConfigError("at most 17576 synthetic country codes available")
        if not self.layers:
            raise ConfigError("need at least one layer spec")
        names = [s.name for s in self.layers]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate layer names: {names}")
        for s in self.layers:
            if not 0.0 < s.density <= 1.0:
                raise ConfigError(
                    f"layer {s.name!r}: density must be in (0, 1], got {s.density}"
                )
            if not 0.0 < s.coverage <= 1.0:
                raise ConfigError(
                    f"layer {s.name!r}: coverage must be in (0, 1], got {s.coverage}"
                )
            if int(round(s.coverage * self.n)) < 2:
                raise ConfigError(
                    f"layer {s.name!r}: coverage {s.coverage} leaves fewer than "
                    f"2 of {self.n} countries"
                )
            if s.coverage_noise is not None and s.coverage_noise < 0:
                raise ConfigError(
                    f"layer {s.name!r}: coverage_noise must be >= 0, "
                    f"got {s.coverage_noise}"
                )
            if s.affinity < 0:
                raise ConfigError(
                    f"layer {s.name!r}: affinity must be >= 0, got {s.affinity}"
                )
        if self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if self.mass_sigma < 0:
            raise ConfigError(f"mass_sigma must be >= 0, got {self.mass_sigma}")
        for name in (
            "epsilon", "layer_affinity_noise", "reporting_noise",
            "spatial_noise", "coverage_noise", "population_noise",
            "indicator_noise",
        ):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.population_scale <= 0:
            raise ConfigError("population_scale must be positive")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["layers"] = [list(s) for s in self.layers]
        return d

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SynthConfig":
        kwargs = dict(data)
        if "layers" in kwargs:
            try:
                kwargs["layers"] = tuple(
                    LayerSynthSpec(
                        str(entry[0]), float(entry[1]), bool(entry[2]),
                        float(entry[3]),
                        None if len(entry) < 5 or entry[4] is None
                        else float(entry[4]),
                        float(entry[5]) if len(entry) > 5 else 1.0,
                    )
                    for entry in kwargs["layers"]
                )
            except (TypeError, IndexError, ValueError) as exc:
                raise ConfigError(f"invalid layers entry: {exc}") from None
        unknown = set(kwargs) - {f.name for f in cls.__dataclass_fields__.values()}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class SynthResult:
    config: SynthConfig
    multiplex: Multiplex
    population: PopulationTable
    indicators: IndicatorTable
    masses: Mapping[str, float]
    positions: Mapping[str, tuple[float, float]] = field(repr=False, default=None)


def _codes(n: int) -> list[str]:
    out = []
    for k in range(n):
        out.append(
            chr(65 + k // 676) + chr(65 + (k // 26) % 26) + chr(65 + k % 26)
        )
    return out


def _minmax_scale(values: np.ndarray, low: float, high: float) -> np.ndarray:
    span = values.max() - values.min()
    if span == 0.0:
        return np.full_like(values, (low + high) / 2.0)
    return low + (high - low) * (values - values.min()) / span


def generate(config: SynthConfig) -> SynthResult:
    """Deterministic fixture: multiplex of raw volumes plus planted tables."""
    rng = np.random.default_rng(config.seed)
    n = config.n
    codes = _codes(n)
    registry = NodeRegistry(codes)

    positions = rng.uniform(0.0, 1.0, size=(n, 2))
    mass_draws = np.sort(rng.lognormal(config.mass_mu, config.mass_sigma, n))
    spatial_score = (
        positions[:, 0] + positions[:, 1]
        + config.spatial_noise * rng.standard_normal(n)
    )
    # country with the k-th smallest spatial score gets the k-th
    # smallest mass: the marginal stays exactly log-normal
    masses = np.empty(n)
    masses[np.argsort(spatial_score, kind="stable")] = mass_draws
    log_mass = np.log(masses)
    mass_rank = np.empty(n)
    mass_rank[np.argsort(masses, kind="stable")] = np.arange(n)

    coverage_eta = rng.standard_normal((len(config.layers), n))

    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.maximum(np.sqrt((diff ** 2).sum(axis=2)), _MIN_DIST)
    base_log_v = (
        log_mass[:, None] + log_mass[None, :]
        - config.gamma * np.log(dist)
    )

    layers: list[LayerGraph] = []
    for pos, spec in enumerate(config.layers):
        k = int(round(spec.coverage * n))
        cn = (
            config.coverage_noise
            if spec.coverage_noise is None
            else spec.coverage_noise
        )
        cover_score = mass_rank + cn * n * coverage_eta[pos]
        covered = np.sort(np.argsort(-cover_score, kind="stable")[:k])
        # each layer sees countries through its own affinity distortion;
        # no single layer is an unbiased sample of the masses, but their
        # union averages the distortions away
        affinity = (
            config.layer_affinity_noise * spec.affinity
            * rng.standard_normal(n)
        )
        if spec.directed:
            oi, oj = np.meshgrid(covered, covered, indexing="ij")
            keep = oi != oj
            pi, pj = oi[keep], oj[keep]
            slots = int(round(spec.density * k * (k - 1)))
        else:
            iu = np.triu_indices(k, k=1)
            pi, pj = covered[iu[0]], covered[iu[1]]
            slots = int(round(spec.density * k * (k - 1) / 2))
        log_v = (
            base_log_v[pi, pj]
            + affinity[pi] + affinity[pj]
            + config.epsilon * rng.standard_normal(pi.size)
        )
        tiebreak = rng.random(pi.size)
        order = np.lexsort((tiebreak, -log_v))
        chosen = order[:slots]
        # reporting noise distorts magnitudes but never which links exist
        volumes = np.exp(
            log_v[chosen]
            + config.reporting_noise * rng.standard_normal(chosen.size)
        )
        edges = [
            (int(pi[t]), int(pj[t]), float(v))
            for t, v in zip(chosen, volumes)
        ]
        layers.append(
            LayerGraph.from_edges(
                spec.name, registry, edges,
                directed=spec.directed,
                nodes=[int(c) for c in covered],
            )
        )

    pop_eta = rng.standard_normal(n)
    populations = np.maximum(
        1,
        np.round(
            config.population_scale * masses
            * np.exp(config.population_noise * pop_eta)
        ).astype(np.int64),
    )
    population = PopulationTable.from_records(
        (codes[i], POPULATION_YEAR, int(populations[i])) for i in range(n)
    )

    z = log_mass - log_mass.mean()
    spread = z.std()
    if spread > 0:
        z = z / spread

    def planted(noise_mult: float) -> np.ndarray:
        return z + noise_mult * config.indicator_noise * rng.standard_normal(n)

    gdp = _minmax_scale(planted(1.0), 500.0, 80000.0)
    life = _minmax_scale(planted(2.0), 45.0, 85.0)
    cpi = _minmax_scale(planted(1.5), 10.0, 90.0)
    inet = _minmax_scale(planted(2.5), 1.0, 95.0)
    # rank 1 = most developed, so this one runs against mass
    hdi = np.empty(n)
    hdi[np.argsort(-planted(1.5), kind="stable")] = np.arange(1, n + 1)
    povrate = _minmax_scale(-planted(2.0), 2.0, 60.0)
    mobile = rng.uniform(0.0, 100.0, n)
    edrate = rng.uniform(20.0, 100.0, n)
    columns = [
        (PLANTED_INDICATOR, gdp), ("LifeExp", life), ("CPI", cpi),
        ("Inet", inet), ("HDI", hdi), ("PovRate", povrate),
        ("Mobile", mobile), ("EdRate", edrate),
    ]
    indicators = IndicatorTable.from_records(
        (codes[i], name, float(col[i])) for name, col in columns for i in range(n)
    )

    # below ~15 countries a single adjacent rank swap already costs more
    # than the 0.1 slack, so the bound is only checked at sizes where it
    # says something
    if n >= 15 and config.indicator_noise <= DEFAULT_INDICATOR_NOISE and spread > 0:
        planted = spearman(
            masses, [indicators.get(c, PLANTED_INDICATOR) for c in codes]
        )
        if planted.rho < 0.9:
            raise ContractViolationError(
                f"planted indicator drifted from mass: rho {planted.rho:.3f} < 0.9"
            )

    return SynthResult(
        config=config,
        multiplex=Multiplex(layers),
        population=population,
        indicators=indicators,
        masses={codes[i]: float(masses[i]) for i in range(n)},
        positions={
            codes[i]: (float(positions[i, 0]), float(positions[i, 1]))
            for i in range(n)
        },
    )


def fixture_records(result: SynthResult) -> list[RawFlowRecord]:
    """Flow rows for the layers CSV; undirected edges appear once."""
    records: list[RawFlowRecord] = []
    for g in result.multiplex.layers:
        reg = g.registry
        rows = []
        for i, j, w in g.edges():
            if not g.directed and i > j:
                continue
            rows.append((reg.code(i), reg.code(j), w))
        rows.sort()
        records.extend(
            RawFlowRecord(g.name, o, d, v, None) for o, d, v in rows
        )
    return records


def write_fixture(result: SynthResult, outdir: str | Path) -> dict[str, Path]:
    """Write the ingest-format fixture files plus the ground truth."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "layers": outdir / "layers.csv",
        "manifest": outdir / "manifest.json",
        "population": outdir / "population.csv",
        "indicators": outdir / "indicators.csv",
        "ground_truth": outdir / "ground_truth.csv",
    }
    write_layers_csv(paths["layers"], fixture_records(result))
    write_manifest_json(
        paths["manifest"],
        {g.name: LayerSpec(directed=g.directed) for g in result.multiplex.layers},
    )
    write_population_csv(paths["population"], result.population)
    write_indicators_csv(paths["indicators"], result.indicators)
    write_csv(
        paths["ground_truth"],
        ["country", "mass"],
        [(c, m) for c, m in sorted(result.masses.items())],
    )
    return paths
