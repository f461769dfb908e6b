"""File ingestion and the flow-normalization pipeline.

Input formats (UTF-8 CSV with a header row; `#` starts a comment line):

- layers:     ``layer,origin,dest,volume[,year]``
- population: ``country,year,population``
- indicators: ``country,indicator,value`` (empty value = explicitly missing)
- manifest:   JSON ``{layer: {"directed": bool, "years": [int, ...]}}``

Parsing keeps per-year slices so annual averaging can use the layer-year
denominator: an edge absent in a year counts as zero flow that year.
The pipeline that makes layers comparable is

    annual average -> per-capita by origin population -> rescale by max

after which every non-empty layer has weights in [0, 1] with the
maximum exactly 1. Undirected layers are declared in the manifest, are
symmetrized on load, and use the mean of the two endpoint population
rates so the stored symmetry survives per-capita normalization.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .artifacts import atomic_write_text
from .errors import (
    ConfigError,
    DegenerateGraphError,
    MissingPopulationError,
    ParseError,
    ValidationError,
)
from .graph import LayerGraph
from .multiplex import Multiplex
from .indicators import IndicatorTable, indicator_meta
from .registry import NodeRegistry, validate_code

logger = logging.getLogger(__name__)


class RawFlowRecord(NamedTuple):
    layer: str
    origin: str
    dest: str
    volume: float
    year: int | None


@dataclass(frozen=True)
class SlicedLayer:
    """One layer's raw volumes, kept separate per year until averaging."""

    name: str
    directed: bool
    slices: Mapping[int | None, LayerGraph]

    @property
    def years(self) -> tuple[int | None, ...]:
        return tuple(sorted(self.slices, key=lambda y: (y is None, y)))


@dataclass(frozen=True)
class ParseResult:
    layers: tuple[SlicedLayer, ...]
    registry: NodeRegistry
    dropped_self_flows: int


class PopulationTable:
    """(country, year) -> population, with nearest-year fallback."""

    def __init__(self, data: Mapping[tuple[str, int], int]):
        store: dict[str, dict[int, int]] = {}
        for (country, year), pop in data.items():
            validate_code(country)
            year = int(year)
            pop = int(pop)
            if pop <= 0:
                raise ValidationError(
                    f"population for {country} in {year} must be positive, got {pop}"
                )
            store.setdefault(country, {})[year] = pop
        self._by_country = {c: dict(sorted(ys.items())) for c, ys in sorted(store.items())}

    @classmethod
    def from_records(
        cls, records: Iterable[tuple[str, int, int]]
    ) -> "PopulationTable":
        acc: dict[tuple[str, int], int] = {}
        for country, year, pop in records:
            acc[(country, int(year))] = pop
        return cls(acc)

    @property
    def countries(self) -> tuple[str, ...]:
        return tuple(self._by_country)

    def get(self, country: str, year: int | None = None) -> int | None:
        """Population at ``year``, falling back to the nearest available year.

        Distance ties prefer the earlier year; ``year=None`` takes the
        latest available. Returns None for unknown countries.
        """
        years = self._by_country.get(country)
        if not years:
            return None
        if year is None:
            return years[max(years)]
        if year in years:
            return years[year]
        best = min(years, key=lambda y: (abs(y - year), y))
        return years[best]

    def items(self) -> Iterable[tuple[str, int, int]]:
        for country, years in self._by_country.items():
            for year, pop in years.items():
                yield country, year, pop

    def __len__(self) -> int:
        return sum(len(ys) for ys in self._by_country.values())


@dataclass(frozen=True)
class LayerSpec:
    directed: bool = True
    years: tuple[int, ...] | None = None


def parse_manifest(path: str | Path) -> dict[str, LayerSpec]:
    """JSON manifest: layer name -> {directed: bool, years: [int]}."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"manifest {path}: top level must be an object")
    out: dict[str, LayerSpec] = {}
    for name, entry in raw.items():
        if not isinstance(entry, dict):
            raise ConfigError(f"manifest layer {name!r}: entry must be an object")
        unknown = set(entry) - {"directed", "years"}
        if unknown:
            raise ConfigError(
                f"manifest layer {name!r}: unknown keys {sorted(unknown)}"
            )
        directed = entry.get("directed", True)
        if not isinstance(directed, bool):
            raise ConfigError(f"manifest layer {name!r}: directed must be boolean")
        years = entry.get("years")
        if years is not None:
            if (
                not isinstance(years, list)
                or not years
                or not all(isinstance(y, int) and not isinstance(y, bool) for y in years)
            ):
                raise ConfigError(
                    f"manifest layer {name!r}: years must be a non-empty list of ints"
                )
            years = tuple(sorted(set(years)))
        out[name] = LayerSpec(directed=directed, years=years)
    return out


def _read_rows(path: str | Path, expected: list[str], optional: list[str]):
    """Yield (line_number, row) for data rows; validates the header."""
    wanted = ",".join(expected) + (f"[,{','.join(optional)}]" if optional else "")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header: list[str] | None = None
        for lineno, row in enumerate(reader, start=1):
            if not row or (row[0].startswith("#")):
                continue
            if header is None:
                header = [c.strip() for c in row]
                if header != expected and header != expected + optional:
                    raise ParseError(f"expected header {wanted}", line=lineno)
                continue
            yield lineno, row, len(header)
        if header is None:
            raise ParseError(f"missing header row (expected {wanted})", line=1)


def _parse_float(text: str, what: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"invalid {what} {text!r}", line=lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"{what} must be finite, got {text!r}", line=lineno)
    return value


def _parse_code(text: str, lineno: int) -> str:
    code = text.strip()
    try:
        return validate_code(code)
    except ValidationError as exc:
        raise ParseError(str(exc), line=lineno) from None


def parse_flow_records(path: str | Path) -> tuple[list[RawFlowRecord], int]:
    """All well-formed flow rows plus the count of dropped self-flows."""
    records: list[RawFlowRecord] = []
    dropped = 0
    for lineno, row, width in _read_rows(
        path, ["layer", "origin", "dest", "volume"], ["year"]
    ):
        if len(row) != width:
            raise ParseError(
                f"expected {width} fields, got {len(row)}", line=lineno
            )
        layer = row[0].strip()
        if not layer:
            raise ParseError("empty layer name", line=lineno)
        origin = _parse_code(row[1], lineno)
        dest = _parse_code(row[2], lineno)
        volume = _parse_float(row[3], "volume", lineno)
        if volume < 0:
            raise ParseError(f"negative volume {volume}", line=lineno)
        year: int | None = None
        if width == 5 and row[4].strip():
            try:
                year = int(row[4])
            except ValueError:
                raise ParseError(f"invalid year {row[4]!r}", line=lineno) from None
        if origin == dest:
            dropped += 1
            continue
        records.append(RawFlowRecord(layer, origin, dest, volume, year))
    if dropped:
        logger.info("dropped %d self-flow row(s) from %s", dropped, path)
    return records, dropped


def parse_layers(
    path: str | Path,
    registry: NodeRegistry | None = None,
    manifest: Mapping[str, LayerSpec] | None = None,
) -> ParseResult:
    """Parse a layers CSV into per-year raw slices over a shared registry.

    The returned registry is a new object covering the given registry's
    codes plus every code seen in the file (indices are reassigned).
    Layers keep their first-appearance order from the file. Duplicate
    (layer, origin, dest, year) rows sum; self-flows are dropped and
    counted.
    """
    records, dropped = parse_flow_records(path)
    manifest = dict(manifest) if manifest else {}
    codes = {r.origin for r in records} | {r.dest for r in records}
    base = registry if registry is not None else NodeRegistry([])
    new_registry = base.extended(codes)

    order: list[str] = []
    by_layer: dict[str, list[RawFlowRecord]] = {}
    for r in records:
        if r.layer not in by_layer:
            order.append(r.layer)
            by_layer[r.layer] = []
        by_layer[r.layer].append(r)

    layers: list[SlicedLayer] = []
    for name in order:
        rows = by_layer[name]
        spec = manifest.get(name, LayerSpec())
        dated = {r.year for r in rows}
        if None in dated and len(dated) > 1:
            raise ValidationError(
                f"layer {name!r} mixes dated and undated rows"
            )
        if spec.years is not None:
            stray = {y for y in dated if y is not None and y not in spec.years}
            if stray:
                raise ValidationError(
                    f"layer {name!r} has rows in years {sorted(stray)} "
                    f"outside the manifest years {list(spec.years)}"
                )
            years: list[int | None] = list(spec.years)
        else:
            years = sorted(dated, key=lambda y: (y is None, y))
        slices: dict[int | None, LayerGraph] = {}
        for year in years:
            in_year = [r for r in rows if r.year == year]
            slices[year] = LayerGraph.from_edges(
                name,
                new_registry,
                [(r.origin, r.dest, r.volume) for r in in_year],
                directed=spec.directed,
            )
        layers.append(SlicedLayer(name=name, directed=spec.directed, slices=slices))
    # manifest entries with no rows still declare a (empty) layer
    for name, spec in manifest.items():
        if name in by_layer:
            continue
        empty_years: list[int | None] = (
            list(spec.years) if spec.years is not None else [None]
        )
        slices = {
            year: LayerGraph.from_edges(
                name, new_registry, [], directed=spec.directed
            )
            for year in empty_years
        }
        layers.append(SlicedLayer(name=name, directed=spec.directed, slices=slices))
    return ParseResult(
        layers=tuple(layers), registry=new_registry, dropped_self_flows=dropped
    )


def annual_average(sliced: SlicedLayer) -> LayerGraph:
    """Mean volume per edge over the layer's years.

    The denominator is the number of layer-years, so an edge missing in
    some years is averaged against zero flow for those years.
    """
    years = sliced.years
    if not years:
        raise ValidationError(f"layer {sliced.name!r} has no year slices")
    denom = float(len(years))
    acc: dict[tuple[int, int], float] = {}
    registry = None
    for year in years:
        g = sliced.slices[year]
        registry = g.registry
        for i, j, w in g.edges():
            acc[(i, j)] = acc.get((i, j), 0.0) + w
    mean = {ij: w / denom for ij, w in acc.items()}
    return LayerGraph(sliced.name, registry, mean, directed=sliced.directed)


def per_capita_normalize(
    g: LayerGraph,
    population: PopulationTable,
    year: int | None = None,
    drop_missing: bool = False,
) -> LayerGraph:
    """Divide flows by origin population.

    Directed edges divide by the origin's population. Undirected edges
    average the two endpoint rates, w * (1/p_i + 1/p_j) / 2, which
    keeps the stored symmetry intact. Origins without population data
    raise, listing the codes, unless ``drop_missing`` removes their
    edges instead.
    """
    reg = g.registry
    pop: dict[int, int | None] = {}
    needed: set[int] = set()
    for i, j, _ in g.edges():
        needed.add(i)
        if not g.directed:
            needed.add(j)
    for i in sorted(needed):
        pop[i] = population.get(reg.code(i), year)
    missing = sorted(reg.code(i) for i in needed if pop[i] is None)
    if missing and not drop_missing:
        raise MissingPopulationError(missing)
    new_weights: dict[tuple[int, int], float] = {}
    dropped = 0
    for i, j, w in g.edges():
        if g.directed:
            if pop[i] is None:
                dropped += 1
                continue
            new_weights[(i, j)] = w / pop[i]
        else:
            if pop[i] is None or pop[j] is None:
                dropped += 1
                continue
            new_weights[(i, j)] = w * (1.0 / pop[i] + 1.0 / pop[j]) / 2.0
    if dropped:
        logger.warning(
            "dropped %d edge(s) of layer %s with missing origin population",
            dropped, g.name,
        )
    return LayerGraph(g.name, reg, new_weights, directed=g.directed, nodes=g.nodes)


def rescale_max(g: LayerGraph) -> LayerGraph:
    """Divide all weights by the layer maximum; the max edge becomes 1.0."""
    if g.edge_count == 0:
        raise DegenerateGraphError(f"cannot rescale empty layer {g.name!r}")
    top = g.max_weight()
    if top == 0.0:
        raise DegenerateGraphError(
            f"cannot rescale layer {g.name!r}: all weights are zero"
        )
    return g.replace_weights({(i, j): w / top for i, j, w in g.edges()})


def normalize_layer(
    sliced: SlicedLayer,
    population: PopulationTable | None = None,
    year: int | None = None,
    drop_missing_population: bool = False,
) -> LayerGraph:
    """Full pipeline for one layer; empty layers pass through unchanged."""
    g = annual_average(sliced)
    if g.edge_count == 0:
        return g
    if population is not None:
        g = per_capita_normalize(
            g, population, year=year, drop_missing=drop_missing_population
        )
        if g.edge_count == 0:
            return g
    return rescale_max(g)


def load_multiplex(
    layers_path: str | Path,
    manifest_path: str | Path | None = None,
    population_path: str | Path | None = None,
    drop_missing_population: bool = False,
) -> tuple[Multiplex, ParseResult]:
    """Parse, normalize, and assemble a multiplex from input files."""
    manifest = parse_manifest(manifest_path) if manifest_path else None
    parsed = parse_layers(layers_path, manifest=manifest)
    population = parse_population(population_path) if population_path else None
    normalized = [
        normalize_layer(
            sliced, population, drop_missing_population=drop_missing_population
        )
        for sliced in parsed.layers
    ]
    return Multiplex(normalized), parsed


def parse_population(path: str | Path) -> PopulationTable:
    """CSV ``country,year,population``; duplicate keys last-wins with a warning."""
    acc: dict[tuple[str, int], int] = {}
    for lineno, row, width in _read_rows(path, ["country", "year", "population"], []):
        if len(row) != width:
            raise ParseError(f"expected {width} fields, got {len(row)}", line=lineno)
        country = _parse_code(row[0], lineno)
        try:
            year = int(row[1])
        except ValueError:
            raise ParseError(f"invalid year {row[1]!r}", line=lineno) from None
        try:
            pop = int(row[2])
        except ValueError:
            raise ParseError(f"invalid population {row[2]!r}", line=lineno) from None
        if pop <= 0:
            raise ParseError(f"population must be positive, got {pop}", line=lineno)
        if (country, year) in acc:
            logger.warning(
                "duplicate population row for (%s, %d); keeping the last value",
                country, year,
            )
        acc[(country, year)] = pop
    return PopulationTable(acc)


def parse_indicators(path: str | Path) -> IndicatorTable:
    """CSV ``country,indicator,value``; empty value = missing, never zero."""
    acc: dict[tuple[str, str], float | None] = {}
    warned_unknown: set[str] = set()
    for lineno, row, width in _read_rows(path, ["country", "indicator", "value"], []):
        if len(row) != width:
            raise ParseError(f"expected {width} fields, got {len(row)}", line=lineno)
        country = _parse_code(row[0], lineno)
        indicator = row[1].strip()
        if not indicator:
            raise ParseError("empty indicator name", line=lineno)
        if indicator_meta(indicator) is None and indicator not in warned_unknown:
            warned_unknown.add(indicator)
            logger.warning("unknown indicator %r passed through", indicator)
        text = row[2].strip()
        value = _parse_float(text, "indicator value", lineno) if text else None
        if (country, indicator) in acc:
            logger.warning(
                "duplicate indicator row for (%s, %s); keeping the last value",
                country, indicator,
            )
        acc[(country, indicator)] = value
    return IndicatorTable(acc)


def write_layers_csv(
    path: str | Path, records: Iterable[RawFlowRecord]
) -> None:
    """Serialize flow records in the layers CSV format (with year column)."""
    rows = list(records)
    dated = any(r.year is not None for r in rows)
    header = ["layer", "origin", "dest", "volume"] + (["year"] if dated else [])
    lines = [",".join(header)]
    for r in rows:
        cells = [r.layer, r.origin, r.dest, _format_volume(r.volume)]
        if dated:
            cells.append("" if r.year is None else str(r.year))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _format_volume(v: float) -> str:
    return repr(float(v))


def write_population_csv(path: str | Path, population: PopulationTable) -> None:
    lines = ["country,year,population"]
    for country, year, pop in population.items():
        lines.append(f"{country},{year},{pop}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_indicators_csv(path: str | Path, table: IndicatorTable) -> None:
    lines = ["country,indicator,value"]
    for country, indicator, value in table.items():
        lines.append(f"{country},{indicator},{value!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_manifest_json(path: str | Path, manifest: Mapping[str, LayerSpec]) -> None:
    obj = {
        name: {
            "directed": spec.directed,
            **({"years": list(spec.years)} if spec.years is not None else {}),
        }
        for name, spec in manifest.items()
    }
    atomic_write_text(
        path, json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    )
