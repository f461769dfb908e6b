"""Socioeconomic indicator table and the degree-vs-indicator correlation grid.

The table maps (country, indicator) to a value; missing cells are
explicit nulls, never zeros. Fourteen canonical indicators are known by
abbreviation, each with an orientation flag saying whether larger
values mean better outcomes (the Gini index, poverty rate, and the
rank-valued HDI are flagged the other way). Unknown indicator names
pass through untouched so custom studies still work.

The degree-metric matrix collects every per-layer degree plus the two
multiplex-wide degrees, one row per metric and one column per country;
correlating its rows against indicator columns with pairwise deletion
yields the rho/p grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .errors import InsufficientDataError, UndefinedStatisticError, ValidationError
from .graph import LayerGraph
from .multiplex import Eq4Mode, Multiplex, global_degree, weighted_global_degree
from .registry import validate_code
from .stats import CorrelationResult, spearman

GLOBAL_DEGREE_ROW = "global.deg"
GLOBAL_WEIGHTED_ROW = "global.w-deg"


class IndicatorMeta(NamedTuple):
    name: str
    higher_is_better: bool
    description: str


CANONICAL_INDICATORS: tuple[IndicatorMeta, ...] = (
    IndicatorMeta("GDP", True, "gross domestic product per capita"),
    IndicatorMeta("LifeExp", True, "life expectancy at birth"),
    IndicatorMeta("CPI", True, "corruption perceptions index (higher = cleaner)"),
    IndicatorMeta("Happiness", True, "national happiness index"),
    IndicatorMeta("Gini.Idx", False, "income inequality index"),
    IndicatorMeta("ECI", True, "economic complexity index"),
    IndicatorMeta("LitRate", True, "adult literacy rate"),
    IndicatorMeta("PovRate", False, "share of population in poverty"),
    IndicatorMeta("EdRate", True, "school enrollment rate"),
    IndicatorMeta("CO2", True, "CO2 emissions per capita"),
    IndicatorMeta("FxPhone", True, "fixed phone line penetration"),
    IndicatorMeta("Inet", True, "internet penetration rate"),
    IndicatorMeta("Mobile", True, "mobile phone users per capita"),
    IndicatorMeta("HDI", False, "human development index rank (1 = best)"),
)

_CANONICAL_ORDER = {meta.name: pos for pos, meta in enumerate(CANONICAL_INDICATORS)}
_CANONICAL_BY_NAME = {meta.name: meta for meta in CANONICAL_INDICATORS}


def indicator_meta(name: str) -> IndicatorMeta | None:
    """Metadata for a canonical indicator abbreviation, else None."""
    return _CANONICAL_BY_NAME.get(name)


def _indicator_sort_key(name: str) -> tuple[int, str]:
    return (_CANONICAL_ORDER.get(name, len(_CANONICAL_ORDER)), name)


class IndicatorTable:
    """Immutable (country, indicator) -> value table with explicit nulls."""

    def __init__(self, values: Mapping[tuple[str, str], float | None]):
        store: dict[tuple[str, str], float] = {}
        indicators: set[str] = set()
        countries: set[str] = set()
        for (country, indicator), value in values.items():
            validate_code(country)
            if not indicator:
                raise ValidationError("indicator name must be non-empty")
            if value is None:
                continue
            v = float(value)
            if not math.isfinite(v):
                continue
            store[(country, indicator)] = v
            indicators.add(indicator)
            countries.add(country)
        self._values = store
        self._indicators = tuple(sorted(indicators, key=_indicator_sort_key))
        self._countries = tuple(sorted(countries))

    @classmethod
    def from_records(
        cls, records: Iterable[tuple[str, str, float | None]]
    ) -> "IndicatorTable":
        """Build from (country, indicator, value) rows; duplicates last-wins."""
        acc: dict[tuple[str, str], float | None] = {}
        for country, indicator, value in records:
            acc[(country, indicator)] = value
        return cls(acc)

    @property
    def indicators(self) -> tuple[str, ...]:
        """Present indicator names, canonical ones first in Table order."""
        return self._indicators

    @property
    def countries(self) -> tuple[str, ...]:
        return self._countries

    def get(self, country: str, indicator: str) -> float | None:
        return self._values.get((country, indicator))

    def vector(
        self, indicator: str, countries: Iterable[str]
    ) -> list[float | None]:
        return [self._values.get((c, indicator)) for c in countries]

    def items(self) -> Iterable[tuple[str, str, float]]:
        for (country, indicator), value in sorted(self._values.items()):
            yield country, indicator, value

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"IndicatorTable({len(self._countries)} countries, "
            f"{len(self._indicators)} indicators)"
        )


@dataclass(frozen=True)
class DegreeMetricMatrix:
    """Degree metrics, one row per metric and one column per country.

    A null cell means the country is absent from that row's layer,
    which is different from being present and isolated (a 0).
    """

    rows: tuple[str, ...]
    countries: tuple[str, ...]
    values: Mapping[str, tuple[float | None, ...]]

    def row_vector(self, row: str) -> tuple[float | None, ...]:
        try:
            return self.values[row]
        except KeyError:
            raise ValidationError(f"no metric row named {row!r}") from None

    def value(self, row: str, country: str) -> float | None:
        vec = self.row_vector(row)
        try:
            col = self.countries.index(country)
        except ValueError:
            raise ValidationError(f"no country column {country!r}") from None
        return vec[col]


def _layer_rows(g: LayerGraph, countries: tuple[str, ...]) -> dict[str, tuple]:
    reg = g.registry
    present = {reg.code(i): i for i in g.nodes}

    def build(metric) -> tuple[float | None, ...]:
        return tuple(
            metric(present[c]) if c in present else None for c in countries
        )

    if g.directed:
        return {
            f"{g.name}.in": build(lambda i: float(len(g.in_neighbors(i)))),
            f"{g.name}.out": build(lambda i: float(len(g.out_neighbors(i)))),
            f"{g.name}.w-in": build(
                lambda i: float(sum(g.in_neighbors(i).values()))
            ),
            f"{g.name}.w-out": build(
                lambda i: float(sum(g.out_neighbors(i).values()))
            ),
        }
    return {
        f"{g.name}.deg": build(lambda i: float(len(g.out_neighbors(i)))),
        f"{g.name}.w-deg": build(
            lambda i: float(sum(g.out_neighbors(i).values()))
        ),
    }


def degree_metric_matrix(
    mx: Multiplex, eq4_mode: Eq4Mode = "wji"
) -> DegreeMetricMatrix:
    """All per-layer degree rows plus the two multiplex-wide degree rows.

    Directed layers contribute in/out and weighted in/out rows;
    undirected layers contribute a single degree and weighted-degree
    row. Columns cover the union of layer node sets.
    """
    reg = mx.registry
    countries = tuple(sorted(reg.code(i) for i in mx.union_nodes))
    values: dict[str, tuple[float | None, ...]] = {}
    for g in mx.layers:
        values.update(_layer_rows(g, countries))
    values[GLOBAL_DEGREE_ROW] = tuple(
        float(global_degree(mx, c)) for c in countries
    )
    values[GLOBAL_WEIGHTED_ROW] = tuple(
        weighted_global_degree(mx, c, mode=eq4_mode) for c in countries
    )
    return DegreeMetricMatrix(
        rows=tuple(values), countries=countries, values=values
    )


@dataclass(frozen=True)
class IndicatorCorrelationGrid:
    """Spearman results per (metric row, indicator) cell; None where undefined."""

    rows: tuple[str, ...]
    indicators: tuple[str, ...]
    cells: Mapping[tuple[str, str], CorrelationResult | None]

    def cell(self, row: str, indicator: str) -> CorrelationResult | None:
        return self.cells[(row, indicator)]

    def rho(self, row: str, indicator: str) -> float | None:
        res = self.cells[(row, indicator)]
        return None if res is None else res.rho

    def mean_abs_rho(self, row: str) -> float | None:
        rhos = [
            abs(res.rho)
            for ind in self.indicators
            if (res := self.cells[(row, ind)]) is not None
        ]
        if not rhos:
            return None
        return sum(rhos) / len(rhos)

    def best_row(self) -> str:
        """Row with the highest mean |rho| over its defined cells."""
        scored = [
            (score, row)
            for row in self.rows
            if (score := self.mean_abs_rho(row)) is not None
        ]
        if not scored:
            raise InsufficientDataError("no correlation cell is defined")
        best_score = max(score for score, _ in scored)
        for score, row in scored:
            if score == best_score:
                return row
        raise AssertionError("unreachable")  # pragma: no cover


def correlate_with_indicators(
    matrix: DegreeMetricMatrix,
    table: IndicatorTable,
    indicators: Iterable[str] | None = None,
) -> IndicatorCorrelationGrid:
    """Spearman grid of every metric row against every indicator.

    Pairs missing either the metric or the indicator value are dropped
    per cell; cells with fewer than 3 complete pairs or zero variance
    are None rather than an error.
    """
    wanted = tuple(indicators) if indicators is not None else table.indicators
    cells: dict[tuple[str, str], CorrelationResult | None] = {}
    vectors = {
        ind: table.vector(ind, matrix.countries) for ind in wanted
    }
    for row in matrix.rows:
        metric_vec = matrix.row_vector(row)
        for ind in wanted:
            try:
                cells[(row, ind)] = spearman(metric_vec, vectors[ind])
            except (InsufficientDataError, UndefinedStatisticError):
                cells[(row, ind)] = None
    return IndicatorCorrelationGrid(
        rows=matrix.rows, indicators=wanted, cells=cells
    )
