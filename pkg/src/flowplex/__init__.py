"""Multiplex analysis of international flow networks.

Layers of country-to-country flows (post, trade, migration, flights,
and friends) are normalized into comparable [0,1]-weighted graphs,
combined into a multiplex, and mined for structure: per-layer degree
metrics, global multiplex degrees, pairwise layer comparisons, Louvain
communities with cross-layer community multiplexity, and Spearman
correlation grids against socioeconomic indicators. A seeded gravity
generator produces fixtures with planted ground truth for end-to-end
verification, and a CLI drives the whole pipeline reproducibly.
"""

from ._version import __version__
from .errors import (
    ConfigError,
    ContractViolationError,
    DegenerateGraphError,
    FlowplexError,
    InsufficientDataError,
    MissingPopulationError,
    ParseError,
    UndefinedStatisticError,
    UnknownCountryError,
    ValidationError,
)
from .registry import CountryId, NodeRegistry
from .graph import (
    LayerGraph,
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
from .stats import (
    CorrelationResult,
    KsResult,
    ks_two_sample,
    pearson,
    rank_with_ties,
    spearman,
)
from .multiplex import (
    Multiplex,
    compare_layers,
    degree_correlation,
    edge_weight_correlation,
    global_degree,
    jaccard_overlap,
    multiplex_neighborhood,
    shared_edge_fraction,
    weighted_global_degree,
)
from .community import (
    CommunityAssignment,
    SimilarityProfile,
    community_multiplexity,
    detect_communities,
    indicator_difference,
    louvain,
    modularity,
    similarity_profile,
)
from .indicators import (
    CANONICAL_INDICATORS,
    GLOBAL_DEGREE_ROW,
    GLOBAL_WEIGHTED_ROW,
    DegreeMetricMatrix,
    IndicatorCorrelationGrid,
    IndicatorTable,
    correlate_with_indicators,
    degree_metric_matrix,
    indicator_meta,
)
from .ingest import (
    LayerSpec,
    ParseResult,
    PopulationTable,
    RawFlowRecord,
    SlicedLayer,
    annual_average,
    load_multiplex,
    normalize_layer,
    parse_indicators,
    parse_layers,
    parse_manifest,
    parse_population,
    per_capita_normalize,
    rescale_max,
)
from .synth import (
    DEFAULT_LAYERS,
    LayerSynthSpec,
    SynthConfig,
    SynthResult,
    generate,
    write_fixture,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
