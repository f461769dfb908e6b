"""CSV/JSON ingestion and the normalization pipeline."""

import json

import pytest

from flowplex import (
    ConfigError,
    DegenerateGraphError,
    LayerGraph,
    MissingPopulationError,
    NodeRegistry,
    ParseError,
    ValidationError,
)
from flowplex.ingest import (
    LayerSpec,
    PopulationTable,
    RawFlowRecord,
    annual_average,
    load_multiplex,
    normalize_layer,
    parse_flow_records,
    parse_indicators,
    parse_layers,
    parse_manifest,
    parse_population,
    per_capita_normalize,
    rescale_max,
    write_layers_csv,
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# --- flow file parsing ----------------------------------------------------

def test_parse_basic_flows(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\n"
        "# a comment line\n"
        "post,FRA,DEU,10\n"
        "post,DEU,FRA,4.5\n"
        "trade,FRA,BEL,2\n"
    ))
    result = parse_layers(p)
    assert [s.name for s in result.layers] == ["post", "trade"]
    assert result.registry.codes == ("BEL", "DEU", "FRA")
    post = result.layers[0].slices[None]
    assert post.weight("FRA", "DEU") == 10.0
    assert post.weight("DEU", "FRA") == 4.5
    assert result.dropped_self_flows == 0


def test_parse_sums_duplicates_and_drops_self_flows(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\n"
        "post,FRA,DEU,10\n"
        "post,FRA,DEU,5\n"
        "post,FRA,FRA,99\n"
    ))
    result = parse_layers(p)
    assert result.layers[0].slices[None].weight("FRA", "DEU") == 15.0
    assert result.dropped_self_flows == 1


def test_parse_missing_header_is_line_one_error(tmp_path):
    p = write(tmp_path, "flows.csv", "")
    with pytest.raises(ParseError) as err:
        parse_layers(p)
    assert err.value.line == 1


def test_parse_wrong_header_reports_line(tmp_path):
    p = write(tmp_path, "flows.csv", "a,b,c\npost,FRA,DEU,1\n")
    with pytest.raises(ParseError) as err:
        parse_layers(p)
    assert err.value.line == 1


def test_parse_bad_volume_reports_line(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\n"
        "post,FRA,DEU,1\n"
        "post,DEU,FRA,not-a-number\n"
    ))
    with pytest.raises(ParseError) as err:
        parse_layers(p)
    assert err.value.line == 3


def test_parse_negative_volume_rejected(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\npost,FRA,DEU,-3\n"
    ))
    with pytest.raises(ParseError) as err:
        parse_layers(p)
    assert err.value.line == 2


def test_parse_bad_code_reports_line(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\npost,France,DEU,3\n"
    ))
    with pytest.raises(ParseError) as err:
        parse_layers(p)
    assert err.value.line == 2


def test_parse_year_column(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume,year\n"
        "post,FRA,DEU,10,2010\n"
        "post,FRA,DEU,20,2011\n"
    ))
    sliced = parse_layers(p).layers[0]
    assert sliced.years == (2010, 2011)
    assert sliced.slices[2010].weight("FRA", "DEU") == 10.0


def test_mixed_dated_and_undated_rows_rejected(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume,year\n"
        "post,FRA,DEU,10,2010\n"
        "post,DEU,FRA,3,\n"
    ))
    with pytest.raises(ValidationError):
        parse_layers(p)


def test_manifest_controls_direction_and_years(tmp_path):
    flows = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\nsm,FRA,DEU,10\n"
    ))
    manifest = write(tmp_path, "manifest.json", json.dumps(
        {"sm": {"directed": False}}
    ))
    result = parse_layers(flows, manifest=parse_manifest(manifest))
    g = result.layers[0].slices[None]
    assert not g.directed
    assert g.weight("DEU", "FRA") == 10.0


def test_manifest_year_outside_declaration_rejected(tmp_path):
    flows = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume,year\npost,FRA,DEU,10,1999\n"
    ))
    manifest = write(tmp_path, "manifest.json", json.dumps(
        {"post": {"directed": True, "years": [2010, 2011]}}
    ))
    with pytest.raises(ValidationError):
        parse_layers(flows, manifest=parse_manifest(manifest))


def test_manifest_rejects_unknown_keys(tmp_path):
    manifest = write(tmp_path, "manifest.json", json.dumps(
        {"post": {"directed": True, "frequency": "daily"}}
    ))
    with pytest.raises(ConfigError):
        parse_manifest(manifest)


def test_parse_extends_existing_registry_sorted(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\npost,AUT,ZWE,1\n"
    ))
    result = parse_layers(p, registry=NodeRegistry(["FRA"]))
    assert result.registry.codes == ("AUT", "FRA", "ZWE")


def test_parse_flow_records_returns_rows(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\n"
        "post,FRA,DEU,10\n"
        "post,FRA,FRA,2\n"
    ))
    records, dropped = parse_flow_records(p)
    assert records == [RawFlowRecord("post", "FRA", "DEU", 10.0, None)]
    assert dropped == 1


# --- annual averaging -----------------------------------------------------

def test_annual_average_divides_by_layer_year_count(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume,year\n"
        "post,FRA,DEU,10,2010\n"
        "post,FRA,DEU,20,2011\n"
        "post,DEU,FRA,6,2010\n"
    ))
    g = annual_average(parse_layers(p).layers[0])
    assert g.weight("FRA", "DEU") == pytest.approx(15.0)
    # absent in 2011 counts as zero flow, not a smaller denominator
    assert g.weight("DEU", "FRA") == pytest.approx(3.0)


def test_annual_average_counts_declared_empty_years(tmp_path):
    flows = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume,year\npost,FRA,DEU,12,2010\n"
    ))
    manifest = write(tmp_path, "manifest.json", json.dumps(
        {"post": {"directed": True, "years": [2010, 2011, 2012]}}
    ))
    g = annual_average(parse_layers(flows, manifest=parse_manifest(manifest)).layers[0])
    assert g.weight("FRA", "DEU") == pytest.approx(4.0)


def test_annual_average_undated_passthrough(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\npost,FRA,DEU,10\n"
    ))
    g = annual_average(parse_layers(p).layers[0])
    assert g.weight("FRA", "DEU") == 10.0


# --- population -----------------------------------------------------------

def test_population_nearest_year_ties_earlier():
    pop = PopulationTable.from_records([
        ("FRA", 2008, 100), ("FRA", 2012, 200),
    ])
    assert pop.get("FRA", 2008) == 100
    assert pop.get("FRA", 2009) == 100
    assert pop.get("FRA", 2010) == 100  # tie 2008/2012 goes earlier
    assert pop.get("FRA", 2011) == 200
    assert pop.get("FRA") == 200  # no year: latest
    assert pop.get("DEU", 2010) is None


def test_population_rejects_nonpositive():
    with pytest.raises(ValidationError):
        PopulationTable.from_records([("FRA", 2010, 0)])


def test_parse_population_last_wins(tmp_path):
    p = write(tmp_path, "pop.csv", (
        "country,year,population\n"
        "FRA,2010,100\n"
        "FRA,2010,150\n"
    ))
    assert parse_population(p).get("FRA", 2010) == 150


# --- per-capita and rescale ------------------------------------------------

REG = NodeRegistry(["AUT", "BEL", "CHE"])


def _graph(edges, directed=True, nodes=None):
    return LayerGraph.from_edges("g", REG, edges, directed=directed, nodes=nodes)


def test_per_capita_divides_by_origin_population():
    g = _graph([("AUT", "BEL", 10.0), ("BEL", "AUT", 10.0)])
    pop = PopulationTable.from_records([("AUT", 2010, 2), ("BEL", 2010, 5)])
    out = per_capita_normalize(g, pop)
    assert out.weight("AUT", "BEL") == pytest.approx(5.0)
    assert out.weight("BEL", "AUT") == pytest.approx(2.0)


def test_per_capita_undirected_uses_mean_rate():
    g = _graph([("AUT", "BEL", 10.0)], directed=False)
    pop = PopulationTable.from_records([("AUT", 2010, 2), ("BEL", 2010, 5)])
    out = per_capita_normalize(g, pop)
    want = 10.0 * (1 / 2 + 1 / 5) / 2
    assert out.weight("AUT", "BEL") == pytest.approx(want)
    assert out.weight("BEL", "AUT") == pytest.approx(want)


def test_per_capita_missing_population_lists_codes():
    g = _graph([("AUT", "BEL", 10.0), ("CHE", "BEL", 1.0)])
    pop = PopulationTable.from_records([("AUT", 2010, 2)])
    with pytest.raises(MissingPopulationError) as err:
        per_capita_normalize(g, pop)
    assert err.value.codes == ("CHE",)


def test_per_capita_drop_missing_removes_edges():
    g = _graph([("AUT", "BEL", 10.0), ("CHE", "BEL", 1.0)])
    pop = PopulationTable.from_records([("AUT", 2010, 2)])
    out = per_capita_normalize(g, pop, drop_missing=True)
    assert out.weight("AUT", "BEL") == pytest.approx(5.0)
    assert not out.has_edge("CHE", "BEL")
    assert out.nodes == g.nodes  # node set preserved


def test_rescale_max_hits_exactly_one():
    g = _graph([("AUT", "BEL", 10.0), ("BEL", "AUT", 4.0)])
    out = rescale_max(g)
    assert out.weight("AUT", "BEL") == 1.0
    assert out.weight("BEL", "AUT") == pytest.approx(0.4)


def test_rescale_max_idempotent():
    g = _graph([("AUT", "BEL", 10.0), ("BEL", "CHE", 4.0)])
    once = rescale_max(g)
    twice = rescale_max(once)
    assert {(i, j): w for i, j, w in once.edges()} == {
        (i, j): w for i, j, w in twice.edges()
    }


def test_rescale_max_empty_layer_degenerate():
    with pytest.raises(DegenerateGraphError):
        rescale_max(_graph([], nodes=["AUT"]))


def test_normalize_layer_passes_empty_layers_through(tmp_path):
    flows = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\npost,FRA,DEU,3\n"
    ))
    manifest = write(tmp_path, "manifest.json", json.dumps(
        {"post": {"directed": True}, "sm": {"directed": False}}
    ))
    result = parse_layers(flows, manifest=parse_manifest(manifest))
    empty = [s for s in result.layers if s.name == "sm"][0]
    g = normalize_layer(empty)
    assert g.edge_count == 0


# --- indicators file --------------------------------------------------------

def test_parse_indicators_empty_cell_is_null(tmp_path):
    p = write(tmp_path, "ind.csv", (
        "country,indicator,value\n"
        "FRA,GDP,100\n"
        "DEU,GDP,\n"
    ))
    table = parse_indicators(p)
    assert table.get("FRA", "GDP") == 100.0
    assert table.get("DEU", "GDP") is None


def test_parse_indicators_warns_on_unknown_name(tmp_path, caplog):
    p = write(tmp_path, "ind.csv", (
        "country,indicator,value\nFRA,WeirdIdx,3\n"
    ))
    with caplog.at_level("WARNING"):
        table = parse_indicators(p)
    assert table.get("FRA", "WeirdIdx") == 3.0
    assert any("WeirdIdx" in r.message for r in caplog.records)


# --- round trip -------------------------------------------------------------

def test_parse_serialize_parse_roundtrip(tmp_path):
    p = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume,year\n"
        "post,FRA,DEU,10.25,2010\n"
        "post,DEU,FRA,0.125,2010\n"
        "trade,BEL,FRA,7,2011\n"
    ))
    records, _ = parse_flow_records(p)
    out = tmp_path / "again.csv"
    write_layers_csv(out, records)
    records2, _ = parse_flow_records(out)
    assert sorted(records) == sorted(records2)


def test_load_multiplex_end_to_end(tmp_path):
    flows = write(tmp_path, "flows.csv", (
        "layer,origin,dest,volume\n"
        "post,FRA,DEU,10\n"
        "post,DEU,FRA,5\n"
        "sm,FRA,DEU,8\n"
    ))
    manifest = write(tmp_path, "manifest.json", json.dumps(
        {"post": {"directed": True}, "sm": {"directed": False}}
    ))
    pop = write(tmp_path, "pop.csv", (
        "country,year,population\nFRA,2010,10\nDEU,2010,5\n"
    ))
    mx, result = load_multiplex(flows, manifest, pop)
    assert mx.layer_names() == ("post", "sm")
    post = mx.layer("post")
    # 10/10 = 1.0 and 5/5 = 1.0 tie at the per-capita stage; max rescale
    # keeps both at exactly 1
    assert post.weight("FRA", "DEU") == 1.0
    assert post.weight("DEU", "FRA") == 1.0
    assert mx.layer("sm").weight("FRA", "DEU") == 1.0
    assert result.dropped_self_flows == 0
