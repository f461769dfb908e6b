"""Command-line pipeline: files in, reproducible report artifacts out.

    flowplex ingest      raw CSVs -> checksummed multiplex archive
    flowplex metrics     archive  -> per-layer descriptive metrics CSV
    flowplex compare     archive  -> pairwise layer comparison matrices
    flowplex correlate   archive + indicators -> rho/pvalue grids
    flowplex communities archive  -> Louvain assignments + modularity
    flowplex similarity  archive + indicators -> multiplexity distributions + KS
    flowplex synth       seeded gravity fixture files
    flowplex report      directory -> single JSON summary of artifacts

Exit codes: 0 success, 1 invalid input or usage, 2 internal error.
Every artifact is deterministic given (inputs, seed): no timestamps,
atomic writes, LF endings, and a ``.meta.json`` sidecar recording the
tool version, seed, and input checksums.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import graph
from ._version import __version__
from .artifacts import (
    multiplex_from_payload,
    multiplex_payload,
    read_archive,
    sha256_file,
    write_archive,
    write_csv,
    write_json,
    write_sidecar,
)
from .community import detect_communities, similarity_profile
from .errors import (
    DegenerateGraphError,
    UndefinedStatisticError,
    ValidationError,
)
from .indicators import correlate_with_indicators, degree_metric_matrix
from .ingest import load_multiplex, parse_indicators
from .multiplex import EQ4_MODES, compare_layers
from .synth import SynthConfig, generate, write_fixture

ARCHIVE_NAME = "multiplex.json"


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit 1 (validation), not 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="flowplex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="normalize raw flow CSVs into an archive")
    p.add_argument("--layers", required=True, help="layers CSV path")
    p.add_argument("--manifest", help="layer manifest JSON path")
    p.add_argument("--population", help="population CSV path")
    p.add_argument(
        "--drop-missing-population", action="store_true",
        help="drop edges whose origin has no population instead of failing",
    )
    p.add_argument("--out", required=True, help="output directory")

    for name, needs_indicators, needs_seed in (
        ("metrics", False, False),
        ("compare", False, False),
        ("correlate", True, False),
        ("communities", False, True),
        ("similarity", True, True),
    ):
        p = sub.add_parser(name, help=f"compute {name} from an archive")
        p.add_argument("--archive", required=True, help="multiplex archive path")
        if needs_indicators:
            p.add_argument("--indicators", required=True, help="indicators CSV path")
        if needs_seed:
            p.add_argument("--seed", type=int, default=0, help="Louvain seed")
            p.add_argument(
                "--resolution", type=float, default=1.0,
                help="Louvain resolution parameter",
            )
        if name == "correlate":
            p.add_argument(
                "--eq4-mode", choices=list(EQ4_MODES), default="wji",
                help="weighted global degree summand",
            )
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("synth", help="generate a seeded gravity fixture")
    p.add_argument("--n", type=int, help="number of countries")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--config", help="JSON file overriding generator defaults")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("report", help="summarize a directory of artifacts")
    p.add_argument("--out", required=True, help="directory holding artifacts")
    return parser


def _input_meta(**paths: str | None) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for name, path in paths.items():
        if path is None:
            continue
        out[name] = {"file": Path(path).name, "sha256": sha256_file(path)}
    return out


def cmd_ingest(args) -> int:
    mx, parsed = load_multiplex(
        args.layers,
        manifest_path=args.manifest,
        population_path=args.population,
        drop_missing_population=args.drop_missing_population,
    )
    outdir = Path(args.out)
    inputs = _input_meta(
        layers=args.layers, manifest=args.manifest, population=args.population
    )
    payload = {
        "kind": "multiplex",
        "inputs": inputs,
        "options": {
            "drop_missing_population": bool(args.drop_missing_population),
            "dropped_self_flows": parsed.dropped_self_flows,
        },
        **multiplex_payload(mx),
    }
    archive_path = outdir / ARCHIVE_NAME
    checksum = write_archive(archive_path, payload)
    write_sidecar(archive_path, command="ingest", seed=None, inputs=inputs)
    print(f"wrote {archive_path} (checksum {checksum[:12]}..., "
          f"{mx.m} layers, {mx.n} countries)")
    return 0


def _load_archive_multiplex(path: str):
    body = read_archive(path)
    if body.get("kind") != "multiplex":
        raise ValidationError(f"archive {path} does not hold a multiplex")
    return multiplex_from_payload(body), body


METRICS_COLUMNS = (
    "layer", "directed", "nodes", "edges", "density",
    "avg_out_degree", "assortativity", "clustering", "error",
)


def cmd_metrics(args) -> int:
    mx, body = _load_archive_multiplex(args.archive)
    rows = []
    for g in mx.layers:
        notes: list[str] = []

        def guard(fn):
            try:
                return fn(g)
            except (DegenerateGraphError, UndefinedStatisticError) as exc:
                notes.append(str(exc))
                return None

        rows.append([
            g.name,
            "directed" if g.directed else "undirected",
            len(g.nodes),
            g.edge_count,
            guard(graph.density),
            guard(graph.average_out_degree),
            guard(graph.degree_assortativity),
            guard(graph.average_clustering),
            "; ".join(notes) if notes else None,
        ])
    out = Path(args.out) / "metrics.csv"
    write_csv(out, METRICS_COLUMNS, rows)
    write_sidecar(out, command="metrics", seed=None,
                  archive_checksum=body["checksum"])
    print(f"wrote {out} ({len(rows)} layers)")
    return 0


def _write_matrix(path: Path, names: Sequence[str],
                  cells: dict[tuple[str, str], float | None]) -> None:
    rows = [[a] + [cells[(a, b)] for b in names] for a in names]
    write_csv(path, ["layer", *names], rows)


def cmd_compare(args) -> int:
    mx, body = _load_archive_multiplex(args.archive)
    matrices = compare_layers(mx.layers)
    names = mx.layer_names()
    outdir = Path(args.out)
    written = []
    for stat, cells in matrices.items():
        path = outdir / f"compare_{stat}.csv"
        _write_matrix(path, names, cells)
        write_sidecar(path, command="compare", seed=None,
                      archive_checksum=body["checksum"], statistic=stat)
        written.append(path.name)
    print(f"wrote {', '.join(written)} in {outdir}")
    return 0


def cmd_correlate(args) -> int:
    mx, body = _load_archive_multiplex(args.archive)
    table = parse_indicators(args.indicators)
    matrix = degree_metric_matrix(mx, eq4_mode=args.eq4_mode)
    grid = correlate_with_indicators(matrix, table)
    outdir = Path(args.out)
    meta = dict(
        command="correlate", seed=None, archive_checksum=body["checksum"],
        eq4_mode=args.eq4_mode,
        inputs=_input_meta(indicators=args.indicators),
    )
    for stem, extract in (
        ("rho", lambda c: None if c is None else c.rho),
        ("pvalue", lambda c: None if c is None else c.p_value),
    ):
        path = outdir / f"{stem}.csv"
        rows = [
            [row] + [extract(grid.cell(row, ind)) for ind in grid.indicators]
            for row in grid.rows
        ]
        write_csv(path, ["metric", *grid.indicators], rows)
        write_sidecar(path, **meta)
    print(f"wrote rho.csv, pvalue.csv in {outdir} "
          f"({len(grid.rows)} metrics x {len(grid.indicators)} indicators)")
    return 0


def cmd_communities(args) -> int:
    mx, body = _load_archive_multiplex(args.archive)
    assignments = detect_communities(mx, seed=args.seed, resolution=args.resolution)
    outdir = Path(args.out)
    meta = dict(command="communities", seed=args.seed,
                resolution=args.resolution, archive_checksum=body["checksum"])

    path = outdir / "communities.csv"
    rows = [
        [a.layer, code, community]
        for a in assignments
        for code, community in sorted(a.communities.items())
    ]
    write_csv(path, ["layer", "country", "community"], rows)
    write_sidecar(path, **meta)

    mod_path = outdir / "modularity.csv"
    write_csv(
        mod_path,
        ["layer", "modularity", "communities", "passes"],
        [
            [a.layer, a.modularity, a.community_count, len(a.pass_modularities)]
            for a in assignments
        ],
    )
    write_sidecar(mod_path, **meta)
    print(f"wrote {path.name}, {mod_path.name} in {outdir}")
    return 0


def cmd_similarity(args) -> int:
    mx, body = _load_archive_multiplex(args.archive)
    table = parse_indicators(args.indicators)
    assignments = detect_communities(mx, seed=args.seed, resolution=args.resolution)
    profile = similarity_profile(mx, assignments, table)
    outdir = Path(args.out)
    meta = dict(command="similarity", seed=args.seed,
                resolution=args.resolution, archive_checksum=body["checksum"],
                inputs=_input_meta(indicators=args.indicators))

    dist_path = outdir / "similarity_distributions.csv"
    rows = []
    for ind in sorted(profile.differences):
        for level in profile.levels:
            values = profile.differences[ind][level]
            if not values:
                rows.append([ind, level, 0, None, None, None, None, None])
                continue
            arr = np.array(values, dtype=float)
            q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
            rows.append([
                ind, level, len(values),
                float(arr.min()), float(q1), float(med), float(q3),
                float(arr.max()),
            ])
    write_csv(
        dist_path,
        ["indicator", "cm_level", "pair_count", "min", "q1", "median", "q3", "max"],
        rows,
    )
    write_sidecar(dist_path, **meta)

    ks_path = outdir / "similarity_ks.csv"
    ks_rows = []
    for ind in sorted(profile.ks):
        for (la, lb), res in sorted(profile.ks[ind].items()):
            ks_rows.append(
                [ind, la, lb, res.statistic, res.p_value, res.n1, res.n2]
            )
    write_csv(
        ks_path,
        ["indicator", "level_a", "level_b", "statistic", "p_value", "n_a", "n_b"],
        ks_rows,
    )
    write_sidecar(ks_path, **meta)
    print(f"wrote {dist_path.name}, {ks_path.name} in {outdir}")
    return 0


def cmd_synth(args) -> int:
    overrides: dict[str, Any] = {}
    if args.config:
        try:
            overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {args.config}: invalid JSON ({exc})")
        if not isinstance(overrides, dict):
            raise ValidationError(f"config {args.config}: must be a JSON object")
    if args.n is not None:
        overrides["n"] = args.n
    overrides["seed"] = args.seed
    config = SynthConfig.from_dict(overrides)
    result = generate(config)
    paths = write_fixture(result, args.out)
    meta_path = Path(args.out) / "synth.meta.json"
    write_json(meta_path, {
        "command": "synth",
        "tool_version": __version__,
        "seed": config.seed,
        "config": config.to_dict(),
        "files": {
            name: {"file": p.name, "sha256": sha256_file(p)}
            for name, p in sorted(paths.items())
        },
    })
    print(f"wrote fixture ({config.n} countries, {len(config.layers)} layers) "
          f"in {args.out}")
    return 0


def cmd_report(args) -> int:
    outdir = Path(args.out)
    if not outdir.is_dir():
        raise ValidationError(f"{outdir} is not a directory")
    artifacts: dict[str, Any] = {}
    for path in sorted(outdir.iterdir()):
        if not path.is_file() or path.name == "report.json":
            continue
        if path.name.endswith(".meta.json"):
            continue
        entry: dict[str, Any] = {"sha256": sha256_file(path)}
        sidecar = path.with_name(path.name + ".meta.json")
        if sidecar.exists():
            entry["meta"] = json.loads(sidecar.read_text(encoding="utf-8"))
        artifacts[path.name] = entry
    if not artifacts:
        raise ValidationError(f"no artifacts found in {outdir}")
    report_path = outdir / "report.json"
    write_json(report_path, {
        "tool_version": __version__,
        "artifact_count": len(artifacts),
        "artifacts": artifacts,
    })
    print(f"wrote {report_path} ({len(artifacts)} artifacts)")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "metrics": cmd_metrics,
    "compare": cmd_compare,
    "correlate": cmd_correlate,
    "communities": cmd_communities,
    "similarity": cmd_similarity,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"flowplex {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"flowplex {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 -- anything else is internal
        print(f"flowplex {args.command}: internal error: "
              f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
