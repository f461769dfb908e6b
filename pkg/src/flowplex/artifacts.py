"""Deterministic artifact IO: atomic writes, checksums, archive format.

Every file this package writes is reproducible byte for byte: no
timestamps, sorted keys, canonical float repr, LF line endings. Writes
go through a temp file in the target directory followed by an atomic
rename, so readers never observe partial files.

The multiplex archive is a single JSON document with a sha256 checksum
of its own canonical payload, letting downstream commands verify they
read exactly what ingestion wrote. Each artifact may carry a sidecar
``<name>.meta.json`` recording tool version, seed, options, and the
artifact's checksum; the sidecar keeps the artifact itself clean (CSV
files stay plain RFC 4180 with a single header row).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from ._version import __version__
from .errors import ValidationError
from .graph import LayerGraph
from .multiplex import Multiplex
from .registry import NodeRegistry

ARCHIVE_FORMAT = "flowplex-archive"
ARCHIVE_VERSION = 1


def canonical_json(obj: Any) -> str:
    # allow_nan=False: NaN/inf would serialize to non-JSON tokens and
    # poison the checksum
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"),
        ensure_ascii=False, allow_nan=False,
    )


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write UTF-8 text (LF endings preserved) via temp file + rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def format_cell(value: Any) -> str:
    """Canonical text for one CSV cell; None means an empty cell."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(
    path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    """RFC 4180 CSV, UTF-8, LF line endings, minimal quoting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    atomic_write_text(path, buf.getvalue())


def write_json(path: str | Path, obj: Any) -> None:
    atomic_write_text(
        path, json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    )


def write_sidecar(path: str | Path, **fields: Any) -> Path:
    """Write ``<path>.meta.json`` describing an artifact just written.

    Always records the tool version and the artifact's own sha256 so a
    rerun can be compared checksum-to-checksum.
    """
    path = Path(path)
    meta = {
        "artifact": path.name,
        "artifact_sha256": sha256_file(path),
        "tool_version": __version__,
    }
    meta.update(fields)
    sidecar = path.with_name(path.name + ".meta.json")
    write_json(sidecar, meta)
    return sidecar


def _layer_payload(g: LayerGraph) -> dict[str, Any]:
    reg = g.registry
    if g.directed:
        edges = sorted(
            [reg.code(i), reg.code(j), w] for i, j, w in g.edges()
        )
    else:
        # one row per unordered pair; reconstruction re-symmetrizes
        edges = sorted(
            [reg.code(i), reg.code(j), w] for i, j, w in g.edges() if i < j
        )
    return {
        "name": g.name,
        "directed": g.directed,
        "nodes": sorted(reg.code(i) for i in g.nodes),
        "edges": edges,
    }


def multiplex_payload(mx: Multiplex) -> dict[str, Any]:
    return {
        "registry": list(mx.registry.codes),
        "layers": [_layer_payload(g) for g in mx.layers],
    }


def multiplex_from_payload(payload: Mapping[str, Any]) -> Multiplex:
    registry = NodeRegistry(payload["registry"])
    layers = []
    for entry in payload["layers"]:
        layers.append(
            LayerGraph.from_edges(
                entry["name"],
                registry,
                [(o, d, float(w)) for o, d, w in entry["edges"]],
                directed=bool(entry["directed"]),
                nodes=list(entry["nodes"]),
            )
        )
    return Multiplex(layers)


def write_archive(path: str | Path, payload: Mapping[str, Any]) -> str:
    """Write a checksummed JSON archive; returns the checksum."""
    body = {
        "format": ARCHIVE_FORMAT,
        "format_version": ARCHIVE_VERSION,
        "tool_version": __version__,
        **payload,
    }
    if "checksum" in body:
        raise ValidationError("archive payload must not preset 'checksum'")
    checksum = sha256_text(canonical_json(body))
    body["checksum"] = checksum
    atomic_write_text(
        path, json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    )
    return checksum


def read_archive(path: str | Path) -> dict[str, Any]:
    """Read and checksum-verify an archive written by :func:`write_archive`."""
    try:
        body = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"archive {path}: invalid JSON ({exc})") from None
    if not isinstance(body, dict) or body.get("format") != ARCHIVE_FORMAT:
        raise ValidationError(f"archive {path}: not a {ARCHIVE_FORMAT} file")
    if body.get("format_version") != ARCHIVE_VERSION:
        raise ValidationError(
            f"archive {path}: unsupported format version {body.get('format_version')!r}"
        )
    stated = body.pop("checksum", None)
    actual = sha256_text(canonical_json(body))
    if stated != actual:
        raise ValidationError(
            f"archive {path}: checksum mismatch (stated {stated}, actual {actual})"
        )
    body["checksum"] = stated
    return body
