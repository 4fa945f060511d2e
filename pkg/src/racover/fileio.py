"""File surface: polytope JSON, colouring text, summary records, the
certificate directory layout, content digests, and the per-run manifest.

Writers are deterministic: the same objects always produce byte-identical
files, so digests can stand in for semantic comparison.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

from .colouring import Colouring, ColouringError, PartialColouring
from .covers import (
    CoverComplex,
    CutReport,
    Volume,
    build_cover,
    cover_connected,
    cover_euler_characteristic,
    cover_orientable,
    cut_along,
    facet_preimage,
    volume,
)
from .pipeline import Certificate, ChainAssembly, CheckResult, GlueStep
from .polytopes import Polytope, PolytopeError


class FileFormatError(ValueError):
    """A file failed to parse or validate; messages carry file positions."""


# ---------------------------------------------------------------------------
# JSON plumbing

def _write_json(obj: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _read_json(path: Union[str, Path]) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise FileFormatError(f"{path}: expected a JSON object")
    return obj


def sha256_file(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# polytopes

_POLYTOPE_KEYS = {"format", "dimension", "facets", "adjacency", "vertices"}


def write_polytope(P: Polytope, path: Union[str, Path]) -> None:
    obj = {
        "format": "racover-polytope",
        "dimension": P.dimension,
        "facets": list(P.facet_labels),
        "adjacency": [list(e) for e in P.adjacency],
        "vertices": [list(v) for v in P.vertices],
    }
    _write_json(obj, path)


def load_polytope(path: Union[str, Path]) -> Polytope:
    obj = _read_json(path)
    if obj.get("format") != "racover-polytope":
        raise FileFormatError(f"{path}: not a polytope file")
    extra = set(obj) - _POLYTOPE_KEYS
    if extra:
        raise FileFormatError(f"{path}: unknown keys {sorted(extra)}")
    try:
        return Polytope(
            obj["dimension"],
            obj["facets"],
            [tuple(e) for e in obj["adjacency"]],
            [tuple(v) for v in obj["vertices"]],
        )
    except (KeyError, TypeError, PolytopeError) as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# colourings: first line "rank <s>", then one value per facet in index
# order, decimal bit-packed vectors, "-" for an unassigned facet

def write_colouring(
    c: Union[Colouring, PartialColouring], path: Union[str, Path]
) -> None:
    lines = [f"rank {c.rank}"]
    for v in c.colours:
        lines.append("-" if v is None else str(v))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_colouring(
    P: Polytope, path: Union[str, Path]
) -> Union[Colouring, PartialColouring]:
    rank: Optional[int] = None
    vals: List[Optional[int]] = []
    for ln, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), 1
    ):
        line = raw.strip()
        if not line:
            continue
        if rank is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "rank":
                raise FileFormatError(f"{path}:{ln}: expected 'rank <s>'")
            try:
                rank = int(parts[1])
            except ValueError:
                raise FileFormatError(f"{path}:{ln}: bad rank {parts[1]!r}") from None
            continue
        if line == "-":
            vals.append(None)
            continue
        try:
            vals.append(int(line))
        except ValueError:
            raise FileFormatError(f"{path}:{ln}: bad colour {line!r}") from None
    if rank is None:
        raise FileFormatError(f"{path}: missing 'rank <s>' header")
    if len(vals) != P.facet_count:
        raise FileFormatError(
            f"{path}: {len(vals)} colours for {P.facet_count} facets"
        )
    try:
        if any(v is None for v in vals):
            return PartialColouring(P, rank, tuple(vals))
        return Colouring(P, rank, tuple(vals))  # type: ignore[arg-type]
    except ColouringError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# summary records

def volume_record(vol: Volume) -> dict:
    pi2 = vol.pi2_multiple
    return {
        "cells": vol.cells,
        "cell_type": vol.cell_type,
        "exact": vol.exact,
        "pi2_multiple": None if pi2 is None else [pi2.numerator, pi2.denominator],
        "numeric": vol.numeric,
    }


def cover_summary(C: CoverComplex, preimages: bool = True) -> dict:
    rec = {
        "copies": C.copies,
        "cells": C.cells,
        "connected": cover_connected(C),
        "orientable": cover_orientable(C),
        "euler_characteristic": cover_euler_characteristic(C),
        "volume": volume_record(volume(C)),
    }
    # facets of a polygon cover are 1-dimensional, below what the complex
    # machinery models, so their preimages are not summarized
    if preimages and C.polytope.dimension >= 3:
        rec["facet_preimage_pieces"] = {
            label: sorted(len(c.pieces) for c in facet_preimage(C, f))
            for f, label in enumerate(C.polytope.facet_labels)
        }
    return rec


def cut_summary(cut: CutReport) -> dict:
    return {
        "facet": cut.facet,
        "ambient_copies": cut.ambient_copies,
        "ambient_cells": cut.ambient_cells,
        "ambient_orientable": cut.ambient_orientable,
        "boundary_components": cut.boundary_components,
        "boundary_cell_counts": list(cut.boundary_cell_counts),
        "boundary_orientable": list(cut.boundary_orientable),
        "one_sided": cut.one_sided,
        "ambient_volume": volume_record(cut.ambient_volume),
        "boundary_volume": volume_record(cut.boundary_volume),
        "ratio_exact": cut.ratio_exact,
        "ratio_numeric": cut.ratio_numeric,
    }


# ---------------------------------------------------------------------------
# certificates

_CERT_FILES = {
    "chain": "chain.json",
    "ambient": "ambient.json",
    "chain_colouring": "chain-colouring.txt",
    "ambient_colouring": "ambient-colouring.txt",
}


def write_certificate(cert: Certificate, outdir: Union[str, Path]) -> Path:
    """Write the certificate directory; returns the certificate.json path."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_polytope(cert.assembly.P, out / _CERT_FILES["chain"])
    write_polytope(cert.assembly.Q, out / _CERT_FILES["ambient"])
    write_colouring(cert.assembly.mu_P, out / _CERT_FILES["chain_colouring"])
    write_colouring(cert.assembly.lam_Q, out / _CERT_FILES["ambient_colouring"])
    refs = {
        key: {"path": name, "sha256": sha256_file(out / name)}
        for key, name in _CERT_FILES.items()
    }
    obj = {
        "format": "racover-certificate",
        "n": cert.n,
        "policy": cert.policy,
        "passed": cert.passed,
        "class": {
            "index": cert.class_index,
            "id": cert.class_id,
            "automorphisms": cert.automorphisms,
            "witness": list(cert.witness),
            "glue_facet": cert.glue_facet,
        },
        "glue_steps": [
            {"step": s.step, "dodeca_facet": s.dodeca_facet, "z_facet": s.z_facet}
            for s in cert.glue_steps
        ],
        "base_facet": cert.assembly.base_facet,
        "d_facet": cert.assembly.d_facet,
        "witness_facets": list(cert.assembly.witness_facets),
        "natural_map": list(cert.assembly.natural_map),
        "files": refs,
        "cover": cover_summary(cert.cover, preimages=False),
        "cut_locus": {
            "facet": cert.assembly.d_facet,
            "components": len(cert.components),
            "piece_counts": sorted(len(c.pieces) for c in cert.components),
        },
        "cut": cut_summary(cert.cut),
        "volumes": [
            {"part": "ambient", **volume_record(cert.cut.ambient_volume)},
            {"part": "boundary", **volume_record(cert.cut.boundary_volume)},
            {
                "part": "ratio",
                "exact": cert.cut.ratio_exact,
                "numeric": cert.cut.ratio_numeric,
            },
        ],
        "checks": [
            {"name": c.name, "passed": c.passed, "detail": c.detail}
            for c in cert.checks
        ],
        "notes": list(cert.notes),
    }
    path = out / "certificate.json"
    _write_json(obj, path)
    return path


def load_certificate(path: Union[str, Path]) -> Certificate:
    """Rebuild a Certificate from certificate.json and its referenced files.

    Referenced files must match their recorded digests; the cover, cut
    locus and cut report are rebuilt from the loaded chains so that
    `validate_certificate` exercises the stored data, not cached results.
    """
    path = Path(path)
    obj = _read_json(path)
    if obj.get("format") != "racover-certificate":
        raise FileFormatError(f"{path}: not a certificate file")
    base = path.parent
    try:
        refs = obj["files"]
        for ref in refs.values():
            actual = sha256_file(base / ref["path"])
            if actual != ref["sha256"]:
                raise FileFormatError(
                    f"{base / ref['path']}: digest {actual} differs from the certificate"
                )
        P = load_polytope(base / refs["chain"]["path"])
        Q = load_polytope(base / refs["ambient"]["path"])
        mu = load_colouring(P, base / refs["chain_colouring"]["path"])
        lam = load_colouring(Q, base / refs["ambient_colouring"]["path"])
        if isinstance(mu, PartialColouring) or isinstance(lam, PartialColouring):
            raise FileFormatError(f"{path}: certificate colourings must be total")
        n = obj["n"]
        assembly = ChainAssembly(
            n,
            P,
            mu,
            Q,
            lam,
            obj["d_facet"],
            tuple(obj["witness_facets"]),
            tuple(GlueStep(**s) for s in obj["glue_steps"]),
            tuple(obj["natural_map"]),
            obj["base_facet"],
        )
        cover = build_cover(Q, lam, cells_per_copy=n)
        components = facet_preimage(cover, obj["d_facet"])
        cut = cut_along(cover, components[0])
        cls = obj["class"]
        checks = tuple(
            CheckResult(c["name"], c["passed"], c["detail"]) for c in obj["checks"]
        )
        return Certificate(
            n,
            obj["policy"],
            cls["index"],
            cls["id"],
            cls["automorphisms"],
            tuple(cls["witness"]),
            cls["glue_facet"],
            assembly.glue_steps,
            assembly,
            cover,
            tuple(components),
            cut,
            checks,
            tuple(obj["notes"]),
        )
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"{path}: malformed certificate ({exc})") from exc


# ---------------------------------------------------------------------------
# run manifests

@dataclass(frozen=True)
class RunManifest:
    """Provenance of one CLI run.  Output files themselves are
    deterministic; wall time and other variability live only here."""

    command: str
    arguments: List[str]
    input_digests: Dict[str, str]
    tool_version: str
    wall_time_seconds: float
    result_digest: Optional[str]


def write_manifest(m: RunManifest, path: Union[str, Path]) -> None:
    _write_json(
        {
            "format": "racover-run",
            "command": m.command,
            "arguments": list(m.arguments),
            "input_digests": dict(sorted(m.input_digests.items())),
            "tool_version": m.tool_version,
            "wall_time_seconds": m.wall_time_seconds,
            "result_digest": m.result_digest,
        },
        path,
    )
