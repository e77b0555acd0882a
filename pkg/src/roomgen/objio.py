"""Object-model ingestion and PLY export.

Input objects are ASCII XYZ (one "x y z" per line) or ASCII PLY files with at
least x/y/z vertex properties; extra properties are ignored. A catalog is a
directory of such files, optionally described by a manifest.json listing
path, id and category per entry.
"""
from __future__ import annotations

import colorsys
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidInput, TooFewPoints
from .geometry import as_points

CATALOG_MANIFEST = "manifest.json"


def _parse_xyz(path: Path, lines: list[str]) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) < 3:
            raise FormatError(path, lineno, f"expected 'x y z', got {stripped!r}")
        try:
            xyz = [float(parts[0]), float(parts[1]), float(parts[2])]
        except ValueError:
            raise FormatError(path, lineno, f"non-numeric coordinate in {stripped!r}") from None
        if not all(math.isfinite(v) for v in xyz):
            raise FormatError(path, lineno, "non-finite coordinate")
        rows.append(xyz)
    if not rows:
        raise FormatError(path, len(lines), "file contains no points")
    return np.array(rows, dtype=np.float64)


def _parse_ply(path: Path, lines: list[str]) -> np.ndarray:
    if not lines or lines[0].strip() != "ply":
        raise FormatError(path, 1, "missing 'ply' magic line")
    vertex_count = None
    xyz_cols: dict[str, int] = {}
    prop_index = 0
    in_vertex_element = False
    header_end = None
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.strip().split()
        if not tokens:
            continue
        if tokens[0] == "format":
            if len(tokens) < 2 or tokens[1] != "ascii":
                raise FormatError(path, lineno, "only ASCII PLY is supported")
        elif tokens[0] == "element":
            in_vertex_element = tokens[1] == "vertex"
            if in_vertex_element:
                vertex_count = int(tokens[2])
                prop_index = 0
        elif tokens[0] == "property" and in_vertex_element:
            name = tokens[-1]
            if name in ("x", "y", "z"):
                xyz_cols[name] = prop_index
            prop_index += 1
        elif tokens[0] == "end_header":
            header_end = lineno
            break
    if header_end is None:
        raise FormatError(path, len(lines), "unterminated PLY header")
    if vertex_count is None or len(xyz_cols) != 3:
        raise FormatError(path, header_end, "vertex element with x/y/z properties required")

    rows = np.empty((vertex_count, 3), dtype=np.float64)
    for i in range(vertex_count):
        lineno = header_end + 1 + i
        if lineno > len(lines):
            raise FormatError(path, len(lines), f"expected {vertex_count} vertices, file ended early")
        parts = lines[lineno - 1].split()
        try:
            rows[i] = [
                float(parts[xyz_cols["x"]]),
                float(parts[xyz_cols["y"]]),
                float(parts[xyz_cols["z"]]),
            ]
        except (IndexError, ValueError):
            raise FormatError(path, lineno, "malformed vertex line") from None
    if not np.isfinite(rows).all():
        raise FormatError(path, header_end, "non-finite vertex coordinate")
    return rows


def read_object(path, min_points: int = 1) -> np.ndarray:
    """Load one object cloud, order preserved; format chosen by content."""
    path = Path(path)
    if not path.exists():
        raise InvalidInput(f"object file not found: {path}")
    lines = path.read_text(encoding="utf-8", errors="replace").splitlines()
    is_ply = path.suffix.lower() == ".ply" or (lines and lines[0].strip() == "ply")
    points = _parse_ply(path, lines) if is_ply else _parse_xyz(path, lines)
    if points.shape[0] < min_points:
        raise TooFewPoints(f"{path}: {points.shape[0]} points, minimum is {min_points}")
    return points


@dataclass(frozen=True)
class CatalogEntry:
    path: Path
    object_id: int
    category: str | None = None


@dataclass
class ObjectCatalog:
    """A directory of object clouds, loaded eagerly for repeated sampling."""

    entries: list[CatalogEntry]
    clouds: list[np.ndarray]

    def __len__(self) -> int:
        return len(self.clouds)


def load_catalog(directory, min_points: int = 1) -> ObjectCatalog:
    """Read a catalog directory; manifest.json wins, else sorted file scan."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InvalidInput(f"catalog directory not found: {directory}")
    manifest = directory / CATALOG_MANIFEST
    entries: list[CatalogEntry] = []
    if manifest.exists():
        try:
            listed = json.loads(manifest.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(manifest, exc.lineno, f"invalid manifest: {exc.msg}") from exc
        for item in listed:
            entries.append(
                CatalogEntry(
                    path=directory / item["path"],
                    object_id=int(item["id"]),
                    category=item.get("category"),
                )
            )
    else:
        files = sorted(
            p for p in directory.iterdir() if p.suffix.lower() in (".xyz", ".ply")
        )
        entries = [CatalogEntry(path=p, object_id=i) for i, p in enumerate(files)]
    if not entries:
        raise InvalidInput(f"catalog {directory} lists no objects")
    clouds = [read_object(e.path, min_points=min_points) for e in entries]
    return ObjectCatalog(entries=entries, clouds=clouds)


def label_color(instance_id: int) -> tuple[int, int, int]:
    """Deterministic distinct color per instance id; confounders are gray."""
    if instance_id == 0:
        return (128, 128, 128)
    hue = (instance_id * 0.61803398875) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.7, 0.95)
    return (int(r * 255), int(g * 255), int(b * 255))


def export_ply(scene, path) -> None:
    """Write a scene as ASCII PLY, one deterministic color per instance."""
    points = as_points(scene.points)
    labels = np.asarray(scene.labels)
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("ply\n")
        fh.write("format ascii 1.0\n")
        fh.write(f"element vertex {points.shape[0]}\n")
        fh.write("property float x\n")
        fh.write("property float y\n")
        fh.write("property float z\n")
        fh.write("property uchar red\n")
        fh.write("property uchar green\n")
        fh.write("property uchar blue\n")
        fh.write("end_header\n")
        colors = {int(i): label_color(int(i)) for i in np.unique(labels)}
        for (x, y, z), label in zip(points, labels):
            r, g, b = colors[int(label)]
            fh.write(f"{x:.6f} {y:.6f} {z:.6f} {r} {g} {b}\n")
