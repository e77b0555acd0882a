"""Bit-exact binary container for generated scene pairs.

Layout, all little-endian:

    magic   8 bytes  "RROOMS01"
    header  u32 format version, u32 pair count, u32 point budget, u64 base seed
    pair    u32 pair index
            room A, room B:
                u32 point count (== point budget)
                u32 a_cells, u32 b_cells
                u64 child seed
                point count * 3 float32  (x, y, z)
                point count * u32        labels
            u32 shared-id count, then that many u32 ids
    trailer u32 metadata byte length, UTF-8 metadata (the effective config)

Points are stored as 32-bit reals; the write-read round trip is the identity
at that precision.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assembly import RoomScene, ScenePair
from .errors import CorruptContainer, InvalidInput, WrongFormat
from .layout import RoomDims

MAGIC = b"RROOMS01"
VERSION = 1
_HEADER = struct.Struct("<III Q")
_ROOM_HEADER = struct.Struct("<III Q")
_U32 = struct.Struct("<I")


@dataclass
class ContainerData:
    """Parsed container: pairs plus the header and metadata that framed them."""

    version: int
    base_seed: int
    point_budget: int
    config_text: str
    pairs: list[ScenePair]


def _room_bytes(room: RoomScene, budget: int) -> bytes:
    if room.points.shape[0] != budget:
        raise InvalidInput(
            f"room has {room.points.shape[0]} points, container budget is {budget}"
        )
    chunks = [
        _ROOM_HEADER.pack(budget, room.dims.a_cells, room.dims.b_cells, room.seed),
        np.ascontiguousarray(room.points, dtype="<f4").tobytes(),
        np.ascontiguousarray(room.labels, dtype="<u4").tobytes(),
    ]
    return b"".join(chunks)


def write_scene_container(
    pairs: list[ScenePair],
    path,
    *,
    base_seed: int = 0,
    config_text: str = "",
) -> int:
    """Serialize pairs to disk; returns the byte count written."""
    if not pairs:
        raise InvalidInput("cannot write an empty container")
    budget = pairs[0].room_a.points.shape[0]
    chunks = [MAGIC, _HEADER.pack(VERSION, len(pairs), budget, base_seed)]
    for pair in pairs:
        chunks.append(_U32.pack(pair.pair_index))
        chunks.append(_room_bytes(pair.room_a, budget))
        chunks.append(_room_bytes(pair.room_b, budget))
        chunks.append(_U32.pack(len(pair.shared_ids)))
        if pair.shared_ids:
            chunks.append(np.asarray(pair.shared_ids, dtype="<u4").tobytes())
    meta = config_text.encode("utf-8")
    chunks.append(_U32.pack(len(meta)))
    chunks.append(meta)
    blob = b"".join(chunks)
    Path(path).write_bytes(blob)
    return len(blob)


class _Cursor:
    def __init__(self, data: bytes, path):
        self.data = data
        self.path = path
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise CorruptContainer(
                self.path, self.offset, f"need {size} bytes, file has {len(self.data) - self.offset} left"
            )
        out = self.data[self.offset : self.offset + size]
        self.offset += size
        return out

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]

    def array(self, dtype: str, count: int) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(itemsize * count), dtype=dtype).copy()


def _read_room(cur: _Cursor, budget: int) -> RoomScene:
    at = cur.offset
    count, a_cells, b_cells, child_seed = _ROOM_HEADER.unpack(cur.take(_ROOM_HEADER.size))
    if count != budget:
        raise CorruptContainer(
            cur.path, at, f"room has {count} points but the container budget is {budget}"
        )
    points = cur.array("<f4", count * 3).astype(np.float64).reshape(count, 3)
    labels = cur.array("<u4", count).astype(np.int64)
    dims = RoomDims(a_cells=a_cells, b_cells=b_cells)
    return RoomScene(points=points, labels=labels, dims=dims, seed=int(child_seed))


def read_scene_container(path) -> ContainerData:
    """Parse and validate a container written by write_scene_container."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise WrongFormat(f"{path}: not a scene container (bad magic)")
    cur = _Cursor(data, path)
    cur.offset = len(MAGIC)
    version, pair_count, budget, base_seed = _HEADER.unpack(cur.take(_HEADER.size))
    if version != VERSION:
        raise WrongFormat(f"{path}: unsupported container version {version}")

    pairs = []
    for _ in range(pair_count):
        at = cur.offset
        pair_index = cur.u32()
        room_a = _read_room(cur, budget)
        room_b = _read_room(cur, budget)
        shared = cur.array("<u4", cur.u32()).astype(int).tolist()
        ids_a = set(room_a.instance_ids().tolist())
        ids_b = set(room_b.instance_ids().tolist())
        for instance_id in shared:
            if instance_id == 0 or instance_id not in ids_a or instance_id not in ids_b:
                raise CorruptContainer(
                    path, at, f"shared id {instance_id} missing from a room's labels"
                )
        pairs.append(
            ScenePair(room_a=room_a, room_b=room_b, shared_ids=shared, pair_index=pair_index)
        )

    meta_len = cur.u32()
    config_text = cur.take(meta_len).decode("utf-8")
    if cur.offset != len(data):
        raise CorruptContainer(path, cur.offset, "trailing bytes after metadata block")
    return ContainerData(
        version=version,
        base_seed=base_seed,
        point_budget=budget,
        config_text=config_text,
        pairs=pairs,
    )
