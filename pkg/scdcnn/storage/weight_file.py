"""
storage/weight_file.py — SCDW weight files.

Layout (little-endian):

    "SCDW"  u16 version  u16 layer count
    per layer:
        u8 precision w   u32 filter count   u32 height  u32 width  u32 channels
        per filter: its codes, w bits each, packed LSB-first into u64 words
                    (the last word zero-padded)
"""
from __future__ import annotations

import logging
import math
import struct
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Union

import numpy as np

from scdcnn.core.errors import FormatError, ParseError, ScRangeError, ShapeMismatchError
from scdcnn.storage.weight_store import (
    MAX_PRECISION,
    MIN_PRECISION,
    FilterBlock,
    LayerWeights,
    WeightSet,
)

if TYPE_CHECKING:
    from scdcnn.network.spec import NetworkSpec

logger = logging.getLogger(__name__)

MAGIC = b"SCDW"
VERSION = 1
_HEADER = struct.Struct("<4sHH")
_LAYER = struct.Struct("<BIIII")

PathLike = Union[str, Path]


def _words_for(count: int, w: int) -> int:
    return math.ceil(count * w / 64)


def pack_codes(codes: np.ndarray, w: int) -> bytes:
    codes = np.asarray(codes, dtype=np.uint64)
    shifts = np.arange(w, dtype=np.uint64)
    bits = ((codes[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).reshape(-1)
    padded = np.zeros(_words_for(codes.size, w) * 64, dtype=np.uint8)
    padded[: bits.size] = bits
    return np.packbits(padded, bitorder="little").tobytes()


def unpack_codes(payload: bytes, count: int, w: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    bits = bits[: count * w].reshape(count, w).astype(np.uint64)
    return np.bitwise_or.reduce(bits << np.arange(w, dtype=np.uint64), axis=1)


def dump_weights(ws: WeightSet) -> bytes:
    parts = [_HEADER.pack(MAGIC, VERSION, len(ws.layers))]
    for layer in ws.layers:
        parts.append(_LAYER.pack(layer.precision, len(layer.filters), *layer.shape))
        for block in layer.filters:
            parts.append(pack_codes(block.codes, layer.precision))
    return b"".join(parts)


def save_weights(ws: WeightSet, path: PathLike) -> None:
    target = Path(path)
    try:
        target.write_bytes(dump_weights(ws))
    except OSError as exc:
        raise OSError(f"cannot write weight file {target}: {exc.strerror or exc}") from exc
    logger.info("[WEIGHTS] saved %d layers (precisions %s) to %s", len(ws.layers), ws.precisions, target)


class _Reader:
    def __init__(self, data: bytes, path: Optional[str]) -> None:
        self.data = data
        self.offset = 0
        self.path = path

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.data):
            raise ParseError(
                f"truncated {what}: need {size} bytes, {len(self.data) - self.offset} left",
                self.offset,
                self.path,
            )
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, layout: struct.Struct, what: str) -> tuple:
        return layout.unpack(self.take(layout.size, what))


def parse_weights(data: bytes, path: Optional[str] = None) -> WeightSet:
    reader = _Reader(data, path)
    magic, version, layer_count = reader.unpack(_HEADER, "header")
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}, expected {MAGIC!r}", 0, path)
    if version != VERSION:
        raise ParseError(f"unsupported version {version}", 4, path)

    layers = []
    for index in range(layer_count):
        start = reader.offset
        w, filters, *shape = reader.unpack(_LAYER, f"layer {index} header")
        if not MIN_PRECISION <= w <= MAX_PRECISION:
            raise ParseError(f"layer {index}: precision {w} outside [1, 64]", start, path)
        if filters == 0 or 0 in shape:
            raise FormatError(f"layer {index}: header declares {filters} filters of shape {tuple(shape)}")
        count = math.prod(shape)
        size = _words_for(count, w) * 8
        blocks = []
        for f in range(filters):
            payload = reader.take(size, f"layer {index} filter {f} codes")
            codes = unpack_codes(payload, count, w)
            blocks.append(FilterBlock.from_codes(f, tuple(shape), codes, w))
        layers.append(LayerWeights(w, tuple(blocks)))

    if reader.offset != len(data):
        raise FormatError(f"{len(data) - reader.offset} trailing bytes after layer {layer_count - 1}")
    return WeightSet(tuple(layers))


def load_weights(path: PathLike, expected: Optional["NetworkSpec"] = None) -> WeightSet:
    source = Path(path)
    try:
        data = source.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read weight file {source}: {exc.strerror or exc}") from exc
    ws = parse_weights(data, str(source))
    if expected is not None:
        try:
            ws.check_against(expected)
        except (ShapeMismatchError, ScRangeError) as exc:
            raise FormatError(f"{source}: {exc}") from exc
    logger.info("[WEIGHTS] loaded %d layers (precisions %s) from %s", len(ws.layers), ws.precisions, source)
    return ws


__all__ = [
    "MAGIC",
    "VERSION",
    "pack_codes",
    "unpack_codes",
    "dump_weights",
    "save_weights",
    "parse_weights",
    "load_weights",
]
