"""
MNIST IDX containers.

    images: >u4 0x00000803  >u4 count  >u4 rows  >u4 cols  u8[count·rows·cols]
    labels: >u4 0x00000801  >u4 count  u8[count]

Files ending in ``.gz`` are decompressed transparently. Pixels map from
[0, 255] to [−1, 1] via x = 2·(v/255) − 1.
"""
from __future__ import annotations

import gzip
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np

from scdcnn.core.errors import FormatError, ParseError, ScRangeError

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class Image:
    pixels: np.ndarray
    label: Optional[int] = None

    def __post_init__(self) -> None:
        pixels = np.array(self.pixels, dtype=np.float64, copy=True)
        if pixels.ndim != 2:
            raise ScRangeError(f"image pixels must be 2-D, got shape {pixels.shape}")
        if pixels.size and (pixels.min() < -1.0 or pixels.max() > 1.0):
            raise ScRangeError("image pixels must lie in [-1, 1]")
        if self.label is not None and not 0 <= self.label <= 9:
            raise ScRangeError(f"label must lie in 0..9, got {self.label}")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape  # type: ignore[return-value]


@dataclass(frozen=True)
class Dataset:
    images: tuple[Image, ...]

    def __len__(self) -> int:
        return len(self.images)

    def __iter__(self) -> Iterator[Image]:
        return iter(self.images)

    def __getitem__(self, index: int) -> Image:
        return self.images[index]

    def head(self, limit: Optional[int]) -> "Dataset":
        return self if limit is None else Dataset(self.images[:limit])


def pixels_to_bipolar(raw: np.ndarray) -> np.ndarray:
    return 2.0 * (raw.astype(np.float64) / 255.0) - 1.0


def _read(path: PathLike) -> bytes:
    source = Path(path)
    try:
        if source.suffix == ".gz":
            with gzip.open(source, "rb") as handle:
                return handle.read()
        return source.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read IDX file {source}: {exc.strerror or exc}") from exc


def parse_idx(data: bytes, path: Optional[str] = None) -> np.ndarray:
    """Raw uint8 payload: (count, rows, cols) for image files, (count,) for label files."""
    if len(data) < 8:
        raise ParseError(f"truncated header ({len(data)} bytes)", 0, path)
    magic, count = struct.unpack(">II", data[:8])
    if magic == IMAGE_MAGIC:
        if len(data) < 16:
            raise ParseError("truncated image header", 8, path)
        rows, cols = struct.unpack(">II", data[8:16])
        shape: tuple[int, ...] = (count, rows, cols)
        offset = 16
    elif magic == LABEL_MAGIC:
        shape = (count,)
        offset = 8
    else:
        raise ParseError(f"bad magic 0x{magic:08x}", 0, path)
    expected = int(np.prod(shape))
    payload = len(data) - offset
    if payload < expected:
        raise ParseError(f"truncated payload: {expected} bytes declared, {payload} present", len(data), path)
    if payload > expected:
        raise FormatError(f"{path or 'IDX data'}: {payload - expected} trailing bytes after the payload")
    return np.frombuffer(data, dtype=np.uint8, count=expected, offset=offset).reshape(shape)


def read_idx(path: PathLike) -> np.ndarray:
    return parse_idx(_read(path), str(path))


def load_idx(images_path: PathLike, labels_path: Optional[PathLike] = None) -> Dataset:
    raw = read_idx(images_path)
    if raw.ndim != 3:
        raise FormatError(f"{images_path}: not an image file")
    labels: list[Optional[int]] = [None] * raw.shape[0]
    if labels_path is not None:
        label_raw = read_idx(labels_path)
        if label_raw.ndim != 1:
            raise FormatError(f"{labels_path}: not a label file")
        if label_raw.shape[0] != raw.shape[0]:
            raise FormatError(
                f"{raw.shape[0]} images in {images_path} but {label_raw.shape[0]} labels in {labels_path}"
            )
        if label_raw.size and label_raw.max() > 9:
            raise FormatError(f"{labels_path}: label {int(label_raw.max())} outside 0..9")
        labels = [int(v) for v in label_raw]
    pixels = pixels_to_bipolar(raw)
    logger.info("[IDX] %d images of %dx%d from %s", raw.shape[0], raw.shape[1], raw.shape[2], images_path)
    return Dataset(tuple(Image(p, label) for p, label in zip(pixels, labels)))


_SPLITS = {
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
}


def load_mnist(directory: PathLike, split: str = "test") -> Dataset:
    """Pair the standard MNIST file names (plain or .gz) found in ``directory``."""
    if split not in _SPLITS:
        raise FormatError(f"unknown split {split!r}")
    root = Path(directory)
    found = []
    for name in _SPLITS[split]:
        candidates = [root / name, root / f"{name}.gz", root / name.replace("-idx", ".idx")]
        match = next((c for c in candidates if c.exists()), None)
        if match is None:
            raise FileNotFoundError(f"MNIST file {name} not found in {root}")
        found.append(match)
    return load_idx(found[0], found[1])


__all__ = [
    "IMAGE_MAGIC",
    "LABEL_MAGIC",
    "Image",
    "Dataset",
    "pixels_to_bipolar",
    "parse_idx",
    "read_idx",
    "load_idx",
    "load_mnist",
]
