"""
storage/weight_store.py — Low-precision weights grouped into filter blocks.

A weight x ∈ [−1, 1] is stored as the w-bit code Int(((x+1)/2)·2^w); x=+1
would need code 2^w and is clamped to 2^w − 1. Every filter of a layer is one
block: all receptive-field positions of its feature map read the same codes.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from scdcnn.core.errors import ScRangeError, ShapeMismatchError

if TYPE_CHECKING:
    from scdcnn.network.spec import NetworkSpec

logger = logging.getLogger(__name__)

MIN_PRECISION = 1
MAX_PRECISION = 64


def _check_precision(w: int) -> None:
    if not MIN_PRECISION <= w <= MAX_PRECISION:
        raise ScRangeError(f"weight precision must lie in [{MIN_PRECISION}, {MAX_PRECISION}], got {w}")


@dataclass(frozen=True)
class QuantizedWeight:
    code: int
    w: int

    def __post_init__(self) -> None:
        _check_precision(self.w)
        if not 0 <= self.code < (1 << self.w):
            raise ScRangeError(f"code {self.code} does not fit in {self.w} bits")


def quantize(x: float, w: int) -> QuantizedWeight:
    _check_precision(w)
    if not -1.0 <= x <= 1.0:
        raise ScRangeError(f"weight {x!r} outside [-1, 1]")
    code = math.floor(math.ldexp((x + 1.0) / 2.0, w))
    return QuantizedWeight(min(code, (1 << w) - 1), w)


def dequantize(q: QuantizedWeight) -> float:
    return 2.0 * (q.code / (1 << q.w)) - 1.0


def quantize_array(values: np.ndarray, w: int) -> np.ndarray:
    """Codes (uint64) of an array of weights; same mapping as ``quantize``."""
    _check_precision(w)
    x = np.asarray(values, dtype=np.float64)
    if x.size and (x.min() < -1.0 or x.max() > 1.0):
        raise ScRangeError(f"weights outside [-1, 1]: [{x.min()}, {x.max()}]")
    scaled = np.floor(np.ldexp((x + 1.0) / 2.0, w))
    full = scaled >= math.ldexp(1.0, w)
    codes = np.where(full, 0.0, scaled).astype(np.uint64)
    codes[full] = np.uint64((1 << w) - 1)
    return codes


def dequantize_array(codes: np.ndarray, w: int) -> np.ndarray:
    _check_precision(w)
    return 2.0 * np.ldexp(np.asarray(codes, dtype=np.uint64).astype(np.float64), -w) - 1.0


# ── Filter blocks ──────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class FilterBlock:
    filter_id: int
    shape: tuple[int, int, int]
    precision: int
    codes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        _check_precision(self.precision)
        codes = np.array(self.codes, dtype=np.uint64, copy=True).reshape(-1)
        values = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if codes.size != math.prod(self.shape) or values.size != codes.size:
            raise ScRangeError(
                f"filter {self.filter_id}: {codes.size} codes / {values.size} values for shape {self.shape}"
            )
        if self.precision < MAX_PRECISION and codes.size and int(codes.max()) >> self.precision:
            raise ScRangeError(f"filter {self.filter_id}: a code does not fit in {self.precision} bits")
        codes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, filter_id: int, shape: tuple[int, int, int], values: np.ndarray, w: int) -> "FilterBlock":
        return cls(filter_id, shape, w, quantize_array(values, w), values)

    @classmethod
    def from_codes(cls, filter_id: int, shape: tuple[int, int, int], codes: np.ndarray, w: int) -> "FilterBlock":
        """Loaded blocks keep their dequantized weights as the real values."""
        return cls(filter_id, shape, w, codes, dequantize_array(codes, w))

    def dequantized(self) -> np.ndarray:
        return dequantize_array(self.codes, self.precision).reshape(self.shape)

    def quantized(self) -> list[QuantizedWeight]:
        return [QuantizedWeight(int(c), self.precision) for c in self.codes]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FilterBlock):
            return NotImplemented
        return (
            self.filter_id == other.filter_id
            and self.shape == other.shape
            and self.precision == other.precision
            and np.array_equal(self.codes, other.codes)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class LayerWeights:
    precision: int
    filters: tuple[FilterBlock, ...]

    def __post_init__(self) -> None:
        _check_precision(self.precision)
        if not self.filters:
            raise ScRangeError("a layer needs at least one filter block")
        shape = self.filters[0].shape
        for block in self.filters:
            if block.precision != self.precision:
                raise ScRangeError(
                    f"filter {block.filter_id} has precision {block.precision}, layer has {self.precision}"
                )
            if block.shape != shape:
                raise ScRangeError(f"filter {block.filter_id} has shape {block.shape}, expected {shape}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.filters[0].shape

    def matrix(self) -> np.ndarray:
        """(filters, fan-in) dequantized weights."""
        return np.stack([b.dequantized().reshape(-1) for b in self.filters])

    def requantized(self, w: int) -> "LayerWeights":
        if w == self.precision:
            return self
        blocks = tuple(FilterBlock.from_values(b.filter_id, b.shape, b.values, w) for b in self.filters)
        return LayerWeights(w, blocks)


@dataclass(frozen=True)
class WeightSet:
    layers: tuple[LayerWeights, ...]

    @property
    def precisions(self) -> list[int]:
        return [layer.precision for layer in self.layers]

    def check_against(self, spec: "NetworkSpec") -> None:
        expected = spec.weight_shapes()
        if len(expected) != len(self.layers):
            raise ShapeMismatchError(len(self.layers), "layer count", len(expected), len(self.layers))
        for index, ((filters, shape), layer) in enumerate(zip(expected, self.layers)):
            if len(layer.filters) != filters:
                raise ShapeMismatchError(index, "filter count", filters, len(layer.filters))
            if layer.shape != shape:
                raise ShapeMismatchError(index, "filter shape", shape, layer.shape)


def apply_layer_precisions(ws: WeightSet, precisions: Sequence[int]) -> WeightSet:
    if len(precisions) != len(ws.layers):
        raise ScRangeError(f"{len(precisions)} precisions for {len(ws.layers)} layers")
    for w in precisions:
        _check_precision(w)
    return WeightSet(tuple(layer.requantized(w) for layer, w in zip(ws.layers, precisions)))


def random_weight_set(spec: "NetworkSpec", precisions: Sequence[int], seed: int = 0) -> WeightSet:
    """Uniform random weights in [−1, 1], quantized per layer."""
    shapes = spec.weight_shapes()
    if len(precisions) != len(shapes):
        raise ScRangeError(f"{len(precisions)} precisions for {len(shapes)} layers")
    rng = np.random.default_rng(seed)
    layers = []
    for (filters, shape), w in zip(shapes, precisions):
        blocks = tuple(
            FilterBlock.from_values(f, shape, rng.uniform(-1.0, 1.0, math.prod(shape)), w) for f in range(filters)
        )
        layers.append(LayerWeights(w, blocks))
    logger.debug("[WEIGHTS] random weight set seed=%d precisions=%s", seed, list(precisions))
    return WeightSet(tuple(layers))


__all__ = [
    "MIN_PRECISION",
    "MAX_PRECISION",
    "QuantizedWeight",
    "quantize",
    "dequantize",
    "quantize_array",
    "dequantize_array",
    "FilterBlock",
    "LayerWeights",
    "WeightSet",
    "apply_layer_precisions",
    "random_weight_set",
]
