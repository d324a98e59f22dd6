"""
Immutable stream values and their decoders.

BitStream        unipolar/bipolar stochastic number
TwoLineStream    magnitude + sign pair for non-scaled signed arithmetic
BinaryStream     per-cycle counts emitted by a parallel counter
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from scdcnn.core.errors import ContractError, ScRangeError
from scdcnn.core.models import Encoding

_ENCODINGS = ("unipolar", "bipolar")


def _frozen_bits(values: object, name: str) -> np.ndarray:
    bits = np.array(values, dtype=np.uint8, copy=True)
    if bits.ndim != 1 or bits.size == 0:
        raise ContractError(f"{name} must be a non-empty 1-D bit sequence, got shape {bits.shape}")
    if bits.max() > 1:
        raise ContractError(f"{name} holds values other than 0 and 1")
    bits.setflags(write=False)
    return bits


@dataclass(frozen=True, eq=False)
class BitStream:
    bits: np.ndarray
    encoding: Encoding = "bipolar"

    def __post_init__(self) -> None:
        if self.encoding not in _ENCODINGS:
            raise ContractError(f"unknown encoding {self.encoding!r}")
        object.__setattr__(self, "bits", _frozen_bits(self.bits, "bits"))

    @classmethod
    def from_string(cls, text: str, encoding: Encoding = "bipolar") -> "BitStream":
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"), encoding)

    @property
    def length(self) -> int:
        return int(self.bits.size)

    @property
    def ones(self) -> int:
        return int(self.bits.sum(dtype=np.int64))

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return self.encoding == other.encoding and np.array_equal(self.bits, other.bits)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        head = self.to_string()[:16]
        tail = "..." if self.length > 16 else ""
        return f"BitStream({self.encoding}, L={self.length}, {head}{tail})"


@dataclass(frozen=True, eq=False)
class TwoLineStream:
    magnitude: np.ndarray
    sign: np.ndarray

    def __post_init__(self) -> None:
        magnitude = _frozen_bits(self.magnitude, "magnitude")
        sign = _frozen_bits(self.sign, "sign")
        if magnitude.size != sign.size:
            raise ContractError(
                f"magnitude and sign lengths differ ({magnitude.size} vs {sign.size})"
            )
        object.__setattr__(self, "magnitude", magnitude)
        object.__setattr__(self, "sign", sign)

    @classmethod
    def from_strings(cls, magnitude: str, sign: str) -> "TwoLineStream":
        return cls(
            np.frombuffer(magnitude.encode("ascii"), dtype=np.uint8) - ord("0"),
            np.frombuffer(sign.encode("ascii"), dtype=np.uint8) - ord("0"),
        )

    @classmethod
    def from_bipolar(cls, stream: BitStream) -> "TwoLineStream":
        """Every bipolar bit becomes a ±1 digit: M=1, S=1 where the bit is 0."""
        if stream.encoding != "bipolar":
            raise ContractError("only bipolar streams convert to two-line form")
        return cls(np.ones(stream.length, dtype=np.uint8), 1 - stream.bits)

    @property
    def length(self) -> int:
        return int(self.magnitude.size)

    def digits(self) -> np.ndarray:
        """Signed digit per cycle, each in {-1, 0, +1}."""
        return (1 - 2 * self.sign.astype(np.int64)) * self.magnitude.astype(np.int64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoLineStream):
            return NotImplemented
        return np.array_equal(self.magnitude, other.magnitude) and np.array_equal(
            self.sign, other.sign
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class BinaryStream:
    counts: np.ndarray
    n: int

    def __post_init__(self) -> None:
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        if counts.ndim != 1 or counts.size == 0:
            raise ContractError(f"counts must be a non-empty 1-D sequence, got shape {counts.shape}")
        if self.n < 1:
            raise ContractError(f"fan-in n must be positive, got {self.n}")
        if counts.min() < 0 or counts.max() > self.n:
            raise ContractError(
                f"counts must lie in [0, {self.n}], got [{counts.min()}, {counts.max()}]"
            )
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def length(self) -> int:
        return int(self.counts.size)

    @property
    def width(self) -> int:
        return max(1, math.ceil(math.log2(self.n))) if self.n > 1 else 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryStream):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.counts, other.counts)

    __hash__ = None  # type: ignore[assignment]


# ── Decoding ───────────────────────────────────────────────────────────────


def decode_stream(stream: BitStream) -> float:
    p = stream.ones / stream.length
    if stream.encoding == "unipolar":
        return p
    return 2.0 * p - 1.0


def decode_bits(bits: np.ndarray, encoding: Encoding) -> np.ndarray:
    """Row-wise decode of a (..., L) bit matrix."""
    p = bits.mean(axis=-1, dtype=np.float64)
    return p if encoding == "unipolar" else 2.0 * p - 1.0


def two_line_decode(stream: TwoLineStream) -> float:
    return float(stream.digits().sum()) / stream.length


def decode_binary(stream: BinaryStream) -> float:
    """Bipolar sum estimate carried by parallel-counter output: 2·mean(count) − n."""
    return 2.0 * float(stream.counts.mean(dtype=np.float64)) - stream.n


def encoding_range(encoding: Encoding) -> tuple[float, float]:
    return (0.0, 1.0) if encoding == "unipolar" else (-1.0, 1.0)


def check_range(value: float, encoding: Encoding) -> None:
    low, high = encoding_range(encoding)
    if not (low <= value <= high):
        raise ScRangeError(
            f"value {value!r} outside the {encoding} range [{low}, {high}]; prescale it first"
        )


def prescale(value: float, factor: float, encoding: Encoding = "bipolar") -> float:
    if factor <= 0:
        raise ScRangeError(f"prescale factor must be positive, got {factor}")
    scaled = value / factor
    check_range(scaled, encoding)
    return scaled


def scale_back(value: float, factor: float) -> float:
    return value * factor


def stream_correlation(a: BitStream, b: BitStream) -> float:
    """Pearson correlation of two equal-length bit sequences (0.0 when either is constant)."""
    if a.length != b.length:
        raise ContractError(f"lengths differ ({a.length} vs {b.length})")
    x = a.bits.astype(np.float64)
    y = b.bits.astype(np.float64)
    sx, sy = x.std(), y.std()
    if sx == 0.0 or sy == 0.0:
        return 0.0
    return float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))


def stack_bits(streams: Sequence[BitStream]) -> tuple[np.ndarray, Encoding]:
    """(n, L) matrix of equal-length, equal-encoding streams."""
    if not streams:
        raise ContractError("at least one stream is required")
    first = streams[0]
    for index, stream in enumerate(streams[1:], start=1):
        if stream.length != first.length:
            raise ContractError(
                f"stream {index} has length {stream.length}, expected {first.length}"
            )
        if stream.encoding != first.encoding:
            raise ContractError(
                f"stream {index} is {stream.encoding}, expected {first.encoding}"
            )
    return np.stack([s.bits for s in streams]), first.encoding


__all__ = [
    "BitStream",
    "TwoLineStream",
    "BinaryStream",
    "decode_stream",
    "decode_bits",
    "two_line_decode",
    "decode_binary",
    "encoding_range",
    "check_range",
    "prescale",
    "scale_back",
    "stream_correlation",
    "stack_bits",
]
