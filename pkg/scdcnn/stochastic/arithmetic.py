"""
stochastic/arithmetic.py — Multiplication and the four addition schemes.

The public functions take stream objects; the ``*_bits`` kernels below them
work on (n, L) matrices and are what the blocks call in their inner loops.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from scdcnn.core.errors import ContractError
from scdcnn.core.models import ApcMode, Encoding
from scdcnn.stochastic.sng import SngState
from scdcnn.stochastic.streams import BinaryStream, BitStream, TwoLineStream, stack_bits

APC_UNIT = 16


# ── Kernels ────────────────────────────────────────────────────────────────


def multiply_bits(a: np.ndarray, b: np.ndarray, encoding: Encoding) -> np.ndarray:
    if encoding == "unipolar":
        return a & b
    return 1 - (a ^ b)


def mux_select(inputs: np.ndarray, chosen: np.ndarray) -> np.ndarray:
    """Pick inputs[..., chosen[..., t], t] for every cycle t; inputs are (..., n, L)."""
    return np.take_along_axis(inputs, chosen[..., None, :], axis=-2)[..., 0, :]


def mux_bits(inputs: np.ndarray, select: SngState) -> np.ndarray:
    n, length = inputs.shape
    chosen = (select.next_words(length) * n) >> select.width
    return inputs[chosen, np.arange(length)]


def apc_counts(inputs: np.ndarray, mode: ApcMode) -> np.ndarray:
    """Per-cycle counts of (..., n, L) bit matrices.

    The approximate counter is built from 16-input units. Unit inputs are
    paired (A_j, B_j) = (j, j + 8); every pair drives one AND and one OR, and
    the 8 + 8 gate outputs go through an exact adder tree. The unit emits a
    4-bit word whose LSB weighs 2: the tree's own LSB is dropped, and the
    parity dropped on the previous cycle is the rounding carry-in. Per cycle
    a unit is off by at most 1, and an all-ones column still counts 16.
    """
    *lead, n, length = inputs.shape
    if mode == "exact":
        return inputs.sum(axis=-2, dtype=np.int64)
    if n % APC_UNIT:
        raise ContractError(f"approximate APC is built from 16-input units; n={n} is not a multiple of 16")
    units = inputs.reshape(*lead, n // APC_UNIT, 2, APC_UNIT // 2, length)
    a, b = units[..., 0, :, :], units[..., 1, :, :]
    tree = (a & b).sum(axis=-2, dtype=np.int64) + (a | b).sum(axis=-2, dtype=np.int64)
    parity = tree & 1
    carry_in = np.zeros_like(parity)
    carry_in[..., 1:] = parity[..., :-1]
    words = (tree + carry_in) >> 1
    return 2 * words.sum(axis=-2)


# ── Streams ────────────────────────────────────────────────────────────────


def multiply(a: BitStream, b: BitStream) -> BitStream:
    if a.length != b.length:
        raise ContractError(f"multiply: lengths differ ({a.length} vs {b.length})")
    if a.encoding != b.encoding:
        raise ContractError(f"multiply: encodings differ ({a.encoding} vs {b.encoding})")
    return BitStream(multiply_bits(a.bits, b.bits, a.encoding), a.encoding)


def add_or(inputs: Sequence[BitStream]) -> BitStream:
    bits, encoding = stack_bits(inputs)
    return BitStream(np.bitwise_or.reduce(bits, axis=0), encoding)


def add_mux(inputs: Sequence[BitStream], select: SngState) -> BitStream:
    bits, encoding = stack_bits(inputs)
    return BitStream(mux_bits(bits, select), encoding)


def apc(inputs: Sequence[BitStream], mode: ApcMode = "exact") -> BinaryStream:
    if len(inputs) < 2:
        raise ContractError(f"a parallel counter needs at least 2 inputs, got {len(inputs)}")
    bits, _ = stack_bits(inputs)
    return BinaryStream(apc_counts(bits, mode), len(inputs))


@dataclass
class CarryCounter:
    """Three-state saturating carry of the two-line adder."""

    state: int = 0

    def __post_init__(self) -> None:
        if self.state not in (-1, 0, 1):
            raise ContractError(f"carry state must be -1, 0 or +1, got {self.state}")


def _clamp_digit(value: int) -> int:
    return -1 if value < -1 else (1 if value > 1 else value)


def two_line_add(a: TwoLineStream, b: TwoLineStream, carry: CarryCounter) -> TwoLineStream:
    if a.length != b.length:
        raise ContractError(f"two_line_add: lengths differ ({a.length} vs {b.length})")
    da = a.digits().tolist()
    db = b.digits().tolist()
    out = [0] * a.length
    c = carry.state
    for i, (x, y) in enumerate(zip(da, db)):
        s = x + y + c
        digit = _clamp_digit(s)
        c = _clamp_digit(s - digit)
        out[i] = digit
    carry.state = c
    digits = np.asarray(out, dtype=np.int64)
    return TwoLineStream((digits != 0).astype(np.uint8), (digits < 0).astype(np.uint8))


@dataclass
class TwoLineAccumulator:
    """Chains two-line adders, each with its own carry counter."""

    carries: list[CarryCounter] = field(default_factory=list)

    def sum(self, terms: Sequence[TwoLineStream]) -> TwoLineStream:
        if not terms:
            raise ContractError("nothing to add")
        total = terms[0]
        for index, term in enumerate(terms[1:]):
            if index >= len(self.carries):
                self.carries.append(CarryCounter())
            total = two_line_add(total, term, self.carries[index])
        return total


__all__ = [
    "APC_UNIT",
    "multiply_bits",
    "mux_select",
    "mux_bits",
    "apc_counts",
    "multiply",
    "add_or",
    "add_mux",
    "apc",
    "CarryCounter",
    "two_line_add",
    "TwoLineAccumulator",
]
