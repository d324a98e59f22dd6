"""
blocks/activation.py — Stochastic tanh activations.

Stanh   saturating up/down FSM fed by a bit-stream (MUX-based blocks)
Btanh   saturating counter fed by per-cycle counts (APC-based blocks)

Both emit their output bit from the state held *before* the cycle's
transition unless told otherwise, and start from state K/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from scdcnn.core.errors import ContractError
from scdcnn.core.models import ActVariant, Boundary, FebKind, PoolVariant
from scdcnn.stochastic.streams import BinaryStream, BitStream

EmitOrder = Literal["before", "after"]

# empirical fits for the MUX paths
MUX_AVG_ALPHA = 33.27
MUX_MAX_ALPHA = 37.0
MUX_MAX_BETA = 16.5


def _check_states(K: int) -> None:
    if K < 2 or K % 2:
        raise ContractError(f"state count K must be even and >= 2, got {K}")


def boundary_threshold(K: int, boundary: Boundary) -> int:
    """Lowest state that emits a 1."""
    if boundary == "half":
        return K // 2
    if boundary == "fifth":
        return -(-K // 5)
    raise ContractError(f"unknown boundary {boundary!r}")


def _initial(K: int, initial_state: Optional[int]) -> int:
    state = K // 2 if initial_state is None else initial_state
    if not 0 <= state < K:
        raise ContractError(f"initial state {state} outside [0, {K - 1}]")
    return state


# ── Stanh ──────────────────────────────────────────────────────────────────


@dataclass
class FsmActivation:
    K: int
    boundary: Boundary = "half"
    state: Optional[int] = None

    def __post_init__(self) -> None:
        _check_states(self.K)
        self.state = _initial(self.K, self.state)

    @property
    def threshold(self) -> int:
        return boundary_threshold(self.K, self.boundary)

    def step(self, bit: int) -> int:
        out = int(self.state >= self.threshold)
        self.state = min(self.K - 1, self.state + 1) if bit else max(0, self.state - 1)
        return out

    def run(self, bits: np.ndarray, emit: EmitOrder = "before") -> np.ndarray:
        s, top, th = self.state, self.K - 1, self.threshold
        out = bytearray(len(bits))
        before = emit == "before"
        for i, b in enumerate(bits.tolist()):
            if before:
                out[i] = s >= th
            s = (s + 1 if s < top else top) if b else (s - 1 if s > 0 else 0)
            if not before:
                out[i] = s >= th
        self.state = s
        return np.frombuffer(bytes(out), dtype=np.uint8)


def stanh(
    stream: BitStream,
    K: int,
    boundary: Boundary = "half",
    *,
    initial_state: Optional[int] = None,
    emit: EmitOrder = "before",
) -> BitStream:
    if stream.encoding != "bipolar":
        raise ContractError("Stanh takes a bipolar stream")
    machine = FsmActivation(K, boundary, initial_state)
    return BitStream(machine.run(stream.bits, emit), "bipolar")


def stanh_matrix(
    bits: np.ndarray,
    K: int,
    boundary: Boundary = "half",
    *,
    initial_state: Optional[int] = None,
    emit: EmitOrder = "before",
) -> np.ndarray:
    """Stanh over every row of a (B, L) bit matrix at once."""
    _check_states(K)
    rows = np.atleast_2d(bits)
    if rows.shape[0] == 1:
        machine = FsmActivation(K, boundary, initial_state)
        return machine.run(rows[0], emit).reshape(bits.shape)
    threshold = boundary_threshold(K, boundary)
    state = np.full(rows.shape[0], _initial(K, initial_state), dtype=np.int64)
    steps = 2 * rows.astype(np.int64) - 1
    out = np.empty(rows.shape, dtype=np.uint8)
    for t in range(rows.shape[1]):
        if emit == "before":
            out[:, t] = state >= threshold
        state += steps[:, t]
        np.clip(state, 0, K - 1, out=state)
        if emit == "after":
            out[:, t] = state >= threshold
    return out.reshape(bits.shape)


# ── Btanh ──────────────────────────────────────────────────────────────────


@dataclass
class BtanhState:
    K: int
    n: int
    state: Optional[int] = None

    def __post_init__(self) -> None:
        _check_states(self.K)
        if self.n < 1:
            raise ContractError(f"fan-in must be positive, got {self.n}")
        self.state = _initial(self.K, self.state)

    def step(self, count: int) -> int:
        if not 0 <= count <= self.n:
            raise ContractError(f"count {count} outside [0, {self.n}]")
        out = int(self.state >= self.K // 2)
        self.state = min(self.K - 1, max(0, self.state + 2 * count - self.n))
        return out

    def run(self, counts: np.ndarray) -> np.ndarray:
        s, top, half, n = self.state, self.K - 1, self.K // 2, self.n
        out = bytearray(len(counts))
        for i, c in enumerate(counts.tolist()):
            out[i] = s >= half
            s += 2 * c - n
            s = 0 if s < 0 else (top if s > top else s)
        self.state = s
        return np.frombuffer(bytes(out), dtype=np.uint8)


def btanh(stream: BinaryStream, K: int, *, initial_state: Optional[int] = None) -> BitStream:
    machine = BtanhState(K, stream.n, initial_state)
    return BitStream(machine.run(stream.counts), "bipolar")


def btanh_matrix(counts: np.ndarray, n: int, K: int, *, initial_state: Optional[int] = None) -> np.ndarray:
    _check_states(K)
    rows = np.atleast_2d(counts).astype(np.int64)
    if rows.min() < 0 or rows.max() > n:
        raise ContractError(f"counts must lie in [0, {n}]")
    if rows.shape[0] == 1:
        return BtanhState(K, n, initial_state).run(rows[0]).reshape(np.shape(counts))
    half = K // 2
    state = np.full(rows.shape[0], _initial(K, initial_state), dtype=np.int64)
    steps = 2 * rows - n
    out = np.empty(rows.shape, dtype=np.uint8)
    for t in range(rows.shape[1]):
        out[:, t] = state >= half
        state += steps[:, t]
        np.clip(state, 0, K - 1, out=state)
    return out.reshape(np.shape(counts))


# ── State-count sizing ─────────────────────────────────────────────────────


def nearest_even(value: float) -> int:
    """Nearest even integer, exact halfway rounding up, never below 2."""
    return max(2, 2 * math.floor(value / 2.0 + 0.5))


def optimal_states(kind: FebKind, n_inputs: int, length: int) -> int:
    if kind == "apc_any":
        return nearest_even(n_inputs / 2.0)
    if n_inputs < 2 or length < 2:
        raise ContractError(f"state sizing needs N >= 2 and L >= 2, got N={n_inputs}, L={length}")
    log_n = math.log2(n_inputs)
    log_l = math.log2(length)
    if kind == "mux_avg":
        value = 2.0 * log_n + (log_l * n_inputs) / (MUX_AVG_ALPHA * log_n)
    elif kind == "mux_max":
        value = 2.0 * (log_n + log_l) - MUX_MAX_ALPHA / log_n - MUX_MAX_BETA / math.log(length, 5)
    else:
        raise ContractError(f"unknown block kind {kind!r}")
    return nearest_even(value)


def transfer_gain(act: ActVariant, pool: Optional[PoolVariant], K: int, n_inputs: int) -> float:
    """Slope g such that the activation realises tanh(g·z) on the unscaled inner product z.

    Stanh sees z/N and computes tanh(K/2 · z/N). Btanh steps by the count
    excess, which behaves like N unit steps per cycle; after a four-way binary
    average the step variance drops fourfold and the slope rises with it.
    """
    if act == "btanh" and pool == "avg":
        return 2.0 * K / n_inputs
    return K / (2.0 * n_inputs)


def fsm_stationary_output(K: int, threshold: int, y: float) -> float:
    """Long-run decoded output of the saturating FSM fed by i.i.d. bits of bipolar value y."""
    if y >= 1.0:
        return 1.0
    if y <= -1.0:
        return 1.0 if threshold == 0 else -1.0
    r = (1.0 + y) / (1.0 - y)
    if math.isclose(r, 1.0):
        p = (K - threshold) / K
    else:
        p = (r**threshold - r**K) / (1.0 - r**K)
    return 2.0 * p - 1.0


def fifth_boundary_transfer(K: int, y: float) -> float:
    return fsm_stationary_output(K, boundary_threshold(K, "fifth"), y)


__all__ = [
    "EmitOrder",
    "FsmActivation",
    "BtanhState",
    "boundary_threshold",
    "stanh",
    "stanh_matrix",
    "btanh",
    "btanh_matrix",
    "nearest_even",
    "optimal_states",
    "transfer_gain",
    "fsm_stationary_output",
    "fifth_boundary_transfer",
]
