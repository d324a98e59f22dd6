"""
Average pooling and hardware-oriented max pooling.

Both work on bit-streams (MUX-based blocks) and on per-cycle count streams
(APC-based blocks).
"""
from __future__ import annotations

from typing import Optional, Sequence, Union

import numpy as np

from scdcnn.core.errors import ContractError
from scdcnn.core.models import Domain
from scdcnn.stochastic.arithmetic import mux_bits, mux_select
from scdcnn.stochastic.sng import SngState
from scdcnn.stochastic.streams import BinaryStream, BitStream, stack_bits

POOL_WINDOW = 4

PoolInput = Union[BitStream, BinaryStream]


def _stack_counts(inputs: Sequence[BinaryStream]) -> tuple[np.ndarray, int]:
    if not all(isinstance(s, BinaryStream) for s in inputs):
        raise ContractError("binary-domain pooling takes count streams")
    n = inputs[0].n
    length = inputs[0].length
    for index, s in enumerate(inputs):
        if s.n != n or s.length != length:
            raise ContractError(
                f"count stream {index} has (n={s.n}, L={s.length}), expected (n={n}, L={length})"
            )
    return np.stack([s.counts for s in inputs]), n


def avg_pool(
    inputs: Sequence[PoolInput],
    domain: Domain,
    select: Optional[SngState] = None,
) -> PoolInput:
    if len(inputs) != POOL_WINDOW:
        raise ContractError(f"average pooling is 2x2 and takes 4 inputs, got {len(inputs)}")
    if domain == "stochastic":
        if select is None:
            raise ContractError("stochastic average pooling needs a select generator")
        if not all(isinstance(s, BitStream) for s in inputs):
            raise ContractError("stochastic-domain pooling takes bit-streams")
        bits, encoding = stack_bits(inputs)  # type: ignore[arg-type]
        return BitStream(mux_bits(bits, select), encoding)
    counts, n = _stack_counts(inputs)  # type: ignore[arg-type]
    # integer truncation: mean of (2, 3, 4, 5) becomes 3
    return BinaryStream(counts.sum(axis=0) // POOL_WINDOW, n)


class SegmentSelector:
    """Tracks which candidate won the last c-cycle ones-count race."""

    def __init__(self, candidates: int, c: int, first_winner: int) -> None:
        if not 0 <= first_winner < candidates:
            raise ContractError(f"first winner {first_winner} outside [0, {candidates})")
        self.c = c
        self.current_winner = first_winner
        self.counters = np.zeros(candidates, dtype=np.int64)

    def observe_segment(self, segment_totals: np.ndarray) -> int:
        """Close a segment; the winner of this one drives the next. Lowest index wins ties."""
        self.counters += np.asarray(segment_totals, dtype=np.int64)
        self.current_winner = int(np.argmax(self.counters))
        self.counters[:] = 0
        return self.current_winner


def max_pool_hw(
    inputs: Sequence[PoolInput],
    c: int,
    domain: Domain,
    first_pick: SngState,
) -> PoolInput:
    """Segment-wise approximate max of the candidates (2x2 window in the network; any count here)."""
    if not inputs:
        raise ContractError("max pooling over zero inputs")
    if domain == "stochastic":
        if not all(isinstance(s, BitStream) for s in inputs):
            raise ContractError("stochastic-domain pooling takes bit-streams")
        data, encoding = stack_bits(inputs)  # type: ignore[arg-type]
    else:
        data, n = _stack_counts(inputs)  # type: ignore[arg-type]
    m, length = data.shape
    if c < 1 or length % c:
        raise ContractError(f"stream length {length} is not a multiple of segment length {c}")
    segments = length // c
    blocks = data.reshape(m, segments, c)
    totals = blocks.sum(axis=2, dtype=np.int64)
    selector = SegmentSelector(m, c, first_pick.next_index(m))
    winners = np.empty(segments, dtype=np.int64)
    for t in range(segments):
        winners[t] = selector.current_winner
        selector.observe_segment(totals[:, t])
    out = blocks[winners, np.arange(segments)].reshape(length)
    if domain == "stochastic":
        return BitStream(out, encoding)
    return BinaryStream(out, n)


# ── Batched kernels ────────────────────────────────────────────────────────


def avg_pool_matrix(windows: np.ndarray, domain: Domain, chosen: Optional[np.ndarray] = None) -> np.ndarray:
    """Average pooling over (B, 4, L) windows; ``chosen`` is the (B, L) MUX select in the stochastic domain."""
    if windows.shape[-2] != POOL_WINDOW:
        raise ContractError(f"average pooling is 2x2 and takes 4 inputs, got {windows.shape[-2]}")
    if domain == "stochastic":
        if chosen is None:
            raise ContractError("stochastic average pooling needs select indices")
        return mux_select(windows, chosen)
    return windows.sum(axis=-2, dtype=np.int64) // POOL_WINDOW


def max_pool_matrix(windows: np.ndarray, c: int, first_winners: np.ndarray) -> np.ndarray:
    """Hardware max pooling over (B, m, L) windows at once; same selection rule as SegmentSelector."""
    batch, m, length = windows.shape
    if c < 1 or length % c:
        raise ContractError(f"stream length {length} is not a multiple of segment length {c}")
    segments = length // c
    blocks = windows.reshape(batch, m, segments, c)
    totals = blocks.sum(axis=3, dtype=np.int64)
    winners = np.empty((batch, segments), dtype=np.int64)
    winners[:, 0] = first_winners
    winners[:, 1:] = np.argmax(totals[:, :, :-1], axis=1)
    picked = np.take_along_axis(blocks, winners[:, None, :, None], axis=1)[:, 0]
    return picked.reshape(batch, length)


__all__ = [
    "POOL_WINDOW",
    "SegmentSelector",
    "avg_pool",
    "max_pool_hw",
    "avg_pool_matrix",
    "max_pool_matrix",
]
