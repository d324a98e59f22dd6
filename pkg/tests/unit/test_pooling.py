import numpy as np
import pytest

from scdcnn.blocks.pooling import (
    SegmentSelector,
    avg_pool,
    avg_pool_matrix,
    max_pool_hw,
    max_pool_matrix,
)
from scdcnn.core.errors import ContractError
from scdcnn.stochastic.sng import SngState, StreamFactory
from scdcnn.stochastic.streams import BinaryStream, BitStream


def test_binary_average_truncates() -> None:
    inputs = [BinaryStream(np.array([v]), 8) for v in (2, 3, 4, 5)]
    assert avg_pool(inputs, "binary").counts.tolist() == [3]


def test_average_is_two_by_two() -> None:
    with pytest.raises(ContractError):
        avg_pool([BinaryStream(np.array([1]), 2)] * 3, "binary")
    with pytest.raises(ContractError):
        avg_pool([BitStream.from_string("1")] * 4, "stochastic")


def test_stochastic_average_picks_inputs() -> None:
    inputs = [BitStream.from_string("1" * 64)] * 2 + [BitStream.from_string("0" * 64)] * 2
    out = avg_pool(inputs, "stochastic", SngState(10, seed=9))
    assert 0 < out.ones < 64


def test_selector_ties_go_to_lowest_index() -> None:
    selector = SegmentSelector(3, 4, first_winner=2)
    assert selector.observe_segment(np.array([2, 3, 3])) == 1
    assert selector.observe_segment(np.array([0, 0, 0])) == 0


def test_max_pool_forwards_the_previous_winner() -> None:
    windows = np.array([[[1, 1, 1, 1, 0, 0, 0, 0], [0, 0, 0, 0, 1, 1, 1, 1]]], dtype=np.uint8)
    assert max_pool_matrix(windows, 4, np.array([0])).tolist() == [[1, 1, 1, 1, 0, 0, 0, 0]]
    assert max_pool_matrix(windows, 4, np.array([1])).tolist() == [[0, 0, 0, 0, 0, 0, 0, 0]]


def test_max_pool_hw_matches_the_batched_kernel() -> None:
    factory = StreamFactory(4)
    streams = factory.encode_many([-0.6, 0.1, 0.7, 0.3], "bipolar", 256)
    first = SngState(10, seed=123).next_index(4)
    hw = max_pool_hw(streams, 16, "stochastic", SngState(10, seed=123))
    windows = np.stack([s.bits for s in streams])[None]
    assert hw.bits.tolist() == max_pool_matrix(windows, 16, np.array([first]))[0].tolist()


def test_max_pool_in_the_binary_domain() -> None:
    counts = [BinaryStream(np.array(c), 4) for c in ([4, 4, 0, 0], [0, 0, 4, 4])]
    out = max_pool_hw(counts, 2, "binary", SngState(8, seed=1))
    assert isinstance(out, BinaryStream)
    assert out.counts.tolist()[2:] == [0, 0]


def test_max_pool_segment_must_divide_length() -> None:
    with pytest.raises(ContractError):
        max_pool_hw([BitStream.from_string("101")] * 2, 2, "stochastic", SngState(8))
    with pytest.raises(ContractError):
        max_pool_hw([], 2, "stochastic", SngState(8))


def test_binary_average_kernel_matches_block() -> None:
    rng = np.random.default_rng(1)
    windows = rng.integers(0, 17, (3, 4, 10))
    expected = [avg_pool([BinaryStream(w, 16) for w in window], "binary").counts.tolist() for window in windows]
    assert avg_pool_matrix(windows, "binary").tolist() == expected
    with pytest.raises(ContractError):
        avg_pool_matrix(windows.astype(np.uint8) % 2, "stochastic")
