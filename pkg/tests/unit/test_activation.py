import itertools
import math

import numpy as np
import pytest

from scdcnn.blocks.activation import (
    BtanhState,
    boundary_threshold,
    btanh,
    btanh_matrix,
    fifth_boundary_transfer,
    fsm_stationary_output,
    nearest_even,
    optimal_states,
    stanh,
    stanh_matrix,
    transfer_gain,
)
from scdcnn.core.errors import ContractError
from scdcnn.stochastic.arithmetic import apc
from scdcnn.stochastic.sng import StreamFactory
from scdcnn.stochastic.streams import BinaryStream, BitStream, decode_stream


def test_boundaries() -> None:
    assert boundary_threshold(10, "half") == 5
    assert boundary_threshold(10, "fifth") == 2
    assert boundary_threshold(14, "fifth") == 3


def test_stanh_emits_before_the_transition() -> None:
    assert stanh(BitStream.from_string("1111"), 4).to_string() == "1111"
    assert stanh(BitStream.from_string("0000"), 4).to_string() == "1000"
    assert stanh(BitStream.from_string("0000"), 4, emit="after").to_string() == "0000"


def test_stanh_validates_inputs() -> None:
    with pytest.raises(ContractError):
        stanh(BitStream.from_string("01", "unipolar"), 4)
    with pytest.raises(ContractError):
        stanh(BitStream.from_string("01"), 5)
    with pytest.raises(ContractError):
        stanh(BitStream.from_string("01"), 4, initial_state=4)


def test_stanh_matrix_matches_single_streams() -> None:
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, (5, 300), dtype=np.uint8)
    batched = stanh_matrix(bits, 8, "fifth")
    for row, out in zip(bits, batched):
        assert out.tolist() == stanh(BitStream(row), 8, "fifth").bits.tolist()


def test_btanh_steps_by_count_excess() -> None:
    out = btanh(BinaryStream(np.array([0, 0, 2, 2]), 2), 4)
    assert out.to_string() == "1001"


def test_btanh_rejects_bad_counts() -> None:
    with pytest.raises(ContractError):
        BtanhState(4, 2).step(3)
    with pytest.raises(ContractError):
        btanh_matrix(np.array([[0, 5]]), 4, 4)


def test_btanh_matrix_matches_single_streams() -> None:
    rng = np.random.default_rng(1)
    counts = rng.integers(0, 9, (4, 200))
    batched = btanh_matrix(counts, 8, 6)
    for row, out in zip(counts, batched):
        assert out.tolist() == btanh(BinaryStream(row, 8), 6).bits.tolist()


def _oracle_apc_btanh(products: np.ndarray, K: int) -> list[int]:
    n, length = products.shape
    state, out = K // 2, []
    for t in range(length):
        count = sum(int(products[i, t]) for i in range(n))
        out.append(1 if state >= K // 2 else 0)
        state = min(K - 1, max(0, state + 2 * count - n))
    return out


def test_exact_apc_btanh_matches_oracle_exhaustively() -> None:
    for pattern in itertools.product((0, 1), repeat=8):
        products = np.array(pattern, dtype=np.uint8).reshape(2, 4)
        counts = apc([BitStream(row) for row in products], "exact")
        assert btanh(counts, 4).bits.tolist() == _oracle_apc_btanh(products, 4)


def test_nearest_even() -> None:
    assert nearest_even(3.0) == 4
    assert nearest_even(2.9) == 2
    assert nearest_even(5.0) == 6
    assert nearest_even(0.2) == 2


def test_optimal_states() -> None:
    assert optimal_states("apc_any", 16, 1024) == 8
    assert optimal_states("apc_any", 25, 1024) == 12
    assert optimal_states("mux_avg", 16, 1024) == 10
    assert optimal_states("mux_max", 16, 1024) == 14
    with pytest.raises(ContractError):
        optimal_states("mux_avg", 1, 1024)


def test_transfer_gain() -> None:
    assert transfer_gain("btanh", "avg", 8, 16) == pytest.approx(1.0)
    assert transfer_gain("btanh", "max", 8, 16) == pytest.approx(0.25)
    assert transfer_gain("stanh", "avg", 8, 16) == pytest.approx(0.25)


def test_stationary_output_approximates_tanh() -> None:
    assert fsm_stationary_output(8, 4, 0.0) == pytest.approx(0.0)
    assert fsm_stationary_output(8, 4, 1.0) == 1.0
    assert fsm_stationary_output(8, 4, 0.2) == pytest.approx(math.tanh(0.8), abs=0.02)
    assert fifth_boundary_transfer(10, 0.0) > 0.0


def test_long_stanh_run_settles_on_the_stationary_output() -> None:
    streams = StreamFactory(7).encode_many([0.2] * 4, "bipolar", 8192)
    settled = np.mean([decode_stream(stanh(s, 8)) for s in streams])
    assert settled == pytest.approx(fsm_stationary_output(8, 4, 0.2), abs=0.06)


def test_stanh_is_antisymmetric_on_complemented_input() -> None:
    # state K/2 - 1 mirrors the start state K/2 across the output boundary
    rng = np.random.default_rng(4)
    bits = rng.integers(0, 2, (3, 500), dtype=np.uint8)
    for row in bits:
        up = stanh(BitStream(row), 8, initial_state=4)
        down = stanh(BitStream(1 - row), 8, initial_state=3)
        assert np.array_equal(up.bits, 1 - down.bits)
    for x in (0.1, 0.35, 0.8):
        assert fsm_stationary_output(8, 4, -x) == pytest.approx(-fsm_stationary_output(8, 4, x))
