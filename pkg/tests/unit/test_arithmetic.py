import numpy as np
import pytest

from scdcnn.core.errors import ContractError
from scdcnn.stochastic.arithmetic import (
    CarryCounter,
    TwoLineAccumulator,
    add_mux,
    add_or,
    apc,
    apc_counts,
    multiply,
    multiply_bits,
    mux_select,
    two_line_add,
)
from scdcnn.stochastic.sng import SngState
from scdcnn.stochastic.streams import BitStream, TwoLineStream, two_line_decode


def test_multiply_and_vs_xnor() -> None:
    a = np.array([1, 0, 1, 0], dtype=np.uint8)
    b = np.array([1, 1, 0, 0], dtype=np.uint8)
    assert multiply_bits(a, b, "unipolar").tolist() == [1, 0, 0, 0]
    assert multiply_bits(a, b, "bipolar").tolist() == [1, 0, 0, 1]


def test_multiply_checks_operands() -> None:
    with pytest.raises(ContractError):
        multiply(BitStream.from_string("10"), BitStream.from_string("101"))
    with pytest.raises(ContractError):
        multiply(BitStream.from_string("10", "unipolar"), BitStream.from_string("10"))


def test_add_or() -> None:
    out = add_or([BitStream.from_string("1000", "unipolar"), BitStream.from_string("0100", "unipolar")])
    assert out.to_string() == "1100"


def test_mux_select_picks_per_cycle() -> None:
    inputs = np.array([[0, 0, 0], [1, 1, 1]], dtype=np.uint8)
    assert mux_select(inputs, np.array([1, 0, 1])).tolist() == [1, 0, 1]


def test_add_mux_with_a_full_counter_period_is_exact() -> None:
    inputs = [BitStream.from_string(c * 1024) for c in "1010"]
    out = add_mux(inputs, SngState(10, mode="counter_exact"))
    assert out.ones == 512
    assert out.encoding == "bipolar"


def test_exact_apc_counts() -> None:
    out = apc([BitStream.from_string(s) for s in ("110", "011", "010")])
    assert out.counts.tolist() == [1, 3, 1]
    assert out.n == 3


def test_apc_needs_two_inputs() -> None:
    with pytest.raises(ContractError):
        apc([BitStream.from_string("1")])


def test_approximate_unit_rounds_with_the_previous_parity() -> None:
    bits = np.zeros((16, 4), dtype=np.uint8)
    bits[:, 0] = 1  # all ones: 16, parity 0
    bits[0, 1] = 1  # tree 1, no carry-in: rounds down
    bits[8, 2] = 1  # tree 1, carry-in from the odd cycle before: rounds up
    assert apc_counts(bits, "approximate").tolist() == [16, 0, 2, 0]
    assert apc_counts(bits, "exact").tolist() == [16, 1, 1, 0]


def test_approximate_error_bound_over_every_column() -> None:
    columns = np.arange(1 << 16, dtype=np.int64)
    bits = ((columns[None, :] >> np.arange(16)[:, None]) & 1).astype(np.uint8)
    approx = apc_counts(bits, "approximate")
    diff = approx - apc_counts(bits, "exact")
    assert np.abs(diff).max() <= 2
    assert np.abs(diff).max() == 1
    assert approx[-1] == 16
    assert np.all(approx % 2 == 0)


def test_approximate_error_is_unbiased_across_units() -> None:
    rng = np.random.default_rng(3)
    bits = rng.integers(0, 2, (64, 2000), dtype=np.uint8)
    diff = apc_counts(bits, "approximate") - apc_counts(bits, "exact")
    assert np.abs(diff).max() <= 64 // 16
    assert abs(diff.mean()) < 0.1


def test_exact_apc_conserves_ones() -> None:
    rng = np.random.default_rng(5)
    streams = [BitStream(rng.integers(0, 2, 300, dtype=np.uint8)) for _ in range(7)]
    out = apc(streams)
    assert int(out.counts.sum()) == sum(s.ones for s in streams)


def test_approximate_needs_multiple_of_sixteen() -> None:
    with pytest.raises(ContractError):
        apc_counts(np.zeros((10, 4), dtype=np.uint8), "approximate")


def test_two_line_add_carries_into_the_next_cycle() -> None:
    a = TwoLineStream.from_strings("10", "00")
    carry = CarryCounter()
    out = two_line_add(a, a, carry)
    assert out.digits().tolist() == [1, 1]
    assert two_line_decode(out) == pytest.approx(1.0)
    assert carry.state == 0


def test_two_line_add_cancels_signs() -> None:
    plus = TwoLineStream.from_strings("11", "00")
    minus = TwoLineStream.from_strings("11", "11")
    assert two_line_add(plus, minus, CarryCounter()).digits().tolist() == [0, 0]


def test_carry_counter_states() -> None:
    with pytest.raises(ContractError):
        CarryCounter(2)


def test_accumulator_keeps_one_carry_per_adder() -> None:
    terms = [TwoLineStream.from_strings("1010", "0000") for _ in range(3)]
    acc = TwoLineAccumulator()
    acc.sum(terms)
    assert len(acc.carries) == 2
    with pytest.raises(ContractError):
        acc.sum([])


def test_gates_are_positionwise() -> None:
    rng = np.random.default_rng(9)
    rows = rng.integers(0, 2, (4, 200), dtype=np.uint8)
    streams = [BitStream(r) for r in rows]
    head = [BitStream(r[50:120]) for r in rows]
    assert np.array_equal(multiply(streams[0], streams[1]).bits[50:120], multiply(head[0], head[1]).bits)
    assert np.array_equal(add_or(streams).bits[50:120], add_or(head).bits)
    whole = add_mux(streams, SngState(10, seed=41))
    shifted = SngState(10, seed=41)
    shifted.next_words(50)
    assert np.array_equal(whole.bits[50:120], add_mux(head, shifted).bits)


def test_two_line_add_of_two_quarters_is_exact() -> None:
    a = TwoLineStream.from_strings("11000000", "00000000")
    b = TwoLineStream.from_strings("00110000", "00000000")
    assert two_line_decode(two_line_add(a, b, CarryCounter())) == pytest.approx(0.5)


def test_two_line_add_saturates() -> None:
    one = TwoLineStream.from_strings("1" * 8, "0" * 8)
    carry = CarryCounter()
    assert two_line_decode(two_line_add(one, one, carry)) == pytest.approx(1.0)
    assert carry.state == 1
