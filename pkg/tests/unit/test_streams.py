import numpy as np
import pytest

from scdcnn.core.errors import ContractError, ScRangeError
from scdcnn.stochastic.streams import (
    BinaryStream,
    BitStream,
    TwoLineStream,
    decode_binary,
    decode_bits,
    decode_stream,
    prescale,
    scale_back,
    stack_bits,
    stream_correlation,
    two_line_decode,
)


def test_decode_bipolar_and_unipolar() -> None:
    assert decode_stream(BitStream.from_string("1101", "bipolar")) == pytest.approx(0.5)
    assert decode_stream(BitStream.from_string("1101", "unipolar")) == pytest.approx(0.75)


def test_decode_bits_is_row_wise() -> None:
    bits = np.array([[1, 1, 1, 1], [0, 0, 1, 1]], dtype=np.uint8)
    assert decode_bits(bits, "bipolar").tolist() == [1.0, 0.0]


def test_bitstream_rejects_non_bits_and_empty() -> None:
    with pytest.raises(ContractError):
        BitStream(np.array([0, 2, 1]))
    with pytest.raises(ContractError):
        BitStream(np.array([], dtype=np.uint8))


def test_bitstream_is_immutable() -> None:
    stream = BitStream.from_string("0101")
    with pytest.raises(ValueError):
        stream.bits[0] = 1


def test_two_line_from_bipolar_digits() -> None:
    two = TwoLineStream.from_bipolar(BitStream.from_string("1001"))
    assert two.digits().tolist() == [1, -1, -1, 1]
    assert two_line_decode(two) == pytest.approx(0.0)


def test_two_line_lengths_must_match() -> None:
    with pytest.raises(ContractError):
        TwoLineStream.from_strings("101", "01")


def test_binary_stream_bounds_and_decode() -> None:
    with pytest.raises(ContractError):
        BinaryStream(np.array([0, 5]), 4)
    assert decode_binary(BinaryStream(np.array([2, 4]), 4)) == pytest.approx(2.0)


def test_prescale_and_scale_back() -> None:
    assert prescale(3.0, 4.0) == pytest.approx(0.75)
    assert scale_back(0.75, 4.0) == pytest.approx(3.0)
    with pytest.raises(ScRangeError):
        prescale(3.0, 2.0)
    with pytest.raises(ScRangeError):
        prescale(0.5, 0.0)


def test_stream_correlation() -> None:
    a = BitStream.from_string("11001010")
    assert stream_correlation(a, a) == pytest.approx(1.0)
    assert stream_correlation(a, BitStream.from_string("11111111")) == 0.0


def test_stack_bits_checks_length_and_encoding() -> None:
    with pytest.raises(ContractError):
        stack_bits([BitStream.from_string("10"), BitStream.from_string("101")])
    with pytest.raises(ContractError):
        stack_bits([BitStream.from_string("10", "unipolar"), BitStream.from_string("10")])
    bits, encoding = stack_bits([BitStream.from_string("10"), BitStream.from_string("01")])
    assert bits.shape == (2, 2) and encoding == "bipolar"
