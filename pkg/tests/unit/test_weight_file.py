import struct

import numpy as np
import pytest

from scdcnn.core.errors import FormatError, ParseError
from scdcnn.network.spec import FullyConnectedLayer, NetworkSpec, OutputLayer
from scdcnn.storage.weight_file import (
    MAGIC,
    dump_weights,
    load_weights,
    pack_codes,
    parse_weights,
    save_weights,
    unpack_codes,
    VERSION,
)
from scdcnn.storage.weight_store import random_weight_set


@pytest.fixture
def spec() -> NetworkSpec:
    return NetworkSpec(input_shape=(3, 3, 1), layers=(FullyConnectedLayer(outputs=4), OutputLayer(classes=2)))


def test_pack_codes_is_lsb_first_and_word_padded() -> None:
    payload = pack_codes(np.array([1, 2, 3]), 2)  # bits 10 01 11
    assert len(payload) == 8
    assert payload[0] == 0b111001
    assert unpack_codes(payload, 3, 2).tolist() == [1, 2, 3]


def test_full_width_codes_survive_packing() -> None:
    codes = np.array([0, (1 << 64) - 1, 1 << 63], dtype=np.uint64)
    assert unpack_codes(pack_codes(codes, 64), 3, 64).tolist() == codes.tolist()


def test_dump_then_parse_restores_the_weight_set(spec: NetworkSpec) -> None:
    ws = random_weight_set(spec, [7, 3], seed=4)
    data = dump_weights(ws)
    assert data[:4] == MAGIC
    assert parse_weights(data) == ws


def test_header_layout(spec: NetworkSpec) -> None:
    data = dump_weights(random_weight_set(spec, [5, 9]))
    assert struct.unpack_from("<4sHH", data) == (MAGIC, VERSION, 2)
    assert struct.unpack_from("<BIIII", data, 8) == (5, 4, 1, 1, 9)


def test_bad_magic_and_version() -> None:
    with pytest.raises(ParseError) as info:
        parse_weights(b"XXXX" + bytes(4))
    assert info.value.offset == 0
    with pytest.raises(ParseError):
        parse_weights(struct.pack("<4sHH", MAGIC, 99, 0))


def test_truncation_reports_the_offset(spec: NetworkSpec) -> None:
    data = dump_weights(random_weight_set(spec, [8, 8]))
    with pytest.raises(ParseError) as info:
        parse_weights(data[:-3])
    assert info.value.offset > 8
    with pytest.raises(ParseError):
        parse_weights(data[:5])


def test_bad_precision_and_empty_layers() -> None:
    header = struct.pack("<4sHH", MAGIC, VERSION, 1)
    with pytest.raises(ParseError):
        parse_weights(header + struct.pack("<BIIII", 65, 1, 1, 1, 1))
    with pytest.raises(FormatError):
        parse_weights(header + struct.pack("<BIIII", 8, 0, 1, 1, 1))


def test_trailing_bytes(spec: NetworkSpec) -> None:
    data = dump_weights(random_weight_set(spec, [8, 8]))
    with pytest.raises(FormatError):
        parse_weights(data + b"\x00")


def test_load_checks_the_network(tmp_path, spec: NetworkSpec) -> None:
    path = tmp_path / "w.scdw"
    ws = random_weight_set(spec, [6, 6], seed=2)
    save_weights(ws, path)
    assert load_weights(path, expected=spec) == ws
    other = NetworkSpec(input_shape=(3, 3, 1), layers=(FullyConnectedLayer(outputs=5), OutputLayer(classes=2)))
    with pytest.raises(FormatError):
        load_weights(path, expected=other)
    with pytest.raises(OSError):
        load_weights(tmp_path / "missing.scdw")
