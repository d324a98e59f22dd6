import gzip
import struct

import numpy as np
import pytest

from scdcnn.core.errors import FormatError, ParseError, ScRangeError
from scdcnn.storage.idx_reader import (
    IMAGE_MAGIC,
    LABEL_MAGIC,
    Image,
    load_idx,
    load_mnist,
    parse_idx,
    pixels_to_bipolar,
)


def _images(count: int = 2, rows: int = 3, cols: int = 3) -> bytes:
    payload = bytes((i * 37) % 256 for i in range(count * rows * cols))
    return struct.pack(">IIII", IMAGE_MAGIC, count, rows, cols) + payload


def _labels(values: list[int]) -> bytes:
    return struct.pack(">II", LABEL_MAGIC, len(values)) + bytes(values)


def test_pixel_mapping() -> None:
    assert pixels_to_bipolar(np.array([0, 255])).tolist() == [-1.0, 1.0]


def test_parse_images_and_labels() -> None:
    assert parse_idx(_images()).shape == (2, 3, 3)
    assert parse_idx(_labels([3, 7])).tolist() == [3, 7]


def test_parse_errors() -> None:
    with pytest.raises(ParseError):
        parse_idx(b"\x00\x00")
    with pytest.raises(ParseError) as info:
        parse_idx(struct.pack(">II", 0x1234, 0))
    assert info.value.offset == 0
    with pytest.raises(ParseError):
        parse_idx(_images()[:-1])
    with pytest.raises(FormatError):
        parse_idx(_images() + b"\x00")


def test_image_validation() -> None:
    with pytest.raises(ScRangeError):
        Image(np.full((2, 2), 1.5))
    with pytest.raises(ScRangeError):
        Image(np.zeros((2, 2)), label=10)
    with pytest.raises(ScRangeError):
        Image(np.zeros(4))


def test_load_pairs_images_with_labels(tmp_path) -> None:
    (tmp_path / "img").write_bytes(_images())
    (tmp_path / "lab").write_bytes(_labels([1, 9]))
    dataset = load_idx(tmp_path / "img", tmp_path / "lab")
    assert len(dataset) == 2
    assert [img.label for img in dataset] == [1, 9]
    assert dataset.head(1)[0].shape == (3, 3)
    assert load_idx(tmp_path / "img")[0].label is None


def test_label_count_mismatch(tmp_path) -> None:
    (tmp_path / "img").write_bytes(_images())
    (tmp_path / "lab").write_bytes(_labels([1]))
    with pytest.raises(FormatError):
        load_idx(tmp_path / "img", tmp_path / "lab")


def test_load_mnist_reads_gzip_files(tmp_path) -> None:
    with gzip.open(tmp_path / "t10k-images-idx3-ubyte.gz", "wb") as handle:
        handle.write(_images(count=3))
    (tmp_path / "t10k-labels-idx1-ubyte").write_bytes(_labels([0, 1, 2]))
    dataset = load_mnist(tmp_path)
    assert [img.label for img in dataset] == [0, 1, 2]
    with pytest.raises(FileNotFoundError):
        load_mnist(tmp_path, "train")
