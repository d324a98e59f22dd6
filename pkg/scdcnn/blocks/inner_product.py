"""
blocks/inner_product.py — Inner-product (convolution) blocks.

Every variant multiplies x_i·w_i with XNOR (AND for the unipolar OR block)
and differs only in how the n products are summed.
"""
from __future__ import annotations

from typing import Optional, Sequence, Union

import numpy as np

from scdcnn.core.errors import ContractError
from scdcnn.core.models import ApcMode, IpVariant
from scdcnn.stochastic.arithmetic import (
    TwoLineAccumulator,
    apc_counts,
    multiply_bits,
    mux_bits,
)
from scdcnn.stochastic.sng import SngState
from scdcnn.stochastic.streams import (
    BinaryStream,
    BitStream,
    TwoLineStream,
    decode_stream,
    stack_bits,
)


OR_PRESCALE_GRID: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)

InnerProductOutput = Union[BitStream, BinaryStream, TwoLineStream]


def _products(xs: Sequence[BitStream], ws: Sequence[BitStream], variant: IpVariant) -> tuple[np.ndarray, str]:
    if len(xs) != len(ws):
        raise ContractError(f"inner product needs |xs| == |ws|, got {len(xs)} and {len(ws)}")
    if not xs:
        raise ContractError("inner product over zero inputs")
    x_bits, x_enc = stack_bits(xs)
    w_bits, w_enc = stack_bits(ws)
    if x_enc != w_enc:
        raise ContractError(f"inputs are {x_enc} but weights are {w_enc}")
    if x_bits.shape[1] != w_bits.shape[1]:
        raise ContractError(
            f"inputs have length {x_bits.shape[1]} but weights have length {w_bits.shape[1]}"
        )
    if x_enc != "bipolar" and variant != "or":
        raise ContractError(f"the {variant} inner product works on bipolar streams only")
    return multiply_bits(x_bits, w_bits, x_enc), x_enc


def inner_product(
    xs: Sequence[BitStream],
    ws: Sequence[BitStream],
    variant: IpVariant,
    *,
    select: Optional[SngState] = None,
    apc_mode: ApcMode = "exact",
) -> InnerProductOutput:
    """Sum of products per variant.

    or        OR over the products; callers that prescaled their inputs by a
              factor f recover the sum with ``or_estimate(out, f)``
    mux       (1/n)·Σ x_i w_i as a bipolar stream; ``select`` drives the MUX
    apc       per-cycle popcount of the products
    two_line  non-scaled sum through chained two-line adders
    """
    products, encoding = _products(xs, ws, variant)
    if variant == "or":
        return BitStream(np.bitwise_or.reduce(products, axis=0), encoding)
    if variant == "mux":
        if select is None:
            raise ContractError("the MUX inner product needs its own select generator")
        return BitStream(mux_bits(products, select), encoding)
    if variant == "apc":
        if products.shape[0] < 2:
            raise ContractError("a parallel counter needs at least 2 inputs")
        return BinaryStream(apc_counts(products, apc_mode), products.shape[0])
    if variant == "two_line":
        terms = [TwoLineStream.from_bipolar(BitStream(row, "bipolar")) for row in products]
        return TwoLineAccumulator().sum(terms)
    raise ContractError(f"unknown inner-product variant {variant!r}")


def or_estimate(stream: BitStream, factor: float) -> float:
    """Scale an OR-summed output back by the prescale factor its inputs were divided by."""
    return factor * decode_stream(stream)


def mux_estimate(stream: BitStream, n: int) -> float:
    """Undo the MUX's 1/n scaling."""
    return n * decode_stream(stream)


__all__ = [
    "OR_PRESCALE_GRID",
    "InnerProductOutput",
    "inner_product",
    "or_estimate",
    "mux_estimate",
]
