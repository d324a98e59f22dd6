"""
stochastic/sng.py — Stochastic number generators.

An SNG compares a target probability against a stream of k-bit words.
Words come either from a Fibonacci LFSR with a maximal-length feedback
polynomial or from a bit-reversed counter that visits every k-bit value once
per 2^k steps. Stepping is table-driven: the whole orbit of a polynomial is
built once and a generator only carries its position on it.

Consecutive LFSR states are shifted copies of each other, so an LFSR
generator leaps a whole word (at least k steps) between emitted words. The
leap is coprime to the period, so one period still visits every state once.
"""
from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from scdcnn.core.config import settings
from scdcnn.core.errors import ContractError
from scdcnn.core.models import Encoding, GeneratorMode
from scdcnn.stochastic.streams import BitStream, check_range

logger = logging.getLogger(__name__)

MIN_WIDTH = 8
MAX_WIDTH = 24
MAX_POLYNOMIALS = 64

SeedLike = Union[int, Sequence[int]]


# ── GF(2) polynomial arithmetic ────────────────────────────────────────────


def _prime_factors(n: int) -> list[int]:
    factors: list[int] = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        factors.append(n)
    return factors


def _gf2_mulmod(a: int, b: int, modulus: int, degree: int) -> int:
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if (a >> degree) & 1:
            a ^= modulus
    return result


def _gf2_powmod(base: int, exponent: int, modulus: int, degree: int) -> int:
    result = 1
    while exponent:
        if exponent & 1:
            result = _gf2_mulmod(result, base, modulus, degree)
        base = _gf2_mulmod(base, base, modulus, degree)
        exponent >>= 1
    return result


def is_maximal_length(width: int, taps: int) -> bool:
    """True when x^width + Σ_{i∈taps} x^i is primitive, i.e. the LFSR has period 2^width − 1."""
    if not taps & 1 or taps >> width:
        return False
    modulus = (1 << width) | taps
    order = (1 << width) - 1
    x = 0b10
    if _gf2_powmod(x, order, modulus, width) != 1:
        return False
    return all(_gf2_powmod(x, order // q, modulus, width) != 1 for q in _prime_factors(order))


@lru_cache(maxsize=None)
def primitive_taps(width: int) -> tuple[int, ...]:
    """Tap masks of the first MAX_POLYNOMIALS maximal-length polynomials of this width."""
    _check_width(width)
    found: list[int] = []
    for taps in range(1, 1 << width, 2):
        if is_maximal_length(width, taps):
            found.append(taps)
            if len(found) == MAX_POLYNOMIALS:
                break
    logger.debug("[SNG] %d maximal-length polynomials cached for width %d", len(found), width)
    return tuple(found)


# ── Orbit tables ───────────────────────────────────────────────────────────


@lru_cache(maxsize=256)
def _orbit(width: int, taps: int) -> tuple[np.ndarray, np.ndarray]:
    """(register values in visiting order from state 1, index of each state in that order)."""
    period = (1 << width) - 1
    orbit = np.empty(period, dtype=np.int64)
    reg = 1
    top = width - 1
    for i in range(period):
        orbit[i] = reg
        feedback = (reg & taps).bit_count() & 1
        reg = (reg >> 1) | (feedback << top)
    if reg != 1:
        raise ContractError(f"taps {taps:#x} are not maximal-length for width {width}")
    position = np.full(1 << width, -1, dtype=np.int64)
    position[orbit] = np.arange(period, dtype=np.int64)
    orbit.setflags(write=False)
    position.setflags(write=False)
    return orbit, position


@lru_cache(maxsize=None)
def _orbit_table(width: int) -> tuple[np.ndarray, np.ndarray]:
    rows = [_orbit(width, taps) for taps in primitive_taps(width)]
    orbits = np.stack([r[0] for r in rows])
    positions = np.stack([r[1] for r in rows])
    return orbits, positions


@lru_cache(maxsize=None)
def _bit_reverse_table(width: int) -> np.ndarray:
    values = np.arange(1 << width, dtype=np.int64)
    reversed_values = np.zeros_like(values)
    for bit in range(width):
        reversed_values |= ((values >> bit) & 1) << (width - 1 - bit)
    reversed_values.setflags(write=False)
    return reversed_values


@lru_cache(maxsize=None)
def word_stride(width: int) -> int:
    """Orbit steps between emitted LFSR words: the smallest s ≥ width coprime to 2^width − 1."""
    period = (1 << width) - 1
    stride = width
    while math.gcd(stride, period) != 1:
        stride += 1
    return stride


def _check_width(width: int) -> None:
    if not MIN_WIDTH <= width <= MAX_WIDTH:
        raise ContractError(f"generator width must lie in [{MIN_WIDTH}, {MAX_WIDTH}], got {width}")


def width_for_length(length: int, floor: Optional[int] = None) -> int:
    """Smallest width ≥ floor whose comparator cycle covers a stream of this length."""
    base = floor or settings.SCDCNN_SNG_WIDTH
    needed = math.ceil(math.log2(length)) if length > 1 else 1
    return min(MAX_WIDTH, max(base, needed))


# ── Generator state ────────────────────────────────────────────────────────


class SngState:
    """Single-owner k-bit word source."""

    def __init__(
        self,
        width: Optional[int] = None,
        *,
        taps: Optional[int] = None,
        seed: int = 1,
        mode: GeneratorMode = "lfsr",
    ) -> None:
        self.width = width or settings.SCDCNN_SNG_WIDTH
        _check_width(self.width)
        self.mode = mode
        self._mask = (1 << self.width) - 1
        if mode == "lfsr":
            self.taps = taps if taps is not None else primitive_taps(self.width)[0]
            if not is_maximal_length(self.width, self.taps):
                raise ContractError(
                    f"taps {self.taps:#x} do not give a maximal-length sequence at width {self.width}"
                )
            register = seed & self._mask
            if register == 0:
                raise ContractError("an all-zero seed locks the LFSR")
            self._orbit, position = _orbit(self.width, self.taps)
            self._index = int(position[register])
            self._stride = word_stride(self.width)
        elif mode == "counter_exact":
            self.taps = 0
            self._stride = 1
            self._orbit = _bit_reverse_table(self.width)
            self._index = seed & self._mask
        else:
            raise ContractError(f"unknown generator mode {mode!r}")

    @property
    def period(self) -> int:
        return int(self._orbit.size)

    @property
    def register(self) -> int:
        """The word the next step will emit."""
        return int(self._orbit[self._index])

    @property
    def scale(self) -> int:
        return 1 << self.width

    def next_words(self, count: int) -> np.ndarray:
        if count < 0:
            raise ContractError(f"cannot draw {count} words")
        idx = (self._index + np.arange(count, dtype=np.int64) * self._stride) % self.period
        self._index = (self._index + count * self._stride) % self.period
        return self._orbit[idx]

    def next_index(self, n: int) -> int:
        """One uniform choice in [0, n) from the next word."""
        word = int(self.next_words(1)[0])
        return (word * n) >> self.width

    def __repr__(self) -> str:
        return f"SngState(mode={self.mode}, width={self.width}, taps={self.taps:#x}, register={self.register:#x})"


def generate_stream(value: float, encoding: Encoding, length: int, gen: SngState) -> BitStream:
    if length < 1:
        raise ContractError(f"stream length must be positive, got {length}")
    check_range(value, encoding)
    p = value if encoding == "unipolar" else (value + 1.0) / 2.0
    words = gen.next_words(length)
    return BitStream(words < p * gen.scale, encoding)


# ── Per-trial allocation ───────────────────────────────────────────────────


class StreamFactory:
    """Hands out independent generators (distinct polynomial and seed per stream) from one seed."""

    def __init__(
        self,
        seed: SeedLike,
        *,
        width: Optional[int] = None,
        mode: GeneratorMode = "lfsr",
    ) -> None:
        self.width = width or settings.SCDCNN_SNG_WIDTH
        _check_width(self.width)
        self.mode = mode
        self._rng = np.random.default_rng(seed)
        self._offsets: dict[int, int] = {}
        self._issued = 0

    def width_for(self, length: Optional[int]) -> int:
        if not length:
            return self.width
        return width_for_length(length, self.width)

    def _poly_offset(self, width: int) -> int:
        if width not in self._offsets:
            self._offsets[width] = int(self._rng.integers(len(primitive_taps(width))))
        return self._offsets[width]

    def generator(self, length: Optional[int] = None) -> SngState:
        width = self.width_for(length)
        if self.mode == "counter_exact":
            seed = int(self._rng.integers(0, 1 << width))
            self._issued += 1
            return SngState(width, seed=seed, mode="counter_exact")
        taps_list = primitive_taps(width)
        taps = taps_list[(self._poly_offset(width) + self._issued) % len(taps_list)]
        seed = int(self._rng.integers(1, 1 << width))
        self._issued += 1
        return SngState(width, taps=taps, seed=seed)

    def encode(self, value: float, encoding: Encoding, length: int) -> BitStream:
        return generate_stream(value, encoding, length, self.generator(length))

    def word_matrix(self, count: int, length: int) -> tuple[np.ndarray, int]:
        """(count, L) words from `count` fresh generators, plus their width."""
        if length < 1:
            raise ContractError(f"stream length must be positive, got {length}")
        width = self.width_for(length)
        steps = np.arange(length, dtype=np.int64)
        if self.mode == "counter_exact":
            starts = self._rng.integers(0, 1 << width, size=count)
            words = _bit_reverse_table(width)[(starts[:, None] + steps) & ((1 << width) - 1)]
        else:
            orbits, positions = _orbit_table(width)
            rows = (self._poly_offset(width) + self._issued + np.arange(count)) % orbits.shape[0]
            seeds = self._rng.integers(1, 1 << width, size=count)
            starts = positions[rows, seeds]
            steps = steps * word_stride(width)
            words = orbits[rows[:, None], (starts[:, None] + steps) % orbits.shape[1]]
        self._issued += count
        return words, width

    def select_matrix(self, count: int, n: int, length: int) -> np.ndarray:
        """(count, L) uniform choices in [0, n), one independent selector per row."""
        words, width = self.word_matrix(count, length)
        return (words * n) >> width

    def encode_matrix(self, values: Sequence[float] | np.ndarray, encoding: Encoding, length: int) -> np.ndarray:
        """(n, L) bits; row i is what generate_stream would emit for values[i] on its own generator."""
        vals = np.asarray(values, dtype=np.float64).reshape(-1)
        if vals.size:
            check_range(float(vals.min()), encoding)
            check_range(float(vals.max()), encoding)
        words, width = self.word_matrix(vals.size, length)
        p = vals if encoding == "unipolar" else (vals + 1.0) / 2.0
        return (words < (p * (1 << width))[:, None]).astype(np.uint8)

    def encode_many(self, values: Sequence[float] | np.ndarray, encoding: Encoding, length: int) -> list[BitStream]:
        return [BitStream(row, encoding) for row in self.encode_matrix(values, encoding, length)]


__all__ = [
    "SngState",
    "StreamFactory",
    "generate_stream",
    "is_maximal_length",
    "primitive_taps",
    "width_for_length",
    "word_stride",
]
