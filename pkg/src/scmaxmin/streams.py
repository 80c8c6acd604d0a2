"""Stochastic bit streams and seeded stream generation.

A stochastic bit stream encodes a value x in [0, 1] as the probability of
a one at each position (unipolar format).  Streams are stored packed, 64
bits per word, little-endian bit order within a word: bit i of a stream
lives at word i // 64, bit position i % 64.  Words past the stream length
are kept zero so that population counts and word-wise gate operations
never need tail masking.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "BitStream",
    "StreamGenerator",
    "MAXIMAL_LFSR_TAPS",
    "mix64",
]

_WORD = np.dtype("<u8")
_GAMMA = 0x9E3779B97F4A7C15
_U64 = 0xFFFFFFFFFFFFFFFF


def _mix_step(z: int) -> int:
    """One splitmix64 finalization round on a 64-bit integer."""
    z &= _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Mix integers into one 64-bit value (order-sensitive, documented).

    Each part is absorbed as ``state = mix_step(state + part * GAMMA)``
    with the splitmix64 golden-ratio increment, so seeds derived from a
    master seed plus stream/trial indices are reproducible and decorrelated
    regardless of how work is scheduled.
    """
    z = 0
    for p in parts:
        z = _mix_step(z + (int(p) & _U64) * _GAMMA)
    return z


def _splitmix64_block(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of the splitmix64 stream for ``seed``."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & _U64) + idx * np.uint64(_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 uint8 array into little-endian 64-bit words."""
    packed = np.packbits(bits, bitorder="little")
    n_words = (len(bits) + 63) // 64
    padded = np.zeros(n_words * 8, dtype=np.uint8)
    padded[: len(packed)] = packed
    return padded.view(_WORD)


@dataclass(frozen=True)
class BitStream:
    """Immutable packed bit stream of a fixed length.

    ``words`` holds the packed bits (64 per word, little-endian bit order
    within a word, zero padding past ``length``).  Instances are safe to
    share across threads.
    """

    words: np.ndarray
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("stream length must be >= 1")
        expected = (self.length + 63) // 64
        if self.words.dtype != _WORD or self.words.shape != (expected,):
            raise ValueError("words must be a packed <u8 array of the right size")
        self.words.setflags(write=False)

    @classmethod
    def from_bits(cls, bits) -> "BitStream":
        """Build a stream from an iterable or array of 0/1 values."""
        arr = np.ascontiguousarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("bits must be a non-empty 1-d sequence")
        if np.any(arr > 1):
            raise ValueError("bits must be 0 or 1")
        return cls(_pack_bits(arr), int(arr.size))

    @classmethod
    def from01(cls, text: str) -> "BitStream":
        """Parse an ASCII '0'/'1' string (trailing newline allowed)."""
        text = text.rstrip("\n")
        if not text or set(text) - {"0", "1"}:
            raise ValueError("expected a non-empty string of '0'/'1'")
        return cls.from_bits(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))

    def to_bits(self) -> np.ndarray:
        """Unpacked uint8 array of length ``length``."""
        return np.unpackbits(
            self.words.view(np.uint8), count=self.length, bitorder="little"
        )

    def to01(self) -> str:
        """ASCII dump, one '0'/'1' character per bit (debugging aid)."""
        return (self.to_bits() + ord("0")).tobytes().decode()

    def dump(self, fp) -> None:
        """Write the ASCII dump, newline-terminated, to a text file."""
        fp.write(self.to01() + "\n")

    def ones(self) -> int:
        """Number of one bits, o(X)."""
        return int(np.bitwise_count(self.words).sum())

    def rate(self) -> Fraction:
        """Rate of ones o(X)/N as an exact fraction."""
        return Fraction(self.ones(), self.length)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError("bit index out of range")
        return int((self.words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return self.length == other.length and bool(
            np.array_equal(self.words, other.words)
        )

    def __hash__(self):
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        head = self.to01()[:32]
        tail = "..." if self.length > 32 else ""
        return f"BitStream({head}{tail}, length={self.length})"


# Maximal-length tap positions (1-indexed) for the feedback polynomial of
# each supported register width; feedback is the XOR of the tapped bits,
# shifted in at the LSB as the register shifts left.
MAXIMAL_LFSR_TAPS = {
    8: (8, 6, 5, 4),
    16: (16, 15, 13, 4),
    24: (24, 23, 22, 17),
    32: (32, 22, 2, 1),
}


def _taps_to_mask(taps) -> int:
    mask = 0
    for p in taps:
        mask |= 1 << (int(p) - 1)
    return mask


@dataclass(frozen=True)
class StreamGenerator:
    """Deterministic source of independent Bernoulli bit streams.

    Two modes:

    * ``pseudo-random`` (default): each output word is one splitmix64
      value; a bit is one when its word falls below ``round(p * 2**64)``.
      Output is a pure function of (master_seed, sub_seed, p, n) and is
      identical across platforms.
    * ``lfsr``: a maximal-length Fibonacci shift register of
      ``lfsr_width`` bits is stepped once per output bit and its value is
      compared against ``round(p * 2**width)``.  This mirrors the
      threshold-comparator generators used in hardware and is an
      approximation for realism experiments, not a bit-exact model of any
      particular device.
    """

    master_seed: int = 0
    mode: str = "pseudo-random"
    lfsr_width: int = 32
    lfsr_taps: tuple = field(default=None)

    def __post_init__(self):
        if self.mode not in ("pseudo-random", "lfsr"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "lfsr":
            if not 2 <= self.lfsr_width <= 63:
                raise ValueError("lfsr_width must be in [2, 63]")
            if self.lfsr_taps is None and self.lfsr_width not in MAXIMAL_LFSR_TAPS:
                raise ValueError(
                    f"no default taps for width {self.lfsr_width}; pass lfsr_taps"
                )

    def generate(self, p: float, n: int, sub_seed: int = 0) -> BitStream:
        """Draw an n-bit stream whose bits are one with probability p.

        Distinct ``sub_seed`` values give streams that are independent of
        each other for every practical purpose; repeated calls with the
        same arguments return bit-identical streams.
        """
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability must be in [0, 1], got {p}")
        if n < 1:
            raise ValueError("stream length must be >= 1")
        seed = mix64(self.master_seed, sub_seed)
        if self.mode == "pseudo-random":
            bits = self._pseudo_random_bits(p, n, seed)
        else:
            bits = self._lfsr_bits(p, n, seed)
        return BitStream(_pack_bits(bits), n)

    def _pseudo_random_bits(self, p: float, n: int, seed: int) -> np.ndarray:
        threshold = round(p * 2.0**64)
        if threshold <= 0:
            return np.zeros(n, dtype=np.uint8)
        if threshold > _U64:
            return np.ones(n, dtype=np.uint8)
        words = _splitmix64_block(seed, n)
        return (words < np.uint64(threshold)).astype(np.uint8)

    def _lfsr_bits(self, p: float, n: int, seed: int) -> np.ndarray:
        from ._kernels import lfsr_bits

        width = self.lfsr_width
        taps = self.lfsr_taps or MAXIMAL_LFSR_TAPS[width]
        mask = _taps_to_mask(taps)
        state = seed & ((1 << width) - 1)
        if state == 0:
            state = 1
        # Threshold fits a uint64 because width <= 63; p = 1 maps to
        # 2**width, which exceeds every register value.
        threshold = round(p * (1 << width))
        return lfsr_bits(
            n, np.uint64(width), np.uint64(mask), np.uint64(state),
            np.uint64(threshold),
        )
