"""Combinational gates and the saturating linear state machine."""

from dataclasses import dataclass, replace

import numpy as np

from ._kernels import stanh_cycles
from .streams import BitStream

__all__ = [
    "and_gate",
    "mux_gate",
    "xor_gate",
    "not_gate",
    "LinearFsm",
    "fsm_step",
    "stanh_output",
    "stanh_stream",
]


def _check_lengths(*streams: BitStream) -> int:
    n = streams[0].length
    for s in streams[1:]:
        if s.length != n:
            raise ValueError(f"stream length mismatch: {s.length} != {n}")
    return n


def and_gate(a: BitStream, b: BitStream) -> BitStream:
    """Bitwise AND; multiplies the encoded values of independent inputs."""
    n = _check_lengths(a, b)
    return BitStream(a.words & b.words, n)


def xor_gate(a: BitStream, b: BitStream) -> BitStream:
    """Bitwise XOR; computes a + b - 2ab for independent inputs."""
    n = _check_lengths(a, b)
    return BitStream(a.words ^ b.words, n)


def mux_gate(a: BitStream, b: BitStream, sel: BitStream) -> BitStream:
    """Per-bit select: output a where sel is 1, b elsewhere.

    With sel independent of the data inputs this is the scaled adder:
    the output encodes s*a + (1-s)*b.
    """
    n = _check_lengths(a, b, sel)
    return BitStream((sel.words & a.words) | (~sel.words & b.words), n)


def not_gate(a: BitStream) -> BitStream:
    """Bitwise complement; encodes 1 - a."""
    words = ~a.words
    tail = a.length & 63
    if tail:
        words[-1] &= np.uint64((1 << tail) - 1)
    return BitStream(words, a.length)


@dataclass(frozen=True)
class LinearFsm:
    """M-state saturating up/down machine; state stays within [0, M-1]."""

    num_states: int
    state: int

    def __post_init__(self):
        if self.num_states < 2:
            raise ValueError("need at least 2 states")
        if not 0 <= self.state < self.num_states:
            raise ValueError(f"state {self.state} outside [0, {self.num_states - 1}]")

    @classmethod
    def midpoint(cls, num_states: int) -> "LinearFsm":
        """Machine started at M // 2, the convention that minimizes warm-up bias."""
        return cls(num_states, num_states // 2)


def fsm_step(fsm: LinearFsm, direction_up: int, enable: int = 1) -> LinearFsm:
    """Advance one cycle; saturates at both ends, no-op when disabled."""
    if not enable:
        return fsm
    if direction_up:
        return replace(fsm, state=min(fsm.state + 1, fsm.num_states - 1))
    return replace(fsm, state=max(fsm.state - 1, 0))


def stanh_output(fsm: LinearFsm) -> int:
    """Moore output: 1 iff the current state is in the upper half.

    Sampled before any same-cycle update; requires an even state count.
    """
    if fsm.num_states % 2:
        raise ValueError("the upper-half output needs an even number of states")
    return 1 if fsm.state >= fsm.num_states // 2 else 0


def stanh_stream(x: BitStream, m: int, initial_state: int | None = None) -> BitStream:
    """Run the M-state chain over a stream, emitting the upper-half output.

    Each cycle emits the output of the current state, then moves up on a
    one and down on a zero.  The input-to-output map approximates a
    scaled and shifted tanh of the encoded value.
    """
    if m % 2:
        raise ValueError("the upper-half output needs an even number of states")
    s0 = m // 2 if initial_state is None else initial_state
    if not 0 <= s0 < m:
        raise ValueError(f"initial state {s0} outside [0, {m - 1}]")
    out, _ = stanh_cycles(x.to_bits(), m, s0)
    return BitStream.from_bits(out)
