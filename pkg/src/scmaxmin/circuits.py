"""Cycle-accurate max/min circuits over stochastic bit streams.

Three architectures are implemented:

* ``li``: a half-rate select stream and an inverted-b multiplexer drive a
  saturating chain whose upper-half output steers the final multiplexer.
* ``yu``: the xor of the inputs gates the chain update and the first
  input picks the direction; no auxiliary random stream is needed.
* ``novel``: a shift register of length L stores the running excess of
  ones of one input over the other; the register's rightmost cell is
  emitted when the excess is spent.  Exact per-run event counters are
  reported (right/left overflows, remaining stored ones).

Min variants exchange the final multiplexer data inputs (li, yu) or
complement inputs and output (novel).
"""

from dataclasses import dataclass

from ._kernels import li_cycles, novel_cycles, yu_cycles
from .logic import _check_lengths, not_gate
from .streams import BitStream

__all__ = [
    "SmaxArchitecture",
    "CircuitRun",
    "smax_li",
    "smin_li",
    "smax_yu",
    "smin_yu",
    "smax_novel",
    "smin_novel",
]

KINDS = ("li", "yu", "novel")


@dataclass(frozen=True)
class SmaxArchitecture:
    """Architecture selector: kind plus the state count M.

    For the shift-register architecture the register length is L = M - 1.
    """

    kind: str
    m: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.m < 2:
            raise ValueError("need at least 2 states")
        if self.kind in ("li", "yu") and self.m % 2:
            raise ValueError(f"{self.kind} needs an even number of states")

    @property
    def l(self) -> int:
        if self.kind != "novel":
            raise ValueError("only the shift-register architecture has a length")
        return self.m - 1


@dataclass(frozen=True)
class CircuitRun:
    """Output stream of a shift-register run plus its exact event counts.

    o_r counts emissions from a full register (extra ones in the output),
    o_l counts drain attempts on an empty register, o_s is the final
    occupancy (ones still stored when the streams end).
    """

    output: BitStream
    o_r: int
    o_l: int
    o_s: int
    final_state: int


def _check_even(m: int) -> None:
    if m < 2 or m % 2:
        raise ValueError(f"state count must be even and >= 2, got {m}")


def _initial_state(m: int, initial_state: int | None) -> int:
    s0 = m // 2 if initial_state is None else initial_state
    if not 0 <= s0 < m:
        raise ValueError(f"initial state {s0} outside [0, {m - 1}]")
    return s0


def smax_li(
    a: BitStream,
    b: BitStream,
    sel_half: BitStream,
    m: int,
    initial_state: int | None = None,
) -> BitStream:
    """Comparator-based max; sel_half must be an independent p = 1/2 stream."""
    _check_lengths(a, b, sel_half)
    _check_even(m)
    s0 = _initial_state(m, initial_state)
    out, _ = li_cycles(a.to_bits(), b.to_bits(), sel_half.to_bits(), m, s0, False)
    return BitStream.from_bits(out)


def smin_li(
    a: BitStream,
    b: BitStream,
    sel_half: BitStream,
    m: int,
    initial_state: int | None = None,
) -> BitStream:
    """Comparator-based min: same datapath with the final mux inputs swapped."""
    _check_lengths(a, b, sel_half)
    _check_even(m)
    s0 = _initial_state(m, initial_state)
    out, _ = li_cycles(a.to_bits(), b.to_bits(), sel_half.to_bits(), m, s0, True)
    return BitStream.from_bits(out)


def smax_yu(
    a: BitStream, b: BitStream, m: int, initial_state: int | None = None
) -> BitStream:
    """Gated-chain max; needs no auxiliary random stream."""
    _check_lengths(a, b)
    _check_even(m)
    s0 = _initial_state(m, initial_state)
    out, _ = yu_cycles(a.to_bits(), b.to_bits(), m, s0, False)
    return BitStream.from_bits(out)


def smin_yu(
    a: BitStream, b: BitStream, m: int, initial_state: int | None = None
) -> BitStream:
    """Gated-chain min: same datapath with the final mux inputs swapped."""
    _check_lengths(a, b)
    _check_even(m)
    s0 = _initial_state(m, initial_state)
    out, _ = yu_cycles(a.to_bits(), b.to_bits(), m, s0, True)
    return BitStream.from_bits(out)


def smax_novel(a: BitStream, b: BitStream, l: int) -> CircuitRun:
    """Shift-register max with exact event accounting.

    The register starts empty; its occupancy s (ones are left-aligned, so
    the integer is a lossless representation of the cell contents) obeys:

      a == b       : output b, s unchanged
      a = 0, b = 1 : output 1; s -= 1, or a left overflow when s = 0
      a = 1, b = 0 : s = L emits a 1 and counts a right overflow,
                     otherwise output 0 and s += 1

    Every one of b reappears at the same index of the output, and the
    counters satisfy ones(C) = ones(B) + o_r exactly.
    """
    _check_lengths(a, b)
    if l < 1:
        raise ValueError("register length must be >= 1")
    out, o_r, o_l, s = novel_cycles(a.to_bits(), b.to_bits(), l)
    return CircuitRun(BitStream.from_bits(out), o_r, o_l, s, s)


def smin_novel(a: BitStream, b: BitStream, l: int) -> CircuitRun:
    """Shift-register min: complement both inputs, run the max, complement
    the output.  Counters are reported from the inner max run.
    """
    inner = smax_novel(not_gate(a), not_gate(b), l)
    return CircuitRun(
        not_gate(inner.output), inner.o_r, inner.o_l, inner.o_s, inner.final_state
    )
