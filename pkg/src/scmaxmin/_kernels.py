"""Jit-compiled inner loops for cycle-accurate simulation.

Every kernel consumes unpacked uint8 bit arrays and runs one clock cycle
per array element.  They are kept free of package imports so numba can
cache the compiled machine code next to this module.
"""

import numpy as np
from numba import njit

__all__ = [
    "stanh_cycles",
    "li_cycles",
    "yu_cycles",
    "novel_cycles",
    "lfsr_bits",
]


@njit(cache=True)
def stanh_cycles(x, m, s0):
    """Saturating up/down chain; emits 1 while the state is in the upper half.

    The output bit is a function of the state before the same-cycle update.
    """
    n = x.shape[0]
    out = np.empty(n, dtype=np.uint8)
    s = s0
    half = m // 2
    top = m - 1
    for i in range(n):
        out[i] = 1 if s >= half else 0
        if x[i] == 1:
            if s < top:
                s += 1
        elif s > 0:
            s -= 1
    return out, s


@njit(cache=True)
def li_cycles(a, b, sel, m, s0, swap):
    """Comparator-based max circuit.

    Per cycle: d = sel ? a : not b feeds the chain; the pre-update
    upper-half output steers the final multiplexer between a and b.
    swap=True exchanges the multiplexer data inputs, giving the min.
    """
    n = a.shape[0]
    out = np.empty(n, dtype=np.uint8)
    s = s0
    half = m // 2
    top = m - 1
    for i in range(n):
        hi = a[i] if s >= half else b[i]
        lo = b[i] if s >= half else a[i]
        out[i] = lo if swap else hi
        d = a[i] if sel[i] == 1 else 1 - b[i]
        if d == 1:
            if s < top:
                s += 1
        elif s > 0:
            s -= 1
    return out, s


@njit(cache=True)
def yu_cycles(a, b, m, s0, swap):
    """Two-input gated chain: a xor b enables the update, a picks direction.

    The pre-update upper-half output steers the final multiplexer;
    swap=True exchanges the multiplexer data inputs, giving the min.
    """
    n = a.shape[0]
    out = np.empty(n, dtype=np.uint8)
    s = s0
    half = m // 2
    top = m - 1
    for i in range(n):
        hi = a[i] if s >= half else b[i]
        lo = b[i] if s >= half else a[i]
        out[i] = lo if swap else hi
        if a[i] != b[i]:
            if a[i] == 1:
                if s < top:
                    s += 1
            elif s > 0:
                s -= 1
    return out, s


@njit(cache=True)
def novel_cycles(a, b, l):
    """Shift-register max circuit with occupancy counter s in [0, l].

    Cycle rule:
      a == b          -> emit b, register unchanged
      a = 0, b = 1    -> emit 1; drain one stored bit, or count a left
                         overflow when the register is empty
      a = 1, b = 0    -> register full: emit 1 and count a right
                         overflow; otherwise emit 0 and store the bit
    Returns (output bits, right overflows, left overflows, final occupancy).
    """
    n = a.shape[0]
    out = np.empty(n, dtype=np.uint8)
    s = 0
    o_r = 0
    o_l = 0
    for i in range(n):
        if a[i] == b[i]:
            out[i] = b[i]
        elif a[i] == 0:
            out[i] = 1
            if s > 0:
                s -= 1
            else:
                o_l += 1
        else:
            if s == l:
                out[i] = 1
                o_r += 1
            else:
                out[i] = 0
                s += 1
    return out, o_r, o_l, s


@njit(cache=True)
def lfsr_bits(n, width, tap_mask, state, threshold):
    """Fibonacci shift register bits: emit 1 while the register value is
    below the threshold, then shift left with the tap-parity feedback bit.
    """
    one = np.uint64(1)
    wmask = (one << width) - one
    out = np.empty(n, dtype=np.uint8)
    s = state
    for i in range(n):
        out[i] = 1 if s < threshold else 0
        v = s & tap_mask
        v ^= v >> np.uint64(32)
        v ^= v >> np.uint64(16)
        v ^= v >> np.uint64(8)
        v ^= v >> np.uint64(4)
        v ^= v >> np.uint64(2)
        v ^= v >> np.uint64(1)
        s = ((s << one) | (v & one)) & wmask
    return out
