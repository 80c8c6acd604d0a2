"""Closed-form output probabilities and stationary-distribution oracles.

The saturating up/down chain driven by i.i.d. inputs is a birth-death
Markov chain whose stationary distribution is geometric in the up/down
probability ratio r: P_i = r**i / sum_j r**j.  All closed forms here are
compositions of that distribution with the surrounding gates.  Ratio
powers are always evaluated in log space (as exp of k * log r) because
r**M overflows double precision for moderate M once the inputs approach
the interval ends.

``linear_solve_stationary`` deliberately avoids the geometric form: it
builds the transition matrix and solves the balance equations directly,
so it can serve as an independent cross-check of every closed form.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit, softmax

__all__ = [
    "StationaryDistribution",
    "ClosedFormResult",
    "stationary",
    "linear_solve_stationary",
    "oracle_smax",
    "stanh_closed",
    "closed_form",
    "smax_li_closed",
    "smax_yu_closed",
    "smax_novel_closed",
    "smin_closed",
    "tanh_reference",
]


@dataclass(frozen=True)
class StationaryDistribution:
    """Probability vector over the M chain states."""

    probs: np.ndarray

    def __post_init__(self):
        if self.probs.ndim != 1 or self.probs.size < 2:
            raise ValueError("need a vector of at least 2 state probabilities")
        if np.any(self.probs < 0) or abs(float(self.probs.sum()) - 1.0) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1")
        self.probs.setflags(write=False)

    @property
    def num_states(self) -> int:
        return self.probs.size

    def upper_half_mass(self) -> float:
        """Probability of the upper half of the states (even M only)."""
        if self.num_states % 2:
            raise ValueError("upper half needs an even number of states")
        return float(self.probs[self.num_states // 2 :].sum())

    def mean_state(self) -> float:
        """Expected state index, sum of i * P_i."""
        return float(np.arange(self.num_states) @ self.probs)


@dataclass(frozen=True)
class ClosedFormResult:
    """Closed-form output value plus the branch that produced it.

    branch is "regular" for the plain formula, "limit-a-equals-b" for the
    removable-singularity limit at equal inputs, and "boundary" when an
    input sits at an interval end and the value is the continuous limit.
    """

    c: float
    branch: str

    def __post_init__(self):
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"output probability {self.c} outside [0, 1]")


def _check_prob(name: str, v: float) -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {v}")
    return v


def _check_states(m: int) -> int:
    if m < 2:
        raise ValueError("need at least 2 states")
    return int(m)


def stationary(
    m: int,
    kind: str = "plain",
    *,
    x: float | None = None,
    a: float | None = None,
    b: float | None = None,
) -> StationaryDistribution:
    """Geometric stationary distribution of the M-state saturating chain.

    kind "plain" takes the single drive probability x (up/down ratio
    x / (1 - x)); kind "enabled" takes the two gated inputs a and b
    (ratio a(1-b) / (b(1-a))).  Inputs on the interval ends make the
    chain degenerate, so they raise; use the boundary limits of the
    closed-form operations instead.
    """
    m = _check_states(m)
    if kind == "plain":
        if x is None:
            raise ValueError("plain kind needs x")
        x = _check_prob("x", x)
        if x in (0.0, 1.0):
            raise ValueError("x on the boundary; use boundary limits")
        log_ratio = float(logit(x))
    elif kind == "enabled":
        if a is None or b is None:
            raise ValueError("enabled kind needs a and b")
        a = _check_prob("a", a)
        b = _check_prob("b", b)
        if a in (0.0, 1.0) or b in (0.0, 1.0):
            raise ValueError("a or b on the boundary; use boundary limits")
        log_ratio = float(logit(a) - logit(b))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    probs = softmax(log_ratio * np.arange(m, dtype=float))
    return StationaryDistribution(probs)


def linear_solve_stationary(up: float, down: float, m: int) -> np.ndarray:
    """Stationary vector of the saturating birth-death chain by linear solve.

    Builds the full transition matrix (up moves right, down moves left,
    attempts past either end stay put) and solves pi P = pi with the
    normalization row appended.  Independent of the geometric closed form
    on purpose; used as an oracle.
    """
    m = _check_states(m)
    if up < 0 or down < 0 or up + down > 1 + 1e-12:
        raise ValueError("need up, down >= 0 with up + down <= 1")
    if up == 0 or down == 0:
        raise ValueError("chain is degenerate when a transition rate is 0")
    trans = np.zeros((m, m))
    for i in range(m):
        trans[i, min(i + 1, m - 1)] += up
        trans[i, max(i - 1, 0)] += down
        trans[i, i] += 1.0 - up - down
    lhs = trans.T - np.eye(m)
    lhs[-1, :] = 1.0
    rhs = np.zeros(m)
    rhs[-1] = 1.0
    return np.linalg.solve(lhs, rhs)


def oracle_smax(kind: str, a: float, b: float, m: int) -> float:
    """Output probability via the linear-solve oracle composition.

    Composes the independently solved stationary vector with the gate
    probabilities of the selected architecture.  Interior inputs only.
    """
    a = _check_prob("a", a)
    b = _check_prob("b", b)
    m = _check_states(m)
    if kind == "li":
        pd = 0.5 * (1.0 + a - b)
        pi = linear_solve_stationary(pd, 1.0 - pd, m)
        s2 = float(pi[m // 2 :].sum())
        return s2 * a + (1.0 - s2) * b
    if kind == "yu":
        pi = linear_solve_stationary(a * (1.0 - b), b * (1.0 - a), m)
        s = float(pi[m // 2 :].sum())
        return s * a + (1.0 - s) * b
    if kind == "novel":
        pi = linear_solve_stationary(a * (1.0 - b), b * (1.0 - a), m)
        return b + a * (1.0 - b) * float(pi[m - 1])
    raise ValueError(f"unknown kind {kind!r}")


def _stanh_values(x, m):
    """Vectorized upper-half mass of the plain chain, exp((M/2) logit) form."""
    with np.errstate(all="ignore"):
        return expit(0.5 * m * logit(x))


def stanh_closed(x: float, m: int) -> float:
    """Stationary output probability of the M-state tanh-like element.

    Evaluates t / (1 + t) with t = (x / (1-x))**(M/2) in log space.  The
    interval ends are the step limits 0 and 1.
    """
    x = _check_prob("x", x)
    m = _check_states(m)
    if m % 2:
        raise ValueError("the upper-half output needs an even number of states")
    return float(_stanh_values(x, m))


def closed_form(kind: str, a, b, m) -> np.ndarray:
    """Vectorized closed-form max output for one architecture.

    Accepts scalars or broadcastable arrays of input probabilities.
    Removable singularities at a == b and the interval ends are handled
    by explicit limit branches, never by the raw expression.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(a > 1) or np.any(b < 0) or np.any(b > 1):
        raise ValueError("input probabilities must be in [0, 1]")
    m = _check_states(m)
    with np.errstate(all="ignore"):
        if kind == "li":
            s = _stanh_values(0.5 * (1.0 + a - b), m)
            return s * a + (1.0 - s) * b
        if kind == "yu":
            s = expit(0.5 * m * (logit(a) - logit(b)))
            return np.where(a == b, a, s * a + (1.0 - s) * b)
        if kind == "novel":
            den = np.expm1(m * (logit(b) - logit(a)))
            tie = b + b * (1.0 - b) / m
            return np.where(a == b, tie, b + (b - a) / den)
    raise ValueError(f"unknown kind {kind!r}")


def _branch(kind: str, a: float, b: float) -> str:
    if a == b:
        return "limit-a-equals-b"
    if kind == "li":
        return "boundary" if abs(a - b) == 1.0 else "regular"
    return "boundary" if a in (0.0, 1.0) or b in (0.0, 1.0) else "regular"


def _clip01(c: float) -> float:
    # One-ulp excursions from the final rounding step land back on [0, 1].
    return min(1.0, max(0.0, c))


def smax_li_closed(a: float, b: float, m: int) -> ClosedFormResult:
    """Comparator-based max: c = a + (b-a) / (1 + ((1+a-b)/(1+b-a))**(M/2))."""
    a = _check_prob("a", a)
    b = _check_prob("b", b)
    return ClosedFormResult(
        _clip01(float(closed_form("li", a, b, m))), _branch("li", a, b)
    )


def smax_yu_closed(a: float, b: float, m: int) -> ClosedFormResult:
    """Gated-chain max: c = a + (b-a) / (1 + (a(1-b)/(b(1-a)))**(M/2))."""
    a = _check_prob("a", a)
    b = _check_prob("b", b)
    return ClosedFormResult(
        _clip01(float(closed_form("yu", a, b, m))), _branch("yu", a, b)
    )


def smax_novel_closed(a: float, b: float, m: int) -> ClosedFormResult:
    """Shift-register max: c = b + (b-a) / ((b(1-a)/(a(1-b)))**M - 1).

    At a == b the 0/0 ratio is replaced by its first-order series limit
    c = b + b(1-b)/M (expand the ratio as 1 + eps/(b(1-b)) for a = b - eps).
    """
    a = _check_prob("a", a)
    b = _check_prob("b", b)
    return ClosedFormResult(
        _clip01(float(closed_form("novel", a, b, m))), _branch("novel", a, b)
    )


def smin_closed(kind: str, a: float, b: float, m: int) -> ClosedFormResult:
    """Min output probability as the exact dual of the max form.

    The li and yu circuits swap the final multiplexer inputs, which gives
    c_min = a + b - c_max identically; the shift-register circuit
    complements inputs and output, giving c_min = 1 - c_max(1-a, 1-b).
    Both duals also satisfy c_max + c_min = a + b.
    """
    a = _check_prob("a", a)
    b = _check_prob("b", b)
    if kind in ("li", "yu"):
        c = a + b - float(closed_form(kind, a, b, m))
    elif kind == "novel":
        c = 1.0 - float(closed_form("novel", 1.0 - a, 1.0 - b, m))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return ClosedFormResult(_clip01(c), _branch(kind, a, b))


def tanh_reference(x: float, m: int) -> float:
    """Hyperbolic form of the chain output, 1/2 + tanh((M/4) ln(x/(1-x)))/2.

    Algebraically identical to stanh_closed on (0, 1); kept as a second
    route for identity tests.
    """
    x = _check_prob("x", x)
    if x in (0.0, 1.0):
        return x
    return 0.5 + 0.5 * math.tanh(0.25 * m * math.log(x / (1.0 - x)))
