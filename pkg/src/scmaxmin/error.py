"""Finite-stream error analysis of the shift-register max circuit.

For streams of length N the circuit deviates from an exact max through
three bit-level events:

* right overflow: the register is full and another excess one arrives,
  injecting an extra one into the output (per-cycle probability
  P_top * a * (1-b), with P_top the top-state mass of the occupancy chain);
* left overflow: the register is empty and a drain arrives, emitting a
  one that should have been absorbed (P_0 * b * (1-a));
* remaining ones: bits still stored when the streams end, which are
  missing from the output (mean occupancy of the chain).

Averaged over inputs drawn uniformly from the unit square, the expected
error probability is the sum of two triangular integrals: the right
overflow rate where the first input is the smaller one, and the absolute
difference of left-overflow and remaining-ones rates where it is the
larger.  Longer registers suppress overflows but trap more remaining
ones, so for each stream length a finite register length minimizes the
expected error.

Quadrature maps each triangle onto the unit square by squeezing the short
axis (a = u*b on one side, b = v*a on the other, Jacobian b or a), then
applies a tensor midpoint or Gauss-Legendre rule.  Nodes never touch the
square boundary or the diagonal, where the integrands have removable
singularities and a kink.  Every reported value is refined by doubling
the resolution until successive estimates agree to a relative tolerance.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import logit

from .circuits import smax_novel
from .analytic import closed_form
from .streams import StreamGenerator, mix64

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "ErrorRow",
    "ErrorReport",
    "MonteCarloResult",
    "p_err_right",
    "p_err_left",
    "expected_added",
    "expected_remaining",
    "p_err_a_gt_b",
    "expected_abs_error",
    "expected_error_probability",
    "lower_bound",
    "optimal_length",
    "monte_carlo_error",
    "DEFAULT_TRIALS",
    "DESK_SCALE_TRIALS",
]

DEFAULT_TRIALS = 10_000
DESK_SCALE_TRIALS = 2_000

SCHEMES = ("midpoint-grid", "gauss-legendre-per-triangle")


class QuadratureError(RuntimeError):
    """Raised when resolution doubling fails to converge."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Numerical integration settings.

    resolution is the node count per axis of the starting rule; it is
    doubled up to max_doublings times until the reported value changes by
    less than rel_tol relative.
    """

    scheme: str = "midpoint-grid"
    resolution: int = 512
    rel_tol: float = 1e-4
    max_doublings: int = 3

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.resolution < 32:
            raise ValueError("resolution must be >= 32")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.max_doublings < 0:
            raise ValueError("max_doublings must be >= 0")


# ---------------------------------------------------------------------------
# Stable building blocks of the occupancy-chain geometry.  t is the log of
# the up/down ratio, t = logit(a) - logit(b); expm1 keeps the expressions
# exact near t = 0 and saturates cleanly at the interval ends.
# ---------------------------------------------------------------------------


def _top_state_mass(t, m):
    """P_{M-1} = expm1(-t) / expm1(-M t); 1/M at t = 0."""
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        v = np.expm1(-t) / np.expm1(-m * t)
    return np.where(t == 0.0, 1.0 / m, v)


def _mean_state(t, m):
    """Mean state index 1/expm1(-t) - M/expm1(-M t).

    The two terms grow like 1/t near the origin, so a short series
    (M-1)/2 + (M**2 - 1) t / 12 replaces the difference for tiny t.
    """
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        v = 1.0 / np.expm1(-t) - m / np.expm1(-m * t)
    series = 0.5 * (m - 1) + (m * m - 1) * t / 12.0
    return np.where(np.abs(t) < 1e-6, series, v)


def _log_ratio(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return float(logit(a) - logit(b))


def _check_inputs(a: float, b: float, m: int) -> int:
    if not 0.0 <= a <= 1.0 or not 0.0 <= b <= 1.0:
        raise ValueError("input probabilities must be in [0, 1]")
    if m < 2:
        raise ValueError("need at least 2 states")
    return int(m)


def _on_boundary(a: float, b: float) -> bool:
    return a in (0.0, 1.0) or b in (0.0, 1.0)


def p_err_right(a: float, b: float, m: int) -> float:
    """Per-cycle right-overflow probability, P_{M-1} * a * (1-b).

    Models the error when the first input encodes the smaller value.
    Boundary inputs return the limit 0 of the applicable region.
    """
    m = _check_inputs(a, b, m)
    if _on_boundary(a, b):
        return 0.0
    return float(_top_state_mass(_log_ratio(a, b), m)) * a * (1.0 - b)


def p_err_left(a: float, b: float, m: int) -> float:
    """Per-cycle left-overflow probability, P_0 * b * (1-a).

    Mirror of p_err_right for the case where the first input encodes the
    larger value.  Boundary inputs return the limit 0.
    """
    m = _check_inputs(a, b, m)
    if _on_boundary(a, b):
        return 0.0
    return float(_top_state_mass(-_log_ratio(a, b), m)) * b * (1.0 - a)


def expected_added(n: float, a: float, b: float, m: int) -> float:
    """Expected count of ones added by left overflows over n cycles."""
    if n < 1:
        raise ValueError("stream length must be >= 1")
    return n * p_err_left(a, b, m)


def expected_remaining(a: float, b: float, m: int) -> float:
    """Expected ones left in the register, the mean occupancy sum i * P_i."""
    m = _check_inputs(a, b, m)
    if a == b:
        return 0.5 * (m - 1)
    with np.errstate(invalid="ignore"):
        t = float(logit(a) - logit(b))
    return float(_mean_state(t, m))


def p_err_a_gt_b(a: float, b: float, m: int, n: float) -> float:
    """Error probability |P_0 b (1-a) - mean occupancy / n|.

    The left-overflow rate and the remaining-ones penalty act in opposite
    directions; pass n = math.inf for the infinite-stream limit where
    only the left overflows survive.
    """
    if n < 1:
        raise ValueError("stream length must be >= 1")
    remaining = 0.0 if math.isinf(n) else expected_remaining(a, b, m) / n
    return abs(p_err_left(a, b, m) - remaining)


# ---------------------------------------------------------------------------
# Triangle quadrature.  Nodes live in the open lower triangle a < b; the
# upper-triangle integral of f is evaluated on the same nodes as the
# lower-triangle integral of f with swapped arguments.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _triangle_nodes(resolution: int, scheme: str):
    """Flattened (A, B, WB, T) node arrays for the triangle 0 < a < b < 1.

    WB already carries the b Jacobian factor of the squeeze substitution;
    T = logit(A) - logit(B) is cached because every chain field needs it.
    """
    if scheme == "midpoint-grid":
        u = (np.arange(resolution) + 0.5) / resolution
        w = np.full(resolution, 1.0 / resolution)
    else:
        x, wx = np.polynomial.legendre.leggauss(resolution)
        u = 0.5 * (x + 1.0)
        w = 0.5 * wx
    uu, bb = np.meshgrid(u, u, indexing="ij")
    ww = np.outer(w, w) * bb
    aa = uu * bb
    a_flat = aa.ravel()
    b_flat = bb.ravel()
    t_flat = logit(a_flat) - logit(b_flat)
    return a_flat, b_flat, ww.ravel(), t_flat


@lru_cache(maxsize=4)
def _overflow_fields(m: int, resolution: int, scheme: str):
    """Node values of the overflow and remaining-ones rates.

    G is the right-overflow rate on the lower triangle; by symmetry it is
    also the left-overflow rate on the swapped (upper) triangle, where R
    is the matching mean occupancy.
    """
    a, b, wb, t = _triangle_nodes(resolution, scheme)
    g = _top_state_mass(t, m) * a * (1.0 - b)
    r = _mean_state(-t, m)
    return g, r, wb


def _check_states_arg(m: int) -> int:
    if m < 2:
        raise ValueError("need at least 2 states")
    return int(m)


def _refine(evaluate, quad: QuadratureConfig, label: str) -> float:
    resolution = quad.resolution
    prev = evaluate(resolution)
    if quad.max_doublings == 0:
        # Explicit opt-out of the convergence check, single-shot estimate.
        return prev
    for _ in range(quad.max_doublings):
        resolution *= 2
        cur = evaluate(resolution)
        if abs(cur - prev) <= quad.rel_tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise QuadratureError(
        f"{label} did not converge to rel {quad.rel_tol:g} within "
        f"{quad.max_doublings} doublings from resolution {quad.resolution}"
    )


def expected_abs_error(
    kind, m: int, quad: QuadratureConfig = QuadratureConfig()
) -> float:
    """Expected |max(a, b) - c| over the unit square for one architecture.

    The square is split along the diagonal (the integrand kink) and each
    triangle is integrated separately.  kind is "li", "yu" or "novel", or
    an SmaxArchitecture.
    """
    kind = getattr(kind, "kind", kind)
    m = _check_states_arg(m)

    def at(resolution: int) -> float:
        a, b, wb, _ = _triangle_nodes(resolution, quad.scheme)
        lower = np.abs(b - closed_form(kind, a, b, m))
        upper = np.abs(b - closed_form(kind, b, a, m))
        return float(wb @ (lower + upper))

    return _refine(at, quad, f"expected_abs_error({kind}, m={m})")


def _error_probability_at(m: int, n: float, resolution: int, scheme: str) -> float:
    g, r, wb = _overflow_fields(m, resolution, scheme)
    if math.isinf(n):
        return 2.0 * float(wb @ g)
    return float(wb @ g) + float(wb @ np.abs(g - r / n))


def expected_error_probability(
    m: int, n: float, quad: QuadratureConfig = QuadratureConfig()
) -> float:
    """Expected finite-stream error probability for M = L + 1 states.

    Integrates the right-overflow rate over the half where the first
    input is smaller and |left-overflow rate - remaining/n| over the
    other half; the two triangles partition the unit square.  n may be
    math.inf, which drops the remaining-ones penalty and reduces to
    lower_bound.
    """
    m = _check_states_arg(m)
    if n < 1:
        raise ValueError("stream length must be >= 1")
    return _refine(
        lambda resolution: _error_probability_at(m, n, resolution, quad.scheme),
        quad,
        f"expected_error_probability(m={m}, n={n})",
    )


def lower_bound(m: int, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """Infinite-stream error limit: only the overflow rates remain."""
    m = _check_states_arg(m)
    return _refine(
        lambda resolution: _error_probability_at(m, math.inf, resolution, quad.scheme),
        quad,
        f"lower_bound(m={m})",
    )


@dataclass(frozen=True)
class ErrorRow:
    """One register length in an error report."""

    l: int
    analytic: float
    lower_bound: float
    empirical_mean: float | None = None
    empirical_std_error: float | None = None
    trials: int | None = None


@dataclass(frozen=True)
class ErrorReport:
    """Analytic (and optionally empirical) error over register lengths."""

    n: float
    rows: tuple
    l_opt: int

    def __post_init__(self):
        best = min(r.analytic for r in self.rows)
        chosen = next(r for r in self.rows if r.l == self.l_opt)
        if chosen.analytic != best:
            raise ValueError("l_opt must attain the minimum analytic value")


def optimal_length(
    n: float, l_range, quad: QuadratureConfig = QuadratureConfig()
) -> tuple[int, ErrorReport]:
    """Best register length for stream length n over the given lengths.

    Evaluates the expected error probability at every length (with
    M = L + 1 states), breaking ties toward the smaller length.  Returns
    the winner together with the full table, including the
    infinite-stream lower bound per length.
    """
    lengths = sorted({int(l) for l in l_range})
    if not lengths:
        raise ValueError("l_range must be non-empty")
    if lengths[0] < 1:
        raise ValueError("register lengths must be >= 1")
    rows = []
    for l in lengths:
        rows.append(
            ErrorRow(
                l=l,
                analytic=expected_error_probability(l + 1, n, quad),
                lower_bound=lower_bound(l + 1, quad),
            )
        )
    best = min(rows, key=lambda row: (row.analytic, row.l))
    return best.l, ErrorReport(n=n, rows=tuple(rows), l_opt=best.l)


class MonteCarloResult(NamedTuple):
    mean: float
    std_error: float


def monte_carlo_error(
    n: int,
    l: int,
    trials: int = DEFAULT_TRIALS,
    master_seed: int = 0,
) -> MonteCarloResult:
    """Empirical mean error of the shift-register circuit over random trials.

    Each trial draws a and b uniformly from [0, 1] (sub-seeds derived
    from the master seed and the trial index), generates independent
    streams, runs the circuit and scores the ones-count deviation
    |ones(C) - max(ones(A), ones(B))| / n.  The reference is the realized
    input with the larger encoded value, so the per-trial error is
    exactly the overflow and remaining-ones count that the expected-error
    integral models, with no generator sampling noise added.

    Deterministic for a fixed master seed, independent of scheduling.
    Returns the mean and its standard error over trials.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if l < 1:
        raise ValueError("register length must be >= 1")
    gen = StreamGenerator(master_seed)
    scale = 2.0**64
    errs = np.empty(trials)
    for trial in range(trials):
        a = mix64(master_seed, trial, 1) / scale
        b = mix64(master_seed, trial, 2) / scale
        sa = gen.generate(a, n, sub_seed=mix64(trial, 1))
        sb = gen.generate(b, n, sub_seed=mix64(trial, 2))
        run = smax_novel(sa, sb, l)
        errs[trial] = abs(run.output.ones() - max(sa.ones(), sb.ones())) / n
    std_error = 0.0 if trials < 2 else float(errs.std(ddof=1) / math.sqrt(trials))
    return MonteCarloResult(float(errs.mean()), std_error)
