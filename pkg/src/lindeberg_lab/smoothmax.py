"""Soft-max smoothing of finite function families with its analytic derivatives.

For a finite family F of coordinatewise thrice differentiable functions and a
smoothing level alpha >= 1,

    F_alpha(x) = alpha^(-1) log sum_{f in F} exp(alpha f(x))

is a smooth upper proxy for the pointwise maximum, sandwiched within
alpha^(-1) log |F| of it.  Its coordinate derivatives are driven by the Gibbs
weights p(x, f) = exp(alpha f(x)) / Z(x) and scores a_i(x, f) = alpha d_i f(x):

    d_i F = e_i / alpha               with e_i = sum_f a_i p
    d_i p = (a_i - e_i) p
    d_i e_i = sum_f (p d_i a_i + a_i d_i p)
    d_i^2 p = (d_i a_i - d_i e_i) p + (a_i - e_i)^2 p
    d_i^2 e_i = sum_f (p d_i^2 a_i + 2 (d_i a_i)(d_i p) + a_i d_i^2 p)

The chain is implemented as exactly this recursion so each link can be audited
against its uniform bound (|e_i| <= alpha C1 and so on) term by term.

Values and partials stream over the family in fixed passes with O(1) state, so
implicitly defined exponential families (members given by an iterator) never
need to be materialized.  ``softmax_state``/``coordinate_chain`` additionally
expose the per-member weight and score arrays for diagnostic inspection of
modest-size families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import (
    InfiniteGammaError,
    LambdaEstimate,
    LambdaKind,
    SmoothFunction,
    TestFunction,
    c_constants,
    estimate_lambda,
)

__all__ = [
    "FunctionFamily",
    "SoftMaxState",
    "SoftMaxChain",
    "softmax_value",
    "softmax_state",
    "coordinate_chain",
    "softmax_partials",
    "softmax_function",
    "smoothed_lambda_bounds",
    "uniform_gap_bound",
    "max_swap_bound",
    "k_constant",
    "optimized_max_alpha",
    "optimized_max_bound",
    "estimate_family_lambda",
]

_MATERIALIZE_LIMIT = 1 << 22


@dataclass(frozen=True)
class FunctionFamily:
    """A finite family of smooth functions with family-wide derivative bounds.

    ``members`` is either a sequence of SmoothFunction or a zero-argument
    callable returning a fresh iterator (for families too large to hold in
    memory, e.g. all 2^N spin configurations).  ``c1, c2, c3`` are sup bounds
    on |d_i f|, |d_i^2 f|, |d_i^3 f| over all members, coordinates and points;
    they determine the family influence values exactly:

        lambda_2(F) = max(c1^2, c2),  lambda_3(F) = max(c1^3, c2^(3/2), c3).
    """

    n: int
    members: Sequence[SmoothFunction] | Callable[[], Iterable[SmoothFunction]]
    c1: float
    c2: float
    c3: float
    size: int
    log_size: float = field(default=math.nan)
    domain: tuple[float, float] = (-math.inf, math.inf)
    name: str = ""

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("a family must have at least one member")
        if any(c < 0.0 for c in (self.c1, self.c2, self.c3)):
            raise ValueError("derivative sup bounds must be nonnegative")
        if math.isnan(self.log_size):
            object.__setattr__(self, "log_size", math.log(self.size))

    def iter_members(self) -> Iterable[SmoothFunction]:
        if callable(self.members):
            return self.members()
        return iter(self.members)

    @property
    def lambda2(self) -> float:
        return max(self.c1**2, self.c2)

    @property
    def lambda3(self) -> float:
        return max(self.c1**3, self.c2**1.5, self.c3)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha >= 1.0:
        raise ValueError("smoothing level alpha must be >= 1")
    return alpha


def _shifted_max(family: FunctionFamily, alpha: float, x: np.ndarray) -> float:
    shift = -math.inf
    for f in family.iter_members():
        v = alpha * f.value(x)
        if v > shift:
            shift = v
    if shift == -math.inf:
        raise ValueError("family yielded no members")
    return shift


def softmax_value(family: FunctionFamily, alpha: float, x: np.ndarray) -> float:
    """alpha^(-1) log sum exp(alpha f(x)), max-shifted; O(1) memory in |F|."""
    alpha = _check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    shift = _shifted_max(family, alpha, x)
    acc = 0.0
    for f in family.iter_members():
        acc += math.exp(alpha * f.value(x) - shift)
    return (shift + math.log(acc)) / alpha


@dataclass(frozen=True)
class SoftMaxState:
    """Gibbs-weight state of F_alpha at one point, for a materialized family."""

    alpha: float
    point: np.ndarray
    value: float
    shift: float           # max_f alpha f(x)
    log_partition: float   # log Z = log sum exp(alpha f)
    weights: np.ndarray    # p(x, f), sums to 1
    members: tuple[SmoothFunction, ...]

    @property
    def partition(self) -> float:
        """Z itself; may overflow to inf for large alpha (use log_partition)."""
        try:
            return math.exp(self.log_partition)
        except OverflowError:
            return math.inf


def softmax_state(family: FunctionFamily, alpha: float,
                  x: np.ndarray) -> SoftMaxState:
    alpha = _check_alpha(alpha)
    if family.size > _MATERIALIZE_LIMIT:
        raise ValueError(
            "family too large to materialize weights; use the streaming ops"
        )
    x = np.asarray(x, dtype=float)
    members = tuple(family.iter_members())
    scaled = np.array([alpha * f.value(x) for f in members])
    shift = float(scaled.max())
    w = np.exp(scaled - shift)
    z = float(w.sum())
    return SoftMaxState(
        alpha=alpha,
        point=x,
        value=(shift + math.log(z)) / alpha,
        shift=shift,
        log_partition=shift + math.log(z),
        weights=w / z,
        members=members,
    )


@dataclass(frozen=True)
class SoftMaxChain:
    """Per-coordinate derivative chain of F_alpha, one link per recursion step."""

    i: int
    a: np.ndarray     # alpha d_i f, per member
    da: np.ndarray    # alpha d_i^2 f
    d2a: np.ndarray   # alpha d_i^3 f
    e: float          # sum a p
    dp: np.ndarray    # (a - e) p
    de: float         # sum (p da + a dp)
    d2p: np.ndarray   # (da - de) p + (a - e)^2 p
    d2e: float        # sum (p d2a + 2 da dp + a d2p)

    def partials(self, alpha: float) -> tuple[float, float, float]:
        return self.e / alpha, self.de / alpha, self.d2e / alpha


def coordinate_chain(family: FunctionFamily, state: SoftMaxState,
                     i: int) -> SoftMaxChain:
    """The derivative recursion at coordinate i with per-member arrays exposed."""
    alpha, x, p = state.alpha, state.point, state.weights
    a = np.array([alpha * f.partial(i, 1, x) for f in state.members])
    da = np.array([alpha * f.partial(i, 2, x) for f in state.members])
    d2a = np.array([alpha * f.partial(i, 3, x) for f in state.members])
    e = float(np.dot(a, p))
    dp = (a - e) * p
    de = float(np.sum(p * da + a * dp))
    d2p = (da - de) * p + (a - e) ** 2 * p
    d2e = float(np.sum(p * d2a + 2.0 * da * dp + a * d2p))
    return SoftMaxChain(i=i, a=a, da=da, d2a=d2a, e=e, dp=dp, de=de,
                        d2p=d2p, d2e=d2e)


def softmax_partials(family: FunctionFamily, alpha: float, x: np.ndarray,
                     i: int) -> tuple[float, float, float]:
    """(d_i F, d_i^2 F, d_i^3 F) by streaming the recursion; O(1) memory in |F|.

    Four passes over the family: the shift, then (Z, e_i), then d_i e_i, then
    d_i^2 e_i, each link evaluated per member exactly as in the recursion.
    """
    alpha = _check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    shift = _shifted_max(family, alpha, x)

    z = 0.0
    e_num = 0.0
    for f in family.iter_members():
        w = math.exp(alpha * f.value(x) - shift)
        z += w
        e_num += alpha * f.partial(i, 1, x) * w
    e = e_num / z

    de = 0.0
    for f in family.iter_members():
        p = math.exp(alpha * f.value(x) - shift) / z
        a = alpha * f.partial(i, 1, x)
        da = alpha * f.partial(i, 2, x)
        dp = (a - e) * p
        de += p * da + a * dp

    d2e = 0.0
    for f in family.iter_members():
        p = math.exp(alpha * f.value(x) - shift) / z
        a = alpha * f.partial(i, 1, x)
        da = alpha * f.partial(i, 2, x)
        d2a = alpha * f.partial(i, 3, x)
        dp = (a - e) * p
        d2p = (da - de) * p + (a - e) ** 2 * p
        d2e += p * d2a + 2.0 * da * dp + a * d2p

    return e / alpha, de / alpha, d2e / alpha


def softmax_function(family: FunctionFamily, alpha: float) -> SmoothFunction:
    """F_alpha wrapped as a SmoothFunction with analytic partials."""
    alpha = _check_alpha(alpha)

    def value(x):
        return softmax_value(family, alpha, x)

    def partial(i, p, x):
        return softmax_partials(family, alpha, x, i)[p - 1]

    return SmoothFunction(n=family.n, value=value, partial=partial,
                          domain=family.domain,
                          name=f"softmax[{family.name or 'family'},a={alpha:g}]")


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def smoothed_lambda_bounds(family: FunctionFamily,
                           alpha: float) -> tuple[float, float]:
    """Influence bounds of the smoothed max: (3 a lambda_2(F), 13 a^2 lambda_3(F))."""
    alpha = _check_alpha(alpha)
    return 3.0 * alpha * family.lambda2, 13.0 * alpha**2 * family.lambda3


def uniform_gap_bound(family: FunctionFamily, alpha: float) -> float:
    """alpha^(-1) log |F|: max_f f <= F_alpha <= max_f f + this, everywhere."""
    alpha = _check_alpha(alpha)
    return family.log_size / alpha


def max_swap_bound(g: TestFunction, alpha: float, family: FunctionFamily,
                   tail_sum: float, body_sum: float) -> float:
    """Swap bound for the max of a family, smoothed at level alpha.

    2|g'| alpha^(-1) log|F|  +  C1(g) (3 a l2) T1(K)  +  C2(g) (13 a^2 l3) T2(K).
    """
    if tail_sum < 0.0 or body_sum < 0.0:
        raise ValueError("truncated moment sums must be nonnegative")
    lam2_s, lam3_s = smoothed_lambda_bounds(family, alpha)
    c1, c2 = c_constants(g)
    smoothing = 2.0 * g.norm1 * family.log_size / alpha
    return smoothing + c1 * lam2_s * tail_sum + c2 * lam3_s * body_sum


def k_constant(g: TestFunction) -> float:
    """(19/3)|g'| + 13|g''| + (13/3)|g'''|, the optimized-alpha constant."""
    return 19.0 / 3.0 * g.norm1 + 13.0 * g.norm2 + 13.0 / 3.0 * g.norm3


def optimized_max_alpha(gamma: float, n: int, lambda3_family: float,
                        log_size: float) -> float:
    """The smoothing level [ (g n l3)^(-2/3) (log|F|)^(2/3) + 1 ]^(1/2)."""
    gnl = gamma * n * lambda3_family
    if gnl == 0.0:
        return math.inf if log_size > 0.0 else 1.0
    return math.sqrt(gnl ** (-2.0 / 3.0) * log_size ** (2.0 / 3.0) + 1.0)


def optimized_max_bound(g: TestFunction, gamma: float, n: int,
                        family: FunctionFamily) -> float:
    """Alpha-optimized max bound K(g) [ (g n l3)^(1/3) (log|F|)^(2/3) + g n l3 ]."""
    if math.isinf(gamma):
        raise InfiniteGammaError(
            "optimized max bound needs a finite third absolute moment"
        )
    if gamma < 0.0 or n < 1:
        raise ValueError("gamma must be nonnegative and n positive")
    gnl = gamma * n * family.lambda3
    return k_constant(g) * (gnl ** (1.0 / 3.0) * family.log_size ** (2.0 / 3.0)
                            + gnl)


def estimate_family_lambda(family: FunctionFamily,
                           points) -> LambdaEstimate:
    """Empirical family influence: member-wise sup of the empirical sups."""
    sups = [0.0, 0.0, 0.0]
    count = 0
    for f in family.iter_members():
        est = estimate_lambda(f, points)
        sups = [max(s, e) for s, e in zip(sups, est.per_order_sup)]
        count += 1
    if count == 0:
        raise ValueError("family yielded no members")
    lam = [max(sups[p - 1] ** (r / p) for p in range(1, r + 1))
           for r in (1, 2, 3)]
    return LambdaEstimate(lambda1=lam[0], lambda2=lam[1], lambda3=lam[2],
                          kind=LambdaKind.EMPIRICAL_SUP,
                          per_order_sup=tuple(sups))
