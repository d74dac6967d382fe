"""Influence measures, coordinate-swap bounds, and the paired Monte Carlo engine.

The quantity driving everything is the maximum single-coordinate influence of
a smooth function f on I^n,

    lambda_r(f) = sup { |d_i^p f(x)|^(r/p) : i <= n, p <= r, x in I^n },

for r = 1, 2, 3.  For two independent input vectors X, Y with matched first
and second moments coordinate-wise, replacing X by Y one coordinate at a time
and Taylor-expanding the telescoping increments yields

    |E g(f(X)) - E g(f(Y))| <= C1(g) lambda_2(f) * sum_i [tail2_i(K)]
                             + C2(g) lambda_3(f) * sum_i [body3_i(K)]

for every truncation level K > 0, where tail2/body3 are the truncated moments
of both laws and

    C1(g) = |g'|oo + |g''|oo,   C2(g) = |g'|oo/6 + |g''|oo/2 + |g'''|oo/6.

When both laws have finite third absolute moments the K -> oo limit gives the
third-moment form  2 C2(g) gamma n lambda_3(f).

``mc_gap`` estimates the left side by paired Monte Carlo (common replicate
indices, independent counter-based streams for X and Y) and reports it against
a caller-supplied bound with a 3-sigma noise margin.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import DistributionSpec, make_vector_sampler, \
    third_abs_moment
from .rng import RandomStream

__all__ = [
    "LindebergError",
    "InfiniteGammaError",
    "SmoothFunction",
    "TestFunction",
    "LambdaKind",
    "LambdaEstimate",
    "GapReport",
    "mean_function",
    "monomial",
    "test_function",
    "c_constants",
    "swap_bound",
    "third_moment_bound",
    "fd_partial",
    "estimate_lambda",
    "telescoping_decomposition",
    "paired_functional_values",
    "summarize_gap",
    "mc_gap",
    "clt_experiment",
]


class LindebergError(Exception):
    """Base error for this package."""


class InfiniteGammaError(LindebergError):
    """A third-moment bound was requested for a law with E|X|^3 = oo."""


# ---------------------------------------------------------------------------
# function containers
# ---------------------------------------------------------------------------

FULL_LINE = (-math.inf, math.inf)


@dataclass(frozen=True)
class SmoothFunction:
    """A map on I^n, thrice differentiable in each coordinate.

    ``value(x)`` may return a real or complex scalar; ``partial(i, p, x)``
    is the p-th partial in coordinate i (p in {1, 2, 3}).  ``domain`` is an
    open interval containing 0, shared by all coordinates.
    """

    n: int
    value: Callable[[np.ndarray], complex]
    partial: Callable[[int, int, np.ndarray], complex]
    domain: tuple[float, float] = FULL_LINE
    name: str = ""

    def __post_init__(self):
        lo, hi = self.domain
        if not (lo < 0.0 < hi):
            raise ValueError("domain must be an open interval containing 0")


@dataclass(frozen=True)
class TestFunction:
    """A scalar g with certified sup norms of its first three derivatives."""

    name: str
    value: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Callable[[float], float]
    d3: Callable[[float], float]
    norm1: float
    norm2: float
    norm3: float


def mean_function(n: int) -> SmoothFunction:
    """f(x) = n^(-1/2) sum_i x_i, the classical CLT functional."""
    root = 1.0 / math.sqrt(n)

    def value(x):
        return root * float(np.sum(x))

    def partial(i, p, x):
        return root if p == 1 else 0.0

    return SmoothFunction(n=n, value=value, partial=partial, name=f"mean[{n}]")


def monomial(n: int, power: int, coordinate: int = 0,
             domain: tuple[float, float] = FULL_LINE) -> SmoothFunction:
    """f(x) = x_c ** power, handy for hand-checkable influence values."""

    def value(x):
        return float(x[coordinate]) ** power

    def partial(i, p, x):
        if i != coordinate or p > power:
            return 0.0
        coef = 1.0
        for k in range(p):
            coef *= power - k
        return coef * float(x[coordinate]) ** (power - p)

    return SmoothFunction(n=n, value=value, partial=partial, domain=domain,
                          name=f"x{coordinate}^{power}")


# ---------------------------------------------------------------------------
# registered test functions
# ---------------------------------------------------------------------------

def _tanh_d2(x: float) -> float:
    t = math.tanh(x)
    return -2.0 * t * (1.0 - t * t)


def _tanh_d3(x: float) -> float:
    t = math.tanh(x)
    return (6.0 * t * t - 2.0) * (1.0 - t * t)


def _clipped_square(clip: float = 10.0, width: float = 5.0) -> TestFunction:
    # g(x) = x^2 exactly on [-clip, clip], spliced by a degree-6 polynomial on
    # [clip, clip+width] matching value and first three derivatives at both
    # ends, constant beyond.  Even in x, C^3 everywhere, bounded derivatives.
    c, w = float(clip), float(width)
    mat = np.array(
        [
            [4 * w**3, 5 * w**4, 6 * w**5],
            [12 * w**2, 20 * w**3, 30 * w**4],
            [24 * w, 60 * w**2, 120 * w**3],
        ]
    )
    a4, a5, a6 = np.linalg.solve(mat, -np.array([2 * c + 2 * w, 2.0, 0.0]))

    def q(s, order):
        if order == 0:
            return c * c + 2 * c * s + s * s + a4 * s**4 + a5 * s**5 + a6 * s**6
        if order == 1:
            return 2 * c + 2 * s + 4 * a4 * s**3 + 5 * a5 * s**4 + 6 * a6 * s**5
        if order == 2:
            return 2 + 12 * a4 * s**2 + 20 * a5 * s**3 + 30 * a6 * s**4
        return 24 * a4 * s + 60 * a5 * s**2 + 120 * a6 * s**3

    plateau = q(w, 0)

    def deriv(x, order):
        ax, sgn = abs(x), (1.0 if x >= 0 else -1.0)
        odd = order % 2 == 1
        if ax <= c:
            base = (x * x, 2 * x, 2.0, 0.0)[order]
            return base
        if ax >= c + w:
            return plateau if order == 0 else 0.0
        val = q(ax - c, order)
        return sgn * val if odd else val

    ss = np.linspace(0.0, w, 200_001)
    safety = 1.0 + 1e-6  # grid certification: round the sup up, never down
    n1 = max(2 * c, float(np.max(np.abs(q(ss, 1))))) * safety
    n2 = max(2.0, float(np.max(np.abs(q(ss, 2))))) * safety
    n3 = float(np.max(np.abs(q(ss, 3)))) * safety
    return TestFunction(
        name="clipped_square",
        value=lambda x: deriv(x, 0),
        d1=lambda x: deriv(x, 1),
        d2=lambda x: deriv(x, 2),
        d3=lambda x: deriv(x, 3),
        norm1=n1,
        norm2=n2,
        norm3=n3,
    )


_TEST_FUNCTIONS: dict[str, TestFunction] = {
    "sin": TestFunction(
        name="sin",
        value=math.sin,
        d1=math.cos,
        d2=lambda x: -math.sin(x),
        d3=lambda x: -math.cos(x),
        norm1=1.0,
        norm2=1.0,
        norm3=1.0,
    ),
    "tanh": TestFunction(
        name="tanh",
        value=math.tanh,
        d1=lambda x: 1.0 - math.tanh(x) ** 2,
        d2=_tanh_d2,
        d3=_tanh_d3,
        norm1=1.0,
        norm2=4.0 / (3.0 * math.sqrt(3.0)),
        norm3=2.0,
    ),
    "identity": TestFunction(
        name="identity",
        value=lambda x: x,
        d1=lambda x: 1.0,
        d2=lambda x: 0.0,
        d3=lambda x: 0.0,
        norm1=1.0,
        norm2=0.0,
        norm3=0.0,
    ),
    "clipped_square": _clipped_square(),
}


def test_function(name: str) -> TestFunction:
    try:
        return _TEST_FUNCTIONS[name]
    except KeyError:
        raise ValueError(
            f"unknown test function {name!r}; "
            f"choose from {sorted(_TEST_FUNCTIONS)}"
        ) from None


# ---------------------------------------------------------------------------
# bound arithmetic
# ---------------------------------------------------------------------------

def c_constants(g: TestFunction) -> tuple[float, float]:
    """C1 = |g'| + |g''|;  C2 = |g'|/6 + |g''|/2 + |g'''|/6."""
    for nm in (g.norm1, g.norm2, g.norm3):
        if not math.isfinite(nm):
            raise ValueError("test function derivative norms must be finite")
    c1 = g.norm1 + g.norm2
    c2 = g.norm1 / 6.0 + g.norm2 / 2.0 + g.norm3 / 6.0
    return c1, c2


def swap_bound(c1: float, c2: float, lambda2: float, lambda3: float,
               tail_sum: float, body_sum: float) -> float:
    """Truncated-moment swap bound: C1 l2 T1(K) + C2 l3 T2(K).

    ``tail_sum`` is sum_i [E(X_i^2;|X_i|>K) + E(Y_i^2;|Y_i|>K)] and
    ``body_sum`` is sum_i [E(|X_i|^3;|X_i|<=K) + E(|Y_i|^3;|Y_i|<=K)].
    """
    vals = (c1, c2, lambda2, lambda3, tail_sum, body_sum)
    if any(v < 0.0 for v in vals):
        raise ValueError("swap bound inputs must be nonnegative")
    return c1 * lambda2 * tail_sum + c2 * lambda3 * body_sum


def third_moment_bound(c2: float, gamma: float, n: int, lambda3: float) -> float:
    """K -> oo form 2 C2 gamma n lambda_3; refuses infinite third moments."""
    if math.isinf(gamma):
        raise InfiniteGammaError(
            "third absolute moment is infinite; use swap_bound with a finite "
            "truncation level instead"
        )
    if c2 < 0.0 or gamma < 0.0 or lambda3 < 0.0 or n < 0:
        raise ValueError("third-moment bound inputs must be nonnegative")
    return 2.0 * c2 * gamma * n * lambda3


# ---------------------------------------------------------------------------
# finite differences (validation oracle for analytic partials)
# ---------------------------------------------------------------------------

_STENCILS = {
    # order: (offsets, weights, denominator power)
    1: ((-2, -1, 1, 2), (1.0, -8.0, 8.0, -1.0), 12.0),
    2: ((-2, -1, 0, 1, 2), (-1.0, 16.0, -30.0, 16.0, -1.0), 12.0),
    3: ((-3, -2, -1, 1, 2, 3), (1.0, -8.0, 13.0, -13.0, 8.0, -1.0), 8.0),
}


def fd_step(p: int, xi: float) -> float:
    """Default step: balances truncation against roundoff per order."""
    base = 1e-4 if p <= 2 else 8e-3
    return base * max(1.0, abs(xi))


def fd_partial(value: Callable[[np.ndarray], complex], i: int, p: int,
               x: np.ndarray, step: float | None = None,
               domain: tuple[float, float] = FULL_LINE) -> complex:
    """Central finite difference: 5-point stencil for p <= 2, 7-point for p = 3."""
    if p not in (1, 2, 3):
        raise ValueError("derivative order must be 1, 2 or 3")
    x = np.asarray(x, dtype=float)
    h = fd_step(p, x[i]) if step is None else float(step)
    offsets, weights, denom = _STENCILS[p]
    lo, hi = domain
    reach = max(abs(o) for o in offsets) * h
    if not (lo < x[i] - reach and x[i] + reach < hi):
        raise ValueError("finite-difference stencil escapes the domain")
    acc = 0.0
    for o, wgt in zip(offsets, weights):
        xo = x.copy()
        xo[i] = x[i] + o * h
        acc = acc + wgt * value(xo)
    return acc / (denom * h**p)


# ---------------------------------------------------------------------------
# empirical influence estimates
# ---------------------------------------------------------------------------

class LambdaKind(enum.Enum):
    ANALYTIC_BOUND = "analytic"
    EMPIRICAL_SUP = "empirical"


@dataclass(frozen=True)
class LambdaEstimate:
    lambda1: float
    lambda2: float
    lambda3: float
    kind: LambdaKind
    per_order_sup: tuple[float, float, float] = (0.0, 0.0, 0.0)


def estimate_lambda(f: SmoothFunction,
                    points: Sequence[np.ndarray]) -> LambdaEstimate:
    """Empirical sup of |d_i^p f(x)|^(r/p) over the given points.

    A lower bound on the true influence; the per-order sups are retained so
    the definitional scaling identity can be re-derived from them.
    """
    points = [np.asarray(pt, dtype=float) for pt in points]
    if not points:
        raise ValueError("estimate_lambda needs at least one point")
    sups = [0.0, 0.0, 0.0]
    for pt in points:
        if pt.shape != (f.n,):
            raise ValueError("point dimension mismatch")
        for i in range(f.n):
            for p in (1, 2, 3):
                mag = abs(f.partial(i, p, pt))
                if mag > sups[p - 1]:
                    sups[p - 1] = mag
    s1, s2, s3 = sups
    lam = [0.0, 0.0, 0.0]
    for r in (1, 2, 3):
        lam[r - 1] = max(sups[p - 1] ** (r / p) for p in range(1, r + 1))
    return LambdaEstimate(lambda1=lam[0], lambda2=lam[1], lambda3=lam[2],
                          kind=LambdaKind.EMPIRICAL_SUP,
                          per_order_sup=(s1, s2, s3))


# ---------------------------------------------------------------------------
# telescoping decomposition
# ---------------------------------------------------------------------------

def telescoping_decomposition(f: SmoothFunction, g: TestFunction,
                              x_draw: np.ndarray,
                              y_draw: np.ndarray) -> np.ndarray:
    """Per-coordinate increments h(Z_i) - h(Z_(i-1)) with h = g o f.

    Z_i = (x_1..x_i, y_(i+1)..y_n); consecutive evaluations share a cached
    value, so the increments sum to h(x) - h(y) up to one rounding per term.
    """
    x = np.asarray(x_draw, dtype=float)
    y = np.asarray(y_draw, dtype=float)
    if x.shape != (f.n,) or y.shape != (f.n,):
        raise ValueError("draw dimension mismatch")
    z = y.copy()
    h_prev = g.value(f.value(z))
    increments = np.empty(f.n)
    for i in range(f.n):
        z[i] = x[i]
        h_cur = g.value(f.value(z))
        increments[i] = h_cur - h_prev
        h_prev = h_cur
    return increments


# ---------------------------------------------------------------------------
# paired Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapReport:
    """Monte Carlo gap estimate vs a theoretical bound, with noise margin."""

    experiment_id: str
    n: int
    replicates: int
    mc_gap: float
    std_error: float
    theoretical_bound: float
    seed: int

    @property
    def passed(self) -> bool:
        return self.mc_gap <= self.theoretical_bound + 3.0 * self.std_error

    CSV_COLUMNS = ("experiment_id", "n", "replicates", "mc_gap",
                   "std_error", "bound", "passed", "seed")

    def csv_row(self) -> tuple:
        return (self.experiment_id, self.n, self.replicates, self.mc_gap,
                self.std_error, self.theoretical_bound, self.passed, self.seed)

    def to_json_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "n": self.n,
            "replicates": self.replicates,
            "mc_gap": self.mc_gap,
            "std_error": self.std_error,
            "bound": self.theoretical_bound,
            "passed": self.passed,
            "seed": self.seed,
        }


def _as_spec_list(spec, n: int) -> list[DistributionSpec]:
    if isinstance(spec, DistributionSpec):
        return [spec] * n
    specs = list(spec)
    if len(specs) != n:
        raise ValueError("per-coordinate spec list has wrong length")
    return specs


def paired_functional_values(eval_x: Callable[[np.ndarray], complex],
                             eval_y: Callable[[np.ndarray], complex],
                             spec_x, spec_y, n: int, replicates: int,
                             master_seed: int, experiment: str,
                             threads: int = 1,
                             dtype=float) -> tuple[np.ndarray, np.ndarray]:
    """Per-replicate functional values (eval_x(X_r), eval_y(Y_r)), paired.

    The sides share replicate indices but use independent counter-based
    streams.  Replicate r of each side is a pure function of (master_seed,
    experiment, side, r); results land in replicate-indexed arrays, so the
    reduction is independent of scheduling order.
    """
    if replicates < 100:
        raise ValueError("at least 100 replicates are required")
    draw_x = make_vector_sampler(_as_spec_list(spec_x, n))
    draw_y = make_vector_sampler(_as_spec_list(spec_y, n))
    vx = np.empty(replicates, dtype=dtype)
    vy = np.empty(replicates, dtype=dtype)

    def run_range(lo: int, hi: int) -> None:
        sx = RandomStream(master_seed, experiment + "/x")
        sy = RandomStream(master_seed, experiment + "/y")
        for r in range(lo, hi):
            vx[r] = eval_x(draw_x(sx.replicate(r)))
            vy[r] = eval_y(draw_y(sy.replicate(r)))

    if threads <= 1:
        run_range(0, replicates)
    else:
        chunk = max(100, -(-replicates // threads))
        ranges = [(lo, min(lo + chunk, replicates))
                  for lo in range(0, replicates, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda ab: run_range(*ab), ranges))
    return vx, vy


def summarize_gap(diffs: np.ndarray, *, experiment_id: str, n: int,
                  theoretical_bound: float, seed: int) -> GapReport:
    """Deterministic reduction of per-replicate differences to a GapReport."""
    reps = len(diffs)
    mean = math.fsum(diffs) / reps
    var = math.fsum((d - mean) ** 2 for d in diffs) / (reps - 1)
    return GapReport(
        experiment_id=experiment_id,
        n=n,
        replicates=reps,
        mc_gap=abs(mean),
        std_error=math.sqrt(var / reps),
        theoretical_bound=theoretical_bound,
        seed=seed,
    )


def mc_gap(f: SmoothFunction, g: TestFunction, spec_x, spec_y,
           replicates: int, master_seed: int, experiment: str = "mc-gap",
           theoretical_bound: float = 0.0, threads: int = 1) -> GapReport:
    """Paired estimate of |E g(f(X)) - E g(f(Y))| against a bound.

    With the default bound 0 the report is a pure noise check: it passes
    exactly when the estimated gap is within 3 standard errors of zero.
    """
    vx, vy = paired_functional_values(
        f.value, f.value, spec_x, spec_y, f.n, replicates, master_seed,
        experiment, threads=threads,
    )
    diffs = np.array([g.value(a) - g.value(b) for a, b in zip(vx, vy)])
    return summarize_gap(diffs, experiment_id=experiment, n=f.n,
                         theoretical_bound=theoretical_bound, seed=master_seed)


def clt_experiment(spec_x: DistributionSpec, spec_y: DistributionSpec, n: int,
                   g: TestFunction, replicates: int, master_seed: int,
                   threads: int = 1) -> GapReport:
    """Normalized-sum gap vs the exact third-moment bound C2 (g_x + g_y)/sqrt(n).

    The bound is the swap bound at K = oo: the tail channel vanishes and the
    body channel carries the full third moments of both laws.
    """
    gx = third_abs_moment(spec_x)
    gy = third_abs_moment(spec_y)
    if math.isinf(gx) or math.isinf(gy):
        raise InfiniteGammaError("CLT bound needs finite third moments")
    c1, c2 = c_constants(g)
    f = mean_function(n)
    bound = swap_bound(c1, c2, 1.0 / n, n**-1.5, 0.0, n * (gx + gy))
    return mc_gap(f, g, spec_x, spec_y, replicates, master_seed,
                  experiment=f"clt/{spec_x.label}-vs-{spec_y.label}/n{n}",
                  theoretical_bound=bound, threads=threads)
