"""Maxima of normalized random-walk partial sums and their universality bound.

The running maximum max_j n^(-1/2) (x_1 + ... + x_j) is the hard max of the
family of prefix sums f_j(x) = n^(-1/2) sum_{i<=j} x_i, j = 1..n.  The family
is linear with c1 = n^(-1/2), so lambda_3 = n^(-3/2) exactly and |family| = n,
and the alpha-optimized max bound becomes

    K(g) [ gamma^(1/3) n^(-1/6) (log n)^(2/3) + gamma n^(-1/2) ].

Under Gaussian steps the maximum converges in law to |Z|, Z standard normal;
the Kolmogorov-Smirnov distance to that half-normal reference is reported as
a secondary sanity statistic (the finite-n bound above is the actual claim).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .core import (
    GapReport,
    InfiniteGammaError,
    SmoothFunction,
    TestFunction,
    paired_functional_values,
    summarize_gap,
)
from .distributions import DistributionSpec, third_abs_moment
from .smoothmax import FunctionFamily, optimized_max_bound

__all__ = [
    "walk_family",
    "max_partial_sums",
    "erdos_kac_bound",
    "half_normal_reference",
    "ks_to_half_normal",
    "WalkReport",
    "erdos_kac_experiment",
]


def walk_family(n: int) -> FunctionFamily:
    """Prefix-mean family f_j(x) = n^(-1/2) sum_{i<=j} x_i, j = 1..n."""
    if n < 1:
        raise ValueError("need at least one step")
    root = 1.0 / math.sqrt(n)

    def make_member(j: int) -> SmoothFunction:
        def value(x):
            return root * float(np.sum(x[:j]))

        def partial(i, p, x):
            return root if (p == 1 and i < j) else 0.0

        return SmoothFunction(n=n, value=value, partial=partial,
                              name=f"prefix[{j}/{n}]")

    members = tuple(make_member(j) for j in range(1, n + 1))
    return FunctionFamily(n=n, members=members, c1=root, c2=0.0, c3=0.0,
                          size=n, name=f"walk[{n}]")


def max_partial_sums(x) -> float:
    """max over prefixes of the normalized partial sums, one O(n) pass."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("need a nonempty step vector")
    return float(np.max(np.cumsum(x))) / math.sqrt(x.size)


def erdos_kac_bound(g: TestFunction, gamma: float, n: int) -> float:
    """K(g) [ gamma^(1/3) n^(-1/6) (log n)^(2/3) + gamma n^(-1/2) ]."""
    if math.isinf(gamma):
        raise InfiniteGammaError("the bound needs a finite third moment")
    if n < 2:
        raise ValueError("need at least two steps")
    return optimized_max_bound(g, gamma, n, walk_family(n))


def half_normal_reference(t):
    """CDF of |Z| for standard normal Z: erf(t / sqrt 2) for t >= 0, else 0."""
    t = np.asarray(t, dtype=float)
    out = np.where(t >= 0.0, erf(np.maximum(t, 0.0) / math.sqrt(2.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def ks_to_half_normal(sample) -> float:
    """Kolmogorov-Smirnov distance of a sample to the half-normal reference."""
    s = np.sort(np.asarray(sample, dtype=float))
    if s.size == 0:
        raise ValueError("need a nonempty sample")
    cdf = half_normal_reference(s)
    grid = np.arange(1, s.size + 1) / s.size
    return float(np.max(np.maximum(np.abs(grid - cdf),
                                   np.abs(grid - 1.0 / s.size - cdf))))


@dataclass(frozen=True)
class WalkReport:
    """Running-max universality gap plus the half-normal KS diagnostic."""

    n: int
    dist_x: str
    dist_y: str
    report: GapReport
    ks_distance: float   # KS of the Y-side maxima to the half-normal

    @property
    def passed(self) -> bool:
        return self.report.passed

    CSV_COLUMNS = ("n", "distX", "distY", "replicates", "gap", "bound",
                   "ks_distance", "seed")

    def csv_row(self) -> tuple:
        r = self.report
        return (self.n, self.dist_x, self.dist_y, r.replicates, r.mc_gap,
                r.theoretical_bound, self.ks_distance, r.seed)

    def to_json_dict(self) -> dict:
        r = self.report
        return {
            "n": self.n, "distX": self.dist_x, "distY": self.dist_y,
            "replicates": r.replicates, "gap": r.mc_gap,
            "std_error": r.std_error, "bound": r.theoretical_bound,
            "passed": r.passed, "ks_distance": self.ks_distance,
            "seed": r.seed,
        }


def erdos_kac_experiment(spec_x: DistributionSpec, spec_y: DistributionSpec,
                         n: int, g: TestFunction, replicates: int,
                         master_seed: int, threads: int = 1) -> WalkReport:
    """Paired running-max gap against the optimized bound.

    The KS diagnostic is computed from the Y-side maxima (put the Gaussian
    law on the Y side to probe the half-normal limit directly).
    """
    gamma = max(third_abs_moment(spec_x), third_abs_moment(spec_y))
    bound = erdos_kac_bound(g, gamma, n)
    experiment = f"erdos-kac/{spec_x.label}-vs-{spec_y.label}/n{n}"
    vx, vy = paired_functional_values(
        max_partial_sums, max_partial_sums, spec_x, spec_y, n, replicates,
        master_seed, experiment, threads=threads,
    )
    diffs = np.array([g.value(a) - g.value(b) for a, b in zip(vx, vy)])
    report = summarize_gap(diffs, experiment_id=experiment, n=n,
                           theoretical_bound=bound, seed=master_seed)
    return WalkReport(n=n, dist_x=spec_x.label, dist_y=spec_y.label,
                      report=report, ks_distance=ks_to_half_normal(vy))
