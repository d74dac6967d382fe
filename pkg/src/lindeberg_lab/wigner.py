"""Wigner matrices, resolvents, and Stieltjes-transform derivative calculus.

A Wigner matrix of order N is built from n = N(N+1)/2 independent coordinates
x_ij (i <= j), placed symmetrically with scale N^(-1/2).  For a spectral point
z off the real axis, the normalized trace of the resolvent

    m(x, z) = (1/N) tr (A(x) - z I)^(-1)

is smooth in every coordinate, and differentiating the resolvent identity
gives closed forms for the first three coordinate partials:

    d1 = -(1/N) tr(E G^2),  d2 = (2/N) tr(E G E G^2),
    d3 = -(6/N) tr(E G E G E G^2),

where E = dA/dx_ij carries N^(-1/2) at (i,j) and (j,i).  Because G is
symmetric, each trace collapses to a handful of entries of G and G^2, so all
n coordinate partials cost O(n) after one O(N^3) factorization.  Spectral
calculus bounds the partials uniformly:

    |d1| <= 2 |v|^-2 N^(-3/2), |d2| <= 4 |v|^-3 N^-2, |d3| <= 12 |v|^-4 N^(-5/2),

with v = Im z, which yields the influence values used by the swap bound, and
summing tail second moments at K = eps sqrt(N) yields the classical vanishing
condition for semicircle convergence.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .core import (
    GapReport,
    SmoothFunction,
    TestFunction,
    c_constants,
    paired_functional_values,
    summarize_gap,
    swap_bound,
)
from .distributions import DistributionSpec, truncated_second_moment, \
    truncated_third_moment

__all__ = [
    "WignerLayout",
    "build_matrix",
    "resolvent",
    "stieltjes",
    "stieltjes_partials",
    "stieltjes_partials_all",
    "stieltjes_function",
    "DerivativeBounds",
    "derivative_bounds",
    "semicircle_stieltjes",
    "pastur_term",
    "SemicircleReport",
    "semicircle_experiment",
]


@dataclass(frozen=True)
class WignerLayout:
    """Flat indexing of the n = N(N+1)/2 independent entries, i <= j row-major."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("matrix order must be positive")

    @property
    def coordinate_count(self) -> int:
        return self.size * (self.size + 1) // 2

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.size) for j in range(i, self.size)]

    def index(self, i: int, j: int) -> int:
        if j < i:
            i, j = j, i
        if not 0 <= i <= j < self.size:
            raise ValueError("pair out of range")
        # row i starts after rows 0..i-1, which hold N, N-1, ... entries
        return i * self.size - i * (i - 1) // 2 + (j - i)


def build_matrix(layout: WignerLayout, x: np.ndarray) -> np.ndarray:
    """Real symmetric matrix with entries N^(-1/2) x_ij mirrored below."""
    N = layout.size
    x = np.asarray(x, dtype=float)
    if x.shape != (layout.coordinate_count,):
        raise ValueError("coordinate vector has wrong length")
    A = np.zeros((N, N))
    iu = np.triu_indices(N)
    A[iu] = x / math.sqrt(N)
    A = A + np.triu(A, 1).T
    return A


def _check_z(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0.0:
        raise ValueError("spectral point must have nonzero imaginary part")
    return z


def resolvent(layout: WignerLayout, x: np.ndarray, z: complex) -> np.ndarray:
    """(A(x) - z I)^(-1) by dense pivoted LU on the complex shifted matrix."""
    z = _check_z(z)
    N = layout.size
    shifted = build_matrix(layout, x).astype(complex)
    shifted[np.diag_indices(N)] -= z
    lu, piv = lu_factor(shifted)
    return lu_solve((lu, piv), np.eye(N, dtype=complex))


def stieltjes(layout: WignerLayout, x: np.ndarray, z: complex) -> complex:
    """(1/N) tr (A(x) - z I)^(-1)."""
    g = resolvent(layout, x, z)
    return complex(np.trace(g)) / layout.size


def _entry_partials(N: int, i: int, j: int, G: np.ndarray,
                    G2: np.ndarray) -> tuple[complex, complex, complex]:
    # trace reductions using symmetry of G and G^2; s = N^(-1/2)
    s = 1.0 / math.sqrt(N)
    if i == j:
        t1 = s * G2[i, i]
        t2 = s * s * G[i, i] * G2[i, i]
        t3 = s**3 * G[i, i] ** 2 * G2[i, i]
    else:
        t1 = 2.0 * s * G2[i, j]
        t2 = s * s * (2.0 * G[i, j] * G2[i, j]
                      + G[i, i] * G2[j, j] + G[j, j] * G2[i, i])
        t3 = s**3 * 2.0 * (G[i, j] ** 2 * G2[i, j]
                           + G[i, j] * G[j, j] * G2[i, i]
                           + G[i, i] * G[j, j] * G2[i, j]
                           + G[i, i] * G[i, j] * G2[j, j])
    return -t1 / N, 2.0 * t2 / N, -6.0 * t3 / N


class _ResolventCache:
    """One-slot cache of (G, G^2) keyed by the coordinate vector bytes."""

    def __init__(self, layout: WignerLayout, z: complex):
        self.layout = layout
        self.z = _check_z(z)
        self._key: bytes | None = None
        self._G: np.ndarray | None = None
        self._G2: np.ndarray | None = None

    def at(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        if key != self._key:
            G = resolvent(self.layout, x, self.z)
            self._key, self._G, self._G2 = key, G, G @ G
        return self._G, self._G2


def stieltjes_partials(layout: WignerLayout, x: np.ndarray, z: complex,
                       coordinate: int) -> tuple[complex, complex, complex]:
    """First three partials of the transform in one flat coordinate."""
    if not 0 <= coordinate < layout.coordinate_count:
        raise ValueError("coordinate out of range")
    cache = _ResolventCache(layout, z)
    G, G2 = cache.at(x)
    i, j = layout.pairs()[coordinate]
    return _entry_partials(layout.size, i, j, G, G2)


def stieltjes_partials_all(layout: WignerLayout, x: np.ndarray,
                           z: complex) -> np.ndarray:
    """(n, 3) complex array of all coordinate partials from one factorization."""
    cache = _ResolventCache(layout, z)
    G, G2 = cache.at(x)
    out = np.empty((layout.coordinate_count, 3), dtype=complex)
    for c, (i, j) in enumerate(layout.pairs()):
        out[c] = _entry_partials(layout.size, i, j, G, G2)
    return out


def stieltjes_function(layout: WignerLayout, z: complex,
                       part: str = "complex") -> SmoothFunction:
    """The transform at fixed z as a SmoothFunction of the coordinates.

    ``part`` selects the complex value or its real/imaginary projection; the
    projections inherit the influence bounds of the complex transform.
    """
    if part not in ("complex", "re", "im"):
        raise ValueError("part must be 'complex', 're' or 'im'")
    cache = _ResolventCache(layout, z)
    pairs = layout.pairs()
    N = layout.size
    take = {"complex": lambda w: w, "re": lambda w: w.real,
            "im": lambda w: w.imag}[part]

    def value(x):
        G, _ = cache.at(x)
        return take(complex(np.trace(G)) / N)

    def partial(i, p, x):
        G, G2 = cache.at(x)
        a, b = pairs[i]
        return take(_entry_partials(N, a, b, G, G2)[p - 1])

    return SmoothFunction(n=layout.coordinate_count, value=value,
                          partial=partial,
                          name=f"stieltjes[N={N},z={z},{part}]")


@dataclass(frozen=True)
class DerivativeBounds:
    """Uniform partial bounds and the influence values they imply."""

    b1: float
    b2: float
    b3: float
    lambda2: float
    lambda3: float


def derivative_bounds(N: int, v: float) -> DerivativeBounds:
    if v == 0.0:
        raise ValueError("spectral point must be off the real axis")
    av = abs(v)
    return DerivativeBounds(
        b1=2.0 * av**-2 * N**-1.5,
        b2=4.0 * av**-3 * N**-2.0,
        b3=12.0 * av**-4 * N**-2.5,
        lambda2=4.0 * max(av**-4, av**-3) * N**-2.0,
        lambda3=12.0 * max(av**-6, av**-4) * N**-2.5,
    )


def semicircle_stieltjes(z: complex) -> complex:
    """Transform of the semicircle density on [-2, 2].

    Solves m^2 + z m + 1 = 0, taking the root whose imaginary part matches
    the sign of Im z (the defining half-plane-preserving property).
    """
    z = _check_z(z)
    w = cmath.sqrt(z * z - 4.0)
    m = (-z + w) / 2.0
    if m.imag * z.imag <= 0.0:
        m = (-z - w) / 2.0
    return m


def pastur_term(specs, N: int, epsilon: float) -> float:
    """N^-2 sum_{i<=j} E(X_ij^2; |X_ij| > eps sqrt(N)); vanishing as N grows
    is the classical sufficient condition for semicircle convergence."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    layout = WignerLayout(N)
    K = epsilon * math.sqrt(N)
    if isinstance(specs, DistributionSpec):
        total = layout.coordinate_count * truncated_second_moment(specs, K)
    else:
        specs = list(specs)
        if len(specs) != layout.coordinate_count:
            raise ValueError("per-coordinate spec list has wrong length")
        total = math.fsum(truncated_second_moment(s, K) for s in specs)
    return total / N**2


@dataclass(frozen=True)
class SemicircleReport:
    """Paired-ensemble transform gap at one spectral point, both parts."""

    N: int
    z: complex
    dist_x: str
    dist_y: str
    epsilon: float
    report_re: GapReport
    report_im: GapReport
    mean_m: complex       # mean transform over the X-side replicates
    m_reference: complex  # semicircle transform at z
    seed: int

    @property
    def passed(self) -> bool:
        return self.report_re.passed and self.report_im.passed

    CSV_COLUMNS = ("N", "z_re", "z_im", "distX", "distY", "replicates",
                   "gap_re", "gap_im", "bound", "mean_m_re", "mean_m_im",
                   "m_sc_re", "m_sc_im", "seed")

    def csv_row(self) -> tuple:
        return (self.N, self.z.real, self.z.imag, self.dist_x, self.dist_y,
                self.report_re.replicates, self.report_re.mc_gap,
                self.report_im.mc_gap, self.report_re.theoretical_bound,
                self.mean_m.real, self.mean_m.imag,
                self.m_reference.real, self.m_reference.imag, self.seed)

    def to_json_dict(self) -> dict:
        return {
            "N": self.N, "z_re": self.z.real, "z_im": self.z.imag,
            "distX": self.dist_x, "distY": self.dist_y,
            "replicates": self.report_re.replicates,
            "gap_re": self.report_re.mc_gap,
            "gap_im": self.report_im.mc_gap,
            "bound": self.report_re.theoretical_bound,
            "std_error_re": self.report_re.std_error,
            "std_error_im": self.report_im.std_error,
            "passed": self.passed,
            "mean_m_re": self.mean_m.real, "mean_m_im": self.mean_m.imag,
            "m_sc_re": self.m_reference.real, "m_sc_im": self.m_reference.imag,
            "seed": self.seed,
        }


def semicircle_bound(spec_x: DistributionSpec, spec_y: DistributionSpec,
                     N: int, z: complex, g: TestFunction,
                     epsilon: float) -> float:
    """Swap bound for Re/Im of the transform at truncation K = eps sqrt(N)."""
    K = epsilon * math.sqrt(N)
    n = WignerLayout(N).coordinate_count
    tail_sum = n * (truncated_second_moment(spec_x, K)
                    + truncated_second_moment(spec_y, K))
    body_sum = n * (truncated_third_moment(spec_x, K)
                    + truncated_third_moment(spec_y, K))
    bounds = derivative_bounds(N, z.imag)
    c1, c2 = c_constants(g)
    return swap_bound(c1, c2, bounds.lambda2, bounds.lambda3,
                      tail_sum, body_sum)


def semicircle_experiment(spec_x: DistributionSpec, spec_y: DistributionSpec,
                          N: int, z: complex, g: TestFunction,
                          replicates: int, master_seed: int,
                          epsilon: float = 0.2,
                          threads: int = 1) -> SemicircleReport:
    """Paired transform gap for Re and Im parts against the swap bound.

    Both parts are tested against the same bound (the projections can only
    shrink the influence values).  The mean transform over the X-side
    replicates is reported next to the semicircle reference.
    """
    z = _check_z(z)
    layout = WignerLayout(N)
    if epsilon * math.sqrt(N) <= 0.0:
        raise ValueError("epsilon must be positive")
    bound = semicircle_bound(spec_x, spec_y, N, z, g, epsilon)
    experiment = (f"wigner/{spec_x.label}-vs-{spec_y.label}/"
                  f"N{N}/z{z.real:g}+{z.imag:g}i")

    def transform(xv):
        return stieltjes(layout, xv, z)

    vx, vy = paired_functional_values(
        transform, transform, spec_x, spec_y, layout.coordinate_count,
        replicates, master_seed, experiment, threads=threads,
        dtype=complex,
    )
    diffs_re = np.array([g.value(a.real) - g.value(b.real)
                         for a, b in zip(vx, vy)])
    diffs_im = np.array([g.value(a.imag) - g.value(b.imag)
                         for a, b in zip(vx, vy)])
    report_re = summarize_gap(diffs_re, experiment_id=experiment + "/re",
                              n=layout.coordinate_count,
                              theoretical_bound=bound, seed=master_seed)
    report_im = summarize_gap(diffs_im, experiment_id=experiment + "/im",
                              n=layout.coordinate_count,
                              theoretical_bound=bound, seed=master_seed)
    mean_m = complex(math.fsum(v.real for v in vx) / len(vx),
                     math.fsum(v.imag for v in vx) / len(vx))
    return SemicircleReport(
        N=N, z=z, dist_x=spec_x.label, dist_y=spec_y.label, epsilon=epsilon,
        report_re=report_re, report_im=report_im, mean_m=mean_m,
        m_reference=semicircle_stieltjes(z), seed=master_seed,
    )
