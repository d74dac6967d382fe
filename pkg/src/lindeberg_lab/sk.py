"""Sherrington-Kirkpatrick free energy, ground state, and their gap bounds.

Couplings live on the n = N(N-1)/2 pairs i < j.  The family of interest has
one linear member per spin configuration,

    f_sigma(x) = beta N^(-3/2) sum_{i<j} x_ij s_i s_j + beta h N^(-1) sum_i s_i,

so its derivative sups are c1 = beta N^(-3/2), c2 = c3 = 0, giving the exact
family influences lambda_2 = beta^2 N^-3 and lambda_3 = beta^3 N^(-9/2) with
2^N members.  The free energy is the soft-max of this family at level N:

    F(x) = N^(-1) log sum_sigma exp(N f_sigma(x)),

computed here by exact enumeration (log-sum-exp over spin blocks), and the
ground state is the hard max of the pair sum, enumerated over half the
configurations via the sigma -> -sigma symmetry.

Enumeration is vectorized over blocks of configurations (a block of spin rows
against the coupling matrix), which on array hardware beats flip-by-flip
updates; a Gray-code single-flip evaluator is kept as an independent
cross-check path.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import (
    GapReport,
    SmoothFunction,
    TestFunction,
    c_constants,
    paired_functional_values,
    summarize_gap,
    third_moment_bound,
)
from .distributions import DistributionSpec, third_abs_moment
from .smoothmax import (
    FunctionFamily,
    max_swap_bound,
    optimized_max_bound,
    smoothed_lambda_bounds,
)

__all__ = [
    "CouplingLayout",
    "SKParams",
    "GroundStateBoundParams",
    "SKKind",
    "family_member",
    "sk_family",
    "family_lambda",
    "free_energy",
    "free_energy_gray",
    "free_energy_function",
    "free_energy_lambda",
    "ground_state",
    "ground_state_bound",
    "ground_state_bound_terms",
    "SKReport",
    "sk_experiment",
]

ENUMERATION_LIMIT = 24   # 2^24 configurations is the desk-scale ceiling
_BLOCK = 1 << 14


@dataclass(frozen=True)
class CouplingLayout:
    """Flat indexing of the n = N(N-1)/2 couplings, pairs i < j row-major."""

    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValueError("need at least two spins")

    @property
    def coordinate_count(self) -> int:
        return self.size * (self.size - 1) // 2

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.size)
                for j in range(i + 1, self.size)]

    def index(self, i: int, j: int) -> int:
        if j < i:
            i, j = j, i
        if not 0 <= i < j < self.size:
            raise ValueError("pair out of range")
        return i * self.size - i * (i + 1) // 2 + (j - i - 1)

    def coupling_matrix(self, x: np.ndarray) -> np.ndarray:
        """Symmetric zero-diagonal matrix X with X[i, j] = x_ij."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.coordinate_count,):
            raise ValueError("coupling vector has wrong length")
        N = self.size
        X = np.zeros((N, N))
        iu = np.triu_indices(N, k=1)
        X[iu] = x
        return X + X.T


@dataclass(frozen=True)
class SKParams:
    beta: float = 1.0
    h: float = 0.0

    def __post_init__(self):
        if not self.beta > 0.0:
            raise ValueError("inverse temperature beta must be positive")


@dataclass(frozen=True)
class GroundStateBoundParams:
    A: float
    epsilon: float

    def __post_init__(self):
        if not self.A >= 1.0:
            raise ValueError("A must be at least 1")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")


class SKKind(enum.Enum):
    FREE_ENERGY = "free_energy"
    GROUND_STATE = "ground_state"


def _check_enumerable(N: int) -> None:
    if N > ENUMERATION_LIMIT:
        raise ValueError(
            f"exact enumeration is guarded at N <= {ENUMERATION_LIMIT}"
        )


@functools.lru_cache(maxsize=64)
def _spin_block(N: int, start: int, stop: int) -> np.ndarray:
    """Configurations for codes [start, stop): bit b of the code (MSB first)
    maps to spin +1, so code order is lexicographic order of the spin tuples.
    Cached read-only; callers copy before mutating."""
    codes = np.arange(start, stop, dtype=np.uint32)
    shifts = np.arange(N - 1, -1, -1, dtype=np.uint32)
    bits = (codes[:, None] >> shifts[None, :]) & 1
    block = (bits.astype(np.int8) << 1) - 1
    block.setflags(write=False)
    return block


def _code_to_sigma(code: int, N: int) -> np.ndarray:
    return _spin_block(N, code, code + 1)[0].astype(int)


def family_member(layout: CouplingLayout, params: SKParams, sigma,
                  x) -> float:
    """f_sigma(x) for one spin configuration."""
    N = layout.size
    sigma = np.asarray(sigma)
    if sigma.shape != (N,) or not np.all(np.abs(sigma) == 1):
        raise ValueError("sigma must be a vector of +-1 of length N")
    x = np.asarray(x, dtype=float)
    if x.shape != (layout.coordinate_count,):
        raise ValueError("coupling vector has wrong length")
    li, lj = np.array(layout.pairs()).T
    pair_sum = float(np.dot(x, sigma[li] * sigma[lj]))
    return (params.beta * N**-1.5 * pair_sum
            + params.beta * params.h / N * float(np.sum(sigma)))


def gray_spin_iter(N: int) -> Iterator[tuple[np.ndarray, int]]:
    """All 2^N configurations, one spin flip apart; yields (sigma, flipped).

    The yielded array is reused; copy it if it must survive the iteration.
    The first item flips index -1 (nothing): the all -1 configuration.
    """
    sigma = -np.ones(N, dtype=np.int8)
    yield sigma, -1
    for k in range(1, 1 << N):
        flip = (k & -k).bit_length() - 1
        sigma[flip] = -sigma[flip]
        yield sigma, flip


def sk_family(layout: CouplingLayout, params: SKParams) -> FunctionFamily:
    """The 2^N linear members as an iterator-backed family (never materialized)."""
    N = layout.size
    li, lj = np.array(layout.pairs()).T
    scale = params.beta * N**-1.5
    field_term = params.beta * params.h / N

    def make_member(sigma: np.ndarray) -> SmoothFunction:
        pairprod = (sigma[li] * sigma[lj]).astype(float)
        offset = field_term * float(np.sum(sigma))

        def value(x):
            return scale * float(np.dot(pairprod, x)) + offset

        def partial(i, p, x):
            return scale * pairprod[i] if p == 1 else 0.0

        return SmoothFunction(n=layout.coordinate_count, value=value,
                              partial=partial)

    def members():
        for sigma, _ in gray_spin_iter(N):
            yield make_member(sigma.copy())

    return FunctionFamily(
        n=layout.coordinate_count,
        members=members,
        c1=scale,
        c2=0.0,
        c3=0.0,
        size=1 << N,
        log_size=N * math.log(2.0),
        name=f"sk[N={N},beta={params.beta:g},h={params.h:g}]",
    )


def family_lambda(params: SKParams, N: int) -> tuple[float, float, float]:
    """Exact family influences (beta^2 N^-3, beta^3 N^(-9/2)) and log size."""
    if N < 2:
        raise ValueError("need at least two spins")
    return (params.beta**2 * N**-3.0,
            params.beta**3 * N**-4.5,
            N * math.log(2.0))


def _pair_energies(layout: CouplingLayout, x: np.ndarray,
                   start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    """(sum_{i<j} x_ij s_i s_j, sum_i s_i) for codes [start, stop)."""
    X = layout.coupling_matrix(x)
    S = _spin_block(layout.size, start, stop).astype(float)
    pair = 0.5 * np.einsum("bi,bi->b", S @ X, S)
    return pair, S.sum(axis=1)


def free_energy(layout: CouplingLayout, params: SKParams, x) -> float:
    """N^(-1) log sum_sigma exp{ beta/sqrt(N) sum x ss + beta h sum s }.

    Exact enumeration with a running max-shifted accumulator over spin blocks.
    Coincides with the soft-max of the member family at level N.
    """
    N = layout.size
    _check_enumerable(N)
    x = np.asarray(x, dtype=float)
    shift = -math.inf
    acc = 0.0
    for start in range(0, 1 << N, _BLOCK):
        stop = min(start + _BLOCK, 1 << N)
        pair, mag = _pair_energies(layout, x, start, stop)
        e = params.beta / math.sqrt(N) * pair + params.beta * params.h * mag
        m = float(e.max())
        if m > shift:
            acc = acc * math.exp(shift - m) if acc else 0.0
            shift = m
        acc += float(np.exp(e - shift).sum())
    return (shift + math.log(acc)) / N


def free_energy_gray(layout: CouplingLayout, params: SKParams, x) -> float:
    """Same value by Gray-code single-flip updates; independent check path."""
    N = layout.size
    _check_enumerable(N)
    X = layout.coupling_matrix(np.asarray(x, dtype=float))
    sigma = -np.ones(N)
    pair = 0.5 * float(sigma @ X @ sigma)
    mag = float(sigma.sum())
    beta, h = params.beta, params.h
    shift = -math.inf
    acc = 0.0
    for k in range(1 << N):
        if k:
            flip = (k & -k).bit_length() - 1
            # remove the old row contribution, add the new one: O(N)
            pair -= 2.0 * sigma[flip] * float(X[flip] @ sigma)
            mag -= 2.0 * sigma[flip]
            sigma[flip] = -sigma[flip]
        e = beta / math.sqrt(N) * pair + beta * h * mag
        if e > shift:
            acc = acc * math.exp(shift - e) if acc else 0.0
            shift = e
        acc += math.exp(e - shift)
    return (shift + math.log(acc)) / N


def free_energy_function(layout: CouplingLayout,
                         params: SKParams) -> SmoothFunction:
    """The free energy as a SmoothFunction; partials via the soft-max chain."""
    from .smoothmax import softmax_partials

    family = sk_family(layout, params)
    N = layout.size

    def value(x):
        return free_energy(layout, params, x)

    def partial(i, p, x):
        return softmax_partials(family, float(N), np.asarray(x, float), i)[p - 1]

    return SmoothFunction(n=layout.coordinate_count, value=value,
                          partial=partial, name=f"sk-free-energy[N={N}]")


def free_energy_lambda(params: SKParams, N: int) -> tuple[float, float]:
    """Influence bounds of the free energy: (3 b^2 N^-2, 13 b^3 N^(-5/2))."""
    layout = CouplingLayout(N)
    return smoothed_lambda_bounds(sk_family(layout, params), float(N))


def ground_state(layout: CouplingLayout, x) -> tuple[float, np.ndarray]:
    """max_sigma sum_{i<j} x_ij s_i s_j and one maximizer.

    The sigma -> -sigma symmetry halves the search to configurations with
    s_1 = -1; ties break to the lexicographically smallest spin tuple, which
    is the first maximizer in code order.
    """
    N = layout.size
    _check_enumerable(N)
    x = np.asarray(x, dtype=float)
    best = -math.inf
    best_code = 0
    for start in range(0, 1 << (N - 1), _BLOCK):
        stop = min(start + _BLOCK, 1 << (N - 1))
        pair, _ = _pair_energies(layout, x, start, stop)
        k = int(np.argmax(pair))
        if pair[k] > best:
            best = float(pair[k])
            best_code = start + k
    return best, _code_to_sigma(best_code, N)


def ground_state_bound(g: TestFunction, N: int, A: float, epsilon: float,
                       truncated_sums: tuple[float, float]) -> float:
    """Max-functional swap bound at smoothing level AN, truncation eps sqrt(N).

    ``truncated_sums`` is (tail_sum, body_sum) over all couplings of both
    ensembles at K = eps sqrt(N).
    """
    GroundStateBoundParams(A=A, epsilon=epsilon)
    layout = CouplingLayout(N)
    family = sk_family(layout, SKParams(beta=1.0, h=0.0))
    tail_sum, body_sum = truncated_sums
    return max_swap_bound(g, A * N, family, tail_sum, body_sum)


def ground_state_bound_terms(g: TestFunction, N: int, A: float,
                             epsilon: float,
                             tail_sum: float) -> tuple[float, float, float]:
    """Structural decomposition (A^-1 channel, A tail channel, A^2 eps channel).

    The third channel replaces the body moments by their K E X^2 majorant, so
    the three terms sum to a valid standalone bound with the advertised
    A^-1 + A (...) + A^2 eps shape.
    """
    GroundStateBoundParams(A=A, epsilon=epsilon)
    c1, c2 = c_constants(g)
    floor = 2.0 * g.norm1 * math.log(2.0) / A
    tail = 3.0 * c1 * A * N**-2.0 * tail_sum
    body_majorant = N * (N - 1) * epsilon * math.sqrt(N)
    smoothing = 13.0 * c2 * (A * N) ** 2 * N**-4.5 * body_majorant
    return floor, tail, smoothing


@dataclass(frozen=True)
class SKReport:
    """Spin-glass universality gap report for CSV/JSON emission."""

    kind: SKKind
    N: int
    params: SKParams
    dist_x: str
    dist_y: str
    report: GapReport

    @property
    def passed(self) -> bool:
        return self.report.passed

    CSV_COLUMNS = ("kind", "N", "beta", "h", "distX", "distY", "replicates",
                   "gap", "std_error", "bound", "passed", "seed")

    def csv_row(self) -> tuple:
        r = self.report
        return (self.kind.value, self.N, self.params.beta, self.params.h,
                self.dist_x, self.dist_y, r.replicates, r.mc_gap,
                r.std_error, r.theoretical_bound, r.passed, r.seed)

    def to_json_dict(self) -> dict:
        r = self.report
        return {
            "kind": self.kind.value, "N": self.N, "beta": self.params.beta,
            "h": self.params.h, "distX": self.dist_x, "distY": self.dist_y,
            "replicates": r.replicates, "gap": r.mc_gap,
            "std_error": r.std_error, "bound": r.theoretical_bound,
            "passed": r.passed, "seed": r.seed,
        }


def sk_experiment(kind: SKKind | str, spec_x: DistributionSpec,
                  spec_y: DistributionSpec, params: SKParams, N: int,
                  replicates: int, g: TestFunction, master_seed: int,
                  threads: int = 1) -> SKReport:
    """Paired coupling-universality gap with the matching theoretical bound.

    Free energy: third-moment bound with the smoothed influence 13 b^3 N^(-5/2).
    Ground state: the alpha-optimized max bound (beta = 1, h = 0 fixed).
    """
    kind = SKKind(kind)
    layout = CouplingLayout(N)
    _check_enumerable(N)
    n = layout.coordinate_count
    gamma = max(third_abs_moment(spec_x), third_abs_moment(spec_y))
    _, c2 = c_constants(g)

    if kind is SKKind.FREE_ENERGY:
        lam3_smoothed = 13.0 * params.beta**3 * N**-2.5
        bound = third_moment_bound(c2, gamma, n, lam3_smoothed)

        def evaluate(xv):
            return free_energy(layout, params, xv)

    else:
        if params.beta != 1.0 or params.h != 0.0:
            raise ValueError(
                "the ground-state experiment is defined at beta = 1, h = 0"
            )
        family = sk_family(layout, params)
        bound = optimized_max_bound(g, gamma, n, family)
        scale = N**-1.5

        def evaluate(xv):
            return scale * ground_state(layout, xv)[0]

    experiment = (f"sk-{kind.value}/{spec_x.label}-vs-{spec_y.label}/N{N}/"
                  f"beta{params.beta:g}/h{params.h:g}")
    vx, vy = paired_functional_values(
        evaluate, evaluate, spec_x, spec_y, n, replicates, master_seed,
        experiment, threads=threads,
    )
    diffs = np.array([g.value(a) - g.value(b) for a, b in zip(vx, vy)])
    report = summarize_gap(diffs, experiment_id=experiment, n=n,
                           theoretical_bound=bound, seed=master_seed)
    return SKReport(kind=kind, N=N, params=params, dist_x=spec_x.label,
                    dist_y=spec_y.label, report=report)
