"""Moment and sampling checks for the standardized input laws.

Every analytic truncated moment is checked against an independent adaptive
quadrature of the density written out here, and sampling is checked against
the analytic moments by plain Monte Carlo error bars.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from lindeberg_lab.distributions import (
    CEXP,
    GAUSSIAN,
    RADEMACHER,
    UNIFORM,
    DistributionSpec,
    MomentProfile,
    moment_profile,
    pareto,
    parse_spec,
    sample,
    third_abs_moment,
    truncated_second_moment,
    truncated_third_moment,
)
from lindeberg_lab.rng import RandomStream

SQRT3 = math.sqrt(3.0)


def gauss_pdf(x):
    return math.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)


def uniform_pdf(x):
    return 1.0 / (2.0 * SQRT3) if abs(x) <= SQRT3 else 0.0


def cexp_pdf(x):
    return math.exp(-(x + 1.0)) if x > -1.0 else 0.0


def pareto_pdf_factory(a):
    s = math.sqrt(a / (a - 2.0))

    def pdf(x):
        w = abs(x) * s
        return 0.0 if w < 1.0 else 0.5 * a * w ** (-a - 1.0) * s

    return pdf


INF = math.inf


def _pareto_onset(a):
    return 1.0 / math.sqrt(a / (a - 2.0))


CONTINUOUS = [
    (GAUSSIAN, gauss_pdf, (-INF, INF)),
    (UNIFORM, uniform_pdf, (-SQRT3, SQRT3)),
    (CEXP, cexp_pdf, (-1.0, INF)),
    (pareto(2.5), pareto_pdf_factory(2.5), (-INF, INF)),
    (pareto(3.5), pareto_pdf_factory(3.5), (-INF, INF)),
    (pareto(4.5), pareto_pdf_factory(4.5), (-INF, INF)),
]

# interior density discontinuities (Pareto mass starts at |x| = 1/scale)
BREAKS = {
    "pareto:2.5": (-_pareto_onset(2.5), _pareto_onset(2.5)),
    "pareto:3.5": (-_pareto_onset(3.5), _pareto_onset(3.5)),
    "pareto:4.5": (-_pareto_onset(4.5), _pareto_onset(4.5)),
}

K_GRID = [0.25, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 6.0]


def _piece(pdf, weight, lo, hi, breaks=()):
    if lo >= hi:
        return 0.0
    cuts = [lo] + [b for b in sorted(breaks) if lo < b < hi] + [hi]
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        val, _ = quad(lambda x: weight(x) * pdf(x), a, b, limit=400)
        total += val
    return total


def tail_oracle(pdf, support, weight, K, breaks=()):
    """Quadrature of E(weight(X); |X| > K), split at the truncation points."""
    lo, hi = support
    return (_piece(pdf, weight, lo, min(-K, hi), breaks)
            + _piece(pdf, weight, max(K, lo), hi, breaks))


def body_oracle(pdf, support, weight, K, breaks=()):
    """Quadrature of E(weight(X); |X| <= K)."""
    lo, hi = support
    return _piece(pdf, weight, max(lo, -K), min(hi, K), breaks)


def quad_moment(pdf, support, weight, breaks=()):
    """Quadrature of E weight(X) over the full support."""
    return body_oracle(pdf, support, weight, INF, breaks)


class TestQuadratureOracles:
    @pytest.mark.parametrize("spec,pdf,support", CONTINUOUS,
                             ids=lambda v: getattr(v, "label", ""))
    def test_tail_second_moment_matches_quadrature(self, spec, pdf, support):
        for K in K_GRID:
            oracle = tail_oracle(pdf, support, lambda x: x * x, K,
                                 BREAKS.get(spec.label, ()))
            got = truncated_second_moment(spec, K)
            assert got == pytest.approx(oracle, rel=1e-8, abs=1e-10)

    @pytest.mark.parametrize("spec,pdf,support", CONTINUOUS,
                             ids=lambda v: getattr(v, "label", ""))
    def test_body_third_moment_matches_quadrature(self, spec, pdf, support):
        for K in K_GRID:
            oracle = body_oracle(pdf, support, lambda x: abs(x) ** 3, K,
                                 BREAKS.get(spec.label, ()))
            got = truncated_third_moment(spec, K)
            assert got == pytest.approx(oracle, rel=1e-8, abs=1e-10)

    def test_frozen_oracle_values(self):
        # values computed once with the quadrature oracle above, frozen here
        assert truncated_second_moment(GAUSSIAN, 1.0) == pytest.approx(
            0.801251956901201, rel=1e-12)
        assert truncated_third_moment(GAUSSIAN, 2.0) == pytest.approx(
            0.9478775234474741, rel=1e-12)
        assert truncated_third_moment(GAUSSIAN, math.inf) == pytest.approx(
            1.5957691216057308, rel=1e-12)
        assert third_abs_moment(CEXP) == pytest.approx(
            2.414553294057308, rel=1e-12)
        assert third_abs_moment(pareto(3.5)) == pytest.approx(
            1.963961012123931, rel=1e-12)

    def test_third_moment_matches_quadrature(self):
        for spec, pdf, support in CONTINUOUS:
            if math.isinf(third_abs_moment(spec)):
                continue
            oracle = quad_moment(pdf, support, lambda x: abs(x) ** 3,
                                 BREAKS.get(spec.label, ()))
            assert third_abs_moment(spec) == pytest.approx(oracle, rel=1e-8)

    def test_unit_variance_by_quadrature(self):
        for spec, pdf, support in CONTINUOUS:
            oracle = quad_moment(pdf, support, lambda x: x * x,
                                 BREAKS.get(spec.label, ()))
            assert oracle == pytest.approx(1.0, rel=1e-8)


class TestRademacherEdgeCases:
    def test_tail_second(self):
        assert truncated_second_moment(RADEMACHER, 2.0) == 0.0
        assert truncated_second_moment(RADEMACHER, 0.5) == 1.0

    def test_body_third(self):
        assert truncated_third_moment(RADEMACHER, 2.0) == 1.0
        assert truncated_third_moment(RADEMACHER, 0.5) == 0.0

    def test_third_moment(self):
        assert third_abs_moment(RADEMACHER) == 1.0


class TestMomentStructure:
    all_specs = [GAUSSIAN, RADEMACHER, UNIFORM, CEXP, pareto(2.5), pareto(3.5)]

    @pytest.mark.parametrize("spec", all_specs, ids=lambda s: s.label)
    def test_complement_identity(self, spec):
        # tail second + body second = variance = 1
        for K in K_GRID:
            pdf = dict((s.label, p) for s, p, _ in CONTINUOUS).get(spec.label)
            if pdf is None:  # rademacher: body second is 1{K >= 1}
                body = 1.0 if K >= 1.0 else 0.0
            else:
                support = dict((s.label, sup) for s, _, sup in CONTINUOUS)[
                    spec.label]
                body = body_oracle(pdf, support, lambda x: x * x, K,
                                   BREAKS.get(spec.label, ()))
            assert truncated_second_moment(spec, K) + body == pytest.approx(
                1.0, abs=1e-9)

    @pytest.mark.parametrize("spec", all_specs, ids=lambda s: s.label)
    def test_monotone_in_truncation_level(self, spec):
        tails = [truncated_second_moment(spec, K) for K in K_GRID]
        bodies = [truncated_third_moment(spec, K) for K in K_GRID]
        assert all(a >= b - 1e-12 for a, b in zip(tails, tails[1:]))
        assert all(a <= b + 1e-12 for a, b in zip(bodies, bodies[1:]))

    @pytest.mark.parametrize("spec", all_specs, ids=lambda s: s.label)
    def test_body_third_at_most_K(self, spec):
        for K in K_GRID:
            assert truncated_third_moment(spec, K) <= K * (1.0 + 1e-12)

    @pytest.mark.parametrize("spec", all_specs, ids=lambda s: s.label)
    def test_lyapunov_floor(self, spec):
        assert third_abs_moment(spec) >= 1.0

    def test_pareto_infinite_third_moment_flag(self):
        assert math.isinf(third_abs_moment(pareto(2.5)))
        assert math.isinf(third_abs_moment(pareto(3.0)))
        assert math.isfinite(third_abs_moment(pareto(3.5)))

    def test_nonpositive_truncation_rejected(self):
        with pytest.raises(ValueError):
            truncated_second_moment(GAUSSIAN, 0.0)
        with pytest.raises(ValueError):
            truncated_third_moment(GAUSSIAN, -1.0)

    def test_moment_profile_fields(self):
        prof = moment_profile(GAUSSIAN, 2.0)
        assert prof.K == 2.0
        assert 0.0 <= prof.tail_second <= 1.0
        assert prof.body_third <= prof.K
        with pytest.raises(ValueError):
            MomentProfile(K=1.0, tail_second=1.5, body_third=0.0)
        with pytest.raises(ValueError):
            MomentProfile(K=1.0, tail_second=0.2, body_third=2.0)


class TestSampling:
    def gen(self, label, rep=0):
        return RandomStream(91, f"dist-test/{label}").replicate(rep)

    def test_rademacher_support(self):
        x = sample(RADEMACHER, self.gen("rad"), 10_000)
        assert set(np.unique(x)) == {-1.0, 1.0}

    def test_uniform_support(self):
        x = sample(UNIFORM, self.gen("unif"), 10_000)
        assert np.all(np.abs(x) <= SQRT3)

    def test_pareto_support(self):
        spec = pareto(2.5)
        s = math.sqrt(2.5 / 0.5)
        x = sample(spec, self.gen("par"), 10_000)
        assert np.all(np.abs(x) >= 1.0 / s - 1e-12)

    def test_cexp_support(self):
        x = sample(CEXP, self.gen("cexp"), 10_000)
        assert np.all(x >= -1.0)

    def test_deterministic_replicates(self):
        a = sample(GAUSSIAN, self.gen("det", 3), 64)
        b = sample(GAUSSIAN, self.gen("det", 3), 64)
        c = sample(GAUSSIAN, self.gen("det", 4), 64)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    @pytest.mark.parametrize(
        "spec", [GAUSSIAN, RADEMACHER, UNIFORM, CEXP, pareto(4.5)],
        ids=lambda s: s.label)
    def test_monte_carlo_mean_and_variance(self, spec):
        # 4 / sqrt(R) on the mean and 8 / sqrt(R) on the variance; the
        # variance check needs a finite fourth moment (pareto 4.5 has one).
        R = 1_000_000
        x = sample(spec, self.gen(f"mc/{spec.label}"), R)
        assert abs(float(np.mean(x))) <= 4.0 / math.sqrt(R)
        assert abs(float(np.var(x)) - 1.0) <= 8.0 / math.sqrt(R)

    def test_monte_carlo_heavy_tail_moments(self):
        # pareto(2.5): infinite fourth moment, so check the mean and the
        # bounded truncated moments instead of the raw sample variance
        spec = pareto(2.5)
        R = 1_000_000
        x = sample(spec, self.gen("mc/pareto25"), R)
        assert abs(float(np.mean(x))) <= 4.0 / math.sqrt(R)
        for K in (1.0, 2.0, 5.0):
            emp = float(np.mean(np.where(np.abs(x) > K, x * x, 0.0)))
            se = float(np.std(np.where(np.abs(x) > K, x * x, 0.0),
                              ddof=1)) / math.sqrt(R)
            assert abs(emp - truncated_second_moment(spec, K)) <= 5.0 * se

    def test_monte_carlo_third_moment(self):
        R = 1_000_000
        x = sample(GAUSSIAN, self.gen("mc/third"), R)
        a3 = np.abs(x) ** 3
        se = float(np.std(a3, ddof=1)) / math.sqrt(R)
        assert abs(float(np.mean(a3)) - third_abs_moment(GAUSSIAN)) <= 5 * se


class TestParsing:
    def test_round_trip(self):
        for text in ("rademacher", "gaussian", "uniform", "cexp", "pareto:2.5"):
            spec = parse_spec(text)
            assert spec.label == text

    def test_rejects_unknown(self):
        with pytest.raises(ValueError):
            parse_spec("cauchy")

    def test_rejects_bad_pareto(self):
        with pytest.raises(ValueError):
            parse_spec("pareto:2.0")

    def test_standardized_constants(self):
        spec = parse_spec("gaussian")
        assert spec.mean == 0.0
        assert spec.variance == 1.0

    def test_family_takes_no_params(self):
        with pytest.raises(ValueError):
            DistributionSpec(parse_spec("gaussian").family, (1.0,))
