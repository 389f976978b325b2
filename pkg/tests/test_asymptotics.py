import numpy as np
import pytest

from evscale.asymptotics import (
    NO_DOMAIN,
    NO_IMPROVEMENT,
    NormingTriple,
    convergence_gap,
    lambda_star_n,
    limiting_shape_y,
    norming_constants,
    penultimate_shape_y,
    table1_lambda_star,
    transform_norming,
    transformed_cdf,
    truncated_normal_lambda_star_expansion,
)
from evscale.core import GevParams, boxcox, gev_cdf, inverse_boxcox
from evscale.errors import DomainError, UsageError
from evscale.families import (
    BoundedTail,
    Exponential,
    Gamma,
    GenParetoParent,
    GevParent,
    HazardPowerTail,
    LogPareto,
    Pareto,
    PowerTail,
    TruncatedNormal,
    Weibull,
)

SMOOTH_FAMILIES = [
    Exponential(),
    TruncatedNormal(),
    Weibull(k=1.8),
    Gamma(a=2.5),
    Pareto(alpha=2.0),
    PowerTail(alpha=2.0, beta=1.0, D=0.4),
    BoundedTail(alpha=2.0, beta=1.5, xF=3.0),
    HazardPowerTail(alpha=1.0),
    LogPareto(beta=1.0, g=0.5, u=0.5),
    GenParetoParent(scale=1.0, shape=0.2),
    GevParent(loc=15.0, scale=1.5, shape=-0.25),
]


def deriv4(f, x, h):
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h)


def transformed_hazard(d, y, lam):
    """Reciprocal hazard of the transformed variable, from first principles:
    h_y(y) = h_x(x(y)) * x(y)**(lam-1)."""
    x = inverse_boxcox(y, lam)
    return float(d.reciprocal_hazard(x)) * x ** (lam - 1.0)


class TestNormingConstants:
    def test_exponential_closed_form(self):
        t = norming_constants(Exponential(), 100)
        assert t.b == pytest.approx(np.log(100.0), rel=1e-14)
        assert t.a == pytest.approx(1.0, rel=1e-14)
        assert t.xi_pen == 0.0

    def test_truncated_normal_location(self):
        t = norming_constants(TruncatedNormal(), 100)
        assert 2.55 <= t.b <= 2.65

    def test_pareto_closed_form(self):
        t = norming_constants(Pareto(alpha=2.0), 10_000)
        assert t.b == pytest.approx(100.0, rel=1e-12)
        assert t.a == pytest.approx(50.0, rel=1e-12)
        assert t.xi_pen == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize("d", SMOOTH_FAMILIES, ids=lambda d: type(d).__name__)
    @pytest.mark.parametrize("n", [10, 100, 10_000])
    def test_defining_equations_hold(self, d, n):
        t = norming_constants(d, n)
        assert float(d.sf(t.b)) == pytest.approx(1.0 / n, rel=1e-9)
        assert t.a == pytest.approx(float(d.reciprocal_hazard(t.b)), rel=1e-12)
        assert t.xi_pen == pytest.approx(float(d.reciprocal_hazard_deriv(t.b)), rel=1e-12)

    def test_rejects_small_n(self):
        with pytest.raises(DomainError):
            norming_constants(Exponential(), 1)


class TestTransformNorming:
    def test_identity_exponent(self):
        t = NormingTriple(b=10.0, a=1.0, xi_pen=0.0, n=100)
        s = transform_norming(t, 1.0)
        assert s.b == pytest.approx(9.0, rel=1e-14)
        assert s.a == pytest.approx(1.0, rel=1e-14)

    def test_square_exponent(self):
        t = NormingTriple(b=10.0, a=1.0, xi_pen=0.0, n=100)
        s = transform_norming(t, 2.0)
        assert s.b == pytest.approx(49.5, rel=1e-14)
        # a_y = a * b**(lam-1) = 1 * 10**1
        assert s.a == pytest.approx(10.0, rel=1e-14)

    def test_rejects_nonpositive_location(self):
        with pytest.raises(DomainError):
            transform_norming(NormingTriple(b=-1.0, a=1.0, xi_pen=0.0, n=10), 2.0)

    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_monte_carlo_maxima_match_gev(self, lam):
        # transformed maxima of a power-law parent, renormalized, follow the
        # standard GEV with shape lam/alpha
        d = Pareto(alpha=2.0)
        n, reps = 1000, 20_000
        rng = np.random.default_rng(42)
        maxima = d.isf(1.0 - rng.random(reps) ** (1.0 / n))
        t_y = transform_norming(norming_constants(d, n), lam)
        z = (boxcox(maxima, lam) - t_y.b) / t_y.a
        ref = GevParams(0.0, 1.0, lam / 2.0)
        z = np.sort(z)
        grid = gev_cdf(z, ref)
        emp_hi = np.arange(1, reps + 1) / reps
        ks = np.max(np.maximum(np.abs(emp_hi - grid), np.abs(emp_hi - 1.0 / reps - grid)))
        assert ks < 0.02


class TestPenultimateShape:
    def test_identity_exponent_returns_parent_shape(self):
        d = TruncatedNormal()
        t = norming_constants(d, 250)
        assert penultimate_shape_y(d, 250, 1.0) == pytest.approx(t.xi_pen, rel=1e-12)

    def test_exponential_square(self):
        got = penultimate_shape_y(Exponential(), 100, 2.0)
        assert got == pytest.approx(1.0 / np.log(100.0), rel=1e-12)
        assert got == pytest.approx(0.2171, abs=5e-4)

    @pytest.mark.parametrize("d", SMOOTH_FAMILIES, ids=lambda d: type(d).__name__)
    @pytest.mark.parametrize("lam", [0.3, 1.0, 2.0])
    def test_matches_direct_hazard_calculus(self, d, lam):
        # oracle: differentiate the transformed reciprocal hazard numerically
        t = norming_constants(d, 100)
        b_y = boxcox(t.b, lam)
        h = 1e-3 * max(abs(b_y), 1.0)
        num = deriv4(lambda y: transformed_hazard(d, y, lam), b_y, h)
        assert penultimate_shape_y(d, 100, lam) == pytest.approx(num, abs=1e-8, rel=1e-8)


class TestHazardTransformIdentity:
    @pytest.mark.parametrize("d", SMOOTH_FAMILIES, ids=lambda d: type(d).__name__)
    def test_identity_at_random_points(self, d):
        rng = np.random.default_rng(31)
        for _ in range(100):
            q = rng.uniform(0.2, 0.98)
            lam = rng.uniform(-1.0, 3.0)
            x = float(d.isf(1.0 - q))
            claimed = float(d.reciprocal_hazard_deriv(x)) + (
                float(d.reciprocal_hazard(x)) / x
            ) * (lam - 1.0)
            y0 = boxcox(x, lam)
            # a relative step delta in x corresponds to delta * x**lam in y
            x_lo = max(d.lower_endpoint, 0.0)
            delta = min(1e-3, 0.1 * (x - x_lo) / x)
            if np.isfinite(d.upper_endpoint):
                delta = min(delta, 0.1 * (d.upper_endpoint - x) / x)
            step = delta * x**lam
            num = deriv4(lambda y: transformed_hazard(d, y, lam), y0, step)
            assert num == pytest.approx(claimed, abs=1e-8, rel=1e-6)


class TestTransformedCdf:
    @pytest.mark.parametrize("lam", [-0.5, 0.0, 0.5, 2.0])
    def test_pointwise_identity(self, lam):
        d = TruncatedNormal()
        xs = np.linspace(0.3, 4.0, 25)
        ys = boxcox(xs, lam)
        assert np.allclose(transformed_cdf(d, ys, lam), d.cdf(xs), atol=1e-12)

    def test_outside_transformed_range(self):
        d = TruncatedNormal()
        assert transformed_cdf(d, -3.0, 0.5) == 0.0  # below the 1/lam barrier
        assert transformed_cdf(d, 3.0, -0.5) == 1.0  # above the -1/lam barrier


class TestLimitingShape:
    def test_bounded_tail_invariant_in_exponent(self):
        d = BoundedTail(alpha=2.0, beta=1.5, xF=3.0)
        for lam in (-1.0, 0.0, 1.0, 2.0, 4.0):
            assert limiting_shape_y(d, lam) == pytest.approx(-0.5, rel=1e-14)

    def test_power_tail_scales_with_exponent(self):
        d = PowerTail(alpha=2.0, beta=1.0, D=0.4)
        for lam in (0.5, 1.0, 2.0, 3.0):
            assert limiting_shape_y(d, lam) == pytest.approx(lam / 2.0, rel=1e-14)

    def test_nonpositive_shape_is_exponent_invariant(self):
        for d in (Exponential(), TruncatedNormal(), BoundedTail(2.0, 1.5, xF=3.0)):
            vals = {limiting_shape_y(d, lam) for lam in (-0.5, 0.0, 1.0, 2.0)}
            assert vals == {d.xi_x}

    def test_super_heavy_needs_log_scale(self):
        d = LogPareto(beta=1.0, g=1.0, u=0.0)
        assert limiting_shape_y(d, 0.3) is NO_DOMAIN
        assert limiting_shape_y(d, 0.0) == pytest.approx(1.0)


class TestLambdaStar:
    def test_cancels_penultimate_error_exactly(self):
        # defining property: at lam*, the transformed penultimate shape
        # equals the transformed limit
        for d in (TruncatedNormal(), Weibull(k=1.8), PowerTail(2.0, 1.0, D=0.4)):
            for n in (100, 10_000):
                star = lambda_star_n(d, n=n)
                pen = penultimate_shape_y(d, n, star.value)
                lim = limiting_shape_y(d, star.value)
                assert pen == pytest.approx(lim, abs=1e-12)

    def test_truncated_normal_approaches_two(self):
        star = lambda_star_n(TruncatedNormal(), n=10**6).value
        assert 1.9 < star < 2.0
        seq = [lambda_star_n(TruncatedNormal(), n=n).value for n in (100, 10**4, 10**6)]
        assert seq == sorted(seq)

    def test_level_variant(self):
        d = TruncatedNormal()
        b = norming_constants(d, 100).b
        assert lambda_star_n(d, level=b).value == pytest.approx(
            lambda_star_n(d, n=100).value, rel=1e-12
        )

    def test_exact_pareto_flags_no_improvement(self):
        assert lambda_star_n(Pareto(alpha=2.0), n=100) is NO_IMPROVEMENT

    def test_constant_hazard_slope_parent_flags_no_improvement(self):
        # generalized Pareto parent: h' identically equals the limit shape
        assert lambda_star_n(GenParetoParent(scale=1.0, shape=0.2), n=1000) is NO_IMPROVEMENT

    def test_bounded_tail_slow_second_order_has_no_limit(self):
        d = BoundedTail(alpha=1.4, beta=0.7, xF=5.0, D=0.3)
        star = lambda_star_n(d, n=1000)
        assert star.sequence_has_limit is False
        assert np.isfinite(star.value)

    def test_bounded_tail_fast_second_order_tends_to_one(self):
        d = BoundedTail(alpha=2.0, beta=1.5, xF=3.0, D=0.5)
        near = abs(lambda_star_n(d, n=10**7).value - 1.0)
        far = abs(lambda_star_n(d, n=10**3).value - 1.0)
        assert near < far

    def test_requires_exactly_one_level(self):
        with pytest.raises(UsageError):
            lambda_star_n(TruncatedNormal())
        with pytest.raises(UsageError):
            lambda_star_n(TruncatedNormal(), n=10, level=2.0)

    def test_super_heavy_has_no_best_exponent(self):
        with pytest.raises(UsageError):
            lambda_star_n(LogPareto(beta=1.0, g=1.0), n=100)


class TestTable1:
    def test_limiting_best_exponents(self):
        assert table1_lambda_star(PowerTail(2.0, 1.5, D=0.5)) == 1.5
        assert table1_lambda_star(BoundedTail(2.0, 1.5, xF=3.0)) == 1.0
        assert table1_lambda_star(BoundedTail(2.0, 0.7, xF=3.0)) is None
        assert table1_lambda_star(HazardPowerTail(alpha=1.0)) == 2.0
        assert table1_lambda_star(LogPareto(beta=1.0, g=1.0)) == 0.0
        assert table1_lambda_star(LogPareto(beta=1.0, g=-0.5)) == 0.0
        assert table1_lambda_star(LogPareto(beta=1.0, g=0.0)) is None

    def test_named_laws(self):
        assert table1_lambda_star(Exponential()) == 1.0
        assert table1_lambda_star(TruncatedNormal()) == 2.0
        assert table1_lambda_star(Weibull(k=0.7)) == pytest.approx(0.7)
        assert table1_lambda_star(Gamma(a=3.0)) == 1.0


class TestTruncatedNormalExpansion:
    def test_partial_sums_are_regression_pinned(self):
        # four-term series value at the block-size level and at the
        # threshold-level mapping (values frozen from the documented series)
        assert truncated_normal_lambda_star_expansion(n=100) == pytest.approx(
            1.79487, abs=1e-5
        )
        assert truncated_normal_lambda_star_expansion(level=1.75) == pytest.approx(
            1.48379, abs=1e-5
        )

    def test_tends_to_two(self):
        # approach is logarithmic: still ~0.04 away at n = 1e12
        vals = [truncated_normal_lambda_star_expansion(n=n) for n in (1e3, 1e6, 1e12)]
        assert vals == sorted(vals)
        assert all(v < 2.0 for v in vals)
        assert vals[-1] == pytest.approx(2.0, abs=0.05)

    def test_term_count_control(self):
        one = truncated_normal_lambda_star_expansion(n=100, terms=1)
        assert one == 2.0
        with pytest.raises(UsageError):
            truncated_normal_lambda_star_expansion(n=100, terms=9)

    def test_level_mapping_is_consistent(self):
        # mapping a level back through the two-term location expansion and
        # evaluating at the implied n reproduces the level-based call
        from evscale.asymptotics import _truncnorm_b_two_term

        lvl = 2.2
        got = truncated_normal_lambda_star_expansion(level=lvl)
        from scipy.optimize import brentq

        log_n = brentq(lambda s: _truncnorm_b_two_term(s) - lvl, 1.05, 1e4)
        assert got == pytest.approx(
            truncated_normal_lambda_star_expansion(n=float(np.exp(log_n))), rel=1e-10
        )


class TestConvergenceGap:
    def test_max_stable_norming_gives_zero_gap(self):
        # with the exact max-stable sequences the renormalized law is the
        # penultimate GEV itself
        d = GevParent(loc=2.0, scale=1.5, shape=-0.25)
        for n in (100, 1000):
            b, a = d.max_stable_norming(n)
            trip = NormingTriple(b=b, a=a, xi_pen=d.shape, n=n)
            assert convergence_gap(d, n, 1.0, norming=trip) < 1e-12

    def test_tail_quantile_norming_gap_is_small_but_positive(self):
        d = GevParent(loc=2.0, scale=1.5, shape=-0.25)
        gap = convergence_gap(d, 100, 1.0)
        assert 0.0 < gap < 0.01

    def test_truncated_normal_square_beats_identity(self):
        d = TruncatedNormal()
        assert convergence_gap(d, 100, 2.0) < convergence_gap(d, 100, 1.0)

    def test_second_order_exponent_wins_on_power_tail(self):
        # with a nonzero second-order term, the matching exponent beats
        # exponents far from it once n is large enough that the 1/n
        # error stops dominating
        d = PowerTail(alpha=2.0, beta=1.0, D=0.6)
        gaps = {lam: convergence_gap(d, 20_000, lam) for lam in (0.25, 0.5, 1.0, 1.5, 2.0, 3.0)}
        assert min(gaps, key=gaps.get) == 1.0
