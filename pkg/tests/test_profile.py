import numpy as np
import pytest

from evscale.core import GevParams, ModelKind, TransformedModel, loglik4, loglik_gev3
from evscale.data import simulate_gev, simulate_pp
from evscale.errors import NonConvergenceError, NumericalError, UsageError
from evscale.profile import (
    Fit3Result,
    GridSpec,
    ProfileGrid,
    build_grid,
    estimate_c,
    fit3_mle,
    grid_to_csv,
    profile_loglik,
)

TRUE = GevParams(15.0, 1.5, -0.25)


@pytest.fixture(scope="module")
def gev_data():
    return simulate_gev(TRUE, 5000, seed=17).values


@pytest.fixture(scope="module")
def gev_fit(gev_data):
    return fit3_mle(gev_data, ModelKind.block_maxima())


class TestFit3:
    def test_recovers_truth_within_three_se(self, gev_data, gev_fit):
        fit = gev_fit
        truth = (TRUE.loc, TRUE.scale, TRUE.shape)
        est = (fit.params.loc, fit.params.scale, fit.params.shape)
        for e, t, se in zip(est, truth, fit.approx_std_errors):
            assert np.isfinite(se) and se > 0
            assert abs(e - t) < 3 * se

    def test_is_local_maximum(self, gev_data, gev_fit):
        p = gev_fit.params
        base = gev_fit.loglik
        rng = np.random.default_rng(2)
        for _ in range(25):
            cand = GevParams(
                p.loc + rng.normal(scale=0.02),
                p.scale * np.exp(rng.normal(scale=0.02)),
                p.shape + rng.normal(scale=0.01),
            )
            assert loglik_gev3(gev_data, cand) <= base + 1e-9

    def test_pp_kind_recovers_shape(self):
        from evscale.core import PpParams

        e = simulate_pp(PpParams(15.0, 1.5, -0.25, 1000.0), 20_000.0, seed=23)
        kind = ModelKind.exceedances(e.threshold, n_blocks=1000.0)
        fit = fit3_mle(e.exceedances, kind)
        assert abs(fit.params.shape - (-0.25)) < 3 * fit.approx_std_errors[2]

    def test_degenerate_data_error(self):
        with pytest.raises(NonConvergenceError):
            fit3_mle(np.ones(100), ModelKind.block_maxima())

    def test_too_few_points(self):
        with pytest.raises(UsageError):
            fit3_mle(np.arange(10.0) + 1, ModelKind.block_maxima())


class TestProfileLoglik:
    def test_reduces_to_fit3_at_unit_exponent(self, gev_data, gev_fit):
        value, ok = profile_loglik(
            gev_data, ModelKind.block_maxima(), gev_fit.params.shape, 1.0
        )
        assert ok
        assert value == pytest.approx(gev_fit.loglik, abs=1e-6)

    def test_unreachable_cell_flags(self, gev_data):
        value, ok = profile_loglik(gev_data, ModelKind.block_maxima(), 0.3, -0.5)
        assert value == -np.inf
        assert not ok

    def test_profile_dominates_random_search(self, gev_data):
        # the profiled value is the max over the two free coordinates:
        # a dense random search near the optimum cannot beat it, and
        # should come close
        from evscale.profile import _profile_cell

        kind = ModelKind.block_maxima()
        gamma_y, lam = -0.2, 1.4
        value, ok, xopt = _profile_cell(gev_data[:800], kind, gamma_y, lam)
        assert ok
        rng = np.random.default_rng(4)
        pts = xopt + rng.uniform(-0.03, 0.03, size=(10_000, 2))
        best = -np.inf
        for u1, u2 in pts:
            beta_x = np.exp(u1)
            m = TransformedModel(beta_x, u2, gamma_y, lam, slope_c=0.0)
            ll = loglik4(gev_data[:800], kind, m)
            assert ll <= value + 1e-9  # profile dominance
            best = max(best, ll)
        assert value - best < 1e-3


class TestBuildGrid:
    def test_grid_layout_and_convergence(self, gev_data, gev_fit):
        spec = GridSpec(n_gamma=7, n_lambda=9, lambda_range=(-1.0, 4.0))
        grid = build_grid(gev_data[:1500], ModelKind.block_maxima(), gev_fit, spec)
        assert grid.loglik.shape == (7, 9)
        assert np.all(np.diff(grid.gamma_values) > 0)
        assert np.all(np.diff(grid.lambda_values) > 0)
        frac = grid.converged.mean()
        assert frac >= 0.95
        # cell (i, j) belongs to (gamma_i, lambda_j)
        i, j = 3, 6
        val, ok = profile_loglik(
            gev_data[:1500],
            ModelKind.block_maxima(),
            grid.gamma_values[i],
            grid.lambda_values[j],
        )
        assert ok
        assert grid.loglik[i, j] == pytest.approx(val, abs=2e-3)

    def test_single_cell_grid_cannot_identify_slope(self, gev_data, gev_fit):
        spec = GridSpec(n_gamma=1, n_lambda=1, lambda_range=(0.999, 1.001))
        # a 1x1 grid is representable, but no slope is identifiable from it
        grid = build_grid(gev_data[:500], ModelKind.block_maxima(), gev_fit, spec)
        with pytest.raises(NumericalError):
            estimate_c(grid)

    def test_csv_serialization(self, tmp_path, gev_data, gev_fit):
        spec = GridSpec(n_gamma=3, n_lambda=3, lambda_range=(0.5, 1.5))
        grid = build_grid(gev_data[:500], ModelKind.block_maxima(), gev_fit, spec)
        path = tmp_path / "grid.csv"
        grid_to_csv(grid, path)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "gamma,lambda,loglik,converged"
        assert len(rows) == 1 + 9


def synthetic_ridge_grid(slope, curvature, n=41):
    gammas = np.linspace(-1.5, 2.0, n)
    lams = np.linspace(-1.0, 4.0, n)
    gg, ll = np.meshgrid(gammas, lams, indexing="ij")
    loglik = -curvature * (gg - slope * (ll - 1.0)) ** 2
    return ProfileGrid(
        gamma_values=gammas,
        lambda_values=lams,
        loglik=loglik,
        converged=np.ones_like(loglik, dtype=bool),
    )


class TestEstimateC:
    def test_constructed_ridge_recovers_slope(self):
        grid = synthetic_ridge_grid(slope=0.5, curvature=50.0)
        assert estimate_c(grid) == pytest.approx(0.5, abs=1e-3)

    def test_sharper_ridge_is_closer(self):
        loose = abs(estimate_c(synthetic_ridge_grid(slope=0.5, curvature=2.0)) - 0.5)
        sharp = abs(estimate_c(synthetic_ridge_grid(slope=0.5, curvature=500.0)) - 0.5)
        assert sharp < loose

    def test_invariant_to_constant_shift(self):
        grid = synthetic_ridge_grid(slope=0.3, curvature=30.0)
        shifted = ProfileGrid(
            gamma_values=grid.gamma_values,
            lambda_values=grid.lambda_values,
            loglik=grid.loglik - 123.456,
            converged=grid.converged,
        )
        assert estimate_c(shifted) == pytest.approx(estimate_c(grid), rel=1e-12)

    def test_weight_normalization(self):
        grid = synthetic_ridge_grid(slope=0.5, curvature=50.0)
        w = np.exp(2.0 * (grid.loglik - grid.max_loglik()))
        assert np.max(w) == pytest.approx(1.0)
        # mathematically the weights lie in (0, 1]; deep off-ridge cells
        # underflow to exactly zero in floats
        assert np.all((w >= 0) & (w <= 1.0))
        assert np.all(w[np.exp(2.0 * (grid.loglik - grid.max_loglik())) > 1e-300] > 0)

    def test_flat_grid_slope_is_zero(self):
        grid = synthetic_ridge_grid(slope=0.0, curvature=0.0)
        assert estimate_c(grid) == pytest.approx(0.0, abs=1e-12)

    def test_matches_ridge_trace_on_squared_data(self, gev_data, gev_fit):
        # oracle: ordinary least squares through the per-column argmax, over
        # the columns the weights actually support (within 2 log-likelihood
        # units of the top; beyond that the ridge curvature diverges from
        # the local slope the weighted fit estimates)
        data = gev_data[:1200] ** 2
        kind = ModelKind.block_maxima()
        fit = fit3_mle(data, kind)
        spec = GridSpec(n_gamma=41, n_lambda=21, lambda_range=(0.1, 1.2))
        grid = build_grid(data, kind, fit, spec)
        c = estimate_c(grid)
        finite = np.where(grid.converged, grid.loglik, -np.inf)
        colmax = finite.max(axis=0)
        keep = colmax >= colmax.max() - 2.0
        ridge_gamma = grid.gamma_values[np.argmax(finite, axis=0)]
        slope_trace = np.polyfit(grid.lambda_values[keep], ridge_gamma[keep], 1)[0]
        assert c == pytest.approx(slope_trace, rel=0.10)
