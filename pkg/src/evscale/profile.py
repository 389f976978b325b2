"""Frequentist pre-inference: 3-parameter fits, the profile log-likelihood
grid over (gamma_y, lam), and the weighted-least-squares slope estimate.

The four-parameter model needs a fixed slope linking the transformed-scale
shape to the Box-Cox exponent.  Working in the (gamma_y, lam)
parameterization, the profile log likelihood is computed on a grid by
maximizing over the two free location/scale coordinates, and the slope is
read off with weighted least squares in which the likelihood ridge
dominates (weights decay as exp(-2 * drop from the grid maximum)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .core import (
    GevParams,
    ModelKind,
    boxcox,
    inverse_boxcox,
    loglik4_given_y,
    loglik_gev3,
    loglik_pp3,
)
from .errors import DomainError, NonConvergenceError, NumericalError, UsageError

__all__ = [
    "Fit3Result",
    "GridSpec",
    "ProfileGrid",
    "fit3_mle",
    "profile_loglik",
    "build_grid",
    "estimate_c",
    "grid_to_csv",
]

#: Minimum sample size accepted by the 3-parameter fit.
MIN_FIT_POINTS = 20

_EULER = 0.5772156649015329


@dataclass(frozen=True)
class Fit3Result:
    params: GevParams
    loglik: float
    approx_std_errors: tuple
    converged: bool


def _loglik3(data, kind: ModelKind, p: GevParams) -> float:
    if kind.is_pp:
        n_blocks = kind.n_blocks if kind.n_blocks is not None else len(data)
        return loglik_pp3(data, kind.threshold, n_blocks, p)
    return loglik_gev3(data, p)


def _start_values(data, kind: ModelKind):
    """Moment-based starting values on the (loc, log scale, shape) scale."""
    data = np.asarray(data, dtype=float)
    if kind.is_pp:
        u = kind.threshold
        excess = data - u
        mean_e = float(np.mean(excess))
        var_e = float(np.var(excess))
        shape0 = 0.5 * (1.0 - mean_e**2 / var_e) if var_e > 0 else 0.0
        shape0 = float(np.clip(shape0, -0.4, 0.4))
        sigma_u = max(mean_e * (1.0 - shape0), 1e-8)
        n_blocks = kind.n_blocks if kind.n_blocks is not None else data.size
        ratio = data.size / n_blocks  # expected exceedances per block
        if abs(shape0) < 1e-8:
            loc0 = u + sigma_u * np.log(ratio)
            scale0 = sigma_u
        else:
            tu = ratio ** (-shape0)
            loc0 = u - sigma_u / tu * (tu - 1.0) / shape0
            scale0 = sigma_u / tu
        return np.array([loc0, np.log(scale0), shape0])
    scale0 = max(np.std(data) * np.sqrt(6.0) / np.pi, 1e-8)
    loc0 = float(np.mean(data)) - _EULER * scale0
    return np.array([loc0, np.log(scale0), 0.1])


def fit3_mle(data, kind: ModelKind, n_restarts: int = 8, seed: int = 0) -> Fit3Result:
    """Maximum likelihood fit of the 3-parameter model by derivative-free
    simplex search from moment-based starting values.

    Standard errors come from a finite-difference Hessian of the negative
    log likelihood at the optimum (NaN when that matrix is not positive
    definite).  Non-convergent runs restart from jittered starts; after
    ``n_restarts`` failures a :class:`NonConvergenceError` carrying the
    best state found is raised.
    """
    data = np.asarray(data, dtype=float)
    if data.size < MIN_FIT_POINTS:
        raise UsageError(
            f"fit3_mle needs at least {MIN_FIT_POINTS} points, got {data.size}"
        )
    if np.std(data) == 0:
        raise NonConvergenceError("degenerate data: all observations identical")

    def nll(theta):
        p = GevParams(theta[0], float(np.exp(theta[1])), theta[2])
        ll = _loglik3(data, kind, p)
        return -ll if np.isfinite(ll) else np.inf

    rng = np.random.default_rng(seed)
    x0 = _start_values(data, kind)
    best = None
    for attempt in range(n_restarts):
        start = x0 if attempt == 0 else x0 + rng.normal(scale=[0.5, 0.3, 0.1]) * (attempt)
        if not np.isfinite(nll(start)):
            continue
        res = minimize(
            nll, start, method="Nelder-Mead",
            options={"maxiter": 2000, "xatol": 1e-10, "fatol": 1e-10},
        )
        if best is None or res.fun < best.fun:
            best = res
        if res.success and np.isfinite(res.fun):
            best = res
            break
    if best is None or not np.isfinite(best.fun):
        raise NonConvergenceError("3-parameter fit found no finite likelihood", best=best)
    theta = best.x
    params = GevParams(theta[0], float(np.exp(theta[1])), theta[2])
    ses = _hessian_std_errors(data, kind, params)
    result = Fit3Result(
        params=params,
        loglik=-float(best.fun),
        approx_std_errors=ses,
        converged=bool(best.success),
    )
    if not best.success:
        raise NonConvergenceError(
            f"3-parameter fit did not converge in {n_restarts} restarts", best=result
        )
    return result


def _hessian_std_errors(data, kind: ModelKind, p: GevParams) -> tuple:
    """Central-difference Hessian of the negative log likelihood in the
    natural (loc, scale, shape) coordinates."""
    theta = np.array([p.loc, p.scale, p.shape])
    steps = 1e-4 * np.maximum(np.abs(theta), 0.1)

    def f(t):
        if t[1] <= 0:
            return np.inf
        ll = _loglik3(data, kind, GevParams(t[0], t[1], t[2]))
        return -ll if np.isfinite(ll) else np.inf

    hess = np.empty((3, 3))
    f0 = f(theta)
    for i in range(3):
        for j in range(i, 3):
            ei = np.zeros(3); ei[i] = steps[i]
            ej = np.zeros(3); ej[j] = steps[j]
            if i == j:
                val = (f(theta + ei) - 2.0 * f0 + f(theta - ei)) / steps[i] ** 2
            else:
                val = (
                    f(theta + ei + ej) - f(theta + ei - ej)
                    - f(theta - ei + ej) + f(theta - ei - ej)
                ) / (4.0 * steps[i] * steps[j])
            hess[i, j] = hess[j, i] = val
    if not np.all(np.isfinite(hess)):
        return (np.nan, np.nan, np.nan)
    try:
        cov = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        return (np.nan, np.nan, np.nan)
    diag = np.diag(cov)
    if np.any(diag <= 0):
        return (np.nan, np.nan, np.nan)
    return tuple(float(s) for s in np.sqrt(diag))


# ---------------------------------------------------------------------------
# Profile grid
# ---------------------------------------------------------------------------

def _neg_profile_objective(data, kind, gamma_y, lam):
    def nll(u):
        # u = (log beta_x, log alpha_x); positivity of beta_x by construction
        beta_x = float(np.exp(u[0]))
        y = GevParams(
            boxcox(beta_x, lam),
            float(np.exp((lam - 1.0) * u[0] + u[1])),
            gamma_y,
        )
        try:
            ll = loglik4_given_y(data, kind, y, lam)
        except (OverflowError, FloatingPointError):
            return np.inf
        return -ll if np.isfinite(ll) else np.inf

    return nll


def profile_loglik(data, kind: ModelKind, gamma_y: float, lam: float, start=None):
    """Profile log likelihood at fixed (gamma_y, lam), maximized over the
    free location/scale coordinates (log beta_x, log alpha_x).

    Returns ``(value, converged)``; cells with no admissible
    location/scale (e.g. lam < 0 with gamma_y >= 0) give ``(-inf, False)``
    rather than raising.
    """
    value, conv, _ = _profile_cell(data, kind, gamma_y, lam, start)
    return value, conv


def _profile_cell(data, kind, gamma_y, lam, start=None):
    data = np.asarray(data, dtype=float)
    if lam < 0 and gamma_y >= 0:
        return -np.inf, False, None
    nll = _neg_profile_objective(data, kind, gamma_y, lam)
    candidates = []
    if start is not None:
        candidates.append(np.asarray(start, dtype=float))
    candidates.append(_profile_start(data, kind, gamma_y, lam))
    best = None
    for s in candidates:
        if not np.isfinite(nll(s)):
            continue
        res = minimize(
            nll, s, method="Nelder-Mead",
            options={"maxiter": 800, "xatol": 1e-9, "fatol": 1e-9},
        )
        if best is None or res.fun < best.fun:
            best = res
        if np.isfinite(res.fun) and res.success:
            break
    if best is None or not np.isfinite(best.fun):
        return -np.inf, False, None
    return -float(best.fun), bool(best.success), best.x


def _profile_start(data, kind, gamma_y, lam):
    """Heuristic start that respects the support at the cell's shape: for a
    bounded fit the starting endpoint must clear the largest transformed
    point, for a heavy fit the lower endpoint must clear the smallest."""
    data = np.asarray(data, dtype=float)
    ydata = boxcox(data, lam)
    beta_y = float(np.median(ydata))
    spread = float(np.std(ydata)) if data.size > 1 else 1.0
    alpha_y = max(spread * np.sqrt(6.0) / np.pi, 1e-8)
    if gamma_y < 0:
        need = 1.2 * (-gamma_y) * (float(np.max(ydata)) - beta_y)
        alpha_y = max(alpha_y, need)
    elif gamma_y > 0:
        need = 1.2 * gamma_y * (beta_y - float(np.min(ydata)))
        alpha_y = max(alpha_y, need)
    if kind.is_pp:
        # anchor the location near the threshold, where the likelihood for
        # one-block-per-exceedance referencing concentrates it
        beta_y = max(beta_y, boxcox(kind.threshold, lam))
    # the median of transformed data is the transform of a data point, so it
    # is always inside the inverse transform's domain
    beta_x = max(float(inverse_boxcox(beta_y, lam)), 1e-8)
    log_beta_x = np.log(beta_x)
    log_alpha_x = np.log(alpha_y) - (lam - 1.0) * log_beta_x
    return np.array([log_beta_x, log_alpha_x])


@dataclass(frozen=True)
class GridSpec:
    """Grid geometry for the (gamma_y, lam) profile."""

    n_gamma: int = 41
    n_lambda: int = 41
    gamma_halfwidth_se: float = 4.0
    gamma_range: tuple | None = None
    lambda_range: tuple = (-1.0, 4.0)

    def __post_init__(self):
        if self.n_gamma < 1 or self.n_lambda < 1:
            raise DomainError("grid dimensions must be positive")
        if self.lambda_range[0] >= self.lambda_range[1]:
            raise DomainError(f"bad lambda range {self.lambda_range}")


@dataclass(frozen=True)
class ProfileGrid:
    """Profile log-likelihood values over an ascending (gamma, lambda) grid;
    ``loglik[i, j]`` belongs to ``(gamma_values[i], lambda_values[j])``."""

    gamma_values: np.ndarray
    lambda_values: np.ndarray
    loglik: np.ndarray
    converged: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma_values, dtype=float)
        l = np.asarray(self.lambda_values, dtype=float)
        ll = np.asarray(self.loglik, dtype=float)
        cv = np.asarray(self.converged, dtype=bool)
        if ll.shape != (g.size, l.size) or cv.shape != ll.shape:
            raise UsageError("grid matrices must match the axis lengths")
        if np.any(np.diff(g) < 0) or np.any(np.diff(l) < 0):
            raise UsageError("grid axes must be ascending")
        object.__setattr__(self, "gamma_values", g)
        object.__setattr__(self, "lambda_values", l)
        object.__setattr__(self, "loglik", ll)
        object.__setattr__(self, "converged", cv)

    def max_loglik(self) -> float:
        vals = self.loglik[self.converged & np.isfinite(self.loglik)]
        if vals.size == 0:
            raise NumericalError("no converged finite cells in the profile grid")
        return float(np.max(vals))


def build_grid(data, kind: ModelKind, fit3: Fit3Result, spec: GridSpec = GridSpec()) -> ProfileGrid:
    """Evaluate the profile on the grid implied by ``spec``.

    The gamma axis defaults to the 3-parameter shape estimate plus/minus
    ``gamma_halfwidth_se`` standard errors.  Cells are swept column-wise
    in lam starting from the column nearest 1 (whose center cell has a
    known good start from the 3-parameter fit), warm-starting each cell
    from its converged neighbor.
    """
    if not fit3.converged:
        raise UsageError("build_grid needs a converged 3-parameter fit")
    data = np.asarray(data, dtype=float)
    if spec.gamma_range is not None:
        g_lo, g_hi = spec.gamma_range
    else:
        se = fit3.approx_std_errors[2]
        if not np.isfinite(se) or se <= 0:
            se = 0.2  # fallback width when the Hessian was unusable
        g_lo = fit3.params.shape - spec.gamma_halfwidth_se * se
        g_hi = fit3.params.shape + spec.gamma_halfwidth_se * se
    gammas = np.linspace(g_lo, g_hi, spec.n_gamma)
    lams = np.linspace(spec.lambda_range[0], spec.lambda_range[1], spec.n_lambda)

    loglik = np.full((spec.n_gamma, spec.n_lambda), -np.inf)
    conv = np.zeros((spec.n_gamma, spec.n_lambda), dtype=bool)
    starts = np.empty((spec.n_gamma, spec.n_lambda), dtype=object)

    j0 = int(np.argmin(np.abs(lams - 1.0)))
    i0 = int(np.argmin(np.abs(gammas - fit3.params.shape)))
    center_start = np.array([np.log(max(fit3.params.loc, 1e-6)), np.log(fit3.params.scale)])

    order = [j0]
    for step in range(1, spec.n_lambda):
        if j0 + step < spec.n_lambda:
            order.append(j0 + step)
        if j0 - step >= 0:
            order.append(j0 - step)

    for j in order:
        lam = lams[j]
        # nearest already-computed column supplies row-wise warm starts
        donor = None
        if j != j0:
            computed = [jj for jj in order[: order.index(j)] ]
            donor = min(computed, key=lambda jj: abs(lams[jj] - lam))
        row_order = list(range(i0, spec.n_gamma)) + list(range(i0 - 1, -1, -1))
        prev_in_col = None
        for i in row_order:
            if i == i0 and j == j0:
                start = center_start
            elif donor is not None and starts[i, donor] is not None:
                start = starts[i, donor]
            elif prev_in_col is not None:
                start = prev_in_col
            else:
                start = None
            value, ok, xopt = _profile_cell(data, kind, gammas[i], lam, start)
            loglik[i, j] = value
            conv[i, j] = ok
            starts[i, j] = xopt
            if xopt is not None:
                prev_in_col = xopt
            if i == i0 - 1:
                prev_in_col = starts[i0, j]
    return ProfileGrid(gamma_values=gammas, lambda_values=lams, loglik=loglik, converged=conv)


def estimate_c(grid: ProfileGrid) -> float:
    """Slope of gamma_y on lam by weighted least squares over converged
    cells, weights ``exp(-2 * (max loglik - loglik))`` so the likelihood
    ridge dominates; an intercept absorbs the shape estimate at lam = 1.
    """
    mask = grid.converged & np.isfinite(grid.loglik)
    if not np.any(mask):
        raise NumericalError("no usable cells; refine the profile grid")
    top = grid.max_loglik()
    w = np.where(mask, np.exp(2.0 * (grid.loglik - top)), 0.0)
    gg, ll = np.meshgrid(grid.gamma_values, grid.lambda_values, indexing="ij")
    wsum = w.sum()
    if wsum <= 0 or not np.isfinite(wsum):
        raise NumericalError("profile weights vanished; refine the profile grid")
    lbar = float((w * ll).sum() / wsum)
    gbar = float((w * gg).sum() / wsum)
    sxx = float((w * (ll - lbar) ** 2).sum())
    if sxx <= 0:
        raise NumericalError(
            "no lambda spread among usable grid cells; widen or refine the grid"
        )
    sxy = float((w * (ll - lbar) * (gg - gbar)).sum())
    return sxy / sxx


def grid_to_csv(grid: ProfileGrid, path):
    """Serialize the grid in long format (gamma, lambda, loglik, converged)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("gamma,lambda,loglik,converged\n")
        for i, g in enumerate(grid.gamma_values):
            for j, lam in enumerate(grid.lambda_values):
                fh.write(
                    f"{g!r},{lam!r},{grid.loglik[i, j]!r},{int(grid.converged[i, j])}\n"
                )
