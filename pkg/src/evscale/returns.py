"""Return-level machinery: per-draw quantiles, posterior summaries,
posterior-predictive levels by root finding, and QQ diagnostics.

Return periods are expressed in blocks throughout.  A draw's level at
exceedance probability p is the 1-p quantile of its Y-scale GEV mapped
back through the inverse Box-Cox transform,

    y_p = loc_y - scale_y/shape_y * (1 - (-log(1-p))**(-shape_y)),
    x_p = (lam * y_p + 1)**(1/lam),

with the Gumbel limit at shape_y = 0.  For exceedance models fitted at
one block per exceedance, each exceedance plays the role of one block,
so the same formulas apply to the sampler output unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GevParams, ModelKind, SHAPE_EPS, gev_quantile, inverse_boxcox
from .errors import DomainError, NumericalError, UsageError
from .sampler import PosteriorDraws

__all__ = [
    "ReturnLevelSummary",
    "return_level",
    "posterior_return_levels",
    "predictive_return_level",
    "qq_data",
]

#: Bracket expansion factor and cap for the predictive root search.
_BRACKET_GROW = 1.5
_BRACKET_TRIES = 10


@dataclass(frozen=True)
class ReturnLevelSummary:
    """Posterior summary of the 1/p block return level."""

    return_period: float
    posterior_median: float
    credible_interval: tuple
    level: float
    predictive: float | None = None


def return_level(y_params: GevParams, lam: float, p: float) -> float:
    """Per-draw 1/p block return level on the original scale."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"exceedance probability must lie in (0, 1), got {p}")
    y = gev_quantile(1.0 - p, y_params)
    try:
        return inverse_boxcox(y, lam)
    except DomainError as exc:
        raise DomainError(
            f"return level undefined for draw {y_params} with lam={lam}: {exc} "
            "(inadmissible posterior state)"
        ) from exc


def _per_draw_levels(draws: PosteriorDraws, p: float) -> np.ndarray:
    """Vectorized per-draw return levels."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"exceedance probability must lie in (0, 1), got {p}")
    beta_y = draws.column("beta_y")
    alpha_y = draws.column("alpha_y")
    gamma_y = draws.column("gamma_y")
    lam = draws.column("lam")
    logw = np.log(-np.log1p(-p))
    small = np.abs(gamma_y) < SHAPE_EPS
    g_safe = np.where(small, 1.0, gamma_y)
    y = np.where(
        small,
        beta_y - alpha_y * logw,
        beta_y + alpha_y * np.expm1(-g_safe * logw) / g_safe,
    )
    lam_small = np.abs(lam) < SHAPE_EPS
    lam_safe = np.where(lam_small, 1.0, lam)
    t = lam_safe * y + 1.0
    if np.any(~lam_small & (t <= 0)):
        i = int(np.flatnonzero(~lam_small & (t <= 0))[0])
        raise DomainError(
            f"return level undefined for draw {i} "
            f"(lam={lam[i]}, y={y[i]}): transformed quantile outside the Box-Cox range"
        )
    with np.errstate(over="ignore"):
        x = np.where(lam_small, np.exp(y), np.exp(np.log(np.where(t > 0, t, 1.0)) / lam_safe))
    return x


def posterior_return_levels(
    draws: PosteriorDraws, p: float, level: float = 0.95
) -> ReturnLevelSummary:
    """Empirical median and central credible interval of the per-draw
    1/p block return levels."""
    if len(draws) == 0:
        raise UsageError("empty draws")
    if not 0.0 < level < 1.0:
        raise DomainError(f"credibility level must lie in (0, 1), got {level}")
    x = _per_draw_levels(draws, p)
    alpha = 0.5 * (1.0 - level)
    return ReturnLevelSummary(
        return_period=1.0 / p,
        posterior_median=float(np.median(x)),
        credible_interval=(float(np.quantile(x, alpha)), float(np.quantile(x, 1.0 - alpha))),
        level=level,
    )


def _predictive_cdf(draws: PosteriorDraws, x: float) -> float:
    """Posterior-averaged probability that a block maximum is <= x."""
    beta_y = draws.column("beta_y")
    alpha_y = draws.column("alpha_y")
    gamma_y = draws.column("gamma_y")
    lam = draws.column("lam")
    logx = np.log(x)
    small = np.abs(lam) < SHAPE_EPS
    lam_safe = np.where(small, 1.0, lam)
    y = np.where(small, logx, np.expm1(lam_safe * logx) / lam_safe)
    z = (y - beta_y) / alpha_y
    g_small = np.abs(gamma_y) < SHAPE_EPS
    g_safe = np.where(g_small, 1.0, gamma_y)
    t = 1.0 + g_safe * z
    with np.errstate(divide="ignore", over="ignore"):
        v = np.where(
            g_small,
            np.exp(-z),
            np.where(t > 0, np.exp(-np.log(np.where(t > 0, t, 1.0)) / g_safe), np.inf),
        )
    cdf = np.where(g_small | (t > 0), np.exp(-v), np.where(gamma_y > 0, 0.0, 1.0))
    return float(np.mean(cdf))


def predictive_return_level(draws: PosteriorDraws, p: float, tol: float = 1e-8) -> float:
    """1/p block level of the posterior predictive law, solving
    ``mean_draws P(M <= x | draw) = 1 - p`` by bracketed bisection.

    The averaged distribution function is a monotone mixture, so the root
    is unique; the bracket starts at the hull of the per-draw levels and
    expands multiplicatively up to a documented cap before failing.
    ``tol`` is relative in the level.
    """
    if len(draws) == 0:
        raise UsageError("empty draws")
    levels = _per_draw_levels(draws, p)
    lo = float(np.min(levels))
    hi = float(np.max(levels))
    if lo == hi:
        return lo
    target = 1.0 - p
    for _ in range(_BRACKET_TRIES):
        if _predictive_cdf(draws, lo) <= target:
            break
        lo /= _BRACKET_GROW
    else:
        raise NumericalError("predictive bracket: lower end never crossed the target")
    for _ in range(_BRACKET_TRIES):
        if _predictive_cdf(draws, hi) >= target:
            break
        hi *= _BRACKET_GROW
    else:
        raise NumericalError("predictive bracket: upper end never crossed the target")
    flo = _predictive_cdf(draws, lo)
    fhi = _predictive_cdf(draws, hi)
    while hi - lo > tol * max(abs(lo), abs(hi)):
        if not flo <= fhi:
            raise NumericalError("predictive distribution function is not monotone")
        mid = 0.5 * (lo + hi)
        fm = _predictive_cdf(draws, mid)
        if fm < target:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# QQ diagnostics
# ---------------------------------------------------------------------------

def qq_data(draws: PosteriorDraws, data, kind: ModelKind, band: float = 0.95) -> np.ndarray:
    """Pointwise QQ table: rows of (empirical, fitted median, band lo, band hi).

    Plotting positions are i/(m+1).  For block maxima the fitted quantile
    at position q is the per-draw return level with p = 1 - q; for
    exceedance models it is the quantile of the conditional law of an
    exceedance implied by the fitted intensity above the (transformed)
    threshold.  The fitted value is the posterior median across draws and
    the band the central ``band`` interval.
    """
    data = np.asarray(data, dtype=float)
    if np.any(np.diff(data) < 0):
        raise UsageError("data must be sorted ascending")
    if len(draws) == 0:
        raise UsageError("empty draws")
    m = data.size
    qs = np.arange(1, m + 1) / (m + 1.0)
    lo_q = 0.5 * (1.0 - band)
    out = np.empty((m, 4))
    for i, q in enumerate(qs):
        if kind.is_pp:
            x = _conditional_exceedance_quantiles(draws, kind.threshold, q)
        else:
            x = _per_draw_levels(draws, 1.0 - q)
        out[i] = (
            data[i],
            float(np.median(x)),
            float(np.quantile(x, lo_q)),
            float(np.quantile(x, 1.0 - lo_q)),
        )
    return out


def _conditional_exceedance_quantiles(draws: PosteriorDraws, threshold: float, q: float):
    """Per-draw q-quantiles of an exceedance above the threshold, under the
    fitted intensity: the tail decays like the intensity ratio
    (t(y)/t(u_y))**(-1/gamma) on the transformed scale."""
    beta_y = draws.column("beta_y")
    alpha_y = draws.column("alpha_y")
    gamma_y = draws.column("gamma_y")
    lam = draws.column("lam")
    small = np.abs(lam) < SHAPE_EPS
    lam_safe = np.where(small, 1.0, lam)
    logu = np.log(threshold)
    u_y = np.where(small, logu, np.expm1(lam_safe * logu) / lam_safe)
    g_small = np.abs(gamma_y) < SHAPE_EPS
    g_safe = np.where(g_small, 1.0, gamma_y)
    t_u = 1.0 + g_safe * (u_y - beta_y) / alpha_y
    if np.any(~g_small & (t_u <= 0)):
        i = int(np.flatnonzero(~g_small & (t_u <= 0))[0])
        raise DomainError(f"draw {i} puts the threshold outside its fitted support")
    # survival of an exceedance: (t(y)/t(u))**(-1/g); at g=0 exponential in y
    y = np.where(
        g_small,
        u_y - alpha_y * np.log1p(-q),
        beta_y + alpha_y / g_safe * (t_u * np.exp(-g_safe * np.log1p(-q)) - 1.0),
    )
    lam_t = lam_safe * y + 1.0
    if np.any(~small & (lam_t <= 0)):
        i = int(np.flatnonzero(~small & (lam_t <= 0))[0])
        raise DomainError(
            f"conditional quantile of draw {i} falls outside the Box-Cox range"
        )
    with np.errstate(over="ignore"):
        return np.where(
            small, np.exp(y), np.exp(np.log(np.where(lam_t > 0, lam_t, 1.0)) / lam_safe)
        )
