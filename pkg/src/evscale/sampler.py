"""Component-wise Metropolis-Hastings over {beta_x, log_alpha_x, gamma_x, lam}.

Gaussian random-walk proposals for the three location/scale/shape
coordinates (vague independent Gaussian priors centered on the
3-parameter fit) and an independence proposal, uniform on the prior
range, for the Box-Cox exponent.  States where a negative exponent is
inconsistent with the fitted tail (shape_y >= 0, or upper endpoint
beyond -1/lam) carry zero posterior mass.  For exceedance models the
likelihood is referenced to as many blocks as exceedances, which keeps
the location coordinate near the fixed threshold and decorrelates it
from the rest; results convert to other block counts afterwards via
:func:`evscale.core.convert_pp_nblocks`.

Proposal scales adapt toward ~0.44 per-component acceptance during
burn-in and freeze afterwards, so the retained chain targets the correct
stationary law.  One full sweep updates the components in the fixed
order (beta_x, log_alpha_x, gamma_x, lam).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import GevParams, ModelKind, SHAPE_EPS, boxcox, loglik4_given_y
from .errors import DomainError, NumericalError, UsageError
from .profile import Fit3Result

__all__ = [
    "PriorSpec",
    "SamplerConfig",
    "PosteriorDraws",
    "run_mcmc",
    "chain_diagnostics",
    "posterior_for_original_params",
    "effective_sample_size",
]

PARAM_NAMES = ("beta_x", "log_alpha_x", "gamma_x", "lam")
DERIVED_NAMES = ("beta_y", "alpha_y", "gamma_y")

#: Target per-component acceptance rate for burn-in step adaptation.
TARGET_ACCEPT = 0.44
_ADAPT_BATCH = 50


@dataclass(frozen=True)
class PriorSpec:
    """Vague Gaussian priors for (beta_x, log_alpha_x, gamma_x) plus a
    uniform prior range for the exponent.

    A degenerate range (lo == hi) pins the exponent, which reduces the
    model to the 3-parameter one at that exponent.
    """

    gaussian_center: tuple
    gaussian_variance: float = 1e4
    lambda_range: tuple = (-1.0, 4.0)

    def __post_init__(self):
        if len(self.gaussian_center) != 3:
            raise UsageError("gaussian_center must have three components")
        if not self.gaussian_variance > 0:
            raise DomainError(f"prior variance must be positive, got {self.gaussian_variance}")
        lo, hi = self.lambda_range
        if lo > hi:
            raise DomainError(f"bad lambda range {self.lambda_range}")

    @classmethod
    def from_fit3(cls, fit: Fit3Result, lambda_range, gaussian_variance: float = 1e4):
        center = (fit.params.loc, float(np.log(fit.params.scale)), fit.params.shape)
        return cls(center, gaussian_variance, tuple(lambda_range))

    @property
    def lambda_pinned(self) -> bool:
        return self.lambda_range[0] == self.lambda_range[1]


@dataclass(frozen=True)
class SamplerConfig:
    iterations: int = 10_000
    burn_in: int = 1_000
    seed: int = 0
    step_scales: tuple = (0.1, 0.05, 0.05)
    adapt: bool = True
    prior_only: bool = False

    def __post_init__(self):
        if self.iterations <= 0:
            raise DomainError(f"iterations must be positive, got {self.iterations}")
        if self.burn_in < 0:
            raise DomainError(f"burn-in must be nonnegative, got {self.burn_in}")
        if len(self.step_scales) != 3 or any(s <= 0 for s in self.step_scales):
            raise DomainError(f"need three positive step scales, got {self.step_scales}")


@dataclass(frozen=True)
class PosteriorDraws:
    """Post-burn-in states (iterations x 4) with the implied Y-scale
    columns, per-component acceptance rates and the fixed slope used."""

    states: np.ndarray
    derived: np.ndarray
    acceptance: dict
    slope_c: float
    kind: ModelKind
    lambda_range: tuple

    def __len__(self):
        return self.states.shape[0]

    def column(self, name: str) -> np.ndarray:
        if name in PARAM_NAMES:
            return self.states[:, PARAM_NAMES.index(name)]
        if name in DERIVED_NAMES:
            return self.derived[:, DERIVED_NAMES.index(name)]
        raise UsageError(f"unknown column {name!r}")

    def y_params_at(self, i: int) -> GevParams:
        b, a, g = self.derived[i]
        return GevParams(b, a, g)

    def to_csv(self, path):
        """Write draws with a header naming all seven columns plus the
        iteration index."""
        header = "iteration," + ",".join(PARAM_NAMES + DERIVED_NAMES)
        table = np.column_stack([np.arange(len(self)), self.states, self.derived])
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for row in table:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _derived_columns(states: np.ndarray, slope_c: float) -> np.ndarray:
    b, la, g, lam = states.T
    logb = np.log(b)
    small = np.abs(lam) < SHAPE_EPS
    lam_safe = np.where(small, 1.0, lam)
    with np.errstate(over="ignore"):
        beta_y = np.where(small, logb, np.expm1(lam_safe * logb) / lam_safe)
    alpha_y = np.exp((lam - 1.0) * logb + la)
    gamma_y = g + slope_c * (lam - 1.0)
    return np.column_stack([beta_y, alpha_y, gamma_y])


def run_mcmc(
    data,
    kind: ModelKind,
    slope_c: float,
    priors: PriorSpec,
    config: SamplerConfig = SamplerConfig(),
) -> PosteriorDraws:
    """Draw from the 4-parameter posterior.

    Reported draws exclude burn-in, and identical data/config/seed give a
    bit-identical draw matrix.  Raises :class:`NumericalError` if any
    updated component accepts nothing during burn-in (step scales or the
    exponent range need revision).
    """
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise UsageError("run_mcmc needs data")
    if np.any(data <= 0) or not np.all(np.isfinite(data)):
        raise DomainError("4-parameter inference needs strictly positive finite data")
    if kind.is_pp and np.any(data <= kind.threshold):
        raise UsageError("all data must exceed the threshold for exceedance models")

    # exceedance likelihoods run at one block per exceedance
    like_kind = (
        ModelKind.exceedances(kind.threshold, n_blocks=float(data.size))
        if kind.is_pp
        else kind
    )

    lo, hi = priors.lambda_range
    center = np.asarray(priors.gaussian_center, dtype=float)
    inv_var = 1.0 / priors.gaussian_variance
    sum_log_data = float(np.sum(np.log(data)))

    def log_post(theta):
        b, la, g, lam = theta
        if b <= 0 or not lo <= lam <= hi:
            return -np.inf
        lp = -0.5 * inv_var * float(np.sum((theta[:3] - center) ** 2))
        y = _y_params(theta)
        if y is None:
            return -np.inf
        if lam < 0:
            if y.shape >= 0 or y.upper_endpoint() > -1.0 / lam:
                return -np.inf
        if config.prior_only:
            return lp
        ll = loglik4_given_y(data, like_kind, y, lam)
        if not np.isfinite(ll):
            return -np.inf
        return lp + ll

    def _y_params(theta):
        b, la, g, lam = theta
        try:
            with np.errstate(over="ignore"):
                scale_y = float(np.exp((lam - 1.0) * np.log(b) + la))
                loc_y = boxcox(b, lam)
            if not (np.isfinite(scale_y) and np.isfinite(loc_y)) or scale_y <= 0:
                return None
            return GevParams(loc_y, scale_y, g + slope_c * (lam - 1.0))
        except (DomainError, OverflowError):
            return None

    rng = np.random.default_rng(config.seed)
    lam0 = 1.0 if lo <= 1.0 <= hi else 0.5 * (lo + hi)
    theta = np.array([center[0], center[1], center[2], lam0])
    lp = log_post(theta)
    if not np.isfinite(lp):
        for _ in range(200):
            cand = theta.copy()
            cand[:3] = center + rng.normal(scale=0.05, size=3) * np.maximum(np.abs(center), 1.0)
            cand[3] = rng.uniform(lo, hi) if hi > lo else lo
            lp_c = log_post(cand)
            if np.isfinite(lp_c):
                theta, lp = cand, lp_c
                break
        else:
            raise NumericalError(
                "no admissible starting state found; check the prior centering "
                "and the exponent range"
            )

    scales = np.asarray(config.step_scales, dtype=float).copy()
    update_lam = not priors.lambda_pinned
    total = config.burn_in + config.iterations
    kept = np.empty((config.iterations, 4))
    accept_burn = np.zeros(4, dtype=int)
    accept_kept = np.zeros(4, dtype=int)
    batch_accept = np.zeros(3, dtype=int)

    for it in range(total):
        in_burn = it < config.burn_in
        for comp in range(3):
            prop = theta.copy()
            prop[comp] += scales[comp] * rng.normal()
            lp_prop = log_post(prop)
            if np.log(rng.random()) < lp_prop - lp:
                theta, lp = prop, lp_prop
                if in_burn:
                    accept_burn[comp] += 1
                    batch_accept[comp] += 1
                else:
                    accept_kept[comp] += 1
        if update_lam:
            prop = theta.copy()
            prop[3] = rng.uniform(lo, hi)
            lp_prop = log_post(prop)
            # independence proposal with uniform law: the proposal density cancels
            if np.log(rng.random()) < lp_prop - lp:
                theta, lp = prop, lp_prop
                if in_burn:
                    accept_burn[3] += 1
                else:
                    accept_kept[3] += 1
        if in_burn and config.adapt and (it + 1) % _ADAPT_BATCH == 0:
            rates = batch_accept / _ADAPT_BATCH
            scales *= np.exp(rates - TARGET_ACCEPT)
            scales = np.clip(scales, 1e-8, 1e4)
            batch_accept[:] = 0
        if not in_burn:
            kept[it - config.burn_in] = theta

    if config.burn_in > 0:
        stuck = [
            PARAM_NAMES[i]
            for i in range(4)
            if (i < 3 or update_lam) and accept_burn[i] == 0
        ]
        if stuck:
            raise NumericalError(
                f"no accepted proposals for {stuck} during burn-in; revise the "
                "step scales (components) or the exponent range"
            )

    acceptance = {
        name: accept_kept[i] / config.iterations if (i < 3 or update_lam) else np.nan
        for i, name in enumerate(PARAM_NAMES)
    }
    return PosteriorDraws(
        states=kept,
        derived=_derived_columns(kept, slope_c),
        acceptance=acceptance,
        slope_c=slope_c,
        kind=kind,
        lambda_range=(lo, hi),
    )


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def effective_sample_size(x) -> float:
    """Autocorrelation-based ESS with Geyer initial-positive truncation.

    A constant chain has no information; it reports an ESS of 1 with a
    warning.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        return float(n)
    var = np.var(x)
    if var == 0:
        warnings.warn("constant chain: effective sample size is degenerate")
        return 1.0
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x - x.mean(), m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n].real / n
    rho = acov / acov[0]
    # sum consecutive pairs while they stay positive
    s = 0.0
    for k in range(1, n - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0:
            break
        s += pair
    ess = n / (1.0 + 2.0 * s)
    return float(np.clip(ess, 1.0, n))


def chain_diagnostics(draws: PosteriorDraws) -> dict:
    """Acceptance rates, ESS and posterior summaries per column."""
    if len(draws) == 0:
        raise UsageError("empty draws")
    out = {"acceptance": dict(draws.acceptance), "ess": {}, "summary": {}}
    for name in PARAM_NAMES + DERIVED_NAMES:
        col = draws.column(name)
        out["ess"][name] = effective_sample_size(col)
        out["summary"][name] = {
            "mean": float(np.mean(col)),
            "median": float(np.median(col)),
            "q025": float(np.quantile(col, 0.025)),
            "q975": float(np.quantile(col, 0.975)),
        }
    return out


def posterior_for_original_params(draws: PosteriorDraws) -> np.ndarray:
    """Row-wise map of the draws to the natural Y-scale parameter set
    (beta_y, alpha_y, gamma_y, lam); dependence structure is preserved."""
    return np.column_stack([draws.derived, draws.states[:, 3]])
