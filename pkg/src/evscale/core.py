"""Distributions, transforms and likelihoods for 3- and 4-parameter
extreme value models.

The three-parameter objects are the generalized extreme value (GEV)
distribution for block maxima and the nonhomogeneous Poisson process (PP)
for threshold exceedances, sharing the (location, scale, shape) triple.
The four-parameter extension applies a Box-Cox transform with exponent
``lam`` to the data and carries the model on the transformed (Y) scale,
parameterized by the X-scale quantities ``{beta_x, log_alpha_x, gamma_x,
lam}`` plus a fixed slope ``slope_c`` that links the X- and Y-scale shape
parameters.  Conversions to the natural Y scale happen at the API
boundary via :func:`to_y_params`.

Shape-parameter convention: ``shape > 0`` is the heavy-tailed (Frechet)
type, ``shape < 0`` the bounded (negative Weibull) type, and ``shape = 0``
the Gumbel limit, which is always evaluated through its analytic limiting
form rather than left to floating point (see :data:`SHAPE_EPS`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError

__all__ = [
    "SHAPE_EPS",
    "GevParams",
    "PpParams",
    "ModelKind",
    "TransformedModel",
    "boxcox",
    "inverse_boxcox",
    "gev_cdf",
    "gev_logpdf",
    "gev_quantile",
    "loglik_gev3",
    "loglik_pp3",
    "to_y_params",
    "loglik4",
    "loglik4_given_y",
    "pp_intensity",
    "convert_pp_nblocks",
]

#: Below this magnitude a shape parameter (or Box-Cox exponent) is treated
#: as exactly zero and the analytic Gumbel / logarithmic branch is used.
#: 1e-8 keeps the switched branches consistent to ~1e-9 while avoiding the
#: catastrophic cancellation of the general formulas near zero.
SHAPE_EPS = 1e-8


def _asfloat(x):
    arr = np.asarray(x, dtype=float)
    return arr


@dataclass(frozen=True)
class GevParams:
    """Location / scale / shape triple for a GEV or PP model.

    The support is ``{x : 1 + shape * (x - loc) / scale > 0}``.
    """

    loc: float
    scale: float
    shape: float

    def __post_init__(self):
        if not np.isfinite(self.loc) or not np.isfinite(self.scale) or not np.isfinite(self.shape):
            raise DomainError(f"GEV parameters must be finite, got {self}")
        if self.scale <= 0:
            raise DomainError(f"GEV scale must be positive, got {self.scale}")

    def upper_endpoint(self) -> float:
        """Upper end of the support (+inf unless shape < 0)."""
        if self.shape < -SHAPE_EPS:
            return self.loc - self.scale / self.shape
        return np.inf

    def lower_endpoint(self) -> float:
        """Lower end of the support (-inf unless shape > 0)."""
        if self.shape > SHAPE_EPS:
            return self.loc - self.scale / self.shape
        return -np.inf


@dataclass(frozen=True)
class PpParams:
    """Poisson process parameters: GEV-compatible triple plus block count."""

    loc: float
    scale: float
    shape: float
    n_blocks: float

    def __post_init__(self):
        if self.scale <= 0:
            raise DomainError(f"PP scale must be positive, got {self.scale}")
        if not self.n_blocks > 0:
            raise DomainError(f"PP block count must be positive, got {self.n_blocks}")

    def gev_params(self) -> GevParams:
        return GevParams(self.loc, self.scale, self.shape)


@dataclass(frozen=True)
class ModelKind:
    """Which extreme data the likelihood sees.

    Either block maxima (GEV likelihood) or threshold exceedances (PP
    likelihood above ``threshold``).  For exceedances, ``n_blocks=None``
    means "reference the likelihood to as many blocks as there are
    exceedances", the convention that decorrelates the location parameter
    from the rest; pass an explicit count to override.
    """

    kind: str
    threshold: float | None = None
    n_blocks: float | None = None

    def __post_init__(self):
        if self.kind not in ("gev", "pp"):
            raise UsageError(f"model kind must be 'gev' or 'pp', got {self.kind!r}")
        if self.kind == "pp":
            if self.threshold is None:
                raise UsageError("exceedance models need a threshold")
            if not self.threshold > 0:
                raise DomainError(
                    f"exceedance threshold must be positive, got {self.threshold}"
                )
            if self.n_blocks is not None and not self.n_blocks > 0:
                raise DomainError(f"block count must be positive, got {self.n_blocks}")
        elif self.threshold is not None:
            raise UsageError("block-maxima models take no threshold")

    @classmethod
    def block_maxima(cls) -> "ModelKind":
        return cls("gev")

    @classmethod
    def exceedances(cls, threshold: float, n_blocks: float | None = None) -> "ModelKind":
        return cls("pp", threshold=threshold, n_blocks=n_blocks)

    @property
    def is_pp(self) -> bool:
        return self.kind == "pp"


@dataclass(frozen=True)
class TransformedModel:
    """Four-parameter model state {beta_x, log_alpha_x, gamma_x, lam} with
    the fixed shape-slope ``slope_c``.

    ``slope_c`` is estimated before inference (see :mod:`evscale.profile`)
    and is immutable here: the Y-scale shape is always
    ``gamma_x + slope_c * (lam - 1)``.
    """

    beta_x: float
    log_alpha_x: float
    gamma_x: float
    lam: float
    slope_c: float

    def __post_init__(self):
        if not self.beta_x > 0:
            raise DomainError(
                f"X-scale location must be positive for a Box-Cox model, got {self.beta_x}"
            )


# ---------------------------------------------------------------------------
# Box-Cox transform
# ---------------------------------------------------------------------------

def boxcox(x, lam: float):
    """Box-Cox transform ``(x**lam - 1) / lam`` (``log x`` at ``lam = 0``).

    Strictly increasing in ``x`` and continuous in ``lam``; the
    logarithmic branch is taken for ``|lam| < SHAPE_EPS``.

    Parameters
    ----------
    x : float or array_like
        Strictly positive value(s).
    lam : float
        Transform exponent.

    Raises
    ------
    DomainError
        If any entry of ``x`` is nonpositive or non-finite.
    """
    arr = _asfloat(x)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0)):
        bad = arr[~(np.isfinite(arr) & (arr > 0))].ravel()[0]
        raise DomainError(f"Box-Cox transform needs positive finite input, got {bad}")
    logx = np.log(arr)
    if abs(lam) < SHAPE_EPS:
        out = logx
    else:
        # expm1 keeps precision uniformly in lam, including lam near 0
        out = np.expm1(lam * logx) / lam
    return float(out) if np.ndim(x) == 0 else out


def inverse_boxcox(y, lam: float):
    """Inverse Box-Cox transform ``(lam*y + 1)**(1/lam)`` (``exp(y)`` at 0).

    Raises
    ------
    DomainError
        If ``lam*y + 1 <= 0`` anywhere (point beyond the transformed
        support).
    """
    arr = _asfloat(y)
    if abs(lam) < SHAPE_EPS:
        out = np.exp(arr)
    else:
        t = lam * arr
        if arr.size and np.any(t <= -1):
            bad = arr[t <= -1].ravel()[0]
            raise DomainError(
                f"inverse Box-Cox undefined at y={bad} for lam={lam} (lam*y + 1 <= 0)"
            )
        out = np.exp(np.log1p(t) / lam)
    return float(out) if np.ndim(y) == 0 else out


# ---------------------------------------------------------------------------
# GEV distribution
# ---------------------------------------------------------------------------

def gev_cdf(x, p: GevParams):
    """GEV distribution function ``exp(-[1 + shape*(x-loc)/scale]_+^(-1/shape))``.

    Total on the reals: returns 0 below a ``shape > 0`` lower endpoint and
    1 above a ``shape < 0`` upper endpoint.
    """
    z = (_asfloat(x) - p.loc) / p.scale
    if abs(p.shape) < SHAPE_EPS:
        out = np.exp(-np.exp(-z))
    else:
        t = 1.0 + p.shape * z
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = np.where(t > 0, np.exp(-np.log(np.where(t > 0, t, 1.0)) / p.shape), np.inf)
        out = np.where(t > 0, np.exp(-v), 0.0 if p.shape > 0 else 1.0)
    return float(out) if np.ndim(x) == 0 else out


def gev_logpdf(x, p: GevParams):
    """Log density of the GEV; ``-inf`` outside the support."""
    z = (_asfloat(x) - p.loc) / p.scale
    if abs(p.shape) < SHAPE_EPS:
        out = -np.log(p.scale) - z - np.exp(-z)
    else:
        t = 1.0 + p.shape * z
        ok = t > 0
        logt = np.log(np.where(ok, t, 1.0))
        with np.errstate(over="ignore"):
            out = np.where(
                ok,
                -np.log(p.scale) - (1.0 + 1.0 / p.shape) * logt - np.exp(-logt / p.shape),
                -np.inf,
            )
    return float(out) if np.ndim(x) == 0 else out


def gev_quantile(q, p: GevParams):
    """Quantile function of the GEV at probability ``q`` in (0, 1)."""
    arr = _asfloat(q)
    if arr.size and (np.any(arr <= 0) or np.any(arr >= 1)):
        bad = arr[(arr <= 0) | (arr >= 1)].ravel()[0]
        raise DomainError(f"quantile probability must lie strictly in (0, 1), got {bad}")
    w = -np.log(arr)  # standard exponential quantile of -log(q)
    if abs(p.shape) < SHAPE_EPS:
        out = p.loc - p.scale * np.log(w)
    else:
        # ((-log q)**(-shape) - 1) / shape, via expm1 for small shapes
        out = p.loc + p.scale * np.expm1(-p.shape * np.log(w)) / p.shape
    return float(out) if np.ndim(q) == 0 else out


# ---------------------------------------------------------------------------
# Likelihoods
# ---------------------------------------------------------------------------

def loglik_gev3(data, p: GevParams) -> float:
    """GEV log likelihood of iid block maxima.

    Returns ``-inf`` (not an error) if any point falls outside the
    support implied by ``p``; raises :class:`UsageError` on empty data.
    """
    arr = np.atleast_1d(_asfloat(data))
    if arr.size == 0:
        raise UsageError("loglik_gev3 needs at least one data point")
    terms = gev_logpdf(arr, p)
    if np.any(np.isneginf(terms)):
        return -np.inf
    return float(np.sum(terms))


def loglik_pp3(data, threshold: float, n_blocks: float, p: GevParams) -> float:
    """Poisson-process log likelihood of exceedances above ``threshold``.

    The survival term ``-n_blocks * [1 + shape*(u-loc)/scale]_+**(-1/shape)``
    plus one log-intensity term per exceedance.  An empty exceedance set is
    valid (pure survival term); data at or below the threshold raise.
    Constraint violations (threshold or data outside the parameter
    support) yield ``-inf``.
    """
    arr = np.atleast_1d(_asfloat(data)) if data is not None else np.empty(0)
    if not n_blocks > 0:
        raise DomainError(f"block count must be positive, got {n_blocks}")
    if arr.size and np.any(arr <= threshold):
        bad = arr[arr <= threshold].ravel()[0]
        raise UsageError(f"exceedance {bad} is not above the threshold {threshold}")

    if abs(p.shape) < SHAPE_EPS:
        zu = (threshold - p.loc) / p.scale
        ll = -n_blocks * np.exp(-zu)
        if arr.size:
            ll += np.sum(-np.log(p.scale) - (arr - p.loc) / p.scale)
        return float(ll)

    tu = 1.0 + p.shape * (threshold - p.loc) / p.scale
    if tu <= 0:
        return -np.inf
    ll = -n_blocks * np.exp(-np.log(tu) / p.shape)
    if arr.size:
        t = 1.0 + p.shape * (arr - p.loc) / p.scale
        if np.any(t <= 0):
            return -np.inf
        ll += np.sum(-np.log(p.scale) - (1.0 / p.shape + 1.0) * np.log(t))
    return float(ll)


# ---------------------------------------------------------------------------
# Four-parameter model
# ---------------------------------------------------------------------------

def to_y_params(m: TransformedModel) -> GevParams:
    """Map a transformed-model state to its Y-scale GEV parameters.

    ``loc_y = boxcox(beta_x, lam)``,
    ``log scale_y = (lam - 1) log beta_x + log_alpha_x``,
    ``shape_y = gamma_x + slope_c (lam - 1)``.
    """
    loc_y = boxcox(m.beta_x, m.lam)
    log_scale_y = (m.lam - 1.0) * np.log(m.beta_x) + m.log_alpha_x
    shape_y = m.gamma_x + m.slope_c * (m.lam - 1.0)
    return GevParams(loc_y, float(np.exp(log_scale_y)), shape_y)


def _admissible(y: GevParams, lam: float) -> bool:
    """Support constraints tying the Box-Cox exponent to the Y-scale tail.

    A negative exponent forces a finite upper endpoint at ``-1/lam`` on
    the Y scale, so it requires a bounded fitted tail (``shape_y < 0``)
    whose endpoint does not exceed ``-1/lam``.
    """
    if lam < 0:
        if y.shape >= 0:
            return False
        if y.upper_endpoint() > -1.0 / lam:
            return False
    return True


def loglik4_given_y(data, kind: ModelKind, y: GevParams, lam: float) -> float:
    """Four-parameter log likelihood with Y-scale parameters given directly.

    Transforms the data (and threshold, for exceedance models) by the
    Box-Cox map, evaluates the matching three-parameter likelihood, and
    adds the change-of-variables term ``(lam - 1) * sum(log data)``.
    States violating the negative-``lam`` endpoint constraints score
    ``-inf``.  Nonpositive data raise.
    """
    arr = np.atleast_1d(_asfloat(data))
    if not _admissible(y, lam):
        return -np.inf
    ydata = boxcox(arr, lam)
    jac = (lam - 1.0) * float(np.sum(np.log(arr))) if arr.size else 0.0
    if kind.is_pp:
        u = kind.threshold
        if arr.size and np.any(arr <= u):
            bad = arr[arr <= u].ravel()[0]
            raise UsageError(f"exceedance {bad} is not above the threshold {u}")
        n_blocks = kind.n_blocks if kind.n_blocks is not None else max(arr.size, 1)
        ll = loglik_pp3(ydata, boxcox(u, lam), n_blocks, y)
    else:
        if arr.size == 0:
            raise UsageError("loglik4 needs at least one data point")
        ll = loglik_gev3(ydata, y)
    if not np.isfinite(ll):
        return -np.inf
    return ll + jac


def loglik4(data, kind: ModelKind, m: TransformedModel) -> float:
    """Four-parameter log likelihood of a :class:`TransformedModel`.

    At ``lam = 1`` this reduces exactly to the three-parameter likelihood
    with parameters ``(beta_x, exp(log_alpha_x), gamma_x)``.
    """
    return loglik4_given_y(data, kind, to_y_params(m), m.lam)


# ---------------------------------------------------------------------------
# Poisson process block-count conversion
# ---------------------------------------------------------------------------

def pp_intensity(x, p: PpParams):
    """Expected number of process points above ``x`` over the whole window,
    ``n_blocks * [1 + shape*(x-loc)/scale]_+**(-1/shape)``.
    """
    arr = _asfloat(x)
    if abs(p.shape) < SHAPE_EPS:
        out = p.n_blocks * np.exp(-(arr - p.loc) / p.scale)
    else:
        t = 1.0 + p.shape * (arr - p.loc) / p.scale
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(
                t > 0,
                p.n_blocks * np.exp(-np.log(np.where(t > 0, t, 1.0)) / p.shape),
                np.inf if p.shape > 0 else 0.0,
            )
    return float(out) if np.ndim(x) == 0 else out


def convert_pp_nblocks(p: PpParams, to_n_blocks: float) -> PpParams:
    """Re-reference PP parameters to a different block count.

    The shape is unchanged and location/scale shift so that the intensity
    measure over every rectangle is preserved:
    ``scale' = scale * r**(-shape)`` and
    ``loc' = loc + scale/shape * (r**(-shape) - 1)`` with
    ``r = to_n_blocks / n_blocks`` (log limit at shape 0).
    """
    if not to_n_blocks > 0:
        raise DomainError(f"block count must be positive, got {to_n_blocks}")
    r = to_n_blocks / p.n_blocks
    if abs(p.shape) < SHAPE_EPS:
        return PpParams(p.loc - p.scale * np.log(r), p.scale, p.shape, to_n_blocks)
    g = float(np.expm1(-p.shape * np.log(r)))  # r**(-shape) - 1
    return PpParams(
        p.loc + p.scale / p.shape * g,
        p.scale * (1.0 + g),
        p.shape,
        to_n_blocks,
    )
