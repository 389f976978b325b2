"""Parent distributions with evaluable reciprocal-hazard calculus.

Each family exposes the distribution function, density, reciprocal hazard
``h(x) = (1 - F(x)) / f(x)`` and its derivative ``h'(x)`` in closed form,
the upper endpoint of support, the limiting shape ``xi_x = lim h'(x)``
(``None`` when the limit does not exist) and the limit
``L = lim h(x)/x`` as ``x`` approaches the endpoint (``None`` when it
does not exist).  These are the ingredients for the norming-constant and
convergence-rate computations in :mod:`evscale.asymptotics`.

Four generic tail classes are provided alongside exact named laws.  The
generic classes realize their tails with the higher-order remainder set
identically to zero, which turns an asymptotic tail statement into a
concrete sampleable distribution; this is a modeling choice, and the
parameters keep their roles in the leading-order rate expressions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, NumericalError

__all__ = [
    "ParentDistribution",
    "Exponential",
    "TruncatedNormal",
    "Weibull",
    "Gamma",
    "Pareto",
    "PowerTail",
    "BoundedTail",
    "HazardPowerTail",
    "LogPareto",
    "GenParetoParent",
    "GevParent",
]


class ParentDistribution:
    """Base class: generic fallbacks for quantiles and sampling.

    Subclasses must implement ``cdf``, ``pdf``, ``reciprocal_hazard``,
    ``reciprocal_hazard_deriv`` (closed forms) and set the attributes
    ``lower_endpoint``, ``upper_endpoint``, ``xi_x``, ``hazard_x_limit``
    and ``limit_lambda_star``.
    """

    #: start and end of the support
    lower_endpoint: float = 0.0
    upper_endpoint: float = np.inf
    #: limiting shape, lim h'(x) at the upper endpoint; None if nonexistent
    xi_x: float | None = None
    #: L = lim h(x)/x at the upper endpoint; None if nonexistent
    hazard_x_limit: float | None = None
    #: limiting optimal Box-Cox exponent (leading-order-term cancellation);
    #: None when no single limiting value exists
    limit_lambda_star: float | None = None
    #: whether the finite-level optimal-exponent sequence converges
    lambda_star_sequence_converges: bool = True

    def cdf(self, x):
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        """Survival function; override when 1 - cdf loses precision."""
        return 1.0 - self.cdf(x)

    def reciprocal_hazard(self, x):
        """h(x) = sf(x) / pdf(x)."""
        return self.sf(x) / self.pdf(x)

    def reciprocal_hazard_deriv(self, x):
        raise NotImplementedError

    def isf(self, p):
        """Inverse survival function, by safeguarded root finding.

        Families with closed forms override this.  The generic version
        brackets the root by doubling from the support start and then
        bisects `sf(x) - p`, finishing with Newton polish so the defining
        equation holds to ~1e-12 in probability.
        """
        return _isf_root(self, float(p))

    def quantile(self, q):
        if not 0.0 < q < 1.0:
            raise DomainError(f"quantile probability must lie in (0, 1), got {q}")
        return self.isf(1.0 - q)

    def sample(self, n: int, rng: np.random.Generator):
        """Inversion sampling; deterministic given the generator state."""
        u = rng.random(n)
        return self.isf(1.0 - u) if _vectorized_isf(self) else np.array(
            [self.isf(1.0 - ui) for ui in u]
        )


def _vectorized_isf(d: ParentDistribution) -> bool:
    # closed-form isf implementations accept arrays; the root-finding
    # fallback is scalar
    return type(d).isf is not ParentDistribution.isf


def _isf_root(d: ParentDistribution, p: float) -> float:
    from scipy.optimize import brentq

    if not 0.0 < p < 1.0:
        raise DomainError(f"survival probability must lie in (0, 1), got {p}")
    lo = d.lower_endpoint
    hi = d.upper_endpoint
    if np.isfinite(hi):
        b = brentq(lambda x: d.sf(x) - p, lo, hi, xtol=1e-14, rtol=8.9e-16)
    else:
        step = max(1.0, abs(lo))
        hi = lo + step
        for _ in range(200):
            if d.sf(hi) < p:
                break
            hi = lo + (hi - lo) * 2.0
        else:
            raise NumericalError(
                f"could not bracket the {p}-survival quantile of {d!r} "
                f"(last trial point {hi})"
            )
        b = brentq(lambda x: d.sf(x) - p, lo, hi, xtol=1e-14, rtol=8.9e-16)
    # Newton polish on the survival residual
    for _ in range(3):
        f = d.pdf(b)
        if f <= 0 or not np.isfinite(f):
            break
        b = b + (d.sf(b) - p) / f
    return float(b)


# ---------------------------------------------------------------------------
# Exact named laws (all in the Gumbel domain, xi_x = 0)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Exponential(ParentDistribution):
    """Exponential law, sf(x) = exp(-rate x); h is constant 1/rate."""

    rate: float = 1.0

    xi_x = 0.0
    hazard_x_limit = 0.0
    limit_lambda_star = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError(f"rate must be positive, got {self.rate}")

    def cdf(self, x):
        return -np.expm1(-self.rate * np.maximum(x, 0.0))

    def sf(self, x):
        return np.exp(-self.rate * np.maximum(x, 0.0))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * x), 0.0)

    def reciprocal_hazard(self, x):
        return np.full_like(np.asarray(x, dtype=float), 1.0 / self.rate)

    def reciprocal_hazard_deriv(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def isf(self, p):
        return -np.log(p) / self.rate


@dataclass(frozen=True)
class TruncatedNormal(ParentDistribution):
    """Standard normal truncated at zero: F(x) = 2 Phi(x) - 1 on x > 0.

    The reciprocal hazard equals the normal Mills ratio, evaluated through
    the scaled complementary error function for stability far in the tail;
    h'(x) = x h(x) - 1.
    """

    xi_x = 0.0
    hazard_x_limit = 0.0
    limit_lambda_star = 2.0

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, 2.0 * special.ndtr(x) - 1.0, 0.0)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, special.erfc(x / np.sqrt(2.0)), 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, 2.0 * np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi), 0.0)

    def reciprocal_hazard(self, x):
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.pi / 2.0) * special.erfcx(x / np.sqrt(2.0))

    def reciprocal_hazard_deriv(self, x):
        x = np.asarray(x, dtype=float)
        return x * self.reciprocal_hazard(x) - 1.0

    def isf(self, p):
        return np.sqrt(2.0) * special.erfcinv(np.asarray(p, dtype=float))


@dataclass(frozen=True)
class Weibull(ParentDistribution):
    """Weibull law, sf(x) = exp(-(x/scale)**k); h(x) = scale**k x**(1-k) / k."""

    k: float
    scale: float = 1.0

    xi_x = 0.0
    hazard_x_limit = 0.0

    def __post_init__(self):
        if not (self.k > 0 and self.scale > 0):
            raise DomainError(f"Weibull parameters must be positive, got {self}")

    @property
    def limit_lambda_star(self):
        return self.k

    def cdf(self, x):
        z = np.maximum(np.asarray(x, dtype=float), 0.0) / self.scale
        return -np.expm1(-(z**self.k))

    def sf(self, x):
        z = np.maximum(np.asarray(x, dtype=float), 0.0) / self.scale
        return np.exp(-(z**self.k))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, 0.0) / self.scale
        return np.where(
            x > 0, self.k / self.scale * z ** (self.k - 1.0) * np.exp(-(z**self.k)), 0.0
        )

    def reciprocal_hazard(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale**self.k / self.k * x ** (1.0 - self.k)

    def reciprocal_hazard_deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale**self.k * (1.0 - self.k) / self.k * x ** (-self.k)

    def isf(self, p):
        return self.scale * (-np.log(np.asarray(p, dtype=float))) ** (1.0 / self.k)


@dataclass(frozen=True)
class Gamma(ParentDistribution):
    """Gamma law with shape ``a`` and unit rate.

    h is evaluated in log space from the regularized upper incomplete
    gamma function; the score (a-1)/x - 1 gives
    h'(x) = h(x) (1 - (a-1)/x) - 1.
    """

    a: float

    xi_x = 0.0
    hazard_x_limit = 0.0
    limit_lambda_star = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"gamma shape must be positive, got {self.a}")

    def cdf(self, x):
        return special.gammainc(self.a, np.maximum(np.asarray(x, dtype=float), 0.0))

    def sf(self, x):
        return special.gammaincc(self.a, np.maximum(np.asarray(x, dtype=float), 0.0))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = (self.a - 1.0) * np.log(x) - x - special.gammaln(self.a)
        return np.where(x > 0, np.exp(lg), 0.0)

    def reciprocal_hazard(self, x):
        x = np.asarray(x, dtype=float)
        logh = (
            np.log(special.gammaincc(self.a, x))
            + special.gammaln(self.a)
            + (1.0 - self.a) * np.log(x)
            + x
        )
        return np.exp(logh)

    def reciprocal_hazard_deriv(self, x):
        x = np.asarray(x, dtype=float)
        h = self.reciprocal_hazard(x)
        return h * (1.0 - (self.a - 1.0) / x) - 1.0

    def isf(self, p):
        return special.gammainccinv(self.a, np.asarray(p, dtype=float))


# ---------------------------------------------------------------------------
# Generic tail classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pareto(ParentDistribution):
    """Pure power-law tail sf(x) = (x/scale)**(-alpha) on x >= scale.

    The reciprocal hazard x/alpha is exactly linear, so the penultimate
    shape equals the limit 1/alpha at every level: the leading-order
    rate term is identically zero and no exponent improves on it.
    """

    alpha: float
    scale: float = 1.0

    limit_lambda_star = None

    def __post_init__(self):
        if not (self.alpha > 0 and self.scale > 0):
            raise DomainError(f"Pareto parameters must be positive, got {self}")
        object.__setattr__(self, "lower_endpoint", self.scale)

    @property
    def xi_x(self):
        return 1.0 / self.alpha

    @property
    def hazard_x_limit(self):
        return 1.0 / self.alpha

    def sf(self, x):
        z = np.asarray(x, dtype=float) / self.scale
        return np.where(z > 1, z ** (-self.alpha), 1.0)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def pdf(self, x):
        z = np.asarray(x, dtype=float) / self.scale
        return np.where(z > 1, self.alpha / self.scale * z ** (-self.alpha - 1.0), 0.0)

    def reciprocal_hazard(self, x):
        return np.asarray(x, dtype=float) / self.alpha

    def reciprocal_hazard_deriv(self, x):
        return np.full_like(np.asarray(x, dtype=float), 1.0 / self.alpha)

    def isf(self, p):
        return self.scale * np.asarray(p, dtype=float) ** (-1.0 / self.alpha)


@dataclass(frozen=True)
class PowerTail(ParentDistribution):
    """Heavy tail with a second-order term:
    sf(x) = C x**(-alpha) (1 + D x**(-beta)), remainder set to zero.

    Support starts where the stated tail reaches one.  The second-order
    coefficient D controls how far the penultimate shape sits from the
    limit 1/alpha; the exponent beta is the transform that cancels the
    leading rate term.
    """

    alpha: float
    beta: float
    C: float = 1.0
    D: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.C > 0):
            raise DomainError(f"PowerTail needs alpha, beta, C > 0, got {self}")
        x0 = self._support_start()
        # density must stay positive on the support
        if self.alpha + self.D * (self.alpha + self.beta) * x0 ** (-self.beta) <= 0:
            raise DomainError(
                f"PowerTail with D={self.D} has a nonmonotone distribution function"
            )
        object.__setattr__(self, "lower_endpoint", x0)

    def _support_start(self) -> float:
        from scipy.optimize import brentq

        if self.D == 0:
            return self.C ** (1.0 / self.alpha)
        g = lambda x: self.C * x ** (-self.alpha) * (1.0 + self.D * x ** (-self.beta)) - 1.0
        if self.D < 0:
            # the stated tail rises to a maximum and decays; the support
            # starts at the root on the decreasing branch
            x_peak = (-self.D * (self.alpha + self.beta) / self.alpha) ** (1.0 / self.beta)
            if g(x_peak) <= 0:
                raise DomainError(
                    f"PowerTail with D={self.D} never reaches probability one"
                )
            lo = x_peak
        else:
            lo = 1e-8
        hi = max(2.0 * lo, 2.0 * self.C ** (1.0 / self.alpha), 1.0)
        for _ in range(200):
            if g(hi) < 0:
                break
            hi *= 2.0
        else:
            raise NumericalError("could not locate the PowerTail support start")
        return brentq(g, lo, hi, xtol=1e-14, rtol=8.9e-16)

    @property
    def xi_x(self):
        return 1.0 / self.alpha

    @property
    def hazard_x_limit(self):
        return 1.0 / self.alpha

    @property
    def limit_lambda_star(self):
        # with D = 0 the tail is exactly Pareto and there is nothing to cancel
        return self.beta if self.D != 0 else None

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        v = self.C * x ** (-self.alpha) * (1.0 + self.D * x ** (-self.beta))
        return np.where(x > self.lower_endpoint, v, 1.0)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        v = self.C * (
            self.alpha * x ** (-self.alpha - 1.0)
            + self.D * (self.alpha + self.beta) * x ** (-self.alpha - self.beta - 1.0)
        )
        return np.where(x > self.lower_endpoint, v, 0.0)

    def reciprocal_hazard(self, x):
        x = np.asarray(x, dtype=float)
        num = x * (1.0 + self.D * x ** (-self.beta))
        den = self.alpha + self.D * (self.alpha + self.beta) * x ** (-self.beta)
        return num / den

    def reciprocal_hazard_deriv(self, x):
        x = np.asarray(x, dtype=float)
        a, b, D = self.alpha, self.beta, self.D
        den = a + D * (a + b) * x ** (-b)
        # score = f'/f
        score = -(a + 1.0) / x - D * (a + b) * b * x ** (-b - 1.0) / den
        return -1.0 - self.reciprocal_hazard(x) * score


@dataclass(frozen=True)
class BoundedTail(ParentDistribution):
    """Bounded upper tail with a second-order term:
    sf(x) = C (xF - x)**alpha (1 + D (xF - x)**beta) near the endpoint xF.

    Negative-Weibull domain with xi_x = -1/alpha.  The best limiting
    exponent is 1 when beta > 1; for beta < 1 the finite-level optimal
    exponent oscillates without a limit.
    """

    alpha: float
    beta: float
    xF: float
    C: float = 1.0
    D: float = 0.0

    hazard_x_limit = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.C > 0):
            raise DomainError(f"BoundedTail needs alpha, beta, C > 0, got {self}")
        if not self.xF > 0:
            raise DomainError(f"upper endpoint must be positive, got {self.xF}")
        x0 = self._support_start()
        if x0 >= self.xF:
            raise DomainError("empty support: tail never reaches one below the endpoint")
        s0 = self.xF - x0
        if self.alpha + self.D * (self.alpha + self.beta) * s0**self.beta <= 0:
            raise DomainError(
                f"BoundedTail with D={self.D} has a nonmonotone distribution function"
            )
        object.__setattr__(self, "lower_endpoint", x0)
        object.__setattr__(self, "upper_endpoint", self.xF)

    def _support_start(self) -> float:
        from scipy.optimize import brentq

        if self.D == 0:
            return self.xF - (1.0 / self.C) ** (1.0 / self.alpha)
        g = lambda s: self.C * s**self.alpha * (1.0 + self.D * s**self.beta) - 1.0
        lo, hi = 1e-12, (1.0 / self.C) ** (1.0 / self.alpha)
        cap = np.inf
        if self.D < 0:
            # distance from the endpoint at which the stated tail peaks
            cap = (self.alpha / (-self.D * (self.alpha + self.beta))) ** (1.0 / self.beta)
            if g(cap) <= 0:
                raise DomainError(
                    f"BoundedTail with D={self.D} never reaches probability one"
                )
            hi = min(hi, cap)
        for _ in range(200):
            if g(hi) > 0:
                break
            hi = min(hi * 2.0, cap)
        else:
            raise NumericalError("could not locate the BoundedTail support start")
        return self.xF - brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16)

    @property
    def xi_x(self):
        return -1.0 / self.alpha

    @property
    def limit_lambda_star(self):
        return 1.0 if self.beta > 1 else None

    @property
    def lambda_star_sequence_converges(self):
        return self.beta > 1

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        s = np.maximum(self.xF - x, 0.0)
        v = self.C * s**self.alpha * (1.0 + self.D * s**self.beta)
        return np.where(x > self.lower_endpoint, v, 1.0)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        s = np.maximum(self.xF - x, 0.0)
        v = self.C * (
            self.alpha * s ** (self.alpha - 1.0)
            + self.D * (self.alpha + self.beta) * s ** (self.alpha + self.beta - 1.0)
        )
        return np.where((x > self.lower_endpoint) & (x < self.xF), v, 0.0)

    def reciprocal_hazard(self, x):
        x = np.asarray(x, dtype=float)
        s = self.xF - x
        num = s * (1.0 + self.D * s**self.beta)
        den = self.alpha + self.D * (self.alpha + self.beta) * s**self.beta
        return num / den

    def reciprocal_hazard_deriv(self, x):
        x = np.asarray(x, dtype=float)
        a, b, D = self.alpha, self.beta, self.D
        s = self.xF - x
        den = a + D * (a + b) * s**b
        # d log f / dx; the inner derivative ds/dx = -1 flips the sign
        score = -((a - 1.0) / s + D * (a + b) * b * s ** (b - 1.0) / den)
        return -1.0 - self.reciprocal_hazard(x) * score


@dataclass(frozen=True)
class HazardPowerTail(ParentDistribution):
    """Law defined by its reciprocal hazard h(x) = C x**(-alpha) exactly,
    on x >= x0 > 0; Gumbel domain for every alpha > -1.

    Covers the exponential (alpha=0) and normal-like (alpha=1) rate
    behavior; the leading rate term cancels at exponent alpha + 1.
    """

    alpha: float
    C: float = 1.0
    x0: float = 1.0

    xi_x = 0.0
    hazard_x_limit = 0.0

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"hazard exponent must exceed -1, got {self.alpha}")
        if not (self.C > 0 and self.x0 > 0):
            raise DomainError(f"C and x0 must be positive, got {self}")
        object.__setattr__(self, "lower_endpoint", self.x0)

    @property
    def limit_lambda_star(self):
        return self.alpha + 1.0

    def _cum_hazard(self, x):
        ap1 = self.alpha + 1.0
        return (x**ap1 - self.x0**ap1) / (self.C * ap1)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > self.x0, np.exp(-self._cum_hazard(np.maximum(x, self.x0))), 1.0)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > self.x0, x**self.alpha / self.C * self.sf(x), 0.0)

    def reciprocal_hazard(self, x):
        return self.C * np.asarray(x, dtype=float) ** (-self.alpha)

    def reciprocal_hazard_deriv(self, x):
        return -self.alpha * self.C * np.asarray(x, dtype=float) ** (-self.alpha - 1.0)

    def isf(self, p):
        ap1 = self.alpha + 1.0
        return (self.x0**ap1 - self.C * ap1 * np.log(np.asarray(p, dtype=float))) ** (
            1.0 / ap1
        )


@dataclass(frozen=True)
class LogPareto(ParentDistribution):
    """Log-Pareto tail sf(x) = [1 + (g/beta)(log x - u)]_+**(-1/g) on x >= e**u.

    For g > 0 the law is super-heavy: lim h'(x) does not exist and no
    extreme value limit holds on the raw scale; only the logarithmic
    scale (exponent zero) restores a domain of attraction, with shape g.
    For g = 0 the law is exactly Pareto with index 1/beta on every
    power scale.  For g < 0 the support is bounded and the shape g is
    invariant to the exponent.
    """

    beta: float
    g: float
    u: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "lower_endpoint", float(np.exp(self.u)))
        if self.g < 0:
            object.__setattr__(
                self, "upper_endpoint", float(np.exp(self.u - self.beta / self.g))
            )

    @property
    def xi_x(self):
        if self.g > 0:
            return None
        if self.g == 0:
            return self.beta
        return self.g

    @property
    def hazard_x_limit(self):
        if self.g > 0:
            return None
        if self.g == 0:
            return self.beta
        return 0.0

    @property
    def limit_lambda_star(self):
        return None if self.g == 0 else 0.0

    @property
    def log_scale_shape(self):
        """Shape of the attracting law after a log transform."""
        return self.g

    def _w(self, x):
        logx = np.log(np.maximum(np.asarray(x, dtype=float), self.lower_endpoint))
        return 1.0 + self.g / self.beta * (logx - self.u)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        if self.g == 0:
            v = np.exp(-(np.log(np.maximum(x, self.lower_endpoint)) - self.u) / self.beta)
        else:
            w = np.maximum(self._w(x), 0.0)
            with np.errstate(divide="ignore"):
                v = np.where(w > 0, w ** (-1.0 / self.g), 0.0)
        return np.where(x > self.lower_endpoint, v, 1.0)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lower_endpoint) & (x < self.upper_endpoint)
        if self.g == 0:
            v = self.sf(x) / (self.beta * x)
        else:
            w = self._w(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                v = np.where(w > 0, w ** (-1.0 / self.g - 1.0) / (self.beta * x), 0.0)
        return np.where(inside, v, 0.0)

    def reciprocal_hazard(self, x):
        x = np.asarray(x, dtype=float)
        return self.beta * x * self._w(x)

    def reciprocal_hazard_deriv(self, x):
        return self.beta * self._w(x) + self.g

    def isf(self, p):
        p = np.asarray(p, dtype=float)
        if self.g == 0:
            return np.exp(self.u - self.beta * np.log(p))
        # w = p**(-g), log x = u + beta (w - 1) / g
        return np.exp(self.u + self.beta * np.expm1(-self.g * np.log(p)) / self.g)


# ---------------------------------------------------------------------------
# Exact limit-law parents (diagnostics)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenParetoParent(ParentDistribution):
    """Generalized Pareto parent: the reciprocal hazard scale + shape*(x-loc)
    is exactly linear, so h' is constant and the penultimate shape never
    moves -- the reference case where no exponent can improve the rate.
    """

    scale: float = 1.0
    shape: float = 0.0
    loc: float = 0.0

    limit_lambda_star = None

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"scale must be positive, got {self.scale}")
        object.__setattr__(self, "lower_endpoint", self.loc)
        if self.shape < 0:
            object.__setattr__(self, "upper_endpoint", self.loc - self.scale / self.shape)

    @property
    def xi_x(self):
        return self.shape

    @property
    def hazard_x_limit(self):
        return max(self.shape, 0.0)

    def _t(self, x):
        return 1.0 + self.shape * (np.asarray(x, dtype=float) - self.loc) / self.scale

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape == 0:
            v = np.exp(-(x - self.loc) / self.scale)
        else:
            t = np.maximum(self._t(x), 0.0)
            with np.errstate(divide="ignore"):
                v = np.where(t > 0, t ** (-1.0 / self.shape), 0.0)
        return np.where(x > self.loc, v, 1.0)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape == 0:
            v = np.exp(-(x - self.loc) / self.scale) / self.scale
        else:
            t = self._t(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                v = np.where(t > 0, t ** (-1.0 / self.shape - 1.0) / self.scale, 0.0)
        return np.where((x >= self.loc) & (x < self.upper_endpoint), v, 0.0)

    def reciprocal_hazard(self, x):
        return self.scale + self.shape * (np.asarray(x, dtype=float) - self.loc)

    def reciprocal_hazard_deriv(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.shape)

    def isf(self, p):
        p = np.asarray(p, dtype=float)
        if self.shape == 0:
            return self.loc - self.scale * np.log(p)
        return self.loc + self.scale * np.expm1(-self.shape * np.log(p)) / self.shape


@dataclass(frozen=True)
class GevParent(ParentDistribution):
    """GEV parent law, as a diagnostic for max-stability.

    ``max_stable_norming(n)`` returns the exact norming for which the
    renormalized distribution of the n-maximum reproduces the parent;
    note these differ at order 1/n from the tail-quantile norming that
    :func:`evscale.asymptotics.norming_constants` computes.
    """

    loc: float = 0.0
    scale: float = 1.0
    shape: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"scale must be positive, got {self.scale}")
        if self.shape > 0:
            object.__setattr__(self, "lower_endpoint", self.loc - self.scale / self.shape)
        else:
            object.__setattr__(self, "lower_endpoint", -np.inf)
        if self.shape < 0:
            object.__setattr__(self, "upper_endpoint", self.loc - self.scale / self.shape)

    @property
    def xi_x(self):
        return self.shape

    @property
    def hazard_x_limit(self):
        return max(self.shape, 0.0)

    def cdf(self, x):
        from .core import GevParams, gev_cdf

        return gev_cdf(np.asarray(x, dtype=float), GevParams(self.loc, self.scale, self.shape))

    def pdf(self, x):
        from .core import GevParams, gev_logpdf

        lp = gev_logpdf(np.asarray(x, dtype=float), GevParams(self.loc, self.scale, self.shape))
        return np.exp(lp)

    def _v(self, x):
        # v = t**(-1/shape) with t = 1 + shape (x - loc)/scale; v = exp(-z) at 0
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        if self.shape == 0:
            return np.exp(-z)
        t = np.maximum(1.0 + self.shape * z, 0.0)
        with np.errstate(divide="ignore"):
            return np.where(t > 0, t ** (-1.0 / self.shape), np.inf)

    def reciprocal_hazard(self, x):
        v = self._v(x)
        return self.scale * (np.exp(v) - 1.0) * v ** (-1.0 - self.shape)

    def reciprocal_hazard_deriv(self, x):
        v = self._v(x)
        return -1.0 + (np.exp(v) - 1.0) * (1.0 + self.shape - v) / v

    def isf(self, p):
        from .core import GevParams, gev_quantile

        return gev_quantile(1.0 - np.asarray(p, dtype=float), GevParams(self.loc, self.scale, self.shape))

    def max_stable_norming(self, n: int):
        """Exact norming (b, a) with F**n(a x + b) = F(x): a = scale n**shape,
        b = loc + scale (n**shape - 1)/shape (log form at shape 0)."""
        if self.shape == 0:
            return self.loc + self.scale * np.log(n), self.scale
        g = np.expm1(self.shape * np.log(n))
        return self.loc + self.scale * g / self.shape, self.scale * (1.0 + g)
