"""Norming constants, penultimate shapes and convergence-rate diagnostics.

For a parent law with reciprocal hazard ``h``, the tail-quantile norming
at level ``n`` is ``b_n`` solving ``F(b_n) = 1 - 1/n``, ``a_n = h(b_n)``
and penultimate shape ``xi_n = h'(b_n)``.  Under a Box-Cox transform with
exponent ``lam`` these map to

    b_y = boxcox(b_n, lam),  a_y = a_n * b_n**(lam - 1),
    xi_y,n = xi_n + (a_n / b_n) * (lam - 1),

and the limiting transformed shape is ``xi_y = xi_x + L (lam - 1)`` with
``L = lim h(x)/x``.  The exponent sequence that cancels the leading
rate term is

    lam*_n = 1 - (h'(b_n) - xi_x) / (h(b_n)/b_n - L).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GevParams, boxcox, gev_cdf, gev_quantile, inverse_boxcox, SHAPE_EPS
from .errors import DomainError, NumericalError, UsageError
from .families import ParentDistribution, TruncatedNormal

__all__ = [
    "NormingTriple",
    "NO_DOMAIN",
    "NO_IMPROVEMENT",
    "LambdaStar",
    "norming_constants",
    "transform_norming",
    "penultimate_shape_y",
    "limiting_shape_y",
    "lambda_star_n",
    "table1_lambda_star",
    "truncated_normal_lambda_star_expansion",
    "transformed_cdf",
    "convergence_gap",
    "TRUNCNORM_EXPANSION_TERMS",
]


class _Sentinel:
    def __init__(self, name):
        self._name = name

    def __repr__(self):
        return self._name


#: No extreme value domain of attraction exists for the requested scale.
NO_DOMAIN = _Sentinel("NoDomain")
#: The leading rate term already vanishes (or the formula degenerates);
#: no Box-Cox exponent improves the convergence rate.
NO_IMPROVEMENT = _Sentinel("NoImprovement")


@dataclass(frozen=True)
class NormingTriple:
    """Location/scale norming and penultimate shape at level n."""

    b: float
    a: float
    xi_pen: float
    n: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"norming scale must be positive, got {self.a}")


def norming_constants(d: ParentDistribution, n) -> NormingTriple:
    """Tail-quantile norming of ``d`` at level ``n``.

    ``b`` solves ``F(b) = 1 - 1/n`` (closed forms where the family has
    them, safeguarded root finding otherwise), ``a = h(b)`` and
    ``xi_pen = h'(b)``.
    """
    if not n >= 2:
        raise DomainError(f"norming level must satisfy n >= 2, got {n}")
    b = float(d.isf(1.0 / n))
    a = float(d.reciprocal_hazard(b))
    xi = float(d.reciprocal_hazard_deriv(b))
    if not np.isfinite(b) or not np.isfinite(a):
        raise NumericalError(f"norming constants are not finite at n={n} for {d!r}")
    return NormingTriple(b=b, a=a, xi_pen=xi, n=float(n))


def transform_norming(t: NormingTriple, lam: float) -> NormingTriple:
    """Map an X-scale norming triple through the Box-Cox transform."""
    if not t.b > 0:
        raise DomainError(
            f"transforming the norming requires a positive location, got b={t.b}"
        )
    b_y = boxcox(t.b, lam)
    a_y = t.a * t.b ** (lam - 1.0)
    xi_y = t.xi_pen + (t.a / t.b) * (lam - 1.0)
    return NormingTriple(b=b_y, a=a_y, xi_pen=xi_y, n=t.n)


def penultimate_shape_y(d: ParentDistribution, n, lam: float) -> float:
    """Penultimate shape of the transformed variable at level n."""
    t = norming_constants(d, n)
    return t.xi_pen + (t.a / t.b) * (lam - 1.0)


def limiting_shape_y(d: ParentDistribution, lam: float):
    """Limiting shape on the transformed scale, or :data:`NO_DOMAIN`.

    ``xi_x + L (lam - 1)`` when the ingredients exist; for parents with
    ``xi_x <= 0`` the value is ``xi_x`` for every exponent.  Parents
    outside every domain of attraction (``xi_x`` nonexistent) admit a
    limit only on the logarithmic scale.
    """
    if d.xi_x is None:
        if abs(lam) < SHAPE_EPS and getattr(d, "log_scale_shape", None) is not None:
            return float(d.log_scale_shape)
        return NO_DOMAIN
    if d.xi_x <= 0:
        return float(d.xi_x)
    if d.hazard_x_limit is None:
        return NO_DOMAIN
    return float(d.xi_x + d.hazard_x_limit * (lam - 1.0))


@dataclass(frozen=True)
class LambdaStar:
    """Finite-level optimal exponent; ``sequence_has_limit`` is False for
    families whose optimal-exponent sequence does not converge."""

    value: float
    sequence_has_limit: bool = True


def lambda_star_n(d: ParentDistribution, n=None, level: float | None = None):
    """Best-rate Box-Cox exponent at level ``n`` or at an explicit
    threshold ``level``.

    Returns a :class:`LambdaStar`, or :data:`NO_IMPROVEMENT` when the
    formula degenerates: vanishing denominator (no scale information in
    the hazard ratio) or vanishing numerator (the penultimate shape
    already equals its limit, as for an exact generalized Pareto parent).
    """
    if (n is None) == (level is None):
        raise UsageError("pass exactly one of n= or level=")
    if d.xi_x is None or d.hazard_x_limit is None:
        raise UsageError(
            f"{type(d).__name__} has no limiting shape; no best exponent is defined"
        )
    b = norming_constants(d, n).b if n is not None else float(level)
    h = float(d.reciprocal_hazard(b))
    hp = float(d.reciprocal_hazard_deriv(b))
    num = hp - d.xi_x
    den = h / b - d.hazard_x_limit
    scale = max(abs(h / b), abs(d.hazard_x_limit), 1e-300)
    if abs(den) < 1e-12 * scale:
        return NO_IMPROVEMENT
    if num == 0.0:
        return NO_IMPROVEMENT
    return LambdaStar(
        value=1.0 - num / den,
        sequence_has_limit=bool(d.lambda_star_sequence_converges),
    )


def table1_lambda_star(d: ParentDistribution):
    """Limiting best exponent of a family (``None`` when no single
    limiting value exists, e.g. an exact power tail, a bounded tail with
    slowly decaying second order, or the scale-free log-Pareto case)."""
    return d.limit_lambda_star


# ---------------------------------------------------------------------------
# Truncated-normal expansion of the optimal exponent
# ---------------------------------------------------------------------------

#: Number of retained terms in the truncated-normal lam*-series.
TRUNCNORM_EXPANSION_TERMS = 4


def _truncnorm_b_two_term(log_n: float) -> float:
    """Two-term expansion of the half-normal location norming,
    b ~ u - (log pi + log log n)/(2u) with u = sqrt(2 log n)."""
    u = math.sqrt(2.0 * log_n)
    q = math.log(math.pi) + math.log(log_n)
    return u - q / (2.0 * u)


def truncated_normal_lambda_star_expansion(
    n=None, level: float | None = None, terms: int = TRUNCNORM_EXPANSION_TERMS
) -> float:
    """Sub-asymptotic optimal exponent for the truncated normal from a
    truncated series rather than the exact Mills ratio.

    The exact ratio ``b h'(b) / h(b)`` for the half-normal expands, via
    the Mills-ratio series in powers of ``1/b**2``, as
    ``-(1 - 2 v + 10 v**2 - 74 v**3 + ...)`` with ``v = 1/b**2``, so

        lam* = 2 - 2 v + 10 v**2 - 74 v**3 + ...

    Re-expanding ``v`` at the norming level in powers of
    ``w = 1/(2 log n)`` (with ``q = log pi + log log n`` from the
    location-norming expansion) gives the retained series

        lam*_n = 2 - 2 w + (10 - 2 q) w**2 + (-2 q**2 + 22 q - 78) w**3.

    ``terms`` counts the retained terms (default 4, all of the above).
    A ``level`` is mapped to its effective ``log n`` by inverting the
    two-term location-norming expansion.  The series is asymptotic: at
    thresholds this low it is a coarse device, and the exact-function
    :func:`lambda_star_n` disagrees with it by design.
    """
    from scipy.optimize import brentq

    if (n is None) == (level is None):
        raise UsageError("pass exactly one of n= or level=")
    if not 1 <= terms <= 4:
        raise UsageError(f"between 1 and 4 series terms are supported, got {terms}")
    if n is not None:
        if not n > 1:
            raise DomainError(f"need n > 1, got {n}")
        log_n = math.log(n)
    else:
        if not level > 0:
            raise DomainError(f"need a positive level, got {level}")
        try:
            log_n = brentq(
                lambda s: _truncnorm_b_two_term(s) - level, 1.05, 1e4, xtol=1e-13
            )
        except ValueError as exc:
            raise NumericalError(
                f"could not invert the norming expansion at level {level}"
            ) from exc
    w = 1.0 / (2.0 * log_n)
    q = math.log(math.pi) + math.log(log_n)
    series = [
        2.0,
        -2.0 * w,
        (10.0 - 2.0 * q) * w**2,
        (-2.0 * q**2 + 22.0 * q - 78.0) * w**3,
    ]
    return float(sum(series[:terms]))


# ---------------------------------------------------------------------------
# Convergence gap
# ---------------------------------------------------------------------------

def transformed_cdf(d: ParentDistribution, y, lam: float):
    """Distribution function of the Box-Cox transform of ``d``:
    ``F_Y(y) = F_X(inverse_boxcox(y, lam))``, extended by 0/1 outside the
    transformed range."""
    y_in = np.asarray(y, dtype=float)
    ya = np.atleast_1d(y_in)
    out = np.empty(ya.shape, dtype=float)
    if abs(lam) < SHAPE_EPS:
        inside = np.ones(ya.shape, dtype=bool)
    else:
        t = lam * ya + 1.0
        inside = t > 0
        out[~inside] = 0.0 if lam > 0 else 1.0
    if np.any(inside):
        out[inside] = d.cdf(inverse_boxcox(ya[inside], lam))
    return float(out[0]) if y_in.ndim == 0 else out


def convergence_gap(
    d: ParentDistribution,
    n,
    lam: float,
    x_grid=None,
    norming: NormingTriple | None = None,
) -> float:
    """Sup-norm distance between the renormalized n-maximum law of the
    transformed parent and its penultimate GEV approximation.

    ``sup_x | F_Y(a_y x + b_y)**n - GEV(0, 1, xi_y,n)(x) |`` over the
    grid; the power is computed through ``n * log F`` to avoid overflow.
    By default the norming is the tail-quantile one at level ``n``; pass
    ``norming`` (an X-scale triple) to diagnose alternatives such as the
    exact max-stable sequences of a GEV parent.
    """
    t_x = norming_constants(d, n) if norming is None else norming
    t_y = transform_norming(t_x, lam)
    ref = GevParams(0.0, 1.0, t_y.xi_pen)
    if x_grid is None:
        probs = np.linspace(1e-3, 1.0 - 1e-3, 1001)
        x_grid = gev_quantile(probs, ref)
    else:
        x_grid = np.asarray(x_grid, dtype=float)
    y = t_y.a * x_grid + t_y.b
    fy = transformed_cdf(d, y, lam)
    with np.errstate(divide="ignore"):
        fn = np.exp(float(n) * np.log(fy, out=np.full_like(fy, -np.inf), where=fy > 0))
    return float(np.max(np.abs(fn - gev_cdf(x_grid, ref))))
