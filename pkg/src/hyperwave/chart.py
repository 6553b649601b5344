"""Geometry of the constant-mean-curvature hyperboloidal foliation.

The time function t - sqrt(a^2 + r^2) foliates Minkowski spacetime into
hyperboloids of constant mean curvature C, with slice scale a = n/C.  A
compactified radius rt maps the exterior to [0, 1]; the outgoing light
cones are reached at rt = 1, where the conformal factor vanishes.  All
coefficients below are elementary functions of rt:

    omega  = C (1 - rt^2) / (2n)          conformal factor
    shift  = -C rt / n                    (radial component, <= 0)
    lapse  = C (1 + rt^2) / (2n)          so that lapse^2 - shift^2 = omega^2
    areal radius  r = 2 a rt / (1 - rt^2)

together with the mean curvature of the conformal slices, its rate of
change along the unit normal, and the conformal Ricci scalar.  Everything
here is pure; the solver evaluates these once per radial node and caches
the resulting tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigError

__all__ = [
    "FoliationParams",
    "ChartCoeffs",
    "CriticalExponents",
    "areal_radius",
    "physical_time",
    "chart_coeffs",
    "critical_exponents",
    "nonlinearity_exponent",
    "nonlinearity_weight",
]


@dataclass(frozen=True)
class FoliationParams:
    """Spatial dimension and mean curvature of the foliation.

    The default mean curvature C = n makes the slice scale a = n/C equal
    to one (unit hyperboloids).  Decay exponents do not depend on C.
    """

    n: int
    mean_curvature: float = 0.0  # 0 means "use the default C = n"

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"spatial dimension must be >= 2, got {self.n}")
        if self.mean_curvature == 0.0:
            object.__setattr__(self, "mean_curvature", float(self.n))
        if self.mean_curvature <= 0:
            raise ConfigError("mean curvature must be positive")

    @property
    def scale(self) -> float:
        """Slice scale a = n / C."""
        return self.n / self.mean_curvature


@dataclass(frozen=True)
class ChartCoeffs:
    """Chart coefficients evaluated at one or more radii (all same shape)."""

    omega: np.ndarray
    lapse: np.ndarray
    shift: np.ndarray
    mean_curv: np.ndarray
    mean_curv_rate: np.ndarray
    ricci: np.ndarray


@dataclass(frozen=True)
class CriticalExponents:
    """Smallest usable nonlinearity power and the energy-critical power."""

    p_conf: Fraction
    p_crit: object  # Fraction, or math.inf for n = 2


def _check_domain(rt, upper_open: bool):
    rt = np.asarray(rt)
    hi_bad = rt >= 1.0 if upper_open else rt > 1.0
    if np.any(rt < 0.0) or np.any(hi_bad):
        hi = "1)" if upper_open else "1]"
        raise ValueError(f"compactified radius outside [0, {hi}")
    return rt


def areal_radius(rt, params: FoliationParams):
    """Physical radius r = 2 a rt / (1 - rt^2); rt = 1 maps to infinity."""
    rt = _check_domain(rt, upper_open=True)
    r = 2.0 * params.scale * rt / (1.0 - rt * rt)
    return float(r) if np.ndim(rt) == 0 else r


def physical_time(tt, r, params: FoliationParams):
    """Minkowski time t = tt + sqrt(a^2 + r^2) of a slice point."""
    if np.any(np.asarray(r) < 0):
        raise ValueError("physical radius must be nonnegative")
    t = tt + np.hypot(params.scale, r)
    return float(t) if np.ndim(t) == 0 else t


def chart_coeffs(rt, params: FoliationParams) -> ChartCoeffs:
    """Evaluate all chart coefficients at compactified radii rt in [0, 1]."""
    rt = _check_domain(rt, upper_open=False)
    n = params.n
    C = params.mean_curvature
    rt2 = rt * rt
    one_plus = rt2 + 1.0
    return ChartCoeffs(
        omega=C * (1.0 - rt2) / (2.0 * n),
        lapse=C * one_plus / (2.0 * n),
        shift=-C * rt / n,
        mean_curv=-2.0 * n / one_plus,
        mean_curv_rate=8.0 * n * rt2 / one_plus**3,
        ricci=4.0 * n * (-rt2 * rt2 + (n - 5.0) * rt2 + n) / one_plus**3,
    )


def critical_exponents(n: int) -> CriticalExponents:
    """Conformal and energy-critical powers for dimension n >= 2."""
    if n < 2:
        raise ConfigError(f"spatial dimension must be >= 2, got {n}")
    p_conf = Fraction(n + 3, n - 1)
    p_crit = Fraction(n + 2, n - 2) if n >= 3 else math.inf
    return CriticalExponents(p_conf=p_conf, p_crit=p_crit)


def nonlinearity_exponent(n: int, p) -> Fraction:
    """Exact rational exponent [p(n-1) - n - 3] / 2 of the conformal weight."""
    return (Fraction(p) * (n - 1) - n - 3) / 2


def nonlinearity_weight(rt, params: FoliationParams, p):
    """Conformal weight omega^([p(n-1)-n-3]/2) multiplying the nonlinearity.

    The exponent is formed in exact rational arithmetic; when it is exactly
    zero the weight is one everywhere, including rt = 1 where omega = 0.
    """
    n = params.n
    expo = nonlinearity_exponent(n, p)
    if expo < 0:
        raise ConfigError(
            f"conformal method inapplicable: p = {p} < (n+3)/(n-1) = "
            f"{critical_exponents(n).p_conf} for n = {n}"
        )
    rt = _check_domain(rt, upper_open=False)
    if expo == 0:
        w = np.ones_like(np.asarray(rt, dtype=float))
    else:
        w = chart_coeffs(rt, params).omega ** float(expo)
    return float(w) if np.ndim(rt) == 0 else w
