"""Exact solutions of the linear wave equation in n spatial dimensions.

Separating in spherical harmonics, the radial mode functions for l <= 2
are finite combinations of an arbitrary profile F and its derivatives
with retarded/advanced argument r -/+ t,

    n = 3:  Phi_l = sum_k c_k r^(-k-1) F^(l-k)(r -+ t)
    n = 5:  Phi_l = sum_k c_k r^(-k-2) F^(l-k)(r -+ t)

with the coefficient tables printed below.  The profile used throughout
is the odd Gaussian derivative F(x) = A x exp(-x^2 / (2 sigma^2)); with
an odd F the combination (ingoing + outgoing) is regular at the origin.

Transformation to the hyperboloidal chart: with a = n/C and the slice
time tt, a point at compactified radius rt has

    r - t = -a (1 - rt) / (1 + rt) - tt      (retarded argument)
    r + t =  a (1 + rt) / (1 - rt) + tt      (advanced argument)

and the argument derivatives d(r -+ t)/drt = 2a / (1 +- rt)^2 follow in
closed form, so no cancellation of large terms ever occurs.  The
conformal amplification omega^((1-n)/2) is cancelled algebraically
against the explicit inverse powers of r,

    rescaled field = rt^((1-n)/2) sum_k c_k r^(-k) F^(l-k),

which stays finite on the whole grid including rt = 1, where 1/r = 0
exactly and the purely ingoing part vanishes under the Gaussian decay.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import sph_harm_y

from .chart import FoliationParams, chart_coeffs
from .discretization import FULL3D, Grid

__all__ = [
    "ModeFunctionParams",
    "LinearModeSpec",
    "mode_function",
    "radial_mode_solution",
    "spherical_harmonic",
    "sphere_area",
    "exact_linear_fields",
]

# c_k of the printed radial solutions; the inverse-power offset is
# (n-1)/2: r^(-k-1) for n = 3, r^(-k-2) for n = 5.
_RADIAL_COEFFS = {
    3: {0: (1.0,), 1: (1.0, -1.0), 2: (1.0, -3.0, 3.0)},
    5: {0: (1.0, -1.0), 1: (1.0, -3.0, 3.0), 2: (1.0, -6.0, 15.0, -15.0)},
}


@dataclass(frozen=True)
class ModeFunctionParams:
    amplitude: float = 1.0
    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("mode function width must be positive")


@dataclass(frozen=True)
class LinearModeSpec:
    """One spherical-harmonic mode of an exact linear solution.

    direction is 'out', 'in' or 'regular' (ingoing + outgoing, regular
    at the origin for the odd profile).  m is used only in full 3d.
    """

    l: int
    m: int | None = None
    direction: str = "regular"
    amplitude: float = 1.0
    width: float = 1.0


def mode_function(x, params: ModeFunctionParams = ModeFunctionParams(),
                  order: int = 0):
    """The profile F(x) = A x exp(-x^2/(2 sigma^2)) or its derivatives.

    Closed forms up to the fourth derivative: the l = 2 solutions involve
    F''' and their time derivatives one order more.
    """
    x = np.asarray(x, dtype=float)
    s2 = params.width**2
    g = np.exp(-(x * x) / (2.0 * s2))
    if order == 0:
        poly = x
    elif order == 1:
        poly = 1.0 - x * x / s2
    elif order == 2:
        poly = x**3 / s2**2 - 3.0 * x / s2
    elif order == 3:
        poly = -3.0 / s2 + 6.0 * x * x / s2**2 - x**4 / s2**3
    elif order == 4:
        poly = 15.0 * x / s2**2 - 10.0 * x**3 / s2**3 + x**5 / s2**4
    else:
        raise ValueError("derivatives are implemented up to fourth order")
    out = params.amplitude * poly * g
    return float(out) if np.ndim(x) == 0 else out


def radial_mode_solution(n: int, l: int, t, r, direction: str = "out",
                         params: ModeFunctionParams = ModeFunctionParams()):
    """Radial mode solution and its (t, r) derivatives for n in {3, 5}.

    Returns (phi, dphi_dt, dphi_dr) evaluated at r > 0.
    """
    try:
        coeffs = _RADIAL_COEFFS[n][l]
    except KeyError:
        raise ValueError(f"no closed-form radial solution for n={n}, l={l}") from None
    if direction == "regular":
        po, pto, pro = radial_mode_solution(n, l, t, r, "out", params)
        pi_, pti, pri = radial_mode_solution(n, l, t, r, "in", params)
        return po + pi_, pto + pti, pro + pri
    if direction not in ("out", "in"):
        raise ValueError(f"unknown direction {direction!r}")
    sgn = -1.0 if direction == "out" else 1.0
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    x = r + sgn * t
    kappa = (n - 1) // 2
    phi = np.zeros(np.broadcast(t, r).shape)
    phi_t = np.zeros_like(phi)
    phi_r = np.zeros_like(phi)
    top = l + kappa - 1  # profile derivative order of the k = 0 term
    for k, c in enumerate(coeffs):
        fk = mode_function(x, params, order=top - k)
        fk1 = mode_function(x, params, order=top - k + 1)
        rp = r ** (-k - kappa)
        phi += c * rp * fk
        phi_t += c * rp * sgn * fk1
        phi_r += c * (-(k + kappa) * rp / r * fk + rp * fk1)
    return phi, phi_t, phi_r


def sphere_area(k: int) -> float:
    """Area of the unit k-sphere, 2 pi^((k+1)/2) / Gamma((k+1)/2)."""
    from scipy.special import gamma

    return 2.0 * np.pi ** ((k + 1) / 2.0) / gamma((k + 1) / 2.0)


@lru_cache(maxsize=None)
def _reduced_harmonic_poly(n: int, l: int) -> tuple:
    """Coefficients (in powers of cos theta) of the orthonormal harmonic
    Y_l on S^(n-1) under SO(n-1) symmetry, built by Gram-Schmidt on
    monomials with positive leading coefficient."""
    from scipy.special import gamma

    area = sphere_area(n - 2)
    # moments M_j = area * int cos^j sin^(n-2) over [0, pi]; odd j vanish
    # and even j reduce to a Beta function
    k = n - 2
    moments = [
        0.0 if j % 2 else
        area * gamma((j + 1) / 2.0) * gamma((k + 1) / 2.0) / gamma((j + k + 2) / 2.0)
        for j in range(2 * l + 1)
    ]

    def inner(p, q):
        return sum(pj * qk * moments[j + k]
                   for j, pj in enumerate(p) for k, qk in enumerate(q))

    basis = []
    for deg in range(l + 1):
        v = [0.0] * (deg + 1)
        v[deg] = 1.0
        for b in basis:
            c = inner(v, b)
            v = [vj - c * (b[j] if j < len(b) else 0.0) for j, vj in enumerate(v)]
        norm = np.sqrt(inner(v, v))
        basis.append(tuple(vj / norm for vj in v))
    return basis[l]


def spherical_harmonic(n: int, l: int, theta, m: int | None = None, phi=None):
    """Real spherical harmonics, unit-normalized in the sphere measure.

    Full 3d (n = 3 with m and phi given) uses the real basis built from
    the complex harmonics; under reduced symmetry Y_l depends on theta
    only and is orthonormal under the sin^(n-2) measure times the area
    of S^(n-2).
    """
    if m is not None and phi is not None:
        if n != 3:
            raise ValueError("harmonics with azimuthal index require n = 3")
        if abs(m) > l:
            raise ValueError("|m| must not exceed l")
        ylm = sph_harm_y(l, abs(m), theta, phi)
        if m > 0:
            return np.sqrt(2.0) * (-1.0) ** m * ylm.real
        if m < 0:
            return np.sqrt(2.0) * (-1.0) ** m * ylm.imag
        return ylm.real
    coeffs = _reduced_harmonic_poly(n, l)
    x = np.cos(np.asarray(theta, dtype=float))
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _mode_radial_profiles(mode_time: float, rt: np.ndarray,
                          foliation: FoliationParams, l: int, direction: str,
                          params: ModeFunctionParams):
    """Rescaled field, its time rate and its radial derivative along rt.

    Uses the cancellation path described in the module docstring; the
    purely ingoing part is set to zero at rt = 1 where its argument is
    infinite and the Gaussian profile has decayed identically.
    """
    n = foliation.n
    a = foliation.scale
    try:
        coeffs = _RADIAL_COEFFS[n][l]
    except KeyError:
        raise ValueError(f"no closed-form radial solution for n={n}, l={l}") from None
    directions = {"out": (-1.0,), "in": (1.0,), "regular": (-1.0, 1.0)}[direction]

    rinv = (1.0 - rt * rt) / (2.0 * a * rt)  # 1/r, exactly 0 at rt = 1
    amp = rt ** ((1 - n) / 2.0)
    # d(r^-k)/drt = -k rinv^(k-1) (1 + rt^2) / (2 a rt^2)
    dpow = (1.0 + rt * rt) / (2.0 * a * rt * rt)
    phi = np.zeros_like(rt)
    phi_t = np.zeros_like(rt)
    phi_rt = np.zeros_like(rt)
    for sgn in directions:
        if sgn < 0:
            x = -a * (1.0 - rt) / (1.0 + rt) - mode_time
            dxdrt = 2.0 * a / (1.0 + rt) ** 2
            live = slice(None)
        else:
            live = rt < 1.0
            r_live = rt[live]
            x = a * (1.0 + r_live) / (1.0 - r_live) + mode_time
            dxdrt = 2.0 * a / (1.0 - r_live) ** 2
        s = np.zeros_like(x)
        s_t = np.zeros_like(x)
        s_rt = np.zeros_like(x)
        ri = rinv[live]
        top = l + (n - 1) // 2 - 1
        for k, c in enumerate(coeffs):
            fk = mode_function(x, params, order=top - k)
            fk1 = mode_function(x, params, order=top - k + 1)
            rk = ri**k
            s += c * rk * fk
            s_t += c * rk * sgn * fk1
            s_rt += c * (-k * ri ** max(k - 1, 0) * dpow[live] * fk + rk * fk1 * dxdrt)
        phi[live] += amp[live] * s
        phi_t[live] += amp[live] * s_t
        phi_rt[live] += ((1 - n) / 2.0) * amp[live] / rt[live] * s + amp[live] * s_rt
    return phi, phi_t, phi_rt


def exact_linear_fields(mode_time: float, grid: Grid,
                        foliation: FoliationParams, modes) -> tuple:
    """Collocation values (phi, pi) of a superposition of exact linear
    modes at the given mode time.

    The run clock is independent: runs start at code time zero from
    fields evaluated here at some initial mode time.
    """
    coeffs = chart_coeffs(grid.r, foliation)
    phi = np.zeros(grid.field_shape)
    pi = np.zeros(grid.field_shape)
    for spec in modes:
        params = ModeFunctionParams(spec.amplitude, spec.width)
        prof, prof_t, prof_rt = _mode_radial_profiles(
            mode_time, grid.r, foliation, spec.l, spec.direction, params)
        if grid.symmetry == FULL3D:
            if spec.m is None:
                raise ValueError("full 3d modes need an azimuthal index m")
            y = spherical_harmonic(3, spec.l, grid.theta[:, None],
                                   m=spec.m, phi=grid.phi[None, :])
            shape = (-1, 1, 1)
        else:
            y = spherical_harmonic(grid.n, spec.l, grid.theta)
            shape = (-1, 1)
        mode_pi = (prof_t - coeffs.shift * prof_rt) / coeffs.lapse
        phi += prof.reshape(shape) * y
        pi += mode_pi.reshape(shape) * y
    return phi, pi
