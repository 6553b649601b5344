"""Quadrature on slices and spheres; energy, flux and error norms.

Radial integrals use Simpson's rule with the first two weights modified
for the origin-staggered grid (27/8, 17/8), assuming the integrand is
an even function of the radius there.  Sphere integrals are exact for
the truncated spectral expansion: only the m = 0, even-l cosine
coefficients contribute on the full two-sphere, and under reduced
symmetry the cosine moments of the sin^(n-2) measure are precomputed
once by adaptive quadrature.

The energy on a slice and the flux through the outer boundary satisfy
E(t2) - E(t1) = F(t1, t2) with F nonpositive: outgoing waves leave the
domain through rt = 1 and the energy they carry is lost to the slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import angular
from .chart import FoliationParams, nonlinearity_weight
from .discretization import FULL3D, Grid, radial_d1
from .exact_solutions import sphere_area

__all__ = [
    "radial_weights",
    "radial_integral",
    "cosine_moments",
    "sphere_integral",
    "energy",
    "potential_energy",
    "boundary_flux_rate",
    "l2_norm",
    "l2_error",
    "EnergyRecord",
    "EnergyMonitor",
]


@lru_cache(maxsize=None)
def _cached_radial_weights(num: int, h: float) -> np.ndarray:
    w = np.empty(num)
    w[0] = 27.0 / 8.0
    w[1] = 17.0 / 8.0
    if num % 2 == 0:
        w[2:-1:2] = 4.0
        w[3:-1:2] = 2.0
        w[-1] = 1.0
        return w * (h / 3.0)
    # Odd node count: close the composite rule with a 3/8 tail over the
    # last three intervals (still fourth order).
    w[2: num - 4: 2] = 4.0
    w[3: num - 4: 2] = 2.0
    w[num - 4] = 1.0
    w[num - 3:] = 0.0
    w *= h / 3.0
    w[num - 4] += 3.0 * h / 8.0
    w[num - 3] = 9.0 * h / 8.0
    w[num - 2] = 9.0 * h / 8.0
    w[num - 1] = 3.0 * h / 8.0
    return w


def radial_weights(grid: Grid) -> np.ndarray:
    """Quadrature weights over the radial nodes for int_0^1 ... drt."""
    return _cached_radial_weights(grid.num_r, grid.h_r)


def radial_integral(samples: np.ndarray, h: float) -> float:
    """Integrate radial samples over [0, 1] (origin-staggered Simpson)."""
    samples = np.asarray(samples)
    return float(_cached_radial_weights(samples.shape[0], h) @ samples)


@lru_cache(maxsize=None)
def cosine_moments(power: int, count: int) -> np.ndarray:
    """int_0^pi sin^power(theta) cos(l theta) dtheta for l = 0..count-1,
    computed once to high precision."""
    out = np.empty(count)
    for ell in range(count):
        out[ell] = quad(lambda th, l=ell: np.sin(th) ** power * np.cos(l * th),
                        0.0, np.pi, epsabs=1e-13, epsrel=1e-13)[0]
    return out


def sphere_integral(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Exact integral of the truncated expansion over the unit (n-1)-sphere.

    `values` carries the angular axes last; leading axes pass through.
    """
    a = angular.to_coeffs(values, grid)
    if grid.symmetry == FULL3D:
        ell = np.arange(grid.num_theta)
        w = np.zeros(grid.num_theta)
        even = ell % 2 == 0
        w[even] = 2.0 / (1.0 - ell[even] ** 2)
        return 2.0 * np.pi * (a[..., :, 0].real @ w)
    w = cosine_moments(grid.n - 2, grid.num_theta)
    return sphere_area(grid.n - 2) * (a @ w)


def _angular_gradient_sq(phi: np.ndarray, grid: Grid) -> np.ndarray:
    dth = angular.d_theta(phi, grid)
    if grid.symmetry == FULL3D:
        dph = angular.d_phi(phi, grid)
        inv_sin2 = 1.0 / np.sin(grid.theta)[:, None] ** 2
        return dth**2 + inv_sin2 * dph**2
    return dth**2


def energy(phi: np.ndarray, pi: np.ndarray, grid: Grid,
           foliation: FoliationParams, p=None, mu: int = 0,
           weight: np.ndarray | None = None) -> float:
    """Total energy of the field on the slice.

    The nonlinear potential enters with the same conformal weight as the
    evolution equation; mu = 0 drops it (linear field).
    """
    n = foliation.n
    C = foliation.mean_curvature
    rt = grid.radial(grid.r)
    rt2 = rt * rt
    dphi_r = radial_d1(phi, grid)
    bracket = (1.0 + rt2) * (pi**2 + dphi_r**2
                             + _angular_gradient_sq(phi, grid) / rt2)
    if mu != 0:
        if weight is None:
            weight = grid.radial(nonlinearity_weight(grid.r, foliation, p))
        pw = float(p) + 1.0
        bracket += (1.0 + rt2) * (2.0 * mu / pw) * weight * np.abs(phi) ** pw
    bracket += (2.0 * (n - 1) * (rt2 - 1.0) / (rt2 + 1.0)) * rt * dphi_r * phi
    bracket += -4.0 * rt * dphi_r * pi
    bracket += (n - 1) ** 2 * (rt2 / (rt2 + 1.0)) * phi**2
    shell = sphere_integral(bracket, grid)
    return C / (4.0 * n) * radial_integral(grid.r ** (n - 1) * shell, grid.h_r)


def potential_energy(phi: np.ndarray, grid: Grid, foliation: FoliationParams,
                     p, mu: int, weight: np.ndarray | None = None) -> float:
    """The nonlinear-potential part of the energy alone (sign of mu)."""
    if mu == 0:
        return 0.0
    n = foliation.n
    C = foliation.mean_curvature
    rt = grid.radial(grid.r)
    if weight is None:
        weight = grid.radial(nonlinearity_weight(grid.r, foliation, p))
    pw = float(p) + 1.0
    integrand = (1.0 + rt * rt) * weight * np.abs(phi) ** pw / pw
    shell = sphere_integral(integrand, grid)
    return C * mu / (2.0 * n) * radial_integral(grid.r ** (n - 1) * shell, grid.h_r)


def boundary_flux_rate(phi: np.ndarray, pi: np.ndarray, grid: Grid,
                       foliation: FoliationParams) -> float:
    """dF/dt <= 0: energy leaving through the outer boundary rt = 1."""
    n = foliation.n
    C = foliation.mean_curvature
    diff = radial_d1(phi, grid)[-1] - pi[-1]
    return -(C / n) ** 2 * float(sphere_integral(diff**2, grid))


def l2_norm(values: np.ndarray, grid: Grid) -> float:
    """Volume L2 norm sqrt(int rt^(n-1) drt oint values^2 dS)."""
    shell = sphere_integral(values**2, grid)
    return float(np.sqrt(radial_integral(grid.r ** (grid.n - 1) * shell, grid.h_r)))


def l2_error(phi: np.ndarray, phi_exact: np.ndarray, grid: Grid) -> float:
    return l2_norm(phi - phi_exact, grid)


@dataclass
class EnergyRecord:
    time: float
    total: float
    potential: float
    flux_rate: float
    flux_cumulative: float
    residual: float


@dataclass
class EnergyMonitor:
    """Evolution sink accumulating the energy-balance time series.

    Cumulative flux is accumulated by the trapezoidal rule over the
    diagnostic samples; the residual E(t) - F(0, t) - E(0) measures how
    well the balance holds.
    """

    grid: Grid
    foliation: FoliationParams
    p: object = None
    mu: int = 0
    records: list = field(default_factory=list)

    def __post_init__(self):
        if self.mu != 0:
            self._weight = self.grid.radial(
                nonlinearity_weight(self.grid.r, self.foliation, self.p))
        else:
            self._weight = None
        self._initial_energy = None

    def __call__(self, state):
        e = energy(state.phi, state.pi, self.grid, self.foliation,
                   self.p, self.mu, self._weight)
        epot = potential_energy(state.phi, self.grid, self.foliation,
                                self.p, self.mu, self._weight) if self.mu else 0.0
        rate = boundary_flux_rate(state.phi, state.pi, self.grid, self.foliation)
        if self.records:
            prev = self.records[-1]
            fcum = prev.flux_cumulative + 0.5 * (rate + prev.flux_rate) * (
                state.time - prev.time)
        else:
            fcum = 0.0
            self._initial_energy = e
        self.records.append(EnergyRecord(
            time=state.time, total=e, potential=epot, flux_rate=rate,
            flux_cumulative=fcum, residual=e - fcum - self._initial_energy))
        return self.records[-1]
