"""Parity-split Fourier pseudo-spectral transforms on the sphere.

A smooth function on the two-sphere sampled on the staggered (theta, phi)
grid is expanded as

    u(theta, phi) = sum_l [ cos(l theta) * sum_{m even} Re(a_lm e^{i m phi})
                          + sin(l theta) * sum_{m odd}  Re(a_lm e^{i m phi}) ]

with l = 0 .. num_theta-1 and m = 0 .. num_phi/2 - 1.  Pairing even m with
cosines and odd m with sines enforces the smoothness conditions
u(-theta, phi) = u(theta, pi + phi) and u(pi + theta, phi) =
u(pi - theta, pi + phi) by construction.  Under reduced symmetry there is
no phi dependence and the expansion is a plain cosine series with real
coefficients a_l.

Forward transforms are a real FFT in phi followed by a type-II discrete
cosine (even m) or sine (odd m) transform matching the midpoint theta
nodes.  Derivatives are taken by differentiating the basis functions in
coefficient space; note that d/dtheta swaps the two parity classes
(cosine series become sine series and vice versa), so the matching
inverse transform must be used.  The phi Nyquist bin and the l = num_theta
sine lattice mode fall outside the expansion and are projected away by
the forward transform.

Coefficient layout: reduced symmetry -> real array (..., num_theta);
full 3d -> complex array (..., num_theta, num_phi // 2), theta slot l in
axis -2, phi frequency m in axis -1.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dct, dst, idct, idst, irfft, rfft

from .discretization import FULL3D, Grid

__all__ = [
    "to_coeffs",
    "from_coeffs",
    "d_theta",
    "d_phi",
    "d2_phi",
    "angular_laplacian",
    "dealias_23",
    "dealias_cut",
    "pole_filter",
    "pole_keep_mask",
    "filter_values",
]

_T = {"axis": -1}


# -- theta transforms (operate on the last axis) -------------------------

def _cos_analysis(g):
    a = dct(g, type=2, axis=-1)
    a = a / g.shape[-1]
    a[..., 0] /= 2.0
    return a


def _cos_synthesis(a):
    y = a * a.shape[-1]
    y[..., 0] *= 2.0
    return idct(y, type=2, axis=-1)


def _sin_analysis(g):
    """Coefficients of sin(l theta), slot l; slot 0 is identically zero
    and the unpaired l = N lattice mode is dropped."""
    n = g.shape[-1]
    y = dst(g, type=2, axis=-1) / n
    b = np.zeros_like(y)
    b[..., 1:] = y[..., : n - 1]
    return b


def _sin_synthesis(b):
    n = b.shape[-1]
    y = np.zeros_like(b)
    y[..., : n - 1] = b[..., 1:] * n
    return idst(y, type=2, axis=-1)


# -- phi half-transform (full 3d only) ------------------------------------

def _phi_analysis(u, num_phi):
    """Real FFT normalized so Re(ahat_m e^{i m phi}) reproduces the data;
    the Nyquist bin is dropped."""
    spec = rfft(u, axis=-1)
    ahat = spec[..., : num_phi // 2] * (2.0 / num_phi)
    ahat[..., 0] *= 0.5
    return ahat


def _phi_synthesis(ahat, num_phi):
    m = num_phi // 2
    spec = np.zeros(ahat.shape[:-1] + (m + 1,),
                    dtype=np.result_type(ahat.dtype, np.complex128))
    spec[..., :m] = ahat * (num_phi / 2.0)
    spec[..., 0] = ahat[..., 0].real * num_phi
    return irfft(spec, n=num_phi, axis=-1)


def _even_odd(num_phi):
    m = np.arange(num_phi // 2)
    return m % 2 == 0, m % 2 == 1


# -- public transforms ----------------------------------------------------

def to_coeffs(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Expansion coefficients of grid values (leading axes pass through)."""
    if grid.symmetry == FULL3D:
        ahat = _phi_analysis(u, grid.num_phi)
        even, odd = _even_odd(grid.num_phi)
        a = np.empty_like(ahat)
        # theta runs along axis -2; move it last for the transforms
        ahat_t = np.swapaxes(ahat, -1, -2)
        a_t = np.swapaxes(a, -1, -2)
        a_t[..., even, :] = _cos_analysis(ahat_t[..., even, :])
        a_t[..., odd, :] = _sin_analysis(ahat_t[..., odd, :])
        return a
    return _cos_analysis(u)


def from_coeffs(a: np.ndarray, grid: Grid) -> np.ndarray:
    """Grid values of an expansion; exact inverse of to_coeffs."""
    if grid.symmetry == FULL3D:
        even, odd = _even_odd(grid.num_phi)
        a_t = np.swapaxes(a, -1, -2)
        ahat_t = np.empty_like(a_t)
        ahat_t[..., even, :] = _cos_synthesis(a_t[..., even, :])
        ahat_t[..., odd, :] = _sin_synthesis(a_t[..., odd, :])
        return _phi_synthesis(np.swapaxes(ahat_t, -1, -2), grid.num_phi)
    return _cos_synthesis(a)


def d_theta(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Elevation derivative; parity classes swap under d/dtheta."""
    ell = np.arange(grid.num_theta, dtype=float)
    if grid.symmetry == FULL3D:
        a = to_coeffs(u, grid)
        even, odd = _even_odd(grid.num_phi)
        a_t = np.swapaxes(a, -1, -2)
        out_t = np.empty_like(a_t)
        # cos(l t) -> -l sin(l t) ; sin(l t) -> l cos(l t)
        out_t[..., even, :] = _sin_synthesis(-ell * a_t[..., even, :])
        out_t[..., odd, :] = _cos_synthesis(ell * a_t[..., odd, :])
        return _phi_synthesis(np.swapaxes(out_t, -1, -2), grid.num_phi)
    a = _cos_analysis(u)
    return _sin_synthesis(-ell * a)


def _d2_theta(u: np.ndarray, grid: Grid) -> np.ndarray:
    ell2 = np.arange(grid.num_theta, dtype=float) ** 2
    if grid.symmetry == FULL3D:
        a = to_coeffs(u, grid)
        even, odd = _even_odd(grid.num_phi)
        a_t = np.swapaxes(a, -1, -2)
        out_t = np.empty_like(a_t)
        out_t[..., even, :] = _cos_synthesis(-ell2 * a_t[..., even, :])
        out_t[..., odd, :] = _sin_synthesis(-ell2 * a_t[..., odd, :])
        return _phi_synthesis(np.swapaxes(out_t, -1, -2), grid.num_phi)
    a = _cos_analysis(u)
    return _cos_synthesis(-ell2 * a)


def d_phi(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Azimuthal derivative (full 3d only); e^{i m phi} -> i m e^{i m phi}."""
    m = np.arange(grid.num_phi // 2)
    ahat = _phi_analysis(u, grid.num_phi)
    return _phi_synthesis(1j * m * ahat, grid.num_phi)


def d2_phi(u: np.ndarray, grid: Grid) -> np.ndarray:
    m = np.arange(grid.num_phi // 2, dtype=float)
    ahat = _phi_analysis(u, grid.num_phi)
    return _phi_synthesis(-(m * m) * ahat, grid.num_phi)


def angular_laplacian(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Laplace-Beltrami operator on the (n-1)-sphere, assembled pointwise.

    Reduced symmetry: d2 + (n-2) cot(theta) d1.  Full 3d adds the
    azimuthal term 1/sin^2(theta) d2_phi.  The staggered grid keeps
    cot(theta) and 1/sin^2(theta) finite at every node.
    """
    cot = 1.0 / np.tan(grid.theta)
    if grid.symmetry == FULL3D:
        inv_sin2 = 1.0 / np.sin(grid.theta) ** 2
        return (_d2_theta(u, grid)
                + cot[:, None] * d_theta(u, grid)
                + inv_sin2[:, None] * d2_phi(u, grid))
    return _d2_theta(u, grid) + (grid.n - 2) * cot * d_theta(u, grid)


# -- filters ---------------------------------------------------------------

def dealias_cut(num_theta: int) -> int:
    """First theta slot removed by the 2/3 rule: ceil(2 N / 3)."""
    return -((-2 * num_theta) // 3)


def dealias_23(a: np.ndarray, grid: Grid) -> np.ndarray:
    """Zero the top third of theta slots (idempotent projection)."""
    a = np.array(a, copy=True)
    cut = dealias_cut(grid.num_theta)
    if grid.symmetry == FULL3D:
        a[..., cut:, :] = 0.0
    else:
        a[..., cut:] = 0.0
    return a


def pole_keep_mask(grid: Grid) -> np.ndarray:
    """Boolean (num_theta, num_phi/2) mask of phi frequencies kept per
    latitude: the highest floor((1 - sin theta_j) * num_phi/2) are dropped."""
    m_half = grid.num_phi // 2
    removed = np.floor((1.0 - np.sin(grid.theta)) * m_half).astype(int)
    removed = np.clip(removed, 0, m_half)
    m = np.arange(m_half)
    return m[None, :] < (m_half - removed)[:, None]


def pole_filter(ahat: np.ndarray, grid: Grid) -> np.ndarray:
    """Latitude-dependent azimuthal filter on the phi half-transform
    (..., num_theta, num_phi/2), counteracting pole clustering."""
    return ahat * pole_keep_mask(grid)


def filter_values(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Dealias in theta, then pole-filter in phi, returning grid values.

    Order within a substage: transform, dealias, pole filter, inverse.
    """
    if grid.symmetry == FULL3D:
        a = dealias_23(to_coeffs(u, grid), grid)
        even, odd = _even_odd(grid.num_phi)
        a_t = np.swapaxes(a, -1, -2)
        ahat_t = np.empty_like(a_t)
        ahat_t[..., even, :] = _cos_synthesis(a_t[..., even, :])
        ahat_t[..., odd, :] = _sin_synthesis(a_t[..., odd, :])
        ahat = pole_filter(np.swapaxes(ahat_t, -1, -2), grid)
        return _phi_synthesis(ahat, grid.num_phi)
    return from_coeffs(dealias_23(to_coeffs(u, grid), grid), grid)
