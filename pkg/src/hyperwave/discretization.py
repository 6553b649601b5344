"""Grids and fourth-order radial finite differencing.

The radial grid is staggered at the origin (first node at h/2) and its
outermost node sits exactly on the conformal boundary rt = 1; the theta
grid is staggered about the axis so no node hits a coordinate
singularity.  Radial derivatives use centred 5-point stencils in the
interior and one-sided stencils at the two outermost nodes, all with
O(h^4) truncation error.  Ghost nodes at negative radii are copies of
interior values under the point symmetry

    u(-rt, theta, phi) = u(rt, pi - theta, pi + phi),

which on the staggered grids is an exact index map (theta reversal plus
a half-turn roll in phi).  Fields carry the radial index first:
(i, j) for reduced symmetry, (i, j, k) for the full 3d case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = [
    "FULL3D",
    "SO_REDUCED",
    "Grid",
    "build_grid",
    "fill_ghosts_origin",
    "radial_d1",
    "radial_d2",
    "conservative_radial_term",
    "ko_dissipation",
    "cfl_timestep",
]

FULL3D = "full"
SO_REDUCED = "so"


@dataclass(frozen=True, eq=False)
class Grid:
    """Node sets and spacings for one run.

    num_phi and phi are None under reduced symmetry.  The radial spacing
    is h_r = 1/(num_r - 1/2) so that r[-1] == 1.0 exactly.
    """

    n: int
    symmetry: str
    num_r: int
    num_theta: int
    num_phi: int | None
    h_r: float
    h_theta: float
    h_phi: float | None
    r: np.ndarray
    theta: np.ndarray
    phi: np.ndarray | None

    @property
    def field_shape(self) -> tuple:
        if self.symmetry == FULL3D:
            return (self.num_r, self.num_theta, self.num_phi)
        return (self.num_r, self.num_theta)

    @property
    def angular_size(self) -> int:
        """Number of angular nodes per radial shell."""
        if self.symmetry == FULL3D:
            return self.num_theta * self.num_phi
        return self.num_theta

    def radial(self, values: np.ndarray) -> np.ndarray:
        """Reshape a per-node radial array to broadcast against fields."""
        extra = len(self.field_shape) - 1
        return np.reshape(values, (-1,) + (1,) * extra)


def build_grid(n, symmetry, num_r, num_theta, num_phi=None, dtype=np.float64) -> Grid:
    """Construct the staggered product grid.

    The full 3d case is only meaningful for n = 3 and needs an even
    num_phi so that every node phi has a partner at phi + pi.
    """
    if symmetry not in (FULL3D, SO_REDUCED):
        raise ConfigError(f"unknown symmetry {symmetry!r}")
    if symmetry == FULL3D:
        if n != 3:
            raise ConfigError("full 3d grids require n = 3")
        if num_phi is None or num_phi < 4 or num_phi % 2 != 0:
            raise ConfigError("num_phi must be even and >= 4 in full 3d")
    else:
        num_phi = None
    if num_r < 4:
        raise ConfigError("num_r must be >= 4")
    if num_theta < 2:
        raise ConfigError("num_theta must be >= 2")

    # (2i+1)/(2N-1) puts the last node at exactly 1.0 in floating point.
    i = np.arange(num_r)
    r = ((2 * i + 1) / (2 * num_r - 1)).astype(dtype)
    h_r = 2.0 / (2 * num_r - 1)
    theta = ((np.arange(num_theta) + 0.5) * (np.pi / num_theta)).astype(dtype)
    h_theta = np.pi / num_theta
    if num_phi is not None:
        phi = (np.arange(num_phi) * (2.0 * np.pi / num_phi)).astype(dtype)
        h_phi = 2.0 * np.pi / num_phi
    else:
        phi = None
        h_phi = None
    return Grid(n, symmetry, num_r, num_theta, num_phi,
                h_r, h_theta, h_phi, r, theta, phi)


def _origin_image(rows: np.ndarray, grid: Grid) -> np.ndarray:
    """Apply the antipodal angle map (theta -> pi - theta, phi -> phi + pi)."""
    if grid.symmetry == FULL3D:
        return np.roll(rows[:, ::-1, :], grid.num_phi // 2, axis=2)
    return rows[:, ::-1]


def fill_ghosts_origin(f: np.ndarray, grid: Grid, shells: int = 2,
                       sign: float = 1.0) -> np.ndarray:
    """Prepend ghost shells at negative radii by the origin symmetry.

    Returns an array with `shells` extra leading rows; row shells-1-k
    holds the ghost at -r[k].  `sign` is +1 for scalars, -1 for radial
    derivatives of scalars, and (-1)^n for the conservative flux.
    """
    img = sign * _origin_image(f[:shells], grid)
    return np.concatenate([img[::-1], f], axis=0)


def _d1_padded(fp: np.ndarray, h: float, num: int) -> np.ndarray:
    """First derivative given >= 2 ghost rows; one-sided at the outer edge."""
    g = fp.shape[0] - num  # leading ghost count
    out = np.empty_like(fp[g:])
    m = num - 2
    # antisymmetric pairs: [8 (u_{i+1} - u_{i-1}) - (u_{i+2} - u_{i-2})] / 12h
    head = out[:m]
    np.subtract(fp[g + 1: g + m + 1], fp[g - 1: g + m - 1], out=head)
    head *= 8.0
    head += fp[g - 2: g + m - 2]
    head -= fp[g + 2: g + m + 2]
    head *= 1.0 / (12.0 * h)
    f = fp[g:]
    out[num - 2] = (-f[num - 5] + 6.0 * f[num - 4] - 18.0 * f[num - 3]
                    + 10.0 * f[num - 2] + 3.0 * f[num - 1]) / (12.0 * h)
    out[num - 1] = (3.0 * f[num - 5] - 16.0 * f[num - 4] + 36.0 * f[num - 3]
                    - 48.0 * f[num - 2] + 25.0 * f[num - 1]) / (12.0 * h)
    return out


def _d2_padded(fp: np.ndarray, h: float, num: int) -> np.ndarray:
    """Second derivative given 2 ghost rows; one-sided at the outer edge."""
    g = fp.shape[0] - num
    out = np.empty_like(fp[g:])
    out[: num - 2] = (
        -fp[g - 2: g + num - 4]
        + 16.0 * fp[g - 1: g + num - 3]
        - 30.0 * fp[g: g + num - 2]
        + 16.0 * fp[g + 1: g + num - 1]
        - fp[g + 2: g + num]
    ) / (12.0 * h * h)
    f = fp[g:]
    out[num - 2] = (f[num - 6] - 6.0 * f[num - 5] + 14.0 * f[num - 4]
                    - 4.0 * f[num - 3] - 15.0 * f[num - 2]
                    + 10.0 * f[num - 1]) / (12.0 * h * h)
    out[num - 1] = (-10.0 * f[num - 6] + 61.0 * f[num - 5]
                    - 156.0 * f[num - 4] + 214.0 * f[num - 3]
                    - 154.0 * f[num - 2] + 45.0 * f[num - 1]) / (12.0 * h * h)
    return out


def _ko_padded(fp: np.ndarray, h: float, num: int, eps: float) -> np.ndarray:
    """7-point dissipation given 3 ghost rows; zero at the 3 outer nodes."""
    g = fp.shape[0] - num
    out = np.empty_like(fp[g:])
    m = num - 3  # stencil applies for i = 0 .. num-4
    # symmetric pairs: s_k = u_{i-k} + u_{i+k}
    head = out[:m]
    np.add(fp[g - 1: g + m - 1], fp[g + 1: g + m + 1], out=head)
    head *= 15.0
    s2 = np.add(fp[g - 2: g + m - 2], fp[g + 2: g + m + 2])
    s2 *= 6.0
    head -= s2
    head += fp[g - 3: g + m - 3]
    head += fp[g + 3: g + m + 3]
    head -= 20.0 * fp[g: g + m]
    head *= eps / (64.0 * h)
    out[m:] = 0.0
    return out


def _need_nodes(grid: Grid, least: int):
    if grid.num_r < least:
        raise ConfigError(f"radial stencils need num_r >= {least}, "
                          f"got {grid.num_r}")


def radial_d1(f: np.ndarray, grid: Grid, sign: float = 1.0) -> np.ndarray:
    """d/drt of a field, 4th order, ghosts filled with the given parity."""
    _need_nodes(grid, 6)
    fp = fill_ghosts_origin(f, grid, 2, sign)
    return _d1_padded(fp, grid.h_r, grid.num_r)


def radial_d2(f: np.ndarray, grid: Grid, sign: float = 1.0) -> np.ndarray:
    """d^2/drt^2 of a field, 4th order."""
    _need_nodes(grid, 6)
    fp = fill_ghosts_origin(f, grid, 2, sign)
    return _d2_padded(fp, grid.h_r, grid.num_r)


def conservative_radial_term(flux: np.ndarray, grid: Grid) -> np.ndarray:
    """rt^(1-n) d/drt applied to an assembled flux rt^(n-1)(...).

    The differencing acts on the flux product itself; the prefactor is
    applied afterwards, pointwise.  The flux inherits parity (-1)^n
    under the origin symmetry.
    """
    sign = -1.0 if grid.n % 2 else 1.0
    d = radial_d1(flux, grid, sign)
    return grid.radial(grid.r ** (1 - grid.n)) * d


def ko_dissipation(f: np.ndarray, grid: Grid, eps: float,
                   sign: float = 1.0) -> np.ndarray:
    """Fifth-order Kreiss-Oliger dissipation along the radial direction.

    Applied wherever the 7-point stencil fits using origin ghosts;
    nothing is added at the outermost three nodes.
    """
    _need_nodes(grid, 6)
    fp = fill_ghosts_origin(f, grid, 3, sign)
    return _ko_padded(fp, grid.h_r, grid.num_r, eps)


def cfl_timestep(grid: Grid, cfl: float) -> float:
    """Time step cfl * (h_r/2) * h_theta, set by the innermost theta arc."""
    if not 0.0 < cfl < 1.0:
        raise ConfigError(f"CFL factor must lie in (0, 1), got {cfl}")
    return cfl * (grid.h_r / 2.0) * grid.h_theta
