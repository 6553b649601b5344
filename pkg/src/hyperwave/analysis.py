"""Late-time tail analysis: mode extraction, local power index, fits.

A mode amplitude is the sphere integral of the field on a fixed radial
shell against a real spherical harmonic; the shell is the grid node
nearest to the requested extraction radius (no interpolation, so no
extra error enters the exponent estimates).  The integral is evaluated
through the spectral expansion of the shell values with a precomputed
overlap matrix between the Fourier basis in theta and the harmonics.

A mode decaying like t^-q has local power index

    q(t) = - d ln |amplitude| / d ln t

computed by centred differences of the log-log samples.  Tiny
amplitudes make the index numerically unstable, so samples below an
absolute floor are dropped.  The asymptotic exponent is reported from
the plateau of q(t) when the index has settled (windowed standard
deviation below 0.1), and from a least-squares power-law fit otherwise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import sph_harm_y

from .angular import dealias_cut, to_coeffs
from .discretization import FULL3D, Grid
from .exact_solutions import sphere_area, spherical_harmonic

__all__ = [
    "ModeSeries",
    "TailEstimate",
    "TailReportRow",
    "snap_radius",
    "extract_modes",
    "ModeRecorder",
    "local_power_index",
    "powerlaw_fit",
    "estimate_tail",
    "conjectured_exponents",
    "measured_decay_rates",
    "tail_report",
]

AMPLITUDE_FLOOR = 1e-13


@dataclass
class ModeSeries:
    l: int
    m: int | None
    r_extract: float
    times: list = field(default_factory=list)
    values: list = field(default_factory=list)

    @property
    def label(self) -> str:
        m = "" if self.m is None else f"m{self.m}"
        return f"l{self.l}{m}_r{self.r_extract:g}"


@dataclass
class TailEstimate:
    q: float
    window: tuple
    method: str  # 'lpi-plateau' or 'ls-fit'
    uncertainty: float


def snap_radius(grid: Grid, r_ex: float) -> tuple:
    """Nearest grid node to the requested extraction radius."""
    idx = int(np.argmin(np.abs(grid.r - r_ex)))
    return idx, float(grid.r[idx])


@lru_cache(maxsize=None)
def _reduced_overlap(n: int, num_theta: int, l_max: int) -> np.ndarray:
    """O[l, lf] = area int Y_l(theta) cos(lf theta) sin^(n-2) dtheta."""
    area = sphere_area(n - 2)
    out = np.empty((l_max + 1, num_theta))
    for l in range(l_max + 1):
        for lf in range(num_theta):
            out[l, lf] = area * quad(
                lambda th: (spherical_harmonic(n, l, th)
                            * np.cos(lf * th) * np.sin(th) ** (n - 2)),
                0.0, np.pi, epsabs=1e-13, epsrel=1e-12)[0]
    return out


@lru_cache(maxsize=None)
def _full3d_overlap(l: int, m: int, num_theta: int) -> np.ndarray:
    """T[lf] = int Theta_lm(theta) trig(lf theta) sin(theta) dtheta with
    trig = cos for even m, sin for odd m (the parity the expansion pairs
    with that azimuthal frequency)."""
    if m == 0:
        def theta_part(th):
            return sph_harm_y(l, 0, th, 0.0).real
    else:
        def theta_part(th):
            return np.sqrt(2.0) * (-1.0) ** m * sph_harm_y(l, m, th, 0.0).real

    trig = np.cos if m % 2 == 0 else np.sin
    out = np.empty(num_theta)
    for lf in range(num_theta):
        out[lf] = quad(lambda th: theta_part(th) * trig(lf * th) * np.sin(th),
                       0.0, np.pi, epsabs=1e-13, epsrel=1e-12)[0]
    return out


def extract_modes(phi: np.ndarray, grid: Grid, r_ex: float, l_max: int,
                  m_values=None) -> dict:
    """Spherical-harmonic amplitudes of the field on one radial shell.

    Returns {l: value} under reduced symmetry, {(l, m): value} in full
    3d (m >= 0 by default; pass m_values for specific azimuthal orders).
    """
    if l_max >= dealias_cut(grid.num_theta):
        warnings.warn("extracting modes beyond the dealiased band",
                      stacklevel=2)
    idx, _ = snap_radius(grid, r_ex)
    shell = phi[idx]
    a = to_coeffs(shell, grid)
    out = {}
    if grid.symmetry == FULL3D:
        m_half = grid.num_phi // 2
        for l in range(l_max + 1):
            ms = range(0, min(l, m_half - 1) + 1) if m_values is None else m_values
            for m in ms:
                if abs(m) > min(l, m_half - 1):
                    continue
                t = _full3d_overlap(l, abs(m), grid.num_theta)
                col = a[:, abs(m)]
                if m == 0:
                    out[(l, 0)] = 2.0 * np.pi * float(t @ col.real)
                elif m > 0:
                    out[(l, m)] = np.pi * float(t @ col.real)
                else:
                    out[(l, m)] = -np.pi * float(t @ col.imag)
        return out
    overlap = _reduced_overlap(grid.n, grid.num_theta, l_max)
    for l in range(l_max + 1):
        out[l] = float(overlap[l] @ a)
    return out


class ModeRecorder:
    """Evolution sink recording mode amplitudes at fixed radii."""

    def __init__(self, grid: Grid, radii, l_max: int = 3, m_values=None):
        self.grid = grid
        self.l_max = l_max
        self.m_values = m_values
        self.series = {}
        self._radii = []
        for r_ex in radii:
            _, snapped = snap_radius(grid, r_ex)
            self._radii.append(snapped)
            if grid.symmetry == FULL3D:
                m_half = grid.num_phi // 2
                for l in range(l_max + 1):
                    ms = (range(0, min(l, m_half - 1) + 1)
                          if m_values is None else m_values)
                    for m in ms:
                        if abs(m) <= min(l, m_half - 1):
                            self.series[(snapped, l, m)] = ModeSeries(l, m, snapped)
            else:
                for l in range(l_max + 1):
                    self.series[(snapped, l)] = ModeSeries(l, None, snapped)

    def __call__(self, state):
        for r_ex in self._radii:
            amps = extract_modes(state.phi, self.grid, r_ex, self.l_max,
                                 self.m_values)
            for key, val in amps.items():
                sk = (r_ex,) + (key if isinstance(key, tuple) else (key,))
                self.series[sk].times.append(state.time)
                self.series[sk].values.append(val)


def local_power_index(times, values, floor: float = AMPLITUDE_FLOOR):
    """Sampled q(t) = -d ln|value| / d ln t by centred differencing.

    Samples at t <= 0 or with |value| <= floor are dropped (the index is
    numerically unstable on tiny amplitudes); gaps simply widen the
    difference stencil.  Returns (t, q) arrays at the interior samples.
    """
    t = np.asarray(times, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    keep = (t > 0.0) & (v > floor)
    t, v = t[keep], v[keep]
    if t.size < 3:
        return np.empty(0), np.empty(0)
    x = np.log(t)
    y = np.log(v)
    q = -(y[2:] - y[:-2]) / (x[2:] - x[:-2])
    return t[1:-1], q


def powerlaw_fit(times, values, window, floor: float = AMPLITUDE_FLOOR) -> TailEstimate:
    """Least-squares slope of ln|value| against ln t inside the window."""
    t = np.asarray(times, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    keep = (t >= window[0]) & (t <= window[1]) & (v > floor) & (t > 0.0)
    if keep.sum() < 10:
        raise ValueError("power-law fit needs at least 10 usable samples")
    x = np.log(t[keep])
    y = np.log(v[keep])
    slope, _ = np.polyfit(x, y, 1)
    q = -float(slope)
    lt, lq = local_power_index(times, values, floor)
    inside = (lt >= window[0]) & (lt <= window[1])
    unc = float(np.max(np.abs(lq[inside] - q))) if inside.any() else np.inf
    return TailEstimate(q, tuple(window), "ls-fit", unc)


def estimate_tail(times, values, window=None,
                  floor: float = AMPLITUDE_FLOOR) -> TailEstimate:
    """Asymptotic exponent from the plateau of the local power index.

    The default window is the last decade of the series.  When the index
    has settled (std < 0.1 over the window) its mean is reported with
    the half-range as uncertainty; otherwise a power-law fit over the
    same window is returned.
    """
    t = np.asarray(times, dtype=float)
    if window is None:
        window = (t[-1] / 10.0, t[-1])
    lt, lq = local_power_index(times, values, floor)
    inside = (lt >= window[0]) & (lt <= window[1])
    if inside.sum() >= 3 and float(np.std(lq[inside])) < 0.1:
        qs = lq[inside]
        return TailEstimate(float(np.mean(qs)), tuple(window), "lpi-plateau",
                            float(0.5 * (np.max(qs) - np.min(qs))))
    return powerlaw_fit(times, values, window, floor)


def conjectured_exponents(n: int, p, l: int) -> tuple:
    """Decay exponents (finite radius, outer boundary) for mode l.

    n = 3: max(l+p-1, 2l+2) and max(p-2, l+1); n = 5: max(l+p+2, 2l+4)
    and max(p, l+2).
    """
    if n == 3:
        return max(l + p - 1, 2 * l + 2), max(p - 2, l + 1)
    if n == 5:
        return max(l + p + 2, 2 * l + 4), max(p, l + 2)
    raise ValueError(f"no conjectured exponents for n = {n}")


# Asymptotic decay rates from numerical evolutions, (finite radius,
# outer boundary) per mode; True marks entries reported as uncertain.
_MEASURED_RATES = {
    (3, 3): {0: ((2, False), (1, False)), 1: ((4, False), (2, False)),
             2: ((6, False), (3, False)), 3: ((8, False), (4, False))},
    (3, 4): {0: ((3, False), (2, False)), 1: ((4, False), (2, False)),
             2: ((6, False), (3, False)), 3: ((8, False), (4, False))},
    (3, 5): {0: ((4, False), (3, False)), 1: ((5, False), (3, False)),
             2: ((6, False), (3, False)), 3: ((8, False), (4, False))},
    (3, 6): {0: ((5, False), (4, False)), 1: ((6, False), (4, False)),
             2: ((7, False), (4, False)), 3: ((8, True), (4, False))},
    (3, 7): {0: ((6, False), (5, False)), 1: ((7, False), (5, False)),
             2: ((8, False), (5, False)), 3: ((9, True), (5, True))},
    (5, 2): {0: ((4, False), (2, False)), 1: ((6, False), (3, False)),
             2: ((8, False), (4, False)), 3: ((10, False), (5, False))},
    (5, 3): {0: ((5, False), (3, False)), 1: ((6, False), (3, False)),
             2: ((8, True), (4, False)), 3: ((10, True), (5, False))},
}


def measured_decay_rates(n: int, p: int, l: int) -> tuple:
    """Reference decay rates ((q, uncertain), (q_scri, uncertain))."""
    return _MEASURED_RATES[(n, p)][l]


@dataclass
class TailReportRow:
    n: int
    p: object
    mu: int
    l: int
    q_finite: float | None
    q_scri: float | None
    conjecture_finite: float
    conjecture_scri: float
    reference_finite: int | None = None
    reference_finite_uncertain: bool = False
    reference_scri: int | None = None
    reference_scri_uncertain: bool = False
    finite_agrees: bool | None = None
    scri_agrees: bool | None = None


def tail_report(measurements, tol: float = 0.3) -> list:
    """Compare measured exponents against the conjectured formulas and
    the reference table.

    Each measurement is a mapping with keys n, p, mu, l and optionally
    q_finite / q_scri (floats or TailEstimates).  Agreement against
    uncertain reference entries is informational: the row carries the
    flag but agrees-fields are still computed from the formulas.
    """
    rows = []
    for meas in measurements:
        n, p, mu, l = meas["n"], meas["p"], meas["mu"], meas["l"]
        cf, cs = conjectured_exponents(n, p, l)
        row = TailReportRow(n=n, p=p, mu=mu, l=l,
                            q_finite=_as_q(meas.get("q_finite")),
                            q_scri=_as_q(meas.get("q_scri")),
                            conjecture_finite=cf, conjecture_scri=cs)
        key = (n, int(p)) if float(p) == int(p) else None
        if key in _MEASURED_RATES and l in _MEASURED_RATES[key]:
            (rf, uf), (rs, us) = _MEASURED_RATES[key][l]
            row.reference_finite = rf
            row.reference_finite_uncertain = uf
            row.reference_scri = rs
            row.reference_scri_uncertain = us
        if row.q_finite is not None:
            row.finite_agrees = abs(row.q_finite - cf) <= tol
        if row.q_scri is not None:
            row.scri_agrees = abs(row.q_scri - cs) <= tol
        rows.append(row)
    return rows


def _as_q(value):
    if value is None:
        return None
    if isinstance(value, TailEstimate):
        return value.q
    return float(value)
