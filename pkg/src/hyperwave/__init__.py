"""Evolution of power-nonlinearity wave equations on compactified
hyperboloidal slices, with energy-balance diagnostics and late-time
tail analysis."""

from .chart import (
    FoliationParams,
    ChartCoeffs,
    CriticalExponents,
    areal_radius,
    physical_time,
    chart_coeffs,
    critical_exponents,
    nonlinearity_weight,
)
from .discretization import (
    Grid,
    FULL3D,
    SO_REDUCED,
    build_grid,
    fill_ghosts_origin,
    radial_d1,
    radial_d2,
    conservative_radial_term,
    ko_dissipation,
    cfl_timestep,
)
from .errors import ConfigError
from .evolve import (
    EvolutionConfig,
    RunResult,
    Solver,
    State,
    exact_linear_state,
    static_initial_data,
)

__all__ = [
    "EvolutionConfig",
    "RunResult",
    "Solver",
    "State",
    "exact_linear_state",
    "static_initial_data",
    "FoliationParams",
    "ChartCoeffs",
    "CriticalExponents",
    "areal_radius",
    "physical_time",
    "chart_coeffs",
    "critical_exponents",
    "nonlinearity_weight",
    "Grid",
    "FULL3D",
    "SO_REDUCED",
    "build_grid",
    "fill_ghosts_origin",
    "radial_d1",
    "radial_d2",
    "conservative_radial_term",
    "ko_dissipation",
    "cfl_timestep",
    "ConfigError",
]
