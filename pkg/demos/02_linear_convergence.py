"""Fourth-order convergence against an exact linear solution.

Evolves ingoing l = 1 and l = 2 wave modes (linear equation, mu = 0)
at three radial resolutions and compares against the closed-form
solution: the volume L2 error should drop by about 2^4 = 16 per
resolution doubling.  Runs in about a minute.
"""

import numpy as np

from hyperwave import FoliationParams, build_grid
from hyperwave.diagnostics import l2_error
from hyperwave.evolve import EvolutionConfig, Solver, exact_linear_state
from hyperwave.exact_solutions import LinearModeSpec, exact_linear_fields

# C = 1: slice scale a = 3 puts the ingoing pulse mid-slice at t0 = -15
fol = FoliationParams(3, 1.0)
modes = [LinearModeSpec(1), LinearModeSpec(2)]
t0, t_end = -15.0, 10.0

print("N_r     L2 error      order")
errors = []
for num_r in (125, 250, 500):
    grid = build_grid(3, "so", num_r, 8)
    solver = Solver(EvolutionConfig(fol, grid, mu=0))
    result = solver.run(exact_linear_state(t0, grid, fol, modes), t_end)
    exact_phi, _ = exact_linear_fields(t0 + result.time, grid, fol, modes)
    errors.append(l2_error(result.state.phi, exact_phi, grid))
    order = "" if len(errors) == 1 else f"{np.log2(errors[-2] / errors[-1]):.2f}"
    print(f"{num_r:5d}   {errors[-1]:.4e}   {order}")

print("\n(an order near 4 reflects the fourth-order radial stencils;")
print(" the angular directions are spectrally exact for these modes)")
