import json
import numpy as np
from hyperwave.chart import FoliationParams
from hyperwave.discretization import FULL3D, build_grid
from hyperwave.evolve import EvolutionConfig, Solver, static_initial_data
from hyperwave.analysis import ModeRecorder, estimate_tail, local_power_index

fol = FoliationParams(3, 0.5)
g = build_grid(3, FULL3D, 1000, 8, 8)
sol = Solver(EvolutionConfig(fol, g, p=5, mu=-1))
st = static_initial_data([(2, 1, 6.0), (2, 2, 12.0)], 0.3, 0.07, g, fol)
rec = ModeRecorder(g, [0.5], l_max=2)
res = sol.run(st, 40.0, sinks=[rec])
print("cause:", res.cause, "wall:", res.wall_time, flush=True)
out = {}
r = list(rec.series)[0][0]
for m in (0, 1, 2):
    s = rec.series[(r, 2, m)]
    t = np.array(s.times); v = np.array(s.values)
    try:
        est = estimate_tail(t, v, window=(40/3, 40.0))
        out[f"q_2{m}"] = (est.q, est.method, est.uncertainty)
    except ValueError:
        out[f"q_2{m}"] = None
    lt, lq = local_power_index(t, v)
    if lt.size:
        out[f"lpi_2{m}_tail"] = list(zip(lt[-8:].tolist(), lq[-8:].tolist()))
print(json.dumps(out, indent=1), flush=True)
json.dump(out, open("/root/pkg/.probes/c6.json", "w"), indent=1)
