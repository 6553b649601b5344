import json
import numpy as np
from hyperwave.chart import FoliationParams
from hyperwave.discretization import SO_REDUCED, build_grid
from hyperwave.diagnostics import EnergyMonitor
from hyperwave.evolve import EvolutionConfig, Solver, static_initial_data
from hyperwave.analysis import ModeRecorder, estimate_tail

out = {}

# ---- criterion 4: energy balance -------------------------------------
def balance(n, C, p, A, mu, num_r, t_end=20.0):
    fol = FoliationParams(n, C)
    g = build_grid(n, SO_REDUCED, num_r, 16)
    sol = Solver(EvolutionConfig(fol, g, p=p, mu=mu))
    st = static_initial_data([(2, A), (3, A)], 0.3, 0.07, g, fol)
    mon = EnergyMonitor(g, fol, p=p, mu=mu)
    res = sol.run(st, t_end, sinks=[mon])
    e = [r.total for r in mon.records]
    resid = max(abs(r.residual) for r in mon.records) / abs(e[0])
    ratio_end = abs(mon.records[-1].potential / mon.records[-1].total)
    f = np.array([r.flux_cumulative for r in mon.records])
    return dict(cause=res.cause, resid=float(resid), e0=float(e[0]),
                epot_over_e_end=float(ratio_end),
                f_monotone=bool(np.all(np.diff(f) <= 1e-14)),
                wall=res.wall_time)

for tag, args in [
    ("n3_mu-1_1000", (3, 0.5, 5, 12.0, -1, 1000)),
    ("n3_mu+1_1000", (3, 0.5, 5, 12.0, +1, 1000)),
    ("n5_mu-1_1000", (5, 1.0, 3, 50.0, -1, 1000)),
    ("n5_mu+1_1000", (5, 1.0, 3, 50.0, +1, 1000)),
    ("n3_mu-1_2000", (3, 0.5, 5, 12.0, -1, 2000)),
]:
    out[tag] = balance(*args)
    print(tag, out[tag], flush=True)

# ---- criterion 5 smoke: q0 at N=1000, t<=50 --------------------------
fol = FoliationParams(3, 0.5)
g = build_grid(3, SO_REDUCED, 1000, 8)
sol = Solver(EvolutionConfig(fol, g, p=5, mu=-1))
st = static_initial_data([(2, 12.0), (3, 12.0)], 0.3, 0.07, g, fol)
rec = ModeRecorder(g, [0.5, 1.0], l_max=3)
res = sol.run(st, 50.0, sinks=[rec])
print("smoke cause:", res.cause, "wall:", res.wall_time, flush=True)
smoke = {}
for key, s in rec.series.items():
    try:
        est = estimate_tail(np.array(s.times), np.array(s.values),
                            window=(50.0 / 3, 50.0))
        smoke[str(key)] = (est.q, est.method, est.uncertainty)
    except ValueError:
        smoke[str(key)] = None
out["smoke"] = smoke
print(json.dumps(out, indent=1), flush=True)
json.dump(out, open("/root/pkg/.probes/c4_c5.json", "w"), indent=1)
