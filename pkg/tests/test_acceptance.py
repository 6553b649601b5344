"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line with the measured numbers (run with -v, add -s or -rA to see the
lines for passing tests too).

Criteria 5 (production tail run) and 6 (azimuthal independence) are
marked slow; together they take a few hours on one core.  Everything
else runs by default, the heaviest piece being the energy-balance
criterion (four runs at N_r = 1000 plus one doubling run).
"""

import time

import numpy as np
import pytest

from hyperwave import chart
from hyperwave import discretization as disc
from hyperwave.analysis import (
    ModeRecorder,
    conjectured_exponents,
    estimate_tail,
    measured_decay_rates,
)
from hyperwave.angular import dealias_cut, from_coeffs, to_coeffs
from hyperwave.chart import FoliationParams
from hyperwave.diagnostics import EnergyMonitor, l2_error
from hyperwave.discretization import FULL3D, SO_REDUCED, build_grid
from hyperwave.evolve import (
    EvolutionConfig,
    Solver,
    exact_linear_state,
    static_initial_data,
)
from hyperwave.exact_solutions import LinearModeSpec, exact_linear_fields, spherical_harmonic


def report(criterion, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] criterion {criterion}: {status} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


# -- criterion 1: stencil exactness ------------------------------------------


def test_criterion_1_stencil_exactness():
    start = time.perf_counter()
    g = build_grid(3, SO_REDUCED, 32, 2)
    num, h = g.num_r, g.h_r
    worst = 0.0
    nodes2 = np.concatenate([[-3 * h / 2, -h / 2], g.r])
    for m in range(5):
        fp = nodes2[:, None] ** m * np.ones(2)
        d1 = disc._d1_padded(fp, h, num)
        d2 = disc._d2_padded(fp, h, num)
        want1 = (m * nodes2[2:] ** max(m - 1, 0))[:, None] * np.ones(2)
        want2 = (m * (m - 1) * nodes2[2:] ** max(m - 2, 0))[:, None] * np.ones(2)
        scale = max(np.max(np.abs(fp)), 1.0) / (12 * h * h) * 214
        worst = max(worst,
                    np.max(np.abs(d1 - want1)) / (100 * np.spacing(scale)),
                    np.max(np.abs(d2 - want2)) / (100 * np.spacing(scale)))
    nodes3 = np.concatenate([[-5 * h / 2, -3 * h / 2, -h / 2], g.r])
    quintic = 1 - nodes3 + nodes3**2 - 2 * nodes3**3 + nodes3**4 + 3 * nodes3**5
    ko = disc._ko_padded(quintic[:, None] * np.ones(2), h, num, 0.2)
    ko_ok = np.max(np.abs(ko)) < 1e-9
    elapsed = time.perf_counter() - start
    ok = worst <= 1.0 and ko_ok and elapsed < 1.0
    report(1, ok, f"monomial error {worst:.3f} x tolerance, "
                  f"KO on quintic {np.max(np.abs(ko)):.1e}, {elapsed:.2f} s")


# -- criterion 2: transforms and eigenvalues ---------------------------------


def test_criterion_2_transforms():
    start = time.perf_counter()
    rng = np.random.default_rng(123)
    worst_rt = 0.0
    # reduced: raw nodal round trip is exact
    for num_theta in (8, 16):
        g = build_grid(3, SO_REDUCED, 16, num_theta)
        u = rng.standard_normal((4, num_theta))
        worst_rt = max(worst_rt, np.max(np.abs(from_coeffs(to_coeffs(u, g), g) - u)))
    # full 3d: round trip from representable coefficients
    for num_theta in (8, 16):
        for num_phi in (8, 16):
            g = build_grid(3, FULL3D, 16, num_theta, num_phi)
            a = (rng.standard_normal((num_theta, num_phi // 2))
                 + 1j * rng.standard_normal((num_theta, num_phi // 2)))
            a[:, 0] = a[:, 0].real
            odd = np.arange(num_phi // 2) % 2 == 1
            a[0, odd] = 0.0
            u = from_coeffs(a, g)
            worst_rt = max(worst_rt, np.max(np.abs(to_coeffs(u, g) - a)))
    # eigenvalues of the angular Laplacian
    from hyperwave.angular import angular_laplacian
    from scipy.special import eval_gegenbauer, eval_legendre

    worst_eig = 0.0
    g3 = build_grid(3, FULL3D, 16, 12, 16)
    th = g3.theta[:, None] * np.ones(16)
    ph = np.ones(12)[:, None] * g3.phi[None, :]
    for ell in range(dealias_cut(12)):
        for m in range(-min(ell, 7), min(ell, 7) + 1):
            y = spherical_harmonic(3, ell, th, m=m, phi=ph)
            lam = -ell * (ell + 1)
            err = np.max(np.abs(angular_laplacian(y, g3) - lam * y))
            worst_eig = max(worst_eig, err / max(abs(lam) * np.max(np.abs(y)), 1.0))
    g5 = build_grid(5, SO_REDUCED, 16, 12)
    x = np.cos(g5.theta)
    for ell in range(dealias_cut(12)):
        y = eval_gegenbauer(ell, 1.5, x) if ell else np.ones(12)
        lam = ell * (2 - 5 - ell)
        err = np.max(np.abs(angular_laplacian(y, g5) - lam * y))
        worst_eig = max(worst_eig, err / max(abs(lam) * np.max(np.abs(y)), 1.0))
    elapsed = time.perf_counter() - start
    ok = worst_rt < 1e-12 and worst_eig < 1e-9 and elapsed < 5.0
    report(2, ok, f"round-trip {worst_rt:.1e} (tol 1e-12), eigenvalue "
                  f"{worst_eig:.1e} (tol 1e-9), {elapsed:.2f} s")


# -- criterion 3: convergence against exact linear solutions -----------------


def _convergence_case(label, symmetry, C, modes, num_theta, num_phi=None):
    fol = FoliationParams(3 if symmetry == FULL3D else 5, C)
    errs = []
    for num_r in (125, 250, 500):
        g = build_grid(fol.n, symmetry, num_r, num_theta, num_phi)
        sol = Solver(EvolutionConfig(fol, g, mu=0))
        st = exact_linear_state(-15.0, g, fol, modes)
        res = sol.run(st, 10.0)
        exact_phi, _ = exact_linear_fields(-15.0 + res.time, g, fol, modes)
        errs.append(l2_error(res.state.phi, exact_phi, g))
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    return errs, orders


def test_criterion_3_convergence():
    start = time.perf_counter()
    _, orders3 = _convergence_case(
        "n3-full", FULL3D, 0.5,
        [LinearModeSpec(1, m=1), LinearModeSpec(2, m=-2)], 4, 12)
    t3 = time.perf_counter() - start
    mid = time.perf_counter()
    _, orders5 = _convergence_case(
        "n5-so", SO_REDUCED, 1.0,
        [LinearModeSpec(1), LinearModeSpec(2)], 8)
    t5 = time.perf_counter() - mid
    ok = all(o >= 3.5 for o in orders3 + orders5)
    report(3, ok, "L2 orders n=3 full 3d "
           f"{orders3[0]:.2f}/{orders3[1]:.2f} ({t3:.0f} s), n=5 reduced "
           f"{orders5[0]:.2f}/{orders5[1]:.2f} ({t5:.0f} s); need >= 3.5")


# -- criterion 4: energy balance ---------------------------------------------


def _balance_run(n, C, p, amp, mu, num_r, t_end=20.0):
    fol = FoliationParams(n, C)
    g = build_grid(n, SO_REDUCED, num_r, 16)
    sol = Solver(EvolutionConfig(fol, g, p=p, mu=mu))
    st = static_initial_data([(2, amp), (3, amp)], 0.3, 0.07, g, fol)
    mon = EnergyMonitor(g, fol, p=p, mu=mu)
    res = sol.run(st, t_end, sinks=[mon])
    assert res.cause == "completed", f"unexpected {res.cause} in balance run"
    recs = mon.records
    resid = max(abs(r.residual) for r in recs) / abs(recs[0].total)
    f = np.array([r.flux_cumulative for r in recs])
    return {
        "resid": resid,
        "e0": recs[0].total,
        "epot_ratio_end": abs(recs[-1].potential / recs[-1].total),
        "flux_monotone": bool(np.all(np.diff(f) <= 1e-14)),
    }


def test_criterion_4_energy_balance():
    cases = {
        ("n3", -1): _balance_run(3, 0.5, 5, 12.0, -1, 1000),
        ("n3", +1): _balance_run(3, 0.5, 5, 12.0, +1, 1000),
        ("n5", -1): _balance_run(5, 1.0, 3, 50.0, -1, 1000),
        ("n5", +1): _balance_run(5, 1.0, 3, 50.0, +1, 1000),
    }
    doubled = _balance_run(3, 0.5, 5, 12.0, -1, 2000)
    worst = max(c["resid"] for c in cases.values())
    ordering = (cases[("n3", +1)]["e0"] > cases[("n3", -1)]["e0"]
                and cases[("n5", +1)]["e0"] > cases[("n5", -1)]["e0"])
    monotone = all(c["flux_monotone"] for c in cases.values())
    ratio_ok = all(c["epot_ratio_end"] < 1e-3 for c in cases.values())
    decreases = doubled["resid"] < cases[("n3", -1)]["resid"]
    ok = worst <= 1e-2 and ordering and monotone and ratio_ok and decreases
    report(4, ok,
           f"max residual {worst:.2e} (tol 1e-2); doubling "
           f"{cases[('n3', -1)]['resid']:.2e} -> {doubled['resid']:.2e}; "
           f"E(+1)>E(-1): {ordering}; flux monotone: {monotone}; "
           f"Epot/E at end < 1e-3: {ratio_ok}")


# -- criteria 5 and 8: tail exponents and radius independence ----------------


def _tail_run(num_r, num_theta, t_end, radii, l_max):
    fol = FoliationParams(3, 0.5)
    g = build_grid(3, SO_REDUCED, num_r, num_theta)
    sol = Solver(EvolutionConfig(fol, g, p=5, mu=-1))
    st = static_initial_data([(2, 12.0), (3, 12.0)], 0.3, 0.07, g, fol)
    rec = ModeRecorder(g, radii, l_max=l_max)
    res = sol.run(st, t_end, sinks=[rec])
    assert res.cause == "completed", f"tail run ended with {res.cause}"
    ests = {}
    for key, s in rec.series.items():
        try:
            ests[key] = estimate_tail(np.array(s.times), np.array(s.values),
                                      window=(t_end / 3.0, t_end))
        except ValueError:
            ests[key] = None
    return g, ests


def test_criterion_5_smoke():
    start = time.perf_counter()
    g, ests = _tail_run(1000, 8, 50.0, [0.5], l_max=1)
    elapsed = time.perf_counter() - start
    r05 = g.r[np.argmin(np.abs(g.r - 0.5))]
    q0 = ests[(float(r05), 0)].q
    ok = abs(q0 - 4.0) <= 0.3 and elapsed <= 900.0
    report("5-smoke", ok, f"q_0 = {q0:.3f} (want 4 +- 0.3) in {elapsed:.0f} s "
                          "(budget 900 s)")


@pytest.mark.slow
def test_criterion_5_full_and_8_radius_independence():
    g, ests = _tail_run(2000, 12, 100.0, [0.5, 0.9, 1.0], l_max=3)

    def q(r_ex, l):
        snapped = float(g.r[np.argmin(np.abs(g.r - r_ex))])
        est = ests.get((snapped, l))
        return None if est is None else est.q

    q0, q2 = q(0.5, 0), q(0.5, 2)
    scri = [q(1.0, l) for l in (0, 1, 2)]
    ok5 = (abs(q0 - 4.0) <= 0.15 and abs(q2 - 6.0) <= 0.2
           and all(s is not None and abs(s - 3.0) <= 0.15 for s in scri))
    report(5, ok5, f"q_0 = {q0:.3f} (4 +- 0.15), q_2 = {q2:.3f} (6 +- 0.2), "
           f"boundary l=0,1,2 = {[None if s is None else round(s, 3) for s in scri]}"
           " (3 +- 0.15)")
    q2_09 = q(0.9, 2)
    ok8 = (abs(q2 - q2_09) <= 0.1
           and abs(q(1.0, 2) - 3.0) <= 0.15
           and abs(q(1.0, 2) - q2) > 1.0)
    report(8, ok8, f"q_2 at 0.5/0.9 = {q2:.3f}/{q2_09:.3f} (within 0.1); "
           f"q_2 at boundary = {q(1.0, 2):.3f} matches the boundary column")


# -- criterion 6: azimuthal independence --------------------------------------


@pytest.mark.slow
def test_criterion_6_m_independence():
    fol = FoliationParams(3, 0.5)
    g = build_grid(3, FULL3D, 1000, 8, 8)
    sol = Solver(EvolutionConfig(fol, g, p=5, mu=-1))
    st = static_initial_data([(2, 1, 6.0), (2, 2, 12.0)], 0.3, 0.07, g, fol)
    rec = ModeRecorder(g, [0.5], l_max=2)
    res = sol.run(st, 40.0, sinks=[rec])
    assert res.cause == "completed"
    r05 = float(g.r[np.argmin(np.abs(g.r - 0.5))])
    qs = {}
    for m in (0, 1, 2):
        s = rec.series[(r05, 2, m)]
        qs[m] = estimate_tail(np.array(s.times), np.array(s.values),
                              window=(40.0 / 3.0, 40.0)).q
    spread = max(qs.values()) - min(qs.values())
    ok = spread <= 0.3
    report(6, ok, "q_2m = " + ", ".join(f"m={m}: {v:.3f}" for m, v in qs.items())
           + f"; spread {spread:.3f} (tol 0.3)")


# -- criterion 7: exponent-table regression -----------------------------------


def test_criterion_7_exponent_table():
    start = time.perf_counter()
    bad = []
    for (n, p) in [(3, 3), (3, 4), (3, 5), (3, 6), (3, 7), (5, 2), (5, 3)]:
        for l in range(4):
            (rf, uf), (rs, us) = measured_decay_rates(n, p, l)
            cf, cs = conjectured_exponents(n, p, l)
            if not uf and cf != rf:
                bad.append((n, p, l, "finite", cf, rf))
            if not us and cs != rs:
                bad.append((n, p, l, "boundary", cs, rs))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 1.0
    report(7, ok, f"all certain reference entries reproduced exactly "
                  f"({elapsed * 1e3:.1f} ms)" if ok else f"mismatches: {bad}")
