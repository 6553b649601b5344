"""Run driver: configuration files, output formats, experiment harnesses.

Configs are UTF-8 key = value lines with '#' comments.  Keys:

    n, symmetry (so | full), C (0 means the default C = n), p, mu,
    N_r, N_theta, N_phi, eps, lambda, t_end, cadence,
    id.kind (static | exact-linear), id.modes ("l,m,A" triples separated
    by ';', with m = _ under reduced symmetry), id.r0, id.sigma,
    id.t0 (exact-linear start time), extract.radii, out.dir, precision
    (double | extended)

Unknown keys are errors, never ignored.  Every output file starts with
a comment block echoing the full parsed configuration (reproducibility)
followed by a header row naming the columns; floats are printed with 17
significant digits.  Snapshots are flat binary: a 64-byte ASCII header
("HYPW1" magic, dimensions, symmetry, grid sizes, time) followed by the
field values as 64-bit little-endian reals in row-major (i, j, k) order.

Exit codes: 0 success, 2 configuration error, 3 run terminated by
blow-up, 4 numerical failure (NaN outside the blow-up detector).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import (
    ModeRecorder,
    estimate_tail,
    local_power_index,
    tail_report,
)
from .chart import FoliationParams, critical_exponents
from .diagnostics import EnergyMonitor, l2_error
from .discretization import FULL3D, SO_REDUCED, build_grid
from .errors import ConfigError
from .evolve import (
    EvolutionConfig,
    Solver,
    exact_linear_state,
    static_initial_data,
)
from .exact_solutions import LinearModeSpec, exact_linear_fields

__all__ = [
    "RunConfig",
    "parse_config",
    "render_config",
    "build_setup",
    "write_snapshot",
    "read_snapshot",
    "cmd_evolve",
    "cmd_converge",
    "cmd_energy_balance",
    "cmd_tails",
    "main",
]

_KEYS = {
    "n", "symmetry", "C", "p", "mu", "N_r", "N_theta", "N_phi", "eps",
    "lambda", "t_end", "cadence", "id.kind", "id.modes", "id.r0",
    "id.sigma", "id.t0", "extract.radii", "out.dir", "precision",
}

SNAPSHOT_MAGIC = "HYPW1"
_FLOAT_FMT = "%.17g"


@dataclass
class RunConfig:
    n: int = 3
    symmetry: str = SO_REDUCED
    C: float = 0.0  # 0 -> default C = n
    p: object = None
    mu: int = 0
    num_r: int = 200
    num_theta: int = 8
    num_phi: int | None = None
    eps: float = 0.2
    cfl: float = 0.8
    t_end: float = 10.0
    cadence: int = 50
    id_kind: str = "static"
    id_modes: tuple = ((2, None, 1.0),)
    id_r0: float = 0.3
    id_sigma: float = 0.07
    id_t0: float = -15.0
    extract_radii: tuple = (0.5, 1.0)
    out_dir: str = "out"
    precision: str = "double"
    blowup_threshold: float = 1e6


def _parse_p(text: str):
    if "/" in text:
        return Fraction(text)
    val = float(text)
    return int(val) if val == int(val) else val


def _parse_modes(text: str) -> tuple:
    modes = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = [b.strip() for b in part.split(",")]
        if len(bits) != 3:
            raise ConfigError(f"mode triple must be 'l,m,A', got {part!r}")
        l = int(bits[0])
        m = None if bits[1] == "_" else int(bits[1])
        modes.append((l, m, float(bits[2])))
    return tuple(modes)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a configuration file."""
    cfg = RunConfig()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        seen.add(key)
        if key == "n":
            cfg.n = int(value)
        elif key == "symmetry":
            if value not in (SO_REDUCED, FULL3D):
                raise ConfigError(f"symmetry must be 'so' or 'full', got {value!r}")
            cfg.symmetry = value
        elif key == "C":
            cfg.C = float(value)
        elif key == "p":
            cfg.p = _parse_p(value)
        elif key == "mu":
            cfg.mu = int(value)
        elif key == "N_r":
            cfg.num_r = int(value)
        elif key == "N_theta":
            cfg.num_theta = int(value)
        elif key == "N_phi":
            cfg.num_phi = int(value)
        elif key == "eps":
            cfg.eps = float(value)
        elif key == "lambda":
            cfg.cfl = float(value)
        elif key == "t_end":
            cfg.t_end = float(value)
        elif key == "cadence":
            cfg.cadence = int(value)
        elif key == "id.kind":
            if value not in ("static", "exact-linear"):
                raise ConfigError(f"id.kind must be static or exact-linear, got {value!r}")
            cfg.id_kind = value
        elif key == "id.modes":
            cfg.id_modes = _parse_modes(value)
        elif key == "id.r0":
            cfg.id_r0 = float(value)
        elif key == "id.sigma":
            cfg.id_sigma = float(value)
        elif key == "id.t0":
            cfg.id_t0 = float(value)
        elif key == "extract.radii":
            cfg.extract_radii = tuple(float(s) for s in value.split(",") if s.strip())
        elif key == "out.dir":
            cfg.out_dir = value
        elif key == "precision":
            if value not in ("double", "extended"):
                raise ConfigError(f"precision must be double or extended, got {value!r}")
            cfg.precision = value
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig):
    if cfg.mu not in (-1, 0, 1):
        raise ConfigError("mu must be -1, 0 or +1")
    if cfg.mu != 0:
        if cfg.p is None:
            raise ConfigError("missing key 'p' (required when mu != 0)")
        exps = critical_exponents(cfg.n)
        if Fraction(cfg.p) < exps.p_conf:
            raise ConfigError(
                f"p = {cfg.p} below the conformal bound {exps.p_conf} for n = {cfg.n}")
    if cfg.symmetry == FULL3D:
        if cfg.n != 3:
            raise ConfigError("full symmetry requires n = 3")
        if cfg.num_phi is None or cfg.num_phi % 2:
            raise ConfigError("full symmetry requires an even N_phi")
    for l, m, _ in cfg.id_modes:
        if cfg.symmetry == FULL3D and m is None:
            raise ConfigError("full-symmetry modes need an azimuthal index m")


def render_config(cfg: RunConfig) -> str:
    """Inverse of parse_config (parse(render(c)) == c)."""
    lines = [
        f"n = {cfg.n}",
        f"symmetry = {cfg.symmetry}",
        "C = " + _FLOAT_FMT % cfg.C,
        f"mu = {cfg.mu}",
        f"N_r = {cfg.num_r}",
        f"N_theta = {cfg.num_theta}",
    ]
    if cfg.p is not None:
        lines.insert(2, f"p = {cfg.p}")
    if cfg.num_phi is not None:
        lines.append(f"N_phi = {cfg.num_phi}")
    modes = ";".join(
        f"{l},{'_' if m is None else m}," + _FLOAT_FMT % a
        for l, m, a in cfg.id_modes)
    lines += [
        "eps = " + _FLOAT_FMT % cfg.eps,
        "lambda = " + _FLOAT_FMT % cfg.cfl,
        "t_end = " + _FLOAT_FMT % cfg.t_end,
        f"cadence = {cfg.cadence}",
        f"id.kind = {cfg.id_kind}",
        f"id.modes = {modes}",
        "id.r0 = " + _FLOAT_FMT % cfg.id_r0,
        "id.sigma = " + _FLOAT_FMT % cfg.id_sigma,
        "id.t0 = " + _FLOAT_FMT % cfg.id_t0,
        "extract.radii = " + ",".join(_FLOAT_FMT % r for r in cfg.extract_radii),
        f"out.dir = {cfg.out_dir}",
        f"precision = {cfg.precision}",
    ]
    return "\n".join(lines) + "\n"


# -- building runs ----------------------------------------------------------

def build_setup(cfg: RunConfig):
    """Foliation, grid, solver and initial state for a parsed config."""
    foliation = FoliationParams(cfg.n, cfg.C)
    dtype = np.longdouble if cfg.precision == "extended" else np.float64
    grid = build_grid(cfg.n, cfg.symmetry, cfg.num_r, cfg.num_theta,
                      cfg.num_phi, dtype=dtype)
    evo = EvolutionConfig(foliation, grid, p=cfg.p, mu=cfg.mu, eps=cfg.eps,
                          cfl=cfg.cfl, cadence=cfg.cadence,
                          blowup_threshold=cfg.blowup_threshold)
    solver = Solver(evo)
    if cfg.id_kind == "static":
        if cfg.symmetry == FULL3D:
            modes = [(l, m, a) for l, m, a in cfg.id_modes]
        else:
            modes = [(l, a) for l, _, a in cfg.id_modes]
        initial = static_initial_data(modes, cfg.id_r0, cfg.id_sigma,
                                      grid, foliation)
    else:
        specs = [LinearModeSpec(l, m=m, amplitude=a) for l, m, a in cfg.id_modes]
        initial = exact_linear_state(cfg.id_t0, grid, foliation, specs)
    return foliation, grid, solver, initial


# -- output formats ---------------------------------------------------------

def _config_comment(cfg: RunConfig) -> str:
    return "".join(f"# {line}\n" for line in render_config(cfg).splitlines())


def _fmt(x) -> str:
    return _FLOAT_FMT % x


def write_table(path, cfg: RunConfig, columns, rows):
    """CSV with the config echoed in a leading comment block."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(_config_comment(cfg))
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v)
                              for v in row) + "\n")


def write_snapshot(path, values: np.ndarray, grid, t: float):
    header = " ".join([
        SNAPSHOT_MAGIC, str(grid.n), grid.symmetry, str(grid.num_r),
        str(grid.num_theta), str(grid.num_phi or 0), _FLOAT_FMT % t,
    ]).encode("ascii")
    if len(header) > 64:
        raise ValueError("snapshot header exceeds 64 bytes")
    header = header.ljust(64)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def read_snapshot(path):
    """Returns (values, meta) with meta keys n, symmetry, num_r,
    num_theta, num_phi, time."""
    with open(path, "rb") as fh:
        header = fh.read(64).decode("ascii").split()
        if header[0] != SNAPSHOT_MAGIC:
            raise ValueError(f"not a snapshot file: bad magic {header[0]!r}")
        meta = {
            "n": int(header[1]),
            "symmetry": header[2],
            "num_r": int(header[3]),
            "num_theta": int(header[4]),
            "num_phi": int(header[5]),
            "time": float(header[6]),
        }
        data = np.frombuffer(fh.read(), dtype="<f8")
    shape = (meta["num_r"], meta["num_theta"])
    if meta["num_phi"]:
        shape += (meta["num_phi"],)
    return data.reshape(shape), meta


def _mode_column(series) -> str:
    m = "" if series.m is None else f"m{series.m}"
    return f"phi_l{series.l}{m}_r{series.r_extract:g}"


# -- commands ---------------------------------------------------------------

def cmd_evolve(cfg: RunConfig, out_dir=None):
    """Evolve one configuration, writing the diagnostic time series and
    final-state snapshots."""
    out = Path(out_dir or cfg.out_dir)
    foliation, grid, solver, initial = build_setup(cfg)
    monitor = EnergyMonitor(grid, foliation, p=cfg.p, mu=cfg.mu)
    recorder = ModeRecorder(grid, cfg.extract_radii)
    result = solver.run(initial, cfg.t_end, sinks=[monitor, recorder])
    columns = ["t", "E", "Epot", "dFdt", "Fcum", "residual"]
    ordered = sorted(recorder.series.values(), key=lambda s: (s.r_extract, s.l, s.m or 0))
    columns += [_mode_column(s) for s in ordered]
    rows = []
    for i, rec in enumerate(monitor.records):
        row = [rec.time, rec.total, rec.potential, rec.flux_rate,
               rec.flux_cumulative, rec.residual]
        row += [s.values[i] for s in ordered]
        rows.append(row)
    write_table(out / "series.csv", cfg, columns, rows)
    write_snapshot(out / "phi_final.bin", result.state.phi, grid, result.time)
    write_snapshot(out / "pi_final.bin", result.state.pi, grid, result.time)
    return result


def cmd_converge(cfg: RunConfig, resolutions, out_dir=None):
    """Evolve the same data at several radial resolutions against the
    exact linear solution; tabulate errors and observed orders."""
    if cfg.mu != 0:
        raise ConfigError("the convergence harness runs the linear equation (mu = 0)")
    if cfg.id_kind != "exact-linear":
        raise ConfigError("the convergence harness needs exact-linear initial data")
    out = Path(out_dir or cfg.out_dir)
    errors = []
    for num_r in resolutions:
        sub = replace(cfg, num_r=int(num_r))
        foliation, grid, solver, initial = build_setup(sub)
        result = solver.run(initial, sub.t_end)
        specs = [LinearModeSpec(l, m=m, amplitude=a) for l, m, a in sub.id_modes]
        exact_phi, _ = exact_linear_fields(sub.id_t0 + result.time, grid,
                                           foliation, specs)
        errors.append(l2_error(result.state.phi, exact_phi, grid))
    rows = []
    for i, num_r in enumerate(resolutions):
        order = np.log2(errors[i - 1] / errors[i]) if i else float("nan")
        rows.append([float(num_r), errors[i], order])
    write_table(out / "convergence.csv", cfg,
                ["N_r", "l2_error", "observed_order"], rows)
    return [(int(r), e) for r, e in zip(resolutions, errors)]


def cmd_energy_balance(cfg: RunConfig, out_dir=None):
    """Evolve and record the energy balance; returns the worst relative
    residual |E(t) - F(0,t) - E(0)| / |E(0)|."""
    out = Path(out_dir or cfg.out_dir)
    foliation, grid, solver, initial = build_setup(cfg)
    monitor = EnergyMonitor(grid, foliation, p=cfg.p, mu=cfg.mu)
    result = solver.run(initial, cfg.t_end, sinks=[monitor])
    rows = [[r.time, r.total, r.potential, r.flux_rate, r.flux_cumulative,
             r.residual] for r in monitor.records]
    write_table(out / "energy.csv", cfg,
                ["t", "E", "Epot", "dFdt", "Fcum", "residual"], rows)
    e0 = abs(monitor.records[0].total)
    worst = max(abs(r.residual) for r in monitor.records) / e0
    return result, worst, monitor


def cmd_tails(cfg: RunConfig, out_dir=None):
    """Evolve, extract mode time series, and report decay exponents."""
    out = Path(out_dir or cfg.out_dir)
    foliation, grid, solver, initial = build_setup(cfg)
    recorder = ModeRecorder(grid, cfg.extract_radii)
    result = solver.run(initial, cfg.t_end, sinks=[recorder])
    estimates = {}
    for key, series in recorder.series.items():
        t = np.asarray(series.times)
        v = np.asarray(series.values)
        lpi_t, lpi_q = local_power_index(t, v)
        try:
            estimates[key] = estimate_tail(t, v, window=(cfg.t_end / 3.0, cfg.t_end))
        except ValueError:
            estimates[key] = None
        rows = [[series.times[i], series.values[i]] for i in range(len(series.times))]
        write_table(out / f"mode_{series.label}.csv", cfg,
                    ["t", "amplitude"], rows)
        if lpi_t.size:
            write_table(out / f"lpi_{series.label}.csv", cfg,
                        ["t", "q"], list(zip(lpi_t, lpi_q)))
    # one report row per mode: innermost finite radius and the boundary
    finite_radii = sorted(r for r in {k[0] for k in recorder.series} if r < 1.0)
    measurements = []
    mode_keys = sorted({k[1:] for k in recorder.series})
    for mk in mode_keys:
        l = mk[0]
        meas = {"n": cfg.n, "p": cfg.p, "mu": cfg.mu, "l": l}
        if finite_radii:
            est = estimates.get((finite_radii[0],) + mk)
            if est is not None:
                meas["q_finite"] = est
        est_scri = estimates.get((1.0,) + mk)
        if est_scri is not None:
            meas["q_scri"] = est_scri
        measurements.append(meas)
    rows = tail_report(measurements) if cfg.n in (3, 5) else []
    table = []
    for row in rows:
        table.append([
            float(row.n), float(row.p), float(row.mu), float(row.l),
            "" if row.q_finite is None else _fmt(row.q_finite),
            "" if row.q_scri is None else _fmt(row.q_scri),
            float(row.conjecture_finite), float(row.conjecture_scri),
            "" if row.reference_finite is None else
            (f"{row.reference_finite}?" if row.reference_finite_uncertain
             else str(row.reference_finite)),
            "" if row.reference_scri is None else
            (f"{row.reference_scri}?" if row.reference_scri_uncertain
             else str(row.reference_scri)),
            str(row.finite_agrees), str(row.scri_agrees),
        ])
    write_table(out / "tail_report.csv", cfg,
                ["n", "p", "mu", "l", "q_finite", "q_scri",
                 "conjecture_finite", "conjecture_scri", "reference_finite",
                 "reference_scri", "finite_agrees", "scri_agrees"], table)
    return result, estimates, rows


# -- entry point -------------------------------------------------------------

def _load(args) -> RunConfig:
    text = Path(args.config).read_text()
    return parse_config(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hyperwave",
        description="Nonlinear wave equations on hyperboloidal slices")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("evolve", "converge", "energy-balance", "tails"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key = value config file")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--deterministic", action="store_true",
                       help="pin reduction order (single-threaded transforms; "
                            "this is also the default)")
    sub.choices["converge"].add_argument(
        "--resolutions", default="125,250,500",
        help="comma-separated radial resolutions")
    args = parser.parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "evolve":
            result = cmd_evolve(cfg, args.out)
        elif args.command == "converge":
            res = [int(s) for s in args.resolutions.split(",")]
            pairs = cmd_converge(cfg, res, args.out)
            for (num_r, err) in pairs:
                print(f"N_r = {num_r}: L2 error {err:.6e}")
            return 0
        elif args.command == "energy-balance":
            result, worst, _ = cmd_energy_balance(cfg, args.out)
            print(f"max |E - F - E0| / |E0| = {worst:.6e}")
        else:
            result, estimates, rows = cmd_tails(cfg, args.out)
            for row in rows:
                print(f"l={row.l}: q_finite={row.q_finite} q_scri={row.q_scri} "
                      f"(conjectured {row.conjecture_finite}|{row.conjecture_scri})")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if result.cause == "blowup":
        print(f"run terminated by blow-up at t = {result.time:.6g} "
              f"after {result.steps} steps", file=sys.stderr)
        return 3
    if result.cause == "nan":
        print(f"numerical failure (NaN) at t = {result.time:.6g}", file=sys.stderr)
        return 4
    print(f"completed at t = {result.time:.6g} after {result.steps} steps "
          f"in {result.wall_time:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
