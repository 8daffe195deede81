"""Command-line driver: spectrum, evolve, revival, asymptotics and verify scenarios.

Every run writes a ``manifest.json`` next to its CSVs.  The exit status is
0 when every verdict passes, 1 when some verdict fails, 2 for a bad
configuration and 3 for a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (FitDegenerateError, asymptotic_residuals, fit_coefficients,
                          mean_and_A1)
from .core import ConfigError, Grid, InitialDatum, Potential, RationalTime
from .evolution import build_setup, solution
from .io import (ASYMPTOTICS_HEADER, SPECTRUM_HEADER, diagnostics_dict, write_csv,
                 write_decomposition, write_json, write_svg, write_wavefield)
from .ode import Propagator
from .revival import decompose_and_diagnose, revival_component
from .spectrum import (BCS, SpectrumError, count_roots, discriminant, eigenfunctions,
                       eigenvalues, gram_matrix, verify_interlacing)

COMMANDS = ("spectrum", "evolve", "revival", "asymptotics", "verify")
PAPER_SCALE = {"N": 1000, "grid_points": 4000}   # dx = 0.0005*pi

DEFAULT_TOLERANCES = {
    "discriminant": 1e-7,
    "interlacing": 1e-7,
    "gram": 1e-6,
    "unitarity": 1e-9,
    "bessel": 1e-8,
    "slope_target": -3.0,
    "slope_slack": 0.3,
    "fit_constant": 5.0,
    "jump_ratio": 0.05,
    "delta_cells": 20,
    "window_cells": 40,
}

DEFAULT_TIMES = ({"q": 1, "r": 60}, {"q": 1, "r": 30}, {"q": 1, "r": 20}, {"q": 1, "r": 10})


@dataclass
class RunConfig:
    command: str
    potential: dict = field(default_factory=lambda: {"builtin": "section5_potential"})
    initial: dict = field(default_factory=lambda: {"builtin": "section5_sawtooth"})
    N: int = 200
    grid_points: int = 4000
    times: list = field(default_factory=lambda: [dict(t) for t in DEFAULT_TIMES])
    bcs: list = field(default_factory=lambda: list(BCS))
    asymptotic_window: list = field(default_factory=lambda: [10, 100])
    fit_window: list = field(default_factory=lambda: [10, 40])
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: str = "out"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown {self.command!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError("N: must be an integer >= 1")
        if int(self.grid_points) != self.grid_points or self.grid_points < 64:
            raise ConfigError("grid_points: must be an integer >= 64")
        for i, t in enumerate(self.times):
            try:
                parse_time(t)
            except (ConfigError, ValueError, TypeError, ZeroDivisionError) as exc:
                raise ConfigError(f"times[{i}]: {exc}") from None
        for bc in self.bcs:
            if bc not in BCS:
                raise ConfigError(f"bcs: unknown boundary condition {bc!r}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"tolerances: unknown keys {sorted(unknown)}")
        self.potential_obj()
        self.initial_obj()

    def potential_obj(self) -> Potential:
        try:
            return Potential.from_dict(self.potential)
        except ConfigError as exc:
            raise ConfigError(f"potential: {exc}") from None

    def initial_obj(self) -> InitialDatum:
        try:
            return InitialDatum.from_dict(self.initial)
        except ConfigError as exc:
            raise ConfigError(f"initial: {exc}") from None

    def rational_times(self) -> list[RationalTime]:
        return [parse_time(t) for t in self.times]


def parse_time(entry) -> RationalTime:
    """``{"q": 1, "r": 10}`` (t = 2 pi q/r) or ``{"pi": "1/5"}`` (t = pi/5)."""
    if not isinstance(entry, dict):
        raise ConfigError("time entry must be an object")
    if "pi" in entry:
        return RationalTime.from_pi_multiple(Fraction(str(entry["pi"])))
    if "q" in entry and "r" in entry:
        q, r = entry["q"], entry["r"]
        if not (isinstance(q, int) and isinstance(r, int)):
            raise ConfigError("q and r must be integers")
        return RationalTime(q, r)
    raise ConfigError("time entry needs {q, r} or {pi}")


def load_config(command: str, path: str | None, overrides: dict) -> RunConfig:
    data = {}
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
    known = set(RunConfig.__dataclass_fields__) - {"command"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(data.pop("tolerances", {}))
    cfg = RunConfig(command=command, tolerances=tol, **data)
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    cfg.validate()
    return cfg


# verdicts ---------------------------------------------------------------------


class Verdicts:
    def __init__(self):
        self.items: list[dict] = []

    def add(self, name: str, passed: bool, value, tolerance, detail: str = "") -> None:
        if isinstance(value, (bool, np.bool_)):
            v = bool(value)
        elif isinstance(value, (int, np.integer)):
            v = int(value)
        elif isinstance(value, (float, np.floating)):
            v = float(value)
        else:
            v = value
        self.items.append({"name": name, "passed": bool(passed), "value": v,
                           "tolerance": tolerance, "detail": detail})

    @property
    def passed(self) -> bool:
        return all(v["passed"] for v in self.items)


def expected_roots(bc: str, n: int) -> int:
    if bc == "periodic":
        return 0 if n == 0 else 2 * ((n + 1) // 2)
    if bc == "semiperiodic":
        return 2 * (n // 2) + 1
    return n


def boundary_residual(V: Potential, bc: str, lam: float) -> float:
    if bc == "dirichlet":
        return abs(Propagator(V, lam, dense=False).monodromy[0, 1])
    target = 2.0 if bc == "periodic" else -2.0
    return abs(discriminant(V, lam) - target)


# commands ---------------------------------------------------------------------


def _spectrum(cfg, out, verdicts, n_count=None, root_limit=None):
    V = cfg.potential_obj()
    tol = cfg.tolerances
    n = n_count or cfg.N
    grid = Grid(cfg.grid_points)
    tables, rows = {}, []
    for bc in cfg.bcs:
        table = eigenvalues(V, bc, n)
        tables[bc] = table
        resid = [boundary_residual(V, bc, lam) for lam in table.values]
        eigs = eigenfunctions(V, table, grid)
        counts, ok_roots = [], True
        for i, ep in enumerate(eigs):
            if root_limit is not None and i >= root_limit[bc]:
                counts.append("")
                continue
            try:
                c = count_roots(ep)
            except SpectrumError:
                c, ok_roots = -1, False
            counts.append(c)
            if c != expected_roots(bc, i):
                ok_roots = False
        rows.extend(zip([bc] * n, range(n), table.values, table.multiplicity, resid, counts))
        verdicts.add(f"boundary_residual[{bc}]", max(resid) <= tol["discriminant"], max(resid),
                     tol["discriminant"])
        verdicts.add(f"root_count[{bc}]", ok_roots, sum(c == expected_roots(bc, i)
                                                        for i, c in enumerate(counts) if c != ""),
                     "exact", "matches the oscillation theorems")
        if bc == "periodic":
            k = min(30, len(eigs))
            G = gram_matrix(eigs[:k])
            defect = float(np.max(np.abs(G - np.eye(k))))
            verdicts.add("orthonormality[periodic]", defect <= tol["gram"], defect, tol["gram"])
    write_csv(out / "spectrum.csv", SPECTRUM_HEADER,
              ([bc, i, lam, int(m), r, c] for bc, i, lam, m, r, c in rows))
    if set(BCS) <= set(tables):
        rep = verify_interlacing(tables["periodic"], tables["semiperiodic"], tables["dirichlet"],
                                 tol=tol["interlacing"])
        worst = min((c.residual for c in rep.checks), default=0.0)
        verdicts.add("interlacing", rep.passed, worst, tol["interlacing"],
                     f"{len(rep.failures())} of {len(rep.checks)} inequalities violated")
    return ["spectrum.csv"]


def _setup(cfg):
    V = cfg.potential_obj()
    f = cfg.initial_obj()
    return V, f, build_setup(V, f, cfg.N, Grid(cfg.grid_points))


def _tag(t: RationalTime) -> str:
    return f"q{t.q}_r{t.r}"


def _evolve(cfg, out, verdicts):
    V, f, setup = _setup(cfg)
    tol = cfg.tolerances
    gap = setup.coeffs.bessel_gap()
    verdicts.add("bessel", gap >= -tol["bessel"], gap, tol["bessel"])
    n0 = setup.l2_norm(0.0)
    files = []
    worst = 0.0
    for t in cfg.rational_times():
        u = solution(setup, t.value)
        name = f"wavefield_{_tag(t)}.csv"
        write_wavefield(out / name, u, setup.N, V.fingerprint())
        files.append(name)
        worst = max(worst, abs(setup.l2_norm(t.value) - n0))
    verdicts.add("unitarity", worst <= tol["unitarity"], worst, tol["unitarity"])
    return files


def _revival(cfg, out, verdicts, setup_bundle=None):
    V, f, setup = setup_bundle or _setup(cfg)
    tol = cfg.tolerances
    grid = setup.grid
    f_jumps = [x for x, _ in f.jumps()]
    v_breaks = [x for x, _ in V.jumps()]
    files = []
    for t in cfg.rational_times():
        u = solution(setup, t.value)
        psi = revival_component(f, t, V.mean(), grid)
        dec = decompose_and_diagnose(u, psi, f_jumps, t, v_breaks,
                                     int(tol["delta_cells"]), int(tol["window_cells"]))
        tag = _tag(t)
        write_decomposition(out / f"decomposition_{tag}.csv", dec)
        write_json(out / f"diagnostics_{tag}.json", diagnostics_dict(dec, setup.N))
        write_svg(out / f"decomposition_{tag}.svg", grid.nodes,
                  {"re u": dec.u.samples.real, "im u": dec.u.samples.imag,
                   "re w": dec.w.samples.real, "im w": dec.w.samples.imag},
                  title=f"t = {t.pi_multiple} pi, N = {setup.N}")
        files += [f"decomposition_{tag}.csv", f"diagnostics_{tag}.json", f"decomposition_{tag}.svg"]
        exact = float(np.max(np.abs(dec.w.samples - (dec.u.samples - dec.psi_rev.samples))))
        verdicts.add(f"reconstruction[{tag}]", exact == 0.0, exact, 0.0, "w = u - psi_rev")
        verdicts.add(f"jump_ratio[{tag}]", dec.passes(tol["jump_ratio"]), dec.ratio,
                     tol["jump_ratio"], f"max|jump u| = {dec.max_jump_u:.4g}")
    return files


def _asymptotics(cfg, out, verdicts):
    V = cfg.potential_obj().mean_removed()
    tol = cfg.tolerances
    _, A1 = mean_and_A1(V)
    table = eigenvalues(V, "periodic", cfg.N + 1)
    rep = asymptotic_residuals(table, A1)
    eigs = eigenfunctions(V, table, Grid(cfg.grid_points))
    lo_w, hi_w = cfg.asymptotic_window
    f_lo, f_hi = cfg.fit_window
    rows, fits_ok, n_fits = [], True, 0
    for i, m in enumerate(rep.m.astype(int)):
        try:
            fit = fit_coefficients((eigs[2 * m - 1], eigs[2 * m]), m)
            extra = [*[fit.alpha[0], fit.beta[0], fit.alpha[1], fit.beta[1]], fit.y_m]
        except FitDegenerateError:
            fit, extra = None, [math.nan] * 5
        if f_lo <= m <= f_hi:
            n_fits += 1
            bound = tol["fit_constant"] / m
            if fit is None or max(fit.norm_defect) > bound or fit.angle_offset > bound:
                fits_ok = False
        rows.append([m, rep.lam_lo[i], rep.lam_hi[i], rep.model[i], rep.resid_lo[i],
                     rep.resid_hi[i], rep.scaled_lo[i], rep.scaled_hi[i], *extra])
    write_csv(out / "asymptotics.csv", ASYMPTOTICS_HEADER, rows)
    slope = rep.loglog_slope(lo_w, hi_w)
    limit = tol["slope_target"] + tol["slope_slack"]
    verdicts.add("asymptotic_slope", slope <= limit, slope, limit,
                 f"max scaled residual {rep.max_scaled(lo_w, hi_w):.4g} on m in [{lo_w}, {hi_w}]")
    verdicts.add("coefficient_fits", fits_ok and n_fits > 0, n_fits, f"{tol['fit_constant']}/m")
    return ["asymptotics.csv"]


def _verify(cfg, out, verdicts):
    files = _spectrum(cfg, out, verdicts, n_count=20,
                      root_limit={"periodic": 9, "semiperiodic": 10, "dirichlet": 11})
    files += _asymptotics(cfg, out, verdicts)
    files += _revival(cfg, out, verdicts)
    return files


RUNNERS = {"spectrum": _spectrum, "evolve": _evolve, "revival": _revival,
           "asymptotics": _asymptotics, "verify": _verify}


def execute(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    verdicts = Verdicts()
    start = time.perf_counter()
    files = RUNNERS[cfg.command](cfg, out, verdicts)
    wall = time.perf_counter() - start
    write_json(out / "manifest.json", {
        "command": cfg.command,
        "config": asdict(cfg),
        "version": __version__,
        "wall_time_s": wall,
        "tolerances": cfg.tolerances,
        "verdicts": verdicts.items,
        "all_passed": verdicts.passed,
        "files": files,
    })
    for v in verdicts.items:
        mark = "PASS" if v["passed"] else "FAIL"
        print(f"{mark}  {v['name']}: {v['value']} (tol {v['tolerance']})")
    return 0 if verdicts.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="periodic-revival", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--n-eigs", type=int, help="truncation / spectrum size N")
        p.add_argument("--grid-points", type=int, help="number of grid nodes")
        p.add_argument("--paper-scale", action="store_true",
                       help="N = 1000 and dx = 0.0005*pi")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"out": args.out, "N": args.n_eigs, "grid_points": args.grid_points}
    if args.paper_scale:
        overrides.update(PAPER_SCALE)
    try:
        cfg = load_config(args.command, args.config, overrides)
    except (ConfigError, OSError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return execute(cfg)
    except (SpectrumError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
