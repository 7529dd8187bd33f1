"""Command-line front end.

    qwi scatter --potential P --energy E
    qwi sweep --potential P --emin A --emax B --steps N
    qwi bound --potential P
    qwi wavefunction --potential P --xmin A --xmax B --samples N [--energy E | --index I]
    qwi validate --potential P --energy E

Exit codes: 0 success, 1 usage/input error, 2 physics/domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .impedance import ResonantDeltaPrimeError
from .oracle import oracle_bound_states, oracle_scatter, relative_deviation
from .potential import PotentialError, PotentialSpec, parse_potential_file
from .scattering import NoPropagatingChannel, solve, sweep
from .spectrum import BelowFloorError, asymptote_floor, find_bound_states
from .wavefunction import bound_state_wavefunction, scattering_wavefunction

SCATTER_COLUMNS = ["E", "re_r", "im_r", "re_t", "im_t", "R", "T", "unitarity_defect"]
BOUND_COLUMNS = ["index", "E", "kappa_left", "kappa_right"]
WAVE_COLUMNS = ["x", "re_psi", "im_psi", "abs2_psi"]
VALIDATE_COLUMNS = ["quantity", "side", "engine", "oracle", "rel_dev"]


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    potential_path: str
    energy: float | None = None
    e_min: float | None = None
    e_max: float | None = None
    steps: int = 101
    x_min: float | None = None
    x_max: float | None = None
    samples: int = 1001
    tolerance: float | None = None
    index: int = 0
    output_format: str = "csv"
    incident_side: str = "left"
    out: str | None = None

    def check(self) -> None:
        need = {
            "scatter": ["energy"],
            "sweep": ["e_min", "e_max"],
            "validate": ["energy"],
            "wavefunction": ["x_min", "x_max"],
            "bound": [],
        }[self.command]
        for name in need:
            if getattr(self, name) is None:
                raise UsageError(f"{self.command} requires --{name.replace('_', '')}")
        if self.steps < 1:
            raise UsageError("--steps must be >= 1")
        if self.samples < 2:
            raise UsageError("--samples must be >= 2")
        if self.tolerance is not None and not self.tolerance > 0:
            raise UsageError("--tol must be positive")
        if self.command == "sweep":
            if not self.e_min > 0:
                raise UsageError("--emin must be positive")
            if self.steps > 1 and not self.e_min < self.e_max:
                raise UsageError("--emin must be below --emax")
        if self.command == "wavefunction" and not self.x_min < self.x_max:
            raise UsageError("--xmin must be below --xmax")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _scatter_row(E, res) -> list:
    return [E, res.r.real, res.r.imag, res.t.real, res.t.imag, res.R, res.T, res.unitarity_defect]


def _emit(columns, rows, cfg: RunConfig, stream) -> None:
    if cfg.output_format == "json":
        payload = {
            "input": {k: v for k, v in vars(cfg).items() if k != "out"},
            "rows": [dict(zip(columns, [_json_value(v) for v in row])) for row in rows],
        }
        stream.write(json.dumps(payload, indent=2) + "\n")
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def _json_value(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, str):
        return v
    return float(v)


def _load(cfg: RunConfig) -> PotentialSpec:
    try:
        text = Path(cfg.potential_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read potential file: {exc}") from None
    try:
        return parse_potential_file(text)
    except PotentialError as exc:
        raise UsageError(f"{cfg.potential_path}: {exc}") from None


def _validate_rows(spec: PotentialSpec, cfg: RunConfig) -> tuple[list, float]:
    rows, worst = [], 0.0
    for side in ("left", "right"):
        try:
            eng = solve(spec, cfg.energy, side)
        except NoPropagatingChannel:
            continue
        orc = oracle_scatter(spec, cfg.energy, side)
        dev = relative_deviation(eng, orc)
        worst = max(worst, dev, abs(eng.unitarity_defect), abs(orc.unitarity_defect))
        rows.append(["amplitudes", side, eng.T, orc.T, dev])
    if not rows:
        raise DomainError(f"E = {cfg.energy} is below both asymptotes")
    eng_b = find_bound_states(spec)
    orc_b = oracle_bound_states(spec)
    if len(eng_b) != len(orc_b):
        worst = float("inf")
        rows.append(["bound_state_count", "-", len(eng_b), len(orc_b), float("inf")])
    for a, b in zip(eng_b, orc_b):
        dev = abs(a.energy - b.energy) / max(1.0, abs(b.energy))
        worst = max(worst, dev)
        rows.append([f"bound_energy_{a.label}", "-", a.energy, b.energy, dev])
    return rows, worst


def run(cfg: RunConfig, stream=None, err=None) -> int:
    """Execute one command; returns the process exit code."""
    stream = stream or sys.stdout
    err = err or sys.stderr
    buf = io.StringIO()
    try:
        cfg.check()
        spec = _load(cfg)
        code = 0
        side = cfg.incident_side
        if cfg.command == "scatter":
            _emit(SCATTER_COLUMNS, [_scatter_row(cfg.energy, solve(spec, cfg.energy, side))], cfg, buf)
        elif cfg.command == "sweep":
            rows = sweep(spec, cfg.e_min, cfg.e_max, cfg.steps, side)
            _emit(SCATTER_COLUMNS, [_scatter_row(E, r) for E, r in rows], cfg, buf)
        elif cfg.command == "bound":
            kw = {} if cfg.tolerance is None else {"tol": cfg.tolerance}
            states = find_bound_states(spec, **kw)
            _emit(BOUND_COLUMNS, [[s.label, s.energy, s.kappa_left, s.kappa_right] for s in states], cfg, buf)
        elif cfg.command == "wavefunction":
            grid = np.linspace(cfg.x_min, cfg.x_max, cfg.samples)
            bounds = spec.boundaries
            if bounds and (grid[0] > bounds[0] or grid[-1] < bounds[-1]):
                raise UsageError("sampling window must contain every boundary of the potential")
            if cfg.energy is not None and cfg.energy > asymptote_floor(spec):
                wf = scattering_wavefunction(spec, cfg.energy, grid, side)
            else:
                states = find_bound_states(spec)
                if not states:
                    raise DomainError("potential has no bound states")
                if cfg.energy is not None:
                    state = min(states, key=lambda s: abs(s.energy - cfg.energy))
                elif 0 <= cfg.index < len(states):
                    state = states[cfg.index]
                else:
                    raise DomainError(f"no bound state with index {cfg.index} ({len(states)} found)")
                wf = bound_state_wavefunction(spec, state.energy, grid)
            rows = [[x, p.real, p.imag, abs(p) ** 2] for x, p in zip(wf.xs, wf.psi)]
            _emit(WAVE_COLUMNS, rows, cfg, buf)
        elif cfg.command == "validate":
            tol = cfg.tolerance if cfg.tolerance is not None else 1e-9
            rows, worst = _validate_rows(spec, cfg)
            _emit(VALIDATE_COLUMNS, rows, cfg, buf)
            err.write(f"max relative deviation {worst:.3e} (tolerance {tol:.1e})\n")
            code = 0 if worst <= tol else 2
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except (DomainError, NoPropagatingChannel, BelowFloorError, ResonantDeltaPrimeError) as exc:
        err.write(f"error: {exc}\n")
        return 2

    if cfg.out:
        Path(cfg.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        stream.write(buf.getvalue())
    return code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwi", description="1D scattering and bound states by quantum wave impedance")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("scatter", "sweep", "bound", "wavefunction", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--potential", required=True, dest="potential_path")
        p.add_argument("--energy", type=float)
        p.add_argument("--emin", type=float, dest="e_min")
        p.add_argument("--emax", type=float, dest="e_max")
        p.add_argument("--steps", type=int, default=101)
        p.add_argument("--xmin", type=float, dest="x_min")
        p.add_argument("--xmax", type=float, dest="x_max")
        p.add_argument("--samples", type=int, default=1001)
        p.add_argument("--index", type=int, default=0, help="bound state index for wavefunction")
        p.add_argument("--tol", type=float, dest="tolerance")
        p.add_argument("--side", choices=["left", "right"], default="left", dest="incident_side")
        p.add_argument("--format", choices=["csv", "json"], default="csv", dest="output_format")
        p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(RunConfig(**vars(args)))


if __name__ == "__main__":
    sys.exit(main())
