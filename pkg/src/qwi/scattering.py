"""Scattering amplitudes from the impedance recursion.

Conventions (global coordinates): for incidence from the left
``psi = exp(i k_L x) + r exp(-i k_L x)`` left of the structure and
``t exp(i k_R x)`` right of it; incidence from the right is the mirror
image. ``T`` carries the flux factor ``k_out / k_in``.
"""
from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

from .impedance import (ImpedanceState, RegionWave, characteristic, jump, jump_back,
                        propagate_left, propagate_right, psi_jump_ratio, psi_ratio)
from .potential import PhysicalConstants, PotentialSpec

IncidentSide = Literal["left", "right"]


class NoPropagatingChannel(ValueError):
    """The energy lies below the asymptotic potential on the incident side."""


@dataclass(frozen=True)
class ScatteringResult:
    r: complex
    t: complex
    R: float
    T: float
    unitarity_defect: float
    incident_side: IncidentSide = "left"


@dataclass(frozen=True)
class ImpedanceProfile:
    """Impedance just left and right of every boundary at one energy.

    ``left_tail`` and ``right_tail`` are the impedances used for the two
    semi-infinite regions, anchored at the first and last boundary.
    """

    spec: PotentialSpec
    energy: float
    waves: tuple[RegionWave, ...]
    minus: tuple[ImpedanceState, ...]
    plus: tuple[ImpedanceState, ...]
    left_tail: ImpedanceState
    right_tail: ImpedanceState

    def at(self, x: float, side: IncidentSide = "left") -> ImpedanceState:
        """Z(x); on a boundary ``side`` picks the one-sided limit."""
        xs = self.spec.boundaries
        c = self.spec.constants
        if not xs:
            return self.right_tail.at(x)
        for i, xb in enumerate(xs):
            if x == xb:
                return self.minus[i] if side == "left" else self.plus[i]
        if x < xs[0]:
            return propagate_left(self.left_tail, self.waves[0], xs[0] - x, c)
        if x > xs[-1]:
            return propagate_right(self.right_tail, self.waves[-1], x - xs[-1], c)
        i = next(j for j, xb in enumerate(xs) if xb > x)
        return propagate_left(self.minus[i], self.waves[i], xs[i] - x, c)


def region_waves(spec: PotentialSpec, E: float) -> tuple[RegionWave, ...]:
    return tuple(characteristic(E, r.height, spec.constants) for r in spec.regions)


def fold_from_right(spec: PotentialSpec, E: float, seed: ImpedanceState | None = None,
                    waves: tuple[RegionWave, ...] | None = None) -> ImpedanceProfile:
    """Seed Z = +z at the rightmost boundary and run the recursion leftwards."""
    c = spec.constants
    waves = waves or region_waves(spec, E)
    xs = spec.boundaries
    if not xs:
        st = seed or ImpedanceState(waves[0].z, 0.0, "right")
        return ImpedanceProfile(spec, E, waves, (), (), st, st)
    n = len(xs)
    Z = seed or ImpedanceState(waves[-1].z, xs[-1], "right")
    right_tail = Z
    minus: list[ImpedanceState] = [None] * n  # type: ignore[list-item]
    plus: list[ImpedanceState] = [None] * n  # type: ignore[list-item]
    for i in range(n - 1, -1, -1):
        plus[i] = Z
        Z = jump_back(Z, spec.points[i], c)
        minus[i] = Z
        if i > 0:
            Z = propagate_left(Z, waves[i], xs[i] - xs[i - 1], c)
    return ImpedanceProfile(spec, E, waves, tuple(minus), tuple(plus), minus[0], right_tail)


def fold_from_left(spec: PotentialSpec, E: float,
                   waves: tuple[RegionWave, ...] | None = None) -> ImpedanceProfile:
    """Seed Z = -z at the leftmost boundary and run the recursion rightwards."""
    c = spec.constants
    waves = waves or region_waves(spec, E)
    xs = spec.boundaries
    if not xs:
        st = ImpedanceState(-waves[0].z, 0.0, "left")
        return ImpedanceProfile(spec, E, waves, (), (), st, st)
    n = len(xs)
    Z = ImpedanceState(-waves[0].z, xs[0], "left")
    left_tail = Z
    minus: list[ImpedanceState] = [None] * n  # type: ignore[list-item]
    plus: list[ImpedanceState] = [None] * n  # type: ignore[list-item]
    for i in range(n):
        minus[i] = Z
        Z = jump(Z, spec.points[i], c)
        plus[i] = Z
        if i < n - 1:
            Z = propagate_right(Z, waves[i + 1], xs[i + 1] - xs[i], c)
    return ImpedanceProfile(spec, E, waves, tuple(minus), tuple(plus), left_tail, plus[-1])


def _check_channel(spec: PotentialSpec, E: float, incident_side: IncidentSide) -> None:
    U = spec.left_asymptote if incident_side == "left" else spec.right_asymptote
    if not E > U:
        raise NoPropagatingChannel(f"E = {E} is not above the {incident_side} asymptote U = {U}")


def input_impedance(spec: PotentialSpec, E: float, incident_side: IncidentSide = "left") -> ImpedanceState:
    """Z at the first boundary met by the incident wave (left limit for left incidence)."""
    _check_channel(spec, E, incident_side)
    if incident_side == "left":
        return fold_from_right(spec, E).left_tail
    return fold_from_left(spec, E).right_tail


def reflection_from_impedance(Z_in: complex, z_incident: complex) -> complex:
    """Local reflection amplitude ``(z - Z) / (z + Z)``, i.e. th(phi) = Z / z inverted."""
    den = z_incident + Z_in
    if den == 0:
        raise ZeroDivisionError("Z_in = -z: perfect absorber, impossible for a real potential")
    return (z_incident - Z_in) / den


def _psi_chain(profile: ImpedanceProfile, forward: bool) -> complex:
    """psi(last boundary, outer limit) / psi(first boundary, outer limit).

    Forward runs left to right, otherwise right to left.
    """
    spec = profile.spec
    c = spec.constants
    xs = spec.boundaries
    ratio = 1.0 + 0j
    for i in range(len(xs)):
        if profile.minus[i].node or profile.plus[i].node:
            return 0j
        ratio *= psi_jump_ratio(spec.points[i], c)
        if i < len(xs) - 1:
            ratio *= psi_ratio(profile.plus[i], profile.minus[i + 1], profile.waves[i + 1],
                               xs[i + 1] - xs[i], c)
    return ratio if forward else 1.0 / ratio


def solve(spec: PotentialSpec, E: float, incident_side: IncidentSide = "left") -> ScatteringResult:
    """r, t, R, T for a unit plane wave incident from ``incident_side``."""
    _check_channel(spec, E, incident_side)
    waves = region_waves(spec, E)
    xs = spec.boundaries
    wl, wr = waves[0], waves[-1]
    if incident_side == "left":
        x_in, x_out = (xs[0], xs[-1]) if xs else (0.0, 0.0)
        prof = fold_from_right(spec, E, waves=waves)
        rho = reflection_from_impedance(prof.left_tail.value, wl.z) if not prof.left_tail.node else -1.0
        r = rho * cmath.exp(2j * wl.k * x_in)
        psi_in = cmath.exp(1j * wl.k * x_in) * (1.0 + rho)
        w_in, w_out = wl, wr
        psi_out = psi_in * _psi_chain(prof, True)
        t = psi_out * cmath.exp(-1j * wr.k * x_out) if wr.k > 0 else 0j
    else:
        x_in, x_out = (xs[-1], xs[0]) if xs else (0.0, 0.0)
        prof = fold_from_left(spec, E, waves=waves)
        Zr = prof.right_tail
        sigma = reflection_from_impedance(-Zr.value, wr.z) if not Zr.node else -1.0
        r = sigma * cmath.exp(-2j * wr.k * x_in)
        psi_in = cmath.exp(-1j * wr.k * x_in) * (1.0 + sigma)
        w_in, w_out = wr, wl
        if psi_in == 0:
            psi_out = 0j
        else:
            chain = _psi_chain(prof, True)
            psi_out = psi_in / chain if chain != 0 else 0j
        t = psi_out * cmath.exp(1j * wl.k * x_out) if wl.k > 0 else 0j
    R = abs(r) ** 2
    T = (w_out.k / w_in.k) * abs(t) ** 2 if w_out.k > 0 else 0.0
    return ScatteringResult(r, t, R, T, R + T - 1.0, incident_side)


def closed_form_single_delta(alpha: float, E: float,
                             constants: PhysicalConstants = PhysicalConstants()) -> ScatteringResult:
    """Single ``alpha * delta(x)`` on a flat zero background."""
    if not E > 0:
        raise NoPropagatingChannel("closed form needs E > 0")
    hbar, m = constants.hbar, constants.mass
    k = math.sqrt(2.0 * m * E) / hbar
    den = 1j * alpha * m + hbar**2 * k
    r = -1j * alpha * m / den
    t = hbar**2 * k / den
    R = alpha**2 / (alpha**2 + 2.0 * hbar**2 * E / m)
    T = 1.0 / (1.0 + m * alpha**2 / (2.0 * hbar**2 * E))
    return ScatteringResult(r, t, R, T, R + T - 1.0, "left")


def closed_form_delta_delta_prime(alpha: float, beta: float, E: float,
                                  constants: PhysicalConstants = PhysicalConstants()) -> ScatteringResult:
    """``alpha * delta(x) + beta * delta'(x)`` on a flat zero background.

    ``alpha`` is the signed delta strength (negative for a well). The
    transmission amplitude carries the psi-jump factor, so R + T = 1.
    """
    if not E > 0:
        raise NoPropagatingChannel("closed form needs E > 0")
    hbar, m = constants.hbar, constants.mass
    z = math.sqrt(2.0 * E / m)
    b = m * beta / hbar**2
    a = -2.0 * alpha / hbar  # hbar * alpha~ / m for the well-convention alpha~
    den = 2.0 * (1.0 + b * b) * z - 1j * a
    r = (-4.0 * b * z + 1j * a) / den
    t = 2.0 * (1.0 - b * b) * z / den
    R = abs(r) ** 2
    T = abs(t) ** 2
    return ScatteringResult(r, t, R, T, R + T - 1.0, "left")


def _workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("QWI_THREADS", "0") or 0)
    return workers if workers > 0 else min(8, os.cpu_count() or 1)


def energy_grid(E_min: float, E_max: float, n_steps: int) -> list[float]:
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if n_steps == 1:
        return [E_min]
    if not E_min < E_max:
        raise ValueError("degenerate energy grid: need E_min < E_max")
    h = (E_max - E_min) / (n_steps - 1)
    return [E_min + i * h for i in range(n_steps - 1)] + [E_max]


def sweep(spec: PotentialSpec, E_min: float, E_max: float, n_steps: int,
          incident_side: IncidentSide = "left", workers: int | None = None) -> list[tuple[float, ScatteringResult]]:
    """Uniform energy grid including both endpoints; rows keep grid order."""
    if not 0 < E_min:
        raise ValueError("E_min must be positive")
    grid = energy_grid(E_min, E_max, n_steps)
    n = _workers(workers)
    if n == 1 or len(grid) < 64:
        results = [solve(spec, E, incident_side) for E in grid]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(lambda E: solve(spec, E, incident_side), grid))
    return list(zip(grid, results))


def find_resonances(rows: list[tuple[float, ScatteringResult]]) -> list[tuple[float, float]]:
    """Interior local maxima of T over a sweep, as (E, T) pairs."""
    out = []
    for (_, a), (E, b), (_, c) in zip(rows, rows[1:], rows[2:]):
        if b.T > a.T and b.T >= c.T:
            out.append((E, b.T))
    return out
