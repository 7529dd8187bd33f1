"""Quantum wave impedance algebra.

The impedance ``Z = (hbar / (i m)) psi'/psi`` obeys a Riccati equation whose
solution in a constant region is ``z * th(gamma x + phi)``. Everything here
works on that closed form: propagation across a region, and jumps at delta
and delta-delta' points. Jump rules are written left-limit -> right-limit;
the reverse direction is obtained by inverting them.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

from .potential import PhysicalConstants, PointInteraction

Side = Literal["left", "right"]

SERIES_THRESHOLD = 1e-6
NODE_THRESHOLD = 1e-300
RESONANT_BETA_TOL = 1e-12


class ResonantDeltaPrimeError(ValueError):
    """The delta-prime strength makes the matching matrix singular (beta~ = +-1)."""


@dataclass(frozen=True)
class ImpedanceState:
    """Impedance at ``position``; ``node=True`` stands for Z = infinity (psi = 0)."""

    value: complex
    position: float = 0.0
    side: Side = "left"
    node: bool = False

    def at(self, position: float, side: Side | None = None) -> "ImpedanceState":
        return ImpedanceState(self.value, position, side or self.side, self.node)


@dataclass(frozen=True)
class RegionWave:
    characteristic_impedance: complex
    propagation_constant: complex
    kappa: float = 0.0
    k: float = 0.0

    @property
    def z(self) -> complex:
        return self.characteristic_impedance

    @property
    def gamma(self) -> complex:
        return self.propagation_constant

    @property
    def degenerate(self) -> bool:
        return self.characteristic_impedance == 0


def characteristic(E: float, U: float, constants: PhysicalConstants) -> RegionWave:
    """Characteristic impedance and propagation constant of a flat region.

    ``z = sqrt(2 (E - U) / m)`` taken real-positive above the barrier and
    positive-imaginary below it; ``gamma = i m z / hbar``.
    """
    m, hbar = constants.mass, constants.hbar
    d = E - U
    if d > 0:
        z = complex(math.sqrt(2.0 * d / m), 0.0)
        return RegionWave(z, 1j * m * z / hbar, 0.0, m * z.real / hbar)
    if d < 0:
        z = complex(0.0, math.sqrt(-2.0 * d / m))
        return RegionWave(z, 1j * m * z / hbar, m * z.imag / hbar, 0.0)
    return RegionWave(0j, 0j, 0.0, 0.0)


def _th_over_x(x: complex) -> complex:
    if abs(x) < SERIES_THRESHOLD:
        return 1.0 - x * x / 3.0
    return cmath.tanh(x) / x


def _sh_over_x(x: complex) -> complex:
    if abs(x) < SERIES_THRESHOLD:
        return 1.0 + x * x / 6.0
    return cmath.sinh(x) / x


def _tau(region: RegionWave, dx: float, constants: PhysicalConstants) -> complex:
    """``th(gamma dx) / z``, finite also for the degenerate region z = 0."""
    return 1j * constants.mass * dx / constants.hbar * _th_over_x(region.gamma * dx)


def _one_pm_th(x: float) -> tuple[float, float]:
    """(1 + th x, 1 - th x) for real x, without cancellation."""
    q = math.exp(-2.0 * abs(x))
    small, big = 2.0 * q / (1.0 + q), 2.0 / (1.0 + q)
    return (big, small) if x >= 0 else (small, big)


def _propagate(Z: ImpedanceState, region: RegionWave, dx: float,
               constants: PhysicalConstants, sign: int, position: float, side: Side) -> ImpedanceState:
    if dx < 0:
        raise ValueError("dx must be non-negative")
    if dx == 0:
        return ImpedanceState(Z.value, position, side, Z.node)
    tau = sign * _tau(region, dx, constants)
    z = region.z
    if Z.node:
        if tau == 0:
            return ImpedanceState(0j, position, side, True)
        return ImpedanceState(-1.0 / tau, position, side)
    # deviation from the matched load: Z' - z = d (1 + z tau) / (1 - z tau - d tau)
    d = Z.value - z
    x = sign * region.gamma * dx
    if z != 0 and x.imag == 0 and abs(x) > 0.5:
        # evanescent: th -> +-1 and 1 -+ th would cancel
        a, b = _one_pm_th(x.real)
    else:
        a, b = 1.0 + z * tau, 1.0 - z * tau
    den = b - d * tau
    if abs(den) < NODE_THRESHOLD:
        return ImpedanceState(0j, position, side, True)
    value = z + d * a / den
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        # the pole is crossed: redo the step in the admittance Y = 1/Z
        Y = 1.0 / Z.value
        num = Y - tau
        if abs(num) < NODE_THRESHOLD:
            return ImpedanceState(0j, position, side, True)
        value = (1.0 - z * z * tau * Y) / num
    return ImpedanceState(value, position, side)


def propagate_left(Z_at_right: ImpedanceState, region: RegionWave, dx: float,
                   constants: PhysicalConstants = PhysicalConstants()) -> ImpedanceState:
    """Carry Z from a point to the point ``dx`` further left in the same region.

    Implements ``Z(x - dx) = z (Z - z th) / (z - Z th)`` with
    ``th = th(gamma dx)``, written through ``th / z`` so that the
    degenerate region E = U needs no special branch.
    """
    return _propagate(Z_at_right, region, dx, constants, +1, Z_at_right.position - dx, "right")


def propagate_right(Z_at_left: ImpedanceState, region: RegionWave, dx: float,
                    constants: PhysicalConstants = PhysicalConstants()) -> ImpedanceState:
    """Mirror of :func:`propagate_left`: ``Z(x + dx) = z (Z + z th) / (z + Z th)``."""
    return _propagate(Z_at_left, region, dx, constants, -1, Z_at_left.position + dx, "left")


def jump_delta(Z_left_limit: complex, alpha: float,
               constants: PhysicalConstants = PhysicalConstants()) -> complex:
    """Right limit of Z across ``alpha * delta``: ``Z(a+0) = Z(a-0) - 2 i alpha / hbar``."""
    return Z_left_limit - 2j * alpha / constants.hbar


def _delta_prime_coefficients(alpha: float, beta: float, constants: PhysicalConstants):
    bt = constants.mass * beta / constants.hbar**2
    if abs(bt - 1.0) < RESONANT_BETA_TOL or abs(bt + 1.0) < RESONANT_BETA_TOL:
        raise ResonantDeltaPrimeError(f"resonant delta-prime strength: beta~ = {bt}")
    ratio = (1.0 - bt) ** 2 / (1.0 + bt) ** 2
    shift = -2j * alpha / (constants.hbar * (1.0 + bt) ** 2)
    return shift, ratio


def jump_delta_prime(Z_left_limit: complex, alpha: float, beta: float,
                     constants: PhysicalConstants = PhysicalConstants()) -> complex:
    """Right limit of Z across ``alpha * delta + beta * delta'``.

    ``Z(a+0) = -2 i alpha / (hbar (1 + b)^2) + ((1 - b)/(1 + b))^2 Z(a-0)``
    with ``b = m beta / hbar^2``. For beta = 0 this goes through
    :func:`jump_delta` so both paths agree bit for bit.
    """
    if beta == 0:
        return jump_delta(Z_left_limit, alpha, constants)
    shift, ratio = _delta_prime_coefficients(alpha, beta, constants)
    return shift + ratio * Z_left_limit


def jump(Z: ImpedanceState, point: PointInteraction, constants: PhysicalConstants) -> ImpedanceState:
    """Cross ``point`` from its left limit to its right limit."""
    if Z.node:
        _check_beta(point, constants)
        return ImpedanceState(0j, point.position, "right", True)
    return ImpedanceState(jump_delta_prime(Z.value, point.delta_strength, point.delta_prime_strength,
                                           constants), point.position, "right")


def jump_back(Z: ImpedanceState, point: PointInteraction, constants: PhysicalConstants) -> ImpedanceState:
    """Inverse of :func:`jump`: left limit from the right limit."""
    if Z.node:
        _check_beta(point, constants)
        return ImpedanceState(0j, point.position, "left", True)
    if point.delta_prime_strength == 0:
        value = Z.value + 2j * point.delta_strength / constants.hbar
    else:
        shift, ratio = _delta_prime_coefficients(point.delta_strength, point.delta_prime_strength, constants)
        value = (Z.value - shift) / ratio
    return ImpedanceState(value, point.position, "left")


def _check_beta(point: PointInteraction, constants: PhysicalConstants) -> None:
    if point.delta_prime_strength != 0:
        _delta_prime_coefficients(0.0, point.delta_prime_strength, constants)


def psi_jump_ratio(point: PointInteraction, constants: PhysicalConstants) -> float:
    """psi(a+0) / psi(a-0) across a point: (1 + b)/(1 - b)."""
    bt = point.beta_tilde(constants)
    if bt == 0:
        return 1.0
    _delta_prime_coefficients(0.0, point.delta_prime_strength, constants)
    return (1.0 + bt) / (1.0 - bt)


def psi_ratio(Z_left: ImpedanceState, Z_right: ImpedanceState, region: RegionWave, dx: float,
              constants: PhysicalConstants) -> complex:
    """psi(right edge) / psi(left edge) of a region, given Z at both edges.

    Two analytic forms are available, one anchored at each edge; their
    product is one, and the one of larger magnitude is free of cancellation.
    Returns 0 when the right edge is a node. The left edge must not be one.
    """
    if Z_left.node:
        raise ValueError("psi vanishes at the left edge; ratio undefined")
    if Z_right.node:
        return 0j
    x = region.gamma * dx
    ch = cmath.cosh(x)
    # sinh(gamma dx) / z without dividing by z
    sh_z = 1j * constants.mass * dx / constants.hbar * _sh_over_x(x)
    forward = ch + Z_left.value * sh_z
    backward = ch - Z_right.value * sh_z
    if abs(forward) >= abs(backward):
        return forward
    return 1.0 / backward
