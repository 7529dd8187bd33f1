"""Transfer-matrix reference solver.

Propagates the column ``(psi, psi')`` with 2x2 matrices. It shares no
propagation code with the impedance engine and is used to cross-check it.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .potential import PhysicalConstants, PointInteraction, PotentialSpec
from .scattering import NoPropagatingChannel, ScatteringResult
from .spectrum import BoundState, default_floor, kappa_grid


@dataclass(frozen=True)
class TransferMatrix:
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_array(cls, a) -> "TransferMatrix":
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    def array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix.from_array(self.array() @ other.array())

    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21


def _wavenumber(E: float, U: float, c: PhysicalConstants) -> complex:
    # k^2 = 2 m (E - U) / hbar^2, principal complex root
    return cmath.sqrt(2.0 * c.mass * (E - U)) / c.hbar


def region_matrix(E: float, U: float, dx: float, constants: PhysicalConstants = PhysicalConstants()) -> TransferMatrix:
    """Exact propagation of (psi, psi') over ``dx`` in a flat region of height U."""
    if dx < 0:
        raise ValueError("dx must be non-negative")
    k = _wavenumber(E, U, constants)
    kx = k * dx
    cos = cmath.cos(kx)
    if abs(kx) < 1e-4:
        sinc = 1.0 - kx * kx / 6.0 + kx**4 / 120.0
    else:
        sinc = cmath.sin(kx) / kx
    return TransferMatrix(cos, dx * sinc, -k * k * dx * sinc, cos)


def point_matrix(point: PointInteraction, constants: PhysicalConstants = PhysicalConstants()) -> TransferMatrix:
    """(psi, psi') right limit from left limit at a delta / delta-prime point."""
    hbar, m = constants.hbar, constants.mass
    b = m * point.delta_prime_strength / hbar**2
    if abs(abs(b) - 1.0) < 1e-12:
        raise ValueError(f"singular delta-prime matching matrix: beta~ = {b}")
    g = 2.0 * m * point.delta_strength / hbar**2
    return TransferMatrix((1 + b) / (1 - b), 0, g / (1 - b * b), (1 - b) / (1 + b))


def total_matrix(spec: PotentialSpec, E: float) -> TransferMatrix:
    """Product from the left limit at the first boundary to the right limit at the last."""
    c = spec.constants
    xs = spec.boundaries
    M = np.eye(2, dtype=complex)
    for i, x in enumerate(xs):
        if i > 0:
            M = region_matrix(E, spec.regions[i].height, x - xs[i - 1], c).array() @ M
        M = point_matrix(spec.points[i], c).array() @ M
    return TransferMatrix.from_array(M)


def _wave_basis(k: complex, x: float) -> np.ndarray:
    """Columns: (psi, psi') of exp(i k (.)) and exp(-i k (.)) at x."""
    e, f = cmath.exp(1j * k * x), cmath.exp(-1j * k * x)
    return np.array([[e, f], [1j * k * e, -1j * k * f]])


def oracle_scatter(spec: PotentialSpec, E: float, incident_side: str = "left") -> ScatteringResult:
    """r and t from the total matrix rewritten in plane-wave amplitudes.

    ``W = P_R^-1 M P_L`` maps (right-moving, left-moving) amplitudes on the
    left to those on the right and has ``det W = k_L / k_R``. Reading r, t
    off W avoids the cancellation of a direct solve behind thick barriers.
    """
    UL, UR = spec.left_asymptote, spec.right_asymptote
    U_in = UL if incident_side == "left" else UR
    if not E > U_in:
        raise NoPropagatingChannel(f"E = {E} below incident asymptote {U_in}")
    c = spec.constants
    xs = spec.boundaries
    x0, x1 = (xs[0], xs[-1]) if xs else (0.0, 0.0)
    M = total_matrix(spec, E).array()
    kL, kR = _wavenumber(E, UL, c), _wavenumber(E, UR, c)
    k_in, k_out = (kL, kR) if incident_side == "left" else (kR, kL)
    if k_out == 0:
        # no wave basis on the far side; the structure reflects totally
        r, t = _solve_flat_far_side(M, kL, kR, x0, x1, incident_side), 0j
    else:
        # evanescent far side: k = i kappa, exp(i k x) is the decaying branch
        W = np.linalg.solve(_wave_basis(kR, x1), M @ _wave_basis(kL, x0))
        if incident_side == "left":
            r = -W[1, 0] / W[1, 1]
            t = (kL / kR) / W[1, 1]
        else:
            t = 1.0 / W[1, 1]
            r = W[0, 1] * t
    r, t = complex(r), complex(t)
    R = abs(r) ** 2
    T = (k_out.real / k_in.real) * abs(t) ** 2 if k_out.imag == 0 and k_out.real > 0 else 0.0
    if T == 0.0:
        t = 0j
    return ScatteringResult(r, t, R, T, R + T - 1.0, incident_side)


def _solve_flat_far_side(M, kL, kR, x0, x1, incident_side):
    """r when the far side sits exactly at its asymptote (psi' = 0 there)."""
    if incident_side == "left":
        P = _wave_basis(kL, x0)
        v_inc, v_refl = M @ P[:, 0], M @ P[:, 1]
        return -v_inc[1] / v_refl[1]
    Minv = np.linalg.inv(M)
    P = _wave_basis(kR, x1)
    v_inc, v_refl = Minv @ P[:, 1], Minv @ P[:, 0]
    return -v_inc[1] / v_refl[1]


def shooting_mismatch(spec: PotentialSpec, E: float) -> float:
    """psi' + kappa_R psi at the right end for the solution decaying to the left."""
    c = spec.constants
    kl = math.sqrt(2.0 * c.mass * (spec.left_asymptote - E)) / c.hbar
    kr = math.sqrt(2.0 * c.mass * (spec.right_asymptote - E)) / c.hbar
    v = total_matrix(spec, E).array() @ np.array([1.0, kl])
    v = v.real
    scale = math.hypot(v[0] * kr, v[1]) or 1.0
    return (v[1] + kr * v[0]) / scale


def oracle_bound_states(spec: PotentialSpec, E_floor: float | None = None, tol: float | None = None,
                        grid_points: int = 512) -> list[BoundState]:
    """Bound states by bisection on the shooting mismatch."""
    c = spec.constants
    top = min(spec.left_asymptote, spec.right_asymptote)
    if E_floor is None:
        E_floor = default_floor(spec)
    if E_floor >= top:
        return []
    if tol is None:
        tol = 1e-12 * max(1.0, abs(E_floor))
    energies = sorted(top - e for e in kappa_grid(top - E_floor, grid_points, c))
    vals = [shooting_mismatch(spec, E) for E in energies]
    found = []
    for (Ea, fa), (Eb, fb) in zip(zip(energies, vals), zip(energies[1:], vals[1:])):
        if fa == 0:
            found.append(Ea)
            continue
        if fb == 0.0 or fa * fb > 0:
            continue
        lo, hi, flo = Ea, Eb, fa
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            fm = shooting_mismatch(spec, mid)
            if fm * flo > 0:
                lo, flo = mid, fm
            else:
                hi = mid
        found.append(0.5 * (lo + hi))
    found = sorted(E for E in found if top - E > 1e-14)
    out = []
    for i, E in enumerate(found):
        kl = math.sqrt(2.0 * c.mass * (spec.left_asymptote - E)) / c.hbar
        kr = math.sqrt(2.0 * c.mass * (spec.right_asymptote - E)) / c.hbar
        out.append(BoundState(E, kl, kr, i))
    return out


def relative_deviation(a: ScatteringResult, b: ScatteringResult) -> float:
    """Norm-wise relative distance between the (r, t) pairs of two results."""
    num = math.hypot(abs(a.r - b.r), abs(a.t - b.t))
    return num / math.hypot(abs(b.r), abs(b.t))
