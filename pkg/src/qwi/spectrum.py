"""Bound states from the impedance mismatch and an eigenvalue count.

For a bound state the impedance seeded as a decaying wave on the right
(``Z = +z_R``) must arrive at the first boundary equal to ``-z_L``, the
impedance of a wave decaying to the left. ``D(E) = Z(x0 - 0) + z_L`` is
purely imaginary below both asymptotes and vanishes at the eigenvalues.

Carried through thick barriers, the zero of D sits next to a pole in an
exponentially narrow window, so eigenvalues are located instead by
bisecting the number of states below E, counted from the nodes of the
left-decaying solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .impedance import ImpedanceState, _tau, characteristic, jump, propagate_right, psi_jump_ratio, psi_ratio
from .potential import PhysicalConstants, PotentialSpec
from .scattering import ImpedanceProfile, fold_from_right, region_waves


class BelowFloorError(ValueError):
    """Energy is not below the asymptotic potential floor."""


@dataclass(frozen=True)
class DispersionSample:
    energy: float
    mismatch: complex
    node_count: int


@dataclass(frozen=True)
class BoundState:
    energy: float
    kappa_left: float
    kappa_right: float
    label: int


def asymptote_floor(spec: PotentialSpec) -> float:
    return min(spec.left_asymptote, spec.right_asymptote)


def default_floor(spec: PotentialSpec) -> float:
    """A safely over-deep lower limit for the eigenvalue search.

    The single-delta binding energy is ``hbar^2 kappa^2 / 2m`` with
    ``kappa = m alpha / hbar^2``; the summed strengths, four times over,
    below the deepest region never cut a state off. The older
    ``(m/2) kappa^2 * 4`` depth is kept when it is deeper.
    """
    c = spec.constants
    u_min = min(spec.heights)
    total = sum(abs(p.delta_strength) for p in spec.points) * c.mass / c.hbar**2
    if total == 0.0:
        return u_min
    depth = 4.0 * total**2 * max(0.5 * c.mass, c.hbar**2 / (2.0 * c.mass))
    return u_min - depth


def kappa_grid(depth_max: float, n: int, constants: PhysicalConstants) -> list[float]:
    """Depths below threshold, uniform in the decay constant kappa, ascending."""
    kmax = math.sqrt(2.0 * constants.mass * depth_max) / constants.hbar
    return [(constants.hbar * kmax * j / n) ** 2 / (2.0 * constants.mass) for j in range(1, n + 1)]


def _count_nodes(profile: ImpedanceProfile) -> int:
    """Zeros of the (real) right-decaying solution on the finite regions."""
    spec = profile.spec
    c = spec.constants
    xs = spec.boundaries
    nodes = sum(1 for s in profile.minus[1:] if s.node)
    for i in range(1, len(xs)):
        left, right = profile.plus[i - 1], profile.minus[i]
        if left.node or right.node:
            continue
        w = profile.waves[i]
        dx = xs[i] - xs[i - 1]
        if w.k > 0:
            # psi(x_R - s) ~ cos(k s + delta), tan(delta) = psi'/(k psi) at x_R
            logd = (1j * c.mass / c.hbar * right.value).real
            delta = math.atan(logd / w.k)
            u = (delta - math.pi / 2) / math.pi + w.k * dx / math.pi
            nodes += max(0, math.ceil(u))
        else:
            if psi_ratio(left, right, w, dx, c).real < 0:
                nodes += 1
    return nodes


def dispersion(spec: PotentialSpec, E: float, count_nodes: bool = True) -> DispersionSample:
    """Mismatch ``Z(x0 - 0) + z_L`` of the right-decaying solution at energy E.

    ``node_count`` is -1 when ``count_nodes`` is off.
    """
    if not E < asymptote_floor(spec):
        raise BelowFloorError(f"E = {E} is not below the asymptotic floor {asymptote_floor(spec)}")
    profile = fold_from_right(spec, E)
    zl = characteristic(E, spec.left_asymptote, spec.constants).z
    Z = profile.left_tail
    mismatch = complex(math.inf, math.inf) if Z.node else Z.value + zl
    return DispersionSample(E, mismatch, _count_nodes(profile) if count_nodes else -1)


def _zeros_right(Z: ImpedanceState, w, dx: float, c: PhysicalConstants) -> int:
    """Zeros of psi on (x, x + dx] for the solution with impedance Z at x."""
    if Z.node:
        return math.floor(w.k * dx / math.pi) if w.k > 0 else 0
    if w.k > 0:
        # psi(x + s) ~ cos(k s - delta), tan(delta) = psi'/(k psi)
        delta = math.atan((1j * c.mass / c.hbar * Z.value).real / w.k)
        u = w.k * dx - math.pi / 2 - delta
        return math.floor(u / math.pi) + 1 if u >= 0 else 0
    # evanescent or flat: sign of psi(x + dx) / psi(x) = 1 + Z th(gamma dx) / z
    return 1 if (1.0 + Z.value * _tau(w, dx, c)).real <= 0 else 0


def eigenvalue_count(spec: PotentialSpec, E: float) -> int:
    """Number of bound states strictly below E (E under both asymptotes).

    Counts the zeros of the solution decaying to the left while its
    impedance is carried rightwards; a negative psi jump at a delta-prime
    point counts as a sign change too.
    """
    c = spec.constants
    xs = spec.boundaries
    if not xs:
        return 0
    waves = region_waves(spec, E)
    Z = ImpedanceState(-waves[0].z, xs[0], "left")
    n = 0
    for i, x in enumerate(xs):
        pt = spec.points[i]
        if psi_jump_ratio(pt, c) < 0:
            n += 1
        Z = jump(Z, pt, c)
        if i < len(xs) - 1:
            dx = xs[i + 1] - x
            n += _zeros_right(Z, waves[i + 1], dx, c)
            Z = propagate_right(Z, waves[i + 1], dx, c)
    if not Z.node and (Z.value / waves[-1].z).real > 1.0:
        n += 1
    return n


def find_bound_states(spec: PotentialSpec, E_floor: float | None = None, grid_points: int = 512,
                      tol: float | None = None) -> list[BoundState]:
    """All bound states, ascending.

    The eigenvalue count is tabulated on a kappa-uniform grid and every
    cell where it jumps is bisected down to ``tol``. The floor is pushed
    deeper if states are found below it.
    """
    if grid_points < 16:
        raise ValueError("grid_points must be >= 16")
    c = spec.constants
    top = asymptote_floor(spec)
    if E_floor is None:
        E_floor = default_floor(spec)
    if E_floor >= top:
        return []
    for _ in range(60):
        if eigenvalue_count(spec, E_floor) == 0:
            break
        E_floor = top - 2.0 * (top - E_floor)
    if tol is None:
        tol = 1e-12 * max(1.0, abs(E_floor))
    if tol <= 0:
        raise ValueError("tol must be positive")

    energies = sorted(top - d for d in kappa_grid(top - E_floor, grid_points, c))
    energies[-1] = top - max(1e-14, 1e-15 * abs(top))
    energies.insert(0, E_floor)
    counts = [eigenvalue_count(spec, E) for E in energies]

    roots: list[float] = []

    def isolate(lo, hi, nlo, nhi):
        if nhi == nlo:
            return
        if hi - lo <= tol or 0.5 * (lo + hi) in (lo, hi):
            roots.extend([0.5 * (lo + hi)] * (nhi - nlo))
            return
        mid = 0.5 * (lo + hi)
        nm = eigenvalue_count(spec, mid)
        isolate(lo, mid, nlo, nm)
        isolate(mid, hi, nm, nhi)

    for (Ea, na), (Eb, nb) in zip(zip(energies, counts), zip(energies[1:], counts[1:])):
        isolate(Ea, Eb, na, nb)
    roots = sorted(E for E in roots if top - E > 1e-14)
    out = []
    for i, E in enumerate(roots):
        kl = math.sqrt(2.0 * c.mass * (spec.left_asymptote - E)) / c.hbar
        kr = math.sqrt(2.0 * c.mass * (spec.right_asymptote - E)) / c.hbar
        out.append(BoundState(E, kl, kr, i))
    return out


def single_delta_energy(alpha: float, constants: PhysicalConstants = PhysicalConstants()) -> float | None:
    """Bound energy of the well ``-alpha * delta(x)``; None unless alpha > 0."""
    if alpha <= 0:
        return None
    return -constants.mass * alpha**2 / (2.0 * constants.hbar**2)


def delta_delta_prime_energy(alpha: float, beta: float,
                             constants: PhysicalConstants = PhysicalConstants()) -> float | None:
    """Bound energy of ``-alpha * delta(x) + beta * delta'(x)``; None unless alpha > 0."""
    if alpha <= 0:
        return None
    b = constants.mass * beta / constants.hbar**2
    return -constants.mass * alpha**2 / (2.0 * constants.hbar**2 * (1.0 + b * b) ** 2)


def _bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def closed_form_double_well(alpha: float, a: float, constants: PhysicalConstants = PhysicalConstants(),
                            tol: float = 0.0) -> tuple[float, float | None]:
    """Energies of ``-alpha (delta(x - a) + delta(x + a))``.

    Roots of ``hbar^2 kappa / (m alpha) = 1 +- exp(-2 kappa a)``: the even
    state always exists, the odd one only for ``2 a m alpha / hbar^2 > 1``.
    ``tol`` is accepted for interface symmetry; bisection runs to full
    double precision in kappa.
    """
    if alpha <= 0 or a <= 0:
        raise ValueError("alpha and a must be positive")
    hbar, m = constants.hbar, constants.mass
    k0 = m * alpha / hbar**2

    def even(k):
        return k / k0 - 1.0 - math.exp(-2.0 * k * a)

    def odd(k):
        return k / k0 + math.expm1(-2.0 * k * a)

    def energy(k):
        return -(hbar * k) ** 2 / (2.0 * m)

    e_sym = energy(_bisect(even, k0, 2.0 * k0))
    if 2.0 * a * k0 <= 1.0:
        return e_sym, None
    return e_sym, energy(_bisect(odd, k0 * 1e-12, k0))


def closed_form_single_well_state(alpha: float, constants: PhysicalConstants = PhysicalConstants()):
    """Normalized single-delta ground state as a callable psi(x)."""
    k = constants.mass * alpha / constants.hbar**2
    return lambda x: np.sqrt(k) * np.exp(-k * np.abs(x))
