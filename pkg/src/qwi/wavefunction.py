"""Wavefunctions rebuilt from an impedance profile.

Inside a flat region ``Z = z th(gamma x + phi)`` integrates to
``psi ~ cosh(gamma x + phi)``, so psi is carried from edge to edge in
closed form; delta-prime points rescale psi by ``(1 + b)/(1 - b)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .impedance import ImpedanceState, characteristic, psi_jump_ratio, psi_ratio
from .potential import PotentialSpec
from .scattering import ImpedanceProfile, fold_from_right, region_waves, solve
from .spectrum import asymptote_floor


class NotNormalizableError(ValueError):
    """Scattering states have no finite norm; use |psi|^2 densities instead."""


@dataclass(frozen=True)
class WavefunctionSamples:
    xs: np.ndarray
    psi: np.ndarray
    norm: float
    discontinuities: list[tuple[float, complex]] = field(default_factory=list)
    energy: float | None = None


def trapezoid_norm(xs: np.ndarray, psi: np.ndarray) -> float:
    return float(np.trapezoid(np.abs(psi) ** 2, xs))


def _log_derivative(Z: ImpedanceState, spec: PotentialSpec) -> complex:
    c = spec.constants
    return 1j * c.mass / c.hbar * Z.value


@dataclass
class _Anchors:
    """psi and psi' at both one-sided limits of every boundary."""

    psi_minus: list[complex]
    dpsi_minus: list[complex]
    psi_plus: list[complex]
    dpsi_plus: list[complex]


def _anchors(profile: ImpedanceProfile, psi0: complex) -> _Anchors:
    spec = profile.spec
    c = spec.constants
    xs = spec.boundaries
    n = len(xs)
    a = _Anchors([0j] * n, [0j] * n, [0j] * n, [0j] * n)
    psi = psi0
    Z = profile.left_tail
    dpsi = _log_derivative(Z, spec) * psi
    for i in range(n):
        zm = profile.minus[i]
        if i > 0:
            zp_prev = profile.plus[i - 1]
            w = profile.waves[i]
            dx = xs[i] - xs[i - 1]
            gx = w.gamma * dx
            shc = cmath.sinh(gx) / gx if abs(gx) > 1e-8 else 1.0 + gx * gx / 6.0
            p_prev, dp_prev = a.psi_plus[i - 1], a.dpsi_plus[i - 1]
            if zp_prev.node:
                psi = dp_prev * dx * shc
                dpsi = dp_prev * cmath.cosh(gx)
            elif zm.node:
                psi = 0j
                dpsi = p_prev * w.gamma * gx * shc + dp_prev * cmath.cosh(gx)
            else:
                psi = p_prev * psi_ratio(zp_prev, zm, w, dx, c)
        if not zm.node:
            dpsi = _log_derivative(zm, spec) * psi
        a.psi_minus[i], a.dpsi_minus[i] = psi, dpsi
        pt = spec.points[i]
        ratio = psi_jump_ratio(pt, c)
        b = pt.beta_tilde(c)
        g = 2.0 * c.mass * pt.delta_strength / c.hbar**2
        dpsi = g / (1.0 - b * b) * psi + dpsi / ratio
        psi = ratio * psi
        if not profile.plus[i].node:
            dpsi = _log_derivative(profile.plus[i], spec) * psi
        a.psi_plus[i], a.dpsi_plus[i] = psi, dpsi
    return a


def _flat(psi_a, dpsi_a, gamma, s):
    """psi(x_a + s) in a flat region from psi and psi' at x_a."""
    gs = gamma * s
    small = np.abs(gs) < 1e-8
    safe = np.where(small, 1.0, gs)
    shc = np.where(small, 1.0 + gs * gs / 6.0, np.sinh(safe) / safe)
    return psi_a * np.cosh(gs) + dpsi_a * s * shc


def _tail(psi_a, dpsi_a, gamma, s):
    """Exponential form, safe for long evanescent tails."""
    if gamma == 0:
        return psi_a + dpsi_a * s
    up = 0.5 * (psi_a + dpsi_a / gamma)
    down = 0.5 * (psi_a - dpsi_a / gamma)
    out = np.zeros_like(s, dtype=complex)
    if up != 0:
        out = out + up * np.exp(gamma * s)
    if down != 0:
        out = out + down * np.exp(-gamma * s)
    return out


def evaluate(profile: ImpedanceProfile, x, psi0: complex = 1.0, anchors: _Anchors | None = None) -> np.ndarray:
    """psi at ``x`` (points on a boundary take the left limit)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    spec = profile.spec
    xs = spec.boundaries
    out = np.zeros(x.shape, dtype=complex)
    if not xs:
        w = profile.waves[0]
        d = _log_derivative(profile.left_tail, spec) * psi0
        return _tail(psi0, d, w.gamma, x - 0.0)
    a = anchors or _anchors(profile, psi0)
    n = len(xs)
    # tails follow their own impedances, which may be set exactly (bound states)
    lt, rt = profile.left_tail, profile.right_tail
    m = x <= xs[0]
    d = a.dpsi_minus[0] if lt.node else _log_derivative(lt, spec) * a.psi_minus[0]
    out[m] = _tail(a.psi_minus[0], d, profile.waves[0].gamma, x[m] - xs[0])
    m = x > xs[-1]
    d = a.dpsi_plus[-1] if rt.node else _log_derivative(rt, spec) * a.psi_plus[-1]
    out[m] = _tail(a.psi_plus[-1], d, profile.waves[-1].gamma, x[m] - xs[-1])
    for i in range(1, n):
        lo, hi = xs[i - 1], xs[i]
        m = (x > lo) & (x <= hi)
        if not m.any():
            continue
        g = profile.waves[i].gamma
        xm = x[m]
        mid = 0.5 * (lo + hi)
        left = _flat(a.psi_plus[i - 1], a.dpsi_plus[i - 1], g, xm - lo)
        right = _flat(a.psi_minus[i], a.dpsi_minus[i], g, xm - hi)
        out[m] = np.where(xm <= mid, left, right)
    return out


def reconstruct(spec: PotentialSpec, profile: ImpedanceProfile, grid, psi0: complex = 1.0) -> WavefunctionSamples:
    """Sample psi on ``grid``, anchored to ``psi0`` at the left limit of the first boundary."""
    xs = np.asarray(grid, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("grid must be strictly increasing with at least two points")
    bounds = spec.boundaries
    if bounds and (xs[0] > bounds[0] or xs[-1] < bounds[-1]):
        raise ValueError("grid does not cover every boundary of the potential")
    psi = evaluate(profile, xs, psi0)
    c = spec.constants
    disc = [(p.position, complex(psi_jump_ratio(p, c))) for p in spec.nontrivial_points()]
    return WavefunctionSamples(xs, psi, trapezoid_norm(xs, psi), disc, profile.energy)


def normalize(samples: WavefunctionSamples, norm: float | None = None) -> WavefunctionSamples:
    """Scale to unit norm (trapezoid norm of the samples unless ``norm`` is given)."""
    n = samples.norm if norm is None else norm
    if not (n > 0 and math.isfinite(n)):
        raise NotNormalizableError("norm must be positive and finite; for scattering states emit |psi|^2")
    psi = samples.psi / math.sqrt(n)
    return replace(samples, psi=psi, norm=trapezoid_norm(samples.xs, psi))


def bound_state_profile(spec: PotentialSpec, E: float) -> ImpedanceProfile:
    """Profile of a bound state: decaying seed on the right, exact -z_L tail on the left."""
    if not E < asymptote_floor(spec):
        raise ValueError(f"E = {E} is not below the asymptotic floor")
    prof = fold_from_right(spec, E)
    zl = characteristic(E, spec.left_asymptote, spec.constants).z
    xs = spec.boundaries
    tail = ImpedanceState(-zl, xs[0] if xs else 0.0, "left")
    return replace(prof, left_tail=tail)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def exact_norm(profile: ImpedanceProfile, psi0: complex = 1.0) -> float:
    """Integral of |psi|^2 over the whole line for a bound-state profile.

    Gauss-Legendre on finite regions, closed form on the decaying tails.
    """
    spec = profile.spec
    xs = spec.boundaries
    a = _anchors(profile, psi0)
    wl, wr = profile.waves[0], profile.waves[-1]
    if not (wl.kappa > 0 and wr.kappa > 0):
        raise NotNormalizableError("profile has a propagating tail")
    total = abs(a.psi_minus[0]) ** 2 / (2 * wl.kappa) + abs(a.psi_plus[-1]) ** 2 / (2 * wr.kappa)
    for i in range(1, len(xs)):
        lo, hi = xs[i - 1], xs[i]
        pts = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
        vals = evaluate(profile, pts, psi0, a)
        total += 0.5 * (hi - lo) * float(np.sum(_GL_WEIGHTS * np.abs(vals) ** 2))
    return total


def bound_state_wavefunction(spec: PotentialSpec, E: float, grid) -> WavefunctionSamples:
    """Normalized bound state on ``grid``: real, positive in the left tail.

    Normalized with the exact norm over the whole line, not the sampled one,
    so the samples match the analytic state pointwise.
    """
    prof = bound_state_profile(spec, E)
    scale = 1.0 / math.sqrt(exact_norm(prof))
    samples = reconstruct(spec, prof, grid, psi0=scale)
    return replace(samples, psi=samples.psi.real.astype(complex))


def scattering_wavefunction(spec: PotentialSpec, E: float, grid, incident_side: str = "left") -> WavefunctionSamples:
    """Scattering state with unit incident amplitude (not normalizable)."""
    res = solve(spec, E, incident_side)
    xs_b = spec.boundaries
    waves = region_waves(spec, E)
    if incident_side == "left":
        prof = fold_from_right(spec, E, waves=waves)
        x0 = xs_b[0] if xs_b else 0.0
        k = waves[0].k
        psi0 = cmath.exp(1j * k * x0) + res.r * cmath.exp(-1j * k * x0)
        return reconstruct(spec, prof, grid, psi0)
    from .scattering import fold_from_left
    prof = fold_from_left(spec, E, waves=waves)
    # anchor on the transmitted wave at the left end
    x0 = xs_b[0] if xs_b else 0.0
    psi0 = res.t * cmath.exp(-1j * waves[0].k * x0)
    return reconstruct(spec, prof, grid, psi0)


def count_nodes(samples: WavefunctionSamples, rel_tol: float = 1e-8) -> int:
    """Sign changes of Re psi between samples, ignoring near-zero tail values."""
    re = samples.psi.real
    big = np.abs(re) > rel_tol * np.max(np.abs(re))
    s = np.sign(re[big])
    return int(np.sum(s[1:] != s[:-1]))


def schrodinger_residual(spec: PotentialSpec, samples: WavefunctionSamples) -> float:
    """max |-(hbar^2/2m) psi'' + (U - E) psi| on interior points away from boundaries."""
    if samples.energy is None:
        raise ValueError("samples carry no energy")
    c = spec.constants
    x, psi = samples.xs, samples.psi
    bounds = np.asarray(spec.boundaries)
    best = 0.0
    for j in range(1, len(x) - 1):
        lo, hi = x[j - 1], x[j + 1]
        if bounds.size and np.any((bounds >= lo) & (bounds <= hi)):
            continue
        h1, h2 = x[j] - lo, hi - x[j]
        d2 = 2.0 * (psi[j + 1] * h1 - psi[j] * (h1 + h2) + psi[j - 1] * h2) / (h1 * h2 * (h1 + h2))
        U = spec.height_at(x[j])
        best = max(best, abs(-(c.hbar**2) / (2 * c.mass) * d2 + (U - samples.energy) * psi[j]))
    return best


def boundary_values(profile: ImpedanceProfile, psi0: complex = 1.0) -> list[tuple[float, complex, complex]]:
    """(x_i, psi(x_i - 0), psi(x_i + 0)) for every boundary."""
    a = _anchors(profile, psi0)
    return list(zip(profile.spec.boundaries, a.psi_minus, a.psi_plus))
