"""Piecewise-constant potentials decorated with delta and delta-prime points.

A potential is stored in canonical form: a strictly increasing list of
boundary coordinates, the constant heights of the ``n + 1`` regions they
delimit, and one point interaction per boundary (zero strengths where a
boundary is only a step).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class PotentialError(ValueError):
    """Raised for malformed or ambiguous potential descriptions."""


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise PotentialError(f"hbar must be positive and finite, got {self.hbar}")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise PotentialError(f"mass must be positive and finite, got {self.mass}")


@dataclass(frozen=True)
class PointInteraction:
    """``delta_strength * delta(x - position) + delta_prime_strength * delta'(x - position)``."""

    position: float
    delta_strength: float = 0.0
    delta_prime_strength: float = 0.0

    def __post_init__(self):
        for name in ("position", "delta_strength", "delta_prime_strength"):
            if not math.isfinite(getattr(self, name)):
                raise PotentialError(f"point interaction {name} must be finite")

    @property
    def is_trivial(self) -> bool:
        return self.delta_strength == 0.0 and self.delta_prime_strength == 0.0

    def beta_tilde(self, constants: PhysicalConstants) -> float:
        return constants.mass * self.delta_prime_strength / constants.hbar**2


@dataclass(frozen=True)
class Region:
    left: float
    right: float
    height: float

    def __post_init__(self):
        if not math.isfinite(self.height):
            raise PotentialError("region height must be finite")
        if math.isnan(self.left) or math.isnan(self.right):
            raise PotentialError("region edges must not be NaN")
        if not self.left < self.right:
            raise PotentialError(f"region left edge {self.left} must be below right edge {self.right}")

    def contains(self, x: float) -> bool:
        return self.left < x < self.right


@dataclass(frozen=True)
class PotentialSpec:
    """Canonical potential: regions[i] spans (boundaries[i-1], boundaries[i])."""

    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    regions: tuple[Region, ...] = (Region(-math.inf, math.inf, 0.0),)
    points: tuple[PointInteraction, ...] = ()

    def __post_init__(self):
        regions = self.regions
        if not regions or regions[0].left != -math.inf or regions[-1].right != math.inf:
            raise PotentialError("regions must start at -inf and end at +inf")
        for a, b in zip(regions, regions[1:]):
            if a.right != b.left:
                raise PotentialError(f"regions do not tile the line at {a.right} / {b.left}")
        if len(self.points) != len(regions) - 1:
            raise PotentialError("canonical spec needs one point entry per boundary")
        for r, p in zip(regions, self.points):
            if p.position != r.right:
                raise PotentialError("point interaction not attached to its boundary")

    @property
    def boundaries(self) -> tuple[float, ...]:
        return tuple(r.right for r in self.regions[:-1])

    @property
    def heights(self) -> tuple[float, ...]:
        return tuple(r.height for r in self.regions)

    @property
    def left_asymptote(self) -> float:
        return self.regions[0].height

    @property
    def right_asymptote(self) -> float:
        return self.regions[-1].height

    def height_at(self, x: float) -> float:
        """Background height at ``x``; ``x`` must not sit on a boundary."""
        for r in self.regions:
            if r.contains(x):
                return r.height
        raise PotentialError(f"x = {x} lies on a boundary")

    def nontrivial_points(self) -> list[PointInteraction]:
        return [p for p in self.points if not p.is_trivial]


def canonicalize(
    raw_regions: Sequence[Region] | None = None,
    raw_points: Iterable[PointInteraction] = (),
    constants: PhysicalConstants | None = None,
) -> PotentialSpec:
    """Merge segment edges and point positions into one sorted boundary list.

    Regions must tile the real line. A point sitting on a segment edge is
    attached to that edge; a point inside a region splits it in two pieces
    of the same height. Two points at the same coordinate are rejected.
    Redundant edges (equal heights, no point) are kept, which keeps the
    operation idempotent.
    """
    constants = constants or PhysicalConstants()
    if not raw_regions:
        raw_regions = [Region(-math.inf, math.inf, 0.0)]
    regions = sorted(raw_regions, key=lambda r: r.left)
    if regions[0].left != -math.inf:
        raise PotentialError("no region extends to -inf")
    if regions[-1].right != math.inf:
        raise PotentialError("no region extends to +inf")
    for a, b in zip(regions, regions[1:]):
        if a.right > b.left:
            raise PotentialError(f"overlapping regions near x = {b.left}")
        if a.right < b.left:
            raise PotentialError(f"gap between regions: ({a.right}, {b.left})")

    points: dict[float, PointInteraction] = {}
    for p in raw_points:
        if p.position in points:
            raise PotentialError(f"duplicate point interaction at x = {p.position}")
        points[p.position] = p

    edges = {r.right for r in regions[:-1]}
    xs = sorted(edges | set(points))

    heights = []
    for lo, hi in zip([-math.inf, *xs], [*xs, math.inf]):
        for r in regions:
            if r.left <= lo and hi <= r.right:
                heights.append(r.height)
                break
        else:  # pragma: no cover - tiling checked above
            raise PotentialError("internal tiling error")

    bounds = [-math.inf, *xs, math.inf]
    new_regions = tuple(Region(bounds[i], bounds[i + 1], h) for i, h in enumerate(heights))
    new_points = tuple(points.get(x, PointInteraction(x)) for x in xs)
    return PotentialSpec(constants, new_regions, new_points)


def _float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise PotentialError(f"line {lineno}: cannot parse number {tok!r}") from None


def parse_potential_file(text: str) -> PotentialSpec:
    """Parse the line-oriented potential format.

    Keywords: ``hbar``, ``mass``, ``segment L R U``, ``delta X A``,
    ``deltaprime X B`` and ``point X A B``. ``#`` starts a comment. With
    no ``segment`` lines the background is zero everywhere; explicit
    segments must tile the line.
    """
    hbar, mass = 1.0, 1.0
    regions: list[Region] = []
    points: list[PointInteraction] = []
    arity = {"hbar": 1, "mass": 1, "segment": 3, "delta": 2, "deltaprime": 2, "point": 3}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        key = key.lower()
        if key not in arity:
            raise PotentialError(f"line {lineno}: unknown keyword {key!r}")
        if len(args) != arity[key]:
            raise PotentialError(f"line {lineno}: {key} expects {arity[key]} values, got {len(args)}")
        vals = [_float(a, lineno) for a in args]
        if key != "segment" and not all(math.isfinite(v) for v in vals):
            raise PotentialError(f"line {lineno}: non-finite value")
        try:
            if key in ("hbar", "mass") and not vals[0] > 0:
                raise PotentialError(f"{key} must be positive, got {vals[0]}")
            if key == "hbar":
                hbar = vals[0]
            elif key == "mass":
                mass = vals[0]
            elif key == "segment":
                left, right, height = vals
                if math.isinf(left) and left > 0 or math.isinf(right) and right < 0:
                    raise PotentialError("inf literals only allowed as outer edges")
                regions.append(Region(left, right, height))
            elif key == "delta":
                points.append(PointInteraction(vals[0], vals[1], 0.0))
            elif key == "deltaprime":
                points.append(PointInteraction(vals[0], 0.0, vals[1]))
            else:
                points.append(PointInteraction(*vals))
        except PotentialError as exc:
            raise PotentialError(f"line {lineno}: {exc}") from None

    return canonicalize(regions, points, PhysicalConstants(hbar, mass))


def format_potential(spec: PotentialSpec) -> str:
    """Serialize a spec back into the file format (round-trips through the parser)."""
    lines = [f"hbar {spec.constants.hbar!r}", f"mass {spec.constants.mass!r}"]
    for r in spec.regions:
        lines.append(f"segment {r.left!r} {r.right!r} {r.height!r}")
    for p in spec.nontrivial_points():
        lines.append(f"point {p.position!r} {p.delta_strength!r} {p.delta_prime_strength!r}")
    return "\n".join(lines) + "\n"
