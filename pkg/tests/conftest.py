import math
import random

import pytest

from qwi.potential import PhysicalConstants, PointInteraction, Region, canonicalize


def random_spec(rng: random.Random, max_regions=8, max_points=4, height=5.0, alpha=3.0, beta_tilde=0.9,
                span=3.0, constants=None):
    """Random piecewise potential with delta / delta-prime points, ~30% of them on edges."""
    constants = constants or PhysicalConstants()
    n_regions = rng.randint(1, max_regions)
    edges = sorted({round(rng.uniform(-span, span), 6) for _ in range(n_regions - 1)})
    bounds = [-math.inf, *edges, math.inf]
    regions = [Region(a, b, rng.uniform(-height, height)) for a, b in zip(bounds, bounds[1:])]
    points, used = [], set()
    for _ in range(rng.randint(0, max_points)):
        if edges and rng.random() < 0.3:
            x = rng.choice(edges)
        else:
            x = round(rng.uniform(-span, span), 6)
        if x in used:
            continue
        used.add(x)
        bt = rng.uniform(-beta_tilde, beta_tilde) if rng.random() < 0.6 else 0.0
        beta = bt * constants.hbar**2 / constants.mass
        points.append(PointInteraction(x, rng.uniform(-alpha, alpha), beta))
    return canonicalize(regions, points, constants)


def random_energy(rng: random.Random, spec, lo=0.05, hi=5.0):
    return max(spec.left_asymptote, spec.right_asymptote) + rng.uniform(lo, hi)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = request.config.__dict__.setdefault("_qwi_acceptance", [])

    def record(number, ok, detail):
        lines.append((number, f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_qwi_acceptance", [])
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
