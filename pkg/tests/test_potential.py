import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwi.potential import (PhysicalConstants, PointInteraction, PotentialError, PotentialSpec, Region,
                           canonicalize, format_potential, parse_potential_file)

INF = math.inf


def flat(*edges_heights):
    """Regions from alternating heights and edges: flat(h0, x0, h1, x1, h2)."""
    hs = edges_heights[::2]
    xs = [-INF, *edges_heights[1::2], INF]
    return [Region(a, b, h) for a, b, h in zip(xs, xs[1:], hs)]


class TestCanonicalize:
    def test_single_delta_on_flat_background(self):
        spec = canonicalize(flat(0.0, 0.0, 0.0), [PointInteraction(0.0, 1.0)])
        assert spec.boundaries == (0.0,)
        assert spec.points[0].delta_strength == 1.0

    def test_interior_point_splits_region(self):
        spec = canonicalize(flat(0.0, 0.0, 5.0, 1.0, 0.0), [PointInteraction(0.5, 1.0)])
        assert spec.boundaries == (0.0, 0.5, 1.0)
        assert spec.heights == (0.0, 5.0, 5.0, 0.0)

    def test_point_on_edge_is_merged(self):
        spec = canonicalize(flat(0.0, 1.0, 2.0), [PointInteraction(1.0, -0.7, 0.1)])
        assert spec.boundaries == (1.0,)
        assert spec.heights == (0.0, 2.0)
        p = spec.points[0]
        assert (p.delta_strength, p.delta_prime_strength) == (-0.7, 0.1)
        # N < N1 + N2 when an edge and a point coincide
        assert len(spec.boundaries) < 1 + 1

    def test_unsorted_input_comes_out_ascending(self):
        regions = flat(1.0, -1.0, 2.0, 1.0, 3.0)[::-1]
        pts = [PointInteraction(0.5, 1.0), PointInteraction(-2.0, 1.0)]
        spec = canonicalize(regions, pts)
        assert spec.boundaries == (-2.0, -1.0, 0.5, 1.0)
        assert spec.heights == (1.0, 1.0, 2.0, 2.0, 3.0)

    def test_default_background_is_zero(self):
        spec = canonicalize(None, [PointInteraction(0.0, 1.0)])
        assert spec.heights == (0.0, 0.0)

    def test_zero_strength_point_kept_as_plain_boundary(self):
        spec = canonicalize(flat(0.0, 0.0, 0.0), [PointInteraction(0.3)])
        assert spec.boundaries == (0.0, 0.3)
        assert spec.nontrivial_points() == []

    @pytest.mark.parametrize("regions", [
        [Region(-INF, 0.0, 0.0), Region(1.0, INF, 0.0)],
        [Region(-INF, 1.0, 0.0), Region(0.0, INF, 0.0)],
        [Region(-1.0, 0.0, 0.0), Region(0.0, INF, 0.0)],
        [Region(-INF, 0.0, 0.0), Region(0.0, 3.0, 0.0)],
    ])
    def test_tiling_errors(self, regions):
        with pytest.raises(PotentialError):
            canonicalize(regions, [])

    def test_duplicate_points_rejected(self):
        with pytest.raises(PotentialError, match="duplicate"):
            canonicalize(None, [PointInteraction(0.0, 1.0), PointInteraction(0.0, 2.0)])

    @pytest.mark.parametrize("kw", [{"delta_strength": math.nan}, {"delta_prime_strength": math.inf},
                                    {"position": math.inf}])
    def test_non_finite_point_rejected(self, kw):
        args = {"position": 0.0, **kw}
        with pytest.raises(PotentialError):
            PointInteraction(**args)

    @pytest.mark.parametrize("hbar,mass", [(0.0, 1.0), (1.0, -1.0), (math.inf, 1.0)])
    def test_bad_constants(self, hbar, mass):
        with pytest.raises(PotentialError):
            PhysicalConstants(hbar, mass)

    def test_spec_rejects_unattached_points(self):
        with pytest.raises(PotentialError):
            PotentialSpec(PhysicalConstants(), (Region(-INF, 0.0, 0.0), Region(0.0, INF, 0.0)),
                          (PointInteraction(1.0),))

    def test_height_at(self):
        spec = canonicalize(flat(0.0, 0.0, 5.0, 1.0, -1.0), [])
        assert spec.height_at(-3.0) == 0.0
        assert spec.height_at(0.5) == 5.0
        assert spec.height_at(9.0) == -1.0
        with pytest.raises(PotentialError):
            spec.height_at(1.0)


edge = st.floats(-5, 5, allow_nan=False).map(lambda v: round(v, 3))


@st.composite
def raw_potentials(draw):
    edges = sorted(set(draw(st.lists(edge, max_size=6))))
    heights = draw(st.lists(st.floats(-5, 5), min_size=len(edges) + 1, max_size=len(edges) + 1))
    xs = [-INF, *edges, INF]
    regions = [Region(a, b, h) for a, b, h in zip(xs, xs[1:], heights)]
    positions = sorted(set(draw(st.lists(edge, max_size=4))))
    points = [PointInteraction(x, draw(st.floats(-3, 3)), draw(st.floats(-0.9, 0.9))) for x in positions]
    return regions, points, edges


@settings(max_examples=200, deadline=None)
@given(raw_potentials())
def test_canonicalize_properties(raw):
    regions, points, edges = raw
    spec = canonicalize(regions, points)
    xs = spec.boundaries
    assert all(a < b for a, b in zip(xs, xs[1:]))
    n1, n2 = len(edges), len(points)
    assert max(n1, n2) <= len(xs) <= n1 + n2
    # idempotent
    again = canonicalize(spec.regions, spec.points, spec.constants)
    assert again == spec
    # every non-boundary x has exactly one height
    probes = [x + 1e-4 for x in xs] + [-100.0, 100.0]
    for x in probes:
        if x in xs:
            continue
        assert sum(1 for r in spec.regions if r.contains(x)) == 1


class TestParse:
    def test_single_delta(self):
        spec = parse_potential_file("delta 0.0 1.0\n")
        assert spec.boundaries == (0.0,)
        assert spec.points[0].delta_strength == 1.0
        assert spec.heights == (0.0, 0.0)

    def test_deltaprime_with_segments(self):
        spec = parse_potential_file("segment -inf 0 0\nsegment 0 inf 0\ndeltaprime 0 0.5\n")
        p = spec.points[0]
        assert (p.delta_strength, p.delta_prime_strength) == (0.0, 0.5)

    def test_constants_passthrough(self):
        spec = parse_potential_file("hbar 2.0\nmass 0.5\ndelta 0 1\n")
        assert spec.constants == PhysicalConstants(2.0, 0.5)

    def test_defaults(self):
        assert parse_potential_file("# empty\n").constants == PhysicalConstants()

    def test_comments_and_point(self):
        text = "# header\npoint 1.5 -1 0.25  # both\n\nsegment -inf 1.5 0\nsegment 1.5 inf 2\n"
        spec = parse_potential_file(text)
        assert spec.boundaries == (1.5,)
        assert spec.heights == (0.0, 2.0)

    @pytest.mark.parametrize("text,line", [
        ("delta 0 1\nfoo 1\n", 2),
        ("delta 0\n", 1),
        ("\n\ndelta x 1\n", 3),
        ("segment -inf 0 0\nsegment inf 1 0\n", 2),
        ("delta 0 inf\n", 1),
        ("hbar -1\n", 1),
    ])
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(PotentialError, match=f"line {line}"):
            parse_potential_file(text)

    def test_gap_reported(self):
        with pytest.raises(PotentialError, match="gap"):
            parse_potential_file("segment -inf 0 0\nsegment 1 inf 0\n")

    def test_round_trip(self):
        text = "hbar 1.5\nsegment -inf -1 0\nsegment -1 2 3\nsegment 2 inf 1\npoint 0 -1 0.3\ndelta 2 0.5\n"
        spec = parse_potential_file(text)
        assert parse_potential_file(format_potential(spec)) == spec
