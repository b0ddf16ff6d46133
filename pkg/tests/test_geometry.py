"""Cone-complex tests: validation, charts, fibration data, boundary charts."""

from __future__ import annotations

import os
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wallcross.errors import (
    BadDivisorMeetsGoodCurve,
    ChainTooShort,
    DisconnectedGoodBoundary,
    GeometryError,
    MissingNDimCone,
    NotAdjacent,
    NotRelative,
    NotSubmersion,
)
from wallcross.geometry import (
    DivisorTable,
    GenericPointSampler,
    PointInChart,
    boundary_chart,
    build_complex,
    geometry_from_json,
    geometry_to_json,
    load_geometry,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

IDENT3 = tuple(tuple(1 if i == j else 0 for j in range(3)) for i in range(3))


def simple_divisors(k, a=None, b=None):
    return DivisorTable(
        names=tuple(f"D{i}" for i in range(k)),
        a_coeffs=tuple(Fraction(a[i]) if a else Fraction(0) for i in range(k)),
        fiber_multiplicities=tuple(b) if b else None)


def fan_2d(num_rays, curve_rank=1, intersections=None, kinks=None, **kw):
    """Complete 2D fan with rays 0..num_rays-1 glued in a cycle."""
    strata = [(i, (i + 1) % num_rays) for i in range(num_rays)]
    return build_complex(simple_divisors(num_rays, **kw), strata,
                         intersections or {}, kinks or {},
                         curve_rank=curve_rank)


# -- validation --------------------------------------------------------------

def test_one_dim_two_rays_valid():
    cx = build_complex(simple_divisors(2), [(0,), (1,)], curve_rank=1, n=1)
    assert cx.maximal_cones == [(0,), (1,)]
    assert cx.codim1_cones() == []


def test_missing_top_cone():
    with pytest.raises(MissingNDimCone):
        build_complex(simple_divisors(2), [(0,), (1,)], curve_rank=1, n=2)


def test_bad_divisor_meets_good_curve():
    # ray 0 is good and extends to the stratum {0,1} whose divisor 1 is bad
    with pytest.raises(BadDivisorMeetsGoodCurve):
        build_complex(simple_divisors(3, a=(0, 1, 0)),
                      [(0, 1), (0, 2)], curve_rank=1, n=2)


def test_disconnected_good_boundary():
    # two 2-cones sharing no ray: boundary graph of the origin stratum
    # splits into two components
    with pytest.raises(DisconnectedGoodBoundary):
        build_complex(simple_divisors(4), [(0, 1), (2, 3)],
                      curve_rank=1, n=2)


def test_interior_facet_needs_intersection_numbers():
    with pytest.raises(GeometryError):
        fan_2d(3)  # all three rays interior, no numbers given


# -- chart transitions -------------------------------------------------------

def quadrant_pair(number, kink=(1,)):
    """Two 2-cones glued along ray 0 with a single intersection number."""
    return build_complex(
        simple_divisors(3), [(0, 1), (0, 2)],
        intersections={(0,): (number,)}, kinks={(0,): kink}, curve_rank=1)


def test_transition_identity_on_same_cone():
    cx = quadrant_pair(0)
    m, kink = cx.chart_transition((0, 1), (0, 1))
    assert m == ((1, 0), (0, 1))
    assert kink == (0,)


def test_transition_zero_number_flips():
    cx = quadrant_pair(0)
    m, kink = cx.chart_transition((0, 1), (0, 2))
    # shared ray fixed, leftover ray reverses
    assert m == ((1, 0), (0, -1))
    assert kink == (1,)


def test_transition_hirzebruch_number():
    cx = quadrant_pair(-1)
    m, _ = cx.chart_transition((0, 1), (0, 2))
    # image of e2 is -e2' + e1'
    col = (m[0][1], m[1][1])
    assert col == (1, -1)


def test_transition_round_trip_inverse():
    cx = quadrant_pair(-2)
    m12, _ = cx.chart_transition((0, 1), (0, 2))
    m21, _ = cx.chart_transition((0, 2), (0, 1))
    prod = tuple(tuple(sum(m12[i][k] * m21[k][j] for k in range(2))
                       for j in range(2)) for i in range(2))
    assert prod == ((1, 0), (0, 1))


def test_not_adjacent():
    cx = fan_2d(4, intersections={(i,): (0,) for i in range(4)})
    with pytest.raises(NotAdjacent):
        cx.chart_transition((0, 1), (2, 3))


@settings(max_examples=40, deadline=None)
@given(st.integers(-4, 4))
def test_property_transitions_mutually_inverse(number):
    cx = quadrant_pair(number)
    m12, _ = cx.chart_transition((0, 1), (0, 2))
    m21, _ = cx.chart_transition((0, 2), (0, 1))
    prod = [[sum(m12[i][k] * m21[k][j] for k in range(2)) for j in range(2)]
            for i in range(2)]
    assert prod == [[1, 0], [0, 1]]


# -- the blowup threefold fixture -------------------------------------------

@pytest.fixture(scope="module")
def blowup():
    return load_geometry(os.path.join(FIXTURES, "blowup_threefold.json"))


def test_blowup_validates(blowup):
    assert blowup.n == 3
    assert blowup.curve_rank == 5
    assert len(blowup.maximal_cones) == 10
    assert len(blowup.interior_codim1()) == 15
    assert blowup.boundary_codim1() == []


def test_blowup_star_loops_of_codim1_trivial(blowup):
    # crossing an interior facet back and forth composes to the identity
    for rho in blowup.interior_codim1():
        s1, s2 = blowup.max_cones_containing(rho)
        assert blowup.loop_matrix([s1, s2, s1]) == IDENT3


def test_blowup_monodromy_shear(blowup):
    # the loop of the four maximal cones around the ray of D_{1,inf}
    # is the elementary shear: the affine structure is singular there
    loop = [(1, 2, 3), (1, 3, 5), (3, 5, 6), (2, 3, 6), (1, 2, 3)]
    assert blowup.loop_matrix(loop) == ((1, 1, 0), (0, 1, 0), (0, 0, 1))


def test_blowup_some_monodromy_trivial(blowup):
    loop = [(0, 1, 2), (0, 1, 5), (1, 3, 5), (1, 2, 3), (0, 1, 2)]
    assert blowup.loop_matrix(loop) == IDENT3


def test_blowup_json_round_trip(blowup):
    again = geometry_from_json(geometry_to_json(blowup))
    assert again == blowup


def test_unknown_keys_rejected(blowup):
    data = geometry_to_json(blowup)
    data["surprise"] = 1
    with pytest.raises(GeometryError):
        geometry_from_json(data)


# -- relative structure ------------------------------------------------------

def relative_quadrant(b):
    return build_complex(
        simple_divisors(2, b=b), [(0, 1)], curve_rank=1, relative=True)


def test_absolute_complex_rejects_fibration_queries():
    cx = build_complex(simple_divisors(2), [(0, 1)], curve_rank=1)
    with pytest.raises(NotRelative):
        cx.fibration_value(PointInChart((0, 1), (1, 1)))


def test_fibration_value_on_ray_point():
    cx = relative_quadrant((1, 1))
    assert cx.fibration_value(PointInChart((0, 1), (1, 0))) == 1


def test_boundary_classification_depends_on_weights():
    cx = relative_quadrant((1, 0))
    assert not cx.cone_is_boundary((0,))
    assert cx.cone_is_boundary((1,))


def test_submersion_violation_detected():
    # weights that are not linear across the transition with number 0
    table = simple_divisors(3, b=(0, 1, 2))
    with pytest.raises(NotSubmersion):
        build_complex(table, [(0, 1), (0, 2)],
                      intersections={(0,): (0,)}, curve_rank=1, relative=True)


def test_submersion_ok_when_linear():
    # across e2 -> -e2' the values must be opposite: b1 = 1, b2 = 0 fails on
    # the flip unless b1 + b2 = -number * b_shared; with number 0, b1 = -b2
    # is impossible for nonnegative weights unless both vanish
    table = simple_divisors(3, b=(1, 0, 0))
    cx = build_complex(table, [(0, 1), (0, 2)],
                       intersections={(0,): (0,)}, curve_rank=1,
                       relative=True)
    assert not cx.cone_is_boundary((0,))
    assert cx.cone_is_boundary((1,))


# -- boundary chart recursion ------------------------------------------------

def test_boundary_chart_initial_rays():
    chart = boundary_chart([])
    assert chart.rays == ((0, 1), (1, 0))


def test_boundary_chart_minus_one():
    chart = boundary_chart([-1])
    assert chart.rays[-1] == (1, -1)


def test_boundary_chart_minus_two():
    chart = boundary_chart([-2])
    assert chart.rays[-1] == (2, -1)


def test_boundary_chart_closing_chain():
    # chain of self-intersections 0, -1, ... : rays (0,1),(1,0),(0,-1) closes
    chart = boundary_chart([0], [[3]], boundary_numbers=[3])
    assert chart.rays == ((0, 1), (1, 0), (0, -1))
    # the embedding correction at the last ray equals the boundary number
    assert chart.psi[0][-1] == 3


def test_boundary_chart_recursion_oracle():
    # independent recursion replay for a longer random-ish chain
    cs = [-1, -2, -3]
    chart = boundary_chart(cs, [[1, 0, 2]])
    rays = [(0, 1), (1, 0)]
    psi = [0, 0]
    for ell, c2 in enumerate(cs, start=1):
        rays.append((-c2 * rays[ell][0] - rays[ell - 1][0],
                     -c2 * rays[ell][1] - rays[ell - 1][1]))
        psi.append([1, 0, 2][ell - 1] - c2 * psi[ell] - psi[ell - 1])
    assert chart.rays == tuple(rays)
    assert chart.psi[0] == tuple(psi)


def test_boundary_chart_fibration_functional():
    # the linear functional (1,0) takes value 0 on the first ray and 1 on
    # the second: the fan sits over the tropicalized fibration correctly
    chart = boundary_chart([-1, -1])
    assert chart.rays[0][0] == 0
    assert chart.rays[1][0] == 1


# -- generic point sampling --------------------------------------------------

def test_sampler_deterministic_and_generic():
    s1 = GenericPointSampler(seed=7)
    s2 = GenericPointSampler(seed=7)
    hyper = [(1, -1), (1, 0), (0, 1)]
    p1 = s1.sample((0, 1), 2, hyper)
    p2 = s2.sample((0, 1), 2, hyper)
    assert p1 == p2
    for h in hyper:
        assert sum(Fraction(a) * c for a, c in zip(h, p1.coords)) != 0
