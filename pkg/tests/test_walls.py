"""Wall structure tests: assembly, evaluation, equivalence, crossing, slabs."""

from __future__ import annotations

import json
import os
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wallcross.errors import (
    ClassInIdeal,
    InadmissibleWallDirection,
    NonReducedFiber,
    SingularPoint,
    WallError,
)
from wallcross.geometry import (
    DivisorTable,
    PointInChart,
    build_complex,
    load_geometry,
)
from wallcross.ring import RingElement, Truncation
from wallcross.walls import (
    SlabData,
    SlabRingElement,
    Wall,
    WallStructure,
    apply_theta,
    assemble_canonical,
    counts_from_json,
    cross_wall,
    equivalent,
    planar_chambers,
    refine,
    relative_restrict,
    slab_localize,
    truncation_from_json,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def divisors(k, b=None):
    return DivisorTable(names=tuple(f"D{i}" for i in range(k)),
                        a_coeffs=(Fraction(0),) * k,
                        fiber_multiplicities=tuple(b) if b else None)


def quadrant_complex(curve_rank=1):
    return build_complex(divisors(2), [(0, 1)], curve_rank=curve_rank)


def two_cell_complex(number=0, kink=(1,)):
    return build_complex(divisors(3), [(0, 1), (0, 2)],
                         intersections={(0,): (number,)},
                         kinks={(0,): kink}, curve_rank=1)


T2 = Truncation.degree(1, 2)


def quadrant_wall(trunc=T2, coeff=1):
    cx = quadrant_complex()
    f = RingElement.one((0, 1), trunc, 2).add(
        RingElement.monomial((1,), (-1, -1), coeff, (0, 1), trunc))
    wall = Wall(cone=(0, 1), support=((1, 1),), function=f)
    return WallStructure(complex=cx, trunc=trunc, walls=(wall,))


# -- assembly ----------------------------------------------------------------

def count_entry(k=1, W="1", cone=(0, 1), support=((1, 1),), u=(1, 1),
                A=(1,)):
    return {"max_cone": list(cone), "support": [list(g) for g in support],
            "u": list(u), "A": list(A), "W": W, "k": k, "aut": 1}


def test_assemble_simple_wall():
    cx = quadrant_complex()
    t1 = Truncation.degree(1, 1)
    s = assemble_canonical(cx, [count_entry()], t1)
    assert len(s.walls) == 1
    f = s.walls[0].function
    assert f.coefficient((0,), (0, 0)) == 1
    assert f.coefficient((1,), (-1, -1)) == 1
    assert len(f.terms) == 2


def test_assemble_zero_weight_dropped():
    cx = quadrant_complex()
    s = assemble_canonical(cx, [count_entry(W="0")], T2)
    assert s.walls == ()
    assert s.dropped_trivial == 1


def test_assemble_log_series_collapses():
    # weights (-1)^(k-1)/k^2 with index k assemble to a binomial function
    cx = quadrant_complex()
    t4 = Truncation.degree(1, 4)
    entries = [count_entry(k=k, W=f"{(-1) ** (k - 1)}/{k * k}",
                           u=(k, k), A=(k,)) for k in range(1, 5)]
    s = assemble_canonical(cx, entries, t4)
    assert len(s.walls) == 1
    expected = RingElement.one((0, 1), t4, 2).add(
        RingElement.monomial((1,), (-1, -1), 1, (0, 1), t4))
    assert s.walls[0].function == expected


def test_assemble_rejects_trivial_class():
    cx = quadrant_complex()
    with pytest.raises(ClassInIdeal):
        assemble_canonical(cx, [count_entry(A=(0,))], T2)


def test_assemble_skips_truncated_class():
    cx = quadrant_complex()
    s = assemble_canonical(cx, [count_entry(A=(3,))], T2)
    assert s.walls == ()


def test_assemble_rejects_non_tangent_direction():
    cx = quadrant_complex()
    with pytest.raises(InadmissibleWallDirection):
        assemble_canonical(cx, [count_entry(u=(1, 0))], T2)


def test_assemble_merges_decorated_entries():
    # two decorated families on the same (support, u, A) aggregate W/|Aut|
    cx = quadrant_complex()
    t1 = Truncation.degree(1, 1)
    e1 = count_entry(W="1/2")
    e2 = count_entry(W="1")
    e2["aut"] = 2
    s = assemble_canonical(cx, [e1, e2], t1)
    assert s.walls[0].function.coefficient((1,), (-1, -1)) == 1


# -- evaluation --------------------------------------------------------------

def test_f_at_off_walls_is_one():
    s = quadrant_wall()
    x = PointInChart((0, 1), (Fraction(2), Fraction(1)))
    assert s.f_at(x).is_one()


def test_f_at_on_wall_gives_function():
    s = quadrant_wall()
    x = PointInChart((0, 1), (Fraction(3), Fraction(3)))
    assert s.f_at(x) == s.walls[0].function


def test_f_at_transversal_crossing_is_singular():
    cx = quadrant_complex()
    f1 = RingElement.one((0, 1), T2, 2).add(
        RingElement.monomial((1,), (-1, -1), 1, (0, 1), T2))
    f2 = RingElement.one((0, 1), T2, 2).add(
        RingElement.monomial((1,), (-1, -2), 1, (0, 1), T2))
    s = WallStructure(complex=cx, trunc=T2, walls=(
        Wall(cone=(0, 1), support=((1, 1),), function=f1),
        Wall(cone=(0, 1), support=((1, 2),), function=f2)))
    with pytest.raises(SingularPoint):
        s.f_at(PointInChart((0, 1), (Fraction(0), Fraction(0))))


# -- equivalence -------------------------------------------------------------

def test_equivalent_ignores_trivial_wall():
    s = quadrant_wall()
    one = RingElement.one((0, 1), T2, 2)
    s2 = s.with_walls(list(s.walls) +
                      [Wall(cone=(0, 1), support=((1, 2),), function=one)])
    ok, _ = equivalent(s, s2)
    assert ok


def test_equivalent_square_vs_coincident_pair():
    s = quadrant_wall()
    w = s.walls[0]
    squared = s.with_walls([Wall(w.cone, w.support,
                                 w.function.mul(w.function))])
    doubled = s.with_walls([w, Wall(w.cone, w.support, w.function)])
    ok, _ = equivalent(squared, doubled)
    assert ok


def test_equivalent_detects_higher_order_difference():
    s1 = quadrant_wall()
    w = s1.walls[0]
    f2 = w.function.add(
        RingElement.monomial((2,), (-2, -2), 1, (0, 1), T2))
    s2 = s1.with_walls([Wall(w.cone, w.support, f2)])
    ok, witness = equivalent(s1, s2)
    assert not ok
    assert witness is not None


# -- refinement --------------------------------------------------------------

def test_refine_merges_coincident_supports():
    s = quadrant_wall()
    w = s.walls[0]
    doubled = s.with_walls([w, Wall(w.cone, ((2, 2),), w.function)])
    r = refine(doubled)
    assert len(r.walls) == 1
    assert r.walls[0].function == w.function.mul(w.function)
    ok, _ = equivalent(r, doubled)
    assert ok


def test_planar_chambers_of_quadrant():
    rs = planar_chambers(quadrant_wall())
    assert len(rs.chambers) == 2
    assert rs.joints == (((0, 1), (1, 1)),)


# -- crossing ----------------------------------------------------------------

def ray_wall(exponent=(1, 0), support=((1, 0),), trunc=T2):
    cx = quadrant_complex()
    f = RingElement.one((0, 1), trunc, 2).add(
        RingElement.monomial((1,), exponent, 1, (0, 1), trunc))
    return Wall(cone=(0, 1), support=support, function=f)


def test_cross_wall_tangent_monomial_fixed():
    w = ray_wall()
    z = RingElement.monomial((0,), (1, 0), 1, (0, 1), T2)
    assert cross_wall(z, w, source_side=(0, 1)) == z


def test_cross_wall_positive_pairing():
    w = ray_wall()
    z = RingElement.monomial((0,), (0, 1), 1, (0, 1), T2)
    got = cross_wall(z, w, source_side=(0, 1))
    assert got == w.function.mul(z)


def test_cross_wall_negative_pairing_inverts():
    w = ray_wall()
    z = RingElement.monomial((0,), (0, -1), 1, (0, 1), T2)
    got = cross_wall(z, w, source_side=(0, 1))
    expected = RingElement.from_json(
        [{"A": [0], "m": [0, -1], "c": "1"},
         {"A": [1], "m": [1, -1], "c": "-1"},
         {"A": [2], "m": [2, -1], "c": "1"}], (0, 1), T2, 2)
    assert got == expected


def test_cross_wall_round_trip_identity():
    w = ray_wall()
    f = RingElement.from_json(
        [{"A": [0], "m": [0, 1], "c": "1"},
         {"A": [1], "m": [2, -1], "c": "2/3"}], (0, 1), T2, 2)
    there = cross_wall(f, w, source_side=(0, 1))
    back = cross_wall(there, w, source_side=(0, -1))
    assert back == f


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(-2, 2),
                          st.integers(-2, 2),
                          st.fractions(min_value=-2, max_value=2)),
                max_size=3))
def test_property_crossing_is_automorphism(spec):
    w = ray_wall()
    f = RingElement.zero((0, 1), T2, 2)
    g = RingElement.one((0, 1), T2, 2)
    for a, m1, m2, c in spec:
        f = f.add(RingElement.monomial((a,), (m1, m2), c, (0, 1), T2))
    g = g.add(f)
    fg = f.mul(g)
    assert cross_wall(fg, w, (0, 1)) == \
        cross_wall(f, w, (0, 1)).mul(cross_wall(g, w, (0, 1)))


# -- slab rings --------------------------------------------------------------

@pytest.fixture
def slab():
    cx = two_cell_complex(number=0, kink=(1,))
    t3 = Truncation.degree(1, 3)
    f = RingElement.one((0, 1), t3, 2).add(
        RingElement.monomial((1,), (1, 0), 1, (0, 1), t3))
    return SlabData(cx=cx, rho=(0,), side_u=(0, 1), side_u2=(0, 2),
                    f_slab=f), t3


def test_slab_zplus_localizes_to_transversal(slab):
    data, t3 = slab
    e = SlabRingElement.monomial(data, t3, (0,), (0,), z_plus=1)
    got = slab_localize(e, (0, 1))
    assert got == RingElement.monomial((0,), (0, 1), 1, (0, 1), t3)


def test_slab_zminus_localizes_with_kink_and_function(slab):
    data, t3 = slab
    e = SlabRingElement.monomial(data, t3, (0,), (0,), z_minus=1)
    got = slab_localize(e, (0, 1))
    expected = RingElement.monomial((1,), (0, -1), 1, (0, 1), t3).mul(
        data.f_slab)
    assert got == expected


def test_slab_relation_respected(slab):
    data, t3 = slab
    prod = SlabRingElement.monomial(data, t3, (0,), (0,), z_plus=1,
                                    z_minus=1)
    # the normal form already rewrote Z+Z- as f t^kink
    assert all(zp == 0 or zm == 0 for (_, _, zp, zm) in prod.terms)
    direct = slab_localize(prod, (0, 1))
    expected = RingElement.monomial((1,), (0, 0), 1, (0, 1), t3).mul(
        data.f_slab)
    assert direct == expected


def test_slab_localization_is_ring_homomorphism(slab):
    data, t3 = slab
    a = SlabRingElement.monomial(data, t3, (1,), (2,), z_plus=1)
    b = SlabRingElement.monomial(data, t3, (0,), (-1,), z_minus=2, coeff=3)
    for side in ((0, 1), (0, 2)):
        assert slab_localize(a.mul(b), side) == \
            slab_localize(a, side).mul(slab_localize(b, side))


def test_slab_localizations_jointly_injective(slab):
    # distinct normal forms may agree on one side but not on both
    data, t3 = slab
    candidates = [
        SlabRingElement.monomial(data, t3, (0,), (0,), z_plus=a, z_minus=b)
        for a, b in [(0, 0), (1, 0), (0, 1), (2, 0)]]
    images = [(slab_localize(e, (0, 1)), slab_localize(e, (0, 2)))
              for e in candidates]
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            assert images[i] != images[j]


# -- relative restriction ----------------------------------------------------

def fibered_threefold():
    # one maximal cone on three rays; the third ray maps to the base
    return build_complex(divisors(3, b=(0, 0, 1)), [(0, 1, 2)],
                         curve_rank=1, relative=True)


def make_wall_3d(cx, support, trunc, exponent):
    f = RingElement.one((0, 1, 2), trunc, 3).add(
        RingElement.monomial((1,), exponent, 1, (0, 1, 2), trunc))
    return Wall(cone=(0, 1, 2), support=tuple(support), function=f)


def test_relative_restrict_classifies_walls():
    cx = fibered_threefold()
    t2 = Truncation.degree(1, 2)
    vertical = make_wall_3d(cx, [(1, 0, 0), (0, 0, 1)], t2, (1, 0, 0))
    slanted = make_wall_3d(cx, [(1, 0, 1), (0, 1, 1)], t2, (1, -1, 0))
    index_two = make_wall_3d(cx, [(1, 0, 0), (0, 1, 2)], t2, (1, 0, 0))
    s = WallStructure(complex=cx, trunc=t2,
                      walls=(vertical, slanted, index_two))
    rr = relative_restrict(s)
    # only the vertical wall and the index-two wall meet the boundary in
    # dimension n-2 = 1
    assert len(rr.asymptotic.walls) == 2
    assert all(w.support == ((1, 0, 0),) for w in rr.asymptotic.walls)
    by_support = {w.support: (w, ind) for w, ind in rr.fiber}
    assert by_support[vertical.support][1] == 1
    assert by_support[vertical.support][0].function == vertical.function
    assert by_support[index_two.support][1] == 2
    assert by_support[index_two.support][0].function == \
        index_two.function.mul(index_two.function)


def test_relative_restrict_requires_reduced_fibers():
    cx = build_complex(divisors(2, b=(0, 2)), [(0, 1)], curve_rank=1,
                       relative=True)
    s = WallStructure(complex=cx, trunc=T2, walls=())
    with pytest.raises(NonReducedFiber):
        relative_restrict(s)


# -- blowup threefold fixture ------------------------------------------------

def test_blowup_five_walls_assemble_and_grade():
    cx = load_geometry(os.path.join(FIXTURES, "blowup_threefold.json"))
    with open(os.path.join(FIXTURES, "blowup_counts.json")) as fh:
        counts = counts_from_json(json.load(fh))
    with open(os.path.join(FIXTURES, "blowup_truncation.json")) as fh:
        trunc = truncation_from_json(json.load(fh))
    with open(os.path.join(FIXTURES, "blowup_grading.json")) as fh:
        grading = json.load(fh)["pairings"]
    s = assemble_canonical(cx, counts, trunc, grading=grading)
    assert len(s.walls) == 5
    for w in s.walls:
        assert w.rho is not None  # every canonical wall is a slab here
        # binomial shape: 1 + t^A z^-u
        assert len(w.function.terms) == 2
        assert w.function.constant_coefficient() == 1
