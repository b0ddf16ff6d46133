"""Walls and wall structures.

A wall is a codimension-one rational cone inside a maximal cell, carrying a
function congruent to 1 modulo the curve-class maximal ideal whose exponents
are tangent to the support.  Structures are assembled from enumerative count
data, compared by sampling, refined, and crossed by monomial automorphisms.
Slabs (walls lying inside codimension-one cells of the complex) additionally
carry a two-sided ring with transversal variables whose product is the wall
function times the kink class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg, ring
from .errors import (
    BoundarySlab,
    ClassInIdeal,
    GeometryError,
    InadmissibleWallDirection,
    NonReducedFiber,
    NotRelative,
    SingularPoint,
    UnsupportedDimension,
    WallError,
)
from .geometry import ConeComplex, ConeId, GenericPointSampler, PointInChart
from .lattice import INFINITE, IntegerMatrix, cokernel_order
from .ring import RingElement, Truncation


def _gcd_vector(v) -> int:
    from math import gcd

    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    return g


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = _gcd_vector(v)
    if g == 0:
        raise WallError("zero vector has no primitive representative")
    return tuple(int(x) // g for x in v)


@dataclass(frozen=True)
class Wall:
    """Support cone (simplicial, dim n-1) with its attached function."""

    cone: ConeId                      # chart of the maximal cell
    support: tuple[tuple[int, ...], ...]
    function: RingElement
    rho: ConeId | None = None         # codim-1 cell of the complex, if a slab

    @property
    def n(self) -> int:
        return len(self.support[0])

    def span_normal(self) -> tuple[int, ...]:
        """A primitive integer conormal of the support's hyperplane."""
        basis = linalg.nullspace([list(g) for g in self.support])
        # the support has dim n-1 so the conormal line is 1-dimensional;
        # nullspace of the generator matrix read as rows gives row-space
        # annihilators, i.e. conormals
        if len(basis) != 1:
            raise WallError("support does not span a hyperplane")
        v = basis[0]
        denom = 1
        for x in v:
            denom = denom * x.denominator // _nonzero_gcd(denom, x.denominator)
        ints = [int(x * denom) for x in v]
        return primitive(ints)

    def contains_point(self, coords: Sequence[Fraction]) -> tuple | None:
        """Barycentric coordinates of the point on the wall, or None."""
        cols = [[Fraction(g[i]) for g in self.support]
                for i in range(self.n)]
        sol = linalg.solve(cols, [Fraction(c) for c in coords])
        if sol is None or any(l < 0 for l in sol):
            return None
        return sol


def _nonzero_gcd(a, b):
    from math import gcd

    g = gcd(a, b)
    return g if g else 1


@dataclass(frozen=True)
class WallStructure:
    complex: ConeComplex
    trunc: Truncation
    walls: tuple[Wall, ...]
    dropped_trivial: int = 0

    def with_walls(self, walls: Iterable[Wall]) -> "WallStructure":
        return replace(self, walls=tuple(walls))

    # -- evaluation ----------------------------------------------------------

    def walls_through(self, x: PointInChart) -> list[tuple[Wall, tuple]]:
        found = []
        for w in self.walls:
            coords = self._coords_in_chart(x, w.cone)
            if coords is None:
                continue
            bary = w.contains_point(coords)
            if bary is not None:
                found.append((w, bary))
        return found

    def _coords_in_chart(self, x: PointInChart, cone: ConeId):
        if x.cone == cone:
            return x.coords
        shared = tuple(sorted(set(x.cone) & set(cone)))
        if len(shared) != self.complex.n - 1 \
                or not self.complex.is_interior_codim1(shared):
            return None
        # the point must lie on the shared facet for the transition to be
        # meaningful as a point map
        extra = next(i for i in x.cone if i not in shared)
        if x.coords[x.cone.index(extra)] != 0:
            return None
        matrix, _ = self.complex.chart_transition(x.cone, cone)
        n = self.complex.n
        return tuple(sum(Fraction(matrix[i][j]) * x.coords[j]
                         for j in range(n)) for i in range(n))

    def f_at(self, x: PointInChart) -> RingElement:
        """Product of the functions of all walls through x (in x's chart)."""
        hits = self.walls_through(x)
        result = RingElement.one(tuple(x.cone), self.trunc, self.complex.n)
        seen_spans = []
        for w, bary in hits:
            if any(b == 0 for b in bary):
                raise SingularPoint(
                    f"{x} lies on the boundary of a wall support")
            span = _span_key(w.support)
            for s in seen_spans:
                if s != span:
                    raise SingularPoint(
                        f"{x} lies on two transversal walls")
            seen_spans.append(span)
            f = w.function
            if w.cone != x.cone:
                f = self.complex.transport_element(f, w.cone, tuple(x.cone),
                                                   group_level=True)
            result = result.mul(f)
        return result

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "schema": "wallcross/1",
            "walls": [{
                "max_cone": list(w.cone),
                "support": [list(g) for g in w.support],
                "rho": list(w.rho) if w.rho is not None else None,
                "function": w.function.to_json(),
            } for w in self.walls],
            "dropped_trivial": self.dropped_trivial,
        }

    @classmethod
    def from_json(cls, data: Mapping, cx: ConeComplex,
                  trunc: Truncation) -> "WallStructure":
        walls = []
        for item in data["walls"]:
            cone = tuple(item["max_cone"])
            f = RingElement.from_json(item["function"], cone, trunc, cx.n)
            rho = tuple(item["rho"]) if item.get("rho") is not None else None
            walls.append(Wall(cone=cone,
                              support=tuple(tuple(int(x) for x in g)
                                            for g in item["support"]),
                              function=f, rho=rho))
        return cls(complex=cx, trunc=trunc, walls=tuple(walls),
                   dropped_trivial=int(data.get("dropped_trivial", 0)))


def _span_key(support):
    rows = [[Fraction(x) for x in g] for g in support]
    red, _ = linalg._rref(rows)
    return tuple(tuple(r) for r in red if any(x != 0 for x in r))


# -- assembly ----------------------------------------------------------------

def minimal_cell(cx: ConeComplex, cone: ConeId, support) -> ConeId:
    """Smallest cell of the complex containing the support cone."""
    positions = set()
    for g in support:
        if any(x < 0 for x in g):
            raise WallError(
                "support generators must lie in the chart's cone")
        positions |= {i for i, x in enumerate(g) if x > 0}
    cell = tuple(sorted(cone[i] for i in positions))
    if cell not in cx.cones:
        raise WallError(f"support spans {cell}, not a cell of the complex")
    return cell


def check_wall(cx: ConeComplex, wall: Wall,
               grading: Sequence[Sequence[int]] | None = None):
    """Validate support dimension, tangency, admissibility and grading."""
    n = cx.n
    if len(wall.cone) != n or tuple(wall.cone) not in cx.cones:
        raise WallError(f"{wall.cone} is not a maximal cone")
    if linalg.rank([list(g) for g in wall.support]) != n - 1:
        raise WallError("wall support must have dimension n-1")
    normal = wall.span_normal()

    cell = minimal_cell(cx, wall.cone, wall.support)
    if len(cell) <= n - 2:
        raise WallError("wall support lies in the singular skeleton")

    location = None
    if len(cell) == n - 1:
        if wall.rho is not None and tuple(wall.rho) != cell:
            raise WallError("stored slab cell disagrees with the support")
        adjacent = cx.max_cones_containing(cell)
        if len(adjacent) == 1:
            raise WallError(
                "wall support contained in the boundary of the complex")
        location = ring.InteriorCodim1(
            normal=cx.normal_into(wall.cone, cell), kink=cx.kink(cell))

    # function: unipotent, exponents tangent and admissible
    if wall.function.constant_coefficient() != 1:
        raise WallError("wall function must be 1 modulo the maximal ideal")
    for (A, m), _c in wall.function.terms.items():
        if any(m):
            pairing = sum(a * b for a, b in zip(normal, m))
            if pairing != 0:
                raise InadmissibleWallDirection(
                    f"exponent {m} not tangent to the wall support")
            if location is not None and not ring.admissible_at(A, m, location):
                raise InadmissibleWallDirection(
                    f"monomial t^{list(A)} z^{list(m)} inadmissible on the "
                    f"cell {cell}")
        if grading is not None:
            _check_homogeneous(cx, wall.cone, A, m, grading)


def _check_homogeneous(cx: ConeComplex, cone: ConeId, A, m, grading):
    """Torus-weight homogeneity: divisor degree of t^A z^m must vanish."""
    for i in range(len(cx.divisors)):
        deg = sum(grading[i][k] * A[k] for k in range(len(A)))
        if i in cone:
            deg += m[cone.index(i)]
        if deg != 0:
            raise WallError(
                f"monomial t^{list(A)} z^{list(m)} has nonzero weight {deg} "
                f"on divisor {cx.divisors.names[i]}")


def assemble_canonical(cx: ConeComplex, counts: Iterable[Mapping],
                       trunc: Truncation,
                       grading: Sequence[Sequence[int]] | None = None
                       ) -> WallStructure:
    """Build the wall structure attached to a list of enumerative counts.

    Each count entry carries a support cone, a tangent direction u, a curve
    class A, a rational weight W, an optional lattice index k (defaulting to
    the divisibility of u) and an optional automorphism order.  Entries
    sharing (support, u, A) aggregate by summing W divided by the
    automorphism order; each aggregate contributes exp(k·W·t^A z^{-u}), and
    walls sharing a support multiply.  Weight-zero aggregates are dropped.
    """
    n = cx.n
    grouped: dict[tuple, Fraction] = {}
    kvals: dict[tuple, int] = {}
    for entry in counts:
        cone = tuple(entry["max_cone"])
        support = tuple(tuple(int(x) for x in g) for g in entry["support"])
        u = tuple(int(x) for x in entry["u"])
        A = tuple(int(x) for x in entry["A"])
        if not any(u):
            raise InadmissibleWallDirection("wall direction must be nonzero")
        if all(a == 0 for a in A):
            raise ClassInIdeal(f"class {list(A)} is trivial")
        if trunc.in_ideal(A):
            # invisible at this truncation order
            continue
        # u must be tangent to the support
        if linalg.rank([list(g) for g in support] + [list(u)]) != \
                linalg.rank([list(g) for g in support]):
            raise InadmissibleWallDirection(
                f"direction {list(u)} not tangent to the support")
        k = entry.get("k")
        if k is None:
            k = _gcd_vector(u)
        aut = int(entry.get("aut", 1) or 1)
        key = (cone, support, u, A)
        grouped[key] = grouped.get(key, Fraction(0)) + \
            Fraction(str(entry["W"])) / aut
        prev = kvals.setdefault(key, int(k))
        if prev != int(k):
            raise WallError("conflicting lattice indices for one family")

    by_support: dict[tuple, RingElement] = {}
    dropped = 0
    for (cone, support, u, A), w in sorted(grouped.items()):
        if w == 0:
            dropped += 1
            continue
        k = kvals[(cone, support, u, A)]
        g = RingElement.monomial(A, tuple(-x for x in u), k * w, cone, trunc)
        factor = ring.exp_truncated(g)
        skey = (cone, support)
        if skey in by_support:
            by_support[skey] = by_support[skey].mul(factor)
        else:
            by_support[skey] = factor

    walls = []
    for (cone, support), f in sorted(by_support.items()):
        if f.is_one():
            dropped += 1
            continue
        cell = minimal_cell(cx, cone, support)
        rho = cell if len(cell) == n - 1 else None
        wall = Wall(cone=cone, support=support, function=f, rho=rho)
        check_wall(cx, wall, grading=grading)
        walls.append(wall)
    return WallStructure(complex=cx, trunc=trunc, walls=tuple(walls),
                         dropped_trivial=dropped)


def counts_from_json(data) -> list[dict]:
    if isinstance(data, Mapping):
        data = data["counts"]
    allowed = {"max_cone", "support", "u", "A", "W", "k", "aut"}
    for entry in data:
        unknown = set(entry) - allowed
        if unknown:
            raise WallError(f"unknown count keys: {sorted(unknown)}")
    return list(data)


def truncation_from_json(data: Mapping) -> Truncation:
    mode = data.get("mode", "degree")
    if mode == "degree":
        return Truncation.degree(int(data["curve_rank"]), int(data["bound"]),
                                 data.get("weights"))
    if mode == "generators":
        return Truncation.from_generators(int(data["curve_rank"]),
                                          data["generators"])
    raise WallError(f"unknown truncation mode {mode!r}")


def truncation_to_json(trunc: Truncation) -> dict:
    out: dict = {"schema": "wallcross/1", "curve_rank": trunc.curve_rank}
    if trunc.weights is not None:
        out.update(mode="degree", weights=list(trunc.weights),
                   bound=trunc.bound)
    else:
        out.update(mode="generators",
                   generators=[list(g) for g in trunc.generators])
    return out


# -- equivalence -------------------------------------------------------------

def equivalent(s1: WallStructure, s2: WallStructure, seed: int = 0):
    """Sampled comparison of the two structures' pointwise functions.

    One generic interior point per wall of either structure (plus one point
    off all walls); returns (True, None) or (False, witness point).
    """
    if s1.complex is not s2.complex and s1.complex != s2.complex:
        raise WallError("structures live on different complexes")
    sampler = GenericPointSampler(seed=seed)
    probes: list[PointInChart] = []
    for s in (s1, s2):
        for w in s.walls:
            probes.append(_relint_point(w, sampler))
    if s1.complex.maximal_cones:
        cone = s1.complex.maximal_cones[0]
        probes.append(sampler.sample(cone, s1.complex.n))
    for x in probes:
        f1 = _f_at_tolerant(s1, x)
        f2 = _f_at_tolerant(s2, x)
        if f1 is None or f2 is None or f1 != f2:
            return False, x
    return True, None


def _relint_point(w: Wall, sampler: GenericPointSampler,
                  attempts: int = 32) -> PointInChart:
    n = len(w.support[0])
    for trial in range(attempts):
        weights = [Fraction(sampler._rng.randint(1, 97), 101)
                   for _ in w.support]
        coords = tuple(sum((wt * g[i] for wt, g in zip(weights, w.support)),
                           Fraction(0)) for i in range(n))
        if any(coords):
            return PointInChart(cone=w.cone, coords=coords, ambient=True)
    raise WallError("could not sample a relative interior point")


def _f_at_tolerant(s: WallStructure, x: PointInChart):
    try:
        return s.f_at(x)
    except SingularPoint:
        return None


# -- refinement --------------------------------------------------------------

@dataclass(frozen=True)
class Chamber:
    """Maximal cell of the refined decomposition of a planar complex.

    Bounded by two rays (primitive, in the chart of ``cone``), with
    ``lower`` preceding ``upper`` counterclockwise.
    """

    cone: ConeId
    lower: tuple[int, int]
    upper: tuple[int, int]


@dataclass(frozen=True)
class RefinedStructure:
    structure: WallStructure
    chambers: tuple[Chamber, ...]
    joints: tuple[tuple, ...]  # (cone id or None for apex, ray)


def refine(s: WallStructure) -> WallStructure:
    """Merge coincident-support walls; deterministic ordering."""
    merged: dict[tuple, Wall] = {}
    for w in sorted(s.walls, key=lambda w: (w.cone, w.support)):
        key = (w.cone, _cone_key(w.support))
        if key in merged:
            prev = merged[key]
            merged[key] = replace(prev, function=prev.function.mul(w.function))
        else:
            merged[key] = w
    walls = tuple(w for w in merged.values() if not w.function.is_one())
    return s.with_walls(sorted(walls, key=lambda w: (w.cone, w.support)))


def _cone_key(support):
    return tuple(sorted(primitive(g) for g in support))


def planar_chambers(s: WallStructure) -> RefinedStructure:
    """Chamber decomposition of a two-dimensional structure."""
    cx = s.complex
    if cx.n != 2:
        raise UnsupportedDimension(
            "chamber decomposition implemented for 2-dimensional complexes")
    s = refine(s)
    chambers = []
    joints = []
    for cone in cx.maximal_cones:
        rays = {(1, 0), (0, 1)}
        for w in s.walls:
            if w.cone == cone:
                rays.add(primitive(w.support[0]))
                joints.append((cone, primitive(w.support[0])))
        ordered = sorted(rays, key=lambda r: Fraction(r[0], r[0] + r[1]))
        # sort by angle within the first quadrant: x/(x+y) increases from
        # the vertical ray (0,1) to the horizontal ray (1,0)
        for lo, hi in zip(ordered, ordered[1:]):
            chambers.append(Chamber(cone=cone, lower=lo, upper=hi))
    return RefinedStructure(structure=s, chambers=tuple(chambers),
                            joints=tuple(sorted(set(joints))))


# -- crossing ----------------------------------------------------------------

def apply_theta(f_wall: RingElement, normal: Sequence[int],
                f: RingElement) -> RingElement:
    """The crossing automorphism z^m -> f_wall^<normal, m> z^m applied to f."""
    def per_term(A, m, c):
        pairing = sum(a * b for a, b in zip(normal, m))
        factor = f_wall.pow_int(pairing)
        return factor.mul(RingElement.monomial(A, m, c, f.cone, f.trunc))

    return f.map_monomials(per_term)


def cross_wall(f: RingElement, wall: Wall, source_side: Sequence[int]
               ) -> RingElement:
    """Cross ``wall`` out of the chamber containing direction source_side.

    ``source_side``: any vector on the source-chamber side of the wall's
    hyperplane (in the wall's chart).  The conormal is normalized positive
    on that side.
    """
    normal = wall.span_normal()
    pairing = sum(Fraction(a) * Fraction(b)
                  for a, b in zip(normal, source_side))
    if pairing == 0:
        raise WallError("source direction lies on the wall")
    if pairing < 0:
        normal = tuple(-x for x in normal)
    return apply_theta(wall.function, normal, f)


# -- slab rings --------------------------------------------------------------

@dataclass(frozen=True)
class SlabData:
    """Two-sided presentation of the ring at an interior slab."""

    cx: ConeComplex
    rho: ConeId
    side_u: ConeId      # chamber on the Z+ side
    side_u2: ConeId     # chamber on the Z- side
    f_slab: RingElement  # in the side_u chart, tangent to rho

    def __post_init__(self):
        cells = self.cx.max_cones_containing(self.rho)
        if len(cells) != 2:
            raise BoundarySlab(f"{self.rho} is not an interior cell")
        if set((self.side_u, self.side_u2)) != set(map(tuple, cells)):
            raise WallError("sides must be the two adjacent maximal cones")


class SlabRingElement:
    """Polynomial in the transversals Z+, Z- over the slab's base ring.

    Keys are (A, m_rho, z_plus, z_minus) with m_rho the exponent along the
    slab (length n-1, coordinates in the sorted rho ray basis); the normal
    form never keeps both transversal exponents positive, using the relation
    Z+ Z- = f_slab t^kink.
    """

    __slots__ = ("slab", "terms", "trunc")

    def __init__(self, slab: SlabData, terms: Mapping, trunc: Truncation):
        self.slab = slab
        self.trunc = trunc
        reduced: dict[tuple, Fraction] = {}
        pending = [(tuple(k), Fraction(c)) for k, c in terms.items()]
        base = _slab_base_relation(slab, trunc)
        while pending:
            (A, mr, zp, zm), c = pending.pop()
            if c == 0 or trunc.in_ideal(A):
                continue
            if zp > 0 and zm > 0:
                for (A2, mr2), c2 in base.items():
                    newA = tuple(a + b for a, b in zip(A, A2))
                    newm = tuple(a + b for a, b in zip(mr, mr2))
                    pending.append(((newA, newm, zp - 1, zm - 1), c * c2))
                continue
            key = (tuple(A), tuple(mr), zp, zm)
            reduced[key] = reduced.get(key, Fraction(0)) + c
        self.terms = {k: v for k, v in reduced.items() if v != 0}

    def __eq__(self, other):
        return (isinstance(other, SlabRingElement)
                and self.slab == other.slab and self.terms == other.terms)

    def __repr__(self):
        return f"SlabRingElement({self.terms!r})"

    @classmethod
    def monomial(cls, slab: SlabData, trunc: Truncation, A, m_rho,
                 z_plus: int = 0, z_minus: int = 0,
                 coeff=1) -> "SlabRingElement":
        key = (tuple(A), tuple(m_rho), int(z_plus), int(z_minus))
        return cls(slab, {key: Fraction(coeff)}, trunc)

    def add(self, other: "SlabRingElement") -> "SlabRingElement":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return SlabRingElement(self.slab, terms, self.trunc)

    def scale(self, c) -> "SlabRingElement":
        c = Fraction(c)
        return SlabRingElement(
            self.slab, {k: v * c for k, v in self.terms.items()}, self.trunc)

    def mul(self, other: "SlabRingElement") -> "SlabRingElement":
        terms: dict[tuple, Fraction] = {}
        for (A1, m1, p1, q1), c1 in self.terms.items():
            for (A2, m2, p2, q2), c2 in other.terms.items():
                key = (tuple(a + b for a, b in zip(A1, A2)),
                       tuple(a + b for a, b in zip(m1, m2)),
                       p1 + p2, q1 + q2)
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return SlabRingElement(self.slab, terms, self.trunc)


def _slab_base_relation(slab: SlabData, trunc: Truncation):
    """f_slab t^kink as a dict over (A, m_rho) keys."""
    cx = slab.cx
    kink = cx.kink(slab.rho)
    out: dict[tuple, Fraction] = {}
    positions = [slab.side_u.index(i) for i in slab.rho]
    for (A, m), c in slab.f_slab.terms.items():
        # tangency to rho means the transversal coordinate vanishes
        extra = next(j for j in range(cx.n) if j not in positions)
        if m[extra] != 0:
            raise WallError("slab function must be tangent to the slab")
        key = (tuple(a + k for a, k in zip(A, kink)),
               tuple(m[p] for p in positions))
        out[key] = out.get(key, Fraction(0)) + c
    return out


def slab_localize(e: SlabRingElement, side: ConeId) -> RingElement:
    """Localization of a slab element into one adjacent chamber's ring.

    On the Z+ side: t^A z^m Z+^a Z-^b maps to t^(A+b·kink)
    z^(m+(a-b)·xi) f_slab^b, where xi is the chart basis vector transversal
    to the slab; symmetrically with a and b exchanged on the other side.
    """
    slab = e.slab
    cx = slab.cx
    side = tuple(side)
    if side not in (slab.side_u, slab.side_u2):
        raise WallError("side must be one of the slab's chambers")
    plus_side = side == slab.side_u
    kink = cx.kink(slab.rho)
    n = cx.n
    positions = [side.index(i) for i in slab.rho]
    extra = next(j for j in range(n) if j not in positions)
    f = slab.f_slab
    if not plus_side:
        f = cx.transport_element(f, slab.side_u, slab.side_u2,
                                 group_level=True)
    result = RingElement.zero(side, e.trunc, n)
    for (A, mr, zp, zm), c in sorted(e.terms.items()):
        count = zm if plus_side else zp
        steps = zp - zm if plus_side else zm - zp
        newA = tuple(a + count * k for a, k in zip(A, kink))
        m = [0] * n
        for p, val in zip(positions, mr):
            m[p] = val
        m[extra] = steps
        term = RingElement.monomial(newA, m, c, side, e.trunc)
        result = result.add(term.mul(f.pow_nonneg(count)))
    return result


# -- relative restriction ----------------------------------------------------

@dataclass(frozen=True)
class RelativeRestriction:
    asymptotic: WallStructure
    fiber: tuple  # (wall, index) pairs: function raised to the index


def relative_restrict(s: WallStructure) -> RelativeRestriction:
    """Asymptotic and fiberwise parts of a structure on a fibered complex."""
    cx = s.complex
    cx._require_relative()
    b = cx.divisors.fiber_multiplicities
    for i in range(len(cx.divisors)):
        if cx.divisors.is_good(i) and b[i] > 1:
            raise NonReducedFiber(
                f"good divisor {cx.divisors.names[i]} has fiber "
                f"multiplicity {b[i]} > 1")
    asym_walls = []
    fiber_walls = []
    for w in s.walls:
        bvals = [b[i] for i in w.cone]
        zero_gens = [g for g in w.support
                     if all(g[j] == 0 for j in range(cx.n) if bvals[j] > 0)]
        if linalg.rank([list(g) for g in zero_gens]) == cx.n - 2:
            asym_walls.append(replace(w, support=tuple(zero_gens), rho=None))
        # fibration values on a saturated lattice basis of the support span
        from .lattice import kernel_basis

        span_basis = kernel_basis(
            IntegerMatrix.from_rows([list(w.span_normal())]))
        vals = [sum(bvals[j] * v[j] for j in range(cx.n))
                for v in span_basis]
        ind = _gcd_vector(vals)
        if ind > 0:
            fiber_walls.append(
                (replace(w, function=w.function.pow_nonneg(ind)), ind))
    asym = WallStructure(complex=cx, trunc=s.trunc, walls=tuple(asym_walls))
    return RelativeRestriction(asymptotic=asym, fiber=tuple(fiber_walls))
