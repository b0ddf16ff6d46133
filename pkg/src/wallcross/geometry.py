"""Integral affine cone complexes with kinks.

The complex is the dual intersection complex of a log smooth pair: one ray
per good boundary divisor, one cone per good stratum.  All metric work
happens in per-maximal-cone integer charts whose basis vectors are the rays
of the cone in sorted divisor order.  Crossing an interior codimension-one
cell re-coordinatizes by a unimodular transition matrix determined by the
intersection numbers of the corresponding curve stratum, and bends monomials
by the cell's kink class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import ring
from .errors import (
    BadDivisorMeetsGoodCurve,
    ChainTooShort,
    DisconnectedGoodBoundary,
    GeometryError,
    LocationInDelta,
    MissingNDimCone,
    NonUnimodularChart,
    NotAdjacent,
    NotRelative,
    NotSubmersion,
)

ConeId = tuple[int, ...]


@dataclass(frozen=True)
class DivisorTable:
    """Boundary divisors with their log discrepancies and fiber multiplicities.

    A divisor is *good* when its discrepancy coefficient vanishes; only good
    divisors contribute rays to the complex.
    """

    names: tuple[str, ...]
    a_coeffs: tuple[Fraction, ...]
    fiber_multiplicities: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.a_coeffs) != len(self.names):
            raise GeometryError("a-coefficient count != divisor count")
        if any(a < 0 for a in self.a_coeffs):
            raise GeometryError("discrepancy coefficients must be >= 0")
        if self.fiber_multiplicities is not None:
            if len(self.fiber_multiplicities) != len(self.names):
                raise GeometryError("fiber multiplicity count mismatch")
            if any(b < 0 for b in self.fiber_multiplicities):
                raise GeometryError("fiber multiplicities must be >= 0")

    def __len__(self):
        return len(self.names)

    def is_good(self, i: int) -> bool:
        return self.a_coeffs[i] == 0


@dataclass(frozen=True)
class PointInChart:
    """A rational point in the chart of a maximal cone."""

    cone: ConeId
    coords: tuple[Fraction, ...]
    ambient: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coords",
                           tuple(Fraction(c) for c in self.coords))
        if not self.ambient and any(c < 0 for c in self.coords):
            raise GeometryError(
                "point coordinates must be nonnegative inside the cone "
                "(pass ambient=True for ambient-chart points)")


def _faces(index_set: Iterable[int]) -> set[ConeId]:
    items = sorted(index_set)
    out: set[ConeId] = set()
    n = len(items)
    for mask in range(1 << n):
        out.add(tuple(items[i] for i in range(n) if mask >> i & 1))
    return out


@dataclass(frozen=True)
class ConeComplex:
    """The pair (B, P): cones indexed by good divisor sets, with charts."""

    n: int
    curve_rank: int
    divisors: DivisorTable
    strata: frozenset  # all nonempty strata of the ambient space (face-closed)
    cones: frozenset   # the good ones, P (face-closed)
    intersections: Mapping[ConeId, tuple]  # interior codim-1 -> D.X numbers
    kinks: Mapping[ConeId, tuple[int, ...]]
    relative: bool = False

    # -- derived data --------------------------------------------------------

    @property
    def maximal_cones(self) -> list[ConeId]:
        return sorted(c for c in self.cones if len(c) == self.n)

    def codim1_cones(self) -> list[ConeId]:
        return sorted(c for c in self.cones
                      if len(c) == self.n - 1 and len(c) >= 1)

    def max_cones_containing(self, tau: ConeId) -> list[ConeId]:
        ts = set(tau)
        return [c for c in self.maximal_cones if ts <= set(c)]

    def is_interior_codim1(self, rho: ConeId) -> bool:
        return (len(rho) == self.n - 1
                and len(self.max_cones_containing(rho)) == 2)

    def interior_codim1(self) -> list[ConeId]:
        return [r for r in self.codim1_cones() if self.is_interior_codim1(r)]

    def boundary_codim1(self) -> list[ConeId]:
        return [r for r in self.codim1_cones()
                if len(self.max_cones_containing(r)) == 1]

    def delta_cones(self) -> list[ConeId]:
        """Cells of the singular locus: the codimension >= 2 skeleton."""
        return sorted(c for c in self.cones if 0 < len(c) <= self.n - 2)

    def kink(self, rho: ConeId) -> tuple[int, ...]:
        return self.kinks.get(tuple(sorted(rho)), (0,) * self.curve_rank)

    # -- charts --------------------------------------------------------------

    def position(self, sigma: ConeId, divisor: int) -> int:
        return sigma.index(divisor)

    def normal_into(self, sigma: ConeId, rho: ConeId) -> tuple[int, ...]:
        """Primitive conormal of rho in the sigma-chart, positive into sigma."""
        extra = [i for i in sigma if i not in rho]
        if len(extra) != 1:
            raise NotAdjacent(f"{rho} is not a facet of {sigma}")
        pos = self.position(sigma, extra[0])
        return tuple(1 if j == pos else 0 for j in range(self.n))

    def chart_transition(self, sigma: ConeId, sigma2: ConeId):
        """Transition matrix sigma-coords -> sigma2-coords, plus the kink.

        Rays of the shared facet map to themselves; the leftover ray of the
        source maps to minus the leftover ray of the target corrected by the
        facet curve's intersection numbers with the facet divisors.
        """
        sigma = tuple(sigma)
        sigma2 = tuple(sigma2)
        if sigma not in self.cones or sigma2 not in self.cones \
                or len(sigma) != self.n or len(sigma2) != self.n:
            raise NotAdjacent("arguments must be maximal cones")
        if sigma == sigma2:
            matrix = tuple(tuple(1 if i == j else 0 for j in range(self.n))
                           for i in range(self.n))
            return matrix, (0,) * self.curve_rank
        rho = tuple(sorted(set(sigma) & set(sigma2)))
        if len(rho) != self.n - 1 or not self.is_interior_codim1(rho):
            raise NotAdjacent(
                f"{sigma} and {sigma2} do not share an interior facet")
        numbers = self.intersections.get(rho)
        if numbers is None:
            raise GeometryError(f"missing intersection numbers for {rho}")
        extra_src = next(i for i in sigma if i not in rho)
        extra_dst = next(i for i in sigma2 if i not in rho)
        cols = []
        for i in sigma:  # image of each source basis vector, in dst coords
            if i == extra_src:
                img = [0] * self.n
                img[self.position(sigma2, extra_dst)] = -1
                for j, d in zip(rho, numbers):
                    img[self.position(sigma2, j)] -= int(d)
                cols.append(img)
            else:
                img = [0] * self.n
                img[self.position(sigma2, i)] = 1
                cols.append(img)
        matrix = tuple(tuple(cols[j][i] for j in range(self.n))
                       for i in range(self.n))
        _check_unimodular(matrix)
        return matrix, self.kink(rho)

    def loop_matrix(self, cone_path: Sequence[ConeId]):
        """Product of the transitions along a closed path of maximal cones."""
        if cone_path[0] != cone_path[-1]:
            raise GeometryError("path must be closed")
        result = [[1 if i == j else 0 for j in range(self.n)]
                  for i in range(self.n)]
        for a, b in zip(cone_path, cone_path[1:]):
            m, _ = self.chart_transition(a, b)
            result = [[sum(m[i][k] * result[k][j] for k in range(self.n))
                       for j in range(self.n)] for i in range(self.n)]
        return tuple(tuple(row) for row in result)

    def transport_element(self, f: ring.RingElement, sigma: ConeId,
                          sigma2: ConeId,
                          group_level: bool = False) -> ring.RingElement:
        matrix, kink = self.chart_transition(sigma, sigma2)
        if sigma == sigma2:
            return f
        rho = tuple(sorted(set(sigma) & set(sigma2)))
        normal = self.normal_into(sigma, rho)
        return ring.transport(f, matrix, normal, kink, tuple(sigma2),
                              group_level=group_level)

    # -- relative structure --------------------------------------------------

    def _require_relative(self):
        if not self.relative or self.divisors.fiber_multiplicities is None:
            raise NotRelative("no fibration data on this complex")

    def fibration_value(self, point: PointInChart) -> Fraction:
        """Value of the tropicalized fibration at a point of a chart."""
        self._require_relative()
        b = self.divisors.fiber_multiplicities
        return sum((Fraction(b[i]) * c
                    for i, c in zip(point.cone, point.coords)), Fraction(0))

    def cone_is_boundary(self, cone: ConeId) -> bool:
        """Whether the cone lies in the zero fiber of the tropicalized map."""
        self._require_relative()
        b = self.divisors.fiber_multiplicities
        return all(b[i] == 0 for i in cone)

    def check_submersion(self):
        """Fibration must look linear across every interior transition."""
        self._require_relative()
        b = self.divisors.fiber_multiplicities
        for rho in self.interior_codim1():
            s1, s2 = self.max_cones_containing(rho)
            matrix, _ = self.chart_transition(s1, s2)
            for j in range(self.n):
                img_val = sum(b[s2[i]] * matrix[i][j] for i in range(self.n))
                if img_val != b[s1[j]]:
                    raise NotSubmersion(
                        f"fibration not linear across {rho}: basis vector "
                        f"{j} of {s1} maps to value {img_val} != {b[s1[j]]}")


def _check_unimodular(matrix):
    n = len(matrix)
    from .linalg import det

    d = det([list(r) for r in matrix])
    if abs(d) != 1:
        raise NonUnimodularChart(f"transition determinant {d}")


# -- construction / validation -----------------------------------------------

def build_complex(divisors: DivisorTable, good_strata: Iterable[Sequence[int]],
                  intersections: Mapping | Iterable = (),
                  kinks: Mapping | Iterable = (),
                  relative: bool = False,
                  curve_rank: int | None = None,
                  n: int | None = None) -> ConeComplex:
    """Validate input strata and assemble the cone complex.

    ``good_strata`` lists index sets of nonempty strata of the ambient space
    (maximal ones suffice; faces are closed over).  The complex keeps the
    cones whose divisors are all good; the full list is retained to check
    that good curve strata only lie on good divisors.
    """
    strata: set[ConeId] = set()
    for s in good_strata:
        strata |= _faces(s)
    cones = frozenset(c for c in strata
                      if all(divisors.is_good(i) for i in c))

    if n is None:
        n = max((len(c) for c in cones), default=0)

    inter = _as_mapping(intersections, "rho", "numbers")
    kk = _as_mapping(kinks, "rho", "class")
    if curve_rank is None:
        curve_rank = next((len(v) for v in kk.values()), 0)
    kk = {k: tuple(int(x) for x in v) for k, v in kk.items()}

    cx = ConeComplex(n=n, curve_rank=curve_rank, divisors=divisors,
                     strata=frozenset(strata), cones=cones,
                     intersections={k: tuple(int(x) for x in v)
                                    for k, v in inter.items()},
                     kinks=kk, relative=relative)
    validate_complex(cx)
    return cx


def _as_mapping(data, key_name, val_name) -> dict[ConeId, tuple]:
    if isinstance(data, Mapping):
        return {tuple(sorted(k)): tuple(v) for k, v in data.items()}
    out = {}
    for item in data:
        out[tuple(sorted(item[key_name]))] = tuple(item[val_name])
    return out


def validate_complex(cx: ConeComplex):
    n = cx.n
    if not any(len(c) == n for c in cx.cones):
        raise MissingNDimCone(f"no {n}-dimensional cone of good divisors")

    # good curve strata must avoid bad divisors: an (n-1)-set of good
    # divisors may only extend to n-strata that are themselves good
    for rho in cx.cones:
        if len(rho) != n - 1:
            continue
        rs = set(rho)
        for s in cx.strata:
            if len(s) == n and rs <= set(s) and s not in cx.cones:
                bad = [i for i in s if not cx.divisors.is_good(i)]
                raise BadDivisorMeetsGoodCurve(
                    f"good curve stratum {rho} lies on bad divisor(s) {bad}")

    # pseudomanifold conditions: every cone inside an n-cone, facets in <= 2
    for c in cx.cones:
        if c and not cx.max_cones_containing(c):
            raise MissingNDimCone(
                f"cone {c} is not contained in any maximal cone")
        if len(c) == n - 1 and len(cx.max_cones_containing(c)) > 2:
            raise GeometryError(
                f"facet {c} lies in more than two maximal cones")

    # connectivity of the good boundary of every stratum of dim > 1
    for c in sorted(cx.cones, key=len):
        if len(c) > n - 2:
            continue
        cs = set(c)
        verts = [i for i in range(len(cx.divisors))
                 if i not in cs and tuple(sorted(cs | {i})) in cx.cones]
        if len(verts) <= 1:
            if not verts and len(c) < n:
                raise DisconnectedGoodBoundary(
                    f"stratum {c} has empty good boundary")
            continue
        adj = {v: set() for v in verts}
        for i in verts:
            for j in verts:
                if i < j and tuple(sorted(cs | {i, j})) in cx.cones:
                    adj[i].add(j)
                    adj[j].add(i)
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(verts):
            raise DisconnectedGoodBoundary(
                f"good boundary of stratum {c} is disconnected")

    # interior facets need intersection numbers; transitions must build
    for rho in cx.interior_codim1():
        if rho not in cx.intersections:
            raise GeometryError(f"missing intersection numbers for {rho}")
        s1, s2 = cx.max_cones_containing(rho)
        m12, _ = cx.chart_transition(s1, s2)
        m21, _ = cx.chart_transition(s2, s1)
        prod = [[sum(m12[i][k] * m21[k][j] for k in range(n))
                 for j in range(n)] for i in range(n)]
        if prod != [[1 if i == j else 0 for j in range(n)] for i in range(n)]:
            raise NonUnimodularChart(
                f"transitions across {rho} do not invert each other")

    if cx.relative:
        cx.check_submersion()


# -- boundary chart construction ---------------------------------------------

@dataclass(frozen=True)
class BoundaryChart:
    """Fan of a boundary divisor with its affine embedding data.

    ``rays``: the 2D ray directions of the vertical strata chain; ``psi``:
    per tracked divisor, the embedding corrections at each ray.  The full
    embedding sends the j-th tracked divisor ray to (0, e_j) and the l-th
    chain ray to (rays[l], -sum_j psi[j][l] e_j).
    """

    rays: tuple[tuple[int, int], ...]
    psi: tuple[tuple[int, ...], ...]  # psi[j][l]

    def embedding_image(self, chain_index: int, tracked: int):
        return (self.rays[chain_index],
                tuple(-self.psi[j][chain_index] for j in range(tracked)))


def boundary_chart(self_intersections: Sequence[int],
                   intersection_rows: Sequence[Sequence[int]] = (),
                   boundary_numbers: Sequence[int] | None = None
                   ) -> BoundaryChart:
    """Fan of a vertical-strata chain from self-intersections.

    Chain rays satisfy the recursion  n_{l+1} = -C_l^2 n_l - n_{l-1}  with
    n_0 = (0,1), n_1 = (1,0); the embedding corrections follow
    psi_j(n_{l+1}) = D_j·C_l - C_l^2 psi_j(n_l) - psi_j(n_{l-1}), starting
    at zero on the first two rays.  When ``boundary_numbers`` is given, the
    closing identity (last ray = (0,-1) and psi_j there = boundary number)
    is asserted.
    """
    r = len(self_intersections) + 1
    if r < 1:
        raise ChainTooShort("need a chain of length at least one")
    rows = [list(row) for row in intersection_rows]
    if any(len(row) != r - 1 for row in rows):
        raise GeometryError("intersection row length must be chain length - 1")

    rays = [(0, 1), (1, 0)]
    psi = [[0, 0] for _ in rows]
    for ell in range(1, r):
        c2 = int(self_intersections[ell - 1])
        prev, cur = rays[ell - 1], rays[ell]
        rays.append((-c2 * cur[0] - prev[0], -c2 * cur[1] - prev[1]))
        for j, row in enumerate(rows):
            psi[j].append(int(row[ell - 1]) - c2 * psi[j][ell]
                          - psi[j][ell - 1])

    chart = BoundaryChart(rays=tuple(tuple(v) for v in rays),
                          psi=tuple(tuple(p) for p in psi))
    if boundary_numbers is not None:
        if rays[-1] != (0, -1):
            raise GeometryError(
                f"chain does not close: last ray {rays[-1]} != (0,-1)")
        for j, b in enumerate(boundary_numbers):
            if psi[j][0] + psi[j][-1] != int(b):
                raise GeometryError(
                    f"embedding correction mismatch for divisor {j}: "
                    f"{psi[j][0] + psi[j][-1]} != {b}")
    return chart


# -- generic point sampling --------------------------------------------------

_PRIMES = (10007, 10009, 10037, 10039, 10061, 10067, 10069, 10079,
           10091, 10093, 10099, 10103, 10111, 10133, 10139, 10141)


class GenericPointSampler:
    """Deterministic rational points avoiding a given hyperplane list.

    Coordinates use pairwise-distinct large prime denominators so that no
    nontrivial small-integer covector annihilates them by accident; if a
    supplied hyperplane still vanishes, the numerators are re-drawn from the
    seeded generator.
    """

    def __init__(self, seed: int = 0):
        import random

        self._rng = random.Random(seed)
        self.seed = seed

    def sample(self, cone: ConeId, n: int,
               hyperplanes: Sequence[Sequence] = (),
               base: Sequence | None = None,
               scale: int = 1) -> PointInChart:
        for _attempt in range(64):
            coords = []
            for i in range(n):
                p = _PRIMES[i % len(_PRIMES)]
                num = self._rng.randint(1, p - 1)
                c = Fraction(num * scale, p)
                if base is not None:
                    c += Fraction(base[i])
                coords.append(c)
            if all(sum((Fraction(h[i]) * coords[i] for i in range(n)),
                       Fraction(0)) != 0 for h in hyperplanes):
                return PointInChart(cone=cone, coords=tuple(coords),
                                    ambient=True)
        raise GeometryError("could not find a generic point")


# -- JSON interface ----------------------------------------------------------

_GEOMETRY_KEYS = {"schema", "n", "curve_rank", "divisors", "good_strata",
                  "intersections", "kinks", "relative"}


def geometry_from_json(data: Mapping) -> ConeComplex:
    unknown = set(data) - _GEOMETRY_KEYS
    if unknown:
        raise GeometryError(f"unknown geometry keys: {sorted(unknown)}")
    div_names = []
    a_coeffs = []
    b_mults = []
    has_b = False
    for d in data["divisors"]:
        extra = set(d) - {"name", "a", "b"}
        if extra:
            raise GeometryError(f"unknown divisor keys: {sorted(extra)}")
        div_names.append(str(d["name"]))
        a_coeffs.append(Fraction(str(d.get("a", 0))))
        if "b" in d:
            has_b = True
            b_mults.append(int(d["b"]))
        else:
            b_mults.append(0)
    table = DivisorTable(
        names=tuple(div_names), a_coeffs=tuple(a_coeffs),
        fiber_multiplicities=tuple(b_mults) if has_b else None)
    return build_complex(
        divisors=table,
        good_strata=[tuple(s) for s in data["good_strata"]],
        intersections=data.get("intersections", ()),
        kinks=data.get("kinks", ()),
        relative=bool(data.get("relative", False)),
        curve_rank=data.get("curve_rank"),
        n=data.get("n"))


def geometry_to_json(cx: ConeComplex) -> dict:
    divisors = []
    for i, name in enumerate(cx.divisors.names):
        d = {"name": name, "a": str(cx.divisors.a_coeffs[i])}
        if cx.divisors.fiber_multiplicities is not None:
            d["b"] = cx.divisors.fiber_multiplicities[i]
        divisors.append(d)
    return {
        "schema": "wallcross/1",
        "n": cx.n,
        "curve_rank": cx.curve_rank,
        "divisors": divisors,
        "good_strata": [list(s) for s in sorted(cx.strata, key=lambda c:
                                                (len(c), c)) if s],
        "intersections": [{"rho": list(k), "numbers": list(v)}
                          for k, v in sorted(cx.intersections.items())],
        "kinks": [{"rho": list(k), "class": list(v)}
                  for k, v in sorted(cx.kinks.items())],
        "relative": cx.relative,
    }


def load_geometry(path) -> ConeComplex:
    with open(path) as fh:
        return geometry_from_json(json.load(fh))
