"""Joint-by-joint consistency verification and local scattering completion.

A joint is a codimension-two cell of the refined decomposition.  Around a
joint that lies inside a maximal cell, consistency is the statement that the
path-ordered product of crossing automorphisms is the identity; this module
represents that local picture as a planar scattering diagram with exact
truncated arithmetic, checks it, and can complete an inconsistent diagram
order by order.  Codimension-one and -two checks reduce to slab-ring image
comparisons and theta patching.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

from .broken import (
    _candidate_monomials,
    _sample_in_chamber,
    chambers_containing,
    theta,
)
from .errors import (
    BoundaryJoint,
    ConsistencyError,
    InadmissibleWallDirection,
    NonConvergent,
    UnsupportedDimension,
)
from .geometry import ConeComplex, PointInChart
from .lattice import IntegerMatrix, smith_normal_form
from .ring import RingElement, Truncation, exp_truncated
from .walls import (
    SlabData,
    SlabRingElement,
    WallStructure,
    apply_theta,
    cross_wall,
    planar_chambers,
    primitive,
    refine,
    slab_localize,
    truncation_from_json,
    truncation_to_json,
)

LOCAL_CHART = ("local",)


# -- planar scattering instances ---------------------------------------------

@dataclass(frozen=True)
class LocalRay:
    """One ray of a planar scattering diagram.

    ``direction`` is a primitive integer vector in the two transverse
    coordinates; the attached function must be 1 plus terms whose transverse
    exponent part is a negative multiple of the direction (incoming).
    """

    direction: tuple[int, int]
    function: RingElement


@dataclass(frozen=True)
class LocalInstance:
    """Scattering diagram around a single joint.

    Exponents live in Z^2, optionally extended by invariant coordinates
    (appended last) that crossing automorphisms never pair against; these
    appear when a higher-dimensional joint is localized and the directions
    along the joint become invariant.
    """

    trunc: Truncation
    rays: tuple[LocalRay, ...]
    invariant_rank: int = 0

    def __post_init__(self):
        for ray in self.rays:
            _validate_ray(ray, self.n_exp)

    @property
    def n_exp(self) -> int:
        return 2 + self.invariant_rank

    def to_json(self) -> dict:
        return {
            "trunc": truncation_to_json(self.trunc),
            "invariant_rank": self.invariant_rank,
            "rays": [{"direction": list(r.direction),
                      "function": r.function.to_json()}
                     for r in self.rays],
        }

    @classmethod
    def from_json(cls, data) -> "LocalInstance":
        trunc = truncation_from_json(data["trunc"])
        inv = int(data.get("invariant_rank", 0))
        rays = tuple(
            LocalRay(direction=tuple(int(x) for x in r["direction"]),
                     function=RingElement.from_json(
                         r["function"], LOCAL_CHART, trunc, 2 + inv))
            for r in data["rays"])
        return cls(trunc=trunc, rays=rays, invariant_rank=inv)


def _validate_ray(ray: LocalRay, n_exp: int):
    d = ray.direction
    if d == (0, 0):
        raise InadmissibleWallDirection("ray direction must be nonzero")
    if primitive(d) != tuple(d):
        raise InadmissibleWallDirection(f"ray direction {d} is not primitive")
    for (A, m), c in ray.function.terms.items():
        if len(m) != n_exp:
            raise InadmissibleWallDirection(
                "function exponent length does not match the instance")
        if not any(A):
            if any(m) or c != 1:
                raise InadmissibleWallDirection(
                    "ray function must be 1 modulo the curve-class ideal")
            continue
        mt = (m[0], m[1])
        # exponents must run along the ray: emitted rays carry incoming
        # (negative) multiples, halves of initial lines may carry either
        if mt == (0, 0):
            raise InadmissibleWallDirection(
                f"exponent {m} has no transverse part")
        q = next(Fraction(mt[i], d[i]) for i in (0, 1) if d[i])
        if q == 0 or q.denominator != 1 or \
                mt != tuple(int(q) * x for x in d):
            raise InadmissibleWallDirection(
                f"exponent {m} is not parallel to {d}")


def _half(d) -> int:
    # 0 for angles in [0, pi), 1 for [pi, 2pi)
    return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1


def _angle_cmp(a, b) -> int:
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha - hb
    cross = a[0] * b[1] - a[1] * b[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def ordered_rays(inst: LocalInstance, start: int = 0,
                 reverse: bool = False) -> list[LocalRay]:
    """Rays in angular crossing order, optionally rotated or reversed."""
    rays = sorted(inst.rays,
                  key=cmp_to_key(lambda r1, r2: _angle_cmp(r1.direction,
                                                           r2.direction)))
    k = start % len(rays) if rays else 0
    rays = rays[k:] + rays[:k]
    return rays[::-1] if reverse else rays


def _normal(direction, n_exp: int, sign: int = 1):
    # conormal oriented against the direction of travel: this is the
    # orientation under which two basis lines scatter with coefficient +1
    return (sign * direction[1], -sign * direction[0]) + \
        (0,) * (n_exp - 2)


def path_ordered(inst: LocalInstance, g: RingElement, start: int = 0,
                 reverse: bool = False) -> RingElement:
    """Apply the crossing automorphisms of one full loop to ``g``.

    The loop runs counterclockwise; reversal traverses clockwise with the
    conormals flipped, so a consistent diagram passes either way.
    """
    sign = -1 if reverse else 1
    for ray in ordered_rays(inst, start=start, reverse=reverse):
        g = apply_theta(ray.function,
                        _normal(ray.direction, inst.n_exp, sign), g)
    return g


def generators(inst: LocalInstance) -> list[RingElement]:
    zero_A = (0,) * inst.trunc.curve_rank
    gens = []
    for i in range(2):
        for s in (1, -1):
            m = tuple(s if j == i else 0 for j in range(inst.n_exp))
            gens.append(RingElement.monomial(zero_A, m, 1, LOCAL_CHART,
                                             inst.trunc))
    return gens


def _weight_filter(e: RingElement, w: int) -> RingElement:
    terms = {k: c for k, c in e.terms.items()
             if e.trunc.weight_of(k[0]) <= w}
    return RingElement(terms, e.cone, e.trunc, e.n)


def identity_around(inst: LocalInstance, start: int = 0,
                    reverse: bool = False, max_weight: int | None = None):
    """Is the path-ordered loop the identity?  Returns (ok, witness)."""
    for g in generators(inst):
        out = path_ordered(inst, g, start=start, reverse=reverse)
        diff = out.sub(g)
        if max_weight is not None:
            diff = _weight_filter(diff, max_weight)
        if not diff.is_zero():
            (A, m), c = diff.sorted_terms()[0]
            gen_m = next(iter(g.terms))[1]
            return False, {"generator": list(gen_m), "A": list(A),
                           "m": list(m), "coefficient": str(c)}
    return True, None


# -- joint reports -----------------------------------------------------------

@dataclass(frozen=True)
class JointReport:
    joint: object
    codim: int
    boundary: bool
    verdict: str               # "pass" | "fail"
    witness: object = None

    def __post_init__(self):
        if self.verdict == "pass" and self.witness is not None:
            raise ConsistencyError("a passing report cannot carry a witness")

    def to_json(self) -> dict:
        return {"joint": _joint_json(self.joint), "codim": self.codim,
                "boundary": self.boundary, "verdict": self.verdict,
                "witness": self.witness}


def _joint_json(j):
    if isinstance(j, tuple):
        return [list(x) if isinstance(x, tuple) else x for x in j]
    return j


# -- patching checks ---------------------------------------------------------

@dataclass(frozen=True)
class PatchingItem:
    name: str                  # chamber-invariance | intertwining | slab-lift
    p: tuple
    location: object
    verdict: str
    witness: object = None


@dataclass(frozen=True)
class PatchingReport:
    passed: bool
    items: tuple[PatchingItem, ...]

    def first_failure(self) -> PatchingItem | None:
        for item in self.items:
            if item.verdict != "pass":
                return item
        return None


def default_p_set(s: WallStructure) -> dict:
    """Per chart: primitive chamber-ray generators and their pairwise sums."""
    rs = planar_chambers(s)
    per_chart: dict[tuple, set] = {}
    for ch in rs.chambers:
        per_chart.setdefault(tuple(ch.cone), set()).update(
            (primitive(ch.lower), primitive(ch.upper)))
    out = {}
    for cone, gens in per_chart.items():
        gens = sorted(gens)
        sums = {tuple(a + b for a, b in zip(g1, g2))
                for g1 in gens for g2 in gens}
        out[cone] = tuple(sorted(set(gens) | {x for x in sums if any(x)}))
    return out


def _witness(diff: RingElement):
    (A, m), c = diff.sorted_terms()[0]
    return {"A": list(A), "m": list(m), "coefficient": str(c)}


def _theta_in_chamber(s, ch, p, seed):
    if isinstance(p, PointInChart):
        cands = _candidate_monomials(s, tuple(p.cone),
                                     tuple(int(c) for c in p.coords))
    else:
        cands = _candidate_monomials(s, tuple(ch.cone), tuple(p))
    x = _sample_in_chamber(s, ch, cands, seed)
    return theta(s, p, x), x


def patching_check(s: WallStructure, p_set: dict | None = None,
                   seed: int = 0) -> PatchingReport:
    """Theta-patching verification on a two-dimensional structure.

    For each p in the p-set: (1) theta is constant on chamber interiors,
    (2) thetas of adjacent chambers are intertwined by the wall crossing,
    (3) each slab admits a unique two-sided lift whose localizations
    reproduce the adjacent thetas.
    """
    if s.complex.n != 2:
        raise UnsupportedDimension("patching checks need a surface")
    s = refine(s)
    if p_set is None:
        p_set = default_p_set(s)
    rs = planar_chambers(s)
    items = []
    # (1) chamber-interior invariance
    for ch in rs.chambers:
        for p in p_set.get(tuple(ch.cone), ()):
            t1, _ = _theta_in_chamber(s, ch, p, seed)
            t2, _ = _theta_in_chamber(s, ch, p, seed + 1)
            diff = t1.sub(t2)
            loc = (tuple(ch.cone), ch.lower, ch.upper)
            if diff.is_zero():
                items.append(PatchingItem("chamber-invariance", tuple(p),
                                          loc, "pass"))
            else:
                items.append(PatchingItem("chamber-invariance", tuple(p),
                                          loc, "fail", _witness(diff)))
    # (2) intertwining across interior codim-0 walls
    for w in s.walls:
        if w.rho is not None:
            continue
        ray = primitive(w.support[0])
        below = [ch for ch in rs.chambers
                 if tuple(ch.cone) == tuple(w.cone) and ch.lower == ray]
        above = [ch for ch in rs.chambers
                 if tuple(ch.cone) == tuple(w.cone) and ch.upper == ray]
        if not below or not above:
            continue
        for p in p_set.get(tuple(w.cone), ()):
            t_src, x_src = _theta_in_chamber(s, above[0], p, seed)
            t_dst, _ = _theta_in_chamber(s, below[0], p, seed)
            crossed = cross_wall(t_src, w, source_side=x_src.coords)
            diff = crossed.sub(t_dst)
            loc = (tuple(w.cone), ray)
            if diff.is_zero():
                items.append(PatchingItem("intertwining", tuple(p), loc,
                                          "pass"))
            else:
                items.append(PatchingItem("intertwining", tuple(p), loc,
                                          "fail", _witness(diff)))
    # (3) slab lifts
    for w in s.walls:
        if w.rho is None:
            continue
        items.extend(_slab_lift_items(s, w, p_set, seed))
    passed = all(i.verdict == "pass" for i in items)
    return PatchingReport(passed=passed, items=tuple(items))


def _adjacent_chamber(rs, cone, ray, side):
    """The chamber of ``cone`` having ``ray`` as lower/upper boundary."""
    for ch in rs.chambers:
        if tuple(ch.cone) != tuple(cone):
            continue
        if side == "lower" and ch.lower == ray:
            return ch
        if side == "upper" and ch.upper == ray:
            return ch
    return None


def _slab_lift_items(s: WallStructure, w, p_set, seed):
    """Existence/uniqueness of the two-sided slab lift of each theta."""
    cx = s.complex
    rho = tuple(sorted(w.rho))
    sides = [tuple(c) for c in cx.max_cones_containing(rho)]
    if len(sides) != 2:
        return []
    side_u = tuple(w.cone)
    side_u2 = next(c for c in sides if c != side_u)
    f_slab = w.function
    slab = SlabData(cx=cx, rho=rho, side_u=side_u, side_u2=side_u2,
                    f_slab=f_slab)
    rs = planar_chambers(s)
    items = []
    pos_u = side_u.index(rho[0])
    pos_u2 = side_u2.index(rho[0])
    ray_u = tuple(1 if j == pos_u else 0 for j in range(2))
    ray_u2 = tuple(1 if j == pos_u2 else 0 for j in range(2))
    # chambers hugging the slab from either side
    ch_u = (_adjacent_chamber(rs, side_u, ray_u, "lower")
            or _adjacent_chamber(rs, side_u, ray_u, "upper"))
    ch_u2 = (_adjacent_chamber(rs, side_u2, ray_u2, "lower")
             or _adjacent_chamber(rs, side_u2, ray_u2, "upper"))
    if ch_u is None or ch_u2 is None:
        return []
    extra_u = 1 - pos_u
    extra_u2 = 1 - pos_u2
    for p in p_set.get(side_u, ()):
        theta_u, _ = _theta_in_chamber(s, ch_u, p, seed)
        # same global asymptotic direction, evaluated from the far chamber
        p_pic = PointInChart(side_u, [Fraction(c) for c in p], ambient=True)
        theta_u2, _ = _theta_in_chamber(s, ch_u2, p_pic, seed)
        lift = _slab_lift(slab, s.trunc, theta_u, theta_u2,
                          pos_u, extra_u, pos_u2, extra_u2)
        img_u = slab_localize(lift, side_u)
        img_u2 = slab_localize(lift, side_u2)
        loc = ("slab", rho)
        diff = img_u.sub(theta_u)
        diff2 = img_u2.sub(theta_u2)
        if diff.is_zero() and diff2.is_zero():
            items.append(PatchingItem("slab-lift", tuple(p), loc, "pass"))
        else:
            bad = diff if not diff.is_zero() else diff2
            items.append(PatchingItem("slab-lift", tuple(p), loc, "fail",
                                      _witness(bad)))
    return items


def _slab_lift(slab, trunc, theta_u, theta_u2, pos_u, extra_u,
               pos_u2, extra_u2) -> SlabRingElement:
    """The candidate lift: Z+ terms from one side, Z- from the other,
    tangent terms once."""
    terms = {}
    for (A, m), c in theta_u.terms.items():
        e = m[extra_u]
        if e >= 0:
            key = (A, (m[pos_u],), e, 0)
            terms[key] = terms.get(key, Fraction(0)) + c
    for (A, m), c in theta_u2.terms.items():
        e = m[extra_u2]
        if e > 0:
            key = (A, (m[pos_u2],), 0, e)
            terms[key] = terms.get(key, Fraction(0)) + c
    return SlabRingElement(slab, terms, trunc)


# -- joint checks ------------------------------------------------------------

@dataclass(frozen=True)
class LocalizedJoint:
    """A joint localization: a planar instance or the global dispatch."""

    instance: LocalInstance | None
    global_dispatch: bool
    chart: tuple | None = None
    basis: tuple | None = None   # unimodular exponent map rows


def _is_apex(joint) -> bool:
    if joint is None or joint == "apex":
        return True
    if isinstance(joint, (tuple, list)) and joint and \
            all(x == 0 for x in joint):
        return True
    return False


def localize_at_joint(s: WallStructure, joint) -> LocalizedJoint:
    """Planar instance of the structure around an interior joint.

    The joint is the apex (dispatches to the global patching check) or a
    pair (chart, ray) naming a ray inside a chart of a structure with
    n >= 3; directions along the ray become invariant exponent coordinates
    and walls containing the ray contribute their tangent cones.
    """
    cx = s.complex
    if _is_apex(joint):
        return LocalizedJoint(instance=None, global_dispatch=True)
    chart, ray = tuple(joint[0]), tuple(int(x) for x in joint[1])
    n = cx.n
    if n < 3:
        raise UnsupportedDimension(
            "non-apex joints require a structure of dimension >= 3")
    ray = primitive(ray)
    for rho in cx.boundary_codim1():
        rho = tuple(sorted(rho))
        if set(rho) <= set(chart):
            positions = {chart.index(d) for d in rho}
            if all(ray[j] == 0 for j in range(n) if j not in positions):
                raise BoundaryJoint(f"ray {ray} lies in the boundary")
    # unimodular coordinates: first coordinate along the ray
    snf = smith_normal_form(IntegerMatrix.from_rows([[x] for x in ray]))
    u_rows = snf.U.to_rows()          # U * ray = (1, 0, ..., 0)
    inv_rank = 1
    order = list(range(1, n)) + [0]   # transverse first, invariant last
    rows = [u_rows[i] for i in order]

    def remap(m):
        return tuple(sum(r[j] * m[j] for j in range(n)) for r in rows)

    rays = []
    for w in s.walls:
        if tuple(w.cone) != chart:
            continue
        coeffs = _ray_in_cone(ray, w.support)
        if coeffs is None:
            continue
        dirs = set()
        for g in w.support:
            d = remap(g)[:2]
            if any(d):
                dirs.add(primitive(d))
        if len(dirs) != 1:
            continue  # the wall is not a half-plane along the joint
        direction = dirs.pop()
        func = RingElement(
            {(A, remap(m)): c for (A, m), c in w.function.terms.items()},
            LOCAL_CHART, s.trunc, 2 + inv_rank)
        rays.append(LocalRay(direction=direction, function=func))
    inst = LocalInstance(trunc=s.trunc, rays=tuple(rays),
                         invariant_rank=inv_rank)
    return LocalizedJoint(instance=inst, global_dispatch=False,
                          chart=chart, basis=tuple(tuple(r) for r in rows))


def _ray_in_cone(ray, generators):
    """Nonnegative rational coordinates of ray in the cone, or None."""
    from . import linalg
    n = len(ray)
    cols = [[Fraction(g[j]) for g in generators] for j in range(n)]
    sol = linalg.solve(cols, [Fraction(x) for x in ray])
    if sol is None or any(c < 0 for c in sol):
        return None
    return tuple(sol)


def check_joint(s, joint=None, p_set: dict | None = None,
                seed: int = 0) -> JointReport:
    """Consistency verdict at one joint.

    A ``LocalInstance`` is checked as a codimension-zero joint directly.
    For a structure, the apex dispatches to the global patching check;
    (chart, ray) joints of higher-dimensional structures are localized
    first.  Boundary joints verify that every wall exponent is tangent to
    the boundary.
    """
    if isinstance(s, LocalInstance):
        ok, witness = identity_around(s)
        return JointReport(joint="local", codim=0, boundary=False,
                           verdict="pass" if ok else "fail",
                           witness=witness)
    if _is_apex(joint):
        report = patching_check(s, p_set=p_set, seed=seed)
        fail = report.first_failure()
        witness = None
        if fail is not None:
            witness = {"check": fail.name, "p": list(fail.p),
                       "detail": fail.witness}
        boundary = bool(s.complex.boundary_codim1())
        return JointReport(joint="apex", codim=2, boundary=boundary,
                           verdict="pass" if report.passed else "fail",
                           witness=witness)
    try:
        loc = localize_at_joint(s, joint)
    except BoundaryJoint:
        return _boundary_joint_report(s, joint)
    codim = _joint_codim(s.complex, joint)
    ok, witness = identity_around(loc.instance)
    return JointReport(joint=joint, codim=codim, boundary=False,
                       verdict="pass" if ok else "fail", witness=witness)


def _joint_codim(cx: ConeComplex, joint) -> int:
    """Codimension of the smallest cell containing the joint ray."""
    chart, ray = tuple(joint[0]), tuple(joint[1])
    n = cx.n
    best = 0
    for cell in cx.cones:
        if not set(cell) <= set(chart):
            continue
        positions = {chart.index(d) for d in cell}
        if all(ray[j] == 0 for j in range(n) if j not in positions):
            best = max(best, n - len(cell))
    return min(best, 2)


def _boundary_joint_report(s: WallStructure, joint) -> JointReport:
    """Boundary joints: every wall exponent must be tangent to the boundary.

    Tangency means the exponent lies in the span of some boundary facet
    containing the joint ray (the tangent cone of the boundary there).
    """
    cx = s.complex
    chart, ray = tuple(joint[0]), tuple(int(x) for x in joint[1])
    n = cx.n
    facet_positions = []
    for rho in cx.boundary_codim1():
        rho = tuple(sorted(rho))
        if not set(rho) <= set(chart):
            continue
        positions = {chart.index(d) for d in rho}
        if all(ray[j] == 0 for j in range(n) if j not in positions):
            facet_positions.append(positions)
    for w in s.walls:
        if tuple(w.cone) != chart or _ray_in_cone(ray, w.support) is None:
            continue
        for (A, m), _c in w.function.terms.items():
            if not any(A):
                continue
            tangent = any(all(m[j] == 0 for j in range(n) if j not in pos)
                          for pos in facet_positions)
            if not tangent:
                return JointReport(
                    joint=joint, codim=2, boundary=True, verdict="fail",
                    witness={"A": list(A), "m": list(m)})
    return JointReport(joint=joint, codim=2, boundary=True, verdict="pass")


def _candidate_joints(s: WallStructure):
    """Ray joints where walls can meet: primitive support generators."""
    joints, seen = [], set()
    for w in s.walls:
        for g in w.support:
            j = (tuple(w.cone), primitive(g))
            if j not in seen:
                seen.add(j)
                joints.append(j)
    return joints


def check_structure(s: WallStructure, level: str = "all",
                    seed: int = 0) -> list[JointReport]:
    """All joint reports of a structure, sorted deterministically."""
    reports = []
    lv = str(level)
    if s.complex.n >= 3:
        for j in _candidate_joints(s):
            rep = check_joint(s, j, seed=seed)
            if lv == "all" or str(rep.codim) == lv:
                reports.append(rep)
    elif lv in ("2", "all"):
        reports.append(check_joint(s, "apex", seed=seed))
    return sorted(reports, key=lambda r: str(r.joint))


# -- local scattering completion ---------------------------------------------

def _merge_ray(rays: list[LocalRay], direction, factor: RingElement):
    for i, r in enumerate(rays):
        if r.direction == tuple(direction):
            rays[i] = replace(r, function=r.function.mul(factor))
            return
    rays.append(LocalRay(direction=tuple(direction), function=factor))


def _discrepancy(inst: LocalInstance, g: RingElement) -> RingElement:
    zero_A = (0,) * inst.trunc.curve_rank
    gm = next(iter(g.terms))[1]
    inv = RingElement.monomial(zero_A, tuple(-x for x in gm), 1,
                               LOCAL_CHART, inst.trunc)
    return path_ordered(inst, g).mul(inv).sub(
        RingElement.one(LOCAL_CHART, inst.trunc, inst.n_exp))


def complete_codim0(inst: LocalInstance, joint=None,
                    max_weight: int | None = None) -> LocalInstance:
    """Insert outgoing rays until the loop is the identity, order by order.

    Deterministic: lowest curve-class weight first, then angular order of
    the emitted directions.  The coefficient of each inserted factor is
    solved for exactly (a linear probe at the current order), so the sign
    conventions of the crossing automorphism are never hard-coded.
    """
    if max_weight is None:
        max_weight = inst.trunc.max_weight()
    if max_weight > inst.trunc.max_weight():
        raise NonConvergent(
            f"completion weight {max_weight} exceeds the truncation order "
            f"{inst.trunc.max_weight()}")
    trunc = inst.trunc
    rays = list(inst.rays)
    gens = generators(inst)
    for w in range(1, max_weight + 1):
        for _safety in range(256):
            cur = replace(inst, rays=tuple(rays))
            failing = {}
            for g in gens:
                disc = _discrepancy(cur, g)
                for (A, m), c in disc.terms.items():
                    if trunc.weight_of(A) == w:
                        failing.setdefault((A, m), []).append((g, c))
            if not failing:
                break

            def order_key(key):
                A, m = key
                d = primitive((-m[0], -m[1])) if (m[0], m[1]) != (0, 0) \
                    else (0, 0)
                slope = Fraction(d[0], abs(d[0]) + abs(d[1])) if any(d) \
                    else Fraction(0)
                return (_half(d), slope, A, m)

            A, m = sorted(failing, key=order_key)[0]
            if (m[0], m[1]) == (0, 0):
                raise NonConvergent(
                    f"discrepancy t^{list(A)} z^{list(m)} has no "
                    "transverse direction to emit")
            direction = primitive((-m[0], -m[1]))
            g0, eps0 = failing[(A, m)][0]
            probe = RingElement.monomial(A, m, 1, LOCAL_CHART, trunc)
            probe_rays = list(rays)
            _merge_ray(probe_rays, direction, exp_truncated(probe))
            disc1 = _discrepancy(replace(inst, rays=tuple(probe_rays)), g0)
            eps1 = disc1.coefficient(A, m)
            denom = eps1 - eps0
            if denom == 0:
                raise NonConvergent(
                    f"no ray along {direction} can absorb t^{list(A)} "
                    f"z^{list(m)}")
            gamma = -eps0 / denom
            _merge_ray(rays, direction, exp_truncated(probe.scale(gamma)))
        else:
            raise NonConvergent(f"completion did not settle at weight {w}")
    done = replace(inst, rays=tuple(rays))
    ok, witness = identity_around(done, max_weight=max_weight)
    if not ok:
        raise NonConvergent(f"loop still fails: {witness}")
    return done


def nontrivial_rays(inst: LocalInstance) -> list[LocalRay]:
    return [r for r in inst.rays if not r.function.is_one()]
