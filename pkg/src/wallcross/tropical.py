"""Tropical types: balancing, universal cones, classification, gluing.

A tropical type is a tree decorated with cells of a cone complex and
integral contact orders.  The module computes the universal family of
tropical maps of a type by exact polyhedral algebra in a single chart,
classifies types (wall / broken-line / degenerate / product), computes
lattice-index multiplicities of vertex splittings, and glues broken-line
types into product types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import (
    IncompatibleOutputs,
    RankDeficient,
    TropicalError,
    UnsupportedDimension,
    Unrealizable,
    VertexInDelta,
)
from .geometry import ConeComplex
from .lattice import INFINITE, IntegerMatrix, cokernel_order, kernel_basis

ConeId = tuple

ROLES = ("out", "inc", "in1", "in2")


@dataclass(frozen=True)
class Vertex:
    cone: ConeId                      # cell of the complex (divisor tuple)
    A: tuple[int, ...] | None = None  # optional curve-class decoration
    # optional finer constraint: generators (chart coords) of a subcone the
    # vertex position must lie in (relative interior); used for vertices on
    # walls, whose supports are not cells of the complex
    rays: tuple[tuple[int, ...], ...] | None = None


@dataclass(frozen=True)
class Edge:
    v: tuple[int, int]        # tail, head vertex indices
    u: tuple[int, ...]        # contact order, oriented tail -> head


@dataclass(frozen=True)
class Leg:
    v: int
    u: tuple[int, ...]
    role: str | None = None   # "out" | "inc" | "in1" | "in2" | None


@dataclass(frozen=True)
class TropicalType:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    legs: tuple[Leg, ...]

    def __post_init__(self):
        nv = len(self.vertices)
        for e in self.edges:
            if not (0 <= e.v[0] < nv and 0 <= e.v[1] < nv):
                raise TropicalError("edge endpoint out of range")
        for l in self.legs:
            if not 0 <= l.v < nv:
                raise TropicalError("leg vertex out of range")
            if l.role is not None and l.role not in ROLES:
                raise TropicalError(f"unknown leg role {l.role!r}")
        # genus 0: connected tree
        if self.edges or nv > 1:
            if len(self.edges) != nv - 1:
                raise TropicalError("graph is not a tree")
            seen = {0}
            frontier = [0]
            adj = {i: [] for i in range(nv)}
            for e in self.edges:
                adj[e.v[0]].append(e.v[1])
                adj[e.v[1]].append(e.v[0])
            while frontier:
                w = frontier.pop()
                for nb in adj[w]:
                    if nb not in seen:
                        seen.add(nb)
                        frontier.append(nb)
            if len(seen) != nv:
                raise TropicalError("graph is not connected")

    def leg_with_role(self, role: str) -> tuple[int, Leg] | None:
        for i, l in enumerate(self.legs):
            if l.role == role:
                return i, l
        return None

    def to_json(self) -> dict:
        verts = []
        for v in self.vertices:
            d = {"cone": list(v.cone)}
            if v.A is not None:
                d["A"] = list(v.A)
            if v.rays is not None:
                d["rays"] = [list(r) for r in v.rays]
            verts.append(d)
        return {
            "vertices": verts,
            "edges": [{"v": list(e.v), "u": list(e.u)} for e in self.edges],
            "legs": [
                {"v": l.v, "u": list(l.u)} if l.role is None else
                {"v": l.v, "u": list(l.u), "role": l.role}
                for l in self.legs],
        }

    @classmethod
    def from_json(cls, data) -> "TropicalType":
        return cls(
            vertices=tuple(
                Vertex(cone=tuple(v["cone"]),
                       A=tuple(v["A"]) if "A" in v else None,
                       rays=tuple(tuple(r) for r in v["rays"])
                       if "rays" in v else None)
                for v in data["vertices"]),
            edges=tuple(Edge(v=tuple(e["v"]), u=tuple(e["u"]))
                        for e in data["edges"]),
            legs=tuple(Leg(v=l["v"], u=tuple(l["u"]), role=l.get("role"))
                       for l in data["legs"]),
        )


# -- chart selection ---------------------------------------------------------

def _containing_chart(t: TropicalType, cx: ConeComplex) -> ConeId:
    """A maximal cone whose faces contain every cell of the type."""
    cells = [set(v.cone) for v in t.vertices]
    for sigma in cx.maximal_cones:
        s = set(sigma)
        if all(c <= s for c in cells):
            return sigma
    raise UnsupportedDimension(
        "type spans several charts; only single-chart types are supported")


def _in_cell(u: Sequence[int], chart: ConeId, cell: ConeId) -> bool:
    """Is the integer vector inside the (closed) cell, in chart coords?"""
    positions = {chart.index(d) for d in cell}
    return all(u[j] >= 0 if j in positions else u[j] == 0
               for j in range(len(chart)))


# -- balancing ---------------------------------------------------------------

def balancing_check(t: TropicalType, cx: ConeComplex):
    """Check the balancing condition; returns (ok, failing vertex or None).

    Vertices over cells of codimension at most one are checked; deeper
    vertices are skipped.  All data must live in one chart.
    """
    chart = _containing_chart(t, cx)
    n = cx.n
    for i, v in enumerate(t.vertices):
        if tuple(sorted(v.cone)) in cx.delta_cones():
            raise VertexInDelta(f"vertex {i} lies in the singular locus")
        if len(v.cone) < n - 1:
            continue
        total = [0] * n
        for e in t.edges:
            if e.v[0] == i:
                total = [a + b for a, b in zip(total, e.u)]
            if e.v[1] == i:
                total = [a - b for a, b in zip(total, e.u)]
        for l in t.legs:
            if l.v == i:
                total = [a + b for a, b in zip(total, l.u)]
        if any(total):
            return False, i
    return True, None


# -- exact feasibility (Fourier-Motzkin) -------------------------------------

def _fm_feasible(rows) -> bool:
    """Feasibility of constraints sum(c*t)+const >= 0 (or > 0 if strict).

    Each row is (coeffs tuple of Fractions, const Fraction, strict bool).
    """
    rows = [(list(c), Fraction(k), s) for c, k, s in rows]
    nvar = len(rows[0][0]) if rows else 0
    for var in range(nvar):
        pos, neg, rest = [], [], []
        for c, k, s in rows:
            if c[var] > 0:
                pos.append((c, k, s))
            elif c[var] < 0:
                neg.append((c, k, s))
            else:
                rest.append((c, k, s))
        new = rest
        for cp, kp, sp in pos:
            for cn, kn, sn in neg:
                # eliminate: cp[var]*(-cn) + cn[var]*... combine scaled rows
                a, b = cp[var], -cn[var]
                c = [b * x + a * y for x, y in zip(cp, cn)]
                c[var] = Fraction(0)
                new.append((c, b * kp + a * kn, sp or sn))
        rows = new
    return all((k > 0 if s else k >= 0) for _c, k, s in rows)


def _substitute(row, basis):
    """Rewrite a constraint over x as a constraint over nullspace coords."""
    coeffs, const, strict = row
    out = []
    for b in basis:
        out.append(sum(Fraction(c) * b[j] for j, c in enumerate(coeffs)))
    return out, Fraction(const), strict


# -- universal cone ----------------------------------------------------------

@dataclass(frozen=True)
class UniversalCone:
    chart: ConeId
    nvars: int                       # vertex-position coords then edge lengths
    vertex_offset: tuple[int, ...]
    edge_offset: tuple[int, ...]
    equalities: tuple[tuple[int, ...], ...]   # rows: sum c*x = 0
    inequalities: tuple[tuple[tuple[int, ...], bool], ...]  # (row, strict)
    dim_type: int
    dim_out: int
    basis: tuple[tuple[Fraction, ...], ...] = field(repr=False, default=())


def _build_system(t: TropicalType, cx: ConeComplex):
    chart = _containing_chart(t, cx)
    n = cx.n
    nv = len(t.vertices)
    ne = len(t.edges)
    # variables: vertex positions, edge lengths, then barycentric
    # parameters of ray-constrained vertices
    voff = tuple(n * i for i in range(nv))
    eoff = tuple(n * nv + i for i in range(ne))
    nvars = n * nv + ne
    roff = {}
    for vi, v in enumerate(t.vertices):
        if v.rays is not None:
            roff[vi] = nvars
            nvars += len(v.rays)
    eqs = []
    ineqs = []  # (row, strict)

    def unit(j):
        r = [0] * nvars
        r[j] = 1
        return r

    # edge matching: h(head) - h(tail) - l_E * u = 0
    for ei, e in enumerate(t.edges):
        for j in range(n):
            row = [0] * nvars
            row[voff[e.v[1]] + j] += 1
            row[voff[e.v[0]] + j] -= 1
            row[eoff[ei]] -= e.u[j]
            eqs.append(row)
        ineqs.append((unit(eoff[ei]), True))   # honest edges: length > 0
    # vertex membership (relative interior of the cell or the ray subcone)
    for vi, v in enumerate(t.vertices):
        if v.rays is not None:
            # h(v) = sum lambda_k * ray_k, lambda_k > 0
            for j in range(n):
                row = unit(voff[vi] + j)
                for k, g in enumerate(v.rays):
                    row[roff[vi] + k] -= g[j]
                eqs.append(row)
            for k in range(len(v.rays)):
                ineqs.append((unit(roff[vi] + k), True))
            continue
        positions = {chart.index(d) for d in v.cone}
        for j in range(n):
            row = unit(voff[vi] + j)
            if j in positions:
                ineqs.append((row, True))
            else:
                eqs.append(row)
    return chart, nvars, voff, eoff, eqs, ineqs


def universal_cone(t: TropicalType, cx: ConeComplex) -> UniversalCone:
    """Solve the tropical-map constraints of a type exactly."""
    chart, nvars, voff, eoff, eqs, ineqs = _build_system(t, cx)
    n = cx.n
    if eqs:
        basis = linalg.nullspace([[Fraction(c) for c in row] for row in eqs],
                                 cols=nvars)
    else:
        basis = [tuple(Fraction(1) if j == i else Fraction(0)
                       for j in range(nvars)) for i in range(nvars)]
    rows = [_substitute((row, 0, strict), basis) for row, strict in ineqs]
    if not _fm_feasible(rows):
        raise Unrealizable("the constraint system has no honest solution")
    dim_type = len(basis)
    # dim of the image swept by the out-leg (or the first leg)
    out = t.leg_with_role("out") or ((0, t.legs[0]) if t.legs else None)
    if out is not None:
        _i, leg = out
        proj = [[b[voff[leg.v] + j] for j in range(n)] for b in basis]
        proj.append([Fraction(x) for x in leg.u])
        dim_out = linalg.rank(proj)
    else:
        dim_out = 0
    return UniversalCone(chart=chart, nvars=nvars, vertex_offset=voff,
                         edge_offset=eoff,
                         equalities=tuple(tuple(r) for r in eqs),
                         inequalities=tuple((tuple(r), s) for r, s in ineqs),
                         dim_type=dim_type, dim_out=dim_out,
                         basis=tuple(tuple(b) for b in basis))


# -- classification ----------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    kind: str                  # wall | broken-line | degenerate | product | none
    dim_type: int
    dim_out: int
    k_tau: int
    decoration_admissible: bool
    d_values: tuple
    spine_vertices: tuple[int, ...]


def _k_tau(t: TropicalType, cx: ConeComplex, uc: UniversalCone) -> int:
    """Torsion cokernel order of out-evaluation into the target lattice."""
    n = cx.n
    out = t.leg_with_role("out") or ((0, t.legs[0]) if t.legs else None)
    if out is None:
        return 1
    _i, leg = out
    # integer solutions of the equalities, with one extra leg parameter
    nvars = uc.nvars + 1
    rows = [list(r) + [0] for r in uc.equalities]
    if not rows:
        rows = [[0] * nvars]
    lat = kernel_basis(IntegerMatrix.from_rows(rows))
    images = []
    for b in lat:
        img = [b[uc.vertex_offset[leg.v] + j] + b[-1] * leg.u[j]
               for j in range(n)]
        images.append(img)
    if not images:
        return 1
    mat = IntegerMatrix.from_rows([[img[j] for img in images]
                                   for j in range(n)])
    order = cokernel_order(mat, torsion_only=True)
    assert order is not INFINITE
    return order


def _spine(t: TropicalType):
    """Minimal connected subtree containing every leg-bearing vertex."""
    nv = len(t.vertices)
    leggy = {l.v for l in t.legs}
    adj = {i: set() for i in range(nv)}
    for ei, e in enumerate(t.edges):
        adj[e.v[0]].add((e.v[1], ei))
        adj[e.v[1]].add((e.v[0], ei))
    alive = set(range(nv))
    edges = set(range(len(t.edges)))
    changed = True
    while changed:
        changed = False
        for i in sorted(alive):
            if i in leggy:
                continue
            incident = [(nb, ei) for nb, ei in adj[i]
                        if nb in alive and ei in edges]
            if len(incident) <= 1:
                alive.discard(i)
                for _nb, ei in incident:
                    edges.discard(ei)
                changed = True
    if not alive and nv:
        alive = {min(leggy) if leggy else 0}
    return tuple(sorted(alive)), tuple(sorted(edges))


def spine(t: TropicalType):
    """Spine subtree; for two-leg types also the leg-to-leg vertex path."""
    verts, edges = _spine(t)
    sequence = ()
    if len(t.legs) == 2 and verts:
        adj = {i: [] for i in verts}
        for ei in edges:
            a, b = t.edges[ei].v
            adj[a].append(b)
            adj[b].append(a)
        start, goal = t.legs[0].v, t.legs[1].v
        path = [start]
        prev = None
        while path[-1] != goal:
            nxt = [w for w in adj[path[-1]] if w != prev]
            if not nxt:
                break
            prev = path[-1]
            path.append(nxt[0])
        sequence = tuple(path)
    return verts, edges, sequence


def _decoration_check(t: TropicalType, cx: ConeComplex, chart: ConeId):
    """Admissibility of A: zero over maximal cells, d*[X_rho] over codim 1.

    Only spine vertices are checked; returns (ok, d-values per vertex).
    """
    n = cx.n
    spine_verts, _ = _spine(t)
    ok = True
    dvals = {}
    for i in spine_verts:
        v = t.vertices[i]
        A = v.A
        if len(v.cone) == n:
            if A is not None and any(A):
                ok = False
            dvals[i] = 0
            continue
        if len(v.cone) != n - 1:
            continue
        rho = tuple(sorted(v.cone))
        normal = cx.normal_into(chart, rho)
        pair_vals = set()
        for e in t.edges:
            if i in e.v:
                p = abs(sum(a * b for a, b in zip(normal, e.u)))
                if p:
                    pair_vals.add(p)
        for l in t.legs:
            if l.v == i:
                p = abs(sum(a * b for a, b in zip(normal, l.u)))
                if p:
                    pair_vals.add(p)
        if len(pair_vals) > 1:
            ok = False
            dvals[i] = None
            continue
        d = pair_vals.pop() if pair_vals else 0
        dvals[i] = d
        if A is not None:
            kink = cx.kink(rho)
            if tuple(A) != tuple(d * k for k in kink):
                ok = False
    return ok, tuple(sorted(dvals.items()))


def classify(t: TropicalType, cx: ConeComplex) -> Classification:
    """Classify a realizable type by leg roles and dimension pair."""
    uc = universal_cone(t, cx)
    n = cx.n
    roles = sorted(l.role for l in t.legs if l.role)
    dims = (uc.dim_type, uc.dim_out)
    kind = "none"
    out = t.leg_with_role("out")
    inc = t.leg_with_role("inc")
    trivial = (roles == ["inc", "out"] and not t.edges
               and len(t.vertices) == 1 and out is not None
               and tuple(out[1].u) == tuple(-x for x in inc[1].u))
    if trivial:
        # an unbent segment: one free vertex carrying both legs
        kind = "broken-line"
    elif out is not None and any(out[1].u):
        if roles == ["out"]:
            if dims == (n - 2, n - 1):
                kind = "wall"
        elif roles == ["inc", "out"]:
            if dims == (n - 1, n):
                kind = "broken-line"
            elif dims == (n - 2, n - 1):
                kind = "degenerate"
        elif roles == ["in1", "in2", "out"]:
            if dims == (n, n):
                kind = "product"
    ktau = _k_tau(t, cx, uc)
    dec_ok, dvals = _decoration_check(t, cx, uc.chart)
    spine_verts, _, seq = spine(t) if t.legs else ((), (), ())
    return Classification(kind=kind, dim_type=uc.dim_type,
                          dim_out=uc.dim_out, k_tau=ktau,
                          decoration_admissible=dec_ok, d_values=dvals,
                          spine_vertices=seq or spine_verts)


# -- splitting multiplicities ------------------------------------------------

@dataclass(frozen=True)
class SplitPiece:
    """One piece of a vertex splitting, with marked gluing legs."""

    type: TropicalType
    gluing_legs: tuple[int, ...]


@dataclass(frozen=True)
class GluingEdge:
    """A gluing edge between two pieces with its stratum lattice.

    ``ends`` are (piece index, leg index) pairs; ``lattice`` is a tuple of
    integer basis vectors of the gluing-stratum lattice in chart coords.
    """

    ends: tuple[tuple[int, int], tuple[int, int]]
    lattice: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class MultiplicityResult:
    multiplicity: int
    rank_ok: bool
    dimension_formula_ok: bool
    epsilon: tuple  # the integer matrix rows of the difference map


def _enlarged_lattice(piece: SplitPiece, cx: ConeComplex):
    """Integral basis of the enlarged cone's lattice with leg points.

    Variables: the universal-cone variables, then one parameter per gluing
    leg.  Returns (universal cone, extra offsets, lattice basis rows).
    """
    uc = universal_cone(piece.type, cx)
    extra = len(piece.gluing_legs)
    nvars = uc.nvars + extra
    rows = [list(r) + [0] * extra for r in uc.equalities]
    if not rows:
        rows = [[0] * nvars]
    lat = kernel_basis(IntegerMatrix.from_rows(rows))
    return uc, nvars, lat


def _leg_point(piece, uc, nvars, vec, leg_index, param_pos, n):
    leg = piece.type.legs[leg_index]
    return [vec[uc.vertex_offset[leg.v] + j] + vec[param_pos] * leg.u[j]
            for j in range(n)]


def splitting_multiplicity(pieces: Sequence[SplitPiece],
                           edges: Sequence[GluingEdge],
                           cx: ConeComplex) -> MultiplicityResult:
    """Lattice index of the gluing difference map of a vertex splitting.

    For each gluing edge, the evaluation difference of the two leg points
    must land in the edge's stratum lattice; the multiplicity is the index
    of the image of the assembled integer map in the product of those
    lattices.
    """
    n = cx.n
    data = [_enlarged_lattice(p, cx) for p in pieces]
    # domain basis: block per piece
    blocks = []
    for (uc, nvars, lat), piece in zip(data, pieces):
        blocks.append((uc, nvars, lat, piece))
    columns = []  # epsilon^gp applied to each domain basis vector
    target_dim = sum(len(e.lattice) for e in edges)
    for bi, (uc, nvars, lat, piece) in enumerate(blocks):
        for vec in lat:
            col = []
            for e in edges:
                contrib = [0] * n
                for sign, (pi, li) in zip((1, -1), e.ends):
                    if pi != bi:
                        continue
                    pos = data[pi][1] - len(pieces[pi].gluing_legs) + \
                        pieces[pi].gluing_legs.index(li)
                    pt = _leg_point(pieces[pi], data[pi][0], data[pi][1],
                                    vec, li, pos, n)
                    contrib = [a + sign * b for a, b in zip(contrib, pt)]
                # express in the edge lattice basis
                col.extend(_in_lattice_basis(contrib, e.lattice))
            columns.append(col)
    if not columns:
        columns = [[0] * target_dim]
    eps = IntegerMatrix.from_rows(
        [[col[i] for col in columns] for i in range(target_dim)])
    rk = linalg.rank([[Fraction(x) for x in row] for row in eps.to_rows()])
    rank_ok = rk == target_dim
    if not rank_ok:
        raise RankDeficient(
            "the gluing difference map is not surjective over the rationals")
    order = cokernel_order(eps, torsion_only=True)
    assert order is not INFINITE
    # dimension formula: sum of enlarged dims = glued dim + sum of ranks
    total = sum(len(lat) for _uc, _nv, lat, _p in blocks)
    glued_dim = total - rk
    dim_ok = total == glued_dim + target_dim
    return MultiplicityResult(multiplicity=order, rank_ok=rank_ok,
                              dimension_formula_ok=dim_ok,
                              epsilon=tuple(tuple(r) for r in eps.to_rows()))


def _in_lattice_basis(vec, lattice):
    """Coordinates of an integer vector in a stratum-lattice basis."""
    cols = [[Fraction(b[j]) for b in lattice] for j in range(len(vec))]
    sol = linalg.solve(cols, [Fraction(x) for x in vec])
    if sol is None:
        raise TropicalError(
            f"evaluation difference {vec} leaves the stratum lattice span")
    out = []
    for x in sol:
        if x.denominator != 1:
            raise TropicalError(
                f"evaluation difference {vec} is not in the stratum lattice")
        out.append(int(x))
    return out


# -- displacement / transversality -------------------------------------------

@dataclass(frozen=True)
class TransverseReport:
    member: bool
    surjective: bool
    nu_general: bool


def transverse_check(pieces: Sequence[SplitPiece],
                     edges: Sequence[GluingEdge],
                     nu: Sequence[Sequence[int]],
                     cx: ConeComplex) -> TransverseReport:
    """Membership of a splitting in the displaced matching locus.

    ``nu`` gives one displacement vector per gluing edge (chart coords).
    The splitting belongs to the locus when the perturbed matching system
    has an honest solution; the displacement is general for this candidate
    when the difference map is surjective or the displacement misses its
    rational image.
    """
    n = cx.n
    data = [_enlarged_lattice(p, cx) for p in pieces]
    # rational solvability of eps(x) = nu over the combined parameter space
    columns = []
    for bi, ((uc, nvars, lat), piece) in enumerate(zip(data, pieces)):
        for vec in lat:
            col = []
            for e in edges:
                contrib = [0] * n
                for sign, (pi, li) in zip((1, -1), e.ends):
                    if pi != bi:
                        continue
                    pos = data[pi][1] - len(pieces[pi].gluing_legs) + \
                        pieces[pi].gluing_legs.index(li)
                    pt = _leg_point(pieces[pi], data[pi][0], data[pi][1],
                                    vec, li, pos, n)
                    contrib = [a + sign * b for a, b in zip(contrib, pt)]
                col.extend(contrib)
            columns.append(col)
    target = []
    for v in nu:
        target.extend(int(x) for x in v)
    rows = [[Fraction(col[i]) for col in columns]
            for i in range(len(target))]
    sol = linalg.solve(rows, [Fraction(x) for x in target])
    member = sol is not None
    rk = linalg.rank(rows)
    surjective = rk == len(target)
    nu_general = surjective or not member
    return TransverseReport(member=member, surjective=surjective,
                            nu_general=nu_general)


# -- product gluing ----------------------------------------------------------

def glue_product_type(t1: TropicalType, t2: TropicalType,
                      r: Sequence[int], cx: ConeComplex) -> TropicalType:
    """Graft two broken-line types at a new trivalent output vertex.

    The two output legs become edges into a fresh vertex carrying a new
    output leg with contact order -r; requires the final monomial
    directions to sum to r and the output data to share a chamber.
    """
    o1 = t1.leg_with_role("out")
    o2 = t2.leg_with_role("out")
    if o1 is None or o2 is None:
        raise IncompatibleOutputs("both types need an output leg")
    m1 = tuple(-x for x in o1[1].u)
    m2 = tuple(-x for x in o2[1].u)
    if tuple(a + b for a, b in zip(m1, m2)) != tuple(r):
        raise IncompatibleOutputs(
            f"final directions {m1} + {m2} do not sum to {list(r)}")
    c1 = _containing_chart(t1, cx)
    c2 = _containing_chart(t2, cx)
    if c1 != c2:
        raise IncompatibleOutputs("output data live in different charts")
    off2 = len(t1.vertices)
    v_out = off2 + len(t2.vertices)
    vertices = (t1.vertices + t2.vertices +
                (Vertex(cone=tuple(sorted(c1)),
                        A=(0,) * cx.curve_rank),))
    edges = list(t1.edges)
    edges += [Edge(v=(a + off2, b + off2), u=e.u)
              for e in t2.edges for a, b in [e.v]]
    # former output legs become edges toward the new vertex
    edges.append(Edge(v=(o1[1].v, v_out), u=o1[1].u))
    edges.append(Edge(v=(o2[1].v + off2, v_out), u=o2[1].u))
    legs = [Leg(v=l.v, u=l.u, role="in1" if l.role == "inc" else l.role)
            for i, l in enumerate(t1.legs) if i != o1[0]]
    legs += [Leg(v=l.v + off2, u=l.u,
                 role="in2" if l.role == "inc" else l.role)
             for i, l in enumerate(t2.legs) if i != o2[0]]
    legs.append(Leg(v=v_out, u=tuple(-x for x in r), role="out"))
    return TropicalType(vertices=vertices, edges=tuple(edges),
                        legs=tuple(legs))


def contact_multiplicity(cx: ConeComplex, chart: ConeId, rho: ConeId,
                         u: Sequence[int]) -> int:
    """|pairing| of a contact order with the conormal of a codim-1 cell."""
    normal = cx.normal_into(chart, tuple(sorted(rho)))
    return abs(sum(a * b for a, b in zip(normal, u)))
