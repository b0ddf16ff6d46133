"""Broken lines, theta functions, and tropical structure constants.

Enumeration runs backward from the endpoint: the state is a point together
with the monomial of the segment through it, the predecessor ray is the
point translated along the exponent direction, and branching inverts the
wall-crossing transport by enumerating wall-function term choices.  Every
nontrivial bend strictly decreases the remaining curve class, so tracing
terminates under truncation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import ring
from .errors import (
    BrokenLineError,
    EndpointOutsideFamily,
    InadmissibleType,
    NonGenericEndpoint,
    UnsupportedDimension,
    WallError,
    WrongSideCrossing,
)
from .geometry import GenericPointSampler, PointInChart
from .linalg import solve as _solve
from .ring import RingElement, Truncation
from .tropical import Edge, Leg, TropicalType, Vertex
from .walls import (
    Chamber,
    Wall,
    WallStructure,
    _cone_key,
    planar_chambers,
    primitive,
)

ConeId = tuple

_TRACE_LIMIT = 64


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _log_terms(f: RingElement):
    """Terms of log f for unipotent f, as (class, exponent, coeff) triples."""
    one = RingElement.one(f.cone, f.trunc, f.n)
    g = f.sub(one)
    acc = RingElement.zero(f.cone, f.trunc, f.n)
    power = one
    k = 1
    while True:
        power = power.mul(g)
        if power.is_zero():
            break
        acc = acc.add(power.scale(Fraction((-1) ** (k + 1), k)))
        k += 1
    return [(A, m, c) for (A, m), c in acc.sorted_terms()]


# -- domain types ------------------------------------------------------------

@dataclass(frozen=True)
class Bend:
    """One bend of a broken line.

    ``delta_class``/``delta_exponent`` are what the bend adds to the
    monomial going toward the endpoint; ``mu`` (decorated lines only) lists
    (wall log-term index, multiplicity) pairs.
    """

    cone: ConeId
    point: tuple
    cell: tuple                      # wall support key, or the codim-1 cell
    wall_index: int
    pairing: int
    delta_class: tuple[int, ...]
    delta_exponent: tuple[int, ...]
    coeff: Fraction
    mu: tuple | None = None
    on_slab: bool = False
    kink_class: tuple[int, ...] | None = None


@dataclass(frozen=True)
class BrokenLine:
    """A broken line with endpoint ``x`` and asymptotic exponent ``p``.

    ``segments`` lists (chart, class, exponent, coefficient) from the
    asymptotic segment to the final one; the first coefficient is 1.
    """

    x: PointInChart
    p: tuple[int, ...]
    p_cone: ConeId
    bends: tuple[Bend, ...]
    segments: tuple[tuple, ...]
    trace: tuple

    @property
    def a_beta(self) -> Fraction:
        return self.segments[-1][3]

    @property
    def m_beta(self) -> tuple[int, ...]:
        return self.segments[-1][2]

    @property
    def class_beta(self) -> tuple[int, ...]:
        return self.segments[-1][1]

    @property
    def final_cone(self) -> ConeId:
        return self.segments[-1][0]

    def monomial(self, trunc: Truncation) -> RingElement:
        cone, A, m, a = self.segments[-1]
        return RingElement.monomial(A, m, a, cone, trunc)


@dataclass(frozen=True)
class DecoratedBrokenLine:
    line: BrokenLine

    @property
    def mus(self):
        return tuple(b.mu for b in self.line.bends)


# -- transport ---------------------------------------------------------------

def transport_results(mono: RingElement, wall: Wall,
                      incoming_side: Sequence) -> list[RingElement]:
    """All results of transporting a monomial across a wall.

    The conormal is oriented positive on the incoming side; the results are
    the terms of f^(pairing) times the monomial, in sorted order (the first
    is the straight continuation).
    """
    [(key, coeff)] = list(mono.sorted_terms())
    _A, m = key
    n = wall.span_normal()
    side = _dot(n, incoming_side)
    if side < 0:
        n = tuple(-x for x in n)
    elif side == 0:
        raise WrongSideCrossing("incoming side lies on the wall")
    pairing = _dot(n, m)
    if pairing <= 0:
        raise WrongSideCrossing(
            f"pairing {pairing} is not positive on the incoming side")
    F = wall.function.pow_nonneg(pairing)
    out = []
    for (A_e, e), c in F.sorted_terms():
        term = RingElement.monomial(A_e, e, c, mono.cone, mono.trunc)
        prod = term.mul(mono)
        if not prod.is_zero():
            out.append(prod)
    return out


def transport_result(mono: RingElement, wall: Wall, incoming_side: Sequence,
                     index: int) -> RingElement:
    """The index-th result of transport across a wall (0 = straight)."""
    return transport_results(mono, wall, incoming_side)[index]


# -- bend choices ------------------------------------------------------------

def _undecorated_choices(f: RingElement, pairing: int, A_avail):
    F = f.pow_nonneg(pairing)
    out = []
    for (A_e, e), c in F.sorted_terms():
        if not any(A_e) and not any(e):
            continue
        if any(A_e[i] > A_avail[i] for i in range(len(A_avail))):
            continue
        out.append((A_e, e, c, ("t", A_e, e), None))
    return out


def _decorated_choices(f: RingElement, pairing: int, A_avail):
    logs = _log_terms(f)
    out = []

    def rec(j, dA, dm, coeff, mu):
        if j == len(logs):
            if any(m for _i, m in mu):
                out.append((tuple(dA), tuple(dm), coeff,
                            ("mu", tuple(mu)), tuple(mu)))
            return
        A_j, e_j, c_j = logs[j]
        mult = 0
        while True:
            nA = [a + mult * b for a, b in zip(dA, A_j)]
            if any(nA[i] > A_avail[i] for i in range(len(A_avail))):
                break
            nm = [a + mult * b for a, b in zip(dm, e_j)]
            ncoeff = coeff * (pairing * c_j) ** mult \
                / math.factorial(mult)
            rec(j + 1, nA, nm, ncoeff,
                mu + [(j, mult)] if mult else mu)
            mult += 1

    zero = [0] * len(A_avail)
    rec(0, zero, [0] * f.n, Fraction(1), [])
    return out


def _bend_choices(f, pairing, A_avail, decorated):
    if decorated:
        return _decorated_choices(f, pairing, A_avail)
    return _undecorated_choices(f, pairing, A_avail)


# -- candidate monomials and genericity --------------------------------------

def _adjacent_charts(cx, chart):
    out = []
    for rho in cx.interior_codim1():
        if set(rho) <= set(chart):
            other = [s for s in cx.max_cones_containing(rho) if s != chart]
            if other:
                out.append((rho, other[0]))
    return out


def _wall_logs_in_chart(s: WallStructure, chart):
    """(wall index, log terms transported to the chart) for visible walls."""
    cx = s.complex
    out = []
    for i, w in enumerate(s.walls):
        if w.cone == chart:
            out.append((i, _log_terms(w.function)))
        elif w.rho is not None and set(w.rho) <= set(chart):
            f = cx.transport_element(w.function, w.cone, chart,
                                     group_level=True)
            out.append((i, _log_terms(f)))
    return out


def _candidate_monomials(s: WallStructure, p_cone, p):
    """Superset of reachable segment monomials, per chart, under truncation."""
    cx, trunc = s.complex, s.trunc
    zero = (0,) * cx.curve_rank
    logs_by_chart = {}
    seen = {(tuple(p_cone), zero, tuple(p))}
    frontier = list(seen)
    while frontier:
        chart, A, m = frontier.pop()
        if chart not in logs_by_chart:
            logs_by_chart[chart] = _wall_logs_in_chart(s, chart)
        for _i, logs in logs_by_chart[chart]:
            for A_j, e_j, _c in logs:
                A2 = tuple(a + b for a, b in zip(A, A_j))
                if trunc.in_ideal(A2):
                    continue
                state = (chart, A2, tuple(a + b for a, b in zip(m, e_j)))
                if state not in seen:
                    seen.add(state)
                    frontier.append(state)
        for rho, chart2 in _adjacent_charts(cx, chart):
            matrix, kink = cx.chart_transition(chart, chart2)
            pos = chart.index(next(d for d in chart if d not in rho))
            m2 = tuple(sum(matrix[i][j] * m[j] for j in range(cx.n))
                       for i in range(cx.n))
            A2 = tuple(a + m[pos] * k for a, k in zip(A, kink))
            if any(a < 0 for a in A2) or trunc.in_ideal(A2):
                continue
            state = (chart2, A2, m2)
            if state not in seen:
                seen.add(state)
                frontier.append(state)
    return seen


def genericity_hyperplanes(s: WallStructure, chart, candidates):
    """Homogeneous hyperplanes a generic endpoint must avoid."""
    hps = set()
    for w in s.walls:
        if w.cone == chart:
            hps.add(primitive(w.span_normal()))
    for ch, _A, m in candidates:
        if ch == chart and any(m):
            hps.add(primitive((-m[1], m[0])))
    return sorted(hps)


def _ensure_generic(s: WallStructure, x: PointInChart, candidates,
                    seed: int = 0):
    hps = genericity_hyperplanes(s, x.cone, candidates)
    if any(c <= 0 for c in x.coords):
        raise NonGenericEndpoint(
            "endpoint must lie in the open chamber interior")
    for h in hps:
        if _dot(h, x.coords) == 0:
            sampler = GenericPointSampler(seed)
            suggestion = sampler.sample(x.cone, len(x.coords), hps,
                                        base=x.coords)
            raise NonGenericEndpoint(
                f"endpoint lies on the hyperplane {h}",
                hyperplane=h, suggestion=suggestion)
    return hps


# -- enumeration -------------------------------------------------------------

def _ray_events(s: WallStructure, chart, point, m):
    """Wall crossings along point + t*m (t > 0) before leaving the cone.

    Returns (events, exit) where events are (t, wall index, wall, crossing
    point) sorted by t, and exit is None or (t, coordinate position).
    """
    n = len(point)
    exit_t, exit_pos = None, None
    for j in range(n):
        if m[j] < 0:
            t = Fraction(point[j], -m[j])
            if exit_t is None or t < exit_t:
                exit_t, exit_pos = t, j
    events = []
    for i, w in enumerate(s.walls):
        if w.cone != chart or w.rho is not None:
            continue
        d = primitive(w.span_normal())
        pairing = _dot(d, m)
        if pairing == 0:
            continue
        # crossing time: <d, point + t m> = 0
        t = Fraction(-_dot(d, point), pairing)
        if t <= 0 or (exit_t is not None and t >= exit_t):
            continue
        q = tuple(c + t * x for c, x in zip(point, m))
        if w.contains_point(q) is None:
            continue
        events.append((t, i, w, q))
    events.sort(key=lambda ev: (ev[0], ev[1]))
    return events, (None if exit_t is None else (exit_t, exit_pos))


def _slab_function(s: WallStructure, chart, rho, q):
    """Product of slab-wall functions on rho containing q, in chart coords.

    Returns (function or None, wall index of the first contributing slab).
    """
    cx = s.complex
    f = None
    first = None
    for i, w in enumerate(s.walls):
        if w.rho != rho:
            continue
        if w.cone == chart:
            q_local = q
        else:
            matrix, _k = cx.chart_transition(chart, w.cone)
            q_local = tuple(sum(matrix[a][b] * q[b] for b in range(cx.n))
                            for a in range(cx.n))
        if w.contains_point(q_local) is None:
            continue
        fw = w.function if w.cone == chart else cx.transport_element(
            w.function, w.cone, chart, group_level=True)
        f = fw if f is None else f.mul(fw)
        if first is None:
            first = i
    return f, first


def _same_asymptotic(cx, chart, m, p_cone, p):
    if tuple(chart) == tuple(p_cone):
        return tuple(m) == tuple(p)
    try:
        matrix, _kink = cx.chart_transition(chart, p_cone)
    except Exception:
        return False
    rho = tuple(sorted(set(chart) & set(p_cone)))
    pos = chart.index(next(d for d in chart if d not in rho))
    if m[pos] != 0:
        return False
    image = tuple(sum(matrix[i][j] * m[j] for j in range(cx.n))
                  for i in range(cx.n))
    return image == tuple(p)


def _trace(s, chart, point, A, m, bends_rev, trace_rev, states_rev, out,
           p_cone, p, decorated, depth):
    cx = s.complex
    if depth > _TRACE_LIMIT:
        raise WallError("broken-line tracing did not terminate")
    if not any(m):
        return
    events, exit_info = _ray_events(s, chart, point, m)
    # bend at event k, passing straight through the earlier ones
    for k, (t_k, i_k, w_k, q_k) in enumerate(events):
        pairing = abs(_dot(w_k.span_normal(), m))
        straight = [("wall", chart, _cone_key(s.walls[i].support), "straight")
                    for _t, i, _w, _q in events[:k]]
        for dA, dm, c, cid, mu in _bend_choices(w_k.function, pairing, A,
                                                decorated):
            A2 = tuple(a - b for a, b in zip(A, dA))
            if any(a < 0 for a in A2):
                continue
            m2 = tuple(a - b for a, b in zip(m, dm))
            if not any(m2):
                continue
            bend = Bend(cone=chart, point=q_k,
                        cell=_cone_key(w_k.support), wall_index=i_k,
                        pairing=pairing, delta_class=tuple(dA),
                        delta_exponent=tuple(dm), coeff=c, mu=mu)
            _trace(s, chart, q_k, A2, m2,
                   bends_rev + [bend],
                   trace_rev + straight +
                   [("wall", chart, _cone_key(w_k.support), cid)],
                   states_rev + [(chart, A2, m2)],
                   out, p_cone, p, decorated, depth + 1)
    # straight through every wall crossing
    straight = [("wall", chart, _cone_key(s.walls[i].support), "straight")
                for _t, i, _w, _q in events]
    if exit_info is None:
        # the predecessor ray escapes to infinity inside this chart
        if all(a == 0 for a in A) and _same_asymptotic(cx, chart, m,
                                                       p_cone, p):
            out.append((list(reversed(bends_rev)),
                        list(reversed(trace_rev + straight)),
                        list(reversed(states_rev))))
        return
    exit_t, exit_pos = exit_info
    rho = tuple(sorted(d for j, d in enumerate(chart) if j != exit_pos))
    if not cx.is_interior_codim1(rho):
        return  # the ray leaves through the boundary of B
    q = tuple(c + exit_t * x for c, x in zip(point, m))
    chart2 = next(sig for sig in cx.max_cones_containing(rho)
                  if sig != chart)
    matrix, kink = cx.chart_transition(chart, chart2)
    f_slab, slab_index = _slab_function(s, chart, rho, q)
    pairing = -m[exit_pos]
    choices = [((0,) * cx.curve_rank, (0,) * cx.n, Fraction(1),
                "straight", None)]
    if f_slab is not None:
        choices += _bend_choices(f_slab, pairing, A, decorated)
    for dA, dm, c, cid, mu in choices:
        A2 = tuple(a - b for a, b in zip(A, dA))
        if any(a < 0 for a in A2):
            continue
        m2 = tuple(a - b for a, b in zip(m, dm))
        # backward transport into the neighbouring chart
        A3 = tuple(a + m2[exit_pos] * kk for a, kk in zip(A2, kink))
        if any(a < 0 for a in A3):
            continue
        m3 = tuple(sum(matrix[i][j] * m2[j] for j in range(cx.n))
                   for i in range(cx.n))
        q3 = tuple(sum(Fraction(matrix[i][j]) * q[j] for j in range(cx.n))
                   for i in range(cx.n))
        new_bends = bends_rev
        new_states = states_rev
        if cid != "straight":
            new_bends = bends_rev + [Bend(
                cone=chart, point=q, cell=rho, wall_index=slab_index,
                pairing=pairing, delta_class=tuple(dA),
                delta_exponent=tuple(dm), coeff=c, mu=mu, on_slab=True,
                kink_class=kink)]
            new_states = states_rev + [(chart2, A3, m3)]
        _trace(s, chart2, q3, A3, m3, new_bends,
               trace_rev + straight + [("rho", rho, cid)],
               new_states, out, p_cone, p, decorated, depth + 1)


def _assemble_line(s, x, p_cone, p, cand, bends, trace, states):
    """Attach forward coefficients to the recorded backward segment states.

    ``states`` lists (chart, class, exponent) for every segment from the
    final one at the endpoint back to the asymptotic one; reversed here.
    The asymptotic coefficient is 1 and each bend multiplies it.
    """
    segments = []
    coeff = Fraction(1)
    all_states = states + [cand]  # asymptotic-first after the reversal above
    for i, (chart, A, m) in enumerate(all_states):
        if i > 0:
            coeff = coeff * bends[i - 1].coeff
        segments.append((tuple(chart), tuple(A), tuple(m), coeff))
    return BrokenLine(x=x, p=tuple(p), p_cone=tuple(p_cone),
                      bends=tuple(bends), segments=tuple(segments),
                      trace=tuple(trace))


def enumerate_lines(s: WallStructure, p, x: PointInChart,
                    decorated: bool = False, seed: int = 0):
    """All broken lines with asymptotic exponent p and endpoint x."""
    cx, trunc = s.complex, s.trunc
    if cx.n != 2:
        raise UnsupportedDimension(
            "broken-line enumeration is implemented for surfaces")
    if isinstance(p, PointInChart):
        p_cone, p_vec = tuple(p.cone), tuple(int(c) for c in p.coords)
    else:
        p_cone, p_vec = tuple(x.cone), tuple(int(c) for c in p)
    if not any(p_vec):
        raise BrokenLineError("the asymptotic exponent must be nonzero")
    if any(c < 0 for c in p_vec):
        raise BrokenLineError(
            "the asymptotic exponent must lie in its chart cone")
    candidates = _candidate_monomials(s, p_cone, p_vec)
    _ensure_generic(s, x, candidates, seed=seed)
    raw = []
    for chart, A, m in sorted(candidates):
        if chart != tuple(x.cone) or not any(m):
            continue
        found = []
        _trace(s, chart, tuple(Fraction(c) for c in x.coords), A, m,
               [], [], [], found, p_cone, p_vec, decorated, 0)
        for bends, trace, states in found:
            raw.append(_assemble_line(s, x, p_cone, p_vec,
                                      (chart, A, m), bends, trace, states))
    raw.sort(key=lambda line: (len(line.bends), repr(line.trace)))
    if decorated:
        return [DecoratedBrokenLine(line=line) for line in raw]
    return raw


def theta(s: WallStructure, p, x: PointInChart,
          seed: int = 0) -> RingElement:
    """Sum of final monomials of all broken lines for (p, x)."""
    cx, trunc = s.complex, s.trunc
    if isinstance(p, PointInChart):
        p_zero = not any(p.coords)
    else:
        p_zero = not any(p)
    if p_zero:
        return RingElement.one(tuple(x.cone), trunc, cx.n)
    total = RingElement.zero(tuple(x.cone), trunc, cx.n)
    for line in enumerate_lines(s, p, x, seed=seed):
        total = total.add(line.monomial(trunc))
    return total


# -- structure constants -----------------------------------------------------

@dataclass(frozen=True)
class AlphaResult:
    value: RingElement          # exponent part zero: a curve-class element
    chamber: Chamber
    x: PointInChart


def _chamber_contains(ch: Chamber, cone, r) -> bool:
    if tuple(cone) != tuple(ch.cone):
        return False
    cols = [[Fraction(ch.lower[i]), Fraction(ch.upper[i])] for i in range(2)]
    sol = _solve(cols, [Fraction(c) for c in r])
    return sol is not None and all(c >= 0 for c in sol)


def chambers_containing(s: WallStructure, r_cone, r):
    rs = planar_chambers(s)
    return [ch for ch in rs.chambers if _chamber_contains(ch, r_cone, r)]


def _sample_in_chamber(s, ch: Chamber, cands, seed):
    rng = random.Random(seed)
    for _ in range(128):
        l1 = Fraction(rng.randint(1, 996), 997)
        l2 = Fraction(rng.randint(1, 1008), 1009)
        coords = tuple(l1 * a + l2 * b
                       for a, b in zip(ch.lower, ch.upper))
        x = PointInChart(cone=tuple(ch.cone), coords=coords, ambient=True)
        try:
            _ensure_generic(s, x, cands, seed=seed)
            return x
        except NonGenericEndpoint:
            continue
    raise NonGenericEndpoint("no generic point found in the chamber")


def alpha_trop(s: WallStructure, p1, p2, r, seed: int = 0,
               chamber: Chamber | None = None) -> AlphaResult:
    """Structure constant: paired broken-line count with exponent sum r."""
    cx, trunc = s.complex, s.trunc
    if cx.n != 2:
        raise UnsupportedDimension("structure constants need a surface")
    r_cone, r_vec = (tuple(r.cone), tuple(int(c) for c in r.coords)) \
        if isinstance(r, PointInChart) else (None, tuple(int(c) for c in r))
    p1c = p1 if isinstance(p1, PointInChart) else None
    chs = chambers_containing(
        s, r_cone or (p1c.cone if p1c else s.complex.maximal_cones[0]),
        r_vec)
    if chamber is not None:
        chs = [chamber]
    if not chs:
        raise BrokenLineError(f"no chamber contains {r_vec}")
    ch = chs[0]
    cands1 = _candidate_monomials(
        s, *(p1.cone, tuple(int(c) for c in p1.coords))
        if isinstance(p1, PointInChart) else (ch.cone, tuple(p1)))
    cands2 = _candidate_monomials(
        s, *(p2.cone, tuple(int(c) for c in p2.coords))
        if isinstance(p2, PointInChart) else (ch.cone, tuple(p2)))
    x = _sample_in_chamber(s, ch, cands1 | cands2, seed)
    lines1 = enumerate_lines(s, p1, x, seed=seed)
    lines2 = enumerate_lines(s, p2, x, seed=seed)
    total = RingElement.zero(tuple(ch.cone), trunc, cx.n)
    zero_m = (0,) * cx.n
    for l1 in lines1:
        for l2 in lines2:
            if tuple(a + b for a, b in zip(l1.m_beta, l2.m_beta)) != r_vec:
                continue
            A = tuple(a + b for a, b in zip(l1.class_beta, l2.class_beta))
            total = total.add(RingElement.monomial(
                A, zero_m, l1.a_beta * l2.a_beta, tuple(ch.cone), trunc))
    return AlphaResult(value=total, chamber=ch, x=x)


# -- correspondence with tropical types --------------------------------------

def decorated_to_type(d: DecoratedBrokenLine,
                      s: WallStructure) -> TropicalType:
    """Tropical type of a decorated broken line.

    Spine vertices are the bends; bends on codim-one cells are decorated by
    the pairing times the kink class, interior bends by zero.  Each wall
    contribution of multiplicity mu contributes mu leaf vertices carrying
    the log-term curve class, attached by edges with the log-term exponent.
    """
    cx = s.complex
    line = d.line
    zero_A = (0,) * cx.curve_rank
    if not line.bends:
        chart = line.final_cone
        v = Vertex(cone=tuple(sorted(chart)), A=zero_A)
        return TropicalType(
            vertices=(v,),
            edges=(),
            legs=(Leg(v=0, u=tuple(line.p), role="inc"),
                  Leg(v=0, u=tuple(-x for x in line.m_beta), role="out")))
    vertices = []
    edges = []
    legs = []
    # spine vertices, ordered from the asymptotic end to the endpoint
    for b in line.bends:
        if b.on_slab:
            A_dec = tuple(b.pairing * k for k in (b.kink_class or zero_A))
            vertices.append(Vertex(cone=tuple(b.cell), A=A_dec))
        else:
            vertices.append(Vertex(cone=tuple(sorted(b.cone)), A=zero_A,
                                   rays=tuple(b.cell)))
    for i in range(len(line.bends) - 1):
        m_seg = line.segments[i + 1][2]
        edges.append(Edge(v=(i, i + 1), u=tuple(-x for x in m_seg)))
    legs.append(Leg(v=0, u=tuple(line.p), role="inc"))
    legs.append(Leg(v=len(line.bends) - 1,
                    u=tuple(-x for x in line.m_beta), role="out"))
    # wall-contribution leaves
    for bi, b in enumerate(line.bends):
        if b.mu is None:
            continue
        wall = s.walls[b.wall_index]
        f = wall.function if wall.cone == b.cone else cx.transport_element(
            wall.function, wall.cone, b.cone, group_level=True)
        logs = _log_terms(f)
        for j, mult in b.mu:
            A_j, e_j, _c = logs[j]
            for _copy in range(mult):
                # the contributing wall piece emanates from the origin (the
                # deepest stratum) opposite to its monomial exponent
                w_idx = len(vertices)
                vertices.append(Vertex(cone=(), A=tuple(A_j), rays=()))
                edges.append(Edge(v=(w_idx, bi),
                                  u=tuple(-x for x in e_j)))
    return TropicalType(vertices=tuple(vertices), edges=tuple(edges),
                        legs=tuple(legs))


def type_to_line(t: TropicalType, s: WallStructure,
                 x: PointInChart) -> DecoratedBrokenLine:
    """Reconstruct the decorated broken line of a type ending at x."""
    cx, trunc = s.complex, s.trunc
    out = t.leg_with_role("out")
    inc = t.leg_with_role("inc")
    if out is None or inc is None:
        raise InadmissibleType("a broken-line type needs inc and out legs")
    m_final = tuple(-u for u in out[1].u)
    p_vec = tuple(inc[1].u)
    # trivial type: replay the unbent enumeration
    spine_path = _spine_path(t, inc[1].v, out[1].v)
    if len(t.vertices) == 1 and not t.edges:
        if m_final != p_vec:
            raise InadmissibleType("unbent line must keep its exponent")
        lines = enumerate_lines(s, p_vec, x, decorated=True)
        for d in lines:
            if not d.line.bends:
                return d
        raise EndpointOutsideFamily(
            "no unbent line with this exponent reaches the endpoint")
    # reconstruct bend data along the spine
    expected = _expected_bends(t, spine_path)
    for d in enumerate_lines(s, p_vec, x, decorated=True):
        if _matches(d, s, expected, m_final):
            return d
    raise EndpointOutsideFamily(
        "no broken line of this type reaches the endpoint")


def _spine_path(t: TropicalType, start, goal):
    adj = {}
    for ei, e in enumerate(t.edges):
        adj.setdefault(e.v[0], []).append(e.v[1])
        adj.setdefault(e.v[1], []).append(e.v[0])
    path = [start]
    prev = None
    while path[-1] != goal:
        nxt = [w for w in adj.get(path[-1], []) if w != prev
               and _on_spine(t, w)]
        if not nxt:
            raise InadmissibleType("legs are not connected through the tree")
        prev = path[-1]
        path.append(nxt[0])
    return path


def _on_spine(t: TropicalType, v: int) -> bool:
    from .tropical import _spine

    verts, _edges = _spine(t)
    return v in verts


def _expected_bends(t, spine_path):
    """Per spine vertex: the multiset of (leaf class, kick exponent)."""
    expected = []
    spine_set = set(spine_path)
    for vi in spine_path:
        contributions = []
        for e in t.edges:
            leaf, u = None, None
            if e.v[1] == vi and e.v[0] not in spine_set:
                leaf, u = e.v[0], tuple(-x for x in e.u)
            elif e.v[0] == vi and e.v[1] not in spine_set:
                leaf, u = e.v[1], e.u
            if leaf is not None:
                contributions.append((tuple(t.vertices[leaf].A or ()),
                                      tuple(u)))
        expected.append(sorted(contributions))
    return expected


def _bend_contributions(b: Bend, s: WallStructure):
    """The bend's mu expanded into (log-term class, exponent) pairs."""
    cx = s.complex
    wall = s.walls[b.wall_index]
    f = wall.function if wall.cone == b.cone else cx.transport_element(
        wall.function, wall.cone, b.cone, group_level=True)
    logs = _log_terms(f)
    out = []
    for j, mult in (b.mu or ()):
        A_j, e_j, _c = logs[j]
        out.extend([(tuple(A_j), tuple(e_j))] * mult)
    return sorted(out)


def _matches(d: DecoratedBrokenLine, s: WallStructure, expected,
             m_final) -> bool:
    line = d.line
    if tuple(line.m_beta) != tuple(m_final):
        return False
    if len(line.bends) != len(expected):
        return False
    for b, contribs in zip(line.bends, expected):
        if _bend_contributions(b, s) != contribs:
            return False
    return True
