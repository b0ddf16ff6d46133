#!/usr/bin/env python3
"""Generate the blowup-threefold fixture (geometry, grading, counts).

Geometry: start from the triple product of projective lines with its six
toric boundary divisors D_{i,0}, D_{i,infty}.  Blow up two curves:

  Z1 = P1 x {0} x {1}           (inside D_{2,0}),
  Z2 = {inf} x {inf} x P1       (= D_{1,inf} meet D_{2,inf}),

and take as boundary the six strict transforms plus the exceptional divisor
E2 over Z2 (the exceptional over Z1 is NOT part of the boundary).  The pair
is log Calabi-Yau and all seven divisors are good.  Its dual complex is
piecewise-linearly the fan of the toric blowup along Z2 alone: rays
D_{i,0} -> e_i, D_{i,inf} -> -e_i, E2 -> -e1-e2, with ten maximal cones.

Curve classes live in H2 of the blowup.  Basis of effective generators
(so the monoid is free on them):

  g1 = e1            (fiber of the exceptional over Z1)
  g2 = e2            (fiber of the exceptional over Z2)
  g3 = f2 - e1 - e2  (strict transform of a line {a} x P1 x {b} through
                      both centers' loci ... the class with t-degree 1)
  g4 = f1 - e2       (strict transform of P1 x {a} x {b} through Z2)
  g5 = f3 - e1       (strict transform of {a} x {b} x P1 through Z1)

where f_i is the i-th ruling class of the triple product.  Primitive
intersection pairings (divisor . class), derived from the projection formula
(pullback classes pair to zero with exceptionals, fibers pair -1 with their
own exceptional and +1 with each divisor through the center):

  e1 . D_{2,0} = 1                                  (others 0)
  e2 . D_{1,inf} = e2 . D_{2,inf} = 1, e2 . E2 = -1 (others 0)
  f1 . D_{1,0} = f1 . D_{1,inf} = 1                 (others 0)
  f2 . D_{2,0} = f2 . D_{2,inf} = 1                 (others 0)
  f3 . D_{3,0} = f3 . D_{3,inf} = 1                 (others 0)

Each interior 2-cone of the complex is spanned by two divisor rays and its
curve stratum is the strict transform of the corresponding toric curve; a
toric curve picks up a -e1 correction iff it meets Z1 (i.e. it is a
third-ruling curve with second coordinate 0) and a -e2 correction iff it
meets Z2 (first and second coordinates at infinity).

The canonical scattering data of this pair consists of five families of
walls indexed by a multiple k >= 1, with weights (-1)^(k-1)/k^2 and
lattice index k, curve classes k*e1 (two supports through D_{2,0}),
k*(f2-e1-e2) (support spanned by E2 and D_{1,inf}) and k*(f2-e1) (two
supports through D_{2,inf}); the counts file lists them for k = 1..4.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "tests", "fixtures")

# divisor indices
D10, D20, D30, D1I, D2I, D3I, E2 = range(7)
NAMES = ["D_{1,0}", "D_{2,0}", "D_{3,0}",
         "D_{1,inf}", "D_{2,inf}", "D_{3,inf}", "E2"]

# pairing of each divisor with the primitive classes (e1, e2, f1, f2, f3)
PRIM = {
    D10: (0, 0, 1, 0, 0),
    D20: (1, 0, 0, 1, 0),
    D30: (0, 0, 0, 0, 1),
    D1I: (0, 1, 1, 0, 0),
    D2I: (0, 1, 0, 1, 0),
    D3I: (0, 0, 0, 0, 1),
    E2:  (0, -1, 0, 0, 0),
}

# effective generator basis g1..g5 expressed over (e1, e2, f1, f2, f3)
GENS = {
    "g1": (1, 0, 0, 0, 0),
    "g2": (0, 1, 0, 0, 0),
    "g3": (-1, -1, 0, 1, 0),
    "g4": (0, -1, 1, 0, 0),
    "g5": (-1, 0, 0, 0, 1),
}
GEN_ORDER = ["g1", "g2", "g3", "g4", "g5"]


def to_monoid_coords(c):
    """Convert an (e1,e2,f1,f2,f3) class into g-coordinates.

    a3 = c_f2, a4 = c_f1, a5 = c_f3, a1 = c_e1 + a3 + a5, a2 = c_e2 + a3 + a4.
    """
    e1, e2, f1, f2, f3 = c
    a3, a4, a5 = f2, f1, f3
    a1 = e1 + a3 + a5
    a2 = e2 + a3 + a4
    coords = (a1, a2, a3, a4, a5)
    # round-trip check: the g-combination must reproduce the class
    back = [0] * 5
    for a, gname in zip(coords, GEN_ORDER):
        for i in range(5):
            back[i] += a * GENS[gname][i]
    assert tuple(back) == tuple(c), (c, coords, back)
    assert all(a >= 0 for a in coords), (c, coords)
    return coords


def pair(div, c):
    return sum(p * x for p, x in zip(PRIM[div], c))


# maximal cones of the dual complex (ten, from the toric fan of the Z2-blowup)
MAX_CONES = [
    (D10, D20, D30), (D10, D20, D3I),
    (D10, D2I, D30), (D10, D2I, D3I),
    (D1I, D20, D30), (D1I, D20, D3I),
    (D1I, E2, D30), (D1I, E2, D3I),
    (D2I, E2, D30), (D2I, E2, D3I),
]

# curve stratum class of every interior 2-cone, over (e1,e2,f1,f2,f3):
# third-ruling curves (f3) through second coordinate 0 meet Z1 (-e1);
# first/second-ruling curves through (inf, inf, .) meet Z2 (-e2).
RHO_CLASS = {
    (D10, D20): (-1, 0, 0, 0, 1),   # {0} x {0} x P1, meets Z1
    (D20, D1I): (-1, 0, 0, 0, 1),   # {inf} x {0} x P1, meets Z1
    (D10, D2I): (0, 0, 0, 0, 1),    # {0} x {inf} x P1
    (D1I, E2): (0, 0, 0, 0, 1),     # section of E2 over Z2
    (D2I, E2): (0, 0, 0, 0, 1),     # section of E2 over Z2
    (D10, D30): (0, 0, 0, 1, 0),    # {0} x P1 x {0}
    (D10, D3I): (0, 0, 0, 1, 0),    # {0} x P1 x {inf}
    (D30, D1I): (0, -1, 0, 1, 0),   # {inf} x P1 x {0}, meets Z2
    (D1I, D3I): (0, -1, 0, 1, 0),   # {inf} x P1 x {inf}, meets Z2
    (D20, D30): (0, 0, 1, 0, 0),    # P1 x {0} x {0}
    (D20, D3I): (0, 0, 1, 0, 0),    # P1 x {0} x {inf}
    (D30, D2I): (0, -1, 1, 0, 0),   # P1 x {inf} x {0}, meets Z2
    (D2I, D3I): (0, -1, 1, 0, 0),   # P1 x {inf} x {inf}, meets Z2
    (E2, D30): (0, 1, 0, 0, 0),     # fiber of E2 at third coordinate 0
    (E2, D3I): (0, 1, 0, 0, 0),     # fiber of E2 at third coordinate inf
}


def main():
    os.makedirs(OUT, exist_ok=True)

    # every unordered pair appearing in two maximal cones is an interior rho
    from itertools import combinations

    pair_count = {}
    for mc in MAX_CONES:
        for duo in combinations(sorted(mc), 2):
            pair_count[duo] = pair_count.get(duo, 0) + 1
    interior = sorted(d for d, cnt in pair_count.items() if cnt == 2)
    assert len(interior) == 15

    norm_class = {tuple(sorted(k)): v for k, v in RHO_CLASS.items()}
    assert set(interior) == set(norm_class)

    intersections = []
    kinks = []
    for rho in interior:
        c = norm_class[rho]
        intersections.append({
            "rho": list(rho),
            "numbers": [pair(rho[0], c), pair(rho[1], c)],
        })
        kinks.append({"rho": list(rho), "class": list(to_monoid_coords(c))})

    geometry = {
        "schema": "wallcross/1",
        "n": 3,
        "curve_rank": 5,
        "divisors": [{"name": nm, "a": "0"} for nm in NAMES],
        "good_strata": [list(mc) for mc in MAX_CONES],
        "intersections": intersections,
        "kinks": kinks,
        "relative": False,
    }

    # grading table: divisor . g_k for the torus-weight homogeneity check
    grading = {
        "schema": "wallcross/1",
        "pairings": [[pair(d, GENS[g]) for g in GEN_ORDER] for d in range(7)],
    }

    # the five wall families, k = 1..4
    def chart_for(rho):
        for mc in MAX_CONES:
            if set(rho) <= set(mc):
                return tuple(sorted(mc))
        raise AssertionError(rho)

    def basis_vec(chart, div, mult=1):
        v = [0, 0, 0]
        v[chart.index(div)] = mult
        return v

    K = 4
    counts = []
    families = [
        # (rho spanning the support, direction as {div: coeff}, class over
        #  the primitive basis)
        ((D10, D20), {D20: 1}, (1, 0, 0, 0, 0)),
        ((D20, D1I), {D20: 1}, (1, 0, 0, 0, 0)),
        ((D1I, E2), {E2: 1, D1I: -1}, (-1, -1, 0, 1, 0)),
        ((D2I, E2), {D2I: 1}, (-1, 0, 0, 1, 0)),
        ((D10, D2I), {D2I: 1}, (-1, 0, 0, 1, 0)),
    ]
    for rho, direction, cls in families:
        rho = tuple(sorted(rho))
        chart = chart_for(rho)
        support = [basis_vec(chart, d) for d in rho]
        for k in range(1, K + 1):
            u = [0, 0, 0]
            for d, coeff in direction.items():
                u[chart.index(d)] += k * coeff
            w = Fraction((-1) ** (k - 1), k * k)
            counts.append({
                "max_cone": list(chart),
                "support": support,
                "u": u,
                "A": [k * a for a in to_monoid_coords(cls)],
                "W": f"{w.numerator}/{w.denominator}",
                "k": k,
                "aut": 1,
            })

    truncation = {
        "schema": "wallcross/1",
        "curve_rank": 5,
        "mode": "degree",
        "weights": [1, 1, 1, 1, 1],
        "bound": K,
    }

    for name, payload in [("blowup_threefold.json", geometry),
                          ("blowup_grading.json", grading),
                          ("blowup_counts.json", {"schema": "wallcross/1",
                                                  "counts": counts}),
                          ("blowup_truncation.json", truncation)]:
        path = os.path.join(OUT, name)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        print("wrote", os.path.normpath(path))


if __name__ == "__main__":
    main()
