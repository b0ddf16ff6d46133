#!/usr/bin/env python3
"""Complete the classical two-line scattering instance and print it.

Two initial lines through the origin, x-axis with function 1 + t z^(1,0)
and y-axis with 1 + t z^(0,1), sharing a single deformation parameter t.
Completing the instance order by order produces the well-known central
ray in direction (-1,-1); at weight 4 its function is 1 + t^2 z^(1,1).

Usage:  python3 scripts/scatter_demo.py [max_weight]
"""

from __future__ import annotations

import json
import sys

from wallcross.consistency import (
    LOCAL_CHART,
    LocalInstance,
    LocalRay,
    complete_codim0,
    identity_around,
)
from wallcross.ring import RingElement, Truncation


def initial_instance(bound: int) -> LocalInstance:
    trunc = Truncation.degree(1, bound)
    rays = []
    for a in ((1, 0), (0, 1)):
        f = RingElement.one(LOCAL_CHART, trunc, 2).add(
            RingElement.monomial((1,), a, 1, LOCAL_CHART, trunc))
        rays += [LocalRay(a, f), LocalRay(tuple(-x for x in a), f)]
    return LocalInstance(trunc=trunc, rays=tuple(rays))


def main() -> int:
    max_weight = int(sys.argv[1]) if len(sys.argv) > 1 else 4
    inst = initial_instance(max_weight)
    done = complete_codim0(inst, max_weight=max_weight)
    ok, _ = identity_around(done, max_weight=max_weight)
    payload = done.to_json()
    payload["added_rays"] = len(done.rays) - len(inst.rays)
    payload["consistent"] = ok
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
