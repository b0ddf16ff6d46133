"""Truncated monoid ring of monomials t^A z^m with exact rational coefficients.

A monomial couples a curve class A (vector over the curve-class monoid) with
a lattice exponent m in the chart of a maximal cone.  Everything is computed
modulo a monomial truncation ideal with finite complement, which makes the
augmentation ideal nilpotent and all exponential / inverse series finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    ConeMismatch,
    InadmissibleExponent,
    NonNilpotentArgument,
    NotUnipotent,
    TruncationError,
)

CurveClass = tuple[int, ...]
Exponent = tuple[int, ...]
TermKey = tuple[CurveClass, Exponent]


@dataclass(frozen=True)
class Truncation:
    """Monomial truncation ideal in the curve-class monoid.

    Either a degree cutoff (positive weight vector and bound: A is truncated
    when weights·A exceeds the bound) or an explicit list of monomial ideal
    generators.  Construction verifies that the complement of the ideal in
    the monoid is finite (equivalently, each coordinate axis eventually lands
    in the ideal).
    """

    curve_rank: int
    weights: tuple[int, ...] | None = None
    bound: int | None = None
    generators: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if (self.weights is None) == (self.generators is None):
            raise TruncationError(
                "exactly one of weights/generators must be given")
        if self.weights is not None:
            if len(self.weights) != self.curve_rank:
                raise TruncationError("weight vector length != curve_rank")
            if any(w <= 0 for w in self.weights):
                raise TruncationError("weights must be positive")
            if self.bound is None or self.bound < 0:
                raise TruncationError("degree cutoff needs a bound >= 0")
        else:
            gens = self.generators
            if any(len(g) != self.curve_rank for g in gens):
                raise TruncationError("generator length != curve_rank")
            if any(all(x == 0 for x in g) for g in gens):
                raise TruncationError("zero generator would truncate the unit")
            if any(min(g) < 0 for g in gens):
                raise TruncationError("generators must be nonnegative")
            for i in range(self.curve_rank):
                if not any(all(g[j] == 0 for j in range(self.curve_rank)
                               if j != i) and g[i] > 0 for g in gens):
                    raise TruncationError(
                        "infinite complement: axis %d never truncated" % i)

    @classmethod
    def degree(cls, curve_rank: int, bound: int,
               weights: Sequence[int] | None = None) -> "Truncation":
        w = tuple(weights) if weights is not None else (1,) * curve_rank
        return cls(curve_rank=curve_rank, weights=w, bound=bound)

    @classmethod
    def from_generators(cls, curve_rank: int,
                        generators: Iterable[Sequence[int]]) -> "Truncation":
        return cls(curve_rank=curve_rank,
                   generators=tuple(tuple(int(x) for x in g)
                                    for g in generators))

    def in_ideal(self, A: Sequence[int]) -> bool:
        if len(A) != self.curve_rank:
            raise TruncationError("curve class length != curve_rank")
        if self.weights is not None:
            return sum(w * a for w, a in zip(self.weights, A)) > self.bound
        return any(all(a >= g for a, g in zip(A, gen))
                   for gen in self.generators)

    def weight_of(self, A: Sequence[int]) -> int:
        """Ad-hoc grading used for order-by-order algorithms."""
        if self.weights is not None:
            return sum(w * a for w, a in zip(self.weights, A))
        return sum(A)

    def max_weight(self) -> int:
        """A weight beyond which every class lies in the ideal."""
        if self.weights is not None:
            return self.bound
        return sum(max(g[i] for g in self.generators)
                   for i in range(self.curve_rank))


class RingElement:
    """Finite rational combination of monomials t^A z^m in one chart.

    Immutable by convention: all operations return fresh elements.  Terms
    with curve class inside the truncation ideal are dropped on construction,
    zero coefficients are never stored.
    """

    __slots__ = ("terms", "cone", "trunc", "n")

    def __init__(self, terms: Mapping[TermKey, Fraction], cone,
                 trunc: Truncation, n: int):
        clean: dict[TermKey, Fraction] = {}
        for (A, m), c in terms.items():
            A = tuple(int(x) for x in A)
            m = tuple(int(x) for x in m)
            if len(m) != n:
                raise ValueError("exponent length != chart dimension")
            c = Fraction(c)
            if c == 0 or trunc.in_ideal(A):
                continue
            clean[(A, m)] = c
        self.terms = clean
        self.cone = cone
        self.trunc = trunc
        self.n = n

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, cone, trunc: Truncation, n: int) -> "RingElement":
        return cls({}, cone, trunc, n)

    @classmethod
    def one(cls, cone, trunc: Truncation, n: int) -> "RingElement":
        key = ((0,) * trunc.curve_rank, (0,) * n)
        return cls({key: Fraction(1)}, cone, trunc, n)

    @classmethod
    def monomial(cls, A: Sequence[int], m: Sequence[int], coeff, cone,
                 trunc: Truncation) -> "RingElement":
        return cls({(tuple(A), tuple(m)): Fraction(coeff)}, cone, trunc,
                   len(tuple(m)))

    # -- basic protocol -----------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, RingElement)
                and self.cone == other.cone
                and self.n == other.n
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.cone, self.n,
                     tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "RingElement(0)"
        bits = []
        for (A, m), c in self.sorted_terms():
            bits.append(f"{c}*t^{list(A)}*z^{list(m)}")
        return "RingElement(" + " + ".join(bits) + ")"

    def sorted_terms(self):
        return sorted(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        key = ((0,) * self.trunc.curve_rank, (0,) * self.n)
        return self.terms == {key: Fraction(1)}

    def constant_coefficient(self) -> Fraction:
        key = ((0,) * self.trunc.curve_rank, (0,) * self.n)
        return self.terms.get(key, Fraction(0))

    def coefficient(self, A: Sequence[int], m: Sequence[int]) -> Fraction:
        return self.terms.get((tuple(A), tuple(m)), Fraction(0))

    def _like(self, terms) -> "RingElement":
        return RingElement(terms, self.cone, self.trunc, self.n)

    # -- arithmetic ---------------------------------------------------------

    def add(self, other: "RingElement") -> "RingElement":
        self._check_compatible(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return self._like(terms)

    def sub(self, other: "RingElement") -> "RingElement":
        return self.add(other.scale(-1))

    def scale(self, c) -> "RingElement":
        c = Fraction(c)
        return self._like({k: v * c for k, v in self.terms.items()})

    def mul(self, other: "RingElement") -> "RingElement":
        self._check_compatible(other)
        terms: dict[TermKey, Fraction] = {}
        for (A1, m1), c1 in self.terms.items():
            for (A2, m2), c2 in other.terms.items():
                A = tuple(a + b for a, b in zip(A1, A2))
                if self.trunc.in_ideal(A):
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                key = (A, m)
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return self._like(terms)

    def pow_nonneg(self, k: int) -> "RingElement":
        result = RingElement.one(self.cone, self.trunc, self.n)
        base = self
        while k:
            if k & 1:
                result = result.mul(base)
            base = base.mul(base)
            k >>= 1
        return result

    def pow_int(self, k: int) -> "RingElement":
        """Integer power; negative powers require a unipotent element."""
        if k >= 0:
            return self.pow_nonneg(k)
        return invert(self).pow_nonneg(-k)

    def map_monomials(self, fn: Callable[[CurveClass, Exponent, Fraction],
                                         "RingElement"]) -> "RingElement":
        """Sum of fn over the terms (fn returns a RingElement per term)."""
        result = RingElement.zero(self.cone, self.trunc, self.n)
        for (A, m), c in self.sorted_terms():
            result = result.add(fn(A, m, c))
        return result

    def _check_compatible(self, other: "RingElement"):
        if self.cone != other.cone:
            raise ConeMismatch(
                f"cone ids differ: {self.cone!r} vs {other.cone!r}")
        if self.n != other.n or self.trunc != other.trunc:
            raise ConeMismatch("chart dimension or truncation mismatch")

    # -- serialization ------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [{"A": list(A), "m": list(m),
                 "c": f"{c.numerator}/{c.denominator}"}
                for (A, m), c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping], cone, trunc: Truncation,
                  n: int) -> "RingElement":
        terms: dict[TermKey, Fraction] = {}
        for item in data:
            key = (tuple(int(x) for x in item["A"]),
                   tuple(int(x) for x in item["m"]))
            terms[key] = terms.get(key, Fraction(0)) + Fraction(item["c"])
        return cls(terms, cone, trunc, n)


# -- module-level operations -------------------------------------------------

def multiply(f: RingElement, g: RingElement) -> RingElement:
    return f.mul(g)


def exp_truncated(g: RingElement) -> RingElement:
    """exp(g) = sum g^k / k!, finite because g is nilpotent mod truncation."""
    zero_class = (0,) * g.trunc.curve_rank
    if any(A == zero_class for (A, _m) in g.terms):
        raise NonNilpotentArgument("exp argument has a constant-class term")
    result = RingElement.one(g.cone, g.trunc, g.n)
    power = RingElement.one(g.cone, g.trunc, g.n)
    k = 0
    while True:
        k += 1
        power = power.mul(g)
        if power.is_zero():
            break
        result = result.add(power.scale(Fraction(1, factorial(k))))
    return result


def invert(f: RingElement) -> RingElement:
    """Inverse of f = 1 + g with g supported in the augmentation ideal."""
    if f.constant_coefficient() != 1:
        raise NotUnipotent("inversion requires constant term 1")
    one = RingElement.one(f.cone, f.trunc, f.n)
    g = f.sub(one)
    zero_class = (0,) * f.trunc.curve_rank
    if any(A == zero_class for (A, _m) in g.terms):
        raise NotUnipotent("constant-class non-unit part present")
    result = one
    power = one
    while True:
        power = power.mul(g).scale(-1)
        if power.is_zero():
            break
        result = result.add(power)
    return result


def transport(f: RingElement, matrix: Sequence[Sequence[int]],
              normal: Sequence[int], kink: Sequence[int], target_cone,
              group_level: bool = False) -> RingElement:
    """Parallel transport of f across a codimension-one cell.

    Each monomial t^A z^m maps to t^{A + <normal,m>·kink} z^{M m} where
    ``normal`` is the primitive conormal of the cell, positive on the source
    chart, and ``kink`` the bending class of the cell.  At monoid level the
    pairing must be nonnegative; ``group_level`` lifts that restriction.
    Ring homomorphism in either mode.
    """
    terms: dict[TermKey, Fraction] = {}
    rows = [list(r) for r in matrix]
    for (A, m), c in f.terms.items():
        pair = sum(a * b for a, b in zip(normal, m))
        if pair < 0 and not group_level:
            raise InadmissibleExponent(
                f"monomial z^{list(m)} pairs to {pair} < 0 with the conormal")
        newA = tuple(a + pair * k for a, k in zip(A, kink))
        newm = tuple(sum(row[j] * m[j] for j in range(len(m))) for row in rows)
        if f.trunc.in_ideal(newA):
            continue
        key = (newA, newm)
        terms[key] = terms.get(key, Fraction(0)) + c
    return RingElement(terms, target_cone, f.trunc, f.n)


# -- stalkwise admissibility -------------------------------------------------

@dataclass(frozen=True)
class InteriorOfMaxCone:
    """Location in the interior of a maximal cell: every monomial is fine."""


@dataclass(frozen=True)
class BoundaryCodim1:
    """Interior of a boundary codimension-one cell; single adjacent chart.

    ``normal``: primitive conormal positive towards the adjacent maximal cell.
    """

    normal: tuple[int, ...]


@dataclass(frozen=True)
class InteriorCodim1:
    """Interior of an interior codimension-one cell, seen from one chart.

    ``normal``: primitive conormal positive into the chart's maximal cell;
    ``kink``: bending class of the cell.
    """

    normal: tuple[int, ...]
    kink: tuple[int, ...]


def admissible_at(A: Sequence[int], m: Sequence[int], location) -> bool:
    """Membership of t^A z^m in the stalk of admissible monomials.

    At an interior codimension-one cell the stalk is generated over the cell's
    tangent directions by two transversals with product t^kink, so a monomial
    pointing out of the chart by delta < 0 steps is admissible precisely when
    A + delta·kink stays effective.
    """
    if isinstance(location, InteriorOfMaxCone):
        return all(a >= 0 for a in A)
    if isinstance(location, BoundaryCodim1):
        pair = sum(a * b for a, b in zip(location.normal, m))
        return pair >= 0 and all(a >= 0 for a in A)
    if isinstance(location, InteriorCodim1):
        if any(a < 0 for a in A):
            return False
        pair = sum(a * b for a, b in zip(location.normal, m))
        if pair >= 0:
            return True
        shifted = [a + pair * k for a, k in zip(A, location.kink)]
        return all(x >= 0 for x in shifted)
    raise TypeError(f"unknown location {location!r}")
