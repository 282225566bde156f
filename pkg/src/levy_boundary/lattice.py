"""Exact geometry of the nested right-isosceles triangulations.

Level 0 is the triangulation of the plane obtained by cutting every unit
lattice square along both diagonals.  Level ``k + 1`` halves every level-``k``
triangle through the midpoint of its hypotenuse.  Every triangle is stored
with its vertices in *roles*: ``top`` is the right-angle vertex, and
``left``, ``top``, ``right`` are met in that order when the boundary is walked
clockwise (negative signed area, y axis pointing up).

A triangle is fully determined by its directed hypotenuse ``left -> right``;
the top vertex is obtained by turning the half-hypotenuse counterclockwise
about its midpoint.  All four child constructions reduce to that one rule:

========================  ==================
subdivision child ``T1``  ``(top, left)``
subdivision child ``T2``  ``(right, top)``
exterior child ``T^L``    ``(left, top)``
exterior child ``T^R``    ``(top, right)``
========================  ==================

Coordinates are dyadic rationals held as :class:`fractions.Fraction`, so
every operation is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Tuple

from .errors import ContractError

__all__ = [
    "DyadicPoint",
    "LatticeTriangle",
    "Star",
    "T0",
    "base_triangles",
    "contains_point",
    "exterior_children",
    "max_denominator_exponent",
    "n0",
    "signed_area2",
    "star",
    "star_membership_index",
    "subdivide",
    "triangulation_window",
]

STAR_SIZE = 15


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True, order=True)
class DyadicPoint:
    """A point whose coordinates are dyadic rationals ``m / 2**e``.

    ``Fraction`` keeps the value in lowest terms, so equal points always
    have equal representations and hash identically.
    """

    x: Fraction
    y: Fraction

    def __post_init__(self):
        x, y = Fraction(self.x), Fraction(self.y)
        if not (_is_power_of_two(x.denominator) and _is_power_of_two(y.denominator)):
            raise ContractError(f"non-dyadic coordinates ({x}, {y})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __add__(self, other: "DyadicPoint") -> "DyadicPoint":
        return DyadicPoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "DyadicPoint") -> "DyadicPoint":
        return DyadicPoint(self.x - other.x, self.y - other.y)

    def scaled(self, factor) -> "DyadicPoint":
        return DyadicPoint(self.x * factor, self.y * factor)

    def rot90(self) -> "DyadicPoint":
        """Counterclockwise quarter turn about the origin."""
        return DyadicPoint(-self.y, self.x)

    def midpoint(self, other: "DyadicPoint") -> "DyadicPoint":
        return DyadicPoint((self.x + other.x) / 2, (self.y + other.y) / 2)

    def norm2(self) -> Fraction:
        return self.x * self.x + self.y * self.y

    def denominator_exponent(self) -> int:
        """Smallest ``e`` such that both coordinates are multiples of ``2**-e``."""
        d = max(self.x.denominator, self.y.denominator)
        return d.bit_length() - 1

    def __repr__(self) -> str:
        return f"({self.x}, {self.y})"


def P(x, y) -> DyadicPoint:
    """Shorthand constructor accepting ints, Fractions or strings like ``'1/2'``."""
    return DyadicPoint(Fraction(x), Fraction(y))


def signed_area2(a: DyadicPoint, b: DyadicPoint, c: DyadicPoint) -> Fraction:
    """Twice the signed area of ``abc``; negative when ``abc`` runs clockwise."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _apex(left: DyadicPoint, right: DyadicPoint) -> DyadicPoint:
    half = (right - left).scaled(Fraction(1, 2))
    return left.midpoint(right) + half.rot90()


@dataclass(frozen=True, eq=False)
class LatticeTriangle:
    """A triangle of the level-``level`` triangulation with its vertex roles.

    Identity (``==`` and ``hash``) uses only the level and the vertex set;
    the roles are derived from the geometry and so carry no extra
    information.
    """

    level: int
    left: DyadicPoint
    top: DyadicPoint
    right: DyadicPoint

    def __post_init__(self):
        if self.level < 0:
            raise ContractError("level must be nonnegative")
        leg = Fraction(1, 2 ** (self.level + 1))
        if (
            (self.left - self.top).norm2() != leg
            or (self.right - self.top).norm2() != leg
            or signed_area2(self.left, self.top, self.right) >= 0
        ):
            raise ContractError(f"not a clockwise level-{self.level} triangle: {self.vertices}")

    @classmethod
    def from_hypotenuse(cls, level: int, left: DyadicPoint, right: DyadicPoint) -> "LatticeTriangle":
        return cls(level, left, _apex(left, right), right)

    @classmethod
    def from_vertices(cls, level: int, vertices) -> "LatticeTriangle":
        """Assign roles to an unordered vertex triple."""
        a, b, c = vertices
        # the top vertex is the one opposite the longest side
        for top, u, v in ((a, b, c), (b, c, a), (c, a, b)):
            if (u - v).norm2() > (u - top).norm2():
                break
        else:
            raise ContractError(f"degenerate vertex set {vertices}")
        if signed_area2(u, top, v) < 0:
            return cls(level, u, top, v)
        return cls(level, v, top, u)

    @property
    def vertices(self) -> Tuple[DyadicPoint, DyadicPoint, DyadicPoint]:
        return (self.left, self.top, self.right)

    @property
    def hypotenuse_midpoint(self) -> DyadicPoint:
        return self.left.midpoint(self.right)

    def _key(self):
        return (self.level, tuple(sorted(self.vertices)))

    def __eq__(self, other):
        if not isinstance(other, LatticeTriangle):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other: "LatticeTriangle") -> bool:
        return self._key() < other._key()

    def area2(self) -> Fraction:
        """Twice the (unsigned) area."""
        return -signed_area2(self.left, self.top, self.right)

    def translated(self, dx, dy) -> "LatticeTriangle":
        d = P(dx, dy)
        return LatticeTriangle(self.level, self.left + d, self.top + d, self.right + d)

    def map(self, f) -> "LatticeTriangle":
        """Image under an orientation-preserving similarity ``f`` of ratio 1/sqrt(2)."""
        return LatticeTriangle(self.level + 1, f(self.left), f(self.top), f(self.right))

    def __repr__(self) -> str:
        return f"LatticeTriangle(k={self.level}, L={self.left}, T={self.top}, R={self.right})"


T0 = LatticeTriangle(0, P(0, 0), P("1/2", "1/2"), P(1, 0))


def subdivide(t: LatticeTriangle) -> Tuple[LatticeTriangle, LatticeTriangle]:
    """Halve ``t`` through its hypotenuse midpoint.

    The first child contains ``t.left``, the second ``t.right``.
    """
    k = t.level + 1
    return (
        LatticeTriangle.from_hypotenuse(k, t.top, t.left),
        LatticeTriangle.from_hypotenuse(k, t.right, t.top),
    )


def exterior_children(t: LatticeTriangle) -> Tuple[LatticeTriangle, LatticeTriangle]:
    """The two level ``k+1`` triangles built outward on the legs of ``t``.

    ``T^L`` has the left edge of ``t`` as hypotenuse, ``T^R`` the right edge;
    both apexes lie outside ``t``.
    """
    k = t.level + 1
    return (
        LatticeTriangle.from_hypotenuse(k, t.left, t.top),
        LatticeTriangle.from_hypotenuse(k, t.top, t.right),
    )


def _turn(tri: LatticeTriangle, pivot: DyadicPoint, came: DyadicPoint) -> LatticeTriangle:
    """Step to the next triangle around ``pivot``.

    ``tri`` was entered across its edge ``(pivot, came)``; return its
    neighbour across the other edge through ``pivot``.  Neighbours are
    mirror images, so the step only reflects ``came``.
    """
    (other,) = [v for v in tri.vertices if v != pivot and v != came]
    if tri.top == came:
        image = pivot + other - came
    else:
        image = (tri.top + tri.top) - came
    return LatticeTriangle.from_vertices(tri.level, (pivot, other, image))


@dataclass(frozen=True)
class Star:
    """The 15 triangles meeting a triangle, in canonical order.

    Indexing is 1-based to match the usual ``N(T)[i]`` numbering.
    """

    entries: Tuple[LatticeTriangle, ...]

    def __post_init__(self):
        if len(self.entries) != STAR_SIZE:
            raise ContractError("a star has exactly 15 entries")

    def __getitem__(self, i: int) -> LatticeTriangle:
        if not 1 <= i <= STAR_SIZE:
            raise IndexError(i)
        return self.entries[i - 1]

    def __iter__(self) -> Iterator[LatticeTriangle]:
        return iter(self.entries)

    def __len__(self) -> int:
        return STAR_SIZE

    @property
    def center(self) -> LatticeTriangle:
        return self.entries[0]


def star(t: LatticeTriangle) -> Star:
    """Triangles of the same level meeting ``t``, in canonical order.

    1 is ``t``; 2..8 go clockwise around the left vertex, starting across the
    hypotenuse and ending across the left edge; 9 is diagonally opposite at
    the top vertex; 10 lies across the right edge and 11..15 continue
    clockwise around the right vertex.
    """
    out = [t]
    cur, came = t, t.top
    for _ in range(7):
        nxt = _turn(cur, t.left, came)
        came = next(v for v in cur.vertices if v != t.left and v != came)
        cur = nxt
        out.append(cur)
    eighth = cur
    out.append(_turn(eighth, t.top, t.left))
    cur, came = t, t.left
    for _ in range(6):
        nxt = _turn(cur, t.right, came)
        came = next(v for v in cur.vertices if v != t.right and v != came)
        cur = nxt
        out.append(cur)
    return Star(tuple(out))


def star_membership_index(center: LatticeTriangle, other: LatticeTriangle) -> Optional[int]:
    """1-based position of ``other`` in ``star(center)``, or ``None``."""
    if center.level != other.level:
        raise ContractError(f"level mismatch: {center.level} != {other.level}")
    for i, s in enumerate(star(center), start=1):
        if s == other:
            return i
    return None


def n0() -> Star:
    """The star of ``T0``; its carrier contains every iterate of ``T0``."""
    return star(T0)


def contains_point(t: LatticeTriangle, p: DyadicPoint) -> bool:
    """Closed point-in-triangle test."""
    return (
        signed_area2(t.left, t.top, p) <= 0
        and signed_area2(t.top, t.right, p) <= 0
        and signed_area2(t.right, t.left, p) <= 0
    )


def base_triangles(i: int, j: int) -> Tuple[LatticeTriangle, ...]:
    """The four level-0 triangles of the unit square with lower-left corner ``(i, j)``."""
    c = P(Fraction(2 * i + 1, 2), Fraction(2 * j + 1, 2))
    a, b, d, e = P(i, j), P(i, j + 1), P(i + 1, j + 1), P(i + 1, j)
    return (
        LatticeTriangle(0, a, c, e),  # bottom
        LatticeTriangle(0, b, c, a),  # left
        LatticeTriangle(0, d, c, b),  # top
        LatticeTriangle(0, e, c, d),  # right
    )


def triangulation_window(level: int, x0: int, x1: int, y0: int, y1: int) -> Iterator[LatticeTriangle]:
    """All level-``level`` triangles inside the square block ``[x0, x1] x [y0, y1]``."""
    stack = [t for i in range(x0, x1) for j in range(y0, y1) for t in base_triangles(i, j)]
    while stack:
        t = stack.pop()
        if t.level == level:
            yield t
        else:
            stack.extend(subdivide(t))


def max_denominator_exponent(level: int) -> int:
    """Vertices at ``level`` lie on the lattice ``2**-e Z^2`` for this ``e``."""
    return (level + 1) // 2 + 1
