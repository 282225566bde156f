"""Exact iteration of the Levy IFS as triangle replacement, and the
geometric neighbourhood-type census that checks the symbolic engine.

Heavy lifting runs on integer coordinates: a level-``k`` computation scales
every vertex by ``2**h`` with ``h = max_denominator_exponent(k)``, which makes
all vertices of levels ``0..k`` integral.  A triangle is looked up by the
packed sum of its three vertices (three times its centroid); distinct
triangles of one level never share a centroid.
"""
from __future__ import annotations

import html
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import ContractError, ResourceLimitError
from .lattice import (
    DyadicPoint,
    LatticeTriangle,
    T0,
    max_denominator_exponent,
    n0,
    star,
)
from .typedyn import COVERED, TypeCensus, is_boundary_code

__all__ = [
    "DEFAULT_MAX_DEPTH",
    "Encoding",
    "OccupancySet",
    "boundary_count_geometric",
    "covered_counts",
    "f1",
    "f2",
    "ifs_map",
    "iterate",
    "iterate_by_maps",
    "leaf_rows",
    "neighborhood_type",
    "render",
    "type_census",
]

DEFAULT_MAX_DEPTH = 20


def f1(p: DyadicPoint) -> DyadicPoint:
    return DyadicPoint((p.x - p.y) / 2, (p.x + p.y) / 2)


def f2(p: DyadicPoint) -> DyadicPoint:
    return DyadicPoint((p.x + p.y + 1) / 2, (p.y - p.x + 1) / 2)


def ifs_map(which: int, p: DyadicPoint) -> DyadicPoint:
    """Apply ``f1`` (``which == 1``) or ``f2`` (``which == 2``) exactly."""
    if which == 1:
        return f1(p)
    if which == 2:
        return f2(p)
    raise ContractError(f"no map number {which}")


def _check_depth(k: int, max_depth: Optional[int]) -> None:
    if k < 0:
        raise ContractError("depth must be nonnegative")
    limit = DEFAULT_MAX_DEPTH if max_depth is None else max_depth
    if k > limit:
        raise ResourceLimitError(f"depth {k} exceeds the geometric limit {limit}")


@dataclass(frozen=True)
class Encoding:
    """Integer coordinates for triangles of levels ``<= level``."""

    level: int

    @property
    def shift(self) -> int:
        return max_denominator_exponent(self.level)

    @property
    def bias(self) -> int:
        # vertex sums of anything near N0 stay well inside +-bias
        return 1 << (self.shift + 4)

    @property
    def stride(self) -> int:
        return 1 << (self.shift + 6)

    def encode(self, t: LatticeTriangle) -> Tuple[int, ...]:
        scale = 1 << self.shift
        out = []
        for v in t.vertices:
            x, y = v.x * scale, v.y * scale
            if x.denominator != 1 or y.denominator != 1:
                raise ContractError(f"{t} is finer than encoding level {self.level}")
            out.extend((int(x), int(y)))
        return tuple(out)

    def decode(self, row, level: int) -> LatticeTriangle:
        scale = 1 << self.shift
        lx, ly, tx, ty, rx, ry = (int(v) for v in row)
        pt = lambda a, b: DyadicPoint(Fraction(a, scale), Fraction(b, scale))  # noqa: E731
        return LatticeTriangle(level, pt(lx, ly), pt(tx, ty), pt(rx, ry))

    def keys(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, 6)
        sx = rows[:, 0] + rows[:, 2] + rows[:, 4]
        sy = rows[:, 1] + rows[:, 3] + rows[:, 5]
        return (sx + self.bias) * self.stride + (sy + self.bias)

    def key_delta(self, a: LatticeTriangle, b: LatticeTriangle) -> int:
        ra, rb = self.encode(a), self.encode(b)
        dx = sum(rb[0::2]) - sum(ra[0::2])
        dy = sum(rb[1::2]) - sum(ra[1::2])
        return dx * self.stride + dy

    def star_deltas(self, level: int) -> np.ndarray:
        """Key offsets of the 15 star entries, indexed by hypotenuse direction.

        Row ``(sx + 1) * 3 + (sy + 1)`` holds the offsets for triangles whose
        ``right - left`` has component signs ``(sx, sy)``.
        """
        table = np.zeros((9, 15), dtype=np.int64)
        if level % 2 == 0:
            u = Fraction(1, 1 << (level // 2))
            dirs = [(u, 0), (-u, 0), (0, u), (0, -u)]
        else:
            u = Fraction(1, 1 << ((level + 1) // 2))
            dirs = [(u, u), (u, -u), (-u, u), (-u, -u)]
        origin = DyadicPoint(0, 0)
        for dx, dy in dirs:
            rep = LatticeTriangle.from_hypotenuse(level, origin, DyadicPoint(dx, dy))
            sx = (dx > 0) - (dx < 0)
            sy = (dy > 0) - (dy < 0)
            table[(sx + 1) * 3 + sy + 1] = [self.key_delta(rep, s) for s in star(rep)]
        return table


def _exterior_rows(rows: np.ndarray) -> np.ndarray:
    """Replace every row by its two exterior children (left child first)."""
    lx, ly, tx, ty, rx, ry = rows.T
    ax = (lx + tx - ty + ly) >> 1
    ay = (ly + ty + tx - lx) >> 1
    bx = (tx + rx - ry + ty) >> 1
    by = (ty + ry + rx - tx) >> 1
    left = np.stack([lx, ly, ax, ay, tx, ty], axis=1)
    right = np.stack([tx, ty, bx, by, rx, ry], axis=1)
    return np.stack([left, right], axis=1).reshape(-1, 6)


def _subdivide_rows(rows: np.ndarray) -> np.ndarray:
    """Replace every row by its two subdivision children (left child first)."""
    lx, ly, tx, ty, rx, ry = rows.T
    ax = (tx + lx - ly + ty) >> 1
    ay = (ty + ly + lx - tx) >> 1
    bx = (rx + tx - ty + ry) >> 1
    by = (ry + ty + tx - rx) >> 1
    first = np.stack([tx, ty, ax, ay, lx, ly], axis=1)
    second = np.stack([rx, ry, bx, by, tx, ty], axis=1)
    return np.stack([first, second], axis=1).reshape(-1, 6)


def leaf_rows(enc: Encoding, depth: int) -> np.ndarray:
    """Encoded triangles of ``N_depth``: depth-first, left child first."""
    rows = np.array([enc.encode(t) for t in n0()], dtype=np.int64)
    for _ in range(depth):
        rows = _subdivide_rows(rows)
    return rows


@dataclass(frozen=True)
class OccupancySet:
    """The distinct level-``level`` triangles making up ``F^level(T0)``.

    ``rows`` holds the encoded triangles sorted by lookup key and
    ``multiplicity[i]`` counts the index sequences landing on ``rows[i]``.
    """

    level: int
    encoding: Encoding
    rows: np.ndarray
    multiplicity: np.ndarray
    keys: np.ndarray = field(repr=False)

    @property
    def sequence_count(self) -> int:
        return 1 << self.level

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, t: LatticeTriangle) -> bool:
        if t.level != self.level:
            return False
        try:
            key = self.encoding.keys(np.array(self.encoding.encode(t)))[0]
        except ContractError:
            return False
        i = np.searchsorted(self.keys, key)
        return bool(i < len(self.keys) and self.keys[i] == key)

    @property
    def triangles(self) -> FrozenSet[LatticeTriangle]:
        return frozenset(self.encoding.decode(r, self.level) for r in self.rows)


def iterate(k: int, *, max_depth: Optional[int] = None, encoding: Optional[Encoding] = None) -> OccupancySet:
    """``F^k(T0)`` built by repeated exterior replacement starting from ``T0``."""
    _check_depth(k, max_depth)
    enc = encoding or Encoding(k)
    rows = np.array([enc.encode(T0)], dtype=np.int64)
    mult = np.ones(1, dtype=np.int64)
    for _ in range(k):
        rows = _exterior_rows(rows)
        mult = np.repeat(mult, 2)
        keys = enc.keys(rows)
        keys, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        mult = np.bincount(inverse.ravel(), weights=mult, minlength=len(keys)).astype(np.int64)
        rows = rows[first]
    keys = enc.keys(rows)
    return OccupancySet(k, enc, rows, mult, keys)


def iterate_by_maps(k: int) -> FrozenSet[LatticeTriangle]:
    """``{f_I(T0)}`` over all index sequences of length ``k``, by composing the maps."""
    current = {T0}
    for _ in range(k):
        current = {t.map(f) for t in current for f in (f1, f2)}
    return frozenset(current)


def neighborhood_type(t: LatticeTriangle, occ: OccupancySet) -> int:
    """15-bit occupancy code of the star of ``t``."""
    if t.level != occ.level:
        raise ContractError(f"level mismatch: triangle {t.level}, occupancy {occ.level}")
    code = 0
    for i, s in enumerate(star(t)):
        if s in occ:
            code |= 1 << i
    return code


def _histogram(rows: np.ndarray, depth: int, occ: OccupancySet, threads: int = 1) -> np.ndarray:
    enc = occ.encoding
    deltas = enc.star_deltas(occ.level)
    run = lambda chunk: _kernels.census_histogram(  # noqa: E731
        chunk, depth, occ.keys, deltas, enc.stride, enc.bias
    )
    if threads <= 1 or len(rows) < 2:
        return run(rows)
    chunks = np.array_split(rows, min(threads, len(rows)))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(run, chunks))


def type_census(k: int, *, max_depth: Optional[int] = None, threads: int = 1,
                occupancy: Optional[OccupancySet] = None) -> TypeCensus:
    """Tally the types of all ``15 * 2**k`` triangles of ``N_k`` against ``F^k(T0)``."""
    _check_depth(k, max_depth)
    occ = occupancy if occupancy is not None else iterate(k, max_depth=max_depth)
    if occ.level != k:
        raise ContractError("occupancy level does not match census depth")
    roots = np.array([occ.encoding.encode(t) for t in n0()], dtype=np.int64)
    return TypeCensus.from_histogram(_histogram(roots, k, occ, threads))


def codes_for(rows: np.ndarray, occ: OccupancySet) -> np.ndarray:
    """Type code of every encoded level-``occ.level`` triangle in ``rows``."""
    enc = occ.encoding
    deltas = enc.star_deltas(occ.level)
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, 6)
    keys = enc.keys(rows)
    orient = _orient(rows)
    codes = np.zeros(len(rows), dtype=np.int64)
    for bit in range(15):
        probe = keys + deltas[orient, bit]
        pos = np.searchsorted(occ.keys, probe).clip(max=max(len(occ.keys) - 1, 0))
        codes |= (occ.keys[pos] == probe).astype(np.int64) << bit
    return codes


def occupied_types(occ: OccupancySet) -> np.ndarray:
    """Type code of every row of ``occ.rows``."""
    return codes_for(occ.rows, occ)


def boundary_count_geometric(k: int, *, max_depth: Optional[int] = None,
                             occupancy: Optional[OccupancySet] = None) -> int:
    """Distinct occupied triangles of level ``k`` that are not covered."""
    _check_depth(k, max_depth)
    occ = occupancy if occupancy is not None else iterate(k, max_depth=max_depth)
    hist = _histogram(occ.rows, 0, occ)
    return int(sum(int(hist[c]) for c in np.flatnonzero(hist) if is_boundary_code(int(c))))


def covered_counts(k: int, *, max_depth: Optional[int] = None,
                   occupancy: Optional[OccupancySet] = None) -> Tuple[int, int]:
    """Covered triangles at level ``k`` as ``(distinct, index_sequences)``."""
    _check_depth(k, max_depth)
    occ = occupancy if occupancy is not None else iterate(k, max_depth=max_depth)
    types = occupied_types(occ)
    covered = types == COVERED
    return int(covered.sum()), int(occ.multiplicity[covered].sum())


# fill colours: unoccupied, occupied boundary, covered
_PALETTE = ("#f4f4f4", "#1f4e79", "#c0392b")


def _fmt(v: Fraction) -> str:
    return repr(float(v)) if v.denominator != 1 else str(v.numerator)


def render(k: int, classification: str = "by-class", *, max_depth: Optional[int] = None) -> str:
    """SVG drawing of ``N_k`` with ``F^k(T0)`` highlighted.

    ``plain`` fills occupied triangles only; ``by-class`` colours every
    triangle of ``N_k`` as unoccupied, occupied or covered.
    """
    if classification not in ("plain", "by-class"):
        raise ContractError(f"unknown classification {classification!r}")
    _check_depth(k, max_depth)
    occ = iterate(k, max_depth=max_depth)
    enc = occ.encoding
    rows = leaf_rows(enc, k)
    codes = codes_for(rows, occ)

    scale = 1 << enc.shift
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.05 -1.05 3.1 2.1" '
        'width="930" height="630">',
        f"<title>{html.escape(f'N_{k} and F^{k}(T0)')}</title>",
        '<g transform="scale(1,-1)" stroke="#555555" '
        f'stroke-width="{_fmt(Fraction(1, 200 * (1 << (k // 2))))}" stroke-linejoin="round">',
    ]
    for row, code in zip(rows.tolist(), codes.tolist()):
        if code & 1 == 0:
            if classification == "plain":
                continue
            colour = _PALETTE[0]
        elif classification == "by-class" and code == COVERED:
            colour = _PALETTE[2]
        else:
            colour = _PALETTE[1]
        pts = " ".join(
            f"{_fmt(Fraction(row[i], scale))},{_fmt(Fraction(row[i + 1], scale))}" for i in (0, 2, 4)
        )
        lines.append(f'<polygon points="{pts}" fill="{colour}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _orient(rows: np.ndarray) -> np.ndarray:
    dx = np.sign(rows[:, 4] - rows[:, 0])
    dy = np.sign(rows[:, 5] - rows[:, 1])
    return (dx + 1) * 3 + dy + 1
