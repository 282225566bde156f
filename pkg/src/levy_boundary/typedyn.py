"""Symbolic dynamics of neighbourhood types.

A type is a 15-bit integer whose bit ``i - 1`` records whether the ``i``-th
star entry is occupied.  The types of the two subdivision children of a
triangle depend only on the type of the parent, through two fixed
bit-gathers, so the whole census of a subdivided region can be advanced
without any geometry.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ClassificationError, DivergenceError

__all__ = [
    "ABSORBING",
    "COVERED",
    "EXPECTED_TRANSIENT",
    "StableSet",
    "TypeCensus",
    "TypeClassification",
    "boundary_count",
    "child_types",
    "classify",
    "evolve",
    "seed_census",
    "stable_set",
]

COVERED = (1 << 15) - 1
ABSORBING = (0, COVERED)

# 1-based positions in the parent type read by each bit of the child type
LEFT_CHILD_GATHER = (8, 1, 9, 8, 10, 9, 1, 10, 15, 3, 2, 5, 4, 7, 6)
RIGHT_CHILD_GATHER = (10, 1, 12, 11, 14, 13, 2, 15, 3, 8, 1, 9, 8, 10, 9)

# transient types in the order they are conventionally listed
EXPECTED_TRANSIENT = (4, 8, 9, 16, 32, 64, 66, 128, 512, 1024, 1026, 2048, 4096, 8192, 8193, 16384)


def _gather(code: int, positions: Tuple[int, ...]) -> int:
    out = 0
    for j, i in enumerate(positions):
        out |= ((code >> (i - 1)) & 1) << j
    return out


def child_types(code: int) -> Tuple[int, int]:
    """Types of the left and right subdivision children of a type-``code`` triangle."""
    if not 0 <= code <= COVERED:
        raise ValueError(f"type code out of range: {code}")
    return _gather(code, LEFT_CHILD_GATHER), _gather(code, RIGHT_CHILD_GATHER)


class TypeCensus(Mapping[int, int]):
    """Immutable multiset of type codes with arbitrary-precision counts.

    Zero counts are never stored.
    """

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[int, int] | Iterable[Tuple[int, int]] = ()):
        items = counts.items() if isinstance(counts, Mapping) else counts
        clean: Dict[int, int] = {}
        for code, n in items:
            code, n = int(code), int(n)
            if n < 0:
                raise ValueError(f"negative count for type {code}")
            if not 0 <= code <= COVERED:
                raise ValueError(f"type code out of range: {code}")
            if n:
                clean[code] = clean.get(code, 0) + n
        self._counts = dict(sorted(clean.items()))

    def __getitem__(self, code: int) -> int:
        return self._counts[code]

    def get(self, code, default=0):
        return self._counts.get(code, default)

    def __iter__(self) -> Iterator[int]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __eq__(self, other):
        if isinstance(other, TypeCensus):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self == TypeCensus(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._counts.items()))

    def __repr__(self) -> str:
        return f"TypeCensus({self._counts})"

    @property
    def mass(self) -> int:
        return sum(self._counts.values())

    def to_json_dict(self) -> Dict[str, int]:
        return {str(code): n for code, n in self._counts.items()}

    @classmethod
    def from_json_dict(cls, data: Mapping[str, int]) -> "TypeCensus":
        return cls({int(code): int(n) for code, n in data.items()})

    @classmethod
    def from_histogram(cls, hist) -> "TypeCensus":
        hist = np.asarray(hist)
        return cls((int(c), int(hist[c])) for c in np.flatnonzero(hist))

    def first_difference(self, other: "TypeCensus"):
        """Smallest code whose counts differ, as ``(code, self_count, other_count)``."""
        for code in sorted(set(self) | set(other)):
            a, b = self.get(code), other.get(code)
            if a != b:
                return code, a, b
        return None


def seed_census() -> TypeCensus:
    """Census of the 15 level-0 triangles meeting ``T0``: one of each ``2**i``."""
    return TypeCensus({1 << i: 1 for i in range(15)})


def evolve(census: Mapping[int, int], steps: int = 1) -> TypeCensus:
    """Advance a census by ``steps`` subdivisions."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    current: Dict[int, int] = dict(census)
    cache: Dict[int, Tuple[int, int]] = {}
    for _ in range(steps):
        nxt: Counter = Counter()
        for code, n in current.items():
            kids = cache.get(code)
            if kids is None:
                kids = cache[code] = child_types(code)
            nxt[kids[0]] += n
            nxt[kids[1]] += n
        current = nxt
    return TypeCensus(current)


def is_boundary_code(code: int) -> bool:
    """Occupied (odd) but not covered."""
    return bool(code & 1) and code != COVERED


def boundary_count(census: Mapping[int, int]) -> int:
    """Number of occupied, uncovered triangles in the census."""
    return sum(n for code, n in census.items() if is_boundary_code(code))


@dataclass(frozen=True)
class StableSet:
    """Fixed point of the child-type set map, with its canonical order."""

    codes: Tuple[int, ...]
    depth: int

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self):
        return iter(self.codes)

    def __contains__(self, code) -> bool:
        return code in self.index

    @property
    def index(self) -> Dict[int, int]:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {c: i for i, c in enumerate(self.codes)}
            object.__setattr__(self, "_index", idx)
        return idx


def _child_set(codes: Iterable[int]) -> frozenset:
    return frozenset(c for code in codes for c in child_types(code))


def stable_set(max_iterations: int = 10_000, *, ordered: bool = True) -> StableSet:
    """Iterate ``S_{k+1} = children(S_k)`` from the seed types to a fixed point.

    ``depth`` is the first ``k`` with ``S_k == S_{k+1}``.  With ``ordered``
    the codes follow the canonical row order (transient, core, absorbing);
    otherwise they are ascending.
    """
    current = frozenset(1 << i for i in range(15))
    for depth in range(max_iterations):
        nxt = _child_set(current)
        if nxt == current:
            codes = tuple(sorted(current))
            if ordered:
                codes = classify(codes).order
            return StableSet(codes, depth)
        current = nxt
    raise DivergenceError(f"type set did not stabilise within {max_iterations} iterations")


@dataclass(frozen=True)
class TypeClassification:
    absorbing: Tuple[int, ...]
    transient: Tuple[int, ...]
    core: Tuple[int, ...]

    @property
    def order(self) -> Tuple[int, ...]:
        """Transient, then core, then absorbing codes."""
        return self.transient + self.core + self.absorbing

    def class_of(self, code: int) -> str:
        if code in self.absorbing:
            return "absorbing"
        if code in self.transient:
            return "transient"
        if code in self.core:
            return "core"
        raise KeyError(code)


def classify(stable: Iterable[int]) -> TypeClassification:
    """Split a closed type set into absorbing, transient and core classes.

    Absorbing types are their own children.  The remaining types are grouped
    into strongly connected components of the child digraph; a component in
    which every node has exactly one child edge inside the component (a
    union of cycles, i.e. a permutation block) is transient.  Everything else
    forms the core, which must be a single component reached from no core
    type back into a transient one.
    """
    codes = sorted(set(stable))
    members = set(codes)
    kids = {c: child_types(c) for c in codes}
    for c, pair in kids.items():
        for ch in pair:
            if ch not in members:
                raise ClassificationError(f"type set not closed: {c} -> {ch}")

    absorbing = tuple(c for c in codes if kids[c] == (c, c))
    if absorbing != ABSORBING:
        raise ClassificationError(f"absorbing types {absorbing}, expected {ABSORBING}")

    rest = [c for c in codes if c not in absorbing]
    pos = {c: i for i, c in enumerate(rest)}
    rows, cols = [], []
    for c in rest:
        for ch in kids[c]:
            if ch in pos:
                rows.append(pos[c])
                cols.append(pos[ch])
    n = len(rest)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")

    groups: Dict[int, List[int]] = {}
    for c in rest:
        groups.setdefault(int(labels[pos[c]]), []).append(c)

    transient_set = set()
    core_set = set()
    for comp in groups.values():
        inside = set(comp)
        out_degrees = [sum(ch in inside for ch in kids[c]) for c in comp]
        if all(d == 1 for d in out_degrees):
            transient_set.update(comp)
        else:
            core_set.update(comp)

    core = tuple(sorted(core_set))
    if core:
        core_labels = {int(labels[pos[c]]) for c in core}
        if len(core_labels) != 1:
            raise ClassificationError(f"core splits into {len(core_labels)} components")
    for c in core:
        if any(ch in transient_set for ch in kids[c]):
            raise ClassificationError(f"core type {c} has a transient child")

    listed = [c for c in EXPECTED_TRANSIENT if c in transient_set]
    extra = sorted(transient_set.difference(EXPECTED_TRANSIENT))
    return TypeClassification(absorbing, tuple(listed + extra), core)
