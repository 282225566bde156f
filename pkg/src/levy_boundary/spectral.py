"""Transition matrix over the stable types and its Perron-Frobenius analysis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import ClosureError, ConvergenceError, PrimitivityError, StructureError
from .typedyn import (
    StableSet,
    TypeClassification,
    boundary_count,
    child_types,
    classify,
    evolve,
    seed_census,
    stable_set,
)

__all__ = [
    "BlockPartition",
    "Bounds",
    "GrowthSeries",
    "SpectralReport",
    "TransitionMatrix",
    "block_partition",
    "boundary_growth_series",
    "build_matrix",
    "check_permutation",
    "dimension_from_growth",
    "exact_power",
    "is_primitive",
    "power_method",
    "primitivity_exponent",
    "rigorous_bounds",
    "spectral_report",
]

SQRT2_RATIO = 1 / math.sqrt(2)


@dataclass(frozen=True)
class TransitionMatrix:
    """``entries[i, j]`` = number of children of type ``order[j]`` of a type ``order[i]`` triangle."""

    order: Tuple[int, ...]
    entries: np.ndarray
    classification: TypeClassification

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    @property
    def sizes(self) -> Tuple[int, int, int]:
        c = self.classification
        return len(c.transient), len(c.core), len(c.absorbing)

    def triplets(self) -> List[Tuple[int, int, int]]:
        rows, cols = np.nonzero(self.entries)
        return [(int(i), int(j), int(self.entries[i, j])) for i, j in zip(rows, cols)]


def build_matrix(stable: StableSet | Sequence[int]) -> TransitionMatrix:
    """Matrix of the child-type map over a closed, canonically ordered type set."""
    codes = tuple(stable)
    index = {c: i for i, c in enumerate(codes)}
    n = len(codes)
    m = np.zeros((n, n), dtype=np.int64)
    for i, c in enumerate(codes):
        for ch in child_types(c):
            j = index.get(ch)
            if j is None:
                raise ClosureError(f"child {ch} of type {c} is outside the type set")
            m[i, j] += 1
    classification = classify(codes)
    if codes != classification.order:
        raise StructureError("type set is not in canonical (transient, core, absorbing) order")
    return TransitionMatrix(codes, m, classification)


class BlockPartition(NamedTuple):
    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    C: np.ndarray
    L: np.ndarray
    I: np.ndarray


def block_partition(M: TransitionMatrix) -> BlockPartition:
    """Split ``M`` into its upper block-triangular pieces, checking the zero blocks.

    The absorbing block is returned as found (its diagonal is 2, one entry
    per child); only its off-diagonal entries are required to vanish.
    """
    t, e, a = M.sizes
    A = M.entries
    it, ie, ia = slice(0, t), slice(t, t + e), slice(t + e, t + e + a)
    for name, blk in (
        ("core->transient", A[ie, it]),
        ("absorbing->transient", A[ia, it]),
        ("absorbing->core", A[ia, ie]),
    ):
        if blk.any():
            raise StructureError(f"{name} block is not zero")
    absorbing = A[ia, ia]
    if (absorbing - np.diag(np.diag(absorbing))).any():
        raise StructureError("absorbing block has off-diagonal entries")
    return BlockPartition(A[it, it], A[it, ie], A[it, ia], A[ie, ie], A[ie, ia], absorbing)


def check_permutation(P) -> bool:
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        return False
    if not np.isin(P, (0, 1)).all():
        return False
    return bool((P.sum(axis=0) == 1).all() and (P.sum(axis=1) == 1).all())


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # float32 BLAS on 0/1 matrices; only positivity of the result is used
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0


def primitivity_exponent(C, max_power: int = 25) -> int:
    """Smallest ``m <= max_power`` with every entry of ``C**m`` positive."""
    pattern = np.asarray(C) > 0
    power = pattern.copy()
    for m in range(1, max_power + 1):
        if power.all():
            return m
        power = _bool_matmul(power, pattern)
    raise PrimitivityError(f"no power up to {max_power} is strictly positive")


def is_primitive(C) -> bool:
    """Wielandt test: ``C`` is primitive iff ``C**((n-1)**2 + 1)`` is positive."""
    pattern = np.asarray(C) > 0
    n = pattern.shape[0]
    bound = (n - 1) ** 2 + 1
    power, m = pattern, 1
    while m < bound:
        power = _bool_matmul(power, power)
        m *= 2
    return bool(power.all())


def power_method(C, tolerance: float = 1e-10, max_iterations: int = 100_000) -> Tuple[float, int]:
    """Perron root of a primitive nonnegative matrix by left power iteration.

    Starts from the all-ones row vector, renormalises by the sup norm and
    stops once two successive Rayleigh quotients differ by less than
    ``tolerance``.  The warm-up product that yields the first estimate is not
    counted.  Raises :class:`ConvergenceError` if ``C`` is not primitive,
    because the iteration then need not settle on the spectral radius.
    """
    A = np.asarray(C, dtype=np.float64)
    if not is_primitive(A):
        raise ConvergenceError("power method requires a primitive matrix")
    v = np.ones(A.shape[0])
    w = v @ A
    estimate = float(w @ v) / float(v @ v)
    v = w / np.abs(w).max()
    for it in range(1, max_iterations + 1):
        w = v @ A
        new = float(w @ v) / float(v @ v)
        v = w / np.abs(w).max()
        if abs(new - estimate) < tolerance:
            return new, it
        estimate = new
    raise ConvergenceError(f"no convergence within {max_iterations} iterations")


def exact_power(C, k: int) -> np.ndarray:
    """``C**k`` for a nonnegative integer matrix, in exact arithmetic.

    Every entry of every intermediate product, and every partial sum inside
    a product, is a nonnegative integer bounded by ``growth**k`` (``growth``
    the largest row sum).  Below ``2**53`` float64 BLAS is therefore exact;
    below ``2**63`` int64 is; otherwise Python integers are used.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    A = np.asarray(C)
    if A.size and (A < 0).any():
        raise ValueError("matrix must be nonnegative")
    growth = int(A.astype(object).sum(axis=1).max()) if A.size else 0
    bound = growth ** k
    if bound < 2 ** 53:
        dtype = np.float64
    elif bound < 2 ** 63:
        dtype = np.int64
    else:
        dtype = object
    base = A.astype(dtype)
    result = None
    while k:
        if k & 1:
            result = base if result is None else result @ base
        k >>= 1
        if k:
            base = base @ base
    if dtype is np.float64:
        result = result.astype(np.int64)
    return result


def _iroot(n: int, k: int) -> int:
    """``floor(n ** (1/k))`` for nonnegative integers."""
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


@dataclass(frozen=True)
class Bounds:
    k: int
    min_row_sum: int
    max_row_sum: int
    lower: Decimal
    upper: Decimal


def rigorous_bounds(C, k: int, digits: int = 6) -> Bounds:
    """Certified enclosure of the Perron root from the row sums of ``C**k``.

    ``lower`` is the largest ``digits``-place decimal with ``lower**k <= u_k``
    and ``upper`` the smallest with ``upper**k >= U_k``; both inequalities are
    checked in exact rational arithmetic.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    sums = exact_power(C, k).astype(object).sum(axis=1)
    u, U = int(sums.min()), int(sums.max())
    scale = 10 ** digits
    lo = _iroot(u * scale ** k, k)
    hi = _iroot(U * scale ** k, k)
    if hi ** k < U * scale ** k:
        hi += 1
    lower, upper = Fraction(lo, scale), Fraction(hi, scale)
    assert lower ** k <= u and upper ** k >= U
    q = Decimal(1).scaleb(-digits)
    return Bounds(k, u, U, (Decimal(lo) * q), (Decimal(hi) * q))


def dimension_from_growth(alpha: float, c: float = SQRT2_RATIO) -> float:
    """Solution ``s`` of ``alpha * c**s == 1``."""
    if alpha < 1:
        raise ValueError("growth rate must be >= 1")
    if not 0 < c < 1:
        raise ValueError("contraction ratio must lie in (0, 1)")
    return -math.log(alpha) / math.log(c)


@dataclass(frozen=True)
class GrowthSeries:
    counts: Tuple[int, ...]
    ratios: Tuple[Decimal, ...]


def boundary_growth_series(start: Optional[Mapping[int, int]] = None, k_max: int = 200,
                           precision: int = 30) -> GrowthSeries:
    """Boundary counts ``|B_0| .. |B_k_max|`` and successive ratios ``|B_{k+1}| / |B_k|``."""
    census = seed_census() if start is None else start
    counts = []
    for k in range(k_max + 1):
        counts.append(boundary_count(census))
        if k < k_max:
            census = evolve(census, 1)
    ratios = []
    with localcontext() as ctx:
        ctx.prec = precision
        for a, b in zip(counts, counts[1:]):
            ratios.append(Decimal(b) / Decimal(a) if a else Decimal("NaN"))
    return GrowthSeries(tuple(counts), tuple(ratios))


@dataclass(frozen=True)
class SpectralReport:
    lambda_estimate: float
    lower_bound: Decimal
    upper_bound: Decimal
    dimension_estimate: float
    iterations_used: int
    primitivity_exponent: int
    bounds_power: int
    min_row_sum: int
    max_row_sum: int
    matrix_size: int
    block_sizes: Tuple[int, int, int]
    absorbing_diagonal: Tuple[int, ...]
    notes: Tuple[str, ...] = field(default=())

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "lambda_estimate": repr(self.lambda_estimate),
            "dimension_estimate": repr(self.dimension_estimate),
            "lower_bound": str(self.lower_bound),
            "upper_bound": str(self.upper_bound),
            "lower_dimension_bound": repr(dimension_from_growth(float(self.lower_bound))),
            "bounds_power": self.bounds_power,
            "min_row_sum": str(self.min_row_sum),
            "max_row_sum": str(self.max_row_sum),
            "iterations_used": self.iterations_used,
            "primitivity_exponent": self.primitivity_exponent,
            "matrix_size": self.matrix_size,
            "block_sizes": {"transient": self.block_sizes[0], "core": self.block_sizes[1],
                            "absorbing": self.block_sizes[2]},
            "absorbing_diagonal": list(self.absorbing_diagonal),
            "lower_bound_exceeds_sqrt2": Fraction(str(self.lower_bound)) ** 2 > 2,
            "notes": list(self.notes),
        }


def spectral_report(tolerance: float = 1e-10, bounds_power: int = 30, max_power: int = 25,
                    digits: int = 6) -> SpectralReport:
    """Run the full symbolic pipeline: stable set, matrix, blocks, Perron root, bounds."""
    stable = stable_set()
    M = build_matrix(stable)
    blocks = block_partition(M)
    if not check_permutation(blocks.P):
        raise StructureError("transient block is not a permutation")
    m = primitivity_exponent(blocks.C, max_power)
    lam, iters = power_method(blocks.C, tolerance)
    b = rigorous_bounds(blocks.C, bounds_power, digits)
    diag = tuple(int(x) for x in np.diag(blocks.I))
    notes = []
    if any(d != 1 for d in diag):
        notes.append(
            f"absorbing block is diag{diag}, i.e. 2 x identity, not the identity; "
            "each absorbing type has two children of its own type"
        )
    return SpectralReport(
        lambda_estimate=lam,
        lower_bound=b.lower,
        upper_bound=b.upper,
        dimension_estimate=dimension_from_growth(lam),
        iterations_used=iters,
        primitivity_exponent=m,
        bounds_power=bounds_power,
        min_row_sum=b.min_row_sum,
        max_row_sum=b.max_row_sum,
        matrix_size=M.shape[0],
        block_sizes=M.sizes,
        absorbing_diagonal=diag,
        notes=tuple(notes),
    )
