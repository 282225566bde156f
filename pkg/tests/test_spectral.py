import math
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levy_boundary import dragon, export, spectral, typedyn
from levy_boundary.errors import (
    ClosureError,
    ConvergenceError,
    PrimitivityError,
    StructureError,
)

REFERENCE_LAMBDA = 1.954776399
REFERENCE_DIMENSION = 1.934007183


def row_sums_by_vector_iteration(C, k):
    """Independent route to the row sums of C**k: apply C to the ones vector k times."""
    rows = [[(j, int(v)) for j, v in enumerate(r) if v] for r in np.asarray(C)]
    vec = [1] * len(rows)
    for _ in range(k):
        vec = [sum(v * vec[j] for j, v in r) for r in rows]
    return vec


def test_matrix_shape_and_rows(matrix):
    assert matrix.shape == (752, 752)
    assert (matrix.entries.sum(axis=1) == 2).all()
    assert matrix.sizes == (16, 734, 2)


def test_absorbing_rows(matrix):
    i0 = matrix.order.index(0)
    ic = matrix.order.index(typedyn.COVERED)
    assert matrix.entries[i0, i0] == 2 and matrix.entries[i0].sum() == 2
    assert matrix.entries[ic, ic] == 2 and matrix.entries[ic].sum() == 2


def test_rows_follow_child_types(matrix):
    assert 1 not in matrix.order
    idx = {c: i for i, c in enumerate(matrix.order)}
    for c in matrix.order:
        a, b = typedyn.child_types(c)
        row = matrix.entries[idx[c]]
        if a != b:
            assert row[idx[a]] == 1 and row[idx[b]] == 1
        else:
            assert row[idx[a]] == 2


def test_build_matrix_rejects_unclosed_set():
    with pytest.raises(ClosureError):
        spectral.build_matrix([1, 2, 4])


def test_build_matrix_rejects_noncanonical_order(stable):
    with pytest.raises(StructureError):
        spectral.build_matrix(sorted(stable.codes))


def test_block_shapes(blocks):
    assert blocks.P.shape == (16, 16)
    assert blocks.C.shape == (734, 734)
    assert blocks.I.shape == (2, 2)
    assert (np.diag(blocks.I) == 2).all()


def test_block_partition_rejects_bad_structure(matrix):
    broken = spectral.TransitionMatrix(matrix.order, matrix.entries.copy(), matrix.classification)
    broken.entries[20, 3] = 1
    with pytest.raises(StructureError):
        spectral.block_partition(broken)


def test_check_permutation(blocks):
    assert spectral.check_permutation(blocks.P)
    assert not spectral.check_permutation([[1, 1], [0, 0]])
    assert spectral.check_permutation(np.eye(3, dtype=int))


def test_primitivity(core, blocks):
    assert spectral.primitivity_exponent(core, 25) == 25
    with pytest.raises(PrimitivityError):
        spectral.primitivity_exponent(core, 24)
    assert spectral.primitivity_exponent([[2]], 5) == 1
    with pytest.raises(PrimitivityError):
        spectral.primitivity_exponent(blocks.P, 50)


def test_is_primitive_agrees(core, blocks):
    assert spectral.is_primitive(core)
    assert not spectral.is_primitive(blocks.P)
    assert not spectral.is_primitive([[0, 1], [1, 0]])


def test_power_method_matches_dense_eigensolver(core):
    lam, iters = spectral.power_method(core, 1e-10)
    eig = np.linalg.eigvals(core.astype(float))
    reference = float(np.max(np.abs(eig)))
    assert abs(lam - reference) < 1e-8
    assert abs(lam - REFERENCE_LAMBDA) < 1e-6
    assert iters > 1


def test_power_method_trivial_and_guard():
    assert spectral.power_method([[2]]) == (2.0, 1)
    with pytest.raises(ConvergenceError):
        spectral.power_method([[0, 1], [1, 0]])


def test_exact_power_against_vector_iteration(core):
    for k in (1, 2, 7):
        sums = spectral.exact_power(core, k).sum(axis=1)
        assert list(map(int, sums)) == row_sums_by_vector_iteration(core, k)


def test_exact_power_switches_to_python_ints():
    A = np.array([[3, 3], [3, 3]])
    big = spectral.exact_power(A, 40)
    assert big.dtype == object
    assert int(big[0, 0]) == 2**39 * 3**40


def test_rigorous_bounds_reference_values(core):
    b = spectral.rigorous_bounds(core, 30)
    sums = row_sums_by_vector_iteration(core, 30)
    assert (b.min_row_sum, b.max_row_sum) == (min(sums), max(sums))
    assert (b.min_row_sum, b.max_row_sum) == (67936360, 727212953)
    assert b.lower <= Decimal("1.824190") and b.upper >= Decimal("1.974189")
    assert Fraction(b.lower) ** 30 <= b.min_row_sum
    assert Fraction(b.upper) ** 30 >= b.max_row_sum
    assert Fraction(b.lower) ** 2 > 2


def test_rigorous_bounds_trivial():
    b = spectral.rigorous_bounds([[2]], 5)
    assert b.min_row_sum == b.max_row_sum == 32
    assert b.lower == b.upper == Decimal(2)


def test_bounds_sandwich_and_monotonicity(core):
    lam, _ = spectral.power_method(core)
    lows = []
    for k in (5, 10, 20, 30):
        b = spectral.rigorous_bounds(core, k)
        assert float(b.lower) <= lam <= float(b.upper)
        lows.append(b.lower)
    # monitored, not guaranteed
    assert lows == sorted(lows)


def test_dimension_from_growth():
    assert abs(spectral.dimension_from_growth(REFERENCE_LAMBDA, 1 / math.sqrt(2)) - REFERENCE_DIMENSION) < 1e-6
    assert spectral.dimension_from_growth(2, 0.5) == pytest.approx(1.0)
    assert spectral.dimension_from_growth(1, 0.3) == 0
    with pytest.raises(ValueError):
        spectral.dimension_from_growth(0.5, 0.5)


def test_growth_series_small_k_matches_geometry():
    series = spectral.boundary_growth_series(k_max=16)
    assert series.counts[0] == 1
    for k in range(17):
        assert series.counts[k] == dragon.boundary_count_geometric(k)


def test_growth_series_ratios_approach_lambda(core):
    lam, _ = spectral.power_method(core)
    series = spectral.boundary_growth_series(k_max=200)
    for k in range(100, 111):
        assert abs(float(series.ratios[k]) - lam) < 1e-3
    assert abs(float(series.ratios[199]) - lam) / lam < 1e-6


def test_growth_series_from_matrix_recursion(matrix):
    # |B_(19+k)| = V(19) . M^k . J computed with the matrix instead of the census
    v19 = typedyn.evolve(typedyn.seed_census(), 19)
    vec = np.array([v19.get(c) for c in matrix.order], dtype=object)
    J = np.array([1 if typedyn.is_boundary_code(c) else 0 for c in matrix.order], dtype=object)
    series = spectral.boundary_growth_series(k_max=40)
    M = matrix.entries.astype(object)
    for k in range(0, 22):
        assert vec.dot(J) == series.counts[19 + k]
        vec = vec.dot(M)


@settings(max_examples=5, deadline=None)
@given(st.randoms(use_true_random=False))
def test_similarity_invariance(core, rnd):
    perm = list(range(core.shape[0]))
    rnd.shuffle(perm)
    shuffled = core[np.ix_(perm, perm)]
    lam, _ = spectral.power_method(core)
    lam2, _ = spectral.power_method(shuffled)
    assert abs(lam - lam2) < 1e-9
    for k in (3, 6):
        a = sorted(spectral.exact_power(core, k).sum(axis=1).tolist())
        b = sorted(spectral.exact_power(shuffled, k).sum(axis=1).tolist())
        assert a == b


def test_spectral_report(core):
    r = spectral.spectral_report()
    assert r.lower_bound <= Decimal(repr(r.lambda_estimate)) <= r.upper_bound
    assert r.dimension_estimate == pytest.approx(math.log(r.lambda_estimate) / math.log(math.sqrt(2)))
    assert r.primitivity_exponent == 25
    assert r.absorbing_diagonal == (2, 2)
    assert r.notes
    doc = r.to_json_dict()
    assert doc["lower_bound"] == "1.824190" and doc["upper_bound"] == "1.974189"
    assert isinstance(doc["min_row_sum"], str)


def test_triplet_round_trip(matrix):
    text = export.matrix_triplets(matrix)
    rows, cols, trips = export.parse_triplets(text)
    assert (rows, cols) == (752, 752)
    rebuilt = np.zeros((rows, cols), dtype=np.int64)
    for i, j, v in trips:
        rebuilt[i, j] = v
    assert (rebuilt == matrix.entries).all()
    meta = export.matrix_metadata(matrix)
    assert meta["blocks"] == {"transient": [0, 16], "core": [16, 750], "absorbing": [750, 752]}
    assert meta["order"][:16] == list(typedyn.EXPECTED_TRANSIENT)
