from hypothesis import given, settings
from hypothesis import strategies as st

from unitspec.snf import AbelianGroup, SparseIntMatrix, group_from_torsion_counts, homology_from_boundaries, smith_diagonal, sparse_invariants


def test_invariant_factor_normal_form():
    assert AbelianGroup(0, (2, 3)).torsion == (6,)
    assert AbelianGroup(0, (4, 2, 2)).torsion == (2, 2, 4)
    assert str(AbelianGroup(1, (2,))) == "Z + Z/2"
    assert AbelianGroup.from_strings(["Z", "Z/4", "0"]) == AbelianGroup(1, (4,))


def test_smith_diagonal_small():
    assert smith_diagonal([[2, 4], [6, 8]]) == [2, 4]
    assert smith_diagonal([[0, 0], [0, 0]]) == []


def test_sparse_matches_dense():
    rows = [[1, 2, 0], [0, 2, 4], [3, 0, 6]]
    M = SparseIntMatrix(3, [{i: rows[i][j] for i in range(3)} for j in range(3)])
    rank, tors = sparse_invariants(M)
    diag = smith_diagonal(rows)
    assert rank == len(diag)
    assert tors == [d for d in diag if d > 1]


def test_two_stage_complex():
    # Z --2--> Z in degrees 1 -> 0
    d1 = SparseIntMatrix(1, [{0: 2}])
    assert homology_from_boundaries([1, 1], [None, d1, None]) == [AbelianGroup(0, (2,)), AbelianGroup()]


def test_group_from_torsion_counts():
    # Z/2 + Z/4: 2-torsion has 4 elements, 4-torsion all 8
    G = group_from_torsion_counts(8, lambda d: {2: 4, 4: 8, 8: 8}[d])
    assert G == AbelianGroup(0, (2, 4))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=4))
def test_sparse_and_dense_agree(rows):
    ncols = 3
    M = SparseIntMatrix(len(rows), [{i: rows[i][j] for i in range(len(rows))} for j in range(ncols)])
    rank, tors = sparse_invariants(M)
    diag = smith_diagonal(rows)
    assert rank == len(diag)
    assert AbelianGroup(0, tuple(tors)) == AbelianGroup(0, tuple(d for d in diag if d > 1))
