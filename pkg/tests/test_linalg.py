from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from oracles import box_solve, determinantal_invariants
from permres.linalg import (
    FpEchelon,
    GroupHom,
    IntegerMatrix,
    LatticeSolver,
    PresentedAbelianGroup,
    free_group,
    hermite_form,
    homology,
    image_basis,
    is_saturated,
    kernel_basis,
    lattice_contains,
    lattice_equal,
    lattice_intersection,
    left_inverse,
    lll_reduce,
    rank_mod_p,
    smith_normal_form,
    solve_integer,
    unimodular_inverse,
)


def matrices(max_rows=4, max_cols=4, lo=-6, hi=6):
    return st.integers(0, max_rows).flatmap(
        lambda m: st.integers(0, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                               min_size=m, max_size=m).map(lambda rows: IntegerMatrix(rows, m, n))))


def unimodular(rng: random.Random, n: int) -> IntegerMatrix:
    U = IntegerMatrix.identity(n)
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        E = [[int(a == b) for b in range(n)] for a in range(n)]
        E[i][j] = rng.choice([-2, -1, 1, 2])
        U = U @ IntegerMatrix(E)
    return U


# Smith normal form ----------------------------------------------------------

def test_snf_identity():
    s = smith_normal_form(IntegerMatrix.identity(2))
    assert s.invariant_factors == (1, 1)
    assert s.S.is_identity()


def test_snf_zero_matrix_reports_free_rank_as_zeros():
    assert smith_normal_form(IntegerMatrix.zeros(2, 3)).invariant_factors == (0, 0)


def test_snf_two_by_two_frozen():
    assert smith_normal_form(IntegerMatrix([[2, 4], [6, 8]])).invariant_factors == (2, 4)
    assert determinantal_invariants([[2, 4], [6, 8]]) == (2, 4)


def test_snf_empty_matrices():
    for shape in [(0, 0), (0, 3), (3, 0)]:
        s = smith_normal_form(IntegerMatrix.zeros(*shape))
        assert s.U.shape == (shape[0], shape[0]) and s.V.shape == (shape[1], shape[1])


@given(matrices())
def test_snf_matches_determinantal_divisors(A):
    s = smith_normal_form(A)
    assert s.U @ A @ s.V == s.S
    assert abs(s.U.det()) == 1 and abs(s.V.det()) == 1
    f = s.invariant_factors
    assert f == determinantal_invariants(A.tolist())
    nz = [d for d in f if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert f[:len(nz)] == tuple(nz)


@given(matrices(), st.integers(0, 10 ** 6))
def test_snf_invariant_under_unimodular_change(A, seed):
    rng = random.Random(seed)
    P, Q = unimodular(rng, A.rows), unimodular(rng, A.cols)
    assert smith_normal_form(P @ A @ Q).invariant_factors == smith_normal_form(A).invariant_factors


def test_snf_no_coefficient_explosion_on_tall_matrix():
    rng = random.Random(1)
    A = IntegerMatrix([[rng.randint(-3, 3) for _ in range(40)] for _ in range(64)])
    s = smith_normal_form(A)
    assert s.U @ A @ s.V == s.S
    assert max(abs(x) for x in s.U.entries) < 10 ** 6


# Hermite form -----------------------------------------------------------------

@given(matrices())
def test_hermite_form_shape_and_transform(A):
    hf = hermite_form(A, transform=True)
    H = hf.H
    assert hf.transform @ A == H
    assert abs(hf.transform.det()) == 1
    for i, c in enumerate(hf.pivots):
        assert H.row(i)[c] > 0
        assert all(x == 0 for x in H.row(i)[:c])
        for k in range(i):
            assert 0 <= H.row(k)[c] < H.row(i)[c]
    for i in range(len(hf.pivots), A.rows):
        assert not any(H.row(i))
    assert list(hf.pivots) == sorted(hf.pivots)


@given(matrices(), st.integers(0, 10 ** 6))
def test_hermite_form_is_canonical(A, seed):
    P = unimodular(random.Random(seed), A.rows)
    assert hermite_form(P @ A).H == hermite_form(A).H


# Solving -----------------------------------------------------------------------------

def test_solve_identity():
    assert solve_integer(IntegerMatrix.identity(3), (4, -1, 7)) == (4, -1, 7)


def test_solve_parity_obstruction():
    assert solve_integer(IntegerMatrix([[2]]), (3,)) is None


def test_solve_upper_triangular_against_box_search():
    A = IntegerMatrix([[2, 1], [0, 3]])
    assert solve_integer(A, (5, 6)) is None          # y = 2 forces 2x = 3
    assert not box_solve(A.tolist(), [5, 6], 6)
    x = solve_integer(A, (4, 6))
    assert x == (1, 2)


@given(matrices(3, 3, -3, 3), st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_solvers_agree_with_box_oracle(A, b):
    b = tuple(b[:A.rows])
    x = solve_integer(A, b)
    y = LatticeSolver(A).solve(b) if A.cols else (None if any(b) else ())
    if x is not None:
        assert A @ x == b
    if y is not None and A.cols:
        assert A @ y == b
    assert (x is None) == (y is None)
    if x is None and A.cols:
        assert not box_solve(A.tolist(), list(b), 3)


# Kernels, images, lattices ---------------------------------------------------------

def test_kernel_of_identity_is_empty():
    assert kernel_basis(IntegerMatrix.identity(3)).shape == (3, 0)


def test_kernel_of_sum_map():
    K = kernel_basis(IntegerMatrix([[1, 1]]))
    assert K.cols == 1 and set(K.column(0)) == {1, -1}


def test_kernel_of_regular_norm_matrix():
    K = kernel_basis(IntegerMatrix([[1, 1], [1, 1]]))
    assert K.cols == 1 and abs(K.column(0)[0]) == 1 and K.column(0)[0] == -K.column(0)[1]


def test_kernel_of_zero_rows_is_everything():
    assert kernel_basis(IntegerMatrix.zeros(0, 4)).is_identity()


@given(matrices())
def test_kernel_is_saturated_and_complete(A):
    K = kernel_basis(A)
    assert (A @ K).is_zero()
    assert K.cols == A.cols - smith_normal_form(A).rank
    assert is_saturated(K)


@given(matrices(), matrices())
def test_lattice_intersection(A, B):
    if A.rows != B.rows:
        return
    I = lattice_intersection(A, B)
    assert lattice_contains(A, I) and lattice_contains(B, I)
    assert lattice_equal(image_basis(A), A)


def test_left_inverse_and_unimodular_inverse():
    B = IntegerMatrix([[1, 0], [2, 1], [3, 5]])
    assert (left_inverse(B) @ B).is_identity()
    U = IntegerMatrix([[2, 1], [1, 1]])
    assert (unimodular_inverse(U) @ U).is_identity()
    with pytest.raises(ValueError):
        unimodular_inverse(IntegerMatrix([[2, 0], [0, 1]]))


# Lattice reduction -----------------------------------------------------------

@given(st.integers(0, 10 ** 6))
def test_lll_is_unimodular_and_lovasz(seed):
    from fractions import Fraction

    rng = random.Random(seed)
    n = rng.randint(1, 5)
    while True:
        B = IntegerMatrix([[rng.randint(-40, 40) for _ in range(n)] for _ in range(n)])
        if B.det():
            break
    G = B.T @ B
    U, Ui = lll_reduce(G)
    assert (U @ Ui).is_identity()
    R = B @ U
    vecs = [[Fraction(x) for x in c] for c in R.columns()]
    gs = []
    for v in vecs:
        w = v[:]
        for b in gs:
            mu = sum(a * c for a, c in zip(v, b)) / sum(c * c for c in b)
            w = [a - mu * c for a, c in zip(w, b)]
        gs.append(w)
    for i in range(1, n):
        ni = sum(c * c for c in gs[i])
        n0 = sum(c * c for c in gs[i - 1])
        mu = sum(a * c for a, c in zip(vecs[i], gs[i - 1])) / n0
        assert ni >= (Fraction(3, 4) - mu * mu) * n0


# Mod p echelon ---------------------------------------------------------------------

def test_rank_mod_p():
    A = IntegerMatrix([[1, 2], [2, 4]])
    assert rank_mod_p(A, 2) == 1 and rank_mod_p(A, 3) == 1
    assert rank_mod_p(IntegerMatrix([[2, 0], [0, 3]]), 2) == 1
    E = FpEchelon(3, 2)
    assert E.add([1, 1]) and not E.add([2, 2]) and E.add([0, 1]) and E.rank == 2


# Homology of presented groups ------------------------------------------------------

def _hom(src, tgt, M):
    return GroupHom(src, tgt, M)


def test_homology_zero_maps_on_z():
    Z = free_group(1)
    zero = IntegerMatrix.zeros(1, 1)
    assert homology(_hom(Z, Z, zero), _hom(Z, Z, zero)).invariant_factors == (0,)


def test_homology_of_doubling():
    Z = free_group(1)
    H = homology(_hom(Z, Z, IntegerMatrix([[2]])), _hom(Z, Z, IntegerMatrix.zeros(1, 1)))
    assert H.invariant_factors == (2,)


def test_homology_rejects_nonzero_composite():
    Z = free_group(1)
    one = IntegerMatrix([[1]])
    with pytest.raises(ValueError):
        homology(_hom(Z, Z, one), _hom(Z, Z, one))


@given(matrices(3, 3))
def test_homology_of_f_then_zero_is_cokernel(A):
    src, tgt = free_group(A.cols), free_group(A.rows)
    H = homology(_hom(src, tgt, A), _hom(tgt, free_group(0), IntegerMatrix.zeros(0, A.rows)))
    assert H.invariant_factors == PresentedAbelianGroup(A.rows, A).invariant_factors
