from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import h1_order
from permres.fixtures import klein_cube_module, klein_four, klein_twisted_z8, sign_z4, trivial_z2
from permres.groups import cyclic, direct_product, symmetric
from permres.linalg import IntegerMatrix, smith_normal_form
from permres.modules import (
    Lattice,
    ModuleMap,
    PermutationStructure,
    direct_sum,
    finite_module_from_generators,
    kernel_module,
    linearize,
    permutation_module,
    regular_module,
    trivial_lattice,
)
from permres.presentation import (
    PresentationRefused,
    UndecidedError,
    VerificationError,
    direct_sum_summands,
    emit_invariant_matrix,
    has_presentation_criterion,
    obstruction,
    permutation_cover,
    permutation_resolution,
    permutation_summand,
    pullback,
    split_via_sylow,
    verify_presentation,
)
from permres.samples import random_finite_module, relation_lattice
from permres.splitting import SplittingError, split_onto_permutation

Z2 = cyclic(2)


def coker_factors(A: IntegerMatrix) -> tuple[int, ...]:
    return tuple(d for d in smith_normal_form(A).invariant_factors if d != 1)


# criterion and obstruction ---------------------------------------------------

def test_presentation_criterion():
    assert all(has_presentation_criterion(cyclic(n)) for n in (1, 2, 6, 12, 16))
    assert not has_presentation_criterion(klein_four())
    assert has_presentation_criterion(symmetric(3))
    assert not has_presentation_criterion(direct_product(Z2, cyclic(4)))


def test_obstruction_klein_cube():
    rep = obstruction(klein_cube_module())
    assert rep.invariant_factors == (4,) and rep.exponent == 2
    assert not rep.annihilated and "no permutation presentation" in rep.verdict


def test_obstruction_twisted_z8_is_inconclusive():
    rep = obstruction(klein_twisted_z8())
    assert rep.invariant_factors == (2,) and rep.exponent == 2
    assert rep.annihilated and rep.verdict == "inconclusive"


def test_obstruction_over_trivial_group():
    M = finite_module_from_generators(cyclic(1), IntegerMatrix([[6]]), {})
    rep = obstruction(M)
    assert rep.annihilated and rep.verdict == "inconclusive"


# splitting -------------------------------------------------------------------

def test_split_of_a_split_surjection():
    G = cyclic(4)
    A = trivial_lattice(G)
    P = permutation_module(G, [G.all_subgroups[1]])
    B = direct_sum(A, P.lattice)
    pi = ModuleMap(B, P.lattice, IntegerMatrix.hstack(IntegerMatrix.zeros(2, 1), IntegerMatrix.identity(2)))
    s = split_onto_permutation(pi, P)
    assert s.matrix == IntegerMatrix.vstack(IntegerMatrix.zeros(1, 2), IntegerMatrix.identity(2))
    s.validate()


def test_split_refuses_augmentation():
    R = regular_module(Z2).lattice
    T = permutation_module(Z2, [Z2.full])
    with pytest.raises(SplittingError, match="stabilizer of order 2"):
        split_onto_permutation(ModuleMap(R, T.lattice, IntegerMatrix([[1, 1]])), T)


def test_split_via_sylow_on_z6():
    G = cyclic(6)
    S2, S3 = G.sylow_subgroup(2), G.sylow_subgroup(3)
    C = permutation_module(G, [S2, S3])
    N = trivial_lattice(G)
    pi = ModuleMap(C.lattice, N, IntegerMatrix([[1] * C.rank]))
    e = lambda i: IntegerMatrix.from_columns([[int(j == i) for j in range(C.rank)]], C.rank)
    s = split_via_sylow(pi, {2: (S2, e(0)), 3: (S3, e(3))})
    assert (pi.matrix @ s).is_identity()
    ModuleMap(N, C.lattice, s).validate()
    # averaging multiplies by the indices 3 and 2, and (1, -1) solves 3a + 2b = 1
    assert sorted(s.column(0)) == [-1, -1, 1, 1, 1]


def test_split_via_sylow_trivial_module():
    G = cyclic(6)
    C = permutation_module(G, [G.full])
    Z = Lattice(G, [IntegerMatrix.identity(0)] * 6)
    pi = ModuleMap(C.lattice, Z, IntegerMatrix.zeros(0, 1))
    S2, S3 = G.sylow_subgroup(2), G.sylow_subgroup(3)
    s = split_via_sylow(pi, {2: (S2, IntegerMatrix.zeros(1, 0)), 3: (S3, IntegerMatrix.zeros(1, 0))})
    assert s.shape == (1, 0)


# permutation summands ----------------------------------------------------------

@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_relation_lattices_are_permutation_summands(seed):
    rng = random.Random(seed)
    G = cyclic(rng.choice([2, 3, 4, 6, 8, 12]))
    N = relation_lattice(random_finite_module(rng, G, 12))
    C, phi = permutation_cover(N)
    sm = permutation_summand(N)
    sm.verify()
    to_c, from_c = sm.isomorphism()
    assert (to_c @ from_c).is_identity() and (from_c @ to_c).is_identity()


def test_summand_refuses_non_coflasque():
    from permres.fixtures import rotation_lattice

    with pytest.raises(PresentationRefused, match="not coflasque"):
        permutation_summand(rotation_lattice())


def test_summand_undecided_over_klein():
    with pytest.raises(UndecidedError, match="Sylow"):
        permutation_summand(trivial_lattice(klein_four()))


def test_direct_sum_of_summands():
    a = permutation_summand(relation_lattice(trivial_z2()))
    b = permutation_summand(relation_lattice(sign_z4()))
    c = direct_sum_summands(a, b)
    assert c.lattice.rank == a.lattice.rank + b.lattice.rank


# pullback ------------------------------------------------------------------------

def test_pullback_over_trivial_group():
    G = cyclic(1)
    Z = trivial_lattice(G)
    Z2m = finite_module_from_generators(G, IntegerMatrix([[2]]), {})
    f = ModuleMap(Z, Z2m, IntegerMatrix([[1]]))
    N, pF, pP = pullback(f, f)
    assert N.rank == 2
    assert smith_normal_form(IntegerMatrix.vstack(pF.matrix, pP.matrix)).invariant_factors == (1, 2)


def test_pullback_contains_diagonal():
    M = sign_z4()
    _, pi = linearize(M)
    N, pF, pP = pullback(pi, pi)
    assert N.rank == 2 * pi.source.rank
    from permres.linalg import lattice_contains

    full = IntegerMatrix.vstack(pF.matrix, pP.matrix)
    diag = IntegerMatrix.vstack(IntegerMatrix.identity(pi.source.rank), IntegerMatrix.identity(pi.source.rank))
    assert lattice_contains(full, diag)
    assert smith_normal_form(pF.matrix).invariant_factors == (1,) * pi.source.rank


def test_pullback_twisted_z8():
    _, pi = linearize(klein_twisted_z8())
    N, pF, pP = pullback(pi, pi)
    assert N.rank == 16
    N.validate()


# full certificates -------------------------------------------------------------

def test_zero_module_certificate():
    M = finite_module_from_generators(Z2, IntegerMatrix([[1]]), {1: IntegerMatrix([[1]])})
    cert = permutation_resolution(M)
    assert cert.P0.rank == 1 and cert.P1.rank == 1
    A, _ = emit_invariant_matrix(cert)
    assert abs(A.det()) == 1


def test_trivial_z2_certificate():
    cert = permutation_resolution(trivial_z2())
    assert cert.P0.rank == 2 and cert.P1.rank == 2
    A, X = emit_invariant_matrix(cert)
    assert coker_factors(A) == (2,)
    assert all(A @ X.lattice.action[g] == X.lattice.action[g] @ A for g in Z2.elements)


def test_sign_z4_certificate():
    M = sign_z4()
    cert = permutation_resolution(M)
    assert cert.obstruction.annihilated and h1_order(Z2, M) == 2
    if cert.stabilization is not None:
        assert coker_factors(cert.matrix) == (4,)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 6])
def test_trivial_group_cyclic_modules(n):
    G = cyclic(1)
    M = finite_module_from_generators(G, IntegerMatrix([[n]]), {})
    cert = permutation_resolution(M)
    A, _ = emit_invariant_matrix(cert)
    assert coker_factors(A) == ((n,) if n > 1 else ())


def test_klein_inputs_are_refused():
    for M in (klein_cube_module(), klein_twisted_z8()):
        with pytest.raises(PresentationRefused, match="Sylow"):
            permutation_resolution(M)


def test_tampered_certificate_is_rejected():
    cert = permutation_resolution(trivial_z2())
    rows = cert.iota.tolist()
    rows[0][0] += 1
    cert.iota = IntegerMatrix(rows)
    with pytest.raises(VerificationError):
        verify_presentation(cert)


def test_tampered_matrix_is_rejected():
    cert = permutation_resolution(sign_z4())
    assert cert.stabilization is not None
    rows = cert.stabilization.T.tolist()
    rows[0][0] += 1
    cert.stabilization.T = IntegerMatrix(rows)
    with pytest.raises(VerificationError):
        verify_presentation(cert)


def test_bound_zero_skips_matrix_for_nontrivial_module():
    cert = permutation_resolution(sign_z4(), stabilize_bound=None)
    assert cert.stabilization is None and cert.matrix is None


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_random_certificates_verify(seed):
    rng = random.Random(seed)
    G = cyclic(rng.choice([2, 3, 4, 6, 8]))
    M = random_finite_module(rng, G, 16)
    cert = permutation_resolution(M, time_budget=2.0)
    verify_presentation(cert)
    assert all(G.exponent % d == 0 for d in cert.obstruction.invariant_factors)
    if cert.stabilization is not None:
        assert coker_factors(cert.matrix) == M.abelian_group.torsion_factors
