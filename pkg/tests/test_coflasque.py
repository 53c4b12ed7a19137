from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from permres.coflasque import (
    CyclicPGroup,
    EngineError,
    decompose,
    find_free_submodule,
    fixed_quotient_module,
    is_in_Ck,
    level,
    projective_complement,
    promote,
)
from permres.cohomology import is_coflasque, is_projective_cyclic
from permres.fixtures import rotation_lattice
from permres.groups import cyclic
from permres.linalg import IntegerMatrix
from permres.modules import Lattice, lattice_from_generators, regular_module, trivial_lattice
from permres.samples import disguise, random_finite_module, relation_lattice

Z2 = cyclic(2)
SHEAR = IntegerMatrix([[1, 1], [0, -1]])


def shear_lattice() -> Lattice:
    return lattice_from_generators(Z2, 2, {1: SHEAR})


def corpus(seed: int, orders=(2, 4, 8, 9), max_rank: int = 10) -> Lattice:
    rng = random.Random(seed)
    while True:
        G = cyclic(rng.choice(orders))
        M = random_finite_module(rng, G, max_rank)
        N = relation_lattice(M)
        if N.rank <= max_rank:
            return disguise(rng, N)[0]


def test_cyclic_p_group_data():
    d = CyclicPGroup.of(cyclic(8))
    assert (d.p, d.K) == (2, 3)
    assert [d.level_subgroup(k).order for k in range(4)] == [8, 4, 2, 1]
    with pytest.raises(EngineError):
        CyclicPGroup.of(cyclic(6))


def test_level_membership_examples():
    assert is_in_Ck(shear_lattice(), 0)
    assert is_in_Ck(regular_module(Z2).lattice, 1, verify=True)
    rep = is_in_Ck(trivial_lattice(Z2), 1, verify=True)
    assert not rep and set(rep.conditions.values()) == {False}


def test_non_coflasque_input_is_refused():
    with pytest.raises(EngineError, match="not coflasque"):
        is_in_Ck(rotation_lattice(), 1)
    with pytest.raises(EngineError, match="not coflasque"):
        decompose(rotation_lattice())


def test_level_certificate_replays():
    cert = is_in_Ck(regular_module(cyclic(4)).lattice, 2, verify=True)
    assert cert and cert.verify()
    cert.witnesses[0] = tuple(x + 1 for x in cert.witnesses[0])
    assert not cert.verify()


def test_free_submodule_of_everything_is_zero():
    assert find_free_submodule(1, 2, 2, 1, IntegerMatrix.identity(2)).selected == ()


def test_free_submodule_of_scaled_regular_is_everything():
    ff = find_free_submodule(1, 2, 2, 1, IntegerMatrix.identity(2) * 2)
    assert ff.selected == (0,)
    assert ff.basis.is_identity()


def test_free_submodule_mixed_blocks():
    N = IntegerMatrix.block_diagonal(IntegerMatrix.identity(2) * 2, IntegerMatrix.identity(2))
    assert find_free_submodule(2, 2, 2, 1, N).selected == (0,)


def test_promote_regular_module():
    # the norm image is all of the fixed lattice, so F ∩ N = pF forces F = 0
    R = regular_module(Z2).lattice
    assert is_in_Ck(R, 1)
    st = promote(R, 0)
    assert st.P.rank == 0 and st.F_rank == 0 and st.next_module.rank == 2
    assert is_in_Ck(st.next_module, 1)


def test_promote_shear_lattice():
    st = promote(shear_lattice(), 0)
    assert st.P.rank == 0
    assert st.next_module.rank == 0 or is_projective_cyclic(st.next_module)
    assert is_in_Ck(st.next_module, 1)


def test_promote_zero_module():
    Z = Lattice(Z2, [IntegerMatrix.identity(0)] * 2)
    st = promote(Z, 0)
    assert st.P.rank == 0 and st.F_rank == 0 and st.next_module.rank == 0


def test_projective_complements():
    for P in (regular_module(cyclic(4), 2).lattice, Lattice(cyclic(4), [IntegerMatrix.identity(0)] * 4)):
        c = projective_complement(P)
        c.verify()
        assert c.Q.rank == 0


def test_projective_complement_of_idempotent_image():
    # e = [[1, 1 + σ], [0, 0]] is idempotent on Z[Z/4]^2, image P = e·Z[Z/4]^2
    G = cyclic(4)
    R2 = regular_module(G, 2).lattice
    s = R2.action[1]
    X = IntegerMatrix.identity(4) + regular_module(G).lattice.action[1]
    e = IntegerMatrix.vstack(IntegerMatrix.hstack(IntegerMatrix.identity(4), X), IntegerMatrix.zeros(4, 8), cols=8)
    assert e @ e == e and all(e @ A == A @ e for A in R2.action)
    from permres.modules import sublattice_module
    from permres.linalg import image_basis

    P, _ = sublattice_module(R2, image_basis(e))
    assert is_projective_cyclic(P)
    c = projective_complement(P)
    c.verify()
    assert P.rank + c.Q.rank == 4 * c.free_rank
    del s


def test_decompose_trivial_lattice():
    cert = decompose(trivial_lattice(Z2))
    cert.verify()
    assert cert.rhs.rank == 1 + sum(P.rank for P in cert.projectives)


def test_decompose_shear_is_regular():
    cert = decompose(shear_lattice())
    cert.verify()
    assert cert.rhs.rank == 2 and [H.order for H in cert.rhs.stabilizers] == [1]


def test_decompose_trivial_group_and_zero():
    cert = decompose(trivial_lattice(cyclic(1), 3))
    cert.verify()
    Z = Lattice(cyclic(4), [IntegerMatrix.identity(0)] * 4)
    decompose(Z).verify()


@given(st.integers(0, 10 ** 6))
def test_levels_agree_on_relation_lattices(seed):
    N = corpus(seed)
    d = CyclicPGroup.of(N.group)
    assert is_coflasque(N)
    seen = [bool(is_in_Ck(N, k, verify=True, check_coflasque=False, data=d)) for k in range(d.K + 1)]
    assert seen == sorted(seen, reverse=True)          # membership is monotone
    assert level(N) == sum(seen) - 1


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_decompose_verifies_on_relation_lattices(seed):
    N = corpus(seed, orders=(2, 4, 3, 8, 9), max_rank=8)
    cert = decompose(N)
    cert.verify()


def test_tampered_decomposition_fails_verification():
    N = corpus(3, orders=(4,))
    cert = decompose(N)
    rows = cert.Phi.tolist()
    rows[0][0] += 1
    cert.Phi = IntegerMatrix(rows)
    with pytest.raises(EngineError):
        cert.verify()


def test_random_rank_six_over_z4():
    rng = random.Random(6)
    for _ in range(50):
        N = relation_lattice(random_finite_module(rng, cyclic(4), 8))
        if N.rank == 6 or N.rank == 8:
            break
    decompose(disguise(rng, N)[0]).verify()
