from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from oracles import h1_order
from permres.cohomology import (
    cohomology,
    cohomology_bar,
    cohomology_cyclic,
    cohomology_resolution,
    connecting_map,
    is_coflasque,
    is_projective,
    is_projective_cyclic,
)
from permres.fixtures import (
    augmentation_fixture,
    klein_cube_module,
    klein_four,
    klein_twisted_z8,
    rotation_lattice,
    sign_z4,
)
from permres.groups import alternating4, cyclic, direct_product, symmetric
from permres.linalg import IntegerMatrix
from permres.modules import (
    Lattice,
    ModuleMap,
    augmentation_ideal,
    finite_module_from_generators,
    kernel_module,
    lattice_from_generators,
    linearize,
    trivial_lattice,
)
from permres.samples import disguise, random_finite_module, random_permutation_module

Z2 = cyclic(2)


def test_regular_module_is_acyclic():
    from permres.modules import regular_module

    for n in (2, 4, 8, 9):
        R = regular_module(cyclic(n)).lattice
        for d in (1, 2, 3):
            assert cohomology(R, d).is_zero()


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8])
def test_augmentation_ideal_h1_is_group_order(n):
    assert cohomology(augmentation_ideal(cyclic(n)), 1).invariant_factors == (n,)


def test_rotation_lattice_h1():
    c = cohomology(rotation_lattice(), 1)
    assert c.invariant_factors == (2,)
    assert str(c) == "H^1 = Z/2"


def test_trivial_group_has_no_higher_cohomology():
    M = trivial_lattice(cyclic(1), 3)
    assert cohomology(M, 0).invariant_factors == (0, 0, 0)
    for d in (1, 2, 3):
        assert cohomology(M, d).is_zero()


def test_klein_cube_h1_by_two_routes():
    M = klein_cube_module()
    assert cohomology(M, 1).invariant_factors == (4,)
    assert cohomology_resolution(M, 1).invariant_factors == (4,)
    assert h1_order(M.group, M) == 4


def test_klein_twisted_z8_h1():
    M = klein_twisted_z8()
    assert cohomology(M, 1).invariant_factors == (2,)
    assert h1_order(M.group, M) == 2


def test_sign_z4_h1():
    M = sign_z4()
    c = cohomology(M, 1)
    assert c.invariant_factors == (2,)
    assert h1_order(M.group, M) == 2


def test_h2_of_trivial_z_is_abelianization():
    for G in (cyclic(4), klein_four(), symmetric(3), alternating4()):
        assert cohomology(trivial_lattice(G), 2).invariant_factors == G.abelianization_invariants()
        assert cohomology(trivial_lattice(G), 1).is_zero()


def test_bar_complex_degree_two_of_z4():
    assert cohomology_bar(trivial_lattice(cyclic(4)), 2).invariant_factors == (4,)


@given(st.integers(0, 10 ** 6))
def test_h1_matches_crossed_homomorphism_count(seed):
    rng = random.Random(seed)
    G = cyclic(rng.choice([2, 3, 4, 6]))
    M = random_finite_module(rng, G, 16)
    assert cohomology(M, 1).group.order() == h1_order(G, M)


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_routes_agree_on_finite_modules(seed, d):
    rng = random.Random(seed)
    G = cyclic(rng.choice([2, 3, 4]))
    M = random_finite_module(rng, G, 16)
    a = cohomology_cyclic(M, 1, d).invariant_factors
    assert cohomology_resolution(M, d).invariant_factors == a
    if d <= 2:
        assert cohomology_bar(M, d).invariant_factors == a


@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_routes_agree_on_lattices(seed, d):
    rng = random.Random(seed)
    G = rng.choice([klein_four(), symmetric(3), cyclic(4)])
    P = random_permutation_module(rng, G, 6)
    L, _ = disguise(rng, P.lattice)
    assert cohomology_bar(L, d).invariant_factors == cohomology_resolution(L, d).invariant_factors


@given(st.integers(0, 10 ** 6))
def test_isomorphic_lattices_have_equal_cohomology(seed):
    rng = random.Random(seed)
    L = augmentation_ideal(cyclic(rng.choice([3, 4, 6])))
    L2, _ = disguise(rng, L)
    for d in (1, 2):
        assert cohomology(L2, d).invariant_factors == cohomology(L, d).invariant_factors


def test_subgroup_selector_restricts():
    M = rotation_lattice()
    H = M.group.all_subgroups[1]
    # the order-2 subgroup acts by -1: ker s is everything and (1-σ)M = 2M
    assert cohomology(M, 1, subgroup=H).invariant_factors == (2, 2)
    assert cohomology(M, 1, subgroup=M.group.full).invariant_factors == (2,)


def test_coflasque_examples():
    from permres.modules import permutation_module

    G = cyclic(4)
    P = permutation_module(G, list(G.all_subgroups))
    assert is_coflasque(P.lattice)
    assert is_coflasque(trivial_lattice(klein_four()))
    rep = is_coflasque(rotation_lattice())
    assert not rep
    assert [(H.order, c.invariant_factors) for H, c in rep.failures] == [(2, (2, 2)), (4, (2,))]


def test_projective_examples():
    from permres.modules import regular_module

    assert is_projective_cyclic(regular_module(Z2).lattice)
    rep = is_projective_cyclic(trivial_lattice(Z2))
    assert not rep and rep.failures[0][1].invariant_factors == (2,)
    L = lattice_from_generators(Z2, 2, {1: IntegerMatrix([[1, 1], [0, -1]])})
    assert is_projective_cyclic(L)
    assert is_projective(regular_module(klein_four()).lattice)
    assert not is_projective(trivial_lattice(klein_four()))


def test_connecting_map_split_sequence_is_zero():
    G = Z2
    A, C = trivial_lattice(G), finite_module_from_generators(G, IntegerMatrix([[2]]), {1: IntegerMatrix([[1]])})
    from permres.modules import direct_sum

    B = direct_sum(A, C)
    i = ModuleMap(A, B, IntegerMatrix([[1], [0]]))
    p = ModuleMap(B, C, IntegerMatrix([[0, 1]]))
    assert connecting_map(i, p).image_is_zero()


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_bockstein_is_an_isomorphism(n):
    G = cyclic(n)
    Z = trivial_lattice(G)
    Zn = finite_module_from_generators(G, IntegerMatrix([[n]]), {1: IntegerMatrix([[1]])})
    i = ModuleMap(Z, Z, IntegerMatrix([[n]]))
    p = ModuleMap(Z, Zn, IntegerMatrix([[1]]))
    dm = connecting_map(i, p)
    assert dm.source.invariant_factors == (n,) and dm.target.invariant_factors == (n,)
    assert dm.image_order() == n


def test_connecting_map_rejects_inexact_input():
    G = Z2
    Z = trivial_lattice(G)
    Z4 = finite_module_from_generators(G, IntegerMatrix([[4]]), {1: IntegerMatrix([[1]])})
    with pytest.raises(Exception):
        connecting_map(ModuleMap(Z, Z, IntegerMatrix([[2]])), ModuleMap(Z, Z4, IntegerMatrix([[1]])))


def test_twisted_z8_connecting_map_hits_twice_h2():
    M = klein_twisted_z8()
    _, pi = linearize(M)
    N, inc = kernel_module(pi)
    dm = connecting_map(inc, pi)
    assert dm.source.invariant_factors == (2,)
    assert dm.image_equals_multiple(2)
    assert not dm.image_is_zero()
    assert any(f % 2 or f > 2 for f in dm.target.invariant_factors if f not in (1, 2))
