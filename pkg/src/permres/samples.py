"""Seeded random modules for tests, benchmarks and the acceptance corpus."""

from __future__ import annotations

import random
from typing import Optional

from .groups import FiniteGroup, Subgroup
from .linalg import IntegerMatrix
from .modules import (
    FiniteModule,
    Lattice,
    PermutationStructure,
    finite_module_from_generators,
    kernel_module,
    linearize,
    permutation_module,
)


def _random_unimodular(rng: random.Random, r: int, steps: int = 6) -> tuple[IntegerMatrix, IntegerMatrix]:
    """A product of elementary matrices and its inverse."""
    P = [[int(i == j) for j in range(r)] for i in range(r)]
    Pi = [row[:] for row in P]
    for _ in range(steps if r > 1 else 0):
        i, j = rng.sample(range(r), 2)
        c = rng.choice([-1, 1])
        # P <- P (I + c E_ij); Pi <- (I - c E_ij) Pi
        for row in P:
            row[j] += c * row[i]
        Pi[i] = [a - c * b for a, b in zip(Pi[i], Pi[j])]
    return IntegerMatrix(P), IntegerMatrix(Pi)


def _cycle_block(n: int, sign: int) -> list[list[int]]:
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[(i + 1) % n][i] = sign if i == n - 1 else 1
    return rows


def random_cyclic_action(rng: random.Random, order: int, rank: int, modulus: int = 0) -> IntegerMatrix:
    """A matrix with A^order = I, conjugated by a random unimodular matrix.

    Built from cyclic permutation blocks of lengths dividing ``order``, with
    an occasional sign twist when ``order`` is even.
    """
    divisors = [d for d in range(1, order + 1) if order % d == 0]
    blocks = []
    left = rank
    while left:
        d = rng.choice([x for x in divisors if x <= left])
        sign = -1 if (order % (2 * d) == 0 and rng.random() < 0.4) else 1
        blocks.append(IntegerMatrix(_cycle_block(d, sign)))
        left -= d
    D = IntegerMatrix.block_diagonal(*blocks)
    P, Pi = _random_unimodular(rng, rank)
    A = P @ D @ Pi
    if modulus:
        A = IntegerMatrix([[x % modulus for x in row] for row in A.tolist()])
    return A


def random_finite_module(rng: random.Random, G: FiniteGroup, max_size: int = 64,
                         moduli: Optional[list[int]] = None) -> FiniteModule:
    """A finite module ⊕ (Z/q_b)^{r_b} over a cyclic group with |M| <= max_size."""
    if not G.is_cyclic():
        raise ValueError("random_finite_module draws actions for cyclic groups only")
    sigma = G.cyclic_generator()
    moduli = moduli or [2, 3, 4, 5, 8, 9]
    blocks = []
    size = 1
    while True:
        options = [(q, r) for q in moduli for r in range(1, 7) if size * q ** r <= max_size]
        if not options or (blocks and rng.random() < 0.4):
            break
        q, r = rng.choice(options)
        blocks.append((q, r, random_cyclic_action(rng, G.order, r, q)))
        size *= q ** r
    if not blocks:
        blocks.append((2, 1, IntegerMatrix([[1]])))
    rel = IntegerMatrix.diagonal([q for q, r, _ in blocks for _ in range(r)])
    A = IntegerMatrix.block_diagonal(*[a for _, _, a in blocks])
    return finite_module_from_generators(G, rel, {sigma: A})


def relation_lattice(M: FiniteModule) -> Lattice:
    """Kernel of the evaluation Z[M] → M, which is always coflasque."""
    _, pi = linearize(M, bound=max(256, M.size))
    return kernel_module(pi)[0]


def random_permutation_module(rng: random.Random, G: FiniteGroup, max_rank: int = 12) -> PermutationStructure:
    subs = [H for H in G.all_subgroups if G.order // H.order <= max_rank]
    chosen: list[Subgroup] = []
    rank = 0
    while True:
        opts = [H for H in subs if rank + G.order // H.order <= max_rank]
        if not opts or (chosen and rng.random() < 0.3):
            break
        H = rng.choice(opts)
        chosen.append(H)
        rank += G.order // H.order
    return permutation_module(G, chosen)


def disguise(rng: random.Random, L: Lattice) -> tuple[Lattice, IntegerMatrix]:
    """Conjugate a lattice by a random change of basis; returns (L', P) with L' = P⁻¹ L P."""
    P, Pi = _random_unimodular(rng, L.rank, steps=3 * L.rank)
    return Lattice(L.group, [Pi @ A @ P for A in L.action], check=False), P
