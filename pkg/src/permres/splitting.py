"""Equivariant sections of surjections onto permutation modules."""

from __future__ import annotations

from .linalg import IntegerMatrix, LatticeSolver
from .modules import (
    ModuleError,
    ModuleMap,
    PermutationStructure,
    equivariant_from_orbit_images,
    fixed_basis,
)


class SplittingError(ModuleError):
    pass


def split_onto_permutation(pi: ModuleMap, target: PermutationStructure) -> ModuleMap:
    """Section ``s`` of ``pi : M2 → M3`` with ``M3`` a permutation lattice.

    Each orbit representative ``e`` with stabilizer H is lifted to an
    H-fixed vector of M2; the lift is then spread over the orbit.  The lift
    exists exactly when ``pi`` is onto on H-fixed points.
    """
    src = pi.source
    if target.lattice.rank != pi.target.rank:
        raise SplittingError("permutation structure does not describe the target")
    images = []
    solvers: dict = {}
    for b, r in enumerate(target.reps):
        H = target.stabilizers[b]
        B = fixed_basis(src, H)
        if H.elements not in solvers:
            solvers[H.elements] = LatticeSolver(
                IntegerMatrix.hstack(pi.matrix @ B, pi.target.relations, rows=pi.target.rank))
        e = [0] * target.rank
        e[r] = 1
        sol = solvers[H.elements].solve(e)
        if sol is None:
            raise SplittingError(
                f"orbit {b} (representative {r}, stabilizer of order {H.order}) has no fixed lift")
        images.append(B @ sol[:B.cols])
    S = equivariant_from_orbit_images(target, src, images)
    s = ModuleMap(target.lattice, src, S, check=False)
    if not pi.target.equal_mod(pi.matrix @ S, IntegerMatrix.identity(target.rank)):
        raise AssertionError("constructed section does not split the map")
    return s
