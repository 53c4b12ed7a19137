"""Modules over the integral group ring of a finite group.

A module is presented as ``Z^rank / colspan(relations)`` together with one
action matrix per group element.  Lattices have no relations; finite modules
have a finite quotient.  Equalities of ambient vectors are always taken
modulo the relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Optional, Sequence

from .groups import FiniteGroup, Subgroup
from .linalg import (
    IntegerMatrix,
    LatticeSolver,
    PresentedAbelianGroup,
    image_basis,
    kernel_basis,
    lattice_contains,
    lll_reduce,
    smith_normal_form,
)

DEFAULT_LINEARIZE_BOUND = 256


class ModuleError(ValueError):
    pass


def _reduce_mod(M: IntegerMatrix, e: int) -> IntegerMatrix:
    if not e:
        return M
    return IntegerMatrix._raw([[x % e for x in r] for r in M._data], M.rows, M.cols)


class PresentedModule:
    """``Z^rank / colspan(relations)`` with a left action of ``group``."""

    def __init__(self, group: FiniteGroup, action: Sequence[IntegerMatrix],
                 relations: Optional[IntegerMatrix] = None, check: bool = True):
        if len(action) != group.order:
            raise ModuleError(f"need {group.order} action matrices, got {len(action)}")
        rank = action[0].rows if action else 0
        if relations is None:
            relations = IntegerMatrix.zeros(rank, 0)
        self.group = group
        self.rank = rank
        self.action = tuple(action)
        self.relations = relations
        self._cache: dict = {}
        if check:
            self.validate()

    # construction -------------------------------------------------------
    @classmethod
    def from_generators(cls, group: FiniteGroup, rank: int,
                        generator_action: Mapping[int, IntegerMatrix],
                        relations: Optional[IntegerMatrix] = None, **kw) -> "PresentedModule":
        """Extend generator matrices to the whole group, checking consistency.

        Every element is reached as a word ``x * s``; when two words reach
        the same element their matrices must agree, which is exactly the
        requirement that the action respects the group law.
        """
        if relations is None:
            relations = IntegerMatrix.zeros(rank, 0)
        gens = sorted(generator_action)
        cover = group.generated_by(gens)
        if cover.order != group.order:
            raise ModuleError("the listed generators do not generate the group")
        expo = _quotient_exponent(rank, relations)
        rel_solver = LatticeSolver(relations) if relations.cols else None

        def same(A: IntegerMatrix, B: IntegerMatrix) -> bool:
            D = A - B
            if rel_solver is None:
                return D.is_zero()
            return rel_solver.contains_columns(D)

        mats: dict[int, IntegerMatrix] = {0: IntegerMatrix.identity(rank)}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = group.mul(x, s)
                    if y not in mats:
                        mats[y] = _reduce_mod(mats[x] @ generator_action[s], expo)
                        nxt.append(y)
            frontier = nxt
        # rho(x) rho(s) = rho(xs) for all x and generators s gives the group law
        for x in group.elements:
            for s in gens:
                y = group.mul(x, s)
                if not same(mats[y], mats[x] @ generator_action[s]):
                    raise ModuleError(f"generator matrices violate the group law at element {y}")
        action = [mats[g] for g in group.elements]
        return cls._make(group, action, relations)

    @classmethod
    def _make(cls, group, action, relations):
        if relations.cols == 0:
            return Lattice(group, action, check=False)
        if _quotient_exponent(action[0].rows, relations):
            return FiniteModule(group, action, relations, check=False)
        return PresentedModule(group, action, relations, check=False)

    # validation ---------------------------------------------------------
    def validate(self) -> None:
        G, r = self.group, self.rank
        for g, A in enumerate(self.action):
            if A.shape != (r, r):
                raise ModuleError(f"action matrix of element {g} has shape {A.shape}")
        if self.relations.rows != r:
            raise ModuleError("relations must live in the ambient lattice")
        if not self.equal_mod(self.action[0], IntegerMatrix.identity(r)):
            raise ModuleError("the identity element must act trivially")
        for s in G.generators:
            if self.relations.cols and not lattice_contains(self.relations, self.action[s] @ self.relations):
                raise ModuleError(f"element {s} does not preserve the relations")
            for g in G.elements:
                if not self.equal_mod(self.action[g] @ self.action[s], self.action[G.mul(g, s)]):
                    raise ModuleError(f"action violates the group law at ({g}, {s})")

    def equal_mod(self, A: IntegerMatrix, B: IntegerMatrix) -> bool:
        D = A - B
        if self.relations.cols == 0:
            return D.is_zero()
        return self._relation_solver().contains_columns(D)

    def _relation_solver(self) -> LatticeSolver:
        if "rel" not in self._cache:
            self._cache["rel"] = LatticeSolver(self.relations)
        return self._cache["rel"]

    def contains_relations(self, A: IntegerMatrix) -> bool:
        """True iff every column of ``A`` is zero in the module."""
        if self.relations.cols == 0:
            return A.is_zero()
        return self._relation_solver().contains_columns(A)

    # access -------------------------------------------------------------
    @property
    def is_lattice(self) -> bool:
        return self.relations.cols == 0

    @property
    def abelian_group(self) -> PresentedAbelianGroup:
        if "ab" not in self._cache:
            self._cache["ab"] = PresentedAbelianGroup(self.rank, self.relations)
        return self._cache["ab"]

    def matrix(self, g: int) -> IntegerMatrix:
        return self.action[g]

    def act(self, g: int, v: Sequence[int]):
        return self.action[g] @ v

    def group_ring_matrix(self, coeffs: Mapping[int, int]) -> IntegerMatrix:
        """Matrix of the group-ring element sum c_g g."""
        out = IntegerMatrix.zeros(self.rank, self.rank)
        for g, c in coeffs.items():
            if c:
                out = out + self.action[g] * c
        return out

    def __repr__(self) -> str:
        return f"{type(self).__name__}(group={self.group!r}, rank={self.rank})"


class Lattice(PresentedModule):
    """A module that is free as an abelian group."""

    def __init__(self, group: FiniteGroup, action: Sequence[IntegerMatrix], check: bool = True):
        super().__init__(group, action, None, check=False)
        if check:
            self.validate()

    def validate(self) -> None:
        super().validate()
        for g in self.group.generators:
            if not self.action[g].is_unimodular():
                raise ModuleError(f"action of element {g} is not invertible over Z")


class FiniteModule(PresentedModule):
    """A module whose underlying abelian group is finite."""

    def __init__(self, group: FiniteGroup, action: Sequence[IntegerMatrix],
                 relations: IntegerMatrix, check: bool = True):
        super().__init__(group, action, relations, check=False)
        if check:
            if not _quotient_exponent(self.rank, relations):
                raise ModuleError("relations do not present a finite group")
            self.validate()

    @property
    def size(self) -> int:
        return self.abelian_group.order()


def _quotient_exponent(rank: int, relations: IntegerMatrix) -> int:
    """Exponent of Z^rank / relations, or 0 when it is infinite."""
    if rank == 0:
        return 1
    f = smith_normal_form(relations).invariant_factors
    if len(f) < rank or 0 in f:
        return 0
    return f[-1] if f else 1


def trivial_lattice(G: FiniteGroup, rank: int = 1) -> Lattice:
    I = IntegerMatrix.identity(rank)
    return Lattice(G, [I] * G.order, check=False)


def lattice_from_generators(G: FiniteGroup, rank: int, gens: Mapping[int, IntegerMatrix]) -> Lattice:
    M = PresentedModule.from_generators(G, rank, gens)
    assert isinstance(M, Lattice)
    for g in G.generators:
        if not M.action[g].is_unimodular():
            raise ModuleError(f"action of element {g} is not invertible over Z")
    return M


def finite_module_from_generators(G: FiniteGroup, relations: IntegerMatrix,
                                  gens: Mapping[int, IntegerMatrix]) -> FiniteModule:
    if not _quotient_exponent(relations.rows, relations):
        raise ModuleError("relations do not present a finite group")
    M = PresentedModule.from_generators(G, relations.rows, gens, relations)
    assert isinstance(M, FiniteModule)
    return M


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------

class ModuleMap:
    """Equivariant map given by a matrix on ambient coordinates."""

    def __init__(self, source: PresentedModule, target: PresentedModule,
                 matrix: IntegerMatrix, check: bool = True):
        if matrix.shape != (target.rank, source.rank):
            raise ModuleError(f"map matrix is {matrix.shape}, expected {(target.rank, source.rank)}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            self.validate()

    def validate(self) -> None:
        src, tgt, A = self.source, self.target, self.matrix
        if src.group.order != tgt.group.order:
            raise ModuleError("source and target live over different groups")
        if src.relations.cols and not tgt.contains_relations(A @ src.relations):
            raise ModuleError("map does not send relations to relations")
        for g in src.group.generators:
            if not tgt.equal_mod(A @ src.action[g], tgt.action[g] @ A):
                raise ModuleError(f"map does not commute with the action of element {g}")

    def __call__(self, v: Sequence[int]):
        return self.matrix @ v

    def compose(self, first: "ModuleMap") -> "ModuleMap":
        """``self ∘ first``."""
        return ModuleMap(first.source, self.target, self.matrix @ first.matrix, check=False)

    def is_surjective(self) -> bool:
        span = IntegerMatrix.hstack(self.matrix, self.target.relations)
        return lattice_contains(span, IntegerMatrix.identity(self.target.rank))

    def kernel_basis(self) -> IntegerMatrix:
        """Ambient basis of the preimage of the target relations."""
        return preimage_basis(self.matrix, self.target.relations)

    def is_injective(self) -> bool:
        K = self.kernel_basis()
        if self.source.relations.cols == 0:
            return K.cols == 0
        return lattice_contains(self.source.relations, K)

    def __repr__(self) -> str:
        return f"ModuleMap({self.source.rank} -> {self.target.rank})"


def preimage_basis(F: IntegerMatrix, R: IntegerMatrix) -> IntegerMatrix:
    """Basis of ``{x : F x ∈ colspan(R)}``."""
    if R.cols == 0:
        return kernel_basis(F)
    K = kernel_basis(IntegerMatrix.hstack(F, R))
    if K.cols == 0:
        return IntegerMatrix.zeros(F.cols, 0)
    return image_basis(K.block(0, F.cols, 0, K.cols))


def identity_map(M: PresentedModule) -> ModuleMap:
    return ModuleMap(M, M, IntegerMatrix.identity(M.rank), check=False)


def induced_action(M: PresentedModule, basis: IntegerMatrix,
                   elements: Optional[Sequence[int]] = None) -> list[IntegerMatrix]:
    """Action matrices on the sublattice with the given saturated-or-not basis.

    Requires the sublattice to be stable under the listed elements (default
    all of them) and the module to be a lattice.
    """
    solver = LatticeSolver(basis)
    els = M.group.elements if elements is None else elements
    out = []
    for g in els:
        X = solver.solve_columns(M.action[g] @ basis)
        if X is None:
            raise ModuleError(f"sublattice is not stable under element {g}")
        out.append(X)
    return out


def invariant_gram(M: PresentedModule) -> IntegerMatrix:
    """The Γ-invariant positive definite form Σ_g ρ(g)^T ρ(g)."""
    n = M.rank
    out = IntegerMatrix.zeros(n, n)
    for A in M.action:
        out = out + A.T @ A
    return out


def reduce_lattice(M: Lattice) -> tuple[Lattice, IntegerMatrix, IntegerMatrix]:
    """Change to a basis that is size-reduced for the invariant form.

    Returns (M', B, B⁻¹) with M'.action[g] = B⁻¹ M.action[g] B; the columns of
    B are the new basis vectors in old coordinates.  Keeps entries small
    after quotient and fixed-point constructions.
    """
    if M.rank == 0:
        I = IntegerMatrix.identity(0)
        return M, I, I
    B, Bi = lll_reduce(invariant_gram(M))
    return Lattice(M.group, [Bi @ A @ B for A in M.action], check=False), B, Bi


def sublattice_module(M: Lattice, basis: IntegerMatrix) -> tuple[Lattice, "ModuleMap"]:
    """A stable sublattice as a lattice in its own right, with its inclusion."""
    N = Lattice(M.group, induced_action(M, basis), check=False)
    return N, ModuleMap(N, M, basis, check=False)


# ---------------------------------------------------------------------------
# Permutation modules
# ---------------------------------------------------------------------------

@dataclass
class PermutationStructure:
    """A lattice whose action permutes its standard basis.

    ``perm[g][i]`` is the index of ``g·e_i``.  Orbits are listed in order of
    their least basis index; ``reps[b]`` is that least index and
    ``stabilizers[b]`` its stabilizer.  ``carrier[i]`` is a group element
    taking the representative of the orbit of ``i`` to ``i``.
    """

    lattice: Lattice
    perm: tuple[tuple[int, ...], ...]
    reps: tuple[int, ...]
    stabilizers: tuple[Subgroup, ...]
    orbit_of: tuple[int, ...]
    carrier: tuple[int, ...]
    labels: Optional[list] = field(default=None, repr=False)

    @property
    def group(self) -> FiniteGroup:
        return self.lattice.group

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def orbits(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.reps]
        for i, b in enumerate(self.orbit_of):
            out[b].append(i)
        return out

    def validate(self) -> None:
        G, n = self.group, self.rank
        for g in G.elements:
            A = self.lattice.action[g]
            for i in range(n):
                col = A.column(i)
                j = self.perm[g][i]
                if col[j] != 1 or any(col[k] for k in range(n) if k != j):
                    raise ModuleError(f"action of {g} is not the stated basis permutation at {i}")
        for b, r in enumerate(self.reps):
            stab = tuple(g for g in G.elements if self.perm[g][r] == r)
            if stab != self.stabilizers[b].elements:
                raise ModuleError(f"stabilizer of orbit {b} is misreported")
        for i in range(n):
            b = self.orbit_of[i]
            if self.perm[self.carrier[i]][self.reps[b]] != i:
                raise ModuleError(f"carrier of basis vector {i} is wrong")

    @classmethod
    def detect(cls, L: Lattice, labels: Optional[list] = None) -> "PermutationStructure":
        """Recover the structure from a lattice whose matrices are permutations."""
        G, n = L.group, L.rank
        perm = []
        for g in G.elements:
            A = L.action[g]
            p = [0] * n
            for i in range(n):
                col = A.column(i)
                nz = [k for k in range(n) if col[k]]
                if len(nz) != 1 or col[nz[0]] != 1:
                    raise ModuleError(f"action of element {g} is not a permutation matrix")
                p[i] = nz[0]
            perm.append(tuple(p))
        orbit_of = [-1] * n
        carrier = [0] * n
        reps, stabs = [], []
        for i in range(n):
            if orbit_of[i] >= 0:
                continue
            b = len(reps)
            reps.append(i)
            for g in G.elements:
                j = perm[g][i]
                if orbit_of[j] < 0:
                    orbit_of[j] = b
                    carrier[j] = g
            stabs.append(Subgroup(G, [g for g in G.elements if perm[g][i] == i]))
        return cls(L, tuple(perm), tuple(reps), tuple(stabs), tuple(orbit_of), tuple(carrier), labels)

    def restrict(self, H: Subgroup) -> "PermutationStructure":
        return PermutationStructure.detect(restrict(self.lattice, H), self.labels)


def permutation_module(G: FiniteGroup, stabilizers: Sequence[Subgroup]) -> PermutationStructure:
    """Direct sum of coset modules Z[G/H], one block per listed subgroup.

    Within a block the basis is the list of left cosets ordered by their
    least element.
    """
    perm_blocks = []
    offset = 0
    index: dict[tuple[int, tuple[int, ...]], int] = {}
    for b, H in enumerate(stabilizers):
        cosets = G.left_cosets(H)
        for c in cosets:
            index[(b, c)] = offset
            offset += 1
        perm_blocks.append(cosets)
    n = offset
    perm = []
    for g in G.elements:
        p = [0] * n
        for b, cosets in enumerate(perm_blocks):
            H = stabilizers[b]
            for c in cosets:
                gc = tuple(sorted(G.mul(g, x) for x in c))
                p[index[(b, c)]] = index[(b, gc)]
        perm.append(tuple(p))
    action = [_perm_matrix(p) for p in perm]
    L = Lattice(G, action, check=False)
    return PermutationStructure.detect(L)


def _perm_matrix(p: Sequence[int]) -> IntegerMatrix:
    n = len(p)
    rows = [[0] * n for _ in range(n)]
    for i, j in enumerate(p):
        rows[j][i] = 1
    return IntegerMatrix._raw(rows, n, n)


def regular_module(G: FiniteGroup, copies: int = 1) -> PermutationStructure:
    return permutation_module(G, [G.trivial] * copies)


def equivariant_from_orbit_images(P: PermutationStructure, target: PresentedModule,
                                  images: Sequence[Sequence[int]]) -> IntegerMatrix:
    """Matrix of the map sending each orbit representative to ``images[b]``.

    ``images[b]`` must be fixed by the stabilizer of the orbit (not checked
    here); the rest of the orbit follows by equivariance.
    """
    cols = []
    for i in range(P.rank):
        b = P.orbit_of[i]
        cols.append(target.action[P.carrier[i]] @ tuple(images[b]))
    return IntegerMatrix.from_columns(cols, target.rank)


# ---------------------------------------------------------------------------
# Finite modules: enumeration and linearization
# ---------------------------------------------------------------------------

@dataclass
class FiniteModuleElements:
    """Canonical coordinates for the elements of a finite module."""

    module: FiniteModule
    moduli: tuple[int, ...]
    lifts: IntegerMatrix                 # ambient vectors of the cyclic generators
    coordinate_rows: IntegerMatrix       # ambient vector -> canonical coordinates
    action: list[IntegerMatrix]          # action on canonical coordinates

    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(c) for c in product(*(range(d) for d in self.moduli))]

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        y = self.coordinate_rows @ tuple(x)
        return tuple(a % d for a, d in zip(y, self.moduli))

    def lift(self, c: Sequence[int]) -> tuple[int, ...]:
        return self.lifts @ tuple(c)

    def act(self, g: int, c: Sequence[int]) -> tuple[int, ...]:
        y = self.action[g] @ tuple(c)
        return tuple(a % d for a, d in zip(y, self.moduli))


def enumerate_elements(M: FiniteModule) -> FiniteModuleElements:
    ab = M.abelian_group
    snf = ab.smith
    diag = ab._diagonal()
    keep = [i for i, d in enumerate(diag) if d != 1]
    moduli = tuple(diag[i] for i in keep)
    U, Ui = snf.U, snf.U_inv
    rows = U.select_rows(keep)
    lifts = Ui.select_columns(keep)
    action = [rows @ A @ lifts for A in M.action]
    return FiniteModuleElements(M, moduli, lifts, rows, action)


def linearize(M: FiniteModule, bound: int = DEFAULT_LINEARIZE_BOUND
              ) -> tuple[PermutationStructure, ModuleMap]:
    """The permutation module on the elements of ``M`` and evaluation onto ``M``."""
    size = M.abelian_group.order()
    if size is None:
        raise ModuleError("module is not finite")
    if size > bound:
        raise ModuleError(f"module has {size} elements, above the bound {bound}")
    E = enumerate_elements(M)
    elems = E.elements()
    index = {c: i for i, c in enumerate(elems)}
    perm = [tuple(index[E.act(g, c)] for c in elems) for g in M.group.elements]
    L = Lattice(M.group, [_perm_matrix(p) for p in perm], check=False)
    P = PermutationStructure.detect(L, labels=elems)
    cols = [E.lift(c) for c in elems]
    pi = ModuleMap(L, M, IntegerMatrix.from_columns(cols, M.rank), check=False)
    return P, pi


def kernel_module(pi: ModuleMap) -> tuple[Lattice, ModuleMap]:
    """Kernel of a surjection from a lattice, with its inclusion."""
    if not pi.source.is_lattice:
        raise ModuleError("kernel_module expects a lattice as source")
    if not pi.is_surjective():
        raise ModuleError("map is not surjective")
    B = pi.kernel_basis()
    return sublattice_module(pi.source, B)


def embed_into_free(N: Lattice) -> tuple[PermutationStructure, ModuleMap]:
    """Z[G] ⊗ N with the regular action on the left factor, and n ↦ Σ [γ]⊗γ⁻¹n.

    Basis vector ``i*|G| + γ`` is ``[γ] ⊗ e_i``.
    """
    G, n = N.group, N.rank
    F = regular_module(G, n)
    rows = [[0] * n for _ in range(n * G.order)]
    for g in G.elements:
        A = N.action[G.inv(g)]
        for i in range(n):
            rows[i * G.order + g] = list(A.row(i))
    iota = ModuleMap(N, F.lattice, IntegerMatrix._raw(rows, n * G.order, n), check=False)
    return F, iota


# ---------------------------------------------------------------------------
# Fixed points, sums, quotients, induction, restriction
# ---------------------------------------------------------------------------

def fixed_basis(M: PresentedModule, H: Subgroup) -> IntegerMatrix:
    """Ambient basis of ``{x : hx - x ∈ relations for h ∈ H}``."""
    key = ("fix", H.elements)
    if key in M._cache:
        return M._cache[key]
    gens = list(H.generators)
    r = M.rank
    if not gens:
        B = IntegerMatrix.identity(r)
    else:
        I = IntegerMatrix.identity(r)
        D = IntegerMatrix.vstack(*[M.action[g] - I for g in gens], cols=r)
        if M.relations.cols:
            R = IntegerMatrix.block_diagonal(*[M.relations] * len(gens))
            B = preimage_basis(D, R)
        else:
            B = kernel_basis(D)
    M._cache[key] = B
    return B


def fixed_points(M: PresentedModule, H: Subgroup) -> tuple[PresentedModule, ModuleMap]:
    """The H-fixed submodule with its inclusion.

    When H is normal the fixed points carry the action of the whole group;
    otherwise they are returned as a module over H (with trivial action) and
    the inclusion targets the restriction of ``M`` to H.
    """
    B = fixed_basis(M, H)
    if H.is_normal():
        src, els = M, list(M.group.elements)
        grp = M.group
    else:
        src = restrict(M, H)
        els = list(H.elements)
        grp = src.group
    solver = LatticeSolver(B)
    rel = solver.solve_columns(M.relations) if M.relations.cols else IntegerMatrix.zeros(B.cols, 0)
    if rel is None:
        raise AssertionError("relations must lie in the fixed lattice")
    action = []
    for g in els:
        X = solver.solve_columns(M.action[g] @ B)
        if X is None:
            raise AssertionError("fixed lattice should be stable")
        action.append(X)
    Fm = PresentedModule._make(grp, action, rel)
    return Fm, ModuleMap(Fm, src, B, check=False)


def direct_sum(*mods: PresentedModule) -> PresentedModule:
    if not mods:
        raise ModuleError("direct_sum needs at least one summand")
    G = mods[0].group
    if any(m.group.order != G.order for m in mods):
        raise ModuleError("summands must share a group")
    action = [IntegerMatrix.block_diagonal(*[m.action[g] for m in mods]) for g in G.elements]
    rel = IntegerMatrix.block_diagonal(*[m.relations for m in mods])
    return PresentedModule._make(G, action, rel)


def injection(mods: Sequence[PresentedModule], i: int, total: PresentedModule) -> ModuleMap:
    off = sum(m.rank for m in mods[:i])
    n = mods[i].rank
    rows = [[int(r - off == c) for c in range(n)] for r in range(total.rank)]
    return ModuleMap(mods[i], total, IntegerMatrix._raw(rows, total.rank, n), check=False)


def projection(mods: Sequence[PresentedModule], i: int, total: PresentedModule) -> ModuleMap:
    off = sum(m.rank for m in mods[:i])
    n = mods[i].rank
    rows = [[int(c - off == r) for c in range(total.rank)] for r in range(n)]
    return ModuleMap(total, mods[i], IntegerMatrix._raw(rows, n, total.rank), check=False)


def quotient_module(M: Lattice, S) -> tuple[PresentedModule, ModuleMap]:
    """``M / S`` for a stable sublattice ``S`` (a ModuleMap into M or a basis matrix).

    Coordinates come from the Smith decomposition ``U B V = D`` of the
    generator matrix ``B``: coordinate ``i`` of ``U x`` survives unless
    ``d_i = 1``.  A torsion-free quotient is returned as a Lattice.
    """
    B = S.matrix if isinstance(S, ModuleMap) else S
    if B.rows != M.rank:
        raise ModuleError("sublattice lives in the wrong ambient lattice")
    n = M.rank
    if B.cols and not lattice_contains(B, IntegerMatrix.hstack(*[M.action[g] @ B for g in M.group.generators], rows=n)):
        raise ModuleError("sublattice is not stable under the action")
    snf = smith_normal_form(B)
    diag = list(snf.invariant_factors) + [0] * (n - len(snf.invariant_factors))
    diag = diag[:n]
    keep = [i for i, d in enumerate(diag) if d != 1]
    rows = snf.U.select_rows(keep)
    lifts = snf.U_inv.select_columns(keep)
    action = [rows @ A @ lifts for A in M.action]
    tors = [(j, diag[i]) for j, i in enumerate(keep) if diag[i] > 1]
    if tors:
        rel_cols = [[d if t == j else 0 for t in range(len(keep))] for j, d in tors]
        rel = IntegerMatrix.from_columns(rel_cols, len(keep))
        Q = PresentedModule._make(M.group, action, rel)
    else:
        Q = Lattice(M.group, action, check=False)
    q = ModuleMap(M, Q, rows, check=False)
    q.section_lifts = lifts  # type: ignore[attr-defined]
    return Q, q


def restrict(M: PresentedModule, H: Subgroup) -> PresentedModule:
    grp, _ = H.as_group()
    action = [M.action[g] for g in H.elements]
    return PresentedModule._make(grp, action, M.relations)


def induced_module(H: Subgroup, N: PresentedModule, G: Optional[FiniteGroup] = None) -> PresentedModule:
    """Z[G] ⊗_{Z[H]} N over least-element coset representatives.

    Basis vector ``i*rank(N) + j`` is ``r_i ⊗ e_j``.
    """
    G = G or H.parent
    _, loc = H.as_group()
    if N.group.order != H.order:
        raise ModuleError("N must be a module over the subgroup")
    reps = [c[0] for c in G.left_cosets(H)]
    rep_of = {}
    for i, c in enumerate(G.left_cosets(H)):
        for x in c:
            rep_of[x] = i
    n, m = N.rank, len(reps)
    action = []
    for g in G.elements:
        blocks = [[None] * m for _ in range(m)]
        for i, r in enumerate(reps):
            gr = G.mul(g, r)
            k = rep_of[gr]
            h = G.mul(G.inv(reps[k]), gr)
            blocks[k][i] = N.action[loc[h]]
        rows = []
        for k in range(m):
            for a in range(n):
                row = []
                for i in range(m):
                    blk = blocks[k][i]
                    row.extend(blk.row(a) if blk is not None else [0] * n)
                rows.append(row)
        action.append(IntegerMatrix._raw(rows, m * n, m * n))
    rel = IntegerMatrix.block_diagonal(*[N.relations] * m) if N.relations.cols else IntegerMatrix.zeros(m * n, 0)
    return PresentedModule._make(G, action, rel)


def augmentation_ideal(G: FiniteGroup) -> Lattice:
    """Kernel of Z[G] → Z with basis {γ - e : γ ≠ e}."""
    n = G.order - 1
    action = []
    for h in G.elements:
        rows = [[0] * n for _ in range(n)]
        for j, g in enumerate(range(1, G.order)):
            hg = G.mul(h, g)
            if hg:
                rows[hg - 1][j] += 1
            if h:
                rows[h - 1][j] -= 1
        action.append(IntegerMatrix._raw(rows, n, n))
    return Lattice(G, action, check=False)


@dataclass
class H0Report:
    surjective: bool
    failing: list[Subgroup]

    def __bool__(self) -> bool:
        return self.surjective


def is_H0_surjective(pi: ModuleMap, subgroups: Optional[Sequence[Subgroup]] = None) -> H0Report:
    """Check ``pi(M^H) = N^H`` for every subgroup H."""
    G = pi.source.group
    failing = []
    for H in (subgroups if subgroups is not None else G.all_subgroups):
        Bs = fixed_basis(pi.source, H)
        Bt = fixed_basis(pi.target, H)
        span = IntegerMatrix.hstack(pi.matrix @ Bs, pi.target.relations, rows=pi.target.rank)
        if not lattice_contains(span, Bt):
            failing.append(H)
    return H0Report(not failing, failing)
