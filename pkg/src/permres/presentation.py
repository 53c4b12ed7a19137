"""Permutation presentations of finite modules.

A presentation of a finite module M is an exact sequence
0 → P1 → P0 → M → 0 of lattices.  Here P0 = Z[M] and P1 = N_M, the kernel
of the evaluation map.  The certificate exhibits N_M as a direct summand of
an explicit permutation lattice, and, when a bounded stabilization search
succeeds, a square Γ-invariant integer matrix with cokernel M.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .cohomology import CohomologyGroup, cohomology, is_coflasque
from .coflasque import decompose
from .groups import FiniteGroup, Subgroup
from .linalg import (
    IntegerMatrix,
    LatticeSolver,
    bezout,
    hermite_form,
    lattice_contains,
    left_inverse,
    smith_normal_form,
)
from .modules import (
    FiniteModule,
    Lattice,
    ModuleError,
    ModuleMap,
    PermutationStructure,
    PresentedModule,
    direct_sum,
    enumerate_elements,
    equivariant_from_orbit_images,
    fixed_basis,
    is_H0_surjective,
    kernel_module,
    linearize,
    permutation_module,
    preimage_basis,
    restrict,
    sublattice_module,
)
from .splitting import SplittingError, split_onto_permutation

DEFAULT_STABILIZE_BOUND = 4
DEFAULT_NODE_BUDGET = 400


class PresentationRefused(ModuleError):
    """No permutation presentation can exist; ``reason`` says why."""

    def __init__(self, reason: str, report: Optional["ObstructionReport"] = None):
        super().__init__(reason)
        self.reason = reason
        self.report = report


class UndecidedError(ModuleError):
    """The construction needs hypotheses this input does not meet."""


# ---------------------------------------------------------------------------
# Criterion and obstruction
# ---------------------------------------------------------------------------

def has_presentation_criterion(G: FiniteGroup) -> bool:
    """Every finite module over G has a permutation presentation iff all Sylow subgroups are cyclic."""
    return G.all_sylow_cyclic()


def sylow_refusal_reason(G: FiniteGroup) -> str:
    bad = [(p, S) for p, S in sorted(G.sylow_subgroups().items()) if not S.is_cyclic()]
    parts = ", ".join(f"the Sylow {p}-subgroup of order {S.order}" for p, S in bad)
    return (f"not every Sylow subgroup of the group is cyclic ({parts} is not); "
            f"permutation presentations are only guaranteed when all Sylow subgroups are cyclic "
            f"(exponent {G.exponent} differs from order {G.order})")


@dataclass
class ObstructionReport:
    exponent: int
    h1: CohomologyGroup
    annihilated: bool
    verdict: str

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.h1.invariant_factors

    def __str__(self) -> str:
        return (f"{self.h1}; exponent {self.exponent}; "
                f"{'annihilated' if self.annihilated else 'not annihilated'}; {self.verdict}")


def obstruction(M: PresentedModule) -> ObstructionReport:
    """A permutation presentation forces exp(Γ)·H^1(Γ, M) = 0.

    The converse fails, so an annihilated H^1 only gives "inconclusive".
    """
    G = M.group
    h1 = cohomology(M, 1)
    e = G.exponent
    f = h1.invariant_factors
    ok = all(d != 0 and e % d == 0 for d in f)
    verdict = "inconclusive" if ok else "no permutation presentation exists"
    return ObstructionReport(e, h1, ok, verdict)


# ---------------------------------------------------------------------------
# Permutation summands
# ---------------------------------------------------------------------------

@dataclass
class PermutationSummand:
    """``lattice`` is a direct summand of the permutation lattice ``cover``.

    ``projection : cover → lattice`` and ``section : lattice → cover`` are
    equivariant with projection ∘ section = id.
    """

    lattice: Lattice
    cover: PermutationStructure
    projection: IntegerMatrix
    section: IntegerMatrix

    def complement_basis(self) -> IntegerMatrix:
        from .linalg import kernel_basis
        return kernel_basis(self.projection)

    def isomorphism(self) -> tuple[IntegerMatrix, IntegerMatrix]:
        """(to_cover, from_cover) between lattice ⊕ ker(projection) and the cover."""
        K = self.complement_basis()
        to_cover = IntegerMatrix.hstack(self.section, K)
        if K.cols:
            I = IntegerMatrix.identity(self.cover.rank)
            lower = left_inverse(K) @ (I - self.section @ self.projection)
            from_cover = IntegerMatrix.vstack(self.projection, lower)
        else:
            from_cover = self.projection
        return to_cover, from_cover

    def verify(self) -> None:
        L, C = self.lattice, self.cover
        C.lattice.validate()
        C.validate()
        if not L.is_lattice:
            raise ModuleError("summand must be a lattice")
        if not (self.projection @ self.section).is_identity():
            raise ModuleError("projection ∘ section is not the identity")
        for g in L.group.generators:
            if self.projection @ C.lattice.action[g] != L.action[g] @ self.projection:
                raise ModuleError(f"projection is not equivariant at element {g}")
            if self.section @ L.action[g] != C.lattice.action[g] @ self.section:
                raise ModuleError(f"section is not equivariant at element {g}")


def direct_sum_summands(a: PermutationSummand, b: PermutationSummand) -> PermutationSummand:
    """The sum of two permutation summands, with the summed witnesses."""
    L = direct_sum(a.lattice, b.lattice)
    C = PermutationStructure.detect(direct_sum(a.cover.lattice, b.cover.lattice))
    out = PermutationSummand(L, C, IntegerMatrix.block_diagonal(a.projection, b.projection),
                             IntegerMatrix.block_diagonal(a.section, b.section))
    out.verify()
    return out


def permutation_cover(N: PresentedModule) -> tuple[PermutationStructure, IntegerMatrix]:
    """An H^0-surjective map from a permutation lattice onto N.

    Subgroups are visited from the largest down; a block Z[G/H] is added
    for each basis vector of N^H not yet in the image of the H-fixed part
    of the cover.
    """
    G = N.group
    stabs: list[Subgroup] = []
    images: list[tuple[int, ...]] = []
    for H in sorted(G.all_subgroups, key=lambda S: (-S.order, S.elements)):
        B = fixed_basis(N, H)
        if not B.cols:
            continue
        span = _fixed_image(G, stabs, images, N, H)
        for b in B.columns():
            mat = IntegerMatrix.hstack(span, N.relations, rows=N.rank)
            if mat.cols and LatticeSolver(mat).contains(b):
                continue
            stabs.append(H)
            images.append(tuple(b))
            span = IntegerMatrix.hstack(span, IntegerMatrix.from_columns([b], N.rank))
    C = permutation_module(G, stabs)
    phi = equivariant_from_orbit_images(C, N, images)
    rep = is_H0_surjective(ModuleMap(C.lattice, N, phi, check=False))
    if not rep:
        raise AssertionError("permutation cover is not H0-surjective")
    return C, phi


def _fixed_image(G: FiniteGroup, stabs, images, N, H: Subgroup) -> IntegerMatrix:
    """Image of the H-fixed part of ⊕ Z[G/H_b] under rep_b ↦ images[b]."""
    cols = []
    for Hb, v in zip(stabs, images):
        # H-orbit sums of cosets gH_b map to Σ_{h ∈ H/(H ∩ gH_b g⁻¹)} h g v
        seen = set()
        for c in G.left_cosets(Hb):
            if c in seen:
                continue
            orbit = {tuple(sorted(G.mul(h, x) for x in c)) for h in H.elements}
            seen |= orbit
            total = [0] * N.rank
            for oc in orbit:
                w = N.action[oc[0]] @ v
                total = [a + b for a, b in zip(total, w)]
            cols.append(total)
    return IntegerMatrix.from_columns(cols, N.rank) if cols else IntegerMatrix.zeros(N.rank, 0)


def split_via_sylow(pi: ModuleMap, sections: Mapping[int, tuple[Subgroup, IntegerMatrix]]) -> IntegerMatrix:
    """Fuse Sylow-equivariant sections of ``pi : C → N`` into a G-equivariant one.

    ``sections[p] = (S, s_p)`` with s_p equivariant for the Sylow subgroup S.
    Each is averaged over coset representatives of G/S, which multiplies
    pi ∘ s by the index; Bézout coefficients for the (coprime) indices then
    give pi ∘ s = id.
    """
    G = pi.source.group
    C, N = pi.source, pi.target
    if G.order == 1:
        if len(sections) != 1:
            sol = LatticeSolver(pi.matrix).solve_columns(IntegerMatrix.identity(N.rank))
            if sol is None:
                raise SplittingError("map is not surjective")
            return sol
        return next(iter(sections.values()))[1]
    primes = sorted(sections)
    indices = [G.order // sections[p][0].order for p in primes]
    g, coeffs = bezout(indices)
    if g != 1:
        raise SplittingError(f"Sylow indices {indices} are not coprime")
    total = IntegerMatrix.zeros(C.rank, N.rank)
    for p, c in zip(primes, coeffs):
        S, sp = sections[p]
        if not c:
            continue
        t = IntegerMatrix.zeros(C.rank, N.rank)
        for coset in G.left_cosets(S):
            x = coset[0]
            t = t + C.action[x] @ sp @ N.action[G.inv(x)]
        total = total + t * c
    if not N.equal_mod(pi.matrix @ total, IntegerMatrix.identity(N.rank)):
        raise AssertionError("fused section does not split the map")
    ModuleMap(N, C, total, check=True)
    return total


def sylow_section(C: PermutationStructure, phi: IntegerMatrix, N: Lattice, S: Subgroup) -> IntegerMatrix:
    """A section of phi over the cyclic Sylow subgroup S, via the decomposition of N|S."""
    NS = restrict(N, S)
    cert = decompose(NS)
    CS = restrict(C.lattice, S)
    E = direct_sum(CS, *[P for P in cert.projectives if P.rank]) if any(P.rank for P in cert.projectives) else CS
    extra = E.rank - CS.rank
    rho = cert.Phi @ IntegerMatrix.block_diagonal(phi, IntegerMatrix.identity(extra))
    Sp = split_onto_permutation(ModuleMap(E, cert.rhs.lattice, rho, check=False), cert.rhs).matrix
    sp = Sp.block(0, C.rank, 0, Sp.cols) @ cert.Phi.block(0, cert.Phi.rows, 0, N.rank)
    if not (phi @ sp).is_identity():
        raise AssertionError("Sylow section does not split the cover")
    return sp


def permutation_summand(L: Lattice) -> PermutationSummand:
    """Exhibit a coflasque lattice over a group with cyclic Sylow subgroups
    as a direct summand of a permutation lattice."""
    G = L.group
    if not L.is_lattice:
        raise ModuleError("expected a lattice")
    rep = is_coflasque(L)
    if not rep:
        H, c = rep.failures[0]
        raise PresentationRefused(
            f"lattice is not coflasque ({c} on the subgroup of order {H.order}), "
            f"so it is not a summand of a permutation lattice")
    if not G.all_sylow_cyclic():
        raise UndecidedError(sylow_refusal_reason(G))
    C, phi = permutation_cover(L)
    sections = {}
    for p, S in sorted(G.sylow_subgroups().items()):
        sections[p] = (S, sylow_section(C, phi, L, S))
    s = split_via_sylow(ModuleMap(C.lattice, L, phi, check=False), sections)
    out = PermutationSummand(L, C, phi, s)
    out.verify()
    return out


# ---------------------------------------------------------------------------
# Pullback
# ---------------------------------------------------------------------------

def pullback(phi: ModuleMap, pi: ModuleMap) -> tuple[Lattice, ModuleMap, ModuleMap]:
    """{(f, p) : phi(f) = pi(p)} inside F ⊕ P, with its two projections."""
    if phi.target.rank != pi.target.rank or phi.target.relations != pi.target.relations:
        raise ModuleError("both maps must land in the same module")
    if not (phi.source.is_lattice and pi.source.is_lattice):
        raise ModuleError("pullback expects lattices as sources")
    M = phi.target
    F, P = phi.source, pi.source
    FP = direct_sum(F, P)
    B = preimage_basis(IntegerMatrix.hstack(phi.matrix, -pi.matrix), M.relations)
    N, inc = sublattice_module(FP, B)
    pF = ModuleMap(N, F, B.block(0, F.rank, 0, B.cols), check=False)
    pP = ModuleMap(N, P, B.block(F.rank, FP.rank, 0, B.cols), check=False)
    if not M.equal_mod(phi.matrix @ pF.matrix, pi.matrix @ pP.matrix):
        raise AssertionError("pullback square does not commute")
    return N, pF, pP


# ---------------------------------------------------------------------------
# Stabilization
# ---------------------------------------------------------------------------

@dataclass
class Stabilization:
    """An equivariant isomorphism Z[M] ⊕ E ≅ N_M ⊕ E with E a permutation lattice."""

    extra: PermutationStructure
    T: IntegerMatrix                  # from Z[M] ⊕ E to N_M ⊕ E
    nodes: int


def _candidates(F: IntegerMatrix, limit: int) -> list[tuple[int, ...]]:
    cols = F.columns()
    out = list(cols)
    t = len(cols)
    for i in range(t):
        for j in range(i + 1, t):
            if len(out) >= limit:
                return out
            out.append(tuple(a + b for a, b in zip(cols[i], cols[j])))
            out.append(tuple(a - b for a, b in zip(cols[i], cols[j])))
    return out[:limit]


def _is_unit_hermite(H: IntegerMatrix, s: int) -> bool:
    return H.rows >= s and all(H[i, j] == int(i == j) for i in range(s) for j in range(s))


def find_isomorphism(X: PermutationStructure, Y: Lattice, node_budget: int = DEFAULT_NODE_BUDGET,
                     deadline: Optional[float] = None) -> tuple[Optional[IntegerMatrix], int]:
    """Search for an equivariant unimodular map X → Y by orbit-representative images.

    Orbits are assigned in order of decreasing stabilizer.  A partial
    assignment is kept only while its image columns span a saturated
    sublattice of full column rank; the quotient coordinates are tracked by
    a unimodular row block so each test is a small Hermite reduction.
    """
    n = Y.rank
    if X.rank != n:
        return None, 0
    if n == 0:
        return IntegerMatrix.zeros(0, 0), 0
    order = sorted(range(len(X.reps)), key=lambda b: (-X.stabilizers[b].order, b))
    orbits = X.orbits()
    cand = {}
    for b in order:
        H = X.stabilizers[b]
        if H.elements not in cand:
            F = fixed_basis(Y, H)
            cand[H.elements] = _candidates(F, max(2 * F.cols, 8))
    images: dict[int, tuple[int, ...]] = {}
    nodes = 0

    def orbit_columns(b: int, v) -> IntegerMatrix:
        cols = [Y.action[X.carrier[i]] @ v for i in orbits[b]]
        return IntegerMatrix.from_columns(cols, n)

    def rec(pos: int, U_bot: IntegerMatrix) -> bool:
        nonlocal nodes
        if pos == len(order):
            return True
        if nodes >= node_budget or (deadline is not None and time.monotonic() > deadline):
            return False
        b = order[pos]
        for v in cand[X.stabilizers[b].elements]:
            nodes += 1
            if nodes > node_budget or (deadline is not None and time.monotonic() > deadline):
                return False
            W = U_bot @ orbit_columns(b, v)
            s = W.cols
            # saturated of full column rank iff the reduced row Hermite form is [I; 0]
            if not _is_unit_hermite(hermite_form(W).H, s):
                continue
            hf = hermite_form(W, transform=True, reduce_null=False)
            images[b] = tuple(v)
            U_next = hf.transform.block(s, W.rows, 0, W.rows) @ U_bot
            if rec(pos + 1, U_next):
                return True
        images.pop(b, None)
        return False

    if not rec(0, IntegerMatrix.identity(n)):
        return None, nodes
    T = equivariant_from_orbit_images(X, Y, [images[b] for b in range(len(X.reps))])
    if abs(T.det()) != 1:
        raise AssertionError("search produced a non-unimodular map")
    return T, nodes


def stabilize(P0: PermutationStructure, N: Lattice, bound: int = DEFAULT_STABILIZE_BOUND,
              node_budget: int = DEFAULT_NODE_BUDGET, time_budget: float = 30.0) -> Optional[Stabilization]:
    """Try E = c·⊕_H Z[G/H] for c = 0..bound and search for Z[M] ⊕ E ≅ N ⊕ E."""
    G = P0.group
    deadline = time.monotonic() + time_budget
    subs = sorted(G.all_subgroups, key=lambda S: (-S.order, S.elements))
    total_nodes = 0
    for c in range(bound + 1):
        E = permutation_module(G, [H for H in subs for _ in range(c)])
        X = PermutationStructure.detect(direct_sum(P0.lattice, E.lattice) if E.rank else P0.lattice)
        Y = direct_sum(N, E.lattice) if E.rank else N
        T, nodes = find_isomorphism(X, Y, node_budget, deadline)
        total_nodes += nodes
        if T is not None:
            return Stabilization(E, T, total_nodes)
        if time.monotonic() > deadline:
            break
    return None


# ---------------------------------------------------------------------------
# The resolution certificate
# ---------------------------------------------------------------------------

@dataclass
class PresentationCertificate:
    """0 → N_M --iota--> Z[M] --phi--> M → 0, plus witnesses.

    ``surjection`` has columns in Z[M] mapping onto the ambient basis of M.
    ``summand`` exhibits N_M as a direct summand of a permutation lattice.
    When a stabilization was found, ``matrix`` is the Γ-invariant square
    matrix A = (iota ⊕ id_E) ∘ T on Z[M] ⊕ E with coker A ≅ M.
    """

    module: FiniteModule
    P0: PermutationStructure
    phi: IntegerMatrix
    P1: Lattice
    iota: IntegerMatrix
    surjection: IntegerMatrix
    summand: Optional[PermutationSummand]
    stabilization: Optional[Stabilization] = None
    obstruction: Optional[ObstructionReport] = field(default=None, repr=False)

    @property
    def matrix(self) -> Optional[IntegerMatrix]:
        st = self.stabilization
        if st is None:
            return None
        return IntegerMatrix.block_diagonal(self.iota, IntegerMatrix.identity(st.extra.rank)) @ st.T

    @property
    def matrix_basis(self) -> Optional[PermutationStructure]:
        st = self.stabilization
        if st is None:
            return None
        return PermutationStructure.detect(direct_sum(self.P0.lattice, st.extra.lattice)
                                           if st.extra.rank else self.P0.lattice)

    def verify(self) -> None:
        verify_presentation(self)


class VerificationError(ModuleError):
    pass


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise VerificationError(what)


def verify_presentation(cert: PresentationCertificate) -> None:
    """Re-check every claim from the stored data alone."""
    M, P0, P1 = cert.module, cert.P0, cert.P1
    G = M.group
    M.validate()
    _require(M.abelian_group.order() is not None, "target module is not finite")
    P0.lattice.validate()
    P0.validate()
    P1.validate()
    _require(P1.is_lattice, "P1 is not a lattice")
    phi, iota = cert.phi, cert.iota
    _require(phi.shape == (M.rank, P0.rank), "phi has the wrong shape")
    _require(iota.shape == (P0.rank, P1.rank), "iota has the wrong shape")
    for g in G.elements:
        _require(M.equal_mod(phi @ P0.lattice.action[g], M.action[g] @ phi),
                 f"phi ∘ g = g ∘ phi fails for element {g}")
        _require(iota @ P1.action[g] == P0.lattice.action[g] @ iota,
                 f"iota ∘ g = g ∘ iota fails for element {g}")
    _require(cert.surjection.shape == (P0.rank, M.rank), "surjection witness has the wrong shape")
    _require(M.equal_mod(phi @ cert.surjection, IntegerMatrix.identity(M.rank)),
             "phi ∘ surjection = id fails (phi not shown surjective)")
    _require(M.contains_relations(phi @ iota), "phi ∘ iota = 0 fails")
    snf = smith_normal_form(iota)
    _require(snf.rank == P1.rank, "iota is not injective")
    K = preimage_basis(phi, M.relations)
    _require(lattice_contains(iota, K), "ker phi ⊆ im iota fails (sequence not exact)")
    if cert.summand is not None:
        S = cert.summand
        _require(S.lattice.rank == P1.rank and all(
            S.lattice.action[g] == P1.action[g] for g in G.elements), "summand witness is for another lattice")
        try:
            S.verify()
        except ModuleError as e:
            raise VerificationError(f"permutation summand witness: {e}") from None
    st = cert.stabilization
    if st is not None:
        st.extra.lattice.validate()
        st.extra.validate()
        X = cert.matrix_basis
        Y = direct_sum(P1, st.extra.lattice) if st.extra.rank else P1
        T = st.T
        _require(T.shape == (Y.rank, X.rank), "stabilizing map has the wrong shape")
        for g in G.elements:
            _require(T @ X.lattice.action[g] == Y.action[g] @ T, f"T ∘ g = g ∘ T fails for element {g}")
        _require(abs(T.det()) == 1, "det T = ±1 fails")
        A = cert.matrix
        for g in G.elements:
            _require(A @ X.lattice.action[g] == X.lattice.action[g] @ A,
                     f"A is not invariant under element {g}")
        _require(A.det() != 0, "ker A = 0 fails")
        ext = IntegerMatrix.hstack(phi, IntegerMatrix.zeros(M.rank, st.extra.rank))
        _require(M.contains_relations(ext @ A), "(phi, 0) ∘ A = 0 fails")
        _require(lattice_contains(A, preimage_basis(ext, M.relations)), "ker (phi, 0) ⊆ im A fails")


def permutation_resolution(M: FiniteModule, stabilize_bound: Optional[int] = DEFAULT_STABILIZE_BOUND,
                           node_budget: int = DEFAULT_NODE_BUDGET, time_budget: float = 30.0,
                           linearize_bound: int = 4096) -> PresentationCertificate:
    """Build and verify a permutation presentation certificate for M."""
    G = M.group
    if not M.is_lattice and M.abelian_group.order() is None:
        raise ModuleError("module is not finite")
    if not has_presentation_criterion(G):
        rep = obstruction(M)
        raise PresentationRefused(sylow_refusal_reason(G) + f"; obstruction: {rep}", rep)
    rep = obstruction(M)
    if not rep.annihilated:
        raise AssertionError("obstruction fired on a group whose Sylow subgroups are all cyclic")
    P0, pi = linearize(M, bound=linearize_bound)
    N, inc = kernel_module(pi)
    # e_i of M is the image of the basis vector labelled by its coordinates
    E = enumerate_elements(M)
    index = {c: j for j, c in enumerate(P0.labels)}
    surj = IntegerMatrix.from_columns(
        [tuple(int(j == index[E.coordinates(e)]) for j in range(P0.rank))
         for e in IntegerMatrix.identity(M.rank).columns()], P0.rank)
    summand = permutation_summand(N) if N.rank else None
    stab = None
    if stabilize_bound is not None and stabilize_bound >= 0:
        stab = stabilize(P0, N, stabilize_bound, node_budget, time_budget)
    cert = PresentationCertificate(M, P0, pi.matrix, N, inc.matrix, surj, summand, stab, rep)
    cert.verify()
    return cert


def emit_invariant_matrix(cert: PresentationCertificate) -> tuple[IntegerMatrix, PermutationStructure]:
    """The square invariant matrix and the permutation basis it is written in."""
    if cert.stabilization is None:
        raise ModuleError("certificate carries no isomorphism Z[M] ⊕ E ≅ N_M ⊕ E")
    verify_presentation(cert)
    return cert.matrix, cert.matrix_basis
