"""Coflasque lattices over a cyclic p-group are permutation projective.

For Γ cyclic of order p^K with generator σ, write σ_k = σ^(p^k), Γ_k = <σ_k>
and s_k^(l) = Σ_{j < p^(l-k)} σ_k^j.  A coflasque lattice M lies in level
C_k when its σ_k-fixed lattice is projective over Γ/Γ_k.  ``promote`` moves
a lattice from C_k to C_{k+1} at the cost of a free Γ/Γ_k summand and a
projective complement; ``decompose`` chains the steps and assembles an
explicit equivariant isomorphism

    M ⊕ P_0 ⊕ ... ⊕ P_K  ≅  F_0 ⊕ ... ⊕ F_K

with each F_k a free Z[Γ/Γ_k]-module, hence a permutation lattice.

Coordinates on a free Z[Γ/Γ_k]-module of rank m are always ordered
``i*g + j`` for the vector σ^j x_i, where g = p^k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cohomology import cohomology_cyclic, is_coflasque, is_projective_cyclic
from .groups import FiniteGroup, Subgroup, cyclic, prime_factors
from .linalg import (
    FpEchelon,
    IntegerMatrix,
    LatticeSolver,
    is_saturated,
    kernel_basis,
    lattice_contains,
    lattice_equal,
    lattice_intersection,
    left_inverse,
    lll_reduce,
    rank_mod_p,
    solve_integer,
    unimodular_inverse,
)
from .modules import (
    Lattice,
    ModuleError,
    ModuleMap,
    PermutationStructure,
    direct_sum,
    quotient_module,
    reduce_lattice,
    sublattice_module,
)
from .splitting import split_onto_permutation


class EngineError(ModuleError):
    """A precondition or re-verification inside the engine failed."""


class NotProjectiveError(EngineError):
    pass


# ---------------------------------------------------------------------------
# The group and its tower
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclicPGroup:
    """A cyclic group of order p^K with a chosen generator."""

    group: FiniteGroup
    p: int
    K: int
    sigma: int
    powers: tuple[int, ...]          # powers[a] = σ^a
    log: dict = field(repr=False)    # element -> a

    @classmethod
    def of(cls, G: FiniteGroup, sigma: Optional[int] = None) -> "CyclicPGroup":
        n = G.order
        primes = prime_factors(n)
        if n == 1 or len(primes) != 1:
            raise EngineError(f"group of order {n} is not a nontrivial cyclic p-group")
        if sigma is None:
            if not G.is_cyclic():
                raise EngineError(f"group {G.name or ''} of order {n} is not cyclic")
            sigma = G.cyclic_generator()
        elif G.element_order(sigma) != n:
            raise EngineError(f"element {sigma} does not generate the group")
        p = primes[0]
        K = 0
        while p ** K < n:
            K += 1
        powers = [0]
        for _ in range(n - 1):
            powers.append(G.mul(sigma, powers[-1]))
        return cls(G, p, K, sigma, tuple(powers), {g: a for a, g in enumerate(powers)})

    @property
    def order(self) -> int:
        return self.group.order

    def level_element(self, k: int) -> int:
        return self.powers[self.p ** k % self.order]

    def level_subgroup(self, k: int) -> Subgroup:
        step = self.p ** k
        return Subgroup(self.group, [self.powers[a] for a in range(0, self.order, step)])


class SubgroupTower:
    """σ_k and s_k^(l) as matrices on one lattice."""

    def __init__(self, M: Lattice, data: Optional[CyclicPGroup] = None):
        self.module = M
        self.data = data or CyclicPGroup.of(M.group)
        self._norms: dict[tuple[int, int], IntegerMatrix] = {}
        self._fixed: dict[int, IntegerMatrix] = {}

    @property
    def p(self) -> int:
        return self.data.p

    @property
    def K(self) -> int:
        return self.data.K

    def sigma(self, k: int) -> IntegerMatrix:
        return self.module.action[self.data.level_element(k)]

    def norm(self, k: int, l: Optional[int] = None) -> IntegerMatrix:
        """s_k^(l); ``l`` defaults to K."""
        l = self.K if l is None else l
        if not 0 <= k <= l <= self.K:
            raise ValueError(f"need 0 <= k <= l <= K, got {k}, {l}")
        key = (k, l)
        if key not in self._norms:
            n = self.module.rank
            out = IntegerMatrix.zeros(n, n)
            step = self.p ** k
            for j in range(self.p ** (l - k)):
                out = out + self.module.action[self.data.powers[j * step % self.data.order]]
            self._norms[key] = out
        return self._norms[key]

    def fixed_basis(self, k: int) -> IntegerMatrix:
        """Basis of M^{σ_k}."""
        if k not in self._fixed:
            n = self.module.rank
            self._fixed[k] = kernel_basis(self.sigma(k) - IntegerMatrix.identity(n))
        return self._fixed[k]

    def verify(self) -> None:
        n, p, K = self.module.rank, self.p, self.K
        I = IntegerMatrix.identity(n)
        if not self.sigma(K).is_identity():
            raise EngineError("σ_K is not the identity")
        for k in range(K):
            if self.sigma(k + 1) != self.sigma(k) ** p:
                raise EngineError(f"σ_{k + 1} differs from σ_{k}^p")
        for k in range(K + 1):
            for l in range(k, K + 1):
                if (I - self.sigma(k)) @ self.norm(k, l) != I - self.sigma(l):
                    raise EngineError(f"(1-σ_{k}) s_{k}^({l}) differs from 1-σ_{l}")
                for m in range(l, K + 1):
                    if self.norm(k, l) @ self.norm(l, m) != self.norm(k, m):
                        raise EngineError(f"s_{k}^({l}) s_{l}^({m}) differs from s_{k}^({m})")


def fixed_quotient_module(M: Lattice, k: int, data: Optional[CyclicPGroup] = None
                          ) -> tuple[Lattice, IntegerMatrix]:
    """M^{σ_k} as a lattice over the cyclic group Γ/Γ_k, with its basis in M.

    The quotient group is ``cyclic(p^k)`` and σ maps to its element 1.
    """
    data = data or CyclicPGroup.of(M.group)
    B = SubgroupTower(M, data).fixed_basis(k)
    P = _descend(M, B, k, data)
    P, C, _ = reduce_lattice(P)
    return P, B @ C


def _descend(M: Lattice, B: IntegerMatrix, k: int, data: CyclicPGroup) -> Lattice:
    g = data.p ** k
    solver = LatticeSolver(B)
    A = solver.solve_columns(M.action[data.sigma] @ B)
    if A is None:
        raise EngineError("fixed lattice is not stable under σ")
    if not (A ** g).is_identity():
        raise EngineError(f"σ^{g} does not act trivially on the fixed lattice")
    action = [IntegerMatrix.identity(B.cols)]
    for _ in range(g - 1):
        action.append(A @ action[-1])
    return Lattice(cyclic(g), action, check=False)


def inflate(Q: Lattice, data: CyclicPGroup) -> Lattice:
    """A lattice over cyclic(g) = Γ/Γ_k viewed as a lattice over Γ."""
    g = Q.group.order
    action = [Q.action[data.log[h] % g] for h in data.group.elements]
    return Lattice(data.group, action, check=False)


# ---------------------------------------------------------------------------
# Level membership
# ---------------------------------------------------------------------------

@dataclass
class CkCertificate:
    """Membership of a coflasque lattice in C_k.

    ``witnesses`` lists, for each basis vector m of M^{σ_{k-1}}, a vector m'
    in M^{σ_k} with m = s_{k-1}^(k) m'.
    """

    module: Lattice
    k: int
    member: bool
    conditions: dict[str, bool]
    witnesses: Optional[list[tuple[int, ...]]] = None

    def __bool__(self) -> bool:
        return self.member

    def verify(self) -> bool:
        """Replay the witnesses: they prove the level-k condition on fixed points."""
        if self.k == 0:
            return self.member
        if self.witnesses is None:
            return not self.member
        M = self.module
        T = SubgroupTower(M)
        B_prev = T.fixed_basis(self.k - 1)
        S = T.sigma(self.k)
        s = T.norm(self.k - 1, self.k)
        if len(self.witnesses) != B_prev.cols:
            return False
        for m, w in zip(B_prev.columns(), self.witnesses):
            if S @ w != tuple(w) or s @ w != tuple(m):
                return False
        return True


def is_in_Ck(M: Lattice, k: int, verify: bool = False, check_coflasque: bool = True,
             data: Optional[CyclicPGroup] = None) -> CkCertificate:
    """Decide M ∈ C_k by p^(K-k) M^{σ_{k-1}} ⊆ s_{k-1} M.

    With ``verify`` the equivalent conditions on fixed points are evaluated
    too (one-step and cumulative norm surjectivity, projectivity over the
    quotient group) and must agree.
    """
    data = data or CyclicPGroup.of(M.group)
    K, p = data.K, data.p
    if not 0 <= k <= K:
        raise ValueError(f"level {k} outside 0..{K}")
    if check_coflasque:
        rep = is_coflasque(M)
        if not rep:
            H, c = rep.failures[0]
            raise EngineError(f"lattice is not coflasque: {c} on the subgroup of order {H.order}")
    if k == 0 or M.rank == 0:
        return CkCertificate(M, k, True, {"ii": True}, [] if k else None)
    T = SubgroupTower(M, data)
    B_prev = T.fixed_basis(k - 1)
    member = lattice_contains(T.norm(k - 1), B_prev * p ** (K - k))
    conds = {"ii": member}
    witnesses = None
    if verify or member:
        B_k = T.fixed_basis(k)
        sol = LatticeSolver(T.norm(k - 1, k) @ B_k).solve_columns(B_prev)
        conds["iii"] = sol is not None
        if sol is not None:
            witnesses = [B_k @ c for c in sol.columns()]
    if verify:
        B_k = T.fixed_basis(k)
        conds["iv"] = lattice_contains(T.norm(0, k) @ B_k, T.fixed_basis(0))
        Pbar, _ = fixed_quotient_module(M, k, data)
        conds["i"] = bool(is_projective_cyclic(Pbar))
        if len(set(conds.values())) != 1:
            raise EngineError(f"equivalent level conditions disagree at k={k}: {conds}")
    elif member != conds.get("iii", member):
        raise EngineError(f"level conditions disagree at k={k}: {conds}")
    return CkCertificate(M, k, member, conds, witnesses if member else None)


def level(M: Lattice, data: Optional[CyclicPGroup] = None) -> int:
    """Largest k with M ∈ C_k (membership is monotone in k)."""
    data = data or CyclicPGroup.of(M.group)
    best = 0
    for k in range(1, data.K + 1):
        if not is_in_Ck(M, k, check_coflasque=(k == 1), data=data):
            break
        best = k
    return best


# ---------------------------------------------------------------------------
# Free modules over the quotient groups
# ---------------------------------------------------------------------------

def _shift_rows(v_cols: IntegerMatrix, m: int, g: int, a: int) -> IntegerMatrix:
    """σ^a applied to columns written in free coordinates i*g + j."""
    rows = [None] * (m * g)
    data = v_cols._data
    for i in range(m):
        for j in range(g):
            rows[i * g + (j + a) % g] = data[i * g + j]
    return IntegerMatrix._raw(rows, m * g, v_cols.cols)


def free_quotient_lattice(group: FiniteGroup, log: dict, g: int, m: int) -> Lattice:
    """Z[Γ/Γ_k]^m over ``group`` with basis σ^j x_i at index i*g + j."""
    n = m * g
    action = []
    for h in group.elements:
        a = log[h] % g
        rows = [[0] * n for _ in range(n)]
        for i in range(m):
            for j in range(g):
                rows[i * g + (j + a) % g][i * g + j] = 1
        action.append(IntegerMatrix._raw(rows, n, n))
    return Lattice(group, action, check=False)


@dataclass
class ProjectiveComplement:
    """P ⊕ Q ≅ Z[C]^m for a projective lattice P over a cyclic p-group C.

    ``phi`` maps the free module onto P (x_i ↦ generator i), ``section`` is an
    equivariant right inverse, Q = ker(phi) has basis ``Q_basis``, and
    ``to_free`` / ``from_free`` are the mutually inverse isomorphisms between
    P ⊕ Q and the free module.
    """

    module: Lattice
    generators: IntegerMatrix
    phi: IntegerMatrix
    section: IntegerMatrix
    Q: Lattice
    Q_basis: IntegerMatrix
    to_free: IntegerMatrix
    from_free: IntegerMatrix

    @property
    def free_rank(self) -> int:
        return self.generators.cols

    @property
    def order(self) -> int:
        return self.module.group.order

    def verify(self) -> None:
        P, g, m = self.module, self.order, self.free_rank
        n, d = P.rank, self.Q.rank
        if self.to_free.shape != (g * m, n + d):
            raise EngineError("complement isomorphism has the wrong shape")
        if not (self.to_free @ self.from_free).is_identity() or not (self.from_free @ self.to_free).is_identity():
            raise EngineError("complement isomorphisms are not mutually inverse")
        if not (self.phi @ self.section).is_identity():
            raise EngineError("section does not split the free cover")
        F = free_quotient_lattice(P.group, {h: h for h in P.group.elements}, g, m)
        PQ = direct_sum(P, self.Q) if d else P
        for h in ([1] if g > 1 else []):
            if self.to_free @ PQ.action[h] != F.action[h] @ self.to_free:
                raise EngineError(f"complement isomorphism is not equivariant at {h}")


def projective_complement(P: Lattice) -> ProjectiveComplement:
    """Complement of a projective lattice over ``cyclic(g)``, g a prime power.

    Generators are chosen so that their images span P modulo p and (σ-1);
    further basis vectors are added only if the Z[C]-span still misses P.
    The section is found by solving for equivariant lifts of the generators
    that kill the kernel of the cover.
    """
    G, n = P.group, P.rank
    g = G.order
    if g != 1 and len(prime_factors(g)) != 1:
        raise EngineError("projective_complement needs a cyclic p-group")
    if g > 1 and G.element_order(1) != g:
        raise EngineError("element 1 must generate the quotient group")
    if n == 0:
        Z = IntegerMatrix.zeros(0, 0)
        return ProjectiveComplement(P, Z, Z, Z, Lattice(G, [Z] * g, check=False), Z, Z, Z)
    A = P.action[1] if g > 1 else IntegerMatrix.identity(n)
    powers = [IntegerMatrix.identity(n)]
    for _ in range(g - 1):
        powers.append(A @ powers[-1])

    # generators: independent modulo p and (σ-1)P, then fill up the span
    chosen: list[int] = []
    if g > 1:
        p = prime_factors(g)[0]
        ech = FpEchelon(p, n)
        for c in (A - IntegerMatrix.identity(n)).columns():
            ech.add(c)
        for b in range(n):
            e = [0] * n
            e[b] = 1
            if ech.add(e):
                chosen.append(b)
        if len(chosen) * g != n:
            raise NotProjectiveError(
                f"P/(p, σ-1)P has dimension {len(chosen)}, but a projective lattice of rank {n} "
                f"over a group of order {g} needs {n // g if n % g == 0 else 'an integral'}")
    else:
        chosen = list(range(n))

    def span_of(idx):
        cols = [powers[j].column(b) for b in idx for j in range(g)]
        return IntegerMatrix.from_columns(cols, n)

    while True:
        phi = span_of(chosen)
        solver = LatticeSolver(phi)
        missing = next((b for b in range(n) if not solver.contains([int(i == b) for i in range(n)])), None)
        if missing is None:
            break
        chosen.append(missing)
    m = len(chosen)
    gens = IntegerMatrix.from_columns([[int(i == b) for i in range(n)] for b in chosen], n)
    N = g * m
    shift = free_quotient_lattice(G, {h: h for h in G.elements}, g, m).action[1 % g] if g > 1 else IntegerMatrix.identity(N)

    if N == n:
        t = unimodular_inverse(phi)
        Kb = IntegerMatrix.zeros(N, 0)
    else:
        Kb = kernel_basis(phi)
        Kb = Kb @ lll_reduce(Kb.T @ Kb)[0]
        d = Kb.cols
        L = left_inverse(Kb)
        shifted = [_shift_rows(Kb, m, g, a) for a in range(g)]
        # unknowns c_i in Z^d with u_i = x_i + Kb c_i; equations T(κ_a) = 0
        big_rows: list[list[int]] = []
        rhs: list[int] = []
        for a, kappa in enumerate(Kb.columns()):
            blocks = []
            for i in range(m):
                W = IntegerMatrix.zeros(N, d)
                for j in range(g):
                    coef = kappa[i * g + j]
                    if coef:
                        W = W + shifted[j] * coef
                blocks.append(L @ W)
            for r in range(d):
                big_rows.append([x for B in blocks for x in B.row(r)])
                rhs.append(-int(r == a))
        sol = solve_integer(IntegerMatrix._raw(big_rows, len(big_rows), m * d), rhs)
        if sol is None:
            raise NotProjectiveError("the free cover admits no equivariant section")
        lifts = []
        for i in range(m):
            u = list(Kb @ sol[i * d:(i + 1) * d])
            u[i * g] += 1
            lifts.append(u)
        Tcols = [None] * N
        for i in range(m):
            col = IntegerMatrix.from_columns([lifts[i]], N)
            for j in range(g):
                Tcols[i * g + j] = _shift_rows(col, m, g, j).column(0)
        T = IntegerMatrix.from_columns(Tcols, N)
        right = LatticeSolver(phi).solve_columns(IntegerMatrix.identity(n))
        t = T @ right
    Q = Lattice(G, [IntegerMatrix.identity(0)] * g, check=False) if Kb.cols == 0 else \
        sublattice_module(free_quotient_lattice(G, {h: h for h in G.elements}, g, m), Kb)[0]
    to_free = IntegerMatrix.hstack(t, Kb)
    if Kb.cols:
        from_free = IntegerMatrix.vstack(phi, left_inverse(Kb) @ (IntegerMatrix.identity(N) - t @ phi))
    else:
        from_free = phi
    if not (phi @ t).is_identity() or (g > 1 and t @ A != shift @ t):
        raise AssertionError("constructed section is not an equivariant splitting")
    out = ProjectiveComplement(P, gens, phi, t, Q, Kb, to_free, from_free)
    out.verify()
    return out


@dataclass
class FreeSubmodule:
    """F = Z[C]·Y inside Z[C]^m (free coordinates), with its defining data."""

    m: int
    g: int
    p: int
    l: int
    N: IntegerMatrix
    selected: tuple[int, ...]

    @property
    def basis(self) -> IntegerMatrix:
        n = self.m * self.g
        cols = [[int(r == i * self.g + j) for r in range(n)] for i in self.selected for j in range(self.g)]
        return IntegerMatrix.from_columns(cols, n)

    def verify(self) -> None:
        n = self.m * self.g
        F, N, p, l = self.basis, self.N, self.p, self.l
        if not is_saturated(F):
            raise EngineError("quotient by the free submodule has torsion")
        if not lattice_contains(IntegerMatrix.hstack(F, N), IntegerMatrix.identity(n) * p ** (l - 1)):
            raise EngineError("p^(l-1) M is not contained in F + N")
        if F.cols and not lattice_equal(lattice_intersection(F, N), F * p ** l):
            raise EngineError("F ∩ N differs from p^l F")


def find_free_submodule(m: int, g: int, p: int, l: int, N: IntegerMatrix) -> FreeSubmodule:
    """Free F ⊆ Z[C]^m on a subset of the basis with M/F torsion-free,
    p^(l-1) M ⊆ F + N and F ∩ N = p^l F.

    ``N`` is given by generator columns in free coordinates; C = cyclic(g).
    Basis vectors are kept when the norm of their image in
    p^(l-1)M / (p^(l-1)M ∩ N) is independent mod p of those kept before.
    """
    n = m * g
    if l < 1:
        raise ValueError("level must be at least 1")
    if N.rows != n:
        raise ValueError("N lives in the wrong ambient lattice")
    C = cyclic(g)
    free = free_quotient_lattice(C, {h: h for h in C.elements}, g, m)
    if n == 0:
        return FreeSubmodule(m, g, p, l, N, ())
    I_n = IntegerMatrix.identity(n)
    if not lattice_contains(N, I_n * p ** l):
        raise EngineError(f"p^{l} M is not contained in N")
    meet = lattice_intersection(I_n * p ** (l - 1), N)
    if g > 1:
        Ilat, _ = sublattice_module(free, meet)
        h1 = cohomology_cyclic(Ilat, 1, 1)
        if not h1.is_zero():
            raise EngineError(f"H^1 of p^(l-1)M ∩ N is {h1}, not zero")
    scale = p ** (l - 1)
    I_L = IntegerMatrix._raw([[x // scale for x in r] for r in meet._data], meet.rows, meet.cols)
    Mp, pi = quotient_module(free, I_L)
    t = Mp.rank
    if any(d != p for d in (Mp.relations[j, j] for j in range(Mp.relations.cols))) or Mp.relations.cols != t:
        raise EngineError("quotient p^(l-1)M / (p^(l-1)M ∩ N) is not killed by p")
    if g > 1 and t:
        sig = Mp.action[1]
        fixed_dim = t - rank_mod_p(sig - IntegerMatrix.identity(t), p)
    else:
        fixed_dim = t
    ech = FpEchelon(p, t)
    chosen = []
    for i in range(m):
        v = [int(r // g == i) for r in range(n)]
        if ech.add(pi.matrix @ v):
            chosen.append(i)
    if len(chosen) != fixed_dim:
        raise EngineError(f"norms span dimension {len(chosen)}, fixed space has {fixed_dim}")
    out = FreeSubmodule(m, g, p, l, N, tuple(chosen))
    out.verify()
    return out


# ---------------------------------------------------------------------------
# Promotion and full decomposition
# ---------------------------------------------------------------------------

@dataclass
class PromotionStep:
    k: int
    module: Lattice                 # M ∈ C_k
    complement: ProjectiveComplement
    P: Lattice                      # complement inflated to Γ
    extended: Lattice               # M ⊕ P
    free_basis: IntegerMatrix       # σ^j x_i in the extended lattice
    free: FreeSubmodule
    F_basis: IntegerMatrix          # F_k inside the extended lattice
    next_module: Lattice            # (M ⊕ P)/F_k ∈ C_{k+1}
    quotient: IntegerMatrix

    @property
    def F_rank(self) -> int:
        return len(self.free.selected)


def promote(M: Lattice, k: int, data: Optional[CyclicPGroup] = None, check: bool = True) -> PromotionStep:
    """One step from C_k to C_{k+1}: 0 → F_k → M ⊕ P_k → M_{k+1} → 0."""
    data = data or CyclicPGroup.of(M.group)
    K, p = data.K, data.p
    if not 0 <= k < K:
        raise ValueError(f"promotion level {k} outside 0..{K - 1}")
    if check and not is_in_Ck(M, k, data=data):
        raise EngineError(f"input is not in level {k}")
    g = p ** k
    Pbar, B_k = fixed_quotient_module(M, k, data)
    comp = projective_complement(Pbar)
    Pk = inflate(comp.Q, data)
    Mt = direct_sum(M, Pk) if Pk.rank else M
    X = IntegerMatrix.block_diagonal(B_k, IntegerMatrix.identity(Pk.rank)) @ comp.from_free
    Ns = SubgroupTower(Mt, data).norm(k)
    N = LatticeSolver(X).solve_columns(Ns) if Mt.rank else IntegerMatrix.zeros(0, 0)
    if N is None:
        raise EngineError("norm image is not inside the fixed lattice")
    ff = find_free_submodule(comp.free_rank, g, p, K - k, N)
    F = X @ ff.basis if ff.selected else IntegerMatrix.zeros(Mt.rank, 0)
    if not is_saturated(F):
        raise EngineError("extended lattice modulo F has torsion")
    Mn, q = quotient_module(Mt, F)
    if not isinstance(Mn, Lattice):
        raise EngineError("quotient by F is not a lattice")
    Mn, _, Ci = reduce_lattice(Mn)
    qmat = Ci @ q.matrix
    if check:
        rep = is_in_Ck(Mn, k + 1, data=data)
        if not rep:
            raise EngineError(f"promoted lattice fails level {k + 1}: {rep.conditions}")
    return PromotionStep(k, M, comp, Pk, Mt, X, ff, F, Mn, qmat)


@dataclass
class DecompositionCertificate:
    """M ⊕ P_0 ⊕ ... ⊕ P_K ≅ F_0 ⊕ ... ⊕ F_K with explicit matrices.

    ``Phi`` maps the left side (``lhs``) to the permutation lattice ``rhs``;
    ``Psi`` is its inverse.  ``blocks`` lists (level k, number of orbits) for
    each F_k in order.
    """

    module: Lattice
    steps: list[PromotionStep]
    cap: Optional[ProjectiveComplement]
    projectives: list[Lattice]
    lhs: Lattice
    rhs: PermutationStructure
    Phi: IntegerMatrix
    Psi: IntegerMatrix
    blocks: list[tuple[int, int]]

    @property
    def complements(self) -> list[ProjectiveComplement]:
        out = [s.complement for s in self.steps]
        if self.cap is not None:
            out.append(self.cap)
        return out

    def verify(self) -> None:
        """Independent re-check of every claim in the certificate."""
        E, R = self.lhs, self.rhs
        n = self.module.rank
        G = self.module.group
        if E.rank != n + sum(P.rank for P in self.projectives):
            raise EngineError("left side has the wrong rank")
        for h in G.elements:
            top = E.action[h].block(0, n, 0, n)
            if top != self.module.action[h] or (n and not E.action[h].block(n, E.rank, 0, n).is_zero()):
                raise EngineError("left side does not start with the input lattice")
        R.validate()
        if not (self.Phi @ self.Psi).is_identity() or not (self.Psi @ self.Phi).is_identity():
            raise EngineError("Φ and Ψ are not mutually inverse")
        for h in G.elements:
            if self.Phi @ E.action[h] != R.lattice.action[h] @ self.Phi:
                raise EngineError(f"Φ does not intertwine the action of element {h}")
            if self.Psi @ R.lattice.action[h] != E.action[h] @ self.Psi:
                raise EngineError(f"Ψ does not intertwine the action of element {h}")
        for c in self.complements:
            c.verify()
            if c.module.rank and not is_projective_cyclic(c.module):
                raise EngineError("a complement was attached to a non-projective lattice")


def decompose(M: Lattice, sigma: Optional[int] = None, check: bool = True) -> DecompositionCertificate:
    """Permutation-projective decomposition of a coflasque lattice over Z/p^K."""
    G = M.group
    if M.rank == 0 or G.order == 1:
        R = PermutationStructure.detect(Lattice(G, [IntegerMatrix.identity(M.rank)] * G.order, check=False))
        I = IntegerMatrix.identity(M.rank)
        if any(not A.is_identity() for A in M.action):
            raise EngineError("trivial group must act trivially")
        return DecompositionCertificate(M, [], None, [], M, R, I, I, [(0, M.rank)] if M.rank else [])
    data = CyclicPGroup.of(G, sigma)
    rep = is_coflasque(M)
    if not rep:
        H, c = rep.failures[0]
        raise EngineError(f"lattice is not coflasque: {c} on the subgroup of order {H.order}")
    K, p = data.K, data.p
    M_in = M
    M, Bred, Bred_inv = reduce_lattice(M)

    steps: list[PromotionStep] = []
    cur = M
    for k in range(K):
        st = promote(cur, k, data, check=check)
        steps.append(st)
        cur = st.next_module
    capbar = _descend(cur, IntegerMatrix.identity(cur.rank), K, data)
    cap = projective_complement(capbar)
    PK = inflate(cap.Q, data)
    projectives = [s.P for s in steps] + [PK]

    # level K: E_K = M_K ⊕ P_K ≅ F_K
    F_lat = free_quotient_lattice(G, data.log, data.order, cap.free_rank)
    R_lat = F_lat
    E_mods: list[Lattice] = [cur] + ([PK] if PK.rank else [])
    Phi, Psi = cap.to_free, cap.from_free
    blocks = [(K, cap.free_rank)]
    for st in reversed(steps):
        k = st.k
        rest = [P for P in projectives[k + 1:] if P.rank]
        E_prev_rank = sum(m.rank for m in E_mods)
        E_mods = [st.module] + ([st.P] if st.P.rank else []) + rest
        E = direct_sum(*E_mods)
        rest_rank = E_prev_rank - st.next_module.rank
        to_prev = IntegerMatrix.block_diagonal(st.quotient, IntegerMatrix.identity(rest_rank))
        pi = Phi @ to_prev
        R_struct = PermutationStructure.detect(R_lat)
        S = split_onto_permutation(ModuleMap(E, R_lat, pi, check=False), R_struct).matrix
        f = st.F_basis.cols
        iota = IntegerMatrix.vstack(st.F_basis, IntegerMatrix.zeros(rest_rank, f), cols=f)
        g = p ** k
        Fk = free_quotient_lattice(G, data.log, g, st.F_rank)
        if f:
            L = left_inverse(iota)
            top = L - (L @ S) @ pi
            Phi = IntegerMatrix.vstack(top, pi)
            Psi = IntegerMatrix.hstack(iota, S)
            R_lat = direct_sum(Fk, R_lat)
            blocks.insert(0, (k, st.F_rank))
        else:
            Phi, Psi = pi, S
    extra = sum(P.rank for P in projectives)
    Phi = Phi @ IntegerMatrix.block_diagonal(Bred_inv, IntegerMatrix.identity(extra))
    Psi = IntegerMatrix.block_diagonal(Bred, IntegerMatrix.identity(extra)) @ Psi
    E_mods[0] = M_in
    E = direct_sum(*E_mods) if len(E_mods) > 1 else E_mods[0]
    cert = DecompositionCertificate(M_in, steps, cap, projectives, E, PermutationStructure.detect(R_lat),
                                    Phi, Psi, blocks)
    if check:
        cert.verify()
    return cert
