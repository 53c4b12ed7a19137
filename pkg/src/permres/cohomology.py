"""Low-degree group cohomology with lattice or finite coefficients.

Three routes, which the tests cross-check against each other:

* ``cohomology_cyclic``: the period-two formulas for a cyclic group,
  ``H^1 = ker(s)/(1-σ)M`` and ``H^2 = M^σ/sM``;
* ``cohomology_bar``: the full inhomogeneous bar complex;
* ``cohomology_resolution``: a small free resolution of Z built by greedy
  choice of generators, used when the bar complex would be too large.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

from .groups import FiniteGroup, Subgroup
from .linalg import (
    GroupHom,
    HomologyData,
    IntegerMatrix,
    LatticeSolver,
    PresentedAbelianGroup,
    format_invariants,
    homology_data,
    image_basis,
    kernel_basis,
    lattice_contains,
    lattice_equal,
)
from .modules import ModuleError, ModuleMap, PresentedModule, restrict

DEFAULT_BAR_BOUND = 6000
# ``auto`` prefers the resolution sooner: the bar complex is exact but slow
AUTO_BAR_LIMIT = 1000


@dataclass
class CohomologyGroup:
    degree: int
    group: PresentedAbelianGroup
    method: str
    data: Optional[HomologyData] = field(default=None, repr=False)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.group.invariant_factors

    def is_zero(self) -> bool:
        return self.group.is_trivial()

    def __str__(self) -> str:
        return f"H^{self.degree} = {format_invariants(self.invariant_factors)}"


def _power_sum(A: IntegerMatrix, q: int) -> IntegerMatrix:
    n = A.rows
    out = IntegerMatrix.zeros(n, n)
    P = IntegerMatrix.identity(n)
    for _ in range(q):
        out = out + P
        P = P @ A
    return out


def _hom(M: PresentedModule, X: IntegerMatrix) -> GroupHom:
    A = M.abelian_group
    return GroupHom(A, A, X)


def cohomology_cyclic(M: PresentedModule, generator: int, degree: int) -> CohomologyGroup:
    """Cohomology of the cyclic subgroup generated by ``generator``.

    Degrees above two are folded back by periodicity.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    G = M.group
    q = G.element_order(generator)
    sigma = M.action[generator]
    n = M.rank
    T = IntegerMatrix.identity(n) - sigma
    s = _power_sum(sigma, q)
    A = M.abelian_group
    if degree == 0:
        zero = GroupHom(PresentedAbelianGroup(0), A, IntegerMatrix.zeros(n, 0))
        data = homology_data(zero, _hom(M, T))
    elif degree % 2 == 1:
        data = homology_data(_hom(M, T), _hom(M, s))
    else:
        data = homology_data(_hom(M, s), _hom(M, T))
    return CohomologyGroup(degree, data.group, "cyclic", data)


# ---------------------------------------------------------------------------
# Bar complex
# ---------------------------------------------------------------------------

def bar_differential(M: PresentedModule, n: int) -> IntegerMatrix:
    """Matrix of d: C^n → C^{n+1} on inhomogeneous cochains.

    A cochain is a block vector indexed by tuples (g_1..g_n) in
    lexicographic order, one block of size rank(M) per tuple.
    """
    G = M.group
    N, r = G.order, M.rank
    rows_out = r * N ** (n + 1)
    cols_out = r * N ** n
    mul = G.table
    rows: list[dict[int, int]] = [dict() for _ in range(rows_out)]
    weights = [N ** (n - 1 - i) for i in range(n)]

    def idx(t: Sequence[int]) -> int:
        return sum(a * w for a, w in zip(t, weights))

    act = [M.action[g].tolist() for g in G.elements]
    for I, t in enumerate(product(range(N), repeat=n + 1)):
        base = I * r
        # γ1 · f(γ2..γn+1)
        J = idx(t[1:])
        A = act[t[0]]
        for a in range(r):
            row = rows[base + a]
            Ar = A[a]
            for b in range(r):
                if Ar[b]:
                    key = J * r + b
                    row[key] = row.get(key, 0) + Ar[b]
        for i in range(n):
            merged = t[:i] + (mul[t[i]][t[i + 1]],) + t[i + 2:]
            J = idx(merged)
            sign = -1 if i % 2 == 0 else 1
            for a in range(r):
                row = rows[base + a]
                key = J * r + a
                row[key] = row.get(key, 0) + sign
        J = idx(t[:n])
        sign = -1 if n % 2 == 0 else 1
        for a in range(r):
            row = rows[base + a]
            key = J * r + a
            row[key] = row.get(key, 0) + sign
    dense = []
    for row in rows:
        line = [0] * cols_out
        for k, v in row.items():
            line[k] = v
        dense.append(line)
    return IntegerMatrix._raw(dense, rows_out, cols_out)


def _cochain_group(M: PresentedModule, copies: int) -> PresentedAbelianGroup:
    if M.relations.cols:
        R = IntegerMatrix.block_diagonal(*[M.relations] * copies) if copies else IntegerMatrix.zeros(0, 0)
    else:
        R = IntegerMatrix.zeros(M.rank * copies, 0)
    return PresentedAbelianGroup(M.rank * copies, R)


def bar_cochain_size(M: PresentedModule, degree: int) -> int:
    return M.rank * M.group.order ** (degree + 1)


def cohomology_bar(M: PresentedModule, degree: int, bound: int = DEFAULT_BAR_BOUND) -> CohomologyGroup:
    """H^degree from the inhomogeneous bar complex (degrees 0..3)."""
    if not 0 <= degree <= 3:
        raise ValueError("bar complex is implemented for degrees 0 to 3")
    if bar_cochain_size(M, degree) > bound:
        raise ModuleError(
            f"bar complex too large: {bar_cochain_size(M, degree)} cochain coordinates exceeds {bound}")
    N = M.group.order
    C = [_cochain_group(M, N ** k) for k in range(degree + 2)]
    d_out = GroupHom(C[degree], C[degree + 1], bar_differential(M, degree))
    if degree == 0:
        d_in = GroupHom(PresentedAbelianGroup(0), C[0], IntegerMatrix.zeros(M.rank, 0))
    else:
        d_in = GroupHom(C[degree - 1], C[degree], bar_differential(M, degree - 1))
    data = homology_data(d_in, d_out)
    return CohomologyGroup(degree, data.group, "bar", data)


# ---------------------------------------------------------------------------
# Free resolutions
# ---------------------------------------------------------------------------

class FreeResolution:
    """Free Z[G]-resolution P_n → ... → P_0 → Z with greedily chosen generators.

    ``images[n][j]`` is ∂(e_j) for the j-th generator of P_n, a vector in
    P_{n-1} = Z[G]^{m_{n-1}} indexed by ``i*|G| + g`` (meaning g·e_i).
    """

    def __init__(self, G: FiniteGroup, length: int):
        self.G = G
        self.ranks: list[int] = [1]
        self.images: list[list[tuple[int, ...]]] = [[]]
        N = G.order
        # kernel of the augmentation on P_0 = Z[G]
        K = IntegerMatrix.from_columns(
            [tuple(1 if x == g else (-1 if x == 0 else 0) for x in range(N)) for g in range(1, N)], N)
        for n in range(1, length + 1):
            gens = self._generators(K, self.ranks[-1])
            self.ranks.append(len(gens))
            self.images.append(gens)
            D = self.boundary_matrix(n)
            K = kernel_basis(D)

    def translate(self, v: Sequence[int], h: int, m: int) -> tuple[int, ...]:
        N, t = self.G.order, self.G.table[h]
        out = [0] * (m * N)
        for i in range(m):
            for g in range(N):
                x = v[i * N + g]
                if x:
                    out[i * N + t[g]] += x
        return tuple(out)

    def _generators(self, K: IntegerMatrix, m: int) -> list[tuple[int, ...]]:
        """Greedy Z[G]-generators of the Z[G]-submodule with Z-basis K."""
        N = self.G.order
        gens: list[tuple[int, ...]] = []
        span: Optional[LatticeSolver] = None
        cols: list[tuple[int, ...]] = []
        for v in K.columns():
            if span is not None and span.contains(v):
                continue
            gens.append(v)
            cols.extend(self.translate(v, h, m) for h in range(N))
            span = LatticeSolver(image_basis(IntegerMatrix.from_columns(cols, m * N)))
        return gens

    def boundary_matrix(self, n: int) -> IntegerMatrix:
        """Z-matrix of ∂_n : P_n → P_{n-1}."""
        N, m_prev = self.G.order, self.ranks[n - 1]
        cols = []
        for v in self.images[n]:
            for h in range(N):
                cols.append(self.translate(v, h, m_prev))
        return IntegerMatrix.from_columns(cols, m_prev * N)

    def cochain_differential(self, M: PresentedModule, n: int) -> IntegerMatrix:
        """d: Hom(P_{n-1}, M) → Hom(P_n, M), f ↦ f∘∂_n, as a block matrix."""
        N, r = self.G.order, M.rank
        m_prev, m = self.ranks[n - 1], self.ranks[n]
        rows = [[0] * (r * m_prev) for _ in range(r * m)]
        for j, v in enumerate(self.images[n]):
            for i in range(m_prev):
                blk = IntegerMatrix.zeros(r, r)
                for g in range(N):
                    c = v[i * N + g]
                    if c:
                        blk = blk + M.action[g] * c
                for a in range(r):
                    rows[j * r + a][i * r:(i + 1) * r] = blk.row(a)
        return IntegerMatrix._raw(rows, r * m, r * m_prev)


_RESOLUTIONS: dict[tuple, FreeResolution] = {}


def free_resolution(G: FiniteGroup, length: int) -> FreeResolution:
    key = (G.table, length)
    if key not in _RESOLUTIONS:
        _RESOLUTIONS[key] = FreeResolution(G, length)
    return _RESOLUTIONS[key]


def cohomology_resolution(M: PresentedModule, degree: int) -> CohomologyGroup:
    R = free_resolution(M.group, degree + 1)
    C = [_cochain_group(M, m) for m in R.ranks]
    d_out = GroupHom(C[degree], C[degree + 1], R.cochain_differential(M, degree + 1))
    if degree == 0:
        d_in = GroupHom(PresentedAbelianGroup(0), C[0], IntegerMatrix.zeros(M.rank, 0))
    else:
        d_in = GroupHom(C[degree - 1], C[degree], R.cochain_differential(M, degree))
    data = homology_data(d_in, d_out)
    return CohomologyGroup(degree, data.group, "resolution", data)


# ---------------------------------------------------------------------------
# Dispatch and predicates
# ---------------------------------------------------------------------------

def cohomology(M: PresentedModule, degree: int, subgroup: Optional[Subgroup] = None,
               method: str = "auto", bound: int = DEFAULT_BAR_BOUND) -> CohomologyGroup:
    """H^degree(H, M) for a subgroup H (default the whole group).

    ``auto`` uses the cyclic formulas for cyclic H, the bar complex when it
    fits in ``min(bound, AUTO_BAR_LIMIT)`` coordinates, and a free
    resolution otherwise.
    """
    if subgroup is not None:
        if subgroup.is_cyclic():
            if method in ("auto", "cyclic"):
                return cohomology_cyclic(M, subgroup.cyclic_generator(), degree)
        M = restrict(M, subgroup)
    G = M.group
    if method == "cyclic" or (method == "auto" and G.is_cyclic()):
        return cohomology_cyclic(M, G.cyclic_generator(), degree)
    if method == "bar" or (method == "auto" and degree <= 3
                           and bar_cochain_size(M, degree) <= min(bound, AUTO_BAR_LIMIT)):
        return cohomology_bar(M, degree, bound=max(bound, bar_cochain_size(M, degree)) if method == "bar" else bound)
    if method in ("auto", "resolution"):
        return cohomology_resolution(M, degree)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class SubgroupReport:
    holds: bool
    failures: list[tuple[Subgroup, CohomologyGroup]]

    def __bool__(self) -> bool:
        return self.holds


def is_coflasque(M: PresentedModule) -> SubgroupReport:
    """Free over Z with H^1(H, M) = 0 for every subgroup H."""
    if not M.is_lattice:
        raise ModuleError("coflasque is defined for lattices")
    failures = []
    for H in M.group.all_subgroups:
        c = cohomology(M, 1, subgroup=H)
        if not c.is_zero():
            failures.append((H, c))
    return SubgroupReport(not failures, failures)


def is_projective_cyclic(M: PresentedModule) -> SubgroupReport:
    """H^1 = H^2 = 0 at every level of a cyclic group; reports each failure."""
    G = M.group
    if not G.is_cyclic():
        raise ModuleError("is_projective_cyclic needs a cyclic group")
    if not M.is_lattice:
        return SubgroupReport(False, [])
    failures = []
    for H in G.all_subgroups:
        g = H.cyclic_generator()
        for d in (1, 2):
            c = cohomology_cyclic(M, g, d)
            if not c.is_zero():
                failures.append((H, c))
    return SubgroupReport(not failures, failures)


def is_projective(M: PresentedModule) -> bool:
    """Cohomological triviality on every Sylow subgroup, via two consecutive degrees."""
    if not M.is_lattice:
        return False
    for S in M.group.sylow_subgroups().values():
        R = restrict(M, S)
        if S.is_cyclic():
            if not is_projective_cyclic(R):
                return False
        else:
            for d in (1, 2):
                if not cohomology(R, d).is_zero():
                    return False
    return True


# ---------------------------------------------------------------------------
# Connecting homomorphism
# ---------------------------------------------------------------------------

@dataclass
class ConnectingMap:
    source: CohomologyGroup
    target: CohomologyGroup
    images: list[tuple[int, ...]]     # canonical coordinates of δ(generator_i)

    def image_lattice(self) -> IntegerMatrix:
        moduli = self.target.group.canonical_moduli()
        t = len(moduli)
        cols = [tuple(v) for v in self.images]
        cols += [tuple(d if i == j else 0 for i in range(t)) for j, d in enumerate(moduli) if d]
        if not cols:
            return IntegerMatrix.zeros(t, 0)
        return image_basis(IntegerMatrix.from_columns(cols, t))

    def multiple_lattice(self, k: int) -> IntegerMatrix:
        moduli = self.target.group.canonical_moduli()
        t = len(moduli)
        cols = [tuple(k if i == j else 0 for i in range(t)) for j in range(t)]
        cols += [tuple(d if i == j else 0 for i in range(t)) for j, d in enumerate(moduli) if d]
        if not cols:
            return IntegerMatrix.zeros(t, 0)
        return image_basis(IntegerMatrix.from_columns(cols, t))

    def image_is_zero(self) -> bool:
        return all(not any(v) for v in self.images)

    def image_equals_multiple(self, k: int) -> bool:
        """True iff the image equals k·H² as subgroups."""
        return lattice_equal(self.image_lattice(), self.multiple_lattice(k))

    def image_order(self) -> Optional[int]:
        t = len(self.target.group.canonical_moduli())
        whole = self.target.group.order()
        rest = PresentedAbelianGroup(t, self.image_lattice()).order()
        if whole is None or rest is None:
            return None
        return whole // rest


def _check_exact(i: ModuleMap, p: ModuleMap) -> None:
    A, B, C = i.source, i.target, p.target
    if p.source is not B and p.source.rank != B.rank:
        raise ModuleError("maps are not composable")
    if not C.contains_relations(p.matrix @ i.matrix):
        raise ModuleError("composite of the two maps is not zero")
    if not i.is_injective():
        raise ModuleError("first map is not injective")
    if not p.is_surjective():
        raise ModuleError("second map is not surjective")
    K = p.kernel_basis()
    span = IntegerMatrix.hstack(i.matrix, B.relations, rows=B.rank)
    if not lattice_contains(span, K):
        raise ModuleError("sequence is not exact in the middle")


def connecting_map(i: ModuleMap, p: ModuleMap, degree: int = 1) -> ConnectingMap:
    """δ : H^1(G, C) → H^2(G, A) for 0 → A → B → C → 0, on bar cochains."""
    if degree != 1:
        raise ValueError("only the degree-one connecting map is implemented")
    _check_exact(i, p)
    A, B, C = i.source, i.target, p.target
    G = A.group
    N = G.order
    h1 = cohomology_bar(C, 1, bound=max(DEFAULT_BAR_BOUND, bar_cochain_size(C, 1)))
    h2 = cohomology_bar(A, 2, bound=max(DEFAULT_BAR_BOUND, bar_cochain_size(A, 2)))
    lift_solver = LatticeSolver(IntegerMatrix.hstack(p.matrix, C.relations, rows=C.rank))
    back_solver = LatticeSolver(IntegerMatrix.hstack(i.matrix, B.relations, rows=B.rank))
    dB = bar_differential(B, 1)
    rc, rb, ra = C.rank, B.rank, A.rank
    images = []
    for z in h1.data.generator_cycles():
        lifted: list[int] = []
        for g in range(N):
            y = lift_solver.solve(z[g * rc:(g + 1) * rc])
            if y is None:
                raise AssertionError("surjection failed to lift a cochain value")
            lifted.extend(y[:rb])
        w = dB @ lifted
        a: list[int] = []
        for t in range(N * N):
            y = back_solver.solve(w[t * rb:(t + 1) * rb])
            if y is None:
                raise AssertionError("coboundary of the lift does not come from A")
            a.extend(y[:ra])
        images.append(h2.data.coordinates(a))
    return ConnectingMap(h1, h2, images)
