"""Finite groups given by multiplication tables.

Element 0 is always the identity.  Groups here are small (order at most a
few dozen), so every service enumerates elements directly.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Optional, Sequence

from .linalg import IntegerMatrix, smith_normal_form, lcm


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FiniteGroup:
    """A group law on ``range(order)`` with identity 0.

    ``generators`` is a generating set used to validate and extend actions;
    when omitted a small one is picked greedily.
    """

    def __init__(self, table: Sequence[Sequence[int]], name: str = "",
                 generators: Optional[Sequence[int]] = None, check: bool = True):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.name = name
        if check:
            self._validate()
        self._inv = tuple(row.index(0) for row in self.table)
        self._generators = tuple(generators) if generators is not None else None
        if self._generators is not None and check:
            if any(not 0 <= g < self.order for g in self._generators):
                raise ValueError("listed generators must be group elements")
            if self.generated_by(self._generators).order != self.order:
                raise ValueError("listed generators do not generate the group")

    def _validate(self) -> None:
        n = self.order
        if n == 0:
            raise ValueError("a group needs at least one element")
        full = set(range(n))
        for row in self.table:
            if len(row) != n or set(row) != full:
                raise ValueError("multiplication table rows must be permutations of the elements")
        for col in range(n):
            if {self.table[r][col] for r in range(n)} != full:
                raise ValueError("multiplication table columns must be permutations of the elements")
        if self.table[0] != tuple(range(n)) or any(self.table[i][0] != i for i in range(n)):
            raise ValueError("element 0 must be the identity")
        t = self.table
        for a in range(n):
            ta = t[a]
            for b in range(n):
                tab = t[ta[b]]
                tb = t[b]
                for c in range(n):
                    if tab[c] != ta[tb[c]]:
                        raise ValueError(f"multiplication is not associative at ({a}, {b}, {c})")

    # basic arithmetic ---------------------------------------------------
    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def power(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        out = 0
        for _ in range(e % self.element_order(a)):
            out = self.table[out][a]
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    @property
    def elements(self) -> range:
        return range(self.order)

    @property
    def generators(self) -> tuple[int, ...]:
        if self._generators is None:
            gens: list[int] = []
            span = {0}
            # prefer elements of large order so cyclic groups get one generator
            for a in sorted(range(1, self.order), key=lambda x: (-self.element_order(x), x)):
                if a not in span:
                    gens.append(a)
                    span = set(self.generated_by(gens).elements)
                if len(span) == self.order:
                    break
            self._generators = tuple(gens)
        return self._generators

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or self.order})"

    # subgroups ----------------------------------------------------------
    def generated_by(self, gens: Iterable[int]) -> "Subgroup":
        gens = [g for g in gens if g != 0]
        elems = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
            frontier = nxt
        return Subgroup(self, elems)

    def subgroup(self, elements: Iterable[int]) -> "Subgroup":
        return Subgroup(self, elements, check=True)

    @cached_property
    def full(self) -> "Subgroup":
        return Subgroup(self, range(self.order))

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, [0])

    @cached_property
    def all_subgroups(self) -> tuple["Subgroup", ...]:
        """Every subgroup, sorted by order and then by element set."""
        found = {s.elements: s for s in (self.generated_by([g]) for g in self.elements)}
        cyclic = list(found.values())
        frontier = list(cyclic)
        while frontier:
            nxt = []
            for a in frontier:
                for c in cyclic:
                    if set(c.elements) <= set(a.elements):
                        continue
                    j = self.generated_by(a.elements + c.elements)
                    if j.elements not in found:
                        found[j.elements] = j
                        nxt.append(j)
            frontier = nxt
        return tuple(sorted(found.values(), key=lambda s: (s.order, s.elements)))

    def sylow_subgroup(self, p: int) -> "Subgroup":
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        n, pv = self.order, 1
        while n % p == 0:
            n //= p
            pv *= p
        cands = [s for s in self.all_subgroups if s.order == pv]
        return min(cands, key=lambda s: s.elements)

    def sylow_subgroups(self) -> dict[int, "Subgroup"]:
        return {p: self.sylow_subgroup(p) for p in prime_factors(self.order)}

    @cached_property
    def exponent(self) -> int:
        return lcm(*(self.element_order(a) for a in self.elements))

    def is_cyclic(self) -> bool:
        return any(self.element_order(a) == self.order for a in self.elements)

    def cyclic_generator(self) -> int:
        """Least-index element generating the whole group."""
        for a in self.elements:
            if self.element_order(a) == self.order:
                return a
        raise ValueError("group is not cyclic")

    def all_sylow_cyclic(self) -> bool:
        return self.exponent == self.order

    def sylow_subgroups_cyclic(self) -> bool:
        """Direct check, independent of the exponent shortcut."""
        return all(s.is_cyclic() for s in self.sylow_subgroups().values())

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in self.elements for b in range(a))

    def left_cosets(self, H: "Subgroup") -> list[tuple[int, ...]]:
        """Left cosets gH as sorted tuples, ordered by least element."""
        seen: set[int] = set()
        out = []
        for g in self.elements:
            if g in seen:
                continue
            c = tuple(sorted(self.table[g][h] for h in H.elements))
            seen.update(c)
            out.append(c)
        return out

    def abelianization_invariants(self) -> tuple[int, ...]:
        return self.full.abelianization_invariants()


class Subgroup:
    """A subgroup of ``parent`` held as a sorted tuple of element indices."""

    def __init__(self, parent: FiniteGroup, elements: Iterable[int], check: bool = False):
        self.parent = parent
        self.elements = tuple(sorted(set(int(e) for e in elements)))
        if check:
            self.validate()

    def validate(self) -> None:
        t, es = self.parent.table, set(self.elements)
        if 0 not in es:
            raise ValueError("subgroup must contain the identity")
        for a in self.elements:
            if self.parent.inv(a) not in es:
                raise ValueError(f"subgroup not closed under inverses at {a}")
            for b in self.elements:
                if t[a][b] not in es:
                    raise ValueError(f"subgroup not closed under products at ({a}, {b})")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.parent is self.parent and other.elements == self.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"Subgroup({list(self.elements)})"

    def is_cyclic(self) -> bool:
        return any(self.parent.element_order(a) == self.order for a in self.elements)

    def cyclic_generator(self) -> int:
        for a in self.elements:
            if self.parent.element_order(a) == self.order:
                return a
        raise ValueError("subgroup is not cyclic")

    @cached_property
    def generators(self) -> tuple[int, ...]:
        return tuple(self.elements[i] for i in self.as_group()[0].generators)

    def is_normal(self) -> bool:
        G = self.parent
        return all(G.mul(G.mul(g, h), G.inv(g)) in self for g in G.elements for h in self.elements)

    def as_group(self) -> tuple[FiniteGroup, dict[int, int]]:
        """The subgroup as a standalone group plus the index map parent -> local."""
        if not hasattr(self, "_as_group"):
            loc = {g: i for i, g in enumerate(self.elements)}
            t = self.parent.table
            table = [[loc[t[a][b]] for b in self.elements] for a in self.elements]
            self._as_group = (FiniteGroup(table, name=f"subgroup of order {self.order}",
                                          check=False), loc)
        return self._as_group

    def abelianization_invariants(self) -> tuple[int, ...]:
        """Invariant factors of H/[H,H] from Z^H / <e_a + e_b - e_ab>."""
        H, _ = self.as_group()
        n = H.order
        cols = []
        for a in range(n):
            for b in range(n):
                v = [0] * n
                v[a] += 1
                v[b] += 1
                v[H.mul(a, b)] -= 1
                cols.append(v)
        rel = IntegerMatrix.from_columns(cols, n)
        f = smith_normal_form(rel).invariant_factors
        f = list(f) + [0] * (n - len(f))
        return tuple(d for d in f if d > 1)


# constructors -----------------------------------------------------------

def cyclic(n: int) -> FiniteGroup:
    """Z/n with the generator at index 1 (element i is the i-th power)."""
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, name=f"Z/{n}", generators=(1,) if n > 1 else (), check=False)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Element (g, h) sits at index g*|H| + h."""
    m = H.order
    table = [[G.mul(a // m, b // m) * m + H.mul(a % m, b % m)
              for b in range(G.order * m)] for a in range(G.order * m)]
    gens = [g * m for g in G.generators] + list(H.generators)
    name = f"{G.name or G.order} x {H.name or H.order}"
    return FiniteGroup(table, name=name, generators=gens, check=False)


def from_permutations(perms: Sequence[Sequence[int]], name: str = "") -> FiniteGroup:
    """The group generated by the given permutations of ``range(d)``.

    Elements are numbered in breadth-first order from the identity, so the
    given permutations become generators 1, 2, ...
    """
    d = len(perms[0]) if perms else 0
    ident = tuple(range(d))
    gens = [tuple(p) for p in perms]
    elems = [ident]
    index = {ident: 0}
    gen_idx = []
    for g in gens:
        if g not in index:
            index[g] = len(elems)
            elems.append(g)
        gen_idx.append(index[g])
    i = 0
    while i < len(elems):
        x = elems[i]
        for g in gens:
            y = tuple(x[g[k]] for k in range(d))  # x after g
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
        i += 1
    table = [[index[tuple(a[b[k]] for k in range(d))] for b in elems] for a in elems]
    return FiniteGroup(table, name=name, generators=[g for g in gen_idx if g], check=True)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n acting on an n-gon."""
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    return from_permutations([rot, ref], name=f"D{2 * n}")


def symmetric(d: int) -> FiniteGroup:
    if d < 2:
        return cyclic(1)
    cyc = list(range(1, d)) + [0]
    swap = [1, 0] + list(range(2, d))
    return from_permutations([swap, cyc], name=f"S{d}")


def alternating4() -> FiniteGroup:
    return from_permutations([[1, 2, 0, 3], [1, 0, 3, 2]], name="A4")


def quaternion() -> FiniteGroup:
    """Q8 via its left-regular action on {±1, ±i, ±j, ±k}."""
    # unit quaternions encoded as (sign, axis) with axis 0=1, 1=i, 2=j, 3=k
    prod = {(0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
            (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
            (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
            (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0)}
    units = [(s, a) for a in range(4) for s in (1, -1)]
    idx = {u: i for i, u in enumerate(units)}

    def mult(u, v):
        s, a = prod[(u[1], v[1])]
        return (u[0] * v[0] * s, a)

    perms = [[idx[mult(g, u)] for u in units] for g in (units[2], units[4])]
    return from_permutations(perms, name="Q8")
