"""Slow, obviously-correct reference computations used only by the tests."""

from __future__ import annotations

from itertools import combinations, permutations, product
from math import gcd, prod


def leibniz_det(rows: list[list[int]]) -> int:
    n = len(rows)
    total = 0
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        total += (-1) ** inv * prod(rows[i][p[i]] for i in range(n))
    return total


def determinantal_invariants(rows: list[list[int]]) -> tuple[int, ...]:
    """Invariant factors from gcds of k x k minors; zeros for the missing rank."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    d = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for R in combinations(range(m), k):
            for C in combinations(range(n), k):
                g = gcd(g, leibniz_det([[rows[i][j] for j in C] for i in R]))
        if g == 0:
            break
        d.append(g)
    facs = [d[i] // d[i - 1] for i in range(1, len(d))]
    return tuple(facs) + (0,) * (min(m, n) - len(facs))


def box_solve(rows: list[list[int]], b: list[int], bound: int) -> bool:
    n = len(rows[0]) if rows else 0
    for x in product(range(-bound, bound + 1), repeat=n):
        if all(sum(a * y for a, y in zip(r, x)) == c for r, c in zip(rows, b)):
            return True
    return False


def crossed_hom_count(G, M) -> int:
    """|Z^1(G, M)| for a finite module, by trying every value on the generators."""
    from permres.modules import enumerate_elements

    E = enumerate_elements(M)
    elems = E.elements()
    gens = list(G.generators)
    zero = tuple(0 for _ in E.moduli)

    def add(a, b):
        return tuple((x + y) % q for x, y, q in zip(a, b, E.moduli))

    count = 0
    for vals in product(elems, repeat=len(gens)):
        f = {0: zero}
        frontier = [0]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for s, v in zip(gens, vals):
                    y = G.mul(x, s)
                    val = add(f[x], E.act(x, v))      # f(xs) = f(x) + x f(s)
                    if y in f:
                        if f[y] != val:
                            ok = False
                            break
                    else:
                        f[y] = val
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if ok and all(f[G.mul(g, h)] == add(f[g], E.act(g, f[h])) for g in G.elements for h in G.elements):
            count += 1
    return count


def h1_order(G, M) -> int:
    """|H^1| = |Z^1| / |B^1| with |B^1| = |M| / |M^G|."""
    from permres.modules import enumerate_elements

    E = enumerate_elements(M)
    elems = E.elements()
    fixed = sum(1 for m in elems if all(E.act(g, m) == m for g in G.generators))
    return crossed_hom_count(G, M) * fixed // len(elems)
