"""Exact integer linear algebra.

Dense matrices over the integers, Hermite and Smith normal forms, integer
solving, kernels, and finitely presented abelian groups.  Everything here is
exact: entries are Python ints and no step can overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd
from operator import add, mul
from typing import Iterable, Optional, Sequence

Vector = tuple


class IntegerMatrix:
    """Immutable dense integer matrix stored row-major."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]] = (), rows: Optional[int] = None,
                 cols: Optional[int] = None):
        body = tuple(tuple(int(x) for x in row) for row in data)
        if rows is None:
            rows = len(body)
        if cols is None:
            cols = len(body[0]) if body else 0
        if len(body) != rows or any(len(r) != cols for r in body):
            raise ValueError(f"ragged or mis-sized matrix data for {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self._data = body

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, data, rows: int, cols: int) -> "IntegerMatrix":
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._data = tuple(tuple(r) for r in data)
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls._raw([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls._raw([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntegerMatrix":
        n = len(entries)
        return cls._raw([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntegerMatrix":
        cols = len(columns)
        for c in columns:
            if len(c) != rows:
                raise ValueError("column length mismatch")
        return cls._raw([[columns[j][i] for j in range(cols)] for i in range(rows)], rows, cols)

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries: Sequence[int]) -> "IntegerMatrix":
        if len(entries) != rows * cols:
            raise ValueError("entry count must equal rows*cols")
        return cls._raw([[int(entries[i * cols + j]) for j in range(cols)] for i in range(rows)],
                        rows, cols)

    @classmethod
    def block_diagonal(cls, *blocks: "IntegerMatrix") -> "IntegerMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = []
        c0 = 0
        for b in blocks:
            for r in b._data:
                out.append([0] * c0 + list(r) + [0] * (cols - c0 - b.cols))
            c0 += b.cols
        return cls._raw(out, rows, cols)

    @classmethod
    def hstack(cls, *blocks: "IntegerMatrix", rows: Optional[int] = None) -> "IntegerMatrix":
        if not blocks:
            return cls.zeros(rows or 0, 0)
        r = blocks[0].rows
        if any(b.rows != r for b in blocks):
            raise ValueError("hstack row mismatch")
        data = [sum((list(b._data[i]) for b in blocks), []) for i in range(r)]
        return cls._raw(data, r, sum(b.cols for b in blocks))

    @classmethod
    def vstack(cls, *blocks: "IntegerMatrix", cols: Optional[int] = None) -> "IntegerMatrix":
        if not blocks:
            return cls.zeros(0, cols or 0)
        c = blocks[0].cols
        if any(b.cols != c for b in blocks):
            raise ValueError("vstack column mismatch")
        data = [row for b in blocks for row in b._data]
        return cls._raw(data, len(data), c)

    # access -------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(x for r in self._data for x in r)

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> Vector:
        return self._data[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[Vector]:
        return [tuple(c) for c in zip(*self._data)] if self.rows else [()] * self.cols

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    @property
    def T(self) -> "IntegerMatrix":
        return IntegerMatrix._raw(self.columns(), self.cols, self.rows)

    def select_columns(self, idx: Sequence[int]) -> "IntegerMatrix":
        return IntegerMatrix._raw([[r[j] for j in idx] for r in self._data], self.rows, len(idx))

    def select_rows(self, idx: Sequence[int]) -> "IntegerMatrix":
        return IntegerMatrix._raw([self._data[i] for i in idx], len(idx), self.cols)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "IntegerMatrix":
        return IntegerMatrix._raw([r[c0:c1] for r in self._data[r0:r1]], r1 - r0, c1 - c0)

    # arithmetic ---------------------------------------------------------
    def __matmul__(self, other):
        if isinstance(other, IntegerMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            if other.cols == 0 or self.rows == 0:
                return IntegerMatrix.zeros(self.rows, other.cols)
            ocols = None
            out = []
            for r in self._data:
                nz = [k for k, x in enumerate(r) if x]
                if not nz:
                    out.append((0,) * other.cols)
                elif len(nz) * 4 < len(r):
                    # sparse row: accumulate scaled rows of the right factor
                    od = other._data
                    acc = [r[nz[0]] * x for x in od[nz[0]]]
                    for k in nz[1:]:
                        v = r[k]
                        acc = list(map(add, acc, [v * x for x in od[k]])) if v != 1 else list(map(add, acc, od[k]))
                    out.append(tuple(acc))
                else:
                    if ocols is None:
                        ocols = other.columns()
                    out.append(tuple(sum(map(mul, r, c)) for c in ocols))
            return IntegerMatrix._raw(out, self.rows, other.cols)
        v = tuple(other)
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(map(mul, r, v)) for r in self._data)

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in +")
        return IntegerMatrix._raw([[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
                                  self.rows, self.cols)

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in -")
        return IntegerMatrix._raw([[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
                                  self.rows, self.cols)

    def __neg__(self) -> "IntegerMatrix":
        return IntegerMatrix._raw([[-a for a in r] for r in self._data], self.rows, self.cols)

    def __mul__(self, k: int) -> "IntegerMatrix":
        k = int(k)
        return IntegerMatrix._raw([[k * a for a in r] for r in self._data], self.rows, self.cols)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IntegerMatrix":
        if self.rows != self.cols or e < 0:
            raise ValueError("power needs a square matrix and e >= 0")
        result = IntegerMatrix.identity(self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntegerMatrix) and self.shape == other.shape
                and self._data == other._data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        return f"IntegerMatrix({self.tolist()!r})"

    def is_zero(self) -> bool:
        return all(not x for r in self._data for x in r)

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(
            x == (i == j) for i, r in enumerate(self._data) for j, x in enumerate(r))

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k]), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            akk = a[k][k]
            for i in range(k + 1, n):
                aik = a[i][k]
                ai, ak = a[i], a[k]
                for j in range(k + 1, n):
                    ai[j] = (ai[j] * akk - aik * ak[j]) // prev
            prev = akk
        return sign * a[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1

    def rank(self) -> int:
        return len(hermite_form(self).pivots)


def as_matrix(data) -> IntegerMatrix:
    return data if isinstance(data, IntegerMatrix) else IntegerMatrix(data)


# ---------------------------------------------------------------------------
# Hermite normal form (row style)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermiteForm:
    """``transform @ A == H`` with ``H`` in row Hermite form.

    ``pivots[i]`` is the column of the leading entry of row ``i``; rows past
    ``len(pivots)`` are zero.  ``transform`` is unimodular when tracked.
    """

    H: IntegerMatrix
    pivots: tuple[int, ...]
    transform: Optional[IntegerMatrix]


def _hermite_rows(rows: list[list[int]], ncols: int, extra: int = 0) -> list[int]:
    """In-place row Hermite reduction of ``rows`` on their first ``ncols`` entries.

    Rows are inserted one at a time into an echelon basis using 2x2 Bezout
    steps, and every pivot row is kept reduced modulo the pivots below it,
    which keeps intermediate entries small.  Trailing entries past ``ncols``
    are carried along.  Returns the pivot columns.
    """
    basis: dict[int, list[int]] = {}
    order: list[int] = []
    null: list[list[int]] = []

    def reduce_below(row: list[int], start: int) -> list[int]:
        for c in order:
            if c <= start:
                continue
            x = row[c]
            if x:
                b = basis[c]
                q = x // b[c]
                if q:
                    row = [u - q * w for u, w in zip(row, b)]
        return row

    for v in rows:
        c = 0
        while True:
            while c < ncols and not v[c]:
                c += 1
            if c >= ncols:
                null.append(v)
                break
            b = basis.get(c)
            if b is None:
                if v[c] < 0:
                    v = [-u for u in v]
                basis[c] = reduce_below(v, c)
                order.append(c)
                order.sort()
                break
            a, x = b[c], v[c]
            if x % a == 0:
                q = x // a
                v = [u - q * w for u, w in zip(v, b)]
                continue
            g, s_, t_ = xgcd(a, x)
            ag, xg = a // g, x // g
            nb = [s_ * w + t_ * u for w, u in zip(b, v)]
            v = [ag * u - xg * w for u, w in zip(v, b)]
            if nb[c] < 0:
                nb = [-u for u in nb]
            basis[c] = reduce_below(nb, c)
    pivots = sorted(basis)
    # reduce above pivots, top-down so later columns are settled last
    for i in range(len(pivots)):
        c = pivots[i]
        b = basis[c]
        p = b[c]
        for j in range(i):
            r = basis[pivots[j]]
            q = r[c] // p
            if q:
                basis[pivots[j]] = [u - q * w for u, w in zip(r, b)]
    rows[:] = [basis[c] for c in pivots] + null
    return pivots


def _reduce_null_rows(T: list[list[int]], r: int) -> None:
    """Shrink transform rows ``T[r:]`` that annihilate the input.

    Those rows can be replaced by any basis of their span, and any multiple
    of them can be added to ``T[:r]``, without changing ``T @ A``.  The null
    rows are LLL-reduced and the other rows are size-reduced against them.
    """
    null = T[r:]
    if not null:
        return
    st = lll_rows(null)
    T[r:] = null
    for i in range(r):
        T[i] = size_reduce(T[i], null, st)


def hermite_form(A: IntegerMatrix, transform: bool = False, reduce_null: bool = True) -> HermiteForm:
    """Row Hermite normal form; entries above each pivot reduced into [0, pivot).

    With ``reduce_null=False`` the transform rows that annihilate ``A`` are
    left as produced, which is cheaper when only the pivot rows matter.
    """
    m, n = A.rows, A.cols
    if transform:
        rows = [list(r) + [int(i == j) for j in range(m)] for i, r in enumerate(A._data)]
    else:
        rows = [list(r) for r in A._data]
    pivots = _hermite_rows(rows, n)
    H = IntegerMatrix._raw([r[:n] for r in rows], m, n)
    T = None
    if transform:
        Tr = [r[n:] for r in rows]
        if reduce_null:
            _reduce_null_rows(Tr, len(pivots))
        T = IntegerMatrix._raw(Tr, m, m)
    return HermiteForm(H, tuple(pivots), T)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

class SmithDecomposition:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` diagonal.

    The exact inverses ``U_inv`` and ``V_inv`` are computed on first access;
    change-of-basis code downstream needs both directions.
    """

    def __init__(self, U: IntegerMatrix, S: IntegerMatrix, V: IntegerMatrix,
                 invariant_factors: tuple[int, ...]):
        self.U = U
        self.S = S
        self.V = V
        self.invariant_factors = invariant_factors
        self._U_inv: Optional[IntegerMatrix] = None
        self._V_inv: Optional[IntegerMatrix] = None

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d)

    @property
    def U_inv(self) -> IntegerMatrix:
        if self._U_inv is None:
            self._U_inv = unimodular_inverse(self.U)
        return self._U_inv

    @property
    def V_inv(self) -> IntegerMatrix:
        if self._V_inv is None:
            self._V_inv = unimodular_inverse(self.V)
        return self._V_inv

    def __repr__(self) -> str:
        return f"SmithDecomposition(invariant_factors={self.invariant_factors})"


def unimodular_inverse(U: IntegerMatrix) -> IntegerMatrix:
    hf = hermite_form(U, transform=True)
    if not hf.H.is_identity():
        raise ValueError("matrix is not unimodular")
    return hf.transform


def _is_diagonal(rows: list[list[int]]) -> bool:
    return all(not x for i, r in enumerate(rows) for j, x in enumerate(r) if i != j)


def smith_normal_form(A: IntegerMatrix) -> SmithDecomposition:
    """Smith normal form by alternating row and column Hermite reductions.

    Each Hermite pass inserts rows one at a time with 2x2 Bézout steps and
    reduces entries above pivots, so coefficients stay small and the output
    is deterministic.  A final sweep of 2x2 gcd/lcm moves enforces the
    divisibility chain, and the kernel rows of both transforms are
    LLL-reduced.
    """
    m, n = A.rows, A.cols
    D = A.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Vt = [[int(i == j) for j in range(n)] for i in range(n)]
    on_rows = True
    first = True
    # At least one pass so zero rows of an already diagonal input sink.
    while first or not _is_diagonal(D):
        first = False
        if on_rows:
            rows = [D[i] + U[i] for i in range(m)]
            _hermite_rows(rows, n)
            D = [r[:n] for r in rows]
            U = [r[n:] for r in rows]
        else:
            Dt = [list(c) for c in zip(*D)] if m else [[] for _ in range(n)]
            rows = [Dt[i] + Vt[i] for i in range(n)]
            _hermite_rows(rows, m)
            Dt = [r[:m] for r in rows]
            Vt = [r[m:] for r in rows]
            D = [list(c) for c in zip(*Dt)] if n else [[] for _ in range(m)]
        on_rows = not on_rows

    k = min(m, n)
    for i in range(k):
        if D[i][i] < 0:
            D[i][i] = -D[i][i]
            U[i] = [-a for a in U[i]]
    diag = [D[i][i] for i in range(k)]
    # Nonzero entries come first after Hermite passes; enforce d_i | d_j.
    r = sum(1 for d in diag if d)
    for i in range(r):
        for j in range(i + 1, r):
            a, b = diag[i], diag[j]
            if b % a == 0:
                continue
            g, x, y = xgcd(a, b)
            # rows: [[x, y], [-b/g, a/g]]; columns: [[1, -y b/g], [1, x a/g]]
            ui, uj = U[i], U[j]
            U[i] = [x * p + y * q for p, q in zip(ui, uj)]
            U[j] = [(-b // g) * p + (a // g) * q for p, q in zip(ui, uj)]
            vi, vj = Vt[i], Vt[j]
            Vt[i] = [p + q for p, q in zip(vi, vj)]
            Vt[j] = [(-y * b // g) * p + (x * a // g) * q for p, q in zip(vi, vj)]
            diag[i], diag[j] = g, a * b // g
    for i in range(k):
        D[i][i] = diag[i]
    _reduce_null_rows(U, r)
    _reduce_null_rows(Vt, r)
    return SmithDecomposition(
        U=IntegerMatrix._raw(U, m, m),
        S=IntegerMatrix._raw(D, m, n),
        V=IntegerMatrix._raw(Vt, n, n).T,
        invariant_factors=tuple(diag),
    )


# ---------------------------------------------------------------------------
# Solving, kernels, images
# ---------------------------------------------------------------------------

def solve_integer(A: IntegerMatrix, b: Sequence[int]) -> Optional[Vector]:
    """Integer solution of ``A x = b`` through the Smith decomposition.

    Free parameters are set to zero, so the answer is deterministic.  Returns
    None when no integer solution exists.
    """
    b = tuple(b)
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {A.rows}")
    snf = smith_normal_form(A)
    c = snf.U @ b
    y = [0] * A.cols
    for i, ci in enumerate(c):
        d = snf.invariant_factors[i] if i < len(snf.invariant_factors) else 0
        if d == 0:
            if ci:
                return None
        else:
            q, r = divmod(ci, d)
            if r:
                return None
            y[i] = q
    return snf.V @ y


class LatticeSolver:
    """Repeated integer solves ``B x = v`` against a fixed generator matrix ``B``.

    Uses a one-sided Hermite reduction of ``B^T``, which is much cheaper than
    a full Smith decomposition when many right-hand sides share one ``B``.
    """

    def __init__(self, B: IntegerMatrix):
        self.B = B
        hf = hermite_form(B.T)
        self._H = hf.H
        self._pivots = hf.pivots
        self._T: Optional[IntegerMatrix] = None
        self.rank = len(hf.pivots)

    def _transform(self) -> list[list[int]]:
        if self._T is None:
            hf = hermite_form(self.B.T, transform=True)
            self._T = hf.transform
        return self._T._data

    def _reduce(self, v: Sequence[int]) -> Optional[list[int]]:
        H = self._H._data
        y = []
        resid = list(v)
        for i, pc in enumerate(self._pivots):
            row = H[i]
            q, r = divmod(resid[pc], row[pc])
            if r:
                return None
            y.append(q)
            if q:
                resid = [a - q * b for a, b in zip(resid, row)]
        return None if any(resid) else y

    def solve(self, v: Sequence[int]) -> Optional[Vector]:
        v = list(v)
        if len(v) != self.B.rows:
            raise ValueError("right-hand side length mismatch")
        y = self._reduce(v)
        if y is None:
            return None
        T = self._transform()
        out = [0] * self.B.cols
        for i, q in enumerate(y):
            if q:
                out = [a + q * b for a, b in zip(out, T[i])]
        return tuple(out)

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.B.rows:
            raise ValueError("right-hand side length mismatch")
        return self._reduce(v) is not None

    def contains_columns(self, M: IntegerMatrix) -> bool:
        return all(self.contains(c) for c in M.columns())

    def solve_columns(self, M: IntegerMatrix) -> Optional[IntegerMatrix]:
        cols = []
        for c in M.columns():
            x = self.solve(c)
            if x is None:
                return None
            cols.append(x)
        return IntegerMatrix.from_columns(cols, self.B.cols)


def kernel_basis(A: IntegerMatrix) -> IntegerMatrix:
    """Columns form a Z-basis of ``{x : A x = 0}`` (Hermite-reduced)."""
    n = A.cols
    if A.rows == 0:
        return IntegerMatrix.identity(n)
    hf = hermite_form(A.T, transform=True)
    r = len(hf.pivots)
    ker_rows = [list(hf.transform._data[i]) for i in range(r, n)]
    if not ker_rows:
        return IntegerMatrix.zeros(n, 0)
    return IntegerMatrix._raw(ker_rows, len(ker_rows), n).T


def image_basis(A: IntegerMatrix) -> IntegerMatrix:
    """Columns form the Hermite basis of the column span of ``A``."""
    hf = hermite_form(A.T)
    r = len(hf.pivots)
    return IntegerMatrix._raw(hf.H._data[:r], r, A.rows).T


def lattice_contains(B: IntegerMatrix, C: IntegerMatrix) -> bool:
    """True iff every column of ``C`` lies in the column span of ``B``."""
    if C.cols == 0:
        return True
    if B.cols == 0:
        return C.is_zero()
    return LatticeSolver(B).contains_columns(C)


def lattice_equal(B: IntegerMatrix, C: IntegerMatrix) -> bool:
    return lattice_contains(B, C) and lattice_contains(C, B)


def lattice_sum(*Bs: IntegerMatrix) -> IntegerMatrix:
    return image_basis(IntegerMatrix.hstack(*Bs))


def lattice_intersection(B: IntegerMatrix, C: IntegerMatrix) -> IntegerMatrix:
    """Basis of colspan(B) ∩ colspan(C); inputs need not be bases."""
    if B.cols == 0 or C.cols == 0:
        return IntegerMatrix.zeros(B.rows, 0)
    K = kernel_basis(IntegerMatrix.hstack(B, -C))
    if K.cols == 0:
        return IntegerMatrix.zeros(B.rows, 0)
    return image_basis(B @ K.block(0, B.cols, 0, K.cols))


def is_saturated(B: IntegerMatrix) -> bool:
    """True iff Z^n / colspan(B) is torsion-free."""
    if B.cols == 0:
        return True
    return all(d in (0, 1) for d in smith_normal_form(B).invariant_factors)


def left_inverse(B: IntegerMatrix) -> IntegerMatrix:
    """Integer ``L`` with ``L @ B = I`` for a saturated full-column-rank ``B``."""
    snf = smith_normal_form(B)
    k = B.cols
    if snf.invariant_factors[:k] != (1,) * k:
        raise ValueError("matrix has no integer left inverse (not a saturated basis)")
    return snf.V @ snf.U.block(0, k, 0, B.rows)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def bezout(values: Sequence[int]) -> tuple[int, list[int]]:
    """gcd of ``values`` with coefficients ``c`` such that sum(c*v) = gcd."""
    g, coeffs = 0, []
    for v in values:
        g2, x, y = xgcd(g, v)
        coeffs = [c * x for c in coeffs] + [y]
        g = g2
    return g, coeffs


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b) if a and b else 0, values, 1)


# ---------------------------------------------------------------------------
# Finitely presented abelian groups
# ---------------------------------------------------------------------------

class PresentedAbelianGroup:
    """The group ``Z^rank / colspan(relations)``."""

    def __init__(self, rank: int, relations: Optional[IntegerMatrix] = None):
        if relations is None:
            relations = IntegerMatrix.zeros(rank, 0)
        if relations.rows != rank:
            raise ValueError("relation vectors must live in Z^rank")
        self.rank = rank
        self.relations = relations
        self._snf: Optional[SmithDecomposition] = None

    @property
    def smith(self) -> SmithDecomposition:
        if self._snf is None:
            self._snf = smith_normal_form(self.relations)
        return self._snf

    def _diagonal(self) -> list[int]:
        f = list(self.smith.invariant_factors)
        return f + [0] * (self.rank - len(f))

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Non-unit factors in divisibility order; trailing zeros are free rank."""
        d = self._diagonal()
        torsion = sorted(x for x in d if x > 1)
        return tuple(torsion) + (0,) * sum(1 for x in d if x == 0)

    @property
    def torsion_factors(self) -> tuple[int, ...]:
        return tuple(x for x in self.invariant_factors if x)

    @property
    def free_rank(self) -> int:
        return sum(1 for x in self.invariant_factors if x == 0)

    def order(self) -> Optional[int]:
        if self.free_rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def exponent(self) -> Optional[int]:
        if self.free_rank:
            return None
        return lcm(*self.invariant_factors) if self.invariant_factors else 1

    def canonical_coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of ``x`` in the invariant-factor decomposition.

        One entry per non-unit diagonal entry, reduced modulo it (free
        coordinates are returned unreduced).
        """
        y = self.smith.U @ tuple(x)
        out = []
        for yi, d in zip(y, self._diagonal()):
            if d == 1:
                continue
            out.append(yi % d if d else yi)
        return tuple(out)

    def canonical_moduli(self) -> tuple[int, ...]:
        return tuple(d for d in self._diagonal() if d != 1)

    def canonical_generators(self) -> list[Vector]:
        """Lifts to Z^rank of the generators of the cyclic factors."""
        Ui = self.smith.U_inv
        return [Ui.column(i) for i, d in enumerate(self._diagonal()) if d != 1]

    def is_zero_element(self, x: Sequence[int]) -> bool:
        return all(c == 0 for c in self.canonical_coordinates(x))

    def __eq__(self, other) -> bool:
        return isinstance(other, PresentedAbelianGroup) and self.invariant_factors == other.invariant_factors

    def __hash__(self):
        return hash(self.invariant_factors)

    def __str__(self) -> str:
        return format_invariants(self.invariant_factors)

    def __repr__(self) -> str:
        return f"PresentedAbelianGroup({self})"


def format_invariants(factors: Sequence[int]) -> str:
    if not factors:
        return "0"
    return " + ".join("Z" if d == 0 else f"Z/{d}" for d in factors)


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism of presented abelian groups given on ambient lattices."""

    source: PresentedAbelianGroup
    target: PresentedAbelianGroup
    matrix: IntegerMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.rank, self.source.rank):
            raise ValueError("map matrix has the wrong shape")
        img = self.matrix @ self.source.relations
        if not lattice_contains(self.target.relations, img):
            raise ValueError("map does not send source relations into target relations")

    def is_zero(self) -> bool:
        return lattice_contains(self.target.relations, self.matrix)


@dataclass
class HomologyData:
    group: PresentedAbelianGroup
    cycles: IntegerMatrix           # basis of ker(f_out) inside the middle ambient lattice
    solver: LatticeSolver           # solves against ``cycles``

    def coordinates(self, z: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates of the class of a cycle ``z``."""
        y = self.solver.solve(z)
        if y is None:
            raise ValueError("vector is not a cycle")
        return self.group.canonical_coordinates(y)

    def generator_cycles(self) -> list[Vector]:
        return [self.cycles @ g for g in self.group.canonical_generators()]


def _subgroup_kernel(F: IntegerMatrix, R_target: IntegerMatrix) -> IntegerMatrix:
    """Basis of ``{x : F x ∈ colspan(R_target)}``."""
    b = F.cols
    if R_target.cols == 0:
        return kernel_basis(F)
    K = kernel_basis(IntegerMatrix.hstack(F, R_target))
    return image_basis(K.block(0, b, 0, K.cols))


def homology_data(f_in: GroupHom, f_out: GroupHom) -> HomologyData:
    if f_in.target.rank != f_out.source.rank:
        raise ValueError("maps are not composable")
    comp = f_out.matrix @ f_in.matrix
    if not lattice_contains(f_out.target.relations, comp):
        raise ValueError("composite of the two maps is not zero")
    middle = f_in.target
    Kb = _subgroup_kernel(f_out.matrix, f_out.target.relations)
    solver = LatticeSolver(Kb)
    boundaries = IntegerMatrix.hstack(f_in.matrix, middle.relations)
    rel = solver.solve_columns(boundaries)
    if rel is None:
        raise AssertionError("boundaries not inside cycles")
    return HomologyData(PresentedAbelianGroup(Kb.cols, rel), Kb, solver)


def homology(f_in: GroupHom, f_out: GroupHom) -> PresentedAbelianGroup:
    """``ker(f_out) / im(f_in)`` in canonical invariant-factor form."""
    return homology_data(f_in, f_out).group


def free_group(rank: int) -> PresentedAbelianGroup:
    return PresentedAbelianGroup(rank)


# ---------------------------------------------------------------------------
# Elimination over a prime field
# ---------------------------------------------------------------------------

class FpEchelon:
    """Incremental row echelon basis over Z/p; ``add`` reports independence."""

    def __init__(self, p: int, dim: int):
        self.p = p
        self.dim = dim
        self.rows: dict[int, list[int]] = {}   # pivot column -> normalized row

    def reduce(self, v: Sequence[int]) -> list[int]:
        p = self.p
        w = [x % p for x in v]
        for c in sorted(self.rows):
            if w[c]:
                f = w[c]
                r = self.rows[c]
                w = [(a - f * b) % p for a, b in zip(w, r)]
        return w

    def add(self, v: Sequence[int]) -> bool:
        w = self.reduce(v)
        piv = next((i for i, x in enumerate(w) if x), None)
        if piv is None:
            return False
        inv = pow(w[piv], -1, self.p)
        w = [(x * inv) % self.p for x in w]
        for c, r in self.rows.items():
            if r[piv]:
                f = r[piv]
                self.rows[c] = [(a - f * b) % self.p for a, b in zip(r, w)]
        self.rows[piv] = w
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def rank_mod_p(A: IntegerMatrix, p: int) -> int:
    ech = FpEchelon(p, A.cols)
    for r in A._data:
        ech.add(r)
    return ech.rank


# ---------------------------------------------------------------------------
# Basis size reduction against a positive definite form
# ---------------------------------------------------------------------------

class _LLLState:
    """Integral LLL on a positive definite Gram matrix (fraction-free).

    ``d[i]`` is the Gram determinant of the first ``i`` vectors and
    ``lam[k][j] = d[j+1] * mu_kj``, so every quantity stays an integer.
    Rows of ``U`` express the current basis in the original one.
    """

    def __init__(self, gram: list[list[int]]):
        n = len(gram)
        self.n = n
        self.G = [row[:] for row in gram]
        self.U = [[int(i == j) for j in range(n)] for i in range(n)]
        self.d = [1] + [0] * n
        self.lam = [[0] * n for _ in range(n)]
        self.kmax = -1

    def _gs(self, k: int) -> None:
        G, d, lam = self.G, self.d, self.lam
        for j in range(k + 1):
            u = G[k][j]
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u <= 0:
                    raise ValueError("Gram matrix is not positive definite")
                d[k + 1] = u

    def _red(self, k: int, l: int) -> None:
        d, lam = self.d, self.lam
        dl = d[l + 1]
        x = lam[k][l]
        if 2 * abs(x) <= dl:
            return
        q = (2 * x + dl) // (2 * dl)
        G, U = self.G, self.U
        U[k] = [a - q * b for a, b in zip(U[k], U[l])]
        gkl = G[k][l]
        gll = G[l][l]
        row = [a - q * b for a, b in zip(G[k], G[l])]
        row[k] = G[k][k] - 2 * q * gkl + q * q * gll
        G[k] = row
        for r in range(self.n):
            if r != k:
                G[r][k] = row[r]
        lam[k][l] = x - q * dl
        lk, ll = lam[k], lam[l]
        for i in range(l):
            lk[i] -= q * ll[i]

    def _swap(self, k: int) -> None:
        G, U, d, lam = self.G, self.U, self.d, self.lam
        U[k], U[k - 1] = U[k - 1], U[k]
        G[k], G[k - 1] = G[k - 1], G[k]
        for row in G:
            row[k], row[k - 1] = row[k - 1], row[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        x = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + x * x) // d[k]
        for i in range(k + 1, self.kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - x * t) // d[k]
            lam[i][k - 1] = (B * t + x * lam[i][k]) // d[k + 1]
        d[k] = B

    def run(self) -> None:
        n = self.n
        if n == 0:
            return
        self._gs(0)
        self.kmax = 0
        k = 1
        while k < n:
            if k > self.kmax:
                self.kmax = k
                self._gs(k)
            self._red(k, k - 1)
            d = self.d
            x = self.lam[k][k - 1]
            if 4 * d[k + 1] * d[k - 1] < 3 * d[k] * d[k] - 4 * x * x:
                self._swap(k)
                k = max(1, k - 1)
            else:
                for l in range(k - 2, -1, -1):
                    self._red(k, l)
                k += 1


def lll_reduce(gram: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix]:
    """Unimodular B (with inverse) such that B^T gram B is LLL-reduced.

    ``gram`` must be positive definite.  Columns of B are the new basis
    vectors in the old coordinates.  Exact integer arithmetic throughout.
    """
    st = _LLLState([list(r) for r in gram._data])
    st.run()
    n = gram.rows
    B = IntegerMatrix._raw(st.U, n, n).T
    return B, unimodular_inverse(B)


def lll_rows(rows: list[list[int]]) -> _LLLState:
    """LLL-reduce linearly independent integer rows in place (standard inner product)."""
    gram = [[sum(map(mul, a, b)) for b in rows] for a in rows]
    st = _LLLState(gram)
    st.run()
    U = st.U
    width = len(rows[0]) if rows else 0
    new = []
    for u in U:
        acc = [0] * width
        for c, r in zip(u, rows):
            if c:
                acc = [x + c * y for x, y in zip(acc, r)]
        new.append(acc)
    rows[:] = new
    return st


def size_reduce(v: list[int], basis: list[list[int]], st: _LLLState) -> list[int]:
    """Subtract integer combinations of ``basis`` (reduced by ``st``) to shrink v.

    After the call |mu_j| <= 1/2 for the Gram-Schmidt coefficients of v.
    """
    k = len(basis)
    if not k:
        return v
    d, lam = st.d, st.lam
    ip = [sum(map(mul, v, b)) for b in basis]
    lv = [0] * k
    for j in range(k):
        u = ip[j]
        for i in range(j):
            u = (d[i + 1] * u - lv[i] * lam[j][i]) // d[i]
        lv[j] = u
    for l in range(k - 1, -1, -1):
        dl = d[l + 1]
        x = lv[l]
        if 2 * abs(x) <= dl:
            continue
        q = (2 * x + dl) // (2 * dl)
        v = [a - q * b for a, b in zip(v, basis[l])]
        lv[l] = x - q * dl
        for i in range(l):
            lv[i] -= q * lam[l][i]
    return v

