"""Exact integer and mod-n matrix arithmetic.

Everything mod ``n`` goes through one routine: lift the matrix to the
integers, append ``n * I`` as extra columns, and take the Smith normal form
of the result.  Kernels, solutions and span membership are then read off the
transforms ``U`` and ``V``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import InputError


class IntMatrix:
    """Immutable integer matrix with explicit shape (so 0-row / 0-column matrices keep their size)."""

    __slots__ = ("rows", "cols", "data", "_hash")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable[int]] = ()):
        data = tuple(tuple(int(x) for x in row) for row in data)
        if not data and rows:
            data = tuple((0,) * cols for _ in range(rows))
        if len(data) != rows or any(len(row) != cols for row in data):
            raise InputError(f"matrix data does not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.data = data
        self._hash = None

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        columns = [list(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise InputError(f"column of length {len(c)} in a {rows}-row matrix")
        return cls(rows, len(columns), [[c[i] for c in columns] for i in range(rows)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, size: int, scale: int = 1) -> "IntMatrix":
        return cls(size, size, [[scale if i == j else 0 for j in range(size)] for i in range(size)])

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntMatrix":
        k = len(entries)
        return cls(k, k, [[entries[i] if i == j else 0 for j in range(k)] for i in range(k)])

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, {[list(r) for r in self.data]})"

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.data))
        return self._hash

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    @property
    def shape(self):
        return self.rows, self.cols

    def tolist(self) -> list:
        return [list(r) for r in self.data]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.data)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, [self.column(j) for j in range(self.cols)])

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ocols = other.columns()
        return IntMatrix(self.rows, other.cols,
                         [[sum(a * b for a, b in zip(row, col)) for col in ocols] for row in self.data])

    def apply(self, vec: Sequence[int]) -> tuple:
        if len(vec) != self.cols:
            raise InputError(f"vector of length {len(vec)} for a matrix with {self.cols} columns")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.data)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise InputError("shape mismatch in matrix addition")
        return IntMatrix(self.rows, self.cols,
                         [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [[k * a for a in r] for r in self.data])

    def mod(self, n: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [[a % n for a in r] for r in self.data])

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)

    def select_rows(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(idx), self.cols, [self.data[i] for i in idx])

    def select_columns(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(self.rows, len(idx), [[r[j] for j in idx] for r in self.data])

    def hstack(self, *others: "IntMatrix") -> "IntMatrix":
        for o in others:
            if o.rows != self.rows:
                raise InputError("row count mismatch in hstack")
        rows = [list(r) for r in self.data]
        for o in others:
            for r, extra in zip(rows, o.data):
                r.extend(extra)
        return IntMatrix(self.rows, self.cols + sum(o.cols for o in others), rows)

    def vstack(self, *others: "IntMatrix") -> "IntMatrix":
        for o in others:
            if o.cols != self.cols:
                raise InputError("column count mismatch in vstack")
        data = list(self.data)
        for o in others:
            data.extend(o.data)
        return IntMatrix(self.rows + sum(o.rows for o in others), self.cols, data)

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        rows = []
        for ra in self.data:
            for rb in other.data:
                rows.append([a * b for a in ra for b in rb])
        return IntMatrix(self.rows * other.rows, self.cols * other.cols, rows)


def block_diag(*blocks: IntMatrix) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = []
    offset = 0
    for b in blocks:
        for r in b.data:
            data.append([0] * offset + list(r) + [0] * (cols - offset - b.cols))
        offset += b.cols
    return IntMatrix(rows, cols, data)


def egcd(a: int, b: int) -> tuple:
    """Return ``(g, u, v)`` with ``g = gcd(a, b) >= 0`` and ``u*a + v*b == g``."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


@dataclass(frozen=True)
class SnfResult:
    """``U @ M @ V == S`` with ``U``, ``V`` unimodular and ``S`` diagonal in divisibility order.

    ``U_inv`` is carried along because module coordinates need both directions.
    """

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix

    @property
    def diagonal(self) -> list:
        return [self.S[i, i] for i in range(min(self.S.rows, self.S.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _near_quotient(a: int, p: int) -> int:
    # p > 0; quotient with remainder in (-p/2, p/2]
    q, r = divmod(a, p)
    if 2 * r > p:
        q += 1
    return q


def _smith(M: IntMatrix, modulus: Optional[int] = None):
    # Diagonalizes a copy of M.  With ``modulus`` set, U, U_inv and V are only
    # tracked mod ``modulus``; the diagonal itself is always exact.
    m, k = M.rows, M.cols
    A = [list(r) for r in M.data]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(k)] for i in range(k)]

    # row op: row_i += c * row_t  (U_inv gets col_t -= c * col_i)
    def row_add(i, t, c):
        if c == 0:
            return
        Ai, At = A[i], A[t]
        for j in range(k):
            if At[j]:
                Ai[j] += c * At[j]
        Ui_, Ut = U[i], U[t]
        for j in range(m):
            if Ut[j]:
                Ui_[j] += c * Ut[j]
        for r in Ui:
            if r[i]:
                r[t] -= c * r[i]
        if modulus:
            U[i] = [x % modulus for x in Ui_]
            for r in Ui:
                r[t] %= modulus

    def row_swap(i, t):
        A[i], A[t] = A[t], A[i]
        U[i], U[t] = U[t], U[i]
        for r in Ui:
            r[i], r[t] = r[t], r[i]

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_add(j, t, c):
        # col_j += c * col_t
        if c == 0:
            return
        for r in A:
            if r[t]:
                r[j] += c * r[t]
        for r in V:
            if r[t]:
                r[j] += c * r[t]
                if modulus:
                    r[j] %= modulus

    def col_swap(j, t):
        for r in A:
            r[j], r[t] = r[t], r[j]
        for r in V:
            r[j], r[t] = r[t], r[j]

    for t in range(min(m, k)):
        while True:
            best = None
            for i in range(t, m):
                Ai = A[i]
                for j in range(t, k):
                    a = Ai[j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                row_swap(pi, t)
            if pj != t:
                col_swap(pj, t)
            if A[t][t] < 0:
                row_neg(t)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -_near_quotient(A[i][t], p))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, k):
                if A[t][j]:
                    col_add(j, t, -_near_quotient(A[t][j], p))
                    if A[t][j]:
                        dirty = True
            if dirty:
                continue
            # pivot must divide the rest of the active block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, k):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if best is None:
            break

    return A, U, V, Ui


def snf(M: IntMatrix) -> SnfResult:
    """Smith normal form with exact unimodular transforms.

    Pivot: smallest nonzero absolute value in the active block, ties broken
    by lowest (row, col).
    """
    A, U, V, Ui = _smith(M)
    m, k = M.rows, M.cols
    return SnfResult(IntMatrix(m, k, A), IntMatrix(m, m, U), IntMatrix(k, k, V), IntMatrix(m, m, Ui))


@dataclass(frozen=True)
class LiftedSnf:
    """SNF data of ``[M | n*I]`` with transforms reduced mod ``n``.

    ``diagonal`` has one entry per row of ``M``, each a divisor of ``n``.
    ``U @ [M | nI] @ V == S`` holds mod ``n`` only, which is all the mod-n
    routines need.
    """

    n: int
    diagonal: tuple
    U: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix


@lru_cache(maxsize=8192)
def lifted_snf(M: IntMatrix, n: int) -> LiftedSnf:
    """SNF of ``[M | n*I]`` with ``M`` taken to symmetric residues mod ``n``; cached per (M, n)."""
    half = n // 2
    red = IntMatrix(M.rows, M.cols, [[(a % n) - n if (a % n) > half else a % n for a in r] for r in M.data])
    lifted = red.hstack(IntMatrix.identity(M.rows, n))
    A, U, V, Ui = _smith(lifted, modulus=n)
    m, k = lifted.rows, lifted.cols
    return LiftedSnf(n, tuple(A[i][i] for i in range(m)), IntMatrix(m, m, U).mod(n),
                     IntMatrix(k, k, V).mod(n), IntMatrix(m, m, Ui).mod(n))


def _check_modulus(n: int):
    if n < 2:
        raise InputError(f"modulus must be >= 2, got {n}")


def kernel_mod(M: IntMatrix, n: int) -> IntMatrix:
    """Columns generating ``{x in (Z/n)^k : M x = 0 mod n}``."""
    _check_modulus(n)
    m, k = M.rows, M.cols
    res = lifted_snf(M, n)
    # [M | nI] has full row rank m, so the last k columns of V span its integer kernel
    cols = []
    seen = set()
    for j in range(m, m + k):
        col = tuple(res.V[i, j] % n for i in range(k))
        if any(col) and col not in seen:
            seen.add(col)
            cols.append(col)
    return IntMatrix.from_columns(cols, k)


def solve_mod(M: IntMatrix, b: Sequence[int], n: int) -> Optional[tuple]:
    """Some ``x`` with ``M x = b (mod n)``, or ``None`` when no solution exists."""
    _check_modulus(n)
    if len(b) != M.rows:
        raise InputError(f"right-hand side of length {len(b)} for a {M.rows}-row matrix")
    m, k = M.rows, M.cols
    res = lifted_snf(M, n)
    ub = res.U.apply([x % n for x in b])
    w = []
    for i in range(m):
        s = res.diagonal[i]
        if ub[i] % s:
            return None
        w.append(ub[i] // s)
    z = [sum(res.V[i, j] * w[j] for j in range(m)) for i in range(k)]
    return tuple(x % n for x in z)


def span_membership(M: IntMatrix, v: Sequence[int], n: int) -> bool:
    """True iff ``v`` lies in the column span of ``M`` over Z/n."""
    if not any(x % n for x in v):
        if len(v) != M.rows:
            raise InputError(f"vector of length {len(v)} for a {M.rows}-row matrix")
        return True
    return solve_mod(M, v, n) is not None


def divisors(n: int) -> list:
    return [d for d in range(1, n + 1) if n % d == 0]
