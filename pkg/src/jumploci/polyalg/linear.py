"""Exact linear algebra over Q and Z: echelon forms, subspaces, Smith normal form."""

from __future__ import annotations

from typing import List, Sequence, Tuple

from gmpy2 import mpq

from .poly import Polynomial

Vector = Tuple[mpq, ...]


def rref(rows: Sequence[Sequence]) -> Tuple[List[List[mpq]], List[int]]:
    """Reduced row echelon form over Q, zero rows dropped; returns (rows, pivots)."""
    mat = [[mpq(x) for x in r] for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[List[mpq]]:
    """Basis of {x : A x = 0} for A given by rows."""
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


class LinearSubspace:
    """A subspace of Q^n stored by its canonical (RREF) basis."""

    __slots__ = ("n", "basis")

    def __init__(self, n: int, vectors: Sequence[Sequence] = ()):
        for v in vectors:
            if len(v) != n:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {n}")
        red, _ = rref(vectors)
        self.n = n
        self.basis: Tuple[Vector, ...] = tuple(tuple(r) for r in red)

    @classmethod
    def coordinate(cls, n: int, indices: Sequence[int]) -> "LinearSubspace":
        vecs = []
        for i in indices:
            v = [0] * n
            v[i] = 1
            vecs.append(v)
        return cls(n, vecs)

    @classmethod
    def from_equations(cls, n: int, equations: Sequence[Sequence]) -> "LinearSubspace":
        return cls(n, nullspace(equations, n) if equations else _identity(n))

    @classmethod
    def whole(cls, n: int) -> "LinearSubspace":
        return cls(n, _identity(n))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def equations(self) -> List[List[mpq]]:
        """Basis of the annihilator: linear forms cutting out the subspace."""
        return nullspace(self.basis, self.n) if self.basis else _identity(self.n)

    def defining_forms(self) -> List[Polynomial]:
        return [Polynomial.linear_form(row) for row in self.equations()]

    def contains_point(self, v: Sequence) -> bool:
        if len(v) != self.n:
            raise ValueError("ambient mismatch")
        return rank(list(self.basis) + [list(v)]) == self.dim

    def contains(self, other: "LinearSubspace") -> bool:
        _check(self, other)
        return all(self.contains_point(v) for v in other.basis)

    def sum(self, other: "LinearSubspace") -> "LinearSubspace":
        _check(self, other)
        return LinearSubspace(self.n, list(self.basis) + list(other.basis))

    def intersect(self, other: "LinearSubspace") -> "LinearSubspace":
        _check(self, other)
        return LinearSubspace.from_equations(self.n, self.equations() + other.equations())

    def is_zero(self) -> bool:
        return not self.basis

    def parametrization(self, nparams: int | None = None) -> List[Polynomial]:
        """Coordinates x_i as linear forms in parameters s_1..s_dim."""
        d = self.dim
        return [
            Polynomial.linear_form([self.basis[j][i] for j in range(d)]) if d else Polynomial.zero(0)
            for i in range(self.n)
        ]

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearSubspace) and self.n == other.n and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.n, self.basis))

    def vectors_as_strings(self) -> List[List[str]]:
        return [[str(x) for x in v] for v in self.basis]

    def __repr__(self) -> str:
        return f"LinearSubspace(n={self.n}, basis={self.vectors_as_strings()})"


def _identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _check(a: LinearSubspace, b: LinearSubspace) -> None:
    if a.n != b.n:
        raise ValueError(f"ambient mismatch: {a.n} vs {b.n}")


def intersect(V: LinearSubspace, W: LinearSubspace) -> LinearSubspace:
    return V.intersect(W)


def subspace_sum(V: LinearSubspace, W: LinearSubspace) -> LinearSubspace:
    return V.sum(W)


# integer matrices


def mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> List[List[int]]:
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def int_det(A: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return (U, D, V) with U*A*V = D diagonal, divisibility chain, U and V unimodular."""
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, r)) for r in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row_dst += f * row_src
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, f):
        for row in D:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(t, i, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(t, j, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: pivot must divide the rest of the block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V
