"""Laurent polynomials, matrices over them, and minor / Fitting ideals."""

from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .groebner import Ideal
from .poly import Polynomial


class LaurentPolynomial:
    """``t^shift * poly`` with ``poly`` not divisible by any variable."""

    __slots__ = ("poly", "shift")

    def __init__(self, poly: Polynomial, shift: Sequence[int] | None = None):
        n = poly.nvars
        shift = tuple(shift) if shift is not None else (0,) * n
        if poly.is_zero():
            self.poly, self.shift = poly, (0,) * n
            return
        g = poly.monomial_content()
        self.poly = poly.strip_monomial()
        self.shift = tuple(a + b for a, b in zip(shift, g))

    @classmethod
    def from_terms(cls, nvars: int, terms: Dict[Tuple[int, ...], int]) -> "LaurentPolynomial":
        """Build from a dict whose exponent vectors may be negative."""
        terms = {m: c for m, c in terms.items() if c}
        if not terms:
            return cls(Polynomial.zero(nvars))
        low = tuple(min(col) for col in zip(*terms))
        shifted = {tuple(a - b for a, b in zip(m, low)): c for m, c in terms.items()}
        return cls(Polynomial(nvars, shifted), low)

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPolynomial":
        return cls(Polynomial.zero(nvars))

    @classmethod
    def one(cls, nvars: int) -> "LaurentPolynomial":
        return cls(Polynomial.constant(nvars, 1))

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def terms(self) -> Dict[Tuple[int, ...], object]:
        return {tuple(a + b for a, b in zip(m, self.shift)): c for m, c in self.poly.terms.items()}

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        low = tuple(min(a, b) for a, b in zip(self.shift, other.shift))
        p = self.poly.mul_term(tuple(a - b for a, b in zip(self.shift, low)), 1)
        q = other.poly.mul_term(tuple(a - b for a, b in zip(other.shift, low)), 1)
        return LaurentPolynomial(p + q, low)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(-self.poly, self.shift)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPolynomial":
        if not isinstance(other, LaurentPolynomial):
            return LaurentPolynomial(self.poly * other, self.shift)
        if self.is_zero() or other.is_zero():
            return LaurentPolynomial.zero(self.nvars)
        return LaurentPolynomial(
            self.poly * other.poly, tuple(a + b for a, b in zip(self.shift, other.shift))
        )

    __rmul__ = __mul__

    def evaluate(self, point: Sequence) -> object:
        value = self.poly.evaluate(point)
        for x, e in zip(point, self.shift):
            if e:
                value *= _pow(x, e)
        return value

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LaurentPolynomial)
            and self.poly == other.poly
            and self.shift == other.shift
        )

    def __hash__(self) -> int:
        return hash((self.poly, self.shift))

    def to_str(self, names: Sequence[str]) -> str:
        body = self.poly.to_str(names)
        unit = [f"{names[i]}^{e}" if e != 1 else names[i] for i, e in enumerate(self.shift) if e]
        if not unit:
            return body
        return f"{'*'.join(unit)}*({body})"

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.to_str([f't{i + 1}' for i in range(self.nvars)])})"


def _pow(x, e: int):
    from gmpy2 import mpq

    return mpq(x) ** e


class LaurentMatrix:
    """Dense rows x cols matrix of Laurent polynomials in a fixed ring."""

    def __init__(self, vars: Sequence[str], rows: int, cols: int, entries=None, laurent: bool = True):
        self.vars = tuple(vars)
        # monomials are units only over the Laurent ring; polynomial matrices keep them
        self.laurent = laurent
        self.rows = rows
        self.cols = cols
        n = len(self.vars)
        if entries is None:
            entries = [[LaurentPolynomial.zero(n) for _ in range(cols)] for _ in range(rows)]
        self.entries: List[List[LaurentPolynomial]] = [
            [_as_laurent(e, n) for e in row] for row in entries
        ]
        if len(self.entries) != rows or any(len(r) != cols for r in self.entries):
            raise ValueError("entry grid does not match the declared shape")

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def __getitem__(self, ij: Tuple[int, int]) -> LaurentPolynomial:
        i, j = ij
        return self.entries[i][j]

    def transpose(self) -> "LaurentMatrix":
        entries = [list(col) for col in zip(*self.entries)] if self.rows else [[] for _ in range(self.cols)]
        return LaurentMatrix(self.vars, self.cols, self.rows, entries, self.laurent)

    def evaluate(self, point: Sequence) -> List[List[object]]:
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def minors(self, size: int) -> List[Polynomial]:
        """All size x size minors; monomial units are cleared for Laurent matrices.

        Generators come in lexicographic order of (row subset, column subset).
        Laplace expansion along the first selected row, memoised on column sets.
        """
        n = self.nvars
        if size <= 0:
            return [Polynomial.constant(n, 1)]
        if size > min(self.rows, self.cols):
            return []
        out = []
        for rsel in itertools.combinations(range(self.rows), size):
            memo: Dict[FrozenSet[int], LaurentPolynomial] = {}
            for csel in itertools.combinations(range(self.cols), size):
                det = self._det(rsel, 0, tuple(csel), memo)
                if not det.is_zero():
                    out.append(det.poly if self.laurent else det.poly.mul_term(det.shift, 1))
        return out

    def _det(self, rsel, depth: int, cols: Tuple[int, ...], memo) -> LaurentPolynomial:
        key = frozenset(cols)
        if key in memo:
            return memo[key]
        n = self.nvars
        if not cols:
            return LaurentPolynomial.one(n)
        row = self.entries[rsel[depth]]
        total = LaurentPolynomial.zero(n)
        for pos, c in enumerate(cols):
            entry = row[c]
            if entry.is_zero():
                continue
            rest = cols[:pos] + cols[pos + 1 :]
            sub = self._det(rsel, depth + 1, rest, memo)
            if sub.is_zero():
                continue
            term = entry * sub
            total = total + term if pos % 2 == 0 else total - term
        memo[key] = total
        return total

    def to_strings(self) -> List[List[str]]:
        if self.laurent:
            return [[e.to_str(self.vars) for e in row] for row in self.entries]
        return [[e.poly.mul_term(e.shift, 1).to_str(self.vars) for e in row] for row in self.entries]

    def __repr__(self) -> str:
        return f"LaurentMatrix({self.rows}x{self.cols}, {self.to_strings()})"


def _as_laurent(e, n: int) -> LaurentPolynomial:
    if isinstance(e, LaurentPolynomial):
        return e
    if isinstance(e, Polynomial):
        return LaurentPolynomial(e)
    return LaurentPolynomial(Polynomial.constant(n, e))


def polynomial_matrix(vars: Sequence[str], rows: Sequence[Sequence[Polynomial]], ncols: int | None = None) -> LaurentMatrix:
    rows = [list(r) for r in rows]
    cols = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    return LaurentMatrix(vars, len(rows), cols, rows, laurent=False)


def minors_ideal(M: LaurentMatrix, size: int) -> Ideal:
    """Ideal of size x size minors; size <= 0 gives (1), size too large gives (0).

    Over a Laurent matrix each minor is divided by its monomial content.
    Generators are made monic, so minors differing by a scalar appear once.
    """
    gens = []
    seen = set()
    for m in M.minors(size):
        if not m.is_zero():
            m = m.monic()
        if m not in seen:
            seen.add(m)
            gens.append(m)
    return Ideal(M.vars, gens)


def fitting_ideal(M: LaurentMatrix, k: int) -> Ideal:
    """k-th Fitting ideal of the module presented by M.

    Orientation: the rows of M index the generators of the module (the
    target R^s) and the columns index the relations, so the ideal is
    generated by the (s - k)-minors with s = M.rows.
    """
    return minors_ideal(M, M.rows - k)
