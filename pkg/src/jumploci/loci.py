"""Characteristic and resonance varieties, Fitting loci, tangent cones at 1."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .fpgroup import (
    CupStructure,
    GroupPresentation,
    abelianize_presentation,
    abelianized_alexander_matrix,
    generator_images,
    wedge_index,
)
from .polyalg.groebner import Budget, Ideal, tangent_cone_ideal
from .polyalg.laurent import LaurentMatrix, minors_ideal, polynomial_matrix
from .polyalg.linear import rank
from .polyalg.poly import Polynomial, default_names

KINDS = ("characteristic", "resonance", "tangent-cone")


@dataclass(frozen=True)
class JumpingLocus:
    """An ideal together with the flag deciding whether the base point belongs.

    For resonance and tangent-cone loci the flag means the origin is part of
    the reported set; for characteristic loci it means the identity character
    satisfies the dimension bound.
    """

    ideal: Ideal
    k: int
    kind: str
    identity_member: bool

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown locus kind {self.kind!r}")

    @property
    def origin_included(self) -> bool:
        return self.identity_member

    @property
    def vars(self) -> Tuple[str, ...]:
        return self.ideal.vars

    def variety_ideal(self, vars: Sequence[str] | None = None) -> Ideal:
        """Ideal whose zero set is exactly the reported set (origin adjoined if flagged).

        For characteristic loci the base point is 1, so this is only
        meaningful for the other kinds.
        """
        if self.kind == "characteristic":
            raise ValueError("characteristic loci are based at 1; use the tangent cone")
        ideal = self.ideal.adjoin_origin() if self.identity_member else self.ideal
        if vars is not None:
            if len(vars) != ideal.nvars:
                raise ValueError("ring size mismatch")
            ideal = Ideal(vars, ideal.gens)
        return ideal

    def to_json(self, order: str = "grevlex") -> dict:
        flag = "identity_member" if self.kind == "characteristic" else "origin_included"
        return {
            "kind": self.kind,
            "k": self.k,
            "vars": list(self.ideal.vars),
            "generators": self.ideal.generator_strings(order),
            flag: self.identity_member,
        }


# ---------------------------------------------------------------- contraction maps


def delta2_matrix(n: int, names: Sequence[str] | None = None) -> List[List[Polynomial]]:
    """n x C(n,2) matrix of delta_2(z): e_p ^ e_q -> z_p e_q - z_q e_p."""
    cols = list(combinations(range(n), 2))
    M = [[Polynomial.zero(n) for _ in cols] for _ in range(n)]
    for j, (p, q) in enumerate(cols):
        M[q][j] = M[q][j] + Polynomial.var(n, p)
        M[p][j] = M[p][j] - Polynomial.var(n, q)
    return M


def delta3_matrix(n: int) -> List[List[Polynomial]]:
    """C(n,2) x C(n,3) matrix of delta_3(z): e_abc -> z_a e_bc - z_b e_ac + z_c e_ab."""
    idx = wedge_index(n)
    triples = list(combinations(range(n), 3))
    M = [[Polynomial.zero(n) for _ in triples] for _ in idx]
    for j, (a, b, c) in enumerate(triples):
        M[idx[(b, c)]][j] = Polynomial.var(n, a)
        M[idx[(a, c)]][j] = -Polynomial.var(n, b)
        M[idx[(a, b)]][j] = Polynomial.var(n, c)
    return M


def _matmul(A: List[List[Polynomial]], B: List[List[Polynomial]], n: int) -> List[List[Polynomial]]:
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        out_row = []
        for j in range(cols):
            acc = Polynomial.zero(n)
            for k in range(inner):
                if row[k] and B[k][j]:
                    acc = acc + row[k] * B[k][j]
            out_row.append(acc)
        out.append(out_row)
    return out


@dataclass(frozen=True)
class ResonanceMatrix:
    n: int
    r: int
    entries: Tuple[Tuple[Polynomial, ...], ...]

    @property
    def vars(self) -> Tuple[str, ...]:
        return tuple(default_names("z", self.n))

    def as_matrix(self) -> LaurentMatrix:
        return polynomial_matrix(self.vars, self.entries, self.r)

    def evaluate(self, z: Sequence) -> List[List[mpq]]:
        return [[e.evaluate(z) for e in row] for row in self.entries]


def resonance_matrix(c: CupStructure) -> ResonanceMatrix:
    """Column j is delta_2(z) applied to relation class j."""
    n = c.n
    d2 = delta2_matrix(n)
    classes = [[Polynomial.constant(n, x) for x in cls] for cls in c.relation_classes]
    # transpose: C(n,2) x r
    Y = [list(col) for col in zip(*classes)] if classes else [[] for _ in range(n * (n - 1) // 2)]
    entries = _matmul(d2, Y, n) if Y and Y[0] else [[] for _ in range(n)]
    return ResonanceMatrix(n, c.r, tuple(tuple(row) for row in entries))


def resonance_ideal(c: CupStructure, k: int) -> JumpingLocus:
    """R_k: the (n-k)-minors of the resonance matrix, origin included for 1 <= k <= n."""
    if k < 0:
        raise ValueError("k must be non-negative")
    R = resonance_matrix(c)
    ideal = minors_ideal(R.as_matrix(), c.n - k)
    return JumpingLocus(ideal, k, "resonance", 1 <= k <= c.n)


@dataclass(frozen=True)
class InfinitesimalAlexanderMatrix:
    n: int
    r: int
    matrix: LaurentMatrix

    @property
    def s(self) -> int:
        """Number of rows, the rank of the target wedge^2 X."""
        return self.matrix.rows


def infinitesimal_alexander(c: CupStructure) -> InfinitesimalAlexanderMatrix:
    """delta_3 block on wedge^3 X next to the relation classes as constant columns."""
    n = c.n
    d3 = delta3_matrix(n)
    rows = []
    for i in range(n * (n - 1) // 2):
        row = list(d3[i]) + [Polynomial.constant(n, cls[i]) for cls in c.relation_classes]
        rows.append(row)
    ncols = len(d3[0]) + c.r if d3 else c.r
    M = polynomial_matrix(default_names("z", n), rows, ncols)
    return InfinitesimalAlexanderMatrix(n, c.r, M)


def infinitesimal_fitting_locus(c: CupStructure, k: int) -> Ideal:
    """Ideal of W_k = Z(F_{k-1}) for the module presented by the infinitesimal matrix."""
    nabla = infinitesimal_alexander(c)
    return minors_ideal(nabla.matrix, nabla.s - (k - 1))


# ---------------------------------------------------------------- characteristic varieties


def charvar_ideal(p: GroupPresentation, k: int) -> JumpingLocus:
    """V_k on the identity component: (s-k)-minors of the Alexander matrix plus the 1 flag."""
    if k < 0:
        raise ValueError("k must be non-negative")
    ab = abelianize_presentation(p)
    M = abelianized_alexander_matrix(p, ab)
    ideal = minors_ideal(M, p.num_generators - k)
    return JumpingLocus(ideal, k, "characteristic", ab.rank_b1 >= k)


def charvar_point_test(p: GroupPresentation, rho: Sequence) -> int:
    """dim H_1(G; C_rho) = s - rank d_1(rho) - rank d_2(rho), computed exactly."""
    ab = abelianize_presentation(p)
    if len(rho) != ab.rank_b1:
        raise ValueError(f"expected {ab.rank_b1} coordinates, got {len(rho)}")
    point = [mpq(x) for x in rho]
    if any(x == 0 for x in point):
        raise ValueError("character coordinates must be nonzero")
    s = p.num_generators
    images = generator_images(p, ab)
    d1 = []
    for img in images:
        val = mpq(1)
        for x, e in zip(point, img):
            val *= x**e
        d1.append(val - 1)
    rank_d1 = 1 if any(d1) else 0
    if p.relators:
        M = abelianized_alexander_matrix(p, ab)
        rank_d2 = rank(M.evaluate(point))
    else:
        rank_d2 = 0
    return s - rank_d1 - rank_d2


def translate_to_identity(f: Polynomial) -> Polynomial:
    """f(1 + u_1, ..., 1 + u_n)."""
    n = f.nvars
    one = Polynomial.constant(n, 1)
    return f.substitute([one + Polynomial.var(n, i) for i in range(n)])


def tangent_cone_at_identity(L: JumpingLocus, budget: Optional[Budget] = None) -> JumpingLocus:
    """TC_1 of a characteristic locus, in coordinates u_i = t_i - 1."""
    if L.kind != "characteristic":
        raise ValueError("tangent cone at 1 needs a characteristic locus")
    names = tuple(default_names("u", L.ideal.nvars))
    translated = Ideal(names, [translate_to_identity(g) for g in L.ideal.gens])
    cone = tangent_cone_ideal(translated, budget)
    return JumpingLocus(cone, L.k, "tangent-cone", L.identity_member)
