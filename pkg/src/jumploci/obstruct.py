"""Isotropy of linear components and the resonance obstruction battery."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from .fpgroup import (
    CupStructure,
    GroupPresentation,
    UnsupportedPresentation,
    abelianize_presentation,
    cup_structure,
    magnus_truncated,
)
from .loci import JumpingLocus, charvar_ideal, resonance_ideal, tangent_cone_at_identity
from .polyalg.groebner import Budget, Ideal, variety_equal, variety_subset_union
from .polyalg.linear import LinearSubspace, rank
from .polyalg.poly import Polynomial

P0, P1, NEITHER = "p0", "p1", "neither"
PASS, FAIL, NA = "pass", "fail", "n/a"

VERDICT_FORMALITY = "1-formality obstructed"
VERDICT_QK = "quasi-Kähler obstructed (assuming 1-formal)"
VERDICT_CONSISTENT = "consistent"
VERDICT_INCONCLUSIVE = "inconclusive"


class ComponentFileError(ValueError):
    pass


@dataclass(frozen=True)
class Component:
    """A linear subspace of H^1 with its isotropy class (None until classified)."""

    subspace: LinearSubspace
    p: Optional[str] = None

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def p_value(self) -> int:
        """The integer p(alpha) used by the dimension filtration; neither counts as 0."""
        return 1 if self.p == P1 else 0

    def to_json(self) -> dict:
        return {"dim": self.dim, "p": self.p, "basis": self.subspace.vectors_as_strings()}


# ---------------------------------------------------------------- isotropy


def restricted_cup_matrix(V: LinearSubspace, c: CupStructure) -> List[List[mpq]]:
    """Rows mu(v_i ^ v_j), i < j, in the coordinates dual to the relation classes."""
    if V.n != c.n:
        raise ValueError(f"ambient mismatch: subspace in Q^{V.n}, cup structure on Q^{c.n}")
    return [c.pairing(a, b) for a, b in combinations(V.basis, 2)]


def isotropy_classify(V: LinearSubspace, c: CupStructure) -> str:
    """p0 if the cup product vanishes on V, p1 if its image is a line and the
    induced skew form on V is non-degenerate, otherwise neither."""
    if V.dim == 0:
        raise ValueError("isotropy of the zero subspace is undefined")
    rows = restricted_cup_matrix(V, c)
    rk = rank(rows) if rows else 0
    if rk == 0:
        return P0
    if rk > 1:
        return NEITHER
    # image is a line: pick a coordinate where it is visible and read off the skew form
    l = next(j for row in rows for j, x in enumerate(row) if x)
    d = V.dim
    omega = [[mpq(0)] * d for _ in range(d)]
    for (i, j), row in zip(combinations(range(d), 2), rows):
        omega[i][j] = row[l]
        omega[j][i] = -row[l]
    return P1 if rank(omega) == d else NEITHER


def classify_components(comps: Sequence[Component], c: CupStructure) -> List[Component]:
    return [Component(x.subspace, isotropy_classify(x.subspace, c)) for x in comps]


# ---------------------------------------------------------------- position tests


@dataclass
class PositionResult:
    isotropicity: str
    dimension_bound: str
    genericity: str
    classes: List[str]
    bad_isotropy: List[int]
    intersections: List[Tuple[int, int, LinearSubspace]]

    def to_json(self) -> dict:
        return {
            "isotropicity": self.isotropicity,
            "dimension_bound": self.dimension_bound,
            "genericity": self.genericity,
            "classes": self.classes,
            "non_isotropic_components": self.bad_isotropy,
            "nonzero_intersections": [
                {"pair": [i, j], "dim": W.dim, "basis": W.vectors_as_strings()}
                for i, j, W in self.intersections
            ],
        }


def position_check(comps: Sequence[Component], c: CupStructure) -> PositionResult:
    """Isotropicity (p-isotropic with dim >= 2p+2), the dimension bound alone, genericity."""
    classes = [isotropy_classify(x.subspace, c) for x in comps]
    bad = []
    for i, (x, p) in enumerate(zip(comps, classes)):
        ok = (p == P0 and x.dim >= 2) or (p == P1 and x.dim >= 4)
        if not ok:
            bad.append(i)
    iso = FAIL if bad else PASS
    classified = [(x, p) for x, p in zip(comps, classes) if p != NEITHER]
    if not classified:
        dim_bound = NA
    else:
        dim_bound = PASS if all(x.dim >= (4 if p == P1 else 2) for x, p in classified) else FAIL
    meets = []
    for (i, a), (j, b) in combinations(enumerate(comps), 2):
        W = a.subspace.intersect(b.subspace)
        if not W.is_zero():
            meets.append((i, j, W))
    return PositionResult(iso, dim_bound, FAIL if meets else PASS, classes, bad, meets)


def union_ideal(vars: Sequence[str], comps: Sequence[Component], include_origin: bool) -> Ideal:
    """Ideal of the union of the subspaces (and the origin), as a product of ideals."""
    ideal = Ideal.unit(vars)
    for x in comps:
        ideal = ideal * Ideal(vars, x.subspace.defining_forms())
    if include_origin:
        ideal = ideal.adjoin_origin()
    return ideal


@dataclass
class FiltrationResult:
    verdict: str
    per_k: Dict[int, bool]
    expected: Dict[int, List[int]]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "per_k": {str(k): v for k, v in self.per_k.items()},
            "expected_components": {str(k): v for k, v in self.expected.items()},
        }


def filtration_check(
    comps: Sequence[Component],
    c: CupStructure,
    k_max: Optional[int] = None,
    budget: Optional[Budget] = None,
) -> FiltrationResult:
    """R_k equals the union of components with dim > k + p, for k = 1..k_max."""
    k_max = c.n if k_max is None else k_max
    classes = [x.p or isotropy_classify(x.subspace, c) for x in comps]
    comps = [Component(x.subspace, p) for x, p in zip(comps, classes)]
    per_k: Dict[int, bool] = {}
    expected: Dict[int, List[int]] = {}
    for k in range(1, k_max + 1):
        L = resonance_ideal(c, k)
        chosen = [i for i, x in enumerate(comps) if x.dim > k + x.p_value]
        expected[k] = chosen
        target = union_ideal(L.vars, [comps[i] for i in chosen], True)
        per_k[k] = variety_equal(L.variety_ideal(), target, budget)
    return FiltrationResult(PASS if all(per_k.values()) else FAIL, per_k, expected)


@dataclass
class CoverResult:
    verdict: str
    inside: List[bool]
    covered: bool
    irredundant: bool

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "components_inside_locus": self.inside,
            "locus_covered": self.covered,
            "irredundant": self.irredundant,
        }


def component_cover_verify(
    comps: Sequence[Union[Component, LinearSubspace]],
    L: Union[JumpingLocus, Ideal],
    budget: Optional[Budget] = None,
) -> CoverResult:
    """Check the subspaces are exactly the irreducible pieces of Z(L) (away from 0)."""
    spaces = [x.subspace if isinstance(x, Component) else x for x in comps]
    if isinstance(L, JumpingLocus):
        ideal, origin = L.ideal, L.origin_included
    else:
        ideal, origin = L, False
    inside = []
    for V in spaces:
        if V.n != ideal.nvars:
            raise ValueError("ambient mismatch between component and locus")
        param = V.parametrization()
        if V.dim == 0:
            inside.append(all(g.evaluate([0] * V.n) == 0 for g in ideal.gens))
            continue
        d = V.dim
        images = [Polynomial(d, f.terms) if f.nvars == d else Polynomial.zero(d) for f in param]
        inside.append(all(g.substitute(images).is_zero() for g in ideal.gens))
    if spaces or origin:
        covered = variety_subset_union(ideal, spaces, origin, budget)
    else:
        covered = ideal.is_unit()
    irredundant = not any(
        i != j and spaces[i].contains(spaces[j]) for i in range(len(spaces)) for j in range(len(spaces))
    )
    ok = all(inside) and covered and irredundant
    return CoverResult(PASS if ok else FAIL, inside, covered, irredundant)


# ---------------------------------------------------------------- formality


@dataclass
class FormalityResult:
    per_k: Dict[int, bool]
    tangent_cones: Dict[int, JumpingLocus]
    resonance: Dict[int, JumpingLocus]

    @property
    def verdict(self) -> str:
        return PASS if all(self.per_k.values()) else FAIL

    @property
    def summary(self) -> str:
        if self.verdict == FAIL:
            return "not 1-formal"
        return "consistent with 1-formality (necessary condition only)"

    def to_json(self, order: str = "grevlex") -> dict:
        return {
            "verdict": self.verdict,
            "summary": self.summary,
            "per_k": {
                str(k): {
                    "equal": ok,
                    "tangent_cone": self.tangent_cones[k].to_json(order),
                    "resonance": self.resonance[k].to_json(order),
                }
                for k, ok in self.per_k.items()
            },
        }


def formality_test(
    p: GroupPresentation,
    c: Optional[CupStructure] = None,
    k_max: Optional[int] = None,
    k_values: Optional[Sequence[int]] = None,
    budget: Optional[Budget] = None,
) -> FormalityResult:
    """Compare TC_1(V_k) with R_k; a mismatch proves the group is not 1-formal."""
    c = c if c is not None else cup_structure(p)
    b1 = abelianize_presentation(p).rank_b1
    if b1 != c.n:
        raise ValueError(f"cup structure has n={c.n} but b_1 = {b1}")
    if k_values is None:
        k_values = range(1, (b1 if k_max is None else k_max) + 1)
    per_k, cones, res = {}, {}, {}
    for k in k_values:
        T = tangent_cone_at_identity(charvar_ideal(p, k), budget)
        R = resonance_ideal(c, k)
        per_k[k] = variety_equal(T.variety_ideal(R.vars), R.variety_ideal(), budget)
        cones[k], res[k] = T, R
    return FormalityResult(per_k, cones, res)


def free_quotient_test(c: CupStructure, budget: Optional[Budget] = None) -> bool:
    """True iff R_1 is strictly larger than {0}."""
    if c.n < 1:
        raise ValueError("need n >= 1")
    R = resonance_ideal(c, 1).variety_ideal()
    from .polyalg.groebner import radical_member

    return not all(radical_member(Polynomial.var(c.n, i), R, budget) for i in range(c.n))


FREE_QUOTIENT_CAVEAT = "equivalence with a free quotient of rank >= 2 assumes the group is quasi-Kähler and 1-formal"


def free_group_hint(p: GroupPresentation) -> Optional[str]:
    """Note when a commutator-relator presentation has vanishing cup product."""
    if any(magnus_truncated(r)[0] for r in p.relators):
        return None
    try:
        c = cup_structure(p)
    except UnsupportedPresentation:
        return None
    if c.is_zero():
        return "cup product vanishes: if the group is 1-formal then it is free"
    return None


# ---------------------------------------------------------------- report


TEST_NAMES = ("linearity", "isotropicity", "dimension_bound", "genericity", "filtration", "tangent_cone")


@dataclass
class ObstructionReport:
    """Per-test verdicts and the derived overall verdicts.

    Truth table:
      tangent_cone = fail                       -> 1-formality obstructed
      linearity = fail                          -> position tests n/a, inconclusive
      any of isotropicity, dimension_bound,
        genericity, filtration = fail           -> quasi-Kähler obstructed (assuming 1-formal)
      no verdict above                          -> consistent
    """

    tests: Dict[str, str]
    free_quotient: Optional[bool] = None
    notes: List[str] = field(default_factory=list)
    details: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for name in TEST_NAMES:
            self.tests.setdefault(name, NA)

    @property
    def failed(self) -> List[str]:
        return [t for t in TEST_NAMES if self.tests[t] == FAIL]

    @property
    def verdicts(self) -> List[str]:
        return derive_verdicts(self.tests)

    @property
    def exit_code(self) -> int:
        v = self.verdicts
        if VERDICT_FORMALITY in v or VERDICT_QK in v:
            return 2
        if VERDICT_INCONCLUSIVE in v:
            return 3
        return 0

    def to_json(self) -> dict:
        return {
            "tests": {t: self.tests[t] for t in TEST_NAMES},
            "failed": self.failed,
            "verdicts": self.verdicts,
            "free_quotient": self.free_quotient,
            "details": self.details,
            "notes": list(self.notes),
        }


def derive_verdicts(tests: Dict[str, str]) -> List[str]:
    out = []
    if tests.get("tangent_cone") == FAIL:
        out.append(VERDICT_FORMALITY)
    if tests.get("linearity") == FAIL:
        out.append(VERDICT_INCONCLUSIVE)
    elif any(tests.get(t) == FAIL for t in ("isotropicity", "dimension_bound", "genericity", "filtration")):
        out.append(VERDICT_QK)
    return out or [VERDICT_CONSISTENT]


def obstruction_report(
    c: CupStructure,
    comps: Sequence[Component],
    p: Optional[GroupPresentation] = None,
    k_max: Optional[int] = None,
    budget: Optional[Budget] = None,
    order: str = "grevlex",
) -> ObstructionReport:
    """Run the whole battery for a cup structure and candidate R_1 components."""
    tests: Dict[str, str] = {}
    details: Dict[str, object] = {}
    notes: List[str] = []
    R1 = resonance_ideal(c, 1)
    cover = component_cover_verify(comps, R1, budget)
    tests["linearity"] = cover.verdict
    details["linearity"] = cover.to_json()
    if cover.verdict == PASS:
        pos = position_check(comps, c)
        tests["isotropicity"] = pos.isotropicity
        tests["dimension_bound"] = pos.dimension_bound
        tests["genericity"] = pos.genericity
        details["position"] = pos.to_json()
        classified = [Component(x.subspace, cl) for x, cl in zip(comps, pos.classes)]
        for x, cl in zip(comps, pos.classes):
            if x.p is not None and x.p != cl:
                notes.append(f"declared class {x.p} differs from computed class {cl}; using computed")
        filt = filtration_check(classified, c, k_max, budget)
        tests["filtration"] = filt.verdict
        details["filtration"] = filt.to_json()
    else:
        notes.append("supplied components do not describe R_1; position tests skipped")
    if p is not None:
        form = formality_test(p, c, budget=budget)
        tests["tangent_cone"] = form.verdict
        details["tangent_cone"] = form.to_json(order)
        hint = free_group_hint(p)
        if hint:
            notes.append(hint)
    else:
        notes.append("no presentation: tangent cone formula not tested")
    fq = free_quotient_test(c, budget) if c.n >= 1 else None
    notes.append(FREE_QUOTIENT_CAVEAT)
    return ObstructionReport(tests, fq, notes, details)


# ---------------------------------------------------------------- component files


_COMP_RE = re.compile(r"comp\s+p\s*=\s*(0|1|\?)\s+basis\s*:\s*(.*)$")


def parse_components(text: str) -> Tuple[int, List[Component]]:
    """Format: 'ambient n' then 'comp p=<0|1|?> basis: v1; v2; ...'."""
    n = None
    comps: List[Component] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("ambient"):
            try:
                n = int(line.split()[1])
            except (IndexError, ValueError):
                raise ComponentFileError(f"line {lineno}: 'ambient' needs an integer") from None
            continue
        m = _COMP_RE.fullmatch(line)
        if not m:
            raise ComponentFileError(f"line {lineno}: cannot parse {line!r}")
        if n is None:
            raise ComponentFileError(f"line {lineno}: 'comp' before 'ambient'")
        vecs = []
        for chunk in filter(None, (v.strip() for v in m.group(2).split(";"))):
            try:
                vec = [mpq(x) for x in chunk.replace(",", " ").split()]
            except ValueError:
                raise ComponentFileError(f"line {lineno}: bad rational in {chunk!r}") from None
            if len(vec) != n:
                raise ComponentFileError(f"line {lineno}: vector of length {len(vec)}, ambient is {n}")
            vecs.append(vec)
        V = LinearSubspace(n, vecs)
        if V.dim == 0:
            raise ComponentFileError(f"line {lineno}: zero-dimensional component")
        p = {"0": P0, "1": P1, "?": None}[m.group(1)]
        comps.append(Component(V, p))
    if n is None:
        raise ComponentFileError("missing 'ambient' line")
    return n, comps
