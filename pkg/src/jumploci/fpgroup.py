"""Finitely presented groups: words, Fox calculus, Magnus truncation, abelianization."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .polyalg.laurent import LaurentMatrix, LaurentPolynomial
from .polyalg.linear import rref, smith_normal_form
from .polyalg.poly import Polynomial, default_names

Letter = Tuple[int, int]


class PresentationError(ValueError):
    """Malformed presentation or cup-structure input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class UnsupportedPresentation(ValueError):
    """The presentation is outside the class an operation supports."""


class TrivialTorus(ValueError):
    """b_1 = 0: the identity component of the character torus is a point."""


# ---------------------------------------------------------------- words


@dataclass(frozen=True)
class Word:
    """Freely reduced word in a free group; letters are (generator index, exponent)."""

    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _free_reduce(self.letters))

    @classmethod
    def gen(cls, i: int, e: int = 1) -> "Word":
        return cls(((i, e),))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((i, -e) for i, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        out = Word()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def is_empty(self) -> bool:
        return not self.letters

    def exponent_sums(self, n: int) -> List[int]:
        v = [0] * n
        for i, e in self.letters:
            v[i] += e
        return v

    def max_generator(self) -> int:
        return max((i for i, _ in self.letters), default=-1)

    def to_str(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        return " ".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in self.letters)

    def __repr__(self) -> str:
        return f"Word({self.to_str([f'x{i + 1}' for i in range(self.max_generator() + 1)])})"


def _free_reduce(letters) -> Tuple[Letter, ...]:
    out: List[List[int]] = []
    for i, e in letters:
        if e == 0:
            continue
        if out and out[-1][0] == i:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([i, e])
    return tuple((i, e) for i, e in out)


def commutator(u: Word, v: Word) -> Word:
    """(u, v) = u v u^-1 v^-1."""
    return u * v * u.inverse() * v.inverse()


# ---------------------------------------------------------------- presentations


@dataclass(frozen=True)
class GroupPresentation:
    name: str
    generator_names: Tuple[str, ...]
    relators: Tuple[Word, ...] = ()

    def __post_init__(self):
        names = tuple(self.generator_names)
        if len(set(names)) != len(names):
            raise PresentationError("generator names must be distinct")
        object.__setattr__(self, "generator_names", names)
        rels = tuple(r if isinstance(r, Word) else Word(tuple(r)) for r in self.relators)
        for r in rels:
            if r.max_generator() >= len(names):
                raise PresentationError("relator uses an undeclared generator")
        object.__setattr__(self, "relators", rels)

    @property
    def num_generators(self) -> int:
        return len(self.generator_names)

    def to_text(self) -> str:
        lines = [f"group {self.name}", "gens " + " ".join(self.generator_names)]
        lines += [f"rel {r.to_str(self.generator_names)}" for r in self.relators]
        return "\n".join(lines) + "\n"


_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_.']*)|(?P<int>-?\d+)|(?P<sym>[()^,]))")


class _WordParser:
    def __init__(self, text: str, line: int, offset: int, index: Dict[str, int]):
        self.text = text
        self.line = line
        self.offset = offset
        self.index = index
        self.pos = 0
        self.tokens = self._tokenize()
        self.i = 0

    def _tokenize(self):
        toks = []
        pos = 0
        while pos < len(self.text):
            if self.text[pos:].strip() == "":
                break
            m = _TOKEN.match(self.text, pos)
            if not m or m.end() == pos:
                col = len(self.text[:pos]) - len(self.text[:pos].lstrip()) + pos
                raise PresentationError(
                    f"unexpected character {self.text[pos:].strip()[:1]!r}",
                    self.line,
                    self.offset + pos + 1 + (len(self.text[pos:]) - len(self.text[pos:].lstrip())),
                )
            kind = m.lastgroup
            col = self.offset + m.start(kind) + 1
            toks.append((kind, m.group(kind), col))
            pos = m.end()
        return toks

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, self.offset + len(self.text) + 1)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            got = tok[1] if tok[0] else "end of line"
            raise PresentationError(f"expected {want}, got {got!r}", self.line, tok[2])
        self.i += 1
        return tok

    def word(self, stop=()) -> Word:
        out = Word()
        count = 0
        while True:
            kind, val, col = self.peek()
            if kind is None or (kind == "sym" and val in stop):
                break
            out = out * self.term()
            count += 1
        if count == 0:
            raise PresentationError("empty word", self.line, self.peek()[2])
        return out

    def term(self) -> Word:
        kind, val, col = self.peek()
        if kind == "ident":
            self.take()
            if val not in self.index:
                raise PresentationError(f"unknown generator {val!r}", self.line, col)
            base = Word.gen(self.index[val])
        elif kind == "int" and val == "1":
            self.take()
            base = Word()
        elif kind == "sym" and val == "(":
            self.take()
            u = self.word(stop=(",",))
            self.take("sym", ",")
            v = self.word(stop=(")",))
            self.take("sym", ")")
            base = commutator(u, v)
        else:
            raise PresentationError(f"unexpected {val!r}", self.line, col)
        if self.peek()[0] == "sym" and self.peek()[1] == "^":
            self.take()
            _, exp, _ = self.take("int")
            base = base ** int(exp)
        return base


def parse_word(text: str, generator_names: Sequence[str]) -> Word:
    index = {n: i for i, n in enumerate(generator_names)}
    p = _WordParser(text, 1, 0, index)
    w = p.word()
    if p.peek()[0] is not None:
        raise PresentationError(f"trailing input {p.peek()[1]!r}", 1, p.peek()[2])
    return w


def parse_presentation(text: str, default_name: str = "G") -> GroupPresentation:
    """Parse the line-oriented presentation format (see README)."""
    name = default_name
    gens: Optional[List[str]] = None
    relators: List[Word] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        keyword, _, rest = stripped.partition(" ")
        rest_offset = indent + len(keyword) + 1
        if keyword == "group":
            if gens is not None:
                raise PresentationError("'group' must precede 'gens'", lineno, indent + 1)
            name = rest.strip()
            if not name:
                raise PresentationError("missing group name", lineno, rest_offset + 1)
        elif keyword == "gens":
            if gens is not None:
                raise PresentationError("duplicate 'gens' line", lineno, indent + 1)
            gens = rest.split()
            for g in gens:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.']*", g):
                    raise PresentationError(f"invalid generator name {g!r}", lineno, line.index(g) + 1)
            if len(set(gens)) != len(gens):
                raise PresentationError("duplicate generator name", lineno, rest_offset + 1)
        elif keyword == "rel":
            if gens is None:
                raise PresentationError("'rel' before 'gens'", lineno, indent + 1)
            parser = _WordParser(rest, lineno, rest_offset, {g: i for i, g in enumerate(gens)})
            relators.append(parser.word())
        else:
            raise PresentationError(f"unknown keyword {keyword!r}", lineno, indent + 1)
    if gens is None:
        raise PresentationError("missing 'gens' line")
    return GroupPresentation(name, tuple(gens), tuple(relators))


# ---------------------------------------------------------------- Fox calculus


class FreeDerivative(dict):
    """Element of the integral group ring Z[F]: maps Word -> nonzero int."""

    def add(self, w: Word, c: int) -> None:
        s = self.get(w, 0) + c
        if s:
            self[w] = s
        else:
            self.pop(w, None)

    def left_mul(self, u: Word) -> "FreeDerivative":
        out = FreeDerivative()
        for w, c in self.items():
            out.add(u * w, c)
        return out

    def __add__(self, other: "FreeDerivative") -> "FreeDerivative":
        out = FreeDerivative(self)
        for w, c in other.items():
            out.add(w, c)
        return out

    def __sub__(self, other: "FreeDerivative") -> "FreeDerivative":
        out = FreeDerivative(self)
        for w, c in other.items():
            out.add(w, -c)
        return out

    def right_mul(self, u: "FreeDerivative") -> "FreeDerivative":
        out = FreeDerivative()
        for w1, c1 in self.items():
            for w2, c2 in u.items():
                out.add(w1 * w2, c1 * c2)
        return out

    @classmethod
    def of(cls, w: Word, c: int = 1) -> "FreeDerivative":
        out = cls()
        out.add(w, c)
        return out

    def to_str(self, names: Sequence[str]) -> str:
        if not self:
            return "0"
        items = sorted(self.items(), key=lambda t: (len(t[0]), t[0].letters))
        parts = []
        for w, c in items:
            body = "" if w.is_empty() else w.to_str(names).replace(" ", "")
            if body:
                coeff = "" if c == 1 else "-" if c == -1 else f"{c}*"
            else:
                coeff = str(c)
            parts.append(coeff + body)
        return " + ".join(parts).replace("+ -", "- ")


def fox_derivative(w: Word, i: int) -> FreeDerivative:
    """Left Fox derivative d w / d x_i in Z[F]."""
    out = FreeDerivative()
    prefix = Word()
    for g, e in w.letters:
        if g == i:
            if e > 0:
                for k in range(e):
                    out.add(prefix * Word.gen(g, k), 1)
            else:
                for k in range(1, -e + 1):
                    out.add(prefix * Word.gen(g, -k), -1)
        prefix = prefix * Word.gen(g, e)
    return out


def fox_matrix(p: GroupPresentation) -> List[List[FreeDerivative]]:
    """Rows are relators, columns generators."""
    return [[fox_derivative(r, i) for i in range(p.num_generators)] for r in p.relators]


# ---------------------------------------------------------------- abelianization


@dataclass(frozen=True)
class AbelianizationData:
    rank_b1: int
    torsion_orders: Tuple[int, ...]
    basis_change: Tuple[Tuple[int, ...], ...]
    free_columns: Tuple[int, ...] = field(default=())

    def free_coordinates(self, exponent_vector: Sequence[int]) -> Tuple[int, ...]:
        """Image of an exponent-sum vector in the free part Z^{b_1}."""
        s = len(self.basis_change)
        return tuple(
            sum(exponent_vector[i] * self.basis_change[i][j] for i in range(s))
            for j in self.free_columns
        )


def relator_matrix(p: GroupPresentation) -> List[List[int]]:
    return [r.exponent_sums(p.num_generators) for r in p.relators]


def abelianize_presentation(p: GroupPresentation) -> AbelianizationData:
    s = p.num_generators
    A = relator_matrix(p)
    if not A:
        V = [[int(i == j) for j in range(s)] for i in range(s)]
        return AbelianizationData(s, (), tuple(map(tuple, V)), tuple(range(s)))
    _, D, V = smith_normal_form(A)
    diag = [D[i][i] for i in range(min(len(D), s))]
    nonzero = [d for d in diag if d != 0]
    free_cols = tuple(j for j in range(s) if j >= len(diag) or diag[j] == 0)
    torsion = tuple(d for d in nonzero if d > 1)
    return AbelianizationData(len(free_cols), torsion, tuple(map(tuple, V)), free_cols)


def betti1(p: GroupPresentation) -> int:
    return abelianize_presentation(p).rank_b1


def abelianized_alexander_matrix(
    p: GroupPresentation, ab: AbelianizationData | None = None
) -> LaurentMatrix:
    """r x s matrix of Fox derivatives pushed to Q[t_1^+-1, ..., t_b^+-1].

    Characters are taken through the free part of G_ab, so torsion
    generators map to 1.
    """
    ab = ab or abelianize_presentation(p)
    b = ab.rank_b1
    if b == 0:
        raise TrivialTorus("b_1(G) = 0: trivial character torus")
    s = p.num_generators
    names = default_names("t", b)
    rows = []
    for r in p.relators:
        row = []
        for i in range(s):
            terms: Dict[Tuple[int, ...], int] = {}
            for w, c in fox_derivative(r, i).items():
                m = ab.free_coordinates(w.exponent_sums(s))
                terms[m] = terms.get(m, 0) + c
            row.append(LaurentPolynomial.from_terms(b, terms))
        rows.append(row)
    return LaurentMatrix(names, len(rows), s, rows)


def generator_images(p: GroupPresentation, ab: AbelianizationData | None = None) -> List[Tuple[int, ...]]:
    """Exponent vector of each generator's image in the free part."""
    ab = ab or abelianize_presentation(p)
    s = p.num_generators
    return [ab.free_coordinates([int(i == j) for j in range(s)]) for i in range(s)]


# ---------------------------------------------------------------- Magnus / cup structure


class NonCommutatorRelator(ValueError):
    """The relator has nonzero abelianization."""


def wedge_index(n: int) -> Dict[Tuple[int, int], int]:
    return {pq: k for k, pq in enumerate(combinations(range(n), 2))}


def _magnus_letter(i: int, e: int) -> Tuple[Dict[int, int], Dict[Tuple[int, int], int]]:
    # (1 + X)^e truncated at degree 2: 1 + e X + C(e,2) X^2
    return {i: e}, {(i, i): e * (e - 1) // 2}


def magnus_truncated(w: Word) -> Tuple[Dict[int, int], Dict[Tuple[int, int], int]]:
    """Degree-1 and degree-2 parts of the Magnus expansion of w (integer coefficients)."""
    lin: Dict[int, int] = {}
    quad: Dict[Tuple[int, int], int] = {}
    for i, e in w.letters:
        l2, q2 = _magnus_letter(i, e)
        # (1 + a1 + a2)(1 + b1 + b2) = 1 + (a1 + b1) + (a2 + a1 b1 + b2)
        for p, cp in lin.items():
            for q, cq in l2.items():
                quad[(p, q)] = quad.get((p, q), 0) + cp * cq
        for k, c in q2.items():
            quad[k] = quad.get(k, 0) + c
        for k, c in l2.items():
            lin[k] = lin.get(k, 0) + c
    return {k: v for k, v in lin.items() if v}, {k: v for k, v in quad.items() if v}


def magnus_quadratic(w: Word, n_gens: int) -> List[int]:
    """Class of a commutator relator in gr_2(F) = wedge^2 Z^n, on basis e_p^e_q (p<q)."""
    lin, quad = magnus_truncated(w)
    if lin:
        raise NonCommutatorRelator("non-commutator relator")
    idx = wedge_index(n_gens)
    vec = [0] * len(idx)
    for (p, q), k in idx.items():
        vec[k] = quad.get((p, q), 0)
    return vec


@dataclass(frozen=True)
class CupStructure:
    """dim H^1 plus a normalized spanning set of im(d_G) inside wedge^2 H_1."""

    n: int
    relation_classes: Tuple[Tuple[mpq, ...], ...]

    def __post_init__(self):
        m = self.n * (self.n - 1) // 2
        for c in self.relation_classes:
            if len(c) != m:
                raise ValueError(f"relation class needs {m} coordinates, got {len(c)}")
        red, _ = rref(self.relation_classes) if self.relation_classes else ([], [])
        object.__setattr__(self, "relation_classes", tuple(tuple(r) for r in red))

    @property
    def r(self) -> int:
        return len(self.relation_classes)

    def is_zero(self) -> bool:
        return not self.relation_classes

    def pairs(self) -> List[Tuple[int, int]]:
        return list(combinations(range(self.n), 2))

    def class_dicts(self) -> List[Dict[Tuple[int, int], mpq]]:
        pairs = self.pairs()
        return [{pq: c for pq, c in zip(pairs, cls) if c} for cls in self.relation_classes]

    def pairing(self, a: Sequence, b: Sequence) -> List[mpq]:
        """mu(a ^ b) as the vector of pairings <a ^ b, y_j> over relation classes."""
        out = []
        for d in self.class_dicts():
            out.append(sum((c * (mpq(a[p]) * b[q] - mpq(a[q]) * b[p]) for (p, q), c in d.items()), mpq(0)))
        return out

    def to_text(self) -> str:
        lines = [f"h1 {self.n}"]
        pairs = self.pairs()
        for cls in self.relation_classes:
            parts = [f"{c} on {p + 1} {q + 1}" for (p, q), c in zip(pairs, cls) if c]
            lines.append("class " + " , ".join(parts))
        return "\n".join(lines) + "\n"


def cup_structure(p: GroupPresentation) -> CupStructure:
    n = p.num_generators
    classes = []
    for r in p.relators:
        try:
            classes.append(tuple(mpq(x) for x in magnus_quadratic(r, n)))
        except NonCommutatorRelator:
            raise UnsupportedPresentation(
                "unsupported presentation class - supply cup structure explicitly"
            ) from None
    return CupStructure(n, tuple(classes))


def parse_cup_structure(text: str) -> CupStructure:
    """Format: 'h1 <n>' then 'class <c> on <p> <q> [, <c> on <p> <q> ...]' (1-based)."""
    n = None
    classes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        if keyword == "h1":
            try:
                n = int(rest)
            except ValueError:
                raise PresentationError("h1 needs an integer", lineno) from None
            idx = wedge_index(n)
        elif keyword == "class":
            if n is None:
                raise PresentationError("'class' before 'h1'", lineno)
            vec = [mpq(0)] * len(idx)
            for chunk in filter(None, (c.strip() for c in rest.split(","))):
                m = re.fullmatch(r"(\S+)\s+on\s+(\d+)\s+(\d+)", chunk)
                if not m:
                    raise PresentationError(f"bad class term {chunk!r}", lineno)
                c = mpq(m.group(1))
                pp, qq = int(m.group(2)) - 1, int(m.group(3)) - 1
                if not (0 <= pp < n and 0 <= qq < n) or pp == qq:
                    raise PresentationError(f"bad wedge indices in {chunk!r}", lineno)
                if pp > qq:
                    pp, qq, c = qq, pp, -c
                vec[idx[(pp, qq)]] += c
            classes.append(tuple(vec))
        else:
            raise PresentationError(f"unknown keyword {keyword!r}", lineno)
    if n is None:
        raise PresentationError("missing 'h1' line")
    return CupStructure(n, tuple(classes))


# ---------------------------------------------------------------- combinators


def _merge_names(a: Sequence[str], b: Sequence[str]) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    if set(a) & set(b):
        return tuple(f"a.{x}" for x in a), tuple(f"b.{x}" for x in b)
    return tuple(a), tuple(b)


def _shift(w: Word, k: int) -> Word:
    return Word(tuple((i + k, e) for i, e in w.letters))


def free_product(p1: GroupPresentation, p2: GroupPresentation) -> GroupPresentation:
    n1, n2 = _merge_names(p1.generator_names, p2.generator_names)
    s1 = p1.num_generators
    rels = tuple(p1.relators) + tuple(_shift(r, s1) for r in p2.relators)
    return GroupPresentation(f"({p1.name} * {p2.name})", n1 + n2, rels)


def direct_product(p1: GroupPresentation, p2: GroupPresentation) -> GroupPresentation:
    n1, n2 = _merge_names(p1.generator_names, p2.generator_names)
    s1, s2 = p1.num_generators, p2.num_generators
    rels = list(p1.relators) + [_shift(r, s1) for r in p2.relators]
    for i in range(s1):
        for j in range(s2):
            rels.append(commutator(Word.gen(i), Word.gen(s1 + j)))
    return GroupPresentation(f"({p1.name} x {p2.name})", n1 + n2, tuple(rels))


def free_group(n: int, name: str | None = None) -> GroupPresentation:
    return GroupPresentation(name or f"F{n}", tuple(default_names("x", n)), ())


def free_abelian(n: int, name: str | None = None) -> GroupPresentation:
    rels = tuple(commutator(Word.gen(i), Word.gen(j)) for i, j in combinations(range(n), 2))
    return GroupPresentation(name or f"Z{n}", tuple(default_names("x", n)), rels)


def surface_group(g: int) -> GroupPresentation:
    names = []
    for i in range(1, g + 1):
        names += [f"a{i}", f"b{i}"]
    rel = Word()
    for i in range(g):
        rel = rel * commutator(Word.gen(2 * i), Word.gen(2 * i + 1))
    return GroupPresentation(f"surface-g{g}", tuple(names), (rel,))


def word_to_poly_images(w: Word, images: Sequence[Tuple[int, ...]]) -> Tuple[int, ...]:
    total = [0] * (len(images[0]) if images else 0)
    for i, e in w.letters:
        for k, x in enumerate(images[i]):
            total[k] += e * x
    return tuple(total)


def _unused(*_: object) -> None:  # pragma: no cover
    Polynomial  # keep import for type references in docs
