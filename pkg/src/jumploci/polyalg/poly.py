"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

from gmpy2 import mpq

Monomial = Tuple[int, ...]
_MPQ = type(mpq(0))


def lex_key(m: Monomial):
    return m


def grevlex_key(m: Monomial):
    return (sum(m), tuple(-e for e in reversed(m)))


def elim_key(nelim: int):
    """Block order: the first `nelim` variables dominate, grevlex inside each block."""

    def key(m: Monomial):
        return (grevlex_key(m[:nelim]), grevlex_key(m[nelim:]))

    return key


ORDERS = {"lex": lex_key, "grevlex": grevlex_key}


def order_key(order):
    if callable(order):
        return order
    try:
        return ORDERS[order]
    except KeyError:
        raise ValueError(f"unknown monomial order {order!r}") from None


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(b: Monomial, a: Monomial) -> bool:
    return all(y <= x for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_coprime(a: Monomial, b: Monomial) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


class Polynomial:
    """An element of Q[x_1, ..., x_n].

    ``terms`` maps exponent tuples to nonzero ``mpq`` coefficients. Instances
    are treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | None = None):
        self.nvars = nvars
        clean: Dict[Monomial, mpq] = {}
        if terms:
            for m, c in terms.items():
                if len(m) != nvars:
                    raise ValueError(f"monomial {m} does not match arity {nvars}")
                c = mpq(c)
                if c:
                    clean[tuple(m)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Monomial, mpq]) -> "Polynomial":
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        c = mpq(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        m = [0] * nvars
        m[i] = 1
        return cls._raw(nvars, {tuple(m): mpq(1)})

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Polynomial":
        return cls._raw(len(m), {tuple(m): mpq(c)} if c else {})

    @classmethod
    def linear_form(cls, coeffs: Sequence) -> "Polynomial":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                m = [0] * n
                m[i] = 1
                terms[tuple(m)] = mpq(c)
        return cls._raw(n, terms)

    # basic queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> mpq:
        return self.terms.get((0,) * self.nvars, mpq(0))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def order(self) -> int:
        """Lowest total degree of a term (-1 for the zero polynomial)."""
        return min((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def initial_form(self) -> "Polynomial":
        """Lowest-degree homogeneous component."""
        if not self.terms:
            return self
        d = self.order()
        return Polynomial._raw(self.nvars, {m: c for m, c in self.terms.items() if sum(m) == d})

    def leading_term(self, order="grevlex") -> Tuple[Monomial, mpq]:
        key = order_key(order)
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def leading_monomial(self, order="grevlex") -> Monomial:
        return max(self.terms, key=order_key(order))

    def sorted_terms(self, order="grevlex") -> list:
        key = order_key(order)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def variables(self) -> set:
        return {i for m in self.terms for i, e in enumerate(m) if e}

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in rings of different arity")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Polynomial._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = mpq(other)
            if not c:
                return Polynomial.zero(self.nvars)
            return Polynomial._raw(self.nvars, {m: v * c for m, v in self.terms.items()})
        other = self._coerce(other)
        terms: Dict[Monomial, mpq] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                s = terms.get(m, 0) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return Polynomial._raw(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, m: Monomial, c) -> "Polynomial":
        return Polynomial._raw(
            self.nvars, {tuple(x + y for x, y in zip(k, m)): v * c for k, v in self.terms.items()}
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction, _MPQ)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # normalizations

    def monic(self, order="grevlex") -> "Polynomial":
        if not self.terms:
            return self
        _, lc = self.leading_term(order)
        return self * (1 / lc)

    def primitive(self, order="grevlex") -> "Polynomial":
        """Scale to coprime integer coefficients with positive leading coefficient."""
        if not self.terms:
            return self
        coeffs = list(self.terms.values())
        den = reduce(lambda a, b: a * b // gcd(a, b), (int(c.denominator) for c in coeffs), 1)
        num = reduce(gcd, (int((c * den).numerator) for c in coeffs), 0)
        scale = mpq(den, num)
        _, lc = self.leading_term(order)
        if lc < 0:
            scale = -scale
        return self * scale

    def monomial_content(self) -> Monomial:
        """Largest monomial dividing every term."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(col) for col in zip(*self.terms))

    def strip_monomial(self) -> "Polynomial":
        """Divide by the monomial content (a unit on the torus)."""
        g = self.monomial_content()
        if not any(g):
            return self
        return Polynomial._raw(self.nvars, {mono_div(m, g): c for m, c in self.terms.items()})

    # evaluation / substitution

    def evaluate(self, point: Sequence) -> mpq:
        total = mpq(0)
        pt = [mpq(x) for x in point]
        for m, c in self.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v *= x**e
            total += v
        return total

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Compose: replace variable i by images[i] (all images share one ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        if not images:
            return self
        target = images[0].nvars
        result = Polynomial.zero(target)
        powers: Dict[Tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            if (i, e) not in powers:
                powers[(i, e)] = images[i] ** e
            return powers[(i, e)]

        for m, c in self.terms.items():
            term = Polynomial.constant(target, c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def extend(self, nvars: int, positions: Sequence[int] | None = None) -> "Polynomial":
        """Embed into a ring with more variables; variable i goes to positions[i]."""
        if positions is None:
            positions = range(self.nvars)
        positions = list(positions)
        terms = {}
        for m, c in self.terms.items():
            new = [0] * nvars
            for i, e in zip(positions, m):
                new[i] = e
            terms[tuple(new)] = c
        return Polynomial._raw(nvars, terms)

    def restrict(self, keep: Sequence[int]) -> "Polynomial":
        """Drop variables not in `keep`; they must not occur."""
        keep = list(keep)
        terms = {}
        for m, c in self.terms.items():
            if any(e for i, e in enumerate(m) if i not in keep):
                raise ValueError("dropped variable occurs in polynomial")
            terms[tuple(m[i] for i in keep)] = c
        return Polynomial._raw(len(keep), terms)

    def set_zero(self, i: int) -> "Polynomial":
        return Polynomial._raw(self.nvars, {m: c for m, c in self.terms.items() if m[i] == 0})

    def homogeneous_components(self) -> Dict[int, "Polynomial"]:
        parts: Dict[int, Dict[Monomial, mpq]] = {}
        for m, c in self.terms.items():
            parts.setdefault(sum(m), {})[m] = c
        return {d: Polynomial._raw(self.nvars, t) for d, t in parts.items()}

    # text

    def to_str(self, names: Sequence[str] | None = None, order="grevlex") -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        out = []
        for idx, (m, c) in enumerate(self.sorted_terms(order)):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            factors = [names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e]
            if a != 1 or not factors:
                factors.insert(0, str(a))
            body = "*".join(factors)
            if idx == 0:
                out.append(body if sign == "+" else "-" + body)
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_str()})"

    __str__ = to_str


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_polynomial(text: str, names: Sequence[str]) -> Polynomial:
    """Parse strings like ``"3/2*t1^2*t2 - t1 + 1"`` over the given variable names."""
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial string")
    # allow a negative exponent sign to survive the term split
    s = s.replace("^-", "^~")
    result = Polynomial.zero(n)
    pos = 0
    first = True
    while pos < len(s):
        match = _TERM_RE.match(s, pos)
        if not match or match.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r} at offset {pos}")
        sign, body = match.group(1), match.group(2).strip()
        if sign is None and not first:
            raise ValueError(f"missing operator in {text!r}")
        first = False
        coeff = mpq(-1 if sign == "-" else 1)
        mono = [0] * n
        for factor in body.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            base, _, exp = factor.partition("^")
            base = base.strip()
            e = int(exp.replace("~", "-")) if exp else 1
            if base in index:
                if e < 0:
                    raise ValueError("negative exponents are not polynomial")
                mono[index[base]] += e
            else:
                try:
                    coeff *= mpq(base) ** e
                except ValueError:
                    raise ValueError(f"unknown variable {base!r} in {text!r}") from None
        result = result + Polynomial.monomial(tuple(mono), coeff)
        pos = match.end()
    return result


def default_names(prefix: str, n: int) -> list:
    return [f"{prefix}{i + 1}" for i in range(n)]


def iter_monomials(nvars: int, degree: int) -> Iterator[Monomial]:
    """All exponent vectors of the given total degree."""
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    for first in range(degree, -1, -1):
        for rest in iter_monomials(nvars - 1, degree - first):
            yield (first,) + rest


def sum_polys(polys: Iterable[Polynomial], nvars: int) -> Polynomial:
    total = Polynomial.zero(nvars)
    for p in polys:
        total = total + p
    return total
