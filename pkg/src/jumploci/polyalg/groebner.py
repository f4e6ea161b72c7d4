"""Buchberger's algorithm and the ideal operations built on it."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .poly import (
    Monomial,
    Polynomial,
    default_names,
    elim_key,
    mono_coprime,
    mono_divides,
    mono_lcm,
    order_key,
)


class BudgetExceeded(RuntimeError):
    """A Groebner computation outgrew its configured resource caps."""


@dataclass(frozen=True)
class Budget:
    max_basis: int = 2000
    max_terms: int = 200_000
    max_pairs: int = 200_000


DEFAULT_BUDGET = Budget()
_budget = DEFAULT_BUDGET


def set_default_budget(budget: Budget) -> None:
    global _budget
    _budget = budget


def get_default_budget() -> Budget:
    return _budget


class _GBPoly:
    """Working polynomial: terms sorted descending by the active order."""

    __slots__ = ("lm", "lc", "terms", "sugar")

    def __init__(self, terms: List[Tuple[Monomial, mpq]], sugar: int):
        self.terms = terms
        self.lm, self.lc = terms[0]
        self.sugar = sugar


def _sorted(p: Polynomial, key) -> List[Tuple[Monomial, mpq]]:
    return sorted(p.terms.items(), key=lambda t: key(t[0]), reverse=True)


def _negate(k):
    if isinstance(k, tuple):
        return tuple(_negate(x) for x in k)
    return -k


def _reduce(
    f: Dict[Monomial, mpq],
    basis: Sequence[_GBPoly],
    key,
    max_terms: int = 0,
) -> Dict[Monomial, mpq]:
    """Divide f by basis and return the fully reduced remainder.

    A heap orders pending monomials; each one is either cancelled by a
    basis leading term or moved into the remainder.
    """
    pending = dict(f)
    heap = [(_negate(key(m)), m) for m in pending]
    heapq.heapify(heap)
    remainder: Dict[Monomial, mpq] = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = pending.pop(m)
        if not c:
            continue
        divisor = None
        for g in basis:
            if mono_divides(g.lm, m):
                divisor = g
                break
        if divisor is None:
            remainder[m] = c
            continue
        q = c / divisor.lc
        shift = tuple(a - b for a, b in zip(m, divisor.lm))
        for gm, gc in divisor.terms[1:]:
            nm = tuple(a + b for a, b in zip(gm, shift))
            if nm in pending:
                pending[nm] -= q * gc
            else:
                pending[nm] = -q * gc
                heapq.heappush(heap, (_negate(key(nm)), nm))
        if max_terms and len(pending) > max_terms:
            raise BudgetExceeded(f"intermediate polynomial exceeded {max_terms} terms")
    return remainder


def _to_gb(terms: Dict[Monomial, mpq], key) -> Optional[_GBPoly]:
    if not terms:
        return None
    items = sorted(terms.items(), key=lambda t: key(t[0]), reverse=True)
    lc = items[0][1]
    items = [(m, c / lc) for m, c in items]
    return _GBPoly(items, max(sum(m) for m, _ in items))


def buchberger(
    gens: Sequence[Polynomial],
    order="grevlex",
    budget: Optional[Budget] = None,
) -> List[Polynomial]:
    """Reduced Groebner basis of the ideal generated by `gens`.

    Uses the Gebauer-Moeller pair update (product and chain criteria) and
    the normal selection strategy (smallest lcm first). Output is monic and sorted by leading
    monomial, descending, so it is canonical for the ideal and order.
    """
    budget = budget or _budget
    key = order_key(order)
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    nvars = gens[0].nvars
    polys: List[_GBPoly] = []
    active: List[int] = []
    pairs: List[Tuple[int, int]] = []
    lcms: Dict[Tuple[int, int], Monomial] = {}

    def lcm_of(i: int, j: int) -> Monomial:
        k = (i, j) if i < j else (j, i)
        if k not in lcms:
            lcms[k] = mono_lcm(polys[i].lm, polys[j].lm)
        return lcms[k]

    def update(h: int) -> None:
        nonlocal active, pairs
        lm_h = polys[h].lm
        cand = list(active)
        keep = []
        for idx, g in enumerate(cand):
            l_gh = lcm_of(g, h)
            if mono_coprime(polys[g].lm, lm_h):
                keep.append(g)
                continue
            dominated = False
            for g2 in cand[idx + 1 :]:
                if mono_divides(lcm_of(g2, h), l_gh):
                    dominated = True
                    break
            if not dominated:
                for g2 in keep:
                    if mono_divides(lcm_of(g2, h), l_gh):
                        dominated = True
                        break
            if not dominated:
                keep.append(g)
        new_pairs = [(g, h) for g in keep if not mono_coprime(polys[g].lm, lm_h)]
        survivors = []
        for (a, b) in pairs:
            l_ab = lcm_of(a, b)
            if (
                mono_divides(lm_h, l_ab)
                and lcm_of(a, h) != l_ab
                and lcm_of(b, h) != l_ab
            ):
                continue
            survivors.append((a, b))
        pairs = survivors + new_pairs
        active = [g for g in active if not mono_divides(lm_h, polys[g].lm)] + [h]

    # interreduce-lite: sort inputs so small leading terms enter first
    start = []
    for g in gens:
        gp = _to_gb(dict(g.terms), key)
        start.append(gp)
    start.sort(key=lambda p: key(p.lm))
    for gp in start:
        rem = _reduce(dict(gp.terms), [polys[i] for i in active], key, max_terms=budget.max_terms)
        new = _to_gb(rem, key)
        if new is None:
            continue
        new.sugar = gp.sugar
        if not any(new.lm):
            return [Polynomial.constant(nvars, 1)]
        polys.append(new)
        update(len(polys) - 1)

    while pairs:
        if len(pairs) > budget.max_pairs:
            raise BudgetExceeded(f"pair queue exceeded {budget.max_pairs}")
        best = min(
            range(len(pairs)),
            key=lambda t: (key(lcm_of(*pairs[t])), pairs[t]),
        )
        i, j = pairs.pop(best)
        spoly, sugar = _spoly(polys[i], polys[j], lcm_of(i, j))
        if not spoly:
            continue
        rem = _reduce(spoly, [polys[a] for a in active], key, max_terms=budget.max_terms)
        new = _to_gb(rem, key)
        if new is None:
            continue
        new.sugar = max(sugar, new.sugar)
        if not any(new.lm):
            return [Polynomial.constant(nvars, 1)]
        polys.append(new)
        if len(active) + 1 > budget.max_basis:
            raise BudgetExceeded(f"basis exceeded {budget.max_basis} elements")
        if len(new.terms) > budget.max_terms:
            raise BudgetExceeded(f"basis element exceeded {budget.max_terms} terms")
        update(len(polys) - 1)

    return _reduced([polys[i] for i in active], key, nvars)


def _spoly(f: _GBPoly, g: _GBPoly, lcm: Monomial) -> Tuple[Dict[Monomial, mpq], int]:
    sf = tuple(a - b for a, b in zip(lcm, f.lm))
    sg = tuple(a - b for a, b in zip(lcm, g.lm))
    out: Dict[Monomial, mpq] = {}
    for m, c in f.terms[1:]:
        nm = tuple(a + b for a, b in zip(m, sf))
        out[nm] = out.get(nm, 0) + c
    for m, c in g.terms[1:]:
        nm = tuple(a + b for a, b in zip(m, sg))
        out[nm] = out.get(nm, 0) - c
    out = {m: c for m, c in out.items() if c}
    sugar = max(f.sugar + sum(sf), g.sugar + sum(sg))
    return out, sugar


def _reduced(basis: List[_GBPoly], key, nvars: int) -> List[Polynomial]:
    basis = sorted(basis, key=lambda p: key(p.lm))
    minimal: List[_GBPoly] = []
    for p in basis:
        if not any(mono_divides(q.lm, p.lm) for q in minimal):
            minimal.append(p)
    result = []
    for idx, p in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        tail = _reduce(dict(p.terms[1:]), others, key)
        tail[p.lm] = mpq(1)
        result.append(Polynomial._raw(nvars, tail))
    result.sort(key=lambda q: key(q.leading_monomial(key)), reverse=True)
    return result


def normal_form(f: Polynomial, basis: Sequence[Polynomial], order="grevlex") -> Polynomial:
    key = order_key(order)
    gb = [_to_gb(dict(g.terms), key) for g in basis if g]
    return Polynomial._raw(f.nvars, _reduce(dict(f.terms), gb, key))


def s_polynomial(f: Polynomial, g: Polynomial, order="grevlex") -> Polynomial:
    key = order_key(order)
    ff, gg = _to_gb(dict(f.terms), key), _to_gb(dict(g.terms), key)
    out, _ = _spoly(ff, gg, mono_lcm(ff.lm, gg.lm))
    return Polynomial._raw(f.nvars, out)


class Ideal:
    """An ideal of Q[vars], with lazily cached reduced Groebner bases."""

    def __init__(self, vars: Sequence[str], gens: Sequence[Polynomial] = ()):
        self.vars = tuple(vars)
        n = len(self.vars)
        for g in gens:
            if g.nvars != n:
                raise ValueError("generator arity does not match ring")
        self.gens = tuple(g for g in gens if not g.is_zero())
        self._cache = {}

    @classmethod
    def unit(cls, vars: Sequence[str]) -> "Ideal":
        return cls(vars, [Polynomial.constant(len(vars), 1)])

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "Ideal":
        return cls(vars, [])

    @classmethod
    def maximal_at_origin(cls, vars: Sequence[str]) -> "Ideal":
        n = len(vars)
        return cls(vars, [Polynomial.var(n, i) for i in range(n)])

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def groebner(self, order="grevlex", budget: Optional[Budget] = None) -> List[Polynomial]:
        cache_key = order if isinstance(order, str) else id(order)
        if cache_key not in self._cache:
            self._cache[cache_key] = buchberger(self.gens, order, budget)
        return self._cache[cache_key]

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def is_zero(self) -> bool:
        return not self.gens

    def contains(self, f: Polynomial) -> bool:
        return ideal_member(f, self)

    def __add__(self, other: "Ideal") -> "Ideal":
        _check_ring(self, other)
        return Ideal(self.vars, self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        _check_ring(self, other)
        return Ideal(self.vars, [f * g for f in self.gens for g in other.gens])

    def adjoin_origin(self) -> "Ideal":
        """Ideal whose zero set is Z(self) together with the origin."""
        return self * Ideal.maximal_at_origin(self.vars)

    def generator_strings(self, order="grevlex", reduced: bool = True) -> List[str]:
        polys = self.groebner(order) if reduced else list(self.gens)
        return [p.primitive(order).to_str(self.vars, order) for p in polys]

    def to_json(self, order="grevlex") -> dict:
        return {"vars": list(self.vars), "gens": self.generator_strings(order)}

    def __repr__(self) -> str:
        gens = ", ".join(g.to_str(self.vars) for g in self.gens)
        return f"Ideal([{gens}] in Q[{', '.join(self.vars)}])"


def _check_ring(a: Ideal, b: Ideal) -> None:
    if a.vars != b.vars:
        raise ValueError(f"ideals live in different rings: {a.vars} vs {b.vars}")


def ideal_from_json(data: dict) -> Ideal:
    from .poly import parse_polynomial

    names = list(data["vars"])
    return Ideal(names, [parse_polynomial(g, names) for g in data["gens"]])


def groebner_basis(ideal: Ideal, order="grevlex", budget: Optional[Budget] = None) -> List[Polynomial]:
    return ideal.groebner(order, budget)


def ideal_member(f: Polynomial, ideal: Ideal, order="grevlex") -> bool:
    if f.nvars != ideal.nvars:
        raise ValueError("polynomial and ideal live in different rings")
    if f.is_zero():
        return True
    return normal_form(f, ideal.groebner(order), order).is_zero()


def _fresh(vars: Sequence[str], stem: str) -> str:
    name = stem
    k = 0
    while name in vars:
        k += 1
        name = f"{stem}{k}"
    return name


def radical_member(f: Polynomial, ideal: Ideal, budget: Optional[Budget] = None) -> bool:
    """f in sqrt(I), via 1 in I + (1 - y f) with a fresh variable y."""
    if f.nvars != ideal.nvars:
        raise ValueError("polynomial and ideal live in different rings")
    if f.is_zero():
        return True
    if not ideal.gens:
        return False
    basis = ideal.groebner("grevlex", budget)
    if len(basis) == 1 and basis[0].is_constant():
        return True
    # cheap certificates first: f^m in I for small m
    power = f
    for _ in range(3):
        if normal_form(power, basis).is_zero():
            return True
        power = power * f
    n = ideal.nvars
    y = Polynomial.var(n + 1, n)
    # seeding with the reduced basis is much cheaper than the raw generators
    gens = [g.extend(n + 1) for g in basis]
    gens.append(Polynomial.constant(n + 1, 1) - y * f.extend(n + 1))
    gb = buchberger(gens, "grevlex", budget)
    return len(gb) == 1 and gb[0].is_constant()


def saturate(
    gens: Sequence[Polynomial], var: int, budget: Optional[Budget] = None
) -> List[Polynomial]:
    """Generators of I : x_var^infinity, by eliminating z from I + (1 - z x_var)."""
    if not gens:
        return []
    n = gens[0].nvars
    # z is placed first so the block order eliminates it
    lifted = [g.extend(n + 1, range(1, n + 1)) for g in gens]
    z = Polynomial.var(n + 1, 0)
    xv = Polynomial.var(n + 1, var + 1)
    lifted.append(Polynomial.constant(n + 1, 1) - z * xv)
    gb = buchberger(lifted, elim_key(1), budget)
    return [g.restrict(range(1, n + 1)) for g in gb if all(m[0] == 0 for m in g.terms)]


def tangent_cone_ideal(ideal: Ideal, budget: Optional[Budget] = None) -> Ideal:
    """Ideal of initial (lowest-degree) forms of the germ of `ideal` at the origin.

    Each generator f of order m becomes f(y*x)/y^m; the ideal they generate is
    saturated with respect to y and then specialised at y = 0.
    """
    n = ideal.nvars
    if not ideal.gens:
        return Ideal.zero(ideal.vars)
    lifted = []
    for f in ideal.gens:
        m = f.order()
        terms = {}
        for mono, c in f.terms.items():
            terms[mono + (sum(mono) - m,)] = c
        lifted.append(Polynomial._raw(n + 1, terms))
    sat = saturate(lifted, n, budget)
    cone = [g.set_zero(n).restrict(range(n)) for g in sat]
    cone = [g for g in cone if not g.is_zero()]
    result = Ideal(ideal.vars, cone)
    # canonical generators
    return Ideal(ideal.vars, result.groebner("grevlex", budget))


def variety_contained(I: Ideal, J: Ideal, budget: Optional[Budget] = None) -> bool:
    """Z(I) is a subset of Z(J): every generator of J lies in sqrt(I)."""
    _check_ring(I, J)
    return all(radical_member(g, I, budget) for g in J.gens)


def variety_equal(I: Ideal, J: Ideal, budget: Optional[Budget] = None) -> bool:
    return variety_contained(I, J, budget) and variety_contained(J, I, budget)


def variety_subset_union(
    ideal: Ideal,
    comps: Sequence,
    include_origin: bool = False,
    budget: Optional[Budget] = None,
) -> bool:
    """Z(ideal) lies inside the union of linear subspaces (and the origin)."""
    n = ideal.nvars
    if not comps and not include_origin:
        raise ValueError("need at least one component or the origin")
    choices = [c.defining_forms() for c in comps]
    if include_origin:
        choices.append([Polynomial.var(n, i) for i in range(n)])
    for forms in choices:
        if not forms:
            # whole ambient space: union covers everything
            return True
    for combo in itertools.product(*choices):
        prod = Polynomial.constant(n, 1)
        for form in combo:
            prod = prod * form
        if not radical_member(prod, ideal, budget):
            return False
    return True


def ring_names(prefix: str, n: int) -> Tuple[str, ...]:
    return tuple(default_names(prefix, n))
