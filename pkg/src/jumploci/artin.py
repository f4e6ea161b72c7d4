"""Graphs, right-angled Artin groups and labeled Artin graphs."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .fpgroup import GroupPresentation, Word, commutator, cup_structure
from .obstruct import P0, Component, isotropy_classify
from .polyalg.groebner import Ideal
from .polyalg.linear import LinearSubspace
from .polyalg.poly import Polynomial

MAX_VERTICES = 24

Edge = Tuple[int, int]


class GraphError(ValueError):
    pass


class GraphTooLarge(GraphError):
    pass


def _edge(a: int, b: int) -> Edge:
    if a == b:
        raise GraphError("loops are not allowed")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Graph:
    """Simple graph; vertex order is the input order."""

    vertex_names: Tuple[str, ...]
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self):
        names = tuple(self.vertex_names)
        if len(set(names)) != len(names):
            raise GraphError("duplicate vertex names")
        n = len(names)
        edges = frozenset(_edge(a, b) for a, b in self.edges)
        for a, b in edges:
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError("edge endpoint out of range")
        object.__setattr__(self, "vertex_names", names)
        object.__setattr__(self, "edges", edges)

    @property
    def n(self) -> int:
        return len(self.vertex_names)

    def adjacency(self) -> List[int]:
        """Neighbour bitmasks."""
        adj = [0] * self.n
        for a, b in self.edges:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return adj

    def has_edge(self, a: int, b: int) -> bool:
        return _edge(a, b) in self.edges

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def complement(self) -> "Graph":
        es = [(a, b) for a, b in combinations(range(self.n), 2) if (a, b) not in self.edges]
        return Graph(self.vertex_names, frozenset(es))

    def induced(self, vertices: Sequence[int]) -> "Graph":
        idx = {v: i for i, v in enumerate(vertices)}
        es = [(idx[a], idx[b]) for a, b in self.edges if a in idx and b in idx]
        return Graph(tuple(self.vertex_names[v] for v in vertices), frozenset(es))

    def components(self) -> List[List[int]]:
        return [sorted(_bits(m)) for m in _components(self.adjacency(), (1 << self.n) - 1)]

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1

    def to_text(self, name: str = "G") -> str:
        lines = [f"graph {name}", "vertices " + " ".join(self.vertex_names)]
        lines += [f"edge {self.vertex_names[a]} {self.vertex_names[b]}" for a, b in self.sorted_edges()]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LabeledGraph:
    graph: Graph
    labels: Tuple[Tuple[Edge, int], ...] = ()

    def __post_init__(self):
        lab = {_edge(*e): int(m) for e, m in self.labels}
        for e in self.graph.edges:
            lab.setdefault(e, 2)
        if set(lab) != set(self.graph.edges):
            raise GraphError("labels on non-edges")
        if any(m < 2 for m in lab.values()):
            raise GraphError("edge labels must be integers >= 2")
        object.__setattr__(self, "labels", tuple(sorted(lab.items())))

    def label(self, a: int, b: int) -> int:
        return dict(self.labels)[_edge(a, b)]


# ---------------------------------------------------------------- constructors


def _names(n: int) -> Tuple[str, ...]:
    return tuple(f"v{i + 1}" for i in range(n))


def discrete_graph(n: int) -> Graph:
    return Graph(_names(n))


def complete_graph(n: int) -> Graph:
    return Graph(_names(n), frozenset(combinations(range(n), 2)))


def path_graph(n: int) -> Graph:
    return Graph(_names(n), frozenset((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    es = {(i, i + 1) for i in range(n - 1)}
    if n >= 3:
        es.add((0, n - 1))
    return Graph(_names(n), frozenset(es))


def join(g: Graph, h: Graph) -> Graph:
    """Disjoint union plus every edge between the two vertex sets."""
    names = tuple(g.vertex_names) + tuple(h.vertex_names)
    if len(set(names)) != len(names):
        names = tuple(f"a.{x}" for x in g.vertex_names) + tuple(f"b.{x}" for x in h.vertex_names)
    k = g.n
    es = set(g.edges) | {(a + k, b + k) for a, b in h.edges}
    es |= {(a, k + b) for a in range(g.n) for b in range(h.n)}
    return Graph(names, frozenset(es))


def complete_multipartite_graph(parts: Sequence[int]) -> Graph:
    g = Graph(())
    for i, size in enumerate(parts):
        piece = Graph(tuple(f"v{i + 1}_{j + 1}" for j in range(size)))
        g = join(g, piece) if g.n else piece
    return g


def braid_graph(n: int) -> LabeledGraph:
    """Complete graph on n-1 vertices (Artin group of the braid group B_n):
    label 3 on consecutive vertices, 2 otherwise."""
    g = complete_graph(n - 1)
    labels = tuple(((a, b), 3 if b == a + 1 else 2) for a, b in g.sorted_edges())
    return LabeledGraph(g, labels)


def parse_graph(text: str) -> Tuple[str, LabeledGraph]:
    """Format: 'graph NAME', 'vertices a b c', lines 'edge a b [label]' (label defaults to 2)."""
    name = "G"
    verts: Optional[List[str]] = None
    edges: Dict[Edge, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if key == "graph":
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: 'graph' takes one name")
            name = parts[1]
        elif key == "vertices":
            if verts is not None:
                raise GraphError(f"line {lineno}: duplicate 'vertices' line")
            verts = parts[1:]
            if len(set(verts)) != len(verts):
                raise GraphError(f"line {lineno}: duplicate vertex names")
        elif key == "edge":
            if verts is None:
                raise GraphError(f"line {lineno}: 'edge' before 'vertices'")
            if len(parts) not in (3, 4):
                raise GraphError(f"line {lineno}: expected 'edge a b [label]'")
            idx = {v: i for i, v in enumerate(verts)}
            for v in parts[1:3]:
                if v not in idx:
                    raise GraphError(f"line {lineno}: unknown vertex {v!r}")
            try:
                label = int(parts[3]) if len(parts) == 4 else 2
            except ValueError:
                raise GraphError(f"line {lineno}: label must be an integer") from None
            if label < 2:
                raise GraphError(f"line {lineno}: label must be >= 2")
            try:
                e = _edge(idx[parts[1]], idx[parts[2]])
            except GraphError as exc:
                raise GraphError(f"line {lineno}: {exc}") from None
            if e in edges:
                raise GraphError(f"line {lineno}: repeated edge")
            edges[e] = label
        else:
            raise GraphError(f"line {lineno}: unknown keyword {key!r}")
    if verts is None:
        raise GraphError("missing 'vertices' line")
    g = Graph(tuple(verts), frozenset(edges))
    return name, LabeledGraph(g, tuple(edges.items()))


# ---------------------------------------------------------------- bitmask helpers


def _bits(mask: int) -> List[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _components(adj: Sequence[int], mask: int) -> List[int]:
    comps = []
    rest = mask
    while rest:
        low = rest & -rest
        comp, frontier = low, low
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = adj[v] & mask & ~comp
            comp |= new
            frontier |= new
        comps.append(comp)
        rest &= ~comp
    return comps


def _disconnected(adj: Sequence[int], mask: int) -> bool:
    return len(_components(adj, mask)) >= 2


# ---------------------------------------------------------------- RAAGs


def raag_presentation(g: Graph, name: str = "raag") -> GroupPresentation:
    rels = tuple(commutator(Word.gen(a), Word.gen(b)) for a, b in g.sorted_edges())
    return GroupPresentation(name, g.vertex_names, rels)


def maximal_disconnected_subsets(g: Graph) -> List[Tuple[int, ...]]:
    """All W with Gamma(W) disconnected and no disconnected proper superset.

    A disconnected W is maximal iff adding any single outside vertex yields a
    connected subgraph, which is what is checked.
    """
    if g.n > MAX_VERTICES:
        raise GraphTooLarge(f"graph has {g.n} vertices; the cap is {MAX_VERTICES}")
    adj = g.adjacency()
    n = g.n
    full = (1 << n) - 1
    found = []
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        if not _disconnected(adj, mask):
            continue
        outside = full & ~mask
        maximal = True
        while outside:
            v = outside & -outside
            outside &= outside - 1
            # adding v keeps it disconnected iff v misses some component entirely
            if _disconnected(adj, mask | v):
                maximal = False
                break
        if maximal:
            found.append(tuple(_bits(mask)))
    return sorted(found)


def raag_cup_structure(g: Graph):
    return cup_structure(raag_presentation(g))


def raag_resonance_components(g: Graph) -> List[Component]:
    """Coordinate subspaces C^W for maximal disconnected W, with computed isotropy."""
    c = raag_cup_structure(g)
    out = []
    for W in maximal_disconnected_subsets(g):
        V = LinearSubspace.coordinate(g.n, W)
        out.append(Component(V, isotropy_classify(V, c)))
    return out


@dataclass(frozen=True)
class Subtorus:
    """T_W = {t : t_v = 1 for v outside W}."""

    n: int
    support: Tuple[int, ...]

    def ideal(self, vars: Sequence[str]) -> Ideal:
        n = self.n
        return Ideal(vars, [Polynomial.var(n, i) - 1 for i in range(n) if i not in self.support])

    def tangent_space(self) -> LinearSubspace:
        return LinearSubspace.coordinate(self.n, self.support)

    def to_json(self, names: Sequence[str]) -> dict:
        return {
            "W": [names[i] for i in self.support],
            "equations": [f"t_{names[i]} = 1" for i in range(self.n) if i not in self.support],
        }


def raag_charvar_components(g: Graph) -> List[Subtorus]:
    return [Subtorus(g.n, W) for W in maximal_disconnected_subsets(g)]


def is_complete_multipartite(g: Graph) -> Optional[List[List[int]]]:
    """Parts of the decomposition if g is a join of discrete graphs, else None."""
    comp = g.complement()
    parts = comp.components() if g.n else []
    for part in parts:
        for a, b in combinations(part, 2):
            if not comp.has_edge(a, b):
                return None
    return parts


def free_product_structure(parts: Sequence[Sequence[int]]) -> str:
    """Name of the product of free groups F_{|P|} over the parts, Z standing for F_1."""
    sizes = sorted(len(p) for p in parts)
    ones = sizes.count(1)
    factors = []
    if ones == 1:
        factors.append("Z")
    elif ones > 1:
        factors.append(f"Z^{ones}")
    factors += [f"F_{m}" for m in sizes if m > 1]
    return " × ".join(factors) if factors else "1"


@dataclass
class SerreVerdict:
    quasi_kahler: bool
    parts: Optional[List[List[str]]] = None
    witness: Optional[str] = None
    counter_witness: Optional[dict] = None

    def summary(self) -> str:
        if self.quasi_kahler:
            return f"quasi-Kähler: yes ({self.witness})"
        return "quasi-Kähler: no"

    def to_json(self) -> dict:
        return {
            "quasi_kahler": self.quasi_kahler,
            "summary": self.summary(),
            "parts": self.parts,
            "witness": self.witness,
            "counter_witness": self.counter_witness,
        }


def raag_serre_verdict(g: Graph) -> SerreVerdict:
    parts = is_complete_multipartite(g)
    names = g.vertex_names
    if parts is not None:
        named = [[names[v] for v in p] for p in parts]
        return SerreVerdict(True, named, free_product_structure(parts))
    comps = raag_resonance_components(g)
    subsets = maximal_disconnected_subsets(g)
    for W, x in zip(subsets, comps):
        if x.p != P0:
            return SerreVerdict(
                False,
                counter_witness={"reason": "non-isotropic component", "W": [names[v] for v in W], "class": x.p},
            )
    for (i, a), (j, b) in combinations(enumerate(comps), 2):
        meet = a.subspace.intersect(b.subspace)
        if not meet.is_zero():
            return SerreVerdict(
                False,
                counter_witness={
                    "reason": "components meet away from 0",
                    "W": [[names[v] for v in subsets[i]], [names[v] for v in subsets[j]]],
                },
            )
    return SerreVerdict(False, counter_witness={"reason": "not complete multipartite"})


def raag_kahler_verdict(g: Graph) -> bool:
    """Kähler iff the RAAG is free abelian of even rank."""
    complete = len(g.edges) == g.n * (g.n - 1) // 2
    return complete and g.n % 2 == 0


def odd_contraction(lg: LabeledGraph) -> Graph:
    """Collapse the components of the odd-labeled subgraph; keep an edge when any
    original edge joins two classes."""
    g = lg.graph
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (a, b), m in lg.labels:
        if m % 2 == 1:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    classes: Dict[int, List[int]] = {}
    for v in range(g.n):
        classes.setdefault(find(v), []).append(v)
    blocks = sorted(classes.values())
    where = {v: i for i, blk in enumerate(blocks) for v in blk}
    es = {_edge(where[a], where[b]) for a, b in g.edges if where[a] != where[b]}
    names = tuple("+".join(g.vertex_names[v] for v in blk) for blk in blocks)
    return Graph(names, frozenset(es))


@dataclass
class MalcevVerdict:
    passes: bool
    contraction: Graph
    parts: Optional[List[List[str]]]

    def to_json(self) -> dict:
        return {
            "malcev_quasi_kahler": self.passes,
            "contraction": {
                "vertices": list(self.contraction.vertex_names),
                "edges": [[self.contraction.vertex_names[a], self.contraction.vertex_names[b]] for a, b in self.contraction.sorted_edges()],
            },
            "parts": self.parts,
        }


def artin_malcev_verdict(lg: LabeledGraph) -> MalcevVerdict:
    h = odd_contraction(lg)
    parts = is_complete_multipartite(h)
    named = [[h.vertex_names[v] for v in p] for p in parts] if parts is not None else None
    return MalcevVerdict(parts is not None, h, named)
