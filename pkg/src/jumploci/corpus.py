"""Bundled fixtures: presentations, cup structures, ideals, graphs and component lists."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional

from .fpgroup import CupStructure, GroupPresentation, parse_cup_structure, parse_presentation


class UnknownCorpusEntry(KeyError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    kind: str  # presentation | ideal | graph | components
    filename: str
    cup: Optional[str] = None
    components: Optional[str] = None
    description: str = ""


ENTRIES: Dict[str, CorpusEntry] = {
    e.name: e
    for e in [
        CorpusEntry("ziegler-2134", "presentation", "ziegler-2134.pres", components="ziegler.comp",
                    description="real-plane arrangement A(2134): 1-formal, not quasi-Kähler"),
        CorpusEntry("heisenberg", "presentation", "heisenberg.pres",
                    description="Heisenberg group, C*-bundle over an elliptic curve: not 1-formal"),
        CorpusEntry("trefoil", "presentation", "trefoil.pres", cup="trefoil.cup",
                    description="trefoil knot group, Alexander polynomial t^2 - t + 1"),
        CorpusEntry("surface-g1", "presentation", "surface-g1.pres", description="Z^2, the torus group"),
        CorpusEntry("surface-g2", "presentation", "surface-g2.pres", description="genus-2 surface group"),
        CorpusEntry("scroll-n3", "ideal", "scroll-n3.ideal", components="scroll-n3.comp",
                    description="R_1 of the pure braid group P_{1,3} on an elliptic curve, a rational normal scroll"),
        CorpusEntry("braid-4", "graph", "braid-4.graph", description="Artin graph of the braid group B_4"),
        CorpusEntry("p3", "graph", "p3.graph", description="path on 3 vertices"),
        CorpusEntry("p4", "graph", "p4.graph", description="path on 4 vertices"),
        CorpusEntry("c5", "graph", "c5.graph", description="5-cycle"),
        CorpusEntry("k4", "graph", "k4.graph", description="complete graph on 4 vertices"),
    ]
}


def corpus_names() -> List[str]:
    return sorted(ENTRIES)


def read_data(filename: str) -> str:
    """Text of a bundled data file."""
    try:
        return resources.files("jumploci.data").joinpath(filename).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UnknownCorpusEntry(filename) from None


def has_data(filename: str) -> bool:
    return resources.files("jumploci.data").joinpath(filename).is_file()


def corpus_entry(name: str) -> CorpusEntry:
    if name not in ENTRIES:
        raise UnknownCorpusEntry(f"unknown corpus entry {name!r}; known: {', '.join(corpus_names())}")
    return ENTRIES[name]


def corpus(name: str):
    """The stored object: GroupPresentation, Ideal or (name, LabeledGraph)."""
    e = corpus_entry(name)
    text = read_data(e.filename)
    if e.kind == "presentation":
        return parse_presentation(text, default_name=name)
    if e.kind == "ideal":
        import json

        from .polyalg.groebner import ideal_from_json

        return ideal_from_json(json.loads(text))
    if e.kind == "graph":
        from .artin import parse_graph

        return parse_graph(text)
    raise AssertionError(e.kind)


def corpus_cup(name: str) -> Optional[CupStructure]:
    """An explicitly supplied cup structure, if the entry has one."""
    e = corpus_entry(name)
    return parse_cup_structure(read_data(e.cup)) if e.cup else None


def corpus_components(name: str):
    from .obstruct import parse_components

    e = corpus_entry(name)
    if not e.components:
        return None
    return parse_components(read_data(e.components))[1]


def corpus_presentations() -> List[str]:
    return [n for n in corpus_names() if ENTRIES[n].kind == "presentation"]


def corpus_cup_or_computed(name: str) -> CupStructure:
    from .fpgroup import cup_structure

    c = corpus_cup(name)
    if c is not None:
        return c
    p = corpus(name)
    assert isinstance(p, GroupPresentation)
    return cup_structure(p)
