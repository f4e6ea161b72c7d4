"""Command-line entry point: jumploci <subcommand> [options]."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

from gmpy2 import mpq

from . import corpus as corpus_mod
from .artin import (
    GraphError,
    LabeledGraph,
    artin_malcev_verdict,
    parse_graph,
    raag_charvar_components,
    raag_kahler_verdict,
    raag_resonance_components,
    raag_serre_verdict,
)
from .fpgroup import (
    CupStructure,
    GroupPresentation,
    PresentationError,
    TrivialTorus,
    UnsupportedPresentation,
    abelianize_presentation,
    cup_structure,
    parse_cup_structure,
    parse_presentation,
)
from .loci import charvar_ideal, charvar_point_test, resonance_ideal, tangent_cone_at_identity
from .obstruct import (
    ComponentFileError,
    formality_test,
    free_group_hint,
    obstruction_report,
    parse_components,
)
from .polyalg.groebner import BudgetExceeded, get_default_budget, set_default_budget

EXIT_OK, EXIT_INPUT, EXIT_OBSTRUCTION, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class InputError(Exception):
    pass


# ---------------------------------------------------------------- input resolution


def _read(path: str) -> str:
    """A file from disk, falling back to the bundled data directory."""
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    base = os.path.basename(path)
    if corpus_mod.has_data(base):
        return corpus_mod.read_data(base)
    raise InputError(f"file not found: {path}")


def load_group(args) -> Tuple[Optional[GroupPresentation], Optional[CupStructure], str]:
    """Presentation and cup structure from --corpus / --presentation / --cup."""
    p, c, name = None, None, "input"
    if args.corpus:
        e = corpus_mod.corpus_entry(args.corpus)
        if e.kind != "presentation":
            raise InputError(f"corpus entry {args.corpus!r} is a {e.kind}, not a group")
        p = corpus_mod.corpus(args.corpus)
        c = corpus_mod.corpus_cup(args.corpus)
        name = args.corpus
    if getattr(args, "presentation", None):
        p = parse_presentation(_read(args.presentation))
        name = p.name
    if getattr(args, "cup", None):
        c = parse_cup_structure(_read(args.cup))
    if p is None and c is None:
        raise InputError("need --corpus, --presentation or --cup")
    return p, c, name


def need_cup(p: Optional[GroupPresentation], c: Optional[CupStructure]) -> CupStructure:
    if c is not None:
        return c
    assert p is not None
    return cup_structure(p)


def load_graph(args) -> Tuple[str, LabeledGraph]:
    if args.graph:
        return parse_graph(_read(args.graph))
    if args.corpus:
        e = corpus_mod.corpus_entry(args.corpus)
        if e.kind != "graph":
            raise InputError(f"corpus entry {args.corpus!r} is a {e.kind}, not a graph")
        return corpus_mod.corpus(args.corpus)
    raise InputError("need --graph or --corpus")


def k_values(spec: Optional[str], top: int, notes: List[str], low: int = 1) -> List[int]:
    """Parse --k ('2', '1-3' or 'all') and clamp to [0, top]."""
    if spec is None or spec == "all":
        return list(range(low, top + 1))
    try:
        if "-" in spec:
            a, b = spec.split("-", 1)
            ks = list(range(int(a), int(b) + 1))
        else:
            ks = [int(spec)]
    except ValueError:
        raise InputError(f"bad --k value {spec!r}") from None
    kept = [k for k in ks if 0 <= k <= top]
    if len(kept) != len(ks):
        notes.append(f"k range clamped to [0, {top}]")
    return kept


def parse_point(text: str) -> List[mpq]:
    try:
        return [mpq(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad --point {text!r}") from None


# ---------------------------------------------------------------- commands


def cmd_resonance(args) -> Tuple[dict, int, str]:
    notes: List[str] = []
    p, c, name = load_group(args)
    c = need_cup(p, c)
    ks = k_values(args.k, c.n, notes, low=0 if args.k else 1)
    loci = [resonance_ideal(c, k).to_json(args.order) for k in ks]
    hint = free_group_hint(p) if p is not None else None
    if hint:
        notes.append(hint)
    text = [f"{name}: n = {c.n}"] + [_locus_line(L) for L in loci]
    return {"command": "resonance", "group": name, "n": c.n, "loci": loci, "notes": notes}, EXIT_OK, "\n".join(text)


def _locus_line(L: dict) -> str:
    gens = ", ".join(L["generators"]) or "0"
    flag = "origin_included" if "origin_included" in L else "identity_member"
    return f"{L['kind']} k={L['k']}: ({gens})  {flag}={str(L[flag]).lower()}"


def _need_presentation(p, what: str) -> GroupPresentation:
    if p is None:
        raise InputError(f"{what} needs a presentation (--corpus or --presentation)")
    return p


def cmd_charvar(args) -> Tuple[dict, int, str]:
    notes: List[str] = []
    p, _, name = load_group(args)
    p = _need_presentation(p, "charvar")
    ab = abelianize_presentation(p)
    if ab.torsion_orders:
        notes.append("torsion in H_1 ignored: only the identity component of the character torus is modeled")
    out = {"command": "charvar", "group": name, "b1": ab.rank_b1, "torsion": list(ab.torsion_orders)}
    text = [f"{name}: b1 = {ab.rank_b1}"]
    if args.point:
        rho = parse_point(args.point)
        dim = charvar_point_test(p, rho)
        out["point"] = [str(x) for x in rho]
        out["dim_H1"] = dim
        text.append(f"dim H_1 at ({', '.join(out['point'])}) = {dim}")
    else:
        ks = k_values(args.k, ab.rank_b1, notes)
        out["loci"] = [charvar_ideal(p, k).to_json(args.order) for k in ks]
        text += [_locus_line(L) for L in out["loci"]]
    out["notes"] = notes
    return out, EXIT_OK, "\n".join(text)


def cmd_tangent_cone(args) -> Tuple[dict, int, str]:
    notes: List[str] = []
    p, _, name = load_group(args)
    p = _need_presentation(p, "tangent-cone")
    b1 = abelianize_presentation(p).rank_b1
    ks = k_values(args.k, b1, notes)
    cones = [tangent_cone_at_identity(charvar_ideal(p, k)).to_json(args.order) for k in ks]
    text = [f"{name}: b1 = {b1}"] + [_locus_line(L) for L in cones]
    return {"command": "tangent-cone", "group": name, "loci": cones, "notes": notes}, EXIT_OK, "\n".join(text)


def cmd_formality(args) -> Tuple[dict, int, str]:
    notes: List[str] = []
    p, c, name = load_group(args)
    p = _need_presentation(p, "formality")
    c = need_cup(p, c)
    b1 = abelianize_presentation(p).rank_b1
    ks = k_values(args.k, b1, notes)
    res = formality_test(p, c, k_values=ks)
    hint = free_group_hint(p)
    if hint:
        notes.append(hint)
    if res.verdict == "pass":
        notes.append("the tangent cone formula is a necessary condition; passing does not prove 1-formality")
    out = {"command": "formality", "group": name}
    out.update(res.to_json(args.order))
    out["notes"] = notes
    code = EXIT_OBSTRUCTION if res.verdict == "fail" else EXIT_OK
    lines = [f"{name}: {res.summary}"]
    lines += [f"k={k}: TC_1(V_k) {'=' if ok else '!='} R_k" for k, ok in res.per_k.items()]
    return out, code, "\n".join(lines)


def cmd_qkahler(args) -> Tuple[dict, int, str]:
    p, c, name = load_group(args)
    c = need_cup(p, c)
    if args.components:
        n, comps = parse_components(_read(args.components))
    elif args.corpus and corpus_mod.corpus_entry(args.corpus).components:
        comps = corpus_mod.corpus_components(args.corpus)
        n = c.n
    else:
        raise InputError("qkahler needs --components")
    if n != c.n:
        raise InputError(f"components live in Q^{n} but H^1 has dimension {c.n}")
    rep = obstruction_report(c, comps, p, order=args.order)
    out = {"command": "qkahler", "group": name}
    out.update(rep.to_json())
    lines = [f"{name}: " + "; ".join(rep.verdicts)]
    lines += [f"{t}: {v}" for t, v in out["tests"].items()]
    return out, rep.exit_code, "\n".join(lines)


def cmd_raag(args) -> Tuple[dict, int, str]:
    name, lg = load_graph(args)
    g = lg.graph
    notes: List[str] = []
    if any(m != 2 for _, m in lg.labels):
        notes.append("edge labels ignored: the right-angled Artin group uses the underlying graph")
    serre = raag_serre_verdict(g)
    comps = raag_resonance_components(g)
    tori = raag_charvar_components(g)
    out = {
        "command": "raag",
        "graph": name,
        "serre": serre.to_json(),
        "kahler": raag_kahler_verdict(g),
        "resonance_components": [
            {"W": [g.vertex_names[i] for i in t.support], "dim": x.dim, "p": x.p} for x, t in zip(comps, tori)
        ],
        "charvar_components": [t.to_json(g.vertex_names) for t in tori],
        "notes": notes,
    }
    lines = [serre.summary(), f"Kähler: {'yes' if out['kahler'] else 'no'}"]
    code = EXIT_OK if serre.quasi_kahler else EXIT_OBSTRUCTION
    return out, code, "\n".join(lines)


def cmd_artin(args) -> Tuple[dict, int, str]:
    name, lg = load_graph(args)
    v = artin_malcev_verdict(lg)
    out = {"command": "artin", "graph": name}
    out.update(v.to_json())
    out["notes"] = ["verdict concerns the Malcev completion only"]
    verts = ", ".join(v.contraction.vertex_names)
    lines = [
        f"odd contraction: {v.contraction.n} vert{'ex' if v.contraction.n == 1 else 'ices'} ({verts})",
        f"Malcev-level quasi-Kähler: {'yes' if v.passes else 'no'}",
    ]
    return out, EXIT_OK if v.passes else EXIT_OBSTRUCTION, "\n".join(lines)


def cmd_corpus(args) -> Tuple[dict, int, str]:
    if not args.name:
        entries = [
            {"name": e.name, "kind": e.kind, "description": e.description}
            for e in (corpus_mod.corpus_entry(n) for n in corpus_mod.corpus_names())
        ]
        lines = [f"{e['name']:14s} {e['kind']:13s} {e['description']}" for e in entries]
        return {"command": "corpus", "entries": entries, "notes": []}, EXIT_OK, "\n".join(lines)
    e = corpus_mod.corpus_entry(args.name)
    sub = argparse.Namespace(**vars(args))
    sub.corpus, sub.graph, sub.presentation, sub.cup, sub.components = args.name, None, None, None, None
    if e.kind == "graph":
        return cmd_raag(sub)
    if e.kind == "ideal":
        from .obstruct import component_cover_verify

        ideal = corpus_mod.corpus(args.name)
        comps = corpus_mod.corpus_components(args.name) or []
        res = component_cover_verify(comps, ideal)
        out = {"command": "corpus", "name": args.name, "ideal": ideal.to_json(args.order), "cover": res.to_json()}
        out["notes"] = ["a failed cover against linear candidates is consistent with a non-linear component"]
        return out, EXIT_OK if res.verdict == "pass" else EXIT_OBSTRUCTION, f"{args.name}: component cover {res.verdict}"
    if e.components:
        return cmd_qkahler(sub)
    return cmd_formality(sub)


# ---------------------------------------------------------------- plumbing


COMMANDS = {
    "resonance": cmd_resonance,
    "charvar": cmd_charvar,
    "tangent-cone": cmd_tangent_cone,
    "formality": cmd_formality,
    "qkahler": cmd_qkahler,
    "raag": cmd_raag,
    "artin": cmd_artin,
    "corpus": cmd_corpus,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code, not argparse's 2 (reserved for obstructions)."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jumploci", description="Cohomology jumping loci of finitely presented groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="emit JSON")
        sp.add_argument("--output", "-o", help="write the report to this file")
        sp.add_argument("--order", choices=("grevlex", "lex"), default="grevlex")
        sp.add_argument("--budget-terms", type=int, help="cap on polynomial terms during Groebner runs")
        sp.add_argument("--k", help="k, a range 'a-b', or 'all'")

    def group_inputs(sp):
        sp.add_argument("--corpus", help="bundled fixture name")
        sp.add_argument("--presentation", help="presentation file")
        sp.add_argument("--cup", help="cup-structure file")

    for name in ("resonance", "charvar", "tangent-cone", "formality", "qkahler"):
        sp = sub.add_parser(name)
        common(sp)
        group_inputs(sp)
        if name == "charvar":
            sp.add_argument("--point", help="character coordinates, e.g. '2,1/3'")
        if name == "qkahler":
            sp.add_argument("--components", help="component file")
    for name in ("raag", "artin"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--graph", help="graph file")
        sp.add_argument("--corpus", help="bundled graph name")
    sp = sub.add_parser("corpus")
    common(sp)
    sp.add_argument("name", nargs="?", help="run this entry end to end; list entries if omitted")
    return parser


def render(report: dict, text: str, as_json: bool) -> str:
    if as_json:
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    lines = [text] + [f"note: {n}" for n in report.get("notes", [])]
    return "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    old_budget = get_default_budget()
    if args.budget_terms is not None:
        if args.budget_terms <= 0:
            parser.error("--budget-terms must be positive")
        set_default_budget(replace(old_budget, max_terms=args.budget_terms))
    try:
        report, code, text = COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        report = {"command": args.command, "error": "budget exceeded", "detail": str(exc), "notes": []}
        code, text = EXIT_INCONCLUSIVE, f"budget exceeded: {exc}"
    except UnsupportedPresentation as exc:
        report = {"command": args.command, "error": str(exc), "notes": []}
        code, text = EXIT_INPUT, f"error: {exc}"
    except (InputError, PresentationError, GraphError, ComponentFileError, TrivialTorus, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        report = {"command": args.command, "error": msg, "notes": []}
        code, text = EXIT_INPUT, f"error: {msg}"
    finally:
        set_default_budget(old_budget)
    out = render(report, text, args.json)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
