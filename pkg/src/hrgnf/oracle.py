"""Bounded language enumeration and checkable grammar properties.

Equivalence here is bounded: two grammars are compared on the terminal
graphs with at most ``max_edges`` edges and ``max_nodes`` nodes. A
difference is a sound refutation; equality is confirmation up to the
bounds only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from .errors import CapExceeded, GrammarError, PreconditionError
from .grammar import Grammar
from .hypergraph import (
    CanonicalCode,
    CompactGraph,
    Hypergraph,
    canonical_code,
    canonical_form,
    compact,
    encode_form,
    from_compact,
    handle,
    isize,
    replace,
)

# Sentential forms in property checks can be larger than language members;
# their dedup falls back to exact structural keys above this cap.
SENTENTIAL_CANON_CAP = 12


@dataclass(frozen=True)
class EnumerationBounds:
    max_edges: int = 6
    max_nodes: int = 8

    def __post_init__(self):
        if self.max_edges < 0 or self.max_nodes < 0:
            raise ValueError("bounds must be non-negative")


@dataclass
class LanguageSample:
    graphs: dict[CanonicalCode, Hypergraph] = field(default_factory=dict)
    complete: bool = True

    @property
    def codes(self) -> set[CanonicalCode]:
        return set(self.graphs)

    def __len__(self) -> int:
        return len(self.graphs)

    def __contains__(self, code: object) -> bool:
        return code in self.graphs

    def to_json(self) -> str:
        items = [{"code": str(c), "graph": self.graphs[c].to_text()} for c in sorted(self.graphs)]
        return json.dumps({"complete": self.complete, "graphs": items}, indent=2)


@dataclass(frozen=True)
class _Rule:
    lhs: str
    n: int
    t: int
    terminal_edges: tuple
    slots: tuple  # (label, att) per nonterminal edge


def _rules(g: Grammar) -> list[_Rule]:
    out = []
    for p in g.productions:
        n, t, edges = compact(p.rhs)
        terms = tuple(e for e in edges if g.labels.is_terminal(e[0]))
        slots = tuple(e for e in edges if g.labels.is_nonterminal(e[0]))
        out.append(_Rule(p.lhs, n, t, terms, slots))
    return out


def _assemble(rule: _Rule, members: tuple[CompactGraph, ...]) -> CompactGraph:
    edges = list(rule.terminal_edges)
    n = rule.n
    for (_, att), (mn, mt, medges) in zip(rule.slots, members):
        offset = n - mt
        n += mn - mt
        for lab, matt in medges:
            edges.append((lab, tuple(att[v] if v < mt else v + offset for v in matt)))
    return (n, rule.t, tuple(edges))


def enumerate_forms(g: Grammar, bounds: EnumerationBounds, canon_cap: int = 10) -> dict[str, set[CompactGraph]]:
    """Per-nonterminal sets of canonical terminal graphs within ``bounds``.

    Semi-naive bottom-up fixpoint: each round combines, for every production,
    member graphs of its nonterminal edges with at least one member found in
    the previous round. Members over the bounds are discarded, which is safe
    because every member embeds into any graph derived from it.
    """
    rules = _rules(g)
    members: dict[str, set[CompactGraph]] = {x: set() for x in g.labels.nonterminals()}
    sizes: dict[CompactGraph, tuple[int, int]] = {}
    delta: dict[str, set[CompactGraph]] = {x: set() for x in members}

    def offer(x: str, cg: CompactGraph, new: dict[str, set[CompactGraph]]):
        form = canonical_form(cg, canon_cap)
        if form not in members[x] and form not in new[x]:
            new[x].add(form)
            sizes[form] = (len(form[2]), form[0])

    first = {x: set() for x in members}
    for r in rules:
        if not r.slots and len(r.terminal_edges) <= bounds.max_edges and r.n <= bounds.max_nodes:
            offer(r.lhs, (r.n, r.t, r.terminal_edges), first)
    delta = first
    for x in members:
        members[x] |= delta[x]
    while any(delta.values()):
        new = {x: set() for x in members}
        old = {x: members[x] - delta[x] for x in members}
        for r in rules:
            if not r.slots:
                continue
            labels = [lab for lab, _ in r.slots]
            base_e = len(r.terminal_edges)
            base_n = r.n
            for pivot in range(len(labels)):
                if not delta[labels[pivot]]:
                    continue
                pools = []
                for i, lab in enumerate(labels):
                    pool = old[lab] if i < pivot else delta[lab] if i == pivot else members[lab]
                    pools.append(sorted(pool, key=sizes.__getitem__))
                if not all(pools):
                    continue
                _combine(r, pools, base_e, base_n, bounds, sizes, lambda cg: offer(r.lhs, cg, new))
        for x in members:
            members[x] |= new[x]
        delta = new
    return members


def _combine(rule, pools, edges0, nodes0, bounds, sizes, emit):
    slot_t = [len(att) for _, att in rule.slots]
    chosen: list = []

    def rec(i, e, n):
        if i == len(pools):
            emit(_assemble(rule, tuple(chosen)))
            return
        for m in pools[i]:
            me, mn = sizes[m]
            ne, nn = e + me, n + mn - slot_t[i]
            if ne > bounds.max_edges or nn > bounds.max_nodes:
                # Pools are sorted by (edges, nodes); later members cannot fit on edges.
                if ne > bounds.max_edges:
                    break
                continue
            chosen.append(m)
            rec(i + 1, ne, nn)
            chosen.pop()

    rec(0, edges0, nodes0)


def enumerate_language(g: Grammar, bounds: EnumerationBounds = EnumerationBounds(), canon_cap: int = 10) -> LanguageSample:
    """All terminal graphs of ``L(g)`` within ``bounds``, up to isomorphism."""
    forms = enumerate_forms(g, bounds, canon_cap)[g.start]
    return LanguageSample({encode_form(f): from_compact(f) for f in forms}, complete=True)


def enumerate_naive(g: Grammar, bounds: EnumerationBounds, depth: int, canon_cap: int = 10) -> LanguageSample:
    """Top-down breadth-first derivation search from the start handle, up to
    ``depth`` steps. Independent of :func:`enumerate_forms`; used to cross-check it."""
    start = handle(g.start, g.labels)
    frontier = {canonical_code(start, canon_cap): start}
    found: dict[CanonicalCode, Hypergraph] = {}
    truncated = False
    for _ in range(depth):
        nxt: dict[CanonicalCode, Hypergraph] = {}
        for form in frontier.values():
            for e in form.edges:
                if not g.labels.is_nonterminal(e.label):
                    continue
                for p in g.productions_of(e.label):
                    h = replace(form, e.id, p.rhs)
                    if len(h.nodes) > bounds.max_nodes:
                        continue
                    code = canonical_code(h, canon_cap)
                    if all(g.labels.is_terminal(x.label) for x in h.edges):
                        if len(h.edges) <= bounds.max_edges:
                            found.setdefault(code, h)
                    else:
                        nxt.setdefault(code, h)
        frontier = nxt
    if frontier:
        truncated = True
    return LanguageSample(found, complete=not truncated)


@dataclass(frozen=True)
class Verdict:
    holds: bool
    detail: str = ""
    witness: CanonicalCode | None = None
    witness_in: int | None = None

    def __bool__(self) -> bool:
        return self.holds


def _terminal_alphabet(g: Grammar) -> dict[str, int]:
    return {n: g.labels.arity(n) for n in g.labels.terminals()}


def languages_equal(g1: Grammar, g2: Grammar, bounds: EnumerationBounds = EnumerationBounds()) -> Verdict:
    """EQUAL within bounds, or DIFFER with a witness found in exactly one sample."""
    if _terminal_alphabet(g1) != _terminal_alphabet(g2):
        raise GrammarError("terminal alphabets differ")
    s1 = enumerate_language(g1, bounds).codes
    s2 = enumerate_language(g2, bounds).codes
    if s1 == s2:
        return Verdict(True, f"EQUAL on {len(s1)} graphs within {bounds.max_edges} edges, {bounds.max_nodes} nodes")
    only1 = sorted(s1 - s2)
    if only1:
        return Verdict(False, "DIFFER", only1[0], 1)
    return Verdict(False, "DIFFER", sorted(s2 - s1)[0], 2)


@dataclass(frozen=True)
class WGNFReport:
    holds: bool
    per_production: tuple[tuple[str, int], ...]

    def __bool__(self) -> bool:
        return self.holds


def is_wgnf(g: Grammar) -> WGNFReport:
    """Every rhs has exactly one terminal edge."""
    counts = tuple((p.id, len(g.terminal_edges(p.rhs))) for p in g.productions)
    return WGNFReport(all(c == 1 for _, c in counts), counts)


def _key(h: Hypergraph):
    try:
        return canonical_form(compact(h), SENTENTIAL_CANON_CAP)
    except CapExceeded:
        return ("raw", h)


def check_remark1(g: Grammar, depth: int) -> Verdict:
    """Every k-step derivation from a nonterminal handle carries exactly k
    terminal edges (explored exhaustively up to ``depth``, isomorphic
    sentential forms merged)."""
    if not is_wgnf(g):
        raise PreconditionError("grammar is not in WGNF")
    checked = 0
    for x in g.labels.nonterminals():
        frontier = {_key(h): h for h in [handle(x, g.labels)]}
        for k in range(1, depth + 1):
            nxt = {}
            for form in frontier.values():
                for e in form.edges:
                    if not g.labels.is_nonterminal(e.label):
                        continue
                    for p in g.productions_of(e.label):
                        h = replace(form, e.id, p.rhs)
                        checked += 1
                        got = len(g.terminal_edges(h))
                        if got != k:
                            return Verdict(False, f"{x}: {k}-step form with {got} terminal edges: {h}")
                        nxt.setdefault(_key(h), h)
            frontier = nxt
    return Verdict(True, f"{checked} derivation steps checked to depth {depth}")


def isolation_constant(g: Grammar) -> int:
    return max((isize(p.rhs) for p in g.productions), default=0) + 1


def check_theorem1_bound(g: Grammar, bounds: EnumerationBounds = EnumerationBounds()) -> Verdict:
    """``isize(G) < M * esize(G)`` for every enumerated graph, ``M`` being the
    largest rhs isolated-node count plus one."""
    if not is_wgnf(g):
        raise PreconditionError("grammar is not in WGNF")
    m = isolation_constant(g)
    sample = enumerate_language(g, bounds)
    for code, h in sample.graphs.items():
        if not isize(h) < m * len(h.edges):
            return Verdict(False, f"isize {isize(h)} >= {m} * esize {len(h.edges)}", code)
    return Verdict(True, f"M={m}; {len(sample)} graphs satisfy the bound")
