"""Hyperedge replacement grammars with a designated (delta) edge per production."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace as dc_replace
from functools import cached_property
from typing import Iterable, Sequence

from .errors import GrammarError, GraphError
from .hypergraph import Hypergraph, LabelTable, handle, replace_with_maps, validate


def natural_key(s: str):
    return [(0, int(tok), "") if tok.isdigit() else (1, 0, tok) for tok in re.findall(r"\d+|\D+", s)]


def default_delta(rhs: Hypergraph, labels: LabelTable) -> str:
    """Lowest-identifier terminal edge, else lowest-identifier nonterminal edge."""
    if not rhs.edges:
        raise GrammarError("edgeless right-hand side has no delta edge")
    terminal = [e.id for e in rhs.edges if labels.is_terminal(e.label)]
    pool = terminal or [e.id for e in rhs.edges]
    return min(pool, key=natural_key)


@dataclass(frozen=True)
class Production:
    id: str
    lhs: str
    rhs: Hypergraph
    delta: str | None = None

    def __post_init__(self):
        if self.rhs.edges and self.delta is None:
            raise GrammarError(f"production {self.id!r}: missing delta edge")
        if not self.rhs.edges and self.delta is not None:
            raise GrammarError(f"production {self.id!r}: edgeless right-hand side cannot carry a delta")
        if self.delta is not None and not self.rhs.has_edge(self.delta):
            raise GrammarError(f"production {self.id!r}: delta {self.delta!r} is not an edge of the rhs")

    def __str__(self) -> str:
        tail = f" delta {self.delta}" if self.delta else ""
        return f"{self.id}: {self.lhs} -> {self.rhs.to_text()}{tail}"


def mu(p: Production) -> str:
    """Label of the production's delta edge."""
    if p.delta is None:
        raise GrammarError(f"production {p.id!r} is edgeless and has no delta")
    return p.rhs.edge(p.delta).label


def make_production(pid: str, lhs: str, rhs: Hypergraph, labels: LabelTable, delta: str | None = None) -> Production:
    if delta is None and rhs.edges:
        delta = default_delta(rhs, labels)
    return Production(pid, lhs, rhs, delta)


@dataclass(frozen=True)
class Grammar:
    labels: LabelTable
    productions: tuple[Production, ...]
    start: str
    name: str = "g"

    def __post_init__(self):
        object.__setattr__(self, "productions", tuple(self.productions))
        problems = self.diagnostics()
        if problems:
            raise GrammarError("; ".join(problems))

    def diagnostics(self) -> list[str]:
        out = []
        if self.start not in self.labels or not self.labels.is_nonterminal(self.start):
            out.append(f"start symbol {self.start!r} is not a nonterminal")
        seen = set()
        for p in self.productions:
            if p.id in seen:
                out.append(f"duplicate production id {p.id!r}")
            seen.add(p.id)
            if p.lhs not in self.labels or not self.labels.is_nonterminal(p.lhs):
                out.append(f"production {p.id!r}: lhs {p.lhs!r} is not a nonterminal")
                continue
            if self.labels.arity(p.lhs) != p.rhs.type:
                out.append(
                    f"production {p.id!r}: lhs {p.lhs!r} has arity {self.labels.arity(p.lhs)} "
                    f"but rhs has {p.rhs.type} external nodes"
                )
            out.extend(f"production {p.id!r}: {d}" for d in validate(p.rhs, self.labels))
        return out

    @cached_property
    def _by_id(self) -> dict[str, Production]:
        return {p.id: p for p in self.productions}

    @cached_property
    def _by_lhs(self) -> dict[str, list[Production]]:
        out: dict[str, list[Production]] = {}
        for p in self.productions:
            out.setdefault(p.lhs, []).append(p)
        return out

    def production(self, pid: str) -> Production:
        try:
            return self._by_id[pid]
        except KeyError:
            raise GrammarError(f"unknown production {pid!r}") from None

    def productions_of(self, lhs: str) -> list[Production]:
        return self._by_lhs.get(lhs, [])

    def is_terminal(self, label: str) -> bool:
        return self.labels.is_terminal(label)

    def terminal_edges(self, g: Hypergraph) -> list[str]:
        return [e.id for e in g.edges if self.labels.is_terminal(e.label)]

    def nonterminal_edges(self, g: Hypergraph) -> list[str]:
        return [e.id for e in g.edges if self.labels.is_nonterminal(e.label)]

    def with_productions(self, productions: Iterable[Production], labels: LabelTable | None = None) -> "Grammar":
        return dc_replace(self, productions=tuple(productions), labels=labels if labels is not None else self.labels)


@dataclass(frozen=True)
class SententialForm:
    graph: Hypergraph
    provenance: tuple[tuple[str, str], ...] | None = None

    @classmethod
    def start(cls, g: Grammar, track: bool = False) -> "SententialForm":
        return cls(handle(g.start, g.labels), () if track else None)


def apply(g: Grammar, form: SententialForm, e: str, p: str) -> SententialForm:
    """One direct derivation step: rewrite edge ``e`` with production ``p``."""
    prod = g.production(p)
    edge = form.graph.edge(e)
    if edge.label != prod.lhs:
        raise GrammarError(f"edge {e!r} is labeled {edge.label!r}, production {p!r} rewrites {prod.lhs!r}")
    new, _, _ = replace_with_maps(form.graph, e, prod.rhs)
    prov = None if form.provenance is None else form.provenance + ((p, e),)
    return SententialForm(new, prov)


def is_delta_derivation(g: Grammar, steps: Sequence[tuple[str, str]], start: str) -> bool:
    """True iff every step rewrites the image of the previous production's delta
    edge (the first step rewrites the handle's edge) and only the last step's
    production may have a terminal delta label."""
    current = handle(start, g.labels)
    expected = current.edges[0].id
    for k, (pid, target) in enumerate(steps):
        prod = g.production(pid)
        if target != expected or not current.has_edge(target):
            return False
        if current.edge(target).label != prod.lhs:
            return False
        if prod.delta is None:
            return False
        if k < len(steps) - 1 and g.is_terminal(mu(prod)):
            return False
        try:
            current, _, emap = replace_with_maps(current, target, prod.rhs)
        except GraphError:
            return False
        expected = emap[prod.delta]
    return True
