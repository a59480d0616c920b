"""Hypergraphs with labeled, ordered hyperedges and an ordered external-node sequence.

Graphs are immutable values. Node and edge identifiers are opaque strings
scoped to one graph; operations that build new graphs pick fresh
identifiers deterministically (``v<n>`` / ``e<n>``, lowest unused ``n``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CapExceeded, GraphError

#: Default bound on internal nodes searched by :func:`canonical_code`.
DEFAULT_CANON_CAP = 8


class Kind(str, Enum):
    TERMINAL = "terminal"
    NONTERMINAL = "nonterminal"


@dataclass(frozen=True)
class Symbol:
    kind: Kind
    arity: int


class LabelTable:
    """Ordered alphabet of terminal and nonterminal labels with fixed arities.

    Insertion order is preserved; it is the numbering used when nonterminals
    have to be ordered.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[str, Symbol] | Iterable[tuple[str, Symbol]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        table: dict[str, Symbol] = {}
        for name, sym in items:
            if name in table:
                raise GraphError(f"duplicate label {name!r}")
            if sym.arity < 0:
                raise GraphError(f"negative arity for label {name!r}")
            table[name] = Symbol(Kind(sym.kind), sym.arity)
        self._entries = table

    @classmethod
    def of(cls, terminals: Mapping[str, int] = {}, nonterminals: Mapping[str, int] = {}) -> "LabelTable":
        entries = [(n, Symbol(Kind.NONTERMINAL, a)) for n, a in nonterminals.items()]
        entries += [(n, Symbol(Kind.TERMINAL, a)) for n, a in terminals.items()]
        return cls(entries)

    def __contains__(self, name: object) -> bool:
        return name in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LabelTable) and list(self._entries.items()) == list(other._entries.items())

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{n}: {s.kind.value}/{s.arity}" for n, s in self._entries.items())
        return f"LabelTable({body})"

    def items(self):
        return self._entries.items()

    def symbol(self, name: str) -> Symbol:
        try:
            return self._entries[name]
        except KeyError:
            raise GraphError(f"unknown label {name!r}") from None

    def arity(self, name: str) -> int:
        return self.symbol(name).arity

    def is_terminal(self, name: str) -> bool:
        return self.symbol(name).kind is Kind.TERMINAL

    def is_nonterminal(self, name: str) -> bool:
        return self.symbol(name).kind is Kind.NONTERMINAL

    def terminals(self) -> list[str]:
        return [n for n, s in self._entries.items() if s.kind is Kind.TERMINAL]

    def nonterminals(self) -> list[str]:
        return [n for n, s in self._entries.items() if s.kind is Kind.NONTERMINAL]

    def with_symbol(self, name: str, kind: Kind, arity: int) -> "LabelTable":
        if name in self._entries:
            raise GraphError(f"label {name!r} already registered")
        return LabelTable([*self._entries.items(), (name, Symbol(kind, arity))])

    def without(self, names: Iterable[str]) -> "LabelTable":
        drop = set(names)
        return LabelTable([(n, s) for n, s in self._entries.items() if n not in drop])


@dataclass(frozen=True)
class Edge:
    id: str
    label: str
    att: tuple[str, ...]


@dataclass(frozen=True)
class Hypergraph:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    ext: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "ext", tuple(self.ext))

    @cached_property
    def _edge_index(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def edge(self, eid: str) -> Edge:
        try:
            return self._edge_index[eid]
        except KeyError:
            raise GraphError(f"no edge {eid!r}") from None

    def has_edge(self, eid: str) -> bool:
        return eid in self._edge_index

    @property
    def type(self) -> int:
        return len(self.ext)

    def esize(self) -> int:
        return esize(self)

    def isize(self) -> int:
        return isize(self)

    def internal_nodes(self) -> list[str]:
        ext = set(self.ext)
        return [v for v in self.nodes if v not in ext]

    def to_text(self) -> str:
        """Render as a graph literal, e.g. ``{ nodes v0; ext v0; edge e1: a(v0); }``."""
        parts = ["{", "nodes" + "".join(" " + v for v in self.nodes) + ";",
                 "ext" + "".join(" " + v for v in self.ext) + ";"]
        for e in self.edges:
            parts.append(f"edge {e.id}: {e.label}({' '.join(e.att)});")
        parts.append("}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()


def esize(g: Hypergraph) -> int:
    return len(g.edges)


def isize(g: Hypergraph) -> int:
    """Number of nodes attached to no edge; external nodes are not exempt."""
    attached = {v for e in g.edges for v in e.att}
    return sum(1 for v in g.nodes if v not in attached)


def validate(g: Hypergraph, lt: LabelTable) -> list[str]:
    """Return one diagnostic per violated graph invariant (empty when valid)."""
    diags: list[str] = []
    node_set = set()
    for v in g.nodes:
        if v in node_set:
            diags.append(f"duplicate node id {v!r}")
        node_set.add(v)
    seen_edges = set()
    for e in g.edges:
        if e.id in seen_edges:
            diags.append(f"duplicate edge id {e.id!r}")
        seen_edges.add(e.id)
        for v in e.att:
            if v not in node_set:
                diags.append(f"edge {e.id!r} attaches unknown node {v!r}")
        if len(set(e.att)) != len(e.att):
            diags.append(f"edge {e.id!r} attachment repeats a node")
        if e.label not in lt:
            diags.append(f"edge {e.id!r} has unknown label {e.label!r}")
        elif lt.arity(e.label) != len(e.att):
            diags.append(
                f"arity mismatch on edge {e.id!r}: label {e.label!r} has arity "
                f"{lt.arity(e.label)} but {len(e.att)} attachment nodes"
            )
    for v in g.ext:
        if v not in node_set:
            diags.append(f"external node {v!r} is not a node")
    if len(set(g.ext)) != len(g.ext):
        diags.append("ext repeats a node")
    return diags


def handle(label: str, lt: LabelTable) -> Hypergraph:
    """The single-edge graph whose attachment sequence equals its external sequence."""
    t = lt.arity(label)
    nodes = tuple(f"v{i}" for i in range(t))
    return Hypergraph(nodes, (Edge("e0", label, nodes),), nodes)


def fresh_ids(prefix: str, taken: Iterable[str], count: int) -> list[str]:
    """``count`` identifiers ``<prefix><n>`` not in ``taken``, lowest ``n`` first."""
    used = set(taken)
    out = []
    n = 0
    while len(out) < count:
        cand = f"{prefix}{n}"
        if cand not in used:
            out.append(cand)
            used.add(cand)
        n += 1
    return out


def replace_with_maps(
    g: Hypergraph, e0: str, h: Hypergraph
) -> tuple[Hypergraph, dict[str, str], dict[str, str]]:
    """Replace edge ``e0`` of ``g`` by ``h``.

    Returns the result together with the maps sending nodes and edges of
    ``h`` to their identifiers in the result.
    """
    target = g.edge(e0)
    if len(target.att) != len(h.ext):
        raise GraphError(
            f"type mismatch: edge {e0!r} has {len(target.att)} attachment nodes, "
            f"replacement graph has type {len(h.ext)}"
        )
    node_map = dict(zip(h.ext, target.att))
    inner = [v for v in h.nodes if v not in node_map]
    for v, fresh in zip(inner, fresh_ids("v", g.nodes, len(inner))):
        node_map[v] = fresh
    kept = [e for e in g.edges if e.id != e0]
    fresh_edges = fresh_ids("e", (e.id for e in kept), len(h.edges))
    edge_map = {}
    new_edges = list(kept)
    for e, eid in zip(h.edges, fresh_edges):
        edge_map[e.id] = eid
        new_edges.append(Edge(eid, e.label, tuple(node_map[v] for v in e.att)))
    nodes = g.nodes + tuple(node_map[v] for v in inner)
    return Hypergraph(nodes, tuple(new_edges), g.ext), node_map, edge_map


def replace(g: Hypergraph, e0: str, h: Hypergraph) -> Hypergraph:
    return replace_with_maps(g, e0, h)[0]


def remove_edge(g: Hypergraph, eid: str) -> Hypergraph:
    g.edge(eid)
    return Hypergraph(g.nodes, tuple(e for e in g.edges if e.id != eid), g.ext)


# --- canonical codes -------------------------------------------------------

# Compact form: (node_count, ext_len, edges) with nodes numbered 0..n-1,
# the external nodes being 0..t-1 in ext order, and edges (label, att) sorted.
CompactGraph = tuple


def compact(g: Hypergraph) -> CompactGraph:
    index = {v: i for i, v in enumerate(g.ext)}
    for v in g.nodes:
        if v not in index:
            index[v] = len(index)
    edges = tuple(sorted((e.label, tuple(index[v] for v in e.att)) for e in g.edges))
    return (len(index), len(g.ext), edges)


def from_compact(cg: CompactGraph) -> Hypergraph:
    n, t, edges = cg
    nodes = tuple(f"v{i}" for i in range(n))
    return Hypergraph(
        nodes,
        tuple(Edge(f"e{i}", lab, tuple(nodes[v] for v in att)) for i, (lab, att) in enumerate(edges)),
        nodes[:t],
    )


def _rank(keys: dict[int, object], offset: int) -> dict[int, int]:
    order = {k: i for i, k in enumerate(sorted(set(keys.values())))}
    return {v: offset + order[k] for v, k in keys.items()}


def _refine(color: dict[int, int], t: int, incident: dict[int, list], edges) -> dict[int, int]:
    # ``color`` covers attached internal nodes; external node i keeps colour i.
    def col(u):
        return u if u < t else color[u]

    while True:
        sigs = {
            v: (color[v], tuple(sorted((edges[i][0], p, tuple(col(u) for u in edges[i][1])) for i, p in incident[v])))
            for v in color
        }
        new = _rank(sigs, t)
        if len(set(new.values())) == len(set(color.values())):
            return new
        color = new


def _components(t: int, edges) -> list[list[int]]:
    """Edge indices grouped by connectivity through internal nodes.

    External nodes have fixed positions, so they do not join components;
    edges attached only to external nodes are left out.
    """
    parent: dict[int, int] = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for _, att in edges:
        inner = [v for v in att if v >= t]
        for v in inner:
            parent.setdefault(v, v)
        for v in inner[1:]:
            parent[find(v)] = find(inner[0])
    groups: dict[int, list[int]] = {}
    for i, (_, att) in enumerate(edges):
        inner = [v for v in att if v >= t]
        if inner:
            groups.setdefault(find(inner[0]), []).append(i)
    return list(groups.values())


def _search_form(t: int, edges, cap: int) -> tuple:
    """Least relabelled edge list of one internally connected piece; its
    internal nodes are numbered from ``t`` in the result."""
    incident: dict[int, list] = {}
    for i, (_, att) in enumerate(edges):
        for p, v in enumerate(att):
            if v >= t:
                incident.setdefault(v, []).append((i, p))
    if len(incident) > cap:
        raise CapExceeded(f"canonical code search over {len(incident)} internal nodes exceeds cap {cap}")
    color = _refine({v: t for v in incident}, t, incident, edges)
    best = None

    def search(color):
        nonlocal best
        cells: dict[int, list[int]] = {}
        for v, c in color.items():
            cells.setdefault(c, []).append(v)
        split = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
        if split is None:
            relabel = lambda u: u if u < t else color[u]  # noqa: E731
            leaf = tuple(sorted((lab, tuple(relabel(u) for u in att)) for lab, att in edges))
            if best is None or leaf < best:
                best = leaf
            return
        for v in cells[split]:
            keys = {u: (c, u != v) for u, c in color.items()}
            search(_refine(_rank(keys, t), t, incident, edges))

    search(color)
    return (len(incident), best)


def canonical_form(cg: CompactGraph, cap: int = DEFAULT_CANON_CAP) -> CompactGraph:
    """Canonical representative of the isomorphism class of a compact graph.

    External nodes keep their positions. Internal nodes are split into pieces
    connected through internal nodes; each piece is ordered by colour
    refinement and an individualisation search (least edge serialisation over
    all leaves), and the pieces are then laid out in sorted order. ``cap``
    bounds the internal nodes of any single piece.
    """
    n, t, edges = cg
    fixed = [e for e in edges if all(v < t for v in e[1])]
    pieces = sorted(_search_form(t, [edges[i] for i in group], cap) for group in _components(t, edges))
    out = list(fixed)
    offset = t
    for size, piece in pieces:
        for lab, att in piece:
            out.append((lab, tuple(v if v < t else v - t + offset for v in att)))
        offset += size
    return (n, t, tuple(sorted(out)))


@dataclass(frozen=True, order=True)
class CanonicalCode:
    code: bytes = field()

    def __str__(self) -> str:
        return self.code.decode()


def encode_form(form: CompactGraph) -> CanonicalCode:
    n, t, edges = form
    body = ";".join(f"{lab}({','.join(map(str, att))})" for lab, att in edges)
    return CanonicalCode(f"{n}/{t}|{body}".encode())


def canonical_code(g: Hypergraph, cap: int = DEFAULT_CANON_CAP) -> CanonicalCode:
    return encode_form(canonical_form(compact(g), cap))


def isomorphic(g: Hypergraph, h: Hypergraph, cap: int = DEFAULT_CANON_CAP) -> bool:
    return canonical_form(compact(g), cap) == canonical_form(compact(h), cap)


def graph(nodes: Sequence[str], edges: Sequence[tuple[str, str, Sequence[str]]], ext: Sequence[str]) -> Hypergraph:
    """Shorthand constructor: ``graph(["v0"], [("e1", "a", ["v0"])], ["v0"])``."""
    return Hypergraph(tuple(nodes), tuple(Edge(i, lab, tuple(att)) for i, lab, att in edges), tuple(ext))
