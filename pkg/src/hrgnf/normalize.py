"""Grammar-to-grammar transformations ending in the weak Greibach normal form.

Pipeline: useless -> edgeless -> chain -> useless -> norec -> compose -> wgnf.
Every stage preserves the generated language; ``normalize`` runs them in
order with duplicate and useless-symbol pruning after each one.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Callable, Iterable

from .errors import CapExceeded, EmptyLanguage, GrammarError, GraphError, HRGError, NotIsolatedNodeBounded
from .grammar import Grammar, Production, default_delta, mu, natural_key
from .hypergraph import (
    DEFAULT_CANON_CAP,
    Edge,
    Hypergraph,
    Kind,
    LabelTable,
    canonical_form,
    fresh_ids,
    handle,
    remove_edge,
    replace_with_maps,
)
from .mapping import PartialBijection, compose, enumerate_partial_bijections, identity

STAGES = ("useless", "edgeless", "chain", "norec", "compose", "wgnf")


@dataclass(frozen=True)
class Config:
    max_arity: int = 4
    max_productions: int = 100_000
    isolated_cap: int = 64
    canon_cap: int = DEFAULT_CANON_CAP


@dataclass
class StageReport:
    stage: str
    before: int
    after: int
    newNonterminals: int
    warnings: list[str] = field(default_factory=list)
    millis: float = 0.0


@dataclass
class PipelineReport:
    stages: list[StageReport] = field(default_factory=list)

    def to_json(self, timestamp: bool = True) -> str:
        stages = []
        for s in self.stages:
            d = asdict(s)
            if timestamp:
                d["millis"] = round(d["millis"], 3)
            else:
                del d["millis"]
            stages.append(d)
        return json.dumps({"stages": stages}, indent=2)


# --- complex nonterminals -------------------------------------------------


@dataclass(frozen=True)
class ComplexNonterminal:
    base: str
    f: PartialBijection
    g: PartialBijection

    def __post_init__(self):
        if self.f.t != self.g.t:
            raise ValueError("f and g must share the ambient size")

    @property
    def t(self) -> int:
        return self.f.t

    @property
    def arity(self) -> int:
        return 2 * self.t - len(compose(self.g, self.f))

    @property
    def name(self) -> str:
        return f"{self.base}__f{self.f.fragment()}__g{self.g.fragment()}"


def _check(cond: bool, what: str):
    # Construction-time arity identities; a failure is a bug, not bad input.
    if not cond:
        raise AssertionError(what)


# --- helpers ----------------------------------------------------------------


def _renumber(prods: Iterable[Production], prefix: str = "p") -> list[Production]:
    return [Production(f"{prefix}{i}", p.lhs, p.rhs, p.delta) for i, p in enumerate(prods, 1)]


def _guard(count: int, config: Config, stage: str):
    if count > config.max_productions:
        raise CapExceeded(f"{stage}: production count {count} exceeds cap {config.max_productions}")


def _nt_labels(g: Grammar, rhs: Hypergraph) -> list[str]:
    return [e.label for e in rhs.edges if g.labels.is_nonterminal(e.label)]


def _internal_count(rhs: Hypergraph) -> int:
    return len(rhs.nodes) - len(rhs.ext)


def _reaches(arcs: dict[str, set[str]], src: str, dst: str) -> bool:
    stack, seen = [src], {src}
    while stack:
        x = stack.pop()
        if x == dst:
            return True
        for y in arcs.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


# --- stage 1: useless symbols -------------------------------------------------


def eliminate_useless(g: Grammar) -> Grammar:
    """Drop nonterminals that are unproductive or unreachable, and every
    production mentioning them."""
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in productive and all(x in productive for x in _nt_labels(g, p.rhs)):
                productive.add(p.lhs)
                changed = True
    if g.start not in productive:
        raise EmptyLanguage(f"start symbol {g.start!r} derives no terminal graph")
    alive = [p for p in g.productions if p.lhs in productive and all(x in productive for x in _nt_labels(g, p.rhs))]
    by_lhs: dict[str, list[Production]] = {}
    for p in alive:
        by_lhs.setdefault(p.lhs, []).append(p)
    reachable = {g.start}
    stack = [g.start]
    while stack:
        x = stack.pop()
        for p in by_lhs.get(x, ()):
            for y in _nt_labels(g, p.rhs):
                if y not in reachable:
                    reachable.add(y)
                    stack.append(y)
    kept = [p for p in alive if p.lhs in reachable]
    dead = [n for n in g.labels.nonterminals() if n not in reachable]
    return g.with_productions(kept, g.labels.without(dead))


# --- stage 2: edgeless productions ---------------------------------------------


def _sumset(a: set[int], b: set[int], cap: int) -> set[int]:
    return {x + y for x in a for y in b if x + y <= cap + 1}


def null_descriptors(g: Grammar, config: Config = Config()) -> dict[str, set[int]]:
    """For each nonterminal, the isolated internal node counts of the edgeless
    graphs it derives.

    Raises :class:`NotIsolatedNodeBounded` when some set is infinite: either a
    nullable cycle that gains nodes exists, or the cap is reached.
    """
    nullish = [p for p in g.productions if all(g.labels.is_nonterminal(e.label) for e in p.rhs.edges)]
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in nullish:
            if p.lhs not in nullable and all(e.label in nullable for e in p.rhs.edges):
                nullable.add(p.lhs)
                changed = True
    nullprods = [p for p in nullish if all(e.label in nullable for e in p.rhs.edges)]
    positive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in nullprods:
            if p.lhs not in positive and (
                _internal_count(p.rhs) > 0 or any(e.label in positive for e in p.rhs.edges)
            ):
                positive.add(p.lhs)
                changed = True
    arcs: dict[str, set[str]] = {}
    gaining: list[tuple[str, str]] = []
    for p in nullprods:
        for e in p.rhs.edges:
            arcs.setdefault(p.lhs, set()).add(e.label)
            others = any(o.label in positive for o in p.rhs.edges if o.id != e.id)
            if _internal_count(p.rhs) > 0 or others:
                gaining.append((p.lhs, e.label))
    for x, y in gaining:
        if _reaches(arcs, y, x):
            raise NotIsolatedNodeBounded(
                f"{x!r} derives edgeless graphs with unboundedly many isolated nodes", "edgeless"
            )
    null: dict[str, set[int]] = {}
    changed = True
    while changed:
        changed = False
        for p in nullprods:
            acc = {_internal_count(p.rhs)}
            for e in p.rhs.edges:
                acc = _sumset(acc, null.get(e.label, set()), config.isolated_cap)
            cur = null.setdefault(p.lhs, set())
            if not acc <= cur:
                cur |= acc
                changed = True
                if max(cur) > config.isolated_cap:
                    raise NotIsolatedNodeBounded(
                        f"{p.lhs!r} derives edgeless graphs with more than {config.isolated_cap} isolated nodes",
                        "edgeless",
                        "cap",
                    )
    return {k: v for k, v in null.items() if v}


def eliminate_edgeless(g: Grammar, config: Config = Config()) -> Grammar:
    """Remove edgeless productions by inlining every edgeless derivation of
    each nonterminal edge, keeping at least one edge of every right-hand side."""
    null = null_descriptors(g, config)
    out: list[Production] = []
    for p in g.productions:
        options = []
        for e in p.rhs.edges:
            opts: list[int | None] = [None]
            if g.labels.is_nonterminal(e.label):
                opts += sorted(null.get(e.label, ()))
            options.append(opts)
        for choice in product(*options):
            if all(c is not None for c in choice):
                continue
            rhs = p.rhs
            extra = 0
            for e, c in zip(p.rhs.edges, choice):
                if c is not None:
                    rhs = remove_edge(rhs, e.id)
                    extra += c
            if extra:
                rhs = Hypergraph(rhs.nodes + tuple(fresh_ids("v", rhs.nodes, extra)), rhs.edges, rhs.ext)
            delta = p.delta if rhs.has_edge(p.delta) else default_delta(rhs, g.labels)
            out.append(Production(p.id, p.lhs, rhs, delta))
            _guard(len(out), config, "edgeless")
    return g.with_productions(_renumber(out))


# --- stage 3: chain productions -------------------------------------------------


def is_chain(g: Grammar, p: Production) -> bool:
    return len(p.rhs.edges) == 1 and g.labels.is_nonterminal(p.rhs.edges[0].label)


def _chain_step(state: tuple[str, tuple[int, ...]], p: Production) -> tuple[tuple[str, tuple[int, ...]], int]:
    # state (B, pos): pos[i] is the ext index (1-based) of attachment i, 0 if internal.
    _, pos = state
    k = p.rhs
    e = k.edges[0]
    ext_index = {v: i for i, v in enumerate(k.ext)}
    new_pos = tuple(pos[ext_index[v]] if v in ext_index else 0 for v in e.att)
    attached = set(e.att)
    gain = sum(1 for i, v in enumerate(k.ext) if pos[i] == 0 and v not in attached)
    gain += sum(1 for v in k.nodes if v not in ext_index and v not in attached)
    return (e.label, new_pos), gain


def chain_descriptors(g: Grammar, config: Config = Config()) -> dict[str, set[tuple[str, tuple[int, ...], int]]]:
    """For each nonterminal A, the single-edge graphs A derives, as triples
    ``(B, pos, m)``: the edge label, the ext position (or 0) of every
    attachment node, and the number of isolated internal nodes."""
    chains = [p for p in g.productions if is_chain(g, p)]
    by_lhs: dict[str, list[Production]] = {}
    for p in chains:
        by_lhs.setdefault(p.lhs, []).append(p)
    out = {}
    for a in g.labels.nonterminals():
        t = g.labels.arity(a)
        start = (a, tuple(range(1, t + 1)))
        arcs: dict[tuple, set[tuple]] = {}
        gaining = []
        seen = {start}
        stack = [start]
        while stack:
            s = stack.pop()
            for p in by_lhs.get(s[0], ()):
                nxt, gain = _chain_step(s, p)
                arcs.setdefault(s, set()).add(nxt)
                if gain:
                    gaining.append((s, nxt))
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        for s, nxt in gaining:
            if _reaches(arcs, nxt, s):
                raise NotIsolatedNodeBounded(
                    f"{a!r} derives single-edge graphs with unboundedly many isolated nodes", "chain"
                )
        found = {(start, 0)}
        stack = [(start, 0)]
        while stack:
            s, m = stack.pop()
            for p in by_lhs.get(s[0], ()):
                nxt, gain = _chain_step(s, p)
                item = (nxt, m + gain)
                if item[1] > config.isolated_cap:
                    raise NotIsolatedNodeBounded(
                        f"{a!r} derives single-edge graphs with more than {config.isolated_cap} isolated nodes",
                        "chain",
                        "cap",
                    )
                if item not in found:
                    found.add(item)
                    stack.append(item)
        out[a] = {(s[0], s[1], m) for s, m in found}
    return out


def _chain_graph(t: int, label: str, pos: tuple[int, ...], m: int) -> Hypergraph:
    ext = [f"x{i}" for i in range(1, t + 1)]
    internal = [f"y{i}" for i in range(sum(1 for q in pos if q == 0) + m)]
    it = iter(internal)
    att = tuple(ext[q - 1] if q else next(it) for q in pos)
    return Hypergraph(tuple(ext) + tuple(internal), (Edge("c0", label, att),), tuple(ext))


def eliminate_chain(g: Grammar, config: Config = Config()) -> Grammar:
    """Replace chain productions by composing every chain derivation with the
    non-chain productions of its final label."""
    descriptors = chain_descriptors(g, config)
    kept = [p for p in g.productions if not is_chain(g, p)]
    by_lhs: dict[str, list[Production]] = {}
    for p in kept:
        by_lhs.setdefault(p.lhs, []).append(p)
    out: list[Production] = []
    for a in g.labels.nonterminals():
        t = g.labels.arity(a)
        reflexive = (a, tuple(range(1, t + 1)), 0)
        out.extend(by_lhs.get(a, ()))
        for desc in sorted(descriptors.get(a, ()), key=lambda d: (natural_key(d[0]), d[1], d[2])):
            if desc == reflexive:
                continue
            b, pos, m = desc
            h = _chain_graph(t, b, pos, m)
            for q in by_lhs.get(b, ()):
                rhs, _, emap = replace_with_maps(h, "c0", q.rhs)
                out.append(Production(q.id, a, rhs, emap[q.delta] if q.delta else None))
                _guard(len(out), config, "chain")
    return g.with_productions(_renumber(out))


# --- stage 4: recursion -------------------------------------------------------------


def f_zero(rho: Production) -> PartialBijection:
    """``f0(i) = j`` iff the i-th attachment node of the delta edge is the j-th external node."""
    r = rho.rhs
    att0 = r.edge(rho.delta).att
    ext_index = {v: j for j, v in enumerate(r.ext, 1)}
    return PartialBijection(len(r.ext), tuple((i, ext_index[v]) for i, v in enumerate(att0, 1) if v in ext_index))


def _delta_preferring_terminal(rhs: Hypergraph, labels: LabelTable | None) -> str:
    if labels is None:
        return min((e.id for e in rhs.edges), key=natural_key)
    return default_delta(rhs, labels)


def build_type1(
    gamma: Production, f: PartialBijection, g: PartialBijection, labels: LabelTable | None = None
) -> Production:
    """Start an inverted derivation: the nonrecursive rhs plus one new edge
    labeled ``(A, f, g)``."""
    if gamma.delta is not None and mu(gamma) == gamma.lhs:
        raise GrammarError(f"production {gamma.id!r} is recursive")
    G = gamma.rhs
    t = len(G.ext)
    if f.t != t or g.t != t:
        raise ValueError(f"partial bijections must act on [1,{t}]")
    gf = compose(g, f)
    k = len(gf)
    us = fresh_ids("u", G.nodes, t - k)
    label = ComplexNonterminal(gamma.lhs, f, g)
    ext: list[str | None] = [None] * t
    gfd = gf.as_dict()
    for p in sorted(gf.dom):
        ext[gfd[p] - 1] = G.ext[p - 1]
    free = [j for j in range(1, t + 1) if j not in gf.ran]
    for r, j in enumerate(free):
        ext[j - 1] = us[r]
    new_edge = Edge(fresh_ids("e", (e.id for e in G.edges), 1)[0], label.name, G.ext + tuple(us))
    _check(len(new_edge.att) == label.arity == 2 * t - k, "type I edge arity")
    rhs = Hypergraph(G.nodes + tuple(us), G.edges + (new_edge,), tuple(ext))
    return Production(f"{gamma.id}", gamma.lhs, rhs, gamma.delta)


def build_type2(rho: Production, labels: LabelTable | None = None) -> Production:
    """Close an inverted derivation: the recursive rhs without its delta edge,
    rewriting ``(A, f0, id)``."""
    if rho.delta is None or mu(rho) != rho.lhs:
        raise GrammarError(f"production {rho.id!r} is not recursive")
    R = rho.rhs
    if len(R.edges) < 2:
        raise GrammarError(f"recursive production {rho.id!r} has a single edge")
    t = len(R.ext)
    att0 = R.edge(rho.delta).att
    f0 = f_zero(rho)
    free = [j for j in range(1, t + 1) if j not in f0.ran]
    ext = att0 + tuple(R.ext[j - 1] for j in free)
    lhs = ComplexNonterminal(rho.lhs, f0, identity(t))
    _check(len(ext) == lhs.arity == 2 * t - len(f0), "type II rhs type")
    rhs = remove_edge(R, rho.delta)
    rhs = Hypergraph(rhs.nodes, rhs.edges, ext)
    return Production(rho.id, lhs.name, rhs, _delta_preferring_terminal(rhs, labels))


def type3_well_formed(rho: Production, f: PartialBijection, g: PartialBijection) -> bool:
    """Whether the type III construction yields distinct external nodes.

    It does not when an external node of the recursive rhs that the delta
    edge attaches is also placed among the new external positions."""
    return not ((g.dom - f.ran) & f_zero(rho).ran)


def build_type3(
    rho: Production,
    f: PartialBijection,
    g: PartialBijection,
    f2: PartialBijection,
    g2: PartialBijection,
    labels: LabelTable | None = None,
) -> Production:
    """One inverted sewing step: ``(A, f, g)`` rewrites to the recursive rhs
    minus its delta edge plus a new edge labeled ``(A, f2, g2)``."""
    if rho.delta is None or mu(rho) != rho.lhs:
        raise GrammarError(f"production {rho.id!r} is not recursive")
    if compose(g2, f2) != g:
        raise GrammarError(f"side condition violated: {g2} . {f2} != {g}")
    R = rho.rhs
    t = len(R.ext)
    if not all(x.t == t for x in (f, g, f2, g2)):
        raise ValueError(f"partial bijections must act on [1,{t}]")
    if not type3_well_formed(rho, f, g):
        raise GraphError("type III construction would repeat an external node")
    att0 = R.edge(rho.delta).att
    gf = compose(g, f)
    k = len(gf)
    gd = g.as_dict()
    m1 = sorted(g.dom - f.ran)
    m2 = [j for j in range(1, t + 1) if j not in gf.ran]
    p = len(m1)
    g_m1 = {gd[s] for s in m1}
    xs = [x for x, j in enumerate(m2, 1) if j not in g_m1]
    k2 = k + p
    us = fresh_ids("u", R.nodes, t - k2)
    _check(len(xs) == t - k2, "type III fresh node count")
    ext: list[str | None] = [None] * (2 * t - k)
    ext[:t] = att0
    for s in m1:
        ext[t + m2.index(gd[s])] = R.ext[s - 1]
    for i, x in enumerate(xs):
        ext[t + x - 1] = us[i]
    lhs = ComplexNonterminal(rho.lhs, f, g)
    label = ComplexNonterminal(rho.lhs, f2, g2)
    _check(len(ext) == lhs.arity, "type III rhs type")
    base = remove_edge(R, rho.delta)
    new_edge = Edge(fresh_ids("e", (e.id for e in R.edges), 1)[0], label.name, R.ext + tuple(us))
    _check(len(new_edge.att) == label.arity == 2 * t - len(g), "type III edge arity")
    rhs = Hypergraph(R.nodes + tuple(us), base.edges + (new_edge,), tuple(ext))
    return Production(rho.id, lhs.name, rhs, _delta_preferring_terminal(base, labels))


@dataclass
class RecursionStats:
    type1: int = 0
    type2: int = 0
    type3: int = 0
    skipped: int = 0


def eliminate_recursive(
    g: Grammar, a: str, config: Config = Config(), stats: RecursionStats | None = None, strict: bool = True
) -> Grammar:
    """Remove the recursive ``a``-productions by inverting delta-derivations
    through complex nonterminals ``(a, f, g)``.

    With ``strict`` the type III rules for a recursive production are only
    built for ``f`` equal to that production's own ``f0``; see
    :func:`type3_well_formed` and the README for why.
    """
    stats = stats if stats is not None else RecursionStats()
    rhos = [p for p in g.productions_of(a) if p.delta is not None and mu(p) == a]
    if not rhos:
        return g
    gammas = [p for p in g.productions_of(a) if p not in rhos]
    t = g.labels.arity(a)
    if t > config.max_arity:
        raise CapExceeded(f"arity of {a!r} is {t}, above the cap {config.max_arity}")
    maps = enumerate_partial_bijections(t, config.max_arity)
    labels = g.labels
    registered: set[str] = set()

    def register(c: ComplexNonterminal):
        nonlocal labels
        if c.name in registered:
            return
        if c.name in labels:
            raise GrammarError(f"generated nonterminal {c.name!r} collides with an existing label")
        labels = labels.with_symbol(c.name, Kind.NONTERMINAL, c.arity)
        registered.add(c.name)

    for f in maps:
        for gg in maps:
            register(ComplexNonterminal(a, f, gg))
    out = [p for p in g.productions if p not in rhos]
    for gamma in gammas:
        for f in maps:
            for gg in maps:
                out.append(build_type1(gamma, f, gg, labels))
                stats.type1 += 1
        _guard(len(out), config, "norec")
    for rho in rhos:
        out.append(build_type2(rho, labels))
        stats.type2 += 1
    by_g: dict[PartialBijection, list[tuple[PartialBijection, PartialBijection]]] = {}
    for f2 in maps:
        for g2 in maps:
            by_g.setdefault(compose(g2, f2), []).append((f2, g2))
    for rho in rhos:
        fs = [f_zero(rho)] if strict else maps
        for f in fs:
            for gg in maps:
                if not type3_well_formed(rho, f, gg):
                    stats.skipped += len(by_g.get(gg, ()))
                    continue
                for f2, g2 in by_g.get(gg, ()):
                    out.append(build_type3(rho, f, gg, f2, g2, labels))
                    stats.type3 += 1
            _guard(len(out), config, "norec")
    return g.with_productions(_renumber(out), labels)


def _substitute(pi: Production, sigma: Production) -> Production:
    rhs, _, emap = replace_with_maps(pi.rhs, pi.delta, sigma.rhs)
    return Production(pi.id, pi.lhs, rhs, emap[sigma.delta] if sigma.delta else None)


def mu_order(g: Grammar) -> list[str]:
    """A total order of the nonterminals in which every production's lhs
    precedes its nonterminal ``mu``. Raises :class:`HRGError` on a cycle."""
    arcs: dict[str, set[str]] = {n: set() for n in g.labels.nonterminals()}
    for p in g.productions:
        if p.delta is not None and g.labels.is_nonterminal(mu(p)):
            arcs[p.lhs].add(mu(p))
    indeg = {n: 0 for n in arcs}
    for n, succ in arcs.items():
        for m in succ:
            indeg[m] += 1
    rank = {n: i for i, n in enumerate(arcs)}
    # Nonterminals that never occur as mu go first, then table order.
    ready = sorted((n for n, d in indeg.items() if d == 0), key=rank.get)
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for m in sorted(arcs[n], key=rank.get):
            indeg[m] -= 1
            if indeg[m] == 0:
                ready.append(m)
        ready.sort(key=rank.get)
    if len(order) != len(arcs):
        cyclic = sorted(n for n in arcs if n not in order)
        raise HRGError(f"mu relation is cyclic among {cyclic}")
    return order


def eliminate_recursion(
    g: Grammar, config: Config = Config(), stats: RecursionStats | None = None, strict: bool = True
) -> Grammar:
    """Reorder so that every production's ``mu`` is terminal or a later
    nonterminal: substitute earlier nonterminals' productions at the delta
    edge, then remove the remaining recursive productions."""
    order = g.labels.nonterminals()
    cur = g
    for i, ai in enumerate(order):
        if ai not in cur.labels:
            continue
        for aj in order[:i]:
            if aj not in cur.labels:
                continue
            targets = cur.productions_of(aj)
            out = []
            for pi in cur.productions:
                if pi.lhs == ai and pi.delta is not None and mu(pi) == aj:
                    out.extend(_substitute(pi, s) for s in targets)
                else:
                    out.append(pi)
            _guard(len(out), config, "norec")
            cur = cur.with_productions(_renumber(out))
        cur = eliminate_recursive(cur, ai, config, stats, strict)
        cur = _prune(cur)
    mu_order(cur)
    return cur


# --- stage 5: composition along delta-derivations -------------------------------


def compose_final(g: Grammar, config: Config = Config()) -> Grammar:
    """Every production becomes the composition of a delta-derivation that
    ends in a production with terminal ``mu``."""
    memo: dict[str, list[tuple[Hypergraph, str]]] = {}
    active: set[str] = set()
    total = 0

    def expand(x: str) -> list[tuple[Hypergraph, str]]:
        nonlocal total
        if x in memo:
            return memo[x]
        if x in active:
            raise HRGError(f"mu relation is cyclic through {x!r}")
        active.add(x)
        results: list[tuple[Hypergraph, str]] = []
        seen: set = set()
        for p in g.productions_of(x):
            if p.delta is None:
                raise GrammarError(f"production {p.id!r} has an edgeless rhs")
            y = mu(p)
            if g.labels.is_terminal(y):
                candidates = [(p.rhs, p.delta)]
            else:
                candidates = []
                for k, dk in expand(y):
                    rhs, _, emap = replace_with_maps(p.rhs, p.delta, k)
                    candidates.append((rhs, emap[dk]))
            for rhs, d in candidates:
                key = _dedup_key(rhs, d, config)
                if key is not None and key in seen:
                    continue
                if key is not None:
                    seen.add(key)
                results.append((rhs, d))
                total += 1
                _guard(total, config, "compose")
        active.discard(x)
        memo[x] = results
        return results

    out = []
    for x in g.labels.nonterminals():
        for rhs, d in expand(x):
            out.append(Production("p", x, rhs, d))
    return g.with_productions(_renumber(out))


# --- stage 6: terminal splitting ---------------------------------------------------


def split_terminals(g: Grammar) -> Grammar:
    """Keep one terminal edge per rhs; relabel the others ``T_a`` with ``T_a -> handle(a)``."""
    labels = g.labels
    names: dict[str, str] = {}

    def t_name(a: str) -> str:
        nonlocal labels
        if a not in names:
            name = f"T_{a}"
            while name in labels:
                name += "'"
            labels = labels.with_symbol(name, Kind.NONTERMINAL, labels.arity(a))
            names[a] = name
        return names[a]

    out = []
    for p in g.productions:
        terms = [e for e in p.rhs.edges if g.labels.is_terminal(e.label)]
        if len(terms) <= 1:
            out.append(p)
            continue
        keep = p.delta if g.labels.is_terminal(p.rhs.edge(p.delta).label) else terms[0].id
        edges = tuple(
            Edge(e.id, t_name(e.label), e.att) if e.id != keep and g.labels.is_terminal(e.label) else e
            for e in p.rhs.edges
        )
        out.append(Production(p.id, p.lhs, Hypergraph(p.rhs.nodes, edges, p.rhs.ext), keep))
    for a, name in names.items():
        h = handle(a, g.labels)
        out.append(Production(f"T_{a}", name, h, h.edges[0].id))
    return g.with_productions(_renumber(out), labels)


# --- housekeeping and the full pipeline ------------------------------------------


def _dedup_key(rhs: Hypergraph, delta: str | None, config: Config):
    from .hypergraph import compact

    marked = Hypergraph(
        rhs.nodes,
        tuple(Edge(e.id, e.label + ("*" if e.id == delta else ""), e.att) for e in rhs.edges),
        rhs.ext,
    )
    try:
        return canonical_form(compact(marked), config.canon_cap)
    except CapExceeded:
        return None


def dedup(g: Grammar, config: Config = Config()) -> tuple[Grammar, int]:
    """Drop productions isomorphic (same lhs, rhs and delta position) to an earlier one."""
    seen = set()
    out = []
    unkeyed = 0
    for p in g.productions:
        key = _dedup_key(p.rhs, p.delta, config)
        if key is None:
            unkeyed += 1
            out.append(p)
            continue
        key = (p.lhs, key)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return g.with_productions(out), unkeyed


def _prune(g: Grammar) -> Grammar:
    return eliminate_useless(g)


def _tidy(g: Grammar, config: Config, report: StageReport | None = None) -> Grammar:
    g, unkeyed = dedup(eliminate_useless(g), config)
    if unkeyed and report is not None:
        report.warnings.append(f"{unkeyed} productions exceeded the canonical-code cap and were not deduplicated")
    return g.with_productions(_renumber(g.productions))


def pipeline(config: Config = Config(), strict: bool = True) -> list[tuple[str, Callable[[Grammar], Grammar]]]:
    return [
        ("useless", eliminate_useless),
        ("edgeless", lambda g: eliminate_edgeless(g, config)),
        ("chain", lambda g: eliminate_chain(g, config)),
        ("useless", eliminate_useless),
        ("norec", lambda g: eliminate_recursion(g, config, strict=strict)),
        ("compose", lambda g: compose_final(g, config)),
        ("wgnf", split_terminals),
    ]


def normalize(
    g: Grammar, config: Config = Config(), stop_after: str | None = None, strict: bool = True
) -> tuple[Grammar, PipelineReport]:
    """Run the pipeline (or its prefix ending at ``stop_after``) and report per stage."""
    if stop_after is not None and stop_after not in STAGES:
        raise ValueError(f"unknown stage {stop_after!r}; expected one of {STAGES}")
    report = PipelineReport()
    cur = g
    for name, stage in pipeline(config, strict):
        before_nts = set(cur.labels.nonterminals())
        before = len(cur.productions)
        t0 = time.perf_counter()
        sr = StageReport(name, before, 0, 0)
        cur = _tidy(stage(cur), config, sr)
        sr.millis = (time.perf_counter() - t0) * 1000
        sr.after = len(cur.productions)
        sr.newNonterminals = len(set(cur.labels.nonterminals()) - before_nts)
        report.stages.append(sr)
        if name == stop_after:
            break
    return cur, report


def history(g: Grammar, config: Config = Config(), strict: bool = True) -> list[tuple[str, Grammar]]:
    """The grammar after each pipeline stage, for pass-wise checks."""
    out = []
    cur = g
    for name, stage in pipeline(config, strict):
        cur = _tidy(stage(cur), config)
        out.append((name, cur))
    return out
