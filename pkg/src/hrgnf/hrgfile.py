"""Reading and writing the ``.hrg`` grammar file format.

Example::

    # star graphs
    grammar hgr1
    labels { S: nonterminal/1; a: terminal/1; }
    start S;
    prod p1: S -> { nodes v0; ext v0; edge e1: S(v0); edge e2: a(v0); } delta e2;
    prod p2: S -> { nodes v0; ext v0; edge e1: a(v0); }

A missing ``delta`` clause selects the default delta edge.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import GrammarError, GraphError, ParseError
from .grammar import Grammar, Production, default_delta
from .hypergraph import Edge, Hypergraph, Kind, LabelTable, Symbol, validate

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<arrow>->)
  | (?P<name>[A-Za-z_](?:[A-Za-z0-9_']|-(?!>))*)
  | (?P<int>[0-9]+)
  | (?P<punct>[{}();:/])
    """,
    re.VERBOSE,
)

NODE_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class GrammarFile:
    path: Path | None
    grammar: Grammar
    spans: dict[str, tuple[int, int]]


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.spans: dict[str, tuple[int, int]] = {}

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text or 'end of file'!r}", tok)
        return tok

    def name(self, what: str = "identifier") -> Token:
        tok = self.next()
        if tok.kind != "name":
            self.fail(f"expected {what}, found {tok.text or 'end of file'!r}", tok)
        return tok

    def ident(self, what: str) -> str:
        tok = self.name(what)
        if not NODE_ID.match(tok.text):
            self.fail(f"invalid {what} {tok.text!r}", tok)
        return tok.text

    def accept(self, text: str) -> bool:
        if self.peek().text == text:
            self.i += 1
            return True
        return False

    def graph(self) -> Hypergraph:
        self.expect("{")
        nodes: list[str] = []
        ext: list[str] = []
        edges: list[Edge] = []
        while not self.accept("}"):
            kw = self.name("'nodes', 'ext' or 'edge'")
            if kw.text == "nodes":
                while self.peek().text != ";":
                    nodes.append(self.ident("node id"))
                self.expect(";")
            elif kw.text == "ext":
                while self.peek().text != ";":
                    ext.append(self.ident("node id"))
                self.expect(";")
            elif kw.text == "edge":
                eid = self.ident("edge id")
                self.expect(":")
                label = self.name("label").text
                self.expect("(")
                att = []
                while self.peek().text != ")":
                    att.append(self.ident("node id"))
                self.expect(")")
                self.expect(";")
                edges.append(Edge(eid, label, tuple(att)))
            else:
                self.fail(f"unexpected {kw.text!r} in graph literal", kw)
        return Hypergraph(tuple(nodes), tuple(edges), tuple(ext))

    def grammar(self) -> Grammar:
        name = "g"
        labels: list[tuple[str, Symbol]] = []
        start: str | None = None
        raw: list[tuple[Token, str, Hypergraph, str | None]] = []
        while self.peek().kind != "eof":
            kw = self.name("'grammar', 'labels', 'start' or 'prod'")
            if kw.text == "grammar":
                name = self.name("grammar name").text
                self.accept(";")
            elif kw.text == "labels":
                self.expect("{")
                while not self.accept("}"):
                    lt = self.name("label")
                    self.expect(":")
                    kind = self.name("'terminal' or 'nonterminal'")
                    if kind.text not in ("terminal", "nonterminal"):
                        self.fail(f"unknown label kind {kind.text!r}", kind)
                    self.expect("/")
                    ar = self.next()
                    if ar.kind != "int":
                        self.fail("expected arity", ar)
                    self.expect(";")
                    if any(n == lt.text for n, _ in labels):
                        raise GrammarError(f"{lt.line}:{lt.col}: duplicate label {lt.text!r}")
                    labels.append((lt.text, Symbol(Kind(kind.text), int(ar.text))))
            elif kw.text == "start":
                start = self.name("start symbol").text
                self.expect(";")
            elif kw.text == "prod":
                pid = self.name("production id")
                self.expect(":")
                lhs = self.name("nonterminal").text
                self.expect("->")
                rhs = self.graph()
                delta = None
                if self.accept("delta"):
                    delta = self.ident("edge id")
                self.accept(";")
                raw.append((pid, lhs, rhs, delta))
            else:
                self.fail(f"unexpected {kw.text!r}", kw)
        if start is None:
            raise GrammarError("missing 'start' declaration")
        table = LabelTable(labels)
        prods = []
        for tok, lhs, rhs, delta in raw:
            where = f"{tok.line}:{tok.col}: production {tok.text!r}"
            problems = validate(rhs, table)
            if problems:
                raise GrammarError(f"{where}: " + "; ".join(problems))
            if delta is not None and not rhs.has_edge(delta):
                raise GrammarError(f"{where}: delta {delta!r} is not an edge")
            if delta is None and rhs.edges:
                delta = default_delta(rhs, table)
            self.spans[tok.text] = (tok.line, tok.col)
            try:
                prods.append(Production(tok.text, lhs, rhs, delta))
            except GraphError as exc:
                raise GrammarError(f"{where}: {exc}") from None
        return Grammar(table, tuple(prods), start, name)


def parse_grammar(text: str) -> Grammar:
    return _Parser(text).grammar()


def parse_graph(text: str) -> Hypergraph:
    p = _Parser(text)
    g = p.graph()
    if p.peek().kind != "eof":
        p.fail("trailing input after graph literal")
    return g


def load(path: str | Path) -> GrammarFile:
    path = Path(path)
    p = _Parser(path.read_text())
    g = p.grammar()
    return GrammarFile(path, g, p.spans)


def serialize(g: Grammar) -> str:
    lines = [f"grammar {g.name}", "labels {"]
    for name, sym in g.labels.items():
        lines.append(f"  {name}: {sym.kind.value}/{sym.arity};")
    lines.append("}")
    lines.append(f"start {g.start};")
    for p in g.productions:
        tail = f" delta {p.delta};" if p.delta is not None else ";"
        lines.append(f"prod {p.id}: {p.lhs} -> {p.rhs.to_text()}{tail}")
    return "\n".join(lines) + "\n"
