"""Reference grammars in ``.hrg`` source form."""
from __future__ import annotations

from .grammar import Grammar
from .hrgfile import parse_grammar

HGR1 = """\
# star graphs: one external node with any positive number of a-edges
grammar hgr1
labels { S: nonterminal/1; a: terminal/1; }
start S;
prod p1: S -> { nodes v0; ext v0; edge e1: S(v0); edge e2: a(v0); }
prod p2: S -> { nodes v0; ext v0; edge e1: a(v0); }
"""

HGR2 = """\
# one b-edge plus any number of isolated nodes
grammar hgr2
labels { T: nonterminal/0; b: terminal/0; }
start T;
prod p1: T -> { nodes v0; ext; edge e1: T(); }
prod p2: T -> { nodes; ext; edge e1: b(); }
"""

TRIANGLE = """\
# one recursive and one nonrecursive A-production; delta marked explicitly
grammar triangle
labels { A: nonterminal/3; B: terminal/2; C: terminal/2; D: terminal/2; E: terminal/2; }
start A;
prod rho: A -> { nodes n1 n2 n3 n4; ext n1 n3 n4; edge e1: B(n1 n2); edge e2: A(n3 n4 n2); } delta e2;
prod gamma: A -> { nodes m1 m2 m3; ext m1 m2 m3; edge e1: C(m1 m2); edge e2: D(m2 m3); edge e3: E(m3 m1); } delta e2;
"""


def hgr3_source(n: int) -> str:
    """Permutation grammar: a single a-edge attached through any permutation of ext."""
    if n < 2:
        raise ValueError("n must be at least 2")
    vs = [f"v{i}" for i in range(1, n + 1)]
    swap = [vs[1], vs[0], *vs[2:]]
    cycle = [*vs[1:], vs[0]]
    nodes = " ".join(vs)
    return (
        f"grammar hgr3_{n}\n"
        f"labels {{ S: nonterminal/{n}; a: terminal/{n}; }}\n"
        "start S;\n"
        f"prod p1: S -> {{ nodes {nodes}; ext {nodes}; edge e0: S({' '.join(swap)}); }}\n"
        f"prod p2: S -> {{ nodes {nodes}; ext {nodes}; edge e0: S({' '.join(cycle)}); }}\n"
        f"prod p3: S -> {{ nodes {nodes}; ext {nodes}; edge e0: a({nodes}); }}\n"
    )


def hgr1() -> Grammar:
    return parse_grammar(HGR1)


def hgr2() -> Grammar:
    return parse_grammar(HGR2)


def hgr3(n: int = 3) -> Grammar:
    return parse_grammar(hgr3_source(n))


def triangle() -> Grammar:
    return parse_grammar(TRIANGLE)
