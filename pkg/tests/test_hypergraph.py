from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrgnf.errors import CapExceeded, GraphError
from hrgnf.hypergraph import (
    Edge,
    Hypergraph,
    LabelTable,
    canonical_code,
    esize,
    graph,
    handle,
    isize,
    isomorphic,
    replace,
    validate,
)

LT = LabelTable.of(terminals={"a": 1, "b": 0, "c": 2, "d": 3}, nonterminals={"S": 1, "A": 2, "T": 0})


def brute_isomorphic(g: Hypergraph, h: Hypergraph) -> bool:
    """Search every node bijection that fixes ext position-wise."""
    if len(g.nodes) != len(h.nodes) or len(g.edges) != len(h.edges) or len(g.ext) != len(h.ext):
        return False
    gi = [v for v in g.nodes if v not in g.ext]
    hi = [v for v in h.nodes if v not in h.ext]
    target = sorted((e.label, e.att) for e in h.edges)
    for perm in permutations(hi):
        m = dict(zip(g.ext, h.ext)) | dict(zip(gi, perm))
        if sorted((e.label, tuple(m[v] for v in e.att)) for e in g.edges) == target:
            return True
    return False


def test_validate_handle_is_clean():
    for label in LT:
        assert validate(handle(label, LT), LT) == []


def test_validate_arity_mismatch():
    g = graph(["x", "y"], [("e1", "a", ["x", "y"])], [])
    diags = validate(g, LT)
    assert len(diags) == 1 and "arity" in diags[0] and "e1" in diags[0]


def test_validate_repeated_ext():
    g = graph(["x"], [("e1", "a", ["x"])], ["x", "x"])
    diags = validate(g, LT)
    assert len(diags) == 1 and "ext" in diags[0]


def test_validate_unknown_label_and_node():
    g = graph(["x"], [("e1", "zz", ["x"]), ("e2", "a", ["y"])], [])
    assert len(validate(g, LT)) == 2


def test_handle_shapes():
    s = handle("S", LT)
    assert len(s.nodes) == 1 and s.edges[0].att == s.ext == s.nodes
    b = handle("b", LT)
    assert b.nodes == () and b.ext == () and len(b.edges) == 1
    d = handle("d", LT)
    assert d.edges[0].att == d.ext and len(d.ext) == 3


def test_handle_unknown_label():
    with pytest.raises(GraphError):
        handle("nope", LT)


def test_sizes():
    assert (esize(handle("a", LT)), isize(handle("a", LT))) == (1, 0)
    hgr2_rhs = graph(["v0"], [("e1", "T", [])], [])
    assert (esize(hgr2_rhs), isize(hgr2_rhs)) == (1, 1)
    assert (esize(graph(["x", "y", "z"], [], [])), isize(graph(["x", "y", "z"], [], []))) == (0, 3)
    # an external node without edges still counts
    assert isize(graph(["x"], [], ["x"])) == 1


def test_replace_handle_is_identity():
    h = graph(["p", "q", "r"], [("x", "c", ["p", "r"]), ("y", "a", ["q"])], ["p", "q"])
    assert isomorphic(replace(handle("A", LT), "e0", h), h)


def test_replace_star():
    rhs1 = graph(["v0"], [("e1", "S", ["v0"]), ("e2", "a", ["v0"])], ["v0"])
    rhs2 = graph(["v0"], [("e1", "a", ["v0"])], ["v0"])
    star = replace(rhs1, "e1", rhs2)
    assert len(star.nodes) == 1 and [e.label for e in star.edges] == ["a", "a"]
    assert star.ext == ("v0",)


def test_replace_counts_and_fresh_ids():
    g = graph(["v0", "v1", "v2"], [("e0", "A", ["v0", "v1"]), ("e1", "c", ["v1", "v2"])], ["v0"])
    h = graph(["x", "y", "z", "w"], [("e0", "c", ["x", "z"]), ("e1", "c", ["z", "w"]), ("e2", "a", ["y"])], ["x", "y"])
    r = replace(g, "e0", h)
    assert esize(r) == esize(g) - 1 + esize(h)
    assert len(r.nodes) == len(g.nodes) + len(h.nodes) - len(h.ext)
    assert r.ext == g.ext
    assert len({e.id for e in r.edges}) == len(r.edges)
    assert [e.id for e in r.edges] == ["e1", "e0", "e2", "e3"]
    assert r.nodes[3:] == ("v3", "v4")


def test_replace_errors():
    g = handle("A", LT)
    with pytest.raises(GraphError):
        replace(g, "e0", handle("S", LT))
    with pytest.raises(GraphError):
        replace(g, "missing", handle("A", LT))


def test_replace_confluence():
    g = graph(["u", "v"], [("e1", "A", ["u", "v"]), ("e2", "S", ["v"])], ["u"])
    h1 = graph(["x", "y", "z"], [("f", "c", ["x", "z"]), ("g", "c", ["z", "y"])], ["x", "y"])
    h2 = graph(["x", "y"], [("f", "a", ["x"])], ["x"])
    left = replace(replace(g, "e1", h1), "e2", h2)
    right = replace(replace(g, "e2", h2), "e1", h1)
    assert isomorphic(left, right)


def test_canonical_code_examples():
    g = graph(["a", "b", "c"], [("x", "c", ["a", "c"]), ("y", "c", ["c", "b"])], ["a", "b"])
    renamed = graph(["p", "q", "r"], [("m", "c", ["r", "q"]), ("n", "c", ["p", "r"])], ["p", "q"])
    assert canonical_code(g) == canonical_code(renamed)
    flipped = Hypergraph(g.nodes, g.edges, ("b", "a"))
    assert canonical_code(g) != canonical_code(flipped)
    star2 = graph(["v"], [("e1", "a", ["v"]), ("e2", "a", ["v"])], ["v"])
    star3 = graph(["v"], [("e1", "a", ["v"]), ("e2", "a", ["v"]), ("e3", "a", ["v"])], ["v"])
    assert canonical_code(star2) != canonical_code(star3)


def test_canonical_code_cap():
    nodes = [f"n{i}" for i in range(10)]
    g = graph(nodes, [(f"e{i}", "c", [nodes[i], nodes[i + 1]]) for i in range(9)], [])
    with pytest.raises(CapExceeded):
        canonical_code(g, cap=4)
    assert canonical_code(g, cap=10)


def test_isolated_internal_nodes_do_not_count_against_cap():
    nodes = [f"n{i}" for i in range(20)]
    g = graph(nodes, [("e", "a", ["n0"])], [])
    assert canonical_code(g, cap=2) == canonical_code(graph(nodes[::-1], [("f", "a", ["n5"])], []), cap=2)


def test_canonical_code_with_several_pieces():
    # pieces hang off different external nodes; swapping them must change the code
    g = graph(
        ["x", "y", "p", "q", "r"],
        [("e1", "c", ["x", "p"]), ("e2", "c", ["y", "q"]), ("e3", "c", ["q", "r"]), ("e4", "a", ["r"])],
        ["x", "y"],
    )
    same = graph(
        ["x", "y", "r", "q", "p"],
        [("f", "a", ["r"]), ("g", "c", ["q", "r"]), ("h", "c", ["y", "q"]), ("i", "c", ["x", "p"])],
        ["x", "y"],
    )
    swapped = graph(
        ["x", "y", "p", "q", "r"],
        [("e1", "c", ["y", "p"]), ("e2", "c", ["x", "q"]), ("e3", "c", ["q", "r"]), ("e4", "a", ["r"])],
        ["x", "y"],
    )
    assert canonical_code(g) == canonical_code(same) != canonical_code(swapped)
    floating = graph([f"n{i}" for i in range(12)], [(f"e{i}", "a", [f"n{i}"]) for i in range(12)], [])
    assert canonical_code(floating, cap=1)


def test_graph_text():
    g = graph(["v0", "v1"], [("e1", "S", ["v0"]), ("e2", "c", ["v0", "v1"])], ["v0"])
    assert g.to_text() == "{ nodes v0 v1; ext v0; edge e1: S(v0); edge e2: c(v0 v1); }"
    assert graph([], [("e1", "b", [])], []).to_text() == "{ nodes; ext; edge e1: b(); }"


LABELS = [("a", 1), ("b", 0), ("c", 2), ("d", 3)]


@st.composite
def small_graphs(draw, max_nodes=6):
    n = draw(st.integers(0, max_nodes))
    nodes = [f"v{i}" for i in range(n)]
    t = draw(st.integers(0, min(n, 2)))
    ext = draw(st.permutations(nodes))[:t] if n else []
    edges = []
    for i in range(draw(st.integers(0, 5))):
        label, k = draw(st.sampled_from([x for x in LABELS if x[1] <= n]))
        att = draw(st.permutations(nodes))[:k] if k else []
        edges.append(Edge(f"e{i}", label, tuple(att)))
    return Hypergraph(tuple(nodes), tuple(edges), tuple(ext))


@st.composite
def shuffled_copy(draw, g: Hypergraph):
    internal = [v for v in g.nodes if v not in g.ext]
    new_names = draw(st.permutations([f"w{i}" for i in range(len(g.nodes))]))
    m = dict(zip(list(g.ext) + internal, new_names))
    edges = draw(st.permutations(g.edges))
    return Hypergraph(
        tuple(draw(st.permutations([m[v] for v in g.nodes]))),
        tuple(Edge(f"x{i}", e.label, tuple(m[v] for v in e.att)) for i, e in enumerate(edges)),
        tuple(m[v] for v in g.ext),
    )


@settings(max_examples=300, deadline=None)
@given(small_graphs(), small_graphs())
def test_canonical_code_agrees_with_brute_force(g, h):
    assert (canonical_code(g) == canonical_code(h)) == brute_isomorphic(g, h)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_canonical_code_invariant_under_renaming(data):
    g = data.draw(small_graphs())
    h = data.draw(shuffled_copy(g))
    assert brute_isomorphic(g, h)
    assert canonical_code(g) == canonical_code(h)


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_nodes=4), small_graphs(max_nodes=4))
def test_replace_preserves_type(g, h):
    hole = tuple(f"z{i}" for i in range(len(h.ext)))
    host = Hypergraph(g.nodes + hole, g.edges + (Edge("hole", "X", hole),), g.ext)
    r = replace(host, "hole", h)
    assert r.type == host.type
    assert esize(r) == esize(host) - 1 + esize(h)
