"""Nests and nestings of a modular graph, and the tubing cross-validation.

A nest is a proper, non-empty edge subset with connected closure, stored as a
bitmask over the host graph's reference edge order.  Two nests are compatible
when one contains the other or their closures share no vertex.  The poset of
nestings is, through the line graph, the face poset of a graph associahedron;
``verify_polytope`` checks that against a textually independent tubing
enumerator.
"""

from __future__ import annotations

from itertools import combinations

from .graphs import CanonicalGraph, NotANest, closure_vertices, is_nest


def _edge_endpoints(g):
    edges = g.edge_list()
    return [(g.adjacency[f], g.adjacency[p]) for (f, p) in edges]


class NestTable:
    """Precomputed nest data for one host graph.

    Nests are bitmasks over edge ids; each carries a vertex bitmask of its
    closure, so compatibility costs two integer tests.
    """

    def __init__(self, cg):
        g = cg.graph if isinstance(cg, CanonicalGraph) else cg
        self.graph = g
        self.n_edges = g.n_edges
        self.ends = _edge_endpoints(g)
        self.nests = []
        self.closure = {}
        full = (1 << self.n_edges) - 1
        for mask in range(1, full):
            ids = [e for e in range(self.n_edges) if mask >> e & 1]
            if is_nest(g, ids):
                self.nests.append(mask)
                vb = 0
                for v in closure_vertices(g, ids):
                    vb |= 1 << v
                self.closure[mask] = vb
        self.nest_set = set(self.nests)

    def is_compatible(self, a, b):
        if a & b == a or a & b == b:
            return True
        return a & b == 0 and self.closure[a] & self.closure[b] == 0

    def compatible_with_all(self, mask, nesting):
        return all(self.is_compatible(mask, m) for m in nesting)


def enumerate_nests(cg):
    """All nests of the graph, as sorted edge-id tuples."""
    t = cg if isinstance(cg, NestTable) else NestTable(cg)
    return [tuple(e for e in range(t.n_edges) if m >> e & 1) for m in t.nests]


def is_compatible(cg, n1, n2):
    t = cg if isinstance(cg, NestTable) else NestTable(cg)
    return t.is_compatible(_as_mask(n1), _as_mask(n2))


def _as_mask(nest):
    if isinstance(nest, int):
        return nest
    m = 0
    for e in nest:
        m |= 1 << e
    return m


def enumerate_nestings(cg):
    """Every nesting (set of pairwise compatible nests), the empty one first.

    Returned as frozensets of edge-bitmasks, in a deterministic order.
    """
    t = cg if isinstance(cg, NestTable) else NestTable(cg)
    out = [frozenset()]
    nests = t.nests

    def grow(start, chosen):
        for k in range(start, len(nests)):
            m = nests[k]
            if t.compatible_with_all(m, chosen):
                nxt = chosen + (m,)
                out.append(frozenset(nxt))
                grow(k + 1, nxt)

    grow(0, ())
    return out


def is_full(t, nesting):
    """No nest can be added: the nesting is maximal."""
    return not any(m not in nesting and t.compatible_with_all(m, nesting)
                   for m in t.nests)


def min_map(cg, nesting):
    """Send each edge to the smallest nest containing it, or to None.

    Always surjective onto the nesting plus None; bijective iff full.
    """
    t = cg if isinstance(cg, NestTable) else NestTable(cg)
    masks = sorted(_as_mask(n) for n in nesting)
    out = {}
    for e in range(t.n_edges):
        bit = 1 << e
        containing = [m for m in masks if m & bit]
        if not containing:
            out[e] = None
        else:
            out[e] = min(containing, key=_popcount)
    return out


def _popcount(m):
    return bin(m).count("1")


def layers(cg, nesting):
    """The |nesting|+1 layer graphs: inside each nest, immediate sub-nests
    collapsed to genus vertices; plus the graph outside all nests.

    Layers have no leg labeling; they are returned as (edge_ids, genus_data)
    pairs: the edges of the layer in host numbering and the list of genus
    labels of its vertices (host vertices keep their label, collapsed
    sub-nests carry their total genus).
    """
    from .graphs import contract_nest

    t = cg if isinstance(cg, NestTable) else NestTable(cg)
    g = t.graph
    masks = sorted((_as_mask(n) for n in nesting), key=_popcount)
    out = []
    full = (1 << t.n_edges) - 1
    for m in list(masks) + [None]:
        inside = full if m is None else m
        # immediate predecessors: maximal proper sub-nests of the nesting
        subs = [x for x in masks if x != m and x & inside == x]
        maximal = [x for x in subs
                   if not any(y != x and x & y == x for y in subs)]
        covered = 0
        for x in maximal:
            covered |= x
        own_edges = [e for e in range(t.n_edges)
                     if inside >> e & 1 and not covered >> e & 1]
        # genus labels: own vertices plus one per collapsed sub-nest
        own_vs = set()
        for e in own_edges:
            a, b = t.ends[e]
            own_vs.add(a)
            own_vs.add(b)
        sub_vs = set()
        for x in maximal:
            ids = [e for e in range(t.n_edges) if x >> e & 1]
            sub_vs |= closure_vertices(g, ids)
        genus = [g.genus[v] for v in sorted(own_vs - sub_vs)]
        for x in maximal:
            ids = [e for e in range(t.n_edges) if x >> e & 1]
            vs = closure_vertices(g, ids)
            b1 = len(ids) - len(vs) + 1
            genus.append(b1 + sum(g.genus[v] for v in vs))
        out.append((tuple(own_edges), tuple(sorted(genus))))
    return out


# ---------------------------------------------------------------------------
# line graphs and tubings (independent implementation for cross-validation)
# ---------------------------------------------------------------------------

class SimpleGraph:
    """Plain simple graph on vertices 0..n-1, adjacency as a set of 2-sets."""

    def __init__(self, n, edges):
        self.n = n
        self.edges = {frozenset(e) for e in edges if len(set(e)) == 2}

    def adjacent(self, a, b):
        return frozenset((a, b)) in self.edges

    def neighbors(self, v):
        return {next(iter(e - {v})) for e in self.edges if v in e}


def line_graph(cg):
    """The simple graph on the edges of the host; adjacent when they share a
    vertex.  Loops and parallel edges of the host collapse to simple edges."""
    g = cg.graph if isinstance(cg, CanonicalGraph) else cg
    ends = _edge_endpoints(g)
    E = len(ends)
    edges = set()
    for a, b in combinations(range(E), 2):
        if set(ends[a]) & set(ends[b]):
            edges.add(frozenset((a, b)))
    return SimpleGraph(E, edges)


def _tube_connected(sg, vs):
    vs = set(vs)
    if not vs:
        return False
    seen = {next(iter(vs))}
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in sg.neighbors(v):
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == vs


def enumerate_tubes(sg):
    """Proper, non-empty vertex subsets inducing a connected subgraph."""
    out = []
    verts = list(range(sg.n))
    for r in range(1, sg.n):
        for sub in combinations(verts, r):
            if _tube_connected(sg, sub):
                out.append(frozenset(sub))
    return out


def tubes_compatible(sg, t1, t2):
    """Nested, or disjoint and non-adjacent.  Adjacency counts even when the
    union would be the whole vertex set."""
    if t1 <= t2 or t2 <= t1:
        return True
    if t1 & t2:
        return False
    return not any(sg.adjacent(a, b) for a in t1 for b in t2)


def enumerate_tubings(sg):
    """Every set of pairwise compatible tubes, the empty tubing included."""
    tubes = sorted(enumerate_tubes(sg), key=lambda t: (len(t), sorted(t)))
    out = [frozenset()]

    def grow(start, chosen):
        for k in range(start, len(tubes)):
            t = tubes[k]
            if all(tubes_compatible(sg, t, c) for c in chosen):
                nxt = chosen + (t,)
                out.append(frozenset(nxt))
                grow(k + 1, nxt)

    grow(0, ())
    return out


# ---------------------------------------------------------------------------
# poset comparison
# ---------------------------------------------------------------------------

def f_vector(collection):
    """Counts by rank (number of members of each element)."""
    out = {}
    for x in collection:
        out[len(x)] = out.get(len(x), 0) + 1
    return [out.get(r, 0) for r in range(max(out) + 1)] if out else [0]


def _poset_canonical_form(elements):
    """Canonical encoding of the Hasse diagram of a collection of sets
    ordered by inclusion, graded by rank.

    Encoded as a genus-labeled multigraph (rank as the genus label) and run
    through the graph canonicalizer, so no element matching is involved.
    """
    from .graphs import _XGraph, canonicalize

    elems = sorted(elements, key=lambda s: (len(s), _sort_key(s)))
    index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    hasse = []
    by_rank = {}
    for e in elems:
        by_rank.setdefault(len(e), []).append(e)
    for e in elems:
        r = len(e)
        for f in by_rank.get(r + 1, []):
            if e < f:
                hasse.append((index[e], index[f]))
    flags = 2 * len(hasse)
    inv, adjc = [0] * flags, [0] * flags
    k = 0
    for a, b in hasse:
        inv[k], inv[k + 1] = k + 1, k
        adjc[k], adjc[k + 1] = a, b
        k += 2
    genus = [len(e) for e in elems]
    pg = _XGraph(flags, inv, adjc, genus, {})
    cg, _ = canonicalize(pg)
    return cg.key()


def _freeze(x):
    return x if isinstance(x, int) else tuple(sorted(x))


def _sort_key(s):
    return tuple(sorted(_freeze(x) for x in s))


def verify_polytope(cg):
    """Compare the nesting poset of the graph with the tubing poset of its
    line graph: f-vectors, poset isomorphism via canonical Hasse encodings,
    and the alternating f-vector sum."""
    t = NestTable(cg)
    nestings = enumerate_nestings(t)
    sg = line_graph(t.graph)
    tubings = enumerate_tubings(sg)
    fn = f_vector(nestings)
    ft = f_vector(tubings)
    iso = False
    if fn == ft:
        iso = _poset_canonical_form(nestings) == _poset_canonical_form(tubings)
    # a nesting of r nests is a face of dimension (E-1) - r; the Euler sum of
    # a convex polytope's face poset (whole polytope included) is 1
    dim = t.n_edges - 1
    alt = sum((-1) ** (dim - r) * c for r, c in enumerate(fn))
    full = [x for x in nestings if is_full(t, x)]
    return {
        "nesting_f_vector": fn,
        "tubing_f_vector": ft,
        "isomorphic": iso,
        "alternating_sum": alt,
        "full_nestings": len(full),
        "max_tubings": sum(1 for x in tubings if len(x) == len(ft) - 1),
    }
