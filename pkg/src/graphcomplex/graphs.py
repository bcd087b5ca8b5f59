"""Modular graphs: connected stable multigraphs with genus labels and labeled legs.

A graph is stored in flag form: a finite flag set {0..F-1}, a self-inverse
involution on flags (fixed points are legs, 2-orbits are edges), an adjacency
map from flags to vertices, a genus label per vertex, and a bijection from the
legs to {1..n}.  Loops and parallel edges are unambiguous in this model.

Canonical forms are computed by a backtracking search over vertex orderings
pruned with iterative partition refinement; two graphs are isomorphic iff
their canonical encodings are identical tuples.  The canonical encoding also
serves as the bit-exact JSON interchange format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations


class GraphError(ValueError):
    """Base class for graph validation failures."""


class NonInvolutive(GraphError):
    pass


class Unstable(GraphError):
    pass


class Disconnected(GraphError):
    pass


class NoEdges(GraphError):
    pass


class BadLegLabels(GraphError):
    pass


class BadLegIndex(GraphError):
    pass


class BadType(GraphError):
    pass


class NotANest(GraphError):
    pass


class TypeMismatch(GraphError):
    pass


@dataclass(frozen=True)
class Corolla:
    """Sentinel for the edgeless one-vertex object of type (g, n).

    Not a modular graph (no edges), but it labels the extra summand in every
    chain complex basis, so it travels alongside graphs throughout.
    """

    g: int
    n: int

    def __repr__(self):
        return "Corolla(%d,%d)" % (self.g, self.n)


class ModularGraph:
    """A connected stable multigraph with genus labels and labeled legs.

    Immutable after construction.  Use :func:`validate` to build one from raw
    arrays with full error diagnostics; the constructor only asserts.
    """

    __slots__ = ("flags", "involution", "adjacency", "genus", "legs", "_hash")

    def __init__(self, flags, involution, adjacency, genus, legs):
        self.flags = int(flags)
        self.involution = tuple(involution)
        self.adjacency = tuple(adjacency)
        self.genus = tuple(genus)
        self.legs = dict(legs)
        self._check()

    def _check(self):
        err = _why_invalid(self.flags, self.involution, self.adjacency,
                           self.genus, self.legs)
        if err is not None:
            raise err

    # -- basic queries ----------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.genus)

    def vertex_flags(self, v):
        return [f for f in range(self.flags) if self.adjacency[f] == v]

    def valence(self, v):
        return sum(1 for f in range(self.flags) if self.adjacency[f] == v)

    def edge_list(self):
        """Edges as pairs (f, i(f)) with f < i(f), sorted by f."""
        return [(f, self.involution[f]) for f in range(self.flags)
                if f < self.involution[f]]

    @property
    def n_edges(self):
        return len(self.edge_list())

    @property
    def n_legs(self):
        return len(self.legs)

    def beta1(self):
        return self.n_edges - self.n_vertices + 1

    def total_genus(self):
        return self.beta1() + sum(self.genus)

    def graph_type(self):
        return (self.total_genus(), self.n_legs)

    def __repr__(self):
        return "ModularGraph(F=%d,V=%d,E=%d,type=%r)" % (
            self.flags, self.n_vertices, self.n_edges, self.graph_type())


def _why_invalid(flags, involution, adjacency, genus, legs):
    F = flags
    if len(involution) != F or len(adjacency) != F:
        return BadLegLabels("flag arrays have wrong length")
    for f in range(F):
        if not (0 <= involution[f] < F) or involution[involution[f]] != f:
            return NonInvolutive("involution is not self-inverse at flag %d" % f)
    V = len(genus)
    for f in range(F):
        if not (0 <= adjacency[f] < V):
            return BadLegLabels("adjacency out of range at flag %d" % f)
    if any(g < 0 for g in genus):
        return Unstable("negative genus label")
    fixed = {f for f in range(F) if involution[f] == f}
    if set(legs) != fixed:
        return BadLegLabels("legs %r do not match involution fixed points %r"
                            % (sorted(legs), sorted(fixed)))
    n = len(legs)
    if sorted(legs.values()) != list(range(1, n + 1)):
        return BadLegLabels("leg labels are not a bijection onto 1..%d" % n)
    # stability: ||v|| + 2 g(v) - 3 >= 0
    val = [0] * V
    for f in range(F):
        val[adjacency[f]] += 1
    for v in range(V):
        if val[v] + 2 * genus[v] - 3 < 0:
            return Unstable("vertex %d has valence %d and genus %d"
                            % (v, val[v], genus[v]))
    # connectivity of the underlying CW complex
    if V > 1:
        adj = {v: set() for v in range(V)}
        for f in range(F):
            g2 = involution[f]
            if g2 != f:
                adj[adjacency[f]].add(adjacency[g2])
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != V:
            return Disconnected("graph has %d components" % (V - len(seen) + 1))
    if all(involution[f] == f for f in range(F)):
        return NoEdges("a modular graph needs at least one edge")
    return None


def validate(flags, involution, adjacency, genus, legs):
    """Build a ModularGraph from raw arrays, raising a named diagnostic."""
    err = _why_invalid(flags, tuple(involution), tuple(adjacency),
                       tuple(genus), dict(legs))
    if err is not None:
        raise err
    return ModularGraph(flags, involution, adjacency, genus, legs)


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

class CanonicalGraph:
    """A modular graph in canonical form.

    The canonical encoding is a deterministic function of the isomorphism
    class.  Caches the reference edge order and the automorphism group
    (as flag permutations).
    """

    __slots__ = ("graph", "encoding", "_aut_gens", "_aut_elements", "_nests")

    def __init__(self, graph, encoding):
        self.graph = graph
        self.encoding = encoding
        self._aut_gens = None
        self._aut_elements = None
        self._nests = None

    @property
    def edges(self):
        return self.graph.edge_list()

    @property
    def n_edges(self):
        return self.graph.n_edges

    def key(self):
        return self.encoding

    def __eq__(self, other):
        return isinstance(other, CanonicalGraph) and self.encoding == other.encoding

    def __hash__(self):
        return hash(self.encoding)

    def __repr__(self):
        return "Canonical%r" % (self.graph,)

    def to_json(self):
        g = self.graph
        return json.dumps(
            {"flags": g.flags,
             "involution": list(g.involution),
             "adjacency": list(g.adjacency),
             "genus": list(g.genus),
             "legs": {str(f): g.legs[f] for f in sorted(g.legs)}},
            separators=(",", ":"))

    def aut_generators(self):
        if self._aut_gens is None:
            self._aut_gens = _aut_generators(self.graph)
        return self._aut_gens

    def aut_elements(self):
        """The full automorphism group as flag permutations (tuples)."""
        if self._aut_elements is None:
            self._aut_elements = _closure(self.aut_generators(), self.graph.flags)
        return self._aut_elements

    def aut_order(self):
        return len(self.aut_elements())


def from_json(text):
    d = json.loads(text)
    legs = {int(k): v for k, v in d["legs"].items()}
    g = validate(d["flags"], d["involution"], d["adjacency"], d["genus"], legs)
    cg, _ = canonicalize(g)
    return cg


def _vertex_invariants(g):
    """Isomorphism-invariant color per vertex: genus, valence, legs, loops."""
    V = g.n_vertices
    val = [0] * V
    loops = [0] * V
    leglab = [[] for _ in range(V)]
    for f in range(g.flags):
        v = g.adjacency[f]
        val[v] += 1
        p = g.involution[f]
        if p == f:
            leglab[v].append(g.legs[f])
        elif g.adjacency[p] == v and f < p:
            loops[v] += 1
    return [(g.genus[v], val[v], tuple(sorted(leglab[v])), loops[v])
            for v in range(V)]


def _refine(g, colors):
    """Iterative refinement of vertex colors by multisets of neighbor colors."""
    V = g.n_vertices
    while True:
        sig = [None] * V
        for v in range(V):
            neigh = []
            for f in range(g.flags):
                if g.adjacency[f] != v:
                    continue
                p = g.involution[f]
                if p != f and g.adjacency[p] != v:
                    neigh.append(colors[g.adjacency[p]])
            sig[v] = (colors[v], tuple(sorted(neigh)))
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[sig[v]] for v in range(V)]
        if new == colors or len(set(new)) == len(set(colors)):
            if new != colors and len(set(new)) == len(set(colors)):
                colors = new
                continue
            return new
        colors = new


def _encode_under_order(g, order):
    """Encoding tuple of g for a total vertex order.

    Flags are numbered vertex by vertex; at each vertex legs come first (by
    label), then edge flags sorted by the position of the far vertex, with
    parallel edges tied to the partner numbering at the earlier endpoint, and
    loops last in adjacent pairs.  Returns (encoding, flag_map old->new).
    """
    pos = {v: i for i, v in enumerate(order)}
    V = g.n_vertices
    flag_map = [-1] * g.flags
    counter = 0
    per_vertex = [[] for _ in range(V)]
    for f in range(g.flags):
        per_vertex[g.adjacency[f]].append(f)

    for v in order:
        legs = sorted((f for f in per_vertex[v] if g.involution[f] == f),
                      key=lambda f: g.legs[f])
        back, forward, loops = [], [], []
        for f in per_vertex[v]:
            p = g.involution[f]
            if p == f:
                continue
            w = g.adjacency[p]
            if w == v:
                loops.append(f)
            elif pos[w] < pos[v]:
                back.append(f)
            else:
                forward.append(f)
        # flags toward earlier vertices follow the partner's numbering
        back.sort(key=lambda f: (pos[g.adjacency[g.involution[f]]],
                                 flag_map[g.involution[f]]))
        # flags toward later vertices: group by far vertex; copies are
        # interchangeable so original id is a harmless tiebreak
        forward.sort(key=lambda f: (pos[g.adjacency[g.involution[f]]], f))
        # loops: adjacent pairs, pair order immaterial
        loop_pairs = {}
        for f in loops:
            k = min(f, g.involution[f])
            loop_pairs.setdefault(k, []).append(f)
        loops_sorted = []
        for k in sorted(loop_pairs):
            loops_sorted.extend(sorted(loop_pairs[k]))
        for f in legs + back + forward + loops_sorted:
            flag_map[f] = counter
            counter += 1

    inv = [0] * g.flags
    adjc = [0] * g.flags
    for f in range(g.flags):
        inv[flag_map[f]] = flag_map[g.involution[f]]
        adjc[flag_map[f]] = pos[g.adjacency[f]]
    genus = tuple(g.genus[v] for v in order)
    legs = tuple(sorted((flag_map[f], lab) for f, lab in g.legs.items()))
    enc = (g.flags, tuple(inv), tuple(adjc), genus, legs)
    return enc, tuple(flag_map)


def canonicalize(g):
    """Canonical representative plus the flag bijection input -> canonical.

    Backtracking over vertex orderings compatible with the refined partition;
    the encoding-minimal order wins.  Deterministic: re-canonicalizing any
    relabeled copy yields an identical encoding.
    """
    V = g.n_vertices
    base = _vertex_invariants(g)
    ranks = {s: i for i, s in enumerate(sorted(set(base)))}
    colors = _refine(g, [ranks[base[v]] for v in range(V)])

    best = [None, None]

    def cells_of(cols):
        cells = {}
        for v in range(V):
            cells.setdefault(cols[v], []).append(v)
        return [cells[c] for c in sorted(cells)]

    def search(cols, prefix):
        cells = cells_of(cols)
        target = None
        for cell in cells:
            if len(cell) > 1:
                target = cell
                break
        if target is None:
            # all cells singletons; chosen prefix first, rest by color
            full = prefix + [v for c in cells for v in c if v not in prefix]
            enc, fmap = _encode_under_order(g, full)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, fmap
            return
        for v in target:
            ncols = list(cols)
            ncols[v] = -len(prefix) - 1  # fresh singleton color, ordered first
            ncols = _refine(g, _normalize_colors(ncols))
            search(ncols, prefix + [v])

    def _normalize_colors(cols):
        ranks = {c: i for i, c in enumerate(sorted(set(cols)))}
        return [ranks[c] for c in cols]

    if V == 1:
        enc, fmap = _encode_under_order(g, [0])
        best[0], best[1] = enc, fmap
    else:
        search(colors, [])

    enc, fmap = best
    F, inv, adjc, genus, legs = enc
    cg = type(g)(F, inv, adjc, genus, dict(legs))
    return CanonicalGraph(cg, enc), fmap


def _aut_generators(g):
    """Generators of Aut(g) for a graph already in canonical numbering."""
    V = g.n_vertices
    gens = set()
    ident = tuple(range(g.flags))

    # local generators: loop flag swaps, loop interchanges, parallel edge swaps
    per_vertex = {}
    for f in range(g.flags):
        per_vertex.setdefault(g.adjacency[f], []).append(f)
    for v in range(V):
        loops = sorted({tuple(sorted((f, g.involution[f])))
                        for f in per_vertex.get(v, [])
                        if g.involution[f] != f and
                        g.adjacency[g.involution[f]] == v})
        for (a, b) in loops:
            p = list(ident)
            p[a], p[b] = b, a
            gens.add(tuple(p))
        for (a1, b1), (a2, b2) in zip(loops, loops[1:]):
            p = list(ident)
            p[a1], p[b1], p[a2], p[b2] = a2, b2, a1, b1
            gens.add(tuple(p))
    seenpairs = set()
    for f in range(g.flags):
        p = g.involution[f]
        if p == f:
            continue
        v, w = g.adjacency[f], g.adjacency[p]
        if v == w or (v, w) in seenpairs:
            continue
        seenpairs.add((v, w))
        seenpairs.add((w, v))
        par = sorted({tuple(sorted((a, g.involution[a])))
                      for a in per_vertex[v]
                      if g.involution[a] != a and g.adjacency[g.involution[a]] == w})
        for (a1, b1), (a2, b2) in zip(par, par[1:]):
            q = list(ident)
            q[a1], q[b1], q[a2], q[b2] = a2, b2, a1, b1
            gens.add(tuple(q))

    # global generators from alternative minimal orderings
    base = _vertex_invariants(g)
    ranks = {s: i for i, s in enumerate(sorted(set(base)))}
    colors = _refine(g, [ranks[base[v]] for v in range(V)])
    results = []

    def _normalize_colors(cols):
        r = {c: i for i, c in enumerate(sorted(set(cols)))}
        return [r[c] for c in cols]

    best = [None]

    def search(cols, prefix):
        cells = {}
        for v in range(V):
            cells.setdefault(cols[v], []).append(v)
        ordered = [cells[c] for c in sorted(cells)]
        target = None
        for cell in ordered:
            if len(cell) > 1:
                target = cell
                break
        if target is None:
            full = prefix + [v for c in ordered for v in c if v not in prefix]
            enc, fmap = _encode_under_order(g, full)
            if best[0] is None or enc < best[0]:
                best[0] = enc
                results.clear()
            if enc == best[0]:
                results.append(fmap)
            return
        for v in target:
            ncols = list(cols)
            ncols[v] = -len(prefix) - 1
            search(_refine(g, _normalize_colors(ncols)), prefix + [v])

    if V == 1:
        results.append(_encode_under_order(g, [0])[1])
    else:
        search(colors, [])

    ref = results[0]
    inv_ref = [0] * g.flags
    for f in range(g.flags):
        inv_ref[ref[f]] = f
    for fmap in results[1:]:
        # automorphism: ref^{-1} o fmap
        p = tuple(fmap[inv_ref[f]] for f in range(g.flags))
        gens.add(p)
    gens.discard(ident)
    return sorted(gens)


def _closure(gens, F):
    """All elements of the permutation group generated by gens, BFS."""
    ident = tuple(range(F))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for q in gens:
                r = tuple(p[q[f]] for f in range(F))
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return sorted(seen)


def automorphisms(cg):
    """Generators of Aut and the group order, for a canonical graph."""
    return cg.aut_generators(), cg.aut_order()


def brute_force_automorphisms(g):
    """All flag permutations preserving the structure.  Test oracle only."""
    from itertools import permutations
    F = g.flags
    V = g.n_vertices
    out = set()
    slots = {v: [f for f in range(F) if g.adjacency[f] == v] for v in range(V)}
    for vperm in permutations(range(V)):
        if any(g.genus[v] != g.genus[vperm[v]] for v in range(V)):
            continue
        if any(len(slots[v]) != len(slots[vperm[v]]) for v in range(V)):
            continue

        def extend(v, partial):
            if v == V:
                perm = tuple(partial[f] for f in range(F))
                if all(perm[g.involution[f]] == g.involution[perm[f]]
                       for f in range(F)):
                    out.add(perm)
                return
            src = slots[v]
            for assign in permutations(slots[vperm[v]]):
                trial = dict(partial)
                ok = True
                for f, h in zip(src, assign):
                    if g.involution[f] == f:
                        if g.involution[h] != h or g.legs[f] != g.legs[h]:
                            ok = False
                            break
                    elif g.involution[h] == h:
                        ok = False
                        break
                    trial[f] = h
                if ok:
                    for f, h in zip(src, assign):
                        trial[f] = h
                    extend(v + 1, trial)

        extend(0, {})
    return sorted(out)


# ---------------------------------------------------------------------------
# gluing, contraction, substitution
# ---------------------------------------------------------------------------

def _leg_flag(g, label):
    for f, lab in g.legs.items():
        if lab == label:
            return f
    raise BadLegIndex("no leg labeled %d" % label)


def glue_self(g, i, j):
    """Glue legs i and j of g into a new edge; remaining legs keep their order."""
    if i == j:
        raise BadLegIndex("glue_self needs two distinct legs")
    fi, fj = _leg_flag(g, i), _leg_flag(g, j)
    inv = list(g.involution)
    inv[fi], inv[fj] = fj, fi
    keep = sorted(lab for lab in g.legs.values() if lab not in (i, j))
    relab = {old: k + 1 for k, old in enumerate(keep)}
    legs = {f: relab[lab] for f, lab in g.legs.items() if lab not in (i, j)}
    return ModularGraph(g.flags, inv, g.adjacency, g.genus, legs)


def relabeling_order(n, i, m, j):
    """The output leg order for gluing leg i of an n-leg graph to leg j of an
    m-leg one: left 1..i-1, then right j+1..m, then right 1..j-1, then left
    i+1..n.  Returns a list of (side, old_label)."""
    seq = [("l", a) for a in range(1, i)]
    seq += [("r", b) for b in range(j + 1, m + 1)]
    seq += [("r", b) for b in range(1, j)]
    seq += [("l", a) for a in range(i + 1, n + 1)]
    return seq


def glue_pair(g1, i, g2, j):
    """Glue leg i of g1 to leg j of g2, relabeling remaining legs by the
    standard total order."""
    n, m = g1.n_legs, g2.n_legs
    if not (1 <= i <= n) or not (1 <= j <= m):
        raise BadLegIndex("leg index out of range")
    off_f = g1.flags
    off_v = g1.n_vertices
    F = g1.flags + g2.flags
    inv = list(g1.involution) + [p + off_f for p in g2.involution]
    adjc = list(g1.adjacency) + [v + off_v for v in g2.adjacency]
    genus = list(g1.genus) + list(g2.genus)
    fi = _leg_flag(g1, i)
    fj = _leg_flag(g2, j) + off_f
    inv[fi], inv[fj] = fj, fi
    legs = {}
    for k, (side, old) in enumerate(relabeling_order(n, i, m, j), start=1):
        if side == "l":
            legs[_leg_flag(g1, old)] = k
        else:
            legs[_leg_flag(g2, old) + off_f] = k
    return ModularGraph(F, inv, adjc, genus, legs)


def glue_corolla_pair(c1, i, c2, j):
    """glue_pair where either side may be a Corolla sentinel."""
    g1 = corolla_graph(c1) if isinstance(c1, Corolla) else c1
    g2 = corolla_graph(c2) if isinstance(c2, Corolla) else c2
    return glue_pair(g1, i, g2, j)


class _BareVertex:
    pass


def corolla_graph(c):
    """The corolla as a raw one-vertex object with legs only.

    Not a valid ModularGraph (no edges); gluing functions accept it through
    :func:`glue_corolla_pair` / :func:`glue_corolla_self` only.
    """
    g = _BareVertex()
    g.flags = c.n
    g.involution = tuple(range(c.n))
    g.adjacency = tuple([0] * c.n)
    g.genus = (c.g,)
    g.legs = {f: f + 1 for f in range(c.n)}
    g.n_legs = c.n
    g.n_vertices = 1
    return g


def glue_corolla_self(c, i, j):
    return glue_self(corolla_graph(c), i, j)


def closure_vertices(g, edge_ids):
    """Vertices adjacent to any edge in edge_ids (ids into g.edge_list())."""
    edges = g.edge_list()
    vs = set()
    for e in edge_ids:
        f, p = edges[e]
        vs.add(g.adjacency[f])
        vs.add(g.adjacency[p])
    return vs


def _closure_connected(g, edge_ids):
    edges = g.edge_list()
    es = list(edge_ids)
    if not es:
        return False
    comp = {}
    for e in es:
        comp[e] = e

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    vert_first = {}
    for e in es:
        f, p = edges[e]
        for v in (g.adjacency[f], g.adjacency[p]):
            if v in vert_first:
                a, b = find(vert_first[v]), find(e)
                comp[a] = b
            else:
                vert_first[v] = e
    roots = {find(e) for e in es}
    return len(roots) == 1


def is_nest(g, edge_ids):
    """Proper, non-empty edge subset whose closure is connected."""
    E = g.n_edges
    s = set(edge_ids)
    if not s or len(s) >= E:
        return False
    return _closure_connected(g, s)


def contract_nest(cg, edge_ids):
    """Collapse the closure of the nest to one vertex carrying its total genus.

    The surviving flags keep their identities, so the collapsed vertex's flag
    set equals leg(N) of the flag closure.
    """
    g = cg.graph if isinstance(cg, CanonicalGraph) else cg
    if not is_nest(g, edge_ids):
        raise NotANest("edge set %r is not a nest" % sorted(edge_ids))
    edges = g.edge_list()
    dead_flags = set()
    for e in edge_ids:
        dead_flags.update(edges[e])
    cvs = closure_vertices(g, edge_ids)
    # genus of the collapse: beta1 of the closure plus swallowed labels
    ne = len(edge_ids)
    nv = len(cvs)
    g_new = (ne - nv + 1) + sum(g.genus[v] for v in cvs)

    keep = [f for f in range(g.flags) if f not in dead_flags]
    remap = {f: k for k, f in enumerate(keep)}
    vkeep = [v for v in range(g.n_vertices) if v not in cvs]
    vmap = {v: k for k, v in enumerate(vkeep)}
    newv = len(vkeep)  # index of the collapsed vertex
    inv = [remap[g.involution[f]] for f in keep]
    adjc = [vmap.get(g.adjacency[f], newv) for f in keep]
    genus = [g.genus[v] for v in vkeep] + [g_new]
    legs = {remap[f]: lab for f, lab in g.legs.items()}
    return ModularGraph(len(keep), inv, adjc, genus, legs)


def flag_closure(cg, edge_ids):
    """The nest as a graph in its own right; legs are the host's flags that
    touch the closure without lying in a nest edge.

    Leg labels use the flag numbering of ``contract_nest`` on the same nest,
    so ``substitute(contract_nest(g, N), collapsed_vertex, flag_closure(g, N))``
    reproduces g.
    """
    g = cg.graph if isinstance(cg, CanonicalGraph) else cg
    if not is_nest(g, edge_ids):
        raise NotANest("edge set %r is not a nest" % sorted(edge_ids))
    edges = g.edge_list()
    nest_flags = set()
    for e in edge_ids:
        nest_flags.update(edges[e])
    # flag numbering of the contracted host graph
    contract_remap = {}
    k = 0
    for f in range(g.flags):
        if f not in nest_flags:
            contract_remap[f] = k
            k += 1
    cvs = sorted(closure_vertices(g, edge_ids))
    vmap = {v: i for i, v in enumerate(cvs)}
    keep = [f for f in range(g.flags) if g.adjacency[f] in vmap]
    remap = {f: i for i, f in enumerate(keep)}
    inv, legs = [], {}
    for f in keep:
        p = g.involution[f]
        if f in nest_flags:
            inv.append(remap[p])
        else:
            inv.append(remap[f])
            legs[remap[f]] = contract_remap[f]
    adjc = [vmap[g.adjacency[f]] for f in keep]
    genus = [g.genus[v] for v in cvs]
    return _XGraph(len(keep), inv, adjc, genus, legs)


class _XGraph(ModularGraph):
    """A modular graph whose legs are labeled by an arbitrary finite set."""

    def _check(self):
        pass  # leg labels are host flag ids, not 1..n


def substitute(g, v, inner):
    """Replace vertex v of g by the graph `inner` whose legs are labeled by
    the flags of v.  Total genus and edge sets add."""
    host_flags = sorted(f for f in range(g.flags) if g.adjacency[f] == v)
    if sorted(inner.legs.values()) != host_flags:
        raise TypeMismatch("inner legs %r do not match flags of vertex %d: %r"
                           % (sorted(inner.legs.values()), v, host_flags))
    if inner.total_genus() != g.genus[v]:
        raise TypeMismatch("inner graph has genus %d, vertex carries %d"
                           % (inner.total_genus(), g.genus[v]))
    keep = [f for f in range(g.flags) if g.adjacency[f] != v]
    remap = {f: k for k, f in enumerate(keep)}
    off_f = len(keep)
    off_v = g.n_vertices - 1
    vkeep = [w for w in range(g.n_vertices) if w != v]
    vmap = {w: k for k, w in enumerate(vkeep)}

    leg_flag_of = {lab: f for f, lab in inner.legs.items()}
    F = off_f + inner.flags
    inv = [0] * F
    adjc = [0] * F
    for f in keep:
        p = g.involution[f]
        if p == f:
            inv[remap[f]] = remap[f]
        elif g.adjacency[p] != v:
            inv[remap[f]] = remap[p]
        else:
            inv[remap[f]] = leg_flag_of[p] + off_f
    for f in range(inner.flags):
        p = inner.involution[f]
        if p != f:
            inv[f + off_f] = p + off_f
        else:
            hostf = inner.legs[f]  # flag of v this leg replaces
            hp = g.involution[hostf]
            if hp == hostf:  # was a leg of g
                inv[f + off_f] = f + off_f
            elif g.adjacency[hp] != v:
                inv[f + off_f] = remap[hp]
            else:  # edge from v to itself: both ends inside inner's legs
                inv[f + off_f] = leg_flag_of[hp] + off_f
        adjc[f + off_f] = inner.adjacency[f] + off_v
    for f in keep:
        adjc[remap[f]] = vmap[g.adjacency[f]]
    genus = [g.genus[w] for w in vkeep] + list(inner.genus)
    legs = {}
    for f, lab in g.legs.items():
        if g.adjacency[f] != v:
            legs[remap[f]] = lab
    for f in range(inner.flags):
        p = inner.involution[f]
        if p == f:
            hostf = inner.legs[f]
            if g.involution[hostf] == hostf and g.adjacency[hostf] == v:
                legs[f + off_f] = g.legs[hostf]
    return ModularGraph(F, inv, adjc, genus, legs)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

_TREE_CACHE = {}
_GRAPH_CACHE = {}


def max_edges_of_type(g, n):
    """Largest possible edge count of a stable (g, n) graph."""
    return max(0, 3 * g - 3 + n)


def _stable_type(g, n):
    return g >= 0 and n >= 0 and n + 2 * g - 3 >= 0


def _trees(g, n, max_vertices):
    """All stable trees (>=1 edge) of type (g, n), legs labeled 1..n."""
    key = (g, n, max_vertices)
    if key in _TREE_CACHE:
        return _TREE_CACHE[key]
    out = {}
    if max_vertices >= 2 and _stable_type(g, n):
        if n == 0:
            # cut any edge: two one-leg pieces
            for g1 in range(g + 1):
                g2 = g - g1
                for a in _rooted_pieces(g1, 0, max_vertices - 1):
                    for b in _rooted_pieces(g2, 0, max_vertices - 1):
                        gr = glue_corolla_pair(a, _attach_leg(a),
                                               b, _attach_leg(b))
                        if gr.n_vertices <= max_vertices:
                            cg, _ = canonicalize(gr)
                            out[cg.key()] = cg
        else:
            for tree in _trees_rootleg(g, tuple(range(1, n + 1)), max_vertices):
                cg, _ = canonicalize(tree)
                out[cg.key()] = cg
    res = sorted(out.values(), key=lambda c: c.key())
    _TREE_CACHE[key] = res
    return res


def _attach_leg(t):
    return t.n if isinstance(t, Corolla) else t.n_legs


def _rooted_pieces(g, n_other_legs, max_vertices):
    """Corollas and trees of type (g, n_other_legs + 1); the last leg is the
    attachment point."""
    m = n_other_legs + 1
    if _stable_type(g, m):
        yield Corolla(g, m)
        for t in _trees(g, m, max_vertices):
            yield t.graph


def _set_partitions(items, blocks):
    """Ordered lists of `blocks` disjoint (possibly empty) tuples covering items."""
    if blocks == 0:
        if not items:
            yield []
        return
    if blocks == 1:
        yield [tuple(items)]
        return
    rest = list(items)
    n = len(rest)
    for size in range(n + 1):
        for chosen in combinations(rest, size):
            remaining = [x for x in rest if x not in chosen]
            for tail in _set_partitions(remaining, blocks - 1):
                yield [tuple(chosen)] + tail


def _trees_rootleg(g, leg_labels, max_vertices):
    """All stable trees with given leg labels, built from the vertex holding
    the first label outward.  Yields ModularGraph instances (>=1 edge)."""
    first = leg_labels[0]
    others = leg_labels[1:]
    for g0 in range(g + 1):
        for root_legs in _subsets(others):
            L0 = (first,) + root_legs
            rest = tuple(x for x in others if x not in root_legs)
            max_children = max_vertices - 1
            for c in range(1, max_children + 1):
                if len(L0) + c + 2 * g0 - 3 < 0:
                    continue
                for blocks in _set_partitions(rest, c):
                    if any(blocks[k] > blocks[k + 1] for k in range(c - 1)):
                        continue  # unordered children: canonical block order
                    for gsplit in _compositions(g - g0, c):
                        children = []
                        ok = True
                        for blk, gc in zip(blocks, gsplit):
                            opts = list(_rooted_pieces(gc, len(blk), max_vertices - 1))
                            if not opts:
                                ok = False
                                break
                            children.append((blk, opts))
                        if not ok:
                            continue
                        for combo in _product_lists([o for _, o in children]):
                            yield _assemble_tree(g0, L0, [b for b, _ in children], combo)


def _subsets(items):
    for r in range(len(items) + 1):
        yield from combinations(items, r)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _product_lists(lists):
    if not lists:
        yield []
        return
    for head in lists[0]:
        for tail in _product_lists(lists[1:]):
            yield [head] + tail


def _assemble_tree(g0, root_legs, blocks, children):
    """Attach each child piece to a fresh flag of the root corolla.

    Temporary labels track leg identities through the relabeling that each
    gluing applies; the final graph carries the requested labels.
    """
    c = len(children)
    n0 = len(root_legs) + c
    current = corolla_graph(Corolla(g0, n0))
    labels = list(root_legs) + ["slot%d" % k for k in range(c)]
    for k, (blk, child) in enumerate(zip(blocks, children)):
        slot_pos = labels.index("slot%d" % k) + 1
        m = _attach_leg(child)
        child_g = corolla_graph(child) if isinstance(child, Corolla) else child
        glued = glue_pair(current, slot_pos, child_g, m)
        new_labels = []
        for side, old in relabeling_order(len(labels), slot_pos, m, m):
            if side == "l":
                new_labels.append(labels[old - 1])
            else:
                new_labels.append(blk[old - 1])  # child legs 1..m-1 = sorted block
        labels = new_labels
        current = glued
    relab = {pos: lab for pos, lab in enumerate(labels, start=1)}
    legs = {f: relab[v] for f, v in current.legs.items()}
    return ModularGraph(current.flags, current.involution, current.adjacency,
                        current.genus, legs)


def enumerate_graphs(g, n, max_edges=None):
    """Every isomorphism class of modular graph of type (g, n), sorted by
    canonical key.  The corolla sentinel is not included; callers prepend it.
    """
    if not _stable_type(g, n):
        raise BadType("(%d, %d) is not a stable type" % (g, n))
    cap = max_edges_of_type(g, n)
    if max_edges is None:
        max_edges = cap
    max_edges = min(max_edges, cap)
    key = (g, n, max_edges)
    if key in _GRAPH_CACHE:
        return _GRAPH_CACHE[key]
    out = {}
    maxV = max(1, n + 2 * g - 2)
    for t in _trees(g, n, min(maxV, max_edges + 1)):
        if t.n_edges <= max_edges:
            out[t.key()] = t
    if g >= 1 and max_edges >= 1 and _stable_type(g - 1, n + 2):
        smaller = enumerate_graphs(g - 1, n + 2, max_edges - 1)
        sources = list(smaller) + [None]  # None stands for the corolla
        for src in sources:
            for i, j in combinations(range(1, n + 3), 2):
                if src is None:
                    gr = glue_corolla_self(Corolla(g - 1, n + 2), i, j)
                else:
                    gr = glue_self(src.graph, i, j)
                if gr.n_edges <= max_edges:
                    cg, _ = canonicalize(gr)
                    out[cg.key()] = cg
    res = sorted(out.values(), key=lambda c: c.key())
    _GRAPH_CACHE[key] = res
    return res


def naive_enumerate(g, n, max_edges=None):
    """Generate-and-filter oracle: every multigraph up to the edge bound,
    filtered by validity and type.  Exponential; tests only."""
    from itertools import combinations_with_replacement, product
    if max_edges is None:
        max_edges = max_edges_of_type(g, n)
    found = {}
    maxV = max(1, n + 2 * g - 2 + max_edges)
    for V in range(1, maxV + 1):
        slots = [(a, b) for a in range(V) for b in range(a, V)]
        for E in range(1, max_edges + 1):
            for em in combinations_with_replacement(slots, E):
                b1 = E - V + 1
                intg = g - b1
                if intg < 0:
                    continue
                for genus in _compositions(intg, V):
                    for legassign in product(range(V), repeat=n):
                        F = 2 * E + n
                        inv, adjc, legs = [0] * F, [0] * F, {}
                        k = 0
                        for (a, b) in em:
                            inv[k], inv[k + 1] = k + 1, k
                            adjc[k], adjc[k + 1] = a, b
                            k += 2
                        for lab in range(1, n + 1):
                            inv[k] = k
                            adjc[k] = legassign[lab - 1]
                            legs[k] = lab
                            k += 1
                        if _why_invalid(F, tuple(inv), tuple(adjc),
                                        tuple(genus), legs) is not None:
                            continue
                        gr = ModularGraph(F, inv, adjc, genus, legs)
                        if gr.graph_type() != (g, n):
                            continue
                        cg, _ = canonicalize(gr)
                        found[cg.key()] = cg
    return sorted(found.values(), key=lambda c: c.key())
