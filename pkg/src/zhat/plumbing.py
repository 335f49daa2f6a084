"""Plumbing trees with an optional distinguished vertex: parsing, framing
matrices, definiteness predicates, Neumann moves, continued fractions, and
builders for Seifert stars, torus-knot complements, and solid tori.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactnum import Matrix, Singular, det, inertia, inverse


class NotATree(ValueError):
    pass


class DuplicateId(ValueError):
    pass


class BadDistinguished(ValueError):
    pass


class NotApplicable(ValueError):
    """Neumann move cannot be applied at the given location."""


class NotRepresentable(ValueError):
    """No continued fraction of the requested style exists."""


class BadFraction(ValueError):
    pass


class BadInput(ValueError):
    pass


class MissingDistinguished(ValueError):
    pass


@dataclass(frozen=True)
class PlumbingGraph:
    """Weighted tree; vertices are (id, weight) pairs, edges unordered."""

    vertices: tuple[tuple[int, int], ...]
    edges: frozenset[frozenset]
    distinguished: int | None = None

    def __post_init__(self):
        ids = [v for v, _ in self.vertices]
        if len(set(ids)) != len(ids):
            raise DuplicateId("vertex ids must be unique")
        idset = set(ids)
        for e in self.edges:
            a, b = tuple(e)
            if a not in idset or b not in idset:
                raise NotATree("edge endpoint is not a vertex")
        if len(self.edges) != len(ids) - 1 or not _connected(idset, self.edges):
            raise NotATree("plumbing graph must be a tree")
        if self.distinguished is not None and self.distinguished not in idset:
            raise BadDistinguished("distinguished id %r not present" % (self.distinguished,))

    # -- basic views ---------------------------------------------------------
    def ids(self) -> tuple[int, ...]:
        return tuple(sorted(v for v, _ in self.vertices))

    def weight(self, vid: int) -> int:
        return dict(self.vertices)[vid]

    def neighbors(self, vid: int) -> tuple[int, ...]:
        out = []
        for e in self.edges:
            a, b = tuple(e)
            if a == vid:
                out.append(b)
            elif b == vid:
                out.append(a)
        return tuple(sorted(out))

    def degree(self, vid: int) -> int:
        return len(self.neighbors(vid))

    def size(self) -> int:
        return len(self.vertices)

    def index_of(self, vid: int) -> int:
        return self.ids().index(vid)

    def with_distinguished(self, vid) -> "PlumbingGraph":
        return PlumbingGraph(self.vertices, self.edges, vid)


def make_graph(vertices, edges, distinguished=None) -> PlumbingGraph:
    verts = tuple((int(v), int(w)) for v, w in vertices)
    es = frozenset(frozenset((int(a), int(b))) for a, b in edges)
    return PlumbingGraph(verts, es, distinguished)


def _connected(ids, edges) -> bool:
    if not ids:
        return False
    adj = {i: set() for i in ids}
    for e in edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    seen = set()
    stack = [next(iter(ids))]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(adj[v] - seen)
    return seen == set(ids)


# -- serialization -----------------------------------------------------------

def parse_graph(text: str) -> PlumbingGraph:
    """Parse a graph from JSON or from the line-based text format."""
    text = text.strip()
    if text.startswith("{"):
        d = json.loads(text)
        return make_graph([(v["id"], v["weight"]) for v in d["vertices"]],
                          d.get("edges", []), d.get("distinguished"))
    verts, edges, dist = [], [], None
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append((int(parts[1]), int(parts[2])))
        elif parts[0] == "e":
            edges.append((int(parts[1]), int(parts[2])))
        elif parts[0] == "d":
            dist = int(parts[1])
        else:
            raise BadInput("unknown line %r" % line)
    return make_graph(verts, edges, dist)


def serialize_graph(g: PlumbingGraph) -> str:
    d = {"vertices": [{"id": v, "weight": w} for v, w in sorted(g.vertices)],
         "edges": sorted(sorted(e) for e in g.edges),
         "distinguished": g.distinguished}
    return json.dumps(d)


# -- framing data ------------------------------------------------------------

@lru_cache(maxsize=None)
def framing_matrix(g: PlumbingGraph) -> Matrix:
    """Symmetric matrix with vertex weights on the diagonal, 1 for edges.

    Rows/columns follow the sorted vertex-id order of g.ids().
    """
    ids = g.ids()
    pos = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    rows = [[0] * n for _ in range(n)]
    for v, w in g.vertices:
        rows[pos[v]][pos[v]] = w
    for e in g.edges:
        a, b = tuple(e)
        rows[pos[a]][pos[b]] = rows[pos[b]][pos[a]] = 1
    return Matrix.from_rows(rows)


def degree_vector(g: PlumbingGraph) -> tuple[int, ...]:
    return tuple(g.degree(v) for v in g.ids())


def is_negative_definite(g: PlumbingGraph) -> bool:
    m = framing_matrix(g)
    return inertia(m).n_neg == m.nrows


def is_weakly_negative_definite(g: PlumbingGraph, treat_distinguished: bool = True) -> bool:
    """M invertible and M^{-1} negative definite on the span of the
    (non-distinguished, when treat_distinguished) vertices of degree >= 3.

    For closed chains without any such vertex the span condition is vacuous;
    a positive definite M is rejected there so that positive plumbings never
    count as weakly negative definite.  Pairs (graph, distinguished vertex)
    keep the vacuous reading: solid tori with positive weights are valid
    gluing factors.
    """
    m = framing_matrix(g)
    if det(m) == 0:
        raise Singular("framing matrix is degenerate")
    minv = inverse(m)
    ids = g.ids()
    span = [i for i, v in enumerate(ids)
            if g.degree(v) >= 3 and not (treat_distinguished and v == g.distinguished)]
    if not span:
        if treat_distinguished and g.distinguished is not None:
            return True
        return inertia(m).n_pos < m.nrows
    sub = minv.submatrix(span)
    return inertia(sub).n_neg == len(span)


# -- Neumann moves -----------------------------------------------------------

@dataclass(frozen=True)
class NeumannMove:
    """One local move.

    kind       one of "a_minus", "a_plus", "b_minus", "b_plus", "c"
    direction  "blow_up" or "blow_down"
    location   kind (a): blow_up -> edge (i, j); blow_down -> new vertex id
               kind (b): blow_up -> vertex id; blow_down -> leaf id to remove
               kind (c): blow_up -> (vertex id, weight1, neighbor subset for
               side 1); blow_down -> the 0-weight degree-2 vertex id
    """

    kind: str
    direction: str
    location: object


def _fresh_id(g: PlumbingGraph) -> int:
    return max(v for v, _ in g.vertices) + 1


def apply_neumann(g: PlumbingGraph, move: NeumannMove) -> PlumbingGraph:
    if move.direction == "blow_up":
        return _blow_up(g, move)
    if move.direction == "blow_down":
        return _blow_down(g, move)
    raise NotApplicable("unknown direction %r" % move.direction)


def _blow_up(g, move):
    verts = dict(g.vertices)
    edges = set(g.edges)
    if move.kind in ("a_minus", "a_plus"):
        i, j = move.location
        if frozenset((i, j)) not in edges:
            raise NotApplicable("no edge (%s, %s)" % (i, j))
        sign = -1 if move.kind == "a_minus" else 1
        new = _fresh_id(g)
        verts[i] += sign
        verts[j] += sign
        verts[new] = sign
        edges.remove(frozenset((i, j)))
        edges.add(frozenset((i, new)))
        edges.add(frozenset((new, j)))
        return PlumbingGraph(tuple(verts.items()), frozenset(edges), g.distinguished)
    if move.kind in ("b_minus", "b_plus"):
        v = move.location
        if v not in verts:
            raise NotApplicable("no vertex %s" % v)
        sign = -1 if move.kind == "b_minus" else 1
        new = _fresh_id(g)
        verts[v] += sign
        verts[new] = sign
        edges.add(frozenset((v, new)))
        return PlumbingGraph(tuple(verts.items()), frozenset(edges), g.distinguished)
    if move.kind == "c":
        v, w1, side1 = move.location
        side1 = frozenset(side1)
        if v not in verts or not side1 <= set(g.neighbors(v)):
            raise NotApplicable("bad split data at %s" % v)
        if v == g.distinguished:
            raise NotApplicable("cannot split the distinguished vertex")
        w2 = verts[v] - w1
        v2 = _fresh_id(g)
        mid = v2 + 1
        verts[v] = w1
        verts[v2] = w2
        verts[mid] = 0
        for u in g.neighbors(v):
            if u not in side1:
                edges.remove(frozenset((v, u)))
                edges.add(frozenset((v2, u)))
        edges.add(frozenset((v, mid)))
        edges.add(frozenset((mid, v2)))
        return PlumbingGraph(tuple(verts.items()), frozenset(edges), g.distinguished)
    raise NotApplicable("unknown kind %r" % move.kind)


def _blow_down(g, move):
    verts = dict(g.vertices)
    edges = set(g.edges)
    v = move.location
    if v not in verts:
        raise NotApplicable("no vertex %s" % v)
    if v == g.distinguished:
        raise NotApplicable("cannot blow down the distinguished vertex")
    nbrs = g.neighbors(v)
    if move.kind in ("a_minus", "a_plus"):
        sign = -1 if move.kind == "a_minus" else 1
        if verts[v] != sign or len(nbrs) != 2:
            raise NotApplicable("vertex %s is not a %+d chain vertex" % (v, sign))
        i, j = nbrs
        verts[i] -= sign
        verts[j] -= sign
        del verts[v]
        edges -= {frozenset((v, i)), frozenset((v, j))}
        edges.add(frozenset((i, j)))
        return PlumbingGraph(tuple(verts.items()), frozenset(edges), g.distinguished)
    if move.kind in ("b_minus", "b_plus"):
        sign = -1 if move.kind == "b_minus" else 1
        if verts[v] != sign or len(nbrs) != 1:
            raise NotApplicable("vertex %s is not a %+d leaf" % (v, sign))
        (i,) = nbrs
        verts[i] -= sign
        del verts[v]
        edges.remove(frozenset((v, i)))
        return PlumbingGraph(tuple(verts.items()), frozenset(edges), g.distinguished)
    if move.kind == "c":
        if verts[v] != 0 or len(nbrs) != 2:
            raise NotApplicable("vertex %s is not a 0-weight chain vertex" % v)
        i, j = nbrs
        # merge j into i; the merged vertex keeps id i (and any marking)
        dist = g.distinguished
        if dist == j:
            dist = i
        verts[i] = verts[i] + verts[j]
        del verts[v]
        for u in g.neighbors(j):
            if u != v:
                edges.remove(frozenset((j, u)))
                edges.add(frozenset((i, u)))
        del verts[j]
        edges -= {frozenset((v, i)), frozenset((v, j))}
        return PlumbingGraph(tuple(verts.items()), frozenset(edges), dist)
    raise NotApplicable("unknown kind %r" % move.kind)


def inverse_move(g_before: PlumbingGraph, g_after: PlumbingGraph,
                 move: NeumannMove) -> NeumannMove:
    """The move undoing `move` (which was applied to g_before giving g_after)."""
    if move.direction == "blow_down":
        raise NotApplicable("only blow_ups are inverted here")
    if move.kind in ("a_minus", "a_plus", "b_minus", "b_plus"):
        return NeumannMove(move.kind, "blow_down", _fresh_id(g_before))
    v, _, _ = move.location
    mid = _fresh_id(g_before) + 1
    return NeumannMove("c", "blow_down", mid)


# -- canonical form / isomorphism --------------------------------------------

def canonical_form(g: PlumbingGraph):
    """Canonical encoding of the weighted tree (AHU-style rooted hashing).

    Graphs with distinguished vertices are rooted there; otherwise the tree
    centers are tried and the lexicographically smallest encoding wins.
    """
    adj = {v: set() for v, _ in g.vertices}
    for e in g.edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    weight = dict(g.vertices)
    dist = g.distinguished

    def encode(v, parent):
        subs = sorted(encode(u, v) for u in adj[v] if u != parent)
        return (weight[v], v == dist, tuple(subs))

    if dist is not None:
        return encode(dist, None)
    return min(encode(c, None) for c in _centers(adj))


def _centers(adj):
    ids = set(adj)
    deg = {v: len(adj[v]) for v in ids}
    leaves = [v for v in ids if deg[v] <= 1]
    remaining = len(ids)
    while remaining > 2:
        new = []
        for v in leaves:
            for u in adj[v]:
                deg[u] -= 1
                if deg[u] == 1:
                    new.append(u)
            deg[v] = 0
        remaining -= len(leaves)
        leaves = new
    return leaves if leaves else list(ids)


def graphs_isomorphic(g1: PlumbingGraph, g2: PlumbingGraph) -> bool:
    return canonical_form(g1) == canonical_form(g2)


# -- continued fractions ------------------------------------------------------

def continued_fraction(p: int, r: int, style: str = "any") -> list[int]:
    """Expansion p/r = k1 - 1/(k2 - 1/(... - 1/ks)).

    style "any": floor-based expansion (entries after the first are <= -2).
    style "all_le_minus2": every entry <= -2; exists iff p/r < -1.
    """
    if r <= 0 or p == 0:
        raise BadFraction("need r > 0 and p != 0")
    from math import gcd
    if gcd(p, r) != 1:
        raise BadFraction("p/r must be in lowest terms")
    ks = []
    x = Fraction(p, r)
    while True:
        k = x.numerator // x.denominator  # floor
        if x == k:
            ks.append(int(k))
            break
        ks.append(int(k))
        x = Fraction(-1) / (x - k)  # next tail, always < -1
    if style == "all_le_minus2":
        if any(k > -2 for k in ks):
            raise NotRepresentable("p/r = %d/%d has no all <= -2 expansion" % (p, r))
    elif style != "any":
        raise BadInput("unknown style %r" % style)
    return ks


def cf_value(ks) -> Fraction:
    """Evaluate k1 - 1/(k2 - 1/(...))."""
    val = Fraction(ks[-1])
    for k in reversed(ks[:-1]):
        val = Fraction(k) - 1 / val
    return val


def _chain(weights, start_id, edges_out, verts_out, attach_to=None):
    prev = attach_to
    vid = start_id
    first = None
    for w in weights:
        verts_out.append((vid, w))
        if first is None:
            first = vid
        if prev is not None:
            edges_out.append((prev, vid))
        prev = vid
        vid += 1
    return first, prev, vid


# -- builders ------------------------------------------------------------------

def seifert_graph(b: int, fractions) -> PlumbingGraph:
    """Star-shaped plumbing for M(b; a1/b1, ..., an/bn).

    Arm i carries the negated all>=2 continued fraction of b_i/a_i.
    """
    verts = [(0, int(b))]
    edges = []
    nxt = 1
    for frac in fractions:
        frac = Fraction(frac)
        ai, bi = frac.numerator, frac.denominator
        if not (0 < ai < bi):
            raise BadFraction("need 0 < a_i < b_i, got %s" % frac)
        # b_i/a_i = k1 - 1/(k2 - ...) with k >= 2  <=>  -b_i/a_i all <= -2
        ks = continued_fraction(-bi, ai, "all_le_minus2")
        _, _, nxt = _chain(ks, nxt, edges, verts, attach_to=0)
    return make_graph(verts, edges)


def torus_knot_graph(s: int, t: int) -> PlumbingGraph:
    """Seifert-framed plumbing of the positive torus knot T(s, t) complement.

    Central vertex -1 with two continued-fraction legs for -t/t' and -s/s'
    and a distinguished leaf of weight -s*t.  The framing matrix is
    degenerate (graph longitude = Seifert longitude).
    """
    from math import gcd
    if not (2 <= s < t) or gcd(s, t) != 1:
        raise BadInput("need 2 <= s < t coprime")
    tp = next(v for v in range(1, t) if (s * v + 1) % t == 0)
    sp = next(v for v in range(1, s) if (t * v + 1) % s == 0)
    verts = [(0, -1)]
    edges = []
    nxt = 1
    _, _, nxt = _chain(continued_fraction(-t, tp, "all_le_minus2"),
                       nxt, edges, verts, attach_to=0)
    _, _, nxt = _chain(continued_fraction(-s, sp, "all_le_minus2"),
                       nxt, edges, verts, attach_to=0)
    verts.append((nxt, -s * t))
    edges.append((0, nxt))
    return make_graph(verts, edges, distinguished=nxt)


def solid_torus_graph(p: int, r: int) -> PlumbingGraph:
    """Linear plumbing for the solid torus with boundary slope p/r; the
    distinguished vertex is the first chain vertex."""
    ks = continued_fraction(p, r, "any")
    verts, edges = [], []
    _chain(ks, 0, edges, verts)
    return make_graph(verts, edges, distinguished=0)


def standard_glue(g_minus: PlumbingGraph, g_plus: PlumbingGraph) -> PlumbingGraph:
    """Identify the distinguished vertices, adding their weights; the result
    is a closed plumbing (no distinguished vertex)."""
    layout = glue_layout(g_minus, g_plus)
    return layout.graph


@dataclass(frozen=True)
class GlueLayout:
    """Deterministic vertex-id maps used by standard gluing."""

    graph: PlumbingGraph
    map_minus: dict
    map_plus: dict
    joint_id: int


def glue_layout(g_minus: PlumbingGraph, g_plus: PlumbingGraph) -> GlueLayout:
    if g_minus.distinguished is None or g_plus.distinguished is None:
        raise MissingDistinguished("both factors need a distinguished vertex")
    ids_m = g_minus.ids()
    map_m = {v: i for i, v in enumerate(ids_m)}
    joint = map_m[g_minus.distinguished]
    nxt = len(ids_m)
    map_p = {g_plus.distinguished: joint}
    for v in g_plus.ids():
        if v != g_plus.distinguished:
            map_p[v] = nxt
            nxt += 1
    verts = {map_m[v]: w for v, w in g_minus.vertices}
    for v, w in g_plus.vertices:
        if v == g_plus.distinguished:
            verts[joint] += w
        else:
            verts[map_p[v]] = w
    edges = [(map_m[a], map_m[b]) for a, b in (tuple(e) for e in g_minus.edges)]
    edges += [(map_p[a], map_p[b]) for a, b in (tuple(e) for e in g_plus.edges)]
    g = make_graph(sorted(verts.items()), edges)
    return GlueLayout(g, map_m, map_p, joint)
