"""Spin^c and relative Spin^c structures on plumbed manifolds.

Closed graphs: classes are (2Z^s + delta) / (2 M Z^s), represented by
integer vectors with the componentwise parity of the degree vector delta.
Knot complements: relative classes are (2Z^s + delta) / (2 M Z^{s-1}),
where Z^{s-1} sits in Z^s with a zero in the distinguished slot.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .exactnum import Matrix, Singular, det, inverse, smith_normal_form
from .plumbing import PlumbingGraph, degree_vector, framing_matrix, glue_layout


class NotFound(RuntimeError):
    """No self-conjugate representative exists (contradicts the theory)."""


class Incompatible(ValueError):
    pass


def _ivec(v):
    return tuple(int(x) for x in v)


@lru_cache(maxsize=None)
def _class_data(g: PlumbingGraph):
    m = framing_matrix(g)
    d = det(m)
    if d == 0:
        raise Singular("graph has degenerate framing matrix")
    snf = smith_normal_form(m)
    return m, inverse(m), snf


def class_key(g: PlumbingGraph, a) -> tuple[int, ...]:
    """Canonical label of the Spin^c class of the vector a (closed graph)."""
    m, _, snf = _class_data(g)
    delta = degree_vector(g)
    u = [(ai - di) // 2 for ai, di in zip(a, delta)]
    if any((ai - di) % 2 for ai, di in zip(a, delta)):
        raise ValueError("vector %r has wrong parity" % (a,))
    y = snf.U.matvec(u)
    dd = snf.diagonal()
    return tuple(int(yi) % di for yi, di in zip(y, dd))


def same_class(g: PlumbingGraph, a, b) -> bool:
    return class_key(g, a) == class_key(g, b)


def spinc_classes(g: PlumbingGraph):
    """One representative vector per Spin^c class, plus the conjugation map.

    Returns (reps, conj) where reps is a list of |det M| integer vectors in
    deterministic order and conj maps each class key to the key of its
    conjugate.
    """
    m, _, snf = _class_data(g)
    delta = degree_vector(g)
    dd = snf.diagonal()
    uinv = inverse(snf.U)
    reps = []
    for y in product(*(range(di) for di in dd)):
        u = uinv.matvec(y)
        rep = tuple(int(di + 2 * ui) for di, ui in zip(delta, u))
        reps.append(rep)
    conj = {class_key(g, rep): class_key(g, conjugate(rep)) for rep in reps}
    return reps, conj


def conjugate(a) -> tuple[int, ...]:
    return tuple(-x for x in a)


def is_self_conjugate(g: PlumbingGraph, a) -> bool:
    return class_key(g, a) == class_key(g, conjugate(a))


def relative_same_class(g: PlumbingGraph, a, b) -> bool:
    """Equality of relative classes: a - b in 2 M Z^{s-1} (zero in the
    distinguished slot)."""
    m, minv, _ = _class_data(g)
    v0 = g.index_of(g.distinguished)
    diff = [(x - y) for x, y in zip(a, b)]
    if any(d % 2 for d in diff):
        return False
    sol = minv.matvec([d // 2 for d in diff])
    return all(x.denominator == 1 for x in sol) and sol[v0] == 0


def self_conjugate_rep(g: PlumbingGraph) -> tuple[int, ...]:
    """Integer vector b, zero in the distinguished slot, with M b = delta
    (mod 2).  Then a = M b represents the self-conjugate relative class."""
    if g.distinguished is None:
        raise ValueError("graph has no distinguished vertex")
    m = framing_matrix(g)
    delta = degree_vector(g)
    ids = g.ids()
    v0 = ids.index(g.distinguished)
    n = m.nrows
    cols = [j for j in range(n) if j != v0]
    # GF(2) solve of M[:, cols] x = delta
    rows = [[int(m.entry(i, j)) % 2 for j in cols] + [delta[i] % 2]
            for i in range(n)]
    piv_of_col = {}
    r = 0
    for c in range(len(cols)):
        piv = next((i for i in range(r, n) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(n):
            if i != r and rows[i][c]:
                rows[i] = [(x + y) % 2 for x, y in zip(rows[i], rows[r])]
        piv_of_col[c] = r
        r += 1
    for i in range(r, n):
        if rows[i][-1]:
            raise NotFound("no self-conjugate representative (unexpected)")
    x = [0] * len(cols)
    for c, rr in piv_of_col.items():
        x[c] = rows[rr][-1]
    b = [0] * n
    for c, j in enumerate(cols):
        b[j] = x[c]
    return tuple(b)


def glue_spinc(g_minus: PlumbingGraph, a_minus, g_plus: PlumbingGraph, a_plus):
    """Concatenate relative representatives, summing the joint entry.

    Returns (glued_graph, glued_vector); vectors are indexed by the sorted
    vertex ids of the respective graphs.
    """
    if len(a_minus) != g_minus.size() or len(a_plus) != g_plus.size():
        raise Incompatible("vector lengths do not match the graphs")
    layout = glue_layout(g_minus, g_plus)
    n = layout.graph.size()
    out = [0] * n
    for v, idx in layout.map_minus.items():
        out[idx] += a_minus[g_minus.index_of(v)]
    for v, idx in layout.map_plus.items():
        out[idx] += a_plus[g_plus.index_of(v)]
    return layout.graph, tuple(out)


# -- solid torus labels --------------------------------------------------------

def solid_torus_label(p: int, r: int, rep) -> Fraction:
    """Label in Z (r odd) or Z + 1/2 (r even) of a relative class on the
    standard solid-torus graph for p/r; conjugation acts by negation."""
    from .plumbing import solid_torus_graph
    g = solid_torus_graph(p, r)
    m = framing_matrix(g)
    minv = inverse(m)
    s = g.size()
    if len(rep) != s:
        raise Incompatible("representative has wrong length")
    if s == 1:
        # single vertex p (r = 1): vector (2a) carries the label a directly
        return Fraction(rep[0], 2)
    for n in range(0, 4 * abs(p) + 4):
        for nn in (n, -n):
            lab = _label_attempt(m, minv, s, rep, p, r, nn)
            if lab is not None:
                return lab
    raise NotFound("no label found (unexpected)")  # pragma: no cover


def _label_attempt(m, minv, s, rep, p, r, n):
    # search j with ell = (2j+1, 0, ..., 0, +-1) = 2 M nvec + rep, nvec[0] = n
    for sign in (1, -1):
        # ell = base + 2j e_0 with base = (1, 0, ..., 0, sign); solve
        # nvec = M^{-1} (ell - rep) / 2 for integral nvec with nvec[0] = n
        base = [Fraction(0)] * s
        base[0] = Fraction(1)
        base[-1] = Fraction(sign)
        w0 = [x - y for x, y in zip(base, rep)]
        n0 = [x / 2 for x in minv.matvec(w0)]
        njcol = minv.matvec([Fraction(2) if i == 0 else Fraction(0) for i in range(s)])
        njcol = [x / 2 for x in njcol]
        # nvec(j) = n0 + j * njcol ; solve nvec[0] = n
        if njcol[0] == 0:
            continue
        j = (Fraction(n) - n0[0]) / njcol[0]
        if j.denominator != 1:
            continue
        nvec = [a + j * b for a, b in zip(n0, njcol)]
        if all(x.denominator == 1 for x in nvec):
            half = Fraction(1, 2)
            if sign == 1:
                return r * j + half + Fraction(r, 2) - p * n
            return r * j + Fraction(r, 2) - half - p * n
    return None


def solid_torus_rep(p: int, r: int, label) -> tuple[int, ...]:
    """Inverse of solid_torus_label: an integer representative realizing it.

    Labels are stepped along the class of the far-end chain vertex, which
    generates H_1 of the solid torus (the distinguished vertex's class is r
    times that generator).
    """
    from .plumbing import solid_torus_graph
    g = solid_torus_graph(p, r)
    delta = degree_vector(g)
    base = tuple(delta)
    last = len(base) - 1
    lab0 = solid_torus_label(p, r, base)
    shifted = tuple(a + (2 if i == last else 0) for i, a in enumerate(base))
    lab1 = solid_torus_label(p, r, shifted)
    step = lab1 - lab0  # always +-1
    k = (Fraction(label) - lab0) / step
    if k.denominator != 1:
        raise Incompatible("label %s has wrong parity for r = %d" % (label, r))
    return tuple(a + (2 * int(k) if i == last else 0) for i, a in enumerate(base))


# -- linking form / S-matrix ----------------------------------------------------

def linking_form(g: PlumbingGraph, x, y) -> Fraction:
    """lk(x, y) = -(x, M^{-1} y) mod 1 on H_1 classes (integer vectors)."""
    _, minv, _ = _class_data(g)
    val = -sum(Fraction(a) * b for a, b in zip(x, minv.matvec(y)))
    return val - math.floor(val)


def s_matrix(g: PlumbingGraph):
    """The pairing matrix S_ab over Spin^c classes modulo conjugation.

    Returns (keys, rows) where rows[a][b] = 2 cos(2 pi lk(a, b)) scaled by
    1/(|W_a| sqrt|H1|); entries are floats (display only, not used by any
    invariant computation).
    """
    m, _, _ = _class_data(g)
    reps, conj = spinc_classes(g)
    h1 = abs(int(det(m)))
    chosen = {}
    for rep in reps:
        k = class_key(g, rep)
        ck = conj[k]
        if ck not in chosen or k <= ck:
            chosen[k] = rep
    keys = sorted(set(min(k, conj[k]) for k in chosen))
    sel = [chosen[k] for k in keys]
    rows = []
    for a in sel:
        wa = 2 if is_self_conjugate(g, a) else 1
        row = []
        for b in sel:
            ha = [(x - d) // 2 for x, d in zip(a, degree_vector(g))]
            hb = [(x - d) // 2 for x, d in zip(b, degree_vector(g))]
            lk = linking_form(g, ha, hb)
            row.append(2.0 * math.cos(2.0 * math.pi * float(lk)) / (wa * math.sqrt(h1)))
        rows.append(row)
    return keys, rows
