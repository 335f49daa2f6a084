"""q-series invariants of closed plumbed 3-manifolds.

The main entry points are zhat_closed / zhat_all_classes (lattice-sum
evaluation over a weakly negative definite plumbing tree), false_theta,
and brieskorn_zhat (the Seifert closed form for Sigma(b1, b2, b3)).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb

from .exactnum import (Matrix, Singular, det, dot, inertia, inverse,
                       quad_form, sublevel_points)
from .plumbing import (PlumbingGraph, degree_vector, framing_matrix,
                       is_weakly_negative_definite, seifert_graph)
from .qseries import QSeries
from .spinc import class_key, spinc_classes


class NotWeaklyNegativeDefinite(ValueError):
    pass


class BadInput(ValueError):
    pass


def vertex_expansion_coeff(deg: int, ell: int) -> Fraction:
    """Coefficient of z^ell in the symmetric expansion of (z - 1/z)^(2 - deg).

    For deg <= 2 this is the finite binomial expansion; for deg >= 3 it is
    the half-sum of the expansions at z -> 0 and z -> infinity.
    """
    if deg < 0:
        raise BadInput("degree must be nonnegative")
    k = 2 - deg
    if k >= 0:
        # (z - 1/z)^k = sum_i C(k, i) (-1)^i z^(k - 2i)
        if (k - ell) % 2 or abs(ell) > k:
            return Fraction(0)
        i = (k - ell) // 2
        return Fraction(comb(k, i) * (-1) ** i)
    d = -k
    if abs(ell) < d or (abs(ell) - d) % 2:
        return Fraction(0)
    j = (abs(ell) - d) // 2
    mag = Fraction(comb(j + d - 1, d - 1), 2)
    return mag * ((-1) ** d if ell > 0 else 1)


_SUPPORT = {0: (-2, 0, 2), 1: (-1, 1), 2: (0,)}


def _prefactor_exponent(g: PlumbingGraph) -> tuple[int, Fraction]:
    m = framing_matrix(g)
    ine = inertia(m)
    total_weight = sum(w for _, w in g.vertices)
    return ine.n_pos, Fraction(3 * ine.signature - total_weight, 4)


def theta_points(g: PlumbingGraph, budget: Fraction):
    """All lattice vectors ell with parity delta, nonzero weight, and
    -(ell, M^{-1} ell)/4 <= budget.

    Yields (ell, exponent, weight).  Vertices of degree <= 2 are pinned to
    the finite support of their expansion; the remaining coordinates are
    enumerated under the positive definite restriction of -M^{-1}/4.
    """
    m = framing_matrix(g)
    minv = inverse(m)
    ids = g.ids()
    degs = degree_vector(g)
    n = len(ids)
    small = [i for i in range(n) if degs[i] <= 2]
    big = [i for i in range(n) if degs[i] >= 3]
    qmat = minv.submatrix(big).scale(Fraction(-1, 4))
    for pattern in product(*(_SUPPORT[degs[i]] for i in small)):
        base = [Fraction(0)] * n
        for i, val in zip(small, pattern):
            base[i] = Fraction(val)
        # exponent(t) = -(1/4) (base + T t, M^{-1} (base + T t)) over t in Z^big
        minv_base = minv.matvec(base)
        lin = [Fraction(-1, 2) * minv_base[i] for i in big]
        const = Fraction(-1, 4) * dot(base, minv_base)
        # substitute t = 2 w + parity to respect ell = delta (mod 2)
        par = [Fraction(degs[i] % 2) for i in big]
        if big:
            q2 = qmat.scale(4)
            qp = qmat.matvec(par)
            lin2 = [2 * (l + 2 * qpi) for l, qpi in zip(lin, qp)]
            const2 = const + quad_form(qmat, par) + dot(lin, par)
            points = sublevel_points(q2, lin2, const2, budget)
        else:
            points = [()] if const <= budget else []
        for w in points:
            ell = list(base)
            weight = Fraction(1)
            for i, val in zip(small, pattern):
                weight *= vertex_expansion_coeff(degs[i], -val)
            ok = True
            for idx, i in enumerate(big):
                ell[i] = Fraction(2 * w[idx]) + par[idx]
                c = vertex_expansion_coeff(degs[i], -int(ell[i]))
                if not c:
                    ok = False
                    break
                weight *= c
            if not ok:
                continue
            exponent = Fraction(-1, 4) * quad_form(minv, ell)
            if exponent <= budget:
                yield tuple(int(x) for x in ell), exponent, weight


@lru_cache(maxsize=None)
def zhat_all_classes(g: PlumbingGraph, cutoff) -> dict:
    """Map class key -> QSeries, truncated below `cutoff`, for every
    Spin^c class of the closed graph g."""
    cutoff = Fraction(cutoff)
    if not is_weakly_negative_definite(g):
        raise NotWeaklyNegativeDefinite("graph is not weakly negative definite")
    npos, e0 = _prefactor_exponent(g)
    sign = Fraction((-1) ** npos)
    m = framing_matrix(g)
    minv = inverse(m)
    delta = degree_vector(g)
    out: dict[tuple, dict] = {}
    reps, _ = spinc_classes(g)
    for rep in reps:
        out[class_key(g, rep)] = {}
    for ell, expo, weight in theta_points(g, cutoff - e0):
        # membership: (ell - delta)/2 must have integral M^{-1} preimage class
        key = class_key(g, ell)
        acc = out[key]
        e = e0 + expo
        acc[e] = acc.get(e, Fraction(0)) + sign * weight
    return {k: QSeries(v, cutoff) for k, v in out.items()}


def zhat_closed(g: PlumbingGraph, a, cutoff) -> QSeries:
    """The invariant series of the class represented by the vector a."""
    table = zhat_all_classes(g, Fraction(cutoff))
    return table[class_key(g, a)]


# -- false theta functions ------------------------------------------------------

def false_theta(p: int, a: int, cutoff) -> QSeries:
    """sum over n >= 0 of psi^(a)_{2p}(n) q^(n^2 / 4p), truncated below cutoff.

    psi adds +1 when n = a (mod 2p) and -1 when n = -a (mod 2p); when both
    congruences hold (a = 0 or a = p mod 2p) the contributions cancel.
    """
    if p <= 0:
        raise BadInput("false theta needs p > 0")
    cutoff = Fraction(cutoff)
    terms: dict[Fraction, Fraction] = {}
    n = 0
    while Fraction(n * n, 4 * p) < cutoff:
        psi = 0
        if (n - a) % (2 * p) == 0:
            psi += 1
        if (n + a) % (2 * p) == 0:
            psi -= 1
        if psi:
            e = Fraction(n * n, 4 * p)
            terms[e] = terms.get(e, Fraction(0)) + psi
        n += 1
    return QSeries(terms, cutoff)


def false_theta_combo(p: int, coeffs, cutoff) -> QSeries:
    """Linear combination sum(n_a * Psi~^(a)_p) given as {a: n_a}."""
    out = QSeries({}, Fraction(cutoff))
    for a, c in coeffs.items():
        out = out + false_theta(p, a, cutoff).scale(c)
    return out


# -- Brieskorn spheres ------------------------------------------------------------

def brieskorn_seifert_data(b1: int, b2: int, b3: int):
    """Seifert invariants (b; a1/b1, a2/b2, a3/b3) of Sigma(b1, b2, b3) with
    e = -1/(b1 b2 b3) and 0 < a_i < b_i."""
    from math import gcd
    bs = (b1, b2, b3)
    if not (0 < b1 < b2 < b3):
        raise BadInput("need 0 < b1 < b2 < b3")
    if any(gcd(bs[i], bs[j]) != 1 for i in range(3) for j in range(i)):
        raise BadInput("b_i must be pairwise coprime")
    p = b1 * b2 * b3
    avals = []
    for bi in bs:
        q = p // bi
        ai = next(a for a in range(1, bi) if (a * q + 1) % bi == 0)
        avals.append(ai)
    b = Fraction(-1 - sum(a * (p // bi) for a, bi in zip(avals, bs)), p)
    if b.denominator != 1:
        raise BadInput("inconsistent Seifert data")  # pragma: no cover
    return int(b), [Fraction(a, bi) for a, bi in zip(avals, bs)]


def brieskorn_graph(b1: int, b2: int, b3: int) -> PlumbingGraph:
    b, fracs = brieskorn_seifert_data(b1, b2, b3)
    return seifert_graph(b, fracs)


def brieskorn_delta(b1: int, b2: int, b3: int) -> Fraction:
    """The overall q-exponent of the Brieskorn closed form."""
    g = brieskorn_graph(b1, b2, b3)
    s = g.size()
    total_weight = sum(w for _, w in g.vertices)
    hs = []
    center = 0
    for leg_start in g.neighbors(center):
        # walk to the end of the leg
        prev, cur = center, leg_start
        while True:
            nxt = [u for u in g.neighbors(cur) if u != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
        idx = [i for i, v in enumerate(g.ids()) if v != cur]
        m = framing_matrix(g)
        sub = Matrix(tuple(tuple(m.rows[i][j] for j in idx) for i in idx))
        hs.append(abs(det(sub)))
    return Fraction(sum(hs) - 3 * s - total_weight
                    - Fraction(b2 * b3, b1) - Fraction(b1 * b3, b2)
                    - Fraction(b1 * b2, b3), 4)


def brieskorn_zhat(b1: int, b2: int, b3: int, cutoff) -> QSeries:
    """Closed form for Zhat_0(Sigma(b1, b2, b3)), truncated below cutoff.

    Follows the lattice pairing over the four sign choices (eps1, eps2)
    directly; the constant 2 q^(1/120) that appears only for (2, 3, 5)
    emerges from the summation ranges without special-casing.
    """
    cutoff = Fraction(cutoff)
    p = b1 * b2 * b3
    delta = brieskorn_delta(b1, b2, b3)
    terms: dict[Fraction, Fraction] = {}
    budget = cutoff - delta
    for e1 in (1, -1):
        for e2 in (1, -1):
            a = p + e1 * b2 * b3 + e2 * b1 * b3 - b1 * b2
            coeff = e1 * e2
            # -q^Delta * coeff * [ -sum_{n>=0} q^{p n^2 + a n + a^2/4p}
            #                      +sum_{n>=1} q^{p n^2 - a n + a^2/4p} ]
            a2 = Fraction(a * a, 4 * p)
            n = 0
            while True:
                e = p * n * n + a * n + a2
                if e > budget and p * n * n - abs(a) * n + a2 > budget and n > abs(a) // p + 1:
                    break
                if e <= budget:
                    terms[delta + e] = terms.get(delta + e, Fraction(0)) + coeff
                if n >= 1:
                    e2_ = p * n * n - a * n + a2
                    if e2_ <= budget:
                        terms[delta + e2_] = terms.get(delta + e2_, Fraction(0)) - coeff
                n += 1
    return QSeries(terms, cutoff)


def brieskorn_parts(b1: int, b2: int, b3: int, cutoff):
    """Decomposition data: (delta, alphas, combo, constant) with
    brieskorn_zhat = q^delta * (constant + combo) where combo is the false
    theta combination Psi~^{(a1) - (a2) - (a3) + (a4)} using in-range
    representatives of the displayed alphas."""
    cutoff = Fraction(cutoff)
    p = b1 * b2 * b3
    delta = brieskorn_delta(b1, b2, b3)
    alphas = (p - b1 * b2 - b1 * b3 - b2 * b3,
              p + b1 * b2 - b1 * b3 - b2 * b3,
              p - b1 * b2 + b1 * b3 - b2 * b3,
              p + b1 * b2 + b1 * b3 - b2 * b3)
    signs = (1, -1, -1, 1)
    combo = QSeries({}, cutoff - delta)
    for a, s in zip(alphas, signs):
        a_mod = a % (2 * p)
        combo = combo + false_theta(p, a_mod, cutoff - delta).scale(s)
    total = brieskorn_zhat(b1, b2, b3, cutoff)
    constant = total.scale(1, -delta) - combo
    return delta, alphas, combo, constant.truncate(cutoff - delta)
