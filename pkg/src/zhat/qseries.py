"""Truncated q-series with rational exponents, two-variable x/q series,
rational functions of x, and recognition of exponential sums.

A QSeries stores the terms of a series sum(c_e * q^e) together with a
completeness bound: every exponent strictly below `complete_below` is
present and exact.  `complete_below is None` marks a series that is exact
everywhere (a finite q-Laurent polynomial).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, lcm


class NoMatch(ValueError):
    """An exponential-sum recognition was inconsistent."""


class InfiniteSlice(ValueError):
    """Operation requires finite q-Laurent slices."""


class NonzeroRemainder(ArithmeticError):
    """An exact division was requested but a remainder survived."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QSeries:
    """Finite collection of exact q-terms, complete below a bound."""

    __slots__ = ("terms", "complete_below")

    def __init__(self, terms=None, complete_below=None):
        tidy: dict[Fraction, Fraction] = {}
        if terms:
            for e, c in (terms.items() if isinstance(terms, dict) else terms):
                e, c = _frac(e), _frac(c)
                if c:
                    tidy[e] = tidy.get(e, Fraction(0)) + c
            tidy = {e: c for e, c in tidy.items() if c}
        bound = None if complete_below is None else _frac(complete_below)
        if bound is not None:
            tidy = {e: c for e, c in tidy.items() if e < bound}
        self.terms = tidy
        self.complete_below = bound

    # -- inspection ---------------------------------------------------------
    def coeff(self, e) -> Fraction:
        return self.terms.get(_frac(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def min_exponent(self):
        return min(self.terms) if self.terms else None

    def exponent_denominator(self) -> int:
        """Common denominator of all stored exponents (1 for the zero series)."""
        return lcm(*(e.denominator for e in self.terms)) if self.terms else 1

    def items(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        return (isinstance(other, QSeries) and self.terms == other.terms
                and self.complete_below == other.complete_below)

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.complete_below))

    def __repr__(self):
        return f"QSeries({self.render()}, complete_below={self.complete_below})"

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "QSeries") -> "QSeries":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return QSeries(out, _min_bound(self.complete_below, other.complete_below))

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + other.negate()

    def negate(self) -> "QSeries":
        return QSeries({e: -c for e, c in self.terms.items()}, self.complete_below)

    def scale(self, c, shift=0) -> "QSeries":
        """c * q^shift * self."""
        c, shift = _frac(c), _frac(shift)
        if not c:
            return QSeries({}, None if self.complete_below is None
                           else self.complete_below + shift)
        bound = None if self.complete_below is None else self.complete_below + shift
        return QSeries({e + shift: c * v for e, v in self.terms.items()}, bound)

    def __mul__(self, other: "QSeries") -> "QSeries":
        out: dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        bound = _mul_bound(self, other)
        return QSeries(out, bound)

    def truncate(self, bound) -> "QSeries":
        bound = _frac(bound)
        new = bound if self.complete_below is None else min(self.complete_below, bound)
        return QSeries(self.terms, new)

    def substitute_q_inverse(self) -> "QSeries":
        """q -> 1/q; requires an exact finite series."""
        if self.complete_below is not None:
            raise InfiniteSlice("q -> 1/q needs a finite exact q-Laurent polynomial")
        return QSeries({-e: c for e, c in self.terms.items()}, None)

    def eval_at_one(self) -> Fraction:
        """Sum of coefficients (value at q = 1); requires exact series."""
        if self.complete_below is not None:
            raise InfiniteSlice("q = 1 evaluation needs an exact series")
        return sum(self.terms.values(), Fraction(0))

    # -- serialization ------------------------------------------------------
    def render(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*q^({e})" for e, c in self.items())

    def to_json_dict(self) -> dict:
        cb = "inf" if self.complete_below is None else str(self.complete_below)
        return {"terms": [{"e": str(e), "c": str(c)} for e, c in self.items()],
                "complete_below": cb}

    @staticmethod
    def from_json_dict(d: dict) -> "QSeries":
        cb = d.get("complete_below")
        bound = None if cb in (None, "inf") else Fraction(cb)
        return QSeries({Fraction(t["e"]): Fraction(t["c"]) for t in d["terms"]}, bound)


def _min_bound(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _mul_bound(a: QSeries, b: QSeries):
    """Completeness bound of a product: unknown terms of one factor enter at
    its bound plus the other factor's lowest stored exponent."""
    if a.complete_below is None and b.complete_below is None:
        return None
    la = a.min_exponent() or Fraction(0)
    lb = b.min_exponent() or Fraction(0)
    cands = []
    if a.complete_below is not None:
        cands.append(a.complete_below + lb)
    if b.complete_below is not None:
        cands.append(b.complete_below + la)
    return min(cands)


def qs_monomial(e, c=1) -> QSeries:
    return QSeries({_frac(e): _frac(c)}, None)


def qs_add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def qs_mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def same_terms(a: QSeries, b: QSeries, below) -> bool:
    """Termwise equality of two series strictly below a bound."""
    below = _frac(below)
    ta = {e: c for e, c in a.terms.items() if e < below}
    tb = {e: c for e, c in b.terms.items() if e < below}
    return ta == tb


def pochhammer_q(n, cutoff) -> QSeries:
    """(q; q)_n truncated below `cutoff`; n may be None for (q; q)_infinity."""
    cutoff = _frac(cutoff)
    if n is None:
        prod = QSeries({0: 1}, cutoff)
        k = 1
        while k < cutoff:
            prod = (prod * QSeries({0: 1, k: -1}, None)).truncate(cutoff)
            k += 1
        return prod
    prod = QSeries({0: 1}, None)
    for k in range(1, n + 1):
        prod = prod * QSeries({0: 1, k: -1}, None)
    if n * (n + 1) // 2 < cutoff:
        return prod  # the full polynomial fits: exact everywhere
    return prod.truncate(cutoff)


def partition_series(cutoff) -> QSeries:
    """1/(q; q)_infinity = sum p(n) q^n, truncated below `cutoff`."""
    cutoff = _frac(cutoff)
    top = int(cutoff) + 1
    p = [0] * (top + 1)
    p[0] = 1
    # Euler's pentagonal-number recurrence
    for n in range(1, top + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > n and g2 > n:
                break
            sign = -1 if k % 2 == 0 else 1
            if g1 <= n:
                total += sign * p[n - g1]
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return QSeries({n: p[n] for n in range(top + 1)}, cutoff)


def divide_by_euler(s: QSeries, cutoff) -> QSeries:
    """s / (q; q)_infinity truncated below `cutoff` (the unreduced version)."""
    cutoff = _frac(cutoff)
    if s.is_zero():
        return QSeries({}, cutoff)
    shift = min(s.min_exponent(), Fraction(0))
    inv = partition_series(cutoff - shift)
    return (s * inv).truncate(cutoff)


def eval_numeric(s: QSeries, q: complex) -> complex:
    """Partial sum of the stored terms at a numeric q with |q| < 1."""
    if abs(q) >= 1:
        raise ValueError("eval_numeric requires |q| < 1")
    return sum(complex(c) * complex(q) ** float(e) for e, c in s.terms.items())


# -- Laurent polynomials in x and rational functions ------------------------

class LaurentPoly:
    """Laurent polynomial in one variable with Fraction coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        tidy: dict[int, Fraction] = {}
        if coeffs:
            for e, c in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                c = _frac(c)
                if c:
                    tidy[int(e)] = tidy.get(int(e), Fraction(0)) + c
        self.coeffs = {e: c for e, c in tidy.items() if c}

    @staticmethod
    def x(power=1, coeff=1) -> "LaurentPoly":
        return LaurentPoly({power: coeff})

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "LaurentPoly":
        c = _frac(c)
        return LaurentPoly({e: c * v for e, v in self.coeffs.items()})

    def __mul__(self, other):
        out: dict[int, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
        return LaurentPoly(out)

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def mirror(self) -> "LaurentPoly":
        """x -> 1/x."""
        return LaurentPoly({-e: c for e, c in self.coeffs.items()})

    def eval_one(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def valuation(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    def coeff(self, e: int) -> Fraction:
        return self.coeffs.get(e, Fraction(0))

    def __repr__(self):
        if not self.coeffs:
            return "LaurentPoly(0)"
        return "LaurentPoly(" + " + ".join(
            f"{c}*x^{e}" for e, c in sorted(self.coeffs.items())) + ")"


def laurent_divmod(num: LaurentPoly, den: LaurentPoly):
    """Division of Laurent polynomials: num = q*den + rem.

    The division is exact in the Laurent ring iff rem is zero.  Internally
    both arguments are shifted to ordinary polynomials with nonzero constant
    term, where classical long division applies.
    """
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return LaurentPoly({}), LaurentPoly({})
    av, bv = num.valuation(), den.valuation()
    f = num.shift(-av)
    g = den.shift(-bv)
    q: dict[int, Fraction] = {}
    rem = f
    dg = g.degree()
    lead = g.coeff(dg)
    while not rem.is_zero() and rem.degree() >= dg:
        e = rem.degree() - dg
        c = rem.coeff(rem.degree()) / lead
        q[e] = c
        rem = rem - g.shift(e).scale(c)
    return LaurentPoly(q).shift(av - bv), rem.shift(av)


def qs_exact_div(num: QSeries, den: QSeries) -> QSeries:
    """Exact division of finite q-Laurent series (rational exponents allowed).

    Raises NonzeroRemainder when den does not divide num exactly.
    """
    if num.complete_below is not None or den.complete_below is not None:
        raise InfiniteSlice("exact division needs finite exact series")
    if num.is_zero():
        return QSeries({}, None)
    denom = lcm(num.exponent_denominator(), den.exponent_denominator())
    np = LaurentPoly({int(e * denom): c for e, c in num.terms.items()})
    dp = LaurentPoly({int(e * denom): c for e, c in den.terms.items()})
    quot, rem = laurent_divmod(np, dp)
    if not rem.is_zero():
        raise NonzeroRemainder("q-series division leaves a remainder")
    return QSeries({Fraction(e, denom): c for e, c in quot.coeffs.items()}, None)


@dataclass(frozen=True)
class XRationalFunction:
    """Quotient of Laurent polynomials in x, normalized by monomial content."""

    numerator: LaurentPoly
    denominator: LaurentPoly

    @staticmethod
    def make(num: LaurentPoly, den: LaurentPoly) -> "XRationalFunction":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        shift = den.valuation()
        den = den.shift(-shift)
        num = num.shift(-shift)
        return XRationalFunction(num, den)

    def expansion_at_zero(self, lo: int, hi: int) -> dict[int, Fraction]:
        """Coefficients of the x -> 0 Laurent expansion for exponents in [lo, hi]."""
        num, den = self.numerator, self.denominator
        v = den.valuation()
        den0 = den.shift(-v)
        c0 = den0.coeff(0)
        order = hi - (num.valuation() - v) + 1
        inv: dict[int, Fraction] = {0: 1 / c0}
        for k in range(1, max(order, 0) + 1):
            acc = Fraction(0)
            for e, c in den0.coeffs.items():
                if 0 < e <= k:
                    acc += c * inv.get(k - e, Fraction(0))
            inv[k] = -acc / c0
        out: dict[int, Fraction] = {}
        for e1, c1 in num.coeffs.items():
            for e2, c2 in inv.items():
                e = e1 - v + e2
                if lo <= e <= hi:
                    out[e] = out.get(e, Fraction(0)) + c1 * c2
        return {e: c for e, c in out.items() if c}

    def expansion_at_infinity(self, lo: int, hi: int) -> dict[int, Fraction]:
        mirrored = XRationalFunction.make(self.numerator.mirror(),
                                          self.denominator.mirror())
        exp = mirrored.expansion_at_zero(-hi, -lo)
        return {-e: c for e, c in exp.items()}


def symmetric_expansion(f: XRationalFunction, window: int) -> dict[int, Fraction]:
    """Half-sum of the x -> 0 and x -> infinity expansions, |exponent| <= window."""
    half = Fraction(1, 2)
    zero = f.expansion_at_zero(-window, window)
    inf = f.expansion_at_infinity(-window, window)
    out: dict[int, Fraction] = {}
    for src in (zero, inf):
        for e, c in src.items():
            out[e] = out.get(e, Fraction(0)) + half * c
    return {e: c for e, c in out.items() if c}


# -- two-variable series -----------------------------------------------------

class XSeries:
    """Series in x^(1/2) and q: a map m -> QSeries, the slice of x^(m/2).

    When `antisymmetric` is set only m > 0 is stored; slice(-m) = -slice(m)
    and slice(0) = 0 structurally.
    """

    __slots__ = ("slices", "antisymmetric")

    def __init__(self, slices=None, antisymmetric=False):
        tidy: dict[int, QSeries] = {}
        for m, s in (slices or {}).items():
            if antisymmetric and m < 0:
                raise ValueError("antisymmetric XSeries stores only m > 0")
            if antisymmetric and m == 0:
                if not s.is_zero():
                    raise ValueError("antisymmetric XSeries needs slice(0) = 0")
                continue
            if not s.is_zero() or s.complete_below is not None:
                tidy[int(m)] = s
        self.slices = tidy
        self.antisymmetric = antisymmetric

    def slice(self, m: int) -> QSeries:
        m = int(m)
        if self.antisymmetric:
            if m == 0:
                return QSeries({}, None)
            if m < 0:
                return self.slices.get(-m, QSeries({}, None)).negate()
        return self.slices.get(m, QSeries({}, None))

    def support(self):
        return sorted(self.slices)

    def truncate(self, bound) -> "XSeries":
        return XSeries({m: s.truncate(bound) for m, s in self.slices.items()},
                       self.antisymmetric)

    def map_slices(self, fn) -> "XSeries":
        return XSeries({m: fn(s) for m, s in self.slices.items()}, self.antisymmetric)

    def __eq__(self, other):
        if not isinstance(other, XSeries):
            return NotImplemented
        keys = set(self.slices) | set(other.slices)
        return (self.antisymmetric == other.antisymmetric
                and all(self.slice(m) == other.slice(m) for m in keys))

    def __repr__(self):
        parts = [f"x^({m}/2): {self.slice(m).render()}" for m in self.support()]
        return "XSeries(" + "; ".join(parts) + f", antisym={self.antisymmetric})"

    def to_json_dict(self) -> dict:
        return {"antisymmetric": self.antisymmetric,
                "slices": [{"m": m, "series": self.slices[m].to_json_dict()}
                           for m in self.support()]}

    @staticmethod
    def from_json_dict(d: dict) -> "XSeries":
        return XSeries({s["m"]: QSeries.from_json_dict(s["series"])
                        for s in d["slices"]}, d["antisymmetric"])

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


@dataclass
class HbarXSeries:
    """hbar-power series whose coefficients are rational functions of x."""

    coefficients: list[XRationalFunction] = field(default_factory=list)
    order: int = 0


# -- recognition of exponential sums ----------------------------------------

def recognize_exp_sum(series, window: int) -> QSeries:
    """Find the q-Laurent polynomial sum(c_j q^j, |j| <= window) whose
    expansion at q = e^hbar matches the given hbar-coefficients.

    `series` lists the coefficients of hbar^0 .. hbar^K; K >= 2*window + 2
    is required so at least two orders remain to cross-check the fit.
    Raises NoMatch when the overdetermined system is inconsistent.
    """
    series = [_frac(x) for x in series]
    k_top = len(series) - 1
    if k_top < 2 * window + 2:
        raise ValueError("need at least 2*window + 2 hbar orders")
    js = list(range(-window, window + 1))
    n_unknown = len(js)
    # sum_j c_j j^i = series[i] * i!
    rows = [[Fraction(j) ** i for j in js] for i in range(n_unknown)]
    rhs = [series[i] * factorial(i) for i in range(n_unknown)]
    sol = _solve_square(rows, rhs)
    if sol is None:
        raise NoMatch("singular recognition system")
    for i in range(n_unknown, k_top + 1):
        lhs = sum(c * Fraction(j) ** i for c, j in zip(sol, js))
        if lhs != series[i] * factorial(i):
            raise NoMatch("exponential-sum fit fails at order %d" % i)
    return QSeries({j: c for j, c in zip(js, sol) if c}, None)


def _solve_square(rows, rhs):
    """Exact Gaussian elimination; returns None when singular."""
    n = len(rows)
    a = [list(r) + [v] for r, v in zip(rows, rhs)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return None
        a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        a[k] = [x / p for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return [a[i][n] for i in range(n)]
