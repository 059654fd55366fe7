"""Affine Hecke algebra over Z[v, v^-1] in the standard and canonical bases.

The standard basis satisfies T_x T_y = T_xy when lengths add and the
quadratic relation (T_s - v^2)(T_s + 1) = 0.  The canonical basis is
normalized as

    C_w = v^{-ell(w)} * sum_{y <= w} P_{y,w}(v^2) T_y,

which makes C_s^2 = (v + v^-1) C_s and bar(C_w) = C_w for the bar involution
bar(v) = v^-1, bar(T_w) = T_{w^-1}^{-1}.  Kazhdan-Lusztig polynomials are
computed by the classical descent recursion with mu-corrections and cached in
a KLTable; an independent linear-solve construction of the canonical basis
from bar-invariance alone is provided as a cross-check oracle.

Length-zero elements om are grouped in: T_om is invertible, C_{om w} =
T_om C_w, and P_{om x, om y} = P_{x, y}; elements of distinct length-zero
cosets are incomparable and have vanishing KL polynomials.
"""

from __future__ import annotations

import json

from .ring import LaurentPoly
from .weyl import (
    WeylElt,
    coset_split,
    elt_from_json,
    elt_to_json,
    reduced_word,
    w_ball,
    w_bruhat_leq,
    w_descents,
    w_length,
    w_multiply,
)


class UncachedRadius(ValueError):
    """A KL polynomial was requested beyond the table's certified radius."""


class TruncationNotCertified(ValueError):
    """A product cannot be certified exact within the table's radius."""


_V = LaurentPoly.monomial(1)
_VINV = LaurentPoly.monomial(-1)
_ONE = LaurentPoly.one()
_Q = LaurentPoly.monomial(2)  # q = v^2 in the v-variable
_QM1 = _Q - _ONE


class HeckeElt:
    """Finite linear combination of basis elements over Z[v, v^-1].

    ``basis`` is "T" or "C"; ``terms`` maps group elements to coefficients,
    with no zero terms stored.
    """

    __slots__ = ("datum", "basis", "terms")

    def __init__(self, datum, basis, terms=None):
        self.datum = datum
        self.basis = basis
        t = {}
        if terms:
            for w, c in terms.items():
                if not c.is_zero():
                    t[w] = c
        self.terms = t

    @staticmethod
    def unit(datum, basis="T"):
        return HeckeElt(datum, basis, {datum.identity: _ONE})

    @staticmethod
    def basis_elt(datum, w, basis="T"):
        return HeckeElt(datum, basis, {w: _ONE})

    def is_zero(self):
        return not self.terms

    def coeff(self, w):
        return self.terms.get(w, LaurentPoly.zero())

    def support(self):
        return set(self.terms)

    def map_coeffs(self, f):
        return HeckeElt(self.datum, self.basis, {w: f(c) for w, c in self.terms.items()})

    def __add__(self, other):
        self._compat(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            s = t.get(w, LaurentPoly.zero()) + c
            if s.is_zero():
                t.pop(w, None)
            else:
                t[w] = s
        return HeckeElt(self.datum, self.basis, t)

    def __sub__(self, other):
        return self + other.scale(LaurentPoly.monomial(0, -1))

    def scale(self, c):
        return HeckeElt(self.datum, self.basis, {w: c * a for w, a in self.terms.items()})

    def _compat(self, other):
        if self.datum.label != other.datum.label or self.basis != other.basis:
            raise ValueError("Hecke elements in different bases or data")

    def __eq__(self, other):
        return (
            isinstance(other, HeckeElt)
            and self.datum.label == other.datum.label
            and self.basis == other.basis
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for w in sorted(self.terms, key=WeylElt.sort_key):
            bits.append(f"({self.terms[w]})*{self.basis}[{w}]")
        return " + ".join(bits)


def _mult_gen_right(a: HeckeElt, i: int) -> HeckeElt:
    """Right multiplication of a T-basis element by T_{s_i}."""
    d = a.datum
    s = d.simple_reflections[i]
    out = {}

    def add(w, c):
        cur = out.get(w)
        s_ = c if cur is None else cur + c
        if s_.is_zero():
            out.pop(w, None)
        else:
            out[w] = s_

    for w, c in a.terms.items():
        ws = w_multiply(w, s)
        if w_length(ws) > w_length(w):
            add(ws, c)
        else:
            add(w, c * _QM1)
            add(ws, c * _Q)
    return HeckeElt(d, "T", out)


def _mult_gen_inv_right(a: HeckeElt, i: int) -> HeckeElt:
    """Right multiplication by T_{s_i}^{-1} = v^-2 T_s + (v^-2 - 1) T_e."""
    d = a.datum
    s = d.simple_reflections[i]
    out = {}

    def add(w, c):
        cur = out.get(w)
        s_ = c if cur is None else cur + c
        if s_.is_zero():
            out.pop(w, None)
        else:
            out[w] = s_

    qinv = LaurentPoly.monomial(-2)
    qinvm1 = qinv - _ONE
    for w, c in a.terms.items():
        ws = w_multiply(w, s)
        if w_length(ws) < w_length(w):
            add(ws, c)
        else:
            add(ws, c * qinv)
            add(w, c * qinvm1)
    return HeckeElt(d, "T", out)


def _mult_omega_right(a: HeckeElt, k: int) -> HeckeElt:
    d = a.datum
    om = d.omega[k]
    return HeckeElt(d, "T", {w_multiply(w, om): c for w, c in a.terms.items()})


def t_multiply(a: HeckeElt, b: HeckeElt) -> HeckeElt:
    """Product in the standard basis."""
    a._compat(b)
    if a.basis != "T":
        raise ValueError("t_multiply expects T-basis elements")
    d = a.datum
    total = HeckeElt(d, "T")
    for w, c in b.terms.items():
        word, om = reduced_word(w)
        acc = a.scale(c)
        for i in word:
            acc = _mult_gen_right(acc, i)
        if om:
            acc = _mult_omega_right(acc, om)
        total = total + acc
    return total


def hecke_bar(a: HeckeElt) -> HeckeElt:
    """Bar involution: v -> v^-1 on coefficients, T_w -> T_{w^-1}^{-1}.

    On the canonical basis the involution only bars coefficients.
    """
    d = a.datum
    if a.basis == "C":
        return a.map_coeffs(LaurentPoly.bar)
    total = HeckeElt(d, "T")
    for w, c in a.terms.items():
        word, om = reduced_word(w)
        acc = HeckeElt(d, "T", {d.identity: c.bar()})
        for i in word:
            acc = _mult_gen_inv_right(acc, i)
        if om:
            acc = _mult_omega_right(acc, om)
        total = total + acc
    return total


class KLTable:
    """Cache of Kazhdan-Lusztig polynomials within a length ball.

    Entries are stored in the variable q; the certified radius bounds ell(y).
    Construction is layered by ell(y) and append-only, so a larger table
    always contains every entry of a smaller one.
    """

    def __init__(self, datum, radius):
        if radius < 0:
            raise ValueError("radius must be non-negative")
        self.datum = datum
        self.radius = radius
        self._P = {}
        self._balls = {}
        self._h = {}

    # -- balls and intervals -------------------------------------------------

    def ball(self, length):
        if length not in self._balls:
            self._balls[length] = w_ball(self.datum, length)
        return self._balls[length]

    def interval_below(self, y):
        """Elements x <= y, sorted."""
        return [x for x in self.ball(w_length(y)) if w_bruhat_leq(x, y)]

    # -- KL polynomials --------------------------------------------------------

    def kl(self, x: WeylElt, y: WeylElt) -> LaurentPoly:
        """P_{x,y} as a polynomial in q."""
        if w_length(y) > self.radius:
            raise UncachedRadius("uncached radius")
        omx, xa = coset_split(x)
        omy, ya = coset_split(y)
        if omx != omy:
            return LaurentPoly.zero()
        return self._kl_coxeter(xa, ya)

    def _kl_coxeter(self, x, y):
        key = (x, y)
        got = self._P.get(key)
        if got is not None:
            return got
        if x == y:
            p = LaurentPoly.one()
        elif not w_bruhat_leq(x, y):
            p = LaurentPoly.zero()
        else:
            d = self.datum
            i = min(w_descents(y, "left"))
            s = d.simple_reflections[i]
            sx = w_multiply(s, x)
            if w_length(sx) > w_length(x):
                p = self._kl_coxeter(sx, y)
            else:
                v = w_multiply(s, y)
                p = self._kl_coxeter(sx, v) + LaurentPoly.monomial(1) * self._kl_coxeter(x, v)
                ly = w_length(y)
                for z in self.ball(w_length(v)):
                    if w_length(w_multiply(s, z)) >= w_length(z):
                        continue
                    if not (w_bruhat_leq(x, z) and w_bruhat_leq(z, v)):
                        continue
                    m = self._mu_coxeter(z, v)
                    if m:
                        p = p - LaurentPoly.monomial((ly - w_length(z)) // 2, m) * self._kl_coxeter(x, z)
            lx, ly = w_length(x), w_length(y)
            dg = p.degree()
            assert p.is_zero() or 2 * dg <= ly - lx - 1, "KL degree bound violated"
            assert p.is_zero() or p.valuation() >= 0, "negative q-power in a KL polynomial"
        self._P[key] = p
        return p

    def mu(self, x, y):
        """Coefficient of q^{(ell(y)-ell(x)-1)/2} in P_{x,y} (0 if even gap)."""
        omx, xa = coset_split(x)
        omy, ya = coset_split(y)
        if omx != omy:
            return 0
        return self._mu_coxeter(xa, ya)

    def _mu_coxeter(self, x, y):
        gap = w_length(y) - w_length(x)
        if gap <= 0 or gap % 2 == 0:
            return 0
        return self._kl_coxeter(x, y).coeff((gap - 1) // 2)

    def build(self, jobs=1):
        """Populate every entry with ell(y) <= radius, layer by layer."""
        rows = [(y, self.interval_below(y)) for y in self.ball(self.radius)]

        def row(args):
            y, xs = args
            return [(x, y, self.kl(x, y)) for x in xs]

        if jobs > 1:
            from concurrent.futures import ThreadPoolExecutor

            layers = {}
            for y, xs in rows:
                layers.setdefault(w_length(y), []).append((y, xs))
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for ell in sorted(layers):
                    list(pool.map(row, layers[ell]))
        else:
            for r in rows:
                row(r)
        return self

    def entries(self):
        """Sorted (x, y, P) triples for every stored pair with x <= y."""
        out = []
        for y in self.ball(self.radius):
            for x in self.interval_below(y):
                out.append((x, y, self.kl(x, y)))
        out.sort(key=lambda t: (w_length(t[1]), t[1].sort_key(), t[0].sort_key()))
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self):
        return {
            "format": "kltable/v1",
            "datum": self.datum.label,
            "radius": self.radius,
            "entries": [
                {"x": elt_to_json(x), "y": elt_to_json(y), "P": p.to_json()}
                for x, y, p in self.entries()
            ],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def load(datum, path):
        with open(path) as fh:
            obj = json.load(fh)
        if obj.get("format") != "kltable/v1":
            raise ValueError("not a kltable/v1 cache file")
        if obj.get("datum") != datum.label:
            raise ValueError(
                f"cache datum {obj.get('datum')!r} does not match {datum.label!r}"
            )
        table = KLTable(datum, int(obj["radius"]))
        for ent in obj["entries"]:
            x = elt_from_json(datum, ent["x"])
            y = elt_from_json(datum, ent["y"])
            p = LaurentPoly.from_json(ent["P"])
            _, xa = coset_split(x)
            _, ya = coset_split(y)
            table._P[(xa, ya)] = p
        # validate the stored entries against the defining constraints
        if table._P.get((datum.identity, datum.identity)) != LaurentPoly.one():
            raise ValueError("cache is missing or corrupts the diagonal entry")
        for (xa, ya), p in table._P.items():
            gap = w_length(ya) - w_length(xa)
            if xa == ya:
                if p != LaurentPoly.one():
                    raise ValueError("corrupt cache: diagonal entry is not 1")
            elif not p.is_zero():
                if p.valuation() < 0 or 2 * p.degree() > gap - 1:
                    raise ValueError("corrupt cache: KL degree bound violated")
        return table


def kl_polynomial(x: WeylElt, y: WeylElt, table: KLTable) -> LaurentPoly:
    """P_{x,y} in q, from the table (computing and caching if needed)."""
    return table.kl(x, y)


def c_basis(w: WeylElt, table: KLTable) -> HeckeElt:
    """C_w expanded in the standard basis."""
    lw = w_length(w)
    if lw > table.radius:
        raise UncachedRadius("uncached radius")
    terms = {}
    for y in table.ball(lw):
        if not w_bruhat_leq(y, w):
            continue
        p = table.kl(y, w)
        if p.is_zero():
            continue
        terms[y] = p.inflate(2).shift(-lw)
    return HeckeElt(table.datum, "T", terms)


def t_to_c(a: HeckeElt, table: KLTable) -> HeckeElt:
    """Express a T-basis element in the canonical basis (exact, triangular)."""
    rest = a
    out = {}
    while not rest.is_zero():
        w = max(rest.terms, key=WeylElt.sort_key)
        h = rest.coeff(w).shift(w_length(w))
        out[w] = h
        rest = rest - c_basis(w, table).scale(h)
        if w in rest.terms:
            raise AssertionError("triangular reduction failed to clear a term")
    return HeckeElt(a.datum, "C", out)


def c_to_t(a: HeckeElt, table: KLTable) -> HeckeElt:
    total = HeckeElt(a.datum, "T")
    for w, c in a.terms.items():
        total = total + c_basis(w, table).scale(c)
    return total


def c_multiply(x_elt: HeckeElt, y_elt: HeckeElt, table: KLTable) -> HeckeElt:
    """Product of two canonical-basis elements, result in the canonical basis."""
    return t_to_c(t_multiply(c_to_t(x_elt, table), c_to_t(y_elt, table)), table)


def h_constants(x: WeylElt, y: WeylElt, table: KLTable):
    """Structure constants of C_x C_y = sum_z h_{x,y,z} C_z.

    Exactness is certified by requiring ell(x) + ell(y) <= table radius, which
    bounds the support of the product inside the certified ball.
    """
    key = (x, y)
    got = table._h.get(key)
    if got is not None:
        return got
    if w_length(x) + w_length(y) > table.radius:
        raise TruncationNotCertified("truncation not certified")
    prod = t_multiply(c_basis(x, table), c_basis(y, table))
    h = t_to_c(prod, table).terms
    table._h[key] = h
    return h


def ht_c(a: HeckeElt, cell_id, partition) -> HeckeElt:
    """Project a canonical-basis element onto the span of one two-sided cell."""
    if a.basis != "C":
        raise ValueError("ht_c expects a canonical-basis element")
    out = {}
    for z, c in a.terms.items():
        cid = partition.cell_id_of(z)
        if cid == cell_id:
            out[z] = c
    return HeckeElt(a.datum, "C", out)


# ---------------------------------------------------------------------------
# Independent oracle: canonical basis from bar-invariance alone


def kl_bar_solve_row(y: WeylElt, table: KLTable):
    """All P_{x,y} computed by solving the bar-invariance equations.

    Uses only standard-basis inversion: writing the candidate as
    C = sum_x c_x T_x with c_y = v^{-ell(y)}, bar-invariance forces, for x
    processed by decreasing length,

        c_x - bar(c_x) v^{-2 ell(x)} = sum_{u > x} bar(c_u) B_{x,u}

    where bar(T_u) = sum_x B_{x,u} T_x.  The degree constraint
    deg_q P_{x,y} <= (ell(y)-ell(x)-1)/2 splits the equation into disjoint
    exponent ranges, determining P_{x,y} uniquely and yielding a consistency
    check on the residual part.  Fully independent of the descent recursion.
    """
    ly = w_length(y)
    if ly > table.radius:
        raise UncachedRadius("uncached radius")
    interval = table.interval_below(y)
    bars = {u: hecke_bar(HeckeElt.basis_elt(table.datum, u, "T")) for u in interval}
    order = sorted(interval, key=lambda u: (-w_length(u),) + u.sort_key())
    coeffs = {}
    out = {}
    for x in order:
        if x == y:
            coeffs[y] = LaurentPoly.monomial(-ly)
            out[y] = LaurentPoly.one()
            continue
        lx = w_length(x)
        rhs = LaurentPoly.zero()
        for u, cu in coeffs.items():
            rhs = rhs + cu.bar() * bars[u].coeff(x)
        # P(v^2) - v^{2(ly-lx)} P(v^-2) = v^{ly} * rhs
        f = rhs.shift(ly)
        low = f.truncate_above(ly - lx - 1)
        high = f - low
        p_v = low  # P_{x,y} evaluated at q = v^2
        if not (high + p_v.bar().shift(2 * (ly - lx))).is_zero():
            raise AssertionError("bar-invariance system is inconsistent")
        p_q = LaurentPoly({e // 2: c for e, c in p_v.items()})
        if any(e % 2 for e, _ in p_v.items()):
            raise AssertionError("odd v-powers in a KL solution")
        out[x] = p_q
        coeffs[x] = p_v.shift(-ly)
    return out
