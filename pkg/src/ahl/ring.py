"""Exact coefficient arithmetic.

Three rings, all with arbitrary-precision integer (or rational) scalars and
decidable equality:

* ``LaurentPoly`` -- integer Laurent polynomials in one variable ``v``,
  the ground ring for Hecke-algebra computations.
* ``TorusRingElt`` -- integer combinations of characters of a diagonalizable
  group (a torus, optionally times a finite cyclic part), the value ring of
  fixed-point localization.
* ``CyclotomicValue`` -- elements of the cyclotomic field Q(zeta_n), used to
  specialize characters at finite-order group elements.

No floating point is used anywhere.  All values are immutable and safe to
share between threads.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


class InexactDivision(ArithmeticError):
    """Raised when a checked division has a nonzero remainder."""


class SingularEvaluationPoint(ValueError):
    """Raised when evaluating a character at a non-invertible point."""


# ---------------------------------------------------------------------------
# Laurent polynomials in v


class LaurentPoly:
    """Integer Laurent polynomial in one variable.

    Stored as a map {exponent: coefficient} with no zero coefficients, so two
    values are equal iff the maps are equal.

    >>> p = LaurentPoly({1: 1, -1: 1})   # v + v^-1
    >>> p * p == LaurentPoly({2: 1, 0: 2, -2: 1})
    True
    >>> p.bar() == p
    True
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for e, a in coeffs.items():
                if a:
                    c[int(e)] = c.get(int(e), 0) + int(a)
                    if not c[int(e)]:
                        del c[int(e)]
        self._c = c

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero():
        return LaurentPoly()

    @staticmethod
    def one():
        return LaurentPoly({0: 1})

    @staticmethod
    def monomial(exp, coeff=1):
        return LaurentPoly({exp: coeff})

    # -- queries -----------------------------------------------------------

    def items(self):
        return self._c.items()

    def coeff(self, exp):
        return self._c.get(exp, 0)

    def is_zero(self):
        return not self._c

    def degree(self):
        """Largest exponent, or None for the zero polynomial."""
        return max(self._c) if self._c else None

    def valuation(self):
        """Smallest exponent, or None for the zero polynomial."""
        return min(self._c) if self._c else None

    def at_one(self):
        """Sum of coefficients (evaluation at v = 1)."""
        return sum(self._c.values())

    def is_constant(self):
        return not self._c or set(self._c) == {0}

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        c = dict(self._c)
        for e, a in other._c.items():
            c[e] = c.get(e, 0) + a
            if not c[e]:
                del c[e]
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = c
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = {e: -a for e, a in self._c.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        c = {}
        for e1, a1 in self._c.items():
            for e2, a2 in other._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + a1 * a2
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = {e: a for e, a in c.items() if a}
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a Laurent polynomial")
        r = LaurentPoly.one()
        for _ in range(n):
            r = r * self
        return r

    def shift(self, k):
        """Multiply by v^k."""
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = {e + k: a for e, a in self._c.items()}
        return out

    def inflate(self, k):
        """Substitute v -> v^k (exponents multiplied by k)."""
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = {e * k: a for e, a in self._c.items()}
        return out

    def bar(self):
        """The ring involution v -> v^-1."""
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = {-e: a for e, a in self._c.items()}
        return out

    def truncate_above(self, maxexp):
        """Terms with exponent <= maxexp."""
        return LaurentPoly({e: a for e, a in self._c.items() if e <= maxexp})

    def exact_divide(self, b):
        """Quotient self / b, raising InexactDivision unless b divides exactly."""
        if b.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero()
        q = {}
        r = dict(self._c)
        bd = b.degree()
        blc = b._c[bd]
        while r:
            rd = max(r)
            if r[rd] % blc:
                raise InexactDivision("inexact division")
            qe, qc = rd - bd, r[rd] // blc
            q[qe] = qc
            for e, a in b._c.items():
                e += qe
                r[e] = r.get(e, 0) - qc * a
                if not r[e]:
                    del r[e]
        return LaurentPoly(q)

    # -- comparisons / hashing ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            return self._c == ({0: other} if other else {})
        return isinstance(other, LaurentPoly) and self._c == other._c

    def __hash__(self):
        return hash(tuple(sorted(self._c.items())))

    def __repr__(self):
        if not self._c:
            return "0"
        bits = []
        for e in sorted(self._c, reverse=True):
            a = self._c[e]
            if e == 0:
                bits.append(f"{a}")
            else:
                va = "v" if e == 1 else f"v^{e}"
                if a == 1:
                    bits.append(va)
                elif a == -1:
                    bits.append(f"-{va}")
                else:
                    bits.append(f"{a}*{va}")
        s = " + ".join(bits)
        return s.replace("+ -", "- ")

    # -- serialization -------------------------------------------------------

    def to_json(self):
        """Canonical encoding: exponents ascending, both parts as strings."""
        return {str(e): str(self._c[e]) for e in sorted(self._c)}

    @staticmethod
    def from_json(obj):
        return LaurentPoly({int(e): int(a) for e, a in obj.items()})


def lp_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def lp_bar(a: LaurentPoly) -> LaurentPoly:
    return a.bar()


def lp_exact_divide(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a.exact_divide(b)


# ---------------------------------------------------------------------------
# Character rings of diagonalizable groups


class TorusRingElt:
    """Integer combination of characters of T x prod(Z/n_i).

    ``rank`` counts the free (torus) coordinates; ``torsion`` lists the orders
    of the finite cyclic coordinates (empty for a plain torus).  Keys are
    integer exponent tuples of length rank + len(torsion); torsion slots are
    stored reduced mod n_i.

    >>> x = TorusRingElt.monomial(1, (1,))
    >>> (x + x.inv()) * (x + x.inv()) == TorusRingElt(1, {(2,): 1, (0,): 2, (-2,): 1})
    True
    """

    __slots__ = ("rank", "torsion", "_c")

    def __init__(self, rank, coeffs=None, torsion=()):
        self.rank = rank
        self.torsion = tuple(torsion)
        n = rank + len(self.torsion)
        c = {}
        if coeffs:
            for k, a in coeffs.items():
                if len(k) != n:
                    raise ValueError("exponent length does not match rank")
                if a:
                    k = self._norm(k)
                    c[k] = c.get(k, 0) + int(a)
                    if not c[k]:
                        del c[k]
        self._c = c

    def _norm(self, key):
        if not self.torsion:
            return tuple(key)
        key = list(key)
        for i, n in enumerate(self.torsion):
            key[self.rank + i] %= n
        return tuple(key)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(rank, torsion=()):
        return TorusRingElt(rank, {}, torsion)

    @staticmethod
    def one(rank, torsion=()):
        n = rank + len(torsion)
        return TorusRingElt(rank, {(0,) * n: 1}, torsion)

    @staticmethod
    def monomial(rank, exps, coeff=1, torsion=()):
        return TorusRingElt(rank, {tuple(exps): coeff}, torsion)

    @staticmethod
    def const(rank, value, torsion=()):
        n = rank + len(torsion)
        return TorusRingElt(rank, {(0,) * n: value}, torsion)

    # -- queries -----------------------------------------------------------

    def items(self):
        return self._c.items()

    def coeff(self, key):
        return self._c.get(self._norm(key), 0)

    def is_zero(self):
        return not self._c

    def at_one(self):
        """Forget equivariance: rank of the virtual representation."""
        return sum(self._c.values())

    def _compat(self, other):
        if self.rank != other.rank or self.torsion != other.torsion:
            raise ValueError("operands live in different character rings")

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        self._compat(other)
        c = dict(self._c)
        for k, a in other._c.items():
            c[k] = c.get(k, 0) + a
            if not c[k]:
                del c[k]
        out = TorusRingElt.__new__(TorusRingElt)
        out.rank, out.torsion, out._c = self.rank, self.torsion, c
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = TorusRingElt.__new__(TorusRingElt)
        out.rank, out.torsion = self.rank, self.torsion
        out._c = {k: -a for k, a in self._c.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            other = TorusRingElt.const(self.rank, other, self.torsion)
        self._compat(other)
        c = {}
        for k1, a1 in self._c.items():
            for k2, a2 in other._c.items():
                k = self._norm(tuple(x + y for x, y in zip(k1, k2)))
                c[k] = c.get(k, 0) + a1 * a2
        out = TorusRingElt.__new__(TorusRingElt)
        out.rank, out.torsion = self.rank, self.torsion
        out._c = {k: a for k, a in c.items() if a}
        return out

    __rmul__ = __mul__

    def inv(self):
        """Dual character: negate every exponent (inverse on monomials)."""
        out = TorusRingElt.__new__(TorusRingElt)
        out.rank, out.torsion = self.rank, self.torsion
        out._c = {self._norm(tuple(-x for x in k)): a for k, a in self._c.items()}
        return out

    def exact_divide(self, b):
        """Checked division by b, which must be supported on the free part.

        Works monomial-class by monomial-class over the torsion grading and
        runs a lex-ordered division on the free part; raises InexactDivision
        on any nonzero remainder.
        """
        self._compat(b)
        if b.is_zero():
            raise ZeroDivisionError("division by zero")
        if self.is_zero():
            return TorusRingElt.zero(self.rank, self.torsion)
        r = self.rank
        for k in b._c:
            if any(k[r:]):
                raise ValueError("divisor must be supported on the torus part")
        bfree = {k[:r]: a for k, a in b._c.items()}
        # per-coordinate shift making both operands honest polynomials
        bmin = [min(k[i] for k in bfree) for i in range(r)]
        bpoly = {tuple(k[i] - bmin[i] for i in range(r)): a for k, a in bfree.items()}
        blead = max(bpoly)
        out = {}
        classes = {}
        for k, a in self._c.items():
            classes.setdefault(k[r:], {})[k[:r]] = a
        for tor, num in classes.items():
            nmin = [min(k[i] for k in num) for i in range(r)] if r else []
            npoly = {tuple(k[i] - nmin[i] for i in range(r)): a for k, a in num.items()}
            q = {}
            rem = dict(npoly)
            while rem:
                lead = max(rem)
                if any(lead[i] < blead[i] for i in range(r)):
                    raise InexactDivision("inexact division")
                if rem[lead] % bpoly[blead]:
                    raise InexactDivision("inexact division")
                qk = tuple(lead[i] - blead[i] for i in range(r))
                qc = rem[lead] // bpoly[blead]
                q[qk] = qc
                for bk, ba in bpoly.items():
                    k = tuple(qk[i] + bk[i] for i in range(r))
                    rem[k] = rem.get(k, 0) - qc * ba
                    if not rem[k]:
                        del rem[k]
            for qk, qc in q.items():
                key = tuple(qk[i] + nmin[i] - bmin[i] for i in range(r)) + tor
                out[key] = out.get(key, 0) + qc
        return TorusRingElt(self.rank, out, self.torsion)

    # -- comparisons / hashing ----------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, TorusRingElt)
            and self.rank == other.rank
            and self.torsion == other.torsion
            and self._c == other._c
        )

    def __hash__(self):
        return hash((self.rank, self.torsion, tuple(sorted(self._c.items()))))

    def __repr__(self):
        if not self._c:
            return "0"
        bits = []
        for k in sorted(self._c):
            a = self._c[k]
            if any(k):
                mono = "*".join(
                    f"z{i}^{e}" for i, e in enumerate(k) if e
                )
                bits.append(f"{a}*{mono}" if a != 1 else mono)
            else:
                bits.append(str(a))
        return " + ".join(bits).replace("+ -", "- ")

    # -- serialization -------------------------------------------------------

    def to_json(self):
        """List of {"exp": [...], "c": "int"} entries, sorted lexicographically."""
        return [{"exp": list(k), "c": str(self._c[k])} for k in sorted(self._c)]

    @staticmethod
    def from_json(rank, entries, torsion=()):
        return TorusRingElt(
            rank, {tuple(e["exp"]): int(e["c"]) for e in entries}, torsion
        )


# ---------------------------------------------------------------------------
# Cyclotomic numbers


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n):
    """Coefficient tuple (ascending) of the n-th cyclotomic polynomial.

    Computed by exact division of x^n - 1 by the product of all lower
    cyclotomic factors.

    >>> cyclotomic_polynomial(3)
    (1, 1, 1)
    >>> cyclotomic_polynomial(4)
    (1, 0, 1)
    """
    if n == 1:
        return (-1, 1)
    num = [0] * (n + 1)
    num[0], num[n] = -1, 1
    den = [1]
    for d in range(1, n):
        if n % d == 0:
            den = _poly_mul(den, list(cyclotomic_polynomial(d)))
    quot, rem = _poly_divmod(num, den)
    assert not any(rem), "cyclotomic factorization failed"
    assert all(c.denominator == 1 for c in quot)
    return tuple(int(c) for c in quot)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divmod(a, b):
    """Division with remainder in Q[x]; coefficient lists, ascending."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    while len(b) > 1 and not b[-1]:
        b = b[:-1]
    db = len(b) - 1
    q = [Fraction(0)] * max(1, len(a) - db)
    da = len(a) - 1
    while da >= 0 and not a[da]:
        da -= 1
    while da >= db:
        c = a[da] / b[db]
        q[da - db] = c
        for i in range(db + 1):
            a[da - db + i] -= c * b[i]
        while da >= 0 and not a[da]:
            da -= 1
    return q, a


class CyclotomicValue:
    """Element of Q(zeta_n) for a fixed conductor n.

    The coefficient vector has length n; it is kept reduced modulo the n-th
    cyclotomic polynomial, so equality is coefficient-wise.  Mixed-conductor
    arithmetic promotes both operands to the lcm.

    >>> w = CyclotomicValue.root_of_unity(3)
    >>> w + w * w == CyclotomicValue.from_int(-1, 3)
    True
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor, coeffs):
        n = int(conductor)
        if n < 1:
            raise ValueError("conductor must be positive")
        vec = [Fraction(c) for c in coeffs]
        if len(vec) > n:
            raise ValueError("coefficient vector longer than the conductor")
        vec += [Fraction(0)] * (n - len(vec))
        self.conductor = n
        self.coeffs = tuple(self._reduce(vec, n))

    @staticmethod
    def _reduce(vec, n):
        phi = cyclotomic_polynomial(n)
        d = len(phi) - 1
        vec = list(vec)
        for i in range(len(vec) - 1, d - 1, -1):
            c = vec[i]
            if c:
                vec[i] = Fraction(0)
                for j in range(d):
                    vec[i - d + j] -= c * phi[j]
        return vec[:n]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_int(k, conductor=1):
        return CyclotomicValue(conductor, [Fraction(k)])

    @staticmethod
    def from_fraction(q, conductor=1):
        return CyclotomicValue(conductor, [Fraction(q)])

    @staticmethod
    def root_of_unity(n, k=1):
        """zeta_n^k."""
        vec = [Fraction(0)] * n
        vec[k % n] = Fraction(1)
        return CyclotomicValue(n, vec)

    # -- structure -----------------------------------------------------------

    def promote(self, n):
        """Re-express in Q(zeta_n); requires conductor | n."""
        if n == self.conductor:
            return self
        if n % self.conductor:
            raise ValueError("can only promote to a multiple of the conductor")
        step = n // self.conductor
        vec = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            vec[i * step] += c
        return CyclotomicValue(n, vec)

    def _pair(self, other):
        if not isinstance(other, CyclotomicValue):
            other = CyclotomicValue.from_fraction(other)
        n = _lcm(self.conductor, other.conductor)
        return self.promote(n), other.promote(n)

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def as_fraction(self):
        if not self.is_rational():
            raise ValueError("value is not rational")
        return self.coeffs[0]

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        a, b = self._pair(other)
        return CyclotomicValue(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicValue(self.conductor, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, CyclotomicValue) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        n = a.conductor
        vec = [Fraction(0)] * (2 * n)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        vec[i + j] += x * y
        return CyclotomicValue(n, CyclotomicValue._reduce(vec, n))

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse; raises on zero (the only non-unit)."""
        if self.is_zero():
            raise SingularEvaluationPoint("singular evaluation point")
        n = self.conductor
        phi = [Fraction(c) for c in cyclotomic_polynomial(n)]
        d = len(phi) - 1
        a = list(self.coeffs[:d])
        # extended Euclid for gcd(a, phi) in Q[x]
        r0, r1 = phi, a
        s0, s1 = [Fraction(0)], [Fraction(1)]
        t0, t1 = [Fraction(1)], [Fraction(0)]
        while any(r1):
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul_q(q, s1))
            t0, t1 = t1, _poly_sub(t0, _poly_mul_q(q, t1))
        deg = max((i for i, c in enumerate(r0) if c), default=0)
        if deg != 0:
            raise SingularEvaluationPoint("singular evaluation point")
        c = r0[0]
        inv = [x / c for x in s0]
        return CyclotomicValue(n, CyclotomicValue._reduce(inv + [Fraction(0)], n))

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = CyclotomicValue.from_int(1, self.conductor)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparisons / hashing ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicValue.from_fraction(other)
        if not isinstance(other, CyclotomicValue):
            return NotImplemented
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    # equality is modulo conductor promotion, so there is no cheap canonical
    # hash; use exact comparison instead of hashing
    __hash__ = None

    def __repr__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        bits = []
        for i, c in enumerate(self.coeffs):
            if c:
                bits.append(f"{c}" if i == 0 else f"{c}*z{self.conductor}^{i}")
        return " + ".join(bits).replace("+ -", "- ")


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _poly_mul_q(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1 or 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _lcm(a, b):
    from math import gcd

    return a * b // gcd(a, b)


def tr_evaluate(x: TorusRingElt, point) -> CyclotomicValue:
    """Specialize a character-ring element at a semisimple point.

    ``point`` supplies one invertible CyclotomicValue per coordinate (free
    coordinates first, then torsion ones).  The map sends the character with
    exponent vector lam to the product of point coordinates raised to the
    entries of lam, extended additively.
    """
    n = x.rank + len(x.torsion)
    if len(point) != n:
        raise ValueError("evaluation point length does not match the rank")
    for p in point:
        if p.is_zero():
            raise SingularEvaluationPoint("singular evaluation point")
    for j, order in enumerate(x.torsion):
        if point[x.rank + j] ** order != CyclotomicValue.from_int(1):
            raise ValueError("torsion coordinate is not a root of unity of its order")
    total = CyclotomicValue.from_int(0)
    for key, c in x.items():
        term = CyclotomicValue.from_int(c)
        for p, e in zip(point, key):
            if e:
                term = term * (p ** e)
        total = total + term
    return total
