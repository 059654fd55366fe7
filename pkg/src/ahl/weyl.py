"""Extended affine Weyl groups of the registered rank-1 and rank-2 data.

An element is a pair (translation, finite part) with the semidirect-product
law (lam, u)(mu, w) = (lam + u.mu, uw).  Length is the Iwahori-Matsumoto
formula, descents and Bruhat order are computed from it, and balls are
enumerated breadth-first from the length-zero subgroup.

Registered data:

=========  =====================  ==========================  ==========
label      lattice                fundamental group           finite part
=========  =====================  ==========================  ==========
A1~        coroot lattice (SL2)   trivial                     S2
A1~ext     coweight lattice       Z/2                         S2
A2~        coroot lattice (SL3)   trivial                     S3
A2~ext     coweight lattice       Z/3                         S3
=========  =====================  ==========================  ==========
"""

from __future__ import annotations

import itertools
from functools import lru_cache


class DatumMismatch(ValueError):
    """Operands belong to different root data."""


def _mat_vec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _identity(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


class AffineRootDatum:
    """Immutable root datum powering one extended affine Weyl group.

    The finite Weyl group is enumerated once, with multiplication, inversion
    and root-action tables; the length-zero subgroup is found by scanning a
    small translation box, and its permutation action on the affine simple
    reflections is verified at construction time.
    """

    def __init__(self, label, cartan, pairing, simple_coroots, highest_root_word):
        self.label = label
        self.rank = len(cartan)
        self.cartan = cartan
        # pairing[i][j] = <lattice basis e_i, simple root alpha_j>
        self.pairing = pairing
        self.simple_coroots = tuple(tuple(v) for v in simple_coroots)

        # positive roots in simple-root coordinates (types A1, A2 only)
        if self.rank == 1:
            self.positive_roots = ((1,),)
        else:
            self.positive_roots = ((1, 0), (0, 1), (1, 1))
        self.num_positive_roots = len(self.positive_roots)

        self._build_finite_group()

        # affine simple reflections: s_0 = t_{theta^vee} s_theta, then s_1..s_r
        theta_vee = tuple(
            sum(self.simple_coroots[i][k] for i in range(self.rank))
            for k in range(self.rank)
        )
        s_theta = self.wf_identity
        for i in highest_root_word:
            s_theta = self.wf_mult[s_theta][self._wf_gen[i]]
        zero = (0,) * self.rank
        self.simple_reflections = (WeylElt(self, theta_vee, s_theta),) + tuple(
            WeylElt(self, zero, self._wf_gen[i]) for i in range(self.rank)
        )
        self.identity = WeylElt(self, zero, self.wf_identity)

        self._build_omega()

    # -- finite Weyl group ---------------------------------------------------

    def _build_finite_group(self):
        r = self.rank
        # reflection matrices on the lattice: s_i(lam) = lam - <lam, a_i> a_i^vee
        gens_lattice = []
        for i in range(r):
            cols = []
            for k in range(r):
                e = [0] * r
                e[k] = 1
                img = tuple(
                    e[j] - self.pairing[k][i] * self.simple_coroots[i][j]
                    for j in range(r)
                )
                cols.append(img)
            gens_lattice.append(tuple(zip(*cols)))
        # reflection matrices on the root lattice: s_i(a_j) = a_j - c_{ij} a_i
        gens_roots = []
        for i in range(r):
            cols = []
            for k in range(r):
                e = [0] * r
                e[k] = 1
                img = tuple(e[j] - self.cartan[i][k] * (1 if j == i else 0) for j in range(r))
                cols.append(img)
            gens_roots.append(tuple(zip(*cols)))

        ident = _identity(r)
        elems = [ident]
        index = {ident: 0}
        root_mats = [ident]
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for i in range(r):
                    m = _mat_mul(elems[u], gens_lattice[i])
                    if m not in index:
                        index[m] = len(elems)
                        elems.append(m)
                        root_mats.append(_mat_mul(root_mats[u], gens_roots[i]))
                        nxt.append(index[m])
            frontier = nxt
        n = len(elems)
        self.wf_size = n
        self.wf_identity = 0
        self.wf_lattice_matrix = tuple(elems)
        self.wf_root_matrix = tuple(root_mats)
        self._wf_gen = tuple(index[_mat_mul(ident, gens_lattice[i])] for i in range(r))
        mult = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                mult[a][b] = index[_mat_mul(elems[a], elems[b])]
        self.wf_mult = tuple(tuple(row) for row in mult)
        inv = [0] * n
        for a in range(n):
            for b in range(n):
                if self.wf_mult[a][b] == 0:
                    inv[a] = b
        self.wf_inv = tuple(inv)

    def root_image(self, u, root):
        """u(root) in simple-root coordinates."""
        return _mat_vec(self.wf_root_matrix[u], root)

    def pair(self, lam, root):
        """<lam, root> for lam in lattice coordinates, root in root coordinates."""
        return sum(
            lam[i] * self.pairing[i][j] * root[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )

    # -- fundamental group ---------------------------------------------------

    def _build_omega(self):
        found = []
        box = range(-2, 3)
        for u in range(self.wf_size):
            for lam in itertools.product(box, repeat=self.rank):
                w = WeylElt(self, lam, u)
                if w_length(w) == 0:
                    found.append(w)
        found.sort(key=lambda w: (w.u, w.lam))
        ident = self.identity
        omega = [ident] + [w for w in found if w != ident]
        # closure and index action sanity checks
        perms = []
        for om in omega:
            om_inv = om.inverse()
            perm = []
            for s in self.simple_reflections:
                t = w_multiply(w_multiply(om, s), om_inv)
                perm.append(self.simple_reflections.index(t))
            perms.append(tuple(perm))
        for a in omega:
            for b in omega:
                assert w_length(w_multiply(a, b)) == 0, "length-zero set is not closed"
        self.omega = tuple(omega)
        self.omega_index_action = tuple(perms)

    def omega_index(self, w):
        for k, om in enumerate(self.omega):
            if om == w:
                return k
        raise ValueError("element has positive length, not in the fundamental group")

    def __repr__(self):
        return f"AffineRootDatum({self.label})"


class WeylElt:
    """Element t_lam * u of an extended affine Weyl group."""

    __slots__ = ("datum", "lam", "u")

    def __init__(self, datum, lam, u):
        self.datum = datum
        self.lam = tuple(lam)
        self.u = u

    def __eq__(self, other):
        return (
            isinstance(other, WeylElt)
            and self.datum.label == other.datum.label
            and self.lam == other.lam
            and self.u == other.u
        )

    def __hash__(self):
        return hash((self.datum.label, self.lam, self.u))

    def inverse(self):
        d = self.datum
        uinv = d.wf_inv[self.u]
        lam = _mat_vec(d.wf_lattice_matrix[uinv], self.lam)
        return WeylElt(d, tuple(-x for x in lam), uinv)

    def sort_key(self):
        return (w_length(self), self.u, self.lam)

    def __mul__(self, other):
        return w_multiply(self, other)

    def __repr__(self):
        word, om = reduced_word(self)
        bits = [f"s{i}" for i in word]
        if om:
            bits.append(f"om{om}")
        return "".join(bits) if bits else "e"


def root_datum(label) -> AffineRootDatum:
    """Look up one of the registered root data by label."""
    try:
        return _DATA[label]
    except KeyError:
        raise ValueError(
            f"unknown root datum {label!r}; registered: {sorted(_DATA)}"
        ) from None


def _build_registry():
    data = {}
    # SL2: lattice = coroot lattice Z alpha^vee, <alpha^vee, alpha> = 2
    data["A1~"] = AffineRootDatum(
        "A1~", cartan=((2,),), pairing=((2,),), simple_coroots=((1,),),
        highest_root_word=(0,),
    )
    # PGL2: lattice = coweight lattice Z w, <w, alpha> = 1, alpha^vee = 2w
    data["A1~ext"] = AffineRootDatum(
        "A1~ext", cartan=((2,),), pairing=((1,),), simple_coroots=((2,),),
        highest_root_word=(0,),
    )
    a2 = ((2, -1), (-1, 2))
    # SL3: lattice basis = simple coroots
    data["A2~"] = AffineRootDatum(
        "A2~", cartan=a2, pairing=a2, simple_coroots=((1, 0), (0, 1)),
        highest_root_word=(0, 1, 0),
    )
    # PGL3: lattice basis = fundamental coweights
    data["A2~ext"] = AffineRootDatum(
        "A2~ext", cartan=a2, pairing=((1, 0), (0, 1)),
        simple_coroots=((2, -1), (-1, 2)), highest_root_word=(0, 1, 0),
    )
    return data


def w_multiply(x: WeylElt, y: WeylElt) -> WeylElt:
    """Group law (lam, u)(mu, w) = (lam + u.mu, uw)."""
    if x.datum.label != y.datum.label:
        raise DatumMismatch("elements of different root data")
    d = x.datum
    mu = _mat_vec(d.wf_lattice_matrix[x.u], y.lam)
    return WeylElt(d, tuple(a + b for a, b in zip(x.lam, mu)), d.wf_mult[x.u][y.u])


@lru_cache(maxsize=None)
def w_length(x: WeylElt) -> int:
    """Iwahori-Matsumoto length of t_lam u.

    ell = sum over positive roots a with u^-1(a) > 0 of |<lam, a>|
        + sum over positive roots a with u^-1(a) < 0 of |<lam, a> - 1|.
    """
    d = x.datum
    uinv = d.wf_inv[x.u]
    total = 0
    for a in d.positive_roots:
        img = d.root_image(uinv, a)
        pos = all(c >= 0 for c in img)
        pairing = d.pair(x.lam, a)
        total += abs(pairing) if pos else abs(pairing - 1)
    return total


def w_descents(x: WeylElt, side="left"):
    """Set of indices i with ell(s_i x) < ell(x) (or x s_i on the right)."""
    d = x.datum
    n = w_length(x)
    out = set()
    for i, s in enumerate(d.simple_reflections):
        y = w_multiply(s, x) if side == "left" else w_multiply(x, s)
        if w_length(y) < n:
            out.add(i)
    return out


@lru_cache(maxsize=None)
def _bruhat(x: WeylElt, y: WeylElt) -> bool:
    if x == y:
        return True
    lx, ly = w_length(x), w_length(y)
    if lx >= ly:
        return False
    if ly == 0:
        return False
    d = x.datum
    i = min(w_descents(y, "left"))
    s = d.simple_reflections[i]
    sy = w_multiply(s, y)
    sx = w_multiply(s, x)
    if w_length(sx) < lx:
        return _bruhat(sx, sy)
    return _bruhat(x, sy)


def w_bruhat_leq(x: WeylElt, y: WeylElt) -> bool:
    """Strong Bruhat order.

    Elements whose length-zero parts differ are incomparable; within a coset
    the standard descent recursion applies.
    """
    if x.datum.label != y.datum.label:
        raise DatumMismatch("elements of different root data")
    return _bruhat(x, y)


def w_ball(datum: AffineRootDatum, radius: int):
    """All elements of length <= radius, sorted by (length, normal form).

    Closed under inverses, since length is inverse-invariant.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    seen = set(datum.omega)
    frontier = list(datum.omega)
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for s in datum.simple_reflections:
                y = w_multiply(w, s)
                if y not in seen and w_length(y) == w_length(w) + 1:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen, key=WeylElt.sort_key)


def reduced_word(x: WeylElt):
    """(word, omega_index) with x = s_{word[0]} ... s_{word[-1]} * omega."""
    d = x.datum
    word = []
    w = x
    while w_length(w) > 0:
        i = min(w_descents(w, "left"))
        word.append(i)
        w = w_multiply(d.simple_reflections[i], w)
    return word, d.omega_index(w)


def coset_split(x: WeylElt):
    """(omega_index, coxeter part y) with x = omega * y and ell(y) = ell(x)."""
    d = x.datum
    word, om = reduced_word(x)
    om_elt = d.omega[om]
    y = w_multiply(om_elt.inverse(), x)
    return om, y


def from_word(datum, word, omega_index=0):
    w = datum.identity
    for i in word:
        w = w_multiply(w, datum.simple_reflections[i])
    return w_multiply(w, datum.omega[omega_index])


def elt_to_json(x: WeylElt):
    word, om = reduced_word(x)
    return {"word": word, "omega": om}


def elt_from_json(datum, obj):
    word = [int(i) for i in obj["word"]]
    w = from_word(datum, word, int(obj.get("omega", 0)))
    if w_length(w) != len(word):
        raise ValueError("encoded word is not reduced")
    return w


_DATA = _build_registry()
