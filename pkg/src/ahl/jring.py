"""The asymptotic based ring J and its interplay with the Hecke algebra.

J has a basis {t_w} indexed by the group, with integer structure constants
gamma_{x,y,z} extracted from the canonical-basis structure constants as the
coefficient of v^{-a(z)} in h_{x,y,z^{-1}}; the product is

    t_x t_y = sum_z gamma_{x,y,z} t_{z^{-1}}.

One type covers both J and J tensored with Z[v,v^-1]: plain-J values are the
integer-coefficient subcase.  The ring homomorphism into the extended ring
sends C_w to sum over distinguished involutions d and elements z with
a(z) = a(d) of h_{w,d,z} t_z; the additive relabeling psi sends C_w to t_w.

Every operation consumes a KLTable and a certified two-sided CellPartition
and refuses to produce values whose exactness the truncation cannot certify.
"""

from __future__ import annotations

from .cells import (
    CellPartition,
    CertificationError,
    a_value,
    cells_compute,
    distinguished_involutions,
)
from .hecke import HeckeElt, KLTable, h_constants, ht_c
from .ring import LaurentPoly
from .weyl import WeylElt, elt_to_json, w_ball, w_length, w_multiply


class UncertifiedGamma(CertificationError):
    """A structure constant depends on an uncertified a-value or product."""


class JElt:
    """Finite combination of t_w with Laurent-polynomial coefficients."""

    __slots__ = ("datum", "terms")

    def __init__(self, datum, terms=None):
        self.datum = datum
        t = {}
        if terms:
            for w, c in terms.items():
                if not c.is_zero():
                    t[w] = c
        self.terms = t

    @staticmethod
    def basis_elt(datum, w, coeff=None):
        return JElt(datum, {w: coeff if coeff is not None else LaurentPoly.one()})

    @staticmethod
    def zero(datum):
        return JElt(datum)

    def is_zero(self):
        return not self.terms

    def coeff(self, w):
        return self.terms.get(w, LaurentPoly.zero())

    def support(self):
        return set(self.terms)

    def is_integral(self):
        return all(c.is_constant() for c in self.terms.values())

    def __add__(self, other):
        t = dict(self.terms)
        for w, c in other.terms.items():
            s = t.get(w, LaurentPoly.zero()) + c
            if s.is_zero():
                t.pop(w, None)
            else:
                t[w] = s
        return JElt(self.datum, t)

    def __sub__(self, other):
        return self + other.scale(LaurentPoly.monomial(0, -1))

    def scale(self, c):
        return JElt(self.datum, {w: c * a for w, a in self.terms.items()})

    def __eq__(self, other):
        return (
            isinstance(other, JElt)
            and self.datum.label == other.datum.label
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for w in sorted(self.terms, key=WeylElt.sort_key):
            bits.append(f"({self.terms[w]})*t[{w}]")
        return " + ".join(bits)

    def to_json(self):
        return [
            {"t": elt_to_json(w), "coeff": self.terms[w].to_json()}
            for w in sorted(self.terms, key=WeylElt.sort_key)
        ]


def _certified_a(z, partition, table):
    value, cert = a_value(z, partition, table)
    if cert == "lower-bound":
        raise UncertifiedGamma(f"uncertified a-value at {z}")
    return value


def gamma(x: WeylElt, y: WeylElt, z: WeylElt, table: KLTable, partition: CellPartition) -> int:
    """Structure constant: coefficient of v^{-a(z)} in h_{x,y,z^{-1}}."""
    h = h_constants(x, y, table)
    az = _certified_a(z, partition, table)
    poly = h.get(z.inverse())
    if poly is None:
        return 0
    return poly.coeff(-az)


def j_multiply(a: JElt, b: JElt, table: KLTable, partition: CellPartition) -> JElt:
    """Bilinear extension of t_x t_y = sum_z gamma_{x,y,z} t_{z^{-1}}.

    Equivalently the t_w-coefficient of t_x t_y is the v^{-a(w)} coefficient
    of h_{x,y,w}; every a-value in the support must be certified.
    """
    out = JElt.zero(a.datum)
    for x, cx in a.terms.items():
        for y, cy in b.terms.items():
            h = h_constants(x, y, table)
            terms = {}
            for w, poly in h.items():
                aw = _certified_a(w, partition, table)
                g = poly.coeff(-aw)
                if g:
                    terms[w] = cx * cy * LaurentPoly.monomial(0, g)
            out = out + JElt(a.datum, terms)
    return out


def unit_of_cell(cell_id, partition: CellPartition, table: KLTable) -> JElt:
    """Sum of t_d over distinguished involutions d in the cell."""
    dist = distinguished_involutions(partition, table)
    members = partition.members(cell_id)
    terms = {d: LaurentPoly.one() for d in sorted(dist & members, key=WeylElt.sort_key)}
    if not terms:
        raise CertificationError("cell contains no certified distinguished involution")
    return JElt(partition.datum, terms)


def psi(a: HeckeElt) -> JElt:
    """Additive relabeling C_w -> t_w."""
    if a.basis != "C":
        raise ValueError("psi expects a canonical-basis element")
    return JElt(a.datum, dict(a.terms))


def psi_inv(a: JElt) -> HeckeElt:
    """Inverse relabeling t_w -> C_w."""
    return HeckeElt(a.datum, "C", dict(a.terms))


def psi_cell(a: HeckeElt, cell_id, partition: CellPartition) -> JElt:
    """Project onto one cell, then relabel."""
    return psi(ht_c(a, cell_id, partition))


def phi(w: WeylElt, table: KLTable, partition: CellPartition) -> JElt:
    """Image of C_w in the extended asymptotic ring.

    phi(C_w) = sum over distinguished d and z with a(z) = a(d) of
    h_{w,d,z} t_z.  The result is certified complete when the partition ball
    provably contains every distinguished involution: a(d) >= ell(d) forces
    ell(d) <= max Springer-fiber dimension of the datum, so a ball of that
    radius with certified a-values suffices.
    """
    datum = partition.datum
    a_max = datum.num_positive_roots
    if partition.radius < a_max:
        raise CertificationError(
            "partition ball too small to contain all distinguished involutions"
        )
    if w_length(w) + a_max > partition.radius:
        raise CertificationError(
            "support of the image may exit the certified partition ball"
        )
    dist = distinguished_involutions(partition, table)
    out = JElt.zero(datum)
    for d in sorted(dist, key=WeylElt.sort_key):
        ad = _certified_a(d, partition, table)
        h = h_constants(w, d, table)
        terms = {}
        for z, poly in h.items():
            if _certified_a(z, partition, table) == ad:
                terms[z] = poly
        out = out + JElt(datum, terms)
    return out


def phi_cell(w: WeylElt, cell_id, table: KLTable, partition: CellPartition) -> JElt:
    """Component of phi(C_w) in one cell."""
    full = phi(w, table, partition)
    keep = {z: c for z, c in full.terms.items() if partition.cell_id_of(z) == cell_id}
    return JElt(partition.datum, keep)


def h_action(x: WeylElt, a: JElt, cell_id, table: KLTable, partition: CellPartition) -> JElt:
    """Module action C_x . t_y = psi_c(ht_c(C_x C_y)) on one cell component."""
    datum = partition.datum
    out = JElt.zero(datum)
    for y, cy in a.terms.items():
        if partition.cell_id_of(y) != cell_id:
            raise ValueError("module element is not supported on the given cell")
        h = h_constants(x, y, table)
        terms = {}
        for z, poly in h.items():
            if partition.cell_id_of(z) == cell_id:
                terms[z] = cy * poly
        out = out + JElt(datum, terms)
    return out


# ---------------------------------------------------------------------------
# Bundled context and identity verification


class JContext:
    """KL table, certified two-sided partition and distinguished involutions
    for one datum, sized so that radius-bounded identity scans are certified.

    The table is built two layers beyond the advertised radius, which is what
    partition certification by ball stability consumes.
    """

    def __init__(self, datum, radius, side="LR"):
        self.datum = datum
        self.radius = radius
        self.table = KLTable(datum, radius + 2)
        self.partition = cells_compute(datum, radius, side, self.table)
        self._dist = None

    @property
    def distinguished(self):
        if self._dist is None:
            self._dist = distinguished_involutions(self.partition, self.table)
        return self._dist

    @property
    def a_max(self):
        return self.datum.num_positive_roots

    def ball(self, length=None):
        return w_ball(self.datum, self.radius if length is None else length)

    def cell_of(self, w):
        return self.partition.cell_id_of(w)

    def c_elt(self, w):
        return HeckeElt.basis_elt(self.datum, w, "C")

    def t_elt(self, w):
        return JElt.basis_elt(self.datum, w)

    def certified_gamma_radius(self):
        """Largest r such that every gamma with arguments in the r-ball is
        certified: products need 2r within the table, supports need certified
        a-values on the 2r-ball."""
        r = min(self.table.radius // 2, self.partition.radius // 2)
        while r >= 0:
            try:
                for z in w_ball(self.datum, 2 * r):
                    _certified_a(z, self.partition, self.table)
                return r
            except (CertificationError, KeyError):
                r -= 1
        return 0


def _c_product_in_c(ctx, x, y):
    """C_x C_y as a canonical-basis element (exact, certified)."""
    return HeckeElt(ctx.datum, "C", h_constants(x, y, ctx.table))


def verify_identity(name, inputs, ctx: JContext):
    """Evaluate one registered identity on one input tuple.

    Returns {"identity", "inputs", "pass", "lhs", "rhs"}; raises a
    CertificationError subclass when the tuple is not certified.
    """
    datum = ctx.datum
    table, partition = ctx.table, ctx.partition
    if name == "ssylka":
        x1, x2, x3 = inputs
        c = ctx.cell_of(x2)
        if ctx.cell_of(x3) != c:
            raise ValueError("x2 and x3 must lie in one two-sided cell")
        lhs = j_multiply(
            psi_cell(_c_product_in_c(ctx, x1, x2), c, partition),
            ctx.t_elt(x3),
            table,
            partition,
        )
        inner = j_multiply(ctx.t_elt(x2), ctx.t_elt(x3), table, partition)
        back = psi_inv(inner)
        total = JElt.zero(datum)
        for w, coeff in back.terms.items():
            prod = _c_product_in_c(ctx, x1, w)
            total = total + psi_cell(prod, c, partition).scale(coeff)
        rhs = total
    elif name == "phi_via_psi":
        (w,) = inputs
        # evaluate on every cell meeting the image
        full = phi(w, table, partition)
        lhs_by_cell = {}
        for z, coeff in full.terms.items():
            lhs_by_cell.setdefault(partition.cell_id_of(z), {})[z] = coeff
        ok = True
        for cid in range(len(partition.cells)):
            lhs = JElt(datum, lhs_by_cell.get(cid, {}))
            rhs = JElt.zero(datum)
            for d in sorted(ctx.distinguished & partition.members(cid), key=WeylElt.sort_key):
                rhs = rhs + psi_cell(_c_product_in_c(ctx, w, d), cid, partition)
            ok = ok and lhs == rhs
        return {
            "identity": name,
            "inputs": [str(w)],
            "pass": ok,
            "lhs": str(full),
            "rhs": "per-cell sums over distinguished involutions",
        }
    elif name == "our_goal":
        x, y = inputs
        c = ctx.cell_of(y)
        lhs = psi_cell(_c_product_in_c(ctx, x, y), c, partition)
        rhs = j_multiply(phi_cell(x, c, table, partition), ctx.t_elt(y), table, partition)
    elif name == "action_module":
        x1, x2, y = inputs
        c = ctx.cell_of(y)
        lhs = h_action(x1, h_action(x2, ctx.t_elt(y), c, table, partition), c, table, partition)
        rhs = JElt.zero(datum)
        for z, coeff in h_constants(x1, x2, table).items():
            rhs = rhs + h_action(z, ctx.t_elt(y), c, table, partition).scale(coeff)
    elif name == "j_assoc":
        x, y, z = inputs
        tx, ty, tz = ctx.t_elt(x), ctx.t_elt(y), ctx.t_elt(z)
        lhs = j_multiply(j_multiply(tx, ty, table, partition), tz, table, partition)
        rhs = j_multiply(tx, j_multiply(ty, tz, table, partition), table, partition)
    elif name == "unit_law":
        (y,) = inputs
        c = ctx.cell_of(y)
        one_c = unit_of_cell(c, partition, table)
        ty = ctx.t_elt(y)
        lhs = j_multiply(one_c, ty, table, partition)
        rhs = j_multiply(ty, one_c, table, partition)
        ok = lhs == ty == rhs
        return {
            "identity": name,
            "inputs": [str(y)],
            "pass": ok,
            "lhs": str(lhs),
            "rhs": str(rhs),
        }
    else:
        raise ValueError(f"unknown identity {name!r}")
    return {
        "identity": name,
        "inputs": [str(i) for i in inputs],
        "pass": lhs == rhs,
        "lhs": str(lhs),
        "rhs": str(rhs),
    }


def verify_suite_j(ctx: JContext):
    """Exhaustively check all registered identities on certified tuples.

    The certified ranges are derived from the context radius R: triple scans
    run over length sums <= R, homomorphism-style checks keep the image
    inside the certified partition ball.
    """
    R = ctx.radius
    a_max = ctx.a_max
    ball = ctx.ball()
    reports = []

    def lens(*ws):
        return sum(w_length(w) for w in ws)

    # (ssylka): x2, x3 in one cell, any x1
    checked, failed = 0, []
    for x2 in ball:
        for x3 in ball:
            try:
                c2, c3 = ctx.cell_of(x2), ctx.cell_of(x3)
            except CertificationError:
                continue
            if c2 != c3:
                continue
            for x1 in ball:
                if lens(x1, x2, x3) > R:
                    continue
                r = verify_identity("ssylka", (x1, x2, x3), ctx)
                checked += 1
                if not r["pass"]:
                    failed.append(r)
    reports.append({"identity": "ssylka", "checked": checked, "failed": failed})

    # (phi_via_psi)
    checked, failed = 0, []
    for w in ball:
        if w_length(w) + a_max > R:
            continue
        r = verify_identity("phi_via_psi", (w,), ctx)
        checked += 1
        if not r["pass"]:
            failed.append(r)
    reports.append({"identity": "phi_via_psi", "checked": checked, "failed": failed})

    # (our_goal)
    checked, failed = 0, []
    for x in ball:
        for y in ball:
            if w_length(x) + a_max + w_length(y) > R:
                continue
            r = verify_identity("our_goal", (x, y), ctx)
            checked += 1
            if not r["pass"]:
                failed.append(r)
    reports.append({"identity": "our_goal", "checked": checked, "failed": failed})

    # module axiom for the cell action
    checked, failed = 0, []
    for x1 in ball:
        for x2 in ball:
            for y in ball:
                if lens(x1, x2, y) > R:
                    continue
                r = verify_identity("action_module", (x1, x2, y), ctx)
                checked += 1
                if not r["pass"]:
                    failed.append(r)
    reports.append({"identity": "action_module", "checked": checked, "failed": failed})

    # associativity of J
    checked, failed = 0, []
    for x in ball:
        for y in ball:
            for z in ball:
                if lens(x, y, z) > R:
                    continue
                r = verify_identity("j_assoc", (x, y, z), ctx)
                checked += 1
                if not r["pass"]:
                    failed.append(r)
    reports.append({"identity": "j_assoc", "checked": checked, "failed": failed})

    # unit law
    checked, failed = 0, []
    for y in ball:
        if w_length(y) + a_max > R:
            continue
        r = verify_identity("unit_law", (y,), ctx)
        checked += 1
        if not r["pass"]:
            failed.append(r)
    reports.append({"identity": "unit_law", "checked": checked, "failed": failed})
    return reports


def gamma_table(ctx: JContext):
    """(certified radius r, sorted entry list) for the full gamma table on
    the r-ball."""
    r = ctx.certified_gamma_radius()
    ball = w_ball(ctx.datum, r)
    ball_set = set(ball)
    entries = []
    for x in ball:
        for y in ball:
            h = h_constants(x, y, ctx.table)
            for w, poly in h.items():
                aw = _certified_a(w, ctx.partition, ctx.table)
                g = poly.coeff(-aw)
                if g and w.inverse() in ball_set:
                    z = w.inverse()
                    entries.append((x, y, z, g))
    entries.sort(key=lambda t: (t[0].sort_key(), t[1].sort_key(), t[2].sort_key()))
    return r, [
        {"x": elt_to_json(x), "y": elt_to_json(y), "z": elt_to_json(z), "gamma": g}
        for x, y, z, g in entries
    ]
