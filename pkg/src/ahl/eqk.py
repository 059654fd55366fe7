"""Equivariant K-theory of the registered example geometries, computed
entirely by fixed-point localization.

A space is described by its torus-fixed points, the characters of the
invariant curves joining them, and per-point tangent characters; a K-class
is a tuple of character-ring values at the fixed points subject to the GKM
divisibility condition along edges.  Convolution, pushforward, attractor
splittings, specialization fibers and traces are all exact computations in
this model; no floating point and no sheaf machinery anywhere.

Registered spaces:

* ``sl2-regular`` -- a single point with equivariance mu_2 x C*; the
  convolution algebra is the group ring of mu_2 over Laurent polynomials.
* ``pgl2-lowest`` -- the projective line acted on by the adjoint torus, with
  the Weyl flip as component-group data and a registered order-2
  specialization point.
* ``sl3-subregular`` -- two projective lines glued transversally at a point,
  three fixed points, two edges; not smooth, so its K-group is carried in a
  registered decomposition basis with tabulated relations.
* ``p1-warmup`` -- the projective line with a contracting C*-action, used by
  the attractor-splitting machinery (two strata, nontrivial correspondence).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ring import (
    CyclotomicValue,
    InexactDivision,
    TorusRingElt,
    tr_evaluate,
)


class UnknownExample(ValueError):
    pass


class UnsupportedPoint(ValueError):
    """The semisimple point is not in the registered catalog."""


class NonGKMClass(ValueError):
    """A localization datum violates the GKM divisibility condition."""


@dataclass(frozen=True)
class SemisimplePoint:
    """A finite-order point of the equivariance group: one invertible
    cyclotomic value per coordinate (free torus first, then finite cyclic
    coordinates), plus an optional component-group element (a power of the
    registered generator)."""

    coords: tuple
    gamma: int = 0

    def __post_init__(self):
        for c in self.coords:
            if c.is_zero():
                raise ValueError("semisimple point has a non-invertible coordinate")


@dataclass(frozen=True)
class SpecPoint:
    """Registered local data at one semisimple class.

    ``finite`` marks classes whose fixed locus is the torus-fixed set; the
    identity-type classes keep the whole space.  ``r_char`` is the character
    of the component group of the centralizer on the registered local ring R
    of the fiber formula, as a map generator-power -> trace.
    """

    label: str
    coords: tuple
    finite: bool
    fixed_points: tuple
    gamma_order: int
    perm: dict
    r_char: dict
    r_desc: str


@dataclass
class GKMSpace:
    name: str
    torus_rank: int
    torsion: tuple
    points: tuple
    edges: tuple  # (p, q, character vector on the free part)
    tangent: dict  # point -> tuple of character vectors
    smooth: bool
    component_order: int
    component_perm: dict  # generator action on points
    component_char: tuple = ()  # generator action on free characters (matrix)
    spec_points: dict = field(default_factory=dict)
    attractor_order: tuple = ()  # strata, closed-first, labeled by fixed point
    repelling: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.component_char:
            self.component_char = tuple(
                tuple(int(i == j) for j in range(self.torus_rank))
                for i in range(self.torus_rank)
            )

    def act_char(self, x: TorusRingElt) -> TorusRingElt:
        """Component-group generator acting on a character-ring element."""
        r = self.torus_rank
        out = {}
        for k, a in x.items():
            free = tuple(
                sum(self.component_char[i][j] * k[j] for j in range(r))
                for i in range(r)
            )
            key = free + k[r:]
            out[key] = out.get(key, 0) + a
        return TorusRingElt(r, out, self.torsion)

    # -- character-ring helpers ---------------------------------------------

    def ring_one(self):
        return TorusRingElt.one(self.torus_rank, self.torsion)

    def ring_zero(self):
        return TorusRingElt.zero(self.torus_rank, self.torsion)

    def monomial(self, exps, coeff=1):
        e = tuple(exps) + (0,) * len(self.torsion)
        return TorusRingElt.monomial(self.torus_rank, e, coeff, self.torsion)

    def euler_factor(self, p):
        """Product over tangent characters chi at p of (1 - e^{-chi})."""
        out = self.ring_one()
        for chi in self.tangent[p]:
            out = out * (self.ring_one() - self.monomial(tuple(-c for c in chi)))
        return out

    def find_spec_point(self, s: SemisimplePoint) -> SpecPoint:
        n = self.torus_rank + len(self.torsion)
        if len(s.coords) != n:
            raise UnsupportedPoint(
                f"point has {len(s.coords)} coordinates, space wants {n}"
            )
        for sp in self.spec_points.values():
            if all(a == b for a, b in zip(sp.coords, s.coords)):
                return sp
        raise UnsupportedPoint(
            f"unsupported specialization point for {self.name!r} "
            "(only registered finite-order classes are supported)"
        )

    def spec_point_by_label(self, label) -> SpecPoint:
        try:
            return self.spec_points[label]
        except KeyError:
            raise UnsupportedPoint(f"no registered point {label!r}") from None


class EqKClass:
    """K-class on a registered space: one character-ring value per fixed
    point, GKM-divisible along every edge."""

    def __init__(self, space: GKMSpace, values, check=True):
        self.space = space
        self.values = {p: values.get(p, space.ring_zero()) for p in space.points}
        if check:
            self.check_gkm()

    def check_gkm(self):
        one = self.space.ring_one()
        for p, q, chi in self.space.edges:
            diff = self.values[p] - self.values[q]
            if diff.is_zero():
                continue
            try:
                diff.exact_divide(one - self.space.monomial(chi))
            except InexactDivision:
                raise NonGKMClass(
                    f"difference along edge ({p},{q}) is not divisible"
                ) from None

    def __add__(self, other):
        return EqKClass(
            self.space,
            {p: self.values[p] + other.values[p] for p in self.space.points},
            check=False,
        )

    def __sub__(self, other):
        return EqKClass(
            self.space,
            {p: self.values[p] - other.values[p] for p in self.space.points},
            check=False,
        )

    def scale(self, c: TorusRingElt):
        return EqKClass(
            self.space, {p: c * v for p, v in self.values.items()}, check=False
        )

    def tensor(self, other):
        return EqKClass(
            self.space,
            {p: self.values[p] * other.values[p] for p in self.space.points},
            check=False,
        )

    def __eq__(self, other):
        return (
            isinstance(other, EqKClass)
            and self.space.name == other.space.name
            and self.values == other.values
        )

    def __repr__(self):
        vals = ", ".join(f"{p}: {v}" for p, v in self.values.items())
        return f"EqKClass({self.space.name}; {vals})"


class ConvClass:
    """K-class on the self-product of a registered space; fixed points are
    ordered pairs and the GKM graph is the product graph."""

    def __init__(self, space: GKMSpace, values, check=True):
        self.space = space
        self.values = {
            (p, q): values.get((p, q), space.ring_zero())
            for p in space.points
            for q in space.points
        }
        if check:
            self.check_gkm()

    def check_gkm(self):
        one = self.space.ring_one()
        for p, q, chi in self.space.edges:
            factor = one - self.space.monomial(chi)
            for r in self.space.points:
                for a, b in (((p, r), (q, r)), ((r, p), (r, q))):
                    diff = self.values[a] - self.values[b]
                    if diff.is_zero():
                        continue
                    try:
                        diff.exact_divide(factor)
                    except InexactDivision:
                        raise NonGKMClass(
                            f"difference along product edge {a}-{b} is not divisible"
                        ) from None

    def __add__(self, other):
        return ConvClass(
            self.space,
            {k: self.values[k] + other.values[k] for k in self.values},
            check=False,
        )

    def __sub__(self, other):
        return ConvClass(
            self.space,
            {k: self.values[k] - other.values[k] for k in self.values},
            check=False,
        )

    def scale(self, c):
        return ConvClass(self.space, {k: c * v for k, v in self.values.items()}, check=False)

    def tensor(self, other):
        return ConvClass(
            self.space,
            {k: self.values[k] * other.values[k] for k in self.values},
            check=False,
        )

    def swap(self):
        """Pull back along the factor swap."""
        return ConvClass(
            self.space,
            {(p, q): self.values[(q, p)] for (p, q) in self.values},
            check=False,
        )

    def component_translate(self):
        """Pull back along the component-group generator (diagonal action on
        the two factors and on characters)."""
        space = self.space
        ginv = {v: k for k, v in space.component_perm.items()}
        return ConvClass(
            space,
            {
                (p, q): space.act_char(self.values[(ginv[p], ginv[q])])
                for (p, q) in self.values
            },
            check=False,
        )

    def is_component_invariant(self):
        return self.space.component_order == 1 or self.component_translate() == self

    def symmetrized(self):
        """Sum of the component-group translates: an invariant class."""
        total = self
        cur = self
        for _ in range(self.space.component_order - 1):
            cur = cur.component_translate()
            total = total + cur
        return total

    def __eq__(self, other):
        return (
            isinstance(other, ConvClass)
            and self.space.name == other.space.name
            and self.values == other.values
        )

    def __repr__(self):
        vals = ", ".join(f"{k}: {v}" for k, v in self.values.items() if not v.is_zero())
        return f"ConvClass({self.space.name}; {vals or '0'})"


# ---------------------------------------------------------------------------
# Registry


def _build_sl2_regular():
    # Springer fiber a point; equivariance mu_2 x C*: free coordinate v,
    # torsion coordinate the mu_2 character.
    one = CyclotomicValue.from_int(1)
    minus = CyclotomicValue.from_int(-1, 2)
    return GKMSpace(
        name="sl2-regular",
        torus_rank=1,
        torsion=(2,),
        points=("pt",),
        edges=(),
        tangent={"pt": ()},
        smooth=True,
        component_order=2,
        component_perm={"pt": "pt"},
        spec_points={
            "1": SpecPoint(
                label="1",
                coords=(one, one),
                finite=True,
                fixed_points=("pt",),
                gamma_order=2,
                perm={"pt": "pt"},
                r_char={0: 2, 1: 2},
                r_desc="group ring of the component group (fiber at v = 1)",
            ),
            "eps": SpecPoint(
                label="eps",
                coords=(one, minus),
                finite=True,
                fixed_points=("pt",),
                gamma_order=2,
                perm={"pt": "pt"},
                r_char={0: 2, 1: 2},
                r_desc="group ring of the component group (sign specialization)",
            ),
        },
    )


def _build_pgl2_lowest():
    one = CyclotomicValue.from_int(1)
    minus = CyclotomicValue.from_int(-1, 2)
    return GKMSpace(
        name="pgl2-lowest",
        torus_rank=1,
        torsion=(),
        points=("0", "inf"),
        edges=(("0", "inf", (1,)),),
        tangent={"0": ((1,),), "inf": ((-1,),)},
        smooth=True,
        component_order=2,
        component_perm={"0": "inf", "inf": "0"},
        component_char=((-1,),),
        spec_points={
            "1": SpecPoint(
                label="1",
                coords=(one,),
                finite=False,
                fixed_points=("0", "inf"),
                gamma_order=1,
                perm={"0": "0", "inf": "inf"},
                r_char={0: 1},
                r_desc="residue field (connected centralizer)",
            ),
            "-1": SpecPoint(
                label="-1",
                coords=(minus,),
                finite=True,
                fixed_points=("0", "inf"),
                gamma_order=2,
                perm={"0": "inf", "inf": "0"},
                r_char={0: 2, 1: 0},
                r_desc="C[e]/(e^2), component generator negates e",
            ),
        },
    )


def _build_p1_warmup():
    one = CyclotomicValue.from_int(1)
    return GKMSpace(
        name="p1-warmup",
        torus_rank=1,
        torsion=(),
        points=("0", "inf"),
        edges=(("0", "inf", (1,)),),
        tangent={"0": ((1,),), "inf": ((-1,),)},
        smooth=True,
        component_order=1,
        component_perm={"0": "0", "inf": "inf"},
        spec_points={
            "1": SpecPoint(
                label="1",
                coords=(one,),
                finite=False,
                fixed_points=("0", "inf"),
                gamma_order=1,
                perm={"0": "0", "inf": "inf"},
                r_char={0: 1},
                r_desc="residue field",
            ),
        },
        attractor_order=("inf", "0"),
        repelling={"0": (), "inf": ((-1,),)},
    )


def _build_sl3_subregular():
    one = CyclotomicValue.from_int(1)
    return GKMSpace(
        name="sl3-subregular",
        torus_rank=2,
        torsion=(),
        points=("p", "q1", "q2"),
        edges=(("p", "q1", (1, 2)), ("p", "q2", (-1, 2))),
        tangent={
            "q1": ((1, 2),),
            "q2": ((-1, 2),),
            "p": ((-1, -2), (1, -2)),
        },
        smooth=False,
        component_order=1,
        component_perm={"p": "p", "q1": "q1", "q2": "q2"},
        spec_points={
            "1": SpecPoint(
                label="1",
                coords=(one, one),
                finite=False,
                fixed_points=("p", "q1", "q2"),
                gamma_order=1,
                perm={"p": "p", "q1": "q1", "q2": "q2"},
                r_char={0: 1},
                r_desc="residue field (connected centralizer)",
            ),
        },
        attractor_order=("p", "q1", "q2"),
        repelling={"p": ((-1, -2), (1, -2)), "q1": (), "q2": ()},
    )


_SPACES = {}


def register_example(name) -> GKMSpace:
    """Return one of the registered example geometries."""
    if name not in _SPACES:
        builders = {
            "sl2-regular": _build_sl2_regular,
            "pgl2-lowest": _build_pgl2_lowest,
            "p1-warmup": _build_p1_warmup,
            "sl3-subregular": _build_sl3_subregular,
        }
        if name not in builders:
            raise UnknownExample(
                f"unknown example {name!r}; registered: {sorted(builders)}"
            )
        _SPACES[name] = builders[name]()
    return _SPACES[name]


# ---------------------------------------------------------------------------
# Standard classes on the projective-line spaces


def class_structure_sheaf(space) -> EqKClass:
    return EqKClass(space, {p: space.ring_one() for p in space.points})


def class_line_bundle(space, k) -> EqKClass:
    """O(k) on a projective-line space, linearized so the value at the
    attracting point is 1 and at the other point e^{-k alpha}."""
    if space.points != ("0", "inf"):
        raise UnknownExample("line-bundle classes are registered for P1 spaces only")
    return EqKClass(space, {"0": space.ring_one(), "inf": space.monomial((-k,))})


def class_skyscraper(space, p) -> EqKClass:
    """Skyscraper at a fixed point: Euler factor at p, zero elsewhere."""
    return EqKClass(space, {p: space.euler_factor(p)})


def class_balanced_line(space, k) -> EqKClass:
    """The component-invariant line-bundle class of degree 2k on a
    projective-line space (localization values e^{k alpha}, e^{-k alpha})."""
    if space.points != ("0", "inf"):
        raise UnknownExample("balanced line classes exist on P1 spaces only")
    return EqKClass(space, {"0": space.monomial((k,)), "inf": space.monomial((-k,))})


def conv_unit(space) -> ConvClass:
    """Diagonal class, the convolution unit: Euler factor on the diagonal."""
    return ConvClass(
        space, {(p, p): space.euler_factor(p) for p in space.points}
    )


def outer_product(a: EqKClass, b: EqKClass) -> ConvClass:
    return ConvClass(
        a.space,
        {
            (p, q): a.values[p] * b.values[q]
            for p in a.space.points
            for q in a.space.points
        },
        check=False,
    )


# ---------------------------------------------------------------------------
# Pushforward and convolution


def _pushforward(space, values, point_sets):
    """Sum over fixed points of value / Euler factor, by the common
    denominator trick; raises NonGKMClass when the division is inexact."""
    factors = {key: space.ring_one() for key in point_sets}
    for key in point_sets:
        for p in key if isinstance(key, tuple) else (key,):
            factors[key] = factors[key] * space.euler_factor(p)
    common = space.ring_one()
    for f in factors.values():
        common = common * f
    numer = space.ring_zero()
    for key in point_sets:
        rest = space.ring_one()
        for other in point_sets:
            if other != key:
                rest = rest * factors[other]
        numer = numer + values[key] * rest
    if numer.is_zero():
        return space.ring_zero()
    try:
        return numer.exact_divide(common)
    except InexactDivision:
        raise NonGKMClass("non-GKM class") from None


def pushforward_point(c) -> TorusRingElt:
    """Equivariant Euler characteristic of a class on a smooth proper space."""
    space = c.space
    if not space.smooth:
        raise ValueError(f"{space.name} is not smooth; pushforward is tabulated")
    if isinstance(c, ConvClass):
        keys = [(p, q) for p in space.points for q in space.points]
    else:
        keys = list(space.points)
    return _pushforward(space, c.values, keys)


def convolve(a: ConvClass, b: ConvClass) -> ConvClass:
    """Convolution product a * b on the self-product of a smooth space:
    middle-factor pushforward of the outer tensor."""
    space = a.space
    if space.name != b.space.name:
        raise ValueError("classes on different spaces")
    if not space.smooth:
        raise ValueError(
            f"{space.name} is not smooth; use the decomposition-basis algebra"
        )
    mid_common = space.ring_one()
    euler = {q: space.euler_factor(q) for q in space.points}
    for q in space.points:
        mid_common = mid_common * euler[q]
    out = {}
    for p in space.points:
        for r in space.points:
            acc = space.ring_zero()
            for q in space.points:
                rest = space.ring_one()
                for q2 in space.points:
                    if q2 != q:
                        rest = rest * euler[q2]
                acc = acc + a.values[(p, q)] * b.values[(q, r)] * rest
            if acc.is_zero():
                out[(p, r)] = space.ring_zero()
            else:
                try:
                    out[(p, r)] = acc.exact_divide(mid_common)
                except InexactDivision:
                    raise NonGKMClass("non-GKM class in convolution") from None
    return ConvClass(space, out, check=False)


# ---------------------------------------------------------------------------
# Attractor splitting


class NodalClass:
    """Class in the K-group of the nodal union of two projective lines,
    written in the spanning set {O_1(a), O_2(b), C} with the relations
    O_i(a) = O_i(a-1) + C.  ``window`` certifies that every twist that
    occurred stayed within the registered table range."""

    def __init__(self, entries=None, window=8):
        self.entries = dict(entries or {})
        self.window = window
        self.in_window = all(
            abs(k[1]) <= window for k in self.entries if k[0] != "C"
        )

    @staticmethod
    def structure(component, twist=0, coeff=1, window=8):
        return NodalClass({(component, twist): coeff}, window)

    @staticmethod
    def skyscraper(coeff=1, window=8):
        return NodalClass({("C", 0): coeff}, window)

    def normal_form(self):
        """Coefficients (n1, n2, m) on {O_1, O_2, C}."""
        n1 = n2 = m = 0
        for (comp, twist), c in self.entries.items():
            if comp == "C":
                m += c
            elif comp == "O1":
                n1 += c
                m += c * twist
            elif comp == "O2":
                n2 += c
                m += c * twist
            else:
                raise ValueError(f"unknown component {comp!r}")
        return (n1, n2, m)

    def tensor_line(self, k1, k2):
        out = {}
        for (comp, twist), c in self.entries.items():
            if comp == "O1":
                key = ("O1", twist + k1)
            elif comp == "O2":
                key = ("O2", twist + k2)
            else:
                key = (comp, 0)
            out[key] = out.get(key, 0) + c
        return NodalClass(out, self.window)

    def euler_characteristic(self):
        """chi(O_i(a)) = a + 1, chi(C) = 1, additively extended."""
        total = 0
        for (comp, twist), c in self.entries.items():
            total += c * (1 if comp == "C" else twist + 1)
        return total

    def __add__(self, other):
        out = dict(self.entries)
        for k, c in other.entries.items():
            out[k] = out.get(k, 0) + c
        return NodalClass(out, min(self.window, other.window))

    def __eq__(self, other):
        return isinstance(other, NodalClass) and self.normal_form() == other.normal_form()

    def __repr__(self):
        return f"NodalClass({self.entries}, nf={self.normal_form()})"


class XiData:
    """The correspondence that splits the attractor filtration: for each
    fixed-point stratum, the class of the closure of its attractor."""

    def __init__(self, space, images):
        self.space = space
        self.images = images  # fixed point -> EqKClass or NodalClass

    def image(self, p):
        return self.images[p]


def attractor_splitting_xi(name) -> XiData:
    space = register_example(name)
    if not space.attractor_order:
        raise UnknownExample(
            f"{name!r} has no registered attractor data (trivial splitting)"
        )
    if name == "p1-warmup":
        images = {
            "0": class_structure_sheaf(space),   # closure of the open attractor
            "inf": class_skyscraper(space, "inf"),
        }
    elif name == "sl3-subregular":
        images = {
            "q1": NodalClass.structure("O1"),
            "q2": NodalClass.structure("O2"),
            "p": NodalClass.skyscraper(),
        }
    else:
        raise UnknownExample(f"no attractor images registered for {name!r}")
    return XiData(space, images)


def apply_xi(xi: XiData, values):
    """Splitting applied to a class on the fixed-point set.

    ``values`` maps fixed points to coefficients (character-ring elements for
    the smooth case, integers for the nodal one); the result is the
    corresponding class on the whole space.
    """
    space = xi.space
    if space.smooth:
        total = EqKClass(space, {}, check=False)
        for p, c in values.items():
            if isinstance(c, int):
                c = TorusRingElt.const(space.torus_rank, c, space.torsion)
            total = total + xi.image(p).scale(c)
        return total
    total = NodalClass()
    for p, c in values.items():
        img = xi.image(p)
        total = total + NodalClass(
            {k: c * v for k, v in img.entries.items()}, img.window
        )
    return total


def apply_xi_pair(xi: XiData, values):
    """Pair version: a class on fixed x fixed goes to a class on
    space x fixed, as a map fixed point -> class on the space."""
    space = xi.space
    out = {}
    for (f, fprime), c in values.items():
        if not c:
            continue
        img = xi.image(f)
        if isinstance(img, NodalClass):
            add = NodalClass({k: c * v for k, v in img.entries.items()}, img.window)
            out[fprime] = out.get(fprime, NodalClass()) + add
        else:
            add = img.scale(
                c
                if isinstance(c, TorusRingElt)
                else TorusRingElt.const(space.torus_rank, c, space.torsion)
            )
            out[fprime] = (out.get(fprime) + add) if fprime in out else add
    return out


def attractor_restriction(xi: XiData, c) -> dict:
    """Associated-graded restriction to the fixed-point set.

    Strata are peeled from the open one down: the component at a stratum is
    the value there divided by the Euler factor of the repelling directions,
    after subtracting the contributions of the already-peeled strata.
    """
    space = xi.space
    if not space.smooth:
        n1, n2, m = c.normal_form()
        return {"q1": n1, "q2": n2, "p": m}
    remaining = c
    out = {}
    one = space.ring_one()
    for p in reversed(space.attractor_order):
        factor = one
        for chi in space.repelling[p]:
            factor = factor * (one - space.monomial(tuple(-x for x in chi)))
        val = remaining.values[p]
        comp = val if factor == one else val.exact_divide(factor)
        out[p] = comp
        remaining = remaining - xi.image(p).scale(comp)
    for p in space.points:
        if not remaining.values[p].is_zero():
            raise NonGKMClass("class is not in the image of the splitting")
    return out


def twist_mismatch_check(k1, k2) -> bool:
    """Whether the image of the diagonal fixed-point class equals the sum of
    the attractor-closure classes twisted by (k1, k2); true iff both twists
    vanish."""
    xi = attractor_splitting_xi("sl3-subregular")
    space = xi.space
    diag = {(f, f): 1 for f in space.points}
    image = apply_xi_pair(xi, diag)
    twisted = {
        "q1": NodalClass.structure("O1", k1),
        "q2": NodalClass.structure("O2", k2),
        "p": NodalClass.skyscraper(),
    }
    return all(image[f] == twisted[f] for f in space.points)


# ---------------------------------------------------------------------------
# Fibers and irreducibles at semisimple points


def _cyclic_orbit_char(points, perm, order):
    """Character of the cyclic permutation action: power -> fixed count."""
    out = {}
    for j in range(order):
        count = 0
        for p in points:
            q = p
            for _ in range(j):
                q = perm[q]
            if q == p:
                count += 1
        out[j] = count
    return out


def fiber_at(name, s: SemisimplePoint):
    """Dimension and isotypic structure of the specialized convolution
    algebra at a registered semisimple class.

    The fiber is the component-group invariants of K(fixed pairs) tensor R,
    with R the registered local ring at the class; the dimension is computed
    from the two character tables.
    """
    space = register_example(name)
    sp = space.find_spec_point(s)
    pts = sp.fixed_points if sp.finite else space.points
    pairs = [(p, q) for p in pts for q in pts]
    n = sp.gamma_order
    perm_char = {}
    for j in range(n):
        count = 0
        for p, q in pairs:
            pp, qq = p, q
            for _ in range(j):
                pp, qq = sp.perm[pp], sp.perm[qq]
            if (pp, qq) == (p, q):
                count += 1
        perm_char[j] = count
    dim_frac = Fraction(0)
    for j in range(n):
        dim_frac += Fraction(perm_char[j] * sp.r_char.get(j, 0), n)
    assert dim_frac.denominator == 1
    dim = int(dim_frac)
    pieces = {}
    for k in range(n):
        mult_k = _cyclic_multiplicity(perm_char, n, k)
        mult_rk = _cyclic_multiplicity(sp.r_char, n, (-k) % n)
        if mult_k and mult_rk:
            pieces[_char_label(k, n)] = mult_k * mult_rk
    return {
        "example": name,
        "point": sp.label,
        "dimension": dim,
        "local_ring": sp.r_desc,
        "pieces": pieces,
    }


def _char_label(k, n):
    if n == 1:
        return "trivial"
    if n == 2:
        return "trivial" if k == 0 else "sign"
    return f"rho{k}"


def _cyclic_multiplicity(char, n, k):
    """Multiplicity of the k-th character of Z/n in an exact character."""
    total = CyclotomicValue.from_int(0)
    zeta = CyclotomicValue.root_of_unity(n) if n > 1 else CyclotomicValue.from_int(1)
    for j in range(n):
        total = total + CyclotomicValue.from_int(char.get(j, 0)) * zeta ** ((-k * j) % n)
    frac = total.as_fraction() / n
    assert frac.denominator == 1, "character has non-integer multiplicities"
    return int(frac)


def irreducibles_at(name, s: SemisimplePoint):
    """Nonzero isotypic multiplicity spaces of K(fixed set of s) under the
    component group of the centralizer: the simple modules at s."""
    space = register_example(name)
    sp = space.find_spec_point(s)
    pts = sp.fixed_points if sp.finite else space.points
    n = sp.gamma_order
    perm_char = _cyclic_orbit_char(pts, sp.perm, n)
    out = []
    for k in range(n):
        m = _cyclic_multiplicity(perm_char, n, k)
        if m:
            out.append((_char_label(k, n), m))
    return out


# ---------------------------------------------------------------------------
# Traces


def _k_basis(space):
    """Triangular basis of the equivariant K-group of a smooth P1-type
    space: the structure sheaf and the skyscraper at the second point."""
    if space.points == ("0", "inf"):
        return [class_structure_sheaf(space), class_skyscraper(space, "inf")], ("0", "inf")
    if space.points == ("pt",):
        return [class_structure_sheaf(space)], ("pt",)
    raise UnknownExample(f"no registered K-basis for {space.name!r}")


def _coordinates(space, cls, basis, order):
    """Coordinates of a class in the triangular basis (exact division)."""
    coords = []
    remaining = cls
    for b, p in zip(basis, order):
        lead = b.values[p]
        val = remaining.values[p]
        c = val if lead == space.ring_one() else val.exact_divide(lead)
        coords.append(c)
        remaining = remaining - b.scale(c)
    for p in space.points:
        if not remaining.values[p].is_zero():
            raise NonGKMClass("class is outside the registered basis span")
    return coords


def _action_matrix(space, F: ConvClass):
    """Matrix of convolution by F on the K-group, in the registered basis."""
    basis, order = _k_basis(space)
    euler = {q: space.euler_factor(q) for q in space.points}
    mid_common = space.ring_one()
    for q in space.points:
        mid_common = mid_common * euler[q]
    cols = []
    for b in basis:
        values = {}
        for p in space.points:
            acc = space.ring_zero()
            for q in space.points:
                rest = space.ring_one()
                for q2 in space.points:
                    if q2 != q:
                        rest = rest * euler[q2]
                acc = acc + F.values[(p, q)] * b.values[q] * rest
            values[p] = (
                space.ring_zero() if acc.is_zero() else acc.exact_divide(mid_common)
            )
        cols.append(_coordinates(space, EqKClass(space, values, check=False), basis, order))
    return cols  # cols[j][i] = coefficient of basis i in F * basis_j


def trace_of_class(F: ConvClass):
    """Two independent traces of a convolution class, with equality flag.

    Left: the trace of the action of F on the K-group of the space, in the
    registered basis, with equivariance forgotten.  Right: the Euler
    characteristic of F tensored with the diagonal class.  The two agree for
    every honest class; both are returned.
    """
    space = F.space
    cols = _action_matrix(space, F)
    tr_action = sum(cols[i][i].at_one() for i in range(len(cols)))
    tr_euler = pushforward_point(F.tensor(conv_unit(space))).at_one()
    return {"action": tr_action, "euler": tr_euler, "equal": tr_action == tr_euler}


def _evaluate_at(space, sp: SpecPoint, x: TorusRingElt) -> CyclotomicValue:
    return tr_evaluate(x, list(sp.coords))


def _trace_matrix_at(space, sp: SpecPoint, F: ConvClass):
    """Matrix of the swapped class acting on K(fixed set of s): entries are
    the s-evaluations of F(q, p) divided by the evaluated Euler factor of the
    normal directions at q.

    All registered classes sit in even cohomological degree, so the graded
    trace carries no signs; this is asserted by construction (the model has
    no odd part at all).
    """
    pts = sp.fixed_points
    lam = {}
    for q in pts:
        lam[q] = _evaluate_at(space, sp, space.euler_factor(q))
    M = {}
    for p in pts:
        for q in pts:
            M[(p, q)] = _evaluate_at(space, sp, F.values[(q, p)]) * lam[q].inverse()
    return M


def trace_map_c(F: ConvClass, points):
    """The trace function of a convolution class on commuting pairs (s, gamma).

    For each listed semisimple point with component-group element gamma, the
    value is the trace of gamma composed with the localized action of the
    swapped class on K(fixed set of s); at identity-type classes it is the
    plain trace on the K-group.  Returns {(s label, gamma power): value}.

    The domain is the equivariant K-group of the pair space, so the class
    must be invariant under the component group (symmetrize first if
    necessary); gamma-twisted traces of non-invariant classes are not
    trace functions.
    """
    space = F.space
    if not F.is_component_invariant():
        raise ValueError("class is not component-group invariant")
    out = {}
    for s in points:
        sp = space.find_spec_point(s)
        if not sp.finite:
            if s.gamma % max(sp.gamma_order, 1):
                raise UnsupportedPoint("identity-type class has no component group")
            out[(sp.label, 0)] = CyclotomicValue.from_int(trace_of_class(F)["action"])
            continue
        M = _trace_matrix_at(space, sp, F)
        pts = sp.fixed_points
        gpow = s.gamma % sp.gamma_order
        total = CyclotomicValue.from_int(0)
        for p in pts:
            q = p
            for _ in range(gpow):
                q = sp.perm[q]
            total = total + M[(p, q)]
        out[(sp.label, gpow)] = total
    return out


def admissible_decomposition(space, sp_label, f_values):
    """Decompose gamma -> value over the characters of the component group.

    Returns {"integral", "admissible", "nonnegative", "decomposition"}:
    the trace function of any equivariant class decomposes with integer
    multiplicities carried only by admissible characters (those occurring in
    the permutation representation on K(fixed set of s)); permutation-type
    effective classes additionally have non-negative multiplicities, i.e.
    their trace function is literally a sum of admissible characters.
    """
    space = register_example(space) if isinstance(space, str) else space
    sp = space.spec_point_by_label(sp_label)
    n = sp.gamma_order
    pts = sp.fixed_points if sp.finite else space.points
    perm_char = _cyclic_orbit_char(pts, sp.perm, n)
    decomp = {}
    integral = True
    admissible = True
    nonneg = True
    zeta = CyclotomicValue.root_of_unity(n) if n > 1 else CyclotomicValue.from_int(1)
    for k in range(n):
        total = CyclotomicValue.from_int(0)
        for j in range(n):
            total = total + f_values[j] * zeta ** ((-k * j) % n)
        if not total.is_rational() or (total.as_fraction() / n).denominator != 1:
            integral = False
            continue
        m = int(total.as_fraction() / n)
        if m:
            decomp[_char_label(k, n)] = m
            if _cyclic_multiplicity(perm_char, n, k) == 0:
                admissible = False
            if m < 0:
                nonneg = False
    return {
        "integral": integral,
        "admissible": admissible,
        "nonnegative": nonneg,
        "decomposition": decomp,
    }


def effective_invariant_classes(space: GKMSpace):
    """Registered effective, component-invariant spanning classes.

    The first three entries (diagonal, structure sheaf of the product,
    fixed-orbit skyscraper pairs) generate the permutation-type cone on
    which the trace function is a genuine non-negative character sum.
    """
    if space.name in ("pgl2-lowest", "p1-warmup"):
        O = class_structure_sheaf(space)
        c0 = class_skyscraper(space, "0")
        ci = class_skyscraper(space, "inf")
        cone = [
            conv_unit(space),
            outer_product(O, O),
            outer_product(c0, c0) + outer_product(ci, ci),
        ]
        extra = [
            outer_product(c0, ci) + outer_product(ci, c0),
            outer_product(class_balanced_line(space, 1), O).symmetrized(),
            conv_unit(space).tensor(
                outer_product(class_balanced_line(space, 1), class_balanced_line(space, 1))
            ),
        ]
        return cone, extra
    if space.name == "sl2-regular":
        one = ConvClass(space, {("pt", "pt"): space.ring_one()})
        eps = ConvClass(
            space,
            {("pt", "pt"): TorusRingElt.monomial(1, (0, 1), torsion=(2,))},
        )
        return [one], [eps]
    raise UnknownExample(f"no effective family registered for {space.name!r}")


def registered_points(space: GKMSpace):
    """Every registered semisimple class paired with every component-group
    element of its centralizer."""
    out = []
    for sp in space.spec_points.values():
        gammas = range(sp.gamma_order) if sp.finite else (0,)
        for g in gammas:
            out.append(SemisimplePoint(sp.coords, gamma=g))
    return out


def random_invariant_class(space: GKMSpace, rng) -> ConvClass:
    """Random component-invariant class, for property tests and suites."""
    if space.points == ("0", "inf"):
        parts = [
            class_structure_sheaf(space),
            class_balanced_line(space, 1),
            class_balanced_line(space, -1),
            class_skyscraper(space, "0"),
            class_skyscraper(space, "inf"),
        ]
        total = ConvClass(space, {}, check=False)
        for _ in range(3):
            a, b = rng.choice(parts), rng.choice(parts)
            coeff = space.monomial((rng.randint(-1, 1),), rng.randint(-2, 2))
            total = total + outer_product(a, b).scale(coeff)
        return total.symmetrized()
    if space.points == ("pt",):
        coeffs = {}
        for _ in range(3):
            key = (rng.randint(-2, 2), rng.randint(0, 1))
            coeffs[key] = coeffs.get(key, 0) + rng.randint(-2, 2)
        return ConvClass(
            space, {("pt", "pt"): TorusRingElt(1, coeffs, torsion=(2,))}
        )
    raise UnknownExample(f"no random classes registered for {space.name!r}")


def verify_suite_traces(name, seed=0, samples=20):
    """The trace checks: two-oracle equality, cyclicity, commutator
    vanishing, and admissibility of the trace function; returns a list of
    reports {"check", "checked", "failed"}."""
    import random as _random

    space = register_example(name)
    rng = _random.Random(seed)
    points = registered_points(space)
    reports = []

    checked, failed = 0, []
    classes = [conv_unit(space)] + [
        random_invariant_class(space, rng) for _ in range(samples - 1)
    ]
    for i, F in enumerate(classes):
        r = trace_of_class(F)
        checked += 1
        if not r["equal"]:
            failed.append({"class_index": i, "action": r["action"], "euler": r["euler"]})
    reports.append({"check": "trace-two-oracles", "checked": checked, "failed": failed})

    checked, failed = 0, []
    for i in range(samples):
        A = random_invariant_class(space, rng)
        B = random_invariant_class(space, rng)
        cab = trace_map_c(convolve(A, B), points)
        cba = trace_map_c(convolve(B, A), points)
        checked += 1
        if any(cab[k] != cba[k] for k in cab):
            failed.append({"pair_index": i})
        comm = convolve(A, B) - convolve(B, A)
        ccm = trace_map_c(comm, points)
        checked += 1
        if any(not v.is_zero() for v in ccm.values()):
            failed.append({"pair_index": i, "commutator": "nonzero trace"})
    reports.append(
        {"check": "trace-cyclicity-and-commutators", "checked": checked, "failed": failed}
    )

    checked, failed = 0, []
    cone, extra = effective_invariant_classes(space)
    finite_labels = [sp.label for sp in space.spec_points.values() if sp.finite]
    for i in range(10):
        F = ConvClass(space, {}, check=False)
        for g in cone:
            F = F + g.scale(
                TorusRingElt.const(space.torus_rank, rng.randint(0, 3), space.torsion)
            )
        for label in finite_labels:
            sp = space.spec_point_by_label(label)
            vals = trace_map_c(
                F, [SemisimplePoint(sp.coords, gamma=g) for g in range(sp.gamma_order)]
            )
            f = {g: vals[(label, g)] for g in range(sp.gamma_order)}
            rep = admissible_decomposition(space, label, f)
            checked += 1
            want_nonneg = space.name != "sl2-regular"
            if not (rep["integral"] and rep["admissible"] and (rep["nonnegative"] or not want_nonneg)):
                failed.append({"class_index": i, "point": label, "report": rep})
    for i, F in enumerate(cone + extra):
        for label in finite_labels:
            sp = space.spec_point_by_label(label)
            vals = trace_map_c(
                F, [SemisimplePoint(sp.coords, gamma=g) for g in range(sp.gamma_order)]
            )
            f = {g: vals[(label, g)] for g in range(sp.gamma_order)}
            rep = admissible_decomposition(space, label, f)
            checked += 1
            if not (rep["integral"] and rep["admissible"]):
                failed.append({"effective_index": i, "point": label, "report": rep})
    reports.append({"check": "trace-admissibility", "checked": checked, "failed": failed})
    return reports
