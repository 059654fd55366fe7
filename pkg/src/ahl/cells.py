"""Cell partitions in a length ball, the a-function, and distinguished
involutions.

Two elements are connected when they are Bruhat-comparable and the relevant
KL polynomial attains the extreme degree (|ell(x)-ell(y)|-1)/2.  Preorder
edges go from x to y when they are connected and the descent set of x (left,
right, or either, by side) is not contained in that of y; length-zero twists
x ~ om*x (and x ~ x*om on the right) are identified as well, since the
standard-basis elements indexed by the length-zero subgroup are invertible.
Cells are the strongly connected components, ordered by reachability.

Everything is computed inside a ball, so the output distinguishes facts
certified at this truncation from suggestive ones: an element's membership is
certified only when its component is stable against enlarging the ball by
two, and a-values carry an exact/lookup/lower-bound certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .hecke import KLTable, h_constants
from .weyl import (
    WeylElt,
    elt_to_json,
    w_ball,
    w_bruhat_leq,
    w_descents,
    w_length,
    w_multiply,
)


class CertificationError(ValueError):
    """A requested quantity is not certified at the available truncation."""


@dataclass(frozen=True)
class NilpotentLabel:
    """Registered dictionary entry matching a two-sided cell to a nilpotent
    orbit of the dual Lie algebra, with the reductive centralizer data used
    by the geometric examples."""

    datum: str
    orbit: str
    dim_springer_fiber: int
    z_e: str
    component_group: str


NILPOTENT_LABELS = {
    "A1~": (
        NilpotentLabel("A1~", "regular", 0, "trivial", "trivial"),
        NilpotentLabel("A1~", "zero", 1, "PGL2", "trivial"),
    ),
    "A1~ext": (
        NilpotentLabel("A1~ext", "regular", 0, "mu2", "Z/2"),
        NilpotentLabel("A1~ext", "zero", 1, "SL2", "trivial"),
    ),
    "A2~": (
        NilpotentLabel("A2~", "regular", 0, "trivial", "trivial"),
        NilpotentLabel("A2~", "subregular", 1, "GL1", "trivial"),
        NilpotentLabel("A2~", "zero", 3, "PGL3", "trivial"),
    ),
    "A2~ext": (
        NilpotentLabel("A2~ext", "regular", 0, "mu3", "Z/3"),
        NilpotentLabel("A2~ext", "subregular", 1, "GL1", "trivial"),
        NilpotentLabel("A2~ext", "zero", 3, "SL3", "trivial"),
    ),
}


def connected(x: WeylElt, y: WeylElt, table: KLTable) -> bool:
    """Comparable in Bruhat order with KL degree exactly (|gap|-1)/2."""
    if x == y:
        return False
    if w_length(x) > w_length(y):
        x, y = y, x
    gap = w_length(y) - w_length(x)
    if gap % 2 == 0:
        # extreme degree is not an integer, so it cannot be attained
        return False
    if not w_bruhat_leq(x, y):
        return False
    p = table.kl(x, y)
    if p.is_zero():
        return False
    return 2 * p.degree() == gap - 1


def _edges(ball, table, side):
    """Preorder edges restricted to the given ball."""
    datum = table.datum
    index = {w: i for i, w in enumerate(ball)}
    dl = {w: w_descents(w, "left") for w in ball}
    dr = {w: w_descents(w, "right") for w in ball}
    out = [[] for _ in ball]

    def add(a, b):
        out[index[a]].append(index[b])

    by_len = {}
    for w in ball:
        by_len.setdefault(w_length(w), []).append(w)
    for x in ball:
        lx = w_length(x)
        for ly in range(lx - table.radius, w_length(ball[-1]) + 1):
            if ly < 0 or abs(ly - lx) % 2 == 0:
                continue
            for y in by_len.get(ly, ()):
                if not connected(x, y, table):
                    continue
                drop_l = bool(dl[x] - dl[y])
                drop_r = bool(dr[x] - dr[y])
                if side == "L" and drop_l:
                    add(x, y)
                elif side == "R" and drop_r:
                    add(x, y)
                elif side == "LR" and (drop_l or drop_r):
                    add(x, y)
    # length-zero twists: both directions, so they merge components
    for om in datum.omega[1:]:
        for x in ball:
            for tw in (
                (w_multiply(om, x),) if side == "L"
                else (w_multiply(x, om),) if side == "R"
                else (w_multiply(om, x), w_multiply(x, om))
            ):
                if tw in index:
                    add(x, tw)
    return out


def _sccs(adj):
    """Strongly connected components (iterative Tarjan); returns comp ids."""
    n = len(adj)
    comp = [-1] * n
    low = [0] * n
    num = [0] * n
    on = [False] * n
    visited = [False] * n
    stack = []
    counter = [0]
    ncomp = [0]
    for root in range(n):
        if visited[root]:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                visited[v] = True
                num[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on[v] = True
            recurse = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if not visited[w]:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if on[w]:
                    low[v] = min(low[v], num[w])
            if recurse:
                continue
            work.pop()
            if low[v] == num[v]:
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp[w] = ncomp[0]
                    if w == v:
                        break
                ncomp[0] += 1
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comp, ncomp[0]


class CellPartition:
    """Cells of one ball, with boundary-certification flags and the cell
    order by reachability."""

    def __init__(self, datum, radius, side, cells, cell_of, certified, order_pairs):
        self.datum = datum
        self.radius = radius
        self.side = side
        self.cells = cells  # tuple of frozensets, indexed by cell id
        self._cell_of = cell_of
        self.certified = certified
        self.order_pairs = order_pairs  # (a, b) meaning cell a <= cell b
        self._a_cache = {}

    def cell_id_of(self, w):
        try:
            return self._cell_of[w]
        except KeyError:
            raise CertificationError(
                f"element {w} is outside the partition ball"
            ) from None

    def members(self, cell_id):
        return self.cells[cell_id]

    def leq(self, a, b):
        return a == b or (a, b) in self.order_pairs

    def __repr__(self):
        return (
            f"CellPartition({self.datum.label}, radius={self.radius}, "
            f"side={self.side}, cells={len(self.cells)})"
        )


def cells_compute(datum, radius, side, table: KLTable) -> CellPartition:
    """Partition the radius ball into cells, certifying by ball stability.

    Components are computed on the largest ball the table certifies (at most
    radius + 2) and restricted to the requested ball; an element is certified
    when the restricted component agrees with the one computed inside the
    small ball alone, so that growing the ball did not merge its cell.
    """
    if side not in ("L", "R", "LR"):
        raise ValueError("side must be L, R or LR")
    if radius > table.radius:
        raise CertificationError("partition radius exceeds the table radius")
    big_radius = min(table.radius, radius + 2)
    small = w_ball(datum, radius)
    big = w_ball(datum, big_radius)
    small_set = set(small)

    comp_small, _ = _sccs(_edges(small, table, side))
    comp_big, nbig = _sccs(_edges(big, table, side))

    small_groups = {}
    for w, c in zip(small, comp_small):
        small_groups.setdefault(c, set()).add(w)
    big_groups = {}
    for w, c in zip(big, comp_big):
        big_groups.setdefault(c, set()).add(w)

    # restrict the big components to the requested ball
    restricted = {}
    for c, members in big_groups.items():
        inside = frozenset(members & small_set)
        if inside:
            restricted[c] = inside
    order_ids = sorted(restricted, key=lambda c: min(w.sort_key() for w in restricted[c]))
    cells = tuple(restricted[c] for c in order_ids)
    id_of_big = {c: i for i, c in enumerate(order_ids)}
    cell_of = {}
    for i, members in enumerate(cells):
        for w in members:
            cell_of[w] = i

    stable = big_radius >= radius + 2
    certified = {}
    for w, c in zip(small, comp_small):
        certified[w] = stable and small_groups[c] == cells[cell_of[w]]

    # reachability order on the big condensation, restricted to visible cells
    big_adj = _edges(big, table, side)
    cond = {}
    for v, nbrs in enumerate(big_adj):
        a = comp_big[v]
        for w in nbrs:
            b = comp_big[w]
            if a != b:
                cond.setdefault(a, set()).add(b)
    reach = {}

    def dfs(a):
        if a in reach:
            return reach[a]
        reach[a] = set()
        acc = set()
        for b in cond.get(a, ()):
            acc.add(b)
            acc |= dfs(b)
        reach[a] = acc
        return acc

    order_pairs = set()
    for c in big_groups:
        for cdash in dfs(c):
            if c in id_of_big and cdash in id_of_big:
                order_pairs.add((id_of_big[c], id_of_big[cdash]))

    return CellPartition(datum, radius, side, cells, cell_of, certified, order_pairs)


def a_value(z: WeylElt, partition: CellPartition, table: KLTable):
    """(value, certificate) for the a-function at z.

    The value is the maximum of -min_v_degree(h_{x,y,z}) over scanned pairs
    x, y in the cell of z whose product is certified exact.  The certificate
    is "lookup" when the value matches a registered Springer-fiber dimension
    for this datum, "exact" when it is additionally stable under shrinking
    the scan radius by two, and "lower-bound" otherwise.
    """
    cid = partition.cell_id_of(z)
    got = partition._a_cache.get((cid, z))
    if got is not None:
        return got
    members = sorted(partition.members(cid), key=WeylElt.sort_key)
    best = 0
    best_small = 0
    found = False
    found_small = False
    for x in members:
        lx = w_length(x)
        for y in members:
            if lx + w_length(y) > table.radius:
                continue
            h = h_constants(x, y, table)
            poly = h.get(z)
            if poly is None or poly.is_zero():
                continue
            cand = -poly.valuation()
            found = True
            best = max(best, cand)
            if lx + w_length(y) <= table.radius - 2:
                found_small = True
                best_small = max(best_small, cand)
    matched = any(
        lab.dim_springer_fiber == best for lab in NILPOTENT_LABELS[partition.datum.label]
    )
    stable = found and found_small and best == best_small
    if matched and partition.certified.get(z, False) and found:
        certificate = "exact" if stable else "lookup"
    else:
        certificate = "lower-bound"
    result = (best, certificate)
    partition._a_cache[(cid, z)] = result
    return result


def nilpotent_label_for(partition: CellPartition, table: KLTable, cell_id):
    """Registered orbit matched to a cell by its certified a-value, or None."""
    rep = min(partition.members(cell_id), key=WeylElt.sort_key)
    value, cert = a_value(rep, partition, table)
    if cert == "lower-bound":
        return None
    for lab in NILPOTENT_LABELS[partition.datum.label]:
        if lab.dim_springer_fiber == value:
            return lab
    return None


def distinguished_involutions(partition: CellPartition, table: KLTable):
    """Elements d in the ball with a(d) - ell(d) = 2 deg_q P_{e,d}.

    Requires a certified a-value for every scanned element; every returned
    element is checked to be an involution.
    """
    datum = partition.datum
    out = set()
    for d in w_ball(datum, partition.radius):
        value, cert = a_value(d, partition, table)
        if cert == "lower-bound":
            raise CertificationError(
                f"a-value of {d} is not certified at this truncation"
            )
        p = table.kl(datum.identity, d)
        if p.is_zero():
            continue  # incomparable with the identity, never distinguished
        if value - w_length(d) == 2 * p.degree():
            if w_multiply(d, d) != datum.identity:
                raise AssertionError(f"candidate {d} is not an involution")
            out.add(d)
    return out


def cells_to_json(partition: CellPartition, table: KLTable):
    """Export schema: cells with a-values, members and distinguished
    involutions, plus the reachability order pairs."""
    dist = distinguished_involutions(partition, table)
    cells = []
    for i, members in enumerate(partition.cells):
        rep = min(members, key=WeylElt.sort_key)
        value, cert = a_value(rep, partition, table)
        cells.append(
            {
                "id": i,
                "a": {"value": value, "certificate": cert},
                "members": [
                    elt_to_json(w) for w in sorted(members, key=WeylElt.sort_key)
                ],
                "certified": [
                    bool(partition.certified.get(w, False))
                    for w in sorted(members, key=WeylElt.sort_key)
                ],
                "distinguished": [
                    elt_to_json(w)
                    for w in sorted(members & dist, key=WeylElt.sort_key)
                ],
            }
        )
    return {
        "datum": partition.datum.label,
        "radius": partition.radius,
        "side": partition.side,
        "cells": cells,
        "order": sorted(list(p) for p in partition.order_pairs),
    }
