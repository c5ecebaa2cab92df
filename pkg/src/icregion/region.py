"""Exact polytope algebra for rate regions.

A ``Polytope`` is an intersection of half-spaces in the nonnegative orthant,
with a lazily cached list of extreme points.  Everything is exact
(``fractions.Fraction``).  Real-valued regions are carried on a dyadic grid
(see ``dyadic``) so the same exact machinery applies to them; comparisons that
should be tolerant take an explicit ``tol``.

Vertices of an H-description come from the basic-feasible-point kernel.
V-descriptions (hulls, Minkowski sums) go through an exact beneath-beyond
hull, which yields the facets and the extreme points together.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._backend import basic_feasible_points

Point = tuple[Fraction, ...]

MAX_DIM = 6


class RegionError(ValueError):
    pass


class CapacityLimitError(RegionError):
    pass


class BoundednessError(RegionError):
    pass


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


def dyadic(x: float, up: bool, bits: int = 40) -> Fraction:
    """Round ``x`` to the grid 2**-bits, upward or downward."""
    if not math.isfinite(x):
        raise RegionError(f"non-finite value {x!r}")
    scale = 1 << bits
    y = x * scale
    return Fraction(math.ceil(y) if up else math.floor(y), scale)


def _lcm_den(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def _dot(a: Sequence, x: Sequence):
    return sum(u * v for u, v in zip(a, x))


@dataclass(frozen=True)
class HalfSpace:
    """sum(coeffs[i] * r_i) <= rhs."""

    coeffs: tuple[Fraction, ...]
    rhs: Fraction

    def __post_init__(self):
        coeffs = tuple(as_fraction(c) for c in self.coeffs)
        if not any(coeffs):
            raise RegionError("half-space with all-zero coefficients")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rhs", as_fraction(self.rhs))

    def value(self, x: Sequence) -> Fraction:
        return _dot(self.coeffs, x)

    def slack(self, x: Sequence) -> Fraction:
        return self.rhs - self.value(x)


def nonneg(dim: int) -> list[HalfSpace]:
    return [HalfSpace(tuple(Fraction(-1 if j == i else 0) for j in range(dim)), Fraction(0))
            for i in range(dim)]


class Polytope:
    """Bounded polytope in the nonnegative orthant of R^dim."""

    __slots__ = ("dim", "halfspaces", "_vertices")

    def __init__(self, dim: int, halfspaces: Iterable[HalfSpace],
                 vertices: Iterable[Sequence] | None = None):
        if dim < 1:
            raise RegionError("dim must be positive")
        seen: set[HalfSpace] = set()
        hs: list[HalfSpace] = []
        for h in list(halfspaces) + nonneg(dim):
            if len(h.coeffs) != dim:
                raise RegionError("half-space dimension mismatch")
            if h not in seen:
                seen.add(h)
                hs.append(h)
        self.dim = dim
        self.halfspaces = tuple(hs)
        self._vertices = None
        if vertices is not None:
            self._vertices = tuple(sorted({tuple(as_fraction(c) for c in v) for v in vertices}))

    @classmethod
    def from_constraints(cls, dim: int, rows: Iterable[tuple[Sequence, object]]) -> "Polytope":
        return cls(dim, [HalfSpace(tuple(c), r) for c, r in rows])

    @property
    def vertices(self) -> tuple[Point, ...]:
        return vertices(self)

    def __repr__(self) -> str:
        nv = "?" if self._vertices is None else len(self._vertices)
        return f"Polytope(dim={self.dim}, halfspaces={len(self.halfspaces)}, vertices={nv})"


# ---------------------------------------------------------------- vertices

def _integer_system(dim: int, halfspaces: Sequence[HalfSpace]):
    rows = []
    for h in halfspaces:
        s = _lcm_den(h.coeffs)
        rows.append(([int(c * s) for c in h.coeffs], h.rhs * s))
    D = _lcm_den(r for _, r in rows)
    A, B = [], []
    for a, r in rows:
        bi = int(r * D)
        g = math.gcd(*a, bi)
        A.append([v // g for v in a])
        B.append(bi // g)
    return A, B, D


def _basic_points(dim: int, halfspaces: Sequence[HalfSpace]) -> set[Point]:
    A, B, D = _integer_system(dim, halfspaces)
    return {tuple(Fraction(n, den * D) for n in nums) for nums, den in basic_feasible_points(A, B)}


def _check_bounded(p: Polytope) -> None:
    # the recession cone meets the simplex sum(y) = 1 iff the region is unbounded
    ones = tuple(Fraction(1) for _ in range(p.dim))
    cone = [HalfSpace(h.coeffs, 0) for h in p.halfspaces]
    cone += [HalfSpace(ones, 1), HalfSpace(tuple(-v for v in ones), -1)]
    if _basic_points(p.dim, cone):
        raise BoundednessError("region is unbounded")


def vertices(p: Polytope, max_dim: int = MAX_DIM) -> tuple[Point, ...]:
    """Extreme points, deduplicated and sorted lexicographically."""
    if p._vertices is not None:
        return p._vertices
    if p.dim > max_dim:
        raise CapacityLimitError(f"vertex enumeration limited to dim <= {max_dim}, got {p.dim}")
    _check_bounded(p)
    p._vertices = tuple(sorted(_basic_points(p.dim, p.halfspaces)))
    return p._vertices


# ---------------------------------------------------------------- hull

def _det(m: list[list[int]]) -> int:
    """Bareiss determinant over the integers."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class _Echelon:
    """Incremental reduced row echelon form over the rationals."""

    def __init__(self):
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def reduce(self, v: Sequence) -> list[Fraction]:
        v = [Fraction(x) for x in v]
        for pc, row in zip(self.pivots, self.rows):
            f = v[pc]
            if f:
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def add(self, v: Sequence) -> bool:
        v = self.reduce(v)
        pc = next((i for i, x in enumerate(v) if x), None)
        if pc is None:
            return False
        v = [x / v[pc] for x in v]
        for i, row in enumerate(self.rows):
            f = row[pc]
            if f:
                self.rows[i] = [x - f * y for x, y in zip(row, v)]
        self.rows.append(v)
        self.pivots.append(pc)
        return True


def _rank(vectors: Iterable[Sequence]) -> int:
    e = _Echelon()
    return sum(1 for v in vectors if e.add(v))


def _beneath_beyond(Q: list[tuple[int, ...]], simplex: list[int]):
    """Exact hull of integer points Q spanning R^r; returns (facets, vertex ids)."""
    r = len(Q[0])
    inner = [sum(Q[i][c] for i in simplex) for c in range(r)]
    inner_den = len(simplex)

    def plane(verts: tuple[int, ...]):
        base = Q[verts[0]]
        rows = [[Q[i][c] - base[c] for c in range(r)] for i in verts[1:]]
        a = [(-1) ** c * _det([row[:c] + row[c + 1:] for row in rows]) for c in range(r)]
        g = math.gcd(*a)
        a = [x // g for x in a]
        b = _dot(a, base)
        if _dot(a, inner) > b * inner_den:
            a, b = [-x for x in a], -b
        return tuple(a), b

    facets: dict[int, tuple[tuple[int, ...], tuple[int, ...], int]] = {}
    ridges: dict[frozenset, set[int]] = defaultdict(set)
    counter = iter(range(1 << 62))

    def add(verts: tuple[int, ...]) -> None:
        a, b = plane(verts)
        fid = next(counter)
        facets[fid] = (verts, a, b)
        for v in verts:
            ridges[frozenset(verts).difference((v,))].add(fid)

    def drop(fid: int) -> None:
        verts = facets.pop(fid)[0]
        for v in verts:
            key = frozenset(verts).difference((v,))
            ridges[key].discard(fid)
            if not ridges[key]:
                del ridges[key]

    for omit in simplex:
        add(tuple(v for v in simplex if v != omit))
    chosen = set(simplex)
    for idx, q in enumerate(Q):
        if idx in chosen:
            continue
        visible = [fid for fid, (_, a, b) in facets.items() if _dot(a, q) > b]
        if not visible:
            continue
        vis = set(visible)
        horizon = []
        for fid in visible:
            verts = facets[fid][0]
            for v in verts:
                key = frozenset(verts).difference((v,))
                if not (ridges[key] - vis):
                    continue
                horizon.append(tuple(sorted(key)))
        for fid in visible:
            drop(fid)
        for key in horizon:
            add(key + (idx,))

    planes = {(a, b) for _, a, b in facets.values()}
    used = {v for verts, _, _ in facets.values() for v in verts}
    verts_out = []
    for v in sorted(used):
        active = [a for a, b in planes if _dot(a, Q[v]) == b]
        if _rank(active) == r:
            verts_out.append(v)
    return sorted(planes), verts_out


def hull_of(points: Iterable[Sequence], dim: int | None = None) -> Polytope:
    """Convex hull of a finite point set, with facets and extreme points."""
    pts = sorted({tuple(as_fraction(c) for c in p) for p in points})
    if not pts:
        raise RegionError("hull of an empty point set")
    n = len(pts[0]) if dim is None else dim
    L = _lcm_den(c for p in pts for c in p)
    P = [tuple(int(c * L) for c in p) for p in pts]
    p0 = P[0]

    ech = _Echelon()
    basis = []
    for i, q in enumerate(P[1:], 1):
        if ech.add([a - b for a, b in zip(q, p0)]):
            basis.append(i)
    r = len(basis)
    pcols = ech.pivots

    hs: list[HalfSpace] = []
    # affine-hull equalities: x_c - sum_j R_j[c] x_{P_j} = const for non-pivot c
    for c in range(n):
        if c in pcols:
            continue
        coeffs = [Fraction(0)] * n
        coeffs[c] = Fraction(1)
        for pc, row in zip(pcols, ech.rows):
            coeffs[pc] -= row[c]
        rhs = _dot(coeffs, p0) / L
        hs.append(HalfSpace(tuple(coeffs), rhs))
        hs.append(HalfSpace(tuple(-x for x in coeffs), -rhs))

    if r == 0:
        return Polytope(n, hs, [pts[0]])

    Q = [tuple(q[c] for c in pcols) for q in P]
    if r == 1:
        lo = min(range(len(Q)), key=lambda i: Q[i][0])
        hi = max(range(len(Q)), key=lambda i: Q[i][0])
        c = pcols[0]
        e = [Fraction(0)] * n
        e[c] = Fraction(1)
        hs.append(HalfSpace(tuple(e), Fraction(Q[hi][0], L)))
        hs.append(HalfSpace(tuple(-x for x in e), Fraction(-Q[lo][0], L)))
        return Polytope(n, hs, [pts[lo], pts[hi]])

    # insert far points first so most candidates are found interior quickly
    order = [0] + basis + sorted(
        (i for i in range(len(Q)) if i != 0 and i not in set(basis)),
        key=lambda i: -sum(abs(x) for x in Q[i]))
    Qo = [Q[i] for i in order]
    planes, vids = _beneath_beyond(Qo, list(range(r + 1)))
    for a, b in planes:
        coeffs = [Fraction(0)] * n
        for pc, x in zip(pcols, a):
            coeffs[pc] = Fraction(x)
        hs.append(HalfSpace(tuple(coeffs), Fraction(b, L)))
    return Polytope(n, hs, [pts[order[v]] for v in vids])


# ---------------------------------------------------------------- algebra

def minkowski_sum(a: Polytope, b: Polytope) -> Polytope:
    if a.dim != b.dim:
        raise RegionError("dimension mismatch in Minkowski sum")
    va, vb = vertices(a), vertices(b)
    return hull_of({tuple(x + y for x, y in zip(u, v)) for u in va for v in vb}, a.dim)


def minkowski_sum_all(polys: Sequence[Polytope]) -> Polytope:
    if not polys:
        raise RegionError("empty Minkowski sum")
    out = polys[0]
    for p in polys[1:]:
        out = minkowski_sum(out, p)
    return out


def contains(p: Polytope, x: Sequence, tol: float | None = None) -> bool:
    """Membership test; exact unless ``tol`` is given."""
    if len(x) != p.dim:
        raise RegionError("dimension mismatch in contains")
    if tol is None:
        xf = [as_fraction(v) for v in x]
        return all(h.value(xf) <= h.rhs for h in p.halfspaces)
    xs = [float(v) for v in x]
    return all(sum(float(c) * v for c, v in zip(h.coeffs, xs)) <= float(h.rhs) + tol
               for h in p.halfspaces)


def equals(a: Polytope, b: Polytope, tol: float | None = None) -> bool:
    """Vertex sets coincide (exactly, or pointwise within ``tol``)."""
    if a.dim != b.dim:
        raise RegionError("dimension mismatch in equals")
    va, vb = vertices(a), vertices(b)
    if tol is None:
        return set(va) == set(vb)

    def close(u, v):
        return all(abs(float(x) - float(y)) <= tol for x, y in zip(u, v))

    return all(any(close(u, v) for v in vb) for u in va) and all(any(close(u, v) for u in va) for v in vb)


def scale(p: Polytope, c) -> Polytope:
    c = as_fraction(c)
    if c < 0:
        raise RegionError("scale factor must be nonnegative")
    if c == 0:
        return hull_of([tuple(Fraction(0) for _ in range(p.dim))])
    hs = [HalfSpace(h.coeffs, h.rhs * c) for h in p.halfspaces]
    verts = None if p._vertices is None else [tuple(x * c for x in v) for v in p._vertices]
    return Polytope(p.dim, hs, verts)


def translate_clip(p: Polytope, offset: Sequence, max_dim: int = MAX_DIM) -> Polytope:
    """Shift by ``offset`` and intersect with the nonnegative orthant."""
    off = [as_fraction(v) for v in offset]
    if len(off) != p.dim:
        raise RegionError("dimension mismatch in translate_clip")
    hs = [HalfSpace(h.coeffs, h.rhs + h.value(off)) for h in p.halfspaces]
    q = Polytope(p.dim, hs)
    vertices(q, max_dim)
    return q


def box(upper: Sequence) -> Polytope:
    """Axis-aligned box prod [0, upper_i]."""
    up = [as_fraction(u) for u in upper]
    dim = len(up)
    hs = []
    for i, u in enumerate(up):
        e = [Fraction(0)] * dim
        e[i] = Fraction(1)
        hs.append(HalfSpace(tuple(e), u))
    corners = [()]
    for u in up:
        corners = [c + (x,) for c in corners for x in ({Fraction(0), u})]
    return Polytope(dim, hs, corners)


def project(points: Iterable[Sequence], matrix: Sequence[Sequence], dim: int) -> Polytope:
    """Hull of the images of ``points`` under the linear map ``matrix`` (dim x n)."""
    imgs = {tuple(_dot(row, p) for row in matrix) for p in points}
    return hull_of(imgs, dim)


# ---------------------------------------------------------------- JSON

def _fmt(v: Fraction, exact: bool):
    return f"{v.numerator}/{v.denominator}" if exact else float(v)


def to_json(p: Polytope, exact: bool = True) -> dict:
    return {
        "dim": p.dim,
        "halfspaces": [{"coeffs": [_fmt(c, exact) for c in h.coeffs], "rhs": _fmt(h.rhs, exact)}
                       for h in p.halfspaces],
        "vertices": [[_fmt(c, exact) for c in v] for v in vertices(p, max(MAX_DIM, p.dim))],
    }


def from_json(d: dict) -> Polytope:
    try:
        dim = int(d["dim"])
        hs = [HalfSpace(tuple(as_fraction(c) for c in h["coeffs"]), as_fraction(h["rhs"]))
              for h in d["halfspaces"]]
        verts = d.get("vertices")
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise RegionError(f"malformed region JSON: {exc}") from exc
    return Polytope(dim, hs, verts)
