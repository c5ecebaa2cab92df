"""Capacity regions of deterministic many-to-one and one-to-many channels.

Rate vectors are indexed (r_0, r_1, ..., r_K).  The outer bound is the box
r_i <= n_ii cut by one sum-rate constraint per nonempty interferer set S; the
achievable region is a Minkowski sum of one small polytope per level of
user 0's signal plus a box of interference-free rates.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .det_channel import (
    InterferencePattern,
    ManyToOneGains,
    OneToManyGains,
    interference_sets,
    one_to_many_interference_sets,
    transmit_many_to_one_batch,
)
from .region import (
    HalfSpace,
    Point,
    Polytope,
    box,
    equals,
    minkowski_sum_all,
    project,
    scale,
    vertices,
)

MAX_SUBSET_K = 16


class CapacityError(ValueError):
    pass


class AllocationError(CapacityError):
    pass


def _pos(x: int) -> int:
    return x if x > 0 else 0


def f_free(g: ManyToOneGains, i: int) -> int:
    """(n_ii - n_0i)^+ + (n_0i - n_00)^+."""
    if not 1 <= i <= g.k:
        raise CapacityError(f"f_free is defined for users 1..K, got {i}")
    return _pos(g.direct(i) - g.cross(i)) + _pos(g.cross(i) - g.n00)


def free_levels(g: ManyToOneGains | OneToManyGains, i: int) -> int:
    """Number of user i's levels that never meet user 0's signal.

    Equals f_free except when the whole word of user i sits above user 0's top
    level, where f_free counts n_0i - n_00 levels but only n_ii exist.
    """
    return min(g.direct(i), _pos(g.direct(i) - g.cross(i)) + _pos(g.cross(i) - g.n00))


def f_k(pattern: InterferencePattern, k: int, S: Iterable[int]) -> int:
    return max(len(pattern.level(k) & frozenset(S)), 1)


def _subsets(k: int):
    if k > MAX_SUBSET_K:
        raise CapacityError(f"2^K constraint guard: K={k} > {MAX_SUBSET_K}")
    users = range(1, k + 1)
    for size in range(1, k + 1):
        yield from (frozenset(c) for c in itertools.combinations(users, size))


@dataclass(frozen=True, order=True)
class ConstraintSpec:
    """An individual bound on r_i, or the sum-rate bound on r_0 + sum_{i in S} r_i."""

    kind: str
    users: tuple[int, ...]

    @staticmethod
    def individual(i: int) -> "ConstraintSpec":
        return ConstraintSpec("individual", (int(i),))

    @staticmethod
    def sumrate(S: Iterable[int]) -> "ConstraintSpec":
        users = tuple(sorted(int(i) for i in S))
        if not users or 0 in users:
            raise CapacityError("sum-rate set must be nonempty and exclude user 0")
        return ConstraintSpec("sumrate", users)

    def coeffs(self, k: int) -> tuple[int, ...]:
        c = [0] * (k + 1)
        if self.kind == "individual":
            c[self.users[0]] = 1
        else:
            c[0] = 1
            for i in self.users:
                c[i] = 1
        return tuple(c)

    def __str__(self) -> str:
        if self.kind == "individual":
            return f"r_{self.users[0]}"
        return "r_0+" + "+".join(f"r_{i}" for i in self.users)


def sumrate_rhs(g: ManyToOneGains, S: Iterable[int], pattern: InterferencePattern | None = None) -> int:
    S = frozenset(S)
    pattern = pattern or interference_sets(g)
    return sum(f_free(g, i) for i in S) + sum(f_k(pattern, k, S) for k in range(1, g.n00 + 1))


def outer_constraints(g: ManyToOneGains) -> list[tuple[ConstraintSpec, HalfSpace]]:
    pattern = interference_sets(g)
    out = []
    for i in range(g.k + 1):
        spec = ConstraintSpec.individual(i)
        out.append((spec, HalfSpace(spec.coeffs(g.k), g.direct(i))))
    for S in _subsets(g.k):
        spec = ConstraintSpec.sumrate(S)
        out.append((spec, HalfSpace(spec.coeffs(g.k), sumrate_rhs(g, S, pattern))))
    return out


def outer_bound(g: ManyToOneGains) -> Polytope:
    return Polytope(g.k + 1, [h for _, h in outer_constraints(g)])


@lru_cache(maxsize=4096)
def per_level_region(U: frozenset[int], k: int) -> Polytope:
    """One level: either user 0 or any subset of the users in U transmits."""
    U = frozenset(U)
    dim = k + 1
    rows = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        rows.append((e, 1 if i == 0 or i in U else 0))
    for i in sorted(U):
        c = [0] * dim
        c[0] = c[i] = 1
        rows.append((c, 1))
    verts = [tuple([1] + [0] * k)]
    members = sorted(U)
    for size in range(len(members) + 1):
        for T in itertools.combinations(members, size):
            verts.append(tuple([0] + [1 if i in T else 0 for i in range(1, dim)]))
    return Polytope(dim, [HalfSpace(tuple(c), r) for c, r in rows], verts)


def free_region(g: ManyToOneGains) -> Polytope:
    return box([0] + [free_levels(g, i) for i in range(1, g.k + 1)])


def achievable_region(g: ManyToOneGains) -> Polytope:
    """Free box plus the sum over levels of the per-level regions."""
    if g.k + 1 > 7:
        raise CapacityError("exact achievable region limited to K <= 6")
    counts = Counter(interference_sets(g).sets)
    parts = [free_region(g)]
    for U in sorted(counts, key=lambda s: (len(s), sorted(s))):
        parts.append(scale(per_level_region(U, g.k), counts[U]))
    return minkowski_sum_all(parts)


# ------------------------------------------------------------ constraint graph

@dataclass(frozen=True)
class ConstraintGraph:
    left: tuple[ConstraintSpec, ...]
    levels: int
    solid: dict = field(hash=False)
    dashed: dict = field(hash=False)

    def solid_edges(self) -> set[tuple[ConstraintSpec, int]]:
        return {(c, k) for c, ks in self.solid.items() for k in ks}

    def dashed_edges(self) -> set[tuple[ConstraintSpec, int]]:
        return {(c, k) for c, ks in self.dashed.items() for k in ks}


def constraint_graph(g: ManyToOneGains) -> ConstraintGraph:
    """Bipartite graph between constraints and levels 1..n_00.

    Sum-rate S: solid to k when |U_k & S| >= 2, dashed when U_k & S is empty.
    Individual i >= 1: solid to the levels where i interferes.  Individual 0:
    dashed to every level (user 0 must own them all to meet r_0 = n_00).
    """
    pattern = interference_sets(g)
    levels = range(1, g.n00 + 1)
    left, solid, dashed = [], {}, {}
    for i in range(g.k + 1):
        c = ConstraintSpec.individual(i)
        left.append(c)
        if i == 0:
            solid[c], dashed[c] = frozenset(), frozenset(levels)
        else:
            solid[c] = frozenset(k for k in levels if i in pattern.level(k))
            dashed[c] = frozenset()
    for S in _subsets(g.k):
        c = ConstraintSpec.sumrate(S)
        left.append(c)
        solid[c] = frozenset(k for k in levels if len(pattern.level(k) & S) >= 2)
        dashed[c] = frozenset(k for k in levels if not pattern.level(k) & S)
    return ConstraintGraph(tuple(left), g.n00, solid, dashed)


def is_compatible(graph: ConstraintGraph, chosen: Iterable[ConstraintSpec]) -> bool:
    chosen = list(chosen)
    solid = set().union(*(graph.solid[c] for c in chosen)) if chosen else set()
    dashed = set().union(*(graph.dashed[c] for c in chosen)) if chosen else set()
    return not (solid & dashed)


def _halfspace_for(outer: Polytope, spec: ConstraintSpec) -> HalfSpace:
    want = tuple(Fraction(v) for v in spec.coeffs(outer.dim - 1))
    matches = [h for h in outer.halfspaces if h.coeffs == want]
    if not matches:
        raise CapacityError(f"constraint {spec} is not a half-space of the region")
    return min(matches, key=lambda h: h.rhs)


def is_consistent(outer: Polytope, chosen: Iterable[ConstraintSpec]) -> bool:
    """Some point of ``outer`` meets every chosen constraint with equality."""
    extra = []
    for spec in chosen:
        h = _halfspace_for(outer, spec)
        extra.append(HalfSpace(tuple(-c for c in h.coeffs), -h.rhs))
    return bool(vertices(Polytope(outer.dim, list(outer.halfspaces) + extra)))


def tight_constraints(g: ManyToOneGains, point: Sequence) -> frozenset[ConstraintSpec]:
    return frozenset(spec for spec, h in outer_constraints(g) if h.value(point) == h.rhs)


# ------------------------------------------------------------ allocations

USER0, INTERFERERS, SILENT = "user0", "interferers", "silent"


@dataclass(frozen=True)
class LevelOwner:
    owner: str
    users: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.owner not in (USER0, INTERFERERS, SILENT):
            raise AllocationError(f"unknown owner {self.owner!r}")
        if (self.owner == INTERFERERS) != bool(self.users):
            raise AllocationError("interferer-owned levels need a nonempty active set")


@dataclass(frozen=True)
class LevelAllocation:
    """owners[k-1] says who transmits on level k; free_rates[i] counts user i's
    interference-free levels in use (free_rates[0] is always 0)."""

    owners: tuple[LevelOwner, ...]
    free_rates: tuple[int, ...]

    def induced_rates(self, k: int) -> tuple[int, ...]:
        r = list(self.free_rates)
        for o in self.owners:
            if o.owner == USER0:
                r[0] += 1
            elif o.owner == INTERFERERS:
                for i in o.users:
                    r[i] += 1
        return tuple(r)

    def to_json(self) -> dict:
        levels = []
        for k, o in enumerate(self.owners, 1):
            item = {"k": k, "owner": o.owner}
            if o.owner == INTERFERERS:
                item["users"] = sorted(o.users)
            levels.append(item)
        return {"levels": levels, "free_rates": list(self.free_rates)}

    @staticmethod
    def from_json(d: dict) -> "LevelAllocation":
        items = sorted(d["levels"], key=lambda it: it["k"])
        owners = tuple(LevelOwner(it["owner"], frozenset(it.get("users", ()))) for it in items)
        return LevelAllocation(owners, tuple(int(v) for v in d["free_rates"]))


def _validate_allocation(g: ManyToOneGains, alloc: LevelAllocation) -> None:
    pattern = interference_sets(g)
    if len(alloc.owners) != g.n00 or len(alloc.free_rates) != g.k + 1:
        raise AllocationError("allocation shape does not match the channel")
    if alloc.free_rates[0] != 0:
        raise AllocationError("user 0 has no interference-free levels")
    for k, o in enumerate(alloc.owners, 1):
        if o.owner == INTERFERERS and not o.users <= pattern.level(k):
            raise AllocationError(f"level {k}: active users {sorted(o.users)} not in U_k")
    for i in range(1, g.k + 1):
        if not 0 <= alloc.free_rates[i] <= free_levels(g, i):
            raise AllocationError(f"user {i}: free rate out of range")


def _target_for(g: ManyToOneGains, chosen: list[ConstraintSpec]) -> Point:
    outer = outer_bound(g)
    hs = [_halfspace_for(outer, c) for c in chosen]
    cands = [v for v in vertices(outer) if all(h.value(v) == h.rhs for h in hs)]
    if not cands:
        raise AllocationError("chosen constraints are not simultaneously tight anywhere")
    # maximal fill: largest total rate, ties broken lexicographically from the top
    return max(cands, key=lambda v: (sum(v), v))


def allocation_for(g: ManyToOneGains, chosen: Iterable[ConstraintSpec],
                   target: Sequence | None = None) -> LevelAllocation:
    """Level assignment meeting every chosen constraint with equality.

    Levels solid-adjacent to a chosen constraint go to the interferers that
    constraint needs, dashed-adjacent levels go to user 0, and the remaining
    levels (and free rates) are settled in ascending level order so that the
    induced rate point equals ``target``: by default the tight outer-bound
    vertex with the largest total rate.
    """
    chosen = sorted(set(chosen))
    graph = constraint_graph(g)
    if not is_compatible(graph, chosen):
        raise AllocationError("constraint set is not compatible")
    pattern = interference_sets(g)
    tgt = _target_for(g, chosen) if target is None else tuple(Fraction(v) for v in target)
    if len(tgt) != g.k + 1 or any(v.denominator != 1 or v < 0 for v in tgt):
        raise AllocationError("target must be a nonnegative integer rate vector")
    tgt = tuple(int(v) for v in tgt)

    need: dict[int, set[int]] = {k: set() for k in range(1, g.n00 + 1)}
    to_user0: set[int] = set()
    for c in chosen:
        to_user0 |= graph.dashed[c]
        for k in graph.solid[c]:
            U = pattern.level(k)
            need[k] |= (U & frozenset(c.users)) if c.kind == "sumrate" else {c.users[0]}
    prefer_user0 = ConstraintSpec.individual(0) in chosen

    options = []
    for k in range(1, g.n00 + 1):
        U = sorted(pattern.level(k))
        if k in to_user0:
            options.append([LevelOwner(USER0)])
            continue
        subsets = [LevelOwner(INTERFERERS, frozenset(T))
                   for size in range(len(U), 0, -1)
                   for T in itertools.combinations(U, size) if need[k] <= set(T)]
        if need[k]:
            options.append(subsets)
        elif prefer_user0:
            options.append([LevelOwner(USER0)] + subsets + [LevelOwner(SILENT)])
        else:
            options.append(subsets + [LevelOwner(USER0), LevelOwner(SILENT)])

    free_cap = [0] + [free_levels(g, i) for i in range(1, g.k + 1)]
    n = len(options)
    counts = [0] * (g.k + 1)
    picked: list[LevelOwner] = []

    def walk(idx: int) -> bool:
        if counts[0] + (n - idx) < tgt[0]:
            return False
        if idx == n:
            if counts[0] != tgt[0]:
                return False
            return all(0 <= tgt[i] - counts[i] <= free_cap[i] for i in range(1, g.k + 1))
        for o in options[idx]:
            inc = [0] if o.owner == USER0 else sorted(o.users) if o.owner == INTERFERERS else []
            if any(counts[i] + 1 > tgt[i] for i in inc):
                continue
            for i in inc:
                counts[i] += 1
            picked.append(o)
            if walk(idx + 1):
                return True
            picked.pop()
            for i in inc:
                counts[i] -= 1
        return False

    if not walk(0):
        raise AllocationError(f"no level assignment realizes {tgt}")
    free = tuple([0] + [tgt[i] - counts[i] for i in range(1, g.k + 1)])
    return LevelAllocation(tuple(picked), free)


def _positions(g: ManyToOneGains, alloc: LevelAllocation) -> list[list[int]]:
    """Word positions (MSB first) each transmitter fills with fresh bits."""
    pos = [[g.n00 - k for k, o in enumerate(alloc.owners, 1) if o.owner == USER0]]
    for i in range(1, g.k + 1):
        p_i = [g.cross(i) - k for k, o in enumerate(alloc.owners, 1)
               if o.owner == INTERFERERS and i in o.users]
        free = [p for p in range(g.direct(i)) if not 1 <= g.cross(i) - p <= g.n00]
        # unused free levels are dropped from the bottom
        pos.append(sorted(p_i + free[:alloc.free_rates[i]]))
    return pos


def verify_corner_zero_error(g: ManyToOneGains, alloc: LevelAllocation,
                             num_symbols: int = 1000, seed: int = 0) -> dict:
    """Send uniform bits on the allocated levels through the channel and decode.

    Receiver 0 reads only the levels user 0 owns; receiver i reads its own word.
    """
    _validate_allocation(g, alloc)
    if num_symbols < 1:
        raise AllocationError("num_symbols must be positive")
    rng = np.random.default_rng(seed)
    pos = _positions(g, alloc)
    xs = []
    for i in range(g.k + 1):
        x = np.zeros((num_symbols, g.direct(i)), dtype=np.uint8)
        if pos[i]:
            x[:, pos[i]] = rng.integers(0, 2, size=(num_symbols, len(pos[i])), dtype=np.uint8)
        xs.append(x)
    ys = transmit_many_to_one_batch(g, xs)
    q0 = ys[0].shape[1]
    errors, correct = 0, []
    for i in range(g.k + 1):
        if i == 0:
            got = ys[0][:, [q0 - (g.n00 - p) for p in pos[0]]]
        else:
            got = ys[i][:, pos[i]]
        bad = int(np.count_nonzero(got != xs[i][:, pos[i]]))
        errors += bad
        correct.append(got.size - bad)
    target = alloc.induced_rates(g.k)
    return {
        "errors": errors,
        "symbols": num_symbols,
        "empirical_rates": [Fraction(c, num_symbols) for c in correct],
        "target_rates": [Fraction(t) for t in target],
    }


# ------------------------------------------------------------ one-to-many

def one_to_many_outer(g: OneToManyGains) -> Polytope:
    """r_i <= n_ii and, per nonempty S,
    r_0 + sum_S r_i <= n_00 + sum_k (|U_k & S| - 1)^+ + sum_S [(n_ii-n_i0)^+ + (n_i0-n_00)^+]."""
    pattern = one_to_many_interference_sets(g)
    hs = []
    for i in range(g.k + 1):
        hs.append(HalfSpace(ConstraintSpec.individual(i).coeffs(g.k), g.direct(i)))
    for S in _subsets(g.k):
        rhs = g.n00 + sum(_pos(len(U & S) - 1) for U in pattern.sets)
        rhs += sum(_pos(g.direct(i) - g.cross(i)) + _pos(g.cross(i) - g.n00) for i in S)
        hs.append(HalfSpace(ConstraintSpec.sumrate(S).coeffs(g.k), rhs))
    return Polytope(g.k + 1, hs)


@dataclass(frozen=True)
class HKStructure:
    """Users sorted by n_i0; caps[j] bounds R_0(j+1); lam[j] is lambda of sorted user j+1."""

    perm: tuple[int, ...]
    caps: tuple[int, ...]
    lam: tuple[int, ...]


def hk_structure(g: OneToManyGains) -> HKStructure:
    perm = tuple(sorted(range(1, g.k + 1), key=lambda i: (g.cross(i), i)))
    n00 = g.n00
    nprime = [0] + [g.cross(i) for i in perm]
    caps = [min(nprime[j], n00) - min(nprime[j - 1], n00) for j in range(1, g.k + 1)]
    caps.append(n00 - min(nprime[-1], n00))
    lam = []
    for j, i in enumerate(perm, 1):
        v = g.cross(i) - g.direct(i)
        if v < 0:
            lam.append(0)
        else:
            # sub-signal of x_0 holding the level where x_i's top bit lands
            lam.append(next((l for l in range(1, j + 1) if nprime[l - 1] <= v < nprime[l]), j + 1))
    return HKStructure(perm, tuple(caps), tuple(lam))


def one_to_many_hk_lifted(g: OneToManyGains) -> tuple[Polytope, HKStructure]:
    """Polytope over (R_0(1..K+1), r_perm(1..K)) from the sub-signal scheme."""
    st = hk_structure(g)
    K = g.k
    dim = 2 * K + 1
    nprime = [0] + [g.cross(i) for i in st.perm]

    def row(R: Iterable[int], user: int | None):
        c = [0] * dim
        for j in R:
            c[j - 1] = 1
        if user is not None:
            c[K + user] = 1
        return tuple(c)

    hs = [HalfSpace(row([j], None), st.caps[j - 1]) for j in range(1, K + 2)]
    for j, i in enumerate(st.perm, 1):
        lam = st.lam[j - 1]
        hs.append(HalfSpace(row([], j), g.direct(i)))
        if 1 <= lam <= j:
            hs.append(HalfSpace(row(range(lam, j + 1), j), g.cross(i) - nprime[lam - 1]))
        if lam <= j and lam + 1 <= j:
            hs.append(HalfSpace(row(range(lam + 1, j + 1), j), g.direct(i)))
    return Polytope(dim, hs), st


def one_to_many_hk_region(g: OneToManyGains) -> Polytope:
    """Projection of the sub-signal region to (r_0 = sum R_0, r_1, ..., r_K)."""
    lifted, st = one_to_many_hk_lifted(g)
    K = g.k
    pts = vertices(lifted, max_dim=lifted.dim)
    mat = [[1] * (K + 1) + [0] * K]
    for i in range(1, K + 1):
        j = st.perm.index(i)
        mat.append([0] * (K + 1) + [1 if t == j else 0 for t in range(K)])
    return project(pts, mat, K + 1)


def reciprocity_check(m2o: ManyToOneGains) -> bool:
    rev = m2o.reversed()
    o2m = one_to_many_outer(rev)
    return equals(outer_bound(m2o), o2m) and equals(achievable_region(m2o), o2m)


def incompatible_tight_sets(g: ManyToOneGains) -> list[tuple[Point, frozenset[ConstraintSpec]]]:
    """Outer-bound vertices whose full tight set is not compatible."""
    graph = constraint_graph(g)
    bad = []
    for v in vertices(outer_bound(g)):
        tight = tight_constraints(g, v)
        if not is_compatible(graph, tight):
            bad.append((v, tight))
    return bad
