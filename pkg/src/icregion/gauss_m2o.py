"""Gaussian many-to-one interference channel: outer bounds, the lattice-level
inner region, the constant-gap certificate, and the GDoF region.

Noise power is normalized to 1, so SNR_i and INR_i are the only inputs and all
rates are in bits.  Gaussian regions are exact polytopes over dyadic rationals:
every rate is snapped to a multiple of 2^-40, upward for outer bounds and
downward for inner regions, so containment checks never fail by rounding.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .det_capacity import outer_bound, per_level_region
from .det_channel import ManyToOneGains
from .region import (
    HalfSpace,
    Polytope,
    box,
    dyadic,
    minkowski_sum_all,
    scale,
    vertices,
)

MAX_K = 6


class GaussError(ValueError):
    pass


def _log2(x: float) -> float:
    return math.log2(x)


def _pos(x: float) -> float:
    return x if x > 0 else 0.0


def _check_positive(name: str, vals: Sequence[float]) -> tuple[float, ...]:
    out = []
    for v in vals:
        v = float(v)
        if not math.isfinite(v) or v <= 0:
            raise GaussError(f"{name} entries must be positive and finite, got {v}")
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class GaussManyToOneParams:
    """snr[i] = SNR_i for users 0..K; inr[i-1] = INR_i seen at receiver 0."""

    snr: tuple[float, ...]
    inr: tuple[float, ...]

    def __post_init__(self):
        snr = _check_positive("snr", self.snr)
        inr = _check_positive("inr", self.inr)
        if len(snr) != len(inr) + 1:
            raise GaussError("need K+1 SNR values and K INR values")
        object.__setattr__(self, "snr", snr)
        object.__setattr__(self, "inr", inr)

    @property
    def k(self) -> int:
        return len(self.inr)

    def ratio(self, i: int) -> float:
        """INR_i / SNR_i."""
        return self.inr[i - 1] / self.snr[i]

    @staticmethod
    def from_db(snr_db: Sequence[float], inr_db: Sequence[float]) -> "GaussManyToOneParams":
        return GaussManyToOneParams(tuple(10 ** (v / 10) for v in snr_db),
                                    tuple(10 ** (v / 10) for v in inr_db))

    def to_json(self) -> dict:
        return {"snr": list(self.snr), "inr": list(self.inr)}

    @staticmethod
    def from_json(d: dict) -> "GaussManyToOneParams":
        try:
            return GaussManyToOneParams(tuple(d["snr"]), tuple(d["inr"]))
        except (KeyError, TypeError) as exc:
            raise GaussError(f"malformed Gaussian params: {exc}") from exc


def log_uniform_gains(rnd: random.Random, k: int, hi: float = 1e6) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """K+1 SNRs then K INRs, each log-uniform on [1, hi]."""
    e = math.log10(hi)
    draw = lambda: 10 ** (e * rnd.random())
    snr = tuple(draw() for _ in range(k + 1))
    return snr, tuple(draw() for _ in range(k))


# ------------------------------------------------------------ inner region

@dataclass(frozen=True)
class LevelPartition:
    q: tuple[float, ...]                 # q_0 = 1 < q_1 < ... < q_M
    theta: tuple[float, ...]             # theta[k-1] = q_k - q_{k-1}
    level_users: tuple[frozenset[int], ...]
    k_max: tuple[int, ...]               # highest level each user reaches (0 if none)

    @property
    def m(self) -> int:
        return len(self.q) - 1


def level_partition(p: GaussManyToOneParams) -> LevelPartition:
    cands = {p.snr[0]} | set(p.inr) | {p.ratio(i) for i in range(1, p.k + 1)}
    q = (1.0,) + tuple(sorted(v for v in cands if v > 1))
    theta = tuple(q[k] - q[k - 1] for k in range(1, len(q)))
    users = tuple(
        frozenset(i for i in range(1, p.k + 1) if p.ratio(i) <= q[k - 1] and q[k] <= p.inr[i - 1])
        for k in range(1, len(q)))
    top = [p.snr[0]] + list(p.inr)
    k_max = tuple(q.index(t) if t > 1 else 0 for t in top)
    return LevelPartition(q, theta, users, k_max)


def lattice_rates(part: LevelPartition, k: int) -> tuple[float, ...]:
    """Per-level lattice rate; level 1 sees noise at most (K+1), level k > 1 at most K q_{k-1}."""
    rates = []
    for lev in range(1, part.m + 1):
        if lev == 1:
            r = _log2(part.q[1] - 1) - _log2(k + 1) if part.q[1] > 1 else 0.0
        else:
            r = _log2(part.q[lev]) - _log2(part.q[lev - 1]) - 1 - (_log2(k) if k else 0.0)
        rates.append(_pos(r))
    return tuple(rates)


def free_rates(p: GaussManyToOneParams, part: LevelPartition | None = None) -> tuple[float, ...]:
    """Rates each interferer gets on levels user 0 never uses.

    Below receiver 0's noise: (log SNR_i - (log INR_i)^+)^+.  Above user 0's
    top level: the part of the signal above max(SNR_0, INR_i/SNR_i, 1), less
    the log K per remaining level penalty.
    """
    part = part or level_partition(p)
    pen = (part.m - part.k_max[0]) * (_log2(p.k) if p.k else 0.0)
    out = [0.0]
    for i in range(1, p.k + 1):
        inr, snr = p.inr[i - 1], p.snr[i]
        below = _pos(_log2(snr) - _pos(_log2(inr)))
        floor = max(p.snr[0], p.ratio(i), 1.0)
        above = _pos(_pos(_log2(inr) - _log2(floor)) - pen)
        out.append(below + above)
    return tuple(out)


def inner_region(p: GaussManyToOneParams) -> Polytope:
    if p.k > MAX_K:
        raise GaussError(f"inner region limited to K <= {MAX_K}")
    if p.k == 0:
        # nothing to align against, so a Gaussian codebook reaches capacity
        return box([dyadic(_log2(1 + p.snr[0]), up=False)])
    part = level_partition(p)
    rates = lattice_rates(part, p.k)
    parts = [box([dyadic(r, up=False) for r in free_rates(p, part)])]
    for lev in range(1, part.k_max[0] + 1):
        r = dyadic(rates[lev - 1], up=False)
        if r > 0:
            parts.append(scale(per_level_region(part.level_users[lev - 1], p.k), r))
    return minkowski_sum_all(parts)


# ------------------------------------------------------------ outer bounds

def subset_valid(p: GaussManyToOneParams, S) -> tuple[bool, tuple[int, ...]]:
    """Order S by INR_i/SNR_i (ties by index) and test the validity conditions."""
    order = tuple(sorted(S, key=lambda i: (p.ratio(i), i)))
    if not order:
        return False, order
    ok = p.snr[0] > 1 and p.ratio(order[-1]) <= p.snr[0]
    ok = ok and all(p.inr[i - 1] > 1 for i in order)
    ok = ok and all(p.inr[a - 1] <= p.inr[b - 1] for a, b in zip(order, order[1:]))
    return ok, order


def outer_sum_rate_loose(p: GaussManyToOneParams, order: Sequence[int], plus_one: bool = False) -> float:
    m = len(order)
    inr = [p.inr[i - 1] for i in order]
    ratio = [p.ratio(i) for i in order]
    val = sum(_pos(-_log2(r)) for r in ratio)
    val += sum(_pos(_log2(inr[j]) - _pos(_log2(ratio[j + 1]))) for j in range(m - 1))
    val += max(_log2(inr[-1]), _log2(p.snr[0]))
    val += (m + 2) * _log2(m + 1)
    return val + (1.0 if plus_one else 0.0)


def outer_sum_rate_tight(p: GaussManyToOneParams, order: Sequence[int],
                         derived_first_term: bool = False) -> float:
    """Sum-rate bound before loosening, with A_k = (SNR_k/INR_k) sum_{i=2..k} max(INR_i/SNR_i, 1).

    As displayed, the k=1 term has an empty sum so A_1 = 0.  The step that
    bounds h(y_1|s_1) actually gives A_1 = SNR_1/INR_1 + 1; set
    ``derived_first_term`` to use that instead.
    """
    m = len(order)
    snr = [p.snr[i] for i in order]
    inr = [p.inr[i - 1] for i in order]
    mx = [max(p.ratio(i), 1.0) for i in order]
    val = 1.0
    val += sum(_log2(inr[j] + mx[j + 1]) for j in range(m - 1))
    val += _log2(inr[-1] + p.snr[0])
    for j in range(m):
        a = (snr[0] / inr[0] + 1 if derived_first_term else 0.0) if j == 0 else snr[j] / inr[j] * sum(mx[1:j + 1])
        val += _log2(1 + snr[j] * a / (snr[j] + a))
    val += _log2(2 * p.snr[0] + sum(mx[1:]))
    val -= sum(_log2(v) for v in mx[1:])
    val -= _log2(p.snr[0])
    return val


@dataclass(frozen=True)
class OuterConstraints:
    sums: tuple[tuple[tuple[int, ...], float], ...]
    skipped: tuple[tuple[int, ...], ...]


def outer_constraints(p: GaussManyToOneParams, form: str = "loose") -> OuterConstraints:
    if form not in ("loose", "tight"):
        raise GaussError(f"unknown outer form {form!r}")
    sums, skipped = [], []
    for size in range(1, p.k + 1):
        for S in itertools.combinations(range(1, p.k + 1), size):
            ok, order = subset_valid(p, S)
            if not ok:
                skipped.append(S)
                continue
            rhs = outer_sum_rate_loose(p, order) if form == "loose" else outer_sum_rate_tight(p, order)
            sums.append((S, rhs))
    return OuterConstraints(tuple(sums), tuple(skipped))


def outer_region(p: GaussManyToOneParams, form: str = "loose") -> Polytope:
    dim = p.k + 1
    hs = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        hs.append(HalfSpace(tuple(e), dyadic(_log2(1 + p.snr[i]), up=True)))
    for S, rhs in outer_constraints(p, form).sums:
        c = [1] + [1 if i in S else 0 for i in range(1, dim)]
        hs.append(HalfSpace(tuple(c), dyadic(rhs, up=True)))
    return Polytope(dim, hs)


# ------------------------------------------------------------ gap

def gap_bits(k: int) -> tuple[float, bool]:
    """Per-user gap and whether the K=1 substitute was used."""
    if k == 0:
        return 0.0, False
    if k == 1:
        return 7.0, True
    return (2 * k + 5) * _log2(k), False


def clip_shift(v: Sequence, offset: Sequence[float]) -> tuple[float, ...]:
    return tuple(max(float(x) - o, 0.0) for x, o in zip(v, offset))


def _room(inner: Polytope, w: Sequence[float]) -> tuple[float, list[float]]:
    """Smallest upper-facet slack at w, and per coordinate the distance to the boundary.

    w is already clipped to the orthant, so facets r_i >= 0 are skipped.
    """
    slack = math.inf
    room = [math.inf] * inner.dim
    for h in inner.halfspaces:
        if all(c <= 0 for c in h.coeffs):
            continue
        s = float(h.rhs) - sum(float(c) * x for c, x in zip(h.coeffs, w))
        slack = min(slack, s)
        for i, c in enumerate(h.coeffs):
            if c > 0:
                room[i] = min(room[i], s / float(c))
    return slack, room


def translation_certificate(outer: Polytope, inner: Polytope, offset: Sequence[float],
                            tol: float = 1e-6) -> dict:
    """Check clip0(v - offset) in inner for each vertex v of outer."""
    worst, worst_v = math.inf, None
    per_user = [math.inf] * outer.dim
    failures = []
    for v in vertices(outer):
        w = clip_shift(v, offset)
        slack, room = _room(inner, w)
        if slack < -tol:
            failures.append([float(x) for x in v])
        if slack < worst:
            worst, worst_v = slack, v
        per_user = [min(a, b) for a, b in zip(per_user, room)]
    return {
        "certified": not failures,
        "worst_vertex": [float(x) for x in worst_v] if worst_v is not None else [],
        "worst_slack": worst,
        "per_user_slack": per_user,
        "failures": failures,
    }


def gap_certificate(p: GaussManyToOneParams, tol: float = 1e-6) -> dict:
    g, substituted = gap_bits(p.k)
    rep = translation_certificate(outer_region(p, "loose"), inner_region(p), [g] * (p.k + 1), tol)
    rep.update({
        "gap_bits": g,
        "k1_substitute": substituted,
        "skipped_subsets": [list(S) for S in outer_constraints(p, "loose").skipped],
    })
    return rep


# ------------------------------------------------------------ GDoF

@dataclass(frozen=True)
class GdofSpec:
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def __post_init__(self):
        try:
            a = tuple(Fraction(x) for x in self.alpha)
            b = tuple(Fraction(x) for x in self.beta)
        except (TypeError, ValueError) as exc:
            raise GaussError(f"exponents must be rational: {exc}") from exc
        if len(a) != len(b) + 1 or any(x < 0 for x in a + b):
            raise GaussError("need K+1 alpha and K beta, all nonnegative")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def k(self) -> int:
        return len(self.beta)


def gdof_subset_valid(spec: GdofSpec, S) -> tuple[bool, tuple[int, ...]]:
    a, b = spec.alpha, spec.beta
    order = tuple(sorted(S, key=lambda i: (b[i - 1] - a[i], i)))
    if not order:
        return False, order
    m = order[-1]
    ok = a[0] > 0 and b[m - 1] - a[m] <= a[0] and all(b[i - 1] > 0 for i in order)
    return ok, order


def gdof_sum_bound(spec: GdofSpec, order: Sequence[int]) -> Fraction:
    a, b = spec.alpha, spec.beta
    pos = lambda x: x if x > 0 else Fraction(0)  # noqa: E731
    val = sum((pos(a[i] - b[i - 1]) for i in order), Fraction(0))
    val += sum((pos(b[i - 1] - pos(b[j - 1] - a[j])) for i, j in zip(order, order[1:])), Fraction(0))
    return val + max(b[order[-1] - 1], a[0])


def gdof_region(spec: GdofSpec) -> Polytope:
    dim = spec.k + 1
    hs = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        hs.append(HalfSpace(tuple(e), spec.alpha[i]))
    for size in range(1, spec.k + 1):
        for S in itertools.combinations(range(1, spec.k + 1), size):
            ok, order = gdof_subset_valid(spec, S)
            if ok:
                c = [1] + [1 if i in S else 0 for i in range(1, dim)]
                hs.append(HalfSpace(tuple(c), gdof_sum_bound(spec, order)))
    return Polytope(dim, hs)


def gdof_deterministic_equivalent(spec: GdofSpec) -> tuple[int, ManyToOneGains]:
    """Common denominator T and the deterministic channel with n = T * exponents."""
    T = math.lcm(*(x.denominator for x in spec.alpha + spec.beta))
    return T, ManyToOneGains(spec.k, tuple(int(x * T) for x in spec.alpha),
                             tuple(int(x * T) for x in spec.beta))


def gdof_scaled_deterministic(spec: GdofSpec) -> Polytope:
    T, g = gdof_deterministic_equivalent(spec)
    return scale(outer_bound(g), Fraction(1, T))
