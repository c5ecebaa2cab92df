"""Gaussian one-to-many interference channel: outer bound, the rate-splitting
inner region, the (2K+1, 1, ..., 1) gap certificate, and the DoF region.

Transmitter 0 splits its power into K+1 superposed codebooks.  Codebook k sits
between the power levels at which receivers k-1 and k see it at their noise
floor, so receiver i can decode codebooks 1..i.  Rates are in bits with unit
noise; rate bounds are snapped to dyadics (outer up, inner down).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .det_capacity import one_to_many_outer
from .det_channel import OneToManyGains
from .gauss_m2o import GaussError, _check_positive, _log2, clip_shift, translation_certificate
from .region import HalfSpace, Polytope, dyadic, project, scale, vertices

MAX_K = 3


@dataclass(frozen=True)
class GaussOneToManyParams:
    """snr[i] = SNR_i for users 0..K; inr[i-1] = INR_i, user 0's power at receiver i."""

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

    @staticmethod
    def from_db(snr_db: Sequence[float], inr_db: Sequence[float]) -> "GaussOneToManyParams":
        return GaussOneToManyParams(tuple(10 ** (v / 10) for v in snr_db),
                                    tuple(10 ** (v / 10) for v in inr_db))

    def to_json(self) -> dict:
        return {"snr": list(self.snr), "inr": list(self.inr), "orientation": "one_to_many"}

    @staticmethod
    def from_json(d: dict) -> "GaussOneToManyParams":
        try:
            return GaussOneToManyParams(tuple(d["snr"]), tuple(d["inr"]))
        except (KeyError, TypeError) as exc:
            raise GaussError(f"malformed Gaussian params: {exc}") from exc


def canonical_order(p: GaussOneToManyParams) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Users with INR_i > 1 sorted by INR (ties by index), and the split-out rest."""
    active = tuple(sorted((i for i in range(1, p.k + 1) if p.inr[i - 1] > 1),
                          key=lambda i: (p.inr[i - 1], i)))
    weak = tuple(i for i in range(1, p.k + 1) if p.inr[i - 1] <= 1)
    return active, weak


# ------------------------------------------------------------ outer bound

def o2m_sum_rate(p: GaussOneToManyParams, order: Sequence[int]) -> float:
    """log(1 + SNR_0/(1+INR_m)) + log(1+SNR_1+INR_1) + sum_{i>=2} log(1 + SNR_i + INR_i/(1+INR_{i-1}))."""
    snr = [p.snr[i] for i in order]
    inr = [p.inr[i - 1] for i in order]
    val = _log2(1 + p.snr[0] / (1 + inr[-1])) + _log2(1 + snr[0] + inr[0])
    val += sum(_log2(1 + snr[j] + inr[j] / (1 + inr[j - 1])) for j in range(1, len(order)))
    return val


def o2m_outer_constraints(p: GaussOneToManyParams, skip_linear: bool = False):
    """Sum-rate bounds for every subset of the users with INR > 1.

    With ``skip_linear`` set, subsets whose strongest-interfered user has
    INR_m - SNR_0 > SNR_m are left out; those are returned as skipped.  That
    test is not sound in linear scale (receiver m cannot always strip user 0),
    so it is off by default.
    """
    active, _ = canonical_order(p)
    sums, skipped = [], []
    for size in range(1, len(active) + 1):
        for S in itertools.combinations(active, size):
            m = S[-1]
            if skip_linear and p.inr[m - 1] - p.snr[0] > p.snr[m]:
                skipped.append(tuple(sorted(S)))
                continue
            sums.append((tuple(sorted(S)), o2m_sum_rate(p, S)))
    return sums, skipped


def o2m_outer_region(p: GaussOneToManyParams, skip_linear: bool = False) -> Polytope:
    dim = p.k + 1
    hs = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        hs.append(HalfSpace(tuple(e), dyadic(_log2(1 + p.snr[i]), up=True)))
    for S, rhs in o2m_outer_constraints(p, skip_linear)[0]:
        c = [1] + [1 if i in S else 0 for i in range(1, dim)]
        hs.append(HalfSpace(tuple(c), dyadic(rhs, up=True)))
    return Polytope(dim, hs)


# ------------------------------------------------------------ inner region

@dataclass(frozen=True)
class O2MPartition:
    """Powers are normalized by P_0.  Index j runs over the active users in INR order.

    q[0] = 1, q[j] = max(1/INR_j, 1/SNR_0), q[K'+1] = 1/SNR_0; theta[j-1] = q[j-1] - q[j];
    r0[j-1] caps codebook j; lam[j-1] is lambda of active user j (j+1 means the user
    is never above its noise floor).
    """

    order: tuple[int, ...]
    q: tuple[float, ...]
    theta: tuple[float, ...]
    r0: tuple[float, ...]
    lam: tuple[int, ...]


SCHEMES = ("exact", "simplified")


def _check_scheme(scheme: str) -> None:
    if scheme not in SCHEMES:
        raise GaussError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def o2m_partition(p: GaussOneToManyParams, scheme: str = "exact") -> O2MPartition:
    """Power split, codebook rate caps and lambda.

    With ``scheme="simplified"`` codebook k is capped at log(1 + theta_k g_k / 3),
    a uniform lower bound on every decoder's SINR.  With ``"exact"`` the cap
    is the smallest actual SINR among the decoders that decode codebook k on
    its own: receiver 0, and each receiver j with k < lambda(j) <= j.
    """
    _check_scheme(scheme)
    if p.snr[0] <= 1:
        raise GaussError("the rate-splitting scheme needs SNR_0 > 1")
    order, _ = canonical_order(p)
    K = len(order)
    inr = [p.inr[i - 1] for i in order]
    floor = 1 / p.snr[0]
    # levels above user 0's noise floor at receiver 0 are dropped
    q = [1.0] + [max(1 / v, floor) for v in inr] + [floor]
    theta = [q[j - 1] - q[j] for j in range(1, K + 2)]
    top = [1.0] + [1 / v for v in inr]
    lam = []
    for j, i in enumerate(order, 1):
        ratio = p.snr[i] / inr[j - 1]
        if ratio > 1:
            lam.append(0)
            continue
        # smallest l with 1/INR_l < SNR_i/INR_i <= 1/INR_{l-1}, INR_0 = 1
        lam.append(next((l for l in range(1, j + 1) if top[l] < ratio <= top[l - 1]), j + 1))
    if scheme == "simplified":
        gains = [min(v, p.snr[0]) for v in inr] + [p.snr[0]]
        r0 = [_log2(1 + t * g / 3) for t, g in zip(theta, gains)]
    else:
        r0 = []
        for k in range(1, K + 2):
            # power user 0 actually sends below codebook k
            t, below = theta[k - 1], q[k] - q[-1]
            best = _log2(1 + t * p.snr[0] / (1 + p.snr[0] * below))
            for j, i in enumerate(order, 1):
                if k < lam[j - 1] <= j:
                    g = inr[j - 1]
                    best = min(best, _log2(1 + t * g / (1 + p.snr[i] + g * below)))
            r0.append(best)
    return O2MPartition(order, tuple(q), tuple(theta), tuple(r0), tuple(lam))


def o2m_inner_lifted(p: GaussOneToManyParams, scheme: str = "exact"
                     ) -> tuple[Polytope, O2MPartition, tuple[int, ...]]:
    """Region over (R_0(1..K'+1), r of active users in order, r of split-out users).

    ``"simplified"`` uses the simplified joint-decoding bounds
    r_i + sum_{k=lambda..i} R_0(k) <= log(INR_i / INR_{lambda-1}) and
    r_i + sum_{k=lambda+1..i} R_0(k) <= log SNR_i, which hold only up to a bit
    per user.  ``"exact"`` keeps every MAC bound of receiver i's joint stage
    that involves x_i, with codebooks below i as noise.
    """
    part = o2m_partition(p, scheme)
    _, weak = canonical_order(p)
    K = len(part.order)
    dim = 2 * K + 1 + len(weak)
    inr = [p.inr[i - 1] for i in part.order]

    def row(R, slot):
        c = [0] * dim
        for j in R:
            c[j - 1] = 1
        c[slot] = 1
        return tuple(c)

    def rhs(x: float) -> Fraction:
        return dyadic(max(x, 0.0), up=False)

    hs = []
    for j in range(1, K + 2):
        e = [0] * dim
        e[j - 1] = 1
        hs.append(HalfSpace(tuple(e), rhs(part.r0[j - 1])))
    for j, i in enumerate(part.order, 1):
        slot = K + j
        lam = part.lam[j - 1]
        snr, g = p.snr[i], inr[j - 1]
        if lam > j:
            # never above its own noise floor: everything from user 0 is noise
            hs.append(HalfSpace(row([], slot), rhs(_log2(1 + snr / (1 + g)))))
            continue
        if scheme == "simplified":
            hs.append(HalfSpace(row([], slot), rhs(_log2(snr))))
            if lam >= 1:
                prev = 1.0 if lam == 1 else inr[lam - 2]
                hs.append(HalfSpace(row(range(lam, j + 1), slot), rhs(_log2(g / prev))))
            if lam + 1 <= j:
                hs.append(HalfSpace(row(range(lam + 1, j + 1), slot), rhs(_log2(snr))))
            continue
        noise = 1 + g * (part.q[j] - part.q[-1])
        joint = list(range(max(lam, 1), j + 1))
        for size in range(len(joint) + 1):
            for L in itertools.combinations(joint, size):
                power = snr + g * sum(part.theta[k - 1] for k in L)
                hs.append(HalfSpace(row(L, slot), rhs(_log2(1 + power / noise))))
    for t, i in enumerate(weak):
        # interference below the noise floor: treat it as noise
        slot = 2 * K + 1 + t
        hs.append(HalfSpace(row([], slot), rhs(_log2(1 + p.snr[i] / (1 + p.inr[i - 1])))))
    return Polytope(dim, hs), part, weak


def o2m_inner_region(p: GaussOneToManyParams, scheme: str = "exact") -> Polytope:
    if p.k > MAX_K:
        raise GaussError(f"inner region limited to K <= {MAX_K}")
    lifted, part, weak = o2m_inner_lifted(p, scheme)
    K = len(part.order)
    mat = [[1] * (K + 1) + [0] * (lifted.dim - K - 1)]
    for i in range(1, p.k + 1):
        r = [0] * lifted.dim
        if i in part.order:
            r[K + 1 + part.order.index(i)] = 1
        else:
            r[2 * K + 1 + weak.index(i)] = 1
        mat.append(r)
    return project(vertices(lifted, max_dim=lifted.dim), mat, p.k + 1)


def o2m_gap_offset(k: int) -> tuple[int, ...]:
    return (2 * k + 1,) + (1,) * k


def o2m_gap_certificate(p: GaussOneToManyParams, tol: float = 1e-6, scheme: str = "exact",
                        skip_linear: bool = False) -> dict:
    offset = o2m_gap_offset(p.k)
    rep = translation_certificate(o2m_outer_region(p, skip_linear), o2m_inner_region(p, scheme),
                                  offset, tol)
    rep.update({
        "gap_bits": list(offset),
        "skipped_subsets": [list(S) for S in o2m_outer_constraints(p, skip_linear)[1]],
        "split_out_users": list(canonical_order(p)[1]),
    })
    return rep


# ------------------------------------------------------------ DoF

def o2m_dof_region(n: Sequence, beta: Sequence) -> Polytope:
    """d_i <= n_i and, with S sorted by beta,
    sum d <= (n_0 - beta_m)^+ + max(n_1, beta_1) + sum_{i>=2} max(n_i, beta_i - beta_{i-1})."""
    n = tuple(Fraction(x) for x in n)
    beta = tuple(Fraction(x) for x in beta)
    if len(n) != len(beta) + 1 or any(x < 0 for x in n + beta):
        raise GaussError("need K+1 n and K beta exponents, all nonnegative")
    K = len(beta)
    dim = K + 1
    hs = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        hs.append(HalfSpace(tuple(e), n[i]))
    for size in range(1, K + 1):
        for S in itertools.combinations(range(1, K + 1), size):
            order = sorted(S, key=lambda i: (beta[i - 1], i))
            b = [beta[i - 1] for i in order]
            val = max(n[0] - b[-1], Fraction(0)) + max(n[order[0]], b[0])
            val += sum((max(n[i], b[t] - b[t - 1]) for t, i in enumerate(order[1:], 1)), Fraction(0))
            c = [1] + [1 if i in S else 0 for i in range(1, dim)]
            hs.append(HalfSpace(tuple(c), val))
    return Polytope(dim, hs)


def o2m_dof_scaled_deterministic(n: Sequence, beta: Sequence) -> Polytope:
    vals = [Fraction(x) for x in list(n) + list(beta)]
    T = math.lcm(*(x.denominator for x in vals))
    g = OneToManyGains(len(beta), tuple(int(Fraction(x) * T) for x in n),
                       tuple(int(Fraction(x) * T) for x in beta))
    return scale(one_to_many_outer(g), Fraction(1, T))

