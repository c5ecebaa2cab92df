"""The three-user example channel: SNR_1 = SNR_2 = beta, SNR_0 = INR_1 = INR_2 = beta^2.

Gaussian Han-Kobayashi codebooks top out near 2 log beta bits of sum rate, while
aligned discrete inputs reach about 3 log beta.  This module evaluates both,
simulates the modulo decoder of the discrete scheme, and computes the mutual
information of a uniform PAM input in unit Gaussian noise.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gauss_m2o import GdofSpec, gdof_region
from .region import HalfSpace, Polytope, vertices

# numpy 2 renamed trapz
_trapezoid = getattr(np, "trapezoid", None) or np.trapz


class ExampleError(ValueError):
    pass


def half_log_beta(beta: float) -> int:
    """n with beta = 2^(2n); raises unless beta is an even power of two."""
    if beta <= 1:
        raise ExampleError("beta must exceed 1")
    e = math.log2(beta)
    if e != int(e) or int(e) % 2:
        raise ExampleError(f"beta={beta} is not an even power of two")
    return int(e) // 2


# ------------------------------------------------------------ Gaussian HK

def _hk_terms(beta, s1, s2):
    """Private rates a_i, common caps u_i and receiver-0 MAC bounds g(T) for T containing 0.

    Receiver i decodes its private (power beta S_i) and common (beta (1-S_i))
    parts.  Receiver 0 decodes x_0 with both common parts, privates as noise.
    """
    b = beta
    a1, a2 = np.log2(1 + b * s1), np.log2(1 + b * s2)
    full = math.log2(1 + b)
    u1 = np.minimum(np.log2(1 + b * (1 - s1)), full - a1)
    u2 = np.minimum(np.log2(1 + b * (1 - s2)), full - a2)
    noise = 1 + b * b * (s1 + s2)
    p0, w1, w2 = b * b, b * b * (1 - s1), b * b * (1 - s2)
    g0 = np.log2(1 + p0 / noise)
    g01 = np.log2(1 + (p0 + w1) / noise)
    g02 = np.log2(1 + (p0 + w2) / noise)
    g012 = np.log2(1 + (p0 + w1 + w2) / noise)
    return a1, a2, u1, u2, g0, g01, g02, g012


def hk_sum_rate(beta, s1, s2):
    """Largest r_0 + r_1 + r_2 the Gaussian HK scheme supports at split (s1, s2).

    The common parts and x_0 form a polymatroid cut by the caps u_i; its
    largest sum is the minimum over T containing 0 of g(T) + sum_{j not in T} u_j.
    Works elementwise on arrays.
    """
    a1, a2, u1, u2, g0, g01, g02, g012 = _hk_terms(beta, np.asarray(s1, float), np.asarray(s2, float))
    best = np.minimum.reduce([g0 + u1 + u2, g01 + u2, g02 + u1, g012])
    return a1 + a2 + best


@dataclass(frozen=True)
class HKResult:
    s1: float
    s2: float
    rates: tuple[float, float, float]
    sum_rate: float
    ceiling: float


def hk_gaussian_rates(beta: float, s1: float, s2: float) -> HKResult:
    """A sum-rate optimal (r_0, r_1, r_2) for the HK scheme at split (s1, s2)."""
    if beta < 2:
        raise ExampleError("the HK ceiling is stated for beta >= 2")
    if not (0 <= s1 <= 1 and 0 <= s2 <= 1):
        raise ExampleError("splits must lie in [0, 1]")
    a1, a2, u1, u2, g0, g01, g02, g012 = (float(v) for v in _hk_terms(beta, s1, s2))
    F = Fraction
    rows = [((1, 0, 0), g0), ((1, 1, 0), g01), ((1, 0, 1), g02), ((1, 1, 1), g012),
            ((0, 1, 0), u1), ((0, 0, 1), u2)]
    poly = Polytope(3, [HalfSpace(c, F(max(r, 0.0))) for c, r in rows])
    best = max(vertices(poly), key=lambda v: (sum(v), v))
    r0, c1, c2 = (float(x) for x in best)
    rates = (r0, a1 + c1, a2 + c2)
    return HKResult(s1, s2, rates, sum(rates), math.log2(1 + 3 * beta * beta))


def hk_grid_max(beta: float, step: float = 0.01, refine: float = 1e-4) -> HKResult:
    """Grid maximum of the HK sum rate over (s1, s2), refined near the best cell."""
    grid = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    S1, S2 = np.meshgrid(grid, grid, indexing="ij")
    vals = hk_sum_rate(beta, S1, S2)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    s1, s2 = float(grid[i]), float(grid[j])
    if refine:
        n = int(round(step / refine))
        f1 = np.clip(s1 + refine * np.arange(-n, n + 1), 0, 1)
        f2 = np.clip(s2 + refine * np.arange(-n, n + 1), 0, 1)
        R1, R2 = np.meshgrid(f1, f2, indexing="ij")
        fine = hk_sum_rate(beta, R1, R2)
        a, b = np.unravel_index(int(np.argmax(fine)), fine.shape)
        if fine[a, b] > vals[i, j]:
            s1, s2 = float(f1[a]), float(f2[b])
    return hk_gaussian_rates(beta, s1, s2)


# ------------------------------------------------------------ aligned scheme

def lattice_example_rates(beta: float) -> tuple[tuple[float, float, float], float]:
    """(log beta - 3)^+ per user on the complex channel, and their sum."""
    n = half_log_beta(beta)
    r = max(2 * n - 3, 0)
    return (float(r),) * 3, float(3 * r)


@dataclass(frozen=True)
class ExampleParams:
    n: int
    num_symbols: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.num_symbols < 1:
            raise ExampleError("n and num_symbols must be positive")

    @property
    def beta(self) -> int:
        return 4 ** self.n

    @classmethod
    def from_beta(cls, beta: float, num_symbols: int = 10_000, seed: int = 0) -> "ExampleParams":
        return cls(half_log_beta(beta), num_symbols, seed)


def _decode(y: np.ndarray, n: int, guard: int) -> tuple[np.ndarray, np.ndarray]:
    """Round to the nearest multiple of 2^guard, then split into x_0 and x_1 + x_2."""
    step = 1 << guard
    t = np.rint(y / step).astype(np.int64) * step
    return np.mod(t, 1 << n), np.floor_divide(t, 1 << n)


BATCH = 1 << 16


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ICREGION_THREADS", "1")))
    except ValueError:
        return 1


def _mod_batch(n: int, size: int, seed: tuple[int, int], noisy: bool, guard: int) -> tuple[list[int], int]:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    a = rng.integers(0, 1 << (n - guard), size=(3, size), dtype=np.int64) << guard
    clean0 = a[0] + (a[1] + a[2] << n)
    outs = [clean0.astype(float), a[1].astype(float), a[2].astype(float)]
    if noisy:
        outs = [o + rng.standard_normal(size) for o in outs]
    x0_hat, interf_hat = _decode(outs[0], n, guard)
    errs = [int(np.count_nonzero(x0_hat != a[0]))]
    for i in (1, 2):
        hat = np.rint(outs[i] / (1 << guard)).astype(np.int64) << guard
        errs.append(int(np.count_nonzero(hat != a[i])))
    return errs, int(np.count_nonzero(interf_hat != a[1] + a[2]))


def simulate_mod_decoding(params: ExampleParams, noisy: bool = False, guard: int = 0) -> dict:
    """Send integer symbols a_i = 2^n x_i through the real example channel.

    Receiver 0 sees a_0 + 2^n (a_1 + a_2) (+ noise) and recovers a_0 modulo 2^n;
    receiver i sees a_i (+ noise).  With ``guard`` g every user leaves its
    bottom g levels empty and receivers round to multiples of 2^g.  Batch b
    draws from SeedSequence((seed, b)), so results do not depend on the
    ICREGION_THREADS setting.
    """
    n = params.n
    if not 0 <= guard < n:
        raise ExampleError("guard must lie in [0, n)")
    N = params.num_symbols
    sizes = [min(BATCH, N - s) for s in range(0, N, BATCH)]
    jobs = [(n, size, (params.seed, b), noisy, guard) for b, size in enumerate(sizes)]
    if _threads() > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(_threads()) as pool:
            parts = list(pool.map(lambda j: _mod_batch(*j), jobs))
    else:
        parts = [_mod_batch(*j) for j in jobs]
    errs = [sum(p[0][i] for p in parts) for i in range(3)]
    align_errs = sum(p[1] for p in parts)
    return {
        "n": n,
        "beta": params.beta,
        "symbols": N,
        "noisy": noisy,
        "guard": guard,
        "errors": errs,
        "interference_errors": align_errs,
        "ser": [e / N for e in errs],
    }


def exhaustive_mod_check(n: int) -> int:
    """Recovery failures over all 2^(3n) noiseless input triples."""
    if n < 1:
        raise ExampleError("n must be positive")
    vals = np.arange(1 << n, dtype=np.int64)
    a0, a1, a2 = (g.ravel() for g in np.meshgrid(vals, vals, vals, indexing="ij"))
    x0_hat, interf = _decode(a0 + ((a1 + a2) << n), n, 0)
    return int(np.count_nonzero(x0_hat != a0) + np.count_nonzero(interf != a1 + a2))


# ------------------------------------------------------------ mutual information

class QuadratureError(ArithmeticError):
    pass


def _mixture_log_density(y: np.ndarray, m: int, var: float) -> np.ndarray:
    """log2 of (1/m) sum_a phi_var(y - a), computed stably."""
    d = y[..., None] - np.arange(m)
    e = -d * d / (2 * var)
    top = e.max(axis=-1)
    ln = top + np.log(np.exp(e - top[..., None]).sum(axis=-1)) - math.log(m) - 0.5 * math.log(2 * math.pi * var)
    return ln / math.log(2)


def mi_hermite(m: int, var: float = 1.0, nodes: int = 240) -> float:
    t, w = np.polynomial.hermite.hermgauss(nodes)
    z = math.sqrt(2 * var) * t
    h_y = 0.0
    for a in range(m):
        h_y -= float(np.dot(w, _mixture_log_density(a + z, m, var))) / math.sqrt(math.pi)
    h_y /= m
    h_z = 0.5 * math.log2(2 * math.pi * math.e * var)
    return h_y - h_z


def mi_trapezoid(m: int, var: float = 1.0, pts_per_unit: int = 400) -> float:
    s = math.sqrt(var)
    lo, hi = -8 * s, m - 1 + 8 * s
    y = np.linspace(lo, hi, int((hi - lo) * pts_per_unit) + 1)
    logp = _mixture_log_density(y, m, var)
    p = np.exp2(logp)
    h_y = -float(_trapezoid(p * logp, y))
    return h_y - 0.5 * math.log2(2 * math.pi * math.e * var)


def mi_numeric(beta: float, var: float = 1.0, rtol: float = 1e-6) -> float:
    """I(x; sqrt(beta) x + z) in bits for x uniform on {0, 1/2^n, ..., 1 - 1/2^n}.

    sqrt(beta) x is uniform on {0, ..., 2^n - 1}; z ~ N(0, var).  Gauss-Hermite
    quadrature per mixture component, cross-checked by the trapezoid rule.
    """
    n = half_log_beta(beta)
    m = 1 << n
    gh = mi_hermite(m, var)
    tr = mi_trapezoid(m, var)
    if abs(gh - tr) > rtol * max(abs(gh), 1e-12) + 1e-9:
        raise QuadratureError(f"quadrature rules disagree: {gh} vs {tr}")
    return gh


def mi_bound_holds(beta: float, var: float = 1.0) -> bool:
    """Whether I(x; sqrt(beta) x + z) >= log2(sqrt(beta)) - 1.5."""
    return mi_numeric(beta, var) >= 0.5 * math.log2(beta) - 1.5


# ------------------------------------------------------------ region / sweep

def example_normalized_region(beta: float | None = None) -> Polytope:
    """GDoF region of the example, exponents alpha = (2, 1, 1), beta = (2, 2).

    The normalized region does not depend on the value of beta.
    """
    return gdof_region(GdofSpec((2, 1, 1), (2, 2)))


SWEEP_COLUMNS = ("beta", "hk_sum_bound", "hk_sum_achieved", "lattice_sum", "mi_per_user", "ser_noisy")


def example_sweep(ns, num_symbols: int = 10_000, seed: int = 0) -> list[dict]:
    rows = []
    for idx, n in enumerate(ns):
        beta = 4 ** n
        hk = hk_grid_max(float(beta))
        sim = simulate_mod_decoding(ExampleParams(n, num_symbols, seed + idx), noisy=True)
        rows.append({
            "beta": beta,
            "hk_sum_bound": hk.ceiling,
            "hk_sum_achieved": hk.sum_rate,
            "lattice_sum": lattice_example_rates(beta)[1],
            "mi_per_user": mi_numeric(beta),
            "ser_noisy": sim["ser"][0],
        })
    return rows
