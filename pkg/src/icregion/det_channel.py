"""Deterministic many-to-one and one-to-many interference channels.

Signals are bit words, most significant bit first.  At a receiver, level 1 is
the lowest level above the noise floor.  A word of length n whose top bit
sits at receiver level t occupies levels t, t-1, ..., t-n+1; anything that
lands at level 0 or below is lost in the noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MANY_TO_ONE = "many_to_one"
ONE_TO_MANY = "one_to_many"

BitWord = tuple[int, ...]


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class _Gains:
    k: int
    n_direct: tuple[int, ...]
    n_cross: tuple[int, ...]

    def __post_init__(self):
        try:
            nd = tuple(int(v) for v in self.n_direct)
            nc = tuple(int(v) for v in self.n_cross)
            k = int(self.k)
        except (TypeError, ValueError) as exc:
            raise ChannelError(f"gains must be integers: {exc}") from exc
        if k < 0:
            raise ChannelError("K must be nonnegative")
        if len(nd) != k + 1 or len(nc) != k:
            raise ChannelError(f"expected {k + 1} direct and {k} cross gains")
        if any(v < 0 for v in nd + nc):
            raise ChannelError("gains must be nonnegative")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "n_direct", nd)
        object.__setattr__(self, "n_cross", nc)

    @property
    def n00(self) -> int:
        return self.n_direct[0]

    def direct(self, i: int) -> int:
        return self.n_direct[i]

    def cross(self, i: int) -> int:
        """Cross gain of user i >= 1 (n_0i or n_i0 depending on orientation)."""
        if not 1 <= i <= self.k:
            raise ChannelError(f"user {i} has no cross gain")
        return self.n_cross[i - 1]

    def to_json(self) -> dict:
        return {"k": self.k, "n_direct": list(self.n_direct), "n_cross": list(self.n_cross),
                "orientation": self.orientation}


@dataclass(frozen=True)
class ManyToOneGains(_Gains):
    """Gains n_ii (n_direct[i]) and n_0i (n_cross[i-1]); only receiver 0 is interfered."""

    orientation = MANY_TO_ONE

    def reversed(self) -> "OneToManyGains":
        return OneToManyGains(self.k, self.n_direct, self.n_cross)


@dataclass(frozen=True)
class OneToManyGains(_Gains):
    """Gains n_ii and n_i0; transmitter 0 interferes at every receiver i >= 1."""

    orientation = ONE_TO_MANY

    def reversed(self) -> ManyToOneGains:
        return ManyToOneGains(self.k, self.n_direct, self.n_cross)


def gains_from_json(d: dict) -> ManyToOneGains | OneToManyGains:
    try:
        orient = d.get("orientation", MANY_TO_ONE)
        args = (d["k"], d["n_direct"], d["n_cross"])
    except (AttributeError, KeyError) as exc:
        raise ChannelError(f"malformed channel JSON: missing {exc}") from exc
    if orient == MANY_TO_ONE:
        return ManyToOneGains(*args)
    if orient == ONE_TO_MANY:
        return OneToManyGains(*args)
    raise ChannelError(f"unknown orientation {orient!r}")


@dataclass(frozen=True)
class InterferencePattern:
    """sets[k-1] is U_k, the users occupying level k of the shared signal."""

    sets: tuple[frozenset[int], ...]

    def level(self, k: int) -> frozenset[int]:
        return self.sets[k - 1]

    @property
    def levels(self) -> int:
        return len(self.sets)


def interference_sets(g: ManyToOneGains) -> InterferencePattern:
    """U_k = {i : n_0i - n_ii < k <= n_0i} for k = 1..n_00."""
    return InterferencePattern(tuple(
        frozenset(i for i in range(1, g.k + 1) if g.cross(i) - g.direct(i) < k <= g.cross(i))
        for k in range(1, g.n00 + 1)))


def one_to_many_interference_sets(g: OneToManyGains) -> InterferencePattern:
    """U_k = {i : n_00 - n_i0 < k <= n_ii - n_i0 + n_00}, k counted from x_0's bottom."""
    n00 = g.n00
    return InterferencePattern(tuple(
        frozenset(i for i in range(1, g.k + 1)
                  if n00 - g.cross(i) < k <= g.direct(i) - g.cross(i) + n00)
        for k in range(1, n00 + 1)))


def _check_words(g: _Gains, inputs: Sequence[Sequence[int]]) -> list[np.ndarray]:
    if len(inputs) != g.k + 1:
        raise ChannelError(f"expected {g.k + 1} input words, got {len(inputs)}")
    words = []
    for i, w in enumerate(inputs):
        arr = np.asarray(w, dtype=np.uint8)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.shape[-1] != g.direct(i):
            raise ChannelError(f"input {i} has length {arr.shape[-1]}, expected {g.direct(i)}")
        if np.any(arr > 1):
            raise ChannelError("bit words must be binary")
        words.append(arr)
    return words


def _superpose(out: np.ndarray, word: np.ndarray, top: int) -> None:
    """XOR ``word`` (batch x n, MSB first) into ``out`` (batch x q, MSB first) with its
    top bit at level ``top``; output position of level l is q - l."""
    q = out.shape[1]
    n = word.shape[1]
    for p in range(n):
        lev = top - p
        if 1 <= lev <= q:
            out[:, q - lev] ^= word[:, p]


def transmit_many_to_one_batch(g: ManyToOneGains, inputs: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Vectorized channel: inputs[i] has shape (batch, n_ii)."""
    words = _check_words(g, inputs)
    batch = max(w.shape[0] for w in words)
    q = max([g.n00] + [g.cross(i) for i in range(1, g.k + 1)])
    y0 = np.zeros((batch, q), dtype=np.uint8)
    _superpose(y0, words[0], g.n00)
    for i in range(1, g.k + 1):
        _superpose(y0, words[i], g.cross(i))
    return [y0] + [np.broadcast_to(words[i], (batch, g.direct(i))).copy() for i in range(1, g.k + 1)]


def transmit_one_to_many_batch(g: OneToManyGains, inputs: Sequence[np.ndarray]) -> list[np.ndarray]:
    words = _check_words(g, inputs)
    batch = max(w.shape[0] for w in words)
    outs = [np.broadcast_to(words[0], (batch, g.n00)).copy()]
    for i in range(1, g.k + 1):
        q = max(g.direct(i), g.cross(i))
        yi = np.zeros((batch, q), dtype=np.uint8)
        _superpose(yi, words[i], g.direct(i))
        _superpose(yi, words[0], g.cross(i))
        outs.append(yi)
    return outs


def transmit_many_to_one(g: ManyToOneGains, inputs: Sequence[Sequence[int]]) -> list[BitWord]:
    """One channel use; y_0 has length max(n_00, max n_0i)."""
    return [tuple(int(b) for b in y[0]) for y in transmit_many_to_one_batch(g, inputs)]


def transmit_one_to_many(g: OneToManyGains, inputs: Sequence[Sequence[int]]) -> list[BitWord]:
    """One channel use; y_i (i >= 1) has length max(n_ii, n_i0)."""
    return [tuple(int(b) for b in y[0]) for y in transmit_one_to_many_batch(g, inputs)]
