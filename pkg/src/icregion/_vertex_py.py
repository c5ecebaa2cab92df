"""Pure-Python twin of the compiled vertex kernel (arbitrary-precision ints)."""

from __future__ import annotations

from typing import Sequence


def basic_feasible_points(
    A: Sequence[Sequence[int]], b: Sequence[int]
) -> list[tuple[tuple[int, ...], int]]:
    """Return [(numerators, denominator), ...] for every feasible basic point.

    Rows are visited depth first.  After t pivots the chosen rows are kept in
    Montante (fraction-free Gauss-Jordan) form: every pivot equals the current
    t x t minor p and the last column holds Cramer numerators.  A candidate
    row is bordered against that state; if its coefficient part vanishes the
    prefix is dependent and the subtree is skipped.
    """
    A = [list(map(int, r)) for r in A]
    b = [int(v) for v in b]
    m = len(A)
    d = len(A[0]) if m else 0
    out: list[tuple[tuple[int, ...], int]] = []
    if d == 0 or m < d:
        return out

    def walk(start: int, mat: list[list[int]], p: int, pcol: list[int]) -> None:
        depth = len(mat)
        if depth == d:
            x = [0] * d
            for j, c in enumerate(pcol):
                x[c] = mat[j][d]
            den = p
            if den < 0:
                den = -den
                x = [-v for v in x]
            for r in range(m):
                if sum(a * v for a, v in zip(A[r], x)) > b[r] * den:
                    return
            out.append((tuple(x), den))
            return
        for r in range(start, m - (d - depth) + 1):
            full = A[r] + [b[r]]
            row = [p * full[c] - sum(full[pc] * mat[j][c] for j, pc in enumerate(pcol))
                   for c in range(d + 1)]
            cc = next((c for c in range(d) if row[c] != 0), -1)
            if cc < 0:
                continue
            D = row[cc]
            new = [[(D * old[c] - old[cc] * row[c]) // p for c in range(d + 1)] for old in mat]
            new.append(row)
            walk(r + 1, new, D, pcol + [cc])

    walk(0, [], 1, [])
    return out
