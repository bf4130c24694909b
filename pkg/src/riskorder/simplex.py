"""Exact linear optimisation over a simplex cut by one half-space.

The feasible set ``{p in simplex : c . p <= b}`` is a polytope whose vertices
lie on edges of the simplex, so every linear objective attains its optimum at
a point mass or at a two-point mixture.  Enumerating those candidates decides
the program exactly without a general LP solver.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterator, NamedTuple, Sequence


class Vertex(NamedTuple):
    support: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def dense(self, n: int) -> list[Fraction]:
        out = [Fraction(0)] * n
        for i, w in zip(self.support, self.weights):
            out[i] = w
        return out


def slice_vertices(coeffs: Sequence[Fraction], bound: Fraction) -> Iterator[Vertex]:
    """Vertices of ``{p in simplex : coeffs . p <= bound}``.

    Scan order: feasible point masses by index, then two-point vertices on the
    edge ``(i, j)``, ``i < j``, lexicographically.  A two-point vertex exists
    on an edge iff the constraint is tight strictly inside it.
    """
    n = len(coeffs)
    for i in range(n):
        if coeffs[i] <= bound:
            yield Vertex((i,), (Fraction(1),))
    for i, j in combinations(range(n), 2):
        ci, cj = coeffs[i], coeffs[j]
        if ci < bound < cj or cj < bound < ci:
            wi = (cj - bound) / (cj - ci)
            yield Vertex((i, j), (wi, 1 - wi))


def maximize_on_slice(
    objective: Sequence[Fraction], coeffs: Sequence[Fraction], bound: Fraction
) -> tuple[Fraction, Vertex] | None:
    """``max objective . p`` over ``{p in simplex : coeffs . p <= bound}``.

    Returns ``(value, vertex)`` with the first maximiser in scan order, or
    ``None`` when the program is infeasible.
    """
    best: tuple[Fraction, Vertex] | None = None
    for vert in slice_vertices(coeffs, bound):
        val = sum((objective[i] * w for i, w in zip(vert.support, vert.weights)), Fraction(0))
        if best is None or val > best[0]:
            best = (val, vert)
    return best


def grid_points(n: int, denom: int) -> Iterator[tuple[Fraction, ...]]:
    """All points of the simplex in ``n`` coordinates with weights in ``(1/denom) Z``.

    Ordered so that earlier coordinates receive mass first: ``(1, 0, ..., 0)``
    comes first and ``(0, ..., 0, 1)`` last.
    """
    if n < 1 or denom < 1:
        raise ValueError("need n >= 1 and denom >= 1")

    def rec(k: int, left: int) -> Iterator[tuple[int, ...]]:
        if k == 1:
            yield (left,)
            return
        for first in range(left, -1, -1):
            for rest in rec(k - 1, left - first):
                yield (first,) + rest

    for counts in rec(n, denom):
        yield tuple(Fraction(c, denom) for c in counts)
