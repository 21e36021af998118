"""Crossing, facing triples, chains and well-separation of convex sets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .complex import CubeComplex
from .median import ConvexSubset, _ids, diameter, gate_image

EXACT_LIMIT = 20


def crosses(cx: CubeComplex, w1: str, w2: str) -> bool:
    a, b = cx.wid(w1), cx.wid(w2)
    if a == b:
        raise ValueError("crosses() needs two distinct walls")
    return bool(cx.crossing_matrix[a, b])


def _side_of(cx: CubeComplex, w: int, other: int) -> bool:
    """Side of wall ``w`` holding the (non-crossing) wall ``other``; True = plus."""
    return bool(cx.sides[cx.wall_rep[other], w])


def _separates(cx: CubeComplex, w: int, a: int, b: int) -> bool:
    X = cx.crossing_matrix
    if X[w, a] or X[w, b]:
        return False
    return _side_of(cx, w, a) != _side_of(cx, w, b)


def _facing(cx: CubeComplex, a: int, b: int, c: int) -> bool:
    X = cx.crossing_matrix
    if X[a, b] or X[a, c] or X[b, c]:
        return False
    return not (_separates(cx, a, b, c) or _separates(cx, b, a, c) or _separates(cx, c, a, b))


def is_facing_triple(cx: CubeComplex, w1: str, w2: str, w3: str) -> bool:
    """Pairwise disjoint walls none of which separates the other two."""
    ids = [cx.wid(w) for w in (w1, w2, w3)]
    if len(set(ids)) != 3:
        raise ValueError("facing triple needs three distinct walls")
    return _facing(cx, *ids)


def facing_triples(cx: CubeComplex) -> list[tuple[str, str, str]]:
    """Every facing triple of the complex (cubic in the wall count)."""
    X = cx.crossing_matrix
    W = len(cx.walls)
    out = []
    for a in range(W):
        free = [b for b in range(a + 1, W) if not X[a, b]]
        for i, b in enumerate(free):
            for c in free[i + 1:]:
                if not X[b, c] and _facing(cx, a, b, c):
                    out.append((cx.walls[a], cx.walls[b], cx.walls[c]))
    return out


def is_chain(cx: CubeComplex, walls: Sequence[str]) -> bool:
    """Each interior wall separates its two neighbours.

    Two-element sequences count as chains when the walls are disjoint.
    """
    ids = [cx.wid(w) for w in walls]
    if len(ids) < 2:
        raise ValueError("a chain needs at least two walls")
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate walls in chain")
    X = cx.crossing_matrix
    if any(X[a, b] for a, b in zip(ids, ids[1:])):
        return False
    return all(_separates(cx, ids[i], ids[i - 1], ids[i + 1]) for i in range(1, len(ids) - 1))


def _crossers_of_set(cx: CubeComplex, idx: np.ndarray) -> np.ndarray:
    sub = cx.sides[idx]
    return sub.any(axis=0) & ~sub.all(axis=0)


def _as_idx(cx: CubeComplex, Y) -> np.ndarray:
    if isinstance(Y, ConvexSubset):
        return Y.indices
    return _ids(cx, Y)


def walls_crossing_both(cx: CubeComplex, Y1, Y2) -> frozenset[str]:
    """Walls having vertices of each set on both of their sides."""
    i1, i2 = _as_idx(cx, Y1), _as_idx(cx, Y2)
    if np.intersect1d(i1, i2).size:
        raise ValueError("walls_crossing_both needs disjoint sets")
    both = _crossers_of_set(cx, i1) & _crossers_of_set(cx, i2)
    return frozenset(cx.walls[w] for w in np.flatnonzero(both))


def walls_crossing_hyperplanes(cx: CubeComplex, w1: str, w2: str) -> frozenset[str]:
    """Walls crossing both carriers of two disjoint hyperplanes.

    A wall other than h meets the carrier of h exactly when it crosses h, so
    this is the common crossing set.  The carriers may touch.
    """
    a, b = cx.wid(w1), cx.wid(w2)
    if a == b or cx.crossing_matrix[a, b]:
        raise ValueError("hyperplane well-separation needs two disjoint walls")
    both = cx.crossing_matrix[a] & cx.crossing_matrix[b]
    return frozenset(cx.walls[w] for w in np.flatnonzero(both))


@dataclass(frozen=True)
class Degree:
    """Largest facing-triple-free subfamily of the common crossing set."""

    value: int
    exact: bool
    crossing: frozenset[str]

    def __int__(self) -> int:
        return self.value

    @property
    def exactness(self) -> str:
        return "exact" if self.exact else "lower_bound"


def max_facing_free(cx: CubeComplex, walls: Iterable[str], limit: int = EXACT_LIMIT) -> tuple[int, bool]:
    """Size of a largest subfamily without a facing triple.

    Exact branch-and-bound when the family has at most ``limit`` members or
    contains no facing triple at all; otherwise a greedy lower bound.
    """
    ids = sorted(cx.wid(w) for w in walls)
    k = len(ids)
    if k <= 2:
        return k, True
    triples = [t for t in itertools.combinations(range(k), 3) if _facing(cx, *(ids[i] for i in t))]
    if not triples:
        return k, True
    if k > limit:
        return _greedy_facing_free(k, triples), False
    return _exact_facing_free(k, triples), True


def _greedy_facing_free(k: int, triples: list[tuple[int, int, int]]) -> int:
    load = [0] * k
    for t in triples:
        for i in t:
            load[i] += 1
    chosen: set[int] = set()
    for i in sorted(range(k), key=lambda j: (load[j], j)):
        if not any(i in t and set(t) - {i} <= chosen for t in triples):
            chosen.add(i)
    return len(chosen)


def _exact_facing_free(k: int, triples: list[tuple[int, int, int]]) -> int:
    by_elem: list[list[tuple[int, int, int]]] = [[] for _ in range(k)]
    for t in triples:
        for i in t:
            by_elem[i].append(t)
    best = _greedy_facing_free(k, triples)
    chosen: set[int] = set()

    def rec(i: int) -> None:
        nonlocal best
        if len(chosen) + (k - i) <= best:
            return
        if i == k:
            best = len(chosen)
            return
        if not any(set(t) - {i} <= chosen for t in by_elem[i]):
            chosen.add(i)
            rec(i + 1)
            chosen.discard(i)
        rec(i + 1)

    rec(0)
    return best


def wellsep_degree(cx: CubeComplex, Y1, Y2, limit: int = EXACT_LIMIT) -> Degree:
    """Well-separation degree of two disjoint convex vertex sets.

    The sets are L-well-separated iff the returned value is at most L.
    """
    crossing = walls_crossing_both(cx, Y1, Y2)
    value, exact = max_facing_free(cx, crossing, limit)
    return Degree(value, exact, crossing)


def hyperplane_degree(cx: CubeComplex, w1: str, w2: str, limit: int = EXACT_LIMIT) -> Degree:
    """Well-separation degree of two disjoint hyperplanes, via their carriers."""
    crossing = walls_crossing_hyperplanes(cx, w1, w2)
    value, exact = max_facing_free(cx, crossing, limit)
    return Degree(value, exact, crossing)


def carrier(cx: CubeComplex, wall: str) -> ConvexSubset:
    """Carrier of a wall, as a convex subset (carriers are convex)."""
    w = cx.wid(wall)
    return ConvexSubset(frozenset(cx.vertices[i] for i in np.unique(cx.dual_edges[w])), cx)


@dataclass(frozen=True)
class GenevoisReport:
    degree: Degree
    diam_in_first: int   # diameter of the gate image of Y2 in Y1
    diam_in_second: int  # diameter of the gate image of Y1 in Y2

    @property
    def as_tuple(self) -> tuple[int, int, int]:
        return (self.degree.value, self.diam_in_first, self.diam_in_second)

    @property
    def zero_iff_diam_le_one(self) -> bool:
        """degree = 0  <=>  both gate images have diameter at most 1."""
        return (self.degree.value == 0) == (max(self.diam_in_first, self.diam_in_second) <= 1)

    @property
    def zero_iff_point_images(self) -> bool:
        """degree = 0  <=>  both gate images are single vertices."""
        return (self.degree.value == 0) == (max(self.diam_in_first, self.diam_in_second) == 0)

    def to_json(self) -> dict:
        return {
            "degree": self.degree.value,
            "degree_exactness": self.degree.exactness,
            "crossing_walls": sorted(self.degree.crossing),
            "diam_gate_image_in_first": self.diam_in_first,
            "diam_gate_image_in_second": self.diam_in_second,
            "zero_iff_diam_le_one": self.zero_iff_diam_le_one,
            "zero_iff_point_images": self.zero_iff_point_images,
        }


def genevois_pair_report(cx: CubeComplex, Y1: ConvexSubset, Y2: ConvexSubset) -> GenevoisReport:
    deg = wellsep_degree(cx, Y1, Y2)
    d1 = diameter(cx, gate_image(cx, Y2.members, Y1))
    d2 = diameter(cx, gate_image(cx, Y1.members, Y2))
    return GenevoisReport(deg, d1, d2)
