"""Medians, intervals, joins, hulls and combinatorial gate maps."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .complex import CubeComplex, UnknownVertexError


class Certificate(enum.Enum):
    VERIFIED = "verified"
    ASSUMED = "assumed"


class NotConvexError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class ConvexSubset:
    members: frozenset[str]
    ambient: CubeComplex
    certificate: Certificate = Certificate.VERIFIED

    def __post_init__(self):
        if not self.members:
            raise ValueError("convex subset must be nonempty")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    @property
    def indices(self) -> np.ndarray:
        return np.sort(np.array([self.ambient.vid(v) for v in self.members], dtype=np.int64))

    @classmethod
    def assume(cls, cx: CubeComplex, members: Iterable[str]) -> "ConvexSubset":
        """Wrap a vertex set without checking convexity."""
        members = frozenset(members)
        for v in members:
            cx.vid(v)
        return cls(members, cx, Certificate.ASSUMED)


def _ids(cx: CubeComplex, A: Iterable[str]) -> np.ndarray:
    idx = np.array(sorted({cx.vid(v) for v in A}), dtype=np.int64)
    if len(idx) == 0:
        raise ValueError("vertex set must be nonempty")
    return idx


def _names(cx: CubeComplex, mask_or_idx: np.ndarray) -> frozenset[str]:
    idx = np.flatnonzero(mask_or_idx) if mask_or_idx.dtype == bool else mask_or_idx
    return frozenset(cx.vertices[i] for i in idx)


# ---------------------------------------------------------------------------
# medians and intervals


def median_index(cx: CubeComplex, x: int, y: int, z: int) -> int:
    S = cx.sides
    maj = (S[x] & S[y]) | (S[x] & S[z]) | (S[y] & S[z])
    m = cx.lookup_signature(maj)
    if m is None:
        raise ValueError("majority pattern is not a vertex; complex is not median")
    return m


def median(cx: CubeComplex, x: str, y: str, z: str) -> str:
    """Vertex on the majority side of every wall."""
    return cx.vertices[median_index(cx, cx.vid(x), cx.vid(y), cx.vid(z))]


def medians(cx: CubeComplex, triples: np.ndarray) -> np.ndarray:
    """Vectorized majority-rule median for an ``(k, 3)`` index array."""
    S = cx.sides
    x, y, z = (S[triples[:, i]] for i in range(3))
    return cx.lookup_signatures((x & y) | (x & z) | (y & z))


def interval_mask(cx: CubeComplex, x: int, y: int) -> np.ndarray:
    D = cx.distances
    return D[x] + D[y] == D[x, y]


def interval(cx: CubeComplex, x: str, y: str) -> frozenset[str]:
    return _names(cx, interval_mask(cx, cx.vid(x), cx.vid(y)))


def _join_mask(cx: CubeComplex, idx: np.ndarray) -> np.ndarray:
    D = cx.distances
    sub = D[idx]  # (k, n)
    inner = D[np.ix_(idx, idx)]  # (k, k)
    out = np.zeros(cx.n_vertices, dtype=bool)
    block = max(1, 4_000_000 // (len(idx) * cx.n_vertices))
    for s in range(0, len(idx), block):
        a = sub[s:s + block]  # (b, n)
        hit = (a[:, None, :] + sub[None, :, :]) == inner[s:s + block, :, None]
        out |= hit.any(axis=(0, 1))
    return out


def join(cx: CubeComplex, A: Iterable[str]) -> frozenset[str]:
    """Union of the intervals between all pairs of A."""
    return _names(cx, _join_mask(cx, _ids(cx, A)))


def join_iterates(cx: CubeComplex, A: Iterable[str], max_steps: int | None = None) -> list[frozenset[str]]:
    """``[J^0(A), J^1(A), ...]`` up to and including the first repeat.

    Iteration stops at the first k with J^{k+1}(A) = J^k(A); the returned
    list then ends with two equal sets.  ``max_steps`` caps the number of
    join applications.
    """
    idx = _ids(cx, A)
    out = [_names(cx, idx)]
    steps = 0
    while max_steps is None or steps < max_steps:
        nxt = np.flatnonzero(_join_mask(cx, idx))
        steps += 1
        out.append(_names(cx, nxt))
        if len(nxt) == len(idx):
            break
        idx = nxt
    return out


def halfspace_hull_mask(cx: CubeComplex, idx: np.ndarray) -> np.ndarray:
    S = cx.sides
    sub = S[idx]
    all_plus = sub.all(axis=0)
    all_minus = ~sub.any(axis=0)
    keep = np.ones(cx.n_vertices, dtype=bool)
    if all_plus.any():
        keep &= S[:, all_plus].all(axis=1)
    if all_minus.any():
        keep &= ~S[:, all_minus].any(axis=1)
    return keep


def halfspace_hull(cx: CubeComplex, A: Iterable[str]) -> ConvexSubset:
    """Intersection of all half-spaces that contain A."""
    return ConvexSubset(_names(cx, halfspace_hull_mask(cx, _ids(cx, A))), cx)


def hull(cx: CubeComplex, A: Iterable[str], check: bool = False) -> ConvexSubset:
    """Median hull of A.

    The half-space intersection is returned.  With ``check=True`` the joins
    are also iterated to their fixed point, which must coincide with it and
    be reached within ``dimension`` steps.
    """
    A = list(A)
    H = halfspace_hull(cx, A)
    if check:
        from .complex import dimension

        its = join_iterates(cx, A)
        if its[-1] != H.members:
            raise AssertionError("join fixed point differs from half-space hull")
        if len(its) - 2 > dimension(cx):
            raise AssertionError("join iteration did not terminate within the dimension")
    return H


def is_convex(cx: CubeComplex, Y: Iterable[str]) -> tuple[bool, tuple[str, str, str] | None]:
    """Convexity test with witness ``(x, y, z)``: x, y in Y, z in [x, y] \\ Y."""
    idx = _ids(cx, Y)
    inY = np.zeros(cx.n_vertices, dtype=bool)
    inY[idx] = True
    H = halfspace_hull_mask(cx, idx)
    if not (H & ~inY).any():
        return True, None
    D = cx.distances
    inner = D[np.ix_(idx, idx)]
    # J(Y) strictly contains Y whenever Y is not convex, so some outside vertex
    # lies on an interval between two members.
    for z in np.flatnonzero(H & ~inY):
        hit = np.argwhere(D[idx, z][:, None] + D[z, idx][None, :] == inner)
        if len(hit):
            a, b = hit[0]
            return False, (cx.vertices[idx[a]], cx.vertices[idx[b]], cx.vertices[z])
    raise AssertionError("non-convex set without interval witness")


def convex_subset(cx: CubeComplex, Y: Iterable[str]) -> ConvexSubset:
    """Verified :class:`ConvexSubset`; raises NotConvexError otherwise."""
    Y = frozenset(Y)
    ok, wit = is_convex(cx, Y)
    if not ok:
        raise NotConvexError("vertex set is not combinatorially convex", wit)
    return ConvexSubset(Y, cx)


# ---------------------------------------------------------------------------
# gates


def _require_convex(Y: ConvexSubset, unsafe: bool) -> None:
    if not isinstance(Y, ConvexSubset):
        raise TypeError("gate maps need a ConvexSubset")
    if Y.certificate is not Certificate.VERIFIED and not unsafe:
        raise NotConvexError("gate requires a verified convex set (pass unsafe=True to override)")


def gate_map(cx: CubeComplex, Y: ConvexSubset, unsafe: bool = False) -> np.ndarray:
    """Gate index for every vertex of the complex.

    A wall separates x from Y iff Y lies wholly on the far side, and the gate
    is x with exactly those walls flipped; the result is looked up by
    signature.
    """
    _require_convex(Y, unsafe)
    S = cx.sides
    sub = S[Y.indices]
    all_plus = sub.all(axis=0)
    all_minus = ~sub.any(axis=0)
    G = S.copy()
    G[:, all_plus] = True
    G[:, all_minus] = False
    out = cx.lookup_signatures(G)
    if (out < 0).any():
        raise ValueError("gate signature missing; complex is not median")
    return out


def gate(cx: CubeComplex, x: str, Y: ConvexSubset, unsafe: bool = False) -> str:
    """Nearest vertex of the convex set Y to x."""
    _require_convex(Y, unsafe)
    xi = cx.vid(x)
    S = cx.sides
    sub = S[Y.indices]
    bits = S[xi].copy()
    bits[sub.all(axis=0)] = True
    bits[~sub.any(axis=0)] = False
    g = cx.lookup_signature(bits)
    if g is None:
        raise ValueError("gate signature missing; complex is not median")
    return cx.vertices[g]


def gate_image(cx: CubeComplex, A: Iterable[str], Y: ConvexSubset, unsafe: bool = False) -> frozenset[str]:
    """Gates of the vertices of A in Y."""
    G = gate_map(cx, Y, unsafe)
    return frozenset(cx.vertices[G[cx.vid(a)]] for a in A)


def diameter(cx: CubeComplex, A: Iterable[str]) -> int:
    idx = _ids(cx, A)
    return int(cx.distances[np.ix_(idx, idx)].max())


def gate_diameter(cx: CubeComplex, Y1: ConvexSubset, Y2: ConvexSubset) -> int:
    """Diameter of the gate image of Y2 in Y1."""
    return diameter(cx, gate_image(cx, Y2.members, Y1))


__all__ = [
    "Certificate", "ConvexSubset", "NotConvexError", "UnknownVertexError",
    "median", "medians", "interval", "join", "join_iterates", "hull", "halfspace_hull",
    "is_convex", "convex_subset", "gate", "gate_map", "gate_image", "gate_diameter", "diameter",
]
