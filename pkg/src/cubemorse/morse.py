"""Excursion chains, gauge neighbourhoods and contraction profiles of paths.

Rays are finite windows here.  Every constant is the best one over the
window, so a constant that keeps growing with the window is the finite
signature of a ray that is not Morse for the chosen gauge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complex import CubeComplex
from .kappa import SublinearFunction
from .median import ConvexSubset, _ids, gate_map
from .separation import is_chain, max_facing_free

TOL = 1e-12


class PreconditionError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True, eq=False)
class DiscretePath:
    """Edge path in a complex, with its measured quasi-geodesic constants.

    The multiplicative constant is pinned to ``q = 1`` (consecutive vertices
    are adjacent, so the upper bound always holds with it) and ``Q`` is the
    least additive constant: ``max (j - i) - d(p_i, p_j)`` over the window.
    """

    complex: CubeComplex
    vertices: tuple[str, ...]
    q: float
    Q: int
    from_basepoint: bool = True

    def __len__(self) -> int:
        return len(self.vertices)

    def __getitem__(self, t: int) -> str:
        return self.vertices[t]

    @property
    def idx(self) -> np.ndarray:
        return np.array([self.complex.vid(v) for v in self.vertices], dtype=np.int64)

    @property
    def is_geodesic(self) -> bool:
        return self.Q == 0

    def crossings(self) -> list[tuple[int, int]]:
        """``(step, wall index)`` for each edge of the path."""
        ew = self.complex.edge_wall
        ids = self.idx
        return [(k, ew[(min(a, b), max(a, b))]) for k, (a, b) in enumerate(zip(ids, ids[1:]))]

    def prefix(self, length: int) -> "DiscretePath":
        return make_path(self.complex, self.vertices[:length], self.from_basepoint)


def make_path(cx: CubeComplex, vertices: Sequence[str], from_basepoint: bool = True) -> DiscretePath:
    verts = tuple(vertices)
    if not verts:
        raise PreconditionError("empty path")
    idx = np.array([cx.vid(v) for v in verts], dtype=np.int64)
    if from_basepoint and idx[0] != cx.base:
        raise PreconditionError("path must start at the basepoint", verts[0])
    ew = cx.edge_wall
    for a, b in zip(idx, idx[1:]):
        if (min(a, b), max(a, b)) not in ew:
            raise PreconditionError("consecutive path vertices are not adjacent", [cx.vertices[a], cx.vertices[b]])
    D = cx.distances[np.ix_(idx, idx)]
    steps = np.abs(np.arange(len(idx))[:, None] - np.arange(len(idx))[None, :])
    Q = int((steps - D).max())
    return DiscretePath(cx, verts, 1.0, Q, from_basepoint)


def geodesic_between(cx: CubeComplex, x: str, y: str) -> DiscretePath:
    """Some combinatorial geodesic from x to y (greedy descent on distance)."""
    D = cx.distances
    xi, yi = cx.vid(x), cx.vid(y)
    out = [xi]
    while out[-1] != yi:
        cur = out[-1]
        out.append(next(v for v in cx.neighbours[cur] if D[v, yi] == D[cur, yi] - 1))
    return make_path(cx, [cx.vertices[i] for i in out], from_basepoint=(xi == cx.base))


def count_geodesics(cx: CubeComplex, x: str, y: str) -> int:
    D = cx.distances
    xi, yi = cx.vid(x), cx.vid(y)
    inside = np.flatnonzero(D[xi] + D[yi] == D[xi, yi])
    order = inside[np.argsort(D[xi, inside])]
    ways = {int(xi): 1}
    for v in order[1:]:
        ways[int(v)] = sum(ways.get(u, 0) for u in cx.neighbours[v] if D[xi, u] == D[xi, v] - 1)
    return ways[int(yi)]


def enumerate_geodesics(
    cx: CubeComplex, x: str, y: str, cap: int = 100_000, seed: int = 0
) -> tuple[list[list[int]], str]:
    """All geodesics x -> y as index lists, or ``cap`` uniform samples.

    Returns ``(paths, exactness)`` with exactness "exact" or "sampled".
    Sampling walks backwards from y choosing predecessors in proportion to
    their geodesic counts, which is uniform over geodesics.
    """
    D = cx.distances
    xi, yi = cx.vid(x), cx.vid(y)
    inside = np.flatnonzero(D[xi] + D[yi] == D[xi, yi])
    order = inside[np.argsort(D[xi, inside])]
    ways = {int(xi): 1}
    preds: dict[int, list[int]] = {int(xi): []}
    for v in order[1:]:
        ps = [u for u in cx.neighbours[v] if D[xi, u] == D[xi, v] - 1 and u in ways]
        preds[int(v)] = ps
        ways[int(v)] = sum(ways[u] for u in ps)
    total = ways[int(yi)]
    if total <= cap:
        out: list[list[int]] = []

        def back(v: int, tail: list[int]) -> None:
            if v == xi:
                out.append([v] + tail)
                return
            for u in preds[v]:
                back(u, [v] + tail)

        back(int(yi), [])
        return out, "exact"
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(cap):
        v, tail = int(yi), []
        while v != xi:
            tail.append(v)
            ps = preds[v]
            w = np.array([ways[u] for u in ps], dtype=float)
            v = ps[int(rng.choice(len(ps), p=w / w.sum()))]
        out.append([v] + tail[::-1])
    return out, "sampled"


# ---------------------------------------------------------------------------
# gauge neighbourhoods


def kappa_gauge(cx: CubeComplex, Z: Iterable[str], path: DiscretePath, kappa: SublinearFunction) -> float:
    """Least n with every path vertex p in N_kappa(Z, n), i.e. d(p, Z) <= n kappa(|p|)."""
    zi = _ids(cx, Z)
    D = cx.distances
    p = path.idx
    dz = D[np.ix_(p, zi)].min(axis=1)
    norms = D[cx.base, p]
    return float(np.max(dz / kappa(norms)))


def fellow_travel_gauges(p1: DiscretePath, p2: DiscretePath, kappa: SublinearFunction) -> tuple[float, float]:
    """Gauges of each path in the neighbourhood of the other."""
    cx = p1.complex
    return kappa_gauge(cx, p2.vertices, p1, kappa), kappa_gauge(cx, p1.vertices, p2, kappa)


# ---------------------------------------------------------------------------
# excursion chains


@dataclass(frozen=True)
class ChainEntry:
    wall: str
    anchor: str
    index: int  # path step whose edge crosses the wall; anchor = path[index]


@dataclass(frozen=True, eq=False)
class ExcursionChain:
    entries: tuple[ChainEntry, ...]
    c: float | None
    kappa: SublinearFunction
    path: DiscretePath | None = None
    exactness: str = "exact"
    diagnostic: str = ""

    @property
    def walls(self) -> list[str]:
        return [e.wall for e in self.entries]

    @property
    def anchors(self) -> list[str]:
        return [e.anchor for e in self.entries]

    def to_json(self) -> dict:
        return {
            "walls": self.walls,
            "anchors": self.anchors,
            "indices": [e.index for e in self.entries],
            "c": self.c,
            "kappa": self.kappa.to_json(),
            "exactness": self.exactness,
            "diagnostic": self.diagnostic,
        }


def first_crossings(path: DiscretePath) -> list[ChainEntry]:
    """One entry per wall crossed, at its first crossing, in path order.

    The anchor is the path vertex just before the crossing edge.
    """
    cx = path.complex
    seen: set[int] = set()
    out = []
    for k, w in path.crossings():
        if w not in seen:
            seen.add(w)
            out.append(ChainEntry(cx.walls[w], path.vertices[k], k))
    return out


def chain_from_walls(path: DiscretePath, walls: Sequence[str], kappa: SublinearFunction, c: float | None = None) -> ExcursionChain:
    """Chain on the given walls with first-crossing anchors along ``path``."""
    by_wall = {e.wall: e for e in first_crossings(path)}
    missing = [w for w in walls if w not in by_wall]
    if missing:
        raise PreconditionError("path never crosses these walls", missing)
    return ExcursionChain(tuple(by_wall[w] for w in walls), c, kappa, path)


@dataclass
class ExcursionCheck:
    valid: bool
    minimal_c: float
    is_chain: bool
    gaps: list[int]
    degrees: list[int]
    degrees_exact: bool
    ratios: list[float]
    reason: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _pair_degree(cx: CubeComplex, a: int, b: int, cache: dict) -> tuple[int, bool]:
    X = cx.crossing_matrix
    common = np.flatnonzero(X[a] & X[b])
    if len(common) <= 2:
        return len(common), True
    key = tuple(common)
    if key not in cache:
        cache[key] = max_facing_free(cx, [cx.walls[w] for w in common])
    return cache[key]


def verify_excursion(cx: CubeComplex, chain: ExcursionChain) -> ExcursionCheck:
    """Re-check a chain; returns validity and the least workable constant c.

    The least c is ``max_i max(d(x_i, x_{i+1}), degree(h_i, h_{i+1})) / kappa(|x_i|)``.
    """
    if len(chain.entries) < 2:
        raise PreconditionError("an excursion chain needs at least two walls")
    walls = [cx.wid(e.wall) for e in chain.entries]
    anchors = [cx.vid(e.anchor) for e in chain.entries]
    reasons = []
    for e, w, a in zip(chain.entries, walls, anchors):
        if w not in cx.adjacency[a]:
            raise PreconditionError("anchor is not on the carrier of its wall", [e.anchor, e.wall])
        if chain.path is not None:
            p = chain.path
            if not (0 <= e.index < len(p) - 1) or p.vertices[e.index] != e.anchor:
                raise PreconditionError("anchor is not at its recorded path index", [e.anchor, e.index])
            step = cx.edge_wall[tuple(sorted((cx.vid(p[e.index]), cx.vid(p[e.index + 1]))))]
            if step != w:
                raise PreconditionError("path edge at anchor does not cross the wall", [e.anchor, e.wall])
    chain_ok = is_chain(cx, [e.wall for e in chain.entries])
    if not chain_ok:
        reasons.append("walls do not form a chain")
    D = cx.distances
    cache: dict = {}
    gaps, degs, ratios = [], [], []
    exact = True
    for i in range(len(walls) - 1):
        g = int(D[anchors[i], anchors[i + 1]])
        if cx.crossing_matrix[walls[i], walls[i + 1]]:
            d, ex = len(cx.walls), False
        else:
            d, ex = _pair_degree(cx, walls[i], walls[i + 1], cache)
        exact &= ex
        k = float(chain.kappa(D[cx.base, anchors[i]]))
        gaps.append(g)
        degs.append(d)
        ratios.append(max(g, d) / k)
    cmin = max(ratios)
    if chain.c is not None and cmin > chain.c + TOL:
        reasons.append(f"least constant {cmin:.6g} exceeds declared c = {chain.c:.6g}")
    return ExcursionCheck(not reasons, cmin, chain_ok, gaps, degs, exact, ratios, "; ".join(reasons))


def _transition_ratios(cx: CubeComplex, cands: list[ChainEntry], kappa: SublinearFunction) -> np.ndarray:
    """``R[i, j]`` = step ratio from candidate i to a later candidate j (inf if crossing)."""
    m = len(cands)
    w = np.array([cx.wid(e.wall) for e in cands])
    a = np.array([cx.vid(e.anchor) for e in cands])
    X = cx.crossing_matrix[np.ix_(w, w)]
    Xall = cx.crossing_matrix[w].astype(np.int32)
    common = Xall @ Xall.T
    D = cx.distances
    gap = D[np.ix_(a, a)].astype(float)
    deg = common.astype(float)
    cache: dict = {}
    for i, j in np.argwhere((common >= 3) & ~X):
        if i < j:
            deg[i, j] = _pair_degree(cx, int(w[i]), int(w[j]), cache)[0]
    k = np.asarray(kappa(D[cx.base, a]), dtype=float)
    R = np.maximum(gap, deg) / k[:, None]
    R[X] = np.inf
    R[np.tril_indices(m)] = np.inf
    return R


def find_excursion_chain(path: DiscretePath, kappa: SublinearFunction) -> ExcursionChain:
    """Chain of first-crossed walls with the least bottleneck constant.

    Candidates are the walls crossed by ``path`` in first-crossing order; a
    chain must start at the first one and end at the last one reachable.
    Among chains achieving the least constant, the one with the most walls is
    returned.  The constant is exact for chains of this form and an upper
    bound on the least constant over all chains.
    """
    cx = path.complex
    if not path.from_basepoint:
        raise PreconditionError("excursion search needs a path from the basepoint")
    cands = first_crossings(path)
    if len(cands) < 2:
        return ExcursionChain((), None, kappa, path, "upper_bound", "path crosses fewer than two walls")
    m = len(cands)
    R = _transition_ratios(cx, cands, kappa)
    best = np.full(m, np.inf)
    best[0] = 0.0
    for j in range(1, m):
        best[j] = np.min(np.maximum(best[:j], R[:j, j]))
    reach = np.flatnonzero(np.isfinite(best))
    end = int(reach[-1])
    if end == 0:
        return ExcursionChain((), None, kappa, path, "upper_bound", "no wall after the first is disjoint from it")
    cstar = float(best[end])
    ok = R <= cstar * (1 + 1e-12) + TOL
    longest = np.full(m, -1)
    prev = np.full(m, -1)
    longest[0] = 0
    for j in range(1, end + 1):
        src = np.flatnonzero(ok[:j, j] & (longest[:j] >= 0))
        if len(src):
            i = src[np.argmax(longest[src])]
            longest[j] = longest[i] + 1
            prev[j] = i
    seq = [end]
    while seq[-1] != 0:
        seq.append(int(prev[seq[-1]]))
    entries = tuple(cands[i] for i in reversed(seq))
    diag = "" if end == m - 1 else f"last {m - 1 - end} crossed walls unreachable; chain truncated"
    chain = ExcursionChain(entries, cstar, kappa, path, "upper_bound", diag)
    if len(entries) > 2 and not is_chain(cx, chain.walls):
        return ExcursionChain(entries, cstar, kappa, path, "upper_bound", "selected walls fail the chain test")
    return chain


def minimal_c_trend(
    path: DiscretePath, kappa: SublinearFunction, walls: Sequence[str] | None = None, windows: int = 4
) -> list[tuple[int, float]]:
    """Least excursion constant over growing prefixes of ``path``.

    With ``walls`` the chain is fixed (restricted to walls crossed inside
    each prefix); otherwise it is searched per prefix.
    """
    L = len(path)
    out = []
    for k in range(1, windows + 1):
        length = max(2, math.ceil(L * k / windows))
        pre = path.prefix(length)
        if walls is None:
            ch = find_excursion_chain(pre, kappa)
            c = ch.c if ch.entries else math.nan
        else:
            crossed = {e.wall for e in first_crossings(pre)}
            ws = [w for w in walls if w in crossed]
            if len(ws) < 2:
                continue
            c = verify_excursion(path.complex, chain_from_walls(pre, ws, kappa)).minimal_c
        out.append((length, float(c)))
    return out


def grows(trend: Sequence[tuple[int, float]], factor: float = 2.0) -> bool:
    """True when the windowed constant ends at least ``factor`` times its start."""
    vals = [c for _, c in trend if not math.isnan(c)]
    return len(vals) >= 2 and vals[-1] >= factor * vals[0]


# ---------------------------------------------------------------------------
# crossing locality


def _chain_orientation(cx: CubeComplex, walls: list[int]) -> list[bool]:
    """Per chain wall, the side (True = plus) facing the later walls."""
    rep = cx.wall_rep
    S = cx.sides
    fwd = [bool(S[rep[walls[k + 1]], walls[k]]) for k in range(len(walls) - 1)]
    fwd.append(not bool(S[rep[walls[-2]], walls[-1]]))
    return fwd


def between_mask(cx: CubeComplex, chain: ExcursionChain, k: int) -> np.ndarray:
    """Vertices between chain walls k and k+1."""
    walls = [cx.wid(w) for w in chain.walls]
    fwd = _chain_orientation(cx, walls)
    S = cx.sides
    return (S[:, walls[k]] == fwd[k]) & (S[:, walls[k + 1]] != fwd[k + 1])


@dataclass
class LocalityResult:
    ok: bool
    index: int
    max_distance: int
    bound: float
    crossing_points: list[tuple[str, int]]
    exactness: str = "exact"


def crossing_locality_check(
    cx: CubeComplex,
    chain: ExcursionChain,
    x: str,
    y: str,
    index: int | None = None,
    c: float | None = None,
    method: str = "edges",
    cap: int = 100_000,
    seed: int = 0,
) -> LocalityResult:
    """Check that every geodesic x -> y meets wall ``h_i`` near its anchor.

    x must lie between h_{i-2}, h_{i-1} and y between h_{i+1}, h_{i+2}.  The
    crossing point z is the endpoint of the crossed dual edge on the anchor's
    side; the bound is ``4 c kappa(|x_i|)``.  ``method="edges"`` inspects every
    dual edge of h_i lying on some x -> y geodesic, which covers all
    geodesics at once; ``method="enumerate"`` walks the geodesics themselves.
    """
    m = len(chain.entries)
    xi, yi = cx.vid(x), cx.vid(y)
    if index is None:
        for i in range(2, m - 2):
            if between_mask(cx, chain, i - 2)[xi] and between_mask(cx, chain, i + 1)[yi]:
                index = i
                break
        else:
            raise PreconditionError("x, y are not positioned around an interior chain wall", [x, y])
    i = index
    if not (2 <= i <= m - 3 and between_mask(cx, chain, i - 2)[xi] and between_mask(cx, chain, i + 1)[yi]):
        raise PreconditionError("x, y are not positioned around chain wall i", [x, y, i])
    if c is None:
        c = chain.c if chain.c is not None else verify_excursion(cx, chain).minimal_c
    w = cx.wid(chain.entries[i].wall)
    anchor = cx.vid(chain.entries[i].anchor)
    D = cx.distances
    bound = 4.0 * c * float(chain.kappa(D[cx.base, anchor]))
    side = cx.sides[anchor, w]
    edges = [(a, b) if cx.sides[a, w] == side else (b, a) for a, b in cx.dual_edges[w]]
    hits: dict[int, int] = {}
    exactness = "exact"
    if method == "edges":
        for a, b in edges:
            for u, v in ((a, b), (b, a)):
                if D[xi, u] + 1 + D[v, yi] == D[xi, yi]:
                    hits[int(a)] = int(D[a, anchor])
    elif method == "enumerate":
        near = {int(b): int(a) for a, b in edges} | {int(a): int(a) for a, b in edges}
        paths, exactness = enumerate_geodesics(cx, x, y, cap, seed)
        for p in paths:
            for u, v in zip(p, p[1:]):
                if cx.edge_wall[(min(u, v), max(u, v))] == w:
                    z = near[u]
                    hits[z] = int(D[z, anchor])
                    break
            else:
                raise AssertionError("geodesic misses a separating wall")
    else:
        raise ValueError(f"unknown method {method!r}")
    worst = max(hits.values())
    pts = sorted((cx.vertices[z], d) for z, d in hits.items())
    return LocalityResult(worst <= bound + TOL, i, worst, bound, pts, exactness)


# ---------------------------------------------------------------------------
# contraction profiles


@dataclass(frozen=True)
class SampleSpec:
    mode: str = "exhaustive"  # or "sampled"
    n_points: int = 500
    seed: int = 0
    windows: int = 4
    max_pairs: int | None = None  # budget; exceeding it yields a partial profile


@dataclass
class ContractionProfile:
    max_ratio: float
    witness: tuple[str, str] | None
    trend: list[tuple[int, float]]
    exactness: str
    seed: int | None
    n_points: int
    kappa: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


def contraction_profile(
    cx: CubeComplex, Y: ConvexSubset, kappa: SublinearFunction, spec: SampleSpec = SampleSpec()
) -> ContractionProfile:
    """Largest ``d(P(x), P(y)) / kappa(|x|)`` over pairs with ``d(x, y) <= d(x, P(x))``.

    P is the gate map to Y.  ``trend`` restricts x to growing norm windows
    ``|x| <= R``.  Ties on the maximum go to the lexicographically smallest
    ``(x, y)`` vertex-id pair.
    """
    D = cx.distances
    G = gate_map(cx, Y)
    n = cx.n_vertices
    xs = np.arange(n)
    exactness, seed = "exact", None
    if spec.mode == "sampled" and spec.n_points < n:
        rng = np.random.default_rng(spec.seed)
        xs = np.sort(rng.choice(n, spec.n_points, replace=False))
        exactness, seed = "sampled", spec.seed
    elif spec.mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown sampling mode {spec.mode!r}")
    names = cx.vertices
    norms = D[cx.base]
    kx = np.asarray(kappa(norms), dtype=float)
    per_x = np.zeros(len(xs))
    per_y = np.full(len(xs), -1)
    pairs = 0
    for k, x in enumerate(xs):
        r = D[x, G[x]]
        ys = np.flatnonzero(D[x] <= r)
        pairs += len(ys)
        if spec.max_pairs is not None and pairs > spec.max_pairs:
            xs, per_x, per_y = xs[:k], per_x[:k], per_y[:k]
            exactness = "partial"
            break
        spread = D[G[x], G[ys]]
        top = spread.max()
        cand = ys[spread == top]
        per_x[k] = top / kx[x]
        per_y[k] = min(cand, key=lambda j: names[j])
    if len(xs) == 0:
        return ContractionProfile(0.0, None, [], exactness, seed, 0, kappa.label)
    top = per_x.max()
    tied = [k for k in range(len(xs)) if per_x[k] == top]
    kbest = min(tied, key=lambda k: (names[xs[k]], names[per_y[k]]))
    witness = (names[xs[kbest]], names[per_y[kbest]])
    radii = sorted({int(math.ceil(norms.max() * j / spec.windows)) for j in range(1, spec.windows + 1)})
    trend = [(R, float(per_x[norms[xs] <= R].max(initial=0.0))) for R in radii]
    return ContractionProfile(float(top), witness, trend, exactness, seed, len(xs), kappa.label)


# ---------------------------------------------------------------------------
# divergence and corridors


@dataclass
class DivergenceResult:
    ok: bool
    degree: int
    checked: int
    min_slack: float
    witness: int | None = None


def divergence_check(
    cx: CubeComplex,
    q: DiscretePath,
    q2: DiscretePath,
    w1: str,
    w2: str,
    t0: int,
    max_degree: int | None = None,
) -> DivergenceResult:
    """Check ``d(q(t), q2(t)) >= d(q(t), q(t0)) - L`` for every shared t >= t0.

    L is the well-separation degree of the two walls.  Preconditions: the
    walls are disjoint (and at most ``max_degree``-well-separated when that is
    given), q stays on the plus side of w2 from t0 on, q2 stays on the minus
    side of w1.
    """
    from .separation import hyperplane_degree

    a, b = cx.wid(w1), cx.wid(w2)
    if a == b or cx.crossing_matrix[a, b]:
        raise PreconditionError("walls must be distinct and disjoint", [w1, w2])
    L = hyperplane_degree(cx, w1, w2).value
    if max_degree is not None and L > max_degree:
        raise PreconditionError(f"walls are not {max_degree}-well-separated (degree {L})", L)
    S = cx.sides
    qi, q2i = q.idx, q2.idx
    if not S[qi[t0:], b].all():
        raise PreconditionError("q leaves the plus side of w2 after t0")
    if S[q2i, a].any():
        raise PreconditionError("q2 enters the plus side of w1")
    D = cx.distances
    T = min(len(qi), len(q2i))
    ts = np.arange(t0, T)
    if len(ts) == 0:
        return DivergenceResult(True, L, 0, math.inf)
    slack = D[qi[ts], q2i[ts]] - (D[qi[ts], qi[t0]] - L)
    bad = np.flatnonzero(slack < 0)
    return DivergenceResult(
        not len(bad), L, len(ts), float(slack.min()), int(ts[bad[0]]) if len(bad) else None
    )


def corridor_diameter(cx: CubeComplex, H: Iterable[str], k_wall: str, h_wall: str) -> int:
    """Diameter of the part of H on the basepoint side of both walls (-1 if empty)."""
    idx = _ids(cx, H)
    S = cx.sides
    sel = idx[~S[idx, cx.wid(k_wall)] & ~S[idx, cx.wid(h_wall)]]
    if len(sel) == 0:
        return -1
    return int(cx.distances[np.ix_(sel, sel)].max())
