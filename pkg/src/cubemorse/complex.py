"""Finite CAT(0) cube complexes stored as wall-labeled median graphs.

A complex is given by its 1-skeleton: vertices, edges labeled by the wall
(hyperplane) they are dual to, and a mandatory basepoint.  Every wall splits
the vertex set into a ``minus`` side (the one holding the basepoint) and a
``plus`` side; side membership is kept both as a dense boolean matrix and as
per-vertex bit signatures, so separation and median queries are lookups.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path


class ComplexError(ValueError):
    """Raised when input data does not describe a valid cube complex."""

    def __init__(self, message: str, report: "ValidationReport | None" = None, witness: Any = None):
        super().__init__(message)
        self.report = report
        self.witness = witness


class UnknownVertexError(KeyError):
    pass


class UnknownWallError(KeyError):
    pass


@dataclass(frozen=True)
class Hyperplane:
    wall: str
    minus_side: frozenset[str]
    plus_side: frozenset[str]
    dual_edges: tuple[tuple[str, str], ...]
    carrier: frozenset[str]


@dataclass(frozen=True, eq=False)
class CubeComplex:
    """Immutable wall-labeled 1-skeleton with a basepoint.

    Instances should come from :func:`from_edge_list`, :func:`realize_pocset`
    or the gallery generators, which validate before returning.  Direct
    construction skips validation.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]
    basepoint: str
    meta: Mapping[str, Any] = field(default_factory=dict)

    # ---- indexing -------------------------------------------------------
    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def walls(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for _, _, w in self.edges:
            seen.setdefault(w, None)
        return tuple(seen)

    @cached_property
    def wall_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.walls)}

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def base(self) -> int:
        return self.index[self.basepoint]

    def vid(self, v: str) -> int:
        try:
            return self.index[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def wid(self, w: str) -> int:
        try:
            return self.wall_index[w]
        except KeyError:
            raise UnknownWallError(w) from None

    @cached_property
    def edge_array(self) -> np.ndarray:
        """``(E, 3)`` int array of (u, v, wall) indices."""
        if not self.edges:
            return np.zeros((0, 3), dtype=np.int64)
        return np.array(
            [(self.index[u], self.index[v], self.wall_index[w]) for u, v, w in self.edges],
            dtype=np.int64,
        )

    @cached_property
    def adjacency(self) -> list[dict[int, int]]:
        """Per vertex: wall index -> neighbour index (last edge wins on clashes)."""
        adj: list[dict[int, int]] = [dict() for _ in self.vertices]
        for u, v, w in self.edge_array:
            adj[u][int(w)] = int(v)
            adj[v][int(w)] = int(u)
        return adj

    @cached_property
    def edge_wall(self) -> dict[tuple[int, int], int]:
        """(u, v) with u < v -> wall index."""
        return {(min(u, v), max(u, v)): int(w) for u, v, w in self.edge_array.tolist()}

    @cached_property
    def neighbours(self) -> list[list[int]]:
        nb: list[set[int]] = [set() for _ in self.vertices]
        for u, v, _ in self.edge_array:
            nb[u].add(int(v))
            nb[v].add(int(u))
        return [sorted(s) for s in nb]

    @cached_property
    def dual_edges(self) -> list[np.ndarray]:
        """Per wall, ``(k, 2)`` array of dual edges oriented minus -> plus."""
        out: list[list[tuple[int, int]]] = [[] for _ in self.walls]
        S = self.sides
        for u, v, w in self.edge_array:
            if S[u, w] and not S[v, w]:
                u, v = v, u
            out[w].append((int(u), int(v)))
        return [np.array(e, dtype=np.int64).reshape(-1, 2) for e in out]

    # ---- metric ---------------------------------------------------------
    @cached_property
    def _csr(self):
        n = self.n_vertices
        ea = self.edge_array
        rows = np.concatenate([ea[:, 0], ea[:, 1]])
        cols = np.concatenate([ea[:, 1], ea[:, 0]])
        return coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs BFS distance matrix (int32; -1 marks unreachable)."""
        D = shortest_path(self._csr, method="D", unweighted=True, directed=False)
        D[np.isinf(D)] = -1
        D = D.astype(np.int32)
        D.flags.writeable = False
        return D

    # ---- wall sides -----------------------------------------------------
    @cached_property
    def sides(self) -> np.ndarray:
        """``(n, W)`` boolean matrix, True where the vertex is on the plus side.

        Sides come from the component split after deleting the wall's dual
        edges; the component of the basepoint is the minus side.  On invalid
        complexes (more than two components) every component other than the
        basepoint's is lumped into the plus side.
        """
        n, W = self.n_vertices, len(self.walls)
        S = np.zeros((n, W), dtype=bool)
        ea = self.edge_array
        for w in range(W):
            keep = ea[:, 2] != w
            k = ea[keep]
            g = coo_matrix(
                (np.ones(2 * len(k)), (np.concatenate([k[:, 0], k[:, 1]]), np.concatenate([k[:, 1], k[:, 0]]))),
                shape=(n, n),
            )
            _, labels = connected_components(g, directed=False)
            S[:, w] = labels != labels[self.base]
        S.flags.writeable = False
        return S

    @cached_property
    def _sig_keys(self) -> dict[bytes, int]:
        packed = np.packbits(self.sides, axis=1)
        keys: dict[bytes, int] = {}
        for i, row in enumerate(packed):
            keys.setdefault(row.tobytes(), i)
        return keys

    def lookup_signature(self, bits: np.ndarray) -> int | None:
        """Vertex index with the given plus-side pattern, or None."""
        return self._sig_keys.get(np.packbits(bits).tobytes())

    def lookup_signatures(self, bits: np.ndarray) -> np.ndarray:
        """Row-wise :meth:`lookup_signature`; -1 where no vertex matches."""
        packed = np.packbits(bits, axis=-1)
        keys = self._sig_keys
        return np.array([keys.get(r.tobytes(), -1) for r in packed], dtype=np.int64)

    @cached_property
    def plus_masks(self) -> list[int]:
        """Per wall, Python-int bitset over vertex indices of the plus side."""
        out = []
        for w in range(len(self.walls)):
            idx = np.flatnonzero(self.sides[:, w])
            out.append(_bitset(idx))
        return out

    @cached_property
    def carrier_masks(self) -> list[int]:
        return [_bitset(np.unique(e)) for e in self.dual_edges]

    @cached_property
    def crossing_matrix(self) -> np.ndarray:
        """``(W, W)`` boolean: walls cross iff all four quadrants are nonempty."""
        S = self.sides.astype(np.float32)
        M = 1.0 - S
        pp = S.T @ S
        pm = S.T @ M
        mm = M.T @ M
        X = (pp > 0) & (pm > 0) & (pm.T > 0) & (mm > 0)
        np.fill_diagonal(X, False)
        X.flags.writeable = False
        return X

    @cached_property
    def crossing_masks(self) -> list[int]:
        return [_bitset(np.flatnonzero(row)) for row in self.crossing_matrix]

    @cached_property
    def wall_rep(self) -> np.ndarray:
        """One carrier vertex per wall (minus endpoint of its first dual edge)."""
        return np.array([e[0, 0] for e in self.dual_edges], dtype=np.int64)

    # ---- public queries -------------------------------------------------
    def norm(self, v: str) -> int:
        """``d(o, v)`` for the fixed basepoint ``o``."""
        return int(self.distances[self.base, self.vid(v)])

    def hyperplane(self, wall: str) -> Hyperplane:
        return hyperplane(self, wall)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[u, v, w] for u, v, w in self.edges],
            "basepoint": self.basepoint,
            "meta": _plain(self.meta),
        }

    @cached_property
    def digest(self) -> str:
        payload = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def relabel(self, mapping: Mapping[str, str]) -> "CubeComplex":
        """Copy with vertices renamed; meta is dropped."""
        return CubeComplex(
            vertices=tuple(mapping[v] for v in self.vertices),
            edges=tuple((mapping[u], mapping[v], w) for u, v, w in self.edges),
            basepoint=mapping[self.basepoint],
        )


def _bitset(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


# ---------------------------------------------------------------------------
# validation


@dataclass
class CheckResult:
    name: str
    ok: bool | None  # None when skipped
    detail: str = ""
    witness: Any = None


@dataclass
class ValidationReport:
    checks: list[CheckResult]
    dimension: int | None = None

    @property
    def ok(self) -> bool:
        return all(c.ok is not False for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.ok is False]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "dimension": self.dimension,
            "checks": [
                {"name": c.name, "ok": c.ok, "detail": c.detail, "witness": _plain(c.witness)}
                for c in self.checks
            ],
        }


def _check_connected(cx: CubeComplex) -> CheckResult:
    D = cx.distances
    bad = np.flatnonzero(D[cx.base] < 0)
    if len(bad):
        return CheckResult("connected", False, "vertex unreachable from basepoint", cx.vertices[bad[0]])
    return CheckResult("connected", True)


def _check_labels(cx: CubeComplex) -> CheckResult:
    seen: dict[tuple[int, int], int] = {}
    for u, v, w in cx.edge_array:
        for a, b in ((u, v), (v, u)):
            key = (int(a), int(w))
            if key in seen and seen[key] != b:
                return CheckResult(
                    "distinct_labels_at_vertex", False, "two edges at one vertex share a wall label",
                    [cx.vertices[a], cx.walls[w]],
                )
            seen[key] = int(b)
    return CheckResult("distinct_labels_at_vertex", True)


def _check_wall_splits(cx: CubeComplex) -> CheckResult:
    n = cx.n_vertices
    ea = cx.edge_array
    for w in range(len(cx.walls)):
        k = ea[ea[:, 2] != w]
        g = coo_matrix(
            (np.ones(2 * len(k)), (np.concatenate([k[:, 0], k[:, 1]]), np.concatenate([k[:, 1], k[:, 0]]))),
            shape=(n, n),
        )
        ncomp, labels = connected_components(g, directed=False)
        if ncomp != 2:
            return CheckResult(
                "wall_splits_in_two", False, f"removing wall leaves {ncomp} components", cx.walls[w]
            )
        dual = ea[ea[:, 2] == w]
        same = labels[dual[:, 0]] == labels[dual[:, 1]]
        if same.any():
            u, v, _ = dual[np.argmax(same)]
            return CheckResult(
                "wall_splits_in_two", False, "dual edge with both ends on one side",
                [cx.walls[w], cx.vertices[u], cx.vertices[v]],
            )
    return CheckResult("wall_splits_in_two", True)


def _check_convex_sides(cx: CubeComplex, chunk: int = 512) -> CheckResult:
    """Sides are convex iff BFS distance equals the separating-wall count.

    (Each edge crosses one wall, so a geodesic leaving and re-entering a side
    would cross some wall twice and exceed the count.)
    """
    D = cx.distances
    packed = np.packbits(cx.sides, axis=1)
    n = cx.n_vertices
    for start in range(0, n, chunk):
        block = packed[start:start + chunk]
        sep = np.bitwise_count(block[:, None, :] ^ packed[None, :, :]).sum(-1)
        bad = np.argwhere(sep != D[start:start + chunk])
        if len(bad):
            x, y = int(bad[0][0] + start), int(bad[0][1])
            return CheckResult(
                "convex_sides", False, "geodesic leaves a half-space", _convexity_witness(cx, x, y)
            )
    return CheckResult("convex_sides", True)


def _convexity_witness(cx: CubeComplex, x: int, y: int):
    D = cx.distances
    S = cx.sides
    interval = np.flatnonzero(D[x] + D[y] == D[x, y])
    same = np.flatnonzero(S[x] == S[y])
    for w in same:
        off = interval[S[interval, w] != S[x, w]]
        if len(off):
            return [cx.walls[w], cx.vertices[x], cx.vertices[y], cx.vertices[off[0]]]
    return [None, cx.vertices[x], cx.vertices[y], None]


def _distance_two_pairs(cx: CubeComplex) -> dict[tuple[int, int], list[int]]:
    common: dict[tuple[int, int], list[int]] = {}
    for z, nb in enumerate(cx.neighbours):
        for v, w in itertools.combinations(nb, 2):
            common.setdefault((v, w), []).append(z)
    return common


def _check_median(cx: CubeComplex, chunk: int = 256) -> CheckResult:
    """Exact local test: bipartite, no induced K_{2,3}, quadrangle condition.

    Median graphs are exactly the modular graphs without induced K_{2,3}, and
    a bipartite graph is modular iff it satisfies the quadrangle condition.
    Each failure is converted into a vertex triple without a unique median.
    """
    D = cx.distances
    if (D < 0).any():
        return CheckResult("median", None, "skipped: graph disconnected")
    o = cx.base
    ea = cx.edge_array
    odd = D[o, ea[:, 0]] == D[o, ea[:, 1]]
    if odd.any():
        u, v, _ = ea[np.argmax(odd)]
        return CheckResult(
            "median", False, "odd cycle: triple has no median",
            [cx.vertices[o], cx.vertices[u], cx.vertices[v]],
        )
    common = _distance_two_pairs(cx)
    for (v, w), cs in common.items():
        if len(cs) >= 3:
            return CheckResult(
                "median", False, "induced K_{2,3}: triple has two medians",
                [cx.vertices[c] for c in cs[:3]],
            )
    if not common:
        return CheckResult("median", True)
    pairs = np.array([(v, w, cs[0], cs[-1]) for (v, w), cs in common.items()], dtype=np.int64)
    V, W_, C1, C2 = pairs.T
    n = cx.n_vertices
    for start in range(0, n, chunk):
        rows = D[start:start + chunk]
        dv, dw, d1, d2 = rows[:, V], rows[:, W_], rows[:, C1], rows[:, C2]
        up = (d1 == dv + 1) | (d2 == dv + 1)
        down = (d1 == dv - 1) | (d2 == dv - 1)
        bad = np.argwhere((dv == dw) & up & ~down)
        if len(bad):
            u, p = int(bad[0][0] + start), int(bad[0][1])
            return CheckResult(
                "median", False, "quadrangle condition fails: triple has no median",
                [cx.vertices[u], cx.vertices[V[p]], cx.vertices[W_[p]]],
            )
    return CheckResult("median", True)


def median_triple_scan(cx: CubeComplex, triples: np.ndarray | None = None) -> tuple[bool, list[str] | None]:
    """Brute-force median check straight from the definition.

    For each triple, counts the vertices in the intersection of the three
    pairwise intervals; anything other than exactly one is a failure.
    ``triples=None`` scans all unordered triples (cubic cost).
    """
    D = cx.distances.astype(np.int64)
    n = cx.n_vertices
    if triples is None:
        triples = np.array(list(itertools.combinations_with_replacement(range(n), 3)), dtype=np.int64)
        if len(triples) == 0:
            return True, None
    for block in np.array_split(triples, max(1, len(triples) // 2048)):
        x, y, z = block.T
        ixy = D[x] + D[y] == D[x, y][:, None]
        iyz = D[y] + D[z] == D[y, z][:, None]
        ixz = D[x] + D[z] == D[x, z][:, None]
        cnt = (ixy & iyz & ixz).sum(1)
        bad = np.flatnonzero(cnt != 1)
        if len(bad):
            t = block[bad[0]]
            return False, [cx.vertices[i] for i in t]
    return True, None


def dimension(cx: CubeComplex) -> int:
    """Largest set of pairwise-crossing walls dual to edges at one vertex."""
    X = cx.crossing_matrix
    best = 1 if cx.edges else 0
    for v in range(cx.n_vertices):
        inc = sorted(cx.adjacency[v])
        if len(inc) <= best:
            continue
        best = max(best, _max_clique(inc, X))
    return best


def _max_clique(cands: list[int], X: np.ndarray) -> int:
    best = 0

    def grow(size: int, pool: list[int]) -> None:
        nonlocal best
        if size > best:
            best = size
        if size + len(pool) <= best:
            return
        for i, c in enumerate(pool):
            if size + len(pool) - i <= best:
                return
            grow(size + 1, [d for d in pool[i + 1:] if X[c, d]])

    grow(0, cands)
    return best


def validate(cx: CubeComplex) -> ValidationReport:
    checks = [_check_connected(cx), _check_labels(cx)]
    if checks[0].ok:
        checks.append(_check_wall_splits(cx))
    else:
        checks.append(CheckResult("wall_splits_in_two", None, "skipped: graph disconnected"))
    if checks[0].ok and checks[2].ok:
        checks.append(_check_convex_sides(cx))
    else:
        checks.append(CheckResult("convex_sides", None, "skipped: sides undefined"))
    checks.append(_check_median(cx))
    report = ValidationReport(checks)
    if report.ok:
        report.dimension = dimension(cx)
    return report


# ---------------------------------------------------------------------------
# construction


def from_edge_list(
    vertices: Iterable[str],
    labeled_edges: Iterable[Sequence[str]],
    basepoint: str,
    meta: Mapping[str, Any] | None = None,
    check: bool = True,
) -> CubeComplex:
    """Build and validate a complex; raises :class:`ComplexError` on failure."""
    verts = tuple(str(v) for v in vertices)
    if len(set(verts)) != len(verts):
        raise ComplexError("duplicate vertex identifiers")
    vset = set(verts)
    edges = []
    seen = set()
    for e in labeled_edges:
        u, v, w = (str(x) for x in e)
        if u not in vset or v not in vset:
            raise ComplexError(f"edge {u}-{v} references an undeclared vertex", witness=[u, v])
        if u == v:
            raise ComplexError(f"loop at {u}", witness=[u])
        key = frozenset((u, v))
        if key in seen:
            raise ComplexError(f"repeated edge {u}-{v}", witness=[u, v])
        seen.add(key)
        edges.append((u, v, w))
    basepoint = str(basepoint)
    if basepoint not in vset:
        raise ComplexError(f"basepoint {basepoint!r} is not a vertex")
    cx = CubeComplex(verts, tuple(edges), basepoint, dict(meta or {}))
    if check:
        report = validate(cx)
        if not report.ok:
            fails = report.failures()
            msg = "; ".join(f"{f.name}: {f.detail}" for f in fails)
            raise ComplexError(msg, report=report, witness=fails[0].witness)
    return cx


def hyperplane(cx: CubeComplex, wall: str) -> Hyperplane:
    w = cx.wid(wall)
    S = cx.sides[:, w]
    names = np.array(cx.vertices, dtype=object)
    de = cx.dual_edges[w]
    return Hyperplane(
        wall=wall,
        minus_side=frozenset(names[~S]),
        plus_side=frozenset(names[S]),
        dual_edges=tuple((cx.vertices[a], cx.vertices[b]) for a, b in de),
        carrier=frozenset(cx.vertices[i] for i in np.unique(de)),
    )


def distance(cx: CubeComplex, x: str, y: str) -> int:
    return int(cx.distances[cx.vid(x), cx.vid(y)])


def separating_walls(cx: CubeComplex, x: str, y: str) -> frozenset[str]:
    S = cx.sides
    diff = np.flatnonzero(S[cx.vid(x)] != S[cx.vid(y)])
    return frozenset(cx.walls[w] for w in diff)


def bfs_distances(cx: CubeComplex, source: str) -> dict[str, int]:
    """Plain single-source BFS; independent of the cached scipy matrix."""
    s = cx.vid(source)
    dist = {s: 0}
    queue = deque([s])
    nb = cx.neighbours
    while queue:
        u = queue.popleft()
        for v in nb[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return {cx.vertices[i]: d for i, d in dist.items()}


# ---------------------------------------------------------------------------
# pocsets


def _token(wall: str, sign: str) -> tuple[str, str]:
    if sign not in "+-":
        raise ComplexError(f"bad half-space sign {sign!r}")
    return (wall, sign)


def _flip(t: tuple[str, str]) -> tuple[str, str]:
    return (t[0], "-" if t[1] == "+" else "+")


def parse_token(s: str) -> tuple[str, str]:
    """``"w1+"`` -> ``("w1", "+")``."""
    s = s.strip()
    return _token(s[:-1], s[-1])


@dataclass(frozen=True)
class HalfSpaceSystem:
    """Walls with two half-space tokens each and a nesting order.

    ``nesting`` holds pairs ``(h, k)`` read as "half-space h is contained in
    half-space k"; tokens are ``(wall, "+")`` / ``(wall, "-")``.  The order is
    closed under transitivity and the complement rule h <= k => k* <= h* by
    :meth:`closure`.
    """

    walls: tuple[str, ...]
    nesting: frozenset[tuple[tuple[str, str], tuple[str, str]]] = frozenset()

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "HalfSpaceSystem":
        pairs = [(parse_token(a), parse_token(b)) for a, b in data.get("nesting", [])]
        return cls(tuple(str(w) for w in data["walls"]), frozenset(pairs))

    def to_json(self) -> dict:
        return {
            "walls": list(self.walls),
            "nesting": sorted([a[0] + a[1], b[0] + b[1]] for a, b in self.nesting),
        }

    def closure(self) -> set[tuple[tuple[str, str], tuple[str, str]]]:
        """Transitive, complement-closed nesting relation.

        Raises ComplexError on a token nested in its own complement, on a
        cycle (antisymmetry), or on unknown walls.
        """
        wset = set(self.walls)
        if len(wset) != len(self.walls):
            raise ComplexError("duplicate wall identifiers in half-space system")
        rel: set[tuple[tuple[str, str], tuple[str, str]]] = set()
        for a, b in self.nesting:
            if a[0] not in wset or b[0] not in wset:
                raise ComplexError("nesting refers to an unknown wall", witness=[a, b])
            rel.add((a, b))
            rel.add((_flip(b), _flip(a)))
        changed = True
        while changed:
            changed = False
            by_src: dict[tuple[str, str], set[tuple[str, str]]] = {}
            for a, b in rel:
                by_src.setdefault(a, set()).add(b)
            for a, b in list(rel):
                for c in by_src.get(b, ()):
                    if (a, c) not in rel:
                        rel.add((a, c))
                        changed = True
        for a, b in rel:
            if a == b:
                raise ComplexError("nesting cycle (antisymmetry fails)", witness=[a, b])
            if b == _flip(a):
                raise ComplexError(
                    f"half-space {a[0]}{a[1]} nested in its own complement", witness=[a, b]
                )
        return rel


def consistent_orientations(system: HalfSpaceSystem) -> list[dict[str, str]]:
    """All orientations (one token per wall) closed upward under nesting.

    Backtracks over walls; a partial choice is pruned as soon as a chosen
    token sits below the complement of another chosen token.
    """
    rel = system.closure()
    up: dict[tuple[str, str], set[tuple[str, str]]] = {}
    for a, b in rel:
        up.setdefault(a, set()).add(b)
    walls = list(system.walls)
    out: list[dict[str, str]] = []
    choice: dict[str, str] = {}

    def compatible(tok: tuple[str, str]) -> bool:
        # tok must not lie inside the complement of an already chosen token
        ups = up.get(tok, ())
        return all(_flip((w, sg)) not in ups for w, sg in choice.items())

    def rec(i: int) -> None:
        if i == len(walls):
            out.append(dict(choice))
            return
        w = walls[i]
        for sg in "-+":
            if compatible((w, sg)):
                choice[w] = sg
                rec(i + 1)
                del choice[w]

    rec(0)
    return out


def orientation_id(orient: Mapping[str, str], walls: Sequence[str]) -> str:
    return "".join(orient[w] for w in walls)


def realize_pocset(
    system: HalfSpaceSystem, basepoint: Mapping[str, str] | str | None = None
) -> CubeComplex:
    """Dual cube complex of a finite pocset.

    Vertices are the consistent orientations, named by their sign strings in
    wall order (``"+-+"``); edges join orientations differing on one wall.
    ``basepoint`` may be an orientation mapping, its sign string, or None for
    the lexicographically smallest orientation ("-" sorts before "+").
    """
    walls = list(system.walls)
    orients = consistent_orientations(system)
    if not orients:
        raise ComplexError("half-space system has no consistent orientation")
    ids = [orientation_id(o, walls) for o in orients]
    idset = set(ids)
    edges = []
    for vid in ids:
        for i, w in enumerate(walls):
            if vid[i] == "-":
                other = vid[:i] + "+" + vid[i + 1:]
                if other in idset:
                    edges.append((vid, other, w))
    if basepoint is None:
        base = min(ids, key=lambda s: s.replace("-", "0").replace("+", "1"))
    elif isinstance(basepoint, str):
        base = basepoint
    else:
        base = orientation_id(basepoint, walls)
    if base not in idset:
        raise ComplexError(f"basepoint orientation {base} is not consistent")
    return from_edge_list(ids, edges, base, meta={"kind": "pocset", "pocset": system.to_json()})


def extract_pocset(cx: CubeComplex) -> HalfSpaceSystem:
    """Read the nesting order back off a complex (tokens: '+' = plus side)."""
    masks = {}
    full = (1 << cx.n_vertices) - 1
    for i, w in enumerate(cx.walls):
        p = cx.plus_masks[i]
        masks[(w, "+")] = p
        masks[(w, "-")] = full & ~p
    rel = set()
    for a, ma in masks.items():
        for b, mb in masks.items():
            if a[0] != b[0] and ma & ~mb == 0:
                rel.add((a, b))
    return HalfSpaceSystem(cx.walls, frozenset(rel))


# ---------------------------------------------------------------------------
# JSON I/O


def dumps(cx: CubeComplex) -> str:
    return json.dumps(cx.to_json(), indent=1) + "\n"


def save(cx: CubeComplex, path: str | Path) -> str:
    Path(path).write_text(dumps(cx))
    return cx.digest


def loads(text: str, check: bool = True) -> CubeComplex:
    data = json.loads(text)
    try:
        return from_edge_list(data["vertices"], data["edges"], data["basepoint"], data.get("meta"), check=check)
    except KeyError as exc:
        raise ComplexError(f"complex JSON is missing field {exc}") from None


def load(path: str | Path, check: bool = True) -> CubeComplex:
    return loads(Path(path).read_text(), check=check)
