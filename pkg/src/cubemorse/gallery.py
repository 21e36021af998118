"""Deterministic example complexes, including the Z*Z^2 tree of flats.

Wall naming:
  * grids: ``wV{j}`` separates x = j from x = j + 1, ``wH{j}`` separates
    y = j from y = j + 1; vertex ``v{x}{y}`` (``v{x}_{y}`` once a side
    exceeds 10); basepoint ``v00``.
  * trees: one wall per edge, ``e{k}`` in input order unless labelled.
  * tripods: centre ``c``, leg i vertex j is ``l{i}.{j}``, the edge into it
    is dual to ``t{i}.{j}``.
  * products: vertex ``u|v``, walls ``1:w`` and ``2:w``.
  * staircases: grid points with ``|x - y| <= width``, grid wall names.
  * tree of flats: flat i has vertices ``F{i}:{a},{b}``, walls ``a{i}.{j}``
    (between a = j and j + 1), ``b{i}.{j}`` (between b = j and j + 1), and
    the spine edge into flat i is dual to ``c{i}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .complex import ComplexError, CubeComplex, HalfSpaceSystem, from_edge_list, realize_pocset
from .kappa import SublinearFunction, validate_kappa
from .median import ConvexSubset, gate_map
from .morse import DiscretePath, make_path


def _positive(**sizes) -> None:
    for name, v in sizes.items():
        if v < 1:
            raise ValueError(f"{name} must be positive, got {v}")


def grid_name(x: int, y: int, wide: bool) -> str:
    return f"v{x}_{y}" if wide else f"v{x}{y}"


def gen_grid(m: int, n: int) -> CubeComplex:
    """m columns by n rows of vertices."""
    _positive(m=m, n=n)
    wide = m > 10 or n > 10
    name = lambda x, y: grid_name(x, y, wide)
    verts = [name(x, y) for x in range(m) for y in range(n)]
    edges = [(name(x, y), name(x + 1, y), f"wV{x}") for x in range(m - 1) for y in range(n)]
    edges += [(name(x, y), name(x, y + 1), f"wH{y}") for x in range(m) for y in range(n - 1)]
    return from_edge_list(verts, edges, name(0, 0), {"kind": "grid", "m": m, "n": n})


def gen_path(k: int) -> CubeComplex:
    """Path with k vertices ``p0 .. p{k-1}``."""
    _positive(k=k)
    verts = [f"p{i}" for i in range(k)]
    edges = [(f"p{i}", f"p{i + 1}", f"e{i}") for i in range(k - 1)]
    return from_edge_list(verts, edges, "p0", {"kind": "path", "k": k})


def gen_tree(edges: Sequence[Sequence[str]], basepoint: str | None = None) -> CubeComplex:
    """Tree from ``(u, v)`` or ``(u, v, wall)`` rows."""
    if not edges:
        raise ValueError("tree needs at least one edge")
    verts: list[str] = []
    labelled = []
    for k, e in enumerate(edges):
        u, v = str(e[0]), str(e[1])
        w = str(e[2]) if len(e) > 2 else f"e{k}"
        for x in (u, v):
            if x not in verts:
                verts.append(x)
        labelled.append((u, v, w))
    if len(verts) != len(labelled) + 1:
        raise ComplexError("edge list is not a tree (|V| != |E| + 1)")
    return from_edge_list(verts, labelled, basepoint or verts[0], {"kind": "tree"})


def gen_tripod(k: int) -> CubeComplex:
    """Centre plus three legs of length k."""
    _positive(k=k)
    verts = ["c"] + [f"l{i}.{j}" for i in range(3) for j in range(1, k + 1)]
    edges = []
    for i in range(3):
        prev = "c"
        for j in range(1, k + 1):
            edges.append((prev, f"l{i}.{j}", f"t{i}.{j}"))
            prev = f"l{i}.{j}"
    return from_edge_list(verts, edges, "c", {"kind": "tripod", "k": k})


def gen_product(c1: CubeComplex, c2: CubeComplex) -> CubeComplex:
    """Cartesian product; every wall of one factor crosses every wall of the other."""
    nm = lambda u, v: f"{u}|{v}"
    verts = [nm(u, v) for u in c1.vertices for v in c2.vertices]
    edges = [(nm(a, v), nm(b, v), f"1:{w}") for a, b, w in c1.edges for v in c2.vertices]
    edges += [(nm(u, a), nm(u, b), f"2:{w}") for u in c1.vertices for a, b, w in c2.edges]
    meta = {"kind": "product", "factors": [dict(c1.meta), dict(c2.meta)]}
    return from_edge_list(verts, edges, nm(c1.basepoint, c2.basepoint), meta)


def gen_staircase(k: int, width: int = 1) -> CubeComplex:
    """Grid points ``0 <= x, y <= k`` with ``|x - y| <= width``.

    A diagonal band of squares; its diagonal walls ``wV{j}`` form long
    chains of pairwise well-separated hyperplanes.
    """
    _positive(k=k, width=width)
    wide = k >= 10
    pts = [(x, y) for x in range(k + 1) for y in range(k + 1) if abs(x - y) <= width]
    ps = set(pts)
    name = lambda x, y: grid_name(x, y, wide)
    edges = [(name(x, y), name(x + 1, y), f"wV{x}") for x, y in pts if (x + 1, y) in ps]
    edges += [(name(x, y), name(x, y + 1), f"wH{y}") for x, y in pts if (x, y + 1) in ps]
    return from_edge_list([name(*p) for p in pts], edges, name(0, 0), {"kind": "staircase", "k": k, "width": width})


# ---------------------------------------------------------------------------
# tree of flats


def milestone(k: int) -> int:
    """Length of the ray prefix c a c a^2 ... c a^k."""
    return k + k * (k + 1) // 2


@dataclass(frozen=True)
class Flat:
    index: int
    a_max: int
    b_margin: int

    def name(self, a: int, b: int) -> str:
        return f"F{self.index}:{a},{b}"

    @property
    def origin(self) -> str:
        return self.name(0, 0)

    @property
    def exit(self) -> str:
        """Where the ray leaves this flat: ``(i, 0)``."""
        return self.name(self.index, 0)

    def vertex_names(self) -> list[str]:
        return [self.name(a, b) for a in range(self.a_max + 1) for b in range(-self.b_margin, self.b_margin + 1)]


@dataclass(frozen=True, eq=False)
class TreeOfFlats:
    """Spine-only model of the Cayley square complex of Z * Z^2.

    Only the flats visited by the ray c a c a^2 ... c a^n are built.  Flat i
    spans ``0 <= a <= i + a_margin`` and ``|b| <= b_margin``; the spine edge
    ``c{i}`` joins the exit ``(i-1, 0)`` of flat i-1 to the origin of flat i.
    """

    complex: CubeComplex
    n: int
    a_margin: int
    b_margin: int
    flats: tuple[Flat, ...]
    c_walls: tuple[str, ...]
    ray: DiscretePath

    @property
    def milestones(self) -> list[int]:
        return [milestone(k) for k in range(self.n + 1)]

    def h(self, t: int) -> str:
        return self.ray.vertices[t]

    def flat(self, i: int) -> Flat:
        if not 0 <= i <= self.n:
            raise IndexError(f"flat index {i} outside 0..{self.n}")
        return self.flats[i]

    def flat_subset(self, i: int) -> ConvexSubset:
        """Flat i as a convex set (flats are intersections of c-wall half-spaces)."""
        return ConvexSubset(frozenset(self.flat(i).vertex_names()), self.complex)

    def coords(self, v: str) -> tuple[int, int, int]:
        """``(flat, a, b)`` of a model vertex."""
        self.complex.vid(v)
        head, rest = v[1:].split(":")
        a, b = rest.split(",")
        return int(head), int(a), int(b)


def gen_tree_of_flats(n: int, a_margin: int = 2, b_margin: int = 2) -> TreeOfFlats:
    if n < 1:
        raise ValueError("tree of flats needs n >= 1")
    if a_margin < 0 or b_margin < 0:
        raise ValueError("margins must be nonnegative")
    flats = tuple(Flat(i, i + a_margin, b_margin) for i in range(n + 1))
    verts: list[str] = []
    edges = []
    for F in flats:
        i = F.index
        verts += F.vertex_names()
        bs = range(-b_margin, b_margin + 1)
        edges += [(F.name(a, b), F.name(a + 1, b), f"a{i}.{a}") for a in range(F.a_max) for b in bs]
        edges += [(F.name(a, b), F.name(a, b + 1), f"b{i}.{b}") for a in range(F.a_max + 1) for b in bs[:-1]]
    c_walls = tuple(f"c{i}" for i in range(1, n + 1))
    edges += [(flats[i - 1].exit, flats[i].origin, f"c{i}") for i in range(1, n + 1)]
    meta = {
        "kind": "tree-of-flats",
        "n": n,
        "a_margin": a_margin,
        "b_margin": b_margin,
        "truncation": "spine-only: flats visited by the ray and the spine c-edges",
        "chain_walls": list(c_walls),
    }
    cx = from_edge_list(verts, edges, flats[0].origin, meta)
    ray = [flats[0].origin]
    for i in range(1, n + 1):
        ray += [flats[i].name(a, 0) for a in range(0, i + 1)]
    path = make_path(cx, ray)
    if path.Q != 0 or len(ray) - 1 != milestone(n):
        raise AssertionError("tree-of-flats ray is not a geodesic")
    meta_ray = dict(meta, ray=ray)
    cx = CubeComplex(cx.vertices, cx.edges, cx.basepoint, meta_ray)
    return TreeOfFlats(cx, n, a_margin, b_margin, flats, c_walls, make_path(cx, ray))


def contact_distance(model: TreeOfFlats, x: str, y: str) -> int:
    """Number of c-walls separating x and y."""
    cx = model.complex
    S = cx.sides
    cols = [cx.wid(w) for w in model.c_walls]
    return int((S[cx.vid(x), cols] != S[cx.vid(y), cols]).sum())


def flat_projection(model: TreeOfFlats, x: str, i: int) -> tuple[int, int]:
    """Gate of x into flat i, in the flat's ``(a, b)`` coordinates."""
    cx = model.complex
    G = gate_map(cx, model.flat_subset(i))
    _, a, b = model.coords(cx.vertices[G[cx.vid(x)]])
    return a, b


def flat_projection_diam(model: TreeOfFlats, vertices: Iterable[str] | DiscretePath, i: int) -> int:
    """Spread of the a-coordinates of the gates of ``vertices`` into flat i."""
    cx = model.complex
    if isinstance(vertices, DiscretePath):
        vertices = vertices.vertices
    idx = [cx.vid(v) for v in vertices]
    if not idx:
        raise ValueError("empty vertex set")
    G = gate_map(cx, model.flat_subset(i))
    a = [model.coords(cx.vertices[g])[1] for g in G[idx]]
    return max(a) - min(a)


@dataclass
class CounterexampleRow:
    k: int
    t_k: int
    diam: int
    contact: int
    ratio: float


@dataclass
class CounterexampleReport:
    n: int
    kappa: str
    rows: list[CounterexampleRow]
    ratio_increasing: bool
    unbounded_trend: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "rows": [r.__dict__ for r in self.rows],
            "ratio_increasing": self.ratio_increasing,
            "unbounded_trend": self.unbounded_trend,
        }


def counterexample_report(
    n: int, kappa: SublinearFunction, model: TreeOfFlats | None = None, horizon: float = 1e6
) -> CounterexampleReport:
    """Flat diameters along the ray against contact distance.

    Row k holds ``(diam of the ray's gates in flat k, contact distance from
    o to flat k, diam / kappa(contact))``.  Since both counts equal k, any
    sublinear kappa makes the ratio unbounded; ``unbounded_trend`` records
    that the last ratio at least doubles the one at k = 1 (or keeps rising).
    """
    if n < 2:
        raise ValueError("counterexample report needs n >= 2")
    rep = validate_kappa(kappa, horizon=horizon)
    if not rep.valid:
        from .kappa import KappaError

        raise KappaError(f"gauge {kappa.label} rejected: {rep.reason}", rep.witness)
    model = model or gen_tree_of_flats(n)
    o = model.complex.basepoint
    rows = []
    for k in range(1, n + 1):
        diam = flat_projection_diam(model, model.ray, k)
        contact = contact_distance(model, o, model.flat(k).origin)
        rows.append(CounterexampleRow(k, milestone(k), diam, contact, diam / float(kappa(contact))))
    ratios = [r.ratio for r in rows]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    unbounded = increasing or ratios[-1] >= 2 * ratios[0]
    return CounterexampleReport(n, kappa.label, rows, increasing, unbounded)


# ---------------------------------------------------------------------------
# random pocsets and the standard gallery


def random_pocset(seed: int, max_points: int = 7, max_walls: int = 7) -> HalfSpaceSystem:
    """Half-spaces cut from a random wallspace on a small ground set.

    Each wall is a random proper nonempty subset S of the ground set (its
    plus half-space) and nesting is set inclusion.  Realizing it gives a
    finite median graph.
    """
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, max_points + 1))
    target = int(rng.integers(2, max_walls + 1))
    full = (1 << m) - 1
    cuts: list[int] = []
    for _ in range(50 * target):
        if len(cuts) == target:
            break
        s = int(rng.integers(1, full))
        if s not in cuts and full ^ s not in cuts:
            cuts.append(s)
    walls = tuple(f"h{k}" for k in range(len(cuts)))
    sets = {}
    for w, s in zip(walls, cuts):
        sets[(w, "+")] = s
        sets[(w, "-")] = full ^ s
    nesting = frozenset(
        (a, b) for a, b in itertools.permutations(sets, 2) if a[0] != b[0] and sets[a] & ~sets[b] == 0
    )
    return HalfSpaceSystem(walls, nesting)


def random_pocset_complexes(count: int = 50, seed0: int = 0) -> list[CubeComplex]:
    return [realize_pocset(random_pocset(seed0 + k)) for k in range(count)]


def facing_triple_pocset() -> HalfSpaceSystem:
    """Three walls forming a facing triple (realizes as a tripod)."""
    return HalfSpaceSystem(("p", "q", "r"), frozenset({(("p", "+"), ("q", "-")), (("p", "+"), ("r", "-")), (("q", "+"), ("r", "-"))}))


def standard_gallery() -> dict[str, CubeComplex]:
    """Named complexes used by the acceptance suite (all at most 500 vertices)."""
    g: dict[str, CubeComplex] = {}
    for m, n in ((2, 2), (3, 3), (4, 4), (5, 3), (6, 6)):
        g[f"grid{m}x{n}"] = gen_grid(m, n)
    for k in (1, 2, 4):
        g[f"tripod{k}"] = gen_tripod(k)
    g["tree_binary"] = gen_tree([(f"n{i}", f"n{2 * i + 1}") for i in range(7)] + [(f"n{i}", f"n{2 * i + 2}") for i in range(7)])
    g["path6"] = gen_path(6)
    g["cube3"] = gen_product(gen_product(gen_path(2), gen_path(2)), gen_path(2))
    g["tripod_x_path"] = gen_product(gen_tripod(2), gen_path(3))
    g["tripod_x_tripod"] = gen_product(gen_tripod(1), gen_tripod(1))
    g["cube4"] = gen_product(gen_product(gen_path(2), gen_path(2)), gen_product(gen_path(2), gen_path(2)))
    for k, w in ((6, 1), (8, 2), (12, 1)):
        g[f"staircase{k}w{w}"] = gen_staircase(k, w)
    for n in (2, 3, 4):
        g[f"zz2_{n}"] = gen_tree_of_flats(n).complex
    g["zz2_6"] = gen_tree_of_flats(6).complex
    g["grid20x20"] = gen_grid(20, 20)
    return g
