"""Acceptance criteria 1-10, one test each.

Every test records a single ``criterion N: PASS|FAIL ...`` line, printed in
the terminal summary (and immediately with ``-s``).
"""

import itertools
import math
import time

import numpy as np
import pytest

from cubemorse import gallery as G
from cubemorse import median as M
from cubemorse import morse as MO
from cubemorse import separation as S
from cubemorse.complex import CubeComplex, dimension
from cubemorse.kappa import LOG2, ONE, SQRT, linear_table, sublinear_constants, validate_kappa

from conftest import ACCEPTANCE_LINES

POCSET_SEEDS = range(50)


def record(n: int, ok: bool, detail: str, elapsed: float) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f}s]"
    ACCEPTANCE_LINES.append(line)
    print(line)


def fresh(cx: CubeComplex) -> CubeComplex:
    """Same data, empty caches (so timing includes BFS and side computation)."""
    return CubeComplex(cx.vertices, cx.edges, cx.basepoint, cx.meta)


@pytest.fixture(scope="module")
def gallery_complexes():
    return G.standard_gallery()


@pytest.fixture(scope="module")
def pocsets():
    return G.random_pocset_complexes(len(POCSET_SEEDS))


def test_c01_metric_duality(gallery_complexes, pocsets):
    t = time.perf_counter()
    cxs = [fresh(c) for c in gallery_complexes.values() if c.n_vertices <= 500] + [fresh(c) for c in pocsets]
    bad = []
    pairs = 0
    for cx in cxs:
        D = cx.distances
        packed = np.packbits(cx.sides, axis=1)
        sep = np.bitwise_count(packed[:, None, :] ^ packed[None, :, :]).sum(-1)
        pairs += D.size
        if not (sep == D).all():
            bad.append(cx.meta.get("kind"))
    el = time.perf_counter() - t
    ok = not bad and el < 10
    record(1, ok, f"{len(cxs)} complexes, {pairs} ordered pairs, mismatches {len(bad)}", el)
    assert ok, bad


def test_c02_median_oracle(gallery_complexes, pocsets):
    t = time.perf_counter()
    cxs = [c for c in gallery_complexes.values() if c.n_vertices <= 150] + list(pocsets)
    triples = 0
    bad = None
    for cx in cxs:
        n = cx.n_vertices
        D = cx.distances.astype(np.int32)
        tr = np.array(list(itertools.combinations_with_replacement(range(n), 3)), dtype=np.int64)
        maj = M.medians(cx, tr)
        for lo in range(0, len(tr), 4096):
            x, y, z = tr[lo:lo + 4096].T
            inter = (D[x] + D[y] == D[x, y][:, None]) & (D[y] + D[z] == D[y, z][:, None]) & (
                D[x] + D[z] == D[x, z][:, None]
            )
            cnt = inter.sum(1)
            if (cnt != 1).any() or (inter.argmax(1) != maj[lo:lo + 4096]).any():
                bad = (cx.meta.get("kind"), lo)
                break
        triples += len(tr)
    el = time.perf_counter() - t
    ok = bad is None and el < 60
    record(2, ok, f"{len(cxs)} complexes, {triples} triples, first mismatch {bad}", el)
    assert ok


def test_c03_hull_equivalence_and_termination(gallery_complexes):
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    checked = 0
    bad = []
    for name, cx in gallery_complexes.items():
        v = dimension(cx)
        for _ in range(200):
            k = int(rng.integers(1, 6))
            A = [cx.vertices[i] for i in rng.choice(cx.n_vertices, size=min(k, cx.n_vertices), replace=False)]
            its = M.join_iterates(cx, A, max_steps=v + 1)
            # a short list means the fixed point came early; later iterates repeat it
            Jv = its[v] if len(its) > v else its[-1]
            Jv1 = its[v + 1] if len(its) > v + 1 else its[-1]
            if Jv1 != Jv or Jv1 != M.halfspace_hull(cx, A).members:
                bad.append((name, A))
            checked += 1
    el = time.perf_counter() - t
    ok = not bad
    record(3, ok, f"{checked} subsets over {len(gallery_complexes)} complexes, failures {len(bad)}", el)
    assert ok, bad[:3]


def test_c04_gate_characterization(gallery_complexes):
    t = time.perf_counter()
    checked = 0
    bad = []
    for name, cx in gallery_complexes.items():
        if cx.n_vertices > 300:
            continue
        D = cx.distances
        Sd = cx.sides
        for w in cx.walls:
            Y = M.convex_subset(cx, S.carrier(cx, w).members)
            idx = Y.indices
            G_ = M.gate_map(cx, Y)
            # nearest point by brute force, unique
            dY = D[:, idx]
            near = dY == dY.min(1, keepdims=True)
            if not ((near.sum(1) == 1).all() and (idx[near.argmax(1)] == G_).all()):
                bad.append((name, w, "nearest"))
            plus_all, minus_all = Sd[idx].all(0), ~Sd[idx].any(0)
            sep_from_Y = (plus_all & ~Sd) | (minus_all & Sd)
            outside = np.setdiff1d(np.arange(cx.n_vertices), idx)
            if not ((Sd[outside] != Sd[G_[outside]]) == sep_from_Y[outside]).all():
                bad.append((name, w, "separation"))
            if not (D[np.ix_(G_, G_)] <= D).all():
                bad.append((name, w, "lipschitz"))
            checked += len(outside)
    el = time.perf_counter() - t
    ok = not bad
    record(4, ok, f"{checked} (carrier, exterior vertex) pairs, failures {len(bad)}", el)
    assert ok, bad[:3]


def test_c05_tree_of_flats_counterexample():
    t = time.perf_counter()
    n = 30
    m = G.gen_tree_of_flats(n)
    o = m.complex.basepoint
    milestones = all(G.milestone(k) == k + k * (k + 1) // 2 and m.complex.norm(m.h(G.milestone(k))) == G.milestone(k) for k in range(n + 1))
    t_ok = len(m.ray) - 1 == n + n * (n + 1) // 2 == 495 and m.ray.Q == 0 and milestones
    contact_ok = all(G.contact_distance(m, o, m.h(G.milestone(k))) == k for k in range(n + 1))
    diam_ok = all(G.flat_projection_diam(m, m.ray, k) == k for k in range(1, n + 1))
    sq = MO.verify_excursion(m.complex, MO.chain_from_walls(m.ray, list(m.c_walls), SQRT))
    sq_ok = sq.valid and sq.minimal_c <= 3
    one_cs = []
    for w in range(2, n + 1):
        pre = m.ray.prefix(G.milestone(w) + 1)
        chk = MO.verify_excursion(m.complex, MO.chain_from_walls(pre, [f"c{i}" for i in range(1, w + 1)], ONE))
        one_cs.append((w, chk.minimal_c))
    one_ok = all(c >= w / 2 for w, c in one_cs)
    el = time.perf_counter() - t
    ok = t_ok and contact_ok and diam_ok and sq_ok and one_ok and el < 30
    record(
        5, ok,
        f"t_30={len(m.ray) - 1}, contact/diam exact for k<=30: {contact_ok and diam_ok}, "
        f"sqrt-chain c={sq.minimal_c:g}, kappa=1 c(n=30)={one_cs[-1][1]:g}",
        el,
    )
    assert ok


def _locality_sweep(cx, chain):
    worst, pairs, geos, viol = 0.0, 0, 0, 0
    for i in range(2, len(chain.entries) - 2):
        X = np.flatnonzero(MO.between_mask(cx, chain, i - 2))
        Y = np.flatnonzero(MO.between_mask(cx, chain, i + 1))
        for x in X:
            for y in Y:
                r = MO.crossing_locality_check(cx, chain, cx.vertices[x], cx.vertices[y], index=i, method="enumerate")
                assert r.exactness == "exact"
                pairs += 1
                geos += MO.count_geodesics(cx, cx.vertices[x], cx.vertices[y])
                viol += not r.ok
                worst = max(worst, r.max_distance / r.bound)
    return pairs, geos, viol, worst


def test_c06_key_to_contraction():
    t = time.perf_counter()
    cases = []
    m = G.gen_tree_of_flats(7)
    assert m.complex.n_vertices <= 300
    ch = MO.chain_from_walls(m.ray, list(m.c_walls), SQRT)
    c = MO.verify_excursion(m.complex, ch).minimal_c
    cases.append(("zz2 n=7", m.complex, MO.ExcursionChain(ch.entries, c, SQRT, m.ray)))
    for k, w in ((12, 1), (8, 2), (20, 2)):
        s = G.gen_staircase(k, w)
        assert s.n_vertices <= 300
        p = MO.geodesic_between(s, s.basepoint, s.vertices[-1])
        cases.append((f"staircase k={k} w={w}", s, MO.find_excursion_chain(p, ONE)))
    summary = []
    total_viol = 0
    for name, cx, chain in cases:
        pairs, geos, viol, worst = _locality_sweep(cx, chain)
        total_viol += viol
        summary.append(f"{name}: {pairs} pairs/{geos} geodesics, max d/bound {worst:.2f}")
        assert pairs > 0
    el = time.perf_counter() - t
    ok = total_viol == 0
    record(6, ok, "; ".join(summary) + f"; violations {total_viol}", el)
    assert ok


def test_c07_contraction_contrast():
    t = time.perf_counter()
    zz = {}
    for n in (10, 25):
        m = G.gen_tree_of_flats(n)
        Y = M.hull(m.complex, m.ray.vertices)
        zz[n] = MO.contraction_profile(m.complex, Y, SQRT).max_ratio
    grid = {}
    for n in (5, 15):
        g = G.gen_grid(n, n)
        h = (n - 1) // 2
        wide = n > 10
        Y = M.hull(g, [G.grid_name(0, 0, wide), G.grid_name(h, h, wide)])
        grid[n] = MO.contraction_profile(g, Y, ONE).max_ratio
    stable = max(zz.values()) <= 2 * min(zz.values())
    linear = grid[15] / grid[5] >= 15 / 5
    el = time.perf_counter() - t
    ok = stable and linear and el < 60
    record(7, ok, f"zz2 ray hull {zz[10]:.3f} -> {zz[25]:.3f}; grid diagonal hull {grid[5]:g} -> {grid[15]:g}", el)
    assert ok


def test_c08_genevois_duality(gallery_complexes):
    t = time.perf_counter()
    triples = {}
    for n in (3, 4, 5):
        g = G.gen_grid(n + 1, n + 1)
        triples[n] = S.genevois_pair_report(g, S.carrier(g, "wH0"), S.carrier(g, f"wH{n - 1}")).as_tuple
    grid_ok = all(triples[n] == (n, n, n) for n in triples)
    pairs = 0
    le_one_fail, point_fail = [], []
    for name, cx in gallery_complexes.items():
        if cx.n_vertices > 300 or dimension(cx) != 2:
            continue
        car = {w: S.carrier(cx, w) for w in cx.walls}
        for a, b in itertools.combinations(cx.walls, 2):
            if car[a].members & car[b].members:
                continue
            r = S.genevois_pair_report(cx, car[a], car[b])
            pairs += 1
            if not r.zero_iff_diam_le_one:
                le_one_fail.append((name, a, b, r.as_tuple))
            if not r.zero_iff_point_images:
                point_fail.append((name, a, b, r.as_tuple))
    el = time.perf_counter() - t
    ok = grid_ok and not le_one_fail and not point_fail
    detail = (
        f"grid triples {triples}; {pairs} carrier pairs; 'degree 0 iff diam <= 1' fails on {len(le_one_fail)}"
        f" (e.g. {le_one_fail[:1]}); 'degree 0 iff diam = 0' fails on {len(point_fail)}"
    )
    record(8, ok, detail, el)
    assert grid_ok and not point_fail
    if le_one_fail:
        pytest.xfail(
            "literal '<= 1' biconditional is false: degree-1 pairs whose gate images have diameter 1 "
            f"exist ({le_one_fail[0]}); the 'diameter 0' form holds on every pair"
        )


def test_c09_facing_triple_exclusion(gallery_complexes, pocsets):
    t = time.perf_counter()
    cxs = [c for c in gallery_complexes.values() if c.n_vertices <= 150] + list(pocsets)
    triples_seen, geos, viol = 0, 0, 0
    for cx in cxs:
        ft = S.facing_triples(cx)
        if not ft:
            continue
        triples_seen += len(ft)
        ftw = np.array([[cx.wid(w) for w in tr] for tr in ft])
        ew = cx.edge_wall
        for x, y in itertools.combinations(cx.vertices, 2):
            paths, ex = MO.enumerate_geodesics(cx, x, y)
            assert ex == "exact"
            for p in paths:
                crossed = np.zeros(len(cx.walls), dtype=bool)
                crossed[[ew[(min(a, b), max(a, b))] for a, b in zip(p, p[1:])]] = True
                viol += int(crossed[ftw].all(1).sum())
            geos += len(paths)
    el = time.perf_counter() - t
    ok = viol == 0 and triples_seen > 0
    record(9, ok, f"{triples_seen} facing triples, {geos} geodesics, violations {viol}", el)
    assert ok


def test_c10_sublinear_calculus():
    t = time.perf_counter()
    accepted = {k.label: validate_kappa(k, horizon=1e6).valid for k in (ONE, LOG2, SQRT)}
    rejected = not validate_kappa(linear_table(), horizon=1e6).valid
    d1, d2 = sublinear_constants(SQRT, 2, horizon=1e6)
    finite = 0 < d1 < math.inf and 0 < d2 < math.inf
    el = time.perf_counter() - t
    ok = all(accepted.values()) and rejected and finite
    record(10, ok, f"accepted {accepted}, 1+t rejected {rejected}, (D1, D2) = ({d1:.4f}, {d2:.4f})", el)
    assert ok
