import math

import numpy as np
import pytest

from cubemorse import gallery as G
from cubemorse import morse as MO
from cubemorse.complex import dimension, validate
from cubemorse.kappa import ONE, SQRT, KappaError, linear_table
from cubemorse.separation import crosses, hyperplane_degree, is_chain


def test_small_generators():
    g = G.gen_grid(3, 3)
    assert (g.n_vertices, len(g.walls), len(g.edges)) == (9, 4, 12)
    t = G.gen_tripod(1)
    assert (t.n_vertices, len(t.walls)) == (4, 3)
    sq = G.gen_product(G.gen_path(2), G.gen_path(2))
    assert sq.n_vertices == 4 and dimension(sq) == 2


def test_wide_grid_names():
    g = G.gen_grid(11, 2)
    assert "v10_1" in g.index and g.basepoint == "v0_0"


def test_product_walls_cross_across_factors():
    p = G.gen_product(G.gen_tripod(1), G.gen_path(3))
    assert set(p.walls) == {"1:t0.1", "1:t1.1", "1:t2.1", "2:e0", "2:e1"}
    assert crosses(p, "1:t0.1", "2:e1") and not crosses(p, "1:t0.1", "1:t1.1")


@pytest.mark.parametrize("bad", [lambda: G.gen_grid(0, 3), lambda: G.gen_tripod(0), lambda: G.gen_path(0),
                                 lambda: G.gen_staircase(0), lambda: G.gen_tree_of_flats(0),
                                 lambda: G.gen_tree([])])
def test_size_zero_rejected(bad):
    with pytest.raises(ValueError):
        bad()


def test_tree_rejects_cycle():
    with pytest.raises(ValueError):
        G.gen_tree([("a", "b"), ("b", "c"), ("c", "a")])


def test_gallery_validates(standard_gallery):
    for name, cx in standard_gallery.items():
        assert validate(cx).ok, name
        assert cx.n_vertices <= 500


def test_staircase_shape():
    s = G.gen_staircase(5)
    assert s.n_vertices == 6 + 2 * 5
    assert dimension(s) == 2


# ---- tree of flats --------------------------------------------------------------


@pytest.mark.parametrize("n, t_n", [(1, 2), (3, 9), (5, 20), (30, 495)])
def test_ray_length(n, t_n):
    m = G.gen_tree_of_flats(n)
    assert len(m.ray) - 1 == t_n == G.milestone(n)
    assert m.ray.Q == 0


def test_ray_is_geodesic_and_milestones():
    m = G.gen_tree_of_flats(8)
    D = m.complex.distances
    idx = m.ray.idx
    assert (D[idx[0], idx] == np.arange(len(idx))).all()
    for k in range(9):
        assert m.h(G.milestone(k)) == m.flat(k).exit
        assert m.complex.norm(m.h(G.milestone(k))) == k + k * (k + 1) // 2


def test_flat_sizes_and_meta():
    m = G.gen_tree_of_flats(4, a_margin=1, b_margin=3)
    assert len(m.flat(2).vertex_names()) == (2 + 1 + 1) * 7
    assert "spine-only" in m.complex.meta["truncation"]
    assert m.complex.meta["chain_walls"] == ["c1", "c2", "c3", "c4"]


def test_c_walls_are_isolated_and_chained():
    m = G.gen_tree_of_flats(6)
    cx = m.complex
    X = cx.crossing_matrix
    for c in m.c_walls:
        assert not X[cx.wid(c)].any()
        assert len(cx.dual_edges[cx.wid(c)]) == 1
    assert is_chain(cx, list(m.c_walls))
    for a in m.c_walls:
        for b in m.c_walls:
            if a != b:
                d = hyperplane_degree(cx, a, b)
                assert d.value == 0 and not d.crossing


def test_contact_distance_examples():
    m = G.gen_tree_of_flats(6)
    o = m.complex.basepoint
    for k in range(7):
        assert G.contact_distance(m, o, m.h(G.milestone(k))) == k
    assert G.contact_distance(m, m.flat(2).name(0, 1), m.flat(2).name(3, -2)) == 0
    assert G.contact_distance(m, m.flat(1).origin, m.flat(3).origin) == 2
    with pytest.raises(KeyError):
        G.contact_distance(m, o, "nope")


def test_flat_projection_examples():
    m = G.gen_tree_of_flats(6)
    o = m.complex.basepoint
    assert G.flat_projection(m, o, 0) == (0, 0)
    assert G.flat_projection(m, m.h(len(m.ray) - 1), 0) == (0, 0)
    assert G.flat_projection(m, m.flat(4).name(2, 2), 4) == (2, 2)
    assert G.flat_projection(m, m.flat(4).name(2, 2), 5) == (0, 0)
    for k in range(1, 7):
        assert G.flat_projection_diam(m, m.ray, k) == k
    with pytest.raises(IndexError):
        G.flat_projection(m, o, 7)


def test_counterexample_report():
    rep = G.counterexample_report(10, SQRT)
    ratios = [r.ratio for r in rep.rows]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] >= 3 and rep.unbounded_trend
    assert [(r.diam, r.contact) for r in rep.rows] == [(k, k) for k in range(1, 11)]
    one = G.counterexample_report(10, ONE)
    assert [r.ratio for r in one.rows] == list(range(1, 11))
    with pytest.raises(KappaError):
        G.counterexample_report(10, linear_table())
    with pytest.raises(ValueError):
        G.counterexample_report(1, SQRT)


def test_c_chain_excursion_contrast():
    for n in (6, 12, 24):
        m = G.gen_tree_of_flats(n)
        sq = MO.verify_excursion(m.complex, MO.chain_from_walls(m.ray, list(m.c_walls), SQRT))
        one = MO.verify_excursion(m.complex, MO.chain_from_walls(m.ray, list(m.c_walls), ONE))
        assert sq.valid and sq.minimal_c <= 3
        assert one.minimal_c == n


def test_random_pocsets_are_seeded():
    assert G.random_pocset(7) == G.random_pocset(7)
    sizes = {len(G.random_pocset(s).walls) for s in range(30)}
    assert len(sizes) > 1
