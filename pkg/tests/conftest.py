import itertools

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from cubemorse import gallery
from cubemorse.complex import CubeComplex, HalfSpaceSystem, realize_pocset

settings.register_profile(
    "repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@st.composite
def wallspace_pocsets(draw, max_points=6, max_walls=6):
    """Pocsets cut from random subsets of a small ground set."""
    m = draw(st.integers(3, max_points))
    full = (1 << m) - 1
    cuts = draw(st.lists(st.integers(1, full - 1), min_size=1, max_size=max_walls))
    uniq: list[int] = []
    for s in cuts:
        if s not in uniq and full ^ s not in uniq:
            uniq.append(s)
    walls = tuple(f"h{k}" for k in range(len(uniq)))
    sets = {}
    for w, s in zip(walls, uniq):
        sets[(w, "+")] = s
        sets[(w, "-")] = full ^ s
    nesting = frozenset(
        (a, b) for a, b in itertools.permutations(sets, 2) if a[0] != b[0] and sets[a] & ~sets[b] == 0
    )
    return HalfSpaceSystem(walls, nesting)


@st.composite
def median_complexes(draw):
    return realize_pocset(draw(wallspace_pocsets()))


@st.composite
def connected_graphs(draw, max_n=9):
    """Random connected graphs, one wall label per edge (not cube complexes in general)."""
    n = draw(st.integers(2, max_n))
    parent = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    edges = {(p, i) for i, p in zip(range(1, n), parent)}
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    for a, b in extra:
        if a != b:
            edges.add((min(a, b), max(a, b)))
    verts = tuple(f"x{i}" for i in range(n))
    labelled = tuple((f"x{a}", f"x{b}", f"e{a}_{b}") for a, b in sorted(edges))
    return CubeComplex(verts, labelled, "x0")


@pytest.fixture(scope="session")
def standard_gallery():
    return gallery.standard_gallery()


@pytest.fixture(scope="session")
def zz2_small():
    return gallery.gen_tree_of_flats(5)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
