"""Contraction profiles: grid diagonal hulls (flat, not contracting) against
tree-of-flats ray hulls (contracting for the square-root gauge).

    python3 scripts/contraction_trend.py
"""

import argparse
import time

from cubemorse import gallery, median, morse
from cubemorse.kappa import ONE, SQRT


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, nargs="+", default=[5, 10, 15, 20])
    ap.add_argument("--flats", type=int, nargs="+", default=[10, 15, 20, 25])
    args = ap.parse_args()
    print("grid diagonal hull, kappa = 1")
    for n in args.grid:
        g = gallery.gen_grid(n, n)
        h = (n - 1) // 2
        wide = n > 10
        Y = median.hull(g, [gallery.grid_name(0, 0, wide), gallery.grid_name(h, h, wide)])
        t = time.perf_counter()
        p = morse.contraction_profile(g, Y, ONE)
        print(f"  n={n:3d}  max ratio {p.max_ratio:6.2f}  witness {p.witness}  ({time.perf_counter() - t:.2f}s)")
    print("tree-of-flats ray hull, kappa = sqrt(1+t)")
    for n in args.flats:
        m = gallery.gen_tree_of_flats(n)
        Y = median.hull(m.complex, m.ray.vertices)
        t = time.perf_counter()
        p = morse.contraction_profile(m.complex, Y, SQRT)
        print(f"  n={n:3d}  |V|={m.complex.n_vertices:5d}  max ratio {p.max_ratio:6.3f}  ({time.perf_counter() - t:.2f}s)")


if __name__ == "__main__":
    main()
