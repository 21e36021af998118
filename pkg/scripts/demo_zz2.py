"""Print the tree-of-flats counterexample table for a few gauges.

    python3 scripts/demo_zz2.py --n 30
"""

import argparse

from cubemorse import gallery, morse
from cubemorse.kappa import ONE, SQRT, LOG2


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20)
    args = ap.parse_args()
    model = gallery.gen_tree_of_flats(args.n)
    cx = model.complex
    print(f"n={args.n}  vertices={cx.n_vertices}  t_n={len(model.ray) - 1}")
    for kappa in (ONE, LOG2, SQRT):
        chain = morse.chain_from_walls(model.ray, list(model.c_walls), kappa)
        c = morse.verify_excursion(cx, chain).minimal_c
        rep = gallery.counterexample_report(args.n, kappa, model)
        last = rep.rows[-1]
        print(f"{kappa.label:>8}: c-chain minimal c = {c:7.3f}   diam/kappa at k={last.k}: {last.ratio:7.3f}"
              f"   unbounded trend: {rep.unbounded_trend}")
    print("\n  k   t_k  diam  contact  k/sqrt(1+k)")
    for r in gallery.counterexample_report(args.n, SQRT, model).rows:
        print(f"{r.k:3d} {r.t_k:5d} {r.diam:5d} {r.contact:8d} {r.ratio:12.4f}")


if __name__ == "__main__":
    main()
