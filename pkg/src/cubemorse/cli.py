"""Command-line entry point: ``cubemorse <command> ...``.

Exit codes: 0 success, 1 a demo check failed, 2 input or validation error,
3 budget exceeded (a partial report is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import complex as cc
from . import gallery, median, morse, separation
from .dot import to_dot
from .kappa import ONE, KappaError, SublinearFunction, parse_kappa, validate_kappa

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


class BudgetExceeded(Exception):
    def __init__(self, report: dict):
        super().__init__("budget exceeded")
        self.report = report


def _default(o: Any):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _clean(o: Any):
    """Replace non-finite floats, which JSON cannot carry, by strings."""
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def render(obj: dict) -> str:
    return json.dumps(_clean(json.loads(json.dumps(obj, default=_default))), indent=1, sort_keys=True) + "\n"


def make_report(
    argv: Sequence[str], cx: cc.CubeComplex | None, results: dict, exactness: Any = "exact", seed: int | None = None
) -> dict:
    rep = {
        "command": list(argv),
        "digest": cx.digest if cx is not None else None,
        "seed": seed,
        "results": results,
        "exactness": exactness,
    }
    if cx is not None:
        rep["tables"] = {"walls": list(cx.walls), "vertices": list(cx.vertices)}
    return rep


def emit(report: dict, out: str | None) -> None:
    text = render(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# loaders


def load_complex(path: str) -> cc.CubeComplex:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return cc.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    except cc.ComplexError as exc:
        payload = {"witness": exc.witness}
        if exc.report is not None:
            payload["validation"] = exc.report.to_json()
        raise InputError(f"{path}: {exc}", payload) from None


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_vertex_list(path: str) -> list[str]:
    """A JSON list of vertex ids, or an object with a ``vertices`` list."""
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("vertices")
    if not isinstance(data, list) or not data:
        raise InputError(f"{path} must hold a nonempty vertex list")
    return [str(v) for v in data]


def resolve_path(cx: cc.CubeComplex, spec: str) -> morse.DiscretePath:
    if spec == "ray":
        ray = cx.meta.get("ray")
        if not ray:
            raise InputError("complex carries no embedded ray")
        return morse.make_path(cx, ray)
    return morse.make_path(cx, load_vertex_list(spec))


def resolve_convex(cx: cc.CubeComplex, spec: str) -> median.ConvexSubset:
    if spec == "diag-hull":
        if cx.meta.get("kind") != "grid":
            raise InputError("diag-hull needs a grid complex")
        m, n = int(cx.meta["m"]), int(cx.meta["n"])
        h = (min(m, n) - 1) // 2
        wide = m > 10 or n > 10
        return median.hull(cx, [gallery.grid_name(0, 0, wide), gallery.grid_name(h, h, wide)])
    if spec == "ray-hull":
        return median.hull(cx, resolve_path(cx, "ray").vertices)
    return median.convex_subset(cx, load_vertex_list(spec))


def get_kappa(spec: str) -> SublinearFunction:
    kappa = parse_kappa(spec)
    rep = validate_kappa(kappa)
    if not rep.valid:
        raise InputError(f"gauge {kappa.label} rejected: {rep.reason}", {"kappa_report": rep.to_json()})
    return kappa


# ---------------------------------------------------------------------------
# build


def _parse_edges(text: str) -> list[list[str]]:
    """``"a-b,b-c"`` or ``"a-b:w0,b-c:w1"``."""
    rows = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        pair, _, wall = item.partition(":")
        u, sep, v = pair.partition("-")
        if not sep:
            raise InputError(f"bad edge {item!r}; expected u-v or u-v:wall")
        rows.append([u, v, wall] if wall else [u, v])
    return rows


def cmd_build(args, argv) -> int:
    kind = args.kind
    model = None
    if kind == "grid":
        cx = gallery.gen_grid(args.m, args.n)
    elif kind == "tree":
        rows = _read_json(args.edges) if Path(args.edges).exists() else _parse_edges(args.edges)
        cx = gallery.gen_tree(rows, args.basepoint)
    elif kind == "tripod":
        cx = gallery.gen_tripod(args.k)
    elif kind == "product":
        cx = gallery.gen_product(load_complex(args.left), load_complex(args.right))
    elif kind == "staircase":
        cx = gallery.gen_staircase(args.k, args.width)
    elif kind == "tree-of-flats":
        model = gallery.gen_tree_of_flats(args.n, args.a_margin, args.b_margin)
        cx = model.complex
    elif kind == "pocset":
        system = cc.HalfSpaceSystem.from_json(_read_json(args.file))
        cx = cc.realize_pocset(system, args.basepoint)
    elif kind == "from-file":
        cx = load_complex(args.file)
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown generator {kind}")
    if args.output:
        cc.save(cx, args.output)
    results = {
        "vertices": cx.n_vertices,
        "walls": len(cx.walls),
        "edges": len(cx.edges),
        "dimension": cc.dimension(cx),
        "basepoint": cx.basepoint,
        "output": args.output,
    }
    if model is not None:
        results["ray_length"] = len(model.ray) - 1
    print(f"digest {cx.digest}", file=sys.stderr)
    emit(make_report(argv, cx, results), args.report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# query


def cmd_query(args, argv) -> int:
    cx = load_complex(args.complex)
    op = args.op
    names = args.names
    exactness: Any = "exact"

    def need(k: int, what: str):
        if len(names) != k:
            raise InputError(f"query {op} needs {k} {what}")

    if op == "distance":
        need(2, "vertices")
        res = {"distance": cc.distance(cx, *names), "separating_walls": sorted(cc.separating_walls(cx, *names))}
    elif op == "median":
        need(3, "vertices")
        res = {"median": median.median(cx, *names)}
    elif op == "interval":
        need(2, "vertices")
        res = {"interval": sorted(median.interval(cx, *names))}
    elif op == "hull":
        if not names:
            raise InputError("query hull needs at least one vertex")
        H = median.hull(cx, names, check=args.check)
        res = {"hull": sorted(H.members), "size": len(H)}
        if args.check:
            res["join_iterates"] = [len(s) for s in median.join_iterates(cx, names)]
    elif op == "gate":
        need(1, "vertex")
        if args.convex_file:
            Y = median.convex_subset(cx, load_vertex_list(args.convex_file))
        elif args.convex:
            Y = median.convex_subset(cx, args.convex.split(","))
        else:
            raise InputError("query gate needs --convex-file or --convex")
        g = median.gate(cx, names[0], Y)
        res = {"gate": g, "distance": cc.distance(cx, names[0], g)}
    elif op == "wellsep":
        if args.set_a and args.set_b:
            Y1 = median.convex_subset(cx, load_vertex_list(args.set_a))
            Y2 = median.convex_subset(cx, load_vertex_list(args.set_b))
            rep = separation.genevois_pair_report(cx, Y1, Y2)
            res = rep.to_json()
            exactness = rep.degree.exactness
        else:
            need(2, "walls")
            deg = separation.hyperplane_degree(cx, *names)
            rep = separation.genevois_pair_report(
                cx, separation.carrier(cx, names[0]), separation.carrier(cx, names[1])
            )
            res = {"degree": deg.value, "crossing_walls": sorted(deg.crossing), "carriers": rep.to_json()}
            exactness = deg.exactness
    elif op == "crossing":
        need(2, "walls")
        res = {"crosses": separation.crosses(cx, *names)}
    else:  # pragma: no cover
        raise InputError(f"unknown query {op}")
    emit(make_report(argv, cx, res, exactness), args.report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# morse analyses


def _chain_results(cx, chain: morse.ExcursionChain, check: morse.ExcursionCheck) -> dict:
    d = chain.to_json()
    d.update(valid=check.valid, minimal_c=check.minimal_c, gaps=check.gaps, degrees=check.degrees,
             degrees_exact=check.degrees_exact, reason=check.reason)
    return d


def cmd_excursion(args, argv) -> int:
    cx = load_complex(args.complex)
    kappa = get_kappa(args.kappa)
    path = resolve_path(cx, args.path)
    results: dict = {"path_length": len(path) - 1, "Q": path.Q, "kappa": kappa.label}
    exactness: dict = {}
    fixed = None
    if args.chain == "auto" and cx.meta.get("chain_walls"):
        crossed = {e.wall for e in morse.first_crossings(path)}
        fixed = [w for w in cx.meta["chain_walls"] if w in crossed]
    elif args.chain not in ("auto", "search"):
        fixed = [str(w) for w in _read_json(args.chain)["walls"]]
    if fixed is not None:
        chain = morse.chain_from_walls(path, fixed, kappa)
        check = morse.verify_excursion(cx, chain)
        chain = morse.ExcursionChain(chain.entries, check.minimal_c, kappa, path, "exact")
        results["chain"] = _chain_results(cx, chain, check)
        trend = morse.minimal_c_trend(path, kappa, fixed, args.windows)
        exactness["chain"] = "exact" if check.degrees_exact else "lower_bound"
    else:
        chain = morse.find_excursion_chain(path, kappa)
        if not chain.entries:
            results["chain"] = chain.to_json()
            emit(make_report(argv, cx, results, {"chain": "upper_bound"}), args.report)
            return EXIT_OK
        check = morse.verify_excursion(cx, chain)
        results["chain"] = _chain_results(cx, chain, check)
        trend = morse.minimal_c_trend(path, kappa, None, args.windows)
        exactness["chain"] = "upper_bound"
    results["trend"] = [{"window": w, "minimal_c": c} for w, c in trend]
    grows = morse.grows(trend)
    results["uniform_constant"] = "no uniform constant" if grows else "bounded over window"
    if args.out_chain:
        Path(args.out_chain).write_text(render(chain.to_json()))
    emit(make_report(argv, cx, results, exactness), args.report)
    return EXIT_OK


def cmd_contraction(args, argv) -> int:
    cx = load_complex(args.complex)
    kappa = get_kappa(args.kappa)
    Y = resolve_convex(cx, args.convex)
    spec = morse.SampleSpec(args.mode, args.n_points, args.seed, args.windows, args.max_pairs)
    prof = morse.contraction_profile(cx, Y, kappa, spec)
    results = prof.to_json()
    results["convex_size"] = len(Y)
    rep = make_report(argv, cx, results, prof.exactness, prof.seed)
    if prof.exactness == "partial":
        raise BudgetExceeded(rep)
    emit(rep, args.report)
    return EXIT_OK


def demo_zz2(n: int, kappa: SublinearFunction) -> tuple[dict, bool]:
    """Counterexample report plus chain verification on the tree of flats."""
    model = gallery.gen_tree_of_flats(n)
    cx = model.complex
    o = cx.basepoint
    t_n = len(model.ray) - 1
    end = model.h(t_n)
    contact = gallery.contact_distance(model, o, end)
    diam = gallery.flat_projection_diam(model, model.ray, n)
    chain = morse.chain_from_walls(model.ray, list(model.c_walls), kappa)
    check = morse.verify_excursion(cx, chain)
    one = morse.verify_excursion(cx, morse.chain_from_walls(model.ray, list(model.c_walls), ONE))
    equalities = {
        "t_n_formula": t_n == gallery.milestone(n),
        "ray_is_geodesic": model.ray.Q == 0,
        "contact_distance_is_n": contact == n,
        "flat_projection_diam_is_n": diam == n,
    }
    results = {
        "n": n,
        "kappa": kappa.label,
        "vertices": cx.n_vertices,
        "t_n": t_n,
        "t_n_expected": gallery.milestone(n),
        "contact_distance": contact,
        "flat_projection_diam": diam,
        "equalities": equalities,
        "chain": _chain_results(cx, chain, check),
        "chain_c_at_most_3": check.minimal_c <= 3,
        "constant_one_minimal_c": one.minimal_c,
        "constant_one_at_least_half_n": one.minimal_c >= n / 2,
        "counterexample": gallery.counterexample_report(n, kappa, model).to_json(),
        "truncation": cx.meta.get("truncation"),
    }
    return results, all(equalities.values())


def cmd_demo(args, argv) -> int:
    kappa = get_kappa(args.kappa)
    if args.n < 2:
        raise InputError("demo-zz2 needs --n >= 2")
    results, ok = demo_zz2(args.n, kappa)
    emit(make_report(argv, None, results), args.report)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_export_dot(args, argv) -> int:
    cx = load_complex(args.complex)
    path: list[str] = []
    verts: list[str] = []
    walls: list[str] = []
    if args.highlight:
        path = list(resolve_path(cx, args.highlight).vertices) if args.highlight == "ray" else load_vertex_list(args.highlight)
    if args.highlight_hull:
        verts = sorted(median.hull(cx, load_vertex_list(args.highlight_hull)).members)
    if args.highlight_chain:
        walls = [str(w) for w in _read_json(args.highlight_chain)["walls"]]
    text = to_dot(cx, verts, path, walls)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubemorse", description="Finite CAT(0) cube complex analysis.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="generate or load a complex and write it as JSON")
    bsub = b.add_subparsers(dest="kind", required=True)

    def gen(name: str, help: str):
        g = bsub.add_parser(name, help=help)
        g.add_argument("-o", "--output", help="complex JSON to write")
        g.add_argument("--report", help="write the report here instead of stdout")
        return g

    g = gen("grid", "m x n grid of vertices")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g = gen("tree", "tree from an edge list")
    g.add_argument("--edges", required=True, help="JSON file of [u, v(, wall)] rows, or 'a-b,b-c'")
    g.add_argument("--basepoint")
    g = gen("tripod", "three legs of length k")
    g.add_argument("--k", type=int, required=True)
    g = gen("product", "product of two complexes")
    g.add_argument("left")
    g.add_argument("right")
    g = gen("staircase", "diagonal band of a grid")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--width", type=int, default=1)
    g = gen("tree-of-flats", "spine model of the Z*Z^2 square complex")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--a-margin", type=int, default=2)
    g.add_argument("--b-margin", type=int, default=2)
    g = gen("pocset", "dual complex of a half-space system JSON")
    g.add_argument("file")
    g.add_argument("--basepoint", help="sign string of the base orientation")
    g = gen("from-file", "load and validate a complex JSON")
    g.add_argument("file")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="exact median/gate/separation queries")
    q.add_argument("op", choices=["distance", "median", "interval", "hull", "gate", "wellsep", "crossing"])
    q.add_argument("complex")
    q.add_argument("names", nargs="*", help="vertex or wall identifiers")
    q.add_argument("--convex-file")
    q.add_argument("--convex", help="comma-separated vertex ids")
    q.add_argument("--set-a")
    q.add_argument("--set-b")
    q.add_argument("--check", action="store_true", help="hull: also iterate joins and compare")
    q.add_argument("--report")
    q.set_defaults(func=cmd_query)

    e = sub.add_parser("excursion", help="excursion chain along a path")
    e.add_argument("complex")
    e.add_argument("--path", default="ray", help="'ray' or a JSON vertex list")
    e.add_argument("--kappa", default="one")
    e.add_argument("--chain", default="auto", help="auto | search | chain JSON")
    e.add_argument("--windows", type=int, default=4)
    e.add_argument("--out-chain")
    e.add_argument("--report")
    e.set_defaults(func=cmd_excursion)

    c = sub.add_parser("contraction", help="contraction profile of a convex set")
    c.add_argument("complex")
    c.add_argument("--convex", required=True, help="diag-hull | ray-hull | vertex-list JSON")
    c.add_argument("--kappa", default="one")
    c.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    c.add_argument("--n-points", type=int, default=500)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--windows", type=int, default=4)
    c.add_argument("--max-pairs", type=int, help="budget on examined pairs")
    c.add_argument("--report")
    c.set_defaults(func=cmd_contraction)

    d = sub.add_parser("demo-zz2", help="tree-of-flats counterexample report")
    d.add_argument("--n", type=int, default=10)
    d.add_argument("--kappa", default="pow:0.5")
    d.add_argument("--report")
    d.set_defaults(func=cmd_demo)

    x = sub.add_parser("export-dot", help="Graphviz export")
    x.add_argument("complex")
    x.add_argument("-o", "--output")
    x.add_argument("--highlight", help="'ray' or a JSON vertex path")
    x.add_argument("--highlight-hull", help="JSON vertex list whose hull is filled")
    x.add_argument("--highlight-chain", help="chain JSON with a 'walls' list")
    x.set_defaults(func=cmd_export_dot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, argv)
    except BudgetExceeded as exc:
        emit(exc.report, getattr(args, "report", None))
        print("budget exceeded; partial report written", file=sys.stderr)
        return EXIT_BUDGET
    except InputError as exc:
        err = {"command": argv, "error": str(exc), **exc.payload}
        sys.stdout.write(render(err))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (
        cc.ComplexError, KappaError, KeyError, ValueError, IndexError,
        median.NotConvexError, morse.PreconditionError,
    ) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        err = {"command": argv, "error": f"{type(exc).__name__}: {msg}", "witness": getattr(exc, "witness", None)}
        sys.stdout.write(render(err))
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
