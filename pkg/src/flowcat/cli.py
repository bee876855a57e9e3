"""Command-line front end.  Documents flow through stdin/stdout as JSON."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import examples
from .category import (
    CategoryError,
    FlowCategory,
    cell_complex,
    geometric_fixed_points,
    long_exact_sequence_defects,
    restratify,
    split_at,
    stabilize_category,
)
from .chains import D2Error, homology, spectral_sequence
from .config import TOLERANCE
from .document import Document, DocumentError, dumps, loads, make_document, validate_document
from .gposet import LevelMap
from .kuranishi import ChartError, interval_chart, pt_degree
from .params import ParamError, iso_from_invariants, shift_space
from .params.eparam import matrix_to_json


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def _load(path: str) -> Document:
    return loads(_read(path))


def _expect(doc: Document, *kinds: str) -> Any:
    if doc.kind not in kinds:
        raise DocumentError(f"expected a {' or '.join(kinds)} document, got {doc.kind}")
    return doc.payload


def _rep_text(rep) -> str:
    return str(rep).replace(" + ", " ⊕ ")


def _matrix_table(m: list[list[int]], rows: Sequence[str], cols: Sequence[str]) -> list[str]:
    w = max([len(c) for c in cols] + [len(r) for r in rows] + [len(str(v)) for row in m for v in row] + [1])
    head = " " * (w + 2) + " ".join(c.rjust(w) for c in cols)
    lines = [head]
    for r, row in zip(rows, m):
        lines.append("  " + r.rjust(w) + " " + " ".join(str(v).rjust(w) for v in row))
    return lines


def _emit(args: argparse.Namespace, data: dict, table: Callable[[], list[str]]) -> None:
    if args.output == "json":
        sys.stdout.write(dumps(data))
    else:
        sys.stdout.write("\n".join(table()) + "\n")


# commands ------------------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    doc = _load(args.path)
    rep = validate_document(doc, args.tolerance, args.seed)
    _emit(args, {"kind": doc.kind, **rep.to_json()}, lambda: [f"{doc.kind}: {rep}"])
    return 0 if rep.ok else 1


def _alpha(f: FlowCategory, text: str) -> dict[str, int]:
    if text == "mu":
        return dict(f.mu)
    if text == "abar":
        return dict(f.poset.abar)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("--filtration must be 'mu', 'abar' or a JSON object") from exc
    if not isinstance(data, dict) or set(data) != set(f.objects):
        raise UsageError("--filtration JSON must assign an integer to every object")
    return {str(k): int(v) for k, v in data.items()}


def cmd_homology(args: argparse.Namespace) -> int:
    f = _expect(_load(args.path), "flow_category")
    if args.fixed:
        f = geometric_fixed_points(f, args.fixed)
    c = cell_complex(f, args.seed)
    h = homology(c, args.ring)
    pages = None
    if args.filtration:
        pages = spectral_sequence(c, _alpha(f, args.filtration), args.ring)
    data = {"ring": args.ring, "fixed": args.fixed or 1, "complex": c.to_json(),
            "homology": {str(k): v.to_json() for k, v in h.items()}}
    if pages is not None:
        data["pages"] = pages.to_json()

    def table() -> list[str]:
        lines = []
        if args.fixed:
            lines.append(f"geometric fixed points under C{args.fixed}")
        lines.append("generators: " + ", ".join(f"{k}: {' '.join(v)}" for k, v in sorted(c.gens.items())))
        for k in sorted(c.d):
            lines.append(f"d_{k}: C_{k} -> C_{k - 1}")
            lines += _matrix_table(c.d[k], c.gens[k - 1], c.gens[k])
        lines.append(f"homology over {args.ring}")
        lines += [f"  H_{k} = {v}" for k, v in sorted(h.items())]
        if pages is not None:
            lines.append("E1 page (s, t): generators")
            lines += [f"  ({s}, {t}): {' '.join(g)}" for (s, t), g in sorted(pages.e1.items())]
            for (s, t), m in sorted(pages.d1.items()):
                if m and m[0]:
                    lines.append(f"d1 at ({s}, {t})")
                    lines += _matrix_table(m, pages.e1[(s - 1, t)], pages.e1[(s, t)])
            lines.append("E2 page")
            lines += [f"  ({s}, {t}): {v}" for (s, t), v in sorted(pages.e2.items())]
        return lines

    _emit(args, data, table)
    return 0


def _write_doc(args: argparse.Namespace, obj: Any, generator: str, summary: Callable[[], list[str]]) -> None:
    doc = make_document(obj, generator, args.seed)
    if args.output == "table":
        sys.stdout.write("\n".join(summary()) + "\n")
    else:
        sys.stdout.write(doc.dumps())


def _category_summary(f: FlowCategory) -> list[str]:
    mu = f.mu
    return [f"{x}: abar={f.poset.abar[x]} mu={mu[x]}" for x in f.objects]


def cmd_fixed_points(args: argparse.Namespace) -> int:
    f = _expect(_load(args.path), "flow_category")
    g = geometric_fixed_points(f, args.fixed)
    _write_doc(args, g, f"fixed-points {args.fixed}", lambda: _category_summary(g))
    return 0


def cmd_restratify(args: argparse.Namespace) -> int:
    f = _expect(_load(args.path), "flow_category")
    try:
        values = tuple(int(v) for v in args.levels.split(",")) if args.levels else ()
    except ValueError as exc:
        raise UsageError("--levels must be comma-separated integers") from exc
    top = args.top if args.top is not None else (values[-1] if values else 0)
    g = restratify(f, LevelMap(values, top), args.shift)
    old, new = f.mu, g.mu
    shifts = sorted({new[x] - old[x] for x in f.objects})

    def summary() -> list[str]:
        return _category_summary(g) + [f"grading shift: {', '.join(map(str, shifts))}"]

    _write_doc(args, g, "restratify", summary)
    return 0


def cmd_stabilize(args: argparse.Namespace) -> int:
    f = _expect(_load(args.path), "flow_category")
    e = _expect(_load(args.param), "eparam")
    g = stabilize_category(f, e)
    _write_doc(args, g, "stabilize", lambda: _category_summary(g))
    return 0


def cmd_shift_space(args: argparse.Namespace) -> int:
    e = _expect(_load(args.path), "eparam", "semifree_param")
    s = shift_space(e, args.tolerance)
    data = {"shift_space": s.rep.to_json(), "text": _rep_text(s.rep), "dim": s.rep.dim,
            "inclusions": {x: matrix_to_json(m) for x, m in sorted(s.inclusions.items())}}
    _emit(args, data, lambda: [_rep_text(s.rep)])
    return 0


def cmd_param_iso(args: argparse.Namespace) -> int:
    e1 = _expect(_load(args.first), "eparam")
    e2 = _expect(_load(args.second), "eparam")
    res = iso_from_invariants(e1, e2, args.tolerance)
    data = {"maps": {x: matrix_to_json(m) for x, m in sorted(res.maps.items())}, "error": res.error}

    def table() -> list[str]:
        lines = [f"isometry family, max defect {res.error:.3e}"]
        for x, m in sorted(res.maps.items()):
            lines.append(f"{x}: {m.shape[0]}x{m.shape[1]}")
            lines += ["  " + " ".join(f"{v: .6f}" for v in row) for row in m]
        return lines

    _emit(args, data, table)
    return 0 if res.error <= args.tolerance * 1e3 else 1


def cmd_pt_degree(args: argparse.Namespace) -> int:
    c = _expect(_load(args.path), "chart")
    deg = pt_degree(c, args.seed)
    _emit(args, {"degree": deg, "vdim": c.vdim}, lambda: [str(deg)])
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    f = _expect(_load(args.path), "flow_category")
    sub = [s for s in args.sub.split(",") if s] if args.sub else []
    sp = split_at(f, sub, args.seed)
    defects = long_exact_sequence_defects(sp, "Q") + long_exact_sequence_defects(sp, "Z2")
    hs, hq = homology(sp.sub, args.ring), homology(sp.quotient, args.ring)
    data = {
        "sub": {str(k): v.to_json() for k, v in hs.items()},
        "quotient": {str(k): v.to_json() for k, v in hq.items()},
        "connecting": {str(k): m for k, m in sorted(sp.connecting.items())},
        "exact": not defects,
        "defects": defects,
    }

    def table() -> list[str]:
        lines = ["sub homology: " + ", ".join(f"H_{k} = {v}" for k, v in sorted(hs.items()))]
        lines.append("quotient homology: " + ", ".join(f"H_{k} = {v}" for k, v in sorted(hq.items())))
        for k, m in sorted(sp.connecting.items()):
            if m and m[0]:
                lines.append(f"connecting map from quotient degree {k}")
                lines += _matrix_table(m, sp.sub.gens[k - 1], sp.quotient.gens[k])
        lines.append("long exact sequence: " + ("exact" if not defects else "; ".join(defects)))
        return lines

    _emit(args, data, table)
    return 0 if not defects else 1


CHART_EXAMPLES = {
    "chart-linear": lambda: interval_chart(func=lambda t: t),
    "chart-quadratic": lambda: interval_chart(func=lambda t: t * t - 1),
    "chart-positive": lambda: interval_chart(func=lambda t: t * t + 1),
}


def _random_example(name: str, seed: int):
    from . import generators as gen

    rng = np.random.default_rng(seed)
    if name == "random-category":
        return gen.random_category(rng)
    if name == "random-chart":
        return gen.random_vdim0_chart(rng)
    if name == "random-param":
        p = gen.random_gposet(rng, int(rng.choice([1, 2, 3, 4, 6])))
        return gen.random_free_param(rng, p, 3)
    if name == "random-diamond":
        return gen.random_diamond(rng)
    raise KeyError(name)


RANDOM_EXAMPLES = ("random-category", "random-chart", "random-param", "random-diamond")


def example_names() -> list[str]:
    return sorted(list(examples.CATEGORIES) + list(examples.PARAMS) + list(CHART_EXAMPLES) + list(RANDOM_EXAMPLES))


def cmd_example(args: argparse.Namespace) -> int:
    name = args.name
    if name in examples.CATEGORIES:
        obj = examples.CATEGORIES[name]()
    elif name in examples.PARAMS:
        obj = examples.PARAMS[name]()
    elif name in CHART_EXAMPLES:
        obj = CHART_EXAMPLES[name]()
    elif name in RANDOM_EXAMPLES:
        obj = _random_example(name, args.seed)
    else:
        raise UsageError(f"unknown example {name!r}; choose from {', '.join(example_names())}")
    doc = make_document(obj, name, args.seed if name in RANDOM_EXAMPLES else None)
    sys.stdout.write(doc.dumps())
    return 0


def cmd_property_suite(args: argparse.Namespace) -> int:
    from .properties import run_suite

    results = run_suite(args.count, args.seed)
    data = {"results": [{"name": n, "passed": ok, "instances": k, "detail": d} for n, ok, k, d in results]}
    _emit(args, data, lambda: [f"{'PASS' if ok else 'FAIL'} {n} ({k} instances){': ' + d if d else ''}"
                               for n, ok, k, d in results])
    return 0 if all(r[1] for r in results) else 1


# parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized step")
    common.add_argument("--tolerance", type=float, default=TOLERANCE, help="numerical tolerance")
    common.add_argument("--output", choices=("table", "json"), default=None, help="output format")

    parser = argparse.ArgumentParser(prog="flowcat", description="Equivariant framed flow categories at desk scale.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str, doc_default: str = "table"):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func, default_output=doc_default)
        return sp

    sp = add("validate", cmd_validate, "run all validators on a document")
    sp.add_argument("path", nargs="?", default="-")
    sp = add("homology", cmd_homology, "cellular chain complex and homology")
    sp.add_argument("path", nargs="?", default="-")
    sp.add_argument("--ring", choices=("Z", "Z2"), default="Z")
    sp.add_argument("--filtration", default=None, help="'mu', 'abar' or a JSON object of integers")
    sp.add_argument("--fixed", type=int, default=None, help="take geometric fixed points under C_m first")
    sp = add("fixed-points", cmd_fixed_points, "geometric fixed point category", "json")
    sp.add_argument("path", nargs="?", default="-")
    sp.add_argument("--fixed", type=int, required=True)
    sp = add("restratify", cmd_restratify, "insert marked action levels", "json")
    sp.add_argument("path", nargs="?", default="-")
    sp.add_argument("--levels", required=True, help="comma-separated images of the old levels")
    sp.add_argument("--top", type=int, default=None, help="largest new level (default: last image)")
    sp.add_argument("--shift", type=int, default=0, help="embedding shift M")
    sp = add("stabilize", cmd_stabilize, "stabilize by a free parameterization", "json")
    sp.add_argument("path", nargs="?", default="-")
    sp.add_argument("--param", required=True, help="free parameterization document")
    sp = add("shift-space", cmd_shift_space, "shift space of a (semi-)free parameterization")
    sp.add_argument("path", nargs="?", default="-")
    sp = add("param-iso", cmd_param_iso, "isometry between free parameterizations with equal invariants")
    sp.add_argument("first")
    sp.add_argument("second")
    sp = add("pt-degree", cmd_pt_degree, "signed zero count of a virtual-dimension-0 chart")
    sp.add_argument("path", nargs="?", default="-")
    sp = add("split", cmd_split, "split along a downward-closed invariant set of objects")
    sp.add_argument("path", nargs="?", default="-")
    sp.add_argument("--sub", default="", help="comma-separated objects of the subcategory")
    sp.add_argument("--ring", choices=("Z", "Z2"), default="Z")
    sp = add("example", cmd_example, "emit a built-in or random document", "json")
    sp.add_argument("name", help=", ".join(example_names()))
    sp = add("property-suite", cmd_property_suite, "run randomized invariant checks")
    sp.add_argument("--count", type=int, default=10)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    if args.output is None:
        args.output = args.default_output
    try:
        return args.func(args)
    except (DocumentError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except D2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CategoryError, ChartError, ParamError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
