"""Framed equivariant flow categories and their cellular chain complexes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .chains import ChainComplex, D2Error, homology, zeros
from .config import TOLERANCE
from .gposet import GPoset, LevelMap, fixed_subposet, restratify_action, stratum_index_map
from .gposet import validate as validate_poset
from .kuranishi import (
    ChartError,
    FamilyMember,
    PLChart,
    family_degrees,
    fixed_chart_map,
    prune_zero_free,
    validate_chart,
)
from .params import (
    EParam,
    ParamError,
    SemiFreeParam,
    direct_sum,
    fixed_semifree,
    induced_F,
    is_free,
)
from .params.eparam import matrix_from_json, matrix_to_json
from .report import Report
from .repring import VirtualRep, fixed_points, restrict

Pair = tuple[str, str]


@dataclass(frozen=True)
class DegreeEntry:
    degree: int
    flip: bool = False

    @property
    def value(self) -> int:
        return -self.degree if self.flip else self.degree


@dataclass
class ChartPair:
    """Chart for a pair; boundary vertices are identified with products of lower charts.

    ``stabilizers`` are applied lazily: they never change the degree, and
    ``flip`` absorbs orientation signs picked up when taking fixed points.
    """

    chart: PLChart
    boundary: dict[int, list[tuple[str, int, int]]] = field(default_factory=dict)
    splits: dict[str, np.ndarray] = field(default_factory=dict)
    flip: bool = False
    stabilizers: tuple[VirtualRep, ...] = ()

    def stabilizer_rep(self) -> VirtualRep:
        out = VirtualRep.zero(self.chart.group_order)
        for w in self.stabilizers:
            out = out + w
        return out

    def effective_vdim(self) -> int:
        return self.chart.vdim

    def effective_k(self) -> int:
        return self.chart.k


PairData = Union[DegreeEntry, ChartPair]


class CategoryError(ValueError):
    pass


@dataclass
class FlowCategory:
    poset: GPoset
    v0: SemiFreeParam
    v1: SemiFreeParam
    pairs: dict[Pair, PairData] = field(default_factory=dict)
    adapted: bool = True

    @property
    def objects(self) -> tuple[str, ...]:
        return self.poset.objects

    @property
    def mu(self) -> dict[str, int]:
        if self.poset.mu is None:
            return adapted_grading(self.poset, self.v0, self.v1)
        return dict(self.poset.mu)

    def pair_rep(self, which: str, x: str, y: str) -> VirtualRep:
        """V^i(x) - V^i(y) as a virtual representation of the pair stabilizer."""
        sp = self.v0 if which == "v0" else self.v1
        s = self.poset.pair_stab_order(x, y)
        vx = _total_space(sp, x)
        vy = _total_space(sp, y)
        return restrict(vx, s) - restrict(vy, s)

    def chart_pairs(self) -> dict[Pair, ChartPair]:
        return {p: d for p, d in self.pairs.items() if isinstance(d, ChartPair)}


def _total_space(sp: SemiFreeParam, x: str) -> VirtualRep:
    return sp.total.spaces[x]


def adapted_grading(poset: GPoset, v0: SemiFreeParam, v1: SemiFreeParam) -> dict[str, int]:
    return {x: v0.dim(x) - v1.dim(x) + poset.abar[x] + 1 for x in poset.objects}


def _same_skeleton(a: GPoset, b: GPoset) -> bool:
    return a.objects == b.objects and a.gt == b.gt and a.n == b.n and a.perm == b.perm and a.abar == b.abar


def pair_order(f: FlowCategory, pairs: Iterable[Pair]) -> list[Pair]:
    return sorted(pairs, key=lambda p: (f.poset.abar_pair(*p), p))


# degrees ---------------------------------------------------------------------------

@dataclass
class DegreeReport:
    degrees: dict[Pair, int]
    face_counts: dict[Pair, dict[str, int]]
    boundary_counts: dict[Pair, int]


def family_members(f: FlowCategory) -> dict[Pair, FamilyMember]:
    return {p: FamilyMember(d.chart, d.boundary, d.splits) for p, d in f.chart_pairs().items()}


def compute_degrees(f: FlowCategory, seed: int = 0) -> DegreeReport:
    """Integer degree for every pair with data; chart pairs share one compatible perturbation."""
    members = family_members(f)
    order = pair_order(f, members)
    res = family_degrees(members, order, seed) if members else None
    degrees: dict[Pair, int] = {}
    for p, d in f.pairs.items():
        if isinstance(d, DegreeEntry):
            degrees[p] = d.value
        elif res is not None and p in res.degrees:
            degrees[p] = -res.degrees[p] if d.flip else res.degrees[p]
    return DegreeReport(
        degrees,
        res.face_counts if res else {},
        res.boundary_counts if res else {},
    )


def cell_complex(f: FlowCategory, seed: int = 0, degrees: Mapping[Pair, int] | None = None,
                 check: bool = True) -> ChainComplex:
    mu = f.mu
    deg = dict(degrees) if degrees is not None else compute_degrees(f, seed).degrees
    return assemble_complex(f.poset, mu, deg, check)


def assemble_complex(poset: GPoset, mu: Mapping[str, int], degrees: Mapping[Pair, int],
                     check: bool = True) -> ChainComplex:
    gens: dict[int, list[str]] = {}
    for x in sorted(poset.objects, key=lambda o: (mu[o], o)):
        gens.setdefault(mu[x], []).append(x)
    d = {}
    for k, src in gens.items():
        tgt = gens.get(k - 1, [])
        if not tgt:
            continue
        m = zeros(len(tgt), len(src))
        for j, x in enumerate(src):
            for i, y in enumerate(tgt):
                if poset.is_gt(x, y):
                    m[i][j] = int(degrees.get((x, y), 0))
        d[k] = m
    c = ChainComplex(gens, d)
    if check:
        c.check()
    return c


# validation ------------------------------------------------------------------------

def validate_category(f: FlowCategory, tol: float = TOLERANCE, seed: int = 0) -> Report:
    rep = Report()
    p = f.poset
    rep.extend(validate_poset(p))
    for name, sp in (("V0", f.v0), ("V1", f.v1)):
        if not _same_skeleton(sp.poset, p):
            rep.add("framing-skeleton", f"{name} lives on a different skeleton")
            continue
        pr = sp.free.validate(tol)
        for v in pr.violations:
            rep.add(f"framing-{v.code}", f"{name}: {v.message}", v.witness)
        if pr.ok and not is_free(sp.free).free:
            rep.add("framing-not-semifree", f"{name} free part is not free")
    if not rep.ok:
        return rep
    mu_adapted = adapted_grading(p, f.v0, f.v1)
    mu = f.mu
    if f.adapted:
        for x in p.objects:
            if mu[x] != mu_adapted[x]:
                rep.add("adapted", f"dim V0 - dim V1 != mu - (Abar + 1) at {x}", x)
    for (x, y), d in sorted(f.pairs.items()):
        if x not in p.objects or y not in p.objects or not p.is_gt(x, y):
            rep.add("pair", f"data given for non-comparable pair ({x}, {y})", (x, y))
            continue
        gx, gy = p.act(x), p.act(y)
        other = f.pairs.get((gx, gy))
        if other is None:
            rep.add("pair-equivariance", f"no data for ({gx}, {gy}), the image of ({x}, {y})", (x, y))
        if isinstance(d, DegreeEntry):
            if mu[x] - mu[y] != 1:
                rep.add("degree-entry", f"degree entry on ({x}, {y}) whose grading gap is not 1", (x, y))
            if isinstance(other, DegreeEntry) and other.value != d.value:
                rep.add("degree-equivariance", f"d({gx},{gy}) != d({x},{y})", (x, y))
            continue
        c = d.chart
        s = p.pair_stab_order(x, y)
        if c.group_order != s:
            rep.add("chart-group", f"chart ({x}, {y}) is over C{c.group_order}, stabilizer is C{s}", (x, y))
            continue
        cr = validate_chart(c, tol)
        for v in cr.violations:
            rep.add(f"chart-{v.code}", f"({x}, {y}): {v.message}", (x, y))
        if c.simplices and c.vdim != mu[x] - mu[y] - 1:
            rep.add("chart-vdim", f"chart ({x}, {y}) has vdim {c.vdim}, expected {mu[x] - mu[y] - 1}", (x, y))
        if c.k != p.abar_pair(x, y):
            rep.add("chart-k", f"chart ({x}, {y}) has k={c.k}, expected {p.abar_pair(x, y)}", (x, y))
        # lazy stabilizers change the twist and det(V) by the same sign
        twist = c.orientation_twist()
        expected = f.pair_rep("v0", x, y).det_sign() * f.pair_rep("v1", x, y).det_sign() * c.v_rep.det_sign()
        if twist is not None and twist != expected:
            rep.add("orientation-twist", f"chart ({x}, {y}) twist {twist} but framing requires {expected}", (x, y))
        _check_boundary_identification(f, (x, y), d, rep, tol)
    for x, y in p.pairs():
        if mu[x] - mu[y] == 1 and (x, y) not in f.pairs:
            rep.add("missing-degree", f"no degree data for ({x}, {y})", (x, y))
    if not rep.ok:
        return rep
    try:
        dr = compute_degrees(f, seed)
    except ChartError as exc:
        rep.add("perturbation", str(exc))
        return rep
    for pair, total in sorted(dr.boundary_counts.items()):
        if total != 0:
            rep.add("boundary-pairing", f"zero arcs of {pair} have unbalanced ends ({total})", pair)
    for (x, z), counts in sorted(dr.face_counts.items()):
        for y in p.objects:
            if p.is_gt(x, y) and p.is_gt(y, z) and (x, y) in dr.degrees and (y, z) in dr.degrees:
                want = dr.degrees[(x, y)] * dr.degrees[(y, z)]
                got = counts.get(y, 0)
                if want != got:
                    rep.add("boundary-orientation",
                            f"face {y} of ({x}, {z}) counts {got}, product of degrees is {want}", (x, z))
    for (x, y), dv in dr.degrees.items():
        gp = (p.act(x), p.act(y))
        if gp in dr.degrees and dr.degrees[gp] != dv:
            rep.add("degree-equivariance", f"d{gp} != d({x},{y})", (x, y))
    try:
        assemble_complex(p, mu, dr.degrees)
    except D2Error as exc:
        rep.add("d-squared", str(exc), exc.witness)
    return rep


def _check_boundary_identification(f: FlowCategory, pair: Pair, d: ChartPair, rep: Report, tol: float) -> None:
    x, z = pair
    p = f.poset
    c = d.chart
    for v, entries in d.boundary.items():
        if not 0 <= v < c.n_vertices:
            rep.add("boundary-identification", f"({x}, {z}): vertex {v} out of range", pair)
            continue
        for y, a, b in entries:
            if not (p.is_gt(x, y) and p.is_gt(y, z)):
                rep.add("boundary-identification", f"({x}, {z}): {y} is not between", pair)
                continue
            cxy, cyz = f.pairs.get((x, y)), f.pairs.get((y, z))
            if not isinstance(cxy, ChartPair) or not isinstance(cyz, ChartPair):
                rep.add("boundary-identification", f"({x}, {z}): face {y} refers to pairs without charts", pair)
                continue
            split = d.splits.get(y)
            r_in = cxy.chart.r + cyz.chart.r
            if split is None or split.shape != (c.r, r_in):
                rep.add("boundary-identification", f"({x}, {z}): missing or misshaped split at {y}", pair)
                continue
            if r_in and np.max(np.abs(split.T @ split - np.eye(r_in))) > 1e-7:
                rep.add("boundary-identification", f"({x}, {z}): split at {y} is not an isometry", pair)
            label = p.abar_pair(x, y)
            if label not in c.face_labels([v]):
                rep.add("boundary-identification", f"({x}, {z}): vertex {v} is not on the face of {y}", pair)
            if not (0 <= a < cxy.chart.n_vertices and 0 <= b < cyz.chart.n_vertices):
                rep.add("boundary-identification", f"({x}, {z}): product vertex out of range", pair)
                continue
            want = split @ np.concatenate([cxy.chart.section[a], cyz.chart.section[b]])
            if c.r and np.max(np.abs(c.section[v] - want)) > 1e-7:
                rep.add("boundary-identification", f"({x}, {z}): section at vertex {v} disagrees with face {y}", pair)


# geometric fixed points --------------------------------------------------------------

def geometric_fixed_points(f: FlowCategory, m: int) -> FlowCategory:
    p = f.poset
    if m < 1 or p.n % m:
        raise CategoryError(f"{m} does not divide {p.n}")
    if m == 1:
        return f
    q = fixed_subposet(p, m)
    v0 = fixed_semifree(f.v0, m)
    v1 = fixed_semifree(f.v1, m)
    mu = adapted_grading(q, v0, v1)
    q = q.with_mu(mu)
    maps: dict[Pair, dict[int, int]] = {}
    pairs: dict[Pair, PairData] = {}
    charts: dict[Pair, PLChart] = {}
    for x, y in q.pairs():
        d = f.pairs.get((x, y))
        if d is None:
            continue
        if isinstance(d, DegreeEntry):
            if mu[x] - mu[y] == 1:
                raise CategoryError(
                    f"pair ({x}, {y}) has only a degree entry but its fixed degree is needed"
                )
            continue
        fc, vmap = fixed_chart_map(d.chart, m)
        fc, kept = prune_zero_free(fc)
        vmap = {v: kept[w] for v, w in vmap.items() if w in kept}
        charts[(x, y)], maps[(x, y)] = fc, vmap
        sign = 1
        fw = 0
        stabs = []
        for w in d.stabilizers:
            wh = fixed_points(w, m)
            stabs.append(wh)
            fw += wh.dim
        normal = (d.chart.d - fc.d) + (d.chart.r - fc.r)
        if (normal * fw) % 2:
            sign = -1
        pairs[(x, y)] = ChartPair(fc, {}, {}, d.flip ^ (sign < 0), tuple(stabs))
    for (x, z), d in list(pairs.items()):
        orig = f.pairs[(x, z)]
        assert isinstance(orig, ChartPair)
        vm = maps[(x, z)]
        bnd: dict[int, list[tuple[str, int, int]]] = {}
        splits: dict[str, np.ndarray] = {}
        for v, entries in orig.boundary.items():
            if v not in vm:
                continue
            for y, a, b in entries:
                if (x, y) not in maps or (y, z) not in maps:
                    continue
                ma, mb = maps[(x, y)], maps[(y, z)]
                if a in ma and b in mb:
                    bnd.setdefault(vm[v], []).append((y, ma[a], mb[b]))
                    splits[y] = _fixed_split(orig, y, f, m, (x, y), (y, z), (x, z))
        d.boundary, d.splits = bnd, splits
    return FlowCategory(q, v0, v1, pairs, f.adapted)


def _fixed_split(orig: ChartPair, y: str, f: FlowCategory, m: int, pxy: Pair, pyz: Pair, pxz: Pair) -> np.ndarray:
    """Restrict a split isometry to fixed coordinates of its source and target."""
    from .kuranishi.chart import _fixed_coordinate_split

    cxy = f.pairs[pxy].chart  # type: ignore[union-attr]
    cyz = f.pairs[pyz].chart  # type: ignore[union-attr]
    rows, _, _ = _fixed_coordinate_split(orig.chart.v_labels, m)
    a, _, _ = _fixed_coordinate_split(cxy.v_labels, m)
    b, _, _ = _fixed_coordinate_split(cyz.v_labels, m)
    cols = a + [cxy.r + j for j in b]
    return orig.splits[y][np.ix_(rows, cols)]


# restratification --------------------------------------------------------------------

def _reposet(e: EParam, poset: GPoset) -> EParam:
    return EParam(poset, dict(e.spaces), dict(e.emb), dict(e.act))


def restratify(f: FlowCategory, rho: LevelMap, shift: int = 0) -> FlowCategory:
    """Refine the marked levels; V1 gains trivial summands on inserted levels above the lowest ``shift``."""
    old = f.poset
    res = restratify_action(old.with_mu(None), rho, shift)
    newp = res.poset
    new_levels = newp.marked_levels().levels
    image = set(rho.values)
    f0 = [0] * len(new_levels)
    f1 = [0] * len(new_levels)
    for i, lvl in enumerate(rho.values):
        f0[lvl] = f.v0.f[i]
        f1[lvl] = f.v1.f[i]
    for lvl in new_levels:
        if lvl not in image and lvl >= shift:
            f1[lvl] = 1
    v0 = SemiFreeParam(_reposet(f.v0.free, newp), tuple(f0))
    v1 = SemiFreeParam(_reposet(f.v1.free, newp), tuple(f1))
    mu = adapted_grading(newp, v0, v1)
    newp = newp.with_mu(mu)
    pairs: dict[Pair, PairData] = {}
    for (x, y), d in f.pairs.items():
        if isinstance(d, DegreeEntry):
            pairs[(x, y)] = d
            continue
        idx = stratum_index_map(old, newp, rho, x, y)
        c = d.chart
        strata = [(face, frozenset(idx[j] for j in labs)) for face, labs in c.strata]
        extra = newp.abar_pair(x, y) - old.abar_pair(x, y)
        triv = VirtualRep.of(c.group_order, triv=extra) if extra else None
        stabs = d.stabilizers + ((triv,) if triv is not None else ())
        pairs[(x, y)] = ChartPair(c.with_strata(newp.abar_pair(x, y), strata), d.boundary, d.splits, d.flip, stabs)
    return FlowCategory(newp, v0, v1, pairs, f.adapted)


def stabilize_category(f: FlowCategory, e: EParam) -> FlowCategory:
    if not _same_skeleton(e.poset, f.poset):
        raise CategoryError("stabilizing parameterization lives on a different skeleton")
    if not is_free(e).free:
        raise ParamError("stabilizing parameterization must be free")
    fe = induced_F(e)
    v0 = SemiFreeParam(direct_sum(f.v0.free, _reposet(e, f.v0.free.poset)), f.v0.f)
    v1 = SemiFreeParam(direct_sum(f.v1.free, _reposet(e, f.v1.free.poset)), f.v1.f)
    pairs: dict[Pair, PairData] = {}
    for (x, y), d in f.pairs.items():
        if isinstance(d, DegreeEntry):
            pairs[(x, y)] = d
            continue
        w = fe.pair_rep(x, y)
        stabs = d.stabilizers + ((w,) if not w.is_zero else ())
        pairs[(x, y)] = ChartPair(d.chart, d.boundary, d.splits, d.flip, stabs)
    return FlowCategory(f.poset, v0, v1, pairs, f.adapted)


# subcategories -----------------------------------------------------------------------

@dataclass
class Split:
    sub: ChainComplex
    quotient: ChainComplex
    connecting: dict[int, list[list[int]]]
    total: ChainComplex


def split_at(f: FlowCategory, s: Iterable[str], seed: int = 0) -> Split:
    keep = set(s)
    p = f.poset
    unknown = keep - set(p.objects)
    if unknown:
        raise CategoryError(f"unknown objects {sorted(unknown)}")
    for x in keep:
        for y in p.below(x):
            if y not in keep:
                raise CategoryError(f"set is not downward closed: {x} in it, {y} below it is not")
        if p.act(x) not in keep:
            raise CategoryError(f"set is not invariant: {x} in it, {p.act(x)} is not")
    total = cell_complex(f, seed)
    sub = _restrict_complex(total, keep)
    quo = _restrict_complex(total, set(p.objects) - keep)
    conn: dict[int, list[list[int]]] = {}
    for k, src in quo.gens.items():
        tgt = sub.gens.get(k - 1, [])
        conn[k] = [[total.entry(x, y) for x in src] for y in tgt]
    return Split(sub, quo, conn, total)


def _restrict_complex(c: ChainComplex, keep: set[str]) -> ChainComplex:
    gens = {k: [x for x in v if x in keep] for k, v in c.gens.items()}
    gens = {k: v for k, v in gens.items() if v}
    d = {}
    for k, src in gens.items():
        tgt = gens.get(k - 1, [])
        if tgt:
            d[k] = [[c.entry(x, y) for x in src] for y in tgt]
    return ChainComplex(gens, d)


def long_exact_sequence_defects(sp: Split, ring: str = "Q") -> list[str]:
    """Exactness failures of H(S) -> H(C) -> H(C/S) -> H(S)[-1] over a field (Q or Z/p)."""
    from .chains import boundaries, cycles, induced_rank

    def identity_map(a: ChainComplex, b: ChainComplex, k: int) -> list[list[int]]:
        return [[1 if y == x else 0 for x in a.gens.get(k, [])] for y in b.gens.get(k, [])]

    def rk(fmat, src: ChainComplex, tgt: ChainComplex, ks: int, kt: int) -> int:
        if not src.gens.get(ks) or not tgt.gens.get(kt):
            return 0
        return induced_rank(fmat, cycles(src, ks, ring), boundaries(tgt, kt), ring)

    hs, hc, hq = (homology(c, ring) for c in (sp.sub, sp.total, sp.quotient))
    out = []
    degs = sorted(set(sp.total.gens) | set(sp.sub.gens) | set(sp.quotient.gens))
    for k in range(degs[0] - 1, degs[-1] + 2) if degs else []:
        i_k = rk(identity_map(sp.sub, sp.total, k), sp.sub, sp.total, k, k)
        j_k = rk(identity_map(sp.total, sp.quotient, k), sp.total, sp.quotient, k, k)
        d_k = rk(sp.connecting.get(k, []), sp.quotient, sp.sub, k, k - 1)
        d_k1 = rk(sp.connecting.get(k + 1, []), sp.quotient, sp.sub, k + 1, k)
        dim = lambda h: h[k].rank if k in h else 0  # noqa: E731
        if dim(hs) - i_k != d_k1:
            out.append(f"not exact at H_{k}(sub) over {ring}")
        if dim(hc) - j_k != i_k:
            out.append(f"not exact at H_{k}(total) over {ring}")
        if dim(hq) - d_k != j_k:
            out.append(f"not exact at H_{k}(quotient) over {ring}")
    return out


# serialization -------------------------------------------------------------------------

def category_to_json(f: FlowCategory) -> dict:
    pairs = []
    for (x, y), d in sorted(f.pairs.items()):
        if isinstance(d, DegreeEntry):
            pairs.append({"x": x, "y": y, "kind": "degree", "degree": d.degree, "flip": d.flip})
        else:
            pairs.append({
                "x": x, "y": y, "kind": "chart", "chart": d.chart.to_json(), "flip": d.flip,
                "boundary": {str(v): [list(e) for e in es] for v, es in sorted(d.boundary.items())},
                "splits": {y2: matrix_to_json(m) for y2, m in sorted(d.splits.items())},
                "stabilizers": [w.to_json() for w in d.stabilizers],
            })
    return {
        "skeleton": f.poset.to_json(),
        "framing": {"V0": f.v0.to_json(), "V1": f.v1.to_json()},
        "pairs": pairs,
        "adapted": f.adapted,
    }


def category_from_json(data: Mapping) -> FlowCategory:
    poset = GPoset.from_json(data["skeleton"])
    v0 = SemiFreeParam.from_json(data["framing"]["V0"])
    v1 = SemiFreeParam.from_json(data["framing"]["V1"])
    pairs: dict[Pair, PairData] = {}
    for e in data.get("pairs", []):
        key = (str(e["x"]), str(e["y"]))
        if e["kind"] == "degree":
            pairs[key] = DegreeEntry(int(e["degree"]), bool(e.get("flip", False)))
        elif e["kind"] == "chart":
            pairs[key] = ChartPair(
                PLChart.from_json(e["chart"]),
                {int(v): [(str(a), int(b), int(c)) for a, b, c in es] for v, es in e.get("boundary", {}).items()},
                {str(y): matrix_from_json(m) for y, m in e.get("splits", {}).items()},
                bool(e.get("flip", False)),
                tuple(VirtualRep.from_json(w) for w in e.get("stabilizers", [])),
            )
        else:
            raise ValueError(f"unknown pair kind {e['kind']!r}")
    return FlowCategory(poset, v0, v1, pairs, bool(data.get("adapted", True)))
