"""Seeded random instances for property tests and the acceptance suite."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .category import (
    CategoryError,
    ChartPair,
    DegreeEntry,
    FlowCategory,
    adapted_grading,
    assemble_complex,
    compute_degrees,
    geometric_fixed_points,
)
from .chains import D2Error
from .gposet import GPoset
from .kuranishi import (
    ChartError,
    PLChart,
    face_has_zero,
    point_chart,
    stabilize_chart,
    validate_chart,
)
from .linalg import labels_matrix
from .params import EParam, SemiFreeParam, build_free
from .repring import IrrepLabel, VirtualRep, fixed_points, irreps, restrict


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def random_rep(rng: np.random.Generator, n: int, max_dim: int) -> VirtualRep:
    out = VirtualRep.zero(n)
    labs = irreps(n)
    budget = int(rng.integers(0, max_dim + 1))
    while True:
        room = [l for l in labs if l.dim <= budget - out.dim]
        if not room or rng.random() < 0.25:
            return out
        lab = room[int(rng.integers(len(room)))]
        out = out + VirtualRep(n, {lab: 1})


def random_gposet(rng: np.random.Generator, n: int, max_objects: int = 8, max_orbits: int = 5) -> GPoset:
    """Orbits on distinct action levels; equivariant relations from higher to lower levels."""
    orbits: list[list[str]] = []
    total = 0
    for i in range(int(rng.integers(1, max_orbits + 1))):
        sizes = [n // s for s in divisors(n) if total + n // s <= max_objects]
        if not sizes:
            break
        size = sizes[int(rng.integers(len(sizes)))]
        orbits.append([f"o{i}_{j}" for j in range(size)])
        total += size
    levels = []
    a = -1 + int(rng.integers(0, 2))
    for _ in orbits:
        levels.append(a)
        a += int(rng.integers(1, 3))
    levels.reverse()  # orbit 0 highest
    perm, abar = {}, {}
    for orb, lvl in zip(orbits, levels):
        for j, x in enumerate(orb):
            perm[x] = orb[(j + 1) % len(orb)]
            abar[x] = lvl
    rel = []
    for i, j in combinations(range(len(orbits)), 2):
        oa, ob = orbits[i], orbits[j]
        if rng.random() < 0.3:
            continue
        for t in range(len(ob)):
            if rng.random() < 0.6:
                for step in range(n):
                    rel.append((oa[step % len(oa)], ob[(t + step) % len(ob)]))
    return GPoset([x for o in orbits for x in o], rel, n, perm, abar)


def random_free_param(rng: np.random.Generator, poset: GPoset, max_seed_dim: int = 2) -> EParam:
    seeds = {}
    for x in poset.orbit_reps():
        v = random_rep(rng, poset.stab_order(x), max_seed_dim)
        if not v.is_zero:
            seeds[x] = v
    return build_free(poset, seeds)


def random_equivariant_matrix(rng: np.random.Generator, src: list[IrrepLabel], tgt: list[IrrepLabel]) -> np.ndarray:
    a = labels_matrix(src) if src else np.zeros((0, 0))
    b = labels_matrix(tgt) if tgt else np.zeros((0, 0))
    da, db = a.shape[0], b.shape[0]
    if da == 0 or db == 0:
        return np.zeros((db, da))
    n = src[0].n if src else tgt[0].n
    m = rng.normal(size=(db, da))
    out = np.zeros((db, da))
    pa, pb = np.eye(da), np.eye(db)
    for _ in range(n):
        out += pb @ m @ pa.T
        pa, pb = a @ pa, b @ pb
    return out / n


def _orbit_section(rng: np.random.Generator, c: PLChart, b_labels: list[IrrepLabel], base: np.ndarray,
                   noise: float) -> np.ndarray:
    """Equivariant vertex values: base plus noise averaged over vertex stabilizers."""
    s = c.group_order
    r = base.shape[1]
    if r == 0:
        return base.copy()
    bmat = labels_matrix(b_labels)
    powers = [np.eye(r)]
    for _ in range(s - 1):
        powers.append(bmat @ powers[-1])
    vals = base.copy()
    done = set()
    for v in range(c.n_vertices):
        if v in done:
            continue
        orbit = [c.act_vertex(v, j) for j in range(s)]
        stab = [j for j in range(s) if orbit[j] == v]
        u = rng.normal(size=r) * noise
        u = sum(powers[j] @ u for j in stab) / len(stab)
        for j in range(s):
            w = orbit[j]
            vals[w] = base[w] + powers[j] @ u
            done.add(w)
    return vals


def ball_chart(s: int, a: VirtualRep) -> PLChart:
    """The unit ball of an actual representation with its coordinate orientation."""
    return stabilize_chart(point_chart(s), a)


def model_chart(rng: np.random.Generator, a: VirtualRep, b: VirtualRep, noise: float = 0.3,
                center_zero: bool = False, v_sign: int = 1) -> PLChart:
    """Ball in ``a`` with a random equivariant PL section into ``b``."""
    t = ball_chart(a.n, a)
    b_labels = b.labels()
    lin = random_equivariant_matrix(rng, a.labels(), b_labels)
    base = t.coords @ lin.T if b.dim else np.zeros((t.n_vertices, 0))
    if b.dim:
        fixed_dirs = [i for i, l in enumerate(b_labels) if l.kind == "triv"]
        const = np.zeros(b.dim)
        for i in fixed_dirs:
            const[sum(l.dim for l in b_labels[:i])] = rng.normal() * 0.3
        base = base + const
    vals = _orbit_section(rng, t, b_labels, base, noise)
    if center_zero and b.dim:
        vals[0] = 0.0
    return PLChart(a.n, t.t_labels, t.coords, t.simplices, t.mults, tuple(b_labels), vals, t.perm,
                   0, (), v_sign, t.d)


def random_vdim0_chart(rng: np.random.Generator, n: int | None = None, max_tries: int = 50) -> PLChart:
    """Equivariant vdim-0 chart with zeros away from the boundary."""
    for _ in range(max_tries):
        s = n if n is not None else int(rng.choice([1, 2, 3, 4]))
        d = int(rng.integers(0, 3))
        a = _rep_of_dim(rng, s, d)
        b = _rep_of_dim(rng, s, d)
        if a is None or b is None:
            continue
        c = model_chart(rng, a, b, v_sign=int(rng.choice([1, -1])))
        if not validate_chart(c).ok:
            continue
        if any(face_has_zero(c.section[list(f)]) for f in c.boundary_faces()):
            continue
        return c
    raise RuntimeError("could not sample a chart")


def _rep_of_dim(rng: np.random.Generator, n: int, d: int) -> VirtualRep | None:
    options = [l for l in irreps(n)]
    for _ in range(20):
        out = VirtualRep.zero(n)
        while out.dim < d:
            room = [l for l in options if l.dim <= d - out.dim]
            if not room:
                break
            out = out + VirtualRep(n, {room[int(rng.integers(len(room)))]: 1})
        if out.dim == d:
            return out
    return None


# random categories -------------------------------------------------------------------

def _split_rep(d: VirtualRep) -> tuple[VirtualRep, VirtualRep]:
    pos = VirtualRep(d.n, {l: m for l, m in d.mult.items() if m > 0})
    neg = VirtualRep(d.n, {l: -m for l, m in d.mult.items() if m < 0})
    return pos, neg


def _pair_models(f: FlowCategory, x: str, y: str) -> VirtualRep:
    p = f.poset
    s = p.pair_stab_order(x, y)
    return f.pair_rep("v0", x, y) - f.pair_rep("v1", x, y) + VirtualRep.of(s, triv=p.abar_pair(x, y))


def _fixed_gaps(f: FlowCategory, x: str, y: str) -> dict[int, int]:
    """Grading gap of (x, y) in the fixed category for every nontrivial subgroup fixing both."""
    p = f.poset
    s = p.pair_stab_order(x, y)
    out = {}
    for m in divisors(s):
        if m == 1:
            continue
        gap = 0
        for o, sgn in ((x, 1), (y, -1)):
            so = p.stab_order(o)
            v0 = fixed_points(restrict(f.v0.total.spaces[o], so), m).dim if so % m == 0 else 0
            v1 = fixed_points(restrict(f.v1.total.spaces[o], so), m).dim if so % m == 0 else 0
            gap += sgn * (v0 - v1 + p.abar[o] + 1)
        out[m] = gap
    return out


def random_category(
    rng: np.random.Generator,
    n: int | None = None,
    max_objects: int = 10,
    max_tries: int = 2000,
    with_fixed: bool = True,
    min_charts: int = 1,
    min_fixed_degrees: int = 0,
) -> FlowCategory:
    """Equivariant chart-backed category with d^2 = 0 in every fixed category.

    Chart for a pair orbit: a ball in A with a random section into B, where
    A - B = V0(x,y) - V1(x,y) + Ā(x,y)·triv, so virtual dimensions match the
    adapted grading in the ambient and every fixed category.
    """
    for _ in range(max_tries):
        nn = n if n is not None else int(rng.choice([1, 2, 3, 4]))
        try:
            f = _try_category(rng, nn, max_objects, with_fixed, min_charts, min_fixed_degrees)
        except (ChartError, CategoryError, D2Error, _Reject):
            continue
        return f
    raise RuntimeError("could not sample a category")


class _Reject(Exception):
    pass


def _try_category(rng: np.random.Generator, n: int, max_objects: int, with_fixed: bool,
                  min_charts: int = 0, min_fixed_degrees: int = 0) -> FlowCategory:
    p = random_gposet(rng, n, max_objects)
    if not p.pairs():
        raise _Reject()
    levels = len(p.marked_levels().levels)
    e0 = random_free_param(rng, p, 2)
    e1 = random_free_param(rng, p, 2)
    f0 = tuple(int(v) for v in rng.integers(0, 2, size=levels))
    f1 = tuple(int(v) for v in rng.integers(0, 2, size=levels))
    v0, v1 = SemiFreeParam(e0, f0), SemiFreeParam(e1, f1)
    mu = adapted_grading(p, v0, v1)
    p = p.with_mu(mu)
    v0 = SemiFreeParam(EParam(p, e0.spaces, e0.emb, e0.act), f0)
    v1 = SemiFreeParam(EParam(p, e1.spaces, e1.emb, e1.act), f1)
    f = FlowCategory(p, v0, v1, {})
    pairs = {}
    done = set()
    for x, y in p.pairs():
        if (x, y) in done:
            continue
        orbit = []
        a, b = x, y
        while (a, b) not in orbit:
            orbit.append((a, b))
            a, b = p.act(a), p.act(b)
        done |= set(orbit)
        gap = mu[x] - mu[y]
        fixed_need = with_fixed and any(g == 1 for g in _fixed_gaps(f, x, y).values())
        if gap != 1 and not fixed_need:
            continue
        if gap >= 2:
            raise _Reject()
        data = _random_pair_data(rng, f, x, y, fixed_need)
        for pr in orbit:
            pairs[pr] = data
    f = FlowCategory(p, v0, v1, pairs)
    if len(f.chart_pairs()) < min_charts:
        raise _Reject()
    deg = compute_degrees(f, int(rng.integers(1 << 30))).degrees
    assemble_complex(p, mu, deg)
    fixed_nonzero = 0
    if with_fixed:
        for m in divisors(n)[1:]:
            fh = geometric_fixed_points(f, m)
            dh = compute_degrees(fh).degrees
            assemble_complex(fh.poset, fh.mu, dh)
            fixed_nonzero += sum(1 for v in dh.values() if v)
    if fixed_nonzero < min_fixed_degrees:
        raise _Reject()
    return f


def _random_pair_data(rng: np.random.Generator, f: FlowCategory, x: str, y: str, fixed_need: bool):
    d = _pair_models(f, x, y)
    pos, neg = _split_rep(d)
    s = d.n
    if pos.dim > 2 or neg.dim > 4:
        if fixed_need:
            raise _Reject()
        return DegreeEntry(int(rng.integers(-1, 2)))
    extra = VirtualRep.zero(s)
    if rng.random() < 0.4:
        e = random_rep(rng, s, 2 - pos.dim)
        if neg.dim + e.dim <= 4:
            extra = e
    a, b = pos + extra, neg + extra
    c = model_chart(rng, a, b, center_zero=a.dim < b.dim, v_sign=int(rng.choice([1, -1])))
    c = c.with_strata(f.poset.abar_pair(x, y), ())
    rep = validate_chart(c)
    if not rep.ok:
        raise _Reject()
    if c.vdim == 0 and any(face_has_zero(c.section[list(fc)]) for fc in c.boundary_faces()):
        raise _Reject()
    return ChartPair(c)


# boundary-pairing families -----------------------------------------------------------

def random_diamond(rng: np.random.Generator) -> FlowCategory:
    """x > y1, y2 > z with a one-dimensional x -> z moduli space joining the two breakings.

    The arc runs from the face through the negative product to the face
    through the positive one.  With ``strip`` geometry the (x, y) charts are
    obstructed intervals and the x -> z chart is a triangulated rectangle.
    """
    strip = bool(rng.random() < 0.5)
    p = GPoset(["x", "y1", "y2", "z"], [("x", "y1"), ("x", "y2"), ("y1", "z"), ("y2", "z")], 1, None,
               {"x": 1, "y1": 0, "y2": 0, "z": -1})
    e = build_free(p, {})
    f0, f1 = (0, 0), (0, 0)
    triv = IrrepLabel("triv", 1)
    # product signs +1 through y_pos and -1 through y_neg
    s_pos_xy, s_neg_xy = int(rng.choice([1, -1])), int(rng.choice([1, -1]))
    s_pos_yz, s_neg_yz = s_pos_xy, -s_neg_xy
    ypos, yneg = ("y1", "y2") if rng.random() < 0.5 else ("y2", "y1")
    pairs = {}
    cells = int(rng.integers(1, 4))
    if strip:
        for yy, sxy in ((ypos, s_pos_xy), (yneg, s_neg_xy)):
            ts = np.linspace(-1, 1, cells + 1)
            # orientation multiplier makes the degree equal sxy for the section t -> t
            pairs[("x", yy)] = ChartPair(PLChart(
                1, (triv,), ts.reshape(-1, 1), tuple((i, i + 1) for i in range(cells)), (sxy,) * cells,
                (triv,), ts.reshape(-1, 1), tuple(range(cells + 1)), 0,
            ))
    else:
        for yy, sxy in ((ypos, s_pos_xy), (yneg, s_neg_xy)):
            pairs[("x", yy)] = ChartPair(point_chart(1, (), None, sxy))
    for yy, syz in ((ypos, s_pos_yz), (yneg, s_neg_yz)):
        pairs[(yy, "z")] = ChartPair(point_chart(1, (), None, syz))
    label = 0  # Ā(x, y) = 0 for both breakings
    if strip:
        ts = np.linspace(-1, 1, cells + 1)
        ss = np.linspace(0, 1, int(rng.integers(1, 4)) + 1)
        grid = [(si, ti) for si in range(len(ss)) for ti in range(len(ts))]
        idx = {g: i for i, g in enumerate(grid)}
        coords = np.array([[ss[si], ts[ti]] for si, ti in grid])
        sims, mults = [], []
        for si in range(len(ss) - 1):
            for ti in range(len(ts) - 1):
                a, b = idx[(si, ti)], idx[(si + 1, ti)]
                c_, d_ = idx[(si, ti + 1)], idx[(si + 1, ti + 1)]
                for tri in ((a, b, d_), (a, d_, c_)):
                    e1 = coords[tri[1]] - coords[tri[0]]
                    e2 = coords[tri[2]] - coords[tri[0]]
                    sims.append(tri)
                    mults.append(1 if e1[0] * e2[1] - e1[1] * e2[0] > 0 else -1)
        section = coords[:, 1:2].copy()
        interior = [i for i, (si, ti) in enumerate(grid) if 0 < si < len(ss) - 1]
        section[interior] += rng.uniform(-0.05, 0.05, size=(len(interior), 1))
        left = [idx[(0, ti)] for ti in range(len(ts))]
        right = [idx[(len(ss) - 1, ti)] for ti in range(len(ts))]
        strata = [(frozenset(edge[i:i + 2]), frozenset({label})) for edge in (left, right)
                  for i in range(len(edge) - 1)]
        bnd = {}
        for ti in range(len(ts)):
            bnd[idx[(len(ss) - 1, ti)]] = [(ypos, ti, 0)]
            bnd[idx[(0, ti)]] = [(yneg, ti, 0)]
        # section on each face is (s_xy-independent) t, matching the interval section
        cxz = PLChart(1, (triv, triv), coords, tuple(sims), tuple(mults), (triv,), section,
                      tuple(range(len(grid))), 1, tuple(strata))
        splits = {ypos: np.eye(1), yneg: np.eye(1)}
    else:
        ss = np.linspace(0, 1, cells + 1)
        cxz = PLChart(1, (triv,), ss.reshape(-1, 1), tuple((i, i + 1) for i in range(cells)), (1,) * cells,
                      (), np.zeros((cells + 1, 0)), tuple(range(cells + 1)), 1,
                      ((frozenset({0}), frozenset({label})), (frozenset({cells}), frozenset({label}))))
        bnd = {cells: [(ypos, 0, 0)], 0: [(yneg, 0, 0)]}
        splits = {ypos: np.zeros((0, 0)), yneg: np.zeros((0, 0))}
    pairs[("x", "z")] = ChartPair(cxz, bnd, splits)
    v0, v1 = SemiFreeParam(e, f0), SemiFreeParam(build_free(p, {}), f1)
    mu = adapted_grading(p, v0, v1)
    p2 = p.with_mu(mu)
    v0 = SemiFreeParam(EParam(p2, e.spaces, e.emb, e.act), f0)
    v1 = SemiFreeParam(EParam(p2, e.spaces, e.emb, e.act), f1)
    return FlowCategory(p2, v0, v1, pairs)


# parameterization pairs --------------------------------------------------------------------

def random_equivariant_orthogonal(rng: np.random.Generator, rep: VirtualRep) -> np.ndarray:
    """Random orthogonal matrix commuting with the canonical action of ``rep``."""
    from .linalg import rep_matrix

    d = rep.dim
    if d == 0:
        return np.zeros((0, 0))
    g = rep_matrix(rep)
    q = rng.normal(size=(d, d))
    avg = np.zeros((d, d))
    p = np.eye(d)
    for _ in range(rep.n):
        avg += p @ q @ p.T
        p = g @ p
    u, _, vt = np.linalg.svd(avg / rep.n)
    return u @ vt


def random_isomorphic_copy(rng: np.random.Generator, e: EParam) -> EParam:
    """Transport ``e`` along random equivariant isometries, chosen at orbit representatives."""
    p = e.poset
    phi: dict[str, np.ndarray] = {}
    for r in p.orbit_reps():
        base = random_equivariant_orthogonal(rng, e.spaces[r])
        orbit = p.orbit(r)
        for j, x in enumerate(orbit):
            a = e.action_power(r, j)
            phi[x] = a @ base @ a.T
    emb = {(x, y): phi[x] @ e.emb[(x, y)] @ phi[y].T for x, y in p.pairs()}
    act = {x: phi[p.perm[x]] @ e.act[x] @ phi[x].T for x in p.objects}
    return EParam(p, dict(e.spaces), emb, act)


def random_free_pair(rng: np.random.Generator, equal: bool, n: int | None = None, max_objects: int = 8,
                     max_dim: int = 16) -> tuple[EParam, EParam, dict[str, VirtualRep]]:
    """Two free parameterizations on one poset; equal invariants or seeds perturbed at one orbit."""
    for _ in range(200):
        nn = n if n is not None else int(rng.choice([1, 2, 3, 4, 6]))
        p = random_gposet(rng, nn, max_objects)
        seeds = {}
        for x in p.orbit_reps():
            v = random_rep(rng, p.stab_order(x), 3)
            if not v.is_zero:
                seeds[x] = v
        e1 = build_free(p, seeds)
        if max(e1.dim(x) for x in p.objects) > max_dim:
            continue
        if equal:
            e2 = random_isomorphic_copy(rng, build_free(p, seeds))
            return e1, e2, seeds
        reps = p.orbit_reps()
        r = reps[int(rng.integers(len(reps)))]
        labs = irreps(p.stab_order(r))
        lab = labs[int(rng.integers(len(labs)))]
        seeds2 = dict(seeds)
        cur = seeds2.get(r, VirtualRep.zero(p.stab_order(r)))
        if cur[lab] > 0 and rng.random() < 0.5:
            new = cur - VirtualRep(cur.n, {lab: 1})
        else:
            new = cur + VirtualRep(cur.n, {lab: 1})
        seeds2[r] = new
        seeds2 = {k: v for k, v in seeds2.items() if not v.is_zero}
        e2 = build_free(p, seeds2)
        if max(e2.dim(x) for x in p.objects) > max_dim:
            continue
        return e1, random_isomorphic_copy(rng, e2), seeds2
    raise RuntimeError("could not sample a parameterization pair")


# extensions by a new maximum ---------------------------------------------------------

def random_semifree_extension(
    rng: np.random.Generator, n: int | None = None, max_objects: int = 6, top: str = "top"
) -> tuple[SemiFreeParam, SemiFreeParam, str, dict[str, VirtualRep]]:
    """A semi-free parameterization and an extension of it by a new fixed maximum.

    Returns ``(sub, ext, top, seeds)`` where ``sub`` is the restriction of ``ext``
    to the original poset and ``seeds`` are the free summands used to build it.
    """
    nn = n if n is not None else int(rng.choice([1, 2, 3, 4, 6]))
    p = random_gposet(rng, nn, max_objects)
    a_top = max(p.abar.values(), default=-1) + 1
    rel = list(p.gt) + [(top, x) for x in p.objects]
    ext_p = GPoset(list(p.objects) + [top], rel, nn, {**p.perm, top: top}, {**p.abar, top: a_top})
    seeds = {}
    for x in ext_p.orbit_reps():
        v = random_rep(rng, ext_p.stab_order(x), 2)
        if not v.is_zero:
            seeds[x] = v
    f = tuple(int(v) for v in rng.integers(0, 3, size=a_top + 1))
    ext = SemiFreeParam(build_free(ext_p, seeds), f)
    free = ext.free
    sub_free = EParam(
        p,
        {x: free.spaces[x] for x in p.objects},
        {k: free.emb[k] for k in p.pairs()},
        {x: free.act[x] for x in p.objects},
    )
    return SemiFreeParam(sub_free, f[:a_top]), ext, top, seeds
