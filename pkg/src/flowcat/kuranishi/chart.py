"""Piecewise-linear derived <k>-manifolds with a cyclic group action.

A chart is embedded in a coordinate representation W_T of its group C_s:
vertex coordinates live in W_T (blocks listed in ``t_labels``), the
generator permutes vertices compatibly with the linear action, and the
section takes values in the obstruction model V (blocks ``v_labels``).
Block lists may be in any order; orientation of V is the coordinate order
times ``v_sign``.  Each top simplex is framed by its vertex tuple and a
multiplier in {+1, -1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from ..config import MAX_OBSTRUCTION_RANK, MAX_THICKENING_DIM, TOLERANCE
from ..linalg import labels_matrix
from ..report import Report
from ..repring import ROT, SGN, TRIV, IrrepLabel, VirtualRep


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    seq = list(seq)
    sgn = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sgn = -sgn
    return sgn


def _relative_sign(a: Sequence[int], b: Sequence[int]) -> int:
    """Sign of the permutation carrying tuple a to tuple b (same vertex set)."""
    pos = {v: i for i, v in enumerate(a)}
    return perm_sign([pos[v] for v in b])


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class PLChart:
    group_order: int
    t_labels: tuple[IrrepLabel, ...]
    coords: np.ndarray
    simplices: tuple[tuple[int, ...], ...]
    mults: tuple[int, ...]
    v_labels: tuple[IrrepLabel, ...]
    section: np.ndarray
    perm: tuple[int, ...]
    k: int = 0
    strata: tuple[tuple[frozenset, frozenset], ...] = ()
    v_sign: int = 1
    dim_hint: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float).reshape(len(self.perm), -1)
                           if len(self.perm) else np.zeros((0, sum(l.dim for l in self.t_labels))))
        object.__setattr__(self, "section", np.asarray(self.section, dtype=float).reshape(len(self.perm), -1)
                           if len(self.perm) else np.zeros((0, sum(l.dim for l in self.v_labels))))
        object.__setattr__(self, "simplices", tuple(tuple(int(v) for v in s) for s in self.simplices))
        object.__setattr__(self, "mults", tuple(int(m) for m in self.mults))
        object.__setattr__(self, "perm", tuple(int(v) for v in self.perm))
        object.__setattr__(self, "t_labels", tuple(self.t_labels))
        object.__setattr__(self, "v_labels", tuple(self.v_labels))
        object.__setattr__(
            self, "strata", tuple((frozenset(f), frozenset(l)) for f, l in self.strata)
        )

    # basic invariants
    @property
    def n_vertices(self) -> int:
        return len(self.perm)

    @property
    def d(self) -> int:
        if self.simplices:
            return len(self.simplices[0]) - 1
        return self.dim_hint if self.dim_hint is not None else 0

    @property
    def r(self) -> int:
        return sum(l.dim for l in self.v_labels)

    @property
    def t_dim(self) -> int:
        return sum(l.dim for l in self.t_labels)

    @property
    def vdim(self) -> int:
        return self.d - self.r

    @property
    def v_rep(self) -> VirtualRep:
        return VirtualRep.from_labels(self.v_labels, self.group_order)

    @property
    def t_rep(self) -> VirtualRep:
        return VirtualRep.from_labels(self.t_labels, self.group_order)

    def is_empty(self) -> bool:
        return not self.simplices

    def act_vertex(self, v: int, j: int = 1) -> int:
        for _ in range(j % self.group_order):
            v = self.perm[v]
        return v

    def face_labels(self, face: Iterable[int]) -> frozenset:
        f = frozenset(face)
        out: set[int] = set()
        for big, labs in self.strata:
            if f <= big:
                out |= labs
        return frozenset(out)

    def faces(self, dim: int) -> list[tuple[int, ...]]:
        out = set()
        for s in self.simplices:
            for c in combinations(sorted(s), dim + 1):
                out.add(c)
        return sorted(out)

    def boundary_faces(self) -> list[tuple[int, ...]]:
        """Codimension-one faces lying in a single top simplex, plus labeled faces."""
        if self.d == 0:
            return []
        count: dict[tuple[int, ...], int] = {}
        for s in self.simplices:
            for c in combinations(sorted(s), self.d):
                count[c] = count.get(c, 0) + 1
        out = {c for c, m in count.items() if m == 1}
        out |= {c for c in count if self.face_labels(c)}
        return sorted(out)

    def labeled_boundary_faces(self) -> list[tuple[int, ...]]:
        return [f for f in self.boundary_faces() if self.face_labels(f)]

    def outer_boundary_faces(self) -> list[tuple[int, ...]]:
        return [f for f in self.boundary_faces() if not self.face_labels(f)]

    def orientation_twist(self) -> int | None:
        """Global sign by which the generator acts on the framing, or None if inconsistent."""
        if not self.simplices:
            return 1
        index = {frozenset(s): i for i, s in enumerate(self.simplices)}
        twist = None
        for i, s in enumerate(self.simplices):
            img = tuple(self.perm[v] for v in s)
            j = index.get(frozenset(img))
            if j is None:
                return None
            t = self.mults[i] * self.mults[j] * _relative_sign(self.simplices[j], img)
            if self.d == 0:
                t = self.mults[i] * self.mults[j]
            if twist is None:
                twist = t
            elif twist != t:
                return None
        return twist

    def with_section(self, values: np.ndarray) -> "PLChart":
        return PLChart(
            self.group_order, self.t_labels, self.coords, self.simplices, self.mults, self.v_labels,
            values, self.perm, self.k, self.strata, self.v_sign, self.dim_hint,
        )

    def with_strata(self, k: int, strata: Iterable[tuple[frozenset, frozenset]]) -> "PLChart":
        return PLChart(
            self.group_order, self.t_labels, self.coords, self.simplices, self.mults, self.v_labels,
            self.section, self.perm, k, tuple(strata), self.v_sign, self.dim_hint,
        )

    # serialization
    def to_json(self) -> dict:
        return {
            "group_order": self.group_order,
            "t_blocks": [l.name for l in self.t_labels],
            "coords": [[float(c) for c in row] for row in self.coords],
            "simplices": [list(s) for s in self.simplices],
            "orientation": list(self.mults),
            "v_blocks": [l.name for l in self.v_labels],
            "v_sign": self.v_sign,
            "section": [[float(c) for c in row] for row in self.section],
            "action": list(self.perm),
            "k": self.k,
            "strata": [{"face": sorted(f), "labels": sorted(l)} for f, l in self.strata],
            "dim": self.d,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PLChart":
        n = int(data["group_order"])
        return cls(
            n,
            tuple(IrrepLabel.parse(s, n) for s in data.get("t_blocks", [])),
            np.array(data.get("coords", []), dtype=float),
            tuple(tuple(s) for s in data.get("simplices", [])),
            tuple(data.get("orientation", [1] * len(data.get("simplices", [])))),
            tuple(IrrepLabel.parse(s, n) for s in data.get("v_blocks", [])),
            np.array(data.get("section", []), dtype=float),
            tuple(data.get("action", [])),
            int(data.get("k", 0)),
            tuple((frozenset(s["face"]), frozenset(s["labels"])) for s in data.get("strata", [])),
            int(data.get("v_sign", 1)),
            int(data["dim"]) if data.get("dim") is not None else None,
        )


def face_has_zero(values: np.ndarray, tol: float = 1e-12) -> bool:
    """Whether 0 lies in the convex hull of the given section values."""
    m = values.shape[0]
    if values.shape[1] == 0:
        return True
    a_eq = np.vstack([values.T, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(values.shape[1]), [1.0]])
    res = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs")
    if res.status != 0:
        return False
    resid = a_eq @ res.x - b_eq
    return bool(np.max(np.abs(resid)) <= 1e-9)


def _components(items: list[tuple[int, ...]], link_dim: int) -> list[list[tuple[int, ...]]]:
    """Connected components of simplices glued along shared faces of size link_dim+1."""
    parent = list(range(len(items)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[frozenset, int] = {}
    for i, s in enumerate(items):
        for c in combinations(sorted(s), max(link_dim + 1, 1)):
            key = frozenset(c)
            if key in owner:
                parent[find(i)] = find(owner[key])
            else:
                owner[key] = i
    groups: dict[int, list[tuple[int, ...]]] = {}
    for i, s in enumerate(items):
        groups.setdefault(find(i), []).append(s)
    return list(groups.values())


def validate_chart(c: PLChart, tol: float = TOLERANCE, require_zeros: bool = True) -> Report:
    rep = Report()
    n = c.group_order
    if c.d > MAX_THICKENING_DIM:
        rep.add("cap", f"thickening dimension {c.d} exceeds {MAX_THICKENING_DIM}")
    if c.r > MAX_OBSTRUCTION_RANK:
        rep.add("cap", f"obstruction rank {c.r} exceeds {MAX_OBSTRUCTION_RANK}")
    nv = c.n_vertices
    if sorted(c.perm) != list(range(nv)):
        rep.add("action", "vertex action is not a permutation")
        return rep
    if any(c.act_vertex(v, n) != v for v in range(nv)):
        rep.add("action", f"vertex action has order not dividing {n}")
    if c.coords.shape != (nv, c.t_dim) or c.section.shape != (nv, c.r):
        rep.add("shape", "coordinate or section table has the wrong shape")
        return rep
    if len(c.mults) != len(c.simplices) or any(m not in (1, -1) for m in c.mults):
        rep.add("orientation", "each top simplex needs an orientation multiplier of +1 or -1")
    if any(len(s) != c.d + 1 or len(set(s)) != len(s) for s in c.simplices):
        rep.add("simplices", "top simplices must all have dimension d with distinct vertices")
        return rep
    at = labels_matrix(list(c.t_labels))
    av = labels_matrix(list(c.v_labels))
    for v in range(nv):
        if c.t_dim and np.max(np.abs(c.coords[c.perm[v]] - at @ c.coords[v])) > 1e-7:
            rep.add("equivariance", f"vertex coordinates not equivariant at vertex {v}", v)
            break
    for v in range(nv):
        if c.r and np.max(np.abs(c.section[c.perm[v]] - av @ c.section[v])) > 1e-7:
            rep.add("equivariance", f"section not equivariant at vertex {v}", v)
            break
    simplex_sets = {frozenset(s) for s in c.simplices}
    for s in c.simplices:
        if frozenset(c.perm[v] for v in s) not in simplex_sets:
            rep.add("action", f"generator does not map simplex {s} to a simplex", s)
            break
        if c.d and c.t_dim:
            edges = c.coords[list(s[1:])] - c.coords[s[0]]
            if np.linalg.matrix_rank(edges, tol=1e-9) < c.d:
                rep.add("degenerate", f"top simplex {s} is degenerate in coordinates", s)
    if c.orientation_twist() is None:
        rep.add("orientation", "generator does not act on the framing by a global sign")
    _check_coherence(c, rep)
    for face, labs in c.strata:
        if any(l < 0 or l >= c.k for l in labs):
            rep.add("strata", f"labels {sorted(labs)} outside [k] with k={c.k}", tuple(sorted(face)))
        if len(face) - 1 > c.d - len(labs):
            rep.add("strata", f"face {sorted(face)} of codimension < {len(labs)} carries labels", tuple(sorted(face)))
        img = frozenset(c.perm[v] for v in face)
        if c.face_labels(img) != c.face_labels(face):
            rep.add("strata", f"labels of face {sorted(face)} are not invariant", tuple(sorted(face)))
    if require_zeros and c.simplices:
        for comp in _components(list(c.simplices), c.d - 1):
            if not any(face_has_zero(c.section[list(s)]) for s in comp):
                rep.add("zero-free-stratum", f"component containing {comp[0]} has no zero", comp[0])
        for j in range(c.k):
            faces = [tuple(sorted(f)) for f, l in c.strata if j in l]
            if not faces:
                continue
            for comp in _components(faces, min(len(f) for f in faces) - 2):
                if not any(face_has_zero(c.section[list(f)]) for f in comp):
                    rep.add("zero-free-stratum", f"boundary stratum {j} component has no zero", j)
    return rep


def _check_coherence(c: PLChart, rep: Report) -> None:
    """Each codimension-one face lies in at most two simplices, with opposite induced orientations."""
    if c.d == 0:
        return
    induced: dict[tuple[int, ...], list[int]] = {}
    for s, m in zip(c.simplices, c.mults):
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            key = tuple(sorted(face))
            induced.setdefault(key, []).append(m * (-1) ** i * perm_sign(face))
    for face, signs in induced.items():
        if len(signs) > 2:
            rep.add("simplices", f"face {list(face)} lies in more than two simplices", face)
            return
        if len(signs) == 2 and signs[0] == signs[1]:
            rep.add("orientation", f"simplices meeting along {list(face)} are not coherently oriented", face)
            return


# construction helpers --------------------------------------------------------------

def interval_chart(
    values: Sequence[float] | None = None,
    func=None,
    a: float = -2.0,
    b: float = 2.0,
    n_cells: int = 8,
) -> PLChart:
    """([a, b], R, sampled section) with trivial group and the standard orientation."""
    xs = np.linspace(a, b, n_cells + 1)
    vals = np.array(values, dtype=float) if values is not None else np.array([func(x) for x in xs])
    return PLChart(
        1,
        (IrrepLabel(TRIV, 1),),
        xs.reshape(-1, 1),
        tuple((i, i + 1) for i in range(n_cells)),
        (1,) * n_cells,
        (IrrepLabel(TRIV, 1),),
        vals.reshape(-1, 1),
        tuple(range(n_cells + 1)),
    )


def point_chart(n: int = 1, v_labels: Sequence[IrrepLabel] = (), value: Sequence[float] | None = None,
                mult: int = 1) -> PLChart:
    r = sum(l.dim for l in v_labels)
    val = np.zeros((1, r)) if value is None else np.asarray(value, dtype=float).reshape(1, r)
    return PLChart(n, (), np.zeros((1, 0)), ((0,),), (mult,), tuple(v_labels), val, (0,))


# barycentric subdivision ---------------------------------------------------------

def _all_faces(simplices: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    out = set()
    for s in simplices:
        for k in range(1, len(s) + 1):
            for c in combinations(sorted(s), k):
                out.add(c)
    return sorted(out, key=lambda f: (len(f), f))


def _frame_sign(parent: Sequence[int], chain_bary: list[np.ndarray]) -> int:
    """Orientation of a sub-simplex (given in barycentric coords of parent) relative to the parent framing."""
    d = len(parent) - 1
    if d == 0:
        return 1
    pts = np.array(chain_bary)
    edges = pts[1:] - pts[0]
    # affine coordinates drop the weight of parent[0]
    m = edges[:, 1:]
    det = np.linalg.det(m)
    if abs(det) < 1e-14:
        raise ChartError("degenerate sub-simplex in subdivision")
    return 1 if det > 0 else -1


def subdivide(c: PLChart) -> PLChart:
    """Barycentric subdivision with the induced (affine) section."""
    faces = _all_faces(c.simplices)
    index = {f: i for i, f in enumerate(faces)}
    coords = np.array([c.coords[list(f)].mean(axis=0) for f in faces]) if faces else np.zeros((0, c.t_dim))
    section = np.array([c.section[list(f)].mean(axis=0) for f in faces]) if faces else np.zeros((0, c.r))
    perm = tuple(index[tuple(sorted(c.perm[v] for v in f))] for f in faces)
    simplices, mults = [], []
    for s, m in zip(c.simplices, c.mults):
        for order in permutations(s):
            chain = [tuple(sorted(order[: i + 1])) for i in range(len(order))]
            pos = {v: i for i, v in enumerate(s)}
            bary = []
            for f in chain:
                w = np.zeros(len(s))
                for v in f:
                    w[pos[v]] = 1.0 / len(f)
                bary.append(w)
            simplices.append(tuple(index[f] for f in chain))
            mults.append(m * _frame_sign(s, bary))
    strata = []
    for big, labs in c.strata:
        sub = [f for f in faces if set(f) <= big]
        strata.append((frozenset(index[f] for f in sub), labs))
    return PLChart(
        c.group_order, c.t_labels, coords, tuple(simplices), tuple(mults), c.v_labels, section, perm,
        c.k, tuple(strata), c.v_sign, c.d,
    )


def _setwise_not_pointwise(c: PLChart, hperm: Sequence[int]) -> bool:
    for f in _all_faces(c.simplices):
        img = tuple(sorted(hperm[v] for v in f))
        if img == f and any(hperm[v] != v for v in f):
            return True
    return False


# stabilization --------------------------------------------------------------------

def _box_factor(lab: IrrepLabel) -> tuple[np.ndarray, list[tuple[int, ...]], list[int], list[int]]:
    """PL model of the unit ball of an irrep: coords, framed simplices, multipliers, generator."""
    if lab.kind in (TRIV, SGN):
        coords = np.array([[0.0], [-1.0], [1.0]])
        simplices = [(0, 1), (0, 2)]
        mults = [-1, 1]  # framing (center -> end) points outward; orient along +t
        gen = [0, 1, 2] if lab.kind == TRIV else [0, 2, 1]
        return coords, simplices, mults, gen
    n = lab.n
    ang = 2 * np.pi * np.arange(n) / n
    coords = np.vstack([[0.0, 0.0], np.column_stack([np.cos(ang), np.sin(ang)])])
    simplices = [(0, 1 + j, 1 + (j + 1) % n) for j in range(n)]
    mults = [1] * n
    gen = [0] + [1 + (j + lab.k) % n for j in range(n)]
    return coords, simplices, mults, gen


def _staircase(order_a: Sequence[int], order_b: Sequence[int]) -> list[list[tuple[int, int]]]:
    """Staircase triangulation of Δ^p × Δ^q on ordered vertex lists."""
    p, q = len(order_a) - 1, len(order_b) - 1
    out = []

    def walk(i: int, j: int, path: list[tuple[int, int]]) -> None:
        if i == p and j == q:
            out.append(list(path))
            return
        if i < p:
            walk(i + 1, j, path + [(order_a[i + 1], order_b[j])])
        if j < q:
            walk(i, j + 1, path + [(order_a[i], order_b[j + 1])])

    walk(0, 0, [(order_a[0], order_b[0])])
    return out


def _product(c: PLChart, lab: IrrepLabel) -> PLChart:
    bc, bs, bm, bg = _box_factor(lab)
    if c.d + len(bs[0]) - 1 > MAX_THICKENING_DIM:
        raise ChartError("stabilization exceeds the thickening dimension cap")
    if c.r + lab.dim > MAX_OBSTRUCTION_RANK:
        raise ChartError("stabilization exceeds the obstruction rank cap")
    if lab.n != c.group_order:
        raise ChartError("stabilizing representation is over a different group")
    # the staircase needs an order preserved by the action on every simplex
    if any(
        [c.perm[v] for v in sorted(s)] != sorted(c.perm[v] for v in s) for s in c.simplices
    ):
        c = subdivide(c)
    nb = len(bc)
    key = lambda v, w: v * nb + w  # noqa: E731
    verts = sorted({key(v, w) for s in c.simplices for v in s for w in range(nb)} |
                   {key(v, w) for v in range(c.n_vertices) for w in range(nb)})
    index = {kk: i for i, kk in enumerate(verts)}
    coords = np.array([np.concatenate([c.coords[kk // nb], bc[kk % nb]]) for kk in verts])
    section = np.array([np.concatenate([c.section[kk // nb], bc[kk % nb]]) for kk in verts])
    perm = tuple(index[key(c.perm[kk // nb], bg[kk % nb])] for kk in verts)
    simplices, mults = [], []
    for s, m in zip(c.simplices, c.mults):
        sa = sorted(s)
        pos_s = {v: i for i, v in enumerate(s)}
        for b_s, b_m in zip(bs, bm):
            sb = sorted(b_s)
            pos_b = {w: i for i, w in enumerate(b_s)}
            for path in _staircase(sa, sb):
                # affine coordinates relative to the framings of s and b_s
                pts = []
                for v, w in path:
                    a = np.zeros(len(s) - 1)
                    if pos_s[v] > 0:
                        a[pos_s[v] - 1] = 1.0
                    b = np.zeros(len(b_s) - 1)
                    if pos_b[w] > 0:
                        b[pos_b[w] - 1] = 1.0
                    pts.append(np.concatenate([a, b]))
                pts = np.array(pts)
                det = np.linalg.det(pts[1:] - pts[0]) if len(pts) > 1 else 1.0
                simplices.append(tuple(index[key(v, w)] for v, w in path))
                mults.append(m * b_m * (1 if det > 0 else -1))
    strata = []
    for big, labs in c.strata:
        for b_s in bs:
            for path in _staircase(sorted(big), sorted(b_s)):
                strata.append((frozenset(index[key(v, w)] for v, w in path), labs))
    return PLChart(
        c.group_order, c.t_labels + (lab,), coords, tuple(simplices), tuple(mults), c.v_labels + (lab,),
        section, perm, c.k, tuple(strata), c.v_sign, c.d + len(bs[0]) - 1,
    )


def stabilize_chart(c: PLChart, w: VirtualRep) -> PLChart:
    """(T × W-ball, V ⊕ W, (σ, id_W)); orientations T∧W and V∧W."""
    if w.n != c.group_order:
        raise ChartError("stabilizing representation is over a different group")
    if not w.is_actual:
        raise ChartError("stabilizing representation must be actual")
    out = c
    for lab in w.labels():
        out = _product(out, lab)
    return out


# fixed points ---------------------------------------------------------------------

def _fixed_coordinate_split(labels: Sequence[IrrepLabel], m: int) -> tuple[list[int], list[int], list[IrrepLabel]]:
    """Indices of H-fixed and non-fixed coordinates, and the quotient labels of fixed blocks."""
    fixed, normal, qlabels = [], [], []
    i = 0
    for lab in labels:
        idx = list(range(i, i + lab.dim))
        if all(j % m == 0 for j in lab.characters()):
            fixed.extend(idx)
            q = lab.n // m
            if lab.kind == TRIV:
                qlabels.append(IrrepLabel(TRIV, q))
            elif lab.kind == SGN:
                qlabels.append(IrrepLabel(SGN, q))
            else:
                qlabels.append(IrrepLabel(ROT, q, lab.k // m))
        else:
            normal.extend(idx)
        i += lab.dim
    return fixed, normal, qlabels


def fixed_chart(c: PLChart, m: int) -> PLChart:
    """(T^H, V^H, projected section) for H = C_m, as a C_{s/m}-chart."""
    return fixed_chart_map(c, m)[0]


def fixed_chart_map(c: PLChart, m: int) -> tuple[PLChart, dict[int, int]]:
    """Fixed chart together with the map from surviving original vertices to new indices."""
    s = c.group_order
    if m < 1 or s % m:
        raise ChartError(f"{m} does not divide {s}")
    if m == 1:
        return c, {v: v for v in range(c.n_vertices)}
    step = s // m
    hperm = [c.act_vertex(v, step) for v in range(c.n_vertices)]
    origin = {v: v for v in range(c.n_vertices)}
    if _setwise_not_pointwise(c, hperm):
        faces = _all_faces(c.simplices)
        origin = {i: f[0] for i, f in enumerate(faces) if len(f) == 1}
        c = subdivide(c)
        hperm = [c.act_vertex(v, step) for v in range(c.n_vertices)]
    fixed_v = [v for v in range(c.n_vertices) if hperm[v] == v]
    fset = set(fixed_v)
    tf, tn, tq = _fixed_coordinate_split(c.t_labels, m)
    vf, vn, vq = _fixed_coordinate_split(c.v_labels, m)
    v_sign = c.v_sign * perm_sign(vf + vn)
    # maximal fixed faces
    fixed_faces = [f for f in _all_faces(c.simplices) if set(f) <= fset]
    maximal = [f for f in fixed_faces if not any(set(f) < set(g) for g in fixed_faces)]
    new_index = {v: i for i, v in enumerate(fixed_v)}
    if not maximal:
        return PLChart(s // m, tuple(tq), np.zeros((0, len(tf))), (), (), tuple(vq), np.zeros((0, len(vf))),
                       (), c.k, (), v_sign, max(c.d - 1, 0)), {}
    dims = {len(f) - 1 for f in maximal}
    if len(dims) != 1:
        raise ChartError("fixed locus is not pure-dimensional")
    e = dims.pop()
    simplices, mults = [], []
    for tau in maximal:
        # containing top simplex, smallest by vertex tuple for determinism
        sigma_i = min(
            (i for i, sg in enumerate(c.simplices) if set(tau) <= set(sg)), key=lambda i: tuple(sorted(c.simplices[i]))
        )
        sigma = c.simplices[sigma_i]
        rest = [v for v in sigma if v not in tau]
        reordered = list(tau) + rest
        s1 = _relative_sign(sigma, reordered) if c.d else 1
        mult = c.mults[sigma_i] * s1
        if rest:
            base = c.coords[reordered[0]]
            normal_rows = c.coords[rest] - base
            cols = _first_nonsingular(normal_rows, tn)
            if cols is None:
                raise ChartError("cannot orient the normal directions of the fixed locus")
            det = np.linalg.det(normal_rows[:, cols])
            mult *= 1 if det > 0 else -1
        simplices.append(tuple(new_index[v] for v in tau))
        mults.append(mult)
    coords = c.coords[fixed_v][:, tf] if fixed_v else np.zeros((0, len(tf)))
    section = c.section[fixed_v][:, vf] if fixed_v else np.zeros((0, len(vf)))
    perm = tuple(new_index[c.perm[v]] for v in fixed_v)
    strata = []
    for big, labs in c.strata:
        inter = big & fset
        if inter:
            strata.append((frozenset(new_index[v] for v in inter), labs))
    fixed = PLChart(s // m, tuple(tq), coords, tuple(simplices), tuple(mults), tuple(vq), section, perm,
                    c.k, tuple(strata), v_sign, e)
    return fixed, {origin[v]: new_index[v] for v in fixed_v if v in origin}


def prune_zero_free(c: PLChart) -> tuple[PLChart, dict[int, int]]:
    """Drop connected components of T on which the section has no zero.

    Zeros are equivariant, so the surviving set is invariant. Returns the chart
    and the map from kept vertex indices to new ones.
    """
    if not c.simplices:
        return c, {v: v for v in range(c.n_vertices)}
    kept = []
    for comp in _components(list(c.simplices), c.d - 1):
        if any(face_has_zero(c.section[list(s)]) for s in comp):
            kept.extend(comp)
    if len(kept) == len(c.simplices):
        return c, {v: v for v in range(c.n_vertices)}
    keep_set = set(kept)
    order = [i for i, s in enumerate(c.simplices) if s in keep_set]
    verts = sorted({v for i in order for v in c.simplices[i]})
    idx = {v: i for i, v in enumerate(verts)}
    strata = tuple((frozenset(idx[v] for v in face), labs) for face, labs in c.strata if face <= set(verts))
    out = PLChart(
        c.group_order, c.t_labels, c.coords[verts] if verts else np.zeros((0, c.coords.shape[1])),
        tuple(tuple(idx[v] for v in c.simplices[i]) for i in order), tuple(c.mults[i] for i in order),
        c.v_labels, c.section[verts] if verts else np.zeros((0, c.section.shape[1])),
        tuple(idx[c.perm[v]] for v in verts), c.k, strata, c.v_sign, c.d,
    )
    return out, idx


def _first_nonsingular(rows: np.ndarray, candidates: Sequence[int]) -> list[int] | None:
    k = rows.shape[0]
    for cols in combinations(candidates, k):
        if abs(np.linalg.det(rows[:, list(cols)])) > 1e-12:
            return list(cols)
    return None
