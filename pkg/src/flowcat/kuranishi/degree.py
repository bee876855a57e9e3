"""Signed zero counts of generic perturbations of PL sections."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..config import MAX_RESEEDS, TRANSVERSALITY_THRESHOLD
from .chart import ChartError, PLChart, face_has_zero

FACE_MARGIN = 1e-9


class DegenerateError(ChartError):
    """Perturbation failed to reach a transverse position."""


class BoundaryZeroError(ChartError):
    """Section vanishes on the boundary, so the count is not well defined."""


@dataclass(frozen=True)
class Zero:
    simplex: int
    bary: tuple[float, ...]
    sign: int
    sv_min: float


def perturbation_scale(c: PLChart) -> float:
    norms = np.linalg.norm(c.section, axis=1) if c.r else np.zeros(0)
    nz = norms[norms > 1e-12]
    return 1e-3 * (float(nz.min()) if nz.size else 1.0)


def perturb(
    c: PLChart,
    rng: np.random.Generator,
    fixed: Mapping[int, np.ndarray] | None = None,
    eps: float | None = None,
) -> np.ndarray:
    eps = perturbation_scale(c) if eps is None else eps
    vals = c.section.copy()
    if c.r:
        vals += rng.uniform(-eps, eps, size=vals.shape)
    for v, val in (fixed or {}).items():
        vals[v] = val
    return vals


def _simplex_system(c: PLChart, values: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
    s = c.simplices[i]
    s0 = values[s[0]]
    m = (values[list(s[1:])] - s0).T if c.d else np.zeros((c.r, 0))
    return m, s0


def count_zeros(c: PLChart, values: np.ndarray) -> list[Zero]:
    """Transverse zeros of the affine interpolation of ``values``; raises DegenerateError otherwise."""
    if c.vdim != 0:
        raise ChartError(f"zero counting needs virtual dimension 0, got {c.vdim}")
    out: list[Zero] = []
    for i, s in enumerate(c.simplices):
        base = c.mults[i] * c.v_sign
        if c.d == 0:
            out.append(Zero(i, (1.0,), base, float("inf")))
            continue
        m, s0 = _simplex_system(c, values, i)
        sv = np.linalg.svd(m, compute_uv=False)
        if sv.min() <= TRANSVERSALITY_THRESHOLD:
            if face_has_zero(values[list(s)]):
                raise DegenerateError(f"non-transverse zero in simplex {s}")
            continue
        lam = np.linalg.solve(m, -s0)
        bary = np.concatenate([[1.0 - lam.sum()], lam])
        if bary.min() < -FACE_MARGIN:
            continue
        if bary.min() <= FACE_MARGIN:
            raise DegenerateError(f"zero on a face of simplex {s}")
        sign = base * (1 if np.linalg.det(m) > 0 else -1)
        out.append(Zero(i, tuple(bary), sign, float(sv.min())))
    return out


def check_boundary(c: PLChart, values: np.ndarray | None = None) -> None:
    vals = c.section if values is None else values
    for f in c.boundary_faces():
        if face_has_zero(vals[list(f)]):
            raise BoundaryZeroError(f"section vanishes on boundary face {f}")


def pt_degree(c: PLChart, seed: int = 0) -> int:
    """Signed count of zeros of a small generic perturbation (virtual dimension 0)."""
    if c.vdim != 0:
        raise ChartError(f"pt_degree needs virtual dimension 0, got {c.vdim}")
    if not c.simplices:
        return 0
    check_boundary(c)
    for attempt in range(MAX_RESEEDS):
        rng = np.random.default_rng([seed, attempt])
        try:
            return sum(z.sign for z in count_zeros(c, perturb(c, rng)))
        except DegenerateError:
            continue
    raise DegenerateError(f"no transverse perturbation after {MAX_RESEEDS} attempts")


# one-dimensional zero sets ---------------------------------------------------------

@dataclass(frozen=True)
class ZeroArcEnd:
    face: tuple[int, ...]
    sign: int
    labels: frozenset


def _arc_ends(c: PLChart, values: np.ndarray) -> list[ZeroArcEnd]:
    """Oriented endpoints of the zero set on the boundary when the virtual dimension is 1."""
    if c.vdim != 1:
        raise ChartError("arc endpoints need virtual dimension 1")
    bfaces = {frozenset(f): f for f in c.boundary_faces()}
    out = []
    for i, s in enumerate(c.simplices):
        m, s0 = _simplex_system(c, values, i)
        d = c.d
        if c.r:
            sv = np.linalg.svd(m, compute_uv=False)
            if sv.min() <= TRANSVERSALITY_THRESHOLD:
                if face_has_zero(values[list(s)]):
                    raise DegenerateError(f"non-transverse zero set in simplex {s}")
                continue
        # zero line: lam = p + t u with u spanning ker m
        if c.r:
            p = np.linalg.lstsq(m, -s0, rcond=None)[0]
            _, _, vt = np.linalg.svd(m)
            u = vt[-1]
            pinv = np.linalg.pinv(m)
            frame = np.column_stack([u, pinv])
        else:
            p = np.zeros(d)
            u = np.ones(1) if d == 1 else None
            if u is None:
                raise ChartError("rank-0 arcs only in dimension 1")
            frame = u.reshape(1, 1)
        orient = c.mults[i] * c.v_sign * (1 if np.linalg.det(frame) > 0 else -1)
        u = orient * u
        # barycentric coords along the line: b0 = 1 - sum(lam), b_j = lam_j
        b_p = np.concatenate([[1.0 - p.sum()], p])
        b_u = np.concatenate([[-u.sum()], u])
        lo, hi = -np.inf, np.inf
        lo_idx = hi_idx = None
        for j in range(d + 1):
            if abs(b_u[j]) < 1e-15:
                if b_p[j] < 0:
                    lo, hi = 1.0, 0.0
                continue
            t = -b_p[j] / b_u[j]
            if b_u[j] > 0:
                if t > lo:
                    lo, lo_idx = t, j
            else:
                if t < hi:
                    hi, hi_idx = t, j
        if not lo < hi - 1e-12:
            if abs(lo - hi) <= 1e-12:
                raise DegenerateError(f"zero set touches a vertex of simplex {s}")
            continue
        for t_end, j, sign in ((lo, lo_idx, -1), (hi, hi_idx, +1)):
            # detect ends meeting lower-dimensional faces
            b = b_p + t_end * b_u
            if np.sum(np.abs(b) <= FACE_MARGIN) > 1:
                raise DegenerateError(f"zero set meets a codimension-2 face of {s}")
            face = tuple(sorted(v for k, v in enumerate(s) if k != j))
            key = frozenset(face)
            if key in bfaces:
                out.append(ZeroArcEnd(face, sign, c.face_labels(face)))
    return out


# compatible families ---------------------------------------------------------------

@dataclass
class FamilyMember:
    """A chart for the pair (x, z) with boundary identifications."""

    chart: PLChart
    boundary: dict[int, list[tuple[str, int, int]]] = field(default_factory=dict)
    splits: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class FamilyResult:
    degrees: dict[tuple[str, str], int]
    face_counts: dict[tuple[str, str], dict[str, int]]
    boundary_counts: dict[tuple[str, str], int]
    values: dict[tuple[str, str], np.ndarray]


def boundary_values(
    pair: tuple[str, str],
    member: FamilyMember,
    values: Mapping[tuple[str, str], np.ndarray],
    tol: float = 1e-9,
) -> dict[int, np.ndarray]:
    x, z = pair
    out: dict[int, np.ndarray] = {}
    for v, entries in member.boundary.items():
        for y, p, q in entries:
            if (x, y) not in values or (y, z) not in values:
                raise ChartError(f"boundary of {pair} refers to a pair without a chart: {(x, y)} or {(y, z)}")
            val = member.splits[y] @ np.concatenate([values[(x, y)][p], values[(y, z)][q]])
            if v in out and np.max(np.abs(out[v] - val)) > tol:
                raise ChartError(f"corner inconsistency at vertex {v} of {pair}")
            out[v] = val
    return out


def compatible_perturbation(
    members: Mapping[tuple[str, str], FamilyMember],
    order: Sequence[tuple[str, str]],
    rng: np.random.Generator,
) -> dict[tuple[str, str], np.ndarray]:
    values: dict[tuple[str, str], np.ndarray] = {}
    for pair in order:
        mem = members[pair]
        fixed = boundary_values(pair, mem, values, tol=np.inf)
        values[pair] = perturb(mem.chart, rng, fixed)
    return values


def family_degrees(
    members: Mapping[tuple[str, str], FamilyMember],
    order: Sequence[tuple[str, str]],
    seed: int = 0,
) -> FamilyResult:
    """Degrees of all virtual-dimension-0 members under one compatible perturbation.

    ``order`` must list pairs so that the pairs a boundary refers to come
    first.  Members of virtual dimension 1 report the signed count of zero
    arc endpoints on each labeled face and in total.
    """
    for pair in order:
        c = members[pair].chart
        for f in c.outer_boundary_faces():
            if c.vdim <= 0 and face_has_zero(c.section[list(f)]):
                raise BoundaryZeroError(f"section of {pair} vanishes on outer boundary face {f}")
    last: Exception | None = None
    for attempt in range(MAX_RESEEDS):
        rng = np.random.default_rng([seed, attempt])
        try:
            values = compatible_perturbation(members, order, rng)
            degrees, faces, totals = {}, {}, {}
            for pair in order:
                c = members[pair].chart
                if c.vdim == 0:
                    degrees[pair] = sum(z.sign for z in count_zeros(c, values[pair])) if c.simplices else 0
                elif c.vdim == 1 and c.simplices:
                    ends = _arc_ends(c, values[pair])
                    per: dict[str, int] = {}
                    bmap = members[pair].boundary
                    for e in ends:
                        if not e.labels:
                            raise BoundaryZeroError(f"zero arc of {pair} reaches the outer boundary")
                        ys = {y for v in e.face for y, _, _ in bmap.get(v, [])}
                        label = ",".join(sorted(ys)) or "?"
                        per[label] = per.get(label, 0) + e.sign
                    faces[pair] = per
                    totals[pair] = sum(e.sign for e in ends)
            return FamilyResult(degrees, faces, totals, values)
        except DegenerateError as exc:
            last = exc
            continue
    raise DegenerateError(f"no transverse compatible perturbation after {MAX_RESEEDS} attempts: {last}")


def sum_model_degree(c: PLChart, other: PLChart, seed: int = 0) -> int:
    """Degree of the disjoint union (T1 ⊔ T2, V, σ1 ⊔ σ2); should equal the sum of degrees."""
    if c.v_labels != other.v_labels or c.v_sign != other.v_sign or c.group_order != other.group_order:
        raise ChartError("sum model needs identical obstruction spaces")
    if c.t_labels != other.t_labels:
        raise ChartError("sum model needs identical coordinate representations")
    off = c.n_vertices
    joined = PLChart(
        c.group_order, c.t_labels, np.vstack([c.coords, other.coords]),
        c.simplices + tuple(tuple(v + off for v in s) for s in other.simplices),
        c.mults + other.mults, c.v_labels, np.vstack([c.section, other.section]),
        c.perm + tuple(v + off for v in other.perm), c.k,
        c.strata + tuple((frozenset(v + off for v in f), l) for f, l in other.strata),
        c.v_sign, c.d,
    )
    return pt_degree(joined, seed)
