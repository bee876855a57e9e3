"""Free parameterizations: decomposition, classification, existence and shift spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Mapping

import numpy as np

from ..config import TOLERANCE
from ..gposet import GPoset
from ..linalg import canonicalize, orthogonal_complement, orthonormal_columns, rep_matrix
from ..repring import VirtualRep, induce, restrict
from .eparam import EParam, ParamError, SemiFreeParam, _sum_permutation, build_free


class NotFreeError(ParamError):
    """Raised when an operation needs a free (or semi-free) parameterization."""


@dataclass
class FreeDecomposition:
    free: bool
    stars: dict[str, np.ndarray]
    star_reps: dict[str, VirtualRep]
    witness: str | None = None
    error: float = 0.0


def free_decomposition(e: EParam, tol: float = TOLERANCE) -> FreeDecomposition:
    """V*(y): complement in V(y) of the span of the images of V(z), z < y."""
    p = e.poset
    stars: dict[str, np.ndarray] = {}
    star_reps: dict[str, VirtualRep] = {}
    for y in p.objects:
        lower = [e.emb[(y, z)] for z in p.below(y)]
        span = orthonormal_columns(np.hstack(lower)) if lower else np.zeros((e.dim(y), 0))
        b = orthogonal_complement(span, e.dim(y))
        stars[y] = b
        if b.shape[1]:
            star_reps[y], qb = canonicalize(b.T @ e.stab_matrix(y) @ b, p.stab_order(y))
            stars[y] = b @ qb
        else:
            star_reps[y] = VirtualRep(p.stab_order(y))
    worst, witness = 0.0, None
    for x in p.objects:
        cols = [e.embedding(x, y) @ stars[y] for y in [x] + p.below(x)]
        m = np.hstack(cols) if cols else np.zeros((e.dim(x), 0))
        if m.shape[1] != e.dim(x):
            return FreeDecomposition(False, stars, star_reps, x, float("inf"))
        if m.size:
            err = float(np.max(np.abs(m.T @ m - np.eye(m.shape[1]))))
            if err > worst:
                worst = err
            if err > tol and witness is None:
                witness = x
    return FreeDecomposition(witness is None, stars, star_reps, witness, worst)


def is_free(e: EParam) -> FreeDecomposition:
    return free_decomposition(e)


def star_classes(poset: GPoset, spaces: Mapping[str, VirtualRep]) -> dict[str, VirtualRep]:
    """Inductive virtual classes V*(x) = V(x) - sum over lower Stab_x-orbits."""
    out: dict[str, VirtualRep] = {}
    for x in poset.topo_order:
        sx = poset.stab_order(x)
        o = len(poset.orbit(x))
        acc = spaces[x]
        seen: set[str] = set()
        for y in poset.below(x):
            if y in seen:
                continue
            sub_orbit = {poset.act(y, o * t) for t in range(sx)}
            seen |= sub_orbit
            term = induce(restrict(out[y], gcd(sx, poset.stab_order(y))), sx)
            acc = acc - term
        out[x] = acc
    return out


def exists_Eparam(
    poset: GPoset, spaces: Mapping[str, VirtualRep], act: Mapping[str, np.ndarray]
) -> tuple[bool, EParam | None, dict[str, VirtualRep]]:
    """Decide whether the objectwise data extends to a (free) E-parameterization."""
    stars = star_classes(poset, spaces)
    if not all(v.is_actual for v in stars.values()):
        return False, None, stars
    base = build_free(poset, {r: stars[r] for r in poset.orbit_reps()})
    for x in poset.objects:
        if base.spaces[x] != spaces[x]:
            raise ArithmeticError(f"free model at {x} does not realize the requested class")
    # transport the free model onto the given action maps orbit by orbit
    phi: dict[str, np.ndarray] = {}
    for r in poset.orbit_reps():
        orbit = poset.orbit(r)
        phi[r] = np.eye(spaces[r].dim)
        for j in range(1, len(orbit)):
            prev = orbit[j - 1]
            phi[orbit[j]] = act[prev] @ phi[prev] @ base.act[prev].T
    emb = {(x, y): phi[x] @ base.emb[(x, y)] @ phi[y].T for x, y in poset.pairs()}
    e = EParam(poset, dict(spaces), emb, {x: np.asarray(act[x], dtype=float) for x in poset.objects})
    return True, e, stars


@dataclass
class IsoResult:
    maps: dict[str, np.ndarray]
    error: float


def iso_from_invariants(e1: EParam, e2: EParam, tol: float = TOLERANCE) -> IsoResult:
    """Natural isometric isomorphism between free parameterizations with equal invariants."""
    p = e1.poset
    if p != e2.poset:
        raise ParamError("parameterizations live on different posets")
    for r in p.orbit_reps():
        if e1.spaces[r] != e2.spaces[r]:
            raise ParamError(
                f"numerical invariants differ at orbit of {r}: {e1.spaces[r]} vs {e2.spaces[r]}", r
            )
    d1, d2 = free_decomposition(e1, tol), free_decomposition(e2, tol)
    if not d1.free:
        raise NotFreeError(f"first parameterization is not free (witness {d1.witness})", d1.witness)
    if not d2.free:
        raise NotFreeError(f"second parameterization is not free (witness {d2.witness})", d2.witness)
    gamma: dict[str, np.ndarray] = {}
    for r in p.orbit_reps():
        if d1.star_reps[r] != d2.star_reps[r]:
            raise ArithmeticError(f"free summands at {r} differ although invariants agree")
        base = d2.stars[r] @ d1.stars[r].T
        orbit = p.orbit(r)
        gamma[r] = base
        for j in range(1, len(orbit)):
            gamma[orbit[j]] = e2.action_power(r, j) @ base @ e1.action_power(r, j).T
    maps = {}
    for x in p.objects:
        m = np.zeros((e2.dim(x), e1.dim(x)))
        for z in [x] + p.below(x):
            m += e2.embedding(x, z) @ gamma[z] @ e1.embedding(x, z).T
        maps[x] = m
    return IsoResult(maps, iso_error(e1, e2, maps))


def iso_error(e1: EParam, e2: EParam, maps: Mapping[str, np.ndarray]) -> float:
    """Largest defect of isometry, naturality and equivariance of a family."""
    p = e1.poset
    worst = 0.0

    def upd(a: np.ndarray) -> None:
        nonlocal worst
        if a.size:
            worst = max(worst, float(np.max(np.abs(a))))

    for x in p.objects:
        m = maps[x]
        upd(m.T @ m - np.eye(e1.dim(x)))
        upd(m @ m.T - np.eye(e2.dim(x)))
        gx = p.perm[x]
        upd(maps[gx] @ e1.act[x] - e2.act[x] @ m)
    for x, y in p.pairs():
        upd(maps[x] @ e1.emb[(x, y)] - e2.emb[(x, y)] @ maps[y])
    return worst


@dataclass
class ShiftSpace:
    """Shift space of a (semi-)free parameterization with its inclusions."""

    rep: VirtualRep
    inclusions: dict[str, np.ndarray]
    complements: dict[str, np.ndarray] = field(default_factory=dict)


def _free_shift(e: EParam, dec) -> ShiftSpace:
    p = e.poset
    objs = list(p.objects)
    offs, acc = {}, 0
    for x in objs:
        offs[x] = acc
        acc += dec.stars[x].shape[1]
    raw = np.zeros((acc, acc))
    for x in objs:
        gx = p.perm[x]
        k = dec.stars[x].shape[1]
        if k:
            block = dec.stars[gx].T @ e.act[x] @ dec.stars[x]
            raw[offs[gx] : offs[gx] + k, offs[x] : offs[x] + k] = block
    rep, q = canonicalize(raw, p.n) if acc else (VirtualRep(p.n), np.zeros((0, 0)))
    inclusions = {}
    for x in objs:
        m = np.zeros((acc, e.dim(x)))
        for z in [x] + p.below(x):
            k = dec.stars[z].shape[1]
            if k:
                m[offs[z] : offs[z] + k, :] = (e.embedding(x, z) @ dec.stars[z]).T
        inclusions[x] = q.T @ m if acc else np.zeros((0, e.dim(x)))
    return ShiftSpace(rep, inclusions)


def shift_space(e: EParam | SemiFreeParam, tol: float = TOLERANCE) -> ShiftSpace:
    """Shift space: free part plus a trivial summand R^{sum f} for the canonical part."""
    if isinstance(e, SemiFreeParam):
        free_part = e.free
        f = e.f
    else:
        free_part = e
        f = ()
    dec = free_decomposition(free_part, tol)
    if not dec.free:
        raise NotFreeError(
            f"shift space refused: parameterization is not semi-free (witness {dec.witness})", dec.witness
        )
    fs = _free_shift(free_part, dec)
    p = free_part.poset
    if not isinstance(e, SemiFreeParam):
        out = fs
    else:
        total_f = sum(f)
        triv = VirtualRep.of(p.n, triv=total_f)
        rep, ja, jb = _sum_permutation(fs.rep, triv)
        inclusions = {}
        for x in p.objects:
            cdim = e.canonical.dim(x)
            cinc = np.zeros((total_f, cdim))
            if cdim:
                cinc[total_f - cdim :, :] = np.eye(cdim)
            inclusions[x] = ja @ fs.inclusions[x] @ e.j_free[x].T + jb @ cinc @ e.j_canonical[x].T
        out = ShiftSpace(rep, inclusions)
    for x, m in out.inclusions.items():
        out.complements[x] = orthogonal_complement(m, out.rep.dim) if m.shape[1] else np.eye(out.rep.dim)
    return out


def check_shift_equivariance(e: EParam | SemiFreeParam, s: ShiftSpace) -> float:
    """Largest defect of g-equivariance and isometry of the shift inclusions."""
    total = e.total if isinstance(e, SemiFreeParam) else e
    p = total.poset
    big = rep_matrix(s.rep)
    worst = 0.0
    for x in p.objects:
        m = s.inclusions[x]
        if m.size:
            worst = max(worst, float(np.max(np.abs(m.T @ m - np.eye(m.shape[1])))))
            worst = max(worst, float(np.max(np.abs(s.inclusions[p.perm[x]] @ total.act[x] - big @ m))))
    for x, y in p.pairs():
        a = s.inclusions[x] @ total.emb[(x, y)] - s.inclusions[y]
        if a.size:
            worst = max(worst, float(np.max(np.abs(a))))
    return worst


def comparison_map(e: EParam | SemiFreeParam, s: ShiftSpace, targets: Mapping[str, np.ndarray]) -> np.ndarray:
    """Map from the shift space to an extension value W with prescribed embeddings V(x) -> W.

    The shift space is cut into orthogonal pieces, each inside the image of one
    V(x); on that piece the map is the given embedding of V(x).
    """
    p = e.poset
    dim_s = s.rep.dim
    rows = {v.shape[0] for v in targets.values()}
    if len(rows) > 1:
        raise ParamError("extension embeddings have different targets")
    dim_w = rows.pop() if rows else 0
    phi = np.zeros((dim_w, dim_s))
    covered = np.zeros((dim_s, 0))
    for x in p.topo_order:
        inc = s.inclusions[x]
        if not inc.size:
            continue
        rest = inc - covered @ (covered.T @ inc)
        piece = orthonormal_columns(rest)
        if not piece.shape[1]:
            continue
        phi += targets[x] @ inc.T @ piece @ piece.T
        covered = np.hstack([covered, piece])
    if covered.shape[1] != dim_s:
        raise ParamError("shift space is not spanned by the images of the inclusions")
    return phi
