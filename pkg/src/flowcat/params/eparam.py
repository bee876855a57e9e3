"""Objectwise parameterizations (E-parameterizations) of a G-poset.

Each V(x) is the canonical model of an actual representation of the
stabilizer Stab_x = <g^{o_x}> (o_x the orbit length).  Structure maps are
real matrices in those canonical coordinates:

* ``emb[(x, y)]``: the isometric embedding V(y) -> V(x) for x > y
* ``act[x]``: the generator's map V(x) -> V(gx)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ..config import TOLERANCE
from ..gposet import GPoset
from ..linalg import canonicalize, fixed_basis, rep_matrix, restriction_basis
from ..report import Report
from ..repring import TRIV, IrrepLabel, VirtualRep, irreps


class ParamError(ValueError):
    """Invalid parameterization input; ``witness`` names the offending object when known."""

    def __init__(self, message: str, witness: str | None = None):
        super().__init__(message)
        self.witness = witness


def _sum_permutation(a: VirtualRep, b: VirtualRep) -> tuple[VirtualRep, np.ndarray, np.ndarray]:
    """Canonical model of a + b with the coordinate inclusions of a and b."""
    total = a + b
    da, db = a.dim, b.dim
    ja = np.zeros((total.dim, da))
    jb = np.zeros((total.dim, db))
    row = 0
    offs_a = _block_offsets(a)
    offs_b = _block_offsets(b)
    for lab in irreps(total.n):
        for src, off, j in ((a, offs_a, ja), (b, offs_b, jb)):
            cnt = src[lab] * lab.dim
            if cnt:
                start = off[lab]
                j[row : row + cnt, start : start + cnt] = np.eye(cnt)
                row += cnt
    return total, ja, jb


def _block_offsets(v: VirtualRep) -> dict[IrrepLabel, int]:
    out = {}
    i = 0
    for lab in irreps(v.n):
        out[lab] = i
        i += v[lab] * lab.dim
    return out


class EParam:
    def __init__(
        self,
        poset: GPoset,
        spaces: Mapping[str, VirtualRep],
        emb: Mapping[tuple[str, str], np.ndarray],
        act: Mapping[str, np.ndarray],
    ):
        self.poset = poset
        self.spaces = dict(spaces)
        self.emb = {k: np.asarray(v, dtype=float) for k, v in emb.items()}
        self.act = {k: np.asarray(v, dtype=float) for k, v in act.items()}

    def dim(self, x: str) -> int:
        return self.spaces[x].dim

    def stab_matrix(self, x: str) -> np.ndarray:
        """Action of the stabilizer generator g^{o_x} on V(x)."""
        return rep_matrix(self.spaces[x])

    def embedding(self, x: str, y: str) -> np.ndarray:
        if x == y:
            return np.eye(self.dim(x))
        return self.emb[(x, y)]

    def action_power(self, x: str, j: int) -> np.ndarray:
        """The map g^j: V(x) -> V(g^j x) as a composite of generator steps."""
        out = np.eye(self.dim(x))
        y = x
        for _ in range(j):
            out = self.act[y] @ out
            y = self.poset.perm[y]
        return out

    def validate(self, tol: float = TOLERANCE) -> Report:
        rep = Report()
        p = self.poset
        for x in p.objects:
            v = self.spaces.get(x)
            if v is None:
                rep.add("missing-space", f"no space assigned to {x}", x)
                continue
            if not v.is_actual:
                rep.add("virtual-space", f"V({x}) is not an actual representation", x)
            if v.n != p.stab_order(x):
                rep.add("stabilizer", f"V({x}) is over C{v.n} but Stab({x}) has order {p.stab_order(x)}", x)
        if not rep.ok:
            return rep
        for x in p.objects:
            gx = p.perm[x]
            if self.spaces[gx] != self.spaces[x]:
                rep.add("conjugation", f"V({x}) and V({gx}) carry different classes", x, gx)
            a = self.act.get(x)
            if a is None or a.shape != (self.dim(gx), self.dim(x)):
                rep.add("action-shape", f"action map at {x} missing or mis-shaped", x)
                continue
            if self.dim(x) and np.max(np.abs(a.T @ a - np.eye(self.dim(x)))) > tol:
                rep.add("action-isometry", f"g_{x} is not an isometry", x)
        if not rep.ok:
            return rep
        for x in p.orbit_reps():
            o = len(p.orbit(x))
            comp = self.action_power(x, o)
            if self.dim(x) and np.max(np.abs(comp - self.stab_matrix(x))) > tol:
                rep.add("group-law", f"composite around the orbit of {x} differs from the stabilizer action", x)
        for x, y in p.pairs():
            m = self.emb.get((x, y))
            if m is None or m.shape != (self.dim(x), self.dim(y)):
                rep.add("embedding-shape", f"embedding for ({x}, {y}) missing or mis-shaped", x, y)
                continue
            if self.dim(y) and np.max(np.abs(m.T @ m - np.eye(self.dim(y)))) > tol:
                rep.add("embedding-isometry", f"embedding ({x}, {y}) is not isometric", x, y)
        if not rep.ok:
            return rep
        for x, y in p.pairs():
            for z in p.below(y):
                lhs = self.emb[(x, z)]
                rhs = self.emb[(x, y)] @ self.emb[(y, z)]
                if lhs.size and np.max(np.abs(lhs - rhs)) > tol:
                    rep.add("functoriality", f"embedding ({x},{z}) differs from the composite through {y}", x, y, z)
            gx, gy = p.perm[x], p.perm[y]
            lhs = self.act[x] @ self.emb[(x, y)]
            rhs = self.emb[(gx, gy)] @ self.act[y]
            if lhs.size and np.max(np.abs(lhs - rhs)) > tol:
                rep.add("equivariance", f"g does not commute with the embedding ({x}, {y})", x, y)
        return rep

    def check(self) -> "EParam":
        rep = self.validate()
        if not rep.ok:
            raise ParamError(str(rep))
        return self

    # serialization
    def to_json(self) -> dict:
        return {
            "poset": self.poset.to_json(),
            "spaces": {x: v.to_json() for x, v in sorted(self.spaces.items())},
            "embeddings": [
                {"x": x, "y": y, "matrix": matrix_to_json(m)} for (x, y), m in sorted(self.emb.items())
            ],
            "action": {x: matrix_to_json(m) for x, m in sorted(self.act.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "EParam":
        poset = GPoset.from_json(data["poset"])
        spaces = {x: VirtualRep.from_json(v) for x, v in data["spaces"].items()}
        emb = {(e["x"], e["y"]): matrix_from_json(e["matrix"]) for e in data.get("embeddings", [])}
        act = {x: matrix_from_json(m) for x, m in data.get("action", {}).items()}
        return cls(poset, spaces, emb, act)


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=float)
    return {"field": "R", "rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": [float(v) for v in m.ravel()]}


def matrix_from_json(d: Mapping) -> np.ndarray:
    if d.get("field", "R") != "R":
        raise ValueError("only real ('R') matrices are supported in documents")
    rows, cols = int(d["rows"]), int(d["cols"])
    data = [float(Fraction(v)) if isinstance(v, str) else float(v) for v in d["data"]]
    if len(data) != rows * cols:
        raise ValueError("matrix data length does not match its shape")
    return np.array(data, dtype=float).reshape(rows, cols)


def zero_param(poset: GPoset) -> EParam:
    spaces = {x: VirtualRep(poset.stab_order(x)) for x in poset.objects}
    emb = {(x, y): np.zeros((0, 0)) for x, y in poset.pairs()}
    act = {x: np.zeros((0, 0)) for x in poset.objects}
    return EParam(poset, spaces, emb, act)


def numerical_invariant(e: EParam) -> dict[str, VirtualRep]:
    """Class of V(x) in RO(Stab_x) for each orbit representative."""
    return {x: e.spaces[x] for x in e.poset.orbit_reps()}


def build_free(poset: GPoset, seeds: Mapping[str, VirtualRep]) -> EParam:
    """Free parameterization with V*(x) realizing the seed on each orbit."""
    reps = poset.orbit_reps()
    seed_of: dict[str, VirtualRep] = {}
    for r in reps:
        s = seeds.get(r, VirtualRep(poset.stab_order(r)))
        if s.n != poset.stab_order(r):
            raise ParamError(f"seed at {r} is over C{s.n}, stabilizer has order {poset.stab_order(r)}", r)
        if not s.is_actual:
            raise ParamError(f"seed at {r} is not an actual representation", r)
        for y in poset.orbit(r):
            seed_of[y] = s
    for key in seeds:
        if key not in reps:
            raise ParamError(f"seed given at {key}, which is not an orbit representative", key)
    # position of each object in its orbit, counted from the representative
    pos: dict[str, int] = {}
    for r in reps:
        for j, y in enumerate(poset.orbit(r)):
            pos[y] = j
    down = {x: sorted([x] + poset.below(x)) for x in poset.objects}
    offs: dict[str, dict[str, int]] = {}
    for x in poset.objects:
        o, acc = {}, 0
        for y in down[x]:
            o[y] = acc
            acc += seed_of[y].dim
        offs[x] = o
    size = {x: sum(seed_of[y].dim for y in down[x]) for x in poset.objects}

    def raw_step(x: str) -> np.ndarray:
        gx = poset.perm[x]
        out = np.zeros((size[gx], size[x]))
        for y in down[x]:
            gy = poset.perm[y]
            d = seed_of[y].dim
            if not d:
                continue
            block = np.eye(d)
            if pos[y] == len(poset.orbit(y)) - 1:
                block = rep_matrix(seed_of[y])
            out[offs[gx][gy] : offs[gx][gy] + d, offs[x][y] : offs[x][y] + d] = block
        return out

    steps = {x: raw_step(x) for x in poset.objects}
    q: dict[str, np.ndarray] = {}
    spaces: dict[str, VirtualRep] = {}
    for r in reps:
        orbit = poset.orbit(r)
        a = np.eye(size[r])
        for y in orbit:
            a = steps[y] @ a
        v, qr = canonicalize(a, poset.stab_order(r))
        q[r], spaces[r] = qr, v
        cur = qr
        for j in range(1, len(orbit)):
            cur = steps[orbit[j - 1]] @ cur
            q[orbit[j]] = cur
            spaces[orbit[j]] = v
    emb = {}
    for x, y in poset.pairs():
        inc = np.zeros((size[x], size[y]))
        for z in down[y]:
            d = seed_of[z].dim
            inc[offs[x][z] : offs[x][z] + d, offs[y][z] : offs[y][z] + d] = np.eye(d)
        emb[(x, y)] = q[x].T @ inc @ q[y]
    act = {x: q[poset.perm[x]].T @ steps[x] @ q[x] for x in poset.objects}
    return EParam(poset, spaces, emb, act)


def direct_sum_with_inclusions(
    e1: EParam, e2: EParam
) -> tuple[EParam, dict[str, np.ndarray], dict[str, np.ndarray]]:
    if e1.poset != e2.poset:
        raise ParamError("direct sum requires the same poset")
    p = e1.poset
    spaces, j1, j2 = {}, {}, {}
    for x in p.objects:
        spaces[x], j1[x], j2[x] = _sum_permutation(e1.spaces[x], e2.spaces[x])
    emb = {
        (x, y): j1[x] @ e1.emb[(x, y)] @ j1[y].T + j2[x] @ e2.emb[(x, y)] @ j2[y].T for x, y in p.pairs()
    }
    act = {}
    for x in p.objects:
        gx = p.perm[x]
        act[x] = j1[gx] @ e1.act[x] @ j1[x].T + j2[gx] @ e2.act[x] @ j2[x].T
    return EParam(p, spaces, emb, act), j1, j2


def direct_sum(e1: EParam, e2: EParam) -> EParam:
    return direct_sum_with_inclusions(e1, e2)[0]


def stabilize(e: EParam, free_f: EParam) -> EParam:
    from .free import is_free

    if e.poset != free_f.poset:
        raise ParamError("stabilization requires the same poset")
    if not is_free(free_f).free:
        raise ParamError("stabilizing parameterization must be free")
    return direct_sum(e, free_f)


def canonical_param(poset: GPoset, f: Sequence[int] | Mapping[int, int]) -> EParam:
    """x -> R^{f(Ā(x))} + ... + R^{f(0)} with trivial action, right-most inclusions."""
    levels = poset.marked_levels().levels
    fv = {i: int(f[i]) for i in levels} if levels else {}
    if any(v < 0 for v in fv.values()):
        raise ParamError("canonical defining function must be non-negative")

    def d(x: str) -> int:
        return sum(fv[i] for i in range(poset.abar[x] + 1))

    spaces = {x: VirtualRep(poset.stab_order(x), {IrrepLabel(TRIV, poset.stab_order(x)): d(x)}) for x in poset.objects}
    emb = {}
    for x, y in poset.pairs():
        m = np.zeros((d(x), d(y)))
        m[d(x) - d(y) :, :] = np.eye(d(y))
        emb[(x, y)] = m
    act = {x: np.eye(d(x)) for x in poset.objects}
    return EParam(poset, spaces, emb, act)


@dataclass
class SemiFreeParam:
    """Free parameterization plus a canonical one, kept with its splitting."""

    free: EParam
    f: tuple[int, ...]

    def __post_init__(self) -> None:
        self.f = tuple(int(v) for v in self.f)
        levels = self.free.poset.marked_levels().levels
        if len(self.f) != len(levels):
            raise ParamError(f"defining function needs {len(levels)} values, got {len(self.f)}")
        self.canonical = canonical_param(self.free.poset, self.f)
        self.total, self.j_free, self.j_canonical = direct_sum_with_inclusions(self.free, self.canonical)

    @property
    def poset(self) -> GPoset:
        return self.free.poset

    def dim(self, x: str) -> int:
        return self.total.dim(x)

    def to_json(self) -> dict:
        return {"free": self.free.to_json(), "f": list(self.f)}

    @classmethod
    def from_json(cls, data: Mapping) -> "SemiFreeParam":
        return cls(EParam.from_json(data["free"]), tuple(data.get("f", ())))


def restrict_param(e: EParam, m: int) -> EParam:
    """Restrict the action to C_m = <g^{n/m}>."""
    p = e.poset
    if m < 1 or p.n % m:
        raise ParamError(f"{m} does not divide {p.n}")
    step = p.n // m
    perm = {x: p.act(x, step) for x in p.objects}
    q = GPoset(p.objects, p.gt, m, perm, p.abar, p.mu)
    spaces, basis = {}, {}
    for x in p.objects:
        spaces[x], basis[x] = restriction_basis(e.spaces[x], q.stab_order(x))
    emb = {(x, y): basis[x].T @ e.emb[(x, y)] @ basis[y] for x, y in p.pairs()}
    act = {x: basis[perm[x]].T @ e.action_power(x, step) @ basis[x] for x in p.objects}
    return EParam(q, spaces, emb, act)


def fixed_param(e: EParam, m: int) -> EParam:
    """C_m-fixed points on the fixed subposet, as a C_{n/m}-parameterization."""
    from ..gposet import fixed_subposet

    p = e.poset
    if m < 1 or p.n % m:
        raise ParamError(f"{m} does not divide {p.n}")
    q = fixed_subposet(p, m)
    spaces, basis = {}, {}
    for x in q.objects:
        spaces[x], basis[x] = fixed_basis(e.spaces[x], m)
    emb = {(x, y): basis[x].T @ e.emb[(x, y)] @ basis[y] for x, y in q.pairs()}
    act = {x: basis[q.perm[x]].T @ e.act[x] @ basis[x] for x in q.objects}
    return EParam(q, spaces, emb, act)


def fixed_semifree(s: SemiFreeParam, m: int) -> SemiFreeParam:
    fp = fixed_param(s.free, m)
    levels = fp.poset.marked_levels().levels
    return SemiFreeParam(fp, tuple(s.f[i] for i in levels))


def restrict_semifree(s: SemiFreeParam, m: int) -> SemiFreeParam:
    return SemiFreeParam(restrict_param(s.free, m), s.f)
