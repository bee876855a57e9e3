"""Finite posets with a cyclic group action, integral action and grading."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

from .config import MAX_GROUP_ORDER, max_objects
from .report import Report


def _closure(objects: Sequence[str], pairs: Iterable[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    succ: dict[str, set[str]] = {o: set() for o in objects}
    for x, y in pairs:
        succ[x].add(y)
    out: set[tuple[str, str]] = set()
    for x in objects:
        stack = list(succ[x])
        seen: set[str] = set()
        while stack:
            y = stack.pop()
            if y in seen:
                continue
            seen.add(y)
            stack.extend(succ[y])
        out.update((x, y) for y in seen)
    return frozenset(out)


def cycles_to_perm(objects: Sequence[str], cycles: Iterable[Sequence[str]]) -> dict[str, str]:
    perm = {o: o for o in objects}
    touched: set[str] = set()
    for cyc in cycles:
        cyc = list(cyc)
        for i, a in enumerate(cyc):
            if a not in perm:
                raise ValueError(f"unknown object {a!r} in action cycle")
            if a in touched:
                raise ValueError(f"object {a!r} appears twice in action cycles")
            touched.add(a)
            perm[a] = cyc[(i + 1) % len(cyc)]
    return perm


def perm_to_cycles(perm: Mapping[str, str]) -> list[list[str]]:
    seen: set[str] = set()
    out = []
    for start in sorted(perm):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        out.append(cyc)
    return out


@dataclass(frozen=True)
class MarkedLevels:
    """Marked action levels of an integral action.

    ``levels`` are the indices 0..A_max: an object with integral action a
    lies above exactly the levels 0..a.  ``s_set`` is the index set
    {0, ..., A_max - 1}.
    """

    a_max: int
    counts: tuple[tuple[str, int], ...]

    @property
    def levels(self) -> range:
        return range(self.a_max + 1)

    @property
    def s_set(self) -> range:
        return range(max(self.a_max, 0))

    def count_below(self, x: str) -> int:
        return dict(self.counts)[x]


@dataclass(frozen=True)
class LevelMap:
    """Strictly increasing map from old levels {0..A_max} into {0..top}."""

    values: tuple[int, ...]
    top: int

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("level map is not strictly increasing (hence not injective/order-preserving)")
        if self.values and (self.values[0] < 0 or self.values[-1] > self.top):
            raise ValueError("level map leaves the target range {0..top}")
        if self.top < len(self.values) - 1:
            raise ValueError("target level set too small")

    def extended(self, i: int) -> int:
        """rho(i), with rho(A_max + 1) := top + 1."""
        if i == len(self.values):
            return self.top + 1
        return self.values[i]

    @classmethod
    def identity(cls, a_max: int) -> "LevelMap":
        return cls(tuple(range(a_max + 1)), a_max)

    def then(self, other: "LevelMap") -> "LevelMap":
        """Composite: apply self first, then other."""
        if len(other.values) != self.top + 1:
            raise ValueError("level maps are not composable")
        return LevelMap(tuple(other.values[v] for v in self.values), other.top)

    def to_json(self) -> dict:
        return {"values": list(self.values), "top": self.top}

    @classmethod
    def from_json(cls, data: Mapping) -> "LevelMap":
        return cls(tuple(int(v) for v in data["values"]), int(data["top"]))


class GPoset:
    """Immutable finite G-poset for G = C_n acting through a generator permutation."""

    def __init__(
        self,
        objects: Iterable[str],
        relations: Iterable[tuple[str, str]] = (),
        n: int = 1,
        perm: Mapping[str, str] | None = None,
        abar: Mapping[str, int] | None = None,
        mu: Mapping[str, int] | None = None,
    ):
        objs = tuple(sorted(set(objects)))
        if len(objs) > max_objects():
            raise ValueError(f"{len(objs)} objects exceed the cap {max_objects()}")
        if not (isinstance(n, int) and 1 <= n <= MAX_GROUP_ORDER):
            raise ValueError(f"group order must be in 1..{MAX_GROUP_ORDER}")
        objset = set(objs)
        rel = [(str(x), str(y)) for x, y in relations]
        for x, y in rel:
            if x not in objset or y not in objset:
                raise ValueError(f"relation ({x}, {y}) mentions an unknown object")
        p = dict(perm) if perm else {o: o for o in objs}
        if set(p) != objset or set(p.values()) != objset:
            raise ValueError("action is not a permutation of the objects")
        self.objects = objs
        self.n = n
        self.perm = {o: p[o] for o in objs}
        self.gt = _closure(objs, rel)
        a = dict(abar) if abar is not None else {o: 0 for o in objs}
        if set(a) != objset:
            raise ValueError("integral action must be defined on every object")
        self.abar = {o: int(a[o]) for o in objs}
        if mu is not None and set(mu) != objset:
            raise ValueError("grading must be defined on every object")
        self.mu = {o: int(mu[o]) for o in objs} if mu is not None else None

    # structure
    def is_gt(self, x: str, y: str) -> bool:
        return (x, y) in self.gt

    def below(self, x: str) -> list[str]:
        return sorted(y for (a, y) in self.gt if a == x)

    def above(self, y: str) -> list[str]:
        return sorted(a for (a, b) in self.gt if b == y)

    def pairs(self) -> list[tuple[str, str]]:
        return sorted(self.gt)

    def act(self, x: str, j: int = 1) -> str:
        j %= self.n
        for _ in range(j):
            x = self.perm[x]
        return x

    def orbit(self, x: str) -> list[str]:
        out = [x]
        y = self.perm[x]
        while y != x:
            out.append(y)
            y = self.perm[y]
        return out

    def orbit_rep(self, x: str) -> str:
        return min(self.orbit(x))

    def orbit_reps(self) -> list[str]:
        return sorted({self.orbit_rep(x) for x in self.objects})

    def stab_order(self, x: str) -> int:
        return self.n // len(self.orbit(x))

    def pair_stab_order(self, x: str, y: str) -> int:
        return gcd(self.stab_order(x), self.stab_order(y))

    def is_fixed_by(self, x: str, m: int) -> bool:
        return self.stab_order(x) % m == 0

    def abar_pair(self, x: str, y: str) -> int:
        return self.abar[x] - self.abar[y] - 1

    @cached_property
    def topo_order(self) -> list[str]:
        """Linear extension, minimal objects first (ties broken by name)."""
        indeg = {o: 0 for o in self.objects}
        for x, y in self.gt:
            if x != y:
                indeg[x] += 1
        ready = sorted(o for o, d in indeg.items() if d == 0)
        out: list[str] = []
        import heapq

        heapq.heapify(ready)
        while ready:
            y = heapq.heappop(ready)
            out.append(y)
            for x in self.above(y):
                indeg[x] -= 1
                if indeg[x] == 0:
                    heapq.heappush(ready, x)
        if len(out) != len(self.objects):
            raise ValueError("order relation has a cycle")
        return out

    def marked_levels(self) -> MarkedLevels:
        a_max = max(self.abar.values(), default=-1)
        return MarkedLevels(a_max, tuple((o, self.abar[o] + 1) for o in self.objects))

    def with_mu(self, mu: Mapping[str, int] | None) -> "GPoset":
        return GPoset(self.objects, self.gt, self.n, self.perm, self.abar, mu)

    def with_abar(self, abar: Mapping[str, int]) -> "GPoset":
        return GPoset(self.objects, self.gt, self.n, self.perm, abar, self.mu)

    def full_subposet(self, objs: Iterable[str], n: int | None = None) -> "GPoset":
        keep = set(objs)
        return GPoset(
            keep,
            [(x, y) for x, y in self.gt if x in keep and y in keep],
            self.n if n is None else n,
            {o: self.perm[o] for o in keep},
            {o: self.abar[o] for o in keep},
            {o: self.mu[o] for o in keep} if self.mu is not None else None,
        )

    def covers(self) -> list[tuple[str, str]]:
        return sorted(primitive_pairs(self))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GPoset):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.gt == other.gt
            and self.n == other.n
            and self.perm == other.perm
            and self.abar == other.abar
            and self.mu == other.mu
        )

    def __hash__(self) -> int:
        return hash((self.objects, self.gt, self.n))

    def __repr__(self) -> str:
        return f"GPoset(C{self.n}, objects={list(self.objects)}, covers={self.covers()})"

    # serialization
    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "covers": [list(p) for p in self.covers()],
            "n": self.n,
            "action": perm_to_cycles(self.perm),
            "abar": dict(self.abar),
            "mu": dict(self.mu) if self.mu is not None else None,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GPoset":
        objs = [str(o) for o in data["objects"]]
        perm = cycles_to_perm(objs, data.get("action", []))
        mu = data.get("mu")
        return cls(
            objs,
            [(str(x), str(y)) for x, y in data.get("covers", [])],
            int(data.get("n", 1)),
            perm,
            {str(k): int(v) for k, v in data["abar"].items()},
            {str(k): int(v) for k, v in mu.items()} if mu is not None else None,
        )


def validate(p: GPoset) -> Report:
    rep = Report()
    for x, y in sorted(p.gt):
        if x == y:
            rep.add("order-cycle", f"order relation is not strict: {x} > {x}", x)
    # generator order divides n
    for x in p.objects:
        if p.act(x, p.n) != x:
            rep.add("action-order", f"generator orbit of {x} has length not dividing {p.n}", x)
    # order preservation for every power of the generator
    for j in range(1, p.n):
        for x, y in sorted(p.gt):
            gx, gy = p.act(x, j), p.act(y, j)
            if not p.is_gt(gx, gy):
                rep.add("action-order-preserving", f"g^{j} does not preserve {x} > {y}", x, y)
    for x in p.objects:
        if p.abar[x] < -1:
            rep.add("abar-range", f"integral action of {x} is below -1", x)
        gx = p.perm[x]
        if p.abar[gx] != p.abar[x]:
            rep.add("abar-equivariance", f"integral action not equivariant at {x}", x, gx)
        if p.mu is not None and p.mu[gx] != p.mu[x]:
            rep.add("mu-equivariance", f"grading not equivariant at {x}", x, gx)
    for x, y in sorted(p.gt):
        if x != y and p.abar[x] <= p.abar[y]:
            rep.add("abar-decreasing", f"Ā not strictly decreasing along {x} > {y}", x, y)
    return rep


def primitive_pairs(p: GPoset) -> set[tuple[str, str]]:
    out = set()
    for x, y in p.gt:
        if x == y:
            continue
        if not any(p.is_gt(x, z) and p.is_gt(z, y) for z in p.objects):
            out.add((x, y))
    return out


def fixed_subposet(p: GPoset, m: int) -> GPoset:
    """Full subposet on C_m-fixed objects with the residual C_{n/m} action."""
    if m < 1 or p.n % m:
        raise ValueError(f"{m} does not divide {p.n}")
    keep = [x for x in p.objects if p.is_fixed_by(x, m)]
    return p.full_subposet(keep, p.n // m)


@dataclass(frozen=True)
class Restratification:
    poset: GPoset
    rho: LevelMap
    shift: int
    defect: int
    inserted_levels: int

    def abar_increment(self, x: str, old: GPoset) -> int:
        return self.poset.abar[x] - old.abar[x]


def restratified_abar(a: int, rho: LevelMap) -> int:
    """Count of new marked levels below an object with old action a, minus one.

    Inserted levels in the gap above old level a are placed below the objects
    in that gap, so the count is rho(a + 1) with rho(A_max + 1) = top + 1.
    """
    return rho.extended(a + 1) - 1


def restratify_action(p: GPoset, rho: LevelMap, shift: int = 0) -> Restratification:
    levels = p.marked_levels()
    if len(rho.values) != levels.a_max + 1:
        raise ValueError(
            f"level map has {len(rho.values)} values but the poset has {levels.a_max + 1} marked levels"
        )
    lower = rho.values[0] if rho.values else rho.top + 1
    if not (0 <= shift <= lower):
        raise ValueError(f"shift M={shift} must satisfy 0 <= M <= rho(0) = {lower}")
    new_abar = {x: restratified_abar(a, rho) for x, a in p.abar.items()}
    q = p.with_abar(new_abar)
    defect = rho.top - len(levels.s_set)
    new_max = q.marked_levels().a_max
    inserted = len(range(new_max + 1)) - len(levels.levels) if p.objects else rho.top + 1
    return Restratification(q, rho, shift, defect, inserted)


def stratum_index_map(old: GPoset, new: GPoset, rho: LevelMap, x: str, y: str) -> dict[int, int]:
    """Old stratum index j of pair (x, y) -> new index.

    Index j of S(x, y) corresponds to the marked level Ā(x) - j.
    """
    out = {}
    for j in range(old.abar_pair(x, y)):
        level = old.abar[x] - j
        out[j] = new.abar[x] - rho.values[level]
    return out
