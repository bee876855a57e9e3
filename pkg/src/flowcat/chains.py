"""Integer chain complexes, Smith normal form homology and filtration pages."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

Matrix = list[list[int]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    if not a:
        return []
    inner = len(b) if inner is None else inner
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        for k, aik in enumerate(row):
            if aik:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        out[i][j] += aik * bk[j]
    return out


def smith_diagonal(mat: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix."""
    a = [list(map(int, row)) for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag: list[int] = []
    t = 0
    while t < rows and t < cols:
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    done = False
            if done:
                # divisibility of the remaining block
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p), None
                )
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest remaining entry of row/column t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def rank_mod(mat: Sequence[Sequence[int]], p: int) -> int:
    a = [[x % p for x in row] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def rank_q(mat: Sequence[Sequence[int]]) -> int:
    a = [[Fraction(x) for x in row] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            if a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def rank(mat: Sequence[Sequence[int]], ring: str = "Q") -> int:
    if ring in ("Q", "Z"):
        return rank_q(mat)
    if ring == "Z2":
        return rank_mod(mat, 2)
    if ring.startswith("Z") and ring[1:].isdigit():
        return rank_mod(mat, int(ring[1:]))
    raise ValueError(f"unknown ring {ring}")


@dataclass(frozen=True)
class HomologyGroup:
    rank: int
    torsion: tuple[int, ...] = ()
    ring: str = "Z"

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append(self.ring if self.rank == 1 else f"{self.ring}^{self.rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"ring": self.ring, "rank": self.rank, "torsion": list(self.torsion)}


class D2Error(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass
class ChainComplex:
    """Free complex with labeled bases; ``d[k]`` maps degree k to k-1 (rows = gens[k-1])."""

    gens: dict[int, list[str]]
    d: dict[int, Matrix] = field(default_factory=dict)
    alpha: dict[str, int] | None = None

    def degrees(self) -> list[int]:
        return sorted(self.gens)

    def ngens(self, k: int) -> int:
        return len(self.gens.get(k, []))

    def diff(self, k: int) -> Matrix:
        m = self.d.get(k)
        if m is None:
            return zeros(self.ngens(k - 1), self.ngens(k))
        return m

    def entry(self, x: str, y: str) -> int:
        for k, names in self.gens.items():
            if x in names:
                if y in self.gens.get(k - 1, []):
                    return self.diff(k)[self.gens[k - 1].index(y)][names.index(x)]
                return 0
        return 0

    def d_squared_violations(self) -> list[tuple[str, str, int]]:
        out = []
        for k in self.degrees():
            if self.ngens(k - 2) == 0 or self.ngens(k) == 0:
                continue
            prod = matmul(self.diff(k - 1), self.diff(k), self.ngens(k - 1))
            for i, row in enumerate(prod):
                for j, v in enumerate(row):
                    if v:
                        out.append((self.gens[k][j], self.gens[k - 2][i], v))
        return out

    def check(self) -> None:
        bad = self.d_squared_violations()
        if bad:
            x, z, v = bad[0]
            raise D2Error(f"d^2 != 0: coefficient {v} from {x} to {z}", (x, z, v))

    def to_json(self) -> dict:
        out = {
            "gens": {str(k): list(v) for k, v in sorted(self.gens.items())},
            "d": {str(k): m for k, m in sorted(self.d.items())},
        }
        if self.alpha is not None:
            out["alpha"] = dict(sorted(self.alpha.items()))
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "ChainComplex":
        return cls(
            {int(k): list(v) for k, v in data["gens"].items()},
            {int(k): [list(map(int, r)) for r in m] for k, m in data.get("d", {}).items()},
            dict(data["alpha"]) if data.get("alpha") is not None else None,
        )


def homology(c: ChainComplex, ring: str = "Z") -> dict[int, HomologyGroup]:
    """Homology in every degree between the lowest and highest generator."""
    out = {}
    degs = c.degrees()
    for k in range(degs[0], degs[-1] + 1) if degs else []:
        n = c.ngens(k)
        if ring == "Z":
            r_out = len(smith_diagonal(c.diff(k))) if c.ngens(k - 1) and n else 0
            inv = smith_diagonal(c.diff(k + 1)) if c.ngens(k + 1) and n else []
            tors = tuple(x for x in inv if x > 1)
            out[k] = HomologyGroup(n - r_out - len(inv), tors)
        else:
            r_out = rank(c.diff(k), ring) if c.ngens(k - 1) and n else 0
            r_in = rank(c.diff(k + 1), ring) if c.ngens(k + 1) and n else 0
            out[k] = HomologyGroup(n - r_out - r_in, (), ring)
    return out


# filtration spectral sequence ------------------------------------------------------

@dataclass
class Pages:
    e1: dict[tuple[int, int], list[str]]
    d1: dict[tuple[int, int], Matrix]
    e2: dict[tuple[int, int], HomologyGroup]

    def to_json(self) -> dict:
        key = lambda st: f"{st[0]},{st[1]}"  # noqa: E731
        return {
            "E1": {key(k): v for k, v in sorted(self.e1.items())},
            "d1": {key(k): v for k, v in sorted(self.d1.items())},
            "E2": {key(k): v.to_json() for k, v in sorted(self.e2.items())},
        }


def spectral_sequence(c: ChainComplex, alpha: Mapping[str, int], ring: str = "Z") -> Pages:
    """E1 free on generators at (alpha, deg - alpha); d1 keeps entries where alpha drops by one."""
    pos: dict[str, tuple[int, int]] = {}
    for k, names in c.gens.items():
        for x in names:
            pos[x] = (alpha[x], k - alpha[x])
    for k in c.degrees():
        for j, x in enumerate(c.gens[k]):
            for i, y in enumerate(c.gens.get(k - 1, [])):
                if c.diff(k)[i][j] and alpha[x] <= alpha[y]:
                    raise ValueError(f"filtration is not strict along {x} -> {y}")
    e1: dict[tuple[int, int], list[str]] = {}
    for x, st in sorted(pos.items(), key=lambda kv: (kv[1], kv[0])):
        e1.setdefault(st, []).append(x)
    d1: dict[tuple[int, int], Matrix] = {}
    for (s, t), src in e1.items():
        tgt = e1.get((s - 1, t), [])
        m = zeros(len(tgt), len(src))
        for j, x in enumerate(src):
            for i, y in enumerate(tgt):
                m[i][j] = c.entry(x, y)
        d1[(s, t)] = m
    # homology of each row (fixed t) as a complex indexed by s
    e2 = {}
    for t in sorted({st[1] for st in e1}):
        row = {s: names for (s, tt), names in e1.items() if tt == t}
        sub = ChainComplex(row, {s: d1[(s, t)] for s in row if (s - 1, t) in e1})
        for s, h in homology(sub, ring).items():
            e2[(s, t)] = h
    return Pages(e1, d1, e2)


# exactness of long exact sequences -------------------------------------------------

def induced_rank(f: Matrix, z_src: Matrix, b_tgt: Matrix, ring: str) -> int:
    """Rank of the map on homology induced by f, given cycle and boundary spanning columns."""
    fz = matmul(f, z_src) if f and z_src and z_src[0] else [[] for _ in range(len(f))]
    rows = len(f) if f else len(b_tgt)
    if rows == 0:
        return 0
    joined = [list(fz[i] if fz else []) + list(b_tgt[i] if b_tgt else []) for i in range(rows)]
    base = [list(b_tgt[i]) for i in range(rows)] if b_tgt and b_tgt[0] else [[] for _ in range(rows)]
    return rank(joined, ring) - (rank(base, ring) if base and base[0] else 0)


def _kernel_basis_q(mat: Matrix, ncols: int) -> Matrix:
    """Integer column basis of the rational kernel (columns scaled to integers)."""
    from math import lcm

    rows = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        a[r] = [x / a[r][c] for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    cols = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fc]
        m = lcm(*[x.denominator for x in v])
        cols.append([int(x * m) for x in v])
    return [[cols[j][i] for j in range(len(cols))] for i in range(ncols)]


def _kernel_basis_mod(mat: Matrix, ncols: int, p: int) -> Matrix:
    rows = len(mat)
    a = [[x % p for x in row] for row in mat]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    cols = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-a[i][fc]) % p
        cols.append(v)
    return [[cols[j][i] for j in range(len(cols))] for i in range(ncols)]


def cycles(c: ChainComplex, k: int, ring: str) -> Matrix:
    n = c.ngens(k)
    if n == 0:
        return []
    m = c.diff(k) if c.ngens(k - 1) else []
    if ring in ("Q", "Z"):
        return _kernel_basis_q(m, n) if m else [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    p = 2 if ring == "Z2" else int(ring[1:])
    return _kernel_basis_mod(m, n, p) if m else [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def boundaries(c: ChainComplex, k: int) -> Matrix:
    if c.ngens(k) == 0:
        return []
    if c.ngens(k + 1) == 0:
        return [[] for _ in range(c.ngens(k))]
    return [list(r) for r in c.diff(k + 1)]
