"""Independent reference computations used only by the tests.

None of these reuse the package's own algorithms: representations go through
floating character tables, integer homology through sympy, mod-2 homology
through exhaustive enumeration, and degrees through boundary winding numbers.
"""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np
import sympy
from sympy.matrices.normalforms import smith_normal_form

from flowcat.kuranishi import fixed_chart, pt_degree, stabilize_chart
from flowcat.category import ChartPair
from flowcat.repring import IrrepLabel, VirtualRep


# representations ---------------------------------------------------------------

def real_irreps(n: int) -> list[tuple[str, int]]:
    out = [("triv", 0)]
    if n % 2 == 0:
        out.append(("sgn", 0))
    out += [("rot", k) for k in range(1, (n + 1) // 2) if 2 * k < n]
    return out


def irrep_character(kind: str, k: int, n: int) -> np.ndarray:
    """Real character of an irrep on g^0, ..., g^{n-1}."""
    g = np.arange(n)
    if kind == "triv":
        return np.ones(n)
    if kind == "sgn":
        return np.where(g % 2 == 0, 1.0, -1.0)
    return 2.0 * np.cos(2 * np.pi * k * g / n)


def rep_character(v) -> np.ndarray:
    out = np.zeros(v.n)
    for lab, m in v.mult.items():
        out += m * irrep_character(lab.kind, lab.k, v.n)
    return out


def decompose(chi: np.ndarray) -> dict[tuple[str, int], int]:
    """Multiplicities of real irreps in a real character, by inner products."""
    n = len(chi)
    out = {}
    for kind, k in real_irreps(n):
        psi = irrep_character(kind, k, n)
        norm = float(psi @ psi) / n
        m = float(chi @ psi) / n / norm
        r = int(round(m))
        assert abs(m - r) < 1e-9, "character is not virtual"
        if r:
            out[(kind, k)] = r
    return out


def as_dict(v) -> dict[tuple[str, int], int]:
    return {(lab.kind, lab.k): m for lab, m in v.mult.items() if m}


def restrict_char(chi: np.ndarray, m: int) -> np.ndarray:
    n = len(chi)
    return np.array([chi[(n // m) * j] for j in range(m)])


def induce_char(chi: np.ndarray, n: int) -> np.ndarray:
    m = len(chi)
    out = np.zeros(n)
    for g in range(n):
        if g % (n // m) == 0:
            out[g] = (n // m) * chi[g // (n // m)]
    return out


def fixed_char(chi: np.ndarray, m: int) -> np.ndarray:
    """Character of the C_m-fixed part as a C_{n/m}-representation (projection averaging)."""
    n = len(chi)
    sub = [(n // m) * j for j in range(m)]
    q = n // m
    out = np.zeros(q)
    for t in range(q):
        # trace of g^t restricted to the fixed part: average over the coset g^t C_m
        out[t] = sum(chi[(t + h) % n] for h in sub) / m
    return out


def fixed_dim(v, m: int) -> int:
    chi = rep_character(v)
    n = len(chi)
    return int(round(sum(chi[(n // m) * j] for j in range(m)) / m))


# integer and mod-2 homology ------------------------------------------------------

def snf_diagonal(mat) -> list[int]:
    if not mat or not mat[0]:
        return []
    d = smith_normal_form(sympy.Matrix(mat), domain=sympy.ZZ)
    out = [abs(int(d[i, i])) for i in range(min(d.shape))]
    return [x for x in out if x]


def homology_z(gens: dict[int, list[str]], diff) -> dict[int, tuple[int, tuple[int, ...]]]:
    """(rank, torsion) per degree; ``diff(k)`` is the integer matrix C_k -> C_{k-1}."""
    out = {}
    degs = sorted(k for k, v in gens.items() if v)
    if not degs:
        return out
    for k in range(degs[0], degs[-1] + 1):
        n = len(gens.get(k, []))
        a = diff(k) if n and gens.get(k - 1) else []
        b = diff(k + 1) if n and gens.get(k + 1) else []
        ra = len(snf_diagonal(a))
        inv = snf_diagonal(b)
        out[k] = (n - ra - len(inv), tuple(x for x in inv if x > 1))
    return out


def _gf2_kernel_size(mat, ncols: int) -> int:
    count = 0
    for bits in itertools.product((0, 1), repeat=ncols):
        if all(sum(r[j] * bits[j] for j in range(ncols)) % 2 == 0 for r in mat):
            count += 1
    return count


def _gf2_image_size(mat, ncols: int) -> int:
    return len({tuple(sum(r[j] * b[j] for j in range(ncols)) % 2 for r in mat)
                for b in itertools.product((0, 1), repeat=ncols)})


def homology_z2(gens: dict[int, list[str]], diff) -> dict[int, int]:
    """Dimension over F_2 by enumerating all chains (small complexes only)."""
    out = {}
    degs = sorted(k for k, v in gens.items() if v)
    if not degs:
        return out
    for k in range(degs[0], degs[-1] + 1):
        n = len(gens.get(k, []))
        assert n <= 12
        ker = _gf2_kernel_size(diff(k), n) if gens.get(k - 1) else 2 ** n
        nn = len(gens.get(k + 1, []))
        im = _gf2_image_size(diff(k + 1), nn) if nn and n else 1
        out[k] = (ker // im).bit_length() - 1
    return out


# degrees of PL sections ------------------------------------------------------------

def _chain_boundary(c) -> dict[tuple[int, ...], int]:
    """Boundary of sum mult * [v0..vd] with faces stored as sorted tuples."""
    out: dict[tuple[int, ...], int] = {}
    for s, m in zip(c.simplices, c.mults):
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            key = tuple(sorted(face))
            perm = sorted(range(len(face)), key=lambda t: face[t])
            sgn = _perm_parity(perm)
            out[key] = out.get(key, 0) + m * (-1) ** i * sgn
    return {f: v for f, v in out.items() if v}


def _perm_parity(p: list[int]) -> int:
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def _angle_along(a: np.ndarray, b: np.ndarray, samples: int = 64) -> float:
    t = np.linspace(0.0, 1.0, samples + 1)
    pts = (1 - t)[:, None] * a + t[:, None] * b
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    steps = np.diff(ang)
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    return float(steps.sum())


def winding_degree(c) -> int:
    """Degree of a vdim-0 PL section via its boundary (dimension 0, 1 or 2).

    In dimension 1 this is half the sum of boundary signs; in dimension 2 it is
    the winding number of the section along the finely sampled boundary cycle.
    """
    d = c.d
    if not c.simplices:
        return 0
    if d == 0:
        return c.v_sign * sum(c.mults)
    bnd = _chain_boundary(c)
    if d == 1:
        tot = sum(coef * np.sign(c.section[f[0], 0]) for f, coef in bnd.items())
        assert all(c.section[f[0], 0] != 0 for f in bnd)
        return c.v_sign * int(round(tot / 2))
    if d == 2:
        tot = 0.0
        for (a, b), coef in bnd.items():
            tot += coef * _angle_along(c.section[a], c.section[b])
        return c.v_sign * int(round(tot / (2 * np.pi)))
    raise NotImplementedError(d)


def grid_sign_count(func, a: float, b: float, cells: int = 4096) -> int:
    """Degree of a scalar function on [a, b] by counting sign changes on a fine grid."""
    xs = np.linspace(a, b, cells + 1)
    signs = [s for s in np.sign([func(x) for x in xs]) if s]
    return int(sum((v - u) // 2 for u, v in zip(signs, signs[1:])))


# fixed-point complexes -----------------------------------------------------------

def fixed_point_complex(f, m: int) -> tuple[dict[str, int], dict[tuple[str, str], int]]:
    """Pairwise fixed-chart complex: fixed gradings and the degree of every adjacent pair.

    Each chart is stabilized eagerly before taking fixed points, and the fixed
    gradings come from character averages of the framing spaces.
    """
    p = f.poset
    fixed = [x for x in p.objects if _fixed_obj(p, x, m)]
    mu = {}
    for x in fixed:
        v0, v1 = f.v0.total.spaces[x], f.v1.total.spaces[x]
        mu[x] = fixed_dim(v0, m) - fixed_dim(v1, m) + p.abar[x] + 1
    degs = {}
    for x in fixed:
        for y in fixed:
            if not p.is_gt(x, y) or mu[x] - mu[y] != 1:
                continue
            d = f.pairs.get((x, y))
            if d is None:
                continue
            assert isinstance(d, ChartPair), "degree-only data cannot be fixed"
            c = d.chart
            w = d.stabilizer_rep()
            if not w.is_zero:
                c = stabilize_chart(c, w)
            fc = fixed_chart(c, m)
            val = pt_degree(fc) if fc.simplices else 0
            if d.flip:
                val = -val
            if val:
                degs[(x, y)] = val
    return mu, degs


def _fixed_obj(p, x: str, m: int) -> bool:
    # x is fixed by the order-m subgroup iff g^{n/m} fixes it
    y = x
    for _ in range(p.n // m):
        y = p.perm[y]
    return y == x


# freeness of fixed parameterizations ---------------------------------------------

def fixed_points_stay_free(p, seeds, m) -> bool:
    """For each C_m-fixed x and each non-fixed z < x whose free summand has vectors fixed by
    its isotropy in C_m, the fixed objects y with z < y <= x must have a least element."""
    fixed = {x for x in p.objects if p.act(x, p.n // m) == x}
    for z in p.objects:
        if z in fixed:
            continue
        seed = seeds.get(p.orbit_rep(z))
        if seed is None or fixed_dim(seed, gcd(m, p.stab_order(z))) == 0:
            continue
        for x in fixed:
            if not p.is_gt(x, z):
                continue
            between = [y for y in fixed if p.is_gt(y, z) and (y == x or p.is_gt(x, y))]
            if not any(all(w == y or p.is_gt(w, y) for w in between) for y in between):
                return False
    return True


# parameterizations ----------------------------------------------------------------

def independent_iso_defect(e1, e2, maps) -> float:
    p = e1.poset
    worst = 0.0
    for x in p.objects:
        m = maps[x]
        if m.size:
            worst = max(worst, np.abs(m.T @ m - np.eye(m.shape[1])).max(), np.abs(m @ m.T - np.eye(m.shape[0])).max())
            worst = max(worst, np.abs(maps[p.perm[x]] @ e1.act[x] - e2.act[x] @ m).max())
    for x, y in p.pairs():
        a = maps[x] @ e1.emb[(x, y)] - e2.emb[(x, y)] @ maps[y]
        if a.size:
            worst = max(worst, np.abs(a).max())
    return float(worst)


def expected_shift(sp, seeds):
    """Sum over orbits of the seed induced up from the stabilizer, plus a trivial block."""
    p = sp.poset
    chi = np.full(p.n, float(sum(sp.f)))
    for r in p.orbit_reps():
        if r in seeds:
            chi += induce_char(rep_character(seeds[r]), p.n)
    return VirtualRep(p.n, {IrrepLabel(kind, p.n, k): m for (kind, k), m in decompose(chi).items()})


# brute-force degree by fine subdivision ---------------------------------------------

def _fine_grid(d: int, k: int) -> tuple[list[tuple[int, ...]], list[tuple[tuple[int, ...], ...]]]:
    """Edgewise subdivision of the standard d-simplex (d <= 2) into k^d pieces, in integer coordinates."""
    if d == 1:
        pts = [(i,) for i in range(k + 1)]
        return pts, [((i,), (i + 1,)) for i in range(k)]
    pts = [(i, j) for i in range(k + 1) for j in range(k + 1 - i)]
    tris = []
    for i in range(k):
        for j in range(k - i):
            tris.append(((i, j), (i + 1, j), (i, j + 1)))
            if i + j + 2 <= k:
                tris.append(((i + 1, j), (i + 1, j + 1), (i, j + 1)))
    return pts, tris


def fine_sign_count(c, k: int = 8, noise: float = 1e-6, seed: int = 0) -> int:
    """Signed zero count after a fine subdivision and a random perturbation of the fine vertices.

    Every small simplex is solved directly: the zero of its affine section is
    found by a linear solve and counted with the sign of the Jacobian in the
    parent simplex's vertex frame.  Perturbations are keyed by position so
    shared faces agree.
    """
    d = c.d
    if not c.simplices:
        return 0
    if d == 0:
        return c.v_sign * sum(c.mults)
    rng = np.random.default_rng(seed)
    bumps: dict[tuple, np.ndarray] = {}
    scale = max(1.0, float(np.abs(c.section).max()))
    pts, pieces = _fine_grid(d, k)
    total = 0
    for s, m in zip(c.simplices, c.mults):
        coords = c.coords[list(s)]
        sect = c.section[list(s)]

        def at(q):
            lam = np.array([k - sum(q), *q], dtype=float) / k
            key = tuple(np.round(lam @ coords, 9))
            if key not in bumps:
                bumps[key] = noise * scale * rng.standard_normal(c.r)
            return lam @ sect + bumps[key]

        vals = {q: at(q) for q in pts}
        for piece in pieces:
            q = np.array(piece, dtype=float) / k
            sv = np.array([vals[p] for p in piece])
            jac_q = (q[1:] - q[0]).T
            jac_s = (sv[1:] - sv[0]).T
            # sigma(p) = sv0 + jac_s @ mu with mu barycentric in the piece; zero iff mu feasible
            try:
                mu = np.linalg.solve(jac_s, -sv[0])
            except np.linalg.LinAlgError:
                continue
            if np.all(mu > 0) and mu.sum() < 1:
                sign = np.sign(np.linalg.det(jac_s)) * np.sign(np.linalg.det(jac_q))
                total += int(m * sign)
    return c.v_sign * total
